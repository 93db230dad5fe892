//! Degree-preserving algebra maps given on generators, with a memoized
//! per-degree evaluator producing GF(2) matrices.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::gf2::{for_each_bit, words_for, BitMatrix};
use super::groebner::QuotientRing;
use super::poly::{Monomial, Polynomial};
use super::AlgebraError;

/// A ring map determined by generator images (stored as target normal forms).
#[derive(Debug, Clone)]
pub struct AlgebraMap {
    pub id: String,
    source: Arc<QuotientRing>,
    target: Arc<QuotientRing>,
    images: Vec<Polynomial>,
}

impl AlgebraMap {
    /// Builds a map from generator-name → polynomial-text images. Every
    /// source generator needs an image of its own degree (or zero).
    pub fn parse(
        id: impl Into<String>,
        source: Arc<QuotientRing>,
        target: Arc<QuotientRing>,
        images: &BTreeMap<String, String>,
    ) -> Result<Self, AlgebraError> {
        let id = id.into();
        for name in images.keys() {
            if !source.names().contains(name) {
                return Err(AlgebraError::UnknownGenerator { name: name.clone(), text: format!("map {id}") });
            }
        }
        let mut polys = Vec::with_capacity(source.names().len());
        for name in source.names() {
            let text = images
                .get(name)
                .ok_or_else(|| AlgebraError::MissingImage { map: id.clone(), generator: name.clone() })?;
            polys.push(target.presentation().parse_polynomial(text)?);
        }
        Self::new(id, source, target, polys)
    }

    pub fn new(
        id: impl Into<String>,
        source: Arc<QuotientRing>,
        target: Arc<QuotientRing>,
        images: Vec<Polynomial>,
    ) -> Result<Self, AlgebraError> {
        let id = id.into();
        if images.len() != source.names().len() {
            return Err(AlgebraError::MissingImage { map: id, generator: format!("#{}", images.len()) });
        }
        let mut nfs = Vec::with_capacity(images.len());
        for (i, img) in images.iter().enumerate() {
            let d = source.presentation().degrees[i];
            if !img.is_zero() && img.homogeneous_degree() != Some(d) {
                return Err(AlgebraError::DegreeMismatch {
                    map: id,
                    generator: source.names()[i].clone(),
                    expected: d,
                });
            }
            nfs.push(target.normal_form(img)?);
        }
        Ok(AlgebraMap { id, source, target, images: nfs })
    }

    /// The identity map of a ring.
    pub fn identity(ring: Arc<QuotientRing>) -> Self {
        let images = (0..ring.names().len()).map(|i| Polynomial::monomial(ring.presentation().generator(i))).collect();
        AlgebraMap { id: format!("id_{}", ring.label()), source: ring.clone(), target: ring, images }
    }

    pub fn source(&self) -> &Arc<QuotientRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<QuotientRing> {
        &self.target
    }

    pub fn images(&self) -> &[Polynomial] {
        &self.images
    }

    /// Image of a monomial, as a target normal form.
    pub fn eval_monomial(&self, m: &Monomial) -> Result<Polynomial, AlgebraError> {
        let mut acc = Polynomial::one();
        for (i, img) in self.images.iter().enumerate() {
            for _ in 0..m.exponent(i) {
                let p =
                    acc.mul(img).ok_or_else(|| AlgebraError::DegreeOverflow { detail: "exponent overflow".into() })?;
                acc = self.target.normal_form(&p)?;
                if acc.is_zero() {
                    return Ok(acc);
                }
            }
        }
        Ok(acc)
    }

    /// Image of a polynomial: substitute, expand, reduce.
    pub fn eval(&self, f: &Polynomial) -> Result<Polynomial, AlgebraError> {
        let mut acc = Polynomial::zero();
        for m in f.terms() {
            acc = acc.add(&self.eval_monomial(m)?);
        }
        Ok(acc)
    }

    /// Indices of source relations (of degree ≤ the target bound) whose image
    /// is not zero; empty iff the map is well defined in that range.
    pub fn ill_defined_relations(&self) -> Result<Vec<usize>, AlgebraError> {
        let mut bad = Vec::new();
        for (k, r) in self.source.presentation().relations.iter().enumerate() {
            if r.homogeneous_degree().is_some_and(|d| d > self.target.dmax()) {
                continue;
            }
            if !self.eval(r)?.is_zero() {
                bad.push(k);
            }
        }
        Ok(bad)
    }

    /// `second ∘ self`.
    pub fn then(&self, second: &AlgebraMap) -> Result<AlgebraMap, AlgebraError> {
        if !Arc::ptr_eq(&self.target, &second.source)
            && !self.target.presentation().same_presentation(second.source.presentation())
        {
            return Err(AlgebraError::Incomposable { first: self.id.clone(), second: second.id.clone() });
        }
        let images = self.images.iter().map(|p| second.eval(p)).collect::<Result<Vec<_>, _>>()?;
        AlgebraMap::new(format!("{}*{}", second.id, self.id), self.source.clone(), second.target.clone(), images)
    }

    /// Matrix of the map in degree `q` (rows: target basis, columns: source basis).
    pub fn matrix(&self, q: u16) -> Result<BitMatrix, AlgebraError> {
        MapEvaluator::new(self).matrix(q)
    }
}

/// Matrix of `Σ coeff · map` in degree `q`; an empty list gives no shape, so
/// the caller supplies it.
pub fn map_matrix(maps: &[(Arc<AlgebraMap>, u8)], q: u16, rows: usize, cols: usize) -> Result<BitMatrix, AlgebraError> {
    let mut acc = BitMatrix::zeros(rows, cols);
    for (m, c) in maps {
        if c % 2 == 1 {
            acc.add_assign(&m.matrix(q)?);
        }
    }
    Ok(acc)
}

/// Incremental evaluator: the image of a standard monomial `m` of degree `q`
/// is the image of `m / x_i` (computed in an earlier degree) times the image
/// of `x_i`, with `i` the first variable of `m`. Multiplication by each
/// generator image is tabulated per degree.
pub struct MapEvaluator<'a> {
    map: &'a AlgebraMap,
    columns: Vec<Vec<Vec<u64>>>,
    tables: HashMap<(usize, u16), Vec<Vec<u64>>>,
}

impl<'a> MapEvaluator<'a> {
    pub fn new(map: &'a AlgebraMap) -> Self {
        MapEvaluator { map, columns: Vec::new(), tables: HashMap::new() }
    }

    pub fn map(&self) -> &AlgebraMap {
        self.map
    }

    /// Packed images of the degree-`q` source basis.
    pub fn columns(&mut self, q: u16) -> Result<&[Vec<u64>], AlgebraError> {
        while self.columns.len() <= q as usize {
            let next = self.columns.len() as u16;
            let cols = self.compute(next)?;
            self.columns.push(cols);
        }
        Ok(&self.columns[q as usize])
    }

    /// Matrix in degree `q` (rows: target basis, columns: source basis).
    pub fn matrix(&mut self, q: u16) -> Result<BitMatrix, AlgebraError> {
        let rows = self.map.target.dim(q)?;
        let cols = self.columns(q)?;
        Ok(BitMatrix::from_columns(rows, cols))
    }

    fn compute(&mut self, q: u16) -> Result<Vec<Vec<u64>>, AlgebraError> {
        let src = self.map.source.basis(q)?;
        let tgt = self.map.target.basis(q)?;
        let words = words_for(tgt.len());
        let mut out = Vec::with_capacity(src.len());
        for m in src.monomials() {
            let Some(i) = m.first_variable() else {
                // the unit maps to the unit
                out.push(tgt.pack(&Polynomial::one()));
                continue;
            };
            let di = self.map.source.presentation().degrees[i];
            let x = self.map.source.presentation().generator(i);
            let prev = x.quotient_of(m);
            let lower = q - di;
            let j = self.map.source.basis(lower)?.position(&prev).expect("divisors of standard monomials are standard");
            self.ensure_table(i, lower)?;
            let table = &self.tables[&(i, lower)];
            let mut v = vec![0u64; words];
            for_each_bit(&self.columns[lower as usize][j], |b| {
                for (a, r) in v.iter_mut().zip(&table[b]) {
                    *a ^= r;
                }
            });
            out.push(v);
        }
        Ok(out)
    }

    fn ensure_table(&mut self, i: usize, d: u16) -> Result<(), AlgebraError> {
        if self.tables.contains_key(&(i, d)) {
            return Ok(());
        }
        let t = &self.map.target;
        let di = self.map.source.presentation().degrees[i];
        let from = t.basis(d)?;
        let to = t.basis(d + di)?;
        let img = &self.map.images[i];
        let mut rows = Vec::with_capacity(from.len());
        for b in from.monomials() {
            let p = img
                .mul_monomial(b)
                .ok_or_else(|| AlgebraError::DegreeOverflow { detail: "exponent overflow".into() })?;
            rows.push(to.pack(&t.normal_form(&p)?));
        }
        self.tables.insert((i, d), rows);
        Ok(())
    }
}
