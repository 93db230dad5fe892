//! Presentations, degree-truncated Buchberger completion, normal forms and
//! per-degree monomial bases of quotient rings.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::sync::{Arc, OnceLock};

use super::poly::{parse_polynomial, Monomial, Polynomial, MAX_GENS};
use super::AlgebraError;

/// Default bound on the number of terms of any intermediate polynomial.
pub const DEFAULT_TERM_CAP: usize = 1 << 20;

/// Largest supported working degree (exponents are stored in a byte).
pub const MAX_DEGREE: u16 = 200;

/// A commutative F2-algebra given by weighted generators and homogeneous relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub label: String,
    pub names: Vec<String>,
    pub degrees: Vec<u16>,
    pub relations: Vec<Polynomial>,
}

impl AlgebraPresentation {
    /// Builds a presentation from `(name, degree)` pairs and relation strings.
    pub fn parse(label: &str, generators: &[(String, u16)], relations: &[String]) -> Result<Self, AlgebraError> {
        if generators.len() > MAX_GENS {
            return Err(AlgebraError::TooManyGenerators { label: label.into(), count: generators.len() });
        }
        let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
        let degrees: Vec<u16> = generators.iter().map(|&(_, d)| d).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(AlgebraError::DuplicateGenerator { label: label.into(), name: n.clone() });
            }
            if degrees[i] == 0 {
                return Err(AlgebraError::ZeroDegree { label: label.into(), name: n.clone() });
            }
        }
        let mut rels = Vec::with_capacity(relations.len());
        for r in relations {
            let p = parse_polynomial(r, &names, &degrees)?;
            if !p.is_zero() && p.homogeneous_degree().is_none() {
                return Err(AlgebraError::NotHomogeneous { label: label.into(), text: r.clone() });
            }
            rels.push(p);
        }
        Ok(AlgebraPresentation { label: label.into(), names, degrees, relations: rels })
    }

    /// Polynomial ring on the given generators.
    pub fn free(label: &str, generators: &[(String, u16)]) -> Result<Self, AlgebraError> {
        Self::parse(label, generators, &[])
    }

    pub fn parse_polynomial(&self, text: &str) -> Result<Polynomial, AlgebraError> {
        parse_polynomial(text, &self.names, &self.degrees)
    }

    pub fn generator(&self, i: usize) -> Monomial {
        Monomial::generator(i, self.degrees[i])
    }

    pub fn ngens(&self) -> usize {
        self.names.len()
    }

    /// True iff generator names, degrees and relations coincide.
    pub fn same_presentation(&self, other: &AlgebraPresentation) -> bool {
        self.names == other.names && self.degrees == other.degrees && self.relations == other.relations
    }
}

/// A Gröbner basis valid up to degree `dmax`.
#[derive(Debug, Clone)]
pub struct TruncatedGb {
    pub dmax: u16,
    basis: Vec<Polynomial>,
}

impl TruncatedGb {
    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    pub fn leading_monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.basis.iter().filter_map(|g| g.leading())
    }

    fn divisor_of(&self, m: &Monomial) -> Option<&Polynomial> {
        self.basis.iter().find(|g| g.leading().is_some_and(|l| l.divides(m)))
    }

    pub fn is_standard(&self, m: &Monomial) -> bool {
        self.divisor_of(m).is_none()
    }

    /// Remainder of `f` under full reduction by the basis.
    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.normal_form_capped(f, DEFAULT_TERM_CAP)
    }

    fn normal_form_capped(&self, f: &Polynomial, cap: usize) -> Result<Polynomial, AlgebraError> {
        if self.basis.is_empty() || f.is_zero() {
            return Ok(f.clone());
        }
        if let Some(d) = f.leading().map(Monomial::degree) {
            if d > self.dmax {
                return Err(AlgebraError::BeyondBound { degree: d, dmax: self.dmax });
            }
        }
        let mut work: BTreeSet<Monomial> = f.terms().iter().copied().collect();
        let mut rem = Vec::new();
        while let Some(m) = work.pop_last() {
            match self.divisor_of(&m) {
                None => rem.push(m),
                Some(g) => {
                    let lead = g.leading().expect("nonzero basis element");
                    let q = lead.quotient_of(&m);
                    for t in &g.terms()[1..] {
                        let tm = t.mul(&q).ok_or_else(|| overflow("exponent overflow"))?;
                        if !work.remove(&tm) {
                            work.insert(tm);
                        }
                    }
                    if work.len() > cap {
                        return Err(overflow("intermediate polynomial exceeds the term cap"));
                    }
                }
            }
        }
        Ok(Polynomial::from_sorted_unique(rem))
    }
}

fn overflow(detail: &str) -> AlgebraError {
    AlgebraError::DegreeOverflow { detail: detail.into() }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Task {
    Input(usize),
    Pair(usize, usize),
}

/// Buchberger completion up to degree `dmax`, processing S-pairs and input
/// relations in ascending degree and skipping coprime pairs; the result is
/// interreduced.
pub fn groebner_truncated(p: &AlgebraPresentation, dmax: u16) -> Result<TruncatedGb, AlgebraError> {
    groebner_truncated_capped(p, dmax, DEFAULT_TERM_CAP)
}

pub fn groebner_truncated_capped(p: &AlgebraPresentation, dmax: u16, cap: usize) -> Result<TruncatedGb, AlgebraError> {
    if dmax > MAX_DEGREE {
        return Err(AlgebraError::BeyondBound { degree: dmax, dmax: MAX_DEGREE });
    }
    let mut gb = TruncatedGb { dmax, basis: Vec::new() };
    let mut queue: BinaryHeap<Reverse<(u16, Task)>> = BinaryHeap::new();
    for (i, r) in p.relations.iter().enumerate() {
        if let Some(d) = r.homogeneous_degree() {
            if d <= dmax {
                queue.push(Reverse((d, Task::Input(i))));
            }
        }
    }
    while let Some(Reverse((_, task))) = queue.pop() {
        let candidate = match task {
            Task::Input(i) => p.relations[i].clone(),
            Task::Pair(i, j) => {
                let (gi, gj) = (&gb.basis[i], &gb.basis[j]);
                let (li, lj) = (gi.leading().unwrap(), gj.leading().unwrap());
                if li.is_coprime(lj) {
                    continue;
                }
                let l = li.lcm(lj, &p.degrees);
                let a = gi.mul_monomial(&li.quotient_of(&l)).ok_or_else(|| overflow("exponent overflow"))?;
                let b = gj.mul_monomial(&lj.quotient_of(&l)).ok_or_else(|| overflow("exponent overflow"))?;
                a.add(&b)
            }
        };
        if candidate.len() > cap {
            return Err(overflow("S-polynomial exceeds the term cap"));
        }
        let r = gb.normal_form_capped(&candidate, cap)?;
        if r.is_zero() {
            continue;
        }
        let k = gb.basis.len();
        let lk = *r.leading().unwrap();
        gb.basis.push(r);
        for i in 0..k {
            let li = gb.basis[i].leading().unwrap();
            let d = li.lcm(&lk, &p.degrees).degree();
            if d <= dmax {
                queue.push(Reverse((d, Task::Pair(i, k))));
            }
        }
    }
    interreduce(&mut gb, cap)?;
    Ok(gb)
}

fn interreduce(gb: &mut TruncatedGb, cap: usize) -> Result<(), AlgebraError> {
    // drop elements whose leading monomial is divisible by another's
    let mut keep: Vec<Polynomial> = Vec::new();
    let mut all = std::mem::take(&mut gb.basis);
    all.sort_by(|a, b| a.leading().cmp(&b.leading()));
    for g in all {
        let l = *g.leading().unwrap();
        if !keep.iter().any(|h| h.leading().unwrap().divides(&l)) {
            keep.push(g);
        }
    }
    let mut out = Vec::with_capacity(keep.len());
    for i in 0..keep.len() {
        let others = TruncatedGb {
            dmax: gb.dmax,
            basis: keep.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, g)| g.clone()).collect(),
        };
        let lead = Polynomial::monomial(*keep[i].leading().unwrap());
        let tail = keep[i].add(&lead);
        out.push(lead.add(&others.normal_form_capped(&tail, cap)?));
    }
    gb.basis = out;
    Ok(())
}

/// Standard monomials of one degree, in ascending monomial order.
#[derive(Debug)]
pub struct DegreeBasis {
    pub degree: u16,
    monomials: Vec<Monomial>,
    index: HashMap<Monomial, usize>,
}

impl DegreeBasis {
    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Packs a normal form of this degree as a coefficient vector.
    pub fn pack(&self, f: &Polynomial) -> Vec<u64> {
        let mut v = vec![0u64; super::gf2::words_for(self.len())];
        for m in f.terms() {
            let i = self.position(m).expect("normal form term outside the degree basis");
            v[i / 64] ^= 1 << (i % 64);
        }
        v
    }
}

/// A presented algebra with its truncated Gröbner basis and cached degree bases.
#[derive(Debug)]
pub struct QuotientRing {
    presentation: AlgebraPresentation,
    gb: TruncatedGb,
    bases: Vec<OnceLock<Arc<DegreeBasis>>>,
}

impl QuotientRing {
    pub fn new(presentation: AlgebraPresentation, dmax: u16) -> Result<Self, AlgebraError> {
        let gb = groebner_truncated(&presentation, dmax)?;
        let bases = (0..=dmax).map(|_| OnceLock::new()).collect();
        Ok(QuotientRing { presentation, gb, bases })
    }

    pub fn presentation(&self) -> &AlgebraPresentation {
        &self.presentation
    }

    pub fn label(&self) -> &str {
        &self.presentation.label
    }

    pub fn names(&self) -> &[String] {
        &self.presentation.names
    }

    pub fn gb(&self) -> &TruncatedGb {
        &self.gb
    }

    pub fn dmax(&self) -> u16 {
        self.gb.dmax
    }

    pub fn normal_form(&self, f: &Polynomial) -> Result<Polynomial, AlgebraError> {
        self.gb.normal_form(f)
    }

    pub fn parse(&self, text: &str) -> Result<Polynomial, AlgebraError> {
        self.normal_form(&self.presentation.parse_polynomial(text)?)
    }

    pub fn render(&self, f: &Polynomial) -> String {
        f.render(&self.presentation.names)
    }

    /// Standard monomials of degree `q`.
    pub fn basis(&self, q: u16) -> Result<Arc<DegreeBasis>, AlgebraError> {
        let slot = self.bases.get(q as usize).ok_or(AlgebraError::BeyondBound { degree: q, dmax: self.dmax() })?;
        Ok(slot
            .get_or_init(|| {
                let mut monomials = monomial_basis(&self.gb, &self.presentation.degrees, q);
                monomials.sort();
                let index = monomials.iter().enumerate().map(|(i, &m)| (m, i)).collect();
                Arc::new(DegreeBasis { degree: q, monomials, index })
            })
            .clone())
    }

    pub fn dim(&self, q: u16) -> Result<usize, AlgebraError> {
        Ok(self.basis(q)?.len())
    }
}

/// All degree-`q` monomials not divisible by a leading monomial of `gb`
/// (unsorted).
pub fn monomial_basis(gb: &TruncatedGb, degrees: &[u16], q: u16) -> Vec<Monomial> {
    let leads: Vec<Monomial> = gb.leading_monomials().copied().collect();
    let mut out = Vec::new();
    let mut exps = [0u8; MAX_GENS];
    enumerate(degrees, &leads, 0, q, &mut exps, &mut out);
    out
}

fn enumerate(
    degrees: &[u16],
    leads: &[Monomial],
    i: usize,
    rest: u16,
    exps: &mut [u8; MAX_GENS],
    out: &mut Vec<Monomial>,
) {
    if i == degrees.len() {
        if rest == 0 {
            out.push(Monomial::from_exponents(&exps[..degrees.len()], degrees));
        }
        return;
    }
    let d = degrees[i];
    let mut e = 0u16;
    loop {
        exps[i] = e as u8;
        let partial = Monomial::from_exponents(&exps[..=i], &degrees[..=i]);
        if leads.iter().any(|l| l.divides(&partial)) {
            break;
        }
        enumerate(degrees, leads, i + 1, rest - e * d, exps, out);
        e += 1;
        if e * d > rest {
            break;
        }
    }
    exps[i] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(gens: &[(&str, u16)], rels: &[&str]) -> AlgebraPresentation {
        let g: Vec<(String, u16)> = gens.iter().map(|&(n, d)| (n.to_string(), d)).collect();
        let r: Vec<String> = rels.iter().map(|s| s.to_string()).collect();
        AlgebraPresentation::parse("R", &g, &r).unwrap()
    }

    fn render(r: &QuotientRing, q: u16) -> Vec<String> {
        r.basis(q).unwrap().monomials().iter().map(|m| m.render(r.names())).collect()
    }

    #[test]
    fn free_ring_has_empty_basis() {
        let gb = groebner_truncated(&pres(&[("x1", 1), ("y1", 1)], &[]), 10).unwrap();
        assert!(gb.basis().is_empty());
    }

    #[test]
    fn single_monomial_relation() {
        let p = pres(&[("beta1", 1), ("beta2", 2), ("beta3", 3)], &["beta1*beta3"]);
        let r = QuotientRing::new(p, 12).unwrap();
        assert_eq!(r.gb().basis().len(), 1);
        assert!(r.parse("beta1*beta3").unwrap().is_zero());
        assert!(r.parse("beta1^2*beta3").unwrap().is_zero());
        assert_eq!(render(&r, 3), ["beta1^3", "beta1*beta2", "beta3"]);
    }

    #[test]
    fn leading_term_of_binomial_relation() {
        let p = pres(&[("r1", 1), ("t1", 1), ("t2", 2)], &["t1^2 + r1*t1"]);
        let r = QuotientRing::new(p, 8).unwrap();
        let nf = r.parse("t1^2").unwrap();
        assert_eq!(r.render(&nf), "r1*t1");
        assert_eq!(render(&r, 2), ["r1^2", "r1*t1", "t2"]);
    }

    #[test]
    fn one_generator_basis() {
        let r = QuotientRing::new(pres(&[("bt1", 1)], &[]), 5).unwrap();
        assert_eq!(render(&r, 5), ["bt1^5"]);
    }

    #[test]
    fn binomial_ideal_hilbert_function() {
        let p = pres(&[("x", 1), ("y", 1)], &["x^2 + x*y", "y^2 + x*y"]);
        let r = QuotientRing::new(p, 6).unwrap();
        assert!(r.gb().basis().len() >= 2);
        // Hilbert function of this ideal: 1, 2, 1, 1, 1, ...
        let dims: Vec<usize> = (0..=6).map(|q| r.dim(q).unwrap()).collect();
        assert_eq!(dims, [1, 2, 1, 1, 1, 1, 1]);
        for m in r.gb().leading_monomials() {
            for n in r.gb().leading_monomials() {
                assert!(m == n || !m.divides(n));
            }
        }
    }

    #[test]
    fn inhomogeneous_relation_rejected() {
        let g = vec![("x".to_string(), 1), ("y".to_string(), 2)];
        let e = AlgebraPresentation::parse("R", &g, &["x + y".to_string()]).unwrap_err();
        assert!(matches!(e, AlgebraError::NotHomogeneous { .. }));
    }

    #[test]
    fn term_cap_reports_overflow() {
        let p = pres(&[("x", 1), ("y", 1), ("z", 1)], &["x^2 + y^2 + z^2 + x*y", "x*z + y*z"]);
        let e = groebner_truncated_capped(&p, 12, 1).unwrap_err();
        assert!(matches!(e, AlgebraError::DegreeOverflow { .. }));
    }
}
