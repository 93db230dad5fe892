//! The mod-2 equivariant spectral sequence of the orbit filtration:
//! E1 from stabilizer cohomology rings, d1 from restriction maps, E2,
//! collapse detection, Farrell–Tate totals and the Steinberg exact-sequence
//! bookkeeping.
//!
//! d1 runs from p-cells to (p+1)-cells: block `(τ, σ)` of `d1^{p,q}` is the
//! degree-`q` matrix of `Σ coeff · (H*(Γ_σ) → H*(Γ_τ))` over the terms
//! recorded for the pair. Blocks are ordered by orbit label.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use log::{debug, info};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraMap, BitMatrix, MapEvaluator, Polynomial, QuotientRing};
use crate::complex::GroupedComplex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecSeqError {
    #[error("no cohomology ring assigned to orbit {orbit}")]
    MissingRing { orbit: String },
    #[error("no ring map for the incidence {upper} > {lower}")]
    MissingMap { lower: String, upper: String },
    #[error("map {map} does not go from the ring of {lower} to the ring of {upper}")]
    WrongRings { map: String, lower: String, upper: String },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("collapse not established: {reason}")]
    NoCollapse { reason: String },
    #[error("no rank assignment satisfies exactness: {detail}")]
    Inconsistent { detail: String },
}

/// Orbit → ring, and (lower orbit, upper orbit) → restriction-map terms.
/// Maps with their coefficients mod 2, keyed by `(lower, upper)` orbit.
type Terms = BTreeMap<(String, String), Vec<(Arc<AlgebraMap>, u8)>>;

#[derive(Debug, Clone, Default)]
pub struct RingAssignment {
    orbit_ring: BTreeMap<String, Arc<QuotientRing>>,
    terms: Terms,
    named: BTreeMap<(String, String), Arc<AlgebraMap>>,
}

impl RingAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn assign_ring(&mut self, orbit: &str, ring: Arc<QuotientRing>) {
        self.orbit_ring.insert(orbit.to_string(), ring);
    }

    /// Adds one term `coeff · map` to the d1 block of `upper > lower`.
    pub fn add_term(&mut self, lower: &str, upper: &str, map: Arc<AlgebraMap>, coeff: u8) {
        self.named.entry((lower.into(), upper.into())).or_insert_with(|| map.clone());
        self.terms.entry((lower.into(), upper.into())).or_default().push((map, coeff % 2));
    }

    /// Registers a map for diagram checks without contributing to d1.
    pub fn add_named(&mut self, lower: &str, upper: &str, map: Arc<AlgebraMap>) {
        self.named.insert((lower.into(), upper.into()), map);
    }

    /// Builds the assignment for a complex from one map per orbit pair. The
    /// coefficient of a pair is the sum of its incidence coefficients in the
    /// quotient, mod 2; pairs summing to zero need no map.
    pub fn from_complex(
        x: &GroupedComplex,
        rings: &BTreeMap<String, Arc<QuotientRing>>,
        maps: &BTreeMap<(String, String), Arc<AlgebraMap>>,
    ) -> Result<Self, SpecSeqError> {
        let q = x.quotient();
        let mut out = RingAssignment::new();
        for c in q.cells() {
            let ring = rings.get(&c.orbit).ok_or_else(|| SpecSeqError::MissingRing { orbit: c.orbit.clone() })?;
            out.assign_ring(&c.orbit, ring.clone());
        }
        let mut coeff: BTreeMap<(String, String), i64> = BTreeMap::new();
        for inc in q.incidences() {
            let (Some(from), Some(to)) = (q.cell(&inc.from), q.cell(&inc.to)) else {
                continue;
            };
            *coeff.entry((to.orbit.clone(), from.orbit.clone())).or_default() += inc.coeff;
        }
        for ((lower, upper), map) in maps {
            out.add_named(lower, upper, map.clone());
        }
        for ((lower, upper), c) in coeff {
            let c = c.rem_euclid(2) as u8;
            match maps.get(&(lower.clone(), upper.clone())) {
                Some(map) => {
                    out.check_rings(&lower, &upper, map)?;
                    out.add_term(&lower, &upper, map.clone(), c);
                }
                None if c == 1 => return Err(SpecSeqError::MissingMap { lower, upper }),
                None => debug!("pair {upper} > {lower} cancels mod 2 and has no map"),
            }
        }
        Ok(out)
    }

    fn check_rings(&self, lower: &str, upper: &str, map: &AlgebraMap) -> Result<(), SpecSeqError> {
        let ok = |orbit: &str, ring: &QuotientRing| {
            self.orbit_ring.get(orbit).is_some_and(|r| r.presentation().same_presentation(ring.presentation()))
        };
        if ok(lower, map.source()) && ok(upper, map.target()) {
            Ok(())
        } else {
            Err(SpecSeqError::WrongRings { map: map.id.clone(), lower: lower.into(), upper: upper.into() })
        }
    }

    pub fn ring(&self, orbit: &str) -> Option<&Arc<QuotientRing>> {
        self.orbit_ring.get(orbit)
    }

    pub fn terms(&self, lower: &str, upper: &str) -> &[(Arc<AlgebraMap>, u8)] {
        self.terms.get(&(lower.to_string(), upper.to_string())).map(Vec::as_slice).unwrap_or(&[])
    }

    /// The map registered for a pair, whether or not it contributes to d1.
    pub fn map(&self, lower: &str, upper: &str) -> Option<&Arc<AlgebraMap>> {
        self.named.get(&(lower.to_string(), upper.to_string()))
    }
}

/// Orbit labels of each dimension, sorted.
fn orbit_layers(x: &GroupedComplex) -> Vec<Vec<String>> {
    let q = x.quotient();
    let dim = q.dim().map_or(0, |d| d + 1);
    let mut layers: Vec<BTreeSet<String>> = vec![BTreeSet::new(); dim];
    for c in q.cells() {
        layers[c.dim].insert(c.orbit.clone());
    }
    layers.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// One d1 block term, evaluated incrementally in q.
struct BlockTerm<'a> {
    p: usize,
    row: usize,
    col: usize,
    eval: MapEvaluator<'a>,
}

/// Incremental d1 assembly: degrees must be requested in ascending order
/// for the evaluators to reuse lower-degree images.
pub struct D1Engine<'a> {
    layers: Vec<Vec<String>>,
    rings: &'a RingAssignment,
    terms: Vec<BlockTerm<'a>>,
}

impl<'a> D1Engine<'a> {
    pub fn new(x: &GroupedComplex, r: &'a RingAssignment) -> Result<Self, SpecSeqError> {
        let layers = orbit_layers(x);
        for layer in &layers {
            for o in layer {
                r.ring(o).ok_or_else(|| SpecSeqError::MissingRing { orbit: o.clone() })?;
            }
        }
        let mut terms = Vec::new();
        for p in 0..layers.len().saturating_sub(1) {
            for (col, lower) in layers[p].iter().enumerate() {
                for (row, upper) in layers[p + 1].iter().enumerate() {
                    for (map, c) in r.terms(lower, upper) {
                        if *c == 1 {
                            terms.push(BlockTerm { p, row, col, eval: MapEvaluator::new(map) });
                        }
                    }
                }
            }
        }
        Ok(D1Engine { layers, rings: r, terms })
    }

    pub fn layers(&self) -> &[Vec<String>] {
        &self.layers
    }

    /// Dimensions of the orbit blocks of `E1^{p,q}`.
    pub fn block_dims(&self, p: usize, q: u16) -> Result<Vec<usize>, SpecSeqError> {
        let Some(layer) = self.layers.get(p) else {
            return Ok(Vec::new());
        };
        layer.iter().map(|o| Ok(self.rings.ring(o).expect("checked").dim(q)?)).collect()
    }

    /// `d1^{p,q}` for every `p` with a next layer.
    pub fn matrices(&mut self, q: u16) -> Result<Vec<BitMatrix>, SpecSeqError> {
        let dims: Vec<Vec<usize>> = (0..self.layers.len()).map(|p| self.block_dims(p, q)).collect::<Result<_, _>>()?;
        let offsets: Vec<Vec<usize>> = dims
            .iter()
            .map(|d| {
                d.iter()
                    .scan(0, |acc, &x| {
                        let o = *acc;
                        *acc += x;
                        Some(o)
                    })
                    .collect()
            })
            .collect();
        let blocks: Vec<Result<BitMatrix, AlgebraError>> =
            self.terms.par_iter_mut().map(|t| t.eval.matrix(q)).collect();
        let mut out: Vec<BitMatrix> = (0..self.layers.len().saturating_sub(1))
            .map(|p| BitMatrix::zeros(dims[p + 1].iter().sum(), dims[p].iter().sum()))
            .collect();
        for (t, b) in self.terms.iter().zip(blocks) {
            out[t.p].add_block(offsets[t.p + 1][t.row], offsets[t.p][t.col], &b?);
        }
        Ok(out)
    }
}

/// `d1^{p,q}` assembled from scratch.
pub fn assemble_d1(x: &GroupedComplex, r: &RingAssignment, p: usize, q: u16) -> Result<BitMatrix, SpecSeqError> {
    let mut engine = D1Engine::new(x, r)?;
    for k in 0..q {
        engine.matrices(k)?;
    }
    let mats = engine.matrices(q)?;
    match mats.into_iter().nth(p) {
        Some(m) => Ok(m),
        None => {
            let cols = engine.block_dims(p, q)?.iter().sum();
            Ok(BitMatrix::zeros(0, cols))
        }
    }
}

/// Nonzero entry of `d1^{p+1,q} ∘ d1^{p,q}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct D1Witness {
    pub q: u16,
    pub p: usize,
    /// The (p+2)-cell orbit and the basis monomial of its ring.
    pub upper: String,
    pub upper_monomial: String,
    /// The p-cell orbit and the basis monomial of its ring.
    pub lower: String,
    pub lower_monomial: String,
    /// Intermediate orbits linking the two, with the map ids used.
    pub through: Vec<String>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct D1SquaredReport {
    pub qmax: u16,
    pub passed: bool,
    pub witnesses: Vec<D1Witness>,
}

/// Checks `d1 ∘ d1 = 0` in every degree up to `qmax`, recording the first
/// nonzero entry per degree and pair of layers.
pub fn check_d1_squared(x: &GroupedComplex, r: &RingAssignment, qmax: u16) -> Result<D1SquaredReport, SpecSeqError> {
    let mut engine = D1Engine::new(x, r)?;
    let mut report = D1SquaredReport { qmax, passed: true, witnesses: Vec::new() };
    for q in 0..=qmax {
        let mats = engine.matrices(q)?;
        for p in 0..mats.len().saturating_sub(1) {
            let prod = mats[p + 1].mul(&mats[p]);
            if prod.is_zero() {
                continue;
            }
            report.passed = false;
            let (row, col) = (0..prod.rows())
                .flat_map(|i| (0..prod.cols()).map(move |j| (i, j)))
                .find(|&(i, j)| prod.get(i, j))
                .expect("nonzero");
            let (upper, um) = locate(&engine, p + 2, q, row)?;
            let (lower, lm) = locate(&engine, p, q, col)?;
            let through = engine.layers[p + 1]
                .iter()
                .filter(|mid| !r.terms(&lower, mid).is_empty() && !r.terms(mid, &upper).is_empty())
                .map(|mid| {
                    let ids = |a: &str, b: &str| {
                        r.terms(a, b).iter().map(|(m, _)| m.id.clone()).collect::<Vec<_>>().join("+")
                    };
                    format!("{mid} via {} then {}", ids(&lower, mid), ids(mid, &upper))
                })
                .collect();
            report.witnesses.push(D1Witness { q, p, upper, upper_monomial: um, lower, lower_monomial: lm, through });
        }
    }
    Ok(report)
}

/// Orbit and rendered basis monomial of a global index in `E1^{p,q}`.
fn locate(engine: &D1Engine, p: usize, q: u16, mut index: usize) -> Result<(String, String), SpecSeqError> {
    for o in &engine.layers[p] {
        let ring = engine.rings.ring(o).expect("checked");
        let basis = ring.basis(q)?;
        if index < basis.len() {
            let m = basis.monomials()[index];
            return Ok((o.clone(), m.render(ring.names())));
        }
        index -= basis.len();
    }
    unreachable!("index within the page")
}

/// Dimensions of E1 and E2 with the ranks of d1, indexed `[q][p]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageTable {
    pub qmax: u16,
    pub columns: usize,
    pub e1: Vec<Vec<usize>>,
    pub ranks: Vec<Vec<usize>>,
    pub e2: Vec<Vec<usize>>,
}

impl PageTable {
    /// A table given by its E2 dimensions only (E1 and ranks unknown, zero).
    pub fn from_e2(e2: Vec<Vec<usize>>) -> Self {
        let columns = e2.iter().map(Vec::len).max().unwrap_or(0);
        let e2: Vec<Vec<usize>> = e2
            .into_iter()
            .map(|mut r| {
                r.resize(columns, 0);
                r
            })
            .collect();
        let zeros = vec![vec![0; columns]; e2.len()];
        PageTable { qmax: e2.len().saturating_sub(1) as u16, columns, e1: zeros.clone(), ranks: zeros, e2 }
    }

    fn at(t: &[Vec<usize>], p: usize, q: u16) -> usize {
        t.get(q as usize).and_then(|r| r.get(p)).copied().unwrap_or(0)
    }

    pub fn e1(&self, p: usize, q: u16) -> usize {
        Self::at(&self.e1, p, q)
    }

    pub fn e2(&self, p: usize, q: u16) -> usize {
        Self::at(&self.e2, p, q)
    }

    /// Rank of `d1^{p,q}: E1^{p,q} → E1^{p+1,q}`.
    pub fn rank(&self, p: usize, q: u16) -> usize {
        Self::at(&self.ranks, p, q)
    }

    /// `d1^{p,q}` onto `E1^{p+1,q}`.
    pub fn surjective(&self, p: usize, q: u16) -> bool {
        self.rank(p, q) == self.e1(p + 1, q)
    }

    /// Image of `d1^{p,q}` equals the kernel of `d1^{p+1,q}`, i.e. `E2^{p+1,q} = 0`.
    pub fn exact_at_next(&self, p: usize, q: u16) -> bool {
        self.e2(p + 1, q) == 0
    }
}

/// E1/E2 dimensions for `0 ≤ q ≤ qmax`.
pub fn e2_page(x: &GroupedComplex, r: &RingAssignment, qmax: u16) -> Result<PageTable, SpecSeqError> {
    let mut engine = D1Engine::new(x, r)?;
    let columns = engine.layers.len();
    let (mut e1, mut ranks, mut e2) = (Vec::new(), Vec::new(), Vec::new());
    for q in 0..=qmax {
        let dims: Vec<usize> =
            (0..columns).map(|p| Ok(engine.block_dims(p, q)?.iter().sum())).collect::<Result<_, SpecSeqError>>()?;
        let mats = engine.matrices(q)?;
        let rk: Vec<usize> = mats.par_iter().map(BitMatrix::rank).collect();
        let mut rk_full = rk.clone();
        rk_full.resize(columns, 0);
        let row: Vec<usize> =
            (0..columns).map(|p| dims[p] - rk_full[p] - if p > 0 { rk_full[p - 1] } else { 0 }).collect();
        debug!("q={q}: E1 {dims:?}, ranks {rk_full:?}, E2 {row:?}");
        e1.push(dims);
        ranks.push(rk_full);
        e2.push(row);
    }
    info!("E2 page computed up to q = {qmax}");
    Ok(PageTable { qmax, columns, e1, ranks, e2 })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Collapse {
    pub collapses: bool,
    pub reason: String,
}

/// Checks that every `d_r` (r ≥ 2) inside the computed range has a zero
/// source or target, which forces degeneration at E2.
pub fn detect_collapse(t: &PageTable) -> Collapse {
    for q in 0..=t.qmax {
        for p in 0..t.columns {
            if t.e2(p, q) == 0 {
                continue;
            }
            for r in 2..=t.columns {
                let (tp, tq) = (p + r, q as i64 - r as i64 + 1);
                if tp >= t.columns || tq < 0 {
                    break;
                }
                if t.e2(tp, tq as u16) != 0 {
                    return Collapse {
                        collapses: false,
                        reason: format!("d{r}: E2^{{{p},{q}}} → E2^{{{tp},{tq}}} has nonzero source and target"),
                    };
                }
            }
        }
    }
    let upper_vanish = |q: u16| (1..t.columns).all(|p| t.e2(p, q) == 0);
    if (0..=t.qmax).all(|q| (0..t.columns).all(|p| t.e2(p, q) == 0)) {
        return Collapse { collapses: true, reason: "page vanishes".into() };
    }
    let q0 = (0..=t.qmax).rev().take_while(|&q| upper_vanish(q)).last();
    let reason = match q0 {
        Some(q0) => format!("columns p ≥ 1 vanish for q ≥ {q0}"),
        None => "every d_r with r ≥ 2 has a zero source or target".into(),
    };
    Collapse { collapses: true, reason }
}

/// `Σ_{p+q=n} E2^{p,q}` for `0 ≤ n ≤ qmax`.
pub fn total_dimensions(t: &PageTable) -> Result<Vec<usize>, SpecSeqError> {
    let c = detect_collapse(t);
    if !c.collapses {
        return Err(SpecSeqError::NoCollapse { reason: c.reason });
    }
    Ok((0..=t.qmax as usize).map(|n| (0..t.columns.min(n + 1)).map(|p| t.e2(p, (n - p) as u16)).sum()).collect())
}

/// A vertex with its edge boxes and vertex → edge → triangle squares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagram {
    pub name: String,
    pub vertex: String,
    /// Edge → expected images of the vertex generators.
    pub edges: BTreeMap<String, Vec<String>>,
    pub squares: Vec<Square>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Square {
    /// Two `(edge, triangle)` routes out of the vertex.
    pub routes: [(String, String); 2],
    /// Expected common images of the vertex generators.
    pub corner: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub name: String,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl DiagramReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks every edge box and square of each diagram against the assignment.
pub fn verify_restriction_diagrams(r: &RingAssignment, diagrams: &[Diagram]) -> Vec<DiagramReport> {
    diagrams.iter().map(|d| verify_diagram(r, d)).collect()
}

fn verify_diagram(r: &RingAssignment, d: &Diagram) -> DiagramReport {
    let mut rep = DiagramReport { name: d.name.clone(), ..Default::default() };
    let Some(vring) = r.ring(&d.vertex) else {
        rep.failures.push(format!("no ring for {}", d.vertex));
        return rep;
    };
    let gens = vring.names().to_vec();
    let expect =
        |ring: &QuotientRing, list: &[String], rep: &mut DiagramReport, what: &str| -> Option<Vec<Polynomial>> {
            if list.len() != gens.len() {
                rep.failures.push(format!("{what}: {} expected images for {} generators", list.len(), gens.len()));
                return None;
            }
            match list.iter().map(|t| ring.parse(t)).collect::<Result<Vec<_>, _>>() {
                Ok(v) => Some(v),
                Err(e) => {
                    rep.failures.push(format!("{what}: {e}"));
                    None
                }
            }
        };
    for (edge, images) in &d.edges {
        let Some(m) = r.map(&d.vertex, edge) else {
            rep.failures.push(format!("no map {} → {edge}", d.vertex));
            continue;
        };
        let Some(want) = expect(m.target(), images, &mut rep, &format!("{} → {edge}", d.vertex)) else {
            continue;
        };
        for (i, w) in want.iter().enumerate() {
            rep.checked += 1;
            if m.images()[i] != *w {
                rep.failures.push(format!(
                    "{} → {edge}: {} ↦ {} but the diagram has {}",
                    d.vertex,
                    gens[i],
                    m.target().render(&m.images()[i]),
                    m.target().render(w)
                ));
            }
        }
    }
    for sq in &d.squares {
        let label = format!(
            "{} → {} → {} vs {} → {}",
            d.vertex, sq.routes[0].0, sq.routes[0].1, sq.routes[1].0, sq.routes[1].1
        );
        let composite = |(e, t): &(String, String)| -> Result<AlgebraMap, String> {
            let a = r.map(&d.vertex, e).ok_or(format!("no map {} → {e}", d.vertex))?;
            let b = r.map(e, t).ok_or(format!("no map {e} → {t}"))?;
            a.then(b).map_err(|x| x.to_string())
        };
        let (c0, c1) = match (composite(&sq.routes[0]), composite(&sq.routes[1])) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => {
                rep.failures.push(format!("{label}: {e}"));
                continue;
            }
        };
        if !c0.target().presentation().same_presentation(c1.target().presentation()) {
            rep.failures.push(format!("{label}: the corners carry different rings"));
            continue;
        }
        let Some(want) = expect(c0.target(), &sq.corner, &mut rep, &label) else {
            continue;
        };
        for i in 0..gens.len() {
            rep.checked += 1;
            let (a, b) = (&c0.images()[i], &c1.images()[i]);
            if a != b || *a != want[i] {
                rep.failures.push(format!(
                    "{label}: {} ↦ {} / {} but the diagram has {}",
                    gens[i],
                    c0.target().render(a),
                    c1.target().render(b),
                    c0.target().render(&want[i])
                ));
            }
        }
    }
    rep
}

/// One Steinberg homology group `H̃_k` in the long exact sequence
/// `H^i → Ĥ^i → H̃_{v-1-i} → H^{i+1} → Ĥ^{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinbergRow {
    pub k: usize,
    pub degree: usize,
    /// Value if every connecting map `H̃ → H` vanishes (may be negative, hence infeasible).
    pub trivial_connecting: i64,
    /// Range over all rank assignments compatible with exactness; `max: None` is unbounded.
    pub min: usize,
    pub max: Option<usize>,
    /// Value forced by the supplied connecting ranks.
    pub exact: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinbergReport {
    pub vcd: usize,
    pub rows: Vec<SteinbergRow>,
    pub trivial_consistent: bool,
}

/// Rank bookkeeping for the long exact sequence linking group cohomology
/// `h`, Farrell–Tate cohomology `ft` and Steinberg homology, for degrees
/// `0 ≤ i < vcd`. With connecting ranks `c_i = rank(H̃_{v-1-i} → H^{i+1})`,
/// `dim H̃_{v-1-i} = ft_i − h_i + c_{i−1} + c_i`. `known` fixes some `H̃_k`.
pub fn steinberg_report(
    ft: &[usize],
    h: &BTreeMap<usize, usize>,
    connecting: Option<&[usize]>,
    known: &BTreeMap<usize, usize>,
    vcd: usize,
) -> Result<SteinbergReport, SpecSeqError> {
    let top = vcd.checked_sub(1).ok_or_else(|| SpecSeqError::Inconsistent { detail: "vcd must be positive".into() })?;
    let f = |i: usize| {
        ft.get(i)
            .copied()
            .ok_or_else(|| SpecSeqError::Inconsistent { detail: format!("missing Farrell–Tate degree {i}") })
    };
    let g = |i: usize| {
        h.get(&i)
            .copied()
            .ok_or_else(|| SpecSeqError::Inconsistent { detail: format!("missing group cohomology degree {i}") })
    };
    let (fs, hs): (Vec<usize>, Vec<usize>) =
        (0..vcd).map(|i| Ok((f(i)?, g(i)?))).collect::<Result<Vec<_>, SpecSeqError>>()?.into_iter().unzip();
    let loose: usize = fs.iter().chain(&hs).sum::<usize>() + known.values().sum::<usize>();
    // c_i ranges over ranks of H̃ → H^{i+1}; rank(H^{i+1} → Ĥ^{i+1}) = h_{i+1} − c_i must fit in Ĥ^{i+1}
    let domain = |i: usize| -> (usize, usize, bool) {
        match (h.get(&(i + 1)), ft.get(i + 1)) {
            (Some(&hn), Some(&fnext)) if i < top => (hn.saturating_sub(fnext), hn, false),
            (Some(&hn), _) => (0, hn, false),
            (None, _) => (0, loose, true),
        }
    };
    let value = |i: usize, prev: usize, cur: usize| -> Option<usize> {
        // rank(Ĥ^i → H̃) = f_i − (h_i − prev) must lie in [0, f_i]
        let b = fs[i] as i64 - hs[i] as i64 + prev as i64;
        if b < 0 || b > fs[i] as i64 || prev > hs[i] {
            return None;
        }
        let s = (b + cur as i64) as usize;
        match known.get(&(top - i)) {
            Some(&k) if k != s => None,
            _ => Some(s),
        }
    };
    // forward reachability over the chain c_{-1} = 0, c_0, …, c_{top}
    let mut reach: Vec<BTreeSet<usize>> = Vec::with_capacity(vcd);
    let mut prev_set = BTreeSet::from([0usize]);
    for i in 0..vcd {
        let (lo, hi, _) = domain(i);
        let next: BTreeSet<usize> = (lo..=hi).filter(|&c| prev_set.iter().any(|&p| value(i, p, c).is_some())).collect();
        reach.push(next.clone());
        prev_set = next;
    }
    if reach.last().is_none_or(BTreeSet::is_empty) {
        return Err(SpecSeqError::Inconsistent {
            detail: "no connecting ranks satisfy exactness and the known values".into(),
        });
    }
    // backward pass: values of c_i that extend to a full assignment
    let mut alive: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); vcd];
    alive[top] = reach[top].clone();
    for i in (0..top).rev() {
        alive[i] =
            reach[i].iter().copied().filter(|&c| alive[i + 1].iter().any(|&n| value(i + 1, c, n).is_some())).collect();
    }
    let mut rows = Vec::with_capacity(vcd);
    for i in 0..vcd {
        let prevs: BTreeSet<usize> = if i == 0 { BTreeSet::from([0]) } else { alive[i - 1].clone() };
        let vals: Vec<usize> =
            prevs.iter().flat_map(|&p| alive[i].iter().filter_map(move |&c| value(i, p, c))).collect();
        let (min, max) = (vals.iter().copied().min().unwrap_or(0), vals.iter().copied().max().unwrap_or(0));
        let unbounded = domain(i).2 && alive[i].last() == Some(&domain(i).1);
        let exact = connecting.map(|c| {
            let prev = if i == 0 { 0 } else { c.get(i - 1).copied().unwrap_or(0) };
            value(i, prev, c.get(i).copied().unwrap_or(0))
        });
        let exact = match exact {
            Some(None) => {
                return Err(SpecSeqError::Inconsistent {
                    detail: format!("supplied connecting ranks fail at degree {i}"),
                })
            }
            Some(Some(v)) => Some(v),
            None => None,
        };
        rows.push(SteinbergRow {
            k: top - i,
            degree: i,
            trivial_connecting: fs[i] as i64 - hs[i] as i64,
            min,
            max: (!unbounded).then_some(max),
            exact,
        });
    }
    rows.sort_by_key(|r| r.k);
    let trivial_consistent = rows
        .iter()
        .all(|r| r.trivial_connecting >= 0 && known.get(&r.k).is_none_or(|&k| k as i64 == r.trivial_connecting));
    Ok(SteinbergReport { vcd, rows, trivial_consistent })
}
