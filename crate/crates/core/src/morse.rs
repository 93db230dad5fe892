//! Fusion-controlled discrete gradient vector fields on the orbit space of a
//! complex of groups, V-paths, and Morse reduction with boundary heritage.
//!
//! Everything here works on [`GroupedComplex::quotient`]: one representative
//! per orbit. Cell ids from the full complex are accepted and mapped to the
//! representative of their orbit.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use log::{debug, info};
use serde::Serialize;
use thiserror::Error;

use crate::complex::{Cell, ComplexError, GroupCatalog, GroupedComplex, Incidence};
use crate::fusion::{admits_cancellation, FusionMode, FusionPolicy, Verdict};
use crate::groups::{GroupHom, INCLUSION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MorseError {
    #[error("arrow {lower} -> {upper} carries no fusion certificate")]
    UncertifiedArrow { lower: String, upper: String },
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("arrow {lower} -> {upper}: {reason}")]
    InvalidArrow { lower: String, upper: String, reason: String },
    #[error("vector field contains a closed V-path")]
    NotAdmissible,
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellState {
    Critical,
    PotentiallyCritical,
    NonCritical,
}

/// Fusion verdict recorded when an arrow was admitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub mode: FusionMode,
    pub verdict: Verdict,
    pub map: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arrow {
    pub lower: String,
    pub upper: String,
    pub certificate: Option<Certificate>,
}

/// One fusion decision taken while building a field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditEntry {
    pub lower: String,
    pub upper: String,
    pub verdict: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct VectorField {
    pub arrows: Vec<Arrow>,
    pub state: BTreeMap<String, CellState>,
    pub audit: Vec<AuditEntry>,
}

impl VectorField {
    pub fn critical(&self) -> Vec<&str> {
        self.state.iter().filter(|(_, s)| **s != CellState::NonCritical).map(|(c, _)| c.as_str()).collect()
    }

    fn arrow_from(&self, lower: &str) -> Option<&Arrow> {
        self.arrows.iter().find(|a| a.lower == lower)
    }

    fn is_head(&self, upper: &str) -> bool {
        self.arrows.iter().any(|a| a.upper == upper)
    }

    /// Certifies the given arrows (cell ids of the full complex) against
    /// `policy`; all other cells become critical.
    pub fn from_arrows(
        x: &GroupedComplex,
        arrows: &[(String, String)],
        policy: &FusionPolicy,
    ) -> Result<VectorField, MorseError> {
        let q = Quotient::new(x);
        let mut field = VectorField {
            state: q.cx.cells().iter().map(|c| (c.id.clone(), CellState::Critical)).collect(),
            ..Default::default()
        };
        for (lo, up) in arrows {
            let s = q.rep(lo).ok_or_else(|| MorseError::UnknownCell(lo.clone()))?;
            let t = q.rep(up).ok_or_else(|| MorseError::UnknownCell(up.clone()))?;
            let invalid =
                |reason: &str| MorseError::InvalidArrow { lower: lo.clone(), upper: up.clone(), reason: reason.into() };
            if field.state[&s] == CellState::NonCritical || field.state[&t] == CellState::NonCritical {
                return Err(invalid("cell already matched"));
            }
            let inc = q.single_term(&t, &s, policy.l).ok_or_else(|| invalid("not a unit single-term face"))?;
            let certificate = q.certify(inc, policy).map_err(|e| invalid(&e))?;
            field.audit.push(AuditEntry {
                lower: s.clone(),
                upper: t.clone(),
                verdict: certificate.verdict.to_string(),
            });
            field.state.insert(s.clone(), CellState::NonCritical);
            field.state.insert(t.clone(), CellState::NonCritical);
            field.arrows.push(Arrow { lower: s, upper: t, certificate: Some(certificate) });
        }
        if !q.acyclic(&field) {
            return Err(MorseError::NotAdmissible);
        }
        Ok(field)
    }
}

/// How the greedy construction decides that a face may be paired with a coface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairingRule {
    /// `s` is a free face of `t`: no other remaining coface of `s`.
    #[default]
    FreeFace,
    /// No other potentially critical face of `t` of the same dimension as `s`.
    Literal,
}

/// Quotient complex with face/coface indices.
struct Quotient {
    cx: GroupedComplex,
    orbit_rep: HashMap<String, String>,
    faces: HashMap<String, Vec<usize>>,
    cofaces: HashMap<String, Vec<usize>>,
}

impl Quotient {
    fn new(x: &GroupedComplex) -> Self {
        let cx = x.quotient();
        let mut orbit_rep = HashMap::new();
        for c in x.cells() {
            if let Some(r) = x.representative(&c.orbit) {
                orbit_rep.insert(c.id.clone(), r.id.clone());
            }
        }
        let mut faces: HashMap<String, Vec<usize>> = HashMap::new();
        let mut cofaces: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, inc) in cx.incidences().iter().enumerate() {
            faces.entry(inc.from.clone()).or_default().push(i);
            cofaces.entry(inc.to.clone()).or_default().push(i);
        }
        Quotient { cx, orbit_rep, faces, cofaces }
    }

    fn rep(&self, id: &str) -> Option<String> {
        self.orbit_rep.get(id).cloned()
    }

    fn inc(&self, i: usize) -> &Incidence {
        &self.cx.incidences()[i]
    }

    fn faces_of(&self, id: &str) -> impl Iterator<Item = &Incidence> {
        self.faces.get(id).into_iter().flatten().map(|&i| self.inc(i))
    }

    fn cofaces_of(&self, id: &str) -> impl Iterator<Item = &Incidence> {
        self.cofaces.get(id).into_iter().flatten().map(|&i| self.inc(i))
    }

    /// The unique incidence `t > s` if it is one term with a unit coefficient mod `l`.
    fn single_term(&self, t: &str, s: &str, l: u64) -> Option<&Incidence> {
        let (ct, cs) = (self.cx.cell(t)?, self.cx.cell(s)?);
        if ct.dim != cs.dim + 1 || ct.orbit == cs.orbit {
            return None;
        }
        let mut terms = self.faces_of(t).filter(|i| i.to == s);
        let inc = terms.next()?;
        if terms.next().is_some() {
            return None;
        }
        let c = inc.coeff.rem_euclid(l as i64);
        (c == 1 || c == l as i64 - 1).then_some(inc)
    }

    fn certify(&self, inc: &Incidence, policy: &FusionPolicy) -> Result<Certificate, String> {
        let h = self.cx.structure_map(inc)?;
        let verdict = admits_cancellation(&h, policy);
        Ok(Certificate { mode: policy.mode, verdict, map: h.id().to_string() })
    }

    /// Cycle detection on the flow digraph: arrows point up, every other
    /// incidence points down.
    fn acyclic(&self, field: &VectorField) -> bool {
        let arrows: HashSet<(&str, &str)> = field.arrows.iter().map(|a| (a.lower.as_str(), a.upper.as_str())).collect();
        let ids: Vec<&str> = self.cx.cells().iter().map(|c| c.id.as_str()).collect();
        let pos: HashMap<&str, usize> = ids.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut succ: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for inc in self.cx.incidences() {
            let (Some(&a), Some(&b)) = (pos.get(inc.from.as_str()), pos.get(inc.to.as_str())) else {
                continue;
            };
            if arrows.contains(&(inc.to.as_str(), inc.from.as_str())) {
                succ[b].push(a);
            } else if inc.coeff != 0 {
                succ[a].push(b);
            }
        }
        // iterative three-colour DFS
        let mut colour = vec![0u8; ids.len()];
        for root in 0..ids.len() {
            if colour[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            colour[root] = 1;
            while let Some((v, k)) = stack.pop() {
                if k < succ[v].len() {
                    stack.push((v, k + 1));
                    let w = succ[v][k];
                    match colour[w] {
                        0 => {
                            colour[w] = 1;
                            stack.push((w, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                }
            }
        }
        true
    }
}

/// Default cell ordering: dimension ascending, then orbit label.
pub fn default_ordering(x: &GroupedComplex) -> Vec<String> {
    let q = x.quotient();
    let mut cells: Vec<&Cell> = q.cells().iter().collect();
    cells.sort_by(|a, b| (a.dim, &a.orbit).cmp(&(b.dim, &b.orbit)));
    cells.into_iter().map(|c| c.id.clone()).collect()
}

/// Greedy construction with the [`PairingRule::FreeFace`] rule.
pub fn build_vector_field(
    x: &GroupedComplex,
    l: u64,
    policy: &FusionPolicy,
    ordering: Option<&[String]>,
) -> VectorField {
    build_vector_field_with(x, l, policy, ordering, PairingRule::FreeFace)
}

/// Greedy construction of a maximal admissible fusion-controlled field.
///
/// Repeatedly picks the first potentially critical `s` in the ordering that
/// has a cancellable coface `t` (first in the ordering); when no pair is
/// available, the first potentially critical cell becomes critical.
pub fn build_vector_field_with(
    x: &GroupedComplex,
    l: u64,
    policy: &FusionPolicy,
    ordering: Option<&[String]>,
    rule: PairingRule,
) -> VectorField {
    let q = Quotient::new(x);
    let order = resolve_ordering(&q, x, ordering);
    let rank: HashMap<&str, usize> = order.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
    let mut field = VectorField {
        state: q.cx.cells().iter().map(|c| (c.id.clone(), CellState::PotentiallyCritical)).collect(),
        ..Default::default()
    };
    let mut verdicts: HashMap<(String, String), Option<Certificate>> = HashMap::new();
    let remaining = |f: &VectorField, c: &str| f.state[c] != CellState::NonCritical;

    loop {
        let mut chosen: Option<(String, String, Certificate)> = None;
        'search: for s in &order {
            if field.state[s] != CellState::PotentiallyCritical {
                continue;
            }
            let mut cofaces: Vec<&str> = q.cofaces_of(s).map(|i| i.from.as_str()).collect();
            cofaces.sort_by_key(|c| rank[c]);
            cofaces.dedup();
            for t in cofaces {
                if field.state[t] != CellState::PotentiallyCritical {
                    continue;
                }
                let Some(inc) = q.single_term(t, s, l) else {
                    continue;
                };
                if q.cofaces_of(t).any(|u| remaining(&field, &u.from)) {
                    continue;
                }
                let paired = match rule {
                    PairingRule::FreeFace => q.cofaces_of(s).any(|u| u.from != t && remaining(&field, &u.from)),
                    PairingRule::Literal => {
                        q.faces_of(t).any(|u| u.to != *s && field.state[&u.to] == CellState::PotentiallyCritical)
                    }
                };
                if paired {
                    continue;
                }
                let key = (s.clone(), t.to_string());
                let cert = verdicts
                    .entry(key)
                    .or_insert_with(|| {
                        let c = q.certify(inc, policy);
                        let text = match &c {
                            Ok(c) => c.verdict.to_string(),
                            Err(e) => format!("unresolved map: {e}"),
                        };
                        debug!("fusion {s} < {t}: {text}");
                        field.audit.push(AuditEntry { lower: s.clone(), upper: t.to_string(), verdict: text });
                        c.ok()
                    })
                    .clone();
                let Some(cert) = cert.filter(|c| c.verdict.is_allow()) else {
                    continue;
                };
                let mut trial = field.clone();
                trial.arrows.push(Arrow { lower: s.clone(), upper: t.to_string(), certificate: None });
                if !q.acyclic(&trial) {
                    continue;
                }
                chosen = Some((s.clone(), t.to_string(), cert));
                break 'search;
            }
        }
        match chosen {
            Some((s, t, cert)) => {
                debug!("arrow {s} -> {t}");
                field.state.insert(s.clone(), CellState::NonCritical);
                field.state.insert(t.clone(), CellState::NonCritical);
                field.arrows.push(Arrow { lower: s, upper: t, certificate: Some(cert) });
            }
            None => match order.iter().find(|c| field.state[*c] == CellState::PotentiallyCritical) {
                Some(c) => {
                    debug!("critical {c}");
                    field.state.insert(c.clone(), CellState::Critical);
                }
                None => break,
            },
        }
    }
    info!("vector field: {} arrows, {} critical cells", field.arrows.len(), field.critical().len());
    field
}

fn resolve_ordering(q: &Quotient, x: &GroupedComplex, ordering: Option<&[String]>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut seen = HashSet::new();
    for id in ordering.unwrap_or(&[]) {
        match q.rep(id) {
            Some(r) => {
                if seen.insert(r.clone()) {
                    out.push(r);
                }
            }
            None => log::warn!("ordering names unknown cell {id}; ignored"),
        }
    }
    for id in default_ordering(x) {
        if seen.insert(id.clone()) {
            if ordering.is_some() {
                debug!("cell {id} missing from ordering; appended");
            }
            out.push(id);
        }
    }
    out
}

/// True iff the arrows form a matching of unit single-term faces and the
/// flow digraph has no directed cycle.
pub fn is_admissible(v: &VectorField, x: &GroupedComplex) -> bool {
    let q = Quotient::new(x);
    let mut used = HashSet::new();
    for a in &v.arrows {
        let (Some(s), Some(t)) = (q.rep(&a.lower), q.rep(&a.upper)) else {
            return false;
        };
        if !used.insert(s.clone()) || !used.insert(t.clone()) {
            return false;
        }
        let unit = q.faces_of(&t).filter(|i| i.to == s).count() == 1
            && q.cx.cell(&t).zip(q.cx.cell(&s)).is_some_and(|(ct, cs)| ct.dim == cs.dim + 1 && ct.orbit != cs.orbit);
        if !unit {
            return false;
        }
    }
    q.acyclic(v)
}

/// A maximal V-path `τ = s0 → t0 ⊃ s1 → … ⊃ end`.
#[derive(Debug, Clone)]
pub struct VPath {
    /// Visited cells from the start face to the end cell.
    pub cells: Vec<String>,
    /// Coefficient of the start face in the boundary of the source cell.
    pub coeff: i64,
    /// Product of the step signs.
    pub sign: i64,
    /// Composite structure map from the source cell to the end cell, when defined.
    pub map: Option<Arc<GroupHom>>,
}

impl VPath {
    pub fn end(&self) -> &str {
        self.cells.last().expect("paths are non-empty")
    }
}

/// All maximal V-paths starting at the face `tau` of `sigma`.
pub fn morse_paths(v: &VectorField, x: &GroupedComplex, sigma: &str, tau: &str) -> Vec<VPath> {
    let q = Quotient::new(x);
    let (Some(sigma), Some(tau)) = (q.rep(sigma), q.rep(tau)) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for inc in q.faces_of(&sigma).filter(|i| i.to == tau) {
        paths_from(&q, v, inc, &mut out);
    }
    out
}

fn paths_from(q: &Quotient, v: &VectorField, start: &Incidence, out: &mut Vec<VPath>) {
    let map = q.cx.structure_map(start).ok();
    walk(q, v, vec![start.to.clone()], start.coeff, 1, map, &start.from, out);
}

#[allow(clippy::too_many_arguments)]
fn walk(
    q: &Quotient,
    v: &VectorField,
    cells: Vec<String>,
    coeff: i64,
    sign: i64,
    map: Option<Arc<GroupHom>>,
    source: &str,
    out: &mut Vec<VPath>,
) {
    let here = cells.last().expect("non-empty").clone();
    if v.is_head(&here) {
        return;
    }
    let Some(arrow) = v.arrow_from(&here) else {
        out.push(VPath { cells, coeff, sign, map });
        return;
    };
    let t = &arrow.upper;
    let Some(up) = q.faces_of(t).find(|i| i.to == here) else {
        return;
    };
    let up_map = q.cx.structure_map(up).ok();
    for next in q.faces_of(t) {
        if std::ptr::eq(next, up) {
            continue;
        }
        if cells.contains(&next.to) {
            continue;
        }
        let step = -next.coeff * up.coeff;
        let mut route = cells.clone();
        route.push(t.clone());
        route.push(next.to.clone());
        let next_map = match (&map, &up_map, q.cx.structure_map(next).ok()) {
            (Some(m), Some(u), Some(n)) => through_arrow(m, u, &n, source, &route),
            _ => None,
        };
        walk(q, v, route, coeff, sign * step, next_map, source, out);
    }
}

/// `g ↦ n(u⁻¹(m(g)))`, defined when `m` lands in the image of `u`.
fn through_arrow(m: &GroupHom, u: &GroupHom, n: &GroupHom, source: &str, route: &[String]) -> Option<Arc<GroupHom>> {
    let images = m.images().iter().map(|y| u.preimage(y).and_then(|z| n.apply(&z))).collect::<Option<Vec<_>>>()?;
    let id = format!("{source}@{}", route.join(">"));
    let h = GroupHom::new(id, m.source().clone(), n.target().clone(), images, true);
    h.verify().ok()?;
    Some(Arc::new(h))
}

/// Reduced complex on the critical cells; incidences follow the V-paths,
/// one per path, with composite structure maps.
pub fn morse_reduce(x: &GroupedComplex, v: &VectorField) -> Result<GroupedComplex, MorseError> {
    for a in &v.arrows {
        if !a.certificate.as_ref().is_some_and(|c| c.verdict.is_allow()) {
            return Err(MorseError::UncertifiedArrow { lower: a.lower.clone(), upper: a.upper.clone() });
        }
    }
    let q = Quotient::new(x);
    let critical: Vec<Cell> =
        q.cx.cells()
            .iter()
            .filter(|c| v.state.get(&c.id).is_none_or(|s| *s != CellState::NonCritical))
            .cloned()
            .collect();
    let mut catalog: GroupCatalog = (**x.catalog()).clone();
    let mut incidences = Vec::new();
    for sigma in &critical {
        for inc in q.faces_of(&sigma.id) {
            let mut paths = Vec::new();
            paths_from(&q, v, inc, &mut paths);
            for p in paths {
                let end = p.end().to_string();
                let trivial = p.cells.len() == 1;
                let map = if trivial {
                    inc.map.clone()
                } else {
                    p.map.as_ref().map(|h| {
                        let incl = catalog.inclusion(&sigma.stabilizer, &q.cx.cell(&end).expect("end cell").stabilizer);
                        if incl.is_some_and(|i| i.agrees_with(h)) {
                            INCLUSION.to_string()
                        } else {
                            catalog.insert_hom(h.clone());
                            h.id().to_string()
                        }
                    })
                };
                incidences.push(Incidence {
                    from: sigma.id.clone(),
                    to: end,
                    coeff: p.coeff * p.sign,
                    map,
                    route: if trivial { Vec::new() } else { p.cells.clone() },
                });
            }
        }
    }
    info!("reduced complex: {} cells, {} incidences", critical.len(), incidences.len());
    Ok(GroupedComplex::new(critical, incidences, Vec::new(), Arc::new(catalog))?)
}
