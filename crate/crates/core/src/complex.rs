//! Regular cell complexes carrying a simple complex of groups: per-cell
//! stabilizers, signed boundary incidences and injective structure maps.
//!
//! Complexes are stored in quotient form: every cell names its orbit, and
//! cells sharing an orbit are listed together as identifications. The
//! [`GroupedComplex::quotient`] view keeps one representative per orbit.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use log::debug;
use thiserror::Error;

use crate::groups::{GroupHom, PermGroup, INCLUSION};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("duplicate cell id {0}")]
    DuplicateCell(String),
    #[error("cell {cell} has boundary cell {face} outside the subcomplex")]
    NotClosed { cell: String, face: String },
    #[error("not simplicial: {0}")]
    NotSimplicial(String),
    #[error("no ambient group to intersect flag stabilizers: {0}")]
    NoAmbientGroup(String),
    #[error("unknown cell {0}")]
    UnknownCell(String),
    #[error("unknown group {0}")]
    UnknownGroup(String),
}

/// Groups and homomorphisms referenced by label from a complex.
pub struct GroupCatalog {
    ambient: Option<String>,
    groups: BTreeMap<String, Arc<PermGroup>>,
    homs: BTreeMap<String, Arc<GroupHom>>,
    inclusions: Mutex<HashMap<(String, String), Arc<GroupHom>>>,
}

impl fmt::Debug for GroupCatalog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupCatalog")
            .field("ambient", &self.ambient)
            .field("groups", &self.groups.keys().collect::<Vec<_>>())
            .field("homs", &self.homs.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Clone for GroupCatalog {
    fn clone(&self) -> Self {
        GroupCatalog {
            ambient: self.ambient.clone(),
            groups: self.groups.clone(),
            homs: self.homs.clone(),
            inclusions: Mutex::new(self.inclusions.lock().expect("catalog lock").clone()),
        }
    }
}

impl Default for GroupCatalog {
    fn default() -> Self {
        Self::new(None)
    }
}

impl GroupCatalog {
    pub fn new(ambient: Option<String>) -> Self {
        GroupCatalog { ambient, groups: BTreeMap::new(), homs: BTreeMap::new(), inclusions: Mutex::new(HashMap::new()) }
    }

    pub fn ambient(&self) -> Option<&Arc<PermGroup>> {
        self.ambient.as_ref().and_then(|a| self.groups.get(a))
    }

    pub fn ambient_label(&self) -> Option<&str> {
        self.ambient.as_deref()
    }

    pub fn set_ambient(&mut self, label: Option<String>) {
        self.ambient = label;
    }

    pub fn insert_group(&mut self, g: Arc<PermGroup>) {
        self.groups.insert(g.label().to_string(), g);
    }

    pub fn insert_hom(&mut self, h: Arc<GroupHom>) {
        self.homs.insert(h.id().to_string(), h);
    }

    pub fn group(&self, label: &str) -> Option<&Arc<PermGroup>> {
        self.groups.get(label)
    }

    pub fn groups(&self) -> impl Iterator<Item = &Arc<PermGroup>> {
        self.groups.values()
    }

    pub fn hom(&self, id: &str) -> Option<&Arc<GroupHom>> {
        self.homs.get(id)
    }

    pub fn homs(&self) -> impl Iterator<Item = &Arc<GroupHom>> {
        self.homs.values()
    }

    /// The (cached) inclusion between two labelled groups.
    pub fn inclusion(&self, source: &str, target: &str) -> Option<Arc<GroupHom>> {
        let key = (source.to_string(), target.to_string());
        let mut cache = self.inclusions.lock().expect("catalog lock");
        if let Some(h) = cache.get(&key) {
            return Some(h.clone());
        }
        let h = Arc::new(GroupHom::inclusion(self.group(source)?.clone(), self.group(target)?.clone()));
        cache.insert(key, h.clone());
        Some(h)
    }

    /// Resolves a map reference between two labelled groups.
    pub fn resolve(&self, map: &str, source: &str, target: &str) -> Result<Arc<GroupHom>, String> {
        if map == INCLUSION {
            return self.inclusion(source, target).ok_or_else(|| format!("unknown group {source} or {target}"));
        }
        let h = self.hom(map).ok_or_else(|| format!("unknown hom {map}"))?;
        let (s, t) = (self.group(source), self.group(target));
        match (s, t) {
            (Some(s), Some(t)) if h.source().same_elements(s) && h.target().same_elements(t) => Ok(h.clone()),
            _ => Err(format!("hom {map} does not go from {source} to {target}")),
        }
    }
}

/// A cell: an orbit representative or one of its identified copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: String,
    pub dim: usize,
    pub orbit: String,
    pub stabilizer: String,
}

/// Boundary incidence `from ⊃ to` with its coefficient and structure map.
///
/// Reduced complexes may carry several incidences between the same pair of
/// cells, one per V-path; `route` then lists the cells the path visited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Incidence {
    pub from: String,
    pub to: String,
    pub coeff: i64,
    pub map: Option<String>,
    pub route: Vec<String>,
}

impl Incidence {
    pub fn new(from: &str, to: &str, coeff: i64, map: Option<&str>) -> Self {
        Incidence { from: from.into(), to: to.into(), coeff, map: map.map(String::from), route: Vec::new() }
    }
}

/// One failed check of [`GroupedComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    UnknownCell { from: String, to: String, missing: String },
    UnknownGroup { cell: String, label: String },
    Dimension { from: String, to: String },
    NonUnitCoefficient { from: String, to: String, coeff: i64 },
    MissingMap { from: String, to: String },
    BadMap { from: String, to: String, detail: String },
    BoundaryOfBoundary { upper: String, lower: String, sum: i64 },
    Composition { tau: String, sigma: String, rho: String, other_sigma: String },
    OrbitMismatch { a: String, b: String, detail: String },
    Orientation { a: String, b: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownCell { from, to, missing } => {
                write!(f, "incidence {from} > {to}: unknown cell {missing}")
            }
            Violation::UnknownGroup { cell, label } => write!(f, "cell {cell}: unknown stabilizer {label}"),
            Violation::Dimension { from, to } => {
                write!(f, "incidence {from} > {to}: dimensions differ by other than one")
            }
            Violation::NonUnitCoefficient { from, to, coeff } => {
                write!(f, "incidence {from} > {to}: coefficient {coeff} is not ±1")
            }
            Violation::MissingMap { from, to } => write!(f, "incidence {from} > {to}: missing structure map"),
            Violation::BadMap { from, to, detail } => write!(f, "incidence {from} > {to}: {detail}"),
            Violation::BoundaryOfBoundary { upper, lower, sum } => {
                write!(f, "boundary of boundary: {upper} reaches {lower} with total {sum} (nonzero mod l)")
            }
            Violation::Composition { tau, sigma, rho, other_sigma } => write!(
                f,
                "composition law fails for ({tau}, {sigma}, {rho}): routes through {sigma} and {other_sigma} disagree"
            ),
            Violation::OrbitMismatch { a, b, detail } => write!(f, "cells {a} and {b} share an orbit but {detail}"),
            Violation::Orientation { a, b } => {
                write!(f, "identified cells {a} and {b} have incompatible boundary orientations")
            }
        }
    }
}

/// A regular cell complex with a simple complex of groups on it.
#[derive(Debug, Clone)]
pub struct GroupedComplex {
    cells: Vec<Cell>,
    incidences: Vec<Incidence>,
    identifications: Vec<Vec<String>>,
    catalog: Arc<GroupCatalog>,
    index: HashMap<String, usize>,
}

impl GroupedComplex {
    pub fn new(
        cells: Vec<Cell>,
        incidences: Vec<Incidence>,
        identifications: Vec<Vec<String>>,
        catalog: Arc<GroupCatalog>,
    ) -> Result<Self, ComplexError> {
        let mut index = HashMap::new();
        for (i, c) in cells.iter().enumerate() {
            if index.insert(c.id.clone(), i).is_some() {
                return Err(ComplexError::DuplicateCell(c.id.clone()));
            }
        }
        Ok(GroupedComplex { cells, incidences, identifications, catalog, index })
    }

    pub fn empty(catalog: Arc<GroupCatalog>) -> Self {
        GroupedComplex::new(Vec::new(), Vec::new(), Vec::new(), catalog).expect("empty complex")
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn incidences(&self) -> &[Incidence] {
        &self.incidences
    }

    pub fn identifications(&self) -> &[Vec<String>] {
        &self.identifications
    }

    pub fn catalog(&self) -> &Arc<GroupCatalog> {
        &self.catalog
    }

    pub fn cell(&self, id: &str) -> Option<&Cell> {
        self.index.get(id).map(|&i| &self.cells[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Top dimension, `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn stabilizer(&self, id: &str) -> Option<&Arc<PermGroup>> {
        self.catalog.group(&self.cell(id)?.stabilizer)
    }

    /// Incidences leaving `id` (its boundary).
    pub fn boundary<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Incidence> + 'a {
        self.incidences.iter().filter(move |i| i.from == id)
    }

    /// Incidences arriving at `id` (its coboundary).
    pub fn coboundary<'a>(&'a self, id: &'a str) -> impl Iterator<Item = &'a Incidence> + 'a {
        self.incidences.iter().filter(move |i| i.to == id)
    }

    /// Structure map of an incidence, resolved and typed.
    pub fn structure_map(&self, inc: &Incidence) -> Result<Arc<GroupHom>, String> {
        let map = inc.map.as_deref().ok_or("missing structure map")?;
        let from = self.cell(&inc.from).ok_or("unknown cell")?;
        let to = self.cell(&inc.to).ok_or("unknown cell")?;
        self.catalog.resolve(map, &from.stabilizer, &to.stabilizer)
    }

    /// Orbit id → member cell ids (in file order).
    pub fn orbits(&self) -> BTreeMap<String, Vec<String>> {
        let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for c in &self.cells {
            out.entry(c.orbit.clone()).or_default().push(c.id.clone());
        }
        out
    }

    /// Representative of an orbit: the cell whose id equals the orbit, else the first listed.
    pub fn representative(&self, orbit: &str) -> Option<&Cell> {
        self.cell(orbit).filter(|c| c.orbit == orbit).or_else(|| self.cells.iter().find(|c| c.orbit == orbit))
    }

    /// One cell per orbit; boundaries are those of the representatives, with
    /// faces replaced by their orbit representatives.
    pub fn quotient(&self) -> GroupedComplex {
        let reps: BTreeMap<String, String> = self
            .orbits()
            .keys()
            .map(|o| (o.clone(), self.representative(o).expect("orbit has a cell").id.clone()))
            .collect();
        let is_rep: BTreeSet<&str> = reps.values().map(String::as_str).collect();
        let cells: Vec<Cell> = self.cells.iter().filter(|c| is_rep.contains(c.id.as_str())).cloned().collect();
        let incidences = self
            .incidences
            .iter()
            .filter(|i| is_rep.contains(i.from.as_str()))
            .filter_map(|i| {
                let to = self.cell(&i.to)?;
                let mut j = i.clone();
                j.to = reps[&to.orbit].clone();
                Some(j)
            })
            .collect();
        GroupedComplex::new(cells, incidences, Vec::new(), self.catalog.clone()).expect("representatives are unique")
    }

    /// Checks every structural invariant; an empty list means valid.
    pub fn validate(&self, l: u64) -> Vec<Violation> {
        let mut out = Vec::new();
        for c in &self.cells {
            if self.catalog.group(&c.stabilizer).is_none() {
                out.push(Violation::UnknownGroup { cell: c.id.clone(), label: c.stabilizer.clone() });
            }
        }
        let mut maps: Vec<Option<Arc<GroupHom>>> = Vec::with_capacity(self.incidences.len());
        for inc in &self.incidences {
            maps.push(None);
            let (Some(from), Some(to)) = (self.cell(&inc.from), self.cell(&inc.to)) else {
                let missing = if self.cell(&inc.from).is_none() { &inc.from } else { &inc.to };
                out.push(Violation::UnknownCell {
                    from: inc.from.clone(),
                    to: inc.to.clone(),
                    missing: missing.clone(),
                });
                continue;
            };
            if from.dim != to.dim + 1 {
                out.push(Violation::Dimension { from: inc.from.clone(), to: inc.to.clone() });
            }
            if inc.coeff.abs() != 1 {
                out.push(Violation::NonUnitCoefficient {
                    from: inc.from.clone(),
                    to: inc.to.clone(),
                    coeff: inc.coeff,
                });
            }
            if inc.map.is_none() {
                out.push(Violation::MissingMap { from: inc.from.clone(), to: inc.to.clone() });
                continue;
            }
            if self.catalog.group(&from.stabilizer).is_none() || self.catalog.group(&to.stabilizer).is_none() {
                continue;
            }
            match self.structure_map(inc) {
                Err(detail) => out.push(Violation::BadMap { from: inc.from.clone(), to: inc.to.clone(), detail }),
                Ok(h) => match h.verify() {
                    Err(v) => out.push(Violation::BadMap {
                        from: inc.from.clone(),
                        to: inc.to.clone(),
                        detail: format!("structure map {}: {v}", h.id()),
                    }),
                    Ok(()) if !h.flagged_injective() => out.push(Violation::BadMap {
                        from: inc.from.clone(),
                        to: inc.to.clone(),
                        detail: format!("structure map {} is not flagged injective", h.id()),
                    }),
                    Ok(()) => *maps.last_mut().unwrap() = Some(h),
                },
            }
        }
        out.extend(self.boundary_of_boundary(l));
        out.extend(self.composition_violations(&maps));
        out.extend(self.orbit_violations());
        out
    }

    fn boundary_of_boundary(&self, l: u64) -> Vec<Violation> {
        let l = l as i64;
        let mut by_from: HashMap<&str, Vec<&Incidence>> = HashMap::new();
        for inc in &self.incidences {
            by_from.entry(&inc.from).or_default().push(inc);
        }
        let mut out = Vec::new();
        for rho in &self.cells {
            let mut sums: BTreeMap<&str, i64> = BTreeMap::new();
            for a in by_from.get(rho.id.as_str()).into_iter().flatten() {
                for b in by_from.get(a.to.as_str()).into_iter().flatten() {
                    *sums.entry(&b.to).or_default() += a.coeff * b.coeff;
                }
            }
            for (lower, sum) in sums {
                if sum.rem_euclid(l) != 0 {
                    out.push(Violation::BoundaryOfBoundary { upper: rho.id.clone(), lower: lower.into(), sum });
                }
            }
        }
        out
    }

    fn composition_violations(&self, maps: &[Option<Arc<GroupHom>>]) -> Vec<Violation> {
        let mut by_from: HashMap<&str, Vec<usize>> = HashMap::new();
        for (k, inc) in self.incidences.iter().enumerate() {
            by_from.entry(&inc.from).or_default().push(k);
        }
        let mut out = Vec::new();
        for rho in &self.cells {
            let Some(g) = self.catalog.group(&rho.stabilizer) else {
                continue;
            };
            // tau -> (sigma, generator images) of the first route seen
            let mut first: BTreeMap<&str, (&str, Vec<_>)> = BTreeMap::new();
            let mut reported: BTreeSet<&str> = BTreeSet::new();
            for &a in by_from.get(rho.id.as_str()).into_iter().flatten() {
                let Some(ha) = &maps[a] else { continue };
                let sigma = self.incidences[a].to.as_str();
                for &b in by_from.get(sigma).into_iter().flatten() {
                    let Some(hb) = &maps[b] else { continue };
                    let tau = self.incidences[b].to.as_str();
                    let images: Option<Vec<_>> =
                        g.generators().iter().map(|x| ha.apply(x).and_then(|y| hb.apply(&y))).collect();
                    let Some(images) = images else { continue };
                    match first.get(tau) {
                        None => {
                            first.insert(tau, (sigma, images));
                        }
                        Some((s0, im0)) if *im0 != images && !reported.contains(tau) => {
                            reported.insert(tau);
                            out.push(Violation::Composition {
                                tau: tau.into(),
                                sigma: (*s0).into(),
                                rho: rho.id.clone(),
                                other_sigma: sigma.into(),
                            });
                        }
                        Some(_) => {}
                    }
                }
            }
        }
        out
    }

    fn orbit_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for members in self.orbits().values() {
            let a = self.cell(&members[0]).unwrap();
            let sig_a = self.face_signature(&a.id);
            for b in &members[1..] {
                let b = self.cell(b).unwrap();
                if a.dim != b.dim {
                    out.push(Violation::OrbitMismatch {
                        a: a.id.clone(),
                        b: b.id.clone(),
                        detail: "dimensions differ".into(),
                    });
                } else if a.stabilizer != b.stabilizer {
                    out.push(Violation::OrbitMismatch {
                        a: a.id.clone(),
                        b: b.id.clone(),
                        detail: "stabilizer labels differ".into(),
                    });
                } else if self.face_signature(&b.id) != sig_a {
                    out.push(Violation::Orientation { a: a.id.clone(), b: b.id.clone() });
                }
            }
        }
        for class in &self.identifications {
            let orbits: BTreeSet<Option<&str>> =
                class.iter().map(|id| self.cell(id).map(|c| c.orbit.as_str())).collect();
            for id in class {
                if self.cell(id).is_none() {
                    out.push(Violation::UnknownCell { from: id.clone(), to: id.clone(), missing: id.clone() });
                }
            }
            if orbits.len() > 1 && orbits.iter().all(Option::is_some) {
                out.push(Violation::OrbitMismatch {
                    a: class[0].clone(),
                    b: class[class.len() - 1].clone(),
                    detail: "are identified while carrying different orbit ids".into(),
                });
            }
        }
        out
    }

    /// Sorted (face orbit, coefficient) pairs of a cell's boundary.
    fn face_signature(&self, id: &str) -> Vec<(String, i64)> {
        let mut v: Vec<(String, i64)> = self
            .boundary(id)
            .map(|i| (self.cell(&i.to).map(|c| c.orbit.clone()).unwrap_or_default(), i.coeff))
            .collect();
        v.sort();
        v
    }

    /// Cells whose stabilizer order is divisible by `l`, with incidences and
    /// identifications restricted to them.
    pub fn torsion_subcomplex(&self, l: u64) -> Result<GroupedComplex, ComplexError> {
        let keep: BTreeSet<&str> = self
            .cells
            .iter()
            .filter(|c| self.stabilizer(&c.id).is_some_and(|g| g.has_order_l_element(l as usize)))
            .map(|c| c.id.as_str())
            .collect();
        for inc in &self.incidences {
            if keep.contains(inc.from.as_str()) && !keep.contains(inc.to.as_str()) {
                return Err(ComplexError::NotClosed { cell: inc.from.clone(), face: inc.to.clone() });
            }
        }
        let cells = self.cells.iter().filter(|c| keep.contains(c.id.as_str())).cloned().collect();
        let incidences = self.incidences.iter().filter(|i| keep.contains(i.from.as_str())).cloned().collect();
        let identifications = self
            .identifications
            .iter()
            .map(|cl| cl.iter().filter(|id| keep.contains(id.as_str())).cloned().collect::<Vec<_>>())
            .filter(|cl| cl.len() > 1)
            .collect();
        debug!("torsion subcomplex keeps {} of {} cells", keep.len(), self.cells.len());
        GroupedComplex::new(cells, incidences, identifications, self.catalog.clone())
    }

    /// Parity of the number of orbits (equivalently of the alternating orbit count).
    pub fn orbit_euler_mod2(&self) -> u8 {
        (self.orbits().len() % 2) as u8
    }

    /// Standard barycentric subdivision of a simplicial complex. New cells
    /// are flags `c0 < c1 < … < ck` (id `c0<c1<…<ck`), each stabilized by the
    /// intersection of the stabilizers along the flag inside the ambient group.
    pub fn barycentric_subdivision(&self) -> Result<GroupedComplex, ComplexError> {
        if !self.identifications.is_empty() {
            return Err(ComplexError::NotSimplicial("complex has identifications".into()));
        }
        for c in &self.cells {
            let faces: Vec<&Incidence> = self.boundary(&c.id).collect();
            let distinct: BTreeSet<&str> = faces.iter().map(|i| i.to.as_str()).collect();
            let ok =
                if c.dim == 0 { faces.is_empty() } else { faces.len() == c.dim + 1 && distinct.len() == faces.len() };
            if !ok || faces.iter().any(|i| i.coeff.abs() != 1) {
                return Err(ComplexError::NotSimplicial(format!("cell {} has a non-simplex boundary", c.id)));
            }
        }
        let ambient = self
            .catalog
            .ambient()
            .ok_or_else(|| ComplexError::NoAmbientGroup("the group catalog names no ambient group".into()))?;
        for c in &self.cells {
            let g = self.stabilizer(&c.id).ok_or_else(|| ComplexError::UnknownGroup(c.stabilizer.clone()))?;
            if !g.is_subgroup_of(ambient) {
                return Err(ComplexError::NoAmbientGroup(format!(
                    "stabilizer of {} is not inside the ambient group",
                    c.id
                )));
            }
        }
        // all proper faces of each cell
        let mut closure: HashMap<&str, BTreeSet<&str>> = HashMap::new();
        let mut by_dim: Vec<&Cell> = self.cells.iter().collect();
        by_dim.sort_by_key(|c| c.dim);
        for c in &by_dim {
            let mut set = BTreeSet::new();
            for i in self.boundary(&c.id) {
                set.insert(i.to.as_str());
                set.extend(closure.get(i.to.as_str()).cloned().unwrap_or_default());
            }
            closure.insert(c.id.as_str(), set);
        }
        let mut flags: Vec<Vec<&str>> = Vec::new();
        for c in &by_dim {
            extend_flags(&closure, vec![c.id.as_str()], &mut flags);
        }
        let mut catalog = (*self.catalog).clone();
        let mut cells = Vec::new();
        let mut incidences = Vec::new();
        for flag in &flags {
            // flag is stored top-down; ids read bottom-up
            let up: Vec<&str> = flag.iter().rev().copied().collect();
            let id = up.join("<");
            let top = self.cell(up[up.len() - 1]).unwrap();
            let mut g = self.stabilizer(&top.id).unwrap().clone();
            for c in &up {
                let h = self.stabilizer(c).unwrap();
                if !g.is_subgroup_of(h) {
                    let label = format!("G[{id}]");
                    g = Arc::new(g.intersection(h, label).map_err(|e| ComplexError::NoAmbientGroup(e.to_string()))?);
                }
            }
            let label = if catalog.group(g.label()).is_some_and(|x| x.same_elements(&g)) {
                g.label().to_string()
            } else {
                catalog.insert_group(g.clone());
                g.label().to_string()
            };
            cells.push(Cell { id: id.clone(), dim: up.len() - 1, orbit: id.clone(), stabilizer: label });
            if up.len() > 1 {
                for i in 0..up.len() {
                    let face: Vec<&str> = up.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, c)| *c).collect();
                    let coeff = if i % 2 == 0 { 1 } else { -1 };
                    incidences.push(Incidence::new(&id, &face.join("<"), coeff, Some(INCLUSION)));
                }
            }
        }
        cells.sort_by(|a, b| a.dim.cmp(&b.dim).then_with(|| a.id.cmp(&b.id)));
        GroupedComplex::new(cells, incidences, Vec::new(), Arc::new(catalog))
    }
}

/// Collects every flag starting with `flag` (listed top-down).
fn extend_flags<'a>(closure: &HashMap<&'a str, BTreeSet<&'a str>>, flag: Vec<&'a str>, out: &mut Vec<Vec<&'a str>>) {
    let last = *flag.last().unwrap();
    out.push(flag.clone());
    for f in &closure[last] {
        let mut next = flag.clone();
        next.push(f);
        extend_flags(closure, next, out);
    }
}
