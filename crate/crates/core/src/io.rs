//! JSON formats: group catalogs, complexes, ring presentations, ring maps
//! (with errata), restriction diagrams, orderings, vector fields and run
//! configurations. Every file carries `"schema": "tatecomplex/1"`; relative
//! paths inside a run configuration resolve against its directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use log::{info, warn};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraMap, AlgebraPresentation, QuotientRing};
use crate::complex::{Cell, ComplexError, GroupCatalog, GroupedComplex, Incidence};
use crate::fusion::{FusionMode, FusionPolicy, OracleEntry};
use crate::groups::{GroupError, GroupHom, Perm, PermGroup};
use crate::morse::{morse_reduce, MorseError, VectorField};
use crate::specseq::{Diagram, Square};
use crate::SCHEMA;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: schema {found:?}, expected {SCHEMA:?}")]
    Schema { path: PathBuf, found: String },
    #[error("{path}: {detail}")]
    Invalid { path: PathBuf, detail: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Morse(#[from] MorseError),
}

fn invalid(path: &Path, detail: impl Into<String>) -> IoError {
    IoError::Invalid { path: path.to_path_buf(), detail: detail.into() }
}

/// Reads a JSON file, checking the schema tag when present.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })?;
    let value: Value = serde_json::from_str(&text).map_err(|source| IoError::Json { path: path.into(), source })?;
    match value.get("schema") {
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(IoError::Schema { path: path.into(), found: other.to_string() }),
        None => warn!("{}: no schema tag", path.display()),
    }
    serde_json::from_value(value).map_err(|source| IoError::Json { path: path.into(), source })
}

/// Adds the schema tag to a serializable value (objects only).
pub fn tagged(value: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(value).expect("serializable");
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

/// Writes `tagged(value)` as pretty JSON.
pub fn write_tagged(path: &Path, value: &impl Serialize) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(&tagged(value)).expect("serializable") + "\n";
    fs::write(path, text).map_err(|source| IoError::Read { path: path.into(), source })
}

#[derive(Debug, Clone, Deserialize)]
struct GroupSpec {
    label: String,
    degree: usize,
    #[serde(default)]
    generators: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Deserialize)]
struct HomSpec {
    id: String,
    source: String,
    target: String,
    images: Vec<Vec<usize>>,
    #[serde(default = "yes")]
    injective: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum GroupsFile {
    Collection {
        #[serde(default)]
        ambient: Option<String>,
        groups: Vec<GroupSpec>,
        #[serde(default)]
        homs: Vec<HomSpec>,
    },
    Single(GroupSpec),
}

/// Loads a group catalog (a collection with optional ambient group and
/// homomorphisms, or a single group).
pub fn load_groups(path: &Path) -> Result<GroupCatalog, IoError> {
    let file: GroupsFile = read_json(path)?;
    let (ambient, groups, homs) = match file {
        GroupsFile::Collection { ambient, groups, homs } => (ambient, groups, homs),
        GroupsFile::Single(g) => (None, vec![g], Vec::new()),
    };
    let mut cat = GroupCatalog::new(ambient.clone());
    for g in groups {
        cat.insert_group(Arc::new(PermGroup::from_one_based(g.label, g.degree, &g.generators)?));
    }
    if let Some(a) = &ambient {
        if cat.group(a).is_none() {
            return Err(invalid(path, format!("ambient group {a} is not listed")));
        }
    }
    for h in homs {
        let (Some(s), Some(t)) = (cat.group(&h.source).cloned(), cat.group(&h.target).cloned()) else {
            return Err(invalid(path, format!("hom {} names an unknown group", h.id)));
        };
        let images = h
            .images
            .iter()
            .map(|p| Perm::from_one_based(p).ok_or_else(|| invalid(path, format!("hom {}: bad image {p:?}", h.id))))
            .collect::<Result<Vec<_>, _>>()?;
        let hom = GroupHom::new(h.id.clone(), s, t, images, h.injective);
        hom.verify().map_err(|e| invalid(path, format!("hom {}: {e}", h.id)))?;
        cat.insert_hom(Arc::new(hom));
    }
    Ok(cat)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CellSpec {
    id: String,
    dim: usize,
    #[serde(default)]
    orbit: Option<String>,
    stabilizer: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct IncidenceSpec {
    from: String,
    to: String,
    coeff: i64,
    #[serde(default)]
    map: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    route: Vec<String>,
}

/// An arrow named by cell ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowSpec {
    pub lower: String,
    pub upper: String,
}

#[derive(Debug, Clone, Deserialize)]
struct ComplexFile {
    cells: Vec<CellSpec>,
    #[serde(default)]
    incidences: Vec<IncidenceSpec>,
    #[serde(default)]
    identifications: Vec<Vec<String>>,
    #[serde(default)]
    premerge: Vec<ArrowSpec>,
}

/// A complex together with the fixture-level merges to apply before use.
#[derive(Debug, Clone)]
pub struct LoadedComplex {
    pub complex: GroupedComplex,
    pub premerge: Vec<ArrowSpec>,
}

/// Loads a complex against a group catalog.
pub fn load_complex(path: &Path, catalog: Arc<GroupCatalog>) -> Result<LoadedComplex, IoError> {
    let file: ComplexFile = read_json(path)?;
    let cells = file
        .cells
        .into_iter()
        .map(|c| Cell {
            orbit: c.orbit.unwrap_or_else(|| c.id.clone()),
            id: c.id,
            dim: c.dim,
            stabilizer: c.stabilizer,
        })
        .collect();
    let incidences = file
        .incidences
        .into_iter()
        .map(|i| Incidence { from: i.from, to: i.to, coeff: i.coeff, map: i.map, route: i.route })
        .collect();
    let complex = GroupedComplex::new(cells, incidences, file.identifications, catalog)?;
    Ok(LoadedComplex { complex, premerge: file.premerge })
}

/// Applies the fixture-level merges: each listed pair is cancelled as a
/// Morse arrow certified by `policy`.
pub fn apply_premerge(lc: &LoadedComplex, policy: &FusionPolicy) -> Result<GroupedComplex, IoError> {
    if lc.premerge.is_empty() {
        return Ok(lc.complex.clone());
    }
    let arrows: Vec<(String, String)> = lc.premerge.iter().map(|a| (a.lower.clone(), a.upper.clone())).collect();
    let field = VectorField::from_arrows(&lc.complex, &arrows, policy)?;
    info!("pre-merge: cancelling {} pair(s)", arrows.len());
    Ok(morse_reduce(&lc.complex, &field)?)
}

/// JSON form of a complex, including any composite homomorphisms created by
/// a reduction.
pub fn complex_to_json(x: &GroupedComplex) -> Value {
    let cells: Vec<CellSpec> = x
        .cells()
        .iter()
        .map(|c| CellSpec {
            id: c.id.clone(),
            dim: c.dim,
            orbit: Some(c.orbit.clone()),
            stabilizer: c.stabilizer.clone(),
        })
        .collect();
    let incidences: Vec<IncidenceSpec> = x
        .incidences()
        .iter()
        .map(|i| IncidenceSpec {
            from: i.from.clone(),
            to: i.to.clone(),
            coeff: i.coeff,
            map: i.map.clone(),
            route: i.route.clone(),
        })
        .collect();
    let used: std::collections::BTreeSet<&str> = x.incidences().iter().filter_map(|i| i.map.as_deref()).collect();
    let homs: Vec<Value> = x
        .catalog()
        .homs()
        .filter(|h| used.contains(h.id()))
        .map(|h| {
            json!({
                "id": h.id(),
                "source": h.source().label(),
                "target": h.target().label(),
                "images": h.images().iter().map(Perm::one_based).collect::<Vec<_>>(),
                "injective": h.flagged_injective(),
            })
        })
        .collect();
    tagged(&json!({
        "cells": cells,
        "incidences": incidences,
        "identifications": x.identifications(),
        "homs": homs,
    }))
}

#[derive(Debug, Clone, Deserialize)]
struct RingSpec {
    label: String,
    generators: Vec<(String, u16)>,
    #[serde(default)]
    relations: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct AlgebraFile {
    rings: Vec<RingSpec>,
    assignment: BTreeMap<String, String>,
}

/// Ring presentations by label and the orbit → ring-label assignment.
#[derive(Debug, Clone)]
pub struct AlgebraData {
    pub presentations: BTreeMap<String, AlgebraPresentation>,
    pub assignment: BTreeMap<String, String>,
}

pub fn load_algebra(path: &Path) -> Result<AlgebraData, IoError> {
    let file: AlgebraFile = read_json(path)?;
    let mut presentations = BTreeMap::new();
    for r in file.rings {
        let p = AlgebraPresentation::parse(&r.label, &r.generators, &r.relations)?;
        if presentations.insert(r.label.clone(), p).is_some() {
            return Err(invalid(path, format!("duplicate ring {}", r.label)));
        }
    }
    for (orbit, label) in &file.assignment {
        if !presentations.contains_key(label) {
            return Err(invalid(path, format!("orbit {orbit} is assigned unknown ring {label}")));
        }
    }
    Ok(AlgebraData { presentations, assignment: file.assignment })
}

impl AlgebraData {
    /// Largest generator degree over all rings.
    pub fn max_generator_degree(&self) -> u16 {
        self.presentations.values().flat_map(|p| p.degrees.iter().copied()).max().unwrap_or(0)
    }

    /// Quotient rings truncated at `dmax`, built in parallel, keyed by label.
    pub fn rings(&self, dmax: u16) -> Result<BTreeMap<String, Arc<QuotientRing>>, IoError> {
        use rayon::prelude::*;
        let built: Vec<(String, Result<QuotientRing, AlgebraError>)> =
            self.presentations.par_iter().map(|(l, p)| (l.clone(), QuotientRing::new(p.clone(), dmax))).collect();
        built.into_iter().map(|(l, r)| Ok((l, Arc::new(r?)))).collect()
    }

    /// Orbit → ring, given rings by label.
    pub fn by_orbit(&self, rings: &BTreeMap<String, Arc<QuotientRing>>) -> BTreeMap<String, Arc<QuotientRing>> {
        self.assignment.iter().filter_map(|(o, l)| Some((o.clone(), rings.get(l)?.clone()))).collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
struct MapSpec {
    lower: String,
    upper: String,
    source: String,
    target: String,
    images: BTreeMap<String, String>,
}

/// A documented correction to a transcribed generator image.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Erratum {
    pub lower: String,
    pub upper: String,
    pub generator: String,
    pub published: String,
    pub proposed: String,
    #[serde(default)]
    pub apply: bool,
    #[serde(default)]
    pub reason: String,
}

#[derive(Debug, Clone, Deserialize)]
struct MapsFile {
    maps: Vec<MapSpec>,
    #[serde(default)]
    errata: Vec<Erratum>,
}

/// Ring maps keyed by (lower orbit, upper orbit), with the errata that were applied.
#[derive(Debug, Clone)]
pub struct LoadedMaps {
    pub maps: BTreeMap<(String, String), Arc<AlgebraMap>>,
    pub errata: Vec<Erratum>,
    pub applied: Vec<Erratum>,
}

/// Which errata to apply when loading maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrataMode {
    /// Apply the entries flagged `apply`.
    Flagged,
    /// Use the transcribed text verbatim.
    Verbatim,
}

/// Loads ring maps; errata must quote the transcribed text exactly.
pub fn load_maps(
    path: &Path,
    rings: &BTreeMap<String, Arc<QuotientRing>>,
    mode: ErrataMode,
) -> Result<LoadedMaps, IoError> {
    let file: MapsFile = read_json(path)?;
    let mut specs = file.maps;
    for e in &file.errata {
        let spec = specs
            .iter()
            .find(|m| m.lower == e.lower && m.upper == e.upper)
            .ok_or_else(|| invalid(path, format!("erratum for unknown map {} → {}", e.lower, e.upper)))?;
        let text = spec.images.get(&e.generator).map(String::as_str).unwrap_or("");
        if text != e.published {
            return Err(invalid(
                path,
                format!(
                    "erratum {} → {} {}: quotes {:?} but the map has {text:?}",
                    e.lower, e.upper, e.generator, e.published
                ),
            ));
        }
    }
    let mut applied = Vec::new();
    if mode == ErrataMode::Flagged {
        for e in file.errata.iter().filter(|e| e.apply) {
            let spec = specs.iter_mut().find(|m| m.lower == e.lower && m.upper == e.upper).expect("checked above");
            spec.images.insert(e.generator.clone(), e.proposed.clone());
            info!("erratum {} → {}: {} ↦ {}", e.lower, e.upper, e.generator, e.proposed);
            applied.push(e.clone());
        }
    }
    let mut maps = BTreeMap::new();
    for m in specs {
        let ring = |l: &str| rings.get(l).cloned().ok_or_else(|| invalid(path, format!("unknown ring {l}")));
        let id = format!("{}>{}", m.lower, m.upper);
        let map = AlgebraMap::parse(id, ring(&m.source)?, ring(&m.target)?, &m.images)?;
        if maps.insert((m.lower.clone(), m.upper.clone()), Arc::new(map)).is_some() {
            return Err(invalid(path, format!("duplicate map {} → {}", m.lower, m.upper)));
        }
    }
    Ok(LoadedMaps { maps, errata: file.errata, applied })
}

#[derive(Debug, Clone, Deserialize)]
struct SquareSpec {
    routes: [(String, String); 2],
    corner: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
struct DiagramSpec {
    name: String,
    vertex: String,
    #[serde(default)]
    edges: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    squares: Vec<SquareSpec>,
}

#[derive(Debug, Clone, Deserialize)]
struct DiagramsFile {
    diagrams: Vec<DiagramSpec>,
}

pub fn load_diagrams(path: &Path) -> Result<Vec<Diagram>, IoError> {
    let file: DiagramsFile = read_json(path)?;
    Ok(file
        .diagrams
        .into_iter()
        .map(|d| Diagram {
            name: d.name,
            vertex: d.vertex,
            edges: d.edges,
            squares: d.squares.into_iter().map(|s| Square { routes: s.routes, corner: s.corner }).collect(),
        })
        .collect())
}

#[derive(Debug, Clone, Deserialize)]
struct OrderingFile {
    order: Vec<String>,
}

pub fn load_ordering(path: &Path) -> Result<Vec<String>, IoError> {
    Ok(read_json::<OrderingFile>(path)?.order)
}

#[derive(Debug, Clone, Deserialize)]
struct FieldFile {
    arrows: Vec<ArrowSpec>,
}

/// Loads an explicit list of arrows.
pub fn load_field(path: &Path) -> Result<Vec<(String, String)>, IoError> {
    Ok(read_json::<FieldFile>(path)?.arrows.into_iter().map(|a| (a.lower, a.upper)).collect())
}

/// The policy block of a run configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolicySpec {
    pub mode: FusionMode,
    #[serde(default)]
    pub l: Option<u64>,
    #[serde(default)]
    pub oracle: Vec<OracleEntry>,
}

impl PolicySpec {
    pub fn policy(&self, l: u64) -> FusionPolicy {
        FusionPolicy { mode: self.mode, l: self.l.unwrap_or(l), oracle: self.oracle.iter().cloned().collect() }
    }
}

/// Inputs of the Steinberg exact-sequence bookkeeping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SteinbergSpec {
    pub vcd: usize,
    pub group_cohomology: BTreeMap<usize, usize>,
    #[serde(default)]
    pub known: BTreeMap<usize, usize>,
    #[serde(default)]
    pub connecting: Option<Vec<usize>>,
}

/// A run configuration with paths already resolved.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub complex: PathBuf,
    pub groups: PathBuf,
    #[serde(default)]
    pub algebra: Option<PathBuf>,
    #[serde(default)]
    pub maps: Option<PathBuf>,
    #[serde(default)]
    pub diagrams: Option<PathBuf>,
    #[serde(default)]
    pub ordering: Option<PathBuf>,
    #[serde(default)]
    pub field: Option<PathBuf>,
    #[serde(default = "two")]
    pub l: u64,
    pub policy: PolicySpec,
    #[serde(default = "default_qmax")]
    pub qmax: u16,
    #[serde(default)]
    pub steinberg: Option<SteinbergSpec>,
}

fn two() -> u64 {
    2
}

fn default_qmax() -> u16 {
    42
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let mut cfg: RunConfig = read_json(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut cfg.complex);
        fix(&mut cfg.groups);
        for p in [&mut cfg.algebra, &mut cfg.maps, &mut cfg.diagrams, &mut cfg.ordering, &mut cfg.field]
            .into_iter()
            .flatten()
        {
            fix(p);
        }
        Ok(cfg)
    }

    pub fn policy(&self) -> FusionPolicy {
        self.policy.policy(self.l)
    }

    /// Group catalog plus complex (before any pre-merge).
    pub fn load_complex(&self) -> Result<LoadedComplex, IoError> {
        let catalog = Arc::new(load_groups(&self.groups)?);
        load_complex(&self.complex, catalog)
    }

    /// The complex the spectral sequence runs on: pre-merges applied.
    pub fn prepared_complex(&self) -> Result<GroupedComplex, IoError> {
        apply_premerge(&self.load_complex()?, &self.policy())
    }

    pub fn ordering(&self) -> Result<Option<Vec<String>>, IoError> {
        self.ordering.as_deref().map(load_ordering).transpose()
    }

    pub fn require<'a>(&self, what: &str, p: &'a Option<PathBuf>) -> Result<&'a Path, IoError> {
        p.as_deref().ok_or_else(|| invalid(Path::new("config"), format!("no {what} file configured")))
    }
}

/// Everything the spectral-sequence commands need.
pub struct AlgebraSetup {
    pub complex: GroupedComplex,
    pub algebra: AlgebraData,
    pub rings: BTreeMap<String, Arc<QuotientRing>>,
    pub maps: LoadedMaps,
}

impl AlgebraSetup {
    /// Loads complex, rings (truncated at least at `qmax`) and maps.
    pub fn load(cfg: &RunConfig, qmax: u16, errata: ErrataMode) -> Result<Self, IoError> {
        crate::algebra::require_mod2(cfg.l)?;
        let complex = cfg.prepared_complex()?;
        let algebra = load_algebra(cfg.require("algebra", &cfg.algebra)?)?;
        let dmax = qmax.max(2 * algebra.max_generator_degree());
        let rings = algebra.rings(dmax)?;
        let maps = load_maps(cfg.require("maps", &cfg.maps)?, &rings, errata)?;
        Ok(AlgebraSetup { complex, algebra, rings, maps })
    }

    /// Orbit → ring and pair → map, ready for the d1 engine.
    pub fn assignment(&self) -> Result<crate::specseq::RingAssignment, crate::specseq::SpecSeqError> {
        crate::specseq::RingAssignment::from_complex(
            &self.complex,
            &self.algebra.by_orbit(&self.rings),
            &self.maps.maps,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixtures() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
    }

    #[test]
    fn sl3_fixture_loads() {
        let cfg = RunConfig::load(&fixtures().join("sl3z.config.json")).unwrap();
        let lc = cfg.load_complex().unwrap();
        assert_eq!(lc.complex.cells().len(), 7 + 13 + 7);
        assert_eq!(cfg.policy().mode, FusionMode::SylowBurnside);
        assert_eq!(cfg.ordering().unwrap().unwrap().len(), 23);
        assert!(lc.complex.validate(2).is_empty(), "{:?}", lc.complex.validate(2));
    }

    #[test]
    fn schema_mismatch_is_rejected() {
        let dir = std::env::temp_dir().join(format!("tc-io-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let p = dir.join("bad.json");
        fs::write(&p, r#"{"schema": "other/9", "order": []}"#).unwrap();
        assert!(matches!(load_ordering(&p), Err(IoError::Schema { .. })));
        fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn tagging_adds_schema() {
        let v = tagged(&json!({"a": 1}));
        assert_eq!(v["schema"], SCHEMA);
    }
}
