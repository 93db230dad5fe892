//! Shared test helpers: fixture paths, seeded random complexes of groups
//! with elementary-abelian stabilizers, and independent linear-algebra
//! oracles.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tatecomplex::algebra::{AlgebraMap, AlgebraPresentation, Monomial, Polynomial, QuotientRing};
use tatecomplex::complex::{Cell, GroupCatalog, GroupedComplex, Incidence};
use tatecomplex::groups::{Perm, PermGroup, INCLUSION};
use tatecomplex::io::AlgebraSetup;
use tatecomplex::specseq::RingAssignment;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

/// Rank of the ambient elementary abelian group `(Z/2)^RANK` acting on `2·RANK` points.
pub const RANK: usize = 3;

/// Bit mask of coordinates → label of the coordinate subgroup.
pub fn group_label(mask: u8) -> String {
    format!("E{mask}")
}

fn coordinate_group(mask: u8) -> PermGroup {
    let gens = (0..RANK)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| Perm::from_cycles(2 * RANK, &[&[2 * i + 1, 2 * i + 2]]).unwrap())
        .collect();
    PermGroup::new(group_label(mask), 2 * RANK, gens).unwrap()
}

/// A random simplicial complex (at most `max_cells` cells, dimension ≤ 3)
/// whose cells are stabilized by non-trivial coordinate subgroups of
/// `(Z/2)^3`, with stabilizers growing towards faces.
pub struct RandomComplex {
    pub complex: GroupedComplex,
    /// Cell id → coordinate mask of its stabilizer.
    pub masks: BTreeMap<String, u8>,
}

pub fn random_complex(seed: u64, max_cells: usize) -> RandomComplex {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=7usize);
    let mut simplices: BTreeSet<Vec<usize>> = BTreeSet::new();
    let tries = rng.gen_range(1..=6);
    for _ in 0..tries {
        let k = rng.gen_range(1..=4usize.min(n));
        let mut verts: Vec<usize> = (0..n).collect();
        verts.shuffle(&mut rng);
        let mut top: Vec<usize> = verts[..k].to_vec();
        top.sort();
        let mut closure = BTreeSet::new();
        for sub in 1u32..(1 << k) {
            closure.insert((0..k).filter(|i| sub >> i & 1 == 1).map(|i| top[i]).collect::<Vec<_>>());
        }
        if simplices.union(&closure).count() > max_cells {
            break;
        }
        simplices.extend(closure);
    }
    if simplices.is_empty() {
        simplices.insert(vec![0]);
    }
    let id = |s: &[usize]| s.iter().map(|v| format!("v{v}")).collect::<Vec<_>>().join("");
    // top-down stabilizers: a face contains the groups of its cofaces
    let mut by_dim: Vec<&Vec<usize>> = simplices.iter().collect();
    by_dim.sort_by_key(|s| std::cmp::Reverse(s.len()));
    let mut masks: BTreeMap<Vec<usize>, u8> = BTreeMap::new();
    for s in &by_dim {
        let mut m = simplices
            .iter()
            .filter(|t| t.len() == s.len() + 1 && s.iter().all(|v| t.contains(v)))
            .fold(0u8, |acc, t| acc | masks[t]);
        if m == 0 || rng.gen_bool(0.3) {
            m |= 1 << rng.gen_range(0..RANK);
        }
        masks.insert((*s).clone(), m);
    }
    let mut catalog = GroupCatalog::new(None);
    for mask in 1u8..(1 << RANK) {
        catalog.insert_group(Arc::new(coordinate_group(mask)));
    }
    let cells: Vec<Cell> = simplices
        .iter()
        .map(|s| {
            let i = id(s);
            Cell { id: i.clone(), dim: s.len() - 1, orbit: i, stabilizer: group_label(masks[s]) }
        })
        .collect();
    let mut incidences = Vec::new();
    for s in simplices.iter().filter(|s| s.len() > 1) {
        for i in 0..s.len() {
            let mut f = s.clone();
            f.remove(i);
            let c = if i % 2 == 0 { 1 } else { -1 };
            incidences.push(Incidence::new(&id(s), &id(&f), c, Some(INCLUSION)));
        }
    }
    let complex = GroupedComplex::new(cells, incidences, vec![], Arc::new(catalog)).unwrap();
    let masks = simplices.iter().map(|s| (id(s), masks[s])).collect();
    RandomComplex { complex, masks }
}

fn mask_of(label: &str) -> u8 {
    label.trim_start_matches('E').parse().unwrap()
}

/// `H*((Z/2)^S) = F2[x_i : i ∈ S]`, one ring per mask, truncated at `dmax`.
pub fn coordinate_rings(dmax: u16) -> BTreeMap<u8, Arc<QuotientRing>> {
    (1u8..(1 << RANK))
        .map(|mask| {
            let gens: Vec<(String, u16)> =
                (0..RANK).filter(|i| mask >> i & 1 == 1).map(|i| (format!("x{i}"), 1)).collect();
            let p = AlgebraPresentation::free(&format!("P{mask}"), &gens).unwrap();
            (mask, Arc::new(QuotientRing::new(p, dmax).unwrap()))
        })
        .collect()
}

/// Restriction `H*(E_big) → H*(E_small)` for coordinate subgroups `small ⊆ big`.
pub fn restriction(rings: &BTreeMap<u8, Arc<QuotientRing>>, big: u8, small: u8) -> Arc<AlgebraMap> {
    let images: BTreeMap<String, String> = (0..RANK)
        .filter(|i| big >> i & 1 == 1)
        .map(|i| (format!("x{i}"), if small >> i & 1 == 1 { format!("x{i}") } else { "0".into() }))
        .collect();
    Arc::new(
        AlgebraMap::parse(format!("res{big}_{small}"), rings[&big].clone(), rings[&small].clone(), &images).unwrap(),
    )
}

/// Ring assignment of a (possibly reduced) coordinate complex: one term per
/// incidence, coefficient mod 2, map induced by the stabilizer inclusion.
pub fn coordinate_assignment(x: &GroupedComplex, rings: &BTreeMap<u8, Arc<QuotientRing>>) -> RingAssignment {
    let mut r = RingAssignment::new();
    for c in x.cells() {
        r.assign_ring(&c.orbit, rings[&mask_of(&c.stabilizer)].clone());
    }
    for inc in x.incidences() {
        let (hi, lo) = (x.cell(&inc.from).unwrap(), x.cell(&inc.to).unwrap());
        let (big, small) = (mask_of(&lo.stabilizer), mask_of(&hi.stabilizer));
        assert_eq!(small & big, small, "stabilizers shrink towards higher cells");
        r.add_term(&lo.orbit, &hi.orbit, restriction(rings, big, small), inc.coeff.rem_euclid(2) as u8);
    }
    r
}

/// Dimension of `F2[gens]/(relations)` in degree `q`, by enumerating all
/// monomials and eliminating the spanning set `{m · r}` of the ideal.
pub fn hilbert_oracle(p: &AlgebraPresentation, relations: &[Polynomial], q: u16) -> usize {
    let all = all_monomials(&p.degrees, q);
    let index: BTreeMap<Monomial, usize> = all.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let words = all.len().div_ceil(64);
    let mut pivots: BTreeMap<usize, Vec<u64>> = BTreeMap::new();
    for r in relations {
        let Some(dr) = r.homogeneous_degree() else {
            continue;
        };
        if dr > q {
            continue;
        }
        for m in all_monomials(&p.degrees, q - dr) {
            let mut v = vec![0u64; words];
            for t in r.terms() {
                let prod = t.mul(&m).expect("in range");
                let j = index[&prod];
                v[j / 64] ^= 1 << (j % 64);
            }
            // reduce against pivots keyed by highest set bit
            while let Some(h) = highest_bit(&v) {
                match pivots.get(&h) {
                    Some(row) => v.iter_mut().zip(row).for_each(|(a, b)| *a ^= b),
                    None => {
                        pivots.insert(h, v);
                        break;
                    }
                }
            }
        }
    }
    all.len() - pivots.len()
}

fn highest_bit(v: &[u64]) -> Option<usize> {
    v.iter().enumerate().rev().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// All monomials of weighted degree `q`.
pub fn all_monomials(degrees: &[u16], q: u16) -> Vec<Monomial> {
    fn rec(degrees: &[u16], i: usize, rem: u16, exps: &mut Vec<u8>, out: &mut Vec<Monomial>, total: &[u16]) {
        if i == degrees.len() {
            if rem == 0 {
                out.push(Monomial::from_exponents(exps, total));
            }
            return;
        }
        let mut e = 0u16;
        while e * degrees[i] <= rem {
            exps.push(e as u8);
            rec(degrees, i + 1, rem - e * degrees[i], exps, out, total);
            exps.pop();
            e += 1;
        }
    }
    let mut out = Vec::new();
    rec(degrees, 0, q, &mut Vec::new(), &mut out, degrees);
    out
}

/// The setup with one generator image of one map replaced.
pub fn mutated(setup: &AlgebraSetup, lower: &str, upper: &str, generator: &str, text: &str) -> RingAssignment {
    let key = (lower.to_string(), upper.to_string());
    let m = &setup.maps.maps[&key];
    let mut images: BTreeMap<String, String> =
        m.source().names().iter().zip(m.images()).map(|(n, p)| (n.clone(), m.target().render(p))).collect();
    images.insert(generator.into(), text.into());
    let new = AlgebraMap::parse(m.id.clone(), m.source().clone(), m.target().clone(), &images).unwrap();
    let mut maps = setup.maps.maps.clone();
    maps.insert(key, Arc::new(new));
    RingAssignment::from_complex(&setup.complex, &setup.algebra.by_orbit(&setup.rings), &maps).unwrap()
}
