//! Regression tests on the shipped SL3(Z) and PSL4(Z) fixtures.

mod common;

use tatecomplex::fusion::{FusionMode, FusionPolicy};
use tatecomplex::groups::structure_name;
use tatecomplex::io::{load_algebra, load_diagrams, load_field, AlgebraSetup, ErrataMode, RunConfig};
use tatecomplex::morse::{build_vector_field, is_admissible, morse_paths, morse_reduce, VectorField};
use tatecomplex::specseq::{
    assemble_d1, check_d1_squared, detect_collapse, e2_page, total_dimensions, verify_restriction_diagrams,
};

use common::{fixtures, hilbert_oracle, mutated};

fn sl3() -> RunConfig {
    RunConfig::load(&fixtures().join("sl3z.config.json")).unwrap()
}

fn psl4() -> RunConfig {
    RunConfig::load(&fixtures().join("psl4z.config.json")).unwrap()
}

fn psl4_setup(qmax: u16) -> AlgebraSetup {
    AlgebraSetup::load(&psl4(), qmax, ErrataMode::Flagged).unwrap()
}

#[test]
fn fixtures_validate() {
    for cfg in [sl3(), psl4()] {
        let lc = cfg.load_complex().unwrap();
        assert!(lc.complex.validate(2).is_empty(), "{:?}", lc.complex.validate(2));
        let t = lc.complex.torsion_subcomplex(2).unwrap();
        assert_eq!(t.cells().len(), lc.complex.cells().len());
    }
    let merged = psl4().prepared_complex().unwrap();
    assert!(merged.validate(2).is_empty());
    assert!(merged.cell("t1").is_none() && merged.cell("e8").is_none());
}

#[test]
fn sl3_reduces_to_the_segment_diagram() {
    let cfg = sl3();
    let x = cfg.load_complex().unwrap().complex;
    let v = build_vector_field(&x, 2, &cfg.policy(), cfg.ordering().unwrap().as_deref());
    assert!(is_admissible(&v, &x));
    let r = morse_reduce(&x, &v).unwrap();
    let types = |d: usize| {
        let mut t: Vec<String> =
            r.cells().iter().filter(|c| c.dim == d).map(|c| structure_name(r.stabilizer(&c.id).unwrap())).collect();
        t.sort();
        t
    };
    assert_eq!(types(0), vec!["S4", "S4", "S4"]);
    assert_eq!(types(1), vec!["D4", "Z/2"]);
    assert!(types(2).is_empty());
    assert!(r.validate(2).is_empty());
}

#[test]
fn sl3_strict_policy_keeps_more_cells() {
    let cfg = sl3();
    let x = cfg.load_complex().unwrap().complex;
    let v = build_vector_field(&x, 2, &FusionPolicy::new(FusionMode::Strict, 2), cfg.ordering().unwrap().as_deref());
    assert!(is_admissible(&v, &x));
    assert!(v.critical().len() > 5);
}

#[test]
fn sl3_alternative_field_paths() {
    let cfg = sl3();
    let x = cfg.load_complex().unwrap().complex;
    let arrows = load_field(&fixtures().join("sl3z_field2.json")).unwrap();
    let v = VectorField::from_arrows(&x, &arrows, &cfg.policy()).unwrap();
    assert!(is_admissible(&v, &x));
    assert!(v.critical().contains(&"QONp") && v.critical().contains(&"NpPMp"));
    let mut ends: Vec<String> = morse_paths(&v, &x, "QONp", "ONp").iter().map(|p| p.end().to_string()).collect();
    ends.sort();
    // Np'P, PM', M'N and NM (both in the orbit MN), MQ, QO
    assert_eq!(ends, vec!["MN", "MN", "MQ", "NpP", "PMp", "QO"]);
}

#[test]
fn psl4_degree_one_and_two_blocks() {
    let s = psl4_setup(4);
    let r = s.assignment().unwrap();
    let d = assemble_d1(&s.complex, &r, 0, 1).unwrap();
    assert_eq!(d.cols(), 1 + 1 + 3 + 1 + 1);
    let d2 = assemble_d1(&s.complex, &r, 0, 2).unwrap();
    assert_eq!(d2.kernel_dim(), 3);
}

#[test]
fn psl4_low_degree_page() {
    let s = psl4_setup(8);
    let t = e2_page(&s.complex, &s.assignment().unwrap(), 8).unwrap();
    assert_eq!((t.e2(0, 2), t.e2(1, 1), t.e2(2, 0)), (3, 1, 1));
    assert_eq!((t.e2(0, 6), t.e2(1, 6), t.e2(2, 6)), (27, 0, 0));
    assert_eq!(t.e2(0, 7), 31);
    assert!(detect_collapse(&t).collapses);
    assert_eq!(total_dimensions(&t).unwrap()[..7], [1, 0, 5, 7, 7, 17, 27]);
}

#[test]
fn psl4_d1_squared_and_mutation() {
    let s = psl4_setup(10);
    assert!(check_d1_squared(&s.complex, &s.assignment().unwrap(), 10).unwrap().passed);
    let bad = mutated(&s, "e9", "t5", "x1p", "ut1");
    let rep = check_d1_squared(&s.complex, &bad, 10).unwrap();
    assert!(!rep.passed);
    assert!(rep.witnesses.iter().any(|w| w.upper == "t5" && w.through.iter().any(|t| t.contains("e9>t5"))));
}

#[test]
fn psl4_diagrams_and_mutation() {
    let s = psl4_setup(8);
    let diagrams = load_diagrams(psl4().diagrams.as_ref().unwrap()).unwrap();
    assert_eq!(diagrams.len(), 3);
    let reports = verify_restriction_diagrams(&s.assignment().unwrap(), &diagrams);
    assert!(reports.iter().all(|r| r.passed()), "{reports:?}");
    let bad = mutated(&s, "v3", "e3", "lambda1", "v1");
    let reports = verify_restriction_diagrams(&bad, &diagrams);
    let v3 = reports.iter().find(|r| r.name == "v3").unwrap();
    assert!(v3.failures.iter().any(|f| f.contains("lambda1")), "{:?}", v3.failures);
}

#[test]
fn verbatim_beta1_image_breaks_the_page() {
    let s = AlgebraSetup::load(&psl4(), 4, ErrataMode::Verbatim).unwrap();
    assert!(s.maps.applied.is_empty());
    let t = e2_page(&s.complex, &s.assignment().unwrap(), 4).unwrap();
    assert_ne!(t.e2(0, 2), 3);
    assert!(t.e2(1, 2) > 0);
}

#[test]
fn fixture_rings_match_the_hilbert_oracle() {
    let alg = load_algebra(&fixtures().join("psl4z_algebra.json")).unwrap();
    let rings = alg.rings(12).unwrap();
    for (label, ring) in &rings {
        let p = ring.presentation();
        for q in 0..=12 {
            assert_eq!(ring.dim(q).unwrap(), hilbert_oracle(p, &p.relations, q), "{label} in degree {q}");
        }
    }
}
