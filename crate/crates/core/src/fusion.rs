//! Policies deciding whether a stabilizer inclusion may be cancelled, i.e.
//! whether it is certified to induce an isomorphism on mod-ℓ cohomology.
//!
//! Every built-in policy is a sufficient condition: `Deny` means "not
//! certified", never "provably not an isomorphism".

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::groups::GroupHom;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FusionMode {
    /// Allow only isomorphisms.
    Strict,
    /// Same test as `Strict`, for reductions that must also preserve Bredon homology.
    Bredon,
    /// Index coprime to ℓ, abelian Sylow subgroup, normalizer inside the image.
    #[serde(rename = "sylow", alias = "sylowburnside", alias = "SylowBurnside")]
    SylowBurnside,
    /// Allow exactly the listed triples.
    Oracle,
}

impl fmt::Display for FusionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FusionMode::Strict => "strict",
            FusionMode::Bredon => "bredon",
            FusionMode::SylowBurnside => "sylow",
            FusionMode::Oracle => "oracle",
        })
    }
}

impl FromStr for FusionMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "strict" => Ok(FusionMode::Strict),
            "bredon" => Ok(FusionMode::Bredon),
            "sylow" | "sylowburnside" => Ok(FusionMode::SylowBurnside),
            "oracle" => Ok(FusionMode::Oracle),
            other => Err(format!("unknown fusion policy {other:?} (strict, bredon, sylow, oracle)")),
        }
    }
}

/// An admissible `(source label, target label, map id)` triple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OracleEntry {
    pub source: String,
    pub target: String,
    pub map: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionPolicy {
    pub mode: FusionMode,
    pub l: u64,
    pub oracle: BTreeSet<OracleEntry>,
}

impl FusionPolicy {
    pub fn new(mode: FusionMode, l: u64) -> Self {
        FusionPolicy { mode, l, oracle: BTreeSet::new() }
    }

    pub fn oracle(l: u64, entries: impl IntoIterator<Item = OracleEntry>) -> Self {
        FusionPolicy { mode: FusionMode::Oracle, l, oracle: entries.into_iter().collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DenyReason {
    NotSurjective,
    IndexDivisible,
    SylowNotAbelian,
    NormalizerEscapes,
    NotListed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllowReason {
    Isomorphism,
    BurnsideControl,
    Listed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Allow(AllowReason),
    Deny(DenyReason),
}

impl Verdict {
    pub fn is_allow(&self) -> bool {
        matches!(self, Verdict::Allow(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Allow(r) => write!(f, "Allow({r:?})"),
            Verdict::Deny(r) => write!(f, "Deny({r:?})"),
        }
    }
}

/// Decides whether the injective map `h: Γ_t → Γ_s` may be cancelled.
///
/// `SylowBurnside` first accepts isomorphisms outright (they induce
/// isomorphisms in every cohomology), then applies Burnside's fusion
/// criterion: with index prime to ℓ the image contains a Sylow ℓ-subgroup
/// `P` of the target; if `P` is abelian and `N(P)` lies in the image, the
/// image controls ℓ-fusion and restriction is an isomorphism mod ℓ.
pub fn admits_cancellation(h: &GroupHom, policy: &FusionPolicy) -> Verdict {
    match policy.mode {
        FusionMode::Strict | FusionMode::Bredon => {
            if h.is_surjective() {
                Verdict::Allow(AllowReason::Isomorphism)
            } else {
                Verdict::Deny(DenyReason::NotSurjective)
            }
        }
        FusionMode::SylowBurnside => sylow_burnside(h, policy.l as usize),
        FusionMode::Oracle => {
            let key = OracleEntry {
                source: h.source().label().into(),
                target: h.target().label().into(),
                map: h.id().into(),
            };
            if policy.oracle.contains(&key) {
                Verdict::Allow(AllowReason::Listed)
            } else {
                Verdict::Deny(DenyReason::NotListed)
            }
        }
    }
}

fn sylow_burnside(h: &GroupHom, l: usize) -> Verdict {
    if h.is_surjective() {
        return Verdict::Allow(AllowReason::Isomorphism);
    }
    let Some(image) = h.image_group() else {
        return Verdict::Deny(DenyReason::NotSurjective);
    };
    let target = h.target();
    let index = target.order() / image.order();
    if index.is_multiple_of(l) {
        return Verdict::Deny(DenyReason::IndexDivisible);
    }
    // a Sylow subgroup of the image is one of the target
    let p = image.sylow_subgroup(l);
    if !p.is_abelian() {
        return Verdict::Deny(DenyReason::SylowNotAbelian);
    }
    let n = target.normalizer(&p);
    if n.generators().iter().all(|g| image.contains(g)) {
        Verdict::Allow(AllowReason::BurnsideControl)
    } else {
        Verdict::Deny(DenyReason::NormalizerEscapes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{Perm, PermGroup};
    use std::sync::Arc;

    fn c(n: usize, cycles: &[&[usize]]) -> Perm {
        Perm::from_cycles(n, cycles).unwrap()
    }

    fn group(label: &str, n: usize, gens: Vec<Perm>) -> Arc<PermGroup> {
        Arc::new(PermGroup::new(label, n, gens).unwrap())
    }

    #[test]
    fn identity_is_allowed_by_strict() {
        let z2 = group("Z2", 2, vec![c(2, &[&[1, 2]])]);
        let h = GroupHom::inclusion(z2.clone(), z2);
        assert!(admits_cancellation(&h, &FusionPolicy::new(FusionMode::Strict, 2)).is_allow());
    }

    #[test]
    fn z2_in_s4_is_denied_everywhere() {
        let s4 = group("S4", 4, vec![c(4, &[&[1, 2]]), c(4, &[&[1, 2, 3, 4]])]);
        let z2 = group("Z2", 4, vec![c(4, &[&[1, 2]])]);
        let h = GroupHom::inclusion(z2, s4);
        for mode in [FusionMode::Strict, FusionMode::Bredon, FusionMode::SylowBurnside] {
            assert!(!admits_cancellation(&h, &FusionPolicy::new(mode, 2)).is_allow());
        }
        assert_eq!(
            admits_cancellation(&h, &FusionPolicy::new(FusionMode::SylowBurnside, 2)),
            Verdict::Deny(DenyReason::IndexDivisible)
        );
    }

    #[test]
    fn z2_in_s3_is_controlled() {
        let s3 = group("S3", 3, vec![c(3, &[&[1, 2]]), c(3, &[&[1, 2, 3]])]);
        let z2 = group("Z2", 3, vec![c(3, &[&[1, 2]])]);
        let h = GroupHom::inclusion(z2, s3);
        assert_eq!(
            admits_cancellation(&h, &FusionPolicy::new(FusionMode::SylowBurnside, 2)),
            Verdict::Allow(AllowReason::BurnsideControl)
        );
        assert_eq!(
            admits_cancellation(&h, &FusionPolicy::new(FusionMode::Strict, 2)),
            Verdict::Deny(DenyReason::NotSurjective)
        );
    }

    #[test]
    fn nonabelian_sylow_is_denied() {
        let s4 = group("S4", 4, vec![c(4, &[&[1, 2]]), c(4, &[&[1, 2, 3, 4]])]);
        let d8 = Arc::new(s4.sylow_subgroup(2));
        let h = GroupHom::inclusion(d8, s4);
        assert_eq!(
            admits_cancellation(&h, &FusionPolicy::new(FusionMode::SylowBurnside, 2)),
            Verdict::Deny(DenyReason::SylowNotAbelian)
        );
    }

    #[test]
    fn normalizer_escaping_is_denied() {
        // V4 = <(12)(34), (13)(24)> inside A4: index 3, abelian, but normal in A4
        let a4 = group("A4", 4, vec![c(4, &[&[1, 2, 3]]), c(4, &[&[1, 2], &[3, 4]])]);
        let v4 = group("V4", 4, vec![c(4, &[&[1, 2], &[3, 4]]), c(4, &[&[1, 3], &[2, 4]])]);
        let h = GroupHom::inclusion(v4, a4);
        assert_eq!(
            admits_cancellation(&h, &FusionPolicy::new(FusionMode::SylowBurnside, 2)),
            Verdict::Deny(DenyReason::NormalizerEscapes)
        );
    }

    #[test]
    fn oracle_lists_triples() {
        let s3 = group("S3", 3, vec![c(3, &[&[1, 2]]), c(3, &[&[1, 2, 3]])]);
        let z2 = group("Z2", 3, vec![c(3, &[&[1, 2]])]);
        let h = GroupHom::inclusion(z2, s3);
        let entry = OracleEntry { source: "Z2".into(), target: "S3".into(), map: "inclusion".into() };
        assert!(admits_cancellation(&h, &FusionPolicy::oracle(2, [entry])).is_allow());
        assert_eq!(admits_cancellation(&h, &FusionPolicy::oracle(2, [])), Verdict::Deny(DenyReason::NotListed));
    }

    #[test]
    fn mode_parsing() {
        assert_eq!("sylow".parse::<FusionMode>().unwrap(), FusionMode::SylowBurnside);
        assert_eq!("Strict".parse::<FusionMode>().unwrap(), FusionMode::Strict);
        assert!("fuzzy".parse::<FusionMode>().is_err());
    }
}
