//! Commutative graded F2-algebras: presentations, truncated Gröbner bases,
//! monomial bases, algebra maps and packed GF(2) linear algebra.
//!
//! Over F2 graded-commutative and commutative coincide, so the engine is a
//! plain commutative one; odd primes are rejected at the boundary.

pub mod gf2;
pub mod groebner;
pub mod map;
pub mod poly;

use thiserror::Error;

pub use gf2::BitMatrix;
pub use groebner::{groebner_truncated, AlgebraPresentation, DegreeBasis, QuotientRing, TruncatedGb};
pub use map::{map_matrix, AlgebraMap, MapEvaluator};
pub use poly::{parse_polynomial, Monomial, Polynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("cannot parse {text:?}: {detail}")]
    Parse { text: String, detail: String },
    #[error("unknown generator {name} in {text:?}")]
    UnknownGenerator { name: String, text: String },
    #[error("ring {label}: duplicate generator {name}")]
    DuplicateGenerator { label: String, name: String },
    #[error("ring {label}: generator {name} has degree 0")]
    ZeroDegree { label: String, name: String },
    #[error("ring {label}: {count} generators exceed the supported maximum")]
    TooManyGenerators { label: String, count: usize },
    #[error("ring {label}: relation {text:?} is not homogeneous")]
    NotHomogeneous { label: String, text: String },
    #[error("degree overflow: {detail}")]
    DegreeOverflow { detail: String },
    #[error("degree {degree} beyond the working bound {dmax}")]
    BeyondBound { degree: u16, dmax: u16 },
    #[error("map {map}: no image for generator {generator}")]
    MissingImage { map: String, generator: String },
    #[error("map {map}: image of {generator} is not homogeneous of degree {expected}")]
    DegreeMismatch { map: String, generator: String, expected: u16 },
    #[error("maps {first} and {second} cannot be composed")]
    Incomposable { first: String, second: String },
    #[error("the algebra engine works mod 2 only, got l = {l}")]
    OddPrime { l: u64 },
}

/// Rejects primes other than 2 at the algebra boundary.
pub fn require_mod2(l: u64) -> Result<(), AlgebraError> {
    if l == 2 {
        Ok(())
    } else {
        Err(AlgebraError::OddPrime { l })
    }
}
