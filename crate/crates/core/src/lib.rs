//! Torsion subcomplexes of rigid cell complexes of groups, their reduction by
//! fusion-controlled discrete Morse theory, and the mod-2 equivariant
//! spectral sequence computing Farrell–Tate cohomology dimensions.
//!
//! Module map:
//! - [`groups`]: permutation groups and verified homomorphisms;
//! - [`complex`]: cell complexes with stabilizers and structure maps;
//! - [`fusion`]: policies deciding which cancellations are cohomologically safe;
//! - [`morse`]: gradient vector fields, V-paths and Morse reduction;
//! - [`algebra`]: F2-algebra presentations, Gröbner bases, GF(2) matrices;
//! - [`specseq`]: E1/E2 pages, collapse detection and Steinberg bookkeeping;
//! - [`io`]: JSON fixture and artifact formats.

pub mod algebra;
pub mod complex;
pub mod fusion;
pub mod groups;
pub mod io;
pub mod morse;
pub mod specseq;

/// Schema tag carried by every JSON input and output.
pub const SCHEMA: &str = "tatecomplex/1";
