//! Exact chart-level algorithms for tame stacks with finite diagonalizable
//! stabilizers.
//!
//! A chart is a quotient `[A^n / D(M)]` of affine space by a diagonalizable
//! group, given by its character group `M`, one character per coordinate and
//! an ordered set of coordinate divisors. On top of this model the crate
//! provides
//!
//! - exact integer lattice algebra ([`zlinalg`]),
//! - the codimension of stackiness and the divisorial index ([`chart`]),
//! - blow-ups, root stacks and rigidification ([`transforms`]),
//! - the divisorialification loop, certificates and coarse-space checks
//!   ([`divisorialify`]),
//! - Tor computations for finite abelian groups with a cyclic action and the
//!   associated K-theory certificate ([`ktheory`]),
//! - the JSON interchange formats ([`io`]).
//!
//! Everything is exact; no floating point is used anywhere.

pub mod caps;
pub mod chart;
pub mod divisorialify;
pub mod error;
pub mod io;
pub mod ktheory;
#[cfg(feature = "testkit")]
pub mod testkit;
pub mod transforms;
pub mod zlinalg;

pub use caps::Caps;
pub use chart::{Chart, DivisorLabel, MatrixGroupAction, OrbitType};
pub use divisorialify::{Atlas, Certificate, CertificateKind};
pub use error::{Error, Result};
pub use transforms::{StackyBlowUpSequence, StackyBlowUpStep};
pub use zlinalg::{FinAbGroup, GroupElement, IntMatrix};
