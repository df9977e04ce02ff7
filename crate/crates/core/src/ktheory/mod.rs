//! The trivial/non-trivial splitting of graded representations, and Tor of
//! finite abelian groups with a cyclic group action.
//!
//! For an `H`-module `A`, `Tor_0(F_p, A) = A/pA` and `Tor_1(F_p, A) = A[p]`
//! carry induced `H`-actions. They agree when all `p`-divisible elementary
//! divisors of `A` are equal, and can differ otherwise; their difference
//! still vanishes in the Grothendieck group, which [`cotangent_class_trivial`]
//! certifies along the filtration by element orders.

pub mod fp;
mod graded;
mod tor;

pub use fp::{same_cyclic_modular_rep, FpMatrix, Poly};
pub use graded::GradedVectorSpace;
pub use tor::{
    constant_divisor_pieces, cotangent_class_trivial, tor_pair, FiltrationPiece, HModule, K0Certificate, K0Reason,
    TorPair,
};
