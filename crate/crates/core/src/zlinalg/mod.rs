//! Exact integer lattice algebra: Smith normal form, finite abelian groups in
//! invariant-factor form, quotients, subgroups and membership.

mod group;
mod matrix;
mod snf;

pub use group::{cokernel, prime_of_prime_power, Cokernel, FinAbGroup, GroupElement, Subgroup};
pub use matrix::IntMatrix;
pub use snf::{integer_kernel, smith_normal_form, solve_integer, SmithForm};
