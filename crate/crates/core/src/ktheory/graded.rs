use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::zlinalg::{FinAbGroup, GroupElement};

/// A finite-dimensional `M`-graded vector space: a representation of the
/// diagonalizable group with character group `M`, recorded by the dimension
/// of each isotypic piece.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVectorSpace {
    group: FinAbGroup,
    dims: BTreeMap<GroupElement, u64>,
}

impl GradedVectorSpace {
    /// Reduces the degrees into `group`, merging repeated ones; zero pieces are dropped.
    pub fn new(group: FinAbGroup, pieces: impl IntoIterator<Item = (GroupElement, u64)>) -> Result<Self> {
        let mut dims = BTreeMap::new();
        for (degree, dim) in pieces {
            if degree.coeffs().len() != group.rank() {
                return Err(Error::input(format!("degree {degree:?} is not an element of {group}")));
            }
            *dims.entry(group.reduce(degree.coeffs())).or_insert(0) += dim;
        }
        dims.retain(|_, d| *d > 0);
        Ok(GradedVectorSpace { group, dims })
    }

    pub fn zero(group: FinAbGroup) -> Self {
        GradedVectorSpace { group, dims: BTreeMap::new() }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn dims(&self) -> &BTreeMap<GroupElement, u64> {
        &self.dims
    }

    pub fn total_dim(&self) -> u64 {
        self.dims.values().sum()
    }

    pub fn direct_sum(&self, other: &GradedVectorSpace) -> Result<GradedVectorSpace> {
        if self.group != other.group {
            return Err(Error::input("graded spaces over different groups"));
        }
        GradedVectorSpace::new(
            self.group.clone(),
            self.dims.iter().chain(&other.dims).map(|(g, &d)| (g.clone(), d)),
        )
    }

    /// Splits into the degree-zero (invariant) part and the rest.
    pub fn split(&self) -> (GradedVectorSpace, GradedVectorSpace) {
        let (triv, nt): (BTreeMap<_, _>, BTreeMap<_, _>) =
            self.dims.iter().map(|(g, &d)| (g.clone(), d)).partition(|(g, _)| g.is_zero());
        (
            GradedVectorSpace { group: self.group.clone(), dims: triv },
            GradedVectorSpace { group: self.group.clone(), dims: nt },
        )
    }
}
