//! Orbifold charts `[A^n / D(M)]` with coordinate divisors, and the two
//! numerical invariants computed on them: the codimension of stackiness and
//! the divisorial index.
//!
//! Points are abstracted to orbit types: a point with `x_j != 0` exactly for
//! `j in S` has stabilizer dual to `M / <chi_j : j in S>`. For diagonal
//! actions every invariant here depends only on that vanishing pattern.

mod matrix_group;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::zlinalg::{FinAbGroup, GroupElement};

pub use matrix_group::{MatrixGroupAction, RationalMatrix, StackinessReport};

/// Name of a divisor together with its position in the divisor well-ordering.
///
/// Labels compare by `order_key` first (lexicographically), so a label whose
/// key starts with a value larger than every existing first component sorts
/// after all of them.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DivisorLabel {
    pub order_key: Vec<i64>,
    pub name: String,
}

impl DivisorLabel {
    pub fn new(name: impl Into<String>, order_key: Vec<i64>) -> Self {
        DivisorLabel {
            order_key,
            name: name.into(),
        }
    }
}

impl fmt::Debug for DivisorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:?}", self.name, self.order_key)
    }
}

/// Set of coordinates declared nonzero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitType {
    pub nonzero: BTreeSet<usize>,
}

impl OrbitType {
    /// The origin: every coordinate vanishes.
    pub fn origin() -> Self {
        OrbitType::default()
    }

    pub fn new(nonzero: impl IntoIterator<Item = usize>) -> Self {
        OrbitType {
            nonzero: nonzero.into_iter().collect(),
        }
    }

    /// All `2^n` orbit types, ordered by bitmask.
    pub fn all(n: usize) -> impl Iterator<Item = OrbitType> {
        (0u64..1 << n).map(move |mask| OrbitType::new((0..n).filter(|i| mask >> i & 1 == 1)))
    }
}

/// A chart `[A^n / D(M)]`: character group `M`, one character per coordinate
/// and an ordered family of coordinate divisors `{x_i = 0}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Chart {
    group: FinAbGroup,
    characters: Vec<GroupElement>,
    divisors: BTreeMap<DivisorLabel, usize>,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart")
            .field("group", &self.group)
            .field("characters", &self.characters)
            .field("divisors", &self.divisors)
            .finish()
    }
}

impl Chart {
    /// Validates and builds a chart. Characters are reduced into `group`.
    pub fn new(
        group: FinAbGroup,
        characters: Vec<GroupElement>,
        divisors: BTreeMap<DivisorLabel, usize>,
    ) -> Result<Self> {
        let n = characters.len();
        let characters = characters
            .iter()
            .map(|c| group.element(c.coeffs()))
            .collect::<Result<Vec<_>>>()?;
        let mut used = BTreeSet::new();
        let mut keys = BTreeSet::new();
        let mut names = BTreeSet::new();
        for (label, &coord) in &divisors {
            if coord >= n {
                return Err(Error::input(format!(
                    "divisor {} sits on coordinate {coord}, but the chart has dimension {n}",
                    label.name
                )));
            }
            if !used.insert(coord) {
                return Err(Error::input(format!("two divisors on coordinate {coord}")));
            }
            if !keys.insert(label.order_key.clone()) {
                return Err(Error::input(format!("duplicate divisor order key {:?}", label.order_key)));
            }
            if !names.insert(label.name.clone()) {
                return Err(Error::input(format!("duplicate divisor name {}", label.name)));
            }
        }
        Ok(Chart {
            group,
            characters,
            divisors,
        })
    }

    /// Convenience constructor from small integers; divisors are `(name, coordinate)`
    /// pairs in increasing order.
    pub fn from_small(factors: &[u64], characters: &[&[i64]], divisors: &[(&str, usize)]) -> Result<Self> {
        let group = FinAbGroup::from_u64s(factors)?;
        let chars = characters
            .iter()
            .map(|c| group.element_i64(c))
            .collect::<Result<Vec<_>>>()?;
        let divs = divisors
            .iter()
            .enumerate()
            .map(|(i, &(name, coord))| (DivisorLabel::new(name, vec![i as i64]), coord))
            .collect();
        Chart::new(group, chars, divs)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn characters(&self) -> &[GroupElement] {
        &self.characters
    }

    pub fn character(&self, i: usize) -> &GroupElement {
        &self.characters[i]
    }

    pub fn divisors(&self) -> &BTreeMap<DivisorLabel, usize> {
        &self.divisors
    }

    pub fn dim(&self) -> usize {
        self.characters.len()
    }

    pub fn divisor_coords(&self) -> BTreeSet<usize> {
        self.divisors.values().copied().collect()
    }

    pub fn divisor_at(&self, coord: usize) -> Option<&DivisorLabel> {
        self.divisors.iter().find(|(_, &c)| c == coord).map(|(l, _)| l)
    }

    pub fn divisor_by_name(&self, name: &str) -> Option<(&DivisorLabel, usize)> {
        self.divisors.iter().find(|(l, _)| l.name == name).map(|(l, &c)| (l, c))
    }

    /// Largest order key first component over the divisors, if any.
    pub fn max_order_key(&self) -> Option<i64> {
        self.divisors.keys().filter_map(|l| l.order_key.first().copied()).max()
    }

    fn check_orbit(&self, t: &OrbitType) -> Result<()> {
        match t.nonzero.iter().find(|&&i| i >= self.dim()) {
            Some(i) => Err(Error::input(format!(
                "orbit type mentions coordinate {i} but the chart has dimension {}",
                self.dim()
            ))),
            None => Ok(()),
        }
    }

    /// Number of coordinates whose character survives in `M / <chi_j : j in kill>`,
    /// and the set of them.
    fn surviving(&self, kill: &BTreeSet<usize>) -> Result<BTreeSet<usize>> {
        let gens: Vec<GroupElement> = kill.iter().map(|&j| self.characters[j].clone()).collect();
        let q = self.group.quotient_presentation(&gens)?;
        Ok((0..self.dim())
            .filter(|&i| !q.project(self.characters[i].coeffs()).is_zero())
            .collect())
    }

    /// Coordinates with trivial and with non-trivial character.
    pub fn split_representation(&self) -> (BTreeSet<usize>, BTreeSet<usize>) {
        (0..self.dim()).partition(|&i| self.characters[i].is_zero())
    }

    /// `M / <chi_j : j in S>`, the dual of the stabilizer at a point of orbit type `S`.
    pub fn stabilizer_dual(&self, t: &OrbitType) -> Result<FinAbGroup> {
        self.check_orbit(t)?;
        let gens: Vec<GroupElement> = t.nonzero.iter().map(|&j| self.characters[j].clone()).collect();
        Ok(self.group.quotient_presentation(&gens)?.group)
    }

    /// Number of coordinates on which the stabilizer at orbit type `t` acts nontrivially.
    pub fn codim_of_stackiness(&self, t: &OrbitType) -> Result<usize> {
        self.check_orbit(t)?;
        Ok(self.surviving(&t.nonzero)?.len())
    }

    /// Codimension of stackiness relative to the divisors: the count of
    /// characters nontrivial on the part of the stabilizer that acts trivially
    /// on every divisor line.
    pub fn divisorial_index(&self, t: &OrbitType) -> Result<usize> {
        self.check_orbit(t)?;
        let mut kill = t.nonzero.clone();
        kill.extend(self.divisor_coords());
        Ok(self.surviving(&kill)?.len())
    }

    /// The maximal divisorial index (attained at the origin) and the
    /// coordinates cutting out its locus `V(x_i : i in J)`.
    pub fn max_divisorial_locus(&self) -> Result<(usize, BTreeSet<usize>)> {
        let locus = self.surviving(&self.divisor_coords())?;
        Ok((locus.len(), locus))
    }

    /// True if every character lies in the span of the divisor characters.
    pub fn is_divisorial(&self) -> Result<bool> {
        let gens: Vec<GroupElement> = self
            .divisor_coords()
            .into_iter()
            .map(|j| self.characters[j].clone())
            .collect();
        for chi in &self.characters {
            if !self.group.in_subgroup(chi, &gens)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Adds `count` coordinates with trivial character at the end.
    pub fn with_trivial_coordinates(&self, count: usize) -> Chart {
        let mut c = self.clone();
        c.characters.extend(std::iter::repeat(self.group.zero()).take(count));
        c
    }

    /// Replaces `M` by `M + extra` with every character extended by zero.
    pub fn with_gerbe_factor(&self, extra: &FinAbGroup) -> Result<Chart> {
        let (sum, _) = self.group.direct_sum(extra)?;
        let pad = extra.rank();
        let characters = self
            .characters
            .iter()
            .map(|chi| {
                let mut v = chi.coeffs().to_vec();
                v.extend(std::iter::repeat(BigInt::from(0)).take(pad));
                sum.project(&v)
            })
            .collect();
        Chart::new(sum.group, characters, self.divisors.clone())
    }

    /// Internal constructor for transforms that already maintain the invariants.
    pub(crate) fn from_parts(
        group: FinAbGroup,
        characters: Vec<GroupElement>,
        divisors: BTreeMap<DivisorLabel, usize>,
    ) -> Chart {
        debug_assert!(characters.iter().all(|c| group.contains(c)));
        Chart {
            group,
            characters,
            divisors,
        }
    }
}
