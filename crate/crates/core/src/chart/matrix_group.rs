use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Square matrix over the rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    n: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn identity(n: usize) -> Self {
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = BigRational::one();
        }
        RationalMatrix { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix must be square"));
        }
        Ok(RationalMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_int_rows(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.n + j]
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        let n = self.n;
        let mut data = vec![BigRational::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        RationalMatrix { n, data }
    }

    fn minus_identity(&self) -> Vec<Vec<BigRational>> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| {
                        let x = self.get(i, j).clone();
                        if i == j {
                            x - BigRational::one()
                        } else {
                            x
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn is_invertible(&self) -> bool {
        let rows: Vec<Vec<BigRational>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        rank(rows) == self.n
    }
}

/// Row-reduces in place and returns pivot columns.
fn row_reduce(rows: &mut [Vec<BigRational>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let delta = &f * &rows[r][j];
                    rows[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

fn rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    row_reduce(&mut rows).len()
}

/// Basis of `{x : A x = 0}` for the stacked rows `A` on `n` columns.
fn kernel_basis(mut rows: Vec<Vec<BigRational>>, n: usize) -> Vec<Vec<BigRational>> {
    let pivots = row_reduce(&mut rows);
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![BigRational::zero(); n];
            v[f] = BigRational::one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = -rows[r][f].clone();
            }
            v
        })
        .collect()
}

/// A finite group of invertible rational matrices acting linearly on `Q^n`,
/// analyzed at the origin only.
#[derive(Debug, Clone)]
pub struct MatrixGroupAction {
    pub dim: usize,
    pub generators: Vec<RationalMatrix>,
    /// Coordinates carrying divisors; their lines must be common eigenvectors.
    pub divisor_indices: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StackinessReport {
    pub codim: usize,
    /// Basis of the fixed subspace.
    pub center: Vec<Vec<BigRational>>,
}

impl MatrixGroupAction {
    pub fn new(dim: usize, generators: Vec<RationalMatrix>, divisor_indices: BTreeSet<usize>) -> Result<Self> {
        for g in &generators {
            if g.dim() != dim {
                return Err(Error::input(format!("generator has size {} but the dimension is {dim}", g.dim())));
            }
            if !g.is_invertible() {
                return Err(Error::input("generators must be invertible"));
            }
        }
        if let Some(i) = divisor_indices.iter().find(|&&i| i >= dim) {
            return Err(Error::input(format!("divisor index {i} out of range")));
        }
        Ok(MatrixGroupAction {
            dim,
            generators,
            divisor_indices,
        })
    }

    /// Codimension of the fixed subspace of the (relative) stabilizer at the
    /// origin, with a basis of that subspace. With divisors present the group
    /// is first cut down to the elements acting trivially on every divisor
    /// line; this needs the full group, enumerated up to `max_elements`.
    pub fn stackiness(&self, max_elements: u64) -> Result<StackinessReport> {
        let acting: Vec<RationalMatrix> = if self.divisor_indices.is_empty() {
            self.generators.clone()
        } else {
            for g in &self.generators {
                for &i in &self.divisor_indices {
                    let off_diagonal = (0..self.dim).any(|r| r != i && !g.get(r, i).is_zero());
                    if off_diagonal {
                        return Err(Error::Unsupported(format!(
                            "coordinate line {i} is not invariant under every generator"
                        )));
                    }
                }
            }
            self.closure(max_elements)?
                .into_iter()
                .filter(|g| self.divisor_indices.iter().all(|&i| g.get(i, i).is_one()))
                .collect()
        };
        let stacked: Vec<Vec<BigRational>> = acting.iter().flat_map(RationalMatrix::minus_identity).collect();
        let center = if stacked.is_empty() {
            kernel_basis(vec![vec![BigRational::zero(); self.dim]], self.dim)
        } else {
            kernel_basis(stacked, self.dim)
        };
        Ok(StackinessReport {
            codim: self.dim - center.len(),
            center,
        })
    }

    fn closure(&self, max_elements: u64) -> Result<Vec<RationalMatrix>> {
        let id = RationalMatrix::identity(self.dim);
        let mut seen: HashSet<RationalMatrix> = HashSet::from([id.clone()]);
        let mut order = vec![id.clone()];
        let mut queue = VecDeque::from([id]);
        while let Some(x) = queue.pop_front() {
            for g in &self.generators {
                let y = x.mul(g);
                if seen.insert(y.clone()) {
                    if seen.len() as u64 > max_elements {
                        return Err(Error::Resource(format!(
                            "matrix group has more than {max_elements} elements"
                        )));
                    }
                    order.push(y.clone());
                    queue.push_back(y);
                }
            }
        }
        Ok(order)
    }
}
