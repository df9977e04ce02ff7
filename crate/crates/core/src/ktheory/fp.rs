//! Matrices and polynomials over a prime field `F_p`, and the Frobenius
//! (rational canonical) normal form used to decide similarity.

use std::fmt;

use crate::error::{Error, Result};

fn inv_mod(a: u64, p: u64) -> u64 {
    // p is prime and a != 0 mod p.
    pow_mod(a, p - 2, p)
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Square matrix over `F_p`, entries in `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    p: u64,
    n: usize,
    data: Vec<u64>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} mod {}", self.to_rows(), self.p)
    }
}

impl FpMatrix {
    pub fn identity(n: usize, p: u64) -> Self {
        let mut m = FpMatrix { p, n, data: vec![0; n * n] };
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    /// Reduces integer rows mod `p`. Errors on a non-square or ragged input.
    pub fn from_rows(rows: &[Vec<i64>], p: u64) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::input("matrix over F_p must be square"));
        }
        let data = rows
            .iter()
            .flatten()
            .map(|&x| x.rem_euclid(p as i64) as u64)
            .collect();
        Ok(FpMatrix { p, n, data })
    }

    pub fn from_fn(n: usize, p: u64, f: impl Fn(usize, usize) -> u64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j) % p);
            }
        }
        FpMatrix { p, n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.n + j]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        let n = self.n;
        FpMatrix::from_fn(n, self.p, |i, j| {
            (0..n).fold(0u64, |acc, k| (acc + mul_mod(self.get(i, k), other.get(k, j), self.p)) % self.p)
        })
    }

    pub fn pow(&self, mut exp: u64) -> FpMatrix {
        let mut acc = FpMatrix::identity(self.n, self.p);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            exp >>= 1;
        }
        acc
    }

    pub fn rank(&self) -> usize {
        let p = self.p;
        let n = self.n;
        let mut a = self.data.clone();
        let mut rank = 0;
        for c in 0..n {
            let Some(r) = (rank..n).find(|&r| a[r * n + c] != 0) else {
                continue;
            };
            for j in 0..n {
                a.swap(rank * n + j, r * n + j);
            }
            let inv = inv_mod(a[rank * n + c], p);
            for i in 0..n {
                if i != rank && a[i * n + c] != 0 {
                    let f = mul_mod(a[i * n + c], inv, p);
                    for j in 0..n {
                        let sub = mul_mod(f, a[rank * n + j], p);
                        a[i * n + j] = (a[i * n + j] + p - sub) % p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Monic invariant factors `f_1 | f_2 | ... | f_r` of `xI - A`
    /// (constant factors dropped). Two matrices are similar iff these agree.
    pub fn invariant_factors(&self) -> Vec<Poly> {
        let p = self.p;
        let n = self.n;
        let mut m: Vec<Vec<Poly>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let a = Poly::constant((p - self.get(i, j)) % p, p);
                        if i == j {
                            a.add(&Poly::x(p))
                        } else {
                            a
                        }
                    })
                    .collect()
            })
            .collect();
        poly_smith_diagonal(&mut m)
            .into_iter()
            .filter(|f| f.degree().is_some_and(|d| d > 0))
            .collect()
    }

    /// Block-diagonal companion form built from the invariant factors.
    pub fn frobenius_form(&self) -> FpMatrix {
        let factors = self.invariant_factors();
        let mut out = FpMatrix { p: self.p, n: self.n, data: vec![0; self.n * self.n] };
        let mut offset = 0;
        for f in &factors {
            let d = f.degree().unwrap_or(0);
            for i in 1..d {
                out.data[(offset + i) * self.n + offset + i - 1] = 1 % self.p;
            }
            for i in 0..d {
                out.data[(offset + i) * self.n + offset + d - 1] = (self.p - f.coeff(i)) % self.p;
            }
            offset += d;
        }
        out
    }

    pub fn is_similar_to(&self, other: &FpMatrix) -> bool {
        self.p == other.p && self.n == other.n && self.frobenius_form() == other.frobenius_form()
    }
}

/// Polynomial over `F_p`, coefficients low to high, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    p: u64,
    coeffs: Vec<u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl Poly {
    fn trimmed(mut coeffs: Vec<u64>, p: u64) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Poly { p, coeffs }
    }

    pub fn constant(c: u64, p: u64) -> Self {
        Self::trimmed(vec![c % p], p)
    }

    pub fn x(p: u64) -> Self {
        Self::trimmed(vec![0, 1 % p], p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::trimmed((0..n).map(|i| (self.coeff(i) + other.coeff(i)) % self.p).collect(), self.p)
    }

    fn scale(&self, c: u64) -> Poly {
        Self::trimmed(self.coeffs.iter().map(|&a| mul_mod(a, c, self.p)).collect(), self.p)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly { p: self.p, coeffs: Vec::new() };
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        Self::trimmed(out, self.p)
    }

    fn neg(&self) -> Poly {
        self.scale(self.p - 1)
    }

    /// Euclidean division `self = q * d + r`. Panics if `d` is zero.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = inv_mod(d.coeffs[dd], self.p);
        let mut r = self.coeffs.clone();
        let mut q = vec![0u64; self.coeffs.len().saturating_sub(dd).max(1)];
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = mul_mod(r[r.len() - 1], lead_inv, self.p);
            q[k] = c;
            for (i, &b) in d.coeffs.iter().enumerate() {
                let sub = mul_mod(c, b, self.p);
                r[k + i] = (r[k + i] + self.p - sub) % self.p;
            }
            while r.last() == Some(&0) {
                r.pop();
            }
        }
        (Self::trimmed(q, self.p), Self::trimmed(r, self.p))
    }

    pub fn monic(&self) -> Poly {
        match self.coeffs.last() {
            Some(&lead) => self.scale(inv_mod(lead, self.p)),
            None => self.clone(),
        }
    }
}

/// Diagonalizes a square polynomial matrix by elementary operations and
/// returns the monic diagonal `d_1 | d_2 | ...`.
fn poly_smith_diagonal(m: &mut [Vec<Poly>]) -> Vec<Poly> {
    let n = m.len();
    for t in 0..n {
        loop {
            // Pivot: nonzero entry of least degree in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if let Some(d) = m[i][j].degree() {
                        if best.map_or(true, |(bi, bj)| d < m[bi][bj].degree().unwrap()) {
                            best = Some((i, j));
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish_diagonal(m);
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let pivot = m[t][t].clone();
            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].div_rem(&pivot);
                for j in t..n {
                    let delta = q.mul(&m[t][j]).neg();
                    m[i][j] = m[i][j].add(&delta);
                }
                clean &= r.is_zero();
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].div_rem(&pivot);
                for row in m.iter_mut().skip(t) {
                    let delta = q.mul(&row[t]).neg();
                    row[j] = row[j].add(&delta);
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            // Pivot must divide the trailing block; otherwise fold the offending row in.
            let offender = (t + 1..n).find(|&i| (t + 1..n).any(|j| !m[i][j].div_rem(&pivot).1.is_zero()));
            match offender {
                Some(i) => {
                    for j in t..n {
                        let v = m[t][j].add(&m[i][j]);
                        m[t][j] = v;
                    }
                }
                None => break,
            }
        }
    }
    finish_diagonal(m)
}

fn finish_diagonal(m: &[Vec<Poly>]) -> Vec<Poly> {
    (0..m.len()).map(|i| m[i][i].monic()).collect()
}

/// Entry point used by the Tor comparison. Validates the preconditions.
pub fn same_cyclic_modular_rep(t0: &FpMatrix, t1: &FpMatrix, h: u64) -> Result<bool> {
    if t0.modulus() != t1.modulus() || t0.dim() != t1.dim() {
        return Err(Error::input("representations live on different spaces"));
    }
    if !t0.is_invertible() || !t1.is_invertible() {
        return Err(Error::input("representation matrices must be invertible"));
    }
    let id = FpMatrix::identity(t0.dim(), t0.modulus());
    if t0.pow(h) != id || t1.pow(h) != id {
        return Err(Error::input(format!("matrices do not satisfy X^{h} = I")));
    }
    Ok(t0.is_similar_to(t1))
}
