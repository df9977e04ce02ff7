use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::snf::{integer_kernel, smith_normal_form, solve_integer};
use super::IntMatrix;
use crate::error::{Error, Result};

/// Finite abelian group `Z/d_1 + ... + Z/d_k` in invariant-factor normal form:
/// `d_1 | d_2 | ... | d_k`, every `d_i >= 2`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinAbGroup {
    factors: Vec<BigInt>,
    order: BigInt,
}

/// An element of a [`FinAbGroup`], stored reduced: `coeffs[i]` lies in `[0, d_i)`.
///
/// Elements do not carry their group; every operation goes through the group.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GroupElement(Vec<BigInt>);

impl GroupElement {
    pub fn coeffs(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

impl fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "0");
        }
        for (i, d) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "Z/{d}")?;
        }
        Ok(())
    }
}

/// The cokernel `Z^k / image(R)` of a relation matrix, with maps back and forth.
#[derive(Debug, Clone)]
pub struct Cokernel {
    pub group: FinAbGroup,
    /// Sends `Z^k` onto the coordinates of `group` (apply, then reduce).
    pub projection: IntMatrix,
    /// Column `j` is a lift to `Z^k` of the `j`-th generator of `group`.
    pub section: IntMatrix,
}

impl Cokernel {
    pub fn project(&self, v: &[BigInt]) -> GroupElement {
        self.group.reduce(&self.projection.mul_vec(v))
    }

    pub fn lift(&self, x: &GroupElement) -> Vec<BigInt> {
        self.section.mul_vec(x.coeffs())
    }
}

/// Computes `Z^k / image(relations)` in normal form. Errors if the quotient is infinite.
pub fn cokernel(relations: &IntMatrix) -> Result<Cokernel> {
    let k = relations.rows();
    let snf = smith_normal_form(relations);
    let diag = snf.diagonal();
    if snf.rank() < k {
        return Err(Error::input("relations do not present a finite group"));
    }
    let kept: Vec<usize> = (0..k).filter(|&i| !diag[i].is_one()).collect();
    let factors: Vec<BigInt> = kept.iter().map(|&i| diag[i].clone()).collect();
    let all_cols: Vec<usize> = (0..k).collect();
    Ok(Cokernel {
        group: FinAbGroup::new(factors)?,
        projection: snf.u.select(&kept, &all_cols),
        section: snf.u_inv.select(&all_cols, &kept),
    })
}

/// A subgroup `B = <gens>` of an ambient group, carrying its own normal-form
/// presentation.
#[derive(Debug, Clone)]
pub struct Subgroup {
    pub group: FinAbGroup,
    /// Column `j` is the `j`-th generator of `group`, as an element of the ambient group.
    pub inclusion: IntMatrix,
    ambient: FinAbGroup,
    gens: IntMatrix,
    coords: Cokernel,
}

impl Subgroup {
    /// Coordinates in `self.group` of an ambient element, or `None` if it is not in the subgroup.
    pub fn coords_of(&self, x: &GroupElement) -> Option<GroupElement> {
        let system = self.gens.hconcat(&self.ambient.relation_matrix());
        let w = solve_integer(&system, x.coeffs())?;
        Some(self.coords.project(&w[..self.gens.cols()]))
    }

    /// The `j`-th generator of the subgroup as an ambient element.
    pub fn generator(&self, j: usize) -> GroupElement {
        self.ambient.reduce(&self.inclusion.column(j))
    }
}

impl FinAbGroup {
    /// Validates a normalized invariant-factor list.
    pub fn new(factors: Vec<BigInt>) -> Result<Self> {
        for d in &factors {
            if d < &BigInt::from(2) {
                return Err(Error::input(format!("invariant factor {d} must be at least 2")));
            }
        }
        for w in factors.windows(2) {
            if !w[1].is_multiple_of(&w[0]) {
                return Err(Error::input(format!(
                    "invariant factors must form a divisibility chain ({} does not divide {})",
                    w[0], w[1]
                )));
            }
        }
        let order = factors.iter().product();
        Ok(FinAbGroup { factors, order })
    }

    pub fn from_u64s(factors: &[u64]) -> Result<Self> {
        Self::new(factors.iter().map(|&d| BigInt::from(d)).collect())
    }

    pub fn trivial() -> Self {
        FinAbGroup {
            factors: Vec::new(),
            order: BigInt::one(),
        }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 1 {
            Ok(Self::trivial())
        } else {
            Self::from_u64s(&[n])
        }
    }

    /// Normal form of `Z/c_1 + ... + Z/c_m` for arbitrary positive `c_i`, with
    /// the isomorphism from the naive coordinates.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Result<Cokernel> {
        if orders.iter().any(|c| c < &BigInt::one()) {
            return Err(Error::input("cyclic orders must be positive"));
        }
        cokernel(&IntMatrix::diagonal(orders.len(), orders.len(), orders))
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.factors
    }

    /// Number of cyclic summands `k`.
    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> &BigInt {
        &self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Largest invariant factor (1 for the trivial group).
    pub fn exponent(&self) -> BigInt {
        self.factors.last().cloned().unwrap_or_else(BigInt::one)
    }

    /// `diag(d_1, ..., d_k)`: the relation matrix of the presentation.
    pub fn relation_matrix(&self) -> IntMatrix {
        IntMatrix::diagonal(self.rank(), self.rank(), &self.factors)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.rank()])
    }

    /// The `i`-th standard generator.
    pub fn basis(&self, i: usize) -> GroupElement {
        let mut e = self.zero();
        e.0[i] = BigInt::one();
        e
    }

    /// Reduces an integer vector into an element. Panics on a length mismatch.
    pub fn reduce(&self, coeffs: &[BigInt]) -> GroupElement {
        assert_eq!(coeffs.len(), self.rank(), "element length does not match group rank");
        GroupElement(
            coeffs
                .iter()
                .zip(&self.factors)
                .map(|(c, d)| c.mod_floor(d))
                .collect(),
        )
    }

    /// Checked variant of [`reduce`](Self::reduce).
    pub fn element(&self, coeffs: &[BigInt]) -> Result<GroupElement> {
        if coeffs.len() != self.rank() {
            return Err(Error::input(format!(
                "element has {} coordinates but the group {} has rank {}",
                coeffs.len(),
                self,
                self.rank()
            )));
        }
        Ok(self.reduce(coeffs))
    }

    pub fn element_i64(&self, coeffs: &[i64]) -> Result<GroupElement> {
        let v: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        self.element(&v)
    }

    /// True if `x` has the right length and is reduced.
    pub fn contains(&self, x: &GroupElement) -> bool {
        x.0.len() == self.rank()
            && x.0.iter().zip(&self.factors).all(|(c, d)| !c.is_negative() && c < d)
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let sum: Vec<BigInt> = a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect();
        self.reduce(&sum)
    }

    pub fn sub(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        let diff: Vec<BigInt> = a.0.iter().zip(&b.0).map(|(x, y)| x - y).collect();
        self.reduce(&diff)
    }

    pub fn scale(&self, n: &BigInt, a: &GroupElement) -> GroupElement {
        let v: Vec<BigInt> = a.0.iter().map(|x| x * n).collect();
        self.reduce(&v)
    }

    /// Order of an element: lcm over `d_i / gcd(d_i, x_i)`.
    pub fn order_of(&self, x: &GroupElement) -> BigInt {
        x.0.iter()
            .zip(&self.factors)
            .fold(BigInt::one(), |acc, (c, d)| acc.lcm(&(d / c.gcd(d))))
    }

    /// Enumerates all elements. Only for small groups (tests, oracles, small-table output).
    pub fn elements(&self) -> Vec<GroupElement> {
        let mut out = vec![self.zero()];
        for (i, d) in self.factors.iter().enumerate() {
            let d = d.to_u64().expect("group too large to enumerate");
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for x in &out {
                for c in 0..d {
                    let mut y = x.clone();
                    y.0[i] = BigInt::from(c);
                    next.push(y);
                }
            }
            out = next;
        }
        out
    }

    fn check_elements(&self, xs: &[GroupElement]) -> Result<()> {
        match xs.iter().find(|x| x.0.len() != self.rank()) {
            Some(x) => Err(Error::input(format!(
                "element {x:?} has the wrong length for group {self}"
            ))),
            None => Ok(()),
        }
    }

    fn generator_matrix(&self, gens: &[GroupElement]) -> IntMatrix {
        let cols: Vec<Vec<BigInt>> = gens.iter().map(|g| g.0.clone()).collect();
        IntMatrix::from_columns(self.rank(), &cols)
    }

    /// `M / <gens>` in normal form together with the projection.
    pub fn quotient_presentation(&self, gens: &[GroupElement]) -> Result<Cokernel> {
        self.check_elements(gens)?;
        cokernel(&self.relation_matrix().hconcat(&self.generator_matrix(gens)))
    }

    /// Decides `x in <gens>` by solving `G w + diag(d) z = x` over the integers.
    pub fn in_subgroup(&self, x: &GroupElement, gens: &[GroupElement]) -> Result<bool> {
        self.check_elements(gens)?;
        self.check_elements(std::slice::from_ref(x))?;
        let system = self.generator_matrix(gens).hconcat(&self.relation_matrix());
        Ok(solve_integer(&system, x.coeffs()).is_some())
    }

    /// Presents `<gens>` as an abstract group with an inclusion map.
    pub fn subgroup(&self, gens: &[GroupElement]) -> Result<Subgroup> {
        self.check_elements(gens)?;
        let g = self.generator_matrix(gens);
        let system = g.hconcat(&self.relation_matrix());
        let kernel = integer_kernel(&system);
        // Relations among the generators: the first |gens| coordinates of the kernel.
        let top: Vec<usize> = (0..gens.len()).collect();
        let all: Vec<usize> = (0..kernel.cols()).collect();
        let relations = kernel.select(&top, &all);
        let coords = cokernel(&relations)?;
        let inclusion = g.mul(&coords.section);
        let mut reduced = IntMatrix::zeros(self.rank(), inclusion.cols());
        for j in 0..inclusion.cols() {
            for (i, c) in self.reduce(&inclusion.column(j)).0.into_iter().enumerate() {
                reduced.set(i, j, c);
            }
        }
        Ok(Subgroup {
            group: coords.group.clone(),
            inclusion: reduced,
            ambient: self.clone(),
            gens: g,
            coords,
        })
    }

    /// Generators of `{a : order(a) < q}` for a prime power `q`, on a group whose
    /// order is a power of the same prime.
    pub fn subgroup_of_order_less_than(&self, q: &BigInt) -> Result<Vec<GroupElement>> {
        let p = prime_of_prime_power(q)
            .ok_or_else(|| Error::input(format!("{q} is not a prime power")))?;
        if !self.is_trivial() && prime_of_prime_power(&self.order).as_ref() != Some(&p) {
            return Err(Error::input(format!("{self} is not a {p}-group")));
        }
        // order(a) < q  <=>  (q/p) a = 0, componentwise.
        let bound = q / &p;
        Ok((0..self.rank())
            .map(|i| {
                let d = &self.factors[i];
                let step = d / d.gcd(&bound);
                self.scale(&step, &self.basis(i))
            })
            .filter(|g| !g.is_zero())
            .collect())
    }

    /// Direct sum `self + other`, renormalized, with the embeddings of both summands.
    pub fn direct_sum(&self, other: &FinAbGroup) -> Result<(Cokernel, usize)> {
        let mut orders = self.factors.clone();
        orders.extend(other.factors.iter().cloned());
        Ok((Self::from_cyclic_orders(&orders)?, self.rank()))
    }
}

/// Returns `p` if `q = p^a` with `a >= 1`.
pub fn prime_of_prime_power(q: &BigInt) -> Option<BigInt> {
    if q < &BigInt::from(2) {
        return None;
    }
    let mut p = BigInt::from(2);
    let mut n = q.clone();
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            break;
        }
        p += 1;
    }
    if !n.is_multiple_of(&p) {
        p = n.clone();
    }
    while n.is_multiple_of(&p) {
        n /= &p;
    }
    n.is_one().then_some(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn g(f: &[u64]) -> FinAbGroup {
        FinAbGroup::from_u64s(f).unwrap()
    }

    fn el(grp: &FinAbGroup, c: &[i64]) -> GroupElement {
        grp.element_i64(c).unwrap()
    }

    fn bi(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Brute-force closure of a generating set.
    fn span(grp: &FinAbGroup, gens: &[GroupElement]) -> BTreeSet<GroupElement> {
        let mut seen: BTreeSet<GroupElement> = [grp.zero()].into_iter().collect();
        let mut frontier = vec![grp.zero()];
        while let Some(x) = frontier.pop() {
            for s in gens {
                let y = grp.add(&x, s);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        seen
    }

    #[test]
    fn normalization_is_validated() {
        assert!(FinAbGroup::from_u64s(&[2, 3]).is_err());
        assert!(FinAbGroup::from_u64s(&[1]).is_err());
        assert!(FinAbGroup::from_u64s(&[2, 4]).is_ok());
        let c = FinAbGroup::from_cyclic_orders(&[bi(2), bi(3), bi(1), bi(4)]).unwrap();
        assert_eq!(c.group, g(&[2, 12]));
    }

    #[test]
    fn quotient_examples() {
        let z6 = g(&[6]);
        assert_eq!(z6.quotient_presentation(&[el(&z6, &[2])]).unwrap().group, g(&[2]));
        assert_eq!(z6.quotient_presentation(&[]).unwrap().group, z6);
        let m = g(&[2, 6]);
        assert_eq!(m.quotient_presentation(&[el(&m, &[1, 3])]).unwrap().group, g(&[6]));
        assert!(z6.quotient_presentation(&[GroupElement(vec![bi(1), bi(1)])]).is_err());
    }

    #[test]
    fn membership_examples() {
        let z6 = g(&[6]);
        assert!(!z6.in_subgroup(&el(&z6, &[1]), &[el(&z6, &[2])]).unwrap());
        assert!(z6.in_subgroup(&el(&z6, &[0]), &[]).unwrap());
        assert!(z6.in_subgroup(&el(&z6, &[4]), &[el(&z6, &[2])]).unwrap());
        let t = FinAbGroup::trivial();
        assert!(t.in_subgroup(&t.zero(), &[]).unwrap());
    }

    #[test]
    fn order_less_than_examples() {
        let m = g(&[3, 9]);
        let gens = m.subgroup_of_order_less_than(&bi(9)).unwrap();
        let sub = span(&m, &gens);
        let expected: BTreeSet<_> = m
            .elements()
            .into_iter()
            .filter(|x| m.order_of(x) < bi(9))
            .collect();
        assert_eq!(sub, expected);
        assert_eq!(sub.len(), 9);

        let z3 = g(&[3]);
        assert!(z3.subgroup_of_order_less_than(&bi(3)).unwrap().is_empty());

        let z9 = g(&[9]);
        let gens = z9.subgroup_of_order_less_than(&bi(9)).unwrap();
        assert_eq!(span(&z9, &gens), [0, 3, 6].iter().map(|&c| el(&z9, &[c])).collect());

        assert!(g(&[6]).subgroup_of_order_less_than(&bi(3)).is_err());
        assert!(g(&[4]).subgroup_of_order_less_than(&bi(3)).is_err());
        assert!(g(&[3]).subgroup_of_order_less_than(&bi(6)).is_err());
    }

    #[test]
    fn subgroup_presentation_and_coords() {
        let m = g(&[3, 9]);
        let sub = m.subgroup(&m.subgroup_of_order_less_than(&bi(9)).unwrap()).unwrap();
        assert_eq!(sub.group, g(&[3, 3]));
        for x in span(&m, &(0..sub.group.rank()).map(|j| sub.generator(j)).collect::<Vec<_>>()) {
            let c = sub.coords_of(&x).unwrap();
            let back: Vec<BigInt> = sub.inclusion.mul_vec(c.coeffs());
            assert_eq!(m.reduce(&back), x);
        }
        assert!(sub.coords_of(&el(&m, &[0, 1])).is_none());
    }

    #[test]
    fn prime_powers() {
        assert_eq!(prime_of_prime_power(&bi(9)), Some(bi(3)));
        assert_eq!(prime_of_prime_power(&bi(7)), Some(bi(7)));
        assert_eq!(prime_of_prime_power(&bi(12)), None);
        assert_eq!(prime_of_prime_power(&bi(1)), None);
        assert_eq!(prime_of_prime_power(&bi(1024)), Some(bi(2)));
    }

    #[test]
    fn small_random_groups_agree_with_enumeration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let shapes: &[&[u64]] = &[&[12], &[2, 4], &[2, 6], &[3, 9], &[2, 2, 4], &[6, 12], &[5], &[4, 8]];
        for _ in 0..200 {
            let m = g(shapes[rng.gen_range(0..shapes.len())]);
            let ngens = rng.gen_range(0..3);
            let gens: Vec<GroupElement> = (0..ngens)
                .map(|_| {
                    let c: Vec<i64> = m
                        .invariant_factors()
                        .iter()
                        .map(|d| rng.gen_range(0..d.to_i64().unwrap()))
                        .collect();
                    el(&m, &c)
                })
                .collect();
            let sub = span(&m, &gens);
            let q = m.quotient_presentation(&gens).unwrap();
            assert_eq!(q.group.order() * BigInt::from(sub.len()), *m.order());
            for x in m.elements() {
                assert_eq!(m.in_subgroup(&x, &gens).unwrap(), sub.contains(&x));
                assert_eq!(q.project(x.coeffs()).is_zero(), sub.contains(&x));
            }
            let pres = m.subgroup(&gens).unwrap();
            assert_eq!(pres.group.order(), &BigInt::from(sub.len()));
        }
    }
}
