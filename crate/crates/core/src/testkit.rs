//! Random generators and brute-force oracles shared by the test suites.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::chart::{Chart, DivisorLabel, OrbitType};
use crate::divisorialify::Atlas;
use crate::ktheory::HModule;
use crate::zlinalg::{FinAbGroup, IntMatrix};

/// A random invariant-factor chain `d_1 | d_2 | ...` with product at most `max_order`.
pub fn random_factors<R: Rng>(rng: &mut R, max_order: u64, max_rank: usize) -> Vec<u64> {
    let rank = rng.gen_range(0..=max_rank);
    let mut factors: Vec<u64> = Vec::new();
    let mut order = 1u64;
    for _ in 0..rank {
        let prev = factors.last().copied().unwrap_or(1);
        let lo = if prev == 1 { 2 } else { 1 };
        let hi = max_order / (order * prev);
        if hi < lo {
            break;
        }
        let d = prev * rng.gen_range(lo..=hi);
        order *= d;
        factors.push(d);
    }
    factors
}

/// A random chart of dimension `dim`. Divisors are drawn from the pool
/// `D0, D1, ...` with order key `[k]` for `Dk`, so labels agree across charts.
pub fn random_chart<R: Rng>(rng: &mut R, dim: usize, max_order: u64) -> Chart {
    let factors = random_factors(rng, max_order, 2);
    let group = FinAbGroup::from_u64s(&factors).expect("valid chain");
    let characters = (0..dim)
        .map(|_| {
            let raw: Vec<i64> = factors.iter().map(|&d| rng.gen_range(0..d as i64)).collect();
            group.element_i64(&raw).expect("right length")
        })
        .collect();
    let mut pool: Vec<usize> = (0..dim).collect();
    pool.shuffle(rng);
    let count = rng.gen_range(0..=dim);
    let mut coords: Vec<usize> = pool[..count].to_vec();
    coords.sort_unstable();
    let mut names: Vec<usize> = (0..dim).collect();
    names.shuffle(rng);
    let divisors: BTreeMap<DivisorLabel, usize> = coords
        .iter()
        .zip(&names)
        .map(|(&c, &k)| (DivisorLabel::new(format!("D{k}"), vec![k as i64]), c))
        .collect();
    Chart::new(group, characters, divisors).expect("generated chart is valid")
}

/// A random atlas with 1 to `max_charts` charts of a common dimension in `1..=max_dim`.
pub fn random_atlas<R: Rng>(rng: &mut R, max_dim: usize, max_order: u64, max_charts: usize) -> Atlas {
    let dim = rng.gen_range(1..=max_dim);
    let count = rng.gen_range(1..=max_charts);
    let charts = (0..count)
        .map(|i| (format!("c{i}"), random_chart(rng, dim, max_order)))
        .collect();
    Atlas::new(charts).expect("generated atlas is valid")
}

/// A uniformly random orbit type for a chart of dimension `n`.
pub fn random_orbit<R: Rng>(rng: &mut R, n: usize) -> OrbitType {
    OrbitType::new((0..n).filter(|_| rng.gen_bool(0.5)))
}

/// Divisorial index by brute force over the dual group.
///
/// Enumerates `A = (+) Z/d_i` with pairing `<a, chi> = sum a_i chi_i / d_i mod 1`,
/// keeps `K = {a : <a, chi_j> = 0 for j in S or a divisor coordinate}` and
/// counts coordinates that pair nontrivially with some element of `K`.
pub fn brute_force_divisorial_index(chart: &Chart, orbit: &OrbitType) -> usize {
    let kill: BTreeSet<usize> = orbit.nonzero.union(&chart.divisor_coords()).copied().collect();
    brute_force_surviving(chart, &kill)
}

/// Codimension of stackiness by the same dual-group enumeration.
pub fn brute_force_codim(chart: &Chart, orbit: &OrbitType) -> usize {
    brute_force_surviving(chart, &orbit.nonzero)
}

fn brute_force_surviving(chart: &Chart, kill: &BTreeSet<usize>) -> usize {
    let d: Vec<u64> = chart
        .group()
        .invariant_factors()
        .iter()
        .map(|x| x.to_u64().expect("small group"))
        .collect();
    let lcm = d.last().copied().unwrap_or(1);
    let chars: Vec<Vec<u64>> = chart
        .characters()
        .iter()
        .map(|c| c.coeffs().iter().map(|x| x.to_u64().expect("reduced")).collect())
        .collect();
    // <a, chi> scaled by lcm, as an integer mod lcm.
    let pair = |a: &[u64], chi: &[u64]| -> u64 {
        a.iter()
            .zip(chi)
            .zip(&d)
            .map(|((&ai, &ci), &di)| ai * ci % di * (lcm / di))
            .sum::<u64>()
            % lcm
    };
    let mut survives = vec![false; chars.len()];
    let mut a = vec![0u64; d.len()];
    loop {
        if kill.iter().all(|&j| pair(&a, &chars[j]) == 0) {
            for (s, chi) in survives.iter_mut().zip(&chars) {
                *s |= pair(&a, chi) != 0;
            }
        }
        let mut i = 0;
        loop {
            if i == d.len() {
                return survives.iter().filter(|&&s| s).count();
            }
            a[i] += 1;
            if a[i] < d[i] {
                break;
            }
            a[i] = 0;
            i += 1;
        }
    }
}

/// Membership in the invariant monoid by direct evaluation.
pub fn is_invariant(chart: &Chart, v: &[u64]) -> bool {
    let g = chart.group();
    chart
        .characters()
        .iter()
        .zip(v)
        .fold(g.zero(), |acc, (chi, &k)| g.add(&acc, &g.scale(&BigInt::from(k), chi)))
        .is_zero()
}

fn reduce_rows(m: &mut [Vec<i64>], d: &[i64]) {
    for (row, &di) in m.iter_mut().zip(d) {
        for x in row.iter_mut() {
            *x = x.rem_euclid(di);
        }
    }
}

fn mat_mul(a: &[Vec<i64>], b: &[Vec<i64>], d: &[i64]) -> Vec<Vec<i64>> {
    let k = a.len();
    let mut out: Vec<Vec<i64>> = (0..k)
        .map(|i| (0..k).map(|j| (0..k).map(|l| a[i][l] * b[l][j] % d[i]).sum()).collect())
        .collect();
    reduce_rows(&mut out, d);
    out
}

/// Order of an endomorphism of `(+) Z/d_i` given by a well-defined matrix,
/// or `None` if it is not an automorphism of order at most `limit`.
pub fn endomorphism_order(action: &[Vec<i64>], d: &[i64], limit: u64) -> Option<u64> {
    let k = d.len();
    let identity: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| i64::from(i == j) % d[i]).collect()).collect();
    let mut a = action.to_vec();
    reduce_rows(&mut a, d);
    let mut power = a.clone();
    for h in 1..=limit {
        if power == identity {
            return Some(h);
        }
        power = mat_mul(&power, &a, d);
    }
    None
}

/// A random automorphism of `(+) Z/d_i`: entry `(i, j)` is a multiple of
/// `d_i / gcd(d_i, d_j)` so that the matrix descends to the group.
pub fn random_automorphism<R: Rng>(rng: &mut R, d: &[i64]) -> (Vec<Vec<i64>>, u64) {
    let k = d.len();
    loop {
        let m: Vec<Vec<i64>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let step = d[i] / num_integer::gcd(d[i], d[j]);
                        step * rng.gen_range(0..d[i] / step)
                    })
                    .collect()
            })
            .collect();
        if let Some(h) = endomorphism_order(&m, d, 5_000) {
            return (m, h);
        }
    }
}

/// A random H-module on a `p`-group with invariant factors `factors`.
pub fn random_hmodule<R: Rng>(rng: &mut R, factors: &[u64], p: u64) -> HModule {
    let d: Vec<i64> = factors.iter().map(|&x| x as i64).collect();
    let (action, h) = random_automorphism(rng, &d);
    let group = FinAbGroup::from_u64s(factors).expect("valid chain");
    HModule::new(group, IntMatrix::from_rows(&action), h, p).expect("generated module is valid")
}

/// A random `p`-group `(Z/p^e)^k` with all elementary divisors equal.
pub fn random_homocyclic<R: Rng>(rng: &mut R, primes: &[u64], max_exp: u32, max_rank: usize) -> (Vec<u64>, u64) {
    let p = *primes.choose(rng).expect("nonempty");
    let e = rng.gen_range(1..=max_exp);
    let k = rng.gen_range(1..=max_rank);
    (vec![p.pow(e); k], p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn factors_form_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let f = random_factors(&mut rng, 60, 2);
            assert!(f.iter().product::<u64>() <= 60);
            assert!(f.windows(2).all(|w| w[1] % w[0] == 0));
            assert!(f.iter().all(|&d| d >= 2));
        }
    }

    #[test]
    fn oracle_on_known_chart() {
        // Z/2, chi = (1, 1), no divisors: both coordinates survive at the origin.
        let c = Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap();
        assert_eq!(brute_force_divisorial_index(&c, &OrbitType::origin()), 2);
        assert_eq!(brute_force_divisorial_index(&c, &OrbitType::new([0])), 0);
        let c = Chart::from_small(&[2, 4], &[&[1, 0], &[0, 2], &[1, 1]], &[("D", 1)]).unwrap();
        // K = {a : 2 a_2 / 4 = 0} = {(a_1, a_2) : a_2 even}; pairs with chi_1 and chi_3.
        assert_eq!(brute_force_divisorial_index(&c, &OrbitType::origin()), 2);
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(endomorphism_order(&[vec![1, 0], vec![3, 1]], &[3, 9], 100), Some(3));
        assert_eq!(endomorphism_order(&[vec![0]], &[5], 100), None);
        assert_eq!(endomorphism_order(&[vec![2]], &[5], 100), Some(4));
    }
}
