use num_traits::ToPrimitive;

use crate::caps::Caps;
use crate::chart::Chart;
use crate::error::{Error, Result};

/// Hilbert basis of the invariant monoid `{v in N^n : sum v_i chi_i = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoarseReport {
    /// True iff the invariant monoid is free, i.e. the coarse chart is smooth.
    pub smooth: bool,
    /// Minimal generators, sorted.
    pub hilbert_basis: Vec<Vec<u64>>,
}

/// Computes the invariant monoid's Hilbert basis by enumerating the box
/// `0 <= v_i <= ord(chi_i)`.
///
/// The box suffices: `ord(chi_i) e_i` is invariant, so any invariant `v` with
/// `v_i > ord(chi_i)` splits off that element and is not minimal.
pub fn coarse_smoothness(chart: &Chart, caps: &Caps) -> Result<CoarseReport> {
    let n = chart.dim();
    if n > caps.max_hilbert_dim {
        return Err(Error::Resource(format!(
            "Hilbert basis enumeration is capped at dimension {}, got {n}",
            caps.max_hilbert_dim
        )));
    }
    let group = chart.group();
    let too_big = || Error::Resource("character group too large for Hilbert basis enumeration".into());
    let factors: Vec<u64> = group
        .invariant_factors()
        .iter()
        .map(|d| d.to_u64().ok_or_else(too_big))
        .collect::<Result<_>>()?;
    let chars: Vec<Vec<u64>> = chart
        .characters()
        .iter()
        .map(|c| c.coeffs().iter().map(|x| x.to_u64().ok_or_else(too_big)).collect())
        .collect::<Result<_>>()?;
    let orders: Vec<u64> = chart
        .characters()
        .iter()
        .map(|c| group.order_of(c).to_u64().ok_or_else(too_big))
        .collect::<Result<_>>()?;

    let mut box_size: u64 = 1;
    for &o in &orders {
        box_size = box_size
            .checked_mul(o + 1)
            .filter(|&s| s <= caps.max_enumeration)
            .ok_or_else(|| Error::Resource(format!("enumeration box exceeds {} points", caps.max_enumeration)))?;
    }

    // Mixed-radix index of v is sum v_i * stride_i, with stride_0 = 1.
    let mut strides = vec![1u64; n];
    for i in 1..n {
        strides[i] = strides[i - 1] * (orders[i - 1] + 1);
    }
    // dominated[idx]: some nonzero invariant u <= v exists.
    let mut dominated = vec![false; box_size as usize];
    let mut basis = Vec::new();
    let mut v = vec![0u64; n];
    let mut sum = vec![0u64; factors.len()];
    for idx in 0..box_size as usize {
        if idx > 0 {
            // Odometer step: coordinate `i` increments, lower ones wrap to 0.
            // Wrapping coordinate j subtracts ord_j * chi_j = 0, so only chi_i is added.
            let mut i = 0;
            while v[i] == orders[i] {
                v[i] = 0;
                i += 1;
            }
            v[i] += 1;
            for (s, (c, d)) in sum.iter_mut().zip(chars[i].iter().zip(&factors)) {
                *s = (*s + c) % d;
            }
        }
        let below = (0..n).any(|i| v[i] > 0 && dominated[idx - strides[i] as usize]);
        let invariant = idx > 0 && sum.iter().all(|&s| s == 0);
        if invariant && !below {
            basis.push(v.clone());
        }
        dominated[idx] = below || invariant;
    }
    basis.sort();

    for (i, &o) in orders.iter().enumerate() {
        let mut axis = vec![0u64; n];
        axis[i] = o;
        if !basis.contains(&axis) {
            return Err(Error::invariant(format!(
                "ord(chi_{i}) e_{i} missing from the Hilbert basis"
            )));
        }
    }
    Ok(CoarseReport {
        smooth: basis.len() == n,
        hilbert_basis: basis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(factors: &[u64], chars: &[&[i64]]) -> CoarseReport {
        coarse_smoothness(&Chart::from_small(factors, chars, &[]).unwrap(), &Caps::default()).unwrap()
    }

    #[test]
    fn a1_is_singular() {
        let r = report(&[2], &[&[1], &[1]]);
        assert_eq!(r.hilbert_basis, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert!(!r.smooth);
    }

    #[test]
    fn trivial_group_is_free() {
        let r = report(&[], &[&[], &[]]);
        assert_eq!(r.hilbert_basis, vec![vec![0, 1], vec![1, 0]]);
        assert!(r.smooth);
    }

    #[test]
    fn reflection_is_smooth() {
        let r = report(&[2], &[&[1], &[0]]);
        assert_eq!(r.hilbert_basis, vec![vec![0, 1], vec![2, 0]]);
        assert!(r.smooth);
    }

    #[test]
    fn a2_basis() {
        // Invariants of (x, y) -> (w x, w^2 y): x^3, xy, y^3.
        let r = report(&[3], &[&[1], &[2]]);
        assert_eq!(r.hilbert_basis, vec![vec![0, 3], vec![1, 1], vec![3, 0]]);
    }

    #[test]
    fn a2_blow_up_charts_stay_singular() {
        // Both pivot charts of the A2 blow-up carry weights (1, 1) mod 3:
        // invariants x^3, x^2 y, x y^2, y^3.
        let atlas = crate::divisorialify::Atlas::single(Chart::from_small(&[3], &[&[1], &[2]], &[]).unwrap());
        let run = crate::divisorialify::divisorialification(&atlas).unwrap();
        assert!(run.atlas.is_divisorial().unwrap());
        for chart in run.atlas.charts().values() {
            let r = coarse_smoothness(chart, &Caps::default()).unwrap();
            assert_eq!(r.hilbert_basis, vec![vec![0, 3], vec![1, 2], vec![2, 1], vec![3, 0]]);
            assert!(!r.smooth);
        }
    }

    #[test]
    fn caps() {
        let c = Chart::from_small(&[2], &[&[1], &[1], &[1], &[1], &[1]], &[]).unwrap();
        assert!(matches!(coarse_smoothness(&c, &Caps::default()), Err(Error::Resource(_))));
        let c = Chart::from_small(&[97], &[&[1], &[1]], &[]).unwrap();
        let tight = Caps { max_enumeration: 100, ..Caps::default() };
        assert!(matches!(coarse_smoothness(&c, &tight), Err(Error::Resource(_))));
    }
}
