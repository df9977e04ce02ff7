use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::Atlas;
use crate::chart::{Chart, OrbitType};
use crate::error::{Error, Result};
use crate::transforms::rigidify;
use crate::zlinalg::{solve_integer, GroupElement, IntMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CertificateKind {
    /// Every character is an integer combination of divisor characters.
    Divisorial,
    /// Charts were rigidified; divisor characters generate each group.
    Rigidified,
    /// Every coarse chart is smooth.
    CoarseSmooth,
    /// Stabilizers are trivial at every point off the divisor.
    StabilizerTrivialOffDivisor,
}

/// Per-chart witness data. Which fields are filled depends on the certificate kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChartEvidence {
    /// The chart the evidence refers to (after rigidification, where applicable).
    pub chart: Chart,
    /// Divisor coordinates in divisor order; the combinations are over their characters.
    pub divisor_coords: Vec<usize>,
    /// Pairs `(target, c)` with `sum_j c_j chi_{divisor_coords[j]} = target`.
    pub combinations: Vec<(GroupElement, Vec<BigInt>)>,
    /// Orbit types whose stabilizer was checked to be trivial.
    pub trivial_stabilizer_orbits: Vec<OrbitType>,
    pub hilbert_basis: Option<Vec<Vec<u64>>>,
    pub coarse_smooth: Option<bool>,
    /// Root order per divisor when the chart is an iterated root stack over
    /// its (smooth) coarse space.
    pub root_orders: Option<BTreeMap<String, u64>>,
}

impl ChartEvidence {
    pub(crate) fn bare(chart: &Chart) -> Self {
        let mut divisor_coords: Vec<(_, usize)> = chart.divisors().iter().map(|(l, &c)| (l.clone(), c)).collect();
        divisor_coords.sort();
        ChartEvidence {
            chart: chart.clone(),
            divisor_coords: divisor_coords.into_iter().map(|(_, c)| c).collect(),
            combinations: Vec::new(),
            trivial_stabilizer_orbits: Vec::new(),
            hilbert_basis: None,
            coarse_smooth: None,
            root_orders: None,
        }
    }

    fn divisor_characters(&self) -> Vec<GroupElement> {
        self.divisor_coords.iter().map(|&j| self.chart.character(j).clone()).collect()
    }

    /// Finds integer coefficients expressing `target` over the divisor characters.
    fn combination_for(&self, target: &GroupElement) -> Option<Vec<BigInt>> {
        let group = self.chart.group();
        let cols: Vec<Vec<BigInt>> = self.divisor_characters().iter().map(|c| c.coeffs().to_vec()).collect();
        let system = IntMatrix::from_columns(group.rank(), &cols).hconcat(&group.relation_matrix());
        let w = solve_integer(&system, target.coeffs())?;
        Some(w[..cols.len()].to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub holds: bool,
    pub charts: BTreeMap<String, ChartEvidence>,
}

/// Writes every character of every chart as a combination of divisor characters.
pub fn divisoriality_certificate(atlas: &Atlas) -> Result<Certificate> {
    let mut holds = true;
    let mut charts = BTreeMap::new();
    for (id, chart) in atlas.charts() {
        let mut ev = ChartEvidence::bare(chart);
        for chi in chart.characters() {
            match ev.combination_for(chi) {
                Some(c) => ev.combinations.push((chi.clone(), c)),
                None => holds = false,
            }
        }
        charts.insert(id.clone(), ev);
    }
    Ok(Certificate {
        kind: CertificateKind::Divisorial,
        holds,
        charts,
    })
}

/// Rigidifies every chart of a divisorial atlas and certifies that the
/// divisor characters generate each group (the divisor representation is
/// injective) and that stabilizers vanish off the divisor.
pub fn abelianization_report(atlas: &Atlas) -> Result<Certificate> {
    let mut holds = true;
    let mut charts = BTreeMap::new();
    for (id, chart) in atlas.charts() {
        if !chart.is_divisorial()? {
            return Err(Error::Precondition(format!("chart {id} is not divisorial")));
        }
        let rigid = rigidify(chart)?;
        let mut ev = ChartEvidence::bare(&rigid);
        let group = rigid.group();
        for i in 0..group.rank() {
            let e = group.basis(i);
            match ev.combination_for(&e) {
                Some(c) => ev.combinations.push((e, c)),
                None => holds = false,
            }
        }
        let divisor = rigid.divisor_coords();
        let free: Vec<usize> = (0..rigid.dim()).filter(|i| !divisor.contains(i)).collect();
        let orbits: Vec<OrbitType> = if free.len() <= 6 {
            (0u64..1 << free.len())
                .map(|mask| {
                    let extra = free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i);
                    OrbitType::new(divisor.iter().copied().chain(extra))
                })
                .collect()
        } else {
            vec![OrbitType::new(divisor.iter().copied())]
        };
        for orbit in orbits {
            if rigid.stabilizer_dual(&orbit)?.is_trivial() {
                ev.trivial_stabilizer_orbits.push(orbit);
            } else {
                holds = false;
            }
        }
        charts.insert(id.clone(), ev);
    }
    Ok(Certificate {
        kind: CertificateKind::Rigidified,
        holds,
        charts,
    })
}

fn combination_holds(ev: &ChartEvidence, target: &GroupElement, coeffs: &[BigInt]) -> bool {
    let group = ev.chart.group();
    if coeffs.len() != ev.divisor_coords.len() || !group.contains(target) {
        return false;
    }
    let total = ev
        .divisor_coords
        .iter()
        .zip(coeffs)
        .fold(group.zero(), |acc, (&j, c)| group.add(&acc, &group.scale(c, ev.chart.character(j))));
    &total == target
}

fn coarse_evidence_holds(ev: &ChartEvidence) -> bool {
    let chart = &ev.chart;
    let group = chart.group();
    let n = chart.dim();
    let Some(basis) = &ev.hilbert_basis else {
        return false;
    };
    let invariant = |v: &Vec<u64>| {
        v.len() == n
            && chart
                .characters()
                .iter()
                .zip(v)
                .fold(group.zero(), |acc, (chi, &k)| group.add(&acc, &group.scale(&BigInt::from(k), chi)))
                .is_zero()
    };
    if !basis.iter().all(invariant) {
        return false;
    }
    if ev.coarse_smooth != Some(true) {
        // Singular claims are not certified; only their basis vectors are checked.
        return ev.coarse_smooth == Some(false);
    }
    if basis.len() != n {
        return false;
    }
    // A free invariant monoid: the basis spans the invariant lattice (index
    // |<chi_1..chi_n>| in Z^n) and its cone contains every ord(chi_i) e_i.
    let cols: Vec<Vec<BigInt>> = basis.iter().map(|v| v.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let b = IntMatrix::from_columns(n, &cols);
    let Ok(span) = group.subgroup(chart.characters()) else {
        return false;
    };
    if &b.determinant().abs() != span.group.order() {
        return false;
    }
    (0..n).all(|i| {
        let mut target = vec![BigInt::from(0); n];
        target[i] = group.order_of(chart.character(i));
        solve_integer(&b, &target).is_some_and(|x| x.iter().all(|c| !c.is_negative()))
    })
}

fn root_orders_hold(ev: &ChartEvidence, orders: &BTreeMap<String, u64>) -> bool {
    let chart = &ev.chart;
    let group = chart.group();
    let divisor = chart.divisor_coords();
    let off_divisor_trivial = (0..chart.dim()).filter(|i| !divisor.contains(i)).all(|i| chart.character(i).is_zero());
    let orders_match = orders.iter().all(|(name, &r)| {
        chart
            .divisor_by_name(name)
            .is_some_and(|(_, c)| group.order_of(chart.character(c)).to_u64() == Some(r))
    });
    let product: BigInt = orders.values().map(|&r| BigInt::from(r)).product();
    off_divisor_trivial && orders_match && &product == group.order()
}

/// Re-checks a certificate's evidence with direct group arithmetic.
pub fn verify_certificate(cert: &Certificate) -> bool {
    cert.charts.values().all(|ev| {
        let combos_ok = ev.combinations.iter().all(|(t, c)| combination_holds(ev, t, c));
        let group = ev.chart.group();
        let kind_ok = match cert.kind {
            CertificateKind::Divisorial => {
                !cert.holds
                    || (ev.combinations.len() == ev.chart.dim()
                        && ev.combinations.iter().zip(ev.chart.characters()).all(|((t, _), chi)| t == chi))
            }
            CertificateKind::Rigidified | CertificateKind::StabilizerTrivialOffDivisor => {
                let generated = ev.combinations.len() == group.rank()
                    && ev.combinations.iter().enumerate().all(|(i, (t, _))| *t == group.basis(i));
                let divisor = ev.chart.divisor_coords();
                let orbits_ok = !ev.trivial_stabilizer_orbits.is_empty()
                    && ev.trivial_stabilizer_orbits.iter().all(|o| divisor.is_subset(&o.nonzero));
                !cert.holds || (generated && orbits_ok)
            }
            CertificateKind::CoarseSmooth => {
                let coarse_ok = coarse_evidence_holds(ev) && (!cert.holds || ev.coarse_smooth == Some(true));
                let roots_ok = ev.root_orders.as_ref().map_or(true, |r| root_orders_hold(ev, r));
                coarse_ok && roots_ok
            }
        };
        combos_ok && kind_ok
    })
}
