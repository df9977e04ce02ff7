//! Divisorialification of atlases, the destackification driver, coarse-space
//! checks and certificates.
//!
//! The main loop blows up, in every chart where it is attained, the locus of
//! the globally maximal divisorial index. Each round strictly lowers that
//! maximum, so an atlas of dimension `d` becomes divisorial after at most
//! `d` rounds.

mod certificate;
mod coarse;
mod driver;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::caps::Caps;
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::transforms::{apply_step, StackyBlowUpSequence, StackyBlowUpStep};
use crate::zlinalg::FinAbGroup;

pub use certificate::{abelianization_report, divisoriality_certificate, verify_certificate, Certificate, CertificateKind, ChartEvidence};
pub use coarse::{coarse_smoothness, CoarseReport};
pub use driver::{destackify_driver, Destackifier, DriverOutcome, IdentityEngine};

/// A flat cover of a pair `(X, D)` by charts of a common dimension, with the
/// sequence of steps that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Atlas {
    charts: BTreeMap<String, Chart>,
    dim: usize,
    pub history: StackyBlowUpSequence,
}

impl Atlas {
    pub fn new(charts: BTreeMap<String, Chart>) -> Result<Self> {
        let dim = charts
            .values()
            .next()
            .map(Chart::dim)
            .ok_or_else(|| Error::input("an atlas needs at least one chart"))?;
        if let Some((id, c)) = charts.iter().find(|(_, c)| c.dim() != dim) {
            return Err(Error::input(format!(
                "chart {id} has dimension {} but the atlas has dimension {dim}",
                c.dim()
            )));
        }
        if let Some(id) = charts.keys().find(|id| id.is_empty()) {
            return Err(Error::input(format!("invalid chart id `{id}`")));
        }
        Ok(Atlas {
            charts,
            dim,
            history: StackyBlowUpSequence::default(),
        })
    }

    /// Single-chart atlas with chart id `c0`.
    pub fn single(chart: Chart) -> Self {
        Atlas {
            dim: chart.dim(),
            charts: [("c0".to_string(), chart)].into_iter().collect(),
            history: StackyBlowUpSequence::default(),
        }
    }

    pub fn charts(&self) -> &BTreeMap<String, Chart> {
        &self.charts
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rejects atlases beyond the configured caps.
    pub fn check_caps(&self, caps: &Caps) -> Result<()> {
        if self.dim > caps.max_dim {
            return Err(Error::Resource(format!(
                "dimension {} exceeds the cap {}",
                self.dim, caps.max_dim
            )));
        }
        let cap = BigInt::from(caps.max_group_order);
        if let Some((id, c)) = self.charts.iter().find(|(_, c)| c.group().order() > &cap) {
            return Err(Error::Resource(format!(
                "chart {id} has group order {} above the cap {}",
                c.group().order(),
                caps.max_group_order
            )));
        }
        Ok(())
    }

    /// Applies a step and records it in the history.
    pub fn apply(&mut self, step: StackyBlowUpStep) -> Result<()> {
        let (charts, provenance) = apply_step(&self.charts, &step)?;
        self.charts = charts;
        self.history.push(step, provenance);
        Ok(())
    }

    pub fn is_divisorial(&self) -> Result<bool> {
        for chart in self.charts.values() {
            if !chart.is_divisorial()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Applies `f` to every chart, keeping ids and history.
    pub fn map_charts(&self, f: impl Fn(&Chart) -> Result<Chart>) -> Result<Atlas> {
        let charts = self
            .charts
            .iter()
            .map(|(id, c)| Ok((id.clone(), f(c)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let mut out = Atlas::new(charts)?;
        out.history = self.history.clone();
        Ok(out)
    }

    fn fresh_exceptional_name(&self) -> String {
        let taken: BTreeSet<&str> = self
            .charts
            .values()
            .flat_map(|c| c.divisors().keys().map(|l| l.name.as_str()))
            .collect();
        (self.history.len() + 1..)
            .map(|k| format!("E{k}"))
            .find(|name| !taken.contains(name.as_str()))
            .expect("unbounded name supply")
    }
}

/// Result of [`divisorialification`].
#[derive(Debug, Clone)]
pub struct DivisorialificationRun {
    pub atlas: Atlas,
    /// The blow-ups performed, one per round.
    pub sequence: StackyBlowUpSequence,
    /// Global maximal divisorial index before each round, followed by the final value 0.
    pub round_maxima: Vec<usize>,
}

impl DivisorialificationRun {
    pub fn rounds(&self) -> usize {
        self.sequence.len()
    }
}

/// Repeatedly blows up the maximal divisorial-index locus until every chart
/// is divisorial. Charts below the current global maximum get empty centers.
pub fn divisorialification(atlas: &Atlas) -> Result<DivisorialificationRun> {
    let mut current = atlas.clone();
    let mut sequence = StackyBlowUpSequence::default();
    let mut round_maxima = Vec::new();
    loop {
        let loci = current
            .charts
            .iter()
            .map(|(id, c)| Ok((id.clone(), c.max_divisorial_locus()?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        let global_max = loci.values().map(|(m, _)| *m).max().unwrap_or(0);
        if let Some(&previous) = round_maxima.last() {
            if global_max >= previous {
                return Err(Error::invariant(format!(
                    "maximal divisorial index did not drop ({previous} -> {global_max})"
                )));
            }
        }
        round_maxima.push(global_max);
        if global_max == 0 {
            break;
        }
        if sequence.len() >= atlas.dim() {
            return Err(Error::invariant("more rounds than the dimension"));
        }
        let centers = loci
            .into_iter()
            .map(|(id, (m, locus))| (id, if m == global_max { locus } else { BTreeSet::new() }))
            .collect();
        let step = StackyBlowUpStep::Blowup {
            exceptional: current.fresh_exceptional_name(),
            centers,
        };
        current.apply(step.clone())?;
        let provenance = current.history.provenance.last().cloned().unwrap_or_default();
        sequence.push(step, provenance);
    }
    for (id, chart) in &current.charts {
        if !chart.is_divisorial()? {
            return Err(Error::invariant(format!("chart {id} is not divisorial at the end")));
        }
    }
    Ok(DivisorialificationRun {
        atlas: current,
        sequence,
        round_maxima,
    })
}

/// A smooth morphism to compare the algorithm against.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Twist {
    /// Product with affine space: extra coordinates with trivial character.
    AddTrivialCoordinate(usize),
    /// Gerbe: `M` replaced by `M + M0`, characters extended by zero.
    AddGerbeFactor(FinAbGroup),
}

impl Twist {
    pub fn apply(&self, atlas: &Atlas) -> Result<Atlas> {
        match self {
            Twist::AddTrivialCoordinate(k) => atlas.map_charts(|c| Ok(c.with_trivial_coordinates(*k))),
            Twist::AddGerbeFactor(extra) => atlas.map_charts(|c| c.with_gerbe_factor(extra)),
        }
    }
}

/// Runs the algorithm on `atlas` and on its twist and checks that the
/// normalized sequences have the same centers, step by step.
pub fn functoriality_check(atlas: &Atlas, twist: &Twist) -> Result<bool> {
    let original = divisorialification(atlas)?.sequence.normalize();
    let twisted = divisorialification(&twist.apply(atlas)?)?.sequence.normalize();
    if original.len() != twisted.len() {
        return Ok(false);
    }
    Ok(original.steps.iter().zip(&twisted.steps).all(|(a, b)| match (a, b) {
        (
            StackyBlowUpStep::Blowup { centers: ca, .. },
            StackyBlowUpStep::Blowup { centers: cb, .. },
        ) => ca == cb,
        (a, b) => a == b,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    fn centers_of(step: &StackyBlowUpStep) -> BTreeMap<String, BTreeSet<usize>> {
        match step {
            StackyBlowUpStep::Blowup { centers, .. } => centers.clone(),
            _ => panic!("expected a blow-up"),
        }
    }

    #[test]
    fn a1_one_round() {
        let atlas = Atlas::single(Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap());
        let run = divisorialification(&atlas).unwrap();
        assert_eq!(run.rounds(), 1);
        assert_eq!(run.round_maxima, vec![2, 0]);
        assert_eq!(centers_of(&run.sequence.steps[0])["c0"], set(&[0, 1]));
        assert_eq!(run.atlas.charts().len(), 2);
        for (id, chart) in run.atlas.charts() {
            assert!(chart.is_divisorial().unwrap(), "{id}");
            assert_eq!(chart.divisors().len(), 1);
        }
        let g = FinAbGroup::cyclic(2).unwrap();
        let one = g.element_i64(&[1]).unwrap();
        assert_eq!(run.atlas.charts()["c0/0"].characters(), &[one.clone(), g.zero()]);
        assert_eq!(run.atlas.charts()["c0/1"].characters(), &[g.zero(), one]);
    }

    #[test]
    fn a2_one_round() {
        let atlas = Atlas::single(Chart::from_small(&[3], &[&[1], &[2]], &[]).unwrap());
        let run = divisorialification(&atlas).unwrap();
        assert_eq!(run.rounds(), 1);
        assert!(run.atlas.is_divisorial().unwrap());
    }

    #[test]
    fn divisorial_input_is_untouched() {
        let atlas = Atlas::single(Chart::from_small(&[], &[&[], &[]], &[]).unwrap());
        let run = divisorialification(&atlas).unwrap();
        assert!(run.sequence.is_empty());
        assert_eq!(run.atlas.charts(), atlas.charts());
    }

    #[test]
    fn lower_charts_get_empty_centers() {
        let charts = [
            ("a".to_string(), Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap()),
            ("b".to_string(), Chart::from_small(&[2], &[&[1], &[0]], &[]).unwrap()),
        ]
        .into_iter()
        .collect();
        let run = divisorialification(&Atlas::new(charts).unwrap()).unwrap();
        assert_eq!(run.round_maxima, vec![2, 1, 0]);
        let first = centers_of(&run.sequence.steps[0]);
        assert_eq!(first["a"], set(&[0, 1]));
        assert!(first["b"].is_empty());
        let second = centers_of(&run.sequence.steps[1]);
        assert_eq!(second["b"], set(&[0]));
        assert_eq!(second["a/0"], set(&[]));
    }

    #[test]
    fn exceptional_names_avoid_clashes() {
        let c = Chart::from_small(&[2], &[&[1], &[1], &[0]], &[("E1", 2)]).unwrap();
        let run = divisorialification(&Atlas::single(c)).unwrap();
        match &run.sequence.steps[0] {
            StackyBlowUpStep::Blowup { exceptional, .. } => assert_eq!(exceptional, "E2"),
            _ => unreachable!(),
        }
    }

    #[test]
    fn functoriality_examples() {
        let atlas = Atlas::single(Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap());
        assert!(functoriality_check(&atlas, &Twist::AddTrivialCoordinate(1)).unwrap());
        assert!(functoriality_check(&atlas, &Twist::AddGerbeFactor(FinAbGroup::cyclic(5).unwrap())).unwrap());
        let div = Atlas::single(Chart::from_small(&[2], &[&[1], &[0]], &[("D", 0)]).unwrap());
        assert!(functoriality_check(&div, &Twist::AddTrivialCoordinate(2)).unwrap());
        assert!(functoriality_check(&div, &Twist::AddGerbeFactor(FinAbGroup::from_u64s(&[2, 4]).unwrap())).unwrap());
    }

    #[test]
    fn mismatched_dimensions_rejected() {
        let charts = [
            ("a".to_string(), Chart::from_small(&[2], &[&[1]], &[]).unwrap()),
            ("b".to_string(), Chart::from_small(&[2], &[&[1], &[0]], &[]).unwrap()),
        ]
        .into_iter()
        .collect();
        assert!(Atlas::new(charts).is_err());
        assert!(Atlas::new(BTreeMap::new()).is_err());
    }

    #[test]
    fn caps_are_enforced() {
        let atlas = Atlas::single(Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap());
        let caps = Caps { max_dim: 1, ..Caps::default() };
        assert!(matches!(atlas.check_caps(&caps), Err(Error::Resource(_))));
        let caps = Caps { max_group_order: 1, ..Caps::default() };
        assert!(matches!(atlas.check_caps(&caps), Err(Error::Resource(_))));
        assert!(atlas.check_caps(&Caps::default()).is_ok());
    }
}
