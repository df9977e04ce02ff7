use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::certificate::{Certificate, CertificateKind, ChartEvidence};
use super::{coarse_smoothness, divisorialification, Atlas};
use crate::caps::Caps;
use crate::chart::Chart;
use crate::error::{Error, Result};
use crate::transforms::{rigidify, StackyBlowUpSequence, StackyBlowUpStep};

/// A destackification engine for divisorial, rigidified atlases. It proposes
/// root stacks and blow-ups; the driver validates and applies them.
pub trait Destackifier {
    fn name(&self) -> &str;
    fn propose(&self, atlas: &Atlas) -> Result<Vec<StackyBlowUpStep>>;
}

/// Proposes nothing. The driver then only certifies the outcome.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityEngine;

impl Destackifier for IdentityEngine {
    fn name(&self) -> &str {
        "identity"
    }

    fn propose(&self, _atlas: &Atlas) -> Result<Vec<StackyBlowUpStep>> {
        Ok(Vec::new())
    }
}

#[derive(Debug, Clone)]
pub struct DriverOutcome {
    pub atlas: Atlas,
    pub sequence: StackyBlowUpSequence,
    /// A [`CertificateKind::CoarseSmooth`] certificate over the final atlas.
    pub certificate: Certificate,
}

/// Root orders along the divisors if `chart` is an iterated root stack over
/// its coarse space: off-divisor characters vanish and the divisor
/// characters split the group as a product of their cyclic spans.
fn root_form(chart: &Chart) -> Option<BTreeMap<String, u64>> {
    let divisor = chart.divisor_coords();
    if (0..chart.dim()).any(|i| !divisor.contains(&i) && !chart.character(i).is_zero()) {
        return None;
    }
    let mut product = num_bigint::BigInt::from(1);
    let mut orders = BTreeMap::new();
    for (label, &c) in chart.divisors() {
        let r = chart.group().order_of(chart.character(c));
        product *= &r;
        if r > num_bigint::BigInt::from(1) {
            orders.insert(label.name.clone(), r.to_u64()?);
        }
    }
    (&product == chart.group().order()).then_some(orders)
}

/// Divisorialifies, rigidifies, hands the atlas to `engine`, applies its steps
/// and certifies coarse smoothness of every resulting chart.
pub fn destackify_driver(atlas: &Atlas, engine: &dyn Destackifier, caps: &Caps) -> Result<DriverOutcome> {
    atlas.check_caps(caps)?;
    let run = divisorialification(atlas)?;
    let mut current = run.atlas.map_charts(rigidify)?;
    let mut sequence = run.sequence;
    for (k, step) in engine.propose(&current)?.into_iter().enumerate() {
        current.apply(step.clone()).map_err(|e| {
            Error::Input(format!("engine `{}` emitted an invalid step #{k}: {e}", engine.name()))
        })?;
        let provenance = current.history.provenance.last().cloned().unwrap_or_default();
        sequence.push(step, provenance);
    }

    let mut holds = true;
    let mut charts = BTreeMap::new();
    for (id, chart) in current.charts() {
        let report = coarse_smoothness(chart, caps)?;
        holds &= report.smooth;
        // Rigidification embeds the group, so the invariant monoid is unchanged.
        let rigid = if chart.is_divisorial()? { Some(rigidify(chart)?) } else { None };
        let root_orders = rigid.as_ref().filter(|_| report.smooth).and_then(root_form);
        let mut ev = match (&rigid, &root_orders) {
            (Some(r), Some(_)) => ChartEvidence::bare(r),
            _ => ChartEvidence::bare(chart),
        };
        ev.root_orders = root_orders;
        ev.hilbert_basis = Some(report.hilbert_basis);
        ev.coarse_smooth = Some(report.smooth);
        charts.insert(id.clone(), ev);
    }
    Ok(DriverOutcome {
        atlas: current,
        sequence,
        certificate: Certificate {
            kind: CertificateKind::CoarseSmooth,
            holds,
            charts,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::divisorialify::verify_certificate;

    struct BadEngine;

    impl Destackifier for BadEngine {
        fn name(&self) -> &str {
            "bad"
        }

        fn propose(&self, _atlas: &Atlas) -> Result<Vec<StackyBlowUpStep>> {
            Ok(vec![StackyBlowUpStep::Root { label: "D".into(), order: 1 }])
        }
    }

    struct RootEngine;

    impl Destackifier for RootEngine {
        fn name(&self) -> &str {
            "root"
        }

        fn propose(&self, _atlas: &Atlas) -> Result<Vec<StackyBlowUpStep>> {
            Ok(vec![StackyBlowUpStep::Root { label: "D".into(), order: 3 }])
        }
    }

    #[test]
    fn trivial_atlas_identity_run() {
        let atlas = Atlas::single(Chart::from_small(&[], &[&[], &[]], &[]).unwrap());
        let out = destackify_driver(&atlas, &IdentityEngine, &Caps::default()).unwrap();
        assert!(out.sequence.is_empty());
        assert!(out.certificate.holds);
        assert!(verify_certificate(&out.certificate));
    }

    #[test]
    fn a1_becomes_coarse_smooth() {
        let atlas = Atlas::single(Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap());
        let out = destackify_driver(&atlas, &IdentityEngine, &Caps::default()).unwrap();
        assert_eq!(out.sequence.len(), 1);
        assert!(out.certificate.holds);
        assert_eq!(out.certificate.charts.len(), 2);
        assert!(verify_certificate(&out.certificate));
    }

    #[test]
    fn root_line_records_order() {
        let atlas = Atlas::single(Chart::from_small(&[2], &[&[1]], &[("D", 0)]).unwrap());
        let out = destackify_driver(&atlas, &IdentityEngine, &Caps::default()).unwrap();
        let ev = &out.certificate.charts["c0"];
        assert_eq!(ev.hilbert_basis, Some(vec![vec![2]]));
        assert_eq!(ev.root_orders, Some([("D".to_string(), 2)].into_iter().collect()));
        assert!(verify_certificate(&out.certificate));
    }

    #[test]
    fn engine_steps_are_validated_and_applied() {
        let atlas = Atlas::single(Chart::from_small(&[], &[&[]], &[("D", 0)]).unwrap());
        let err = destackify_driver(&atlas, &BadEngine, &Caps::default()).unwrap_err();
        assert!(matches!(err, Error::Input(ref m) if m.contains("bad")));
        let out = destackify_driver(&atlas, &RootEngine, &Caps::default()).unwrap();
        assert_eq!(out.sequence.len(), 1);
        let ev = &out.certificate.charts["c0"];
        assert_eq!(ev.root_orders, Some([("D".to_string(), 3)].into_iter().collect()));
        assert!(verify_certificate(&out.certificate));
    }
}
