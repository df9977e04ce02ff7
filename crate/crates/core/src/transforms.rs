//! Blow-ups in coordinate centers, root stacks along divisors, rigidification,
//! and stacky blow-up sequences.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::chart::{Chart, DivisorLabel, OrbitType};
use crate::error::{Error, Result};
use crate::zlinalg::{cokernel, GroupElement, IntMatrix};

/// One step of a stacky blow-up sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum StackyBlowUpStep {
    /// Blow up chart `id` in `V(x_i : i in centers[id])`. An empty set means
    /// the center misses that chart. `exceptional` names the new divisor.
    Blowup {
        exceptional: String,
        centers: BTreeMap<String, BTreeSet<usize>>,
    },
    /// Take the `order`-th root of the divisor `label` in every chart containing it.
    Root { label: String, order: u64 },
}

impl StackyBlowUpStep {
    /// True for a blow-up whose center is empty in every chart.
    pub fn has_empty_center(&self) -> bool {
        match self {
            StackyBlowUpStep::Blowup { centers, .. } => centers.values().all(BTreeSet::is_empty),
            StackyBlowUpStep::Root { .. } => false,
        }
    }
}

/// Where the charts produced by one step came from: child id -> (parent id, pivot).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepProvenance {
    pub children: BTreeMap<String, (String, Option<usize>)>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StackyBlowUpSequence {
    pub steps: Vec<StackyBlowUpStep>,
    pub provenance: Vec<StepProvenance>,
}

impl StackyBlowUpSequence {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, step: StackyBlowUpStep, provenance: StepProvenance) {
        self.steps.push(step);
        self.provenance.push(provenance);
    }

    /// Drops blow-ups with empty centers, keeping the order of everything else.
    pub fn normalize(&self) -> StackyBlowUpSequence {
        let mut out = StackyBlowUpSequence::default();
        for (i, step) in self.steps.iter().enumerate() {
            if !step.has_empty_center() {
                out.push(step.clone(), self.provenance.get(i).cloned().unwrap_or_default());
            }
        }
        out
    }
}

/// Blows up `chart` along the coordinate subspace `V(x_j : j in center)`.
///
/// Returns one chart per pivot `p` in the center, in ascending pivot order.
/// In the pivot-`p` chart, `chi_j` becomes `chi_j - chi_p` for the other
/// center coordinates, the exceptional divisor sits on `x_p`, and an old
/// divisor on `x_p` is dropped (its strict transform misses this chart).
pub fn blow_up(chart: &Chart, center: &BTreeSet<usize>, exceptional: &DivisorLabel) -> Result<Vec<(usize, Chart)>> {
    if center.is_empty() {
        return Err(Error::input("blow-up center must be nonempty"));
    }
    if let Some(&j) = center.iter().find(|&&j| j >= chart.dim()) {
        return Err(Error::input(format!(
            "center coordinate {j} out of range for a chart of dimension {}",
            chart.dim()
        )));
    }
    if chart.divisors().keys().any(|l| l >= exceptional) {
        return Err(Error::input(format!(
            "exceptional label {exceptional:?} must sort after every existing divisor"
        )));
    }
    if chart.divisor_by_name(&exceptional.name).is_some() {
        return Err(Error::input(format!("divisor name {} already in use", exceptional.name)));
    }
    let group = chart.group();
    Ok(center
        .iter()
        .map(|&p| {
            let pivot = chart.character(p);
            let characters: Vec<GroupElement> = (0..chart.dim())
                .map(|j| {
                    if j != p && center.contains(&j) {
                        group.sub(chart.character(j), pivot)
                    } else {
                        chart.character(j).clone()
                    }
                })
                .collect();
            let mut divisors: BTreeMap<DivisorLabel, usize> = chart
                .divisors()
                .iter()
                .filter(|(_, &c)| c != p)
                .map(|(l, &c)| (l.clone(), c))
                .collect();
            divisors.insert(exceptional.clone(), p);
            (p, Chart::from_parts(group.clone(), characters, divisors))
        })
        .collect())
}

/// Adjoins an `r`-th root of the divisor named `label`.
///
/// The new group is `(M + Z) / <(chi_i, -r)>` where `x_i` carries the divisor;
/// the class `e` of `(0, 1)` becomes the character of `x_i`, so `r e = chi_i`.
pub fn root_stack(chart: &Chart, label: &str, r: u64) -> Result<Chart> {
    if r < 2 {
        return Err(Error::input(format!("root order must be at least 2, got {r}")));
    }
    let (_, coord) = chart
        .divisor_by_name(label)
        .ok_or_else(|| Error::input(format!("no divisor named {label}")))?;
    let group = chart.group();
    let k = group.rank();
    let mut relations = IntMatrix::zeros(k + 1, k + 1);
    for (j, d) in group.invariant_factors().iter().enumerate() {
        relations.set(j, j, d.clone());
    }
    for (j, c) in chart.character(coord).coeffs().iter().enumerate() {
        relations.set(j, k, c.clone());
    }
    relations.set(k, k, BigInt::from(-(r as i64)));
    let presentation = cokernel(&relations)?;
    let characters = (0..chart.dim())
        .map(|j| {
            let mut v = vec![BigInt::from(0); k + 1];
            if j == coord {
                v[k] = BigInt::from(1);
            } else {
                v[..k].clone_from_slice(chart.character(j).coeffs());
            }
            presentation.project(&v)
        })
        .collect();
    let out = Chart::from_parts(presentation.group, characters, chart.divisors().clone());
    if out.group().order() != &(group.order() * BigInt::from(r)) {
        return Err(Error::invariant("root stack did not multiply the group order by r"));
    }
    Ok(out)
}

/// Replaces `M` by the subgroup generated by the divisor characters, which on
/// a divisorial chart contains every character.
pub fn rigidify(chart: &Chart) -> Result<Chart> {
    if !chart.is_divisorial()? {
        return Err(Error::Precondition("rigidification needs a divisorial chart".into()));
    }
    let divisor_chars: Vec<GroupElement> = chart
        .divisor_coords()
        .into_iter()
        .map(|j| chart.character(j).clone())
        .collect();
    let sub = chart.group().subgroup(&divisor_chars)?;
    if sub.group.order() == chart.group().order() {
        // Already generated by divisor characters; keep the presentation.
        return Ok(chart.clone());
    }
    let characters = chart
        .characters()
        .iter()
        .map(|chi| {
            sub.coords_of(chi)
                .ok_or_else(|| Error::invariant("character outside the divisor span on a divisorial chart"))
        })
        .collect::<Result<Vec<_>>>()?;
    let out = Chart::from_parts(sub.group, characters, chart.divisors().clone());

    let new_divisor_chars: Vec<GroupElement> = out
        .divisor_coords()
        .into_iter()
        .map(|j| out.character(j).clone())
        .collect();
    let group = out.group();
    for i in 0..group.rank() {
        if !group.in_subgroup(&group.basis(i), &new_divisor_chars)? {
            return Err(Error::invariant("divisor characters do not generate the rigidified group"));
        }
    }
    if !out.is_divisorial()? {
        return Err(Error::invariant("rigidified chart is not divisorial"));
    }
    if !out.stabilizer_dual(&OrbitType::new(out.divisor_coords()))?.is_trivial() {
        return Err(Error::invariant("nontrivial stabilizer off the divisor after rigidification"));
    }
    Ok(out)
}

/// Applies one step to every chart of a chart map.
///
/// Blown-up charts are replaced by children with ids `parent/pivot`; for a
/// blow-up the exceptional label gets an order key past every key in use.
pub fn apply_step(
    charts: &BTreeMap<String, Chart>,
    step: &StackyBlowUpStep,
) -> Result<(BTreeMap<String, Chart>, StepProvenance)> {
    let mut out = BTreeMap::new();
    let mut provenance = StepProvenance::default();
    match step {
        StackyBlowUpStep::Blowup { exceptional, centers } => {
            if let Some(id) = centers.keys().find(|id| !charts.contains_key(*id)) {
                return Err(Error::input(format!("blow-up names unknown chart {id}")));
            }
            let next_key = charts.values().filter_map(Chart::max_order_key).max().map_or(0, |k| k + 1);
            let label = DivisorLabel::new(exceptional.clone(), vec![next_key]);
            for (id, chart) in charts {
                match centers.get(id).filter(|c| !c.is_empty()) {
                    Some(center) => {
                        for (p, child) in blow_up(chart, center, &label)? {
                            let child_id = format!("{id}/{p}");
                            provenance.children.insert(child_id.clone(), (id.clone(), Some(p)));
                            out.insert(child_id, child);
                        }
                    }
                    None => {
                        provenance.children.insert(id.clone(), (id.clone(), None));
                        out.insert(id.clone(), chart.clone());
                    }
                }
            }
        }
        StackyBlowUpStep::Root { label, order } => {
            if *order < 2 {
                return Err(Error::input(format!("root order must be at least 2, got {order}")));
            }
            if charts.values().all(|c| c.divisor_by_name(label).is_none()) {
                return Err(Error::input(format!("no chart has a divisor labelled {label}")));
            }
            for (id, chart) in charts {
                let next = if chart.divisor_by_name(label).is_some() {
                    root_stack(chart, label, *order)?
                } else {
                    chart.clone()
                };
                provenance.children.insert(id.clone(), (id.clone(), None));
                out.insert(id.clone(), next);
            }
        }
    }
    Ok((out, provenance))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zlinalg::FinAbGroup;

    fn set(xs: &[usize]) -> BTreeSet<usize> {
        xs.iter().copied().collect()
    }

    fn exc() -> DivisorLabel {
        DivisorLabel::new("E1", vec![100])
    }

    #[test]
    fn blow_up_a1() {
        let c = Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap();
        let out = blow_up(&c, &set(&[0, 1]), &exc()).unwrap();
        assert_eq!(out.len(), 2);
        let expected_chars = [
            vec![FinAbGroup::cyclic(2).unwrap().element_i64(&[1]).unwrap(), FinAbGroup::cyclic(2).unwrap().zero()],
            vec![FinAbGroup::cyclic(2).unwrap().zero(), FinAbGroup::cyclic(2).unwrap().element_i64(&[1]).unwrap()],
        ];
        for (k, (p, chart)) in out.iter().enumerate() {
            assert_eq!(*p, k);
            assert_eq!(chart.characters(), expected_chars[k].as_slice());
            assert_eq!(chart.divisor_coords(), set(&[k]));
            assert_eq!(chart.group(), c.group());
        }
    }

    #[test]
    fn blow_up_a2() {
        let c = Chart::from_small(&[3], &[&[1], &[2]], &[]).unwrap();
        let out = blow_up(&c, &set(&[0, 1]), &exc()).unwrap();
        let g = c.group();
        assert_eq!(out[0].1.characters(), &[g.element_i64(&[1]).unwrap(), g.element_i64(&[1]).unwrap()]);
        assert_eq!(out[1].1.characters(), &[g.element_i64(&[2]).unwrap(), g.element_i64(&[2]).unwrap()]);
        assert_eq!(out[1].1.divisor_coords(), set(&[1]));
    }

    #[test]
    fn blow_up_trivial_group() {
        let c = Chart::from_small(&[], &[&[], &[]], &[]).unwrap();
        let out = blow_up(&c, &set(&[0, 1]), &exc()).unwrap();
        assert_eq!(out.len(), 2);
        for (p, chart) in out {
            assert!(chart.group().is_trivial());
            assert_eq!(chart.divisors().len(), 1);
            assert_eq!(chart.divisor_at(p).unwrap().name, "E1");
        }
    }

    #[test]
    fn blow_up_divisor_bookkeeping() {
        // Divisors on x0 (inside the center) and x2 (outside).
        let c = Chart::from_small(&[4], &[&[1], &[2], &[3]], &[("A", 0), ("B", 2)]).unwrap();
        let out = blow_up(&c, &set(&[0, 1]), &exc()).unwrap();
        let names = |ch: &Chart| ch.divisors().iter().map(|(l, &c)| (l.name.clone(), c)).collect::<Vec<_>>();
        assert_eq!(names(&out[0].1), vec![("B".to_string(), 2), ("E1".to_string(), 0)]);
        assert_eq!(names(&out[1].1), vec![("A".to_string(), 0), ("B".to_string(), 2), ("E1".to_string(), 1)]);
        // Single divisor coordinate: an isomorphism that relabels the divisor.
        let single = blow_up(&c, &set(&[0]), &exc()).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].1.characters(), c.characters());
        assert_eq!(names(&single[0].1), vec![("B".to_string(), 2), ("E1".to_string(), 0)]);
    }

    #[test]
    fn blow_up_rejects_bad_input() {
        let c = Chart::from_small(&[2], &[&[1], &[1]], &[("D", 0)]).unwrap();
        assert!(blow_up(&c, &set(&[]), &exc()).is_err());
        assert!(blow_up(&c, &set(&[2]), &exc()).is_err());
        assert!(blow_up(&c, &set(&[0]), &DivisorLabel::new("E", vec![-1])).is_err());
        assert!(blow_up(&c, &set(&[0]), &DivisorLabel::new("D", vec![9])).is_err());
    }

    #[test]
    fn root_examples() {
        let c = Chart::from_small(&[], &[&[]], &[("D", 0)]).unwrap();
        let r = root_stack(&c, "D", 3).unwrap();
        assert_eq!(r.group(), &FinAbGroup::cyclic(3).unwrap());
        assert_eq!(r.group().order_of(r.character(0)), BigInt::from(3));

        let c = Chart::from_small(&[2], &[&[1]], &[("D", 0)]).unwrap();
        let r = root_stack(&c, "D", 2).unwrap();
        assert_eq!(r.group(), &FinAbGroup::cyclic(4).unwrap());
        assert_eq!(r.group().order_of(r.character(0)), BigInt::from(4));

        assert!(root_stack(&c, "D", 1).is_err());
        assert!(root_stack(&c, "X", 2).is_err());
    }

    #[test]
    fn rigidify_examples() {
        let c = Chart::from_small(&[4], &[&[2], &[0]], &[("D", 0)]).unwrap();
        let r = rigidify(&c).unwrap();
        assert_eq!(r.group(), &FinAbGroup::cyclic(2).unwrap());
        assert_eq!(r.characters(), &[r.group().element_i64(&[1]).unwrap(), r.group().zero()]);

        let gen = Chart::from_small(&[6], &[&[1], &[3]], &[("D", 0)]).unwrap();
        assert_eq!(rigidify(&gen).unwrap(), gen);
        assert_eq!(rigidify(&rigidify(&c).unwrap()).unwrap(), rigidify(&c).unwrap());

        let gerbe = Chart::from_small(&[2], &[&[0], &[0]], &[]).unwrap();
        let r = rigidify(&gerbe).unwrap();
        assert!(r.group().is_trivial());

        let bad = Chart::from_small(&[2], &[&[1], &[1]], &[]).unwrap();
        assert!(matches!(rigidify(&bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn normalization() {
        let empty = StackyBlowUpStep::Blowup {
            exceptional: "E1".into(),
            centers: [("c0".to_string(), set(&[]))].into_iter().collect(),
        };
        let root = StackyBlowUpStep::Root { label: "L".into(), order: 2 };
        let seq = StackyBlowUpSequence {
            steps: vec![empty.clone(), root.clone()],
            provenance: vec![StepProvenance::default(); 2],
        };
        assert_eq!(seq.normalize().steps, vec![root.clone()]);
        assert_eq!(seq.normalize().normalize(), seq.normalize());

        let b1 = StackyBlowUpStep::Blowup {
            exceptional: "E1".into(),
            centers: [("c1".to_string(), set(&[1]))].into_iter().collect(),
        };
        let b3 = StackyBlowUpStep::Blowup {
            exceptional: "E3".into(),
            centers: [("c2".to_string(), set(&[2]))].into_iter().collect(),
        };
        let seq = StackyBlowUpSequence {
            steps: vec![b1.clone(), empty, b3.clone()],
            provenance: vec![StepProvenance::default(); 3],
        };
        assert_eq!(seq.normalize().steps, vec![b1, b3]);
    }

    #[test]
    fn apply_step_ids_and_keys() {
        let c = Chart::from_small(&[2], &[&[1], &[1]], &[("D", 2)]);
        assert!(c.is_err());
        let c = Chart::from_small(&[2], &[&[1], &[1], &[0]], &[("D", 2)]).unwrap();
        let charts: BTreeMap<String, Chart> = [("c0".to_string(), c)].into_iter().collect();
        let step = StackyBlowUpStep::Blowup {
            exceptional: "E1".into(),
            centers: [("c0".to_string(), set(&[0, 1]))].into_iter().collect(),
        };
        let (out, prov) = apply_step(&charts, &step).unwrap();
        assert_eq!(out.keys().cloned().collect::<Vec<_>>(), vec!["c0/0", "c0/1"]);
        assert_eq!(prov.children["c0/1"], ("c0".to_string(), Some(1)));
        let label = out["c0/0"].divisor_at(0).unwrap();
        assert_eq!(label.order_key, vec![1]);
    }
}
