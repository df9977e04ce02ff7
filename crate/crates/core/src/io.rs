//! JSON interchange: charts, atlases, traces, certificates and Tor inputs.
//!
//! Output goes through [`serde_json::Value`], whose maps are ordered, so
//! every document is emitted with sorted keys and identical bytes for
//! identical inputs. Coordinates are 0-based throughout.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::chart::{Chart, DivisorLabel};
use crate::divisorialify::{Atlas, Certificate, CertificateKind, ChartEvidence};
use crate::error::{Error, Result};
use crate::ktheory::{FpMatrix, HModule, K0Certificate, K0Reason, TorPair};
use crate::transforms::{StackyBlowUpSequence, StackyBlowUpStep};
use crate::zlinalg::{FinAbGroup, GroupElement, IntMatrix};

#[derive(Debug, Clone, Deserialize)]
pub struct GroupDoc {
    pub invariant_factors: Vec<i64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CoordinateDoc {
    pub character: Vec<i64>,
    #[serde(default)]
    pub divisor: Option<String>,
    #[serde(default)]
    pub order_key: Option<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ChartDoc {
    pub group: GroupDoc,
    pub coordinates: Vec<CoordinateDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct AtlasDoc {
    pub charts: BTreeMap<String, ChartDoc>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct TorDoc {
    pub invariant_factors: Vec<i64>,
    pub action: Vec<Vec<i64>>,
    pub p: u64,
    pub h: u64,
}

/// Parses JSON text, reporting the line and column of syntax errors.
pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text)
        .map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::Input(format!("schema error: {e}")))
}

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn bigs(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(big).collect())
}

impl ChartDoc {
    /// Builds a chart, normalizing the group to invariant-factor form and
    /// carrying the characters along.
    pub fn to_chart(&self) -> Result<Chart> {
        let orders: Vec<BigInt> = self.group.invariant_factors.iter().map(|&d| BigInt::from(d)).collect();
        let presentation = FinAbGroup::from_cyclic_orders(&orders)?;
        let mut characters = Vec::with_capacity(self.coordinates.len());
        let mut divisors = BTreeMap::new();
        for (i, coord) in self.coordinates.iter().enumerate() {
            if coord.character.len() != orders.len() {
                return Err(Error::Input(format!(
                    "coordinate {i}: character has {} entries, the group has {} factors",
                    coord.character.len(),
                    orders.len()
                )));
            }
            let raw: Vec<BigInt> = coord.character.iter().map(|&c| BigInt::from(c)).collect();
            characters.push(presentation.project(&raw));
            if let Some(name) = &coord.divisor {
                let key = coord.order_key.clone().unwrap_or_else(|| vec![i as i64]);
                if key.is_empty() {
                    return Err(Error::Input(format!("coordinate {i}: order_key must be nonempty")));
                }
                divisors.insert(DivisorLabel::new(name.clone(), key), i);
            } else if coord.order_key.is_some() {
                return Err(Error::Input(format!("coordinate {i}: order_key without a divisor")));
            }
        }
        Chart::new(presentation.group, characters, divisors)
    }
}

pub fn parse_chart(text: &str) -> Result<Chart> {
    from_value::<ChartDoc>(parse_json(text)?)?.to_chart()
}

/// Accepts either `{"charts": {id: chart}}` or a single chart (id `c0`).
pub fn parse_atlas(text: &str) -> Result<Atlas> {
    let value = parse_json(text)?;
    if value.get("charts").is_some() {
        let doc: AtlasDoc = from_value(value)?;
        let charts = doc
            .charts
            .iter()
            .map(|(id, c)| {
                c.to_chart()
                    .map(|chart| (id.clone(), chart))
                    .map_err(|e| Error::Input(format!("chart {id}: {e}")))
            })
            .collect::<Result<BTreeMap<_, _>>>()?;
        Atlas::new(charts)
    } else {
        Ok(Atlas::single(from_value::<ChartDoc>(value)?.to_chart()?))
    }
}

pub fn group_json(g: &FinAbGroup) -> Value {
    json!({ "invariant_factors": bigs(g.invariant_factors()) })
}

pub fn element_json(x: &GroupElement) -> Value {
    bigs(x.coeffs())
}

pub fn chart_json(chart: &Chart) -> Value {
    let coordinates: Vec<Value> = (0..chart.dim())
        .map(|i| {
            let mut entry = json!({ "character": element_json(chart.character(i)) });
            if let Some(label) = chart.divisor_at(i) {
                entry["divisor"] = json!(label.name);
                entry["order_key"] = json!(label.order_key);
            }
            entry
        })
        .collect();
    json!({ "group": group_json(chart.group()), "coordinates": coordinates })
}

pub fn atlas_json(atlas: &Atlas) -> Value {
    let charts: serde_json::Map<String, Value> =
        atlas.charts().iter().map(|(id, c)| (id.clone(), chart_json(c))).collect();
    json!({ "dimension": atlas.dim(), "charts": charts })
}

pub fn step_json(step: &StackyBlowUpStep) -> Value {
    match step {
        StackyBlowUpStep::Blowup { exceptional, centers } => {
            let centers: serde_json::Map<String, Value> =
                centers.iter().map(|(id, c)| (id.clone(), json!(c))).collect();
            json!({ "kind": "blowup", "label": exceptional, "centers": centers })
        }
        StackyBlowUpStep::Root { label, order } => json!({ "kind": "root", "label": label, "order": order }),
    }
}

pub fn trace_json(seq: &StackyBlowUpSequence) -> Value {
    Value::Array(seq.steps.iter().map(step_json).collect())
}

/// Parses a trace array back into steps.
pub fn parse_trace(value: &Value) -> Result<Vec<StackyBlowUpStep>> {
    #[derive(Deserialize)]
    struct StepDoc {
        kind: String,
        #[serde(default)]
        label: String,
        #[serde(default)]
        centers: BTreeMap<String, Vec<usize>>,
        #[serde(default)]
        order: u64,
    }
    let docs: Vec<StepDoc> = from_value(value.clone())?;
    docs.into_iter()
        .map(|d| match d.kind.as_str() {
            "blowup" => Ok(StackyBlowUpStep::Blowup {
                exceptional: d.label,
                centers: d.centers.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect(),
            }),
            "root" => Ok(StackyBlowUpStep::Root { label: d.label, order: d.order }),
            other => Err(Error::Input(format!("unknown step kind `{other}`"))),
        })
        .collect()
}

fn kind_name(kind: CertificateKind) -> &'static str {
    match kind {
        CertificateKind::Divisorial => "divisorial",
        CertificateKind::Rigidified => "rigidified",
        CertificateKind::CoarseSmooth => "coarse_smooth",
        CertificateKind::StabilizerTrivialOffDivisor => "stabilizer_trivial_off_divisor",
    }
}

fn evidence_json(ev: &ChartEvidence) -> Value {
    let mut out = json!({
        "chart": chart_json(&ev.chart),
        "divisor_coordinates": ev.divisor_coords,
    });
    if !ev.combinations.is_empty() {
        out["combinations"] = Value::Array(
            ev.combinations
                .iter()
                .map(|(t, c)| json!({ "target": element_json(t), "coefficients": bigs(c) }))
                .collect(),
        );
    }
    if !ev.trivial_stabilizer_orbits.is_empty() {
        out["trivial_stabilizer_orbits"] = Value::Array(
            ev.trivial_stabilizer_orbits.iter().map(|o| json!(o.nonzero)).collect(),
        );
    }
    if let Some(b) = &ev.hilbert_basis {
        out["hilbert_basis"] = json!(b);
    }
    if let Some(s) = ev.coarse_smooth {
        out["coarse_smooth"] = json!(s);
    }
    if let Some(r) = &ev.root_orders {
        out["root_orders"] = json!(r);
    }
    out
}

pub fn certificate_json(cert: &Certificate) -> Value {
    let charts: serde_json::Map<String, Value> =
        cert.charts.iter().map(|(id, ev)| (id.clone(), evidence_json(ev))).collect();
    json!({ "kind": kind_name(cert.kind), "holds": cert.holds, "charts": charts })
}

impl TorDoc {
    pub fn to_module(&self) -> Result<HModule> {
        let group = FinAbGroup::new(self.invariant_factors.iter().map(|&d| BigInt::from(d)).collect())?;
        let k = group.rank();
        if self.action.len() != k || self.action.iter().any(|r| r.len() != k) {
            return Err(Error::Input(format!("action must be a {k}x{k} matrix")));
        }
        HModule::new(group, IntMatrix::from_rows(&self.action), self.h, self.p)
    }
}

pub fn parse_tor(text: &str) -> Result<HModule> {
    from_value::<TorDoc>(parse_json(text)?)?.to_module()
}

pub fn fp_matrix_json(m: &FpMatrix) -> Value {
    json!(m.to_rows())
}

pub fn tor_pair_json(t: &TorPair) -> Value {
    json!({ "t0": fp_matrix_json(&t.t0), "t1": fp_matrix_json(&t.t1), "coordinates": t.coordinates })
}

pub fn k0_certificate_json(cert: &K0Certificate) -> Value {
    let reason = match cert.reason {
        K0Reason::Vacuous => "p does not divide |A|",
        K0Reason::TameOrder => "p does not divide |H|",
        K0Reason::Filtration => "elementary divisor filtration",
    };
    let pieces: Vec<Value> = cert
        .pieces
        .iter()
        .map(|piece| {
            let action: Vec<Value> = piece.module.action().to_rows().iter().map(|r| bigs(r)).collect();
            json!({
                "invariant_factors": bigs(piece.module.group().invariant_factors()),
                "action": action,
                "tor": tor_pair_json(&piece.tor),
                "isomorphic": piece.isomorphic,
            })
        })
        .collect();
    json!({ "trivial": cert.trivial, "reason": reason, "pieces": pieces })
}

/// Pretty-printed JSON with a trailing newline.
pub fn render(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
