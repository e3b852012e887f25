//! JSON renderings of results. Every top-level object carries `schema`
//! and `kind`; exact values are strings next to float approximations.

use serde_json::{json, Map, Value};

use super::{
    ChainImplication, GenealogyDag, Implication, InterferenceEvent, QueryResult, RecordChange, SuiteReport,
};
use crate::experiment::{Distribution, Entry, SampleReport, Schedule, SCHEMA_VERSION};
use crate::hilbert::StateVector;
use crate::numerics::{Amplitude, Scalar};

pub fn scalar<S: Scalar>(x: &S) -> Value {
    json!({ "exact": x.to_string(), "approx": x.to_f64() })
}

pub fn amplitude<S: Scalar>(a: &Amplitude<S>) -> Value {
    json!({ "exact": a.to_string(), "re": a.re.to_f64(), "im": a.im.to_f64() })
}

fn envelope(kind: &str, mut body: Map<String, Value>) -> Value {
    body.insert("schema".into(), json!(SCHEMA_VERSION));
    body.insert("kind".into(), json!(kind));
    Value::Object(body)
}

fn object(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!("built from json! objects"),
    }
}

fn entry(e: &Entry) -> Value {
    json!({ "time": e.time, "step": e.step, "outcome": e.outcome, "pointer": e.pointer })
}

pub fn state<S: Scalar>(scenario: &str, at: &str, s: &StateVector<S>) -> Value {
    let layout = s.layout();
    let all: Vec<usize> = (0..layout.len()).collect();
    let entries: Vec<Value> = s
        .entries()
        .map(|(k, a)| json!({ "labels": layout.labels_of(&all, k), "amplitude": amplitude(a) }))
        .collect();
    let names: Vec<&str> = layout.subsystems().iter().map(|x| x.name()).collect();
    envelope(
        "state",
        object(json!({
            "scenario": scenario,
            "at": at,
            "subsystems": names,
            "entries": entries,
            "norm_sq": scalar(&s.norm_sq()),
        })),
    )
}

pub fn distribution<S: Scalar>(scenario: &str, policy: &str, d: &Distribution<S>) -> Value {
    let records: Vec<Value> = d
        .iter()
        .map(|(r, w)| {
            json!({
                "label": r.to_string(),
                "entries": r.entries().iter().map(entry).collect::<Vec<_>>(),
                "weight": scalar(w),
            })
        })
        .collect();
    envelope(
        "distribution",
        object(json!({
            "scenario": scenario,
            "policy": policy,
            "records": records,
            "total": scalar(&d.total()),
        })),
    )
}

pub fn genealogy<S: Scalar>(scenario: &str, dag: &GenealogyDag<S>, events: &[(usize, Vec<InterferenceEvent<S>>)]) -> Value {
    let layout = dag.layout();
    let all: Vec<usize> = (0..layout.len()).collect();
    let layers: Vec<Value> = (0..dag.layer_count())
        .map(|l| json!({ "layer": l, "time": dag.schedule().layer_name(l), "step": dag.step_name(l) }))
        .collect();
    let nodes: Vec<Value> = dag
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, n)| {
            json!({
                "id": i,
                "layer": n.layer,
                "world": n.world.entries().iter().map(entry).collect::<Vec<_>>(),
                "labels": layout.labels_of(&all, &n.key),
                "amplitude": amplitude(&n.amplitude),
            })
        })
        .collect();
    let edges: Vec<Value> = dag
        .edges()
        .iter()
        .map(|e| json!({ "parent": e.parent, "child": e.child, "contribution": amplitude(&e.contribution) }))
        .collect();
    let interference: Vec<Value> = events
        .iter()
        .flat_map(|(l, evs)| {
            evs.iter().map(move |ev| {
                json!({
                    "layer": l,
                    "child": ev.child,
                    "class": ev.class.as_str(),
                    "net": amplitude(&ev.net),
                    "contributions": ev.contributions.iter()
                        .map(|(p, c)| json!({ "parent": p, "contribution": amplitude(c) }))
                        .collect::<Vec<_>>(),
                })
            })
        })
        .collect();
    envelope(
        "genealogy",
        object(json!({
            "scenario": scenario,
            "layers": layers,
            "nodes": nodes,
            "edges": edges,
            "interference": interference,
        })),
    )
}

fn implication_body<S: Scalar>(a: &Implication<S>, c: &ChainImplication<S>) -> Map<String, Value> {
    let witness = a.witness.as_ref().map(|w| {
        json!({
            "variable": a.consequent.variable,
            "value": w.value,
            "weight": scalar(&w.exclusive),
            "shared_weight": scalar(&w.shared),
        })
    });
    let values: Vec<Value> = a
        .values
        .iter()
        .map(|v| json!({ "value": v.value, "exclusive": scalar(&v.exclusive), "shared": scalar(&v.shared) }))
        .collect();
    let chain_witness = c
        .witness
        .as_ref()
        .map(|(y, w)| json!({ "variable": c.consequent.variable, "value": y, "weight": scalar(w) }));
    let chain_weights: Vec<Value> = c
        .weights
        .iter()
        .map(|(y, w)| json!({ "value": y, "weight": scalar(w) }))
        .collect();
    object(json!({
        "antecedent": { "variable": a.antecedent.variable, "outcome": a.antecedent.outcome, "layer": a.antecedent.layer },
        "consequent": { "variable": a.consequent.variable, "outcome": a.consequent.outcome, "layer": a.consequent.layer },
        "verdict": a.verdict.to_string(),
        "antecedent_weight": scalar(&a.antecedent_weight),
        "witness": witness,
        "values": values,
        "chain_reading": {
            "verdict": c.verdict.to_string(),
            "antecedent_weight": scalar(&c.antecedent_weight),
            "witness": chain_witness,
            "weights": chain_weights,
        },
    }))
}

pub fn implication<S: Scalar>(scenario: &str, a: &Implication<S>, c: &ChainImplication<S>) -> Value {
    let mut body = implication_body(a, c);
    body.insert("scenario".into(), json!(scenario));
    envelope("implication", body)
}

/// Fixed keys: `variant`, `i`, `ii`, `iii`, `iv`, `p_ok_ok`, plus the
/// joint readout table and any divergences.
pub fn suite<S: Scalar>(r: &SuiteReport<S>) -> Value {
    let mut body = Map::new();
    body.insert("variant".into(), json!(r.scenario));
    body.insert("policy".into(), json!(r.policy));
    for id in ["i", "ii", "iii", "iv"] {
        body.insert(id.into(), Value::Null);
    }
    for row in &r.rows {
        let mut v = match &row.result {
            QueryResult::Implication { ancestry, chain } => implication_body(ancestry, chain),
            QueryResult::Probability { weight } => object(json!({ "weight": scalar(weight) })),
        };
        v.insert("statement".into(), json!(row.statement));
        v.insert("computed".into(), json!(row.computed().to_string()));
        v.insert("expected".into(), json!(row.expected.map(|e| e.to_string())));
        v.insert("matches".into(), json!(row.matches()));
        body.insert(row.id.clone(), Value::Object(v));
    }
    body.insert("p_ok_ok".into(), r.p_stop.as_ref().map_or(Value::Null, scalar));
    let joint: Vec<Value> = r
        .joint
        .iter()
        .map(|(k, w)| json!({ "labels": k, "weight": scalar(w) }))
        .collect();
    body.insert("joint".into(), json!(joint));
    body.insert("divergences".into(), json!(r.divergences));
    body.insert("readings_differ".into(), json!(r.readings_differ));
    envelope("suite", body)
}

pub fn record_changes<S: Scalar>(scenario: &str, schedule: &Schedule, changes: &[RecordChange<S>], policy: &str) -> Value {
    let items: Vec<Value> = changes
        .iter()
        .map(|c| {
            json!({
                "subsystem": c.subsystem,
                "from": schedule.layer_name(c.written),
                "to": schedule.layer_name(c.later),
                "changed": c.changed(),
                "off_diagonal": scalar(&c.off_diagonal),
                "table": c.table.iter()
                    .map(|(a, b, w)| json!({ "from": a, "to": b, "weight": scalar(w) }))
                    .collect::<Vec<_>>(),
            })
        })
        .collect();
    envelope(
        "records",
        object(json!({ "scenario": scenario, "policy": policy, "changes": items })),
    )
}

pub fn sample(scenario: &str, policy: &str, r: &SampleReport) -> Value {
    let counts: Vec<Value> = r
        .counts
        .iter()
        .map(|(rec, c)| json!({ "label": rec.to_string(), "count": c, "frequency": *c as f64 / r.n as f64 }))
        .collect();
    envelope(
        "sample",
        object(json!({
            "scenario": scenario,
            "policy": policy,
            "seed": r.seed,
            "n": r.n,
            "workers": r.workers,
            "rng": r.rng,
            "counts": counts,
            "first_success": r.first_success,
        })),
    )
}
