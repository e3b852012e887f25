//! The Frauchiger–Renner protocol and its variants.

use super::format::{
    AmplitudeSpec, DeviceSpec, EntrySpec, FollowupSpec, OutcomeSpec, PairSpec, ScenarioFile, StepKindSpec, StepSpec,
    SubsystemSpec,
};
use super::{CollapsePolicy, Expect, Mode, Query, Scenario, VarRef};
use crate::hilbert::Role;
use crate::numerics::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FrVariant {
    Standard,
    SwappedOrder,
    ExternalRecord,
    FullCollapse,
    CollapseAtFbar,
}

impl FrVariant {
    pub const ALL: [FrVariant; 5] = [
        FrVariant::Standard,
        FrVariant::SwappedOrder,
        FrVariant::ExternalRecord,
        FrVariant::FullCollapse,
        FrVariant::CollapseAtFbar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FrVariant::Standard => "fr_standard",
            FrVariant::SwappedOrder => "fr_swapped_order",
            FrVariant::ExternalRecord => "fr_external_record",
            FrVariant::FullCollapse => "fr_full_collapse",
            FrVariant::CollapseAtFbar => "fr_collapse_at_fbar",
        }
    }

    /// Accepts the file name with or without the `fr_` prefix.
    pub fn from_name(s: &str) -> Option<Self> {
        let s = s.strip_suffix(".json").unwrap_or(s);
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s || v.name().strip_prefix("fr_") == Some(s))
    }
}

fn amp(rational: &str, radicand: u64) -> AmplitudeSpec {
    AmplitudeSpec::term(rational, radicand)
}

fn unit(labels: &[&str]) -> Vec<EntrySpec> {
    vec![EntrySpec::new(amp("1", 1), labels)]
}

fn pair(input: Vec<EntrySpec>, output: Vec<EntrySpec>) -> PairSpec {
    PairSpec { input, output }
}

fn subsystem(name: &str, labels: &[&str], role: Role) -> SubsystemSpec {
    SubsystemSpec {
        name: name.to_string(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
        role,
    }
}

fn names(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn measure(name: &str, time: usize, variable: &str, targets: &[&str], outcomes: Vec<OutcomeSpec>, device: &str, ready: &str, pointers: &[(&str, &str)]) -> StepSpec {
    StepSpec {
        name: name.to_string(),
        time,
        kind: StepKindSpec::Measure {
            variable: variable.to_string(),
            targets: names(targets),
            outcomes,
            device: DeviceSpec {
                subsystem: device.to_string(),
                ready: ready.to_string(),
                pointers: pointers.iter().map(|(o, p)| (o.to_string(), p.to_string())).collect(),
            },
        },
        then: Vec::new(),
    }
}

fn outcome(label: &str, vector: Vec<EntrySpec>) -> OutcomeSpec {
    OutcomeSpec {
        label: label.to_string(),
        vector,
    }
}

fn implication(id: &str, antecedent: &str, consequent: &str, expect: Option<Expect>) -> Query {
    Query::Implication {
        id: id.to_string(),
        antecedent: antecedent.parse().expect("literal"),
        consequent: consequent.parse().expect("literal"),
        expect,
    }
}

/// The scenario document for a variant.
pub fn fr_scenario_file(variant: FrVariant) -> ScenarioFile {
    let external = variant == FrVariant::ExternalRecord;
    let mut layout = vec![
        subsystem("C", &["heads", "tails"], Role::System),
        subsystem("Lbar", &["BLANK", "HEADS", "TAILS"], Role::Record),
        subsystem("S", &["down", "up"], Role::System),
        subsystem("L", &["BLANK", "-1/2", "+1/2"], Role::Record),
        subsystem("Wbar", &["READY", "FAIL\u{0304}", "OK\u{0304}"], Role::Record),
        subsystem("W", &["READY", "FAIL", "OK"], Role::Record),
    ];
    let mut ready = vec!["heads", "BLANK", "down", "BLANK", "READY", "READY"];
    if external {
        layout.push(subsystem("E", &["blank", "heads", "tails"], Role::Environment));
        ready.push("blank");
    }

    let coin = StepSpec {
        name: "coin".into(),
        time: 0,
        kind: StepKindSpec::Isometry {
            targets: names(&["C"]),
            pairs: vec![pair(
                unit(&["heads"]),
                vec![
                    EntrySpec::new(amp("1/3", 3), &["heads"]),
                    EntrySpec::new(amp("1/3", 6), &["tails"]),
                ],
            )],
        },
        then: Vec::new(),
    };

    let mut fbar = measure(
        "fbar",
        1,
        "r",
        &["C"],
        vec![outcome("heads", unit(&["heads"])), outcome("tails", unit(&["tails"]))],
        "Lbar",
        "BLANK",
        &[("heads", "HEADS"), ("tails", "TAILS")],
    );
    fbar.then.push(FollowupSpec {
        name: "prepare".into(),
        targets: names(&["Lbar", "S"]),
        pairs: vec![
            pair(unit(&["HEADS", "down"]), unit(&["HEADS", "down"])),
            pair(
                unit(&["TAILS", "down"]),
                vec![
                    EntrySpec::new(amp("1/2", 2), &["TAILS", "down"]),
                    EntrySpec::new(amp("1/2", 2), &["TAILS", "up"]),
                ],
            ),
        ],
        environment: false,
    });
    if external {
        fbar.then.push(FollowupSpec {
            name: "copy".into(),
            targets: names(&["Lbar", "E"]),
            pairs: vec![
                pair(unit(&["HEADS", "blank"]), unit(&["HEADS", "heads"])),
                pair(unit(&["TAILS", "blank"]), unit(&["TAILS", "tails"])),
            ],
            environment: true,
        });
    }

    let f = measure(
        "f",
        2,
        "z",
        &["S"],
        vec![outcome("-1/2", unit(&["down"])), outcome("+1/2", unit(&["up"]))],
        "L",
        "BLANK",
        &[("-1/2", "-1/2"), ("+1/2", "+1/2")],
    );

    let wbar = measure(
        "wbar",
        3,
        "wbar",
        &["C", "Lbar"],
        vec![
            outcome(
                "okbar",
                vec![
                    EntrySpec::new(amp("1/2", 2), &["heads", "HEADS"]),
                    EntrySpec::new(amp("-1/2", 2), &["tails", "TAILS"]),
                ],
            ),
            outcome(
                "failbar",
                vec![
                    EntrySpec::new(amp("1/2", 2), &["heads", "HEADS"]),
                    EntrySpec::new(amp("1/2", 2), &["tails", "TAILS"]),
                ],
            ),
        ],
        "Wbar",
        "READY",
        &[("okbar", "OK\u{0304}"), ("failbar", "FAIL\u{0304}")],
    );

    let w = measure(
        "w",
        4,
        "w",
        &["S", "L"],
        vec![
            outcome(
                "ok",
                vec![
                    EntrySpec::new(amp("1/2", 2), &["down", "-1/2"]),
                    EntrySpec::new(amp("-1/2", 2), &["up", "+1/2"]),
                ],
            ),
            outcome(
                "fail",
                vec![
                    EntrySpec::new(amp("1/2", 2), &["down", "-1/2"]),
                    EntrySpec::new(amp("1/2", 2), &["up", "+1/2"]),
                ],
            ),
        ],
        "W",
        "READY",
        &[("ok", "OK"), ("fail", "FAIL")],
    );

    let mut policy = CollapsePolicy::all_premeasure();
    match variant {
        FrVariant::SwappedOrder => policy = policy.with_swap("wbar", "w"),
        FrVariant::ExternalRecord => policy = policy.with_external_record(true),
        FrVariant::FullCollapse => {
            for s in ["fbar", "f", "wbar", "w"] {
                policy = policy.with_mode(s, Mode::Projective);
            }
        }
        FrVariant::CollapseAtFbar => policy = policy.with_mode("fbar", Mode::Projective),
        FrVariant::Standard => {}
    }

    use Expect::{Fails, Holds, Positive};
    let (e1, e2, e3) = match variant {
        FrVariant::Standard => (Some(Holds), Some(Holds), Some(Fails)),
        FrVariant::SwappedOrder | FrVariant::ExternalRecord => (None, Some(Fails), Some(Holds)),
        FrVariant::FullCollapse | FrVariant::CollapseAtFbar => (None, None, None),
    };
    let queries = vec![
        implication("i", "z=+1/2", "r=tails", e1),
        implication("ii", "wbar=okbar", "z=+1/2", e2),
        implication("iii", "w=ok", "r=heads", e3),
        Query::Probability {
            id: "iv".into(),
            event: vec![VarRef::new("wbar", "okbar"), VarRef::new("w", "ok")],
            expect: Some(Positive),
        },
    ];

    let mut notes = vec![
        "Modeling choice: the spin starts in |down> and F-bar's preparation is the conditional map HEADS,down -> HEADS,down and TAILS,down -> TAILS,(down+up)/sqrt2.".to_string(),
        "The coin C is kept separate from F-bar's record Lbar; W-bar measures C and Lbar jointly.".to_string(),
    ];
    notes.push(
        match variant {
            FrVariant::Standard => "All measurements are premeasurements; the joint final readout of W-bar and W is exact.",
            FrVariant::SwappedOrder => "W measures in time slot 3 and W-bar in slot 4.",
            FrVariant::ExternalRecord => "F-bar's result is copied into the environment register E right after it is recorded; nothing acts on E afterwards.",
            FrVariant::FullCollapse => "Every measurement collapses.",
            FrVariant::CollapseAtFbar => "Only F-bar's observation of the coin collapses.",
        }
        .to_string(),
    );

    ScenarioFile {
        name: variant.name().to_string(),
        notes,
        layout,
        initial: unit(&ready),
        steps: vec![coin, fbar, f, wbar, w],
        swappable: vec![("wbar".into(), "w".into())],
        readout: names(&["wbar", "w"]),
        stop_when: vec![VarRef::new("wbar", "okbar"), VarRef::new("w", "ok")],
        policy,
        queries,
    }
}

pub fn build_fr_scenario<S: Scalar>(variant: FrVariant) -> Scenario<S> {
    Scenario::from_file(fr_scenario_file(variant)).expect("bundled scenarios are valid")
}
