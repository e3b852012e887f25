//! `wignerlab` command-line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wignerlab::analysis::{
    build_world_genealogy, check_chain_implication, Branch, check_implication, decompose, group_branches, inference_suite_with,
    interference_report, json as render, record_change_report, AnalysisError, QueryResult, Verdict,
};
use wignerlab::experiment::{
    build_fr_scenario, run_sampled, CollapsePolicy, ExperimentError, FrVariant, Scenario, TimeRef, VarRef,
    SCHEMA_VERSION,
};
use wignerlab::hilbert::Role;
use wignerlab::numerics::format_approx;
use wignerlab::{FieldScalar, Scalar};

const VERBS: &str = "scenarios, run, state, branches, genealogy, check, suite, sample, export";

#[derive(Parser, Debug)]
#[command(name = "wignerlab", version, about = "Exact simulation of the Frauchiger-Renner protocol")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the bundled scenarios and any scenario files in --dir.
    Scenarios {
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Print a versioned JSON document instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Exact distribution of the final readout.
    Run(Common),
    /// State vector after a step.
    State {
        #[command(flatten)]
        common: Common,
        /// Time reference: init, tN or a step name.
        #[arg(long, default_value = "t4")]
        at: TimeRef,
    },
    /// Decoherent branches after a step, grouped by record registers.
    Branches {
        #[command(flatten)]
        common: Common,
        /// Time reference: init, tN or a step name.
        #[arg(long, default_value = "t4")]
        at: TimeRef,
    },
    /// Branch genealogy with interference events.
    Genealogy(Common),
    /// Judge one implication between two variable readings.
    Check {
        #[command(flatten)]
        common: Common,
        /// Reading such as w=OK@t4.
        #[arg(long)]
        antecedent: VarRef,
        /// Reading such as r=heads@t1.
        #[arg(long)]
        consequent: VarRef,
    },
    /// All of the scenario's queries, the stopping probability and the
    /// record-change report.
    Suite(Common),
    /// Seeded Monte Carlo run of the final readout.
    Sample {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Number of trials.
        #[arg(long, default_value_t = 120_000)]
        n: u64,
    },
    /// Scenario file plus every result, as one JSON document.
    Export(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Bundled scenario name or path to a scenario file.
    #[arg(long, default_value = "fr_standard")]
    scenario: String,
    /// all-premeasure, all-projective or custom:<step>=<mode>,...
    #[arg(long)]
    policy: Option<String>,
    /// Order of the two final measurements.
    #[arg(long, value_enum)]
    order: Option<Order>,
    /// Extra directory searched for scenario files.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Print a versioned JSON document instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Standard,
    Swapped,
}

#[derive(Debug)]
enum CliError {
    Experiment(ExperimentError),
    Analysis(AnalysisError),
    Io(String),
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Experiment(e)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        CliError::Analysis(e)
    }
}

impl CliError {
    fn report(&self) -> String {
        match self {
            CliError::Experiment(e) => format!("error[{}]: {e}", e.qualified_name()),
            CliError::Analysis(e) => format!("error[{}]: {e}", e.qualified_name()),
            CliError::Io(m) => format!("error[cli::Io]: {m}"),
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            eprintln!("valid verbs: {VERBS}");
            return ExitCode::from(1);
        }
    };
    let float = std::env::var("WIGNERLAB_FLOAT").is_ok_and(|v| v == "1");
    let out = if float {
        execute::<f64>(&cli.command)
    } else {
        execute::<FieldScalar>(&cli.command)
    };
    match out {
        Ok(text) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(2)
        }
    }
}

fn scenario_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

fn load<S: Scalar>(c: &Common) -> Result<Scenario<S>> {
    if let Some(v) = FrVariant::from_name(&c.scenario) {
        return Ok(build_fr_scenario(v));
    }
    let mut candidates = vec![PathBuf::from(&c.scenario)];
    if let Some(dir) = &c.dir {
        candidates.push(dir.join(&c.scenario));
        candidates.push(dir.join(format!("{}.json", c.scenario)));
    }
    match candidates.iter().find(|p| p.is_file()) {
        Some(p) => Ok(Scenario::load(p)?),
        None => Err(ExperimentError::InvalidScenario(format!(
            "no bundled scenario or file named {}",
            c.scenario
        ))
        .into()),
    }
}

fn policy<S: Scalar>(scenario: &Scenario<S>, c: &Common) -> Result<CollapsePolicy> {
    let base = scenario.default_policy();
    let mut p = match &c.policy {
        Some(text) => scenario.parse_policy(text, base)?,
        None => base.clone(),
    };
    match c.order {
        None => {}
        Some(Order::Standard) => p.swaps.clear(),
        Some(Order::Swapped) => {
            let (a, b) = scenario
                .swappable()
                .first()
                .ok_or_else(|| ExperimentError::InvalidPolicy("scenario declares no swappable steps".into()))?;
            p.swaps = vec![(a.clone(), b.clone())];
        }
    }
    scenario.schedule(&p)?;
    Ok(p)
}

fn exact<S: Scalar>(x: &S) -> String {
    format!("{x} (≈ {})", format_approx(x.to_f64()))
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn execute<S: Scalar>(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Scenarios { dir, json } => scenarios(dir.as_deref(), *json),
        Command::Run(c) => run::<S>(c),
        Command::State { common, at } => state::<S>(common, at),
        Command::Branches { common, at } => branches::<S>(common, at),
        Command::Genealogy(c) => genealogy::<S>(c),
        Command::Check {
            common,
            antecedent,
            consequent,
        } => check::<S>(common, antecedent, consequent),
        Command::Suite(c) => suite::<S>(c),
        Command::Sample { common, seed, n } => sample::<S>(common, *seed, *n),
        Command::Export(c) => export::<S>(c),
    }
}

fn scenarios(dir: Option<&Path>, as_json: bool) -> Result<String> {
    let mut rows: Vec<(String, String)> = FrVariant::ALL
        .iter()
        .map(|v| (v.name().to_string(), "bundled".to_string()))
        .collect();
    if let Some(dir) = dir {
        for p in scenario_files(dir)? {
            let s: Scenario<FieldScalar> = Scenario::load(&p)?;
            rows.push((s.name().to_string(), p.display().to_string()));
        }
    }
    if as_json {
        let items: Vec<Value> = rows.iter().map(|(n, s)| json!({ "name": n, "source": s })).collect();
        return Ok(json_text(&json!({ "schema": SCHEMA_VERSION, "kind": "scenarios", "scenarios": items })));
    }
    let width = rows.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
    Ok(rows.iter().map(|(n, s)| format!("{n:width$}  {s}\n")).collect())
}

fn run<S: Scalar>(c: &Common) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let d = sc.run_exact(&p)?;
    if c.json {
        return Ok(json_text(&render::distribution(sc.name(), &p.describe(), &d)));
    }
    let mut out = format!("scenario {} policy {}\n", sc.name(), p.describe());
    let readout: Vec<&str> = sc.readout().iter().map(String::as_str).collect();
    let _ = writeln!(out, "readout {}", readout.join(","));
    let joint = d.by_labels(&readout);
    for (labels, w) in &joint {
        let _ = writeln!(out, "{} : {}", labels.join(","), exact(w));
    }
    if d.len() > joint.len() {
        let _ = writeln!(out, "records");
        for (r, w) in d.iter() {
            let _ = writeln!(out, "  {r} : {}", exact(w));
        }
    }
    let _ = writeln!(out, "total : {}", exact(&d.total()));
    Ok(out)
}

fn state<S: Scalar>(c: &Common, at: &TimeRef) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let s = sc.state_at(&p, at)?;
    if c.json {
        return Ok(json_text(&render::state(sc.name(), &at.to_string(), &s)));
    }
    let layout = s.layout();
    let names: Vec<&str> = layout.subsystems().iter().map(|x| x.name()).collect();
    let mut out = format!("state of {} at {at}\n", sc.name());
    let _ = writeln!(out, "({})", names.join(","));
    for (k, a) in s.entries() {
        let _ = writeln!(out, "{} : {a} (≈ {})", layout.render_key(k), approx_amplitude(a));
    }
    let _ = writeln!(out, "norm : {}", exact(&s.norm_sq()));
    Ok(out)
}

fn approx_amplitude<S: Scalar>(a: &wignerlab::numerics::Amplitude<S>) -> String {
    let re = a.re.to_f64();
    let im = a.im.to_f64();
    if im == 0.0 {
        format_approx(re)
    } else if re == 0.0 {
        format!("{}i", format_approx(im))
    } else {
        format!("{} {} {}i", format_approx(re), if im < 0.0 { "-" } else { "+" }, format_approx(im.abs()))
    }
}

fn branches<S: Scalar>(c: &Common, at: &TimeRef) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let layout = sc.layout();
    let all: Vec<usize> = (0..layout.len()).collect();
    let keep: Vec<usize> = (0..layout.len())
        .filter(|&i| layout.subsystems()[i].role() != Role::System)
        .collect();
    let parts = if p.is_unitary() {
        decompose(&sc.state_at(&p, at)?)
    } else {
        let dag = build_world_genealogy(&sc, &p)?;
        let layer = sc.layer(at, dag.schedule())?;
        dag.layer(layer)
            .iter()
            .map(|&id| dag.node(id))
            .filter(|n| !n.amplitude.is_negligible())
            .map(|n| Branch {
                key: n.key.clone(),
                labels: layout.labels_of(&all, &n.key),
                amplitude: n.amplitude.clone(),
            })
            .collect()
    };
    let grouped = group_branches(&parts, &keep);
    let names: Vec<&str> = keep.iter().map(|&i| layout.subsystems()[i].name()).collect();
    if c.json {
        let items: Vec<Value> = grouped
            .iter()
            .map(|(l, w)| json!({ "labels": l, "weight": render::scalar(w) }))
            .collect();
        return Ok(json_text(&json!({
            "schema": SCHEMA_VERSION,
            "kind": "branches",
            "scenario": sc.name(),
            "at": at.to_string(),
            "registers": names,
            "branches": items,
        })));
    }
    let mut out = format!("branches of {} at {at} over ({})\n", sc.name(), names.join(","));
    for (labels, w) in &grouped {
        let _ = writeln!(out, "({}) : {}", labels.join(","), exact(w));
    }
    Ok(out)
}

fn genealogy<S: Scalar>(c: &Common) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let dag = build_world_genealogy(&sc, &p)?;
    let events: Vec<_> = (1..dag.layer_count()).map(|l| (l, interference_report(&dag, l))).collect();
    if c.json {
        return Ok(json_text(&render::genealogy(sc.name(), &dag, &events)));
    }
    let mut out = format!("genealogy of {} policy {}\n", sc.name(), p.describe());
    for l in 0..dag.layer_count() {
        let _ = writeln!(
            out,
            "{} {}",
            dag.schedule().layer_name(l),
            dag.step_name(l).unwrap_or("initial")
        );
        for &n in dag.layer(l) {
            let node = dag.node(n);
            let _ = writeln!(out, "  #{n} {} : {}", dag.render_node(n), node.amplitude);
            for e in dag.parents(n) {
                let _ = writeln!(out, "    <- #{} {}", e.parent, e.contribution);
            }
        }
    }
    let _ = writeln!(out, "interference");
    for (l, evs) in &events {
        for ev in evs {
            let _ = writeln!(
                out,
                "  {} {} at #{} {} : net {}",
                dag.schedule().layer_name(*l),
                ev.class.as_str(),
                ev.child,
                dag.render_node(ev.child),
                ev.net
            );
        }
    }
    Ok(out)
}

fn verdict(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "HOLDS",
        Verdict::Fails => "FAILS",
    }
}

fn check<S: Scalar>(c: &Common, antecedent: &VarRef, consequent: &VarRef) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let a = check_implication(&sc, &p, antecedent, consequent)?;
    let ch = check_chain_implication(&sc, &p, antecedent, consequent)?;
    if c.json {
        return Ok(json_text(&render::implication(sc.name(), &a, &ch)));
    }
    let mut out = format!("{antecedent} => {consequent}\n");
    match &a.witness {
        None => out.push_str("HOLDS\n"),
        Some(w) => {
            let _ = writeln!(
                out,
                "FAILS, witness {}={} weight {}",
                a.consequent.variable, w.value, w.exclusive
            );
        }
    }
    let _ = writeln!(out, "antecedent weight {}", exact(&a.antecedent_weight));
    for v in &a.values {
        let _ = writeln!(
            out,
            "  {}={} : exclusive {} shared {}",
            a.consequent.variable,
            v.value,
            exact(&v.exclusive),
            exact(&v.shared)
        );
    }
    let _ = write!(out, "chain reading {}", verdict(ch.verdict));
    match &ch.witness {
        Some((y, w)) => {
            let _ = writeln!(out, ", witness {}={y} weight {w}", ch.consequent.variable);
        }
        None => out.push('\n'),
    }
    Ok(out)
}

fn suite<S: Scalar>(c: &Common) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let r = inference_suite_with(&sc, &p)?;
    if c.json {
        return Ok(json_text(&render::suite(&r)));
    }
    let mut out = format!("suite of {} policy {}\n", r.scenario, r.policy);
    for row in &r.rows {
        let value = match &row.result {
            QueryResult::Implication { ancestry, chain } => {
                let mut s = verdict(ancestry.verdict).to_string();
                if let Some(w) = &ancestry.witness {
                    let _ = write!(s, ", witness {}={} weight {}", ancestry.consequent.variable, w.value, w.exclusive);
                }
                let _ = write!(s, " [chain reading {}]", verdict(chain.verdict));
                s
            }
            QueryResult::Probability { weight } => format!("P = {}", exact(weight)),
        };
        let expected = match (row.expected, row.matches()) {
            (Some(e), Some(true)) => format!("expected {e}, ok"),
            (Some(e), _) => format!("expected {e}, DIVERGES"),
            (None, _) => "no expectation".to_string(),
        };
        let _ = writeln!(out, "{:4} {} : {value} ({expected})", row.id, row.statement);
    }
    if let Some(w) = &r.p_stop {
        let _ = writeln!(out, "stop probability : {}", exact(w));
    }
    let _ = writeln!(out, "joint readout");
    for (labels, w) in &r.joint {
        let _ = writeln!(out, "  {} : {}", labels.join(","), exact(w));
    }
    for d in &r.divergences {
        let _ = writeln!(out, "divergence {d}");
    }
    for d in &r.readings_differ {
        let _ = writeln!(out, "readings differ {d}");
    }
    if p.is_unitary() {
        let schedule = sc.schedule(&p)?;
        let _ = writeln!(out, "record changes");
        for ch in record_change_report(&sc, &p)? {
            let _ = writeln!(
                out,
                "  {} {}->{} : off-diagonal {}",
                ch.subsystem,
                schedule.layer_name(ch.written),
                schedule.layer_name(ch.later),
                exact(&ch.off_diagonal)
            );
        }
    }
    Ok(out)
}

fn sample<S: Scalar>(c: &Common, seed: u64, n: u64) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let r = run_sampled(&sc, &p, seed, n)?;
    if c.json {
        return Ok(json_text(&render::sample(sc.name(), &p.describe(), &r)));
    }
    let readout: Vec<&str> = sc.readout().iter().map(String::as_str).collect();
    let exact_d = sc.run_exact(&p)?.by_labels(&readout);
    let mut counts: std::collections::BTreeMap<Vec<String>, u64> = Default::default();
    for (rec, k) in &r.counts {
        let labels = rec.restrict(&readout).entries().iter().map(|e| e.pointer.clone()).collect();
        *counts.entry(labels).or_insert(0) += k;
    }
    let mut out = format!(
        "sample of {} policy {} seed {} n {} workers {} rng {}\n",
        sc.name(),
        p.describe(),
        r.seed,
        r.n,
        r.workers,
        r.rng
    );
    for (labels, w) in &exact_d {
        let k = counts.get(labels).copied().unwrap_or(0);
        let _ = writeln!(
            out,
            "{} : {k} freq {:.6} exact {}",
            labels.join(","),
            k as f64 / r.n as f64,
            exact(w)
        );
    }
    match r.first_success {
        Some(i) => {
            let _ = writeln!(out, "first success at trial {i}");
        }
        None => out.push_str("no success\n"),
    }
    Ok(out)
}

fn export<S: Scalar>(c: &Common) -> Result<String> {
    let sc = load::<S>(c)?;
    let p = policy(&sc, c)?;
    let schedule = sc.schedule(&p)?;
    let last = TimeRef::Index(schedule.entries().iter().map(|e| e.time).max().unwrap_or(0));
    let spec: Value = serde_json::from_str(&sc.spec().to_json()).expect("scenario files are valid JSON");
    let mut doc = json!({
        "schema": SCHEMA_VERSION,
        "kind": "export",
        "scenario": spec,
        "policy": p.describe(),
        "distribution": render::distribution(sc.name(), &p.describe(), &sc.run_exact(&p)?),
        "state": Value::Null,
    });
    if p.is_unitary() {
        doc["state"] = render::state(sc.name(), &last.to_string(), &sc.state_at(&p, &last)?);
    }
    let dag = build_world_genealogy(&sc, &p)?;
    let events: Vec<_> = (1..dag.layer_count()).map(|l| (l, interference_report(&dag, l))).collect();
    doc["genealogy"] = render::genealogy(sc.name(), &dag, &events);
    doc["suite"] = render::suite(&inference_suite_with(&sc, &p)?);
    if p.is_unitary() {
        let changes = record_change_report(&sc, &p)?;
        doc["records"] = render::record_changes(sc.name(), &schedule, &changes, &p.describe());
    }
    Ok(json_text(&doc))
}
