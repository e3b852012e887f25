use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{CollapsePolicy, ExperimentError, OutcomeRecord, OutcomeTree, Scenario};
use crate::numerics::Scalar;

/// Name of the generator behind every sampled result.
pub const RNG_NAME: &str = "chacha8-v1";

/// Number of trial partitions used by [`run_sampled`].
pub const DEFAULT_WORKERS: usize = 4;

/// Frequencies of `n` seeded trials and the 1-based index of the first
/// trial meeting the scenario's stopping rule.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleReport {
    pub seed: u64,
    pub n: u64,
    pub workers: usize,
    pub rng: &'static str,
    pub counts: BTreeMap<OutcomeRecord, u64>,
    pub first_success: Option<u64>,
}

impl SampleReport {
    pub fn frequency(&self, record: &OutcomeRecord) -> f64 {
        self.counts.get(record).copied().unwrap_or(0) as f64 / self.n as f64
    }

    /// Count of records satisfying `pred`.
    pub fn count(&self, pred: impl Fn(&OutcomeRecord) -> bool) -> u64 {
        self.counts.iter().filter(|(r, _)| pred(r)).map(|(_, c)| c).sum()
    }
}

/// Outcome tree flattened to float weights for repeated draws.
pub struct Sampler {
    children: Vec<Vec<(usize, f64)>>,
    leaf_of: Vec<Option<usize>>,
    records: Vec<OutcomeRecord>,
    success: Vec<bool>,
}

impl Sampler {
    pub fn new<S: Scalar>(scenario: &Scenario<S>, policy: &CollapsePolicy) -> Result<Self, ExperimentError> {
        let tree: OutcomeTree<S> = scenario.outcome_tree(policy)?;
        let schedule = scenario.schedule(policy)?;
        let stop = scenario
            .stop_when()
            .iter()
            .map(|v| {
                let r = scenario.resolve(v, &schedule)?;
                Ok((scenario.steps()[r.step].name.clone(), r.outcome))
            })
            .collect::<Result<Vec<_>, ExperimentError>>()?;
        let nodes = tree.nodes();
        let children = nodes
            .iter()
            .map(|n| n.children.iter().map(|&c| (c, nodes[c].weight.to_f64())).collect())
            .collect();
        let mut leaf_of = vec![None; nodes.len()];
        let mut records = Vec::new();
        let mut success = Vec::new();
        for (id, record) in tree.leaves() {
            leaf_of[id] = Some(records.len());
            success.push(
                !stop.is_empty()
                    && stop
                        .iter()
                        .all(|(step, outcome)| record.get(step).is_some_and(|e| &e.outcome == outcome)),
            );
            records.push(record);
        }
        Ok(Sampler {
            children,
            leaf_of,
            records,
            success,
        })
    }

    /// Draws one leaf, returning its index into [`records`](Self::records).
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut node = 0;
        loop {
            let kids = &self.children[node];
            if kids.is_empty() {
                return self.leaf_of[node].expect("childless nodes are leaves");
            }
            let total: f64 = kids.iter().map(|(_, w)| w.max(0.0)).sum();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for &(c, w) in kids {
                if w <= 0.0 {
                    continue;
                }
                pick = Some(c);
                acc += w;
                if u < acc {
                    break;
                }
            }
            node = pick.unwrap_or(kids[0].0);
        }
    }

    pub fn records(&self) -> &[OutcomeRecord] {
        &self.records
    }

    pub fn is_success(&self, leaf: usize) -> bool {
        self.success[leaf]
    }
}

/// Generator for one worker (or meta-trial) of a seeded run.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn run_sampled<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    seed: u64,
    n: u64,
) -> Result<SampleReport, ExperimentError> {
    run_sampled_with(scenario, policy, seed, n, DEFAULT_WORKERS)
}

/// Splits the trials into `workers` contiguous blocks, worker `k` drawing
/// from stream `k` of the seed. The result depends on the plan only, not
/// on thread scheduling.
pub fn run_sampled_with<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    seed: u64,
    n: u64,
    workers: usize,
) -> Result<SampleReport, ExperimentError> {
    if n == 0 || workers == 0 {
        return Err(ExperimentError::InvalidArgument("need at least one trial and one worker".into()));
    }
    let sampler = Sampler::new(scenario, policy)?;
    let w = workers as u64;
    let blocks: Vec<(u64, u64)> = (0..w)
        .map(|k| {
            let start = k * (n / w) + k.min(n % w);
            let len = n / w + u64::from(k < n % w);
            (start, len)
        })
        .collect();
    let partial: Vec<(Vec<u64>, Option<u64>)> = blocks
        .par_iter()
        .enumerate()
        .map(|(k, &(start, len))| {
            let mut rng = stream_rng(seed, k as u64);
            let mut counts = vec![0u64; sampler.records.len()];
            let mut first = None;
            for i in 0..len {
                let leaf = sampler.draw(&mut rng);
                counts[leaf] += 1;
                if first.is_none() && sampler.success[leaf] {
                    first = Some(start + i + 1);
                }
            }
            (counts, first)
        })
        .collect();
    let mut counts = BTreeMap::new();
    let mut first_success = None;
    for (c, first) in partial {
        for (leaf, k) in c.into_iter().enumerate() {
            if k > 0 {
                *counts.entry(sampler.records[leaf].clone()).or_insert(0) += k;
            }
        }
        first_success = first_success.or(first);
    }
    Ok(SampleReport {
        seed,
        n,
        workers,
        rng: RNG_NAME,
        counts,
        first_success,
    })
}

/// For each of `meta` independent runs, the index of the first trial that
/// meets the stopping rule, giving up after `cap` trials.
pub fn first_success_trials<S: Scalar>(
    scenario: &Scenario<S>,
    policy: &CollapsePolicy,
    seed: u64,
    meta: usize,
    cap: u64,
) -> Result<Vec<Option<u64>>, ExperimentError> {
    let sampler = Sampler::new(scenario, policy)?;
    Ok((0..meta)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(seed, m as u64);
            (1..=cap).find(|_| sampler.success[sampler.draw(&mut rng)])
        })
        .collect())
}
