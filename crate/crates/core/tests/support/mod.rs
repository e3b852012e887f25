//! Test-only helpers: an independent sparse f64 simulation of the
//! protocol written straight from the paper's maps, and generators of
//! small random scenarios with exact amplitudes.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use wignerlab::experiment::format::{
    AmplitudeSpec, DeviceSpec, EntrySpec, OutcomeSpec, PairSpec, StepKindSpec, StepSpec, SubsystemSpec,
};
use wignerlab::experiment::ScenarioFile;
use wignerlab::hilbert::{LocalVector, Role, SpaceLayout, StateVector, Subsystem};
use wignerlab::measurement::{MeasurementBasis, PointerDevice};
use wignerlab::numerics::{Amplitude, FieldScalar};

pub const TOL: f64 = 1e-12;

// Register positions and label indices of the reference simulation.
pub const C: usize = 0;
pub const LBAR: usize = 1;
pub const S: usize = 2;
pub const L: usize = 3;
pub const WBAR: usize = 4;
pub const W: usize = 5;
pub const E: usize = 6;

pub const HEADS: usize = 0;
pub const TAILS: usize = 1;
pub const DOWN: usize = 0;
pub const UP: usize = 1;
pub const READY: usize = 0;
pub const FAIL: usize = 1;
pub const OK: usize = 2;
pub const REC_HEADS: usize = 1;
pub const REC_TAILS: usize = 2;
pub const Z_MINUS: usize = 1;
pub const Z_PLUS: usize = 2;

pub type Key = Vec<usize>;
pub type Sparse = BTreeMap<Key, f64>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Coin,
    Fbar,
    F,
    Wbar,
    W,
}

impl Op {
    pub fn name(self) -> &'static str {
        match self {
            Op::Coin => "coin",
            Op::Fbar => "fbar",
            Op::F => "f",
            Op::Wbar => "wbar",
            Op::W => "w",
        }
    }

    /// Register holding the step's outcome, if it measures.
    pub fn device(self) -> Option<usize> {
        match self {
            Op::Coin => None,
            Op::Fbar => Some(LBAR),
            Op::F => Some(L),
            Op::Wbar => Some(WBAR),
            Op::W => Some(W),
        }
    }
}

/// Reference model of one protocol variant.
#[derive(Clone, Debug)]
pub struct Reference {
    pub external: bool,
    pub order: Vec<Op>,
    pub projective: BTreeSet<&'static str>,
}

fn h() -> f64 {
    0.5f64.sqrt()
}

fn set(k: &Key, i: usize, v: usize) -> Key {
    let mut k = k.clone();
    k[i] = v;
    k
}

fn set2(k: &Key, i: usize, a: usize, j: usize, b: usize) -> Key {
    set(&set(k, i, a), j, b)
}

impl Reference {
    pub fn standard() -> Self {
        Reference {
            external: false,
            order: vec![Op::Coin, Op::Fbar, Op::F, Op::Wbar, Op::W],
            projective: BTreeSet::new(),
        }
    }

    pub fn swapped() -> Self {
        Reference {
            order: vec![Op::Coin, Op::Fbar, Op::F, Op::W, Op::Wbar],
            ..Self::standard()
        }
    }

    pub fn external() -> Self {
        Reference {
            external: true,
            ..Self::standard()
        }
    }

    pub fn without(mut self, op: Op) -> Self {
        self.order.retain(|o| *o != op);
        self
    }

    pub fn projective(mut self, steps: &[&'static str]) -> Self {
        self.projective.extend(steps.iter().copied());
        self
    }

    pub fn initial(&self) -> Sparse {
        let n = if self.external { 7 } else { 6 };
        BTreeMap::from([(vec![0; n], 1.0)])
    }

    /// The image of one basis key under a step, read off the paper's
    /// equations.
    pub fn image(&self, op: Op, k: &Key) -> Vec<(Key, f64)> {
        match op {
            Op::Coin => {
                assert_eq!(k[C], HEADS);
                vec![(set(k, C, HEADS), (1.0f64 / 3.0).sqrt()), (set(k, C, TAILS), (2.0f64 / 3.0).sqrt())]
            }
            Op::Fbar => {
                assert_eq!(k[LBAR], 0);
                assert_eq!(k[S], DOWN);
                let rec = if k[C] == HEADS { REC_HEADS } else { REC_TAILS };
                let mut k = set(k, LBAR, rec);
                if self.external {
                    assert_eq!(k[E], 0);
                    k[E] = rec;
                }
                if rec == REC_HEADS {
                    vec![(k, 1.0)]
                } else {
                    vec![(set(&k, S, DOWN), h()), (set(&k, S, UP), h())]
                }
            }
            Op::F => {
                assert_eq!(k[L], 0);
                let z = if k[S] == DOWN { Z_MINUS } else { Z_PLUS };
                vec![(set(k, L, z), 1.0)]
            }
            Op::Wbar => {
                assert_eq!(k[WBAR], READY);
                let sign = match (k[C], k[LBAR]) {
                    (HEADS, REC_HEADS) => 1.0,
                    (TAILS, REC_TAILS) => -1.0,
                    other => panic!("W-bar acts on heads/HEADS and tails/TAILS only, got {other:?}"),
                };
                let hh = |w| set(&set2(k, C, HEADS, LBAR, REC_HEADS), WBAR, w);
                let tt = |w| set(&set2(k, C, TAILS, LBAR, REC_TAILS), WBAR, w);
                vec![
                    (hh(FAIL), 0.5),
                    (tt(FAIL), 0.5),
                    (hh(OK), 0.5 * sign),
                    (tt(OK), -0.5 * sign),
                ]
            }
            Op::W => {
                assert_eq!(k[W], READY);
                let sign = match (k[S], k[L]) {
                    (DOWN, Z_MINUS) => 1.0,
                    (UP, Z_PLUS) => -1.0,
                    other => panic!("W acts on down/-1/2 and up/+1/2 only, got {other:?}"),
                };
                let dm = |w| set(&set2(k, S, DOWN, L, Z_MINUS), W, w);
                let up = |w| set(&set2(k, S, UP, L, Z_PLUS), W, w);
                vec![
                    (dm(FAIL), 0.5),
                    (up(FAIL), 0.5),
                    (dm(OK), 0.5 * sign),
                    (up(OK), -0.5 * sign),
                ]
            }
        }
    }

    pub fn apply(&self, op: Op, s: &Sparse) -> Sparse {
        let mut out = Sparse::new();
        for (k, a) in s {
            for (k2, c) in self.image(op, k) {
                *out.entry(k2).or_insert(0.0) += a * c;
            }
        }
        out.retain(|_, a| a.abs() > TOL);
        out
    }

    /// States after each step, the initial state first.
    pub fn layers(&self) -> Vec<Sparse> {
        let mut out = vec![self.initial()];
        for &op in &self.order {
            let next = self.apply(op, out.last().unwrap());
            out.push(next);
        }
        out
    }

    pub fn layer_of(&self, op: Op) -> usize {
        1 + self.order.iter().position(|o| *o == op).expect("step present")
    }

    /// Worlds after the whole run: projective steps split the state by
    /// their device label.
    pub fn worlds(&self) -> Vec<(Vec<(Op, usize)>, Sparse)> {
        let mut worlds = vec![(Vec::new(), self.initial())];
        for &op in &self.order {
            let mut next = Vec::new();
            for (rec, s) in worlds {
                let s = self.apply(op, &s);
                match op.device() {
                    Some(d) if self.projective.contains(op.name()) => {
                        let labels: BTreeSet<usize> = s.keys().map(|k| k[d]).collect();
                        for label in labels {
                            let part: Sparse = s.iter().filter(|(k, _)| k[d] == label).map(|(k, a)| (k.clone(), *a)).collect();
                            let mut r = rec.clone();
                            r.push((op, label));
                            next.push((r, part));
                        }
                    }
                    _ => next.push((rec, s)),
                }
            }
            worlds = next;
        }
        worlds
    }

    /// Joint distribution of device labels at the end of the run.
    pub fn joint(&self, devices: &[usize]) -> BTreeMap<Vec<usize>, f64> {
        let mut out = BTreeMap::new();
        for (_, s) in self.worlds() {
            for (k, a) in &s {
                let labels: Vec<usize> = devices.iter().map(|&d| k[d]).collect();
                *out.entry(labels).or_insert(0.0) += a * a;
            }
        }
        out
    }

    /// `Σ‖P_k U … P_1 U ψ‖²` for projectors onto single register labels,
    /// each placed after a layer, under the all-unitary evolution.
    pub fn chain_weight(&self, insertions: &[(usize, usize, usize)]) -> f64 {
        let mut s = self.initial();
        let project = |s: &mut Sparse, layer: usize| {
            for &(l, reg, label) in insertions {
                if l == layer {
                    s.retain(|k, _| k[reg] == label);
                }
            }
        };
        project(&mut s, 0);
        for (i, &op) in self.order.iter().enumerate() {
            s = self.apply(op, &s);
            project(&mut s, i + 1);
        }
        s.values().map(|a| a * a).sum()
    }

    /// Edges of the branch genealogy between layer `l` and `l + 1`.
    pub fn edges(&self, layers: &[Sparse], l: usize) -> Vec<(Key, Key)> {
        let op = self.order[l];
        let mut out = Vec::new();
        for k in layers[l].keys() {
            for (k2, c) in self.image(op, k) {
                if c.abs() > TOL {
                    out.push((k.clone(), k2));
                }
            }
        }
        out
    }

    /// Keys at layer `to` linked to `key` at layer `from` through chains of
    /// genealogy edges; only nonzero branches are returned.
    pub fn related(&self, layers: &[Sparse], from: usize, key: &Key, to: usize) -> BTreeSet<Key> {
        let mut frontier: BTreeSet<Key> = BTreeSet::from([key.clone()]);
        let mut l = from;
        while l != to {
            let (edge_layer, forward) = if to > l { (l, true) } else { (l - 1, false) };
            let edges = self.edges(layers, edge_layer);
            frontier = edges
                .iter()
                .filter_map(|(a, b)| {
                    if forward && frontier.contains(a) {
                        Some(b.clone())
                    } else if !forward && frontier.contains(b) {
                        Some(a.clone())
                    } else {
                        None
                    }
                })
                .collect();
            l = if forward { l + 1 } else { l - 1 };
        }
        frontier.retain(|k| layers[to].contains_key(k));
        frontier
    }

    /// Ancestry verdict for `reg_a = val_a @ layer_a ⇒ reg_c = val_c @ layer_c`:
    /// whether it holds, and for every consequent label the weight of
    /// antecedent branches related only to it and related to it at all.
    pub fn ancestry(
        &self,
        (layer_a, reg_a, val_a): (usize, usize, usize),
        (layer_c, reg_c, val_c): (usize, usize, usize),
    ) -> (bool, BTreeMap<usize, (f64, f64)>) {
        let layers = self.layers();
        let mut holds = true;
        let mut weights: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        for (k, a) in &layers[layer_a] {
            if k[reg_a] != val_a {
                continue;
            }
            let seen: BTreeSet<usize> = self
                .related(&layers, layer_a, k, layer_c)
                .iter()
                .map(|k2| k2[reg_c])
                .collect();
            if seen.iter().any(|v| *v != val_c) {
                holds = false;
            }
            for v in &seen {
                let slot = weights.entry(*v).or_insert((0.0, 0.0));
                slot.1 += a * a;
                if seen.len() == 1 {
                    slot.0 += a * a;
                }
            }
        }
        (holds, weights)
    }
}

// ---------------------------------------------------------------------
// Random scenarios with exact amplitudes.

/// `(rational, radicand)` for cos and sin of 0°, 30°, 45°, 60°, 90°.
const ANGLES: [((&str, u64), (&str, u64)); 5] = [
    (("1", 1), ("0", 1)),
    (("1/2", 3), ("1/2", 1)),
    (("1/2", 2), ("1/2", 2)),
    (("1/2", 1), ("1/2", 3)),
    (("0", 1), ("1", 1)),
];

/// Exact single-term scalars `q·√r`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub num: i64,
    pub den: i64,
    pub rad: u64,
}

impl Term {
    fn parse(q: &str, rad: u64) -> Term {
        let (num, den) = match q.split_once('/') {
            Some((n, d)) => (n.parse().unwrap(), d.parse().unwrap()),
            None => (q.parse().unwrap(), 1),
        };
        Term { num, den, rad }
    }

    pub fn neg(self) -> Term {
        Term { num: -self.num, ..self }
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Product; radicands stay in {1, 2, 3, 6} for the angle table.
    pub fn mul(self, o: Term) -> Term {
        let (mut num, mut den, mut rad) = (self.num * o.num, self.den * o.den, self.rad * o.rad);
        for p in [2u64, 3] {
            if rad % (p * p) == 0 {
                rad /= p * p;
                num *= p as i64;
            }
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        num /= g;
        den /= g;
        Term { num, den, rad }
    }

    pub fn spec(self) -> AmplitudeSpec {
        let q = if self.den == 1 {
            self.num.to_string()
        } else {
            format!("{}/{}", self.num, self.den)
        };
        AmplitudeSpec::term(&q, self.rad)
    }

    pub fn field(self) -> FieldScalar {
        let r = FieldScalar::from_ratio(self.num, self.den);
        match self.rad {
            1 => r,
            2 => r * FieldScalar::sqrt2(),
            3 => r * FieldScalar::sqrt3(),
            6 => r * FieldScalar::sqrt6(),
            other => panic!("radicand {other}"),
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A random orthonormal basis of a `dim`-dimensional label space: one
/// plane rotation by a table angle, then a permutation of the vectors.
/// Vectors are lists of `(label index, coefficient)`.
pub fn random_basis<R: Rng>(rng: &mut R, dim: usize) -> Vec<Vec<(usize, Term)>> {
    let ((cq, cr), (sq, sr)) = ANGLES[rng.random_range(0..ANGLES.len())];
    let (cos, sin) = (Term::parse(cq, cr), Term::parse(sq, sr));
    let mut axes: Vec<usize> = (0..dim).collect();
    axes.shuffle(rng);
    let (i, j) = (axes[0], axes[1]);
    let mut vectors: Vec<Vec<(usize, Term)>> = Vec::new();
    for k in 0..dim {
        let v = if k == i {
            vec![(i, cos), (j, sin)]
        } else if k == j {
            vec![(i, sin.neg()), (j, cos)]
        } else {
            vec![(k, Term { num: 1, den: 1, rad: 1 })]
        };
        vectors.push(v.into_iter().filter(|(_, t)| !t.is_zero()).collect());
    }
    vectors.shuffle(rng);
    vectors
}

/// Tensor product of two label-space bases; keys are label-index pairs.
pub fn tensor_basis(a: &[Vec<(usize, Term)>], b: &[Vec<(usize, Term)>]) -> Vec<Vec<(Vec<usize>, Term)>> {
    let mut out = Vec::new();
    for va in a {
        for vb in b {
            let mut v = Vec::new();
            for (ia, ta) in va {
                for (ib, tb) in vb {
                    v.push((vec![*ia, *ib], ta.mul(*tb)));
                }
            }
            out.push(v);
        }
    }
    out
}

fn lift(v: &[(usize, Term)]) -> Vec<(Vec<usize>, Term)> {
    v.iter().map(|(i, t)| (vec![*i], *t)).collect()
}

/// One premeasurement case: a state on system registers with the device
/// ready, a partial basis on some of them and a pointer device.
pub struct MeasureCase {
    pub layout: Arc<SpaceLayout>,
    pub state: StateVector<FieldScalar>,
    pub basis: MeasurementBasis<FieldScalar>,
    pub device: PointerDevice,
}

fn labels(prefix: &str, dim: usize) -> Vec<String> {
    (0..dim).map(|i| format!("{prefix}{i}")).collect()
}

/// Random small case: one or two system registers of dimension 2 or 3,
/// a device of dimension at most 3, a basis on one or both registers built
/// from table rotations, and a state of exact terms inside its span.
pub fn random_measure_case<R: Rng>(rng: &mut R) -> MeasureCase {
    let n_sys = rng.random_range(1..=2);
    let dims: Vec<usize> = (0..n_sys).map(|_| rng.random_range(2..=3)).collect();
    let device_dim = rng.random_range(2..=3);
    let mut subsystems: Vec<Subsystem> = dims
        .iter()
        .enumerate()
        .map(|(i, &d)| Subsystem::new(&format!("Q{i}"), labels(&format!("q{i}_"), d), Role::System).unwrap())
        .collect();
    let mut device_labels = vec!["READY".to_string()];
    device_labels.extend((1..device_dim).map(|i| format!("P{i}")));
    subsystems.push(Subsystem::new("D", device_labels.clone(), Role::Record).unwrap());
    let layout = Arc::new(SpaceLayout::new(subsystems).unwrap());
    let (targets, full): (Vec<usize>, Vec<Vec<(Vec<usize>, Term)>>) = if n_sys == 2 && rng.random_bool(0.5) {
        let a = random_basis(rng, dims[0]);
        let b = random_basis(rng, dims[1]);
        (vec![0, 1], tensor_basis(&a, &b))
    } else {
        let t = rng.random_range(0..n_sys);
        (vec![t], random_basis(rng, dims[t]).iter().map(|v| lift(v)).collect())
    };
    let m = rng.random_range(1..device_dim.min(full.len()) + 1).min(device_dim - 1);
    let chosen = &full[..m];

    // States inside the span of the chosen outcomes: Σ c · |rest⟩ ⊗ |b_k⟩.
    let pool = [
        Term { num: 1, den: 1, rad: 1 },
        Term { num: -1, den: 2, rad: 1 },
        Term { num: 1, den: 2, rad: 2 },
        Term { num: 1, den: 2, rad: 3 },
        Term { num: -1, den: 4, rad: 6 },
        Term { num: 2, den: 3, rad: 1 },
        Term { num: 0, den: 1, rad: 1 },
    ];
    let rest: Vec<usize> = (0..n_sys).filter(|i| !targets.contains(i)).collect();
    let rest_keys: Vec<Vec<usize>> = match rest.as_slice() {
        [] => vec![vec![]],
        [r] => (0..dims[*r]).map(|i| vec![i]).collect(),
        _ => unreachable!("at most one register outside the targets"),
    };
    let mut amps: BTreeMap<Vec<usize>, FieldScalar> = BTreeMap::new();
    for rk in &rest_keys {
        for v in chosen {
            let c = pool[rng.random_range(0..pool.len())];
            if c.is_zero() {
                continue;
            }
            for (tk, t) in v {
                let mut key = vec![0; n_sys + 1];
                for (pos, &r) in rest.iter().enumerate() {
                    key[r] = rk[pos];
                }
                for (pos, &tg) in targets.iter().enumerate() {
                    key[tg] = tk[pos];
                }
                let a = c.mul(*t).field();
                let slot = amps.entry(key).or_insert_with(|| FieldScalar::from_ratio(0, 1));
                *slot = slot.clone() + a;
            }
        }
    }
    let mut entries: Vec<(Vec<usize>, Amplitude<FieldScalar>)> =
        amps.into_iter().map(|(k, a)| (k, Amplitude::real(a))).collect();
    if entries.is_empty() {
        let mut key = vec![0; n_sys + 1];
        for (tk, t) in &chosen[0] {
            for (pos, &tg) in targets.iter().enumerate() {
                key[tg] = tk[pos];
            }
            entries.push((key.clone(), Amplitude::real(t.field())));
        }
    }
    let state = StateVector::from_entries(layout.clone(), entries);

    let outcomes: Vec<(String, LocalVector<FieldScalar>)> = chosen
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let lv = LocalVector::from_entries(
                targets.clone(),
                v.iter().map(|(k, t)| (k.clone(), Amplitude::real(t.field()))),
            );
            (format!("o{i}"), lv)
        })
        .collect();
    let basis = MeasurementBasis::new("m", targets, outcomes).unwrap();
    let pointers: Vec<(String, String)> = (0..m).map(|i| (format!("o{i}"), device_labels[i + 1].clone())).collect();
    let pointer_refs: Vec<(&str, &str)> = pointers.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let device = PointerDevice::new(&layout, "D", "READY", &pointer_refs).unwrap();
    MeasureCase {
        layout,
        state,
        basis,
        device,
    }
}

fn entry(t: Term, labels: &[String]) -> EntrySpec {
    EntrySpec {
        amplitude: t.spec(),
        labels: labels.to_vec(),
    }
}

fn unitary_pairs(basis: &[Vec<(Vec<usize>, Term)>], names: &[Vec<String>]) -> Vec<PairSpec> {
    let lookup = |k: &[usize]| -> Vec<String> { k.iter().enumerate().map(|(r, &i)| names[r][i].clone()).collect() };
    let dims: Vec<usize> = names.iter().map(Vec::len).collect();
    let mut inputs: Vec<Vec<usize>> = vec![vec![]];
    for &d in &dims {
        inputs = inputs
            .into_iter()
            .flat_map(|k| {
                (0..d).map(move |i| {
                    let mut k = k.clone();
                    k.push(i);
                    k
                })
            })
            .collect();
    }
    inputs
        .iter()
        .zip(basis)
        .map(|(input, out)| PairSpec {
            input: vec![entry(Term { num: 1, den: 1, rad: 1 }, &lookup(input))],
            output: out.iter().map(|(k, t)| entry(*t, &lookup(k))).collect(),
        })
        .collect()
}

/// Random scenario file: two system registers A, B (dimension 2 or 3)
/// with devices DA, DB; a rotation on A, a measurement of A in a rotated
/// basis, a rotation on A⊗B, then a measurement of B (or of A⊗B) in a
/// rotated basis. Both measurements are read out.
pub fn random_scenario<R: Rng>(rng: &mut R) -> ScenarioFile {
    let da = rng.random_range(2..=3);
    let db = rng.random_range(2..=3);
    let a_labels = labels("a", da);
    let b_labels = labels("b", db);
    let dev_labels = |p: &str| {
        let mut v = vec!["READY".to_string()];
        v.extend((1..=9).map(|i| format!("{p}{i}")));
        v
    };
    let layout = vec![
        SubsystemSpec { name: "A".into(), labels: a_labels.clone(), role: Role::System },
        SubsystemSpec { name: "B".into(), labels: b_labels.clone(), role: Role::System },
        SubsystemSpec { name: "DA".into(), labels: dev_labels("x"), role: Role::Record },
        SubsystemSpec { name: "DB".into(), labels: dev_labels("y"), role: Role::Record },
    ];
    let initial = vec![entry(
        Term { num: 1, den: 1, rad: 1 },
        &[
            a_labels[rng.random_range(0..da)].clone(),
            b_labels[rng.random_range(0..db)].clone(),
            "READY".into(),
            "READY".into(),
        ],
    )];

    let rot_a: Vec<Vec<(Vec<usize>, Term)>> = random_basis(rng, da).iter().map(|v| lift(v)).collect();
    let mix = StepSpec {
        name: "mix".into(),
        time: 0,
        kind: StepKindSpec::Isometry {
            targets: vec!["A".into()],
            pairs: unitary_pairs(&rot_a, &[a_labels.clone()]),
        },
        then: vec![],
    };

    let measure = |name: &str, time: usize, var: &str, targets: Vec<String>, names: Vec<Vec<String>>, basis: Vec<Vec<(Vec<usize>, Term)>>, dev: &str, p: &str| {
        let m = basis.len();
        let outcomes: Vec<OutcomeSpec> = basis
            .iter()
            .enumerate()
            .map(|(i, v)| OutcomeSpec {
                label: format!("{var}{i}"),
                vector: v
                    .iter()
                    .map(|(k, t)| entry(*t, &k.iter().enumerate().map(|(r, &ix)| names[r][ix].clone()).collect::<Vec<_>>()))
                    .collect(),
            })
            .collect();
        StepSpec {
            name: name.into(),
            time,
            kind: StepKindSpec::Measure {
                variable: var.into(),
                targets,
                outcomes,
                device: DeviceSpec {
                    subsystem: dev.into(),
                    ready: "READY".into(),
                    pointers: (0..m).map(|i| (format!("{var}{i}"), format!("{p}{}", i + 1))).collect(),
                },
            },
            then: vec![],
        }
    };

    let basis_a: Vec<Vec<(Vec<usize>, Term)>> = random_basis(rng, da).iter().map(|v| lift(v)).collect();
    let ma = measure("ma", 1, "x", vec!["A".into()], vec![a_labels.clone()], basis_a, "DA", "x");

    let ent = tensor_basis(&random_basis(rng, da), &random_basis(rng, db));
    let entangle = StepSpec {
        name: "ent".into(),
        time: 2,
        kind: StepKindSpec::Isometry {
            targets: vec!["A".into(), "B".into()],
            pairs: unitary_pairs(&ent, &[a_labels.clone(), b_labels.clone()]),
        },
        then: vec![],
    };

    let mb = if rng.random_bool(0.5) {
        let basis_b: Vec<Vec<(Vec<usize>, Term)>> = random_basis(rng, db).iter().map(|v| lift(v)).collect();
        measure("mb", 3, "y", vec!["B".into()], vec![b_labels.clone()], basis_b, "DB", "y")
    } else {
        let joint = tensor_basis(&random_basis(rng, da), &random_basis(rng, db));
        measure("mb", 3, "y", vec!["A".into(), "B".into()], vec![a_labels.clone(), b_labels.clone()], joint, "DB", "y")
    };

    ScenarioFile {
        name: "random".into(),
        notes: vec![],
        layout,
        initial,
        steps: vec![mix, ma, entangle, mb],
        swappable: vec![],
        readout: vec!["ma".into(), "mb".into()],
        stop_when: vec![],
        policy: Default::default(),
        queries: vec![],
    }
}
