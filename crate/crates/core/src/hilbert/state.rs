use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{HilbertError, SpaceLayout};
use crate::numerics::{Amplitude, Scalar};

/// One label index per subsystem (or per target, for local vectors).
pub type BasisKey = Vec<usize>;

const FREE: usize = usize::MAX;

fn accumulate<S: Scalar>(map: &mut BTreeMap<BasisKey, Amplitude<S>>, key: BasisKey, amp: Amplitude<S>) {
    match map.entry(key) {
        std::collections::btree_map::Entry::Vacant(e) => {
            if !amp.is_negligible() {
                e.insert(amp);
            }
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            let sum = e.get().clone() + amp;
            if sum.is_negligible() {
                e.remove();
            } else {
                e.insert(sum);
            }
        }
    }
}

/// A vector on a subset of the factors, keyed by the labels of those
/// factors in `targets` order.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalVector<S> {
    targets: Vec<usize>,
    amps: BTreeMap<BasisKey, Amplitude<S>>,
}

impl<S: Scalar> LocalVector<S> {
    pub fn zero(targets: Vec<usize>) -> Self {
        LocalVector {
            targets,
            amps: BTreeMap::new(),
        }
    }

    pub fn basis(targets: Vec<usize>, key: BasisKey) -> Self {
        let mut v = Self::zero(targets);
        v.amps.insert(key, Amplitude::one());
        v
    }

    pub fn from_entries<I>(targets: Vec<usize>, entries: I) -> Self
    where
        I: IntoIterator<Item = (BasisKey, Amplitude<S>)>,
    {
        let mut v = Self::zero(targets);
        for (k, a) in entries {
            accumulate(&mut v.amps, k, a);
        }
        v
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisKey, &Amplitude<S>)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, key: &[usize]) -> Amplitude<S> {
        self.amps.get(key).cloned().unwrap_or_else(Amplitude::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.amps.is_empty()
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Amplitude<S> {
        debug_assert_eq!(self.targets, other.targets);
        let (small, large, flip) = if self.amps.len() <= other.amps.len() {
            (self, other, false)
        } else {
            (other, self, true)
        };
        let mut acc = Amplitude::zero();
        for (k, a) in &small.amps {
            if let Some(b) = large.amps.get(k) {
                acc = acc + if flip { b.conj_mul(a) } else { a.conj_mul(b) };
            }
        }
        acc
    }

    pub fn norm_sq(&self) -> S {
        self.amps.values().fold(S::zero(), |acc, a| acc + a.norm_sq())
    }

    /// `self += k · other`
    pub fn add_scaled(&mut self, k: &Amplitude<S>, other: &Self) {
        for (key, a) in &other.amps {
            accumulate(&mut self.amps, key.clone(), k.clone() * a.clone());
        }
    }

    pub fn scaled(&self, k: &Amplitude<S>) -> Self {
        let mut out = Self::zero(self.targets.clone());
        out.add_scaled(k, self);
        out
    }

    /// Tensor product with a vector on disjoint targets.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut targets = self.targets.clone();
        targets.extend_from_slice(&other.targets);
        let mut out = Self::zero(targets);
        for (ka, a) in &self.amps {
            for (kb, b) in &other.amps {
                let mut key = ka.clone();
                key.extend_from_slice(kb);
                accumulate(&mut out.amps, key, a.clone() * b.clone());
            }
        }
        out
    }
}

/// Checks `⟨v_i|v_j⟩ = δ_ij` for every pair.
pub fn check_orthonormal<S: Scalar>(vectors: &[&LocalVector<S>]) -> Result<(), String> {
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let ip = a.inner(b);
            let expected = if i == j { Amplitude::one() } else { Amplitude::zero() };
            if !(ip - expected).is_negligible() {
                return Err(format!("vectors {i} and {j} are not orthonormal"));
            }
        }
    }
    Ok(())
}

/// Sparse state vector over a labeled product space. Stored amplitudes are
/// never zero.
#[derive(Clone, Debug)]
pub struct StateVector<S> {
    layout: Arc<SpaceLayout>,
    amps: BTreeMap<BasisKey, Amplitude<S>>,
}

impl<S: Scalar> PartialEq for StateVector<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_layout(other) && self.amps == other.amps
    }
}

impl<S: Scalar> StateVector<S> {
    pub fn zero(layout: Arc<SpaceLayout>) -> Self {
        StateVector {
            layout,
            amps: BTreeMap::new(),
        }
    }

    pub fn ket<L: AsRef<str>>(layout: Arc<SpaceLayout>, labels: &[L]) -> Result<Self, HilbertError> {
        let key = layout.key(labels)?;
        Ok(Self::basis(layout, key))
    }

    pub fn basis(layout: Arc<SpaceLayout>, key: BasisKey) -> Self {
        let mut s = Self::zero(layout);
        s.amps.insert(key, Amplitude::one());
        s
    }

    pub fn from_entries<I>(layout: Arc<SpaceLayout>, entries: I) -> Self
    where
        I: IntoIterator<Item = (BasisKey, Amplitude<S>)>,
    {
        let mut s = Self::zero(layout);
        for (k, a) in entries {
            accumulate(&mut s.amps, k, a);
        }
        s
    }

    pub fn layout(&self) -> &Arc<SpaceLayout> {
        &self.layout
    }

    pub fn same_layout(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.layout, &other.layout) || *self.layout == *other.layout
    }

    fn check_layout(&self, other: &Self) -> Result<(), HilbertError> {
        if self.same_layout(other) {
            Ok(())
        } else {
            Err(HilbertError::LayoutMismatch)
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (&BasisKey, &Amplitude<S>)> {
        self.amps.iter()
    }

    pub fn amplitude(&self, key: &[usize]) -> Amplitude<S> {
        self.amps.get(key).cloned().unwrap_or_else(Amplitude::zero)
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    /// Exact linear combination `Σ a_i s_i`, zero entries pruned.
    pub fn superpose(terms: &[(Amplitude<S>, &StateVector<S>)]) -> Result<Self, HilbertError> {
        let Some((_, first)) = terms.first() else {
            return Err(HilbertError::EmptySuperposition);
        };
        let mut out = Self::zero(first.layout.clone());
        for (a, s) in terms {
            out.check_layout(s)?;
            out.add_scaled(a, s);
        }
        Ok(out)
    }

    pub fn scale(&self, a: &Amplitude<S>) -> Self {
        let mut out = Self::zero(self.layout.clone());
        out.add_scaled(a, self);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self, HilbertError> {
        self.check_layout(other)?;
        let mut out = self.clone();
        out.add_scaled(&Amplitude::one(), other);
        Ok(out)
    }

    fn add_scaled(&mut self, a: &Amplitude<S>, other: &Self) {
        for (k, b) in &other.amps {
            accumulate(&mut self.amps, k.clone(), a.clone() * b.clone());
        }
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Amplitude<S>, HilbertError> {
        self.check_layout(other)?;
        let mut acc = Amplitude::zero();
        for (k, a) in &self.amps {
            if let Some(b) = other.amps.get(k) {
                acc = acc + a.conj_mul(b);
            }
        }
        Ok(acc)
    }

    pub fn norm_sq(&self) -> S {
        self.amps.values().fold(S::zero(), |acc, a| acc + a.norm_sq())
    }

    /// Splits the state along `targets`: for every assignment of the other
    /// factors, the component living on the targets.
    pub fn split(&self, targets: &[usize]) -> BTreeMap<BasisKey, LocalVector<S>> {
        let mut groups: BTreeMap<BasisKey, LocalVector<S>> = BTreeMap::new();
        for (k, a) in &self.amps {
            let mut rest = k.clone();
            let local: BasisKey = targets
                .iter()
                .map(|&t| {
                    let v = k[t];
                    rest[t] = FREE;
                    v
                })
                .collect();
            groups
                .entry(rest)
                .or_insert_with(|| LocalVector::zero(targets.to_vec()))
                .amps
                .insert(local, a.clone());
        }
        groups
    }

    /// Inverse of [`split`](Self::split) for one group: `local ⊗ |rest⟩`.
    pub fn embed(&mut self, rest: &[usize], local: &LocalVector<S>) {
        for (lk, a) in &local.amps {
            let mut key = rest.to_vec();
            for (&t, &v) in local.targets.iter().zip(lk) {
                key[t] = v;
            }
            accumulate(&mut self.amps, key, a.clone());
        }
    }

    /// Keeps only entries whose label at `subsystem` is `label`.
    pub fn filter_label(&self, subsystem: usize, label: usize) -> Self {
        StateVector {
            layout: self.layout.clone(),
            amps: self
                .amps
                .iter()
                .filter(|(k, _)| k[subsystem] == label)
                .map(|(k, a)| (k.clone(), a.clone()))
                .collect(),
        }
    }

    /// One line per nonzero entry: `(<label>,...) : <amplitude>`, in key order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (k, a) in &self.amps {
            out.push_str(&format!("{} : {}\n", self.layout.render_key(k), a));
        }
        out
    }
}

impl<S: Scalar> fmt::Display for StateVector<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Role, Subsystem};
    use crate::numerics::FieldScalar;
    use proptest::prelude::*;

    type Amp = Amplitude<FieldScalar>;

    fn layout() -> Arc<SpaceLayout> {
        Arc::new(
            SpaceLayout::new(vec![
                Subsystem::new("C", ["heads", "tails"], Role::System).unwrap(),
                Subsystem::new("R", ["BLANK", "HEADS", "TAILS"], Role::Record).unwrap(),
            ])
            .unwrap(),
        )
    }

    fn root(n: i64, d: i64) -> Amp {
        Amplitude::real(FieldScalar::sqrt_rational(&crate::numerics::Rational::new(n.into(), d.into())).unwrap())
    }

    #[test]
    fn coin_superposition_is_normalized() {
        let l = layout();
        let h = StateVector::ket(l.clone(), &["heads", "BLANK"]).unwrap();
        let t = StateVector::ket(l.clone(), &["tails", "BLANK"]).unwrap();
        let s = StateVector::superpose(&[(root(1, 3), &h), (root(2, 3), &t)]).unwrap();
        assert_eq!(s.norm_sq(), FieldScalar::one());
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn opposite_terms_cancel_to_empty() {
        let l = layout();
        let t = StateVector::ket(l, &["tails", "TAILS"]).unwrap();
        let s = StateVector::superpose(&[(root(1, 12), &t), (-root(1, 12), &t)]).unwrap();
        assert!(s.is_empty());
        assert!(s.norm_sq().is_zero());
    }

    #[test]
    fn identity_superposition_and_orthonormal_kets() {
        let l = layout();
        let a = StateVector::<FieldScalar>::ket(l.clone(), &["heads", "HEADS"]).unwrap();
        let b = StateVector::ket(l.clone(), &["tails", "TAILS"]).unwrap();
        assert_eq!(StateVector::superpose(&[(Amp::one(), &a)]).unwrap(), a);
        assert!(a.inner(&b).unwrap().is_zero());
        assert_eq!(a.inner(&a).unwrap(), Amp::one());
        assert!(StateVector::<FieldScalar>::ket(l, &["heads", "BANANA"]).is_err());
    }

    #[test]
    fn ok_fail_combinations_are_orthogonal() {
        let l = layout();
        let h = StateVector::ket(l.clone(), &["heads", "HEADS"]).unwrap();
        let t = StateVector::ket(l, &["tails", "TAILS"]).unwrap();
        let ok = StateVector::superpose(&[(root(1, 2), &h), (-root(1, 2), &t)]).unwrap();
        let fail = StateVector::superpose(&[(root(1, 2), &h), (root(1, 2), &t)]).unwrap();
        assert!(ok.inner(&fail).unwrap().is_zero());
        assert_eq!(ok.norm_sq(), FieldScalar::one());
    }

    #[test]
    fn layout_mismatch_detected() {
        let other = Arc::new(
            SpaceLayout::new(vec![Subsystem::new("X", ["0", "1"], Role::System).unwrap()]).unwrap(),
        );
        let a = StateVector::<FieldScalar>::ket(layout(), &["heads", "BLANK"]).unwrap();
        let b = StateVector::ket(other, &["0"]).unwrap();
        assert_eq!(a.inner(&b), Err(HilbertError::LayoutMismatch));
    }

    #[test]
    fn dump_format() {
        let l = layout();
        let h = StateVector::ket(l, &["heads", "HEADS"]).unwrap();
        let s = h.scale(&-root(1, 48));
        assert_eq!(s.dump(), "(heads,HEADS) : -1/12*sqrt3\n");
    }

    fn small_amp() -> impl Strategy<Value = Amp> {
        (-6i64..=6, 1i64..=4, -3i64..=3).prop_map(|(n, d, m)| {
            Amplitude::new(FieldScalar::from_ratio(n, d), FieldScalar::sqrt2() * FieldScalar::from_ratio(m, 2))
        })
    }

    fn random_state() -> impl Strategy<Value = StateVector<FieldScalar>> {
        prop::collection::vec(((0usize..2, 0usize..3), small_amp()), 0..6).prop_map(|entries| {
            StateVector::from_entries(layout(), entries.into_iter().map(|((a, b), amp)| (vec![a, b], amp)))
        })
    }

    proptest! {
        #[test]
        fn inner_is_linear_in_second_argument(a in random_state(), b in random_state(), c in random_state(),
                                             x in small_amp(), y in small_amp()) {
            let combo = StateVector::superpose(&[(x.clone(), &b), (y.clone(), &c)]).unwrap();
            let lhs = a.inner(&combo).unwrap();
            let rhs = x * a.inner(&b).unwrap() + y * a.inner(&c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn superpose_commutes_and_prunes(a in random_state(), b in random_state(), x in small_amp(), y in small_amp()) {
            let ab = StateVector::superpose(&[(x.clone(), &a), (y.clone(), &b)]).unwrap();
            let ba = StateVector::superpose(&[(y, &b), (x, &a)]).unwrap();
            prop_assert!(ab.entries().all(|(_, amp)| !amp.is_zero()));
            prop_assert_eq!(&ab, &ba);
            prop_assert_eq!(ab.norm_sq(), ab.inner(&ab).unwrap().re);
        }

        #[test]
        fn split_embed_roundtrip(a in random_state()) {
            let mut rebuilt = StateVector::zero(a.layout().clone());
            for (rest, local) in a.split(&[1]) {
                rebuilt.embed(&rest, &local);
            }
            prop_assert_eq!(rebuilt, a);
        }
    }
}
