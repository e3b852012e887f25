use super::state::{check_orthonormal, LocalVector, StateVector};
use super::HilbertError;
use crate::numerics::{Amplitude, Scalar};

/// A linear map specified only on the span of its input vectors:
/// `in_k ↦ out_k`, acting on `targets` and as the identity elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialIsometry<S> {
    targets: Vec<usize>,
    pairs: Vec<(LocalVector<S>, LocalVector<S>)>,
}

impl<S: Scalar> PartialIsometry<S> {
    /// Inputs and outputs must each be orthonormal families on `targets`.
    pub fn new(targets: Vec<usize>, pairs: Vec<(LocalVector<S>, LocalVector<S>)>) -> Result<Self, HilbertError> {
        for (i, o) in &pairs {
            if i.targets() != targets.as_slice() || o.targets() != targets.as_slice() {
                return Err(HilbertError::TargetMismatch);
            }
        }
        let inputs: Vec<_> = pairs.iter().map(|(i, _)| i).collect();
        check_orthonormal(&inputs).map_err(|d| HilbertError::NonIsometric(format!("inputs: {d}")))?;
        let outputs: Vec<_> = pairs.iter().map(|(_, o)| o).collect();
        check_orthonormal(&outputs).map_err(|d| HilbertError::NonIsometric(format!("outputs: {d}")))?;
        Ok(PartialIsometry { targets, pairs })
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn pairs(&self) -> &[(LocalVector<S>, LocalVector<S>)] {
        &self.pairs
    }

    /// Applies the map. Fails with `SupportOutsideDomain` if some component
    /// of the state on the targets is not in the span of the inputs.
    pub fn apply(&self, s: &StateVector<S>) -> Result<StateVector<S>, HilbertError> {
        let layout = s.layout();
        let mut out = StateVector::zero(layout.clone());
        for (rest, local) in s.split(&self.targets) {
            let mut residual = local.clone();
            let mut image = LocalVector::zero(self.targets.clone());
            for (input, output) in &self.pairs {
                let c = input.inner(&local);
                if c.is_negligible() {
                    continue;
                }
                residual.add_scaled(&-c.clone(), input);
                image.add_scaled(&c, output);
            }
            if !residual.is_zero() {
                let (k, _) = residual.entries().next().expect("nonzero residual");
                let mut key = rest.clone();
                for (&t, &v) in self.targets.iter().zip(k) {
                    key[t] = v;
                }
                return Err(HilbertError::SupportOutsideDomain(layout.render_key(&key)));
            }
            out.embed(&rest, &image);
        }
        Ok(out)
    }

    /// Linear extension that annihilates the complement of the domain.
    /// Agrees with [`apply`](Self::apply) on states inside the domain.
    pub fn apply_extended(&self, s: &StateVector<S>) -> StateVector<S> {
        let mut out = StateVector::zero(s.layout().clone());
        for (rest, local) in s.split(&self.targets) {
            let mut image = LocalVector::zero(self.targets.clone());
            for (input, output) in &self.pairs {
                let c = input.inner(&local);
                if !c.is_negligible() {
                    image.add_scaled(&c, output);
                }
            }
            out.embed(&rest, &image);
        }
        out
    }
}

/// One-shot form of [`PartialIsometry::apply`].
pub fn apply_partial_isometry<S: Scalar>(
    s: &StateVector<S>,
    targets: Vec<usize>,
    pairs: Vec<(LocalVector<S>, LocalVector<S>)>,
) -> Result<StateVector<S>, HilbertError> {
    PartialIsometry::new(targets, pairs)?.apply(s)
}

/// `Σ_k ⟨in_k|local⟩ in_k`, used by callers that only need the projection.
pub(crate) fn project_onto<S: Scalar>(local: &LocalVector<S>, family: &[&LocalVector<S>]) -> LocalVector<S> {
    let mut out = LocalVector::zero(local.targets().to_vec());
    for v in family {
        let c: Amplitude<S> = v.inner(local);
        out.add_scaled(&c, v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{Role, SpaceLayout, Subsystem};
    use crate::numerics::{FieldScalar, Rational};
    use num_traits::One;
    use proptest::prelude::*;
    use std::sync::Arc;

    type Amp = Amplitude<FieldScalar>;

    fn half_root2() -> Amp {
        Amplitude::real(FieldScalar::sqrt_rational(&Rational::new(1.into(), 2.into())).unwrap())
    }

    // C ⊗ L̄ ⊗ W̄ with the coin absorbed into the record pair
    fn layout() -> Arc<SpaceLayout> {
        Arc::new(
            SpaceLayout::new(vec![
                Subsystem::new("C", ["heads", "tails"], Role::System).unwrap(),
                Subsystem::new("Lbar", ["BLANK", "HEADS", "TAILS"], Role::Record).unwrap(),
                Subsystem::new("Wbar", ["READY", "FAIL", "OK"], Role::Record).unwrap(),
            ])
            .unwrap(),
        )
    }

    fn lv(entries: &[(&[usize], Amp)]) -> LocalVector<FieldScalar> {
        LocalVector::from_entries(vec![0, 1, 2], entries.iter().map(|(k, a)| (k.to_vec(), a.clone())))
    }

    fn wbar_pairs() -> Vec<(LocalVector<FieldScalar>, LocalVector<FieldScalar>)> {
        let r = half_root2();
        let ok_ready = lv(&[(&[0, 1, 0], r.clone()), (&[1, 2, 0], -r.clone())]);
        let fail_ready = lv(&[(&[0, 1, 0], r.clone()), (&[1, 2, 0], r.clone())]);
        let ok_ok = lv(&[(&[0, 1, 2], r.clone()), (&[1, 2, 2], -r.clone())]);
        let fail_fail = lv(&[(&[0, 1, 1], r.clone()), (&[1, 2, 1], r)]);
        vec![(ok_ready, ok_ok), (fail_ready, fail_fail)]
    }

    #[test]
    fn heads_ready_splits_into_ok_and_fail() {
        let l = layout();
        let s = StateVector::ket(l.clone(), &["heads", "HEADS", "READY"]).unwrap();
        let out = apply_partial_isometry(&s, vec![0, 1, 2], wbar_pairs()).unwrap();
        let half = Amplitude::real(FieldScalar::from_ratio(1, 2));
        let expected = StateVector::from_entries(
            l,
            [
                (vec![0, 1, 1], half.clone()),
                (vec![1, 2, 1], half.clone()),
                (vec![0, 1, 2], half.clone()),
                (vec![1, 2, 2], -half),
            ],
        );
        assert_eq!(out, expected);
        assert_eq!(out.norm_sq(), FieldScalar::one());
    }

    #[test]
    fn identity_pairs_leave_state_unchanged() {
        let l = layout();
        let s = StateVector::ket(l, &["tails", "TAILS", "READY"]).unwrap();
        let pairs = vec![(lv(&[(&[1, 2, 0], Amp::one())]), lv(&[(&[1, 2, 0], Amp::one())]))];
        assert_eq!(apply_partial_isometry(&s, vec![0, 1, 2], pairs).unwrap(), s);
    }

    #[test]
    fn device_not_ready_is_outside_domain() {
        let l = layout();
        let s = StateVector::ket(l, &["heads", "HEADS", "OK"]).unwrap();
        assert!(matches!(
            apply_partial_isometry(&s, vec![0, 1, 2], wbar_pairs()),
            Err(HilbertError::SupportOutsideDomain(_))
        ));
    }

    #[test]
    fn non_orthonormal_pairs_rejected() {
        let one = Amp::one();
        let pairs = vec![
            (lv(&[(&[0, 1, 0], one.clone())]), lv(&[(&[0, 1, 1], one.clone())])),
            (lv(&[(&[0, 1, 0], one.clone())]), lv(&[(&[0, 1, 2], one)])),
        ];
        assert!(matches!(
            PartialIsometry::new(vec![0, 1, 2], pairs),
            Err(HilbertError::NonIsometric(_))
        ));
    }

    proptest! {
        #[test]
        fn norm_preserved_inside_domain(x in -5i64..=5, y in -5i64..=5, z in -5i64..=5, w in -5i64..=5) {
            // arbitrary combination of the two domain vectors, in two spectator-free branches
            let pairs = wbar_pairs();
            let mut local = LocalVector::zero(vec![0, 1, 2]);
            local.add_scaled(&Amplitude::new(FieldScalar::from_ratio(x, 3), FieldScalar::from_ratio(w, 7)), &pairs[0].0);
            local.add_scaled(&Amplitude::real(FieldScalar::from_ratio(y, 2) + FieldScalar::sqrt3() * FieldScalar::from_ratio(z, 5)), &pairs[1].0);
            let mut s = StateVector::zero(layout());
            s.embed(&[usize::MAX; 3], &local);
            let out = PartialIsometry::new(vec![0, 1, 2], pairs).unwrap().apply(&s).unwrap();
            prop_assert_eq!(out.norm_sq(), s.norm_sq());
        }
    }
}
