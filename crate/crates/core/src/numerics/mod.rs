//! Scalars and amplitudes.
//!
//! The engine is generic over [`Scalar`]. Two implementations ship:
//! [`FieldScalar`], exact arithmetic in Q(√2, √3), and `f64`, a binary64
//! fallback whose zero test uses a fixed absolute tolerance.

mod amplitude;
mod field;

use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use amplitude::Amplitude;
pub use field::FieldScalar;

/// Arbitrary-precision rational in canonical form.
pub type Rational = num_rational::BigRational;

/// Zero tolerance used by the float fallback.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericsError {
    #[error("{0} has no square root in Q(sqrt2, sqrt3)")]
    NotRepresentable(String),
    #[error("cannot parse scalar {0:?}")]
    Parse(String),
}

impl NumericsError {
    pub fn name(&self) -> &'static str {
        match self {
            NumericsError::NotRepresentable(_) => "NotRepresentable",
            NumericsError::Parse(_) => "Parse",
        }
    }
}

/// The real scalar type the simulator computes with.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether zero tests are exact.
    const EXACT: bool;

    /// Zero test: structural in exact mode, `|x| < FLOAT_TOLERANCE` otherwise.
    fn is_negligible(&self) -> bool;

    fn to_f64(&self) -> f64;

    fn from_rational(r: &Rational) -> Self;

    /// Positive square root of a non-negative rational.
    fn sqrt_rational(r: &Rational) -> Result<Self, NumericsError>;

    /// Square root if it exists in the scalar type.
    fn try_sqrt(&self) -> Option<Self>;

    fn try_recip(&self) -> Option<Self>;

    /// Total order used for ranking weights.
    fn compare(&self, other: &Self) -> Ordering;

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(&Rational::new(numer.into(), denom.into()))
    }
}

impl Scalar for FieldScalar {
    const EXACT: bool = true;

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_f64(&self) -> f64 {
        FieldScalar::to_f64(self)
    }

    fn from_rational(r: &Rational) -> Self {
        FieldScalar::from_rational(r.clone())
    }

    fn sqrt_rational(r: &Rational) -> Result<Self, NumericsError> {
        FieldScalar::sqrt_rational(r)
    }

    fn try_sqrt(&self) -> Option<Self> {
        FieldScalar::try_sqrt(self)
    }

    fn try_recip(&self) -> Option<Self> {
        self.recip()
    }

    fn compare(&self, other: &Self) -> Ordering {
        self.cmp(other)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn is_negligible(&self) -> bool {
        self.abs() < FLOAT_TOLERANCE
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn sqrt_rational(r: &Rational) -> Result<Self, NumericsError> {
        if r.is_negative() {
            return Err(NumericsError::NotRepresentable(r.to_string()));
        }
        Ok(Self::from_rational(r).sqrt())
    }

    fn try_sqrt(&self) -> Option<Self> {
        if *self < -FLOAT_TOLERANCE {
            None
        } else {
            Some(self.max(0.0).sqrt())
        }
    }

    fn try_recip(&self) -> Option<Self> {
        (!self.is_negligible()).then(|| 1.0 / self)
    }

    fn compare(&self, other: &Self) -> Ordering {
        if (self - other).is_negligible() {
            Ordering::Equal
        } else {
            self.total_cmp(other)
        }
    }
}

/// Formats a float with six significant digits, trailing zeros trimmed.
pub fn format_approx(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (5 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            "0".to_string()
        } else {
            s.to_string()
        }
    } else {
        s
    }
}
