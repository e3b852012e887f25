use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::Scalar;

/// A complex amplitude `re + i·im` over a real scalar type.
#[derive(Clone, Debug, PartialEq)]
pub struct Amplitude<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Amplitude<S> {
    pub fn new(re: S, im: S) -> Self {
        Amplitude { re, im }
    }

    pub fn real(re: S) -> Self {
        Amplitude { re, im: S::zero() }
    }

    pub fn conj(&self) -> Self {
        Amplitude {
            re: self.re.clone(),
            im: -self.im.clone(),
        }
    }

    /// `|z|²`
    pub fn norm_sq(&self) -> S {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    pub fn is_negligible(&self) -> bool {
        self.re.is_negligible() && self.im.is_negligible()
    }

    pub fn scale(&self, k: &S) -> Self {
        Amplitude {
            re: self.re.clone() * k.clone(),
            im: self.im.clone() * k.clone(),
        }
    }

    /// `conj(self) · other`
    pub fn conj_mul(&self, other: &Self) -> Self {
        self.conj() * other.clone()
    }
}

impl<S: Scalar> Zero for Amplitude<S> {
    fn zero() -> Self {
        Amplitude::real(S::zero())
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<S: Scalar> One for Amplitude<S> {
    fn one() -> Self {
        Amplitude::real(S::one())
    }
}

impl<S: Scalar> Add for Amplitude<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Amplitude {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<S: Scalar> Sub for Amplitude<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Amplitude {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<S: Scalar> Neg for Amplitude<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Amplitude {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl<S: Scalar> Mul for Amplitude<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Amplitude { re, im }
    }
}

/// Real amplitudes render as the bare scalar; complex ones as `re + (im)i`.
impl<S: Scalar> fmt::Display for Amplitude<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "({})i", self.im)
        } else {
            write!(f, "{} + ({})i", self.re, self.im)
        }
    }
}
