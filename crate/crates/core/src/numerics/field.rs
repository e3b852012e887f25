//! Exact arithmetic in the biquadratic field Q(√2, √3).
//!
//! Every element is stored as `a + b√2 + c√3 + d√6` with rational
//! coordinates. Since 1, √2, √3 and √6 are linearly independent over Q the
//! coordinates are unique, so equality and zero tests are structural.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{NumericsError, Rational};

const SQRT2: f64 = std::f64::consts::SQRT_2;
const SQRT3: f64 = 1.732_050_807_568_877_2;

/// An element `a + b√2 + c√3 + d√6` of Q(√2, √3).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FieldScalar {
    a: Rational,
    b: Rational,
    c: Rational,
    d: Rational,
}

/// An element `u + v√2` of the subfield Q(√2); used for norms and signs.
#[derive(Clone, Debug, PartialEq)]
struct Sqrt2Part {
    u: Rational,
    v: Rational,
}

impl Sqrt2Part {
    fn mul(&self, other: &Self) -> Self {
        let two = Rational::from_integer(BigInt::from(2));
        Sqrt2Part {
            u: &self.u * &other.u + &two * &self.v * &other.v,
            v: &self.u * &other.v + &self.v * &other.u,
        }
    }

    fn sub(&self, other: &Self) -> Self {
        Sqrt2Part {
            u: &self.u - &other.u,
            v: &self.v - &other.v,
        }
    }

    fn scale(&self, k: &Rational) -> Self {
        Sqrt2Part {
            u: &self.u * k,
            v: &self.v * k,
        }
    }

    fn conj(&self) -> Self {
        Sqrt2Part {
            u: self.u.clone(),
            v: -self.v.clone(),
        }
    }

    /// `u² − 2v²`, the rational norm down to Q.
    fn norm(&self) -> Rational {
        let two = Rational::from_integer(BigInt::from(2));
        &self.u * &self.u - two * &self.v * &self.v
    }

    fn signum(&self) -> i8 {
        let su = rational_sign(&self.u);
        let sv = rational_sign(&self.v);
        if su == 0 {
            return sv;
        }
        if sv == 0 || su == sv {
            return su;
        }
        // opposite signs: compare u² against 2v²
        rational_sign(&self.norm()) * su
    }

    fn to_f64(&self) -> f64 {
        let su = rational_sign(&self.u);
        let sv = rational_sign(&self.v);
        if su == 0 || sv == 0 || su == sv {
            rat_f64(&self.u) + rat_f64(&self.v) * SQRT2
        } else {
            // u + v√2 = (u² − 2v²) / (u − v√2); the denominator cannot cancel
            rat_f64(&self.norm()) / (rat_f64(&self.u) - rat_f64(&self.v) * SQRT2)
        }
    }
}

fn rational_sign(r: &Rational) -> i8 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

fn rat_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_positive() {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        }
    })
}

fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

impl FieldScalar {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Self {
        FieldScalar { a, b, c, d }
    }

    pub fn from_rational(r: Rational) -> Self {
        FieldScalar {
            a: r,
            ..Default::default()
        }
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// The coordinates `(a, b, c, d)` of `a + b√2 + c√3 + d√6`.
    pub fn coords(&self) -> (&Rational, &Rational, &Rational, &Rational) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn sqrt2() -> Self {
        FieldScalar {
            b: Rational::one(),
            ..Default::default()
        }
    }

    pub fn sqrt3() -> Self {
        FieldScalar {
            c: Rational::one(),
            ..Default::default()
        }
    }

    pub fn sqrt6() -> Self {
        FieldScalar {
            d: Rational::one(),
            ..Default::default()
        }
    }

    /// Returns the rational value if the element lies in Q.
    pub fn as_rational(&self) -> Option<&Rational> {
        (self.b.is_zero() && self.c.is_zero() && self.d.is_zero()).then_some(&self.a)
    }

    /// Exact positive square root of a non-negative rational `r = q²·m` with
    /// `m ∈ {1, 2, 3, 6}`.
    pub fn sqrt_rational(r: &Rational) -> Result<Self, NumericsError> {
        if r.is_negative() {
            return Err(NumericsError::NotRepresentable(r.to_string()));
        }
        if r.is_zero() {
            return Ok(Self::zero());
        }
        // √(p/q) = √(p·q) / q
        let q = r.denom().clone();
        let n: BigInt = r.numer() * &q;
        for m in [1i64, 2, 3, 6] {
            let m_big = BigInt::from(m);
            if (&n % &m_big).is_zero() {
                let rest = &n / &m_big;
                let s = rest.sqrt();
                if &s * &s == rest {
                    let coeff = Rational::new(s, q.clone());
                    let mut out = Self::zero();
                    match m {
                        1 => out.a = coeff,
                        2 => out.b = coeff,
                        3 => out.c = coeff,
                        _ => out.d = coeff,
                    }
                    return Ok(out);
                }
            }
        }
        Err(NumericsError::NotRepresentable(r.to_string()))
    }

    /// Square root when the element is a rational with a representable root.
    pub fn try_sqrt(&self) -> Option<Self> {
        self.as_rational().and_then(|r| Self::sqrt_rational(r).ok())
    }

    /// Splits `x = P + Q√3` with `P, Q ∈ Q(√2)`.
    fn split(&self) -> (Sqrt2Part, Sqrt2Part) {
        (
            Sqrt2Part {
                u: self.a.clone(),
                v: self.b.clone(),
            },
            Sqrt2Part {
                u: self.c.clone(),
                v: self.d.clone(),
            },
        )
    }

    fn join(p: Sqrt2Part, q: Sqrt2Part) -> Self {
        FieldScalar {
            a: p.u,
            b: p.v,
            c: q.u,
            d: q.v,
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let (p, q) = self.split();
        // 1/(P + Q√3) = (P − Q√3) / (P² − 3Q²)
        let n = p.mul(&p).sub(&q.mul(&q).scale(&int(3)));
        // 1/(u + v√2) = (u − v√2) / (u² − 2v²)
        let n_norm = n.norm();
        let n_inv = n.conj().scale(&n_norm.recip());
        let num_p = p.mul(&n_inv);
        let num_q = q.mul(&n_inv);
        Some(Self::join(
            num_p,
            Sqrt2Part {
                u: -num_q.u,
                v: -num_q.v,
            },
        ))
    }

    /// Exact sign: -1, 0 or 1.
    pub fn signum(&self) -> i8 {
        let (p, q) = self.split();
        let sp = p.signum();
        let sq = q.signum();
        if sp == 0 {
            return sq;
        }
        if sq == 0 || sp == sq {
            return sp;
        }
        let n = p.mul(&p).sub(&q.mul(&q).scale(&int(3)));
        n.signum() * sp
    }

    /// Floating-point value. Cancellation between the rational and irrational
    /// parts is avoided by rewriting through conjugates.
    pub fn to_f64(&self) -> f64 {
        let (p, q) = self.split();
        let sp = p.signum();
        let sq = q.signum();
        if sp == 0 || sq == 0 || sp == sq {
            p.to_f64() + q.to_f64() * SQRT3
        } else {
            let n = p.mul(&p).sub(&q.mul(&q).scale(&int(3)));
            n.to_f64() / (p.to_f64() - q.to_f64() * SQRT3)
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }
}

impl Zero for FieldScalar {
    fn zero() -> Self {
        FieldScalar::default()
    }

    fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }
}

impl One for FieldScalar {
    fn one() -> Self {
        FieldScalar::from_rational(Rational::one())
    }
}

impl Add for FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: FieldScalar) -> FieldScalar {
        &self + &rhs
    }
}

impl<'a> Add<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn add(self, rhs: &FieldScalar) -> FieldScalar {
        FieldScalar {
            a: &self.a + &rhs.a,
            b: &self.b + &rhs.b,
            c: &self.c + &rhs.c,
            d: &self.d + &rhs.d,
        }
    }
}

impl Sub for FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: FieldScalar) -> FieldScalar {
        &self - &rhs
    }
}

impl<'a> Sub<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn sub(self, rhs: &FieldScalar) -> FieldScalar {
        FieldScalar {
            a: &self.a - &rhs.a,
            b: &self.b - &rhs.b,
            c: &self.c - &rhs.c,
            d: &self.d - &rhs.d,
        }
    }
}

impl Neg for FieldScalar {
    type Output = FieldScalar;
    fn neg(self) -> FieldScalar {
        FieldScalar {
            a: -self.a,
            b: -self.b,
            c: -self.c,
            d: -self.d,
        }
    }
}

impl Mul for FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: FieldScalar) -> FieldScalar {
        &self * &rhs
    }
}

impl<'a> Mul<&'a FieldScalar> for &'a FieldScalar {
    type Output = FieldScalar;
    fn mul(self, rhs: &FieldScalar) -> FieldScalar {
        let (a1, b1, c1, d1) = (&self.a, &self.b, &self.c, &self.d);
        let (a2, b2, c2, d2) = (&rhs.a, &rhs.b, &rhs.c, &rhs.d);
        // √2·√2 = 2, √3·√3 = 3, √6·√6 = 6, √2·√3 = √6, √2·√6 = 2√3, √3·√6 = 3√2
        let a = a1 * a2 + int(2) * b1 * b2 + int(3) * c1 * c2 + int(6) * d1 * d2;
        let b = a1 * b2 + b1 * a2 + int(3) * (c1 * d2 + d1 * c2);
        let c = a1 * c2 + c1 * a2 + int(2) * (b1 * d2 + d1 * b2);
        let d = a1 * d2 + d1 * a2 + b1 * c2 + c1 * b2;
        FieldScalar { a, b, c, d }
    }
}

impl Div for FieldScalar {
    type Output = FieldScalar;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: FieldScalar) -> FieldScalar {
        let inv = rhs.recip().expect("division by zero in Q(√2,√3)");
        &self * &inv
    }
}

impl PartialOrd for FieldScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Renders nonzero terms in the order `a + b*sqrt2 + c*sqrt3 + d*sqrt6`,
/// e.g. `1/12`, `-1/12*sqrt3`, `1/2 - 1/4*sqrt6`. Zero renders as `0`.
impl fmt::Display for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = [
            (&self.a, ""),
            (&self.b, "*sqrt2"),
            (&self.c, "*sqrt3"),
            (&self.d, "*sqrt6"),
        ];
        let mut first = true;
        for (coeff, radical) in terms {
            if coeff.is_zero() {
                continue;
            }
            let mag = fmt_rational(&coeff.abs());
            if first {
                if coeff.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coeff.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{mag}{radical}")?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for FieldScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldScalar({self})")
    }
}

fn parse_rational(s: &str) -> Result<Rational, NumericsError> {
    let bad = || NumericsError::Parse(s.to_string());
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(n, d))
        }
        None => Ok(Rational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

/// Parses the rendering produced by `Display`, and the full
/// `a + b*sqrt2 + c*sqrt3 + d*sqrt6` form with zero coefficients spelled out.
impl FromStr for FieldScalar {
    type Err = NumericsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NumericsError::Parse(s.to_string());
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // split into signed terms
        let mut terms = Vec::new();
        let mut current = String::new();
        let mut prev: Option<char> = None;
        for ch in compact.chars() {
            let after_operand = prev.is_some_and(|p| !matches!(p, '+' | '-' | '*' | '/'));
            if (ch == '+' || ch == '-') && after_operand {
                terms.push(std::mem::take(&mut current));
            }
            current.push(ch);
            prev = Some(ch);
        }
        terms.push(current);

        let mut out = FieldScalar::zero();
        for term in terms {
            let (neg, body) = match term.strip_prefix('-') {
                Some(rest) => (true, rest),
                None => (false, term.strip_prefix('+').unwrap_or(&term)),
            };
            let (coeff, slot) = match body.split_once('*') {
                Some((c, rad)) => {
                    let slot = match rad {
                        "sqrt2" => 1,
                        "sqrt3" => 2,
                        "sqrt6" => 3,
                        _ => return Err(bad()),
                    };
                    (parse_rational(c)?, slot)
                }
                None => match body {
                    "sqrt2" => (Rational::one(), 1),
                    "sqrt3" => (Rational::one(), 2),
                    "sqrt6" => (Rational::one(), 3),
                    _ => (parse_rational(body)?, 0),
                },
            };
            let coeff = if neg { -coeff } else { coeff };
            match slot {
                0 => out.a += coeff,
                1 => out.b += coeff,
                2 => out.c += coeff,
                _ => out.d += coeff,
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn fs(a: (i64, i64), b: (i64, i64), c: (i64, i64), d: (i64, i64)) -> FieldScalar {
        FieldScalar::new(q(a.0, a.1), q(b.0, b.1), q(c.0, c.1), q(d.0, d.1))
    }

    fn sqrt_q(n: i64, d: i64) -> FieldScalar {
        FieldScalar::sqrt_rational(&q(n, d)).unwrap()
    }

    #[test]
    fn radical_products_close_in_field() {
        assert_eq!(FieldScalar::sqrt2() * FieldScalar::sqrt3(), FieldScalar::sqrt6());
        assert_eq!(
            FieldScalar::sqrt2() * FieldScalar::sqrt6(),
            FieldScalar::sqrt3() * FieldScalar::from_ratio(2, 1)
        );
        assert_eq!(
            FieldScalar::sqrt3() * FieldScalar::sqrt6(),
            FieldScalar::sqrt2() * FieldScalar::from_ratio(3, 1)
        );
    }

    #[test]
    fn square_of_root_third() {
        let r = sqrt_q(1, 3);
        assert_eq!(r, fs((0, 1), (0, 1), (1, 3), (0, 1)));
        assert_eq!(&r * &r, FieldScalar::from_ratio(1, 3));
    }

    #[test]
    fn twelfth_roots_add_and_cancel() {
        let x = sqrt_q(1, 12);
        assert_eq!(x, fs((0, 1), (0, 1), (1, 6), (0, 1)));
        assert_eq!(&x + &x, fs((0, 1), (0, 1), (1, 3), (0, 1)));
        assert!((&x + &(-x.clone())).is_zero());
    }

    #[test]
    fn sqrt_rational_cases() {
        assert_eq!(sqrt_q(3, 16), fs((0, 1), (0, 1), (1, 4), (0, 1)));
        assert_eq!(sqrt_q(1, 48), fs((0, 1), (0, 1), (1, 12), (0, 1)));
        assert_eq!(sqrt_q(1, 2), fs((0, 1), (1, 2), (0, 1), (0, 1)));
        assert_eq!(sqrt_q(2, 3), fs((0, 1), (0, 1), (0, 1), (1, 3)));
        assert_eq!(sqrt_q(9, 4), FieldScalar::from_ratio(3, 2));
        assert!(matches!(
            FieldScalar::sqrt_rational(&q(5, 1)),
            Err(NumericsError::NotRepresentable(_))
        ));
        assert!(FieldScalar::sqrt_rational(&q(-1, 4)).is_err());
        assert!(FieldScalar::sqrt_rational(&q(0, 1)).unwrap().is_zero());
    }

    #[test]
    fn tiny_coordinate_is_not_zero() {
        let tiny = Rational::new(BigInt::one(), BigInt::from(10u64).pow(9));
        let x = FieldScalar::new(Rational::zero(), Rational::zero(), Rational::zero(), tiny);
        assert!(!x.is_zero());
    }

    #[test]
    fn float_values() {
        assert!((sqrt_q(2, 3).to_f64() - 0.816_496_580_927_726).abs() < 1e-12);
        // 1393 − 985√2 ≈ −3.5897e-4 suffers heavy cancellation when summed naively
        let x = fs((1393, 1), (-985, 1), (0, 1), (0, 1));
        let exact = -1.0 / (1393.0 + 985.0 * SQRT2);
        assert!(((x.to_f64() - exact) / exact).abs() < 1e-14);
        // (√3 − √2)^4 = 49 − 20√6
        let y = fs((49, 1), (0, 1), (0, 1), (-20, 1));
        let exact = 1.0 / (49.0 + 20.0 * 6f64.sqrt());
        assert!(((y.to_f64() - exact) / exact).abs() < 1e-14);
    }

    #[test]
    fn signs_and_order() {
        assert_eq!(fs((1393, 1), (-985, 1), (0, 1), (0, 1)).signum(), -1);
        assert_eq!(fs((-1393, 1), (985, 1), (0, 1), (0, 1)).signum(), 1);
        assert_eq!(fs((1394, 1), (-985, 1), (0, 1), (0, 1)).signum(), 1);
        assert_eq!(fs((49, 1), (0, 1), (0, 1), (-20, 1)).signum(), 1);
        assert_eq!(fs((0, 1), (1, 1), (-1, 1), (0, 1)).signum(), -1);
        assert!(FieldScalar::from_ratio(1, 12) < FieldScalar::from_ratio(3, 4));
        assert!(FieldScalar::sqrt2() < FieldScalar::sqrt3());
    }

    #[test]
    fn recip_of_mixed_element() {
        let x = fs((1, 2), (-1, 3), (2, 1), (1, 5));
        let inv = x.recip().unwrap();
        assert_eq!(&x * &inv, FieldScalar::one());
        assert!(FieldScalar::zero().recip().is_none());
    }

    #[test]
    fn render_and_parse() {
        assert_eq!(FieldScalar::from_ratio(1, 12).to_string(), "1/12");
        assert_eq!(sqrt_q(3, 16).to_string(), "1/4*sqrt3");
        assert_eq!((-sqrt_q(1, 48)).to_string(), "-1/12*sqrt3");
        assert_eq!(fs((1, 2), (0, 1), (0, 1), (-1, 4)).to_string(), "1/2 - 1/4*sqrt6");
        assert_eq!(FieldScalar::zero().to_string(), "0");
        let full: FieldScalar = "1/2 + 0*sqrt2 + -3*sqrt3 + 0*sqrt6".parse().unwrap();
        assert_eq!(full, fs((1, 2), (0, 1), (-3, 1), (0, 1)));
        assert!("1/0".parse::<FieldScalar>().is_err());
        assert!("2*sqrt5".parse::<FieldScalar>().is_err());
    }

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-20i64..=20, 1i64..=12).prop_map(|(n, d)| q(n, d))
    }

    fn element() -> impl Strategy<Value = FieldScalar> {
        (small_rational(), small_rational(), small_rational(), small_rational())
            .prop_map(|(a, b, c, d)| FieldScalar::new(a, b, c, d))
    }

    proptest! {
        #[test]
        fn field_axioms(x in element(), y in element(), z in element()) {
            prop_assert_eq!(&(&x + &y) + &z, &x + &(&y + &z));
            prop_assert_eq!(&x * &y, &y * &x);
            prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
            prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
            prop_assert!((&x - &x).is_zero());
        }

        #[test]
        fn float_image_is_multiplicative(x in element(), y in element()) {
            let lhs = (&x * &y).to_f64();
            let rhs = x.to_f64() * y.to_f64();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
        }

        #[test]
        fn pure_radical_squares_are_rational(k in small_rational(), slot in 0usize..4) {
            let mut coords = [Rational::zero(), Rational::zero(), Rational::zero(), Rational::zero()];
            coords[slot] = k;
            let [a, b, c, d] = coords;
            let x = FieldScalar::new(a, b, c, d);
            prop_assert!((&x * &x).as_rational().is_some());
        }

        #[test]
        fn sqrt_rational_squares_back(n in 0i64..200, d in 1i64..200, m in prop::sample::select(vec![1i64, 2, 3, 6])) {
            let r = q(n * n * m, d * d);
            let root = FieldScalar::sqrt_rational(&r).unwrap();
            prop_assert_eq!(&root * &root, FieldScalar::from_rational(r));
            prop_assert!(root.signum() >= 0);
        }

        #[test]
        fn display_parse_roundtrip(x in element()) {
            let back: FieldScalar = x.to_string().parse().unwrap();
            prop_assert_eq!(back, x);
        }

        #[test]
        fn exact_sign_matches_float(x in element()) {
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum() as f64, f.signum());
            }
        }
    }
}
