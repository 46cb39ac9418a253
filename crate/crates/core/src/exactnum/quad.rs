use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use super::{Interval, Rational};
use crate::error::Error;

/// Element `a + b·√5` of the field ℚ(√5).
///
/// The pair `(a, b)` is unique for each real value since √5 is irrational,
/// so structural equality is numeric equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QuadRat {
    a: Rational,
    b: Rational,
}

impl QuadRat {
    pub fn new(a: Rational, b: Rational) -> Self {
        QuadRat { a, b }
    }

    pub fn rational(a: Rational) -> Self {
        QuadRat { a, b: Rational::zero() }
    }

    pub fn zero() -> Self {
        QuadRat::default()
    }

    pub fn one() -> Self {
        QuadRat::rational(Rational::one())
    }

    pub fn sqrt5() -> Self {
        QuadRat::new(Rational::zero(), Rational::one())
    }

    /// The golden ratio (1 + √5)/2.
    pub fn phi() -> Self {
        QuadRat::new(Rational::frac(1, 2), Rational::frac(1, 2))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.a)
    }

    /// Galois conjugate `a − b·√5`.
    pub fn conjugate(&self) -> Self {
        QuadRat::new(self.a.clone(), -&self.b)
    }

    /// Field norm `a² − 5b²`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from(5) * &self.b * &self.b
    }

    pub fn sign(&self) -> i8 {
        quad_sign(self)
    }

    pub fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(QuadRat::new(&self.a / &n, -(&self.b / &n)))
    }

    pub fn checked_div(&self, rhs: &QuadRat) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }

    pub fn abs(&self) -> Self {
        if self.sign() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    /// Exponentiation by squaring; negative exponents invert first.
    /// Panics when raising zero to a negative power.
    pub fn pow(&self, exp: i64) -> Self {
        let mut base = if exp < 0 {
            self.recip().expect("zero to a negative power")
        } else {
            self.clone()
        };
        let mut e = exp.unsigned_abs();
        let mut acc = QuadRat::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        QuadRat::new(&self.a * r, &self.b * r)
    }

    /// Enclosure of the real value with `hi − lo <= width`.
    pub fn to_interval(&self, width: &Rational) -> Interval {
        quad_to_interval(self, width)
    }
}

/// Exact sign of `a + b√5`.
///
/// When `a` and `b` disagree in sign the larger of `a²` and `5b²` wins.
pub fn quad_sign(x: &QuadRat) -> i8 {
    let sa = x.a.signum();
    let sb = x.b.signum();
    if sa == 0 {
        return sb;
    }
    if sb == 0 || sa == sb {
        return sa;
    }
    let a2 = &x.a * &x.a;
    let b2 = Rational::from(5) * &x.b * &x.b;
    match a2.cmp(&b2) {
        Ordering::Greater => sa,
        Ordering::Less => sb,
        Ordering::Equal => unreachable!("a² = 5b² with b ≠ 0 would make √5 rational"),
    }
}

/// Bracket `[j/2^k, (j+1)/2^k]` around √5 with `j = ⌊√5·2^k⌋`.
///
/// This is the bracket that `k` bisection halvings of `[2, 3]` reach on
/// `t² = 5`, computed through an integer square root.
pub fn sqrt5_bracket(bits: u32) -> (Rational, Rational) {
    let radicand = BigUint::from(5u32) << (2 * bits as usize);
    let j = BigInt::from(radicand.sqrt());
    let den = BigInt::one() << bits as usize;
    (
        Rational::new(j.clone(), den.clone()).expect("nonzero"),
        Rational::new(j + 1, den).expect("nonzero"),
    )
}

pub fn quad_to_interval(x: &QuadRat, width: &Rational) -> Interval {
    assert!(width.signum() > 0, "width must be positive");
    if x.b.is_zero() {
        return Interval::point(x.a.clone());
    }
    // the enclosure width is |b|·2^-k
    let target = width / x.b.abs();
    let bits = target.bits_below();
    let (lo, hi) = sqrt5_bracket(bits);
    let (lo, hi) = if x.b.signum() > 0 {
        (&x.a + &x.b * &lo, &x.a + &x.b * &hi)
    } else {
        (&x.a + &x.b * &hi, &x.a + &x.b * &lo)
    };
    Interval::new(lo, hi).expect("ordered by construction")
}

impl PartialOrd for QuadRat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QuadRat {
    fn cmp(&self, other: &Self) -> Ordering {
        quad_sign(&(self - other)).cmp(&0)
    }
}

impl From<Rational> for QuadRat {
    fn from(r: Rational) -> Self {
        QuadRat::rational(r)
    }
}

impl From<i64> for QuadRat {
    fn from(n: i64) -> Self {
        QuadRat::rational(Rational::from(n))
    }
}

impl fmt::Display for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            return write!(f, "{}", self.a);
        }
        let coeff = |f: &mut fmt::Formatter<'_>, b: &Rational| {
            if b.abs() == Rational::one() {
                write!(f, "sqrt5")
            } else {
                write!(f, "{}*sqrt5", b.abs())
            }
        };
        if !self.a.is_zero() {
            write!(f, "{}", self.a)?;
            f.write_str(if self.b.signum() > 0 { "+" } else { "-" })?;
        } else if self.b.signum() < 0 {
            f.write_str("-")?;
        }
        coeff(f, &self.b)
    }
}

impl fmt::Debug for QuadRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for QuadRat {
    type Err = Error;

    /// Accepts `"3/7"`, `"1/2+1/2*sqrt5"`, `"1-sqrt5"`, `"-2*sqrt5"` and
    /// decimals for either coefficient.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(rest) = s.strip_suffix("sqrt5") else {
            return Ok(QuadRat::rational(s.parse()?));
        };
        let rest = rest.strip_suffix('*').unwrap_or(rest);
        let rest_chars: Vec<(usize, char)> = rest.char_indices().collect();
        let split = rest_chars
            .iter()
            .skip(1)
            .find(|(_, c)| *c == '+' || *c == '-')
            .map(|(i, _)| *i);
        let (a_str, b_str) = match split {
            Some(i) => (&rest[..i], &rest[i..]),
            None => ("", rest),
        };
        let a = if a_str.is_empty() {
            Rational::zero()
        } else {
            a_str.parse()?
        };
        let b_str = b_str.strip_prefix('+').unwrap_or(b_str);
        let b = match b_str {
            "" | "+" => Rational::one(),
            "-" => -Rational::one(),
            other => other.parse()?,
        };
        Ok(QuadRat::new(a, b))
    }
}

impl Neg for QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat::new(-self.a, -self.b)
    }
}

impl Neg for &QuadRat {
    type Output = QuadRat;
    fn neg(self) -> QuadRat {
        QuadRat::new(-&self.a, -&self.b)
    }
}

impl Add<&QuadRat> for &QuadRat {
    type Output = QuadRat;
    fn add(self, rhs: &QuadRat) -> QuadRat {
        QuadRat::new(&self.a + &rhs.a, &self.b + &rhs.b)
    }
}

impl Sub<&QuadRat> for &QuadRat {
    type Output = QuadRat;
    fn sub(self, rhs: &QuadRat) -> QuadRat {
        QuadRat::new(&self.a - &rhs.a, &self.b - &rhs.b)
    }
}

impl Mul<&QuadRat> for &QuadRat {
    type Output = QuadRat;
    fn mul(self, rhs: &QuadRat) -> QuadRat {
        let a = &self.a * &rhs.a + Rational::from(5) * &self.b * &rhs.b;
        let b = &self.a * &rhs.b + &self.b * &rhs.a;
        QuadRat::new(a, b)
    }
}

impl Div<&QuadRat> for &QuadRat {
    type Output = QuadRat;
    /// Panics on division by zero.
    fn div(self, rhs: &QuadRat) -> QuadRat {
        self.checked_div(rhs).expect("division by zero in Q(sqrt5)")
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: QuadRat) -> QuadRat {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&QuadRat> for QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: &QuadRat) -> QuadRat {
                $trait::$method(&self, rhs)
            }
        }
        impl $trait<QuadRat> for &QuadRat {
            type Output = QuadRat;
            fn $method(self, rhs: QuadRat) -> QuadRat {
                $trait::$method(self, &rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);
owned_binop!(Div, div);

impl std::iter::Sum for QuadRat {
    fn sum<I: Iterator<Item = QuadRat>>(iter: I) -> QuadRat {
        iter.fold(QuadRat::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QuadRat {
        s.parse().unwrap()
    }

    #[test]
    fn sign_examples() {
        assert_eq!(quad_sign(&QuadRat::zero()), 0);
        // 1 − √5: 1² < 5·1²
        assert_eq!(quad_sign(&q("1-sqrt5")), -1);
        // φ − 1: (1/2)² < 5·(1/2)²
        assert_eq!(quad_sign(&q("-1/2+1/2*sqrt5")), 1);
        assert_eq!(quad_sign(&q("3-sqrt5")), 1);
        assert_eq!(quad_sign(&q("-3+sqrt5")), -1);
    }

    #[test]
    fn golden_ratio_identity() {
        let phi = QuadRat::phi();
        assert_eq!(&phi * &phi, &phi + &QuadRat::one());
        assert_eq!(phi.recip().unwrap(), &phi - &QuadRat::one());
    }

    #[test]
    fn parse_forms() {
        assert_eq!(q("1/2+1/2*sqrt5"), QuadRat::phi());
        assert_eq!(q("sqrt5"), QuadRat::sqrt5());
        assert_eq!(q("-sqrt5"), -QuadRat::sqrt5());
        assert_eq!(q("2*sqrt5"), QuadRat::new(Rational::zero(), Rational::from(2)));
        assert_eq!(q("1+-1/3*sqrt5"), QuadRat::new(Rational::one(), Rational::frac(-1, 3)));
        assert_eq!(q("-1/2-1/2*sqrt5"), -QuadRat::phi());
        assert_eq!(q("0.5+0.5*sqrt5"), QuadRat::phi());
        assert_eq!(q("7/3"), QuadRat::from(Rational::frac(7, 3)));
        assert!("1+x*sqrt5".parse::<QuadRat>().is_err());
        assert!("sqrt".parse::<QuadRat>().is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(QuadRat::phi().to_string(), "1/2+1/2*sqrt5");
        assert_eq!(q("1-sqrt5").to_string(), "1-sqrt5");
        assert_eq!(q("-2*sqrt5").to_string(), "-2*sqrt5");
        assert_eq!(QuadRat::zero().to_string(), "0");
    }

    #[test]
    fn interval_examples() {
        let w = Rational::frac(1, 100);
        let iv = quad_to_interval(&QuadRat::phi(), &w);
        assert!(iv.width() <= w);
        assert!(iv.lo() <= &Rational::frac(16180339, 10000000));
        assert!(iv.hi() >= &Rational::frac(16180340, 10000000));
        assert_eq!(quad_to_interval(&QuadRat::zero(), &w), Interval::point(Rational::zero()));
        assert_eq!(quad_to_interval(&QuadRat::one(), &Rational::frac(1, 7)), Interval::point(Rational::one()));
    }

    #[test]
    fn bracket_contains_sqrt5() {
        for bits in [0, 1, 5, 64, 200] {
            let (lo, hi) = sqrt5_bracket(bits);
            assert!(&lo * &lo < Rational::from(5));
            assert!(&hi * &hi > Rational::from(5));
        }
        assert_eq!(sqrt5_bracket(0), (Rational::from(2), Rational::from(3)));
    }
}
