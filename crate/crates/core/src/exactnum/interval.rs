use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{QuadRat, Rational};
use crate::error::Error;

/// Closed interval `[lo, hi]` with rational endpoints, used as a certified
/// enclosure of a real number.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Rational,
    hi: Rational,
}

/// Outcome of comparing two enclosures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntervalOrdering {
    Less,
    Greater,
    /// The enclosures intersect; the caller has to refine.
    Overlap,
}

impl Interval {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, Error> {
        if lo > hi {
            return Err(Error::Precondition(format!("interval [{lo}, {hi}] has lo > hi")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Rational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(2)
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_quad(&self, x: &QuadRat) -> bool {
        x >= &QuadRat::from(self.lo.clone()) && x <= &QuadRat::from(self.hi.clone())
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Intersection of two enclosures of the same real; `None` when they are
    /// disjoint, which means one of them was not a valid enclosure.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = std::cmp::max(&self.lo, &other.lo).clone();
        let hi = std::cmp::min(&self.hi, &other.hi).clone();
        (lo <= hi).then_some(Interval { lo, hi })
    }

    /// Widen the endpoints outward onto the grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Interval {
        Interval {
            lo: self.lo.floor_dyadic(bits),
            hi: self.hi.ceil_dyadic(bits),
        }
    }

    pub fn scale(&self, r: &Rational) -> Interval {
        let a = &self.lo * r;
        let b = &self.hi * r;
        if r.signum() >= 0 {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    pub fn shift(&self, r: &Rational) -> Interval {
        Interval {
            lo: &self.lo + r,
            hi: &self.hi + r,
        }
    }

    /// Sign of every point in the interval, if it is the same for all.
    pub fn sign(&self) -> Option<i8> {
        if self.lo.signum() > 0 {
            Some(1)
        } else if self.hi.signum() < 0 {
            Some(-1)
        } else if self.lo.is_zero() && self.hi.is_zero() {
            Some(0)
        } else {
            None
        }
    }
}

pub fn interval_cmp(x: &Interval, y: &Interval) -> IntervalOrdering {
    if x.hi < y.lo {
        IntervalOrdering::Less
    } else if x.lo > y.hi {
        IntervalOrdering::Greater
    } else {
        IntervalOrdering::Overlap
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Add<&Interval> for &Interval {
    type Output = Interval;
    fn add(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &rhs.lo,
            hi: &self.hi + &rhs.hi,
        }
    }
}

impl Sub<&Interval> for &Interval {
    type Output = Interval;
    fn sub(self, rhs: &Interval) -> Interval {
        Interval {
            lo: &self.lo - &rhs.hi,
            hi: &self.hi - &rhs.lo,
        }
    }
}

impl Mul<&Interval> for &Interval {
    type Output = Interval;
    fn mul(self, rhs: &Interval) -> Interval {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().expect("nonempty").clone();
        let hi = products.iter().max().expect("nonempty").clone();
        Interval { lo, hi }
    }
}

impl Neg for &Interval {
    type Output = Interval;
    fn neg(self) -> Interval {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

impl Add for Interval {
    type Output = Interval;
    fn add(self, rhs: Interval) -> Interval {
        &self + &rhs
    }
}

impl Sub for Interval {
    type Output = Interval;
    fn sub(self, rhs: Interval) -> Interval {
        &self - &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: i64, hi: i64) -> Interval {
        Interval::new(Rational::from(lo), Rational::from(hi)).unwrap()
    }

    #[test]
    fn cmp_examples() {
        assert_eq!(interval_cmp(&iv(0, 1), &iv(2, 3)), IntervalOrdering::Less);
        assert_eq!(interval_cmp(&iv(0, 2), &iv(1, 3)), IntervalOrdering::Overlap);
        assert_eq!(interval_cmp(&iv(5, 6), &iv(1, 2)), IntervalOrdering::Greater);
        assert_eq!(interval_cmp(&iv(0, 1), &iv(1, 2)), IntervalOrdering::Overlap);
    }

    #[test]
    fn rejects_inverted() {
        assert!(Interval::new(Rational::one(), Rational::zero()).is_err());
    }

    #[test]
    fn mul_handles_signs() {
        assert_eq!(&iv(-2, 3) * &iv(-5, 1), iv(-15, 10));
        assert_eq!(&iv(1, 2) - &iv(1, 2), iv(-1, 1));
        assert_eq!(-&iv(1, 2), iv(-2, -1));
        assert_eq!(iv(1, 2).scale(&Rational::from(-3)), iv(-6, -3));
    }

    #[test]
    fn sign_and_intersection() {
        assert_eq!(iv(1, 2).sign(), Some(1));
        assert_eq!(iv(-2, -1).sign(), Some(-1));
        assert_eq!(iv(0, 0).sign(), Some(0));
        assert_eq!(iv(0, 1).sign(), None);
        assert_eq!(iv(0, 2).intersect(&iv(1, 3)), Some(iv(1, 2)));
        assert_eq!(iv(0, 1).intersect(&iv(2, 3)), None);
    }
}
