//! Fibonacci numbers `F_1 = F_2 = 1, F_{i+2} = F_{i+1} + F_i` and exact
//! checks of the identities and inequalities they satisfy.

use std::sync::{LazyLock, RwLock};

use num_bigint::{BigInt, BigUint};

use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};
use crate::sequences::{Sequence, SequenceDescriptor};

/// Append-only table, `values[i] = F_i` (slot 0 holds F_0 = 0 and is never
/// handed out).
struct FibCache {
    values: RwLock<Vec<BigUint>>,
}

static CACHE: LazyLock<FibCache> = LazyLock::new(|| FibCache {
    values: RwLock::new(vec![BigUint::from(0u32), BigUint::from(1u32), BigUint::from(1u32)]),
});

impl FibCache {
    fn get(&self, n: usize) -> BigUint {
        {
            let values = self.values.read().expect("fib cache poisoned");
            if let Some(v) = values.get(n) {
                return v.clone();
            }
        }
        let mut values = self.values.write().expect("fib cache poisoned");
        while values.len() <= n {
            let len = values.len();
            let next = &values[len - 1] + &values[len - 2];
            values.push(next);
        }
        values[n].clone()
    }
}

/// F_n for n ≥ 1. Panics on n = 0.
pub fn fib(n: usize) -> BigUint {
    assert!(n >= 1, "Fibonacci indices start at 1");
    CACHE.get(n)
}

fn fib_int(n: usize) -> BigInt {
    BigInt::from(fib(n))
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::Precondition(msg()))
    }
}

/// `F_n² = F_{n−1}F_{n+1} + (−1)^{n+1}`, checked in big integers.
pub fn cassini_check(n: usize) -> Result<bool> {
    require(n >= 2, || format!("cassini needs n >= 2, got {n}"))?;
    let sign = if n % 2 == 1 { 1 } else { -1 };
    let lhs = fib_int(n) * fib_int(n);
    let rhs = fib_int(n - 1) * fib_int(n + 1) + BigInt::from(sign);
    Ok(lhs == rhs)
}

/// Result of [`binet_nearest_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinetReport {
    pub n: usize,
    /// `F_n − φ^n/√5`, exactly.
    pub deviation: QuadRat,
    /// |deviation| < 1/2, i.e. F_n is the nearest integer to φ^n/√5.
    pub nearest: bool,
    /// F_n = (φ^n + (−1)^{n+1} φ^{−n}) / √5 holds in ℚ(√5).
    pub identity: bool,
}

impl BinetReport {
    pub fn holds(&self) -> bool {
        self.nearest && self.identity
    }
}

pub fn binet_nearest_check(n: usize) -> Result<BinetReport> {
    require(n >= 1, || "binet needs n >= 1".into())?;
    let phi = QuadRat::phi();
    let phi_n = phi.pow(n as i64);
    let inv_sqrt5 = QuadRat::new(Rational::zero(), Rational::frac(1, 5));
    let f_n = QuadRat::from(Rational::from_int(fib_int(n)));
    let deviation = &f_n - &(&phi_n * &inv_sqrt5);
    let half = QuadRat::from(Rational::frac(1, 2));
    let nearest = (&half - &deviation).sign() > 0 && (&half + &deviation).sign() > 0;

    let alternating = if n % 2 == 1 { QuadRat::one() } else { -QuadRat::one() };
    let binet = &(&phi_n + &(&alternating * &phi.pow(-(n as i64)))) * &inv_sqrt5;
    Ok(BinetReport {
        n,
        deviation,
        nearest,
        identity: binet == f_n,
    })
}

/// Result of [`lemma31_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DoublingReport {
    pub holds: bool,
    pub equality: bool,
}

/// `F_{n+1} <= 2 F_n`, with a flag for equality.
pub fn lemma31_check(n: usize) -> Result<DoublingReport> {
    require(n >= 1, || "lemma31 needs n >= 1".into())?;
    let next = fib(n + 1);
    let doubled = fib(n) * 2u32;
    Ok(DoublingReport {
        holds: next <= doubled,
        equality: next == doubled,
    })
}

/// Certifies `1/F_k < Σ_{i >= k+2} 1/F_i` for odd k by separating the exact
/// left side from a refined enclosure of the tail.
///
/// Returns `Ok(false)` only if the inequality is certified to fail, which
/// would contradict the theorem; an inseparable case surfaces as
/// [`Error::UndecidedAtCap`].
pub fn lemma51_check(seq: &Sequence, k: usize, width: &Rational) -> Result<bool> {
    require(k >= 1 && k % 2 == 1, || format!("lemma51 needs odd k >= 1, got {k}"))?;
    if !seq.descriptor().is_fibonacci() {
        return Err(Error::Precondition("lemma51 applies to the Fibonacci reciprocals".into()));
    }
    let lhs = QuadRat::from(Rational::from_biguint_recip(&fib(k)));
    // sign of T_{k+1} − 1/F_k
    let sign = seq.sign_affine(&-lhs, &Rational::one(), k + 1, width)?;
    Ok(sign > 0)
}

/// Enclosure of S = Σ 1/F_i with width at most `width`.
pub fn s_constant(width: &Rational) -> Result<Interval> {
    Sequence::new(SequenceDescriptor::FibonacciReciprocal)?.tail_enclosure(0, width)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(fib(1), BigUint::from(1u32));
        assert_eq!(fib(2), BigUint::from(1u32));
        assert_eq!(fib(6), BigUint::from(8u32));
        // independent iterative recomputation
        let (mut a, mut b) = (1u64, 1u64);
        for _ in 2..50 {
            let c = a + b;
            a = b;
            b = c;
        }
        assert_eq!(b, 12_586_269_025);
        assert_eq!(fib(50), BigUint::from(b));
    }

    #[test]
    #[should_panic]
    fn zero_index_panics() {
        fib(0);
    }

    #[test]
    fn cassini_examples() {
        assert!(cassini_check(2).unwrap());
        assert!(cassini_check(3).unwrap());
        assert!(cassini_check(200).unwrap());
        assert!(cassini_check(1).is_err());
    }

    #[test]
    fn binet_examples() {
        for n in [1, 2, 40] {
            let r = binet_nearest_check(n).unwrap();
            assert!(r.holds(), "n = {n}");
        }
        // F_1 − φ/√5 = 1 − (5 + √5)/10
        let r = binet_nearest_check(1).unwrap();
        assert_eq!(r.deviation, "1/2-1/10*sqrt5".parse().unwrap());
    }

    #[test]
    fn doubling_examples() {
        assert_eq!(lemma31_check(2).unwrap(), DoublingReport { holds: true, equality: true });
        assert_eq!(lemma31_check(1).unwrap(), DoublingReport { holds: true, equality: false });
        assert_eq!(lemma31_check(30).unwrap(), DoublingReport { holds: true, equality: false });
    }

    #[test]
    fn lemma51_small_k() {
        let seq = Sequence::new(SequenceDescriptor::FibonacciReciprocal).unwrap();
        let w = Rational::frac(1, 1000);
        for k in [1, 3, 5] {
            assert!(lemma51_check(&seq, k, &w).unwrap());
        }
        assert!(lemma51_check(&seq, 4, &w).is_err());
    }

    #[test]
    fn s_constant_loose_and_tight() {
        let iv = s_constant(&Rational::frac(1, 100)).unwrap();
        assert!(iv.lo() >= &Rational::frac(335, 100) && iv.hi() <= &Rational::frac(337, 100));
        let loose = s_constant(&Rational::from(10)).unwrap();
        assert!(loose.width() <= Rational::from(10));
        assert!(loose.contains_interval(&iv) || loose.intersect(&iv).is_some());
    }
}
