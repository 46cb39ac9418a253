//! Sequence families with exact terms, rigorous tail enclosures
//! `T_n = Σ_{i>n} p_i`, and the hypothesis checks imposed on Kakeya-type
//! sequences.

mod checks;
mod descriptor;

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

pub use checks::{
    perturbation_check, CheckReport, IndexVerdict, PerturbationReport, RhoReport, Verdict,
    Witness,
};
pub use descriptor::{PerturbationRule, SequenceDescriptor};

use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};
use crate::fibonacci::fib;

/// How hard undecided comparisons are pushed before giving up.
///
/// Refinement step `r` works at width `w · 2^{-shrink_bits·r}` for
/// `r = 0..=cap`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Refinement {
    pub cap: u32,
    pub shrink_bits: u32,
}

impl Default for Refinement {
    fn default() -> Self {
        Refinement {
            cap: 40,
            shrink_bits: 16,
        }
    }
}

impl Refinement {
    pub fn with_cap(cap: u32) -> Self {
        Refinement {
            cap,
            ..Refinement::default()
        }
    }

    fn width_at(&self, start: &Rational, step: u32) -> Rational {
        let den = BigInt::one() << (self.shrink_bits as usize * step as usize);
        start / Rational::from(den)
    }
}

/// Upper limit on the number of explicit terms a tail enclosure may sum.
const MAX_TAIL_TERMS: usize = 1 << 20;

/// A sequence descriptor together with its caches.
///
/// Cloning is cheap and clones share caches. All caches are append-only or
/// keyed by exact inputs, so results never depend on call order or thread
/// interleaving.
#[derive(Clone)]
pub struct Sequence {
    inner: Arc<Inner>,
}

struct Inner {
    desc: SequenceDescriptor,
    refinement: Refinement,
    terms: Mutex<Vec<QuadRat>>,
    prefix_sums: Mutex<Vec<QuadRat>>,
    tails: Mutex<HashMap<(usize, Rational), Interval>>,
}

impl std::fmt::Debug for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Sequence")
            .field("desc", &self.inner.desc)
            .field("refinement", &self.inner.refinement)
            .finish()
    }
}

impl Sequence {
    pub fn new(desc: SequenceDescriptor) -> Result<Self> {
        Self::with_refinement(desc, Refinement::default())
    }

    pub fn with_refinement(desc: SequenceDescriptor, refinement: Refinement) -> Result<Self> {
        desc.validate()?;
        Ok(Sequence {
            inner: Arc::new(Inner {
                desc,
                refinement,
                terms: Mutex::new(Vec::new()),
                prefix_sums: Mutex::new(vec![QuadRat::zero()]),
                tails: Mutex::new(HashMap::new()),
            }),
        })
    }

    pub fn fibonacci() -> Self {
        Sequence::new(SequenceDescriptor::FibonacciReciprocal).expect("valid descriptor")
    }

    pub fn descriptor(&self) -> &SequenceDescriptor {
        &self.inner.desc
    }

    pub fn refinement(&self) -> Refinement {
        self.inner.refinement
    }

    /// Number of terms for finite sequences.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        self.inner.desc.len()
    }

    fn compute_term(&self, i: usize) -> QuadRat {
        match &self.inner.desc {
            SequenceDescriptor::Geometric { q } => q.pow(-(i as i64)),
            SequenceDescriptor::FibonacciReciprocal => {
                QuadRat::from(Rational::from_biguint_recip(&fib(i)))
            }
            SequenceDescriptor::PerturbedGeometric { q, rule } => {
                let denom = &q.pow(i as i64) * &(&QuadRat::one() + &rule.epsilon(i));
                &rule.normalization() / &denom
            }
            SequenceDescriptor::CustomFinite { terms, .. } => QuadRat::from(terms[i - 1].clone()),
        }
    }

    /// The exact i-th term, i ≥ 1.
    pub fn term(&self, i: usize) -> Result<QuadRat> {
        if i == 0 {
            return Err(Error::Precondition("term indices start at 1".into()));
        }
        if let Some(len) = self.len() {
            if i > len {
                return Err(Error::IndexOutOfRange { index: i, len });
            }
        }
        let mut terms = self.inner.terms.lock().expect("term cache poisoned");
        while terms.len() < i {
            let next = self.compute_term(terms.len() + 1);
            terms.push(next);
        }
        Ok(terms[i - 1].clone())
    }

    /// Σ_{i ≤ m} p_i, exactly.
    pub fn partial_sum(&self, m: usize) -> Result<QuadRat> {
        {
            let sums = self.inner.prefix_sums.lock().expect("sum cache poisoned");
            if let Some(s) = sums.get(m) {
                return Ok(s.clone());
            }
        }
        let start = self.inner.prefix_sums.lock().expect("sum cache poisoned").len();
        let mut fresh = Vec::new();
        for i in start..=m {
            fresh.push(self.term(i)?);
        }
        let mut sums = self.inner.prefix_sums.lock().expect("sum cache poisoned");
        // another thread may have extended the table meanwhile
        let mut i = sums.len();
        while i <= m {
            let next = sums.last().expect("seeded with zero") + &fresh[i - start];
            sums.push(next);
            i += 1;
        }
        Ok(sums[m].clone())
    }

    /// T_n in closed form, when the family has one.
    pub fn tail_exact(&self, n: usize) -> Option<QuadRat> {
        match &self.inner.desc {
            SequenceDescriptor::Geometric { q } => {
                Some(&q.pow(-(n as i64)) / &(q - &QuadRat::one()))
            }
            _ => None,
        }
    }

    /// Enclosure of T_n = Σ_{i>n} p_i of width at most `width`.
    pub fn tail_enclosure(&self, n: usize, width: &Rational) -> Result<Interval> {
        let (iv, reached) = self.tail_enclosure_best(n, width)?;
        if reached {
            Ok(iv)
        } else {
            Err(Error::UndecidedAtCap {
                what: format!("tail T_{n} of {} to width {width}", self.inner.desc),
                best: Box::new(iv),
            })
        }
    }

    /// Like [`Sequence::tail_enclosure`] but returns the best enclosure even
    /// when the width cannot be met, flagging whether it was.
    pub fn tail_enclosure_best(&self, n: usize, width: &Rational) -> Result<(Interval, bool)> {
        if width.signum() <= 0 {
            return Err(Error::Precondition(format!("width must be positive, got {width}")));
        }
        let key = (n, width.clone());
        if let Some(iv) = self.inner.tails.lock().expect("tail cache poisoned").get(&key) {
            return Ok((iv.clone(), true));
        }
        let (iv, reached) = match &self.inner.desc {
            SequenceDescriptor::Geometric { .. } => {
                let exact = self.tail_exact(n).expect("geometric closed form");
                (exact.to_interval(width), true)
            }
            SequenceDescriptor::FibonacciReciprocal => (self.fibonacci_tail(n, width)?, true),
            SequenceDescriptor::PerturbedGeometric { q, rule } => {
                (self.perturbed_tail(q, *rule, n, width)?, true)
            }
            SequenceDescriptor::CustomFinite {
                terms, tail_ratio, ..
            } => {
                let iv = custom_tail(terms, tail_ratio, n);
                let reached = iv.width() <= *width;
                (iv, reached)
            }
        };
        if reached {
            self.inner
                .tails
                .lock()
                .expect("tail cache poisoned")
                .insert(key, iv.clone());
        }
        Ok((iv, reached))
    }

    /// Partial sum Σ_{i=n+1}^{m} 1/F_i plus the bracket
    /// T_m ∈ [2/F_{m+1}, 3/F_{m+1}], which holds for m ≥ 1 because the ratio
    /// F_i/F_{i+1} stays in [1/2, 2/3] for i ≥ 2.
    fn fibonacci_tail(&self, n: usize, width: &Rational) -> Result<Interval> {
        let half = width / Rational::from(2);
        // smallest m >= max(n, 1) with 1/F_{m+1} <= width/2
        let threshold = half.recip().expect("positive width");
        let mut m = n.max(1);
        while Rational::from_int(BigInt::from(fib(m + 1))) < threshold {
            m += 1;
            if m - n > MAX_TAIL_TERMS {
                return Err(Error::UndecidedAtCap {
                    what: format!("Fibonacci tail T_{n} needs more than {MAX_TAIL_TERMS} terms"),
                    best: Box::new(Interval::new(Rational::zero(), Rational::from(4)).expect("ordered")),
                });
            }
        }
        // every dyadic rounding costs at most one grid step; there are
        // (m - n) terms plus two bracket endpoints
        let steps = Rational::from((m - n + 2) as i64);
        let bits = (&half / &steps).bits_below();
        let scale = BigInt::one() << bits as usize;
        let mut lo_sum = BigInt::zero();
        let mut hi_sum = BigInt::zero();
        for i in n + 1..=m {
            let f = BigInt::from(fib(i));
            let (q, r) = scale.div_rem(&f);
            lo_sum += &q;
            hi_sum += if r.is_zero() { q } else { q + 1 };
        }
        let f_next = BigInt::from(fib(m + 1));
        let (q, _) = (&scale * BigInt::from(2)).div_rem(&f_next);
        lo_sum += q;
        let (q, r) = (&scale * BigInt::from(3)).div_rem(&f_next);
        hi_sum += if r.is_zero() { q } else { q + 1 };
        Interval::new(
            Rational::new(lo_sum, scale.clone())?,
            Rational::new(hi_sum, scale)?,
        )
    }

    /// Partial sum to m plus the remainder bracket
    /// c·G/(1 + e) ≤ T_m ≤ c·G/(1 − e), G = q^{-m}/(q − 1), e ≥ |ε_i| for i > m.
    fn perturbed_tail(
        &self,
        q: &QuadRat,
        rule: PerturbationRule,
        n: usize,
        width: &Rational,
    ) -> Result<Interval> {
        let quarter = QuadRat::from(width / Rational::from(4));
        let one = QuadRat::one();
        let c = rule.normalization();
        let mut m = n.max(1);
        let (g, e) = loop {
            let g = &(&c * &q.pow(-(m as i64))) / &(q - &one);
            let e = rule.magnitude_after(m);
            if e < one {
                // width of the bracket: c·G·2e/(1 − e²)
                let spread = &(&g * &(&e * &QuadRat::from(2))) / &(&one - &(&e * &e));
                if spread <= quarter {
                    break (g, e);
                }
            }
            m += 1;
            if m - n > MAX_TAIL_TERMS {
                return Err(Error::UndecidedAtCap {
                    what: format!("perturbed tail T_{n} needs more than {MAX_TAIL_TERMS} terms"),
                    best: Box::new(Interval::new(Rational::zero(), Rational::zero()).expect("ordered")),
                });
            }
        };
        let count = (m - n) as i64;
        let per_term = width / Rational::from(4 * count.max(1));
        let bits = (width / Rational::from(8 * (count + 2))).bits_below();
        let mut acc = Interval::point(Rational::zero());
        for i in n + 1..=m {
            let t = self.term(i)?.to_interval(&per_term).round_outward(bits);
            acc = &acc + &t;
        }
        let edge = width / Rational::from(16);
        let lo = (&g / &(&one + &e)).to_interval(&edge).round_outward(bits);
        let hi = (&g / &(&one - &e)).to_interval(&edge).round_outward(bits);
        let rest = Interval::new(lo.lo().clone(), hi.hi().clone())?;
        Ok(&acc + &rest)
    }

    /// Certifies the sign of a real quantity from a family of enclosures of
    /// it, asking for progressively narrower ones.
    pub fn certify_sign<F>(&self, what: &dyn Fn() -> String, start: &Rational, mut enclose: F) -> Result<i8>
    where
        F: FnMut(&Rational) -> Result<(Interval, bool)>,
    {
        let refine = self.inner.refinement;
        let mut best: Option<Interval> = None;
        for step in 0..=refine.cap {
            let w = refine.width_at(start, step);
            let (iv, refinable) = enclose(&w)?;
            let iv = match best.as_ref().and_then(|b| b.intersect(&iv)) {
                Some(nested) => nested,
                None => iv,
            };
            if let Some(s) = iv.sign() {
                return Ok(s);
            }
            best = Some(iv);
            if !refinable {
                break;
            }
        }
        Err(Error::UndecidedAtCap {
            what: what(),
            best: Box::new(best.expect("at least one refinement step")),
        })
    }

    /// Exact-when-possible sign of `c + a·T_m`.
    pub fn sign_affine(&self, c: &QuadRat, a: &Rational, m: usize, start: &Rational) -> Result<i8> {
        if a.is_zero() {
            return Ok(c.sign());
        }
        if let Some(tail) = self.tail_exact(m) {
            return Ok((c + &tail.scale(a)).sign());
        }
        self.certify_sign(
            &|| format!("sign of {c} + {a}*T_{m} for {}", self.inner.desc),
            start,
            |w| {
                let (tail, reached) = self.tail_enclosure_best(m, w)?;
                let scaled = tail.scale(a);
                let cv = c.to_interval(w);
                Ok((&scaled + &cv, reached))
            },
        )
    }

    /// Sign of `T_m − v` for an exact `v`.
    pub fn cmp_tail(&self, v: &QuadRat, m: usize, start: &Rational) -> Result<i8> {
        self.sign_affine(&-v, &Rational::one(), m, start)
    }
}

/// Bracket of T_n for a finite term list whose continuation has ratios in
/// `[lo, hi]`.
fn custom_tail(terms: &[Rational], tail_ratio: &(Rational, Rational), n: usize) -> Interval {
    let len = terms.len();
    let last = &terms[len - 1];
    let (rl, rh) = tail_ratio;
    let one = Rational::one();
    if n < len {
        let explicit: Rational = terms[n..].iter().cloned().sum();
        let lo = &explicit + &(last * rl / (&one - rl));
        let hi = &explicit + &(last * rh / (&one - rh));
        Interval::new(lo, hi).expect("rl <= rh")
    } else {
        let k = (n - len + 1) as i32;
        let lo = last * &rl.pow(k) / (&one - rl);
        let hi = last * &rh.pow(k) / (&one - rh);
        Interval::new(lo, hi).expect("rl <= rh")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequence {
        Sequence::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn term_examples() {
        assert_eq!(seq("geometric:2").term(3).unwrap(), QuadRat::from(Rational::frac(1, 8)));
        assert_eq!(seq("fibonacci").term(5).unwrap(), QuadRat::from(Rational::frac(1, 5)));
        assert_eq!(seq("perturbed-golden").term(2).unwrap(), QuadRat::one());
        let custom = seq("custom-inline:1/2,1/4;1/2,1/2");
        assert!(matches!(custom.term(3), Err(Error::IndexOutOfRange { index: 3, len: 2 })));
        assert!(custom.term(0).is_err());
    }

    #[test]
    fn unnormalized_binet_product_is_sqrt5_fib() {
        let phi = QuadRat::phi();
        let rule = PerturbationRule::GoldenBinet;
        for i in 1..=30 {
            let prod = &phi.pow(i as i64) * &(&QuadRat::one() + &rule.epsilon(i));
            let expected = QuadRat::sqrt5().scale(&Rational::from_int(BigInt::from(fib(i))));
            assert_eq!(prod, expected, "i = {i}");
        }
    }

    #[test]
    fn geometric_tails_exact() {
        let s = seq("geometric:2");
        let w = Rational::frac(1, 1000);
        assert_eq!(s.tail_enclosure(0, &w).unwrap(), Interval::point(Rational::one()));
        assert_eq!(s.tail_exact(3).unwrap(), QuadRat::from(Rational::frac(1, 8)));
    }

    #[test]
    fn fibonacci_tail_values() {
        let s = seq("fibonacci");
        let w = Rational::frac(1, 1000);
        let total = s.tail_enclosure(0, &w).unwrap();
        assert!(total.width() <= w);
        assert_eq!(total.midpoint().to_decimal(3), "3.360");
        let t3 = s.tail_enclosure(3, &w).unwrap();
        assert_eq!(t3.midpoint().to_decimal(2), "0.86");
    }

    #[test]
    fn custom_tail_is_fixed_width() {
        let s = seq("custom-inline:1/2,1/4;1/2,1/2");
        // ratios pinned at 1/2 make the tail exact
        let t0 = s.tail_enclosure(0, &Rational::frac(1, 10)).unwrap();
        assert_eq!(t0, Interval::point(Rational::one()));
        let loose = seq("custom-inline:1/2,1/4;1/3,2/3");
        let err = loose.tail_enclosure(0, &Rational::frac(1, 1000)).unwrap_err();
        assert!(matches!(err, Error::UndecidedAtCap { .. }));
        let (best, reached) = loose.tail_enclosure_best(2, &Rational::frac(1, 1000)).unwrap();
        assert!(!reached);
        assert_eq!(best, Interval::new(Rational::frac(1, 8), Rational::frac(1, 2)).unwrap());
    }

    #[test]
    fn sign_affine_uses_closed_form_for_ties() {
        let s = seq("geometric:2");
        let w = Rational::frac(1, 1000);
        // T_3 = p_3 exactly
        let p3 = s.term(3).unwrap();
        assert_eq!(s.cmp_tail(&p3, 3, &w).unwrap(), 0);
    }

    #[test]
    fn refinement_widths_shrink() {
        let r = Refinement::default();
        let w0 = Rational::frac(1, 1000);
        assert_eq!(r.width_at(&w0, 0), w0);
        assert_eq!(r.width_at(&w0, 1), Rational::frac(1, 1000 * 65536));
    }
}
