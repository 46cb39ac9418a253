//! Digit-level machinery for expansions `x = Σ c_i p_i`, c_i ∈ {0, 1}.
//!
//! A prefix `c_1 … c_n` with partial sum `P = Σ c_i p_i` can be completed to
//! a full expansion of `x` over a Kakeya sequence exactly when
//! `0 ≤ x − P ≤ T_n`. Every digit decision below reduces to the sign of a
//! linear form `c + a·T_m + b·x` and goes through [`sign_form`], which is
//! exact when the data allow it and otherwise refines enclosures up to the
//! sequence's refinement cap.

mod branch;
mod prefix;
mod search;
mod target;

pub use branch::{theorem14_construct, BranchPlan, DEFAULT_WINDOW};
pub use prefix::{digit_frequency, DigitFrequency, DigitPrefix, ExpansionCertificate, Feasibility};
pub use search::{count_prefixes, enumerate_expansions, PrefixCounts};
pub use target::TargetValue;

use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};
use crate::sequences::Sequence;

/// Bin preferred by [`kakeya_partition`] when both can take the next index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TiePolicy {
    /// Put the index in the bin summing to x (greedy digits).
    PreferTarget,
    /// Put the index in the bin summing to S − x (lazy digits).
    PreferComplement,
}

/// Starting width for refinements when the caller does not pick one.
pub fn default_width() -> Rational {
    Rational::frac(1, 1000)
}

/// Sign of `c + a·T_m + b·x`.
pub fn sign_form(
    seq: &Sequence,
    x: &TargetValue,
    c: &QuadRat,
    a: &Rational,
    b: &Rational,
    m: usize,
    width: &Rational,
) -> Result<i8> {
    if b.is_zero() {
        return seq.sign_affine(c, a, m, width);
    }
    match x {
        TargetValue::Exact(v) => seq.sign_affine(&(c + &v.scale(b)), a, m, width),
        TargetValue::Total { scale, offset } => {
            // x = scale·(P_m + T_m) + offset
            let bs = b * scale;
            let exact = &(c + &offset.scale(b)) + &seq.partial_sum(m)?.scale(&bs);
            seq.sign_affine(&exact, &(a + &bs), m, width)
        }
        TargetValue::Enclosure { label, enclose } => seq.certify_sign(
            &|| format!("sign of {c} + {a}*T_{m} + {b}*({label})"),
            width,
            |w| {
                let xv = enclose(w)?.scale(b);
                let cv = c.to_interval(w);
                if a.is_zero() {
                    return Ok((&xv + &cv, true));
                }
                let (tail, reached) = seq.tail_enclosure_best(m, w)?;
                Ok((&(&xv + &cv) + &tail.scale(a), reached))
            },
        ),
    }
}

/// sign(x − e); `hint` picks the tail used to resolve sum-relative targets.
fn sign_x_minus(seq: &Sequence, x: &TargetValue, e: &QuadRat, hint: usize, w: &Rational) -> Result<i8> {
    sign_form(seq, x, &-e, &Rational::zero(), &Rational::one(), hint, w)
}

/// sign(x − e − T_m)
fn sign_x_minus_tail(seq: &Sequence, x: &TargetValue, e: &QuadRat, m: usize, w: &Rational) -> Result<i8> {
    sign_form(seq, x, &-e, &-Rational::one(), &Rational::one(), m, w)
}

/// sign(S − x − v), with S written as P_m + T_m.
fn sign_complement_minus(seq: &Sequence, x: &TargetValue, v: &QuadRat, m: usize, w: &Rational) -> Result<i8> {
    let c = &seq.partial_sum(m)? - v;
    sign_form(seq, x, &c, &Rational::one(), &-Rational::one(), m, w)
}

fn undecided_as_none(r: Result<i8>) -> Result<Option<i8>> {
    match r {
        Ok(s) => Ok(Some(s)),
        Err(Error::UndecidedAtCap { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn at_digit(k: usize, err: Error) -> Error {
    match err {
        Error::UndecidedAtCap { what, best } => Error::UndecidedAtCap {
            what: format!("digit {k}: {what}"),
            best,
        },
        other => other,
    }
}

/// Feasibility of a prefix of length `n` with the given partial sum.
fn feasibility(seq: &Sequence, x: &TargetValue, partial: &QuadRat, n: usize, w: &Rational) -> Result<Feasibility> {
    let low = undecided_as_none(sign_x_minus(seq, x, partial, n, w))?;
    if low.is_some_and(|s| s < 0) {
        return Ok(Feasibility::Infeasible);
    }
    let high = undecided_as_none(sign_x_minus_tail(seq, x, partial, n, w))?;
    if high.is_some_and(|s| s > 0) {
        return Ok(Feasibility::Infeasible);
    }
    Ok(if low.is_some() && high.is_some() {
        Feasibility::Feasible
    } else {
        Feasibility::Undecided
    })
}

/// Enclosure of `x − partial`, where `n` is the prefix length.
pub fn residual_enclosure(
    seq: &Sequence,
    x: &TargetValue,
    partial: &QuadRat,
    n: usize,
    w: &Rational,
) -> Result<Interval> {
    let half = w / Rational::from(2);
    match x {
        TargetValue::Exact(v) => Ok((v - partial).to_interval(w)),
        TargetValue::Total { scale, offset } => {
            let exact = &(&seq.partial_sum(n)?.scale(scale) + offset) - partial;
            let base = exact.to_interval(&half);
            if scale.is_zero() {
                return Ok(base);
            }
            let (tail, _) = seq.tail_enclosure_best(n, &(&half / &scale.abs()))?;
            Ok(&base + &tail.scale(scale))
        }
        TargetValue::Enclosure { enclose, .. } => Ok(&enclose(&half)? - &partial.to_interval(&half)),
    }
}

fn partial_of(seq: &Sequence, prefix: &DigitPrefix) -> Result<QuadRat> {
    let mut partial = QuadRat::zero();
    for (i, bit) in prefix.bits().iter().enumerate() {
        if *bit {
            partial = &partial + &seq.term(i + 1)?;
        }
    }
    Ok(partial)
}

fn require_terms(seq: &Sequence, n: usize) -> Result<()> {
    match seq.len() {
        Some(len) if n > len => Err(Error::IndexOutOfRange { index: n, len }),
        _ => Ok(()),
    }
}

/// Whether `prefix` extends to an expansion of `x`: `0 ≤ x − partial ≤ T_n`.
pub fn feasible_prefix(seq: &Sequence, x: &TargetValue, prefix: &DigitPrefix, width: &Rational) -> Result<Feasibility> {
    require_terms(seq, prefix.len())?;
    let partial = partial_of(seq, prefix)?;
    feasibility(seq, x, &partial, prefix.len(), width)
}

/// Certifies `0 ≤ x ≤ S` (or the strict version); `fail` builds the error
/// for a certified violation.
fn check_domain(
    seq: &Sequence,
    x: &TargetValue,
    interior: bool,
    w: &Rational,
    fail: impl Fn(String) -> Error,
) -> Result<()> {
    let zero = QuadRat::zero();
    let low = sign_x_minus(seq, x, &zero, 0, w)?;
    let high = sign_x_minus_tail(seq, x, &zero, 0, w)?;
    let ok = if interior {
        low > 0 && high < 0
    } else {
        low >= 0 && high <= 0
    };
    if ok {
        Ok(())
    } else {
        let range = if interior { "(0, S)" } else { "[0, S]" };
        Err(fail(format!("target {x} is not in {range} for {}", seq.descriptor())))
    }
}

fn certificate(
    seq: &Sequence,
    x: &TargetValue,
    prefix: DigitPrefix,
    partial: QuadRat,
    w: &Rational,
) -> Result<ExpansionCertificate> {
    let n = prefix.len();
    let feasible = feasibility(seq, x, &partial, n, w)?;
    let residual = residual_enclosure(seq, x, &partial, n, w)?;
    Ok(ExpansionCertificate {
        descriptor: seq.descriptor().clone(),
        target: x.to_string(),
        prefix,
        partial,
        residual,
        feasible,
    })
}

/// Greedy digits: `c_k = 1` iff `partial + p_k ≤ x`.
pub fn greedy_expand(seq: &Sequence, x: &TargetValue, n: usize, width: &Rational) -> Result<ExpansionCertificate> {
    if n == 0 {
        return Err(Error::Precondition("greedy_expand needs n >= 1".into()));
    }
    require_terms(seq, n)?;
    check_domain(seq, x, false, width, Error::Domain)?;
    let mut prefix = DigitPrefix::default();
    let mut partial = QuadRat::zero();
    for k in 1..=n {
        let with_k = &partial + &seq.term(k)?;
        let s = sign_x_minus(seq, x, &with_k, k, width).map_err(|e| at_digit(k, e))?;
        if s >= 0 {
            partial = with_k;
            prefix.push(true);
        } else {
            prefix.push(false);
        }
    }
    certificate(seq, x, prefix, partial, width)
}

/// Lazy digits: `c_k = 0` iff `x − partial ≤ T_k`.
pub fn lazy_expand(seq: &Sequence, x: &TargetValue, n: usize, width: &Rational) -> Result<ExpansionCertificate> {
    if n == 0 {
        return Err(Error::Precondition("lazy_expand needs n >= 1".into()));
    }
    require_terms(seq, n)?;
    check_domain(seq, x, false, width, Error::Domain)?;
    let mut prefix = DigitPrefix::default();
    let mut partial = QuadRat::zero();
    for k in 1..=n {
        let s = sign_x_minus_tail(seq, x, &partial, k, width).map_err(|e| at_digit(k, e))?;
        if s <= 0 {
            prefix.push(false);
        } else {
            partial = &partial + &seq.term(k)?;
            prefix.push(true);
        }
    }
    certificate(seq, x, prefix, partial, width)
}

/// Two-bin assignment of the indices 1..=n: bin 1 must never exceed x and
/// bin 2 never exceed S − x. Returns the indicator of bin 1 and its
/// complement.
///
/// With sum1 + sum2 = P_{k−1}, bin 2 can take index k exactly when
/// `x − sum1 ≤ T_k`.
pub fn kakeya_partition(
    seq: &Sequence,
    x: &TargetValue,
    n: usize,
    tie: TiePolicy,
    width: &Rational,
) -> Result<(DigitPrefix, DigitPrefix)> {
    require_terms(seq, n)?;
    check_domain(seq, x, false, width, Error::Domain)?;
    let mut bins = DigitPrefix::default();
    let mut sum1 = QuadRat::zero();
    for k in 1..=n {
        let p = seq.term(k)?;
        let with_k = &sum1 + &p;
        let fits_target = || sign_x_minus(seq, x, &with_k, k, width).map(|s| s >= 0);
        let fits_complement = || sign_x_minus_tail(seq, x, &sum1, k, width).map(|s| s <= 0);
        let (first, second): (bool, bool) = match tie {
            TiePolicy::PreferTarget => (true, false),
            TiePolicy::PreferComplement => (false, true),
        };
        let check = |bin1: bool| if bin1 { fits_target() } else { fits_complement() };
        let chosen_bin1 = match check(first) {
            Ok(true) => first,
            Ok(false) => match check(second).map_err(|e| at_digit(k, e))? {
                true => second,
                false => {
                    return Err(Error::Internal(format!(
                        "index {k} fits neither bin; {} is not Kakeya at {k}",
                        seq.descriptor()
                    )))
                }
            },
            Err(first_err @ Error::UndecidedAtCap { .. }) => match check(second) {
                Ok(true) => second,
                _ => return Err(at_digit(k, first_err)),
            },
            Err(e) => return Err(e),
        };
        if chosen_bin1 {
            sum1 = with_k;
        }
        bins.push(chosen_bin1);
    }
    let complement = bins.complement();
    Ok((bins, complement))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequence {
        Sequence::new(s.parse().unwrap()).unwrap()
    }

    fn x(s: &str) -> TargetValue {
        s.parse().unwrap()
    }

    fn w() -> Rational {
        default_width()
    }

    fn p(s: &str) -> DigitPrefix {
        s.parse().unwrap()
    }

    #[test]
    fn feasible_prefix_examples() {
        let fib = seq("fibonacci");
        assert_eq!(feasible_prefix(&fib, &x("0"), &p("000"), &w()).unwrap(), Feasibility::Feasible);
        assert_eq!(feasible_prefix(&fib, &x("1/2"), &p("1"), &w()).unwrap(), Feasibility::Infeasible);
        assert_eq!(feasible_prefix(&fib, &x("1/2"), &p("001"), &w()).unwrap(), Feasibility::Feasible);
        assert_eq!(feasible_prefix(&fib, &x("0"), &p("001"), &w()).unwrap(), Feasibility::Infeasible);
        // too small to be completed by the tail
        assert_eq!(feasible_prefix(&fib, &x("3"), &p("00"), &w()).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn enclosure_targets_hit_the_cap_on_exact_ties() {
        let fib = Sequence::with_refinement("fibonacci".parse().unwrap(), crate::Refinement::with_cap(2)).unwrap();
        let s_enclosure = {
            let f = fib.clone();
            TargetValue::enclosure("S~", move |w| f.tail_enclosure(0, w))
        };
        assert_eq!(
            feasible_prefix(&fib, &s_enclosure, &p("111"), &w()).unwrap(),
            Feasibility::Undecided
        );
        // the sum-relative target resolves the same question exactly
        assert_eq!(feasible_prefix(&fib, &TargetValue::total(), &p("111"), &w()).unwrap(), Feasibility::Feasible);
        // off a tie the enclosure decides
        assert_eq!(feasible_prefix(&fib, &s_enclosure, &p("10"), &w()).unwrap(), Feasibility::Infeasible);
    }

    #[test]
    fn greedy_examples() {
        let golden = seq("geometric:1/2+1/2*sqrt5");
        let c = greedy_expand(&golden, &x("1"), 10, &w()).unwrap();
        assert_eq!(c.prefix.to_string(), "1100000000");
        assert!(c.partial == QuadRat::one() && c.residual == Interval::point(Rational::zero()));

        let fib = seq("fibonacci");
        let c = greedy_expand(&fib, &x("1/2"), 10, &w()).unwrap();
        assert_eq!(c.prefix.to_string(), "0010000000");
        assert_eq!(c.feasible, Feasibility::Feasible);

        let c = greedy_expand(&fib, &TargetValue::total(), 20, &w()).unwrap();
        assert_eq!(c.prefix, DigitPrefix::ones(20));
        assert_eq!(c.feasible, Feasibility::Feasible);

        assert!(matches!(greedy_expand(&fib, &x("S+1/100"), 5, &w()), Err(Error::Domain(_))));
        assert!(matches!(greedy_expand(&fib, &x("-1/100"), 5, &w()), Err(Error::Domain(_))));
    }

    #[test]
    fn lazy_examples() {
        let fib = seq("fibonacci");
        let c = lazy_expand(&fib, &TargetValue::total(), 15, &w()).unwrap();
        assert_eq!(c.prefix, DigitPrefix::ones(15));
        let c = lazy_expand(&fib, &x("0"), 15, &w()).unwrap();
        assert_eq!(c.prefix, DigitPrefix::zeros(15));

        let g = seq("geometric:3/2");
        let lazy = lazy_expand(&g, &x("1"), 8, &w()).unwrap();
        let greedy = greedy_expand(&g, &x("1"), 8, &w()).unwrap();
        assert_ne!(lazy.prefix, greedy.prefix);
        assert_eq!(lazy.feasible, Feasibility::Feasible);
        assert_eq!(greedy.feasible, Feasibility::Feasible);
    }

    #[test]
    fn partition_examples() {
        let fib = seq("fibonacci");
        for tie in [TiePolicy::PreferTarget, TiePolicy::PreferComplement] {
            let (bin1, bin2) = kakeya_partition(&fib, &TargetValue::total(), 12, tie, &w()).unwrap();
            assert_eq!(bin1, DigitPrefix::ones(12));
            assert_eq!(bin2, DigitPrefix::zeros(12));
            let (bin1, _) = kakeya_partition(&fib, &x("0"), 12, tie, &w()).unwrap();
            assert_eq!(bin1, DigitPrefix::zeros(12));
        }
        let (a, _) = kakeya_partition(&fib, &x("3/2"), 12, TiePolicy::PreferTarget, &w()).unwrap();
        let (b, _) = kakeya_partition(&fib, &x("3/2"), 12, TiePolicy::PreferComplement, &w()).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn partition_reports_non_kakeya() {
        let g = seq("geometric:3");
        let err = kakeya_partition(&g, &x("1/4"), 6, TiePolicy::PreferTarget, &w()).unwrap_err();
        assert!(matches!(err, Error::Internal(_)), "{err}");
    }
}
