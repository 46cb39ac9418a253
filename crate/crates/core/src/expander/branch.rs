use std::collections::HashMap;

use super::{
    check_domain, feasibility, residual_enclosure, sign_complement_minus, sign_x_minus, sign_x_minus_tail,
    undecided_as_none, DigitPrefix, Feasibility, TargetValue,
};
use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};
use crate::sequences::{Sequence, SequenceDescriptor, Verdict};

/// Largest index considered when picking special elements, and the range on
/// which the sequence hypotheses are certified.
pub const DEFAULT_WINDOW: usize = 200;

/// Nodes one completion search may visit before giving up on a pattern.
const SEARCH_NODE_LIMIT: usize = 20_000;

/// Candidate sets tried by the backtracking search before giving up.
const PLAN_ATTEMPT_LIMIT: usize = 2_000;

/// Special indices `i_1 < … < i_m` whose digits can be chosen freely.
///
/// Every one of the `2^m` digit patterns on these indices is certified to
/// extend to a prefix of length `depth` that is feasible in the original
/// sequence, so `x` has at least `2^m` distinct expansions.
#[derive(Debug, Clone)]
pub struct BranchPlan {
    pub descriptor: SequenceDescriptor,
    pub target: TargetValue,
    pub special: Vec<usize>,
    /// Σ_j p_{i_j}, certified ≤ min(x, S − x).
    pub sum: QuadRat,
    /// Enclosure of min(x, S − x).
    pub budget: Interval,
    pub window: usize,
    /// Smallest N with p_n ≤ 2 p_{n+1} for every n in [N, window).
    pub ratio_threshold: usize,
    /// Prefix length at which the patterns were certified.
    pub depth: usize,
}

/// Outcome of a completion search for one pattern.
#[derive(Debug, Clone, PartialEq, Eq)]
enum Completion {
    Found(DigitPrefix),
    /// Every branch was certified infeasible.
    Exhausted,
    /// Some branch was undecided or the node limit was hit.
    Inconclusive,
}

fn holds(r: Result<i8>, pred: impl Fn(i8) -> bool) -> Result<bool> {
    Ok(undecided_as_none(r)?.is_some_and(pred))
}

/// Depth-first search for a feasible prefix of length `depth` whose digits
/// at `fixed` indices are prescribed. At each node the remaining target
/// `x − P − (chosen special terms ahead)` must lie in `[0, T_k − (all special
/// terms ahead)]`; this is necessary for any completion and exact at the leaf.
/// Tries digit 1 first.
fn complete(
    seq: &Sequence,
    x: &TargetValue,
    fixed: &[(usize, bool)],
    depth: usize,
    w: &Rational,
) -> Result<Completion> {
    let terms: Vec<QuadRat> = (1..=depth).map(|i| seq.term(i)).collect::<Result<_>>()?;
    // ahead[k] = (Σ chosen fixed terms > k, Σ all fixed terms > k)
    let mut ahead = vec![(QuadRat::zero(), QuadRat::zero()); depth + 1];
    for k in (0..depth).rev() {
        let (mut chosen, mut all) = ahead[k + 1].clone();
        if let Some((_, bit)) = fixed.iter().find(|(i, _)| *i == k + 1) {
            all = &all + &terms[k];
            if *bit {
                chosen = &chosen + &terms[k];
            }
        }
        ahead[k] = (chosen, all);
    }
    let digit_at = |k: usize| fixed.iter().find(|(i, _)| *i == k).map(|(_, b)| *b);

    let mut inconclusive = false;
    let mut nodes = 0usize;
    let mut prefix = DigitPrefix::default();
    let mut stack: Vec<(usize, bool, QuadRat)> = Vec::new();
    let push_children = |stack: &mut Vec<(usize, bool, QuadRat)>, k: usize, partial: &QuadRat| {
        match digit_at(k + 1) {
            Some(bit) => stack.push((k, bit, partial.clone())),
            None => {
                stack.push((k, false, partial.clone()));
                stack.push((k, true, partial.clone()));
            }
        }
    };
    if depth == 0 {
        return Ok(match feasibility(seq, x, &QuadRat::zero(), 0, w)? {
            Feasibility::Feasible => Completion::Found(prefix),
            Feasibility::Infeasible => Completion::Exhausted,
            Feasibility::Undecided => Completion::Inconclusive,
        });
    }
    push_children(&mut stack, 0, &QuadRat::zero());
    while let Some((n, bit, parent)) = stack.pop() {
        nodes += 1;
        if nodes > SEARCH_NODE_LIMIT {
            return Ok(Completion::Inconclusive);
        }
        while prefix.len() > n {
            prefix.pop();
        }
        let k = n + 1;
        let partial = if bit { &parent + &terms[k - 1] } else { parent };
        let (chosen, all) = &ahead[k];
        let low = undecided_as_none(sign_x_minus(seq, x, &(&partial + chosen), k, w))?;
        let high = undecided_as_none(sign_x_minus_tail(seq, x, &(&(&partial + chosen) - all), k, w))?;
        match (low, high) {
            (Some(l), Some(h)) if l >= 0 && h <= 0 => {}
            (Some(l), _) if l < 0 => continue,
            (_, Some(h)) if h > 0 => continue,
            _ => {
                inconclusive = true;
                continue;
            }
        }
        prefix.push(bit);
        if k == depth {
            return Ok(Completion::Found(prefix));
        }
        push_children(&mut stack, k, &partial);
    }
    Ok(if inconclusive {
        Completion::Inconclusive
    } else {
        Completion::Exhausted
    })
}

struct Planner<'a> {
    seq: &'a Sequence,
    x: &'a TargetValue,
    w: &'a Rational,
    candidates: Vec<usize>,
    stable: HashMap<usize, bool>,
    /// Last pattern that failed, tried first on the next set of equal size.
    killer: Option<u64>,
    attempts: usize,
    best: usize,
}

impl Planner<'_> {
    /// A feasible prefix reaching the last special index completes by the
    /// Kakeya property, so that index is the certification depth.
    fn all_patterns_complete(&mut self, indices: &[usize]) -> Result<bool> {
        let depth = indices.last().copied().unwrap_or(0);
        let count = 1u64 << indices.len();
        let first = self.killer.filter(|w| *w < count);
        for word in first.into_iter().chain((0..count).filter(|w| Some(*w) != first)) {
            let fixed: Vec<(usize, bool)> = indices
                .iter()
                .enumerate()
                .map(|(j, i)| (*i, (word >> j) & 1 == 1))
                .collect();
            if !matches!(complete(self.seq, self.x, &fixed, depth, self.w)?, Completion::Found(_)) {
                self.killer = Some(word);
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn within_budget(&self, sum: &QuadRat, k: usize) -> Result<bool> {
        Ok(holds(sign_x_minus(self.seq, self.x, sum, k, self.w), |s| s >= 0)?
            && holds(sign_complement_minus(self.seq, self.x, sum, k, self.w), |s| s >= 0)?)
    }

    /// Smallest-first backtracking over candidate indices.
    fn extend(&mut self, chosen: &mut Vec<usize>, sum: &QuadRat, m: usize) -> Result<bool> {
        self.best = self.best.max(chosen.len());
        if chosen.len() == m {
            return Ok(true);
        }
        let start = chosen.last().map_or(0, |last| last + 2);
        for c in 0..self.candidates.len() {
            let k = self.candidates[c];
            if k < start {
                continue;
            }
            if self.attempts >= PLAN_ATTEMPT_LIMIT {
                return Ok(false);
            }
            self.attempts += 1;
            let new_sum = sum + &self.seq.term(k)?;
            if !self.within_budget(&new_sum, k)? || !removal_stable(self.seq, k, self.w, &mut self.stable)? {
                continue;
            }
            chosen.push(k);
            if self.all_patterns_complete(chosen)? && self.extend(chosen, &new_sum, m)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }
}

/// Checks `p_n + p_k < T_n` for every n < k; the single-removal condition
/// that keeps the hypotheses after taking `p_k` out.
fn removal_stable(seq: &Sequence, k: usize, w: &Rational, cache: &mut HashMap<usize, bool>) -> Result<bool> {
    if let Some(v) = cache.get(&k) {
        return Ok(*v);
    }
    let p_k = seq.term(k)?;
    let mut ok = true;
    for n in 1..k {
        if !holds(seq.cmp_tail(&(&seq.term(n)? + &p_k), n, w), |s| s > 0)? {
            ok = false;
            break;
        }
    }
    cache.insert(k, ok);
    Ok(ok)
}

/// Picks `m` special indices (`p_{k−1} < T_k`) with gaps of at least 2 and
/// term sum at most min(x, S − x), each passing the single-removal check,
/// such that all `2^m` digit patterns on them complete to feasible prefixes.
///
/// Removing several special elements at once may open gaps in the set of
/// values the remaining terms can represent, so patterns are certified
/// directly instead of through the stricter cumulative removal condition,
/// which for the Fibonacci reciprocals forces index growth by a factor of
/// about 3 per pick. The search is smallest index first with backtracking.
///
/// The sequence must satisfy `p_n < T_n` on `[1, window]` and the doubling
/// bound near the end of the window.
pub fn theorem14_construct(
    seq: &Sequence,
    x: &TargetValue,
    m: usize,
    width: &Rational,
    window: usize,
) -> Result<BranchPlan> {
    if m == 0 {
        return Err(Error::Precondition("branch plan needs m >= 1".into()));
    }
    if m > 16 {
        return Err(Error::Precondition(format!("m = {m} would need 2^{m} pattern certificates")));
    }
    let window = seq.len().map_or(window, |len| window.min(len - 1));
    if window < 3 {
        return Err(Error::Precondition(format!("window {window} is too small")));
    }
    check_domain(seq, x, true, width, Error::Precondition)?;

    let kakeya = seq.kakeya_check(window, true, width)?;
    if let Some(bad) = kakeya.entries.iter().find(|e| e.verdict != Verdict::Holds) {
        return Err(Error::Precondition(format!(
            "p_n < T_n is {} at n = {} for {}",
            bad.verdict,
            bad.index,
            seq.descriptor()
        )));
    }
    let ratio = seq.ratio_condition_check(window - 1)?;
    let ratio_threshold = ratio.failures().last().map_or(1, |n| n + 1);
    if ratio_threshold >= window - 1 {
        return Err(Error::Precondition(format!(
            "p_n <= 2 p_(n+1) fails at the end of the window [1, {window}]"
        )));
    }

    let mut candidates = Vec::new();
    for k in 2..=window {
        if holds(seq.cmp_tail(&seq.term(k - 1)?, k, width), |s| s > 0)? {
            candidates.push(k);
        }
    }
    let mut planner = Planner {
        seq,
        x,
        w: width,
        candidates,
        stable: HashMap::new(),
        killer: None,
        attempts: 0,
        best: 0,
    };
    let mut special = Vec::new();
    if !planner.extend(&mut special, &QuadRat::zero(), m)? {
        return Err(Error::BudgetUnreachable {
            requested: m,
            found: planner.best,
            window,
        });
    }
    let sum = special.iter().map(|k| seq.term(*k)).sum::<Result<QuadRat>>()?;

    let half = width / Rational::from(2);
    let x_iv = residual_enclosure(seq, x, &QuadRat::zero(), 0, &half)?;
    let (total, _) = seq.tail_enclosure_best(0, &half)?;
    let rest = &total - &x_iv;
    let budget = Interval::new(
        x_iv.lo().clone().min(rest.lo().clone()),
        x_iv.hi().clone().min(rest.hi().clone()),
    )?;
    let depth = special.last().copied().unwrap_or(0);
    Ok(BranchPlan {
        descriptor: seq.descriptor().clone(),
        target: x.clone(),
        special,
        sum,
        budget,
        window,
        ratio_threshold,
        depth,
    })
}

impl BranchPlan {
    /// A prefix of length `depth` carrying digit `bits[j]` at index
    /// `special[j]`, completed by search over the other positions.
    /// `None` if no completion was found.
    pub fn realize(&self, seq: &Sequence, bits: &[bool], depth: usize, width: &Rational) -> Result<Option<DigitPrefix>> {
        if bits.len() != self.special.len() {
            return Err(Error::Precondition(format!(
                "pattern has {} bits for {} special indices",
                bits.len(),
                self.special.len()
            )));
        }
        let last = *self.special.last().expect("plans are nonempty");
        if depth < last {
            return Err(Error::Precondition(format!("depth {depth} is below the last special index {last}")));
        }
        let fixed: Vec<(usize, bool)> = self.special.iter().copied().zip(bits.iter().copied()).collect();
        Ok(match complete(seq, &self.target, &fixed, depth, width)? {
            Completion::Found(prefix) => Some(prefix),
            Completion::Exhausted | Completion::Inconclusive => None,
        })
    }

    /// Feasibility in the original sequence of the prefix produced by
    /// [`BranchPlan::realize`]; infeasible when no completion exists.
    pub fn pattern_feasibility(&self, seq: &Sequence, bits: &[bool], depth: usize, width: &Rational) -> Result<Feasibility> {
        let Some(prefix) = self.realize(seq, bits, depth, width)? else {
            return Ok(Feasibility::Infeasible);
        };
        let mut partial = QuadRat::zero();
        for (i, bit) in prefix.bits().iter().enumerate() {
            if *bit {
                partial = &partial + &seq.term(i + 1)?;
            }
        }
        feasibility(seq, &self.target, &partial, depth, width)
    }
}

#[cfg(test)]
mod tests {
    use super::super::default_width;
    use super::*;

    fn fib() -> Sequence {
        Sequence::fibonacci()
    }

    #[test]
    fn fibonacci_three_halves() {
        let plan = theorem14_construct(&fib(), &"3/2".parse().unwrap(), 3, &default_width(), DEFAULT_WINDOW).unwrap();
        // {2, 4, 6} from an independent high-precision search
        assert_eq!(plan.special, vec![2, 4, 6]);
        assert!(plan.budget.width() <= default_width());
        assert_eq!(plan.ratio_threshold, 1);
        assert_eq!(plan.depth, 6);
    }

    #[test]
    fn backtracks_past_dead_ends() {
        // after {4, 6} the pattern (0, 0, 1) leaves 1/2 − p_k inside a gap
        // of the remaining terms for every admissible k
        let plan = theorem14_construct(&fib(), &"1/2".parse().unwrap(), 3, &default_width(), DEFAULT_WINDOW).unwrap();
        assert_eq!(plan.special, vec![4, 10, 14]);
    }

    #[test]
    fn half_sum_target_takes_index_two() {
        let plan = theorem14_construct(&fib(), &"S/2".parse().unwrap(), 1, &default_width(), DEFAULT_WINDOW).unwrap();
        assert_eq!(plan.special, vec![2]);
    }

    #[test]
    fn boundary_targets_rejected() {
        for t in ["0", "S"] {
            let err = theorem14_construct(&fib(), &t.parse().unwrap(), 1, &default_width(), DEFAULT_WINDOW).unwrap_err();
            assert!(matches!(err, Error::Precondition(_)), "{t}: {err}");
        }
    }

    #[test]
    fn non_kakeya_rejected() {
        let g = Sequence::new("geometric:2".parse().unwrap()).unwrap();
        let err = theorem14_construct(&g, &"1/2".parse().unwrap(), 1, &default_width(), 20).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn tiny_window_reports_budget() {
        let err = theorem14_construct(&fib(), &"1/2".parse().unwrap(), 8, &default_width(), 12).unwrap_err();
        assert!(matches!(err, Error::BudgetUnreachable { requested: 8, .. }), "{err}");
    }

    #[test]
    fn all_patterns_feasible_small() {
        let seq = fib();
        let x: TargetValue = "3/2".parse().unwrap();
        let plan = theorem14_construct(&seq, &x, 3, &default_width(), DEFAULT_WINDOW).unwrap();
        let mut seen = std::collections::HashSet::new();
        for word in 0..8u64 {
            let bits: Vec<bool> = (0..3).map(|j| (word >> j) & 1 == 1).collect();
            assert_eq!(
                plan.pattern_feasibility(&seq, &bits, 16, &default_width()).unwrap(),
                Feasibility::Feasible,
                "pattern {word:03b}"
            );
            let prefix = plan.realize(&seq, &bits, 16, &default_width()).unwrap().unwrap();
            for (j, k) in plan.special.iter().enumerate() {
                assert_eq!(prefix.digit(*k), bits[j]);
            }
            seen.insert(prefix);
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn completion_search_reports_exhaustion() {
        // 1/2 over fibonacci: taking p_1 = 1 overshoots
        let seq = fib();
        let r = complete(&seq, &"1/2".parse().unwrap(), &[(1, true)], 5, &default_width()).unwrap();
        assert_eq!(r, Completion::Exhausted);
        let r = complete(&seq, &"1/2".parse().unwrap(), &[(3, true)], 5, &default_width()).unwrap();
        assert_eq!(r, Completion::Found("00100".parse().unwrap()));
    }
}
