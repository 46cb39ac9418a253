use std::ops::ControlFlow;

use super::{
    certificate, check_domain, feasibility, require_terms, sign_x_minus, sign_x_minus_tail,
    undecided_as_none, DigitPrefix, ExpansionCertificate, Feasibility, TargetValue,
};
use crate::error::{Error, Result};
use crate::exactnum::{QuadRat, Rational};
use crate::sequences::Sequence;

/// Number of feasible prefixes of each length `0..=depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCounts {
    pub feasible: Vec<u64>,
    /// Prefixes whose feasibility stayed undecided at the refinement cap;
    /// they are not extended.
    pub undecided: Vec<u64>,
}

impl PrefixCounts {
    pub fn at(&self, level: usize) -> u64 {
        self.feasible[level]
    }

    pub fn total_undecided(&self) -> u64 {
        self.undecided.iter().sum()
    }
}

/// Depth-first walk over feasible prefixes, 0-branch first.
///
/// A feasible parent already certifies half of each child's condition:
/// appending 0 keeps `x − P ≥ 0`, and appending 1 keeps `x − P ≤ T_n`
/// because `T_n = p_{n+1} + T_{n+1}`. So each child costs one comparison.
fn walk<F>(seq: &Sequence, x: &TargetValue, depth: usize, w: &Rational, mut visit: F) -> Result<()>
where
    F: FnMut(&DigitPrefix, &QuadRat, Feasibility) -> ControlFlow<()>,
{
    let mut prefix = DigitPrefix::default();
    let root = feasibility(seq, x, &QuadRat::zero(), 0, w)?;
    if visit(&prefix, &QuadRat::zero(), root).is_break() || root != Feasibility::Feasible {
        return Ok(());
    }
    // (prefix length of the parent, digit to try next, partial of the parent)
    let mut stack: Vec<(usize, bool, QuadRat)> = Vec::new();
    if depth > 0 {
        stack.push((0, true, QuadRat::zero()));
        stack.push((0, false, QuadRat::zero()));
    }
    while let Some((n, bit, parent_partial)) = stack.pop() {
        while prefix.len() > n {
            prefix.pop();
        }
        let k = n + 1;
        let (partial, verdict) = if bit {
            let partial = &parent_partial + &seq.term(k)?;
            let s = undecided_as_none(sign_x_minus(seq, x, &partial, k, w))?;
            let v = match s {
                Some(s) if s >= 0 => Feasibility::Feasible,
                Some(_) => Feasibility::Infeasible,
                None => Feasibility::Undecided,
            };
            (partial, v)
        } else {
            let s = undecided_as_none(sign_x_minus_tail(seq, x, &parent_partial, k, w))?;
            let v = match s {
                Some(s) if s <= 0 => Feasibility::Feasible,
                Some(_) => Feasibility::Infeasible,
                None => Feasibility::Undecided,
            };
            (parent_partial, v)
        };
        if verdict == Feasibility::Infeasible {
            continue;
        }
        prefix.push(bit);
        if visit(&prefix, &partial, verdict).is_break() {
            return Ok(());
        }
        if verdict == Feasibility::Feasible && k < depth {
            stack.push((k, true, partial.clone()));
            stack.push((k, false, partial));
        }
    }
    Ok(())
}

/// Exact count of feasible prefixes at every length up to `depth`.
pub fn count_prefixes(seq: &Sequence, x: &TargetValue, depth: usize, width: &Rational) -> Result<PrefixCounts> {
    require_terms(seq, depth)?;
    let mut counts = PrefixCounts {
        feasible: vec![0; depth + 1],
        undecided: vec![0; depth + 1],
    };
    walk(seq, x, depth, width, |prefix, _, verdict| {
        match verdict {
            Feasibility::Feasible => counts.feasible[prefix.len()] += 1,
            Feasibility::Undecided => counts.undecided[prefix.len()] += 1,
            Feasibility::Infeasible => {}
        }
        ControlFlow::Continue(())
    })?;
    Ok(counts)
}

/// The first `count` feasible prefixes of length `depth` in 0-first order.
pub fn enumerate_expansions(
    seq: &Sequence,
    x: &TargetValue,
    count: usize,
    depth: usize,
    width: &Rational,
) -> Result<Vec<ExpansionCertificate>> {
    if count == 0 {
        return Err(Error::Precondition("enumerate_expansions needs count >= 1".into()));
    }
    require_terms(seq, depth)?;
    check_domain(seq, x, true, width, Error::Domain)?;
    let mut leaves: Vec<(DigitPrefix, QuadRat)> = Vec::new();
    walk(seq, x, depth, width, |prefix, partial, verdict| {
        if prefix.len() == depth && verdict == Feasibility::Feasible {
            leaves.push((prefix.clone(), partial.clone()));
            if leaves.len() == count {
                return ControlFlow::Break(());
            }
        }
        ControlFlow::Continue(())
    })?;
    if leaves.len() < count {
        return Err(Error::InsufficientBranching {
            requested: count,
            achieved: leaves.len(),
            depth,
        });
    }
    leaves
        .into_iter()
        .map(|(prefix, partial)| certificate(seq, x, prefix, partial, width))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::default_width;
    use super::*;

    fn seq(s: &str) -> Sequence {
        Sequence::new(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn zero_has_one_prefix_per_level() {
        let c = count_prefixes(&seq("fibonacci"), &"0".parse().unwrap(), 20, &default_width()).unwrap();
        assert_eq!(c.feasible, vec![1; 21]);
        assert_eq!(c.total_undecided(), 0);
    }

    #[test]
    fn outside_target_has_no_prefixes() {
        let c = count_prefixes(&seq("fibonacci"), &"4".parse().unwrap(), 5, &default_width()).unwrap();
        assert_eq!(c.feasible, vec![0; 6]);
    }

    #[test]
    fn enumerate_examples() {
        let fib = seq("fibonacci");
        let certs = enumerate_expansions(&fib, &"1/2".parse().unwrap(), 4, 12, &default_width()).unwrap();
        assert_eq!(certs.len(), 4);
        for (i, a) in certs.iter().enumerate() {
            assert_eq!(a.feasible, Feasibility::Feasible);
            assert_eq!(a.prefix.len(), 12);
            for b in &certs[i + 1..] {
                assert_ne!(a.prefix, b.prefix);
            }
        }
        assert!(matches!(
            enumerate_expansions(&fib, &"0".parse().unwrap(), 1, 5, &default_width()),
            Err(Error::Domain(_))
        ));

        let golden = seq("geometric:1/2+1/2*sqrt5");
        let certs = enumerate_expansions(&golden, &"1".parse().unwrap(), 3, 10, &default_width()).unwrap();
        assert_eq!(certs.len(), 3);
    }

    #[test]
    fn insufficient_branching_reports_count() {
        let g = seq("geometric:2");
        // base 2 expansions of 1/3 are unique
        let err = enumerate_expansions(&g, &"1/3".parse().unwrap(), 2, 8, &default_width()).unwrap_err();
        assert!(matches!(err, Error::InsufficientBranching { requested: 2, achieved: 1, depth: 8 }));
    }
}
