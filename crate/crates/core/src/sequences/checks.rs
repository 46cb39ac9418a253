use std::fmt;

use super::{Sequence, SequenceDescriptor};
use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Holds,
    Fails,
    UndecidedAtCap,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Fails => "fails",
            Verdict::UndecidedAtCap => "undecided-at-cap",
        })
    }
}

/// Values behind a failed or undecided comparison `lhs (<|<=) rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub lhs: QuadRat,
    pub rhs: Interval,
    pub rhs_exact: Option<QuadRat>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexVerdict {
    pub index: usize,
    pub verdict: Verdict,
    /// Both sides were decided exactly equal.
    pub equality: bool,
    pub witness: Option<Witness>,
}

/// Per-index outcome of a property checked on a finite index range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckReport {
    pub property: String,
    pub range: (usize, usize),
    pub entries: Vec<IndexVerdict>,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn all_hold(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Holds)
    }

    pub fn indices_with(&self, verdict: Verdict) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.verdict == verdict)
            .map(|e| e.index)
            .collect()
    }

    pub fn holding(&self) -> Vec<usize> {
        self.indices_with(Verdict::Holds)
    }

    pub fn failures(&self) -> Vec<usize> {
        self.indices_with(Verdict::Fails)
    }

    pub fn undecided(&self) -> Vec<usize> {
        self.indices_with(Verdict::UndecidedAtCap)
    }

    pub fn equalities(&self) -> Vec<usize> {
        self.entries
            .iter()
            .filter(|e| e.equality)
            .map(|e| e.index)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RhoReport {
    pub holds: bool,
    /// min over the range of p_{n+1}/p_n.
    pub rho: QuadRat,
    pub argmin: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationReport {
    pub holds: bool,
    pub equality: bool,
    /// (1 + inf ε) / (1 + sup ε)
    pub ratio: QuadRat,
}

impl Sequence {
    fn check_range(&self, first: usize, last: usize, needs_next: bool) -> Result<()> {
        if last < first {
            return Err(Error::Precondition(format!("empty range [{first}, {last}]")));
        }
        if let Some(len) = self.len() {
            let top = if needs_next { last + 1 } else { last };
            if top > len {
                return Err(Error::IndexOutOfRange { index: top, len });
            }
        }
        Ok(())
    }

    fn witness(&self, lhs: QuadRat, m: usize, width: &Rational) -> Result<Witness> {
        let (rhs, _) = self.tail_enclosure_best(m, width)?;
        Ok(Witness {
            lhs,
            rhs,
            rhs_exact: self.tail_exact(m),
        })
    }

    /// Decides `lhs < T_m` (strict) or `lhs <= T_m`.
    fn tail_verdict(
        &self,
        index: usize,
        lhs: QuadRat,
        m: usize,
        strict: bool,
        width: &Rational,
    ) -> Result<IndexVerdict> {
        match self.cmp_tail(&lhs, m, width) {
            Ok(sign) => {
                let holds = if strict { sign > 0 } else { sign >= 0 };
                let witness = if holds {
                    None
                } else {
                    Some(self.witness(lhs, m, width)?)
                };
                Ok(IndexVerdict {
                    index,
                    verdict: if holds { Verdict::Holds } else { Verdict::Fails },
                    equality: sign == 0,
                    witness,
                })
            }
            Err(Error::UndecidedAtCap { best, .. }) => Ok(IndexVerdict {
                index,
                verdict: Verdict::UndecidedAtCap,
                equality: false,
                witness: Some(Witness {
                    lhs,
                    rhs: *best,
                    rhs_exact: None,
                }),
            }),
            Err(e) => Err(e),
        }
    }

    /// `p_n <= T_n` (or `<` when `strict`) for n in [1, N].
    pub fn kakeya_check(&self, n_max: usize, strict: bool, width: &Rational) -> Result<CheckReport> {
        self.check_range(1, n_max, false)?;
        let entries = (1..=n_max)
            .map(|n| self.tail_verdict(n, self.term(n)?, n, strict, width))
            .collect::<Result<Vec<_>>>()?;
        Ok(CheckReport {
            property: if strict {
                "p_n < T_n".into()
            } else {
                "p_n <= T_n".into()
            },
            range: (1, n_max),
            entries,
            note: None,
        })
    }

    /// Indices n in [2, N] whose term is special: `p_{n−1} < T_n`.
    pub fn special_indices(&self, n_max: usize, width: &Rational) -> Result<(Vec<usize>, CheckReport)> {
        if n_max < 2 {
            return Err(Error::Precondition("special_indices needs N >= 2".into()));
        }
        self.check_range(2, n_max, false)?;
        let entries = (2..=n_max)
            .map(|n| self.tail_verdict(n, self.term(n - 1)?, n, true, width))
            .collect::<Result<Vec<_>>>()?;
        let note = if self.descriptor().is_fibonacci() {
            "membership certified on the checked range only; every even index is special \
             for the Fibonacci reciprocals (odd k gives 1/F_k < T_{k+1}), so there are infinitely many"
        } else {
            "membership certified on the checked range only; infinitude is not decided"
        };
        let report = CheckReport {
            property: "p_{n-1} < T_n".into(),
            range: (2, n_max),
            entries,
            note: Some(note.into()),
        };
        Ok((report.holding(), report))
    }

    /// `p_n <= 2 p_{n+1}` for n in [1, N], decided exactly.
    pub fn ratio_condition_check(&self, n_max: usize) -> Result<CheckReport> {
        self.check_range(1, n_max, true)?;
        let two = QuadRat::from(2);
        let entries = (1..=n_max)
            .map(|n| {
                let p = self.term(n)?;
                let next = self.term(n + 1)?;
                let sign = (&(&two * &next) - &p).sign();
                Ok(IndexVerdict {
                    index: n,
                    verdict: if sign >= 0 { Verdict::Holds } else { Verdict::Fails },
                    equality: sign == 0,
                    witness: (sign < 0).then(|| Witness {
                        lhs: p,
                        rhs: (&two * &next).to_interval(&Rational::frac(1, 1 << 20)),
                        rhs_exact: Some(&two * &next),
                    }),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(CheckReport {
            property: "p_n <= 2 p_{n+1}".into(),
            range: (1, n_max),
            entries,
            note: None,
        })
    }

    /// Smallest ratio p_{n+1}/p_n over n in [1, N], tested against 1/φ = φ − 1.
    pub fn rho_check(&self, n_max: usize) -> Result<RhoReport> {
        if n_max < 2 {
            return Err(Error::Precondition("rho_check needs N >= 2".into()));
        }
        self.check_range(1, n_max, true)?;
        let mut best: Option<(QuadRat, usize)> = None;
        for n in 1..=n_max {
            let ratio = &self.term(n + 1)? / &self.term(n)?;
            if best.as_ref().is_none_or(|(b, _)| ratio < *b) {
                best = Some((ratio, n));
            }
        }
        let (rho, argmin) = best.expect("nonempty range");
        let inv_phi = QuadRat::phi() - QuadRat::one();
        Ok(RhoReport {
            holds: (&rho - &inv_phi).sign() > 0,
            rho,
            argmin,
        })
    }
}

/// Decides `(1 + eps_inf) / (1 + eps_sup) >= q − 1` exactly.
pub fn perturbation_check(eps_inf: &QuadRat, eps_sup: &QuadRat, q: &QuadRat) -> Result<PerturbationReport> {
    let one = QuadRat::one();
    if (eps_inf + &one).sign() <= 0 {
        return Err(Error::Precondition(format!("inf eps = {eps_inf} must exceed -1")));
    }
    if eps_inf > eps_sup {
        return Err(Error::Precondition(format!("inf eps = {eps_inf} exceeds sup eps = {eps_sup}")));
    }
    if q <= &one || q >= &QuadRat::from(2) {
        return Err(Error::Precondition(format!("q = {q} must lie in (1, 2)")));
    }
    let ratio = &(eps_inf + &one) / &(eps_sup + &one);
    let sign = (&ratio - &(q - &one)).sign();
    Ok(PerturbationReport {
        holds: sign >= 0,
        equality: sign == 0,
        ratio,
    })
}

impl SequenceDescriptor {
    /// Extremes of ε and the base for the perturbed family, ready for
    /// [`perturbation_check`].
    pub fn perturbation_bounds(&self) -> Option<(QuadRat, QuadRat, QuadRat)> {
        match self {
            SequenceDescriptor::PerturbedGeometric { q, rule } => {
                let (inf, sup) = rule.extremes();
                Some((inf, sup, q.clone()))
            }
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> Sequence {
        Sequence::new(s.parse().unwrap()).unwrap()
    }

    fn w() -> Rational {
        Rational::frac(1, 1000)
    }

    #[test]
    fn kakeya_examples() {
        assert!(seq("geometric:3/2").kakeya_check(50, true, &w()).unwrap().all_hold());
        let r = seq("geometric:2").kakeya_check(10, true, &w()).unwrap();
        assert_eq!(r.failures(), (1..=10).collect::<Vec<_>>());
        assert_eq!(r.equalities(), (1..=10).collect::<Vec<_>>());
        assert!(r.entries.iter().all(|e| e.witness.is_some()));
        assert!(seq("geometric:2").kakeya_check(10, false, &w()).unwrap().all_hold());
        assert!(seq("fibonacci").kakeya_check(30, true, &w()).unwrap().all_hold());
    }

    #[test]
    fn special_examples() {
        let (fib, report) = seq("fibonacci").special_indices(10, &w()).unwrap();
        assert_eq!(fib, vec![2, 4, 6, 8, 10]);
        assert!(report.undecided().is_empty());
        let (g, _) = seq("geometric:3/2").special_indices(10, &w()).unwrap();
        assert_eq!(g, (2..=10).collect::<Vec<_>>());
        let (g2, _) = seq("geometric:2").special_indices(10, &w()).unwrap();
        assert!(g2.is_empty());
        assert!(seq("fibonacci").special_indices(1, &w()).is_err());
    }

    #[test]
    fn ratio_examples() {
        let r = seq("fibonacci").ratio_condition_check(100).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.equalities(), vec![2]);
        assert!(seq("geometric:9/5").ratio_condition_check(50).unwrap().all_hold());
        let bad = seq("geometric:21/10").ratio_condition_check(5).unwrap();
        assert_eq!(bad.failures(), vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn rho_examples() {
        let r = seq("geometric:3/2").rho_check(20).unwrap();
        assert!(r.holds);
        assert_eq!(r.rho, QuadRat::from(Rational::frac(2, 3)));
        let r = seq("geometric:17/10").rho_check(20).unwrap();
        assert!(!r.holds);
        assert_eq!(r.rho, QuadRat::from(Rational::frac(10, 17)));
        let r = seq("fibonacci").rho_check(50).unwrap();
        assert!(!r.holds);
        assert_eq!((r.rho, r.argmin), (QuadRat::from(Rational::frac(1, 2)), 2));
    }

    #[test]
    fn perturbation_examples() {
        let phi = QuadRat::phi();
        let r = perturbation_check(&-phi.pow(-4), &phi.pow(-2), &phi).unwrap();
        assert!(r.holds && r.equality);
        assert_eq!(r.ratio, &phi - &QuadRat::one());

        let zero = QuadRat::zero();
        let r = perturbation_check(&zero, &zero, &QuadRat::from(Rational::frac(3, 2))).unwrap();
        assert!(r.holds && !r.equality);

        let r = perturbation_check(
            &QuadRat::from(Rational::frac(-1, 2)),
            &QuadRat::one(),
            &QuadRat::from(Rational::frac(19, 10)),
        )
        .unwrap();
        assert!(!r.holds);
        assert_eq!(r.ratio, QuadRat::from(Rational::frac(1, 4)));
    }

    #[test]
    fn perturbation_preconditions() {
        let one = QuadRat::one();
        let half = QuadRat::from(Rational::frac(3, 2));
        assert!(perturbation_check(&-one.clone(), &one, &half).is_err());
        assert!(perturbation_check(&one, &QuadRat::zero(), &half).is_err());
        assert!(perturbation_check(&QuadRat::zero(), &one, &QuadRat::from(2)).is_err());
    }

    #[test]
    fn custom_range_limits() {
        let s = seq("custom-inline:1/2,1/4,1/8;1/2,1/2");
        assert!(s.kakeya_check(3, false, &w()).unwrap().all_hold());
        assert!(matches!(s.kakeya_check(4, false, &w()), Err(Error::IndexOutOfRange { .. })));
        assert!(s.ratio_condition_check(3).is_err());
        assert!(s.ratio_condition_check(2).unwrap().all_hold());
    }
}
