use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactnum::{QuadRat, Rational};

/// Rule producing the perturbations ε_i of a perturbed geometric sequence
/// `p_i = c / (q^i (1 + ε_i))`, together with its normalizing constant `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PerturbationRule {
    /// ε_i = (−1)^{i+1} / φ^{2i} with c = √5. With q = φ the product
    /// q^i (1 + ε_i) is √5·F_i, so the terms are exactly 1/F_i.
    GoldenBinet,
}

impl PerturbationRule {
    /// Constant factor applied to every term. It does not affect any of the
    /// Kakeya-type conditions, which are all homogeneous.
    pub fn normalization(&self) -> QuadRat {
        match self {
            PerturbationRule::GoldenBinet => QuadRat::sqrt5(),
        }
    }

    pub fn epsilon(&self, i: usize) -> QuadRat {
        match self {
            PerturbationRule::GoldenBinet => {
                let phi_inv = QuadRat::phi() - QuadRat::one();
                let mag = phi_inv.pow(2 * i as i64);
                if i % 2 == 1 {
                    mag
                } else {
                    -mag
                }
            }
        }
    }

    /// Bound on |ε_i| valid for every i > m.
    pub fn magnitude_after(&self, m: usize) -> QuadRat {
        match self {
            PerturbationRule::GoldenBinet => {
                let phi_inv = QuadRat::phi() - QuadRat::one();
                phi_inv.pow(2 * (m as i64 + 1))
            }
        }
    }

    /// `(inf_j ε_j, sup_j ε_j)` over all j ≥ 1.
    pub fn extremes(&self) -> (QuadRat, QuadRat) {
        match self {
            // |ε_j| decreases, so the extremes sit at j = 2 (negative) and j = 1.
            PerturbationRule::GoldenBinet => (self.epsilon(2), self.epsilon(1)),
        }
    }
}

/// A sequence family with exactly representable terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SequenceDescriptor {
    /// p_i = q^{-i}.
    Geometric { q: QuadRat },
    /// p_i = 1 / F_i.
    FibonacciReciprocal,
    /// p_i = c / (q^i (1 + ε_i)), c from the rule.
    PerturbedGeometric { q: QuadRat, rule: PerturbationRule },
    /// Finitely many user terms; beyond the last one the ratio p_{i+1}/p_i is
    /// only known to lie in `tail_ratio`.
    CustomFinite {
        terms: Vec<Rational>,
        tail_ratio: (Rational, Rational),
        source: Option<String>,
    },
}

impl SequenceDescriptor {
    pub fn geometric(q: impl Into<QuadRat>) -> Self {
        SequenceDescriptor::Geometric { q: q.into() }
    }

    /// The Binet-perturbed golden-ratio sequence, equal termwise to 1/F_i.
    pub fn perturbed_golden() -> Self {
        SequenceDescriptor::PerturbedGeometric {
            q: QuadRat::phi(),
            rule: PerturbationRule::GoldenBinet,
        }
    }

    pub fn custom(terms: Vec<Rational>, tail_ratio: (Rational, Rational)) -> Result<Self> {
        let desc = SequenceDescriptor::CustomFinite {
            terms,
            tail_ratio,
            source: None,
        };
        desc.validate()?;
        Ok(desc)
    }

    /// Reads the custom file format: one rational term per line, then a line
    /// `tail_ratio:lo,hi`. Blank lines and `#` comments are skipped.
    pub fn parse_custom_text(text: &str) -> Result<(Vec<Rational>, (Rational, Rational))> {
        let mut terms = Vec::new();
        let mut ratio = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if ratio.is_some() {
                return Err(Error::Parse(format!(
                    "line {}: content after tail_ratio",
                    lineno + 1
                )));
            }
            if let Some(rest) = line.strip_prefix("tail_ratio:") {
                let (lo, hi) = rest.split_once(',').ok_or_else(|| {
                    Error::Parse(format!("line {}: expected tail_ratio:lo,hi", lineno + 1))
                })?;
                ratio = Some((lo.parse()?, hi.parse()?));
            } else {
                terms.push(line.parse()?);
            }
        }
        let ratio = ratio.ok_or_else(|| Error::Parse("missing tail_ratio line".into()))?;
        Ok((terms, ratio))
    }

    pub fn load_custom(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (terms, tail_ratio) = Self::parse_custom_text(&text)?;
        let desc = SequenceDescriptor::CustomFinite {
            terms,
            tail_ratio,
            source: Some(path.display().to_string()),
        };
        desc.validate()?;
        Ok(desc)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SequenceDescriptor::Geometric { q } | SequenceDescriptor::PerturbedGeometric { q, .. } => {
                if q <= &QuadRat::one() {
                    return Err(Error::Precondition(format!("base q = {q} must exceed 1")));
                }
            }
            SequenceDescriptor::FibonacciReciprocal => {}
            SequenceDescriptor::CustomFinite {
                terms, tail_ratio, ..
            } => {
                if terms.is_empty() {
                    return Err(Error::Precondition("custom sequence has no terms".into()));
                }
                if let Some(bad) = terms.iter().find(|t| t.signum() <= 0) {
                    return Err(Error::Precondition(format!("term {bad} is not positive")));
                }
                let (lo, hi) = tail_ratio;
                if lo.signum() <= 0 || lo > hi || hi >= &Rational::one() {
                    return Err(Error::Precondition(format!(
                        "tail ratio bounds must satisfy 0 < lo <= hi < 1, got {lo},{hi}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of terms, when finite.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<usize> {
        match self {
            SequenceDescriptor::CustomFinite { terms, .. } => Some(terms.len()),
            _ => None,
        }
    }

    pub fn is_fibonacci(&self) -> bool {
        matches!(self, SequenceDescriptor::FibonacciReciprocal)
    }
}

impl fmt::Display for SequenceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SequenceDescriptor::Geometric { q } => write!(f, "geometric:{q}"),
            SequenceDescriptor::FibonacciReciprocal => f.write_str("fibonacci"),
            SequenceDescriptor::PerturbedGeometric {
                q,
                rule: PerturbationRule::GoldenBinet,
            } => {
                if *q == QuadRat::phi() {
                    f.write_str("perturbed-golden")
                } else {
                    write!(f, "perturbed-golden:{q}")
                }
            }
            SequenceDescriptor::CustomFinite {
                source: Some(path), ..
            } => write!(f, "custom:{path}"),
            SequenceDescriptor::CustomFinite {
                terms, tail_ratio, ..
            } => {
                let joined: Vec<String> = terms.iter().map(ToString::to_string).collect();
                write!(f, "custom-inline:{};{},{}", joined.join(","), tail_ratio.0, tail_ratio.1)
            }
        }
    }
}

impl FromStr for SequenceDescriptor {
    type Err = Error;

    /// `geometric:<q>`, `fibonacci`, `perturbed-golden[:<q>]`, `custom:<path>`
    /// (reads the file) or `custom-inline:<t1>,<t2>,...;<lo>,<hi>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let desc = match (head, arg) {
            ("geometric", Some(q)) => SequenceDescriptor::Geometric { q: q.parse()? },
            ("fibonacci", None) => SequenceDescriptor::FibonacciReciprocal,
            ("perturbed-golden", None) => SequenceDescriptor::perturbed_golden(),
            ("perturbed-golden", Some(q)) => SequenceDescriptor::PerturbedGeometric {
                q: q.parse()?,
                rule: PerturbationRule::GoldenBinet,
            },
            ("custom", Some(path)) => return SequenceDescriptor::load_custom(Path::new(path)),
            ("custom-inline", Some(body)) => {
                let (terms, ratio) = body
                    .split_once(';')
                    .ok_or_else(|| Error::Parse(format!("expected terms;lo,hi in {s:?}")))?;
                let terms = terms
                    .split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<Rational>>>()?;
                let (lo, hi) = ratio
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("expected lo,hi in {s:?}")))?;
                SequenceDescriptor::CustomFinite {
                    terms,
                    tail_ratio: (lo.parse()?, hi.parse()?),
                    source: None,
                }
            }
            _ => return Err(Error::Parse(format!("unknown sequence descriptor {s:?}"))),
        };
        desc.validate()?;
        Ok(desc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptor_text_round_trips() {
        for s in [
            "geometric:3/2",
            "geometric:1/2+1/2*sqrt5",
            "fibonacci",
            "perturbed-golden",
            "perturbed-golden:3/2",
            "custom-inline:1/2,1/4,1/8;1/3,2/3",
        ] {
            let d: SequenceDescriptor = s.parse().unwrap();
            assert_eq!(d.to_string(), s);
        }
    }

    #[test]
    fn rejects_bad_descriptors() {
        for s in ["geometric:1", "geometric:1/2", "geometric", "fib", "custom-inline:1/2;1/2,1", "custom-inline:-1;1/2,1/2"] {
            assert!(s.parse::<SequenceDescriptor>().is_err(), "{s}");
        }
    }

    #[test]
    fn custom_file_format() {
        let (terms, ratio) =
            SequenceDescriptor::parse_custom_text("1/2\n# comment\n1/4\n\ntail_ratio:1/2,1/2\n").unwrap();
        assert_eq!(terms, vec![Rational::frac(1, 2), Rational::frac(1, 4)]);
        assert_eq!(ratio, (Rational::frac(1, 2), Rational::frac(1, 2)));
        assert!(SequenceDescriptor::parse_custom_text("1/2\n").is_err());
        assert!(SequenceDescriptor::parse_custom_text("tail_ratio:1/2,1/2\n1/3\n").is_err());
    }

    #[test]
    fn golden_binet_extremes() {
        let rule = PerturbationRule::GoldenBinet;
        let (inf, sup) = rule.extremes();
        let phi = QuadRat::phi();
        assert_eq!(inf, -phi.pow(-4));
        assert_eq!(sup, phi.pow(-2));
        for i in 1..=50 {
            let e = rule.epsilon(i);
            assert!(inf <= e && e <= sup);
            assert!(e.abs() <= rule.magnitude_after(i - 1));
        }
    }
}
