use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};
use crate::sequences::SequenceDescriptor;

/// Finite 0/1 word `c_1 c_2 … c_n`.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct DigitPrefix(Vec<bool>);

impl DigitPrefix {
    pub fn new(bits: Vec<bool>) -> Self {
        DigitPrefix(bits)
    }

    pub fn zeros(n: usize) -> Self {
        DigitPrefix(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        DigitPrefix(vec![true; n])
    }

    /// The low `n` bits of `word`, most significant first.
    pub fn from_word(word: u64, n: usize) -> Self {
        DigitPrefix((0..n).rev().map(|k| (word >> k) & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Digit `c_i`, 1-based.
    pub fn digit(&self, i: usize) -> bool {
        self.0[i - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn pop(&mut self) -> Option<bool> {
        self.0.pop()
    }

    pub fn ones_count(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn complement(&self) -> DigitPrefix {
        DigitPrefix(self.0.iter().map(|b| !b).collect())
    }
}

impl fmt::Display for DigitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for DigitPrefix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DigitPrefix({self})")
    }
}

impl FromStr for DigitPrefix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .filter(|c| *c != ',' && *c != ' ')
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!("digit {other:?} is not 0 or 1"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(DigitPrefix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Feasibility {
    Feasible,
    Infeasible,
    Undecided,
}

impl fmt::Display for Feasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feasibility::Feasible => "FEASIBLE",
            Feasibility::Infeasible => "INFEASIBLE",
            Feasibility::Undecided => "UNDECIDED",
        })
    }
}

impl FromStr for Feasibility {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "FEASIBLE" => Ok(Feasibility::Feasible),
            "INFEASIBLE" => Ok(Feasibility::Infeasible),
            "UNDECIDED" => Ok(Feasibility::Undecided),
            other => Err(Error::Parse(format!("unknown feasibility {other:?}"))),
        }
    }
}

/// A digit prefix with its exact partial sum and an enclosure of what is
/// left of the target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionCertificate {
    pub descriptor: SequenceDescriptor,
    /// Text form of the target.
    pub target: String,
    pub prefix: DigitPrefix,
    /// Σ_{i≤n} c_i p_i
    pub partial: QuadRat,
    /// Encloses x − partial.
    pub residual: Interval,
    pub feasible: Feasibility,
}

const HEADER: &str = "kakeya-certificate v1";

impl ExpansionCertificate {
    /// Line-oriented text form; [`ExpansionCertificate::parse`] inverts it.
    pub fn to_text(&self) -> String {
        format!(
            "{HEADER}\nseq: {}\ntarget: {}\nbits: {}\npartial: {}\nresidual: {} {}\nfeasible: {}\n",
            self.descriptor,
            self.target,
            self.prefix,
            self.partial,
            self.residual.lo(),
            self.residual.hi(),
            self.feasible
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some(HEADER) {
            return Err(Error::Parse(format!("certificate must start with {HEADER:?}")));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing {name} line")))?;
            line.strip_prefix(name)
                .and_then(|r| r.strip_prefix(':'))
                .map(|r| r.trim().to_string())
                .ok_or_else(|| Error::Parse(format!("expected {name}: line, got {line:?}")))
        };
        let descriptor: SequenceDescriptor = field("seq")?.parse()?;
        let target = field("target")?;
        let prefix: DigitPrefix = field("bits")?.parse()?;
        let partial: QuadRat = field("partial")?.parse()?;
        let residual_text = field("residual")?;
        let (lo, hi) = residual_text
            .split_once(' ')
            .ok_or_else(|| Error::Parse("residual needs two endpoints".into()))?;
        let residual = Interval::new(lo.trim().parse::<Rational>()?, hi.trim().parse::<Rational>()?)?;
        let feasible: Feasibility = field("feasible")?.parse()?;
        Ok(ExpansionCertificate {
            descriptor,
            target,
            prefix,
            partial,
            residual,
            feasible,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitFrequency {
    pub ones: usize,
    pub zeros: usize,
    /// ones / length
    pub ratio: Rational,
}

pub fn digit_frequency(prefix: &DigitPrefix) -> Result<DigitFrequency> {
    if prefix.is_empty() {
        return Err(Error::Precondition("digit frequency of an empty prefix".into()));
    }
    let ones = prefix.ones_count();
    let zeros = prefix.len() - ones;
    Ok(DigitFrequency {
        ones,
        zeros,
        ratio: Rational::frac(ones as i64, prefix.len() as i64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prefix_text() {
        let p: DigitPrefix = "0010".parse().unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.digit(3) && !p.digit(1));
        assert_eq!(p.to_string(), "0010");
        assert_eq!(DigitPrefix::from_word(0b0010, 4), p);
        assert!("012".parse::<DigitPrefix>().is_err());
        assert_eq!("".parse::<DigitPrefix>().unwrap(), DigitPrefix::default());
    }

    #[test]
    fn frequency_examples() {
        let f = digit_frequency(&"100".parse().unwrap()).unwrap();
        assert_eq!((f.ones, f.zeros, f.ratio), (1, 2, Rational::frac(1, 3)));
        let f = digit_frequency(&DigitPrefix::ones(10)).unwrap();
        assert_eq!(f.ratio, Rational::one());
        assert!(digit_frequency(&DigitPrefix::default()).is_err());
    }

    #[test]
    fn certificate_rejects_garbage() {
        assert!(ExpansionCertificate::parse("hello").is_err());
        let text = format!("{HEADER}\nseq: fibonacci\ntarget: 1/2\nbits: 001\npartial: 1/2\nresidual: 1 0\nfeasible: FEASIBLE\n");
        assert!(ExpansionCertificate::parse(&text).is_err());
    }
}
