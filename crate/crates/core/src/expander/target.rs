use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::exactnum::{Interval, QuadRat, Rational};

type EncloseFn = dyn Fn(&Rational) -> Result<Interval> + Send + Sync;

/// The number `x` being expanded.
#[derive(Clone)]
pub enum TargetValue {
    /// An element of ℚ(√5); authoritative.
    Exact(QuadRat),
    /// `scale·S + offset`, where S is the sum of the sequence being expanded
    /// against. Refined through the sequence's own tail enclosures; a
    /// difference with a tail T_m is resolved through S = Σ_{i≤m} p_i + T_m.
    Total { scale: Rational, offset: QuadRat },
    /// Only enclosures are available: the callback returns an enclosure of
    /// width at most the requested one.
    Enclosure { label: String, enclose: Arc<EncloseFn> },
}

impl TargetValue {
    pub fn exact(x: impl Into<QuadRat>) -> Self {
        TargetValue::Exact(x.into())
    }

    /// The full sum S.
    pub fn total() -> Self {
        TargetValue::Total {
            scale: Rational::one(),
            offset: QuadRat::zero(),
        }
    }

    pub fn enclosure<F>(label: impl Into<String>, enclose: F) -> Self
    where
        F: Fn(&Rational) -> Result<Interval> + Send + Sync + 'static,
    {
        TargetValue::Enclosure {
            label: label.into(),
            enclose: Arc::new(enclose),
        }
    }

    pub fn as_exact(&self) -> Option<&QuadRat> {
        match self {
            TargetValue::Exact(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for TargetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetValue::Exact(v) => write!(f, "{v}"),
            TargetValue::Total { scale, offset } => {
                if *scale != Rational::one() {
                    write!(f, "{scale}*")?;
                }
                f.write_str("S")?;
                if !offset.is_zero() {
                    let s = offset.to_string();
                    if s.starts_with('-') {
                        f.write_str(&s)?;
                    } else {
                        write!(f, "+{s}")?;
                    }
                }
                Ok(())
            }
            TargetValue::Enclosure { label, .. } => f.write_str(label),
        }
    }
}

impl fmt::Debug for TargetValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TargetValue({self})")
    }
}

impl FromStr for TargetValue {
    type Err = Error;

    /// `"1/2"`, `"0.25"`, `"1/2+1/2*sqrt5"`, or sum-relative forms
    /// `"S"`, `"S/2"`, `"3/4*S"`, `"S+1/100"`, `"S-1/100"`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(pos) = s.find('S') else {
            return Ok(TargetValue::Exact(s.parse()?));
        };
        let head = &s[..pos];
        let mut rest = &s[pos + 1..];
        let mut scale = if head.is_empty() {
            Rational::one()
        } else {
            let coeff = head
                .strip_suffix('*')
                .ok_or_else(|| Error::Parse(format!("expected '*' before S in {s:?}")))?;
            coeff.parse()?
        };
        if let Some(after) = rest.strip_prefix('/') {
            let end = after.find(['+', '-']).unwrap_or(after.len());
            let den: Rational = after[..end].parse()?;
            if den.is_zero() {
                return Err(Error::Parse(format!("division by zero in {s:?}")));
            }
            scale = &scale / &den;
            rest = &after[end..];
        }
        let offset = if rest.is_empty() {
            QuadRat::zero()
        } else if let Some(r) = rest.strip_prefix('+') {
            r.parse()?
        } else if rest.starts_with('-') {
            rest.parse()?
        } else {
            return Err(Error::Parse(format!("unexpected {rest:?} after S in {s:?}")));
        };
        Ok(TargetValue::Total { scale, offset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sum_relative_targets() {
        let t: TargetValue = "S".parse().unwrap();
        assert_eq!(t.to_string(), "S");
        let t: TargetValue = "S/2".parse().unwrap();
        assert_eq!(t.to_string(), "1/2*S");
        let t: TargetValue = "S+1/100".parse().unwrap();
        assert_eq!(t.to_string(), "S+1/100");
        let t: TargetValue = "S-1/100".parse().unwrap();
        assert_eq!(t.to_string(), "S-1/100");
        let t: TargetValue = "3/4*S-1/2+1/2*sqrt5".parse().unwrap();
        assert_eq!(t.to_string(), "3/4*S-1/2+1/2*sqrt5");
        let t: TargetValue = "0.5".parse().unwrap();
        assert_eq!(t.to_string(), "1/2");
    }

    #[test]
    fn rejects_malformed_targets() {
        for s in ["2S", "S/0", "S*2", "S+", "x"] {
            assert!(s.parse::<TargetValue>().is_err(), "{s}");
        }
    }
}
