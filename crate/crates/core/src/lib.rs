//! Binary expansions `x = Σ c_i p_i` with digits in {0, 1} over Kakeya
//! sequences, computed and certified with exact arithmetic.
//!
//! The main pieces:
//! - [`exactnum`]: [`Rational`], [`QuadRat`] (elements of ℚ(√5)) and [`Interval`].
//! - [`sequences`]: geometric, Fibonacci-reciprocal, perturbed geometric and
//!   user-supplied sequences with rigorous tail enclosures and hypothesis checks.
//! - [`fibonacci`]: big-integer Fibonacci numbers and the identities they satisfy.
//! - [`expander`]: feasibility of digit prefixes, greedy/lazy/partition digit
//!   rules, prefix counting and enumeration, and special-element branch plans.

pub mod error;
pub mod exactnum;
pub mod expander;
pub mod fibonacci;
pub mod sequences;

pub use error::{Error, Result};
pub use exactnum::{Interval, IntervalOrdering, QuadRat, Rational};
pub use expander::{
    BranchPlan, DigitPrefix, ExpansionCertificate, Feasibility, TargetValue, TiePolicy,
};
pub use sequences::{Refinement, Sequence, SequenceDescriptor};
