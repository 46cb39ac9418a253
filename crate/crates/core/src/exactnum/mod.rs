//! Exact scalars: reduced big rationals, the field ℚ(√5) that contains the
//! golden ratio, and rational-endpoint enclosures with decidable comparison.

mod interval;
mod quad;
mod rational;

pub use interval::{interval_cmp, Interval, IntervalOrdering};
pub use quad::{quad_sign, quad_to_interval, sqrt5_bracket, QuadRat};
pub use rational::Rational;
