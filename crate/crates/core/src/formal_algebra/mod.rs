//! Exact scalars, polynomials, `ħ`-rational functions and truncated series.
//!
//! Everything here is an immutable value type; no floating point is used.

mod hbar;
mod htrunc;
mod mixed;
mod modgcd;
mod poly;
mod rational;
mod series;

pub use hbar::{agree_by_evaluation, HbarOp, HbarRational};
pub use htrunc::HTruncPoly;
pub use mixed::{mixed_substitute, BiSeries, MixedSeries};
pub use poly::Poly;
pub use rational::{factorial, int, parse_rational, rat, to_text, Coeff, FieldCoeff, Rational};
pub use series::TruncSeries;
