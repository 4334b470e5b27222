//! Exact pair correlation and discrepancy statistics for sequences in the
//! p-adic integers.
//!
//! Elements of `Z_p` are modelled as truncated expansions ([`PadicInt`]).
//! Balls of radius `p^-k` are residue classes mod `p^k`, so every statistic
//! reduces to exact counting over residue classes. All reported values are
//! exact rationals; floats are only a rendering.

pub mod discrepancy;
pub mod error;
pub mod experiments;
pub mod padic;
pub mod rational;
pub mod sequences;
pub mod statistics;

pub use discrepancy::{
    beer_sandwich_check, discrepancy_bruteforce, discrepancy_exact, DiscrepancyReport, Witness,
};
pub use error::{Error, Result};
pub use padic::{
    add_mod, ball_exponent, haar_measure, is_unit, mul_mod, padic_abs, padic_abs_rational, vp_int,
    PadicInt, Prime, RadiusExponent, ScaleParams, Valuation,
};
pub use sequences::{difference_sequence, Exactness, SequenceKind, SequenceSpec};
pub use statistics::{expected_r, pair_correlation_f, pair_count, PairCorrStat};

/// Exact rational used for every reported quantity.
pub type Rational = num_rational::BigRational;
