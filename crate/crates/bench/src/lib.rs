//! Benchmark fixtures shared by the criterion benches.

use poincare_core::{Interval, Measure};

/// Truncated exponential on `[1, 5]`, the closed-form general density.
pub fn trunc_exp() -> Measure {
    Measure::truncated_exponential(Interval::new(1.0, 5.0).unwrap(), 1.0).unwrap()
}

/// Truncated normal on `[0, 1]`, which needs the finite-element basis.
pub fn bump() -> Measure {
    Measure::truncated_normal(Interval::unit(), 0.5, 0.2).unwrap()
}
