//! Analytic Poincaré bases: the Neumann Laplacian for the uniform measure and
//! the constant-drift operator `f'' - r f'` for the truncated exponential.

use std::f64::consts::SQRT_2;

use crate::measures::Interval;

#[inline]
pub(crate) fn frequency(interval: Interval) -> f64 {
    std::f64::consts::PI / interval.length()
}

pub(crate) fn uniform_eigenvalue(interval: Interval, m: usize) -> f64 {
    let k = m as f64 * frequency(interval);
    k * k
}

pub(crate) fn uniform_value(interval: Interval, m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    SQRT_2 * (m as f64 * frequency(interval) * (x - interval.a())).cos()
}

pub(crate) fn uniform_derivative(interval: Interval, m: usize, x: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let k = m as f64 * frequency(interval);
    -SQRT_2 * k * (k * (x - interval.a())).sin()
}

/// `λ_m = r²/4 + (mω)²` for `m ≥ 1`.
pub(crate) fn trunc_exp_eigenvalue(interval: Interval, rate: f64, m: usize) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let k = m as f64 * frequency(interval);
    0.25 * rate * rate + k * k
}

/// `c_m e^{r x / 2}`, evaluated without forming the two factors separately.
fn trunc_exp_envelope(interval: Interval, rate: f64, lambda: f64, x: f64) -> f64 {
    let (a, b) = (interval.a(), interval.b());
    // c_m² e^{r x} = (e^{r(x-a)} - e^{r(x-b)}) / (2 r (b-a) λ_m)
    let z = (rate * (x - a)).exp() - (rate * (x - b)).exp();
    (z / (2.0 * rate * (b - a) * lambda)).sqrt()
}

pub(crate) fn trunc_exp_value(interval: Interval, rate: f64, m: usize, x: f64) -> f64 {
    if m == 0 {
        return 1.0;
    }
    let k = m as f64 * frequency(interval);
    let lambda = trunc_exp_eigenvalue(interval, rate, m);
    let theta = k * (x - interval.a());
    trunc_exp_envelope(interval, rate, lambda, x) * (2.0 * k * theta.cos() - rate * theta.sin())
}

/// `φ_m' = -2 λ_m c_m e^{r x/2} sin(mω(x-a))`.
pub(crate) fn trunc_exp_derivative(interval: Interval, rate: f64, m: usize, x: f64) -> f64 {
    if m == 0 {
        return 0.0;
    }
    let k = m as f64 * frequency(interval);
    let lambda = trunc_exp_eigenvalue(interval, rate, m);
    let theta = k * (x - interval.a());
    -2.0 * lambda * trunc_exp_envelope(interval, rate, lambda, x) * theta.sin()
}
