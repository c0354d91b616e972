//! The reproducing kernel of `H¹(μ)` with norm `‖f‖² = ∫f² dμ + ∫f'² dμ`.
//!
//! Two representations are provided: the single-pair (Green) form
//! `K(x,y) = ψ(min(x,y)) χ(max(x,y)) / C` for the uniform and truncated
//! exponential measures, and the truncated Mercer series
//! `K_M = Σ_{m≤M} φ_m ⊗ φ_m / (1 + λ_m)` for any basis.
//!
//! Because `∫K(x,·)dμ = 1` for both, the kernel mean embedding is the
//! constant one and its total mass is one; the worst-case error formulas
//! below use that directly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::measures::Interval;
use crate::spectral::SpectralBasis;

/// Round-off allowance below zero for a squared worst-case error.
pub const WCE_CLAMP: f64 = 1e-12;

/// A symmetric positive-definite kernel on an interval whose mean embedding
/// under μ is identically one.
pub trait ReproducingKernel {
    fn eval(&self, x: f64, y: f64) -> f64;

    /// Maximum number of distinct nodes for which the Gram matrix is
    /// guaranteed invertible, if limited.
    fn node_limit(&self) -> Option<usize> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedFormKind {
    Uniform,
    TruncExp { rate: f64 },
}

/// Single-pair kernel `ψ(min) χ(max) / C` with `ψ'(a) = 0` and `χ'(b) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormKernel {
    kind: ClosedFormKind,
    interval: Interval,
    normalizer: f64,
    /// Characteristic roots of `f'' - rate f' - f = 0`.
    roots: (f64, f64),
}

/// Kernel of `H¹` for the uniform measure:
/// `K(x,y) = (b-a)/sinh(b-a) · cosh(min(x,y)-a) · cosh(b-max(x,y))`.
pub fn uniform_kernel(interval: Interval) -> ClosedFormKernel {
    let len = interval.length();
    ClosedFormKernel {
        kind: ClosedFormKind::Uniform,
        interval,
        normalizer: len.sinh() / len,
        roots: (-1.0, 1.0),
    }
}

/// Kernel of `H¹(μ)` for the unit-rate exponential truncated to `interval`.
pub fn trunc_exp_kernel(interval: Interval) -> Result<ClosedFormKernel> {
    trunc_exp_kernel_rate(interval, 1.0)
}

/// As [`trunc_exp_kernel`] for density `∝ e^{-rate t}`.
pub fn trunc_exp_kernel_rate(interval: Interval, rate: f64) -> Result<ClosedFormKernel> {
    if interval.a() < 0.0 {
        return Err(Error::InvalidParameter(
            "truncated exponential kernel needs an interval in [0, inf)".into(),
        ));
    }
    if !(rate.is_finite() && rate > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rate must be positive, got {rate}"
        )));
    }
    let disc = (rate * rate + 4.0).sqrt();
    let (r0, r1) = (0.5 * (rate - disc), 0.5 * (rate + disc));
    let (a, b) = (interval.a(), interval.b());
    // C = χ(b) ∫ψ dμ, with χ(b) = (r1 - r0) e^{rate b} and
    // ∫ψ dμ = rate (e^{r0 (a-b)} - e^{r1 (a-b)}) / (e^{-rate a} - e^{-rate b}).
    let z = (-rate * a).exp() - (-rate * b).exp();
    let normalizer =
        (r1 - r0) * (rate * b).exp() * rate * ((r0 * (a - b)).exp() - (r1 * (a - b)).exp()) / z;
    Ok(ClosedFormKernel {
        kind: ClosedFormKind::TruncExp { rate },
        interval,
        normalizer,
        roots: (r0, r1),
    })
}

impl ClosedFormKernel {
    pub fn kind(&self) -> ClosedFormKind {
        self.kind
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    /// The normalization constant `C`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// Left solution, `ψ'(a) = 0`.
    pub fn psi(&self, x: f64) -> f64 {
        let a = self.interval.a();
        match self.kind {
            ClosedFormKind::Uniform => (x - a).cosh(),
            ClosedFormKind::TruncExp { .. } => {
                let (r0, r1) = self.roots;
                r1 * (r1 * a + r0 * x).exp() - r0 * (r0 * a + r1 * x).exp()
            }
        }
    }

    /// Right solution, `χ'(b) = 0`.
    pub fn chi(&self, x: f64) -> f64 {
        let b = self.interval.b();
        match self.kind {
            ClosedFormKind::Uniform => (b - x).cosh(),
            ClosedFormKind::TruncExp { .. } => {
                let (r0, r1) = self.roots;
                r1 * (r1 * b + r0 * x).exp() - r0 * (r0 * b + r1 * x).exp()
            }
        }
    }
}

impl ReproducingKernel for ClosedFormKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        self.psi(lo) * self.chi(hi) / self.normalizer
    }
}

/// Mercer truncation `K_M(x,y) = Σ_{m=0}^{M} α_m φ_m(x) φ_m(y)`,
/// `α_m = 1/(1+λ_m)`.
#[derive(Debug, Clone)]
pub struct MercerKernel {
    basis: SpectralBasis,
    order: usize,
    coefficients: Vec<f64>,
}

impl MercerKernel {
    pub fn new(basis: SpectralBasis, order: usize) -> Result<Self> {
        if order > basis.max_index() {
            return Err(Error::InsufficientBasis {
                available: basis.max_index(),
                required: order,
            });
        }
        let coefficients = (0..=order)
            .map(|m| 1.0 / (1.0 + basis.eigenvalue(m)))
            .collect();
        Ok(Self {
            basis,
            order,
            coefficients,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis(&self) -> &SpectralBasis {
        &self.basis
    }
}

impl ReproducingKernel for MercerKernel {
    fn eval(&self, x: f64, y: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(m, alpha)| alpha * self.basis.value(m, x) * self.basis.value(m, y))
            .sum()
    }

    fn node_limit(&self) -> Option<usize> {
        Some(self.order + 1)
    }
}

/// Gram matrix `K(X, X)`.
pub fn gram<K: ReproducingKernel + ?Sized>(kernel: &K, nodes: &[f64]) -> Result<DMatrix<f64>> {
    for i in 0..nodes.len() {
        for j in 0..i {
            if nodes[i] == nodes[j] {
                return Err(Error::DuplicateNodes { i: j, j: i });
            }
        }
    }
    if let Some(limit) = kernel.node_limit() {
        if nodes.len() > limit {
            return Err(Error::TooManyNodesForTruncation {
                nodes: nodes.len(),
                limit,
                order: limit - 1,
            });
        }
    }
    let n = nodes.len();
    let mut g = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = kernel.eval(nodes[i], nodes[j]);
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Optimal weights `K(X,X)⁻¹ 𝟙`; not constrained to be positive or to sum
/// to one.
pub fn optimal_weights<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    nodes: &[f64],
) -> Result<Vec<f64>> {
    let g = gram(kernel, nodes)?;
    let chol = g.cholesky().ok_or(Error::SingularGram)?;
    let w = chol.solve(&DVector::from_element(nodes.len(), 1.0));
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::SingularGram);
    }
    Ok(w.iter().copied().collect())
}

/// Precision matrix `K(X,X)⁻¹`.
pub fn precision_matrix<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    nodes: &[f64],
) -> Result<DMatrix<f64>> {
    let g = gram(kernel, nodes)?;
    let chol = g.cholesky().ok_or(Error::SingularGram)?;
    Ok(chol.inverse())
}

/// Squared worst-case error `wᵀK(X,X)w - 2·Σw + 1`, clamped at zero when
/// round-off pushes it at most [`WCE_CLAMP`] below.
pub fn wce_squared<K: ReproducingKernel + ?Sized>(
    kernel: &K,
    nodes: &[f64],
    weights: &[f64],
) -> Result<f64> {
    if nodes.len() != weights.len() {
        return Err(Error::InvalidParameter(format!(
            "{} nodes but {} weights",
            nodes.len(),
            weights.len()
        )));
    }
    let g = gram(kernel, nodes)?;
    let w = DVector::from_column_slice(weights);
    let quad = w.dot(&(&g * &w));
    let value = quad - 2.0 * w.sum() + 1.0;
    Ok(if (-WCE_CLAMP..0.0).contains(&value) {
        0.0
    } else {
        value
    })
}

/// Partial tail sum of the spectral worst-case error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTail {
    /// `Σ_{m=M+1}^{M+T} α_m (Σ_i w_i φ_m(x_i))²`.
    pub value: f64,
    /// The `m = M+T` term, a truncation diagnostic.
    pub last_term: f64,
}

/// Default tail length for [`wce_spectral`] with `n` nodes.
pub fn default_tail_length(n: usize) -> usize {
    20 * n
}

/// Spectral form of the squared worst-case error for a rule exact through
/// order `order`.
pub fn wce_spectral(
    basis: &SpectralBasis,
    order: usize,
    nodes: &[f64],
    weights: &[f64],
    tail_length: usize,
) -> Result<SpectralTail> {
    let top = order + tail_length;
    if top > basis.max_index() {
        return Err(Error::InsufficientBasis {
            available: basis.max_index(),
            required: top,
        });
    }
    let mut value = 0.0;
    let mut last_term = 0.0;
    for m in order + 1..=top {
        let s: f64 = nodes
            .iter()
            .zip(weights)
            .map(|(&x, &w)| w * basis.value(m, x))
            .sum();
        last_term = s * s / (1.0 + basis.eigenvalue(m));
        value += last_term;
    }
    Ok(SpectralTail { value, last_term })
}

/// Numerical and closed-form values of the shifted Riemann series
/// `Σ 1/(n²+r²)` and `Σ (-1)^{n-1}/(n²+r²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannSums {
    pub sum1: f64,
    pub sum2: f64,
    pub closed1: f64,
    pub closed2: f64,
}

/// Terms summed explicitly by [`riemann_series_check`].
pub const RIEMANN_TERMS: u64 = 1_000_000;

/// Sums both series with [`RIEMANN_TERMS`] terms plus a tail correction and
/// pairs them with their closed forms.
pub fn riemann_series_check(r: f64) -> Result<RiemannSums> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "r must be positive, got {r}"
        )));
    }
    let (sum1, sum2) = riemann_partial_sums(r, RIEMANN_TERMS);
    Ok(RiemannSums {
        sum1,
        sum2,
        closed1: shifted_zeta_closed_form(r),
        closed2: shifted_eta_closed_form(r),
    })
}

/// Partial sums over `n = 1..=terms`, accumulated from the small terms up,
/// plus tail estimates: the integral `∫_{N+½}^∞ dx/(x²+r²)` for the first
/// series and half the next term for the alternating one.
pub fn riemann_partial_sums(r: f64, terms: u64) -> (f64, f64) {
    let r2 = r * r;
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for n in (1..=terms).rev() {
        let nf = n as f64;
        let t = 1.0 / (nf * nf + r2);
        s1 += t;
        if n % 2 == 1 {
            s2 += t;
        } else {
            s2 -= t;
        }
    }
    let edge = terms as f64 + 0.5;
    let tail1 = if r > 0.0 {
        (r / edge).atan() / r
    } else {
        1.0 / edge
    };
    let next = terms as f64 + 1.0;
    let sign = if (terms + 1) % 2 == 1 { 1.0 } else { -1.0 };
    let tail2 = 0.5 * sign / (next * next + r2);
    (s1 + tail1, s2 + tail2)
}

/// `(πr/tanh(πr) - 1)/(2r²)`, continuous at `r = 0` where it equals `π²/6`.
pub fn shifted_zeta_closed_form(r: f64) -> f64 {
    use std::f64::consts::PI;
    let x = PI * r;
    if x.abs() < 1e-3 {
        // x/tanh x - 1 = x²/3 - x⁴/45 + 2x⁶/945
        let x2 = x * x;
        return PI * PI * 0.5 * (1.0 / 3.0 - x2 / 45.0 + 2.0 * x2 * x2 / 945.0);
    }
    (x / x.tanh() - 1.0) / (2.0 * r * r)
}

/// `(1 - πr/sinh(πr))/(2r²)`, continuous at `r = 0` where it equals `π²/12`.
pub fn shifted_eta_closed_form(r: f64) -> f64 {
    use std::f64::consts::PI;
    let x = PI * r;
    if x.abs() < 1e-3 {
        // 1 - x/sinh x = x²/6 - 7x⁴/360 + 31x⁶/15120
        let x2 = x * x;
        return PI * PI * 0.5 * (1.0 / 6.0 - 7.0 * x2 / 360.0 + 31.0 * x2 * x2 / 15120.0);
    }
    if x > 700.0 {
        return 1.0 / (2.0 * r * r);
    }
    (1.0 - x / x.sinh()) / (2.0 * r * r)
}
