//! Box-constrained least-squares polish of nodes and weights so that the
//! rule integrates `φ_0..φ_{2n-1}` exactly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig {
    /// Stop once the objective is below this.
    pub target: f64,
    /// Objective at or below which the result counts as converged.
    pub accept: f64,
    /// Stop when `‖step‖ / (1 + ‖params‖)` falls below this.
    pub step_tol: f64,
    pub max_iterations: usize,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            target: 1e-24,
            accept: 1e-12,
            step_tol: 1e-12,
            max_iterations: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `Σ_{i<2n} (δ_{i0} - Σ_j w_j φ_i(x_j))²` at the returned point.
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Moment residuals `δ_{i0} - Σ_j w_j φ_i(x_j)` for `i = 0..count`.
pub fn moment_residuals(
    basis: &SpectralBasis,
    nodes: &[f64],
    weights: &[f64],
    count: usize,
) -> Vec<f64> {
    (0..count)
        .map(|i| {
            let target = if i == 0 { 1.0 } else { 0.0 };
            target
                - nodes
                    .iter()
                    .zip(weights)
                    .map(|(&x, &w)| w * basis.value(i, x))
                    .sum::<f64>()
        })
        .collect()
}

fn objective(basis: &SpectralBasis, nodes: &[f64], weights: &[f64], count: usize) -> f64 {
    moment_residuals(basis, nodes, weights, count)
        .iter()
        .map(|r| r * r)
        .sum()
}

/// Projected Gauss–Newton with backtracking on
/// `min Σ_{i=0}^{2n-1} (δ_{i0} - Σ_j w_j φ_i(x_j))²` over `x ∈ [a,b]ⁿ`,
/// `w ∈ [0,1]ⁿ`. Non-convergence is reported through
/// [`Refinement::converged`]; the best iterate is always returned.
pub fn refine(
    nodes: &[f64],
    weights: &[f64],
    basis: &SpectralBasis,
    n: usize,
    config: &RefineConfig,
) -> Result<Refinement> {
    if nodes.len() != n || weights.len() != n {
        return Err(Error::InvalidParameter(format!(
            "expected {n} nodes and weights, got {} and {}",
            nodes.len(),
            weights.len()
        )));
    }
    let moments = 2 * n;
    if basis.max_index() + 1 < moments {
        return Err(Error::InsufficientBasis {
            available: basis.max_index(),
            required: moments - 1,
        });
    }
    let interval = basis.interval();
    let (a, b) = (interval.a(), interval.b());
    let mut x = nodes.to_vec();
    let mut w = weights.to_vec();
    let mut f = objective(basis, &x, &w, moments);
    let mut iterations = 0;

    while f > config.target && iterations < config.max_iterations {
        let r = DVector::from_vec(moment_residuals(basis, &x, &w, moments));
        // Jacobian of the residual: columns are nodes then weights.
        let jac = DMatrix::from_fn(moments, 2 * n, |i, k| {
            if k < n {
                -w[k] * basis.derivative(i, x[k])
            } else {
                -basis.value(i, x[k - n])
            }
        });
        let svd = jac.svd(true, true);
        let cutoff = svd.singular_values.max() * 1e-14;
        let step = match svd.solve(&(-&r), cutoff) {
            Ok(s) => s,
            Err(_) => break,
        };
        let scale = 1.0 + x.iter().chain(&w).map(|v| v * v).sum::<f64>().sqrt();

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let xt: Vec<f64> = (0..n).map(|k| (x[k] + t * step[k]).clamp(a, b)).collect();
            let wt: Vec<f64> = (0..n)
                .map(|k| (w[k] + t * step[n + k]).clamp(0.0, 1.0))
                .collect();
            let ft = objective(basis, &xt, &wt, moments);
            if ft < f {
                accepted = Some((xt, wt, ft));
                break;
            }
            t *= 0.5;
        }
        iterations += 1;
        let Some((xt, wt, ft)) = accepted else {
            break;
        };
        let moved = xt
            .iter()
            .zip(&x)
            .chain(wt.iter().zip(&w))
            .map(|(p, q)| (p - q) * (p - q))
            .sum::<f64>()
            .sqrt();
        x = xt;
        w = wt;
        f = ft;
        if moved / scale < config.step_tol {
            break;
        }
    }
    Ok(Refinement {
        nodes: x,
        weights: w,
        objective: f,
        iterations,
        converged: f <= config.accept,
    })
}
