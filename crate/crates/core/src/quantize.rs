//! Baselines for discretizing a measure: classical Gaussian quadrature,
//! Lloyd's optimal quantizer and the 2-Wasserstein distance to `μ`.

use std::io::Write;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::io::format_float;
use crate::measures::{cdf_and_quantile, CdfTable, Measure};
use crate::quadrature::{
    basis_for, poincare_quadrature_with_basis, zeros_of_basis_function, QuadratureConfig,
    QuadratureRule,
};

/// Points of the grid on which the Stieltjes procedure runs.
pub const STIELTJES_POINTS: usize = 10_000;
/// Default number of midpoints in the `p` integral of [`wasserstein`].
pub const DEFAULT_P_GRID: usize = 10_000;
/// Resolution of the cdf table used to invert `F`.
pub const QUANTILE_TABLE_SIZE: usize = 20_001;
pub const LLOYD_MAX_ITERATIONS: usize = 10_000;

/// Finitely supported probability measure with strictly increasing atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, masses: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != masses.len() {
            return Err(Error::InvalidRule(format!(
                "{} atoms and {} masses",
                atoms.len(),
                masses.len()
            )));
        }
        if atoms.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(Error::InvalidRule(
                "atoms must be strictly increasing".into(),
            ));
        }
        if masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidRule("masses must be positive".into()));
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidRule(format!("masses sum to {total}")));
        }
        Ok(Self { atoms, masses })
    }

    pub fn from_rule(rule: &QuadratureRule) -> Result<Self> {
        Self::new(rule.nodes.clone(), rule.weights.clone())
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Generalized inverse `inf {x : G(x) ≥ p}` of the step cdf.
    pub fn quantile(&self, p: f64) -> f64 {
        let mut acc = 0.0;
        for (x, m) in self.atoms.iter().zip(&self.masses) {
            acc += m;
            if acc >= p {
                return *x;
            }
        }
        *self.atoms.last().unwrap()
    }

    /// Cumulative masses `G(x_1), …, G(x_n)`, the last forced to 1.
    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out: Vec<f64> = self
            .masses
            .iter()
            .map(|m| {
                acc += m;
                acc
            })
            .collect();
        *out.last_mut().unwrap() = 1.0;
        out
    }
}

/// Classical `n`-point Gaussian quadrature of `μ` (exact for polynomials of
/// degree `2n-1`): recurrence coefficients by the discretized Stieltjes
/// procedure, then nodes and weights from the Jacobi matrix.
pub fn gaussian_quadrature(measure: &Measure, n: usize) -> Result<DiscreteMeasure> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let interval = measure.interval();
    let (a, b) = (interval.a(), interval.b());
    let (points, w) = measure.discretize(STIELTJES_POINTS);
    if n > points.len() {
        return Err(Error::MomentBreakdown(points.len()));
    }
    // work on [-1, 1] for conditioning
    let s: Vec<f64> = points.iter().map(|t| (2.0 * t - a - b) / (b - a)).collect();
    let mut alpha = Vec::with_capacity(n);
    let mut beta = Vec::with_capacity(n);
    let mut q_prev = vec![0.0; s.len()];
    let mut q = vec![1.0; s.len()];
    let mut sqrt_beta = 0.0;
    for k in 0..n {
        let ak: f64 = s
            .iter()
            .zip(&w)
            .zip(&q)
            .map(|((s, w), q)| w * s * q * q)
            .sum();
        alpha.push(ak);
        if k + 1 == n {
            break;
        }
        let r: Vec<f64> = (0..s.len())
            .map(|j| (s[j] - ak) * q[j] - sqrt_beta * q_prev[j])
            .collect();
        let bk: f64 = r.iter().zip(&w).map(|(r, w)| w * r * r).sum();
        if !(bk > 1e-30) {
            return Err(Error::MomentBreakdown(k + 1));
        }
        sqrt_beta = bk.sqrt();
        beta.push(sqrt_beta);
        q_prev = q;
        q = r.into_iter().map(|v| v / sqrt_beta).collect();
    }
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (a + 0.5 * (eig.eigenvalues[i] + 1.0) * (b - a), v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    DiscreteMeasure::new(
        pairs.iter().map(|p| p.0).collect(),
        pairs.iter().map(|p| p.1 / total).collect(),
    )
}

/// Outcome of [`lloyd_quantizer`].
#[derive(Debug, Clone)]
pub struct Quantization {
    pub quantizer: DiscreteMeasure,
    pub iterations: usize,
    pub converged: bool,
    /// Quantization energy `Σ_i ∫_{cell i} (t - x_i)² dμ` before the first
    /// update and after each iteration.
    pub energies: Vec<f64>,
}

/// Voronoi cells of sorted atoms on `[a, b]`.
fn cells(atoms: &[f64], a: f64, b: f64) -> Vec<(f64, f64)> {
    (0..atoms.len())
        .map(|i| {
            let lo = if i == 0 {
                a
            } else {
                0.5 * (atoms[i - 1] + atoms[i])
            };
            let hi = if i + 1 == atoms.len() {
                b
            } else {
                0.5 * (atoms[i] + atoms[i + 1])
            };
            (lo, hi)
        })
        .collect()
}

fn energy(measure: &Measure, atoms: &[f64]) -> f64 {
    let interval = measure.interval();
    cells(atoms, interval.a(), interval.b())
        .iter()
        .zip(atoms)
        .map(|(&(lo, hi), &x)| measure.integrate_segment(|t| (t - x) * (t - x), lo, hi))
        .sum()
}

/// Wasserstein-optimal `n`-atom quantizer by Lloyd's fixed-point iteration,
/// started at the quantiles `(i - 1/2)/n`. Stops when no atom moves more
/// than `1e-10 (b - a)` or after [`LLOYD_MAX_ITERATIONS`].
pub fn lloyd_quantizer(measure: &Measure, n: usize) -> Result<Quantization> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one atom".into()));
    }
    let interval = measure.interval();
    let (a, b) = (interval.a(), interval.b());
    let table = cdf_and_quantile(measure, QUANTILE_TABLE_SIZE)?;
    let mut atoms: Vec<f64> = (1..=n)
        .map(|i| table.quantile_at((i as f64 - 0.5) / n as f64))
        .collect();
    let mut energies = vec![energy(measure, &atoms)];
    let mut masses = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < LLOYD_MAX_ITERATIONS {
        let mut moved: f64 = 0.0;
        let voronoi = cells(&atoms, a, b);
        let mut next = Vec::with_capacity(n);
        for (i, &(lo, hi)) in voronoi.iter().enumerate() {
            let mass = measure.integrate_segment(|_| 1.0, lo, hi);
            let first = measure.integrate_segment(|t| t, lo, hi);
            let x = if mass > 0.0 {
                (first / mass).clamp(lo, hi)
            } else {
                atoms[i]
            };
            moved = moved.max((x - atoms[i]).abs());
            masses[i] = mass;
            next.push(x);
        }
        atoms = next;
        iterations += 1;
        energies.push(energy(measure, &atoms));
        if moved < 1e-10 * (b - a) {
            converged = true;
            break;
        }
    }
    // masses of the final cells
    for (m, (lo, hi)) in masses.iter_mut().zip(cells(&atoms, a, b)) {
        *m = measure.integrate_segment(|_| 1.0, lo, hi);
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(Quantization {
        quantizer: DiscreteMeasure::new(atoms, masses)?,
        iterations,
        converged,
        energies,
    })
}

/// `W₂(μ, G)` with a cdf table already built for `μ`.
pub fn wasserstein_with_table(table: &CdfTable, discrete: &DiscreteMeasure, p_grid: usize) -> f64 {
    let p_grid = p_grid.max(100);
    let cumulative = discrete.cumulative();
    let mut atom = 0;
    let mut acc = 0.0;
    for k in 0..p_grid {
        let p = (k as f64 + 0.5) / p_grid as f64;
        while atom + 1 < cumulative.len() && cumulative[atom] < p {
            atom += 1;
        }
        let d = table.quantile_at(p) - discrete.atoms[atom];
        acc += d * d;
    }
    (acc / p_grid as f64).sqrt()
}

/// `W₂(μ, G) = (∫₀¹ (F⁻¹(p) - G⁻¹(p))² dp)^{1/2}` by the midpoint rule on
/// `p_grid` points (at least 100).
pub fn wasserstein(measure: &Measure, discrete: &DiscreteMeasure, p_grid: usize) -> Result<f64> {
    let table = cdf_and_quantile(measure, QUANTILE_TABLE_SIZE)?;
    Ok(wasserstein_with_table(&table, discrete, p_grid))
}

/// Exact `W₂` between two discrete measures (piecewise-constant quantiles).
pub fn wasserstein_discrete(first: &DiscreteMeasure, second: &DiscreteMeasure) -> f64 {
    let (c1, c2) = (first.cumulative(), second.cumulative());
    let (mut i, mut j) = (0, 0);
    let mut p = 0.0;
    let mut acc = 0.0;
    while i < c1.len() && j < c2.len() {
        let next = c1[i].min(c2[j]);
        let d = first.atoms[i] - second.atoms[j];
        acc += (next - p) * d * d;
        p = next;
        if c1[i] <= next {
            i += 1;
        }
        if c2[j] <= next {
            j += 1;
        }
    }
    acc.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distances {
    pub poincare: f64,
    pub gaussian: f64,
    pub lloyd: f64,
}

/// The three rules of size `n` for one measure with their distances to it.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub n: usize,
    pub poincare: DiscreteMeasure,
    pub gaussian: DiscreteMeasure,
    pub lloyd: DiscreteMeasure,
    pub lloyd_converged: bool,
    /// Zeros of `φ_n`.
    pub zeros: Vec<f64>,
    pub distances: Distances,
    /// `n w_i / ((b - a) ρ(x_i))` for the Poincaré rule.
    pub weight_ratios: Vec<f64>,
}

impl Comparison {
    /// Poincaré and Gaussian distances relative to Lloyd's.
    pub fn ratios_to_lloyd(&self) -> (f64, f64) {
        let d = &self.distances;
        (d.poincare / d.lloyd, d.gaussian / d.lloyd)
    }
}

pub fn compare_rules(measure: &Measure, n: usize, config: &QuadratureConfig) -> Result<Comparison> {
    let basis = basis_for(measure, n, config)?;
    let rule = poincare_quadrature_with_basis(&basis, n, config)?;
    let zeros = zeros_of_basis_function(&basis, n)?;
    let weight_ratios = rule.weight_density_ratios(measure);
    let poincare = DiscreteMeasure::from_rule(&rule)?;
    let gaussian = gaussian_quadrature(measure, n)?;
    let lloyd = lloyd_quantizer(measure, n)?;
    let table = cdf_and_quantile(measure, QUANTILE_TABLE_SIZE)?;
    let distances = Distances {
        poincare: wasserstein_with_table(&table, &poincare, DEFAULT_P_GRID),
        gaussian: wasserstein_with_table(&table, &gaussian, DEFAULT_P_GRID),
        lloyd: wasserstein_with_table(&table, &lloyd.quantizer, DEFAULT_P_GRID),
    };
    Ok(Comparison {
        n,
        poincare,
        gaussian,
        lloyd: lloyd.quantizer,
        lloyd_converged: lloyd.converged,
        zeros,
        distances,
        weight_ratios,
    })
}

pub const COMPARISON_HEADER: [&str; 6] = [
    "density_id",
    "rule",
    "node_index",
    "node",
    "weight",
    "wasserstein",
];

/// Appends one row per node of each rule; zeros of `φ_n` are written as rule
/// `phi_zeros` with empty weight and distance.
pub fn write_comparison_rows<W: Write>(
    out: &mut csv::Writer<W>,
    density_id: usize,
    record: &Comparison,
) -> Result<()> {
    let id = density_id.to_string();
    let d = &record.distances;
    for (name, rule, dist) in [
        ("poincare", &record.poincare, d.poincare),
        ("gaussian", &record.gaussian, d.gaussian),
        ("lloyd", &record.lloyd, d.lloyd),
    ] {
        for (i, (x, w)) in rule.atoms().iter().zip(rule.masses()).enumerate() {
            out.write_record([
                id.as_str(),
                name,
                &i.to_string(),
                &format_float(*x),
                &format_float(*w),
                &format_float(dist),
            ])?;
        }
    }
    for (i, z) in record.zeros.iter().enumerate() {
        out.write_record([
            id.as_str(),
            "phi_zeros",
            &i.to_string(),
            &format_float(*z),
            "",
            "",
        ])?;
    }
    Ok(())
}
