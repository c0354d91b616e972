//! Poincaré quadrature rules: `n` nodes and weights integrating
//! `φ_0, …, φ_{2n-1}` exactly against `μ`.
//!
//! Construction runs in three stages: a grid linear program ([`lp`]), merging
//! of its support into `n` clusters ([`cluster`]) and a Gauss–Newton polish
//! ([`refine`]).

pub mod cluster;
pub mod lp;
pub mod refine;

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::io::{format_float, parse_float};
use crate::kernel::{wce_squared, ReproducingKernel};
use crate::measures::{Measure, MeasureKind};
use crate::spectral::{
    auto_basis, closed_form_trunc_exp_rate, closed_form_uniform, fem_basis, SpectralBasis,
    DEFAULT_MESH_SIZE,
};

pub use cluster::cluster_support;
pub use lp::{solve_lp, LpProblem, LpSolution, DEFAULT_LP_TOL};
pub use refine::{moment_residuals, refine, RefineConfig, Refinement};

/// LP weights at or below this are dropped before clustering.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;
/// Largest tolerated moment residual of a finished rule.
pub const EXACTNESS_TOL: f64 = 1e-5;

/// Default LP grid size: `max(1000, 50 n)`.
pub fn default_grid_size(n: usize) -> usize {
    (50 * n).max(1000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BasisBackend {
    #[default]
    Auto,
    ClosedForm,
    Fem,
}

impl FromStr for BasisBackend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "auto" => Ok(Self::Auto),
            "closed" | "closed_form" | "closed-form" | "closedform" => Ok(Self::ClosedForm),
            "fem" => Ok(Self::Fem),
            other => Err(Error::Parse(format!("unknown basis backend {other:?}"))),
        }
    }
}

impl fmt::Display for BasisBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Auto => "auto",
            Self::ClosedForm => "closed_form",
            Self::Fem => "fem",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureConfig {
    /// LP grid size; `None` uses [`default_grid_size`].
    pub grid_size: Option<usize>,
    pub lp_tol: f64,
    pub refine: RefineConfig,
    /// FEM mesh size when the finite-element backend is used.
    pub mesh_size: usize,
    pub backend: BasisBackend,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            grid_size: None,
            lp_tol: DEFAULT_LP_TOL,
            refine: RefineConfig::default(),
            mesh_size: DEFAULT_MESH_SIZE,
            backend: BasisBackend::Auto,
        }
    }
}

impl QuadratureConfig {
    /// Parses flat `key = value` lines. Blank lines and `#` comments are
    /// ignored. Keys: `grid_size`, `lp_tol`, `refine_tol`, `refine_accept`,
    /// `max_iter`, `mesh_size`, `basis_backend`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected key = value", lineno + 1))
            })?;
            let value = value.trim();
            let int = |v: &str| {
                v.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("line {}: not an integer: {v:?}", lineno + 1))
                })
            };
            match key.trim() {
                "grid_size" => config.grid_size = Some(int(value)?),
                "lp_tol" => config.lp_tol = parse_float(value)?,
                "refine_tol" => config.refine.target = parse_float(value)?,
                "refine_accept" => config.refine.accept = parse_float(value)?,
                "max_iter" => config.refine.max_iterations = int(value)?,
                "mesh_size" => config.mesh_size = int(value)?,
                "basis_backend" => config.backend = value.parse()?,
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        lineno + 1
                    )));
                }
            }
        }
        Ok(config)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Basis with indices `0..=2n` for an `n`-node rule.
pub fn basis_for(measure: &Measure, n: usize, config: &QuadratureConfig) -> Result<SpectralBasis> {
    let m_max = 2 * n;
    match config.backend {
        BasisBackend::Auto => auto_basis(measure, config.mesh_size, m_max),
        BasisBackend::Fem => fem_basis(measure, config.mesh_size, m_max),
        BasisBackend::ClosedForm => match measure.kind() {
            MeasureKind::Uniform => Ok(closed_form_uniform(measure.interval(), m_max)),
            MeasureKind::TruncatedExponential { rate } => {
                closed_form_trunc_exp_rate(measure.interval(), *rate, m_max)
            }
            _ => Err(Error::InvalidParameter(
                "no closed-form basis for this measure".into(),
            )),
        },
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub grid_size: usize,
    pub lp_objective: f64,
    pub lp_iterations: usize,
    /// Grid points carrying LP weight above [`SUPPORT_THRESHOLD`].
    pub lp_support: usize,
    pub cluster_count: usize,
    /// `max_i |δ_{i0} - Σ_j w_j φ_i(x_j)|` over `i < 2n`.
    pub moment_residual: f64,
    pub refine_objective: f64,
    pub refine_iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Highest basis index integrated exactly, `2n - 1`.
    pub order: usize,
    pub diagnostics: Diagnostics,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    pub fn wce_squared<K: ReproducingKernel + ?Sized>(&self, kernel: &K) -> Result<f64> {
        wce_squared(kernel, &self.nodes, &self.weights)
    }

    /// `n w_i / ((b - a) ρ(x_i))`, which tends to 1 as `n` grows.
    pub fn weight_density_ratios(&self, measure: &Measure) -> Vec<f64> {
        let n = self.len() as f64;
        let len = measure.interval().length();
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| n * w / (len * measure.pdf(x)))
            .collect()
    }

    /// Writes `node,weight` rows preceded by `#` comment lines with the
    /// rule size, order and diagnostics.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut out = out;
        let d = &self.diagnostics;
        writeln!(out, "# n = {}", self.len())?;
        writeln!(out, "# order = {}", self.order)?;
        writeln!(out, "# grid_size = {}", d.grid_size)?;
        writeln!(out, "# lp_objective = {}", format_float(d.lp_objective))?;
        writeln!(
            out,
            "# moment_residual = {}",
            format_float(d.moment_residual)
        )?;
        writeln!(
            out,
            "# refine_objective = {}",
            format_float(d.refine_objective)
        )?;
        writeln!(out, "# converged = {}", d.converged)?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["node", "weight"])?;
        for (x, wt) in self.nodes.iter().zip(&self.weights) {
            w.write_record([format_float(*x), format_float(*wt)])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: &Path) -> Result<()> {
        self.write_csv(std::fs::File::create(path)?)
    }
}

/// Reads the `node,weight` rows of a rule CSV.
pub fn read_rule_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::Parse("expected node,weight columns".into()));
        }
        nodes.push(parse_float(&record[0])?);
        weights.push(parse_float(&record[1])?);
    }
    Ok((nodes, weights))
}

/// Computes the `n`-node Poincaré quadrature of `measure`.
pub fn poincare_quadrature(
    measure: &Measure,
    n: usize,
    config: &QuadratureConfig,
) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let basis = basis_for(measure, n, config)?;
    poincare_quadrature_with_basis(&basis, n, config)
}

/// As [`poincare_quadrature`] with a precomputed basis (index `2n` or more).
pub fn poincare_quadrature_with_basis(
    basis: &SpectralBasis,
    n: usize,
    config: &QuadratureConfig,
) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one node".into()));
    }
    let grid_size = config.grid_size.unwrap_or_else(|| default_grid_size(n));
    let problem = LpProblem::poincare(basis, n, grid_size)?;
    let solution = solve_lp(&problem, config.lp_tol)?;
    let support = solution.support(SUPPORT_THRESHOLD);
    let points: Vec<f64> = support.iter().map(|&j| problem.grid[j]).collect();
    let masses: Vec<f64> = support.iter().map(|&j| solution.weights[j]).collect();
    let (nodes, weights) = cluster_support(&points, &masses, n)?;
    let polished = refine(&nodes, &weights, basis, n, &config.refine)?;

    let interval = basis.interval();
    let min_gap = 1e-10 * interval.length();
    let ordered = polished.nodes.windows(2).all(|p| p[1] - p[0] > min_gap);
    let inside = polished.nodes.iter().all(|&x| interval.contains(x));
    if !ordered || !inside {
        return Err(Error::WrongOrder);
    }
    if polished.weights.iter().any(|&w| w <= 0.0) {
        return Err(Error::InvalidRule(
            "refinement produced a zero weight".into(),
        ));
    }
    let moment_residual = moment_residuals(basis, &polished.nodes, &polished.weights, 2 * n)
        .iter()
        .fold(0.0f64, |m, r| m.max(r.abs()));
    if moment_residual > EXACTNESS_TOL {
        return Err(Error::DidNotConverge(format!(
            "moment residual {moment_residual:.3e} after {} refinement steps",
            polished.iterations
        )));
    }
    Ok(QuadratureRule {
        order: 2 * n - 1,
        diagnostics: Diagnostics {
            grid_size,
            lp_objective: solution.objective,
            lp_iterations: solution.iterations,
            lp_support: support.len(),
            cluster_count: n,
            moment_residual,
            refine_objective: polished.objective,
            refine_iterations: polished.iterations,
            converged: polished.converged,
        },
        nodes: polished.nodes,
        weights: polished.weights,
    })
}

/// The `n` zeros of `φ_n`, located by a `100 n`-point sign scan and
/// bisection to `1e-12`.
pub fn zeros_of_basis_function(basis: &SpectralBasis, n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > basis.max_index() {
        return Err(Error::IndexOutOfRange {
            index: n,
            max: basis.max_index(),
        });
    }
    let scan = basis.interval().linspace(100 * n + 1);
    let f = |x: f64| basis.value(n, x);
    let mut roots = Vec::with_capacity(n);
    let mut prev = (scan[0], f(scan[0]));
    for &x in &scan[1..] {
        let fx = f(x);
        if fx == 0.0 {
            roots.push(x);
        } else if prev.1 != 0.0 && prev.1.signum() != fx.signum() {
            let (mut lo, mut hi, mut flo) = (prev.0, x, prev.1);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if fm.signum() == flo.signum() {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev = (x, fx);
    }
    if roots.len() != n {
        return Err(Error::WrongRootCount {
            expected: n,
            found: roots.len(),
        });
    }
    Ok(roots)
}
