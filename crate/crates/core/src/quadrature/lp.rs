//! Moment-matching linear program on a grid and a dense two-phase revised
//! simplex to solve it.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spectral::SpectralBasis;

/// Default feasibility and optimality tolerance.
pub const DEFAULT_LP_TOL: f64 = 1e-9;

/// `min Σ_j c_j w_j` subject to `Σ_j A_ij w_j = rhs_i`, `w ≥ 0`.
///
/// For the Poincaré problem, `c_j = φ_{2n}(z_j)`, row `i` holds `φ_i(z_j)` for
/// `i = 0..2n-1` and `rhs = e_0`. Row 0 is the sum-to-one constraint since
/// `φ_0 ≡ 1`. Upper bounds `w_j ≤ 1` are implied by it.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub grid: Vec<f64>,
    pub objective: Vec<f64>,
    pub constraints: DMatrix<f64>,
    pub rhs: Vec<f64>,
}

impl LpProblem {
    /// Builds the grid problem for an `n`-node rule on `grid_size` evenly
    /// spaced points `z_j = a + j (b-a)/(grid_size-1)`.
    pub fn poincare(basis: &SpectralBasis, n: usize, grid_size: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("need at least one node".into()));
        }
        if grid_size < 50 * n {
            return Err(Error::InvalidParameter(format!(
                "grid of {grid_size} points is too coarse for {n} nodes (need at least {})",
                50 * n
            )));
        }
        if basis.max_index() < 2 * n {
            return Err(Error::InsufficientBasis {
                available: basis.max_index(),
                required: 2 * n,
            });
        }
        let grid = basis.interval().linspace(grid_size);
        let rows = 2 * n;
        let constraints = DMatrix::from_fn(rows, grid_size, |i, j| basis.value(i, grid[j]));
        let objective = grid.iter().map(|&z| basis.value(2 * n, z)).collect();
        let mut rhs = vec![0.0; rows];
        rhs[0] = 1.0;
        Ok(Self {
            grid,
            objective,
            constraints,
            rhs,
        })
    }

    pub fn rows(&self) -> usize {
        self.constraints.nrows()
    }

    pub fn columns(&self) -> usize {
        self.constraints.ncols()
    }

    /// `max_i |A w - rhs|_i`.
    pub fn residual(&self, weights: &[f64]) -> f64 {
        let w = DVector::from_column_slice(weights);
        let r = &self.constraints * w - DVector::from_column_slice(&self.rhs);
        r.amax()
    }
}

/// Optimal basic solution.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub weights: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// `max |A w - rhs|` at the returned point.
    pub residual: f64,
}

impl LpSolution {
    /// Grid indices with weight above `threshold`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        (0..self.weights.len())
            .filter(|&j| self.weights[j] > threshold)
            .collect()
    }
}

/// Total size of the right-hand-side perturbation relative to `‖rhs‖∞`.
const PERTURBATION: f64 = 1e-4;
const REFACTOR_EVERY: usize = 40;
const DEGENERATE_STREAK: usize = 50;

struct Simplex<'a> {
    a: &'a DMatrix<f64>,
    b: DVector<f64>,
    m: usize,
    n: usize,
    /// basis[i] is the variable basic in row i; indices >= n are artificials.
    basis: Vec<usize>,
    is_basic: Vec<bool>,
    b_inv: DMatrix<f64>,
    x_b: DVector<f64>,
    tol: f64,
    iterations: usize,
    max_iterations: usize,
}

impl<'a> Simplex<'a> {
    fn column(&self, j: usize) -> DVector<f64> {
        if j < self.n {
            self.a.column(j).into_owned()
        } else {
            let mut e = DVector::zeros(self.m);
            e[j - self.n] = 1.0;
            e
        }
    }

    fn refactor(&mut self) -> Result<()> {
        let basis_matrix = DMatrix::from_fn(self.m, self.m, |i, k| {
            let j = self.basis[k];
            if j < self.n {
                self.a[(i, j)]
            } else if i == j - self.n {
                1.0
            } else {
                0.0
            }
        });
        self.b_inv = basis_matrix
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown("simplex basis became singular".into()))?;
        self.x_b = &self.b_inv * &self.b;
        for v in self.x_b.iter_mut() {
            if *v < 0.0 && *v > -self.tol {
                *v = 0.0;
            }
        }
        Ok(())
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &DVector<f64>) {
        let theta = self.x_b[row] / u[row];
        for i in 0..self.m {
            if i != row {
                self.x_b[i] -= theta * u[i];
            }
        }
        self.x_b[row] = theta;
        let pivot_row = self.b_inv.row(row) / u[row];
        for i in 0..self.m {
            if i != row && u[i] != 0.0 {
                let ui = u[i];
                let mut r = self.b_inv.row_mut(i);
                r -= &pivot_row * ui;
            }
        }
        self.b_inv.set_row(row, &pivot_row);
        self.is_basic[self.basis[row]] = false;
        self.is_basic[entering] = true;
        self.basis[row] = entering;
    }

    /// Leaving row for entering column `u = B⁻¹ A_q`: Harris two-pass test,
    /// or the textbook minimum ratio with lowest-index ties under Bland.
    fn ratio_test(&self, u: &DVector<f64>, bland: bool) -> Result<usize> {
        let piv_tol = self.tol * u.amax().max(1.0);
        let candidates = (0..self.m).filter(|&i| u[i] > piv_tol);
        if bland {
            let mut leave: Option<(usize, f64)> = None;
            for i in candidates {
                let ratio = self.x_b[i].max(0.0) / u[i];
                let better = match leave {
                    None => true,
                    Some((r, best)) => {
                        ratio < best - 1e-14
                            || (ratio <= best + 1e-14 && self.basis[i] < self.basis[r])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            return leave.map(|(i, _)| i).ok_or(Error::Unbounded);
        }
        let theta_max = candidates
            .clone()
            .map(|i| (self.x_b[i].max(0.0) + self.tol) / u[i])
            .fold(f64::INFINITY, f64::min);
        if !theta_max.is_finite() {
            return Err(Error::Unbounded);
        }
        candidates
            .filter(|&i| self.x_b[i].max(0.0) / u[i] <= theta_max)
            .max_by(|&i, &k| u[i].total_cmp(&u[k]))
            .ok_or(Error::Unbounded)
    }

    /// Reduced cost of nonbasic `j` for simplex multipliers `y`.
    fn reduced_cost(&self, cost: &[f64], y: &DVector<f64>, j: usize) -> f64 {
        if j < self.n {
            cost[j] - self.a.column(j).dot(y)
        } else {
            cost[j] - y[j - self.n]
        }
    }

    fn multipliers(&self, cost: &[f64]) -> DVector<f64> {
        let c_b = DVector::from_iterator(self.m, self.basis.iter().map(|&j| cost[j]));
        self.b_inv.tr_mul(&c_b)
    }

    /// Dual simplex iterations from a dual-feasible basis until the basic
    /// solution is primal feasible.
    fn restore_feasibility(&mut self, cost: &[f64]) -> Result<()> {
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::DidNotConverge(format!(
                    "simplex stopped after {} iterations",
                    self.iterations
                )));
            }
            let Some(row) = (0..self.m)
                .filter(|&i| self.x_b[i] < -self.tol)
                .min_by(|&i, &k| self.x_b[i].total_cmp(&self.x_b[k]))
            else {
                return Ok(());
            };
            let y = self.multipliers(cost);
            let r = self.b_inv.row(row).into_owned();
            let mut entering = None;
            let mut best = f64::INFINITY;
            for j in 0..self.n {
                if self.is_basic[j] {
                    continue;
                }
                let alpha = (&r * self.a.column(j))[0];
                if alpha < -self.tol {
                    let ratio = self.reduced_cost(cost, &y, j).max(0.0) / -alpha;
                    if ratio < best {
                        best = ratio;
                        entering = Some(j);
                    }
                }
            }
            let q = entering.ok_or(Error::Infeasible(-self.x_b[row]))?;
            let u = &self.b_inv * self.column(q);
            self.pivot(row, q, &u);
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }

    /// Runs simplex iterations for `cost` (over structurals then
    /// artificials) until optimal. Artificials never enter when
    /// `allow_artificial` is false.
    fn optimize(&mut self, cost: &[f64], allow_artificial: bool) -> Result<()> {
        let total = if allow_artificial {
            self.n + self.m
        } else {
            self.n
        };
        let mut degenerate = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::DidNotConverge(format!(
                    "simplex stopped after {} iterations",
                    self.iterations
                )));
            }
            let y = self.multipliers(cost);
            let bland = degenerate >= DEGENERATE_STREAK;
            let mut entering = None;
            let mut best = -self.tol;
            for j in 0..total {
                if self.is_basic[j] {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if d < best {
                    best = d;
                    entering = Some(j);
                    if bland {
                        break;
                    }
                }
            }
            let Some(q) = entering else {
                return Ok(());
            };
            let u = &self.b_inv * self.column(q);
            let row = self.ratio_test(&u, bland)?;
            if self.x_b[row] < 0.0 {
                self.x_b[row] = 0.0;
            }
            if self.x_b[row] / u[row] <= self.tol {
                degenerate += 1;
            } else {
                degenerate = 0;
            }
            self.pivot(row, q, &u);
            self.iterations += 1;
            since_refactor += 1;
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
        }
    }
}

/// Solves `problem` by two-phase revised simplex with Dantzig pricing and a
/// Bland fallback on long degenerate streaks.
pub fn solve_lp(problem: &LpProblem, tol: f64) -> Result<LpSolution> {
    let (m, n) = (problem.rows(), problem.columns());
    let original = DVector::from_column_slice(&problem.rhs);
    // The moment problem is massively degenerate (all but one right-hand
    // side is zero). It is solved first for rhs + A ε with small random
    // ε > 0, which has a strictly positive feasible point, and the true rhs
    // is restored afterwards with dual simplex steps.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let scale = PERTURBATION * original.amax().max(1.0) / n as f64;
    let epsilon = DVector::from_fn(n, |_, _| scale * (1.0 + rng.random::<f64>()));
    // Rows, then columns, are equilibrated to unit max-norm. Column j is
    // solved for in units of `column_scale[j]`.
    let mut a = problem.constraints.clone();
    let mut b = original;
    for i in 0..m {
        let norm = a.row(i).amax();
        if norm > 0.0 {
            let mut row = a.row_mut(i);
            row /= norm;
            b[i] /= norm;
        }
    }
    let column_scale: Vec<f64> = (0..n)
        .map(|j| {
            let norm = a.column(j).amax();
            if norm > 0.0 {
                1.0 / norm
            } else {
                1.0
            }
        })
        .collect();
    for (j, s) in column_scale.iter().enumerate() {
        let mut col = a.column_mut(j);
        col *= *s;
    }
    let mut perturbed = &b + &a * epsilon;
    // Rows with negative right-hand side are negated so artificials start
    // feasible.
    for i in 0..m {
        if perturbed[i] < 0.0 {
            perturbed[i] = -perturbed[i];
            b[i] = -b[i];
            let mut row = a.row_mut(i);
            row *= -1.0;
        }
    }
    let mut simplex = Simplex {
        a: &a,
        b: perturbed.clone(),
        m,
        n,
        basis: (n..n + m).collect(),
        is_basic: (0..n + m).map(|j| j >= n).collect(),
        b_inv: DMatrix::identity(m, m),
        x_b: perturbed,
        tol,
        iterations: 0,
        max_iterations: 50 * m + n,
    };

    let phase_one: Vec<f64> = (0..n + m).map(|j| if j < n { 0.0 } else { 1.0 }).collect();
    simplex.optimize(&phase_one, false)?;
    simplex.refactor()?;
    let infeasibility: f64 = simplex
        .basis
        .iter()
        .zip(simplex.x_b.iter())
        .filter(|(j, _)| **j >= n)
        .map(|(_, v)| v.abs())
        .sum();
    if infeasibility > tol.max(1e-12) * 10.0 {
        return Err(Error::Infeasible(infeasibility));
    }

    // Drive zero-level artificials out of the basis where possible; rows
    // where no structural column has a nonzero entry are redundant.
    for row in 0..m {
        if simplex.basis[row] < n {
            continue;
        }
        let r = simplex.b_inv.row(row).into_owned();
        let mut best = None;
        let mut best_abs = 1e-9;
        for j in 0..n {
            if simplex.is_basic[j] {
                continue;
            }
            let v = (&r * a.column(j))[0].abs();
            if v > best_abs {
                best_abs = v;
                best = Some(j);
            }
        }
        if let Some(j) = best {
            let u = &simplex.b_inv * a.column(j);
            simplex.x_b[row] = 0.0;
            simplex.pivot(row, j, &u);
        }
    }
    simplex.refactor()?;

    let mut cost: Vec<f64> = problem
        .objective
        .iter()
        .zip(&column_scale)
        .map(|(c, s)| c * s)
        .collect();
    cost.extend(std::iter::repeat_n(0.0, m));
    simplex.optimize(&cost, false)?;
    simplex.b = b;
    simplex.refactor()?;
    simplex.restore_feasibility(&cost)?;
    simplex.optimize(&cost, false)?;
    simplex.refactor()?;

    let mut weights = vec![0.0; n];
    for (i, &j) in simplex.basis.iter().enumerate() {
        if j < n {
            weights[j] = simplex.x_b[i].max(0.0) * column_scale[j];
        }
    }
    let objective = weights
        .iter()
        .zip(&problem.objective)
        .map(|(w, c)| w * c)
        .sum();
    let residual = problem.residual(&weights);
    if residual > 1e3 * tol {
        return Err(Error::Infeasible(residual));
    }
    Ok(LpSolution {
        weights,
        objective,
        iterations: simplex.iterations,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::Interval;
    use crate::spectral::closed_form_uniform;

    fn small(a: &[&[f64]], b: &[f64], c: &[f64]) -> LpProblem {
        let m = a.len();
        let n = c.len();
        LpProblem {
            grid: (0..n).map(|j| j as f64).collect(),
            objective: c.to_vec(),
            constraints: DMatrix::from_fn(m, n, |i, j| a[i][j]),
            rhs: b.to_vec(),
        }
    }

    #[test]
    fn textbook_problem() {
        // min -x0 - 2 x1  s.t. x0 + x1 + s0 = 4, x0 + 3 x1 + s1 = 6
        let p = small(
            &[&[1.0, 1.0, 1.0, 0.0], &[1.0, 3.0, 0.0, 1.0]],
            &[4.0, 6.0],
            &[-1.0, -2.0, 0.0, 0.0],
        );
        let sol = solve_lp(&p, 1e-10).unwrap();
        assert!((sol.weights[0] - 3.0).abs() < 1e-12);
        assert!((sol.weights[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective + 5.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_problem_is_reported() {
        // x0 + x1 = 1 and x0 + x1 = 2
        let p = small(&[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 2.0], &[0.0, 0.0]);
        assert!(matches!(solve_lp(&p, 1e-9), Err(Error::Infeasible(_))));
    }

    #[test]
    fn redundant_rows_are_tolerated() {
        let p = small(
            &[&[1.0, 1.0, 1.0], &[2.0, 2.0, 2.0], &[1.0, -1.0, 0.0]],
            &[1.0, 2.0, 0.0],
            &[1.0, 1.0, 0.0],
        );
        let sol = solve_lp(&p, 1e-10).unwrap();
        assert!((sol.weights[2] - 1.0).abs() < 1e-12);
        assert!(sol.objective.abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // -x0 - x1 = -1, min x0
        let p = small(&[&[-1.0, -1.0]], &[-1.0], &[1.0, 0.0]);
        let sol = solve_lp(&p, 1e-10).unwrap();
        assert!((sol.weights[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_node_uniform_concentrates_at_midpoint() {
        let basis = closed_form_uniform(Interval::unit(), 2);
        let p = LpProblem::poincare(&basis, 1, 1000).unwrap();
        assert_eq!(p.rows(), 2);
        let sol = solve_lp(&p, DEFAULT_LP_TOL).unwrap();
        let support = sol.support(1e-10);
        let mass: f64 = support.iter().map(|&j| sol.weights[j]).sum();
        let mean: f64 = support.iter().map(|&j| sol.weights[j] * p.grid[j]).sum();
        assert!((mass - 1.0).abs() < 1e-12);
        assert!((mean - 0.5).abs() < 1e-9);
        assert!(sol.residual <= 1e-9);
        // row 0 is exactly the total-mass constraint
        assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_precondition() {
        let basis = closed_form_uniform(Interval::unit(), 6);
        assert!(LpProblem::poincare(&basis, 3, 149).is_err());
        assert!(matches!(
            LpProblem::poincare(&basis, 4, 1000),
            Err(Error::InsufficientBasis { .. })
        ));
    }
}
