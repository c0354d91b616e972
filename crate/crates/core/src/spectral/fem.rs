//! Piecewise-linear finite elements for the weak Neumann problem
//! `∫ f' g' dμ = λ ∫ f g dμ`.
//!
//! Both stiffness and mass matrices are symmetric tridiagonal, so the pencil
//! is solved directly: eigenvalues by Sturm-sequence bisection on
//! `A - σB`, eigenvectors by inverse iteration.

use crate::error::{Error, Result};
use crate::measures::{Measure, GL4_NODES, GL4_WEIGHTS};

/// Symmetric tridiagonal matrix stored as diagonal and first off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let mut s = self.diag[i] * v[i];
            if i > 0 {
                s += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * v[i + 1];
            }
            out[i] = s;
        }
        out
    }

    pub fn quad_form(&self, u: &[f64], v: &[f64]) -> f64 {
        self.mul_vec(v).iter().zip(u).map(|(x, y)| x * y).sum()
    }
}

/// Stiffness `A_ij = ∫ h_i' h_j' dμ` and mass `B_ij = ∫ h_i h_j dμ` over hat
/// functions on `mesh_size` evenly spaced nodes.
pub fn assemble(measure: &Measure, mesh_size: usize) -> (SymTridiagonal, SymTridiagonal) {
    let interval = measure.interval();
    let h = interval.length() / (mesh_size - 1) as f64;
    let mut stiffness = SymTridiagonal::zeros(mesh_size);
    let mut mass = SymTridiagonal::zeros(mesh_size);
    for e in 0..mesh_size - 1 {
        let lo = interval.a() + e as f64 * h;
        let (mut m0, mut m00, mut m01, mut m11) = (0.0, 0.0, 0.0, 0.0);
        for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
            let s = 0.5 * (1.0 + x);
            let rho = measure.pdf(lo + s * h) * 0.5 * w * h;
            let (n0, n1) = (1.0 - s, s);
            m0 += rho;
            m00 += rho * n0 * n0;
            m01 += rho * n0 * n1;
            m11 += rho * n1 * n1;
        }
        let k = m0 / (h * h);
        stiffness.diag[e] += k;
        stiffness.diag[e + 1] += k;
        stiffness.off[e] -= k;
        mass.diag[e] += m00;
        mass.diag[e + 1] += m11;
        mass.off[e] += m01;
    }
    (stiffness, mass)
}

/// Number of pencil eigenvalues strictly below `sigma` (Sylvester inertia of
/// `A - σB`).
fn count_below(a: &SymTridiagonal, b: &SymTridiagonal, sigma: f64, pivmin: f64) -> usize {
    let n = a.len();
    let mut count = 0;
    let mut d = a.diag[0] - sigma * b.diag[0];
    if d.abs() < pivmin {
        d = -pivmin;
    }
    if d < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e = a.off[i - 1] - sigma * b.off[i - 1];
        d = a.diag[i] - sigma * b.diag[i] - e * e / d;
        if d.abs() < pivmin {
            d = -pivmin;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Solves `T x = rhs` for tridiagonal `T` by Gaussian elimination with
/// partial pivoting; zero pivots are replaced by `pivmin`.
fn solve_shifted(
    a: &SymTridiagonal,
    b: &SymTridiagonal,
    sigma: f64,
    rhs: &[f64],
    pivmin: f64,
) -> Vec<f64> {
    let n = a.len();
    // Rows of the working band: (sub, diag, sup, sup2), eliminating row by row.
    let mut diag: Vec<f64> = (0..n).map(|i| a.diag[i] - sigma * b.diag[i]).collect();
    let off: Vec<f64> = (0..n - 1).map(|i| a.off[i] - sigma * b.off[i]).collect();
    let mut sup = off.clone();
    let mut sub = off;
    let mut sup2 = vec![0.0; n.saturating_sub(2)];
    let mut x = rhs.to_vec();
    for i in 0..n - 1 {
        if sub[i].abs() > diag[i].abs() {
            // swap rows i and i+1
            std::mem::swap(&mut diag[i], &mut sub[i]);
            std::mem::swap(&mut sup[i], &mut diag[i + 1]);
            if i + 1 < n - 1 {
                sup2[i] = sup[i + 1];
                sup[i + 1] = 0.0;
            }
            x.swap(i, i + 1);
        }
        if diag[i].abs() < pivmin {
            diag[i] = pivmin;
        }
        let l = sub[i] / diag[i];
        diag[i + 1] -= l * sup[i];
        if i + 1 < n - 1 {
            sup[i + 1] -= l * sup2[i];
        }
        x[i + 1] -= l * x[i];
    }
    if diag[n - 1].abs() < pivmin {
        diag[n - 1] = pivmin;
    }
    x[n - 1] /= diag[n - 1];
    if n >= 2 {
        x[n - 2] = (x[n - 2] - sup[n - 2] * x[n - 1]) / diag[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - sup[i] * x[i + 1] - sup2[i] * x[i + 2]) / diag[i];
    }
    x
}

fn b_normalize(b: &SymTridiagonal, v: &mut [f64]) {
    let norm = b.quad_form(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

/// The `count` smallest eigenpairs of `A u = λ B u`, `B`-orthonormal.
pub fn smallest_eigenpairs(
    a: &SymTridiagonal,
    b: &SymTridiagonal,
    count: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = a.len();
    if count > n {
        return Err(Error::InvalidParameter(format!(
            "requested {count} eigenpairs of a {n}x{n} pencil"
        )));
    }
    // B must be positive definite.
    let mut d = b.diag[0];
    for i in 0..n {
        if i > 0 {
            d = b.diag[i] - b.off[i - 1] * b.off[i - 1] / d;
        }
        if !(d > 0.0) {
            return Err(Error::NumericalBreakdown(format!(
                "mass matrix is not positive definite (pivot {i})"
            )));
        }
    }
    let scale = a
        .diag
        .iter()
        .chain(b.diag.iter())
        .fold(0.0f64, |s, v| s.max(v.abs()));
    let pivmin = f64::MIN_POSITIVE.max(scale * 1e-300);

    let mut upper = 1.0;
    while count_below(a, b, upper, pivmin) < count {
        upper *= 2.0;
        if !upper.is_finite() {
            return Err(Error::NumericalBreakdown(
                "eigenvalue bracket diverged".into(),
            ));
        }
    }

    let mut values = Vec::with_capacity(count);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut lo_bound = -1.0;
    for k in 0..count {
        let (mut lo, mut hi) = (lo_bound, upper);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(a, b, mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let lambda = 0.5 * (lo + hi);
        lo_bound = lo;

        // Inverse iteration from a deterministic start, orthogonalized
        // against the pairs already found.
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75).fract())
            .collect();
        for _ in 0..4 {
            let rhs = b.mul_vec(&v);
            v = solve_shifted(a, b, lambda, &rhs, pivmin.max(scale * f64::EPSILON));
            for u in &vectors {
                let proj = b.quad_form(u, &v);
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= proj * y);
            }
            b_normalize(b, &mut v);
        }
        values.push(a.quad_form(&v, &v));
        vectors.push(v);
    }
    Ok((values, vectors))
}

/// Reference solver: Cholesky-reduce the pencil to a dense symmetric
/// problem. Cubic in the mesh size; used to cross-check the tridiagonal path.
pub fn dense_eigenpairs(
    a: &SymTridiagonal,
    b: &SymTridiagonal,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    use nalgebra::DMatrix;
    let n = a.len();
    let dense = |t: &SymTridiagonal| {
        DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => t.diag[i],
            1 => t.off[i.min(j)],
            _ => 0.0,
        })
    };
    let chol = dense(b)
        .cholesky()
        .ok_or_else(|| Error::NumericalBreakdown("mass matrix is not positive definite".into()))?;
    let l = chol.l();
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::NumericalBreakdown("singular Cholesky factor".into()))?;
    let c = &l_inv * dense(a) * l_inv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let eig = c.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let lt_inv = l_inv.transpose();
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            (&lt_inv * eig.eigenvectors.column(i))
                .iter()
                .copied()
                .collect()
        })
        .collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{Interval, Measure};

    #[test]
    fn assembled_matrices_reproduce_constants() {
        let m = Measure::truncated_exponential(Interval::new(0.0, 3.0).unwrap(), 1.0).unwrap();
        let (a, b) = assemble(&m, 200);
        let ones = vec![1.0; 200];
        // constants are in the kernel of A and have unit mass
        assert!(a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-9));
        assert!((b.quad_form(&ones, &ones) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn tridiagonal_solver_matches_dense_reference() {
        let m = Measure::truncated_normal(Interval::new(-1.0, 2.0).unwrap(), 0.3, 0.7).unwrap();
        let (a, b) = assemble(&m, 60);
        let (fast_vals, fast_vecs) = smallest_eigenpairs(&a, &b, 8).unwrap();
        let (ref_vals, ref_vecs) = dense_eigenpairs(&a, &b).unwrap();
        for k in 0..8 {
            let rel = (fast_vals[k] - ref_vals[k]).abs() / ref_vals[k].abs().max(1.0);
            assert!(
                rel < 1e-10,
                "eigenvalue {k}: {} vs {}",
                fast_vals[k],
                ref_vals[k]
            );
            let overlap = b.quad_form(&fast_vecs[k], &ref_vecs[k]).abs();
            assert!(
                (overlap - 1.0).abs() < 1e-9,
                "eigenvector {k} overlap {overlap}"
            );
        }
    }

    #[test]
    fn shifted_solve_is_exact_for_random_systems() {
        let m = Measure::uniform(Interval::unit());
        let (a, b) = assemble(&m, 40);
        let x: Vec<f64> = (0..40).map(|i| ((i * 7 % 11) as f64 - 5.0) / 3.0).collect();
        let sigma = 37.5;
        let t = SymTridiagonal {
            diag: (0..40).map(|i| a.diag[i] - sigma * b.diag[i]).collect(),
            off: (0..39).map(|i| a.off[i] - sigma * b.off[i]).collect(),
        };
        let rhs = t.mul_vec(&x);
        let solved = solve_shifted(&a, &b, sigma, &rhs, 1e-300);
        for (u, v) in solved.iter().zip(&x) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn indefinite_mass_is_a_breakdown() {
        let a = SymTridiagonal {
            diag: vec![1.0, 1.0],
            off: vec![0.0],
        };
        let b = SymTridiagonal {
            diag: vec![1.0, -1.0],
            off: vec![0.0],
        };
        assert!(matches!(
            smallest_eigenpairs(&a, &b, 1),
            Err(Error::NumericalBreakdown(_))
        ));
    }
}
