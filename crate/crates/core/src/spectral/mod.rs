//! The Poincaré basis: eigenpairs `(λ_m, φ_m)` of the Neumann operator
//! `f'' - V' f'` in `L²(μ)`, with `λ_0 = 0`, `φ_0 = 1`, unit `L²(μ)` norms
//! and the sign fixed by `φ_m(a) > 0`.

mod closed_form;
pub mod fem;

use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::io::{format_float, parse_float};
use crate::measures::{locate, Interval, Measure, MeasureKind};

/// Default finite-element mesh size.
pub const DEFAULT_MESH_SIZE: usize = 1000;

/// Finite-element eigenpairs stored as nodal values on an even mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct FemData {
    mesh_size: usize,
    eigenvalues: Vec<f64>,
    /// `values[m][k]` is `φ_m` at mesh node `k`.
    values: Vec<Vec<f64>>,
}

impl FemData {
    pub fn mesh_size(&self) -> usize {
        self.mesh_size
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Backend {
    ClosedFormUniform,
    ClosedFormTruncExp { rate: f64 },
    FiniteElement(Arc<FemData>),
}

/// Eigenpairs `0..=max_index` of the Poincaré operator for one measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralBasis {
    measure: Measure,
    max_index: usize,
    backend: Backend,
}

/// One eigenpair borrowed from a basis.
#[derive(Debug, Clone, Copy)]
pub struct EigenPair<'a> {
    pub index: usize,
    pub eigenvalue: f64,
    basis: &'a SpectralBasis,
}

impl EigenPair<'_> {
    pub fn eval(&self, x: f64) -> f64 {
        self.basis.value(self.index, x)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.basis.derivative(self.index, x)
    }
}

/// Closed-form basis of the uniform measure on `interval`:
/// `λ_m = (mπ/(b-a))²`, `φ_m = √2 cos(mπ(x-a)/(b-a))`.
pub fn closed_form_uniform(interval: Interval, m_max: usize) -> SpectralBasis {
    SpectralBasis {
        measure: Measure::uniform(interval),
        max_index: m_max,
        backend: Backend::ClosedFormUniform,
    }
}

/// Closed-form basis of the exponential distribution with unit rate
/// truncated to `interval ⊆ ℝ⁺`.
pub fn closed_form_trunc_exp(interval: Interval, m_max: usize) -> Result<SpectralBasis> {
    closed_form_trunc_exp_rate(interval, 1.0, m_max)
}

/// As [`closed_form_trunc_exp`] for density `∝ e^{-rate t}`; then
/// `λ_m = rate²/4 + (mω)²`.
pub fn closed_form_trunc_exp_rate(
    interval: Interval,
    rate: f64,
    m_max: usize,
) -> Result<SpectralBasis> {
    if interval.a() < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "truncated exponential needs an interval in [0, inf), got [{}, {}]",
            interval.a(),
            interval.b()
        )));
    }
    let measure = Measure::truncated_exponential(interval, rate)?;
    Ok(SpectralBasis {
        measure,
        max_index: m_max,
        backend: Backend::ClosedFormTruncExp { rate },
    })
}

/// Finite-element approximation of the basis on `mesh_size` evenly spaced
/// nodes.
pub fn fem_basis(measure: &Measure, mesh_size: usize, m_max: usize) -> Result<SpectralBasis> {
    let required = (4 * m_max).max(4);
    if mesh_size < required {
        return Err(Error::MeshTooCoarse {
            mesh_size,
            m_max,
            required,
        });
    }
    let (stiffness, mass) = fem::assemble(measure, mesh_size);
    let (mut eigenvalues, mut values) = fem::smallest_eigenpairs(&stiffness, &mass, m_max + 1)?;
    eigenvalues[0] = 0.0;
    values[0] = vec![1.0; mesh_size];
    for v in values.iter_mut().skip(1) {
        let lead = v.iter().copied().find(|x| x.abs() >= 1e-12).unwrap_or(1.0);
        if lead < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
    for (m, pair) in eigenvalues.windows(2).enumerate() {
        if !(pair[1] > pair[0]) {
            return Err(Error::NumericalBreakdown(format!(
                "eigenvalues {m} and {} are not strictly increasing",
                m + 1
            )));
        }
    }
    Ok(SpectralBasis {
        measure: measure.clone(),
        max_index: m_max,
        backend: Backend::FiniteElement(Arc::new(FemData {
            mesh_size,
            eigenvalues,
            values,
        })),
    })
}

/// Closed form when one exists for the measure, finite elements otherwise.
pub fn auto_basis(measure: &Measure, mesh_size: usize, m_max: usize) -> Result<SpectralBasis> {
    match measure.kind() {
        MeasureKind::Uniform => Ok(closed_form_uniform(measure.interval(), m_max)),
        MeasureKind::TruncatedExponential { rate } if measure.interval().a() >= 0.0 => {
            closed_form_trunc_exp_rate(measure.interval(), *rate, m_max)
        }
        _ => fem_basis(measure, mesh_size, m_max),
    }
}

impl SpectralBasis {
    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn interval(&self) -> Interval {
        self.measure.interval()
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn is_closed_form(&self) -> bool {
        !matches!(self.backend, Backend::FiniteElement(_))
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m > self.max_index {
            return Err(Error::IndexOutOfRange {
                index: m,
                max: self.max_index,
            });
        }
        Ok(())
    }

    pub fn pair(&self, m: usize) -> Result<EigenPair<'_>> {
        self.check_index(m)?;
        Ok(EigenPair {
            index: m,
            eigenvalue: self.eigenvalue(m),
            basis: self,
        })
    }

    pub fn pairs(&self) -> impl Iterator<Item = EigenPair<'_>> {
        (0..=self.max_index).map(move |m| EigenPair {
            index: m,
            eigenvalue: self.eigenvalue(m),
            basis: self,
        })
    }

    /// `λ_m`; unchecked against `max_index` for closed forms.
    pub fn eigenvalue(&self, m: usize) -> f64 {
        match &self.backend {
            Backend::ClosedFormUniform => closed_form::uniform_eigenvalue(self.interval(), m),
            Backend::ClosedFormTruncExp { rate } => {
                closed_form::trunc_exp_eigenvalue(self.interval(), *rate, m)
            }
            Backend::FiniteElement(data) => data.eigenvalues[m],
        }
    }

    /// `φ_m(x)`. Closed forms are analytic; finite elements interpolate
    /// linearly between mesh nodes. Panics on an out-of-range FEM index.
    pub fn value(&self, m: usize, x: f64) -> f64 {
        let interval = self.interval();
        match &self.backend {
            Backend::ClosedFormUniform => closed_form::uniform_value(interval, m, x),
            Backend::ClosedFormTruncExp { rate } => {
                closed_form::trunc_exp_value(interval, *rate, m, x)
            }
            Backend::FiniteElement(data) => {
                let (k, frac) = locate(interval, data.mesh_size, x);
                let v = &data.values[m];
                v[k] + frac * (v[k + 1] - v[k])
            }
        }
    }

    /// `φ_m'(x)`; piecewise constant for finite elements.
    pub fn derivative(&self, m: usize, x: f64) -> f64 {
        let interval = self.interval();
        match &self.backend {
            Backend::ClosedFormUniform => closed_form::uniform_derivative(interval, m, x),
            Backend::ClosedFormTruncExp { rate } => {
                closed_form::trunc_exp_derivative(interval, *rate, m, x)
            }
            Backend::FiniteElement(data) => {
                let (k, _) = locate(interval, data.mesh_size, x);
                let h = interval.length() / (data.mesh_size - 1) as f64;
                (data.values[m][k + 1] - data.values[m][k]) / h
            }
        }
    }

    /// `φ_m` at each point.
    pub fn evaluate(&self, m: usize, points: &[f64]) -> Result<Vec<f64>> {
        self.check_index(m)?;
        Ok(points.iter().map(|&x| self.value(m, x)).collect())
    }

    /// Poincaré constant `C_P(μ) = 1/λ_1`.
    pub fn poincare_constant(&self) -> Result<f64> {
        if self.max_index < 1 {
            return Err(Error::InsufficientBasis {
                available: self.max_index,
                required: 1,
            });
        }
        Ok(1.0 / self.eigenvalue(1))
    }

    /// Mesh nodes and nodal values for export. Closed forms are sampled on
    /// `mesh_size` points.
    pub fn mesh_values(&self, mesh_size: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
        match &self.backend {
            Backend::FiniteElement(data) => (
                self.interval().linspace(data.mesh_size),
                data.values.clone(),
            ),
            _ => {
                let mesh = self.interval().linspace(mesh_size);
                let values = (0..=self.max_index)
                    .map(|m| mesh.iter().map(|&x| self.value(m, x)).collect())
                    .collect();
                (mesh, values)
            }
        }
    }

    /// Writes `eigenvalues.csv`-style (`m,lambda`) and a mesh matrix
    /// (`t,phi_0,...,phi_M`).
    pub fn export_csv(
        &self,
        eigenvalues_path: &Path,
        functions_path: &Path,
        mesh_size: usize,
    ) -> Result<()> {
        let mut w = csv::Writer::from_path(eigenvalues_path)?;
        w.write_record(["m", "lambda"])?;
        for m in 0..=self.max_index {
            w.write_record([m.to_string(), format_float(self.eigenvalue(m))])?;
        }
        w.flush()?;

        let (mesh, values) = self.mesh_values(mesh_size);
        let mut w = csv::Writer::from_path(functions_path)?;
        let mut header = vec!["t".to_string()];
        header.extend((0..=self.max_index).map(|m| format!("phi_{m}")));
        w.write_record(&header)?;
        for (k, t) in mesh.iter().enumerate() {
            let mut row = vec![format_float(*t)];
            row.extend(values.iter().map(|v| format_float(v[k])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a basis written by [`SpectralBasis::export_csv`] as a
    /// finite-element basis for `measure`.
    pub fn import_csv(
        measure: &Measure,
        eigenvalues_path: &Path,
        functions_path: &Path,
    ) -> Result<Self> {
        let mut eigenvalues = Vec::new();
        for record in csv::Reader::from_path(eigenvalues_path)?.records() {
            let record = record?;
            let field = record
                .get(1)
                .ok_or_else(|| Error::Parse("eigenvalue row without lambda".into()))?;
            eigenvalues.push(parse_float(field)?);
        }
        let mut reader = csv::Reader::from_path(functions_path)?;
        let columns = reader.headers()?.len();
        if columns != eigenvalues.len() + 1 || eigenvalues.is_empty() {
            return Err(Error::Parse(format!(
                "{} eigenvalues but {} function columns",
                eigenvalues.len(),
                columns.saturating_sub(1)
            )));
        }
        let mut mesh = Vec::new();
        let mut values = vec![Vec::new(); eigenvalues.len()];
        for record in reader.records() {
            let record = record?;
            mesh.push(parse_float(&record[0])?);
            for (m, column) in values.iter_mut().enumerate() {
                column.push(parse_float(&record[m + 1])?);
            }
        }
        let interval = measure.interval();
        let expected = interval.linspace(mesh.len());
        let h = interval.length() / (mesh.len().max(2) - 1) as f64;
        if mesh.len() < 2
            || mesh
                .iter()
                .zip(&expected)
                .any(|(t, e)| (t - e).abs() > 1e-9 * h.max(1.0))
        {
            return Err(Error::Parse(
                "eigenfunction mesh is not evenly spaced over the measure's interval".into(),
            ));
        }
        Ok(Self {
            measure: measure.clone(),
            max_index: eigenvalues.len() - 1,
            backend: Backend::FiniteElement(Arc::new(FemData {
                mesh_size: mesh.len(),
                eigenvalues,
                values,
            })),
        })
    }
}
