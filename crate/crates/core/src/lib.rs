//! Poincaré quadratures: generalized Gaussian quadrature rules for the
//! Sobolev space `H¹(μ)` of a probability measure on a bounded interval.
//!
//! The pipeline is
//!
//! 1. [`spectral`]: the Poincaré basis `(λ_m, φ_m)`, in closed form for the
//!    uniform and truncated exponential measures and by finite elements
//!    otherwise;
//! 2. [`quadrature`]: a grid linear program matching the moments of
//!    `φ_0..φ_{2n-1}` while minimizing the moment of `φ_{2n}`, followed by
//!    one-dimensional k-means and a box-constrained Gauss–Newton polish;
//! 3. [`kernel`]: the reproducing kernel of `H¹(μ)` (closed form or truncated
//!    Mercer series) for optimal weights and worst-case errors.
//!
//! [`quantize`] and [`randdens`] provide the comparison baselines
//! (classical Gaussian quadrature, Lloyd quantization, Wasserstein distance)
//! and random test densities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod kernel;
pub mod measures;
pub mod quadrature;
pub mod quantize;
pub mod randdens;
pub mod spectral;

pub use error::{Error, Result};
pub use kernel::{ClosedFormKernel, MercerKernel, ReproducingKernel};
pub use measures::{Interval, Measure, MeasureKind};
pub use quadrature::{poincare_quadrature, QuadratureConfig, QuadratureRule};
pub use quantize::DiscreteMeasure;
pub use spectral::SpectralBasis;
