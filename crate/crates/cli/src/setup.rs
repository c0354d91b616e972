//! Measure specifications, configuration loading and exit codes.

use std::path::PathBuf;
use std::str::FromStr;

use clap::Args;
use poincare_core::io::read_density_csv;
use poincare_core::{Error as CoreError, Interval, Measure, QuadratureConfig};
use thiserror::Error;

use crate::Common;

pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

/// Failures raised by the driver itself.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    Uniform,
    TruncExp,
    TruncNorm,
    Csv(PathBuf),
}

impl FromStr for MeasureSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(Self::Uniform),
            "truncexp" => Ok(Self::TruncExp),
            "truncnorm" => Ok(Self::TruncNorm),
            _ => match s.strip_prefix("csv:") {
                Some(path) if !path.is_empty() => Ok(Self::Csv(PathBuf::from(path))),
                _ => Err(format!(
                    "unknown measure {s:?}; expected uniform, truncexp, truncnorm or csv:<path>"
                )),
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// uniform, truncexp, truncnorm or csv:<path> (a `t,rho` table).
    #[arg(long, default_value = "uniform")]
    pub measure: MeasureSpec,

    /// Left end of the interval (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Right end of the interval (default 1).
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,

    /// Rate of the truncated exponential.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,

    /// Mean of the truncated normal (default: interval midpoint).
    #[arg(long, allow_hyphen_values = true)]
    pub mean: Option<f64>,

    /// Standard deviation of the truncated normal (default: a quarter of
    /// the interval length).
    #[arg(long)]
    pub sd: Option<f64>,
}

impl MeasureArgs {
    pub fn build(&self) -> anyhow::Result<Measure> {
        if let MeasureSpec::Csv(path) = &self.measure {
            if self.a.is_some() || self.b.is_some() {
                return Err(CliError::Config(
                    "--a/--b do not apply to csv measures; the table defines the interval".into(),
                )
                .into());
            }
            return Ok(read_density_csv(path)?);
        }
        let interval = Interval::new(self.a.unwrap_or(0.0), self.b.unwrap_or(1.0))?;
        Ok(match self.measure {
            MeasureSpec::Uniform => Measure::uniform(interval),
            MeasureSpec::TruncExp => Measure::truncated_exponential(interval, self.rate)?,
            MeasureSpec::TruncNorm => {
                let mean = self.mean.unwrap_or(0.5 * (interval.a() + interval.b()));
                let sd = self.sd.unwrap_or(0.25 * interval.length());
                Measure::truncated_normal(interval, mean, sd)?
            }
            MeasureSpec::Csv(_) => unreachable!(),
        })
    }
}

pub fn load_config(common: &Common) -> anyhow::Result<QuadratureConfig> {
    let mut config = match &common.config {
        Some(path) => QuadratureConfig::from_file(path)?,
        None => QuadratureConfig::default(),
    };
    if common.grid.is_some() {
        config.grid_size = common.grid;
    }
    if let Some(mesh) = common.mesh {
        config.mesh_size = mesh;
    }
    Ok(config)
}

pub fn require_n(n: usize) -> anyhow::Result<()> {
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()).into());
    }
    Ok(())
}

/// 2 for bad input or unusable output paths, 3 for numerical failures.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Config(_) => EXIT_CONFIG,
                CliError::Numerical(_) => EXIT_NUMERICAL,
            };
        }
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::BadInterval { .. }
                | CoreError::InvalidParameter(_)
                | CoreError::NonPositiveDensity { .. }
                | CoreError::MeshTooCoarse { .. }
                | CoreError::IndexOutOfRange { .. }
                | CoreError::InsufficientBasis { .. }
                | CoreError::TooManyNodesForTruncation { .. }
                | CoreError::Parse(_)
                | CoreError::Io(_)
                | CoreError::Csv(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            };
        }
        if cause.is::<std::io::Error>() || cause.is::<csv::Error>() {
            return EXIT_CONFIG;
        }
    }
    EXIT_NUMERICAL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_specs_parse() {
        assert_eq!(
            "uniform".parse::<MeasureSpec>().unwrap(),
            MeasureSpec::Uniform
        );
        assert_eq!(
            "csv:a/b.csv".parse::<MeasureSpec>().unwrap(),
            MeasureSpec::Csv("a/b.csv".into())
        );
        assert!("csv:".parse::<MeasureSpec>().is_err());
        assert!("gamma".parse::<MeasureSpec>().is_err());
    }

    #[test]
    fn errors_map_to_exit_codes() {
        let config: anyhow::Error = CoreError::InvalidParameter("x".into()).into();
        assert_eq!(exit_code(&config), EXIT_CONFIG);
        let numerical: anyhow::Error = CoreError::Infeasible(1.0).into();
        assert_eq!(exit_code(&numerical), EXIT_NUMERICAL);
        let wrapped = anyhow::Error::from(CliError::Numerical("x".into())).context("stage");
        assert_eq!(exit_code(&wrapped), EXIT_NUMERICAL);
    }
}
