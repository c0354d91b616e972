//! CSV helpers shared by the library and the command-line driver.

use std::path::Path;

use crate::error::{Error, Result};
use crate::measures::{Interval, Measure, MeasureKind};

/// Floats are written with 17 significant digits so they round-trip.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn parse_float(field: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("not a number: {field:?}")))
}

/// Loads a two-column `t,rho` CSV with a header row. The `t` column must be
/// evenly spaced; it defines the interval of the resulting tabulated measure.
pub fn read_density_csv(path: &Path) -> Result<Measure> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut ts = Vec::new();
    let mut values = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.len() < 2 {
            return Err(Error::Parse(format!(
                "expected two columns, got {}",
                record.len()
            )));
        }
        ts.push(parse_float(&record[0])?);
        values.push(parse_float(&record[1])?);
    }
    if ts.len() < 2 {
        return Err(Error::Parse("density table needs at least two rows".into()));
    }
    let interval = Interval::new(ts[0], ts[ts.len() - 1])?;
    let h = interval.length() / (ts.len() - 1) as f64;
    for (t, expected) in ts.iter().zip(interval.linspace(ts.len())) {
        if (t - expected).abs() > 1e-6 * h {
            return Err(Error::Parse(format!(
                "grid is not evenly spaced near t = {t}"
            )));
        }
    }
    Measure::new(MeasureKind::Tabulated { values }, interval)
}

/// Writes `t,rho` rows. Tabulated measures emit their own grid; other kinds
/// are sampled on `points` evenly spaced points.
pub fn write_density_csv(measure: &Measure, path: &Path, points: usize) -> Result<()> {
    let grid = match measure.kind() {
        MeasureKind::Tabulated { values } => measure.interval().linspace(values.len()),
        _ => measure.interval().linspace(points.max(2)),
    };
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["t", "rho"])?;
    for t in grid {
        w.write_record([format_float(t), format_float(measure.pdf(t))])?;
    }
    w.flush()?;
    Ok(())
}
