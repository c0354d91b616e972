//! File writing helpers.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use poincare_core::io::format_float;

pub fn prepare_dir(dir: &Path) -> anyhow::Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Writes through a temporary sibling and renames it into place, so readers
/// never see a partial file.
pub fn write_atomic(
    path: &Path,
    write: impl FnOnce(&Path) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    let mut tmp_name = path
        .file_name()
        .context("output path has no file name")?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    write(&tmp)?;
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    write_atomic(path, |tmp| Ok(fs::write(tmp, text)?))
}

/// CSV writer for `path` that goes through [`write_atomic`].
pub fn write_csv(
    path: &Path,
    header: &[&str],
    fill: impl FnOnce(&mut csv::Writer<fs::File>) -> anyhow::Result<()>,
) -> anyhow::Result<()> {
    write_atomic(path, |tmp| {
        let mut w = csv::Writer::from_path(tmp)?;
        w.write_record(header)?;
        fill(&mut w)?;
        w.flush()?;
        Ok(())
    })
}

pub fn float(x: f64) -> String {
    format_float(x)
}

pub fn report(path: PathBuf) {
    println!("wrote {}", path.display());
}
