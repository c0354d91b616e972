use std::path::Path;

use anyhow::Context;
use poincare_core::io::write_density_csv;
use poincare_core::kernel::{trunc_exp_kernel_rate, uniform_kernel};
use poincare_core::quadrature::{basis_for, zeros_of_basis_function, BasisBackend};
use poincare_core::quantize::{
    compare_rules, write_comparison_rows, Comparison, COMPARISON_HEADER,
};
use poincare_core::randdens::{density_file_name, sample_batch, write_batch, GPConfig, GpSampler};
use poincare_core::spectral::{closed_form_trunc_exp_rate, closed_form_uniform, fem_basis};
use poincare_core::{
    poincare_quadrature, ClosedFormKernel, Measure, MeasureKind, QuadratureConfig, SpectralBasis,
};
use rayon::prelude::*;

use crate::output::{float, prepare_dir, report, write_atomic, write_csv, write_text};
use crate::plots;
use crate::setup::{load_config, require_n, CliError, MeasureArgs};
use crate::Common;

/// Eigenfunctions shown in `eigenfunctions.csv`.
const SHOWN_FUNCTIONS: usize = 5;
/// Sample points for curves written next to a rule.
const CURVE_POINTS: usize = 1001;
/// Rule sizes of the comparison study. The node-location boxplot is
/// described both with n = 4 and with n = 5, so both are produced.
const COMPARE_SIZES: [usize; 2] = [5, 4];

const DISCREPANCY_NOTE: &str =
    "node-location boxplots are produced for n = 5 (nodes_n5.csv) and n = 4 \
(nodes_n4.csv) because the node-location boxplot is described with both sizes (caption n = 4, \
discussion n = 5); \
weight ratios and Wasserstein distances use n = 5";

fn exact_basis(measure: &Measure, m_max: usize) -> anyhow::Result<Option<SpectralBasis>> {
    Ok(match measure.kind() {
        MeasureKind::Uniform => Some(closed_form_uniform(measure.interval(), m_max)),
        MeasureKind::TruncatedExponential { rate } => Some(closed_form_trunc_exp_rate(
            measure.interval(),
            *rate,
            m_max,
        )?),
        _ => None,
    })
}

pub fn basis(common: &Common, args: &MeasureArgs, count: usize) -> anyhow::Result<()> {
    if count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()).into());
    }
    let measure = args.build()?;
    let config = load_config(common)?;
    let m_max = count.max(SHOWN_FUNCTIONS - 1);
    let exact = exact_basis(&measure, m_max)?;
    let computed = match config.backend {
        BasisBackend::ClosedForm => exact
            .clone()
            .ok_or_else(|| CliError::Config("no closed-form basis for this measure".into()))?,
        BasisBackend::Auto | BasisBackend::Fem => fem_basis(&measure, config.mesh_size, m_max)?,
    };
    prepare_dir(&common.out)?;

    let path = common.out.join("eigenvalues.csv");
    write_csv(&path, &["m", "lambda_hat", "lambda_exact"], |w| {
        for m in 1..=count {
            let reference = exact
                .as_ref()
                .map(|b| float(b.eigenvalue(m)))
                .unwrap_or_default();
            w.write_record([m.to_string(), float(computed.eigenvalue(m)), reference])?;
        }
        Ok(())
    })?;
    report(path);

    let (mesh, values) = computed.mesh_values(config.mesh_size);
    let mut header = vec!["t".to_string()];
    header.extend((0..SHOWN_FUNCTIONS).map(|m| format!("phi_{m}")));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let path = common.out.join("eigenfunctions.csv");
    write_csv(&path, &header, |w| {
        for (k, &t) in mesh.iter().enumerate() {
            let mut row = vec![float(t)];
            row.extend(values.iter().take(SHOWN_FUNCTIONS).map(|v| float(v[k])));
            w.write_record(&row)?;
        }
        Ok(())
    })?;
    report(path);

    let path = common.out.join("basis.gp");
    write_text(&path, &plots::basis(SHOWN_FUNCTIONS))?;
    report(path);
    println!("lambda_1 = {}", float(computed.eigenvalue(1)));
    Ok(())
}

pub fn quad(common: &Common, args: &MeasureArgs, n: usize) -> anyhow::Result<()> {
    require_n(n)?;
    let measure = args.build()?;
    let config = load_config(common)?;
    let basis = basis_for(&measure, n, &config)?;
    let rule = poincare_quadrature(&measure, n, &config)?;
    let zeros = zeros_of_basis_function(&basis, n)?;
    prepare_dir(&common.out)?;

    let path = common.out.join(format!("rule_n{n}.csv"));
    write_atomic(&path, |tmp| Ok(rule.write_csv_file(tmp)?))?;
    report(path);

    let path = common.out.join(format!("quad_n{n}_curves.csv"));
    let phi = format!("phi_{n}");
    write_csv(&path, &["t", "pdf", &phi], |w| {
        for t in measure.interval().linspace(CURVE_POINTS) {
            w.write_record([float(t), float(measure.pdf(t)), float(basis.value(n, t))])?;
        }
        Ok(())
    })?;
    report(path);

    let path = common.out.join(format!("quad_n{n}_zeros.csv"));
    write_csv(&path, &["index", "zero"], |w| {
        for (i, z) in zeros.iter().enumerate() {
            w.write_record([i.to_string(), float(*z)])?;
        }
        Ok(())
    })?;
    report(path);

    let path = common.out.join(format!("quad_n{n}.gp"));
    write_text(&path, &plots::quad(n))?;
    report(path);

    let d = &rule.diagnostics;
    println!("n = {n}");
    println!("moment_residual = {}", float(d.moment_residual));
    println!("refine_objective = {}", float(d.refine_objective));
    println!("converged = {}", d.converged);
    if !d.converged {
        return Err(CliError::Numerical(format!(
            "refinement stopped at objective {:e} above the acceptance threshold",
            d.refine_objective
        ))
        .into());
    }
    Ok(())
}

fn closed_form_kernel(measure: &Measure) -> anyhow::Result<ClosedFormKernel> {
    match measure.kind() {
        MeasureKind::Uniform => Ok(uniform_kernel(measure.interval())),
        MeasureKind::TruncatedExponential { rate } => {
            Ok(trunc_exp_kernel_rate(measure.interval(), *rate)?)
        }
        _ => Err(CliError::Config(
            "wce-curve needs a closed-form kernel (uniform or truncexp)".into(),
        )
        .into()),
    }
}

/// `c / tanh(c) - 1` with `c = (b - a)/(2n)`: squared worst-case error of
/// the midpoint rule for the uniform measure.
pub fn uniform_wce_reference(length: f64, n: usize) -> f64 {
    let c = length / (2 * n) as f64;
    c / c.tanh() - 1.0
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let logs: Vec<(f64, f64)> = points.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = logs.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = logs.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    sxy / sxx
}

pub fn wce_curve(
    common: &Common,
    args: &MeasureArgs,
    n_min: usize,
    n_max: usize,
) -> anyhow::Result<()> {
    require_n(n_min)?;
    if n_max < n_min {
        return Err(
            CliError::Config(format!("--n-max ({n_max}) is below --n-min ({n_min})")).into(),
        );
    }
    let measure = args.build()?;
    let kernel = closed_form_kernel(&measure)?;
    let config = load_config(common)?;
    let uniform = matches!(measure.kind(), MeasureKind::Uniform);
    let length = measure.interval().length();

    let curve: Vec<(usize, f64)> = (n_min..=n_max)
        .into_par_iter()
        .map(|n| {
            let rule = poincare_quadrature(&measure, n, &config)
                .with_context(|| format!("rule with n = {n}"))?;
            Ok((n, rule.wce_squared(&kernel)?))
        })
        .collect::<anyhow::Result<_>>()?;
    prepare_dir(&common.out)?;

    let path = common.out.join("wce_curve.csv");
    write_csv(&path, &["n", "wce_squared", "reference"], |w| {
        for &(n, wce2) in &curve {
            let reference = if uniform {
                float(uniform_wce_reference(length, n))
            } else {
                String::new()
            };
            w.write_record([n.to_string(), float(wce2), reference])?;
        }
        Ok(())
    })?;
    report(path);
    let path = common.out.join("wce_curve.gp");
    write_text(&path, &plots::wce_curve(uniform))?;
    report(path);

    if curve.len() >= 2 {
        let points: Vec<(f64, f64)> = curve.iter().map(|&(n, w)| (n as f64, w)).collect();
        println!("log-log slope of wce^2 = {:.4}", log_log_slope(&points));
    }
    Ok(())
}

/// Per-density results of the comparison study.
struct DensityResult {
    comparisons: Vec<Comparison>,
}

/// The n = 5 comparison of a density.
fn five(r: &DensityResult) -> &Comparison {
    &r.comparisons[0]
}

fn compare_one(
    measure: &Measure,
    id: usize,
    config: &QuadratureConfig,
    dirs: (&Path, &Path),
) -> anyhow::Result<DensityResult> {
    let comparisons = COMPARE_SIZES
        .iter()
        .map(|&n| {
            compare_rules(measure, n, config).with_context(|| format!("density {id}, n = {n}"))
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let (density_dir, rule_dir) = dirs;
    write_atomic(&density_dir.join(density_file_name(id)), |tmp| {
        Ok(write_density_csv(measure, tmp, 0)?)
    })?;
    write_atomic(&rule_dir.join(format!("rules_{id:03}.csv")), |tmp| {
        let mut w = csv::Writer::from_path(tmp)?;
        let mut header = vec!["n"];
        header.extend(COMPARISON_HEADER);
        w.write_record(&header)?;
        for c in &comparisons {
            let mut inner = csv::Writer::from_writer(Vec::new());
            write_comparison_rows(&mut inner, id, c)?;
            let bytes = inner.into_inner().context("buffering comparison rows")?;
            let mut reader = csv::ReaderBuilder::new()
                .has_headers(false)
                .from_reader(bytes.as_slice());
            for record in reader.records() {
                let mut row = vec![c.n.to_string()];
                row.extend(record?.iter().map(str::to_string));
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(DensityResult { comparisons })
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

pub fn compare(common: &Common, count: usize, lengthscale: f64) -> anyhow::Result<()> {
    if count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()).into());
    }
    let config = load_config(common)?;
    let gp = GPConfig {
        lengthscale,
        seed: common.seed,
        ..Default::default()
    };
    let densities = sample_batch(&gp, count)?;
    let density_dir = common.out.join("densities");
    let rule_dir = common.out.join("per_density");
    prepare_dir(&density_dir)?;
    prepare_dir(&rule_dir)?;

    let results: Vec<anyhow::Result<DensityResult>> = densities
        .par_iter()
        .enumerate()
        .map(|(id, m)| compare_one(m, id, &config, (&density_dir, &rule_dir)))
        .collect();
    let mut failures = Vec::new();
    let mut done: Vec<(usize, DensityResult)> = Vec::new();
    for (id, result) in results.into_iter().enumerate() {
        match result {
            Ok(r) => done.push((id, r)),
            Err(e) => {
                eprintln!("density {id} failed: {e:#}");
                failures.push(id);
            }
        }
    }

    for (slot, &n) in COMPARE_SIZES.iter().enumerate() {
        let path = common.out.join(format!("nodes_n{n}.csv"));
        write_atomic(&path, |tmp| {
            let mut w = csv::Writer::from_path(tmp)?;
            w.write_record(COMPARISON_HEADER)?;
            for (id, r) in &done {
                write_comparison_rows(&mut w, *id, &r.comparisons[slot])?;
            }
            w.flush()?;
            Ok(())
        })?;
        report(path);
        let path = common.out.join(format!("nodes_n{n}.gp"));
        write_text(&path, &plots::node_boxplots(n))?;
        report(path);
    }

    let path = common.out.join("ratios_n5.csv");
    write_csv(&path, &["density_id", "node_index", "ratio"], |w| {
        for (id, r) in &done {
            for (i, ratio) in five(r).weight_ratios.iter().enumerate() {
                w.write_record([id.to_string(), i.to_string(), float(*ratio)])?;
            }
        }
        Ok(())
    })?;
    report(path);
    let path = common.out.join("distances_n5.csv");
    write_csv(
        &path,
        &[
            "density_id",
            "poincare",
            "gaussian",
            "lloyd",
            "lloyd_converged",
        ],
        |w| {
            for (id, r) in &done {
                let d = five(r).distances;
                w.write_record([
                    id.to_string(),
                    float(d.poincare),
                    float(d.gaussian),
                    float(d.lloyd),
                    five(r).lloyd_converged.to_string(),
                ])?;
            }
            Ok(())
        },
    )?;
    report(path);
    for (name, script) in [
        ("ratios_n5.gp", plots::ratio_boxplot()),
        ("distances_n5.gp", plots::distance_scatter()),
    ] {
        let path = common.out.join(name);
        write_text(&path, &script)?;
        report(path);
    }

    let path = common.out.join("metadata.txt");
    let metadata = format!(
        "seed = {}\ncount = {count}\nlengthscale = {lengthscale}\ngp_grid_size = {}\nrejection_floor = {}\n\
         rule_sizes = {:?}\nfailed_densities = {failures:?}\nnote = {DISCREPANCY_NOTE}\n",
        gp.seed, gp.grid_size, gp.rejection_floor, COMPARE_SIZES
    );
    write_text(&path, &metadata)?;
    report(path);

    if !done.is_empty() {
        let k = done.len();
        let lloyd_best = done
            .iter()
            .filter(|(_, r)| {
                let d = five(r).distances;
                d.lloyd <= d.poincare.min(d.gaussian) * (1.0 + 1e-9)
            })
            .count();
        let poincare_wins = done
            .iter()
            .filter(|(_, r)| five(r).distances.poincare <= five(r).distances.gaussian)
            .count();
        println!("densities = {k}");
        println!("lloyd closest = {lloyd_best}/{k}");
        println!("poincare <= gaussian = {poincare_wins}/{k}");
        for i in 0..COMPARE_SIZES[0] {
            let mut nodes: Vec<f64> = done
                .iter()
                .map(|(_, r)| five(r).poincare.atoms()[i])
                .collect();
            let mut ratios: Vec<f64> = done.iter().map(|(_, r)| five(r).weight_ratios[i]).collect();
            println!(
                "node {i}: median location {:.4}, median weight ratio {:.4}",
                median(&mut nodes),
                median(&mut ratios)
            );
        }
    }
    if !failures.is_empty() {
        return Err(CliError::Numerical(format!(
            "{} of {count} densities failed: {failures:?}",
            failures.len()
        ))
        .into());
    }
    Ok(())
}

pub fn random_batch(common: &Common, count: usize, lengthscale: f64) -> anyhow::Result<()> {
    if count == 0 {
        return Err(CliError::Config("--count must be at least 1".into()).into());
    }
    let gp = GPConfig {
        lengthscale,
        seed: common.seed,
        ..Default::default()
    };
    let sampler = GpSampler::new(&gp)?;
    let densities = sample_batch(&gp, count)?;
    prepare_dir(&common.out)?;
    let paths = write_batch(&common.out, &densities)?;
    println!(
        "wrote {} densities to {}",
        paths.len(),
        common.out.display()
    );
    let path = common.out.join("densities.gp");
    write_text(&path, &plots::random_batch(count))?;
    report(path);
    println!("jitter = {:e}", sampler.jitter());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let points: Vec<(f64, f64)> = (1..10)
            .map(|n| (n as f64, 3.0 * (n as f64).powf(-2.0)))
            .collect();
        assert!((log_log_slope(&points) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn medians() {
        assert_eq!(median(&mut [3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&mut [4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn reference_curve_on_the_unit_interval() {
        let c: f64 = 0.25;
        assert_eq!(uniform_wce_reference(1.0, 2), c / c.tanh() - 1.0);
    }
}
