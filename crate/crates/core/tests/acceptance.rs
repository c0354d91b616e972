//! Acceptance suite. Runs every criterion at its stated tolerance, prints
//! one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use poincare_core::kernel::{
    optimal_weights, precision_matrix, riemann_partial_sums, riemann_series_check,
    trunc_exp_kernel, uniform_kernel, wce_squared, ClosedFormKernel, MercerKernel,
    ReproducingKernel, RIEMANN_TERMS,
};
use poincare_core::quadrature::{poincare_quadrature_with_basis, QuadratureConfig};
use poincare_core::quantize::compare_rules;
use poincare_core::randdens::{sample_batch, GPConfig};
use poincare_core::spectral::{
    closed_form_trunc_exp, closed_form_uniform, fem_basis, SpectralBasis,
};
use poincare_core::{poincare_quadrature, Interval, Measure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn unit() -> Interval {
    Interval::unit()
}

fn one_five() -> Interval {
    Interval::new(1.0, 5.0).unwrap()
}

fn exp_measure(interval: Interval) -> Measure {
    Measure::truncated_exponential(interval, 1.0).unwrap()
}

fn uniform_closed_wce2(n: usize) -> f64 {
    let x = 1.0 / (2.0 * n as f64);
    x / x.tanh() - 1.0
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let measure = Measure::uniform(unit());
    let config = QuadratureConfig::default();
    let (mut node_err, mut weight_err) = (0.0f64, 0.0f64);
    for n in 1..=10 {
        let rule = match poincare_quadrature(&measure, n, &config) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        for (i, (x, w)) in rule.nodes.iter().zip(&rule.weights).enumerate() {
            node_err = node_err.max((x - (i as f64 + 0.5) / n as f64).abs());
            weight_err = weight_err.max((w - 1.0 / n as f64).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        node_err <= 1e-6 && weight_err <= 1e-8 && secs < 30.0,
        format!("max node err {node_err:.2e} (<=1e-6), max weight err {weight_err:.2e} (<=1e-8), {secs:.2}s (<30s)"),
    )
}

fn criterion_2() -> Outcome {
    let config = QuadratureConfig::default();
    let objective = |basis: &SpectralBasis, n: usize| {
        poincare_quadrature_with_basis(basis, n, &config).map(|r| r.diagnostics.refine_objective)
    };
    let mut worst = [0.0f64; 3];
    for n in 1..=10 {
        let uniform = closed_form_uniform(unit(), 2 * n);
        let exp = closed_form_trunc_exp(one_five(), 2 * n).unwrap();
        match (objective(&uniform, n), objective(&exp, n)) {
            (Ok(u), Ok(e)) => {
                worst[0] = worst[0].max(u);
                worst[1] = worst[1].max(e);
            }
            (Err(e), _) | (_, Err(e)) => return outcome(false, format!("n={n}: {e}")),
        }
    }
    let mut general = vec![Measure::truncated_normal(unit(), 0.5, 0.2).unwrap()];
    general.extend(sample_batch(&GPConfig::default(), 5).unwrap());
    for measure in &general {
        for n in [3, 5, 8] {
            let basis = fem_basis(measure, 1000, 2 * n).unwrap();
            match objective(&basis, n) {
                Ok(v) => worst[2] = worst[2].max(v),
                Err(e) => return outcome(false, format!("FEM n={n}: {e}")),
            }
        }
    }
    outcome(
        worst[0] <= 1e-12 && worst[1] <= 1e-6 && worst[2] <= 1e-6,
        format!(
            "uniform {:.2e} (<=1e-12), trunc-exp(1,5) {:.2e} (<=1e-6), FEM densities {:.2e} (<=1e-6)",
            worst[0], worst[1], worst[2]
        ),
    )
}

fn criterion_3() -> Outcome {
    let measure = Measure::uniform(unit());
    let kernel = uniform_kernel(unit());
    let config = QuadratureConfig::default();
    let mut rel = 0.0f64;
    for n in 1..=20 {
        let rule = poincare_quadrature(&measure, n, &config).unwrap();
        let wce2 = rule.wce_squared(&kernel).unwrap();
        let exact = uniform_closed_wce2(n);
        rel = rel.max(((wce2 - exact) / exact).abs());
    }
    let rule = poincare_quadrature(&measure, 50, &config).unwrap();
    let scaled = 50.0 * rule.wce_squared(&kernel).unwrap().sqrt() * 2.0 * 3f64.sqrt();
    outcome(
        rel <= 1e-6 && (scaled - 1.0).abs() <= 0.02,
        format!(
            "max rel err n<=20 {rel:.2e} (<=1e-6), |50 wce(50) 2sqrt3 - 1| = {:.2e} (<=0.02)",
            (scaled - 1.0).abs()
        ),
    )
}

fn criterion_4() -> Outcome {
    let kernel = uniform_kernel(unit());
    let mut err = 0.0f64;
    for n in 1..=20 {
        let nodes: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let target = 2.0 * (1.0 / (2.0 * n as f64)).tanh();
        for w in optimal_weights(&kernel, &nodes).unwrap() {
            err = err.max((w - target).abs());
        }
    }
    outcome(
        err <= 1e-10,
        format!("max |w - 2 tanh(1/(2n))| over n<=20: {err:.2e} (<=1e-10)"),
    )
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let uniform = fem_basis(&Measure::uniform(unit()), 1000, 50).unwrap();
    let mut uniform_err = 0.0f64;
    let mut first_bad = None;
    for m in 1..=50 {
        let exact = (m as f64 * PI).powi(2);
        let rel = ((uniform.eigenvalue(m) - exact) / exact).abs();
        if rel > 1e-3 && first_bad.is_none() {
            first_bad = Some(m);
        }
        uniform_err = uniform_err.max(rel);
    }
    let mut exp_err = 0.0f64;
    for interval in [one_five(), Interval::new(0.0, 3.0).unwrap()] {
        let fem = fem_basis(&exp_measure(interval), 1000, 20).unwrap();
        let exact = closed_form_trunc_exp(interval, 20).unwrap();
        for m in 1..=20 {
            exp_err = exp_err
                .max(((fem.eigenvalue(m) - exact.eigenvalue(m)) / exact.eigenvalue(m)).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let bad = first_bad.map_or(String::new(), |m| format!(", first m over tolerance {m}"));
    outcome(
        uniform_err <= 1e-3 && exp_err <= 1e-3 && secs < 60.0,
        format!(
            "uniform m<=50 max rel err {uniform_err:.2e} (<=1e-3{bad}); trunc-exp (1,5),(0,3) m<=20 {exp_err:.2e} (<=1e-3); {secs:.2}s (<60s)"
        ),
    )
}

fn mercer_errors(kernel: &ClosedFormKernel, basis: &SpectralBasis, orders: &[usize]) -> Vec<f64> {
    let grid = basis.interval().linspace(60);
    orders
        .iter()
        .map(|&order| {
            let km = MercerKernel::new(basis.clone(), order).unwrap();
            let mut err = 0.0f64;
            for &x in &grid {
                for &y in &grid {
                    err = err.max((kernel.eval(x, y) - km.eval(x, y)).abs());
                }
            }
            err
        })
        .collect()
}

fn criterion_6() -> Outcome {
    let orders = [10, 20, 40, 80];
    let cases = [
        (
            "uniform(0,1)",
            uniform_kernel(unit()),
            closed_form_uniform(unit(), 80),
        ),
        (
            "trunc-exp(1,5)",
            trunc_exp_kernel(one_five()).unwrap(),
            closed_form_trunc_exp(one_five(), 80).unwrap(),
        ),
    ];
    let mut passed = true;
    let mut parts = Vec::new();
    for (name, kernel, basis) in &cases {
        let errs = mercer_errors(kernel, basis, &orders);
        let monotone = errs.windows(2).all(|p| p[1] < p[0]);
        let last = errs[errs.len() - 1];
        passed &= monotone && last <= 0.02;
        parts.push(format!(
            "{name}: {} monotone={monotone} M=80 {last:.2e} (<=0.02)",
            errs.iter()
                .map(|e| format!("{e:.2e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ));
    }
    outcome(passed, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let mut err = 0.0f64;
    for r in [0.1, 1.0, 10.0] {
        let s = riemann_series_check(r).unwrap();
        err = err
            .max((s.sum1 - s.closed1).abs())
            .max((s.sum2 - s.closed2).abs());
    }
    let (zeta, eta) = riemann_partial_sums(1e-6, RIEMANN_TERMS);
    let limits = riemann_series_check(1e-6).unwrap();
    let limit_err = [
        zeta - PI * PI / 6.0,
        eta - PI * PI / 12.0,
        limits.closed1 - PI * PI / 6.0,
        limits.closed2 - PI * PI / 12.0,
    ]
    .iter()
    .fold(0.0f64, |m, v| m.max(v.abs()));
    outcome(
        err <= 1e-8 && limit_err <= 1e-6,
        format!("r in {{0.1,1,10}} max err {err:.2e} (<=1e-8); r->0 limits max err {limit_err:.2e} (<=1e-6)"),
    )
}

fn criterion_8() -> Outcome {
    let config = QuadratureConfig::default();
    let (mut weight_err, mut wce_max) = (0.0f64, 0.0f64);
    for n in 2..=8 {
        let bases = [
            closed_form_uniform(unit(), 2 * n),
            closed_form_trunc_exp(one_five(), 2 * n).unwrap(),
        ];
        for basis in bases {
            let rule = match poincare_quadrature_with_basis(&basis, n, &config) {
                Ok(r) => r,
                Err(e) => return outcome(false, format!("n={n}: {e}")),
            };
            let km = MercerKernel::new(basis, 2 * n - 1).unwrap();
            let w = optimal_weights(&km, &rule.nodes).unwrap();
            for (a, b) in w.iter().zip(&rule.weights) {
                weight_err = weight_err.max((a - b).abs());
            }
            wce_max = wce_max.max(wce_squared(&km, &rule.nodes, &rule.weights).unwrap());
        }
    }
    outcome(
        weight_err <= 1e-6 && wce_max <= 1e-10,
        format!("max |w_P - K_M^-1 1| {weight_err:.2e} (<=1e-6), max wce^2(K_M) {wce_max:.2e} (<=1e-10)"),
    )
}

fn criterion_9() -> Outcome {
    let kernels: [(&str, ClosedFormKernel); 2] = [
        ("uniform(0,1)", uniform_kernel(unit())),
        ("trunc-exp(1,5)", trunc_exp_kernel(one_five()).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    for (_, kernel) in &kernels {
        let (a, len) = (kernel.interval().a(), kernel.interval().length());
        for _ in 0..50 {
            let n = rng.random_range(2..=12);
            let mut nodes: Vec<f64> = (0..n).map(|_| a + len * rng.random::<f64>()).collect();
            nodes.sort_by(f64::total_cmp);
            nodes.dedup();
            let p = precision_matrix(kernel, &nodes).unwrap();
            let scale = p.amax();
            for i in 0..p.nrows() {
                for j in 0..p.ncols() {
                    if i.abs_diff(j) >= 2 {
                        worst = worst.max(p[(i, j)].abs() / scale);
                    }
                }
            }
        }
    }
    outcome(
        worst <= 1e-8,
        format!("max off-band |P_ij| / max|P| over 100 node sets: {worst:.2e} (<=1e-8)"),
    )
}

fn criterion_10() -> Outcome {
    let start = Instant::now();
    let densities = sample_batch(&GPConfig::default(), 100).unwrap();
    let config = QuadratureConfig::default();
    let mut lloyd_best = 0;
    let mut poincare_wins = 0;
    let mut nodes = vec![Vec::new(); 5];
    let mut ratios = vec![Vec::new(); 5];
    for (i, measure) in densities.iter().enumerate() {
        let c = match compare_rules(measure, 5, &config) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("density {i}: {e}")),
        };
        let d = c.distances;
        if d.lloyd <= d.poincare + 1e-12 && d.lloyd <= d.gaussian + 1e-12 {
            lloyd_best += 1;
        }
        if d.poincare <= d.gaussian {
            poincare_wins += 1;
        }
        for k in 0..5 {
            nodes[k].push(c.poincare.atoms()[k]);
            ratios[k].push(c.weight_ratios[k]);
        }
    }
    let median = |v: &mut Vec<f64>| {
        v.sort_by(f64::total_cmp);
        0.5 * (v[v.len() / 2 - 1] + v[v.len() / 2])
    };
    let node_medians: Vec<f64> = nodes.iter_mut().map(median).collect();
    let ratio_medians: Vec<f64> = ratios.iter_mut().map(median).collect();
    let node_dev = node_medians.iter().enumerate().fold(0.0f64, |m, (k, x)| {
        m.max((x - (0.1 + 0.2 * k as f64)).abs())
    });
    let ratio_ok = ratio_medians.iter().all(|r| (0.8..=1.2).contains(r));
    let secs = start.elapsed().as_secs_f64();
    outcome(
        lloyd_best == 100 && poincare_wins >= 60 && node_dev <= 0.05 && ratio_ok && secs < 600.0,
        format!(
            "(a) Lloyd best {lloyd_best}/100; (b) Poincare<=Gaussian {poincare_wins}/100 (>=60); (c) median node dev {node_dev:.2e} (<=0.05); (d) median ratios [{}] in [0.8,1.2]; {secs:.1}s (<600s)",
            ratio_medians.iter().map(|r| format!("{r:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn criterion_11() -> Outcome {
    let measure = exp_measure(one_five());
    let kernel = trunc_exp_kernel(one_five()).unwrap();
    let config = QuadratureConfig::default();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for n in 5..=50 {
        let rule = match poincare_quadrature(&measure, n, &config) {
            Ok(r) => r,
            Err(e) => return outcome(false, format!("n={n}: {e}")),
        };
        xs.push((n as f64).ln());
        ys.push(rule.wce_squared(&kernel).unwrap().ln());
    }
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    outcome(
        (-2.3..=-1.7).contains(&slope),
        format!("log-log slope of wce^2 over n in [5,50]: {slope:.4} (in [-2.3,-1.7])"),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("Uniform midpoint equivalence", criterion_1),
        ("Moment residuals", criterion_2),
        ("Closed-form wce", criterion_3),
        ("Optimal-quadrature oracle", criterion_4),
        ("Spectral accuracy", criterion_5),
        ("Mercer consistency", criterion_6),
        ("Riemann identities", criterion_7),
        ("Kernel-quadrature equivalence", criterion_8),
        ("Precision-matrix bandedness", criterion_9),
        ("Comparison statistics", criterion_10),
        ("Slope check", criterion_11),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        if !result.passed {
            failures += 1;
        }
        let tag = if result.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2}. {name}: {}", i + 1, result.detail);
    }
    println!(
        "acceptance: {} passed, {failures} failed",
        criteria.len() - failures
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
