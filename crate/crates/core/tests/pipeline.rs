use poincare_core::io::read_density_csv;
use poincare_core::quadrature::read_rule_csv;
use poincare_core::quantize::{compare_rules, write_comparison_rows, COMPARISON_HEADER};
use poincare_core::randdens::{sample_batch, write_batch, GPConfig};
use poincare_core::{poincare_quadrature, QuadratureConfig};

#[test]
fn random_density_runs_through_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let config = GPConfig {
        seed: 5,
        ..Default::default()
    };
    let batch = sample_batch(&config, 2).unwrap();
    let paths = write_batch(dir.path(), &batch).unwrap();
    let measure = read_density_csv(&paths[0]).unwrap();

    let quad_config = QuadratureConfig::default();
    let rule = poincare_quadrature(&measure, 5, &quad_config).unwrap();
    assert!(rule.diagnostics.converged);
    assert!(rule.diagnostics.moment_residual <= 1e-6);

    let rule_path = dir.path().join("rule.csv");
    rule.write_csv_file(&rule_path).unwrap();
    let (nodes, weights) = read_rule_csv(&rule_path).unwrap();
    assert_eq!(nodes, rule.nodes);
    assert_eq!(weights, rule.weights);

    let comparison = compare_rules(&measure, 5, &quad_config).unwrap();
    let (poincare, gaussian) = comparison.ratios_to_lloyd();
    assert!(poincare >= 1.0 - 1e-9 && gaussian >= 1.0 - 1e-9);
    assert_eq!(comparison.zeros.len(), 5);

    let mut out = csv::Writer::from_writer(Vec::new());
    out.write_record(COMPARISON_HEADER).unwrap();
    write_comparison_rows(&mut out, 0, &comparison).unwrap();
    let text = String::from_utf8(out.into_inner().unwrap()).unwrap();
    for rule in ["poincare", "gaussian", "lloyd", "phi_zeros"] {
        assert_eq!(
            text.lines()
                .filter(|l| l.split(',').nth(1) == Some(rule))
                .count(),
            5,
            "{rule}"
        );
    }
}

#[test]
fn pipeline_is_deterministic() {
    let config = GPConfig {
        seed: 9,
        ..Default::default()
    };
    let first = sample_batch(&config, 1).unwrap().remove(0);
    let second = sample_batch(&config, 1).unwrap().remove(0);
    let a = poincare_quadrature(&first, 6, &QuadratureConfig::default()).unwrap();
    let b = poincare_quadrature(&second, 6, &QuadratureConfig::default()).unwrap();
    assert_eq!(a.nodes, b.nodes);
    assert_eq!(a.weights, b.weights);
}
