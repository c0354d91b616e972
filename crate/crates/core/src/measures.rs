//! Probability measures on a bounded interval whose density is bounded away
//! from zero, together with the integration and cdf machinery the rest of the
//! crate builds on.

use crate::error::{Error, Result};

/// Grid used to check that a density stays positive.
const POSITIVITY_GRID: usize = 10_000;

/// Default composite Gauss–Legendre resolution.
pub const DEFAULT_PANELS: usize = 512;

/// Four-point Gauss–Legendre rule on [-1, 1].
pub(crate) const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
pub(crate) const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// A closed interval `[a, b]` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::BadInterval { a, b });
        }
        Ok(Self { a, b })
    }

    /// The unit interval `[0, 1]`.
    pub fn unit() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn contains(&self, t: f64) -> bool {
        t >= self.a && t <= self.b
    }

    /// `count` evenly spaced points including both endpoints.
    pub fn linspace(&self, count: usize) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![self.a],
            _ => {
                let h = self.length() / (count - 1) as f64;
                (0..count)
                    .map(|j| {
                        if j + 1 == count {
                            self.b
                        } else {
                            self.a + j as f64 * h
                        }
                    })
                    .collect()
            }
        }
    }
}

/// Parametric family of a [`Measure`].
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureKind {
    Uniform,
    /// Density proportional to `exp(-rate * t)`.
    TruncatedExponential {
        rate: f64,
    },
    /// Density proportional to `exp(-(t - mean)^2 / (2 sd^2))`.
    TruncatedNormal {
        mean: f64,
        sd: f64,
    },
    /// Values on an evenly spaced grid over the interval, linearly
    /// interpolated. Stored normalized.
    Tabulated {
        values: Vec<f64>,
    },
}

/// A probability measure `dμ = ρ(t) dt` on an interval, with `ρ` continuous
/// and bounded below by a positive constant.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure {
    interval: Interval,
    kind: MeasureKind,
    /// Divides the unnormalized density.
    normalizer: f64,
}

impl Measure {
    /// Builds a measure, normalizing its density and checking positivity.
    pub fn new(kind: MeasureKind, interval: Interval) -> Result<Self> {
        let (a, b) = (interval.a(), interval.b());
        let (kind, normalizer) = match kind {
            MeasureKind::Uniform => (MeasureKind::Uniform, 1.0),
            MeasureKind::TruncatedExponential { rate } => {
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "exponential rate must be positive, got {rate}"
                    )));
                }
                // ρ(t) = rate e^{-rate (t-a)} / (1 - e^{-rate (b-a)})
                let z = -(-rate * (b - a)).exp_m1();
                (MeasureKind::TruncatedExponential { rate }, z)
            }
            MeasureKind::TruncatedNormal { mean, sd } => {
                if !(mean.is_finite() && sd.is_finite() && sd > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "truncated normal needs finite mean and sd > 0, got ({mean}, {sd})"
                    )));
                }
                let raw = Self {
                    interval,
                    kind: MeasureKind::TruncatedNormal { mean, sd },
                    normalizer: 1.0,
                };
                let mass = gauss_legendre_composite(|t| raw.pdf(t), a, b, 4 * DEFAULT_PANELS);
                (raw.kind, mass)
            }
            MeasureKind::Tabulated { values } => {
                if values.len() < 2 {
                    return Err(Error::InvalidParameter(
                        "tabulated density needs at least two values".into(),
                    ));
                }
                if let Some((j, &v)) = values
                    .iter()
                    .enumerate()
                    .find(|(_, v)| !(v.is_finite() && **v > 0.0))
                {
                    let at = interval.linspace(values.len())[j];
                    return Err(Error::NonPositiveDensity { min: v, at });
                }
                // Trapezoid is exact for the piecewise-linear interpolant.
                let h = interval.length() / (values.len() - 1) as f64;
                let last = values.len() - 1;
                let mass: f64 = h * values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| if j == 0 || j == last { 0.5 * v } else { *v })
                    .sum::<f64>();
                let values = values.into_iter().map(|v| v / mass).collect();
                (MeasureKind::Tabulated { values }, 1.0)
            }
        };
        let measure = Self {
            interval,
            kind,
            normalizer,
        };
        measure.check_positive()?;
        Ok(measure)
    }

    pub fn uniform(interval: Interval) -> Self {
        Self {
            interval,
            kind: MeasureKind::Uniform,
            normalizer: 1.0,
        }
    }

    pub fn truncated_exponential(interval: Interval, rate: f64) -> Result<Self> {
        Self::new(MeasureKind::TruncatedExponential { rate }, interval)
    }

    pub fn truncated_normal(interval: Interval, mean: f64, sd: f64) -> Result<Self> {
        Self::new(MeasureKind::TruncatedNormal { mean, sd }, interval)
    }

    /// Density values on an evenly spaced grid covering `interval`; they are
    /// rescaled to integrate to one.
    pub fn tabulated(interval: Interval, values: Vec<f64>) -> Result<Self> {
        Self::new(MeasureKind::Tabulated { values }, interval)
    }

    fn check_positive(&self) -> Result<()> {
        let mut min = f64::INFINITY;
        let mut at = self.interval.a();
        for t in self.interval.linspace(POSITIVITY_GRID) {
            let v = self.pdf(t);
            if !(v >= min) {
                min = v;
                at = t;
            }
        }
        if !(min > 0.0 && min.is_finite()) {
            return Err(Error::NonPositiveDensity { min, at });
        }
        Ok(())
    }

    #[inline]
    pub fn interval(&self) -> Interval {
        self.interval
    }

    #[inline]
    pub fn kind(&self) -> &MeasureKind {
        &self.kind
    }

    /// Whether this is the unit-rate truncated exponential, the case with
    /// closed-form basis and kernel.
    pub fn exponential_rate(&self) -> Option<f64> {
        match self.kind {
            MeasureKind::TruncatedExponential { rate } => Some(rate),
            _ => None,
        }
    }

    /// Probability density at `t`; zero outside the interval.
    pub fn pdf(&self, t: f64) -> f64 {
        let (a, b) = (self.interval.a(), self.interval.b());
        if !(t >= a && t <= b) {
            return 0.0;
        }
        match &self.kind {
            MeasureKind::Uniform => 1.0 / (b - a),
            MeasureKind::TruncatedExponential { rate } => {
                rate * (-rate * (t - a)).exp() / self.normalizer
            }
            MeasureKind::TruncatedNormal { mean, sd } => {
                let z = (t - mean) / sd;
                (-0.5 * z * z).exp() / self.normalizer
            }
            MeasureKind::Tabulated { values } => {
                let (j, frac) = locate(self.interval, values.len(), t);
                values[j] + frac * (values[j + 1] - values[j])
            }
        }
    }

    /// The potential `V = -log ρ`.
    pub fn potential(&self, t: f64) -> f64 {
        -self.pdf(t).ln()
    }

    /// `V'`. Tabulated densities use the slope of the containing grid cell.
    pub fn potential_derivative(&self, t: f64) -> f64 {
        match &self.kind {
            MeasureKind::Uniform => 0.0,
            MeasureKind::TruncatedExponential { rate } => *rate,
            MeasureKind::TruncatedNormal { mean, sd } => (t - mean) / (sd * sd),
            MeasureKind::Tabulated { values } => {
                let (j, _) = locate(self.interval, values.len(), t);
                let h = self.interval.length() / (values.len() - 1) as f64;
                let slope = (values[j + 1] - values[j]) / h;
                -slope / self.pdf(t)
            }
        }
    }

    /// `∫ f dμ` with the default rule.
    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        integrate(self, f, IntegrationRule::GaussLegendre, DEFAULT_PANELS)
    }

    /// `∫_lo^hi f dμ` by composite four-point Gauss–Legendre.
    pub fn integrate_range<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64, panels: usize) -> f64 {
        gauss_legendre_composite(|t| f(t) * self.pdf(t), lo, hi, panels)
    }

    /// `∫_lo^hi f dμ` for a short segment. Tabulated densities are split at
    /// their grid points, so polynomial `f` of degree ≤ 2 integrates exactly;
    /// analytic densities use Gauss–Legendre panels no wider than 1/32 of
    /// the interval.
    pub fn integrate_segment<F: Fn(f64) -> f64>(&self, f: F, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match &self.kind {
            MeasureKind::Tabulated { values } => {
                let g = |t: f64| f(t) * self.pdf(t);
                self.knot_pieces(values.len(), lo, hi)
                    .map(|(p, q)| gauss_legendre_composite(g, p, q, 1))
                    .sum()
            }
            _ => {
                let panels = (32.0 * (hi - lo) / self.interval.length()).ceil() as usize;
                self.integrate_range(f, lo, hi, panels.max(1))
            }
        }
    }

    /// Nodes and positive weights of a composite Gauss–Legendre
    /// discretization of `μ` with at least `min_points` nodes. Tabulated
    /// densities are split at their grid points. Weights sum to 1.
    pub fn discretize(&self, min_points: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = (self.interval.a(), self.interval.b());
        let pieces: Vec<(f64, f64)> = match &self.kind {
            MeasureKind::Tabulated { values } => self.knot_pieces(values.len(), a, b).collect(),
            _ => vec![(a, b)],
        };
        let per_piece = min_points.div_ceil(4 * pieces.len()).max(1);
        let mut nodes = Vec::with_capacity(4 * per_piece * pieces.len());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (lo, hi) in pieces {
            let h = (hi - lo) / per_piece as f64;
            for j in 0..per_piece {
                let mid = lo + (j as f64 + 0.5) * h;
                for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
                    let t = mid + 0.5 * h * x;
                    nodes.push(t);
                    weights.push(0.5 * h * w * self.pdf(t));
                }
            }
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        (nodes, weights)
    }

    /// Splits `[lo, hi]` at the points of a `len`-point tabulation grid.
    fn knot_pieces(&self, len: usize, lo: f64, hi: f64) -> impl Iterator<Item = (f64, f64)> {
        let h = self.interval.length() / (len - 1) as f64;
        let (a, b) = (self.interval.a(), self.interval.b());
        let first = ((lo - a) / h).floor().max(0.0) as usize;
        let last = (((hi - a) / h).ceil() as usize).min(len - 1);
        (first..last).filter_map(move |k| {
            let p = (a + k as f64 * h).max(lo);
            let q = if k + 1 == len - 1 {
                b
            } else {
                a + (k + 1) as f64 * h
            }
            .min(hi);
            (q > p).then_some((p, q))
        })
    }

    /// Mean of the measure.
    pub fn mean(&self) -> f64 {
        self.expect(|t| t)
    }
}

/// Cell index and fractional offset of `t` on an evenly spaced grid of `len`
/// points over `interval`.
pub(crate) fn locate(interval: Interval, len: usize, t: f64) -> (usize, f64) {
    let cells = len - 1;
    let s = (t - interval.a()) / interval.length() * cells as f64;
    let j = (s.floor().max(0.0) as usize).min(cells - 1);
    (j, (s - j as f64).clamp(0.0, 1.0))
}

/// Composite quadrature families accepted by [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IntegrationRule {
    Trapezoid,
    Simpson,
    #[default]
    GaussLegendre,
}

/// `∫_a^b f ρ dt` with a composite rule over `n_panels` equal panels.
pub fn integrate<F: Fn(f64) -> f64>(
    measure: &Measure,
    f: F,
    rule: IntegrationRule,
    n_panels: usize,
) -> f64 {
    let n_panels = n_panels.max(1);
    let (a, b) = (measure.interval.a(), measure.interval.b());
    let g = |t: f64| f(t) * measure.pdf(t);
    let h = (b - a) / n_panels as f64;
    match rule {
        IntegrationRule::Trapezoid => {
            let interior: f64 = (1..n_panels).map(|j| g(a + j as f64 * h)).sum();
            h * (0.5 * (g(a) + g(b)) + interior)
        }
        IntegrationRule::Simpson => {
            let mut acc = 0.0;
            for j in 0..n_panels {
                let lo = a + j as f64 * h;
                let hi = if j + 1 == n_panels { b } else { lo + h };
                acc += (hi - lo) / 6.0 * (g(lo) + 4.0 * g(0.5 * (lo + hi)) + g(hi));
            }
            acc
        }
        IntegrationRule::GaussLegendre => gauss_legendre_composite(g, a, b, n_panels),
    }
}

pub(crate) fn gauss_legendre_composite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    panels: usize,
) -> f64 {
    let panels = panels.max(1);
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for j in 0..panels {
        let mid = lo + (j as f64 + 0.5) * h;
        let half = 0.5 * h;
        let mut panel = 0.0;
        for (x, w) in GL4_NODES.iter().zip(GL4_WEIGHTS.iter()) {
            panel += w * f(mid + half * x);
        }
        acc += half * panel;
    }
    acc
}

/// Tabulated cdf on an evenly spaced `z` grid and its inverse on an evenly
/// spaced `p` grid.
#[derive(Debug, Clone)]
pub struct CdfTable {
    pub z: Vec<f64>,
    pub cdf: Vec<f64>,
    pub p: Vec<f64>,
    pub quantile: Vec<f64>,
}

impl CdfTable {
    /// `F(t)` by linear interpolation of the table.
    pub fn cdf_at(&self, t: f64) -> f64 {
        let interval = Interval {
            a: self.z[0],
            b: *self.z.last().unwrap(),
        };
        if t <= interval.a() {
            return 0.0;
        }
        if t >= interval.b() {
            return 1.0;
        }
        let (j, frac) = locate(interval, self.z.len(), t);
        self.cdf[j] + frac * (self.cdf[j + 1] - self.cdf[j])
    }

    /// `F^{-1}(p)` by inverting the piecewise-linear cdf.
    pub fn quantile_at(&self, p: f64) -> f64 {
        invert_monotone(&self.z, &self.cdf, p)
    }
}

/// Inverse of the piecewise-linear map `z -> values` at level `p`.
fn invert_monotone(z: &[f64], values: &[f64], p: f64) -> f64 {
    let last = values.len() - 1;
    if p <= values[0] {
        return z[0];
    }
    if p >= values[last] {
        return z[last];
    }
    // first index with values[k] >= p
    let k = values.partition_point(|v| *v < p).clamp(1, last);
    let (v0, v1) = (values[k - 1], values[k]);
    let frac = if v1 > v0 { (p - v0) / (v1 - v0) } else { 0.0 };
    z[k - 1] + frac * (z[k] - z[k - 1])
}

/// Builds the cdf on `grid_size` points and its numerical inverse on a
/// uniform `p` grid of the same size.
pub fn cdf_and_quantile(measure: &Measure, grid_size: usize) -> Result<CdfTable> {
    if grid_size < 2 {
        return Err(Error::InvalidParameter(format!(
            "cdf grid needs at least 2 points, got {grid_size}"
        )));
    }
    let interval = measure.interval();
    let z = interval.linspace(grid_size);
    let sub = (DEFAULT_PANELS * 8).div_ceil(grid_size - 1).max(1);
    let mut cdf = Vec::with_capacity(grid_size);
    cdf.push(0.0);
    let mut acc = 0.0;
    for w in z.windows(2) {
        acc += measure.integrate_range(|_| 1.0, w[0], w[1], sub);
        cdf.push(acc);
    }
    let total = acc;
    for c in cdf.iter_mut() {
        *c /= total;
    }
    cdf[grid_size - 1] = 1.0;
    let p = Interval::unit().linspace(grid_size);
    let quantile = p.iter().map(|&pk| invert_monotone(&z, &cdf, pk)).collect();
    Ok(CdfTable {
        z,
        cdf,
        p,
        quantile,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_exp(b: f64) -> Measure {
        Measure::truncated_exponential(Interval::new(0.0, b).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn bad_interval_is_rejected() {
        assert!(matches!(
            Interval::new(1.0, 1.0),
            Err(Error::BadInterval { .. })
        ));
        assert!(matches!(
            Interval::new(2.0, 1.0),
            Err(Error::BadInterval { .. })
        ));
        assert!(Interval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn uniform_density_is_flat() {
        let m = Measure::uniform(Interval::unit());
        for t in [0.0, 0.3, 1.0] {
            assert_eq!(m.pdf(t), 1.0);
        }
        assert_eq!(m.potential_derivative(0.4), 0.0);
    }

    #[test]
    fn truncated_exponential_matches_closed_form() {
        let (a, b) = (1.0f64, 5.0f64);
        let m = Measure::truncated_exponential(Interval::new(a, b).unwrap(), 1.0).unwrap();
        for t in [1.0f64, 2.5, 5.0] {
            let expected = (-t).exp() / ((-a).exp() - (-b).exp());
            assert_abs_diff_eq!(m.pdf(t), expected, epsilon = 1e-14);
            assert_abs_diff_eq!(m.potential_derivative(t), 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn segment_integral_is_exact_on_piecewise_linear_density() {
        let m =
            Measure::tabulated(Interval::new(0.0, 3.0).unwrap(), vec![1.0, 3.0, 2.0, 1.0]).unwrap();
        // pieces of rho = (alpha + beta t) / 6 on [0,1], [1,2], [2,3]
        let lines = [(1.0, 2.0), (4.0, -1.0), (4.0, -1.0)];
        let exact = |lo: f64, hi: f64| {
            let mut acc = 0.0;
            for (k, (alpha, beta)) in lines.iter().enumerate() {
                let (p, q) = ((k as f64).max(lo), ((k + 1) as f64).min(hi));
                if q > p {
                    acc += (alpha * (q.powi(3) - p.powi(3)) / 3.0
                        + beta * (q.powi(4) - p.powi(4)) / 4.0)
                        / 6.0;
                }
            }
            acc
        };
        for (lo, hi) in [(0.5, 2.25), (0.0, 3.0), (1.0, 2.0), (2.9, 3.0), (0.1, 0.2)] {
            assert_abs_diff_eq!(
                m.integrate_segment(|t| t * t, lo, hi),
                exact(lo, hi),
                epsilon = 1e-14
            );
        }
        assert_eq!(m.integrate_segment(|_| 1.0, 2.0, 1.0), 0.0);
    }

    #[test]
    fn discretization_reproduces_moments() {
        let measures = [
            unit_exp(3.0),
            Measure::truncated_normal(Interval::unit(), 0.4, 0.3).unwrap(),
            Measure::tabulated(Interval::unit(), vec![1.0, 3.0, 2.0, 1.0, 0.5]).unwrap(),
        ];
        for m in &measures {
            let (nodes, weights) = m.discretize(1000);
            assert!(nodes.len() >= 1000);
            assert!(weights.iter().all(|&w| w > 0.0));
            assert_abs_diff_eq!(weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
            for k in 1..6 {
                let discrete: f64 = nodes.iter().zip(&weights).map(|(t, w)| w * t.powi(k)).sum();
                assert_abs_diff_eq!(discrete, m.expect(|t| t.powi(k)), epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn tabulated_constant_normalizes_to_one() {
        let m = Measure::tabulated(Interval::unit(), vec![2.0; 11]).unwrap();
        for t in [0.0, 0.05, 0.77, 1.0] {
            assert_abs_diff_eq!(m.pdf(t), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn nonpositive_tabulated_density_is_rejected() {
        let err = Measure::tabulated(Interval::unit(), vec![1.0, 0.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDensity { .. }));
        let err = Measure::tabulated(Interval::unit(), vec![1.0, -1.0, 1.0]).unwrap_err();
        assert!(matches!(err, Error::NonPositiveDensity { .. }));
    }

    #[test]
    fn bad_parameters_are_rejected() {
        assert!(Measure::truncated_exponential(Interval::unit(), 0.0).is_err());
        assert!(Measure::truncated_normal(Interval::unit(), 0.5, -1.0).is_err());
    }

    #[test]
    fn integration_examples() {
        let u = Measure::uniform(Interval::unit());
        for rule in [
            IntegrationRule::Trapezoid,
            IntegrationRule::Simpson,
            IntegrationRule::GaussLegendre,
        ] {
            assert_abs_diff_eq!(integrate(&u, |_| 1.0, rule, 64), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(integrate(&u, |t| t, rule, 64), 0.5, epsilon = 1e-12);
        }
        let e = unit_exp(3.0);
        assert_abs_diff_eq!(
            integrate(&e, |_| 1.0, IntegrationRule::GaussLegendre, DEFAULT_PANELS),
            1.0,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            integrate(&e, |_| 1.0, IntegrationRule::Simpson, DEFAULT_PANELS),
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn every_kind_is_normalized_and_positive() {
        let measures = [
            Measure::uniform(Interval::new(-1.0, 2.0).unwrap()),
            unit_exp(3.0),
            Measure::truncated_exponential(Interval::new(1.0, 5.0).unwrap(), 2.5).unwrap(),
            Measure::truncated_normal(Interval::new(-1.0, 1.0).unwrap(), 0.2, 0.4).unwrap(),
            Measure::tabulated(Interval::unit(), vec![1.0, 3.0, 0.5, 2.0, 2.0]).unwrap(),
        ];
        for m in &measures {
            let grid = m.interval().linspace(10_000);
            assert!(grid.iter().all(|&t| m.pdf(t) > 0.0));
            let mass = integrate(m, |_| 1.0, IntegrationRule::GaussLegendre, 4096);
            assert!((mass - 1.0).abs() <= 1e-8, "mass {mass} for {:?}", m.kind());
            for &t in grid.iter().step_by(997) {
                let rho = m.pdf(t);
                assert!(((-m.potential(t)).exp() - rho).abs() <= 1e-12 * rho);
            }
        }
    }

    #[test]
    fn cdf_examples() {
        let u = Measure::uniform(Interval::unit());
        let table = cdf_and_quantile(&u, 101).unwrap();
        for (z, f) in table.z.iter().zip(&table.cdf) {
            assert_abs_diff_eq!(*z, *f, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(table.quantile_at(0.25), 0.25, epsilon = 1e-13);
        let e = unit_exp(3.0);
        let table = cdf_and_quantile(&e, 500).unwrap();
        assert_eq!(*table.cdf.last().unwrap(), 1.0);
        assert_eq!(table.cdf[0], 0.0);
        assert!(table.cdf.windows(2).all(|w| w[1] >= w[0]));
        assert!(cdf_and_quantile(&e, 1).is_err());
    }

    #[test]
    fn quantile_inverts_cdf_within_a_cell() {
        let m =
            Measure::tabulated(Interval::new(0.0, 2.0).unwrap(), vec![0.2, 1.0, 3.0, 0.7]).unwrap();
        let table = cdf_and_quantile(&m, 400).unwrap();
        let spacing = 2.0 / 399.0;
        for (z, f) in table.z.iter().zip(&table.cdf).skip(1).take(397) {
            assert!((table.quantile_at(*f) - z).abs() <= spacing);
        }
    }
}
