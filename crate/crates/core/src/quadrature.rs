//! Tensor-product quadrature over chart regions with Richardson refinement.
//!
//! Periodic axes always use the uniform trapezoid rule (spectrally accurate
//! for smooth periodic integrands); aperiodic axes use composite
//! Gauss-Legendre panels or the midpoint rule. Accumulation is fixed-order
//! pairwise summation over fixed-size chunks, so results are bit-identical
//! across thread counts and between the parallel and sequential paths.

use crate::chart::Chart;
use crate::error::{GeomError, Result};
use crate::fields::{MetricField, ScalarField};
use crate::scalar::DIM;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Rule applied on aperiodic axes ([`QuadScheme::TrapezoidPeriodic`] forces
/// the periodic rule everywhere and falls back to midpoint when an axis is
/// not periodic).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadScheme {
    Midpoint,
    Gauss,
    TrapezoidPeriodic,
}

#[derive(Clone, Copy, Debug)]
pub struct Quadrature {
    pub scheme: QuadScheme,
    /// Sample points per axis at the coarsest level.
    pub resolution: usize,
    /// Number of levels evaluated; each level doubles the per-axis resolution.
    pub refinement_levels: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Quadrature {
            scheme: QuadScheme::Gauss,
            resolution: 48,
            refinement_levels: 2,
        }
    }
}

impl Quadrature {
    pub fn new(scheme: QuadScheme, resolution: usize, refinement_levels: usize) -> Self {
        Quadrature {
            scheme,
            resolution: resolution.max(1),
            refinement_levels: refinement_levels.max(1),
        }
    }

    pub fn gauss(resolution: usize, refinement_levels: usize) -> Self {
        Self::new(QuadScheme::Gauss, resolution, refinement_levels)
    }
}

/// Integration result with a refinement-based error estimate.
#[derive(Clone, Debug)]
pub struct IntegralResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Raw estimate per refinement level, coarsest first.
    pub levels: Vec<f64>,
}

/// Coordinate box inside a chart.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub bounds: [[f64; 2]; DIM],
}

impl Region {
    pub fn new(bounds: [[f64; 2]; DIM]) -> Region {
        Region { bounds }
    }

    pub fn full_chart(chart: &Chart) -> Region {
        Region {
            bounds: chart.ranges,
        }
    }

    pub fn contains(&self, p: [f64; DIM]) -> bool {
        (0..DIM).all(|a| p[a] >= self.bounds[a][0] - 1e-12 && p[a] <= self.bounds[a][1] + 1e-12)
    }
}

/// Nodes and weights for one axis.
fn axis_rule(
    scheme: QuadScheme,
    periodic_full: bool,
    bounds: [f64; 2],
    n: usize,
) -> (Vec<f64>, Vec<f64>) {
    let [lo, hi] = bounds;
    let width = hi - lo;
    let trapezoid = periodic_full || scheme == QuadScheme::TrapezoidPeriodic;
    if trapezoid && periodic_full {
        let w = width / n as f64;
        return ((0..n).map(|i| lo + i as f64 * w).collect(), vec![w; n]);
    }
    match scheme {
        QuadScheme::Gauss => {
            let order = n.min(8).max(1);
            let panels = n.div_ceil(order);
            let (xs, ws) = gauss_legendre(order);
            let pw = width / panels as f64;
            let mut nodes = Vec::with_capacity(panels * order);
            let mut weights = Vec::with_capacity(panels * order);
            for p in 0..panels {
                let a = lo + p as f64 * pw;
                let mid = a + 0.5 * pw;
                for k in 0..order {
                    nodes.push(mid + 0.5 * pw * xs[k]);
                    weights.push(0.5 * pw * ws[k]);
                }
            }
            (nodes, weights)
        }
        QuadScheme::Midpoint | QuadScheme::TrapezoidPeriodic => {
            let w = width / n as f64;
            (
                (0..n).map(|i| lo + (i as f64 + 0.5) * w).collect(),
                vec![w; n],
            )
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        let mid = n / 2;
        let (_, d) = legendre_with_derivative(n, 0.0);
        nodes[mid] = 0.0;
        weights[mid] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Deterministic pairwise sum of a slice.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

const CHUNK: usize = 8192;

/// Weighted sum of `f` over the tensor-product grid, deterministic across
/// thread counts. This is the data-parallel kernel of the crate.
fn grid_sum<F>(nodes: &[Vec<f64>; DIM], weights: &[Vec<f64>; DIM], f: &F) -> f64
where
    F: Fn([f64; DIM]) -> f64 + Sync,
{
    let dims = [nodes[0].len(), nodes[1].len(), nodes[2].len(), nodes[3].len()];
    let total = dims.iter().product::<usize>();
    let eval_chunk = |chunk_index: usize| -> f64 {
        let start = chunk_index * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut vals = Vec::with_capacity(end - start);
        for idx in start..end {
            let i3 = idx % dims[3];
            let r = idx / dims[3];
            let i2 = r % dims[2];
            let r = r / dims[2];
            let i1 = r % dims[1];
            let i0 = r / dims[1];
            let p = [nodes[0][i0], nodes[1][i1], nodes[2][i2], nodes[3][i3]];
            let w = weights[0][i0] * weights[1][i1] * weights[2][i2] * weights[3][i3];
            vals.push(w * f(p));
        }
        pairwise_sum(&vals)
    };
    let n_chunks = total.div_ceil(CHUNK);
    let chunk_sums = run_chunks(n_chunks, &eval_chunk);
    pairwise_sum(&chunk_sums)
}

#[cfg(feature = "parallel")]
fn run_chunks<F: Fn(usize) -> f64 + Sync>(n_chunks: usize, eval: &F) -> Vec<f64> {
    (0..n_chunks).into_par_iter().map(eval).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_chunks<F: Fn(usize) -> f64 + Sync>(n_chunks: usize, eval: &F) -> Vec<f64> {
    (0..n_chunks).map(eval).collect()
}

/// Sequential twin of the parallel kernel, used by the benchmark suite to
/// compare against the rayon path; results are bit-identical.
pub fn grid_sum_sequential<F>(nodes: &[Vec<f64>; DIM], weights: &[Vec<f64>; DIM], f: &F) -> f64
where
    F: Fn([f64; DIM]) -> f64 + Sync,
{
    let dims = [nodes[0].len(), nodes[1].len(), nodes[2].len(), nodes[3].len()];
    let total = dims.iter().product::<usize>();
    let eval_chunk = |chunk_index: usize| -> f64 {
        let start = chunk_index * CHUNK;
        let end = (start + CHUNK).min(total);
        let mut vals = Vec::with_capacity(end - start);
        for idx in start..end {
            let i3 = idx % dims[3];
            let r = idx / dims[3];
            let i2 = r % dims[2];
            let r = r / dims[2];
            let i1 = r % dims[1];
            let i0 = r / dims[1];
            let p = [nodes[0][i0], nodes[1][i1], nodes[2][i2], nodes[3][i3]];
            let w = weights[0][i0] * weights[1][i1] * weights[2][i2] * weights[3][i3];
            vals.push(w * f(p));
        }
        pairwise_sum(&vals)
    };
    let chunk_sums: Vec<f64> = (0..total.div_ceil(CHUNK)).map(eval_chunk).collect();
    pairwise_sum(&chunk_sums)
}

fn level_estimate<F>(
    chart: &Chart,
    region: &Region,
    q: &Quadrature,
    level: usize,
    f: &F,
    sequential: bool,
) -> f64
where
    F: Fn([f64; DIM]) -> f64 + Sync,
{
    let n = q.resolution << level;
    let mut nodes: [Vec<f64>; DIM] = Default::default();
    let mut weights: [Vec<f64>; DIM] = Default::default();
    for axis in 0..DIM {
        let full_width =
            (region.bounds[axis][1] - region.bounds[axis][0]) >= chart.scale(axis) - 1e-12;
        let periodic_full = chart.periodic[axis] && full_width;
        let (xs, ws) = axis_rule(q.scheme, periodic_full, region.bounds[axis], n);
        nodes[axis] = xs;
        weights[axis] = ws;
    }
    if sequential {
        grid_sum_sequential(&nodes, &weights, f)
    } else {
        grid_sum(&nodes, &weights, f)
    }
}

/// Integrate a raw coordinate-space density over a region of a chart,
/// refining and reporting a Richardson-extrapolated error estimate.
pub fn integrate_region<F>(
    chart: &Chart,
    region: &Region,
    q: &Quadrature,
    f: F,
) -> Result<IntegralResult>
where
    F: Fn([f64; DIM]) -> f64 + Sync,
{
    let levels: Vec<f64> = (0..q.refinement_levels)
        .map(|level| level_estimate(chart, region, q, level, &f, false))
        .collect();
    summarize_levels(levels)
}

/// Shared refinement analysis: extrapolated value, error estimate, and
/// divergence detection.
pub fn summarize_levels(levels: Vec<f64>) -> Result<IntegralResult> {
    let last = *levels.last().expect("at least one level");
    if levels.len() == 1 {
        return Ok(IntegralResult {
            value: last,
            error_estimate: f64::NAN,
            levels,
        });
    }
    let diffs: Vec<f64> = levels.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let noise_floor = 1e-13 * (1.0 + last.abs());
    if diffs.len() >= 2 {
        let (prev, curr) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
        if curr > prev * 4.0 && curr > 100.0 * noise_floor {
            return Err(GeomError::QuadratureDiverged(format!(
                "refinement differences grew from {prev:.3e} to {curr:.3e}"
            )));
        }
    }
    let err_last = *diffs.last().unwrap();
    // Observed order from the last three levels when resolvable.
    let mut value = last;
    if diffs.len() >= 2 {
        let (prev, curr) = (diffs[diffs.len() - 2], diffs[diffs.len() - 1]);
        if curr > noise_floor && prev > curr {
            let order = (prev / curr).log2().clamp(1.0, 16.0);
            let factor = 2f64.powf(order) - 1.0;
            value = last + (last - levels[levels.len() - 2]) / factor;
        }
    }
    Ok(IntegralResult {
        value,
        error_estimate: err_last.max(noise_floor),
        levels,
    })
}

/// ∫ field dVol_g over a region: the scalar field against the Riemannian
/// volume of `g`.
pub fn integrate_domain(
    g: &MetricField,
    field: &ScalarField,
    region: &Region,
    q: &Quadrature,
) -> Result<IntegralResult> {
    let chart = field.chart.clone();
    let g = g.clone();
    let field = field.clone();
    integrate_region(&chart.clone(), region, q, move |p| {
        let gm = crate::fields::matrix_from_flat(g.components().components_unchecked(p));
        let det = crate::linalg::det(&gm);
        field.components_unchecked(p)[0] * det.max(0.0).sqrt()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::fields::MetricField;
    use crate::scalar::lit;
    use crate::smooth_map;

    fn unit_chart() -> crate::chart::ChartRef {
        Chart::new(
            "unit",
            [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0], [0.0, 1.0]],
            [false; 4],
        )
        .unwrap()
        .into_ref()
    }

    fn flat_metric(chart: crate::chart::ChartRef) -> MetricField {
        MetricField::from_map(
            chart,
            smooth_map!(16, |_x| {
                let mut m = [lit(0.0); 16];
                for i in 0..4 {
                    m[5 * i] = lit(1.0);
                }
                m
            }),
        )
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (xs, ws) = gauss_legendre(8);
        // degree-15 exactness: int_-1^1 x^14 dx = 2/15
        let val: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(14)).sum();
        assert!((val - 2.0 / 15.0).abs() < 1e-14);
        let odd: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn unit_box_volume_is_exact() {
        let chart = unit_chart();
        let g = flat_metric(chart.clone());
        let one = ScalarField::constant(chart.clone(), 1.0);
        let q = Quadrature::gauss(8, 2);
        let r = integrate_domain(&g, &one, &Region::full_chart(&chart), &q).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12, "value {}", r.value);
    }

    #[test]
    fn refinement_reduces_error_for_smooth_integrand() {
        let chart = unit_chart();
        let q = Quadrature::new(QuadScheme::Midpoint, 4, 4);
        let r = integrate_region(&chart, &Region::full_chart(&chart), &q, |p| {
            (3.0 * p[0]).sin() * (2.0 * p[1]).exp() + (p[2] * p[3]).cos()
        })
        .unwrap();
        let diffs: Vec<f64> = r.levels.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for pair in diffs.windows(2) {
            assert!(pair[1] < pair[0], "differences must shrink: {diffs:?}");
        }
    }

    #[test]
    fn periodic_axis_uses_spectral_trapezoid() {
        let chart = Chart::new(
            "per",
            [
                [0.0, 1.0],
                [0.0, std::f64::consts::TAU],
                [0.0, 1.0],
                [0.0, 1.0],
            ],
            [false, true, false, false],
        )
        .unwrap()
        .into_ref();
        // int_0^tau sin^2 = pi, exact for trapezoid with n >= 3
        let q = Quadrature::gauss(6, 1);
        let r = integrate_region(&chart, &Region::full_chart(&chart), &q, |p| {
            p[1].sin().powi(2)
        })
        .unwrap();
        assert!((r.value - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn parallel_and_sequential_sums_are_bit_identical() {
        let chart = unit_chart();
        let q = Quadrature::gauss(12, 1);
        let f = |p: [f64; 4]| (p[0] * 7.3).sin() * (p[1] - 0.3).exp() + p[2] * p[3];
        let region = Region::full_chart(&chart);
        let a = level_estimate(&chart, &region, &q, 0, &f, false);
        let b = level_estimate(&chart, &region, &q, 0, &f, true);
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn divergent_refinement_is_reported() {
        // refinement sequence that moves away: synthetic levels
        let err = summarize_levels(vec![1.0, 1.001, 1.2]).unwrap_err();
        assert!(matches!(err, GeomError::QuadratureDiverged(_)));
    }
}
