//! Almost-complex structures, the dJd operator, integrability tests, and the
//! Kähler star identity.
//!
//! Convention: J acts on 1-forms by composition, (Jη)(X) = η(JX). With the
//! endomorphism entries J^r_c (image component r of ∂_c) this reads
//! (Jη)_c = Σ_k η_k J^k_c.

use std::sync::Arc;

use crate::chart::ChartRef;
use crate::error::{GeomError, Result};
use crate::fields::{
    impl_pointwise_eval, matrix_from_flat, EndoField, FieldEval, FormField, MetricField,
    OneFormField, ScalarField, TwoFormField,
};
use crate::forms::{self, wedge, FormValue, BASIS2};
use crate::geometry::laplacian;
use crate::scalar::{seed_point, Jet, Scalar, DIM, J1, J2, J3, J4};

/// Tolerance for the pointwise J² = −Id and compatibility invariants.
pub const ACS_TOLERANCE: f64 = 1e-10;

/// An almost-complex structure: an endomorphism field squaring to −Id.
#[derive(Clone)]
pub struct AlmostComplexStructure {
    pub chart: ChartRef,
    endo: EndoField,
}

impl AlmostComplexStructure {
    /// Validates J² = −Id at deterministic chart samples before wrapping.
    pub fn new(chart: ChartRef, endo: EndoField) -> Result<Self> {
        let j = AlmostComplexStructure { chart, endo };
        for p in j.chart.sample_points(64) {
            let r = j.square_residual(p)?;
            if r > ACS_TOLERANCE {
                return Err(GeomError::NotCompatible {
                    residual: r,
                    tolerance: ACS_TOLERANCE,
                });
            }
        }
        Ok(j)
    }

    /// No validation; for deliberately broken structures used to exercise
    /// the integrability tests' power.
    pub fn new_unchecked(chart: ChartRef, endo: EndoField) -> Self {
        AlmostComplexStructure { chart, endo }
    }

    pub fn endo(&self) -> &EndoField {
        &self.endo
    }

    pub fn matrix(&self, p: [f64; DIM]) -> Result<[[f64; DIM]; DIM]> {
        self.endo.matrix(p)
    }

    /// Relative residual of J² + Id at a point.
    pub fn square_residual(&self, p: [f64; DIM]) -> Result<f64> {
        let m = self.endo.matrix(p)?;
        let sq = crate::linalg::mat_mul(&m, &m);
        let scale = 1.0
            + m.iter()
                .flatten()
                .map(|v| v * v)
                .fold(0.0f64, f64::max);
        let mut worst = 0.0f64;
        for i in 0..DIM {
            for j in 0..DIM {
                let expected = if i == j { -1.0 } else { 0.0 };
                worst = worst.max((sq[i][j] - expected).abs());
            }
        }
        Ok(worst / scale)
    }

    /// Covector action (Jη)_c = Σ_k η_k J^k_c at a point.
    pub fn apply_to_covector(&self, p: [f64; DIM], eta: &[f64; DIM]) -> Result<[f64; DIM]> {
        let m = self.endo.matrix(p)?;
        let mut out = [0.0; DIM];
        for c in 0..DIM {
            let mut acc = 0.0;
            for k in 0..DIM {
                acc += eta[k] * m[k][c];
            }
            out[c] = acc;
        }
        Ok(out)
    }
}

/// Max-norm residual of g(J·, J·) − g at a point.
pub fn compatibility_residual(
    g: &MetricField,
    j: &AlmostComplexStructure,
    p: [f64; DIM],
) -> Result<f64> {
    let gm = g.matrix(p)?;
    let jm = j.matrix(p)?;
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..DIM {
        for l in 0..DIM {
            let mut acc = 0.0;
            for k in 0..DIM {
                for m in 0..DIM {
                    acc += jm[k][i] * gm[k][m] * jm[m][l];
                }
            }
            worst = worst.max((acc - gm[i][l]).abs());
            scale = scale.max(gm[i][l].abs());
        }
    }
    Ok(worst / (1.0 + scale))
}

/// J applied to a 1-form value.
pub fn apply_j(
    j: &AlmostComplexStructure,
    eta: &FormValue,
    p: [f64; DIM],
) -> Result<FormValue> {
    match eta {
        FormValue::One(c) => Ok(FormValue::One(j.apply_to_covector(p, c)?)),
        other => Err(GeomError::DegreeError(format!(
            "apply_j expects a 1-form, got degree {}",
            other.degree()
        ))),
    }
}

// ---------------------------------------------------------------------------
// J(df) as a derived field, and dJd.
// ---------------------------------------------------------------------------

struct JdfEval {
    f: Arc<dyn FieldEval<1>>,
    j: Arc<dyn FieldEval<16>>,
}

fn assemble_jdf<S: Scalar>(fjet: Jet<S>, jmat: [S; 16]) -> [S; 4] {
    let mut out = [S::zero(); 4];
    for c in 0..DIM {
        let mut acc = S::zero();
        for k in 0..DIM {
            acc = acc + fjet.d[k] * jmat[4 * k + c];
        }
        out[c] = acc;
    }
    out
}

impl FieldEval<4> for JdfEval {
    fn at(&self, x: [f64; DIM]) -> [f64; 4] {
        assemble_jdf(self.f.at_j1(seed_point(x))[0], self.j.at(x))
    }
    fn at_j1(&self, x: [J1; DIM]) -> [J1; 4] {
        assemble_jdf(self.f.at_j2(seed_point(x))[0], self.j.at_j1(x))
    }
    fn at_j2(&self, x: [J2; DIM]) -> [J2; 4] {
        assemble_jdf(self.f.at_j3(seed_point(x))[0], self.j.at_j2(x))
    }
    fn at_j3(&self, x: [J3; DIM]) -> [J3; 4] {
        assemble_jdf(self.f.at_j4(seed_point(x))[0], self.j.at_j3(x))
    }
    fn at_j4(&self, _x: [J4; DIM]) -> [J4; 4] {
        unreachable!("derivative depth exceeded")
    }
}

/// The 1-form field J(df).
pub fn j_df(f: &ScalarField, j: &AlmostComplexStructure) -> OneFormField {
    OneFormField::new(
        f.chart.clone(),
        Arc::new(JdfEval {
            f: f.eval().clone(),
            j: j.endo.eval().clone(),
        }),
    )
}

/// The 2-form field dJdf = d(J(df)).
pub fn djd_field(f: &ScalarField, j: &AlmostComplexStructure) -> Result<TwoFormField> {
    match FormField::One(j_df(f, j)).d()? {
        FormField::Two(two) => Ok(two),
        _ => unreachable!(),
    }
}

/// dJdf evaluated at a point; zero iff f is pluriharmonic there.
pub fn djd(f: &ScalarField, j: &AlmostComplexStructure, p: [f64; DIM]) -> Result<FormValue> {
    djd_field(f, j)?.value(p)
}

/// ‖∂∂̄f‖² = ¼‖dJdf‖²_g, the energy density of the d-bar Hessian.
pub fn dbar_energy_density(
    g: &MetricField,
    j: &AlmostComplexStructure,
    f: &ScalarField,
    p: [f64; DIM],
) -> Result<f64> {
    let pm = g.point_metric(p)?;
    let v = djd(f, j, p)?;
    let n = forms::norm(&pm, &v);
    Ok(0.25 * n * n)
}

// ---------------------------------------------------------------------------
// Kähler form.
// ---------------------------------------------------------------------------

struct KahlerFormEval {
    g: Arc<dyn FieldEval<16>>,
    j: Arc<dyn FieldEval<16>>,
}

impl KahlerFormEval {
    fn compute<S: Scalar>(&self, gm: [S; 16], jm: [S; 16]) -> [S; 6] {
        // ω_ij = g(J ∂_i, ∂_j) = Σ_k J^k_i g_{kj}, stored antisymmetrized
        let g = matrix_from_flat(gm);
        let j = matrix_from_flat(jm);
        let mut full = [[S::zero(); DIM]; DIM];
        for i in 0..DIM {
            for l in 0..DIM {
                let mut acc = S::zero();
                for k in 0..DIM {
                    acc = acc + j[k][i] * g[k][l];
                }
                full[i][l] = acc;
            }
        }
        let mut out = [S::zero(); 6];
        for (slot, b) in BASIS2.iter().enumerate() {
            out[slot] = (full[b[0]][b[1]] - full[b[1]][b[0]]) * S::constant(0.5);
        }
        out
    }
}

impl_pointwise_eval!(KahlerFormEval => 6, [g, j]);

/// The fundamental 2-form ω = g(J·,·) as a field. Fails with
/// [`GeomError::NotCompatible`] when g and J are not compatible at chart
/// samples.
pub fn kahler_form(g: &MetricField, j: &AlmostComplexStructure) -> Result<TwoFormField> {
    for p in g.chart.sample_points(64) {
        let r = compatibility_residual(g, j, p)?;
        if r > ACS_TOLERANCE {
            return Err(GeomError::NotCompatible {
                residual: r,
                tolerance: ACS_TOLERANCE,
            });
        }
    }
    Ok(TwoFormField::new(
        g.chart.clone(),
        Arc::new(KahlerFormEval {
            g: g.components().eval().clone(),
            j: j.endo.eval().clone(),
        }),
    ))
}

/// Supremum of ‖dω‖_g over the given points.
pub fn closedness_sup(
    g: &MetricField,
    omega: &TwoFormField,
    points: &[[f64; DIM]],
) -> Result<f64> {
    let d_omega = FormField::Two(omega.clone()).d()?;
    let mut sup = 0.0f64;
    for &p in points {
        let pm = g.point_metric(p)?;
        let v = d_omega.value(p)?;
        sup = sup.max(forms::norm(&pm, &v));
    }
    Ok(sup)
}

/// A metric, a compatible complex structure, and their fundamental form.
#[derive(Clone)]
pub struct KahlerTriple {
    pub g: MetricField,
    pub j: AlmostComplexStructure,
    pub omega: TwoFormField,
    /// Sup of ‖dω‖ over construction samples; small iff the triple is Kähler.
    pub closedness_residual: f64,
}

impl KahlerTriple {
    pub fn new(g: MetricField, j: AlmostComplexStructure) -> Result<Self> {
        let omega = kahler_form(&g, &j)?;
        let samples = g.chart.sample_points(64);
        let closedness_residual = closedness_sup(&g, &omega, &samples)?;
        Ok(KahlerTriple {
            g,
            j,
            omega,
            closedness_residual,
        })
    }

    pub fn is_kahler(&self, tol: f64) -> bool {
        self.closedness_residual < tol
    }
}

// ---------------------------------------------------------------------------
// Integrability.
// ---------------------------------------------------------------------------

/// Nijenhuis tensor components N^k_{ij} on coordinate frames and its max-norm.
#[allow(clippy::type_complexity)]
pub fn nijenhuis(
    j: &AlmostComplexStructure,
    p: [f64; DIM],
) -> Result<([[[f64; DIM]; DIM]; DIM], f64)> {
    let (m, dm) = j.endo.matrix_with_derivatives(p)?;
    let mut n = [[[0.0; DIM]; DIM]; DIM];
    let mut max = 0.0f64;
    for k in 0..DIM {
        for i in 0..DIM {
            for jj in 0..DIM {
                let mut acc = 0.0;
                for l in 0..DIM {
                    acc += m[l][i] * dm[l][k][jj] - m[l][jj] * dm[l][k][i]
                        + m[k][l] * (dm[jj][l][i] - dm[i][l][jj]);
                }
                n[k][i][jj] = acc;
                max = max.max(acc.abs());
            }
        }
    }
    Ok((n, max))
}

/// Scale-aware integrability threshold: 1e-6 · (1 + ‖∂J‖).
pub fn integrability_tolerance(j: &AlmostComplexStructure, p: [f64; DIM]) -> Result<f64> {
    let (_, dm) = j.endo.matrix_with_derivatives(p)?;
    let sup = dm
        .iter()
        .flatten()
        .flatten()
        .map(|v| v.abs())
        .fold(0.0f64, f64::max);
    Ok(1e-6 * (1.0 + sup))
}

/// Complex-valued form value, used by the (0,1)-ideal closure test.
#[derive(Clone, Copy, Debug)]
struct CForm {
    re: FormValue,
    im: FormValue,
}

impl CForm {
    fn wedge(&self, rhs: &CForm) -> Result<CForm> {
        Ok(CForm {
            re: wedge(&self.re, &rhs.re)?.sub(&wedge(&self.im, &rhs.im)?),
            im: wedge(&self.re, &rhs.im)?.add(&wedge(&self.im, &rhs.re)?),
        })
    }

    fn norm_sq(&self) -> f64 {
        self.re
            .components()
            .iter()
            .zip(self.im.components())
            .map(|(a, b)| a * a + b * b)
            .sum()
    }
}

/// Residual of the paper-style integrability test: the (2,0) component of
/// d applied to a deterministic (0,1)-coframe basis.
///
/// The (0,1) covectors of J are exactly the spectral projections
/// P η = (η + i Jη)/2 of real covectors, so the basis elements are
/// μ_c = (dx^c + i J dx^c)/2 with dμ_c = (i/2) d(J dx^c). The reported
/// residual is the magnitude of dμ ∧ μ_a ∧ μ_b relative to the basis volume
/// μ̄_a ∧ μ̄_b ∧ μ_a ∧ μ_b, which isolates the Λ^{1,0}∧Λ^{1,0} part.
pub fn ideal_closure_residual(j: &AlmostComplexStructure, p: [f64; DIM]) -> Result<f64> {
    // candidate (0,1) basis elements at p
    let jm = j.matrix(p)?;
    let mut mu_values = Vec::with_capacity(DIM);
    for c in 0..DIM {
        let mut dxc = [0.0; DIM];
        dxc[c] = 1.0;
        let mut jdx = [0.0; DIM];
        for col in 0..DIM {
            jdx[col] = jm[c][col]; // (J dx^c)_col = Σ_k (dx^c)_k J^k_col
        }
        mu_values.push(CForm {
            re: FormValue::One(dxc.map(|v| 0.5 * v)),
            im: FormValue::One(jdx.map(|v| 0.5 * v)),
        });
    }
    // deterministic rank-2 selection by complex Gram-Schmidt in index order
    let dot = |a: &CForm, b: &CForm| -> (f64, f64) {
        // Hermitian <a, b> = Σ a conj(b) on components
        let (ar, ai) = (a.re.components(), a.im.components());
        let (br, bi) = (b.re.components(), b.im.components());
        let mut re = 0.0;
        let mut im = 0.0;
        for k in 0..DIM {
            re += ar[k] * br[k] + ai[k] * bi[k];
            im += ai[k] * br[k] - ar[k] * bi[k];
        }
        (re, im)
    };
    let mut picked: Vec<usize> = Vec::new();
    let mut basis: Vec<CForm> = Vec::new();
    for (c, mu) in mu_values.iter().enumerate() {
        if picked.len() == 2 {
            break;
        }
        let mut v = *mu;
        for b in &basis {
            let (cr, ci) = dot(&v, b);
            let nb = b.norm_sq();
            let (cr, ci) = (cr / nb, ci / nb);
            // v -= (cr + i ci) * b
            v = CForm {
                re: v
                    .re
                    .sub(&b.re.scale(cr))
                    .add(&b.im.scale(ci)),
                im: v
                    .im
                    .sub(&b.im.scale(cr))
                    .sub(&b.re.scale(ci)),
            };
        }
        if v.norm_sq() > 0.05 * mu.norm_sq().max(1e-30) {
            picked.push(c);
            basis.push(v);
        }
    }
    if picked.len() < 2 {
        return Err(GeomError::EigenbasisError(format!(
            "rank of the (0,1) projector below 2 at {p:?}"
        )));
    }
    let mu_a = mu_values[picked[0]];
    let mu_b = mu_values[picked[1]];
    // basis volume μ̄_a ∧ μ̄_b ∧ μ_a ∧ μ_b
    let conj = |f: &CForm| CForm {
        re: f.re,
        im: f.im.scale(-1.0),
    };
    let vol = conj(&mu_a)
        .wedge(&conj(&mu_b))?
        .wedge(&mu_a.wedge(&mu_b)?)?;
    let denom = vol.norm_sq().sqrt();
    if denom < 1e-12 {
        return Err(GeomError::EigenbasisError(format!(
            "degenerate (0,1) basis volume at {p:?}"
        )));
    }
    // dμ_c = (i/2) dJd(x^c)
    let mut worst = 0.0f64;
    for &c in &picked {
        let coord = ScalarField::coordinate(j.chart.clone(), c);
        let v = djd(&coord, j, p)?;
        let dmu = CForm {
            re: FormValue::Two([0.0; 6]),
            im: v.scale(0.5),
        };
        let num = dmu.wedge(&mu_a.wedge(&mu_b)?)?;
        worst = worst.max(num.norm_sq().sqrt() / denom);
    }
    Ok(worst)
}

// ---------------------------------------------------------------------------
// The star identity.
// ---------------------------------------------------------------------------

/// Residual of *dJdf + (Δf)ω + dJdf at a point (vanishes on Kähler triples).
pub fn verify_star_identity(
    g: &MetricField,
    j: &AlmostComplexStructure,
    f: &ScalarField,
    p: [f64; DIM],
) -> Result<f64> {
    let pm = g.point_metric(p)?;
    let beta = djd(f, j, p)?;
    let lap = laplacian(g, f, p)?;
    let omega = kahler_form_value(g, j, p)?;
    let lhs = forms::hodge_star(&pm, &beta)
        .add(&omega.scale(lap))
        .add(&beta);
    Ok(forms::norm(&pm, &lhs))
}

/// ω = g(J·,·) evaluated at one point without constructing the field.
pub fn kahler_form_value(
    g: &MetricField,
    j: &AlmostComplexStructure,
    p: [f64; DIM],
) -> Result<FormValue> {
    let gm = g.matrix(p)?;
    let jm = j.matrix(p)?;
    let mut out = [0.0; 6];
    for (slot, b) in BASIS2.iter().enumerate() {
        let mut w_ij = 0.0;
        let mut w_ji = 0.0;
        for k in 0..DIM {
            w_ij += jm[k][b[0]] * gm[k][b[1]];
            w_ji += jm[k][b[1]] * gm[k][b[0]];
        }
        out[slot] = 0.5 * (w_ij - w_ji);
    }
    Ok(FormValue::Two(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::scalar::lit;
    use crate::smooth_map;

    pub(crate) fn cartesian_chart() -> ChartRef {
        Chart::new(
            "flat-c2",
            [[-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0], [-2.0, 2.0]],
            [false; 4],
        )
        .unwrap()
        .into_ref()
    }

    pub(crate) fn flat_metric(chart: ChartRef) -> MetricField {
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

    pub(crate) fn standard_j(chart: ChartRef) -> AlmostComplexStructure {
        // J ∂0 = ∂1, J ∂1 = -∂0, J ∂2 = ∂3, J ∂3 = -∂2
        let endo = EndoField::from_map(
            chart.clone(),
            smooth_map!(16, |_x| {
                let mut m = [lit(0.0); 16];
                m[4] = lit(1.0); // J^1_0
                m[1] = lit(-1.0); // J^0_1
                m[14] = lit(1.0); // J^3_2
                m[11] = lit(-1.0); // J^2_3
                m
            }),
        );
        AlmostComplexStructure::new(chart, endo).unwrap()
    }

    #[test]
    fn standard_j_sends_dx0_to_minus_dx1() {
        let chart = cartesian_chart();
        let j = standard_j(chart);
        let eta = FormValue::One([1.0, 0.0, 0.0, 0.0]);
        let jeta = apply_j(&j, &eta, [0.0; 4]).unwrap();
        assert_eq!(jeta, FormValue::One([0.0, -1.0, 0.0, 0.0]));
        let jjeta = apply_j(&j, &jeta, [0.0; 4]).unwrap();
        assert_eq!(jjeta, eta.scale(-1.0));
    }

    #[test]
    fn applying_j_twice_negates_random_covectors() {
        let chart = cartesian_chart();
        let j = standard_j(chart.clone());
        for (k, p) in chart.sample_points(8).into_iter().enumerate() {
            let eta = FormValue::One([0.3 + k as f64, -1.2, 0.7, 0.4]);
            let jj = apply_j(&j, &apply_j(&j, &eta, p).unwrap(), p).unwrap();
            assert!(jj.add(&eta).max_abs() < 1e-14);
        }
    }

    #[test]
    fn flat_kahler_form_is_standard() {
        let chart = cartesian_chart();
        let g = flat_metric(chart.clone());
        let j = standard_j(chart.clone());
        let omega = kahler_form(&g, &j).unwrap();
        let v = omega.value([0.1, 0.2, 0.3, 0.4]).unwrap();
        assert_eq!(v, FormValue::Two([1.0, 0.0, 0.0, 0.0, 0.0, 1.0]));
        let samples = chart.sample_points(32);
        assert!(closedness_sup(&g, &omega, &samples).unwrap() < 1e-14);
    }

    #[test]
    fn djd_of_pluriharmonic_coordinate_vanishes() {
        let chart = cartesian_chart();
        let j = standard_j(chart.clone());
        let f = ScalarField::coordinate(chart.clone(), 0); // Re z1
        for p in chart.sample_points(16) {
            assert!(djd(&f, &j, p).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn djd_of_radius_squared_is_minus_four_omega() {
        let chart = cartesian_chart();
        let j = standard_j(chart.clone());
        let f = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]]),
        );
        for p in chart.sample_points(16) {
            let v = djd(&f, &j, p).unwrap();
            let expected = FormValue::Two([-4.0, 0.0, 0.0, 0.0, 0.0, -4.0]);
            assert!(v.sub(&expected).max_abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn star_identity_for_quadratic_and_random_polynomials() {
        let chart = cartesian_chart();
        let g = flat_metric(chart.clone());
        let j = standard_j(chart.clone());
        // f = |z|^2: *(-4ω) + 8ω + (-4ω) = 0
        let f = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]]),
        );
        for p in chart.sample_points(8) {
            let r = verify_star_identity(&g, &j, &f, p).unwrap();
            assert!(r < 1e-12, "residual {r}");
        }
        // an asymmetric polynomial
        let f2 = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [
                x[0] * x[0] * x[1] + x[2] * x[3] * x[3] - x[1] * x[2] * lit(3.0) + x[3]
            ]),
        );
        for p in chart.sample_points(8) {
            let r = verify_star_identity(&g, &j, &f2, p).unwrap();
            assert!(r < 1e-12, "residual {r}");
        }
    }

    #[test]
    fn lambda_plus_projection_of_djd_is_half_laplacian_omega() {
        let chart = cartesian_chart();
        let g = flat_metric(chart.clone());
        let j = standard_j(chart.clone());
        let f = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [x[0] * x[0] * x[2] - x[1] * x[3] + x[2] * x[2]]),
        );
        for p in chart.sample_points(8) {
            let pm = g.point_metric(p).unwrap();
            let beta = djd(&f, &j, p).unwrap();
            let proj = forms::lambda_projection(&pm, &beta, true);
            let lap = laplacian(&g, &f, p).unwrap();
            let expected = kahler_form_value(&g, &j, p).unwrap().scale(-0.5 * lap);
            assert!(proj.sub(&expected).max_abs() < 1e-12);
        }
    }

    #[test]
    fn constant_j_is_integrable_by_both_tests() {
        let chart = cartesian_chart();
        let j = standard_j(chart.clone());
        for p in chart.sample_points(8) {
            let (_, n) = nijenhuis(&j, p).unwrap();
            assert!(n < 1e-14);
            let r = ideal_closure_residual(&j, p).unwrap();
            assert!(r < 1e-14);
        }
    }

    #[test]
    fn djd_is_linear_and_kills_constants() {
        let chart = cartesian_chart();
        let j = standard_j(chart.clone());
        let c = ScalarField::constant(chart.clone(), 7.0);
        let f = ScalarField::from_map(chart.clone(), smooth_map!(1, |x| [x[0] * x[1] * x[2]]));
        let g2 = ScalarField::from_map(chart.clone(), smooth_map!(1, |x| [x[3] * x[3] * x[0]]));
        // 2 f + 3 g as a single field
        let combo = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [
                (x[0] * x[1] * x[2]) * lit(2.0) + (x[3] * x[3] * x[0]) * lit(3.0)
            ]),
        );
        let p = [0.4, -0.2, 0.9, 0.3];
        assert!(djd(&c, &j, p).unwrap().max_abs() == 0.0);
        let lhs = djd(&combo, &j, p).unwrap();
        let rhs = djd(&f, &j, p)
            .unwrap()
            .scale(2.0)
            .add(&djd(&g2, &j, p).unwrap().scale(3.0));
        assert!(lhs.sub(&rhs).max_abs() < 1e-12);
    }
}
