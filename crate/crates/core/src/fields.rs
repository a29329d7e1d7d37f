//! Evaluable tensor fields on a chart.
//!
//! A field is a closed-form map from chart coordinates to components,
//! evaluable at `f64` and at nested jets. Implement [`SmoothMap`] once
//! (generic over [`Scalar`]) and the blanket impl provides every
//! differentiation level; [`FieldEval`] is the object-safe surface the field
//! structs store. Exterior derivatives are fields themselves: evaluating a
//! derived field at level `k` evaluates its base at level `k + 1`, so second
//! derivatives of a metric or a defining function cost one nested jet and no
//! finite differencing.

use std::sync::Arc;

use crate::chart::ChartRef;
use crate::error::{GeomError, Result};
use crate::forms::{basis_index, FormValue, PointMetric, BASIS2, BASIS3};
use crate::scalar::{seed_point, Jet, Scalar, DIM, J1, J2, J3, J4};

/// Object-safe evaluation at every supported differentiation level.
pub trait FieldEval<const N: usize>: Send + Sync {
    fn at(&self, x: [f64; DIM]) -> [f64; N];
    fn at_j1(&self, x: [J1; DIM]) -> [J1; N];
    fn at_j2(&self, x: [J2; DIM]) -> [J2; N];
    fn at_j3(&self, x: [J3; DIM]) -> [J3; N];
    fn at_j4(&self, x: [J4; DIM]) -> [J4; N];
}

/// A component map generic over the scalar type. This is what concrete
/// fields implement; see also the [`smooth_map!`](crate::smooth_map) macro.
pub trait SmoothMap<const N: usize>: Send + Sync + 'static {
    fn call<S: Scalar>(&self, x: [S; DIM]) -> [S; N];
}

impl<const N: usize, F: SmoothMap<N>> FieldEval<N> for F {
    fn at(&self, x: [f64; DIM]) -> [f64; N] {
        self.call(x)
    }
    fn at_j1(&self, x: [J1; DIM]) -> [J1; N] {
        self.call(x)
    }
    fn at_j2(&self, x: [J2; DIM]) -> [J2; N] {
        self.call(x)
    }
    fn at_j3(&self, x: [J3; DIM]) -> [J3; N] {
        self.call(x)
    }
    fn at_j4(&self, x: [J4; DIM]) -> [J4; N] {
        self.call(x)
    }
}

/// Defines an anonymous [`SmoothMap`] with explicit `f64` captures.
///
/// Inside the body the coordinates are generic scalars; lift constants and
/// captures with [`lit`](crate::scalar::lit).
///
/// ```
/// use kv_core::scalar::lit;
/// use kv_core::smooth_map;
/// let a = 3.0;
/// let map = smooth_map!(1, [a], |x| [lit(a) * x[0] * x[0] + x[1]]);
/// ```
#[macro_export]
macro_rules! smooth_map {
    ($n:literal, [$($cap:ident),* $(,)?], |$x:ident| $body:expr) => {{
        #[derive(Clone)]
        #[allow(non_camel_case_types)]
        struct __SmoothMap {
            $($cap: f64,)*
        }
        impl $crate::fields::SmoothMap<$n> for __SmoothMap {
            #[inline]
            fn call<__S: $crate::scalar::Scalar>(&self, $x: [__S; 4]) -> [__S; $n] {
                $(let $cap: f64 = self.$cap;)*
                $body
            }
        }
        __SmoothMap { $($cap,)* }
    }};
    ($n:literal, |$x:ident| $body:expr) => {
        $crate::smooth_map!($n, [], |$x| $body)
    };
}

/// Implements [`FieldEval`] for a combinator struct whose output at each
/// level is a pure function of its parts evaluated at the same level. The
/// struct must expose `fn compute<S: Scalar>(&self, ...) -> [S; N]` taking
/// the listed fields' component arrays in order.
macro_rules! impl_pointwise_eval {
    ($ty:ty => $n:literal, [$($f:ident),+]) => {
        impl $crate::fields::FieldEval<$n> for $ty {
            fn at(&self, x: [f64; 4]) -> [f64; $n] {
                self.compute($(self.$f.at(x)),+)
            }
            fn at_j1(&self, x: [$crate::scalar::J1; 4]) -> [$crate::scalar::J1; $n] {
                self.compute($(self.$f.at_j1(x)),+)
            }
            fn at_j2(&self, x: [$crate::scalar::J2; 4]) -> [$crate::scalar::J2; $n] {
                self.compute($(self.$f.at_j2(x)),+)
            }
            fn at_j3(&self, x: [$crate::scalar::J3; 4]) -> [$crate::scalar::J3; $n] {
                self.compute($(self.$f.at_j3(x)),+)
            }
            fn at_j4(&self, x: [$crate::scalar::J4; 4]) -> [$crate::scalar::J4; $n] {
                self.compute($(self.$f.at_j4(x)),+)
            }
        }
    };
}
pub(crate) use impl_pointwise_eval;

macro_rules! define_field {
    ($(#[$meta:meta])* $name:ident, $n:literal) => {
        $(#[$meta])*
        #[derive(Clone)]
        pub struct $name {
            pub chart: ChartRef,
            eval: Arc<dyn FieldEval<$n>>,
        }

        impl $name {
            pub fn new(chart: ChartRef, eval: Arc<dyn FieldEval<$n>>) -> Self {
                Self { chart, eval }
            }

            pub fn from_map<M: SmoothMap<$n>>(chart: ChartRef, map: M) -> Self {
                Self::new(chart, Arc::new(map))
            }

            pub fn eval(&self) -> &Arc<dyn FieldEval<$n>> {
                &self.eval
            }

            /// Raw component evaluation without admissibility checks.
            pub fn components_unchecked(&self, p: [f64; DIM]) -> [f64; $n] {
                self.eval.at(p)
            }
        }
    };
}

define_field!(
    /// Scalar-valued field.
    ScalarField,
    1
);
define_field!(
    /// 1-form field; components on (dx0, dx1, dx2, dx3).
    OneFormField,
    4
);
define_field!(
    /// 2-form field; components on the sorted basis (01, 02, 03, 12, 13, 23).
    TwoFormField,
    6
);
define_field!(
    /// 3-form field; components on (012, 013, 023, 123).
    ThreeFormField,
    4
);
define_field!(
    /// 4-form field; single component on dx0∧dx1∧dx2∧dx3.
    VolumeFormField,
    1
);
define_field!(
    /// Endomorphism field: entry (r, c) at index 4r + c maps ∂_c to its
    /// component along ∂_r.
    EndoField,
    16
);
define_field!(
    /// Matrix-valued field with the same 4x4 layout as [`EndoField`].
    MatrixField,
    16
);

pub fn matrix_from_flat<S: Scalar>(flat: [S; 16]) -> [[S; DIM]; DIM] {
    let mut m = [[S::zero(); DIM]; DIM];
    for r in 0..DIM {
        for c in 0..DIM {
            m[r][c] = flat[4 * r + c];
        }
    }
    m
}

pub fn matrix_to_flat<S: Scalar>(m: [[S; DIM]; DIM]) -> [S; 16] {
    let mut flat = [S::zero(); 16];
    for r in 0..DIM {
        for c in 0..DIM {
            flat[4 * r + c] = m[r][c];
        }
    }
    flat
}

struct CoordinateMap {
    axis: usize,
}

impl SmoothMap<1> for CoordinateMap {
    fn call<S: Scalar>(&self, x: [S; DIM]) -> [S; 1] {
        [x[self.axis]]
    }
}

struct ConstantMap {
    value: f64,
}

impl SmoothMap<1> for ConstantMap {
    fn call<S: Scalar>(&self, _x: [S; DIM]) -> [S; 1] {
        [S::constant(self.value)]
    }
}

impl ScalarField {
    pub fn constant(chart: ChartRef, value: f64) -> Self {
        Self::from_map(chart, ConstantMap { value })
    }

    pub fn coordinate(chart: ChartRef, axis: usize) -> Self {
        assert!(axis < DIM);
        Self::from_map(chart, CoordinateMap { axis })
    }

    pub fn value(&self, p: [f64; DIM]) -> Result<f64> {
        self.chart.check_admissible(p)?;
        Ok(self.eval.at(p)[0])
    }

    /// Exact gradient components (the 1-form df at `p`).
    pub fn gradient(&self, p: [f64; DIM]) -> Result<[f64; DIM]> {
        self.chart.check_admissible(p)?;
        Ok(self.eval.at_j1(seed_point(p))[0].d)
    }

    /// Exact coordinate Hessian ∂_i ∂_j f.
    pub fn hessian(&self, p: [f64; DIM]) -> Result<[[f64; DIM]; DIM]> {
        self.chart.check_admissible(p)?;
        let jet = self.eval.at_j2(seed_point(seed_point(p)))[0];
        let mut h = [[0.0; DIM]; DIM];
        for i in 0..DIM {
            for j in 0..DIM {
                h[i][j] = jet.d[i].d[j];
            }
        }
        Ok(h)
    }

    /// Central finite-difference gradient: the cross-check mode for the exact
    /// jet derivatives, never the default path.
    pub fn gradient_fd(&self, p: [f64; DIM], relative_step: f64) -> Result<[f64; DIM]> {
        self.chart.check_admissible(p)?;
        let mut out = [0.0; DIM];
        for axis in 0..DIM {
            let h = relative_step * self.chart.scale(axis);
            let mut hi = p;
            let mut lo = p;
            hi[axis] += h;
            lo[axis] -= h;
            out[axis] = (self.eval.at(hi)[0] - self.eval.at(lo)[0]) / (2.0 * h);
        }
        Ok(out)
    }
}

impl OneFormField {
    pub fn value(&self, p: [f64; DIM]) -> Result<FormValue> {
        self.chart.check_admissible(p)?;
        Ok(FormValue::One(self.eval.at(p)))
    }
}

impl TwoFormField {
    pub fn value(&self, p: [f64; DIM]) -> Result<FormValue> {
        self.chart.check_admissible(p)?;
        Ok(FormValue::Two(self.eval.at(p)))
    }
}

impl ThreeFormField {
    pub fn value(&self, p: [f64; DIM]) -> Result<FormValue> {
        self.chart.check_admissible(p)?;
        Ok(FormValue::Three(self.eval.at(p)))
    }
}

impl VolumeFormField {
    pub fn value(&self, p: [f64; DIM]) -> Result<FormValue> {
        self.chart.check_admissible(p)?;
        Ok(FormValue::Four(self.eval.at(p)[0]))
    }
}

impl EndoField {
    pub fn matrix(&self, p: [f64; DIM]) -> Result<[[f64; DIM]; DIM]> {
        self.chart.check_admissible(p)?;
        Ok(matrix_from_flat(self.eval.at(p)))
    }

    /// Matrix and its coordinate derivatives: `d[k][r][c] = ∂_k J^r_c`.
    #[allow(clippy::type_complexity)]
    pub fn matrix_with_derivatives(
        &self,
        p: [f64; DIM],
    ) -> Result<([[f64; DIM]; DIM], [[[f64; DIM]; DIM]; DIM])> {
        self.chart.check_admissible(p)?;
        let jets = self.eval.at_j1(seed_point(p));
        let mut m = [[0.0; DIM]; DIM];
        let mut d = [[[0.0; DIM]; DIM]; DIM];
        for r in 0..DIM {
            for c in 0..DIM {
                let jet = jets[4 * r + c];
                m[r][c] = jet.v;
                for k in 0..DIM {
                    d[k][r][c] = jet.d[k];
                }
            }
        }
        Ok((m, d))
    }
}

/// Metric-valued field with a fixed orientation inherited from its chart.
#[derive(Clone)]
pub struct MetricField {
    pub chart: ChartRef,
    components: MatrixField,
}

impl MetricField {
    pub fn new(chart: ChartRef, components: MatrixField) -> Self {
        MetricField { chart, components }
    }

    pub fn from_map<M: SmoothMap<16>>(chart: ChartRef, map: M) -> Self {
        let components = MatrixField::from_map(chart.clone(), map);
        MetricField { chart, components }
    }

    pub fn components(&self) -> &MatrixField {
        &self.components
    }

    pub fn orientation(&self) -> f64 {
        self.chart.orientation
    }

    pub fn matrix(&self, p: [f64; DIM]) -> Result<[[f64; DIM]; DIM]> {
        self.chart.check_admissible(p)?;
        Ok(matrix_from_flat(self.components.eval().at(p)))
    }

    /// Assemble inverse, determinant and volume coefficient at a point,
    /// checking positive definiteness.
    pub fn point_metric(&self, p: [f64; DIM]) -> Result<PointMetric> {
        let g = self.matrix(p)?;
        PointMetric::new(g, self.chart.orientation, p)
    }

    /// Metric, first and second coordinate derivatives in one jet pass:
    /// `(g, dg[k] = ∂_k g, ddg[k][l] = ∂_k ∂_l g)`.
    #[allow(clippy::type_complexity)]
    pub fn second_jets(
        &self,
        p: [f64; DIM],
    ) -> Result<(
        [[f64; DIM]; DIM],
        [[[f64; DIM]; DIM]; DIM],
        [[[[f64; DIM]; DIM]; DIM]; DIM],
    )> {
        self.chart.check_admissible(p)?;
        let jets = self.components.eval().at_j2(seed_point(seed_point(p)));
        let mut g = [[0.0; DIM]; DIM];
        let mut dg = [[[0.0; DIM]; DIM]; DIM];
        let mut ddg = [[[[0.0; DIM]; DIM]; DIM]; DIM];
        for r in 0..DIM {
            for c in 0..DIM {
                let jet = jets[4 * r + c];
                g[r][c] = jet.v.v;
                for k in 0..DIM {
                    dg[k][r][c] = jet.d[k].v;
                    for l in 0..DIM {
                        ddg[k][l][r][c] = jet.d[k].d[l];
                    }
                }
            }
        }
        Ok((g, dg, ddg))
    }
}

/// Degree-indexed form field, the argument type of the exterior derivative.
#[derive(Clone)]
pub enum FormField {
    Scalar(ScalarField),
    One(OneFormField),
    Two(TwoFormField),
    Three(ThreeFormField),
    Four(VolumeFormField),
}

impl FormField {
    pub fn degree(&self) -> usize {
        match self {
            FormField::Scalar(_) => 0,
            FormField::One(_) => 1,
            FormField::Two(_) => 2,
            FormField::Three(_) => 3,
            FormField::Four(_) => 4,
        }
    }

    pub fn chart(&self) -> &ChartRef {
        match self {
            FormField::Scalar(f) => &f.chart,
            FormField::One(f) => &f.chart,
            FormField::Two(f) => &f.chart,
            FormField::Three(f) => &f.chart,
            FormField::Four(f) => &f.chart,
        }
    }

    pub fn value(&self, p: [f64; DIM]) -> Result<FormValue> {
        match self {
            FormField::Scalar(f) => Ok(FormValue::Zero(f.value(p)?)),
            FormField::One(f) => f.value(p),
            FormField::Two(f) => f.value(p),
            FormField::Three(f) => f.value(p),
            FormField::Four(f) => f.value(p),
        }
    }

    /// Exterior derivative as a field; degree-4 input is a degree error.
    pub fn d(&self) -> Result<FormField> {
        Ok(match self {
            FormField::Scalar(f) => FormField::One(OneFormField::new(
                f.chart.clone(),
                Arc::new(DScalar {
                    base: f.eval().clone(),
                }),
            )),
            FormField::One(f) => FormField::Two(TwoFormField::new(
                f.chart.clone(),
                Arc::new(DOneForm {
                    base: f.eval().clone(),
                }),
            )),
            FormField::Two(f) => FormField::Three(ThreeFormField::new(
                f.chart.clone(),
                Arc::new(DTwoForm {
                    base: f.eval().clone(),
                }),
            )),
            FormField::Three(f) => FormField::Four(VolumeFormField::new(
                f.chart.clone(),
                Arc::new(DThreeForm {
                    base: f.eval().clone(),
                }),
            )),
            FormField::Four(_) => {
                return Err(GeomError::DegreeError(
                    "exterior derivative of a 4-form".into(),
                ))
            }
        })
    }
}

/// Exterior derivative evaluated at a point.
pub fn exterior_derivative(field: &FormField, p: [f64; DIM]) -> Result<FormValue> {
    field.d()?.value(p)
}

// ---------------------------------------------------------------------------
// Derived evaluators: d of each form degree.
// ---------------------------------------------------------------------------

struct DScalar {
    base: Arc<dyn FieldEval<1>>,
}
struct DOneForm {
    base: Arc<dyn FieldEval<4>>,
}
struct DTwoForm {
    base: Arc<dyn FieldEval<6>>,
}
struct DThreeForm {
    base: Arc<dyn FieldEval<4>>,
}

fn assemble_d_scalar<S: Scalar>(jets: [Jet<S>; 1]) -> [S; 4] {
    jets[0].d
}

fn assemble_d_one<S: Scalar>(jets: [Jet<S>; 4]) -> [S; 6] {
    let mut out = [S::zero(); 6];
    for (slot, b) in BASIS2.iter().enumerate() {
        let (i, j) = (b[0], b[1]);
        out[slot] = jets[j].d[i] - jets[i].d[j];
    }
    out
}

fn assemble_d_two<S: Scalar>(jets: [Jet<S>; 6]) -> [S; 4] {
    // (dβ)_{ijk} = ∂_i β_{jk} - ∂_j β_{ik} + ∂_k β_{ij}, i<j<k
    let comp = |i: usize, j: usize| -> (usize, f64) { basis_index(&[i, j]).expect("distinct") };
    let mut out = [S::zero(); 4];
    for (slot, b) in BASIS3.iter().enumerate() {
        let (i, j, k) = (b[0], b[1], b[2]);
        let (jk, s1) = comp(j, k);
        let (ik, s2) = comp(i, k);
        let (ij, s3) = comp(i, j);
        out[slot] = jets[jk].d[i] * S::constant(s1) - jets[ik].d[j] * S::constant(s2)
            + jets[ij].d[k] * S::constant(s3);
    }
    out
}

fn assemble_d_three<S: Scalar>(jets: [Jet<S>; 4]) -> [S; 1] {
    // dγ = Σ_l ∂_l γ_T dx^l ∧ dx^T, collected on dx^{0123}
    let mut acc = S::zero();
    for (slot, t) in BASIS3.iter().enumerate() {
        for l in 0..DIM {
            if let Some((_, sign)) = basis_index(&[l, t[0], t[1], t[2]]) {
                acc = acc + S::constant(sign) * jets[slot].d[l];
            }
        }
    }
    [acc]
}

macro_rules! impl_derived {
    ($ty:ident, $m:literal, $assemble:ident) => {
        impl FieldEval<$m> for $ty {
            fn at(&self, x: [f64; DIM]) -> [f64; $m] {
                $assemble(self.base.at_j1(seed_point(x)))
            }
            fn at_j1(&self, x: [J1; DIM]) -> [J1; $m] {
                $assemble(self.base.at_j2(seed_point(x)))
            }
            fn at_j2(&self, x: [J2; DIM]) -> [J2; $m] {
                $assemble(self.base.at_j3(seed_point(x)))
            }
            fn at_j3(&self, x: [J3; DIM]) -> [J3; $m] {
                $assemble(self.base.at_j4(seed_point(x)))
            }
            fn at_j4(&self, _x: [J4; DIM]) -> [J4; $m] {
                // A fifth differentiation level would need d applied five
                // times to a scalar; the degree check rejects that first.
                unreachable!("derivative depth exceeded")
            }
        }
    };
}

impl_derived!(DScalar, 4, assemble_d_scalar);
impl_derived!(DOneForm, 6, assemble_d_one);
impl_derived!(DTwoForm, 4, assemble_d_two);
impl_derived!(DThreeForm, 1, assemble_d_three);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Chart;
    use crate::forms::wedge;
    use crate::scalar::lit;

    fn box_chart() -> ChartRef {
        Chart::new(
            "box",
            [[-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0], [-1.0, 1.0]],
            [false; 4],
        )
        .unwrap()
        .into_ref()
    }

    #[test]
    fn d_of_constant_is_zero() {
        let chart = box_chart();
        let f = FormField::Scalar(ScalarField::constant(chart.clone(), 4.2));
        for p in chart.sample_points(16) {
            let df = exterior_derivative(&f, p).unwrap();
            assert_eq!(df.max_abs(), 0.0);
        }
    }

    #[test]
    fn d_product_rule_on_coordinates() {
        // d(x0 dx1) = dx0 ∧ dx1
        let chart = box_chart();
        let eta = OneFormField::from_map(
            chart.clone(),
            smooth_map!(4, |x| [lit(0.0), x[0], lit(0.0), lit(0.0)]),
        );
        let d = exterior_derivative(&FormField::One(eta), [0.3, -0.4, 0.9, 0.1]).unwrap();
        let mut expected = [0.0; 6];
        expected[0] = 1.0;
        assert_eq!(d, FormValue::Two(expected));
    }

    #[test]
    fn d_squared_vanishes_on_scalars_and_one_forms() {
        let chart = box_chart();
        let f = FormField::Scalar(ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [x[0] * x[1] * (x[2] * lit(3.0)).sin()
                + (x[3] * x[3] + lit(1.0)).ln()]),
        ));
        let eta = FormField::One(OneFormField::from_map(
            chart.clone(),
            smooth_map!(4, |x| [
                x[1] * x[2],
                (x[0] + x[3]).sin(),
                x[0] * x[0] * x[1],
                (x[1] * x[1] + lit(1.0)).sqrt(),
            ]),
        ));
        for p in chart.sample_points(32) {
            let ddf = exterior_derivative(&f.d().unwrap(), p).unwrap();
            assert!(ddf.max_abs() < 1e-12, "dd f = {ddf:?}");
            let ddeta = exterior_derivative(&eta.d().unwrap(), p).unwrap();
            assert!(ddeta.max_abs() < 1e-12, "dd eta = {ddeta:?}");
        }
    }

    #[test]
    fn full_derham_chain_terminates_with_degree_error() {
        let chart = box_chart();
        let f = FormField::Scalar(ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [x[0] * x[1] * x[2] * x[3]]),
        ));
        let d4 = f.d().unwrap().d().unwrap().d().unwrap().d().unwrap();
        assert_eq!(d4.degree(), 4);
        // evaluating the end of the chain exercises the deepest jet level
        let v = d4.value([0.2, 0.3, 0.4, 0.5]).unwrap();
        assert!(v.max_abs() < 1e-12);
        assert!(matches!(d4.d(), Err(GeomError::DegreeError(_))));
    }

    #[test]
    fn leibniz_rule_for_f_dg() {
        // d(f dg) = df ∧ dg with f = x0 x2, g = x1 + x3^2
        let chart = box_chart();
        let p = [0.4, 0.2, -0.3, 0.6];
        let f = ScalarField::from_map(chart.clone(), smooth_map!(1, |x| [x[0] * x[2]]));
        let g = ScalarField::from_map(chart.clone(), smooth_map!(1, |x| [x[1] + x[3] * x[3]]));
        let df = FormValue::One(f.gradient(p).unwrap());
        let dg = FormValue::One(g.gradient(p).unwrap());
        // f dg written as a closed-form 1-form field
        let fdg = OneFormField::from_map(
            chart.clone(),
            smooth_map!(4, |x| {
                let fv = x[0] * x[2];
                [lit(0.0), fv, lit(0.0), fv * lit(2.0) * x[3]]
            }),
        );
        let d_fdg = exterior_derivative(&FormField::One(fdg), p).unwrap();
        let expected = wedge(&df, &dg).unwrap();
        for (a, b) in d_fdg.components().iter().zip(expected.components()) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
    }

    #[test]
    fn jet_and_fd_gradients_agree_to_second_order() {
        let chart = box_chart();
        let f = ScalarField::from_map(
            chart.clone(),
            smooth_map!(1, |x| [(x[0] * x[1]).sin() + (x[2] + lit(2.0)).ln() * x[3]]),
        );
        for p in chart.sample_points(16) {
            let exact = f.gradient(p).unwrap();
            let fd = f.gradient_fd(p, 1e-5).unwrap();
            for i in 0..4 {
                assert!(
                    (exact[i] - fd[i]).abs() < 1e-9 * (1.0 + exact[i].abs()),
                    "axis {i}: {} vs {}",
                    exact[i],
                    fd[i]
                );
            }
        }
    }
}
