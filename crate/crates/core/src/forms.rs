//! Pointwise exterior algebra: wedge products, Hodge star, metric pairings.
//!
//! Antisymmetric k-form values are stored on the sorted coordinate basis:
//! 2-forms on (01, 02, 03, 12, 13, 23), 3-forms on (012, 013, 023, 123).
//! Only the independent components are kept, so antisymmetry holds by
//! construction.

use crate::error::{GeomError, Result};
use crate::linalg::{cholesky_pivot_floor, mat_inv, det as mat_det, Mat4};
use crate::scalar::{Scalar, DIM};

pub const BASIS1: [[usize; 1]; 4] = [[0], [1], [2], [3]];
pub const BASIS2: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
pub const BASIS3: [[usize; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

/// Sign of the permutation sorting `indices`, or `None` when two coincide.
fn sort_sign(indices: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 0..indices.len() {
        for j in (i + 1..indices.len()).rev() {
            if indices[j - 1] == indices[j] {
                return None;
            }
            if indices[j - 1] > indices[j] {
                indices.swap(j - 1, j);
                sign = -sign;
            }
        }
    }
    Some(sign)
}

fn basis_position(sorted: &[usize]) -> usize {
    match sorted.len() {
        0 | 4 => 0,
        1 => sorted[0],
        2 => BASIS2.iter().position(|b| b == sorted).expect("2-form basis"),
        3 => BASIS3.iter().position(|b| b == sorted).expect("3-form basis"),
        _ => unreachable!(),
    }
}

/// Basis slot and sign for an arbitrary (possibly unsorted) index tuple.
/// `None` when an index repeats.
pub fn basis_index(indices: &[usize]) -> Option<(usize, f64)> {
    let mut buf = [0usize; 4];
    let k = indices.len();
    buf[..k].copy_from_slice(indices);
    let sign = sort_sign(&mut buf[..k])?;
    Some((basis_position(&buf[..k]), sign))
}

/// Totally antisymmetric symbol on four indices.
pub fn levi_civita(indices: [usize; 4]) -> f64 {
    let mut buf = indices;
    match sort_sign(&mut buf) {
        Some(sign) => sign,
        None => 0.0,
    }
}

/// A differential-form value at a point, graded by degree.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FormValue<S = f64> {
    Zero(S),
    One([S; 4]),
    Two([S; 6]),
    Three([S; 4]),
    Four(S),
}

impl<S: Scalar> FormValue<S> {
    pub fn degree(&self) -> usize {
        match self {
            FormValue::Zero(_) => 0,
            FormValue::One(_) => 1,
            FormValue::Two(_) => 2,
            FormValue::Three(_) => 3,
            FormValue::Four(_) => 4,
        }
    }

    pub fn zero_of_degree(degree: usize) -> Result<Self> {
        Ok(match degree {
            0 => FormValue::Zero(S::zero()),
            1 => FormValue::One([S::zero(); 4]),
            2 => FormValue::Two([S::zero(); 6]),
            3 => FormValue::Three([S::zero(); 4]),
            4 => FormValue::Four(S::zero()),
            d => return Err(GeomError::DegreeError(format!("degree {d} > 4"))),
        })
    }

    pub fn components(&self) -> &[S] {
        match self {
            FormValue::Zero(c) | FormValue::Four(c) => std::slice::from_ref(c),
            FormValue::One(c) | FormValue::Three(c) => c,
            FormValue::Two(c) => c,
        }
    }

    pub fn components_mut(&mut self) -> &mut [S] {
        match self {
            FormValue::Zero(c) | FormValue::Four(c) => std::slice::from_mut(c),
            FormValue::One(c) | FormValue::Three(c) => c,
            FormValue::Two(c) => c,
        }
    }

    /// Component for an arbitrary index tuple, antisymmetrized sign included.
    pub fn component(&self, indices: &[usize]) -> S {
        debug_assert_eq!(indices.len(), self.degree());
        match basis_index(indices) {
            Some((pos, sign)) => S::constant(sign) * self.components()[pos],
            None => S::zero(),
        }
    }

    pub fn scale(&self, factor: S) -> Self {
        let mut out = *self;
        for c in out.components_mut() {
            *c = *c * factor;
        }
        out
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.degree(), rhs.degree(), "form degree mismatch");
        let mut out = *self;
        for (c, r) in out.components_mut().iter_mut().zip(rhs.components()) {
            *c = *c + *r;
        }
        out
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.scale(S::constant(-1.0)))
    }

    /// Max absolute component value (coordinate components, not metric norm).
    pub fn max_abs(&self) -> f64 {
        self.components()
            .iter()
            .map(|c| c.re().abs())
            .fold(0.0, f64::max)
    }
}

/// Graded-antisymmetric wedge product.
pub fn wedge<S: Scalar>(a: &FormValue<S>, b: &FormValue<S>) -> Result<FormValue<S>> {
    let (ja, jb) = (a.degree(), b.degree());
    if ja + jb > 4 {
        return Err(GeomError::DegreeError(format!(
            "wedge of degrees {ja} + {jb} exceeds 4"
        )));
    }
    let mut out = FormValue::<S>::zero_of_degree(ja + jb)?;
    let basis_of = |deg: usize| -> Vec<&'static [usize]> {
        match deg {
            0 => vec![&[]],
            1 => BASIS1.iter().map(|b| b.as_slice()).collect(),
            2 => BASIS2.iter().map(|b| b.as_slice()).collect(),
            3 => BASIS3.iter().map(|b| b.as_slice()).collect(),
            4 => vec![&[0, 1, 2, 3]],
            _ => unreachable!(),
        }
    };
    for (ia, ta) in basis_of(ja).into_iter().enumerate() {
        let ca = a.components()[ia];
        for (ib, tb) in basis_of(jb).into_iter().enumerate() {
            let cb = b.components()[ib];
            let mut merged = [0usize; 4];
            merged[..ja].copy_from_slice(ta);
            merged[ja..ja + jb].copy_from_slice(tb);
            if let Some((pos, sign)) = basis_index(&merged[..ja + jb]) {
                let slot = &mut out.components_mut()[pos];
                *slot = *slot + S::constant(sign) * ca * cb;
            }
        }
    }
    Ok(out)
}

/// Metric data assembled once per evaluation point.
#[derive(Clone, Debug)]
pub struct PointMetric {
    pub g: Mat4<f64>,
    pub inv: Mat4<f64>,
    pub det: f64,
    /// Coefficient of dx0∧dx1∧dx2∧dx3 in the Riemannian volume form
    /// (orientation times sqrt det g).
    pub vol_coeff: f64,
}

/// Smallest admissible Cholesky pivot before a metric is declared degenerate.
pub const METRIC_PD_FLOOR: f64 = 1e-12;

impl PointMetric {
    pub fn new(g: Mat4<f64>, orientation: f64, point: [f64; 4]) -> Result<PointMetric> {
        match cholesky_pivot_floor(&g, METRIC_PD_FLOOR) {
            Some(_) => {}
            None => {
                return Err(GeomError::MetricDegenerate {
                    point,
                    eigenvalue: 0.0,
                    threshold: METRIC_PD_FLOOR,
                })
            }
        }
        let inv = mat_inv(&g).ok_or(GeomError::MetricDegenerate {
            point,
            eigenvalue: 0.0,
            threshold: METRIC_PD_FLOOR,
        })?;
        let det = mat_det(&g);
        Ok(PointMetric {
            g,
            inv,
            det,
            vol_coeff: orientation * det.sqrt(),
        })
    }

    /// Raise the index of a 1-form.
    pub fn sharp(&self, alpha: &[f64; 4]) -> [f64; 4] {
        crate::linalg::mat_vec(&self.inv, alpha)
    }

    /// Covector inner product g^{ij} a_i b_j.
    pub fn covector_dot(&self, a: &[f64; 4], b: &[f64; 4]) -> f64 {
        let mut acc = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                acc += self.inv[i][j] * a[i] * b[j];
            }
        }
        acc
    }

    pub fn covector_norm(&self, a: &[f64; 4]) -> f64 {
        self.covector_dot(a, a).max(0.0).sqrt()
    }
}

/// All components of the form with indices raised by the metric, same basis.
fn raise(pm: &PointMetric, f: &FormValue) -> FormValue {
    match f {
        FormValue::Zero(c) => FormValue::Zero(*c),
        FormValue::One(a) => FormValue::One(pm.sharp(a)),
        FormValue::Two(_) => {
            let mut out = [0.0; 6];
            for (slot, b) in BASIS2.iter().enumerate() {
                let mut acc = 0.0;
                for m in 0..DIM {
                    for n in 0..DIM {
                        acc += pm.inv[b[0]][m] * pm.inv[b[1]][n] * f.component(&[m, n]);
                    }
                }
                out[slot] = acc;
            }
            FormValue::Two(out)
        }
        FormValue::Three(_) => {
            let mut out = [0.0; 4];
            for (slot, b) in BASIS3.iter().enumerate() {
                let mut acc = 0.0;
                for m in 0..DIM {
                    for n in 0..DIM {
                        for p in 0..DIM {
                            acc += pm.inv[b[0]][m]
                                * pm.inv[b[1]][n]
                                * pm.inv[b[2]][p]
                                * f.component(&[m, n, p]);
                        }
                    }
                }
                out[slot] = acc;
            }
            FormValue::Three(out)
        }
        FormValue::Four(c) => FormValue::Four(c / pm.det),
    }
}

/// Pointwise inner product of two k-forms, normalized so an orthonormal
/// coframe wedge basis has unit norm.
pub fn inner_product(pm: &PointMetric, a: &FormValue, b: &FormValue) -> f64 {
    assert_eq!(a.degree(), b.degree(), "form degree mismatch");
    let b_raised = raise(pm, b);
    a.components()
        .iter()
        .zip(b_raised.components())
        .map(|(x, y)| x * y)
        .sum()
}

pub fn norm(pm: &PointMetric, a: &FormValue) -> f64 {
    inner_product(pm, a, a).max(0.0).sqrt()
}

/// Hodge star determined by metric and orientation.
pub fn hodge_star(pm: &PointMetric, f: &FormValue) -> FormValue {
    let vc = pm.vol_coeff;
    let raised = raise(pm, f);
    match f.degree() {
        0 => FormValue::Four(vc * raised.components()[0]),
        4 => FormValue::Zero(raised.components()[0] * vc),
        1 => {
            let mut out = [0.0; 4];
            for (slot, b) in BASIS3.iter().enumerate() {
                let mut acc = 0.0;
                for (i, a_i) in raised.components().iter().enumerate() {
                    acc += levi_civita([i, b[0], b[1], b[2]]) * a_i;
                }
                out[slot] = vc * acc;
            }
            FormValue::Three(out)
        }
        2 => {
            let mut out = [0.0; 6];
            for (slot, b) in BASIS2.iter().enumerate() {
                let mut acc = 0.0;
                for (src, t) in BASIS2.iter().enumerate() {
                    acc += levi_civita([t[0], t[1], b[0], b[1]]) * raised.components()[src];
                }
                out[slot] = vc * acc;
            }
            FormValue::Two(out)
        }
        3 => {
            let mut out = [0.0; 4];
            for l in 0..DIM {
                let mut acc = 0.0;
                for (src, t) in BASIS3.iter().enumerate() {
                    acc += levi_civita([t[0], t[1], t[2], l]) * raised.components()[src];
                }
                out[l] = vc * acc;
            }
            FormValue::One(out)
        }
        _ => unreachable!(),
    }
}

/// Self-dual / anti-self-dual projection of a 2-form: (β ± *β)/2.
pub fn lambda_projection(pm: &PointMetric, f: &FormValue, plus: bool) -> FormValue {
    let star = hodge_star(pm, f);
    let sign = if plus { 1.0 } else { -1.0 };
    f.add(&star.scale(sign)).scale(0.5)
}

/// Evaluate a 2-form on a pair of covectors (indices raised internally).
pub fn two_form_on_covectors(pm: &PointMetric, f: &FormValue, a: &[f64; 4], b: &[f64; 4]) -> f64 {
    assert_eq!(f.degree(), 2);
    let au = pm.sharp(a);
    let bu = pm.sharp(b);
    let mut acc = 0.0;
    for (slot, t) in BASIS2.iter().enumerate() {
        acc += f.components()[slot] * (au[t[0]] * bu[t[1]] - au[t[1]] * bu[t[0]]);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::mat_identity;

    fn flat() -> PointMetric {
        PointMetric::new(mat_identity(), 1.0, [0.0; 4]).unwrap()
    }

    fn dx(i: usize) -> FormValue {
        let mut c = [0.0; 4];
        c[i] = 1.0;
        FormValue::One(c)
    }

    #[test]
    fn wedge_antisymmetry_and_volume() {
        let a = wedge(&dx(0), &dx(0)).unwrap();
        assert_eq!(a.max_abs(), 0.0);
        let d01 = wedge(&dx(0), &dx(1)).unwrap();
        let d23 = wedge(&dx(2), &dx(3)).unwrap();
        let vol = wedge(&d01, &d23).unwrap();
        assert_eq!(vol, FormValue::Four(1.0));
        // graded commutativity for two 1-forms: a∧b = -b∧a
        let ab = wedge(&dx(1), &dx(2)).unwrap();
        let ba = wedge(&dx(2), &dx(1)).unwrap();
        assert_eq!(ab, ba.scale(-1.0));
    }

    #[test]
    fn wedge_degree_error() {
        let d01 = wedge(&dx(0), &dx(1)).unwrap();
        let d23 = wedge(&dx(2), &dx(3)).unwrap();
        let vol = wedge(&d01, &d23).unwrap();
        assert!(wedge(&vol, &dx(0)).is_err());
    }

    #[test]
    fn kahler_form_squares_to_twice_volume() {
        // (dx0∧dx1 + dx2∧dx3)^2 = 2 dx0∧dx1∧dx2∧dx3
        let omega = wedge(&dx(0), &dx(1))
            .unwrap()
            .add(&wedge(&dx(2), &dx(3)).unwrap());
        let sq = wedge(&omega, &omega).unwrap();
        assert_eq!(sq, FormValue::Four(2.0));
    }

    #[test]
    fn star_on_flat_orthonormal_basis() {
        let pm = flat();
        let d01 = wedge(&dx(0), &dx(1)).unwrap();
        let d23 = wedge(&dx(2), &dx(3)).unwrap();
        assert_eq!(hodge_star(&pm, &d01), d23);
        assert_eq!(hodge_star(&pm, &FormValue::Four(1.0)), FormValue::Zero(1.0));
        assert_eq!(hodge_star(&pm, &FormValue::Zero(1.0)), FormValue::Four(1.0));
    }

    #[test]
    fn star_involution_signs() {
        let pm = flat();
        let two = wedge(&dx(0), &dx(2)).unwrap();
        assert_eq!(hodge_star(&pm, &hodge_star(&pm, &two)), two);
        let one = dx(1);
        assert_eq!(hodge_star(&pm, &hodge_star(&pm, &one)), one.scale(-1.0));
    }

    #[test]
    fn star_pairing_identity_under_scaled_metric() {
        // *a ∧ *b = a ∧ b for 2-forms, any metric; try a non-flat diagonal one.
        let mut g = mat_identity::<f64>();
        g[0][0] = 3.0;
        g[1][1] = 0.5;
        g[2][2] = 2.0;
        g[3][3] = 7.0;
        let pm = PointMetric::new(g, 1.0, [0.0; 4]).unwrap();
        let a = FormValue::Two([0.3, -1.2, 0.9, 2.0, -0.4, 0.7]);
        let b = FormValue::Two([1.1, 0.2, -0.8, 0.5, 1.4, -2.2]);
        let lhs = wedge(&hodge_star(&pm, &a), &hodge_star(&pm, &b)).unwrap();
        let rhs = wedge(&a, &b).unwrap();
        assert!((lhs.components()[0] - rhs.components()[0]).abs() < 1e-12);
    }

    #[test]
    fn inner_product_matches_star_pairing() {
        // <a,b> dVol = a ∧ *b
        let mut g = mat_identity::<f64>();
        g[0][0] = 2.0;
        g[1][2] = 0.3;
        g[2][1] = 0.3;
        g[3][3] = 1.5;
        let pm = PointMetric::new(g, 1.0, [0.0; 4]).unwrap();
        let a = FormValue::Two([0.3, -1.2, 0.9, 2.0, -0.4, 0.7]);
        let b = FormValue::Two([1.1, 0.2, -0.8, 0.5, 1.4, -2.2]);
        let pair = wedge(&a, &hodge_star(&pm, &b)).unwrap();
        let ip = inner_product(&pm, &a, &b);
        assert!((pair.components()[0] - ip * pm.vol_coeff).abs() < 1e-12);
        // orthonormal 2-form basis has unit norm on the flat metric
        let pm_flat = flat();
        let d01 = wedge(&dx(0), &dx(1)).unwrap();
        assert!((norm(&pm_flat, &d01) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_split_reconstructs() {
        let pm = flat();
        let f = FormValue::Two([0.3, -1.2, 0.9, 2.0, -0.4, 0.7]);
        let p = lambda_projection(&pm, &f, true);
        let m = lambda_projection(&pm, &f, false);
        assert!(p.add(&m).sub(&f).max_abs() < 1e-15);
        // projections are eigenvectors of the star
        assert!(hodge_star(&pm, &p).sub(&p).max_abs() < 1e-15);
        assert!(hodge_star(&pm, &m).add(&m).max_abs() < 1e-15);
    }
}
