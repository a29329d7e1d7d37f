//! Levi-Civita connection data and the metric Laplacian.

use crate::error::Result;
use crate::fields::{MetricField, ScalarField};
use crate::linalg::mat_inv;
use crate::scalar::DIM;

/// Christoffel symbols Γ^i_{jk} of the Levi-Civita connection at a point.
pub fn christoffel(g: &MetricField, p: [f64; DIM]) -> Result<[[[f64; DIM]; DIM]; DIM]> {
    let pm = g.point_metric(p)?;
    let (_, dg, _) = g.second_jets(p)?;
    Ok(christoffel_from_jets(&pm.inv, &dg))
}

pub(crate) fn christoffel_from_jets(
    inv: &[[f64; DIM]; DIM],
    dg: &[[[f64; DIM]; DIM]; DIM],
) -> [[[f64; DIM]; DIM]; DIM] {
    let mut gamma = [[[0.0; DIM]; DIM]; DIM];
    for i in 0..DIM {
        for j in 0..DIM {
            for k in 0..DIM {
                let mut acc = 0.0;
                for l in 0..DIM {
                    acc += inv[i][l] * (dg[j][l][k] + dg[k][l][j] - dg[l][j][k]);
                }
                gamma[i][j][k] = 0.5 * acc;
            }
        }
    }
    gamma
}

/// Covariant Hessian (∇df)_{jk} = ∂_j ∂_k f − Γ^l_{jk} ∂_l f.
pub fn covariant_hessian(
    g: &MetricField,
    f: &ScalarField,
    p: [f64; DIM],
) -> Result<[[f64; DIM]; DIM]> {
    let grad = f.gradient(p)?;
    let hess = f.hessian(p)?;
    let gamma = christoffel(g, p)?;
    let mut out = [[0.0; DIM]; DIM];
    for j in 0..DIM {
        for k in 0..DIM {
            let mut acc = hess[j][k];
            for l in 0..DIM {
                acc -= gamma[l][j][k] * grad[l];
            }
            out[j][k] = acc;
        }
    }
    Ok(out)
}

/// Laplacian with the +trace Hessian sign convention.
pub fn laplacian(g: &MetricField, f: &ScalarField, p: [f64; DIM]) -> Result<f64> {
    let pm = g.point_metric(p)?;
    let hess = covariant_hessian(g, f, p)?;
    let mut acc = 0.0;
    for j in 0..DIM {
        for k in 0..DIM {
            acc += pm.inv[j][k] * hess[j][k];
        }
    }
    Ok(acc)
}

/// First derivatives of the inverse metric: ∂_k g^{-1} = −g^{-1} (∂_k g) g^{-1}.
pub(crate) fn inverse_metric_derivatives(
    inv: &[[f64; DIM]; DIM],
    dg: &[[[f64; DIM]; DIM]; DIM],
) -> [[[f64; DIM]; DIM]; DIM] {
    let mut dinv = [[[0.0; DIM]; DIM]; DIM];
    for k in 0..DIM {
        for i in 0..DIM {
            for j in 0..DIM {
                let mut acc = 0.0;
                for a in 0..DIM {
                    for b in 0..DIM {
                        acc += inv[i][a] * dg[k][a][b] * inv[b][j];
                    }
                }
                dinv[k][i][j] = -acc;
            }
        }
    }
    dinv
}

/// Orthonormal oriented coframe at a point by Gram-Schmidt on the coordinate
/// coframe (deterministic; last covector flipped if needed to match the chart
/// orientation). Rows are coframe covector components.
pub fn orthonormal_coframe(
    inv: &[[f64; DIM]; DIM],
    orientation: f64,
) -> Option<[[f64; DIM]; DIM]> {
    let dot = |a: &[f64; DIM], b: &[f64; DIM]| {
        let mut acc = 0.0;
        for i in 0..DIM {
            for j in 0..DIM {
                acc += inv[i][j] * a[i] * b[j];
            }
        }
        acc
    };
    let mut frame = [[0.0; DIM]; DIM];
    for axis in 0..DIM {
        let mut v = [0.0; DIM];
        v[axis] = 1.0;
        for prev in frame.iter().take(axis) {
            let c = dot(&v, prev);
            for i in 0..DIM {
                v[i] -= c * prev[i];
            }
        }
        let n = dot(&v, &v);
        if n <= 1e-14 {
            return None;
        }
        let inv_n = n.sqrt().recip();
        for x in v.iter_mut() {
            *x *= inv_n;
        }
        frame[axis] = v;
    }
    // components matrix determinant sign vs chart orientation
    let det = crate::linalg::det(&frame);
    if det * orientation < 0.0 {
        for x in frame[DIM - 1].iter_mut() {
            *x = -*x;
        }
    }
    Some(frame)
}

/// Frame vectors dual to a coframe (rows are vector components).
pub fn dual_frame(coframe: &[[f64; DIM]; DIM]) -> Option<[[f64; DIM]; DIM]> {
    // coframe rows are covectors eta^a_i; frame rows E_b^i satisfy eta^a(E_b) = delta,
    // i.e. F E^T = Id, so E = (F^{-1})^T
    mat_inv(coframe).map(|m| crate::linalg::transpose(&m))
}
