//! Small dense 4x4 kernels, generic over [`Scalar`] so they also run on jets.

use crate::scalar::{Scalar, DIM};

pub type Mat4<S> = [[S; DIM]; DIM];

pub fn mat_zero<S: Scalar>() -> Mat4<S> {
    [[S::zero(); DIM]; DIM]
}

pub fn mat_identity<S: Scalar>() -> Mat4<S> {
    let mut m = mat_zero();
    for i in 0..DIM {
        m[i][i] = S::one();
    }
    m
}

pub fn mat_mul<S: Scalar>(a: &Mat4<S>, b: &Mat4<S>) -> Mat4<S> {
    let mut out = mat_zero();
    for i in 0..DIM {
        for j in 0..DIM {
            let mut acc = S::zero();
            for k in 0..DIM {
                acc = acc + a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat_vec<S: Scalar>(a: &Mat4<S>, v: &[S; DIM]) -> [S; DIM] {
    let mut out = [S::zero(); DIM];
    for i in 0..DIM {
        let mut acc = S::zero();
        for k in 0..DIM {
            acc = acc + a[i][k] * v[k];
        }
        out[i] = acc;
    }
    out
}

pub fn transpose<S: Scalar>(a: &Mat4<S>) -> Mat4<S> {
    let mut out = mat_zero();
    for i in 0..DIM {
        for j in 0..DIM {
            out[i][j] = a[j][i];
        }
    }
    out
}

/// Gauss-Jordan inverse with partial pivoting on the real part.
/// Returns `None` when the pivot magnitude collapses.
pub fn mat_inv<S: Scalar>(a: &Mat4<S>) -> Option<Mat4<S>> {
    let mut m = *a;
    let mut inv = mat_identity::<S>();
    for col in 0..DIM {
        let mut pivot = col;
        for row in col + 1..DIM {
            if m[row][col].re().abs() > m[pivot][col].re().abs() {
                pivot = row;
            }
        }
        if m[pivot][col].re().abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = m[col][col].recip();
        for j in 0..DIM {
            m[col][j] = m[col][j] * scale;
            inv[col][j] = inv[col][j] * scale;
        }
        for row in 0..DIM {
            if row == col {
                continue;
            }
            let factor = m[row][col];
            for j in 0..DIM {
                m[row][j] = m[row][j] - factor * m[col][j];
                inv[row][j] = inv[row][j] - factor * inv[col][j];
            }
        }
    }
    Some(inv)
}

/// Determinant by cofactor expansion; exact arithmetic tree, no pivot choices.
pub fn det<S: Scalar>(m: &Mat4<S>) -> S {
    let det3 = |a: S, b: S, c: S, d: S, e: S, f: S, g: S, h: S, i: S| {
        a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    };
    let [r0, r1, r2, r3] = *m;
    r0[0] * det3(r1[1], r1[2], r1[3], r2[1], r2[2], r2[3], r3[1], r3[2], r3[3])
        - r0[1] * det3(r1[0], r1[2], r1[3], r2[0], r2[2], r2[3], r3[0], r3[2], r3[3])
        + r0[2] * det3(r1[0], r1[1], r1[3], r2[0], r2[1], r2[3], r3[0], r3[1], r3[3])
        - r0[3] * det3(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2])
}

/// Cholesky factor of a symmetric matrix; `None` when a pivot falls below `floor`,
/// meaning the matrix is not positive definite to that tolerance.
pub fn cholesky_pivot_floor(g: &Mat4<f64>, floor: f64) -> Option<f64> {
    let mut l = [[0.0f64; DIM]; DIM];
    let mut min_pivot = f64::INFINITY;
    for i in 0..DIM {
        for j in 0..=i {
            let mut sum = g[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum < floor {
                    return None;
                }
                min_pivot = min_pivot.min(sum);
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(min_pivot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{seed_point, Jet};

    #[test]
    fn inverse_roundtrip() {
        let a = [
            [2.0, 1.0, 0.0, 0.5],
            [1.0, 3.0, 1.0, 0.0],
            [0.0, 1.0, 4.0, 1.0],
            [0.5, 0.0, 1.0, 5.0],
        ];
        let inv = mat_inv(&a).unwrap();
        let id = mat_mul(&a, &inv);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((id[i][j] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn jet_inverse_differentiates_correctly() {
        // M(x) = diag(1 + x0^2, 2, 3, 4); d/dx0 [M^-1]_00 = -2 x0 / (1+x0^2)^2
        let x = seed_point([0.7, 0.0, 0.0, 0.0]);
        let mut m = mat_zero::<Jet<f64>>();
        m[0][0] = Jet::constant(1.0) + x[0] * x[0];
        m[1][1] = Jet::constant(2.0);
        m[2][2] = Jet::constant(3.0);
        m[3][3] = Jet::constant(4.0);
        let inv = mat_inv(&m).unwrap();
        let expected = -2.0 * 0.7 / (1.0 + 0.49f64).powi(2);
        assert!((inv[0][0].d[0] - expected).abs() < 1e-13);
    }

    #[test]
    fn determinant_matches_product_for_diagonal() {
        let mut m = mat_zero::<f64>();
        for (i, v) in [2.0, -3.0, 4.0, 0.5].iter().enumerate() {
            m[i][i] = *v;
        }
        assert!((det(&m) + 12.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let mut m = mat_identity::<f64>();
        m[2][2] = -1.0;
        assert!(cholesky_pivot_floor(&m, 1e-12).is_none());
        assert!(cholesky_pivot_floor(&mat_identity::<f64>(), 1e-12).is_some());
    }
}
