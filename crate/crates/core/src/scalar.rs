//! Forward-mode differentiation scalars.
//!
//! All field evaluators in this crate are generic over [`Scalar`], so the same
//! closed-form expression can be evaluated on plain `f64` or on nested jets.
//! A [`Jet`] carries a value together with its four partial derivatives with
//! respect to the chart coordinates; nesting jets (`Jet<Jet<f64>>`, ...)
//! yields exact second and higher derivatives without finite differencing.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Number of chart coordinates. Everything in this crate lives on 4-manifolds.
pub const DIM: usize = 4;

/// Arithmetic closed under the elementary functions used by the field catalog.
pub trait Scalar:
    Copy
    + Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(c: f64) -> Self;
    /// Underlying real value (all derivative parts stripped).
    fn re(&self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn recip(self) -> Self {
        Self::constant(1.0) / self
    }
    fn zero() -> Self {
        Self::constant(0.0)
    }
    fn one() -> Self {
        Self::constant(1.0)
    }
}

/// Lift an `f64` constant into any scalar type; shorthand used inside field formulas.
#[inline]
pub fn lit<S: Scalar>(c: f64) -> S {
    S::constant(c)
}

impl Scalar for f64 {
    #[inline]
    fn constant(c: f64) -> Self {
        c
    }
    #[inline]
    fn re(&self) -> f64 {
        *self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn sin(self) -> Self {
        f64::sin(self)
    }
    #[inline]
    fn cos(self) -> Self {
        f64::cos(self)
    }
    #[inline]
    fn ln(self) -> Self {
        f64::ln(self)
    }
    #[inline]
    fn exp(self) -> Self {
        f64::exp(self)
    }
    #[inline]
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
    #[inline]
    fn recip(self) -> Self {
        1.0 / self
    }
}

/// First-order jet over `S`: value plus the four partials along chart axes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: [S; DIM],
}

pub type J1 = Jet<f64>;
pub type J2 = Jet<J1>;
pub type J3 = Jet<J2>;
pub type J4 = Jet<J3>;

impl<S: Scalar> Jet<S> {
    #[inline]
    pub fn new(v: S, d: [S; DIM]) -> Self {
        Jet { v, d }
    }

    /// Jet with zero derivative part.
    #[inline]
    pub fn from_value(v: S) -> Self {
        Jet {
            v,
            d: [S::zero(); DIM],
        }
    }

    /// Coordinate seed: value `v` with unit derivative along `axis`.
    #[inline]
    pub fn seed(v: S, axis: usize) -> Self {
        let mut d = [S::zero(); DIM];
        d[axis] = S::one();
        Jet { v, d }
    }

    #[inline]
    fn map_unary(self, v: S, dv: S) -> Self {
        Jet {
            v,
            d: self.d.map(|di| di * dv),
        }
    }
}

/// Seed a point for one more level of differentiation.
#[inline]
pub fn seed_point<S: Scalar>(x: [S; DIM]) -> [Jet<S>; DIM] {
    [
        Jet::seed(x[0], 0),
        Jet::seed(x[1], 1),
        Jet::seed(x[2], 2),
        Jet::seed(x[3], 3),
    ]
}

impl<S: Scalar> Add for Jet<S> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Jet {
            v: self.v + rhs.v,
            d: [
                self.d[0] + rhs.d[0],
                self.d[1] + rhs.d[1],
                self.d[2] + rhs.d[2],
                self.d[3] + rhs.d[3],
            ],
        }
    }
}

impl<S: Scalar> Sub for Jet<S> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Jet {
            v: self.v - rhs.v,
            d: [
                self.d[0] - rhs.d[0],
                self.d[1] - rhs.d[1],
                self.d[2] - rhs.d[2],
                self.d[3] - rhs.d[3],
            ],
        }
    }
}

impl<S: Scalar> Mul for Jet<S> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        Jet {
            v: self.v * rhs.v,
            d: [
                self.v * rhs.d[0] + self.d[0] * rhs.v,
                self.v * rhs.d[1] + self.d[1] * rhs.v,
                self.v * rhs.d[2] + self.d[2] * rhs.v,
                self.v * rhs.d[3] + self.d[3] * rhs.v,
            ],
        }
    }
}

impl<S: Scalar> Div for Jet<S> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let inv = rhs.v.recip();
        let q = self.v * inv;
        Jet {
            v: q,
            d: [
                (self.d[0] - q * rhs.d[0]) * inv,
                (self.d[1] - q * rhs.d[1]) * inv,
                (self.d[2] - q * rhs.d[2]) * inv,
                (self.d[3] - q * rhs.d[3]) * inv,
            ],
        }
    }
}

impl<S: Scalar> Neg for Jet<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Jet {
            v: -self.v,
            d: self.d.map(|di| -di),
        }
    }
}

impl<S: Scalar> Scalar for Jet<S> {
    #[inline]
    fn constant(c: f64) -> Self {
        Jet::from_value(S::constant(c))
    }

    #[inline]
    fn re(&self) -> f64 {
        self.v.re()
    }

    #[inline]
    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.map_unary(r, (S::constant(2.0) * r).recip())
    }

    #[inline]
    fn sin(self) -> Self {
        self.map_unary(self.v.sin(), self.v.cos())
    }

    #[inline]
    fn cos(self) -> Self {
        self.map_unary(self.v.cos(), -self.v.sin())
    }

    #[inline]
    fn ln(self) -> Self {
        self.map_unary(self.v.ln(), self.v.recip())
    }

    #[inline]
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.map_unary(e, e)
    }

    #[inline]
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        self.map_unary(self.v.powi(n), S::constant(n as f64) * self.v.powi(n - 1))
    }

    #[inline]
    fn recip(self) -> Self {
        let inv = self.v.recip();
        self.map_unary(inv, -(inv * inv))
    }
}
