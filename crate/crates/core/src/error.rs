//! Error type shared by all geometry operations.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("point {point:?} lies on or within {margin} of a singular locus of chart `{chart}`")]
    SingularPoint {
        chart: String,
        point: [f64; 4],
        margin: f64,
    },

    #[error("form degree out of range: {0}")]
    DegreeError(String),

    #[error("metric is degenerate at {point:?} (eigenvalue {eigenvalue} below {threshold})")]
    MetricDegenerate {
        point: [f64; 4],
        eigenvalue: f64,
        threshold: f64,
    },

    #[error("quadrature failed to converge: {0}")]
    QuadratureDiverged(String),

    #[error("hypersurface patch leaves the chart: {0}")]
    ChartOverflow(String),

    #[error("could not build a (0,1) eigenbasis: {0}")]
    EigenbasisError(String),

    #[error("metric and almost-complex structure are not compatible: residual {residual} exceeds {tolerance}")]
    NotCompatible { residual: f64, tolerance: f64 },

    #[error("defining function is degenerate: |d\u{3c1}| = {norm} below {threshold} at {point:?}")]
    DegenerateDefiningFunction {
        point: [f64; 4],
        norm: f64,
        threshold: f64,
    },

    #[error("scalar field is not constant on the hypersurface: tangential |df| = {tangential} at {point:?}")]
    NotLevelSet { point: [f64; 4], tangential: f64 },

    #[error("invalid annulus: require 0 < a < b, got a = {a}, b = {b}")]
    InvalidAnnulus { a: f64, b: f64 },

    #[error("field is not harmonic: |\u{394}f| = {laplacian} at {point:?} exceeds {tolerance}")]
    NotHarmonic {
        point: [f64; 4],
        laplacian: f64,
        tolerance: f64,
    },

    #[error("conformal factor is not positive: {value} at {point:?}")]
    InvalidConformalFactor { point: [f64; 4], value: f64 },

    #[error("structure function vanishes on the sampled range: f({r}) = {value}")]
    InvalidStructureFunction { r: f64, value: f64 },

    #[error("catalog self-check failed for `{geometry}`: {detail}")]
    CatalogSelfCheckFailed { geometry: String, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
