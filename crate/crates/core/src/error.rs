//! Error types shared across the crate.
//!
//! `DomainError` is for inputs that violate a documented precondition:
//! the caller asked for something outside the regime this model covers.
//! `InternalError` is for numerical machinery that failed to certify its
//! own result; valid inputs should never produce one.

use thiserror::Error;

/// A request outside the validity domain of the model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("mass must be positive and finite, got {0}")]
    InvalidMass(f64),

    #[error("energy {energy} does not exceed mass {mass}; propagating modes need energy above the gap")]
    EnergyNotAboveMass { energy: f64, mass: f64 },

    #[error("field must be positive, got {0}")]
    FieldNotPositive(f64),

    #[error("field must not be negative, got {0}")]
    FieldNegative(f64),

    #[error("slab half-width must be positive and finite, got {0}")]
    HalfWidthNotPositive(f64),

    #[error("longitudinal momentum must be finite, got {0}")]
    InvalidMomentum(f64),

    #[error("transverse momentum must be finite, got {0}")]
    InvalidTransverseMomentum(f64),

    #[error("catalog formulas need k > 0, got {0}")]
    MomentumNotPositive(f64),

    #[error("polarization ratio must exceed 1, got alpha = {0}")]
    RatioNotHyperbolic(f64),

    #[error("pole of the Moebius map: |1 - alpha x| = {denom:e} at alpha = {alpha}")]
    MobiusPole { alpha: f64, denom: f64 },

    #[error("{family} family has variants 1..={max}, got {index}")]
    VariantIndex {
        family: &'static str,
        index: u8,
        max: u8,
    },

    #[error("{family} family takes {expected} phase generator(s), got {got}")]
    GeneratorCount {
        family: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("phase generator must be finite, got {0}")]
    InvalidGenerator(f64),

    #[error("variant {requested} does not match the variant {configured} the phases were built for")]
    VariantMismatch {
        requested: String,
        configured: String,
    },

    #[error("level index {got} exceeds the supported cap {max}")]
    LevelTooLarge { got: u32, max: u32 },

    #[error("closed form denominator {expr} vanished, |den| = {magnitude:e}")]
    SingularConfiguration {
        expr: &'static str,
        magnitude: f64,
    },

    #[error("product check applies to ratio-kind variants; {0} has fixed roots")]
    ProductCheckNotApplicable(String),

    #[error("K is not a root here: |det S| = {det_mag:e} exceeds {tol:e}")]
    NotARoot { det_mag: f64, tol: f64 },

    #[error("root modulus deviates from 1 by {0:e}; not an admissible root")]
    RootNotUnitModulus(f64),

    #[error("e^(2 i k a) differs from the boundary root by {deviation:e} (tol {tol:e}); k and a_slab do not quantize this root")]
    RoundTripMismatch { deviation: f64, tol: f64 },

    #[error("coefficient vector is numerically zero")]
    ZeroCoefficients,

    #[error("spinor weights blow up: |k - p| = {gap:e} with level index {level} > 0")]
    SingularWeights { gap: f64, level: u32 },

    #[error("level gives lambda^2 = {lambda_sq} but the dispersion leaves {required}; inconsistent mode data")]
    TransverseMismatch { lambda_sq: f64, required: f64 },

    #[error("coefficients do not span a null direction: |S A| = {residual:e} exceeds {tol:e}")]
    NotANullVector { residual: f64, tol: f64 },

    #[error("point z = {z} lies outside the slab |z| <= {half_width}")]
    OutsideSlab { z: f64, half_width: f64 },

    #[error("sample grid must not be empty")]
    EmptyGrid,

    #[error("momentum window ({lo}, {hi}] is empty or not positive")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("window reaches k = {k_max} beyond the fixed-energy momentum p = {p}")]
    WindowBeyondP { k_max: f64, p: f64 },

    #[error("grid needs at least {min} points, got {got}")]
    GridTooCoarse { min: usize, got: usize },

    #[error("root selector {selector} out of range; this variant has {count} root entries")]
    RootSelector { selector: usize, count: usize },

    #[error("spectrum is empty; nothing to build a mode from")]
    EmptySpectrum,

    #[error("mode index {index} out of range; spectrum has {count} rows")]
    ModeIndex { index: usize, count: usize },

    #[error("sweep values must be non-empty")]
    EmptySweep,
}

/// A numerical routine failed to certify its own output.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum InternalError {
    #[error("determinant samples do not certify a quartic: residual {residual:e} exceeds {tol:e} at the held-out point")]
    QuarticCertification { residual: f64, tol: f64 },

    #[error("determinant vanishes identically in K; the configuration is degenerate")]
    DegenerateQuartic,

    #[error("root iteration did not converge within {0} sweeps")]
    RootIteration(usize),

    #[error("root backward error {err:e} exceeds {tol:e}")]
    RootBackwardError { err: f64, tol: f64 },

    #[error("self check `{name}` failed: {detail}")]
    CheckFailed { name: String, detail: String },

    #[error("linear solve failed in {0}")]
    LinearSolve(&'static str),
}
