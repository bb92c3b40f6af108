//! Boundary catalog, quantization spectra, and explicit modes for a
//! charged fermion confined to a slab in a uniform magnetic field.
//!
//! The field points along the slab normal and the walls carry
//! spin-resolved reflection phases. Matching the four transverse spinor
//! components across the slab produces a 4x4 boundary matrix whose
//! determinant is a quartic in the round-trip factor K = e^{2ika}; its
//! roots on the unit circle quantize the longitudinal momentum.
//!
//! - [`params`]: kinematics, wall-phase patterns, the Moebius map.
//! - [`transverse`]: oscillator profiles and the Landau dispersion.
//! - [`boundary`]: the matrix itself plus a numeric quartic oracle.
//! - [`catalog`]: closed-form roots for all nineteen phase patterns.
//! - [`spectrum`]: root-to-momentum quantization over a k-window.
//! - [`modes`]: explicit spinor profiles and wall-current diagnostics.
//! - [`checks`]: the end-to-end self-test battery behind `selftest`.
//! - [`cli`]: config parsing and the command implementations.

pub mod boundary;
pub mod catalog;
pub mod checks;
pub mod cli;
pub mod error;
pub mod modes;
pub mod params;
pub mod spectrum;
pub mod transverse;

pub use error::{DomainError, InternalError};
pub use params::{PhaseConfig, PhysicalParams, VariantId};
