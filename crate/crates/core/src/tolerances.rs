//! Numerical tolerances shared across the crate.
//!
//! Every threshold a kernel or validator compares against lives here so the
//! whole crate can be audited in one place.

/// Max-abs of `m - m†` accepted as Hermitian by the eigensolver.
pub const HERMITIAN: f64 = 1e-10;

/// Eigenpair residual and orthonormality target of the Hermitian eigensolver.
pub const EIGEN_RESIDUAL: f64 = 1e-9;

/// Most negative eigenvalue still treated as zero by the PSD square root.
pub const PSD_NEGATIVE: f64 = 1e-10;

/// Relative singular-value threshold `σ_min / σ_max` for a numerical kernel.
pub const NULL_SPACE_RELATIVE: f64 = 1e-8;

/// Density-matrix validation: Hermiticity and trace.
pub const STATE_HERMITIAN: f64 = 1e-10;
pub const STATE_TRACE: f64 = 1e-10;

/// Density-matrix validation: most negative eigenvalue allowed.
pub const STATE_PSD: f64 = 1e-9;

/// Unit-norm check for pure state vectors.
pub const STATE_NORM: f64 = 1e-10;

/// Distance of `Γ¹²` from `Γ` at which the singlet sector is treated as decoupled.
pub const SINGLET_DECOUPLED: f64 = 1e-12;

/// Below this `k₀r` the coupling formulas switch to their Taylor series.
pub const SERIES_SWITCH: f64 = 1e-3;

/// Cubic discriminant band in which the trigonometric root formula is abandoned.
pub const CUBIC_DISCRIMINANT: f64 = 1e-12;

/// Trace drift tolerated per propagated state.
pub const TRACE_DRIFT: f64 = 1e-6;
