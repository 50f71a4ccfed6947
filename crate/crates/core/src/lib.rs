//! Steady-state entanglement of two identical two-level atoms coupled by the
//! dipole-dipole interaction, driven by a classical field and damped by
//! (collective) spontaneous emission.
//!
//! The crate is organised bottom-up:
//!
//! * [`qcore`]: small dense complex linear algebra (Kronecker products,
//!   eigensolvers, PSD square roots, null vectors).
//! * [`model`]: physical parameters, dipole couplings and the Hamiltonians.
//! * [`spectral`]: closed-form eigenstructure of the driven pair.
//! * [`dynamics`]: Lindblad superoperator, numeric and analytic steady states,
//!   time propagation.
//! * [`entanglement`]: Wootters concurrence, entanglement of formation and the
//!   singlet-admixture rule.
//! * [`checks`]: self-check suite used by the `check` CLI subcommand.
//!
//! All rates are measured in units of the single-atom decay constant `Γ`.

pub mod checks;
pub mod dynamics;
pub mod entanglement;
pub mod model;
pub mod qcore;
pub mod spectral;
pub mod tolerances;

pub use dynamics::{
    analytic_steady_state, build_liouvillian, build_liouvillian_with, lamb_dicke_limit_state,
    propagate, restrict_triplet, solve_steady_state, steady_state_numeric, DecayScale,
    DensityMatrix, DynamicsError, Liouvillian, SteadyState, Trajectory,
};
pub use entanglement::{
    admixture_concurrence, closed_form_concurrence, eof_from_concurrence, spin_flip,
    wootters_concurrence, ConcurrenceReport, EntanglementError,
};
pub use model::{
    build_effective_hamiltonian, build_hamiltonian, gamma_cross, k0r_for_tau, omega_dipole,
    tau_of_geometry, AtomPairConfig, Couplings, DriveScaling, Geometry, ModelError,
};
pub use qcore::{BasisTag, ComplexMatrix, LinalgError, C64};
pub use spectral::{
    dressed_eigensystem, pure_concurrence, triplet_cubic_roots, DressedState, SpectralError,
};

/// `τ` at which the Lamb-Dicke concurrence peaks, `2 + 2√13`.
pub fn tau_max() -> f64 {
    2.0 + 2.0 * 13f64.sqrt()
}

/// Peak Lamb-Dicke concurrence, `2 / (√13 + 1)`.
pub fn concurrence_max() -> f64 {
    2.0 / (13f64.sqrt() + 1.0)
}
