//! Two-qubit entanglement measures.

use thiserror::Error;

use crate::dynamics::{DensityMatrix, DynamicsError};
use crate::qcore::{general_eig, kron, pauli, BasisTag, ComplexMatrix, LinalgError};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EntanglementError {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<DynamicsError> for EntanglementError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Linalg(l) => EntanglementError::Linalg(l),
            other => EntanglementError::InvalidState(other.to_string()),
        }
    }
}

pub type Result<T> = std::result::Result<T, EntanglementError>;

/// Spin-flip spectrum, concurrence and entanglement of formation of a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcurrenceReport {
    /// `λ₁ ≥ λ₂ ≥ λ₃ ≥ λ₄ ≥ 0`.
    pub lambdas: [f64; 4],
    pub concurrence: f64,
    /// Entanglement of formation in ebits.
    pub eof: f64,
}

impl ConcurrenceReport {
    fn from_lambdas(mut lambdas: [f64; 4]) -> Self {
        lambdas.sort_by(|a, b| b.total_cmp(a));
        let concurrence = wootters_formula(&lambdas);
        let eof = eof_unchecked(concurrence);
        Self { lambdas, concurrence, eof }
    }
}

fn wootters_formula(sorted: &[f64; 4]) -> f64 {
    (sorted[0] - sorted[1] - sorted[2] - sorted[3]).clamp(0.0, 1.0)
}

fn to_validated_computational(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let m = rho.to_computational().into_matrix();
    Ok(DensityMatrix::new(m, BasisTag::Computational)?)
}

/// `ρ̃ = (Y⊗Y) ρ* (Y⊗Y)` for a computational-basis two-qubit state.
pub fn spin_flip(rho: &DensityMatrix) -> ComplexMatrix {
    let yy = kron(&pauli::y(), &pauli::y());
    let m = rho.to_computational();
    &yy * &m.matrix().conj() * &yy
}

/// `λᵢ` as square roots of the eigenvalues of `ρρ̃`.
///
/// Eigenvalues within the round-off floor `‖ρ‖‖ρ̃‖·ε` of zero are set to zero
/// before the square root is taken.
fn spin_flip_lambdas(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let flipped = spin_flip(rho);
    let product = rho.matrix() * &flipped;
    let mu: Vec<f64> = general_eig(&product)?.iter().map(|z| z.re.max(0.0)).collect();
    let floor = 64.0 * f64::EPSILON * rho.matrix().frobenius_norm() * flipped.frobenius_norm();
    let mut lambdas = [0.0; 4];
    for (l, m) in lambdas.iter_mut().zip(&mu) {
        *l = if *m <= floor { 0.0 } else { m.sqrt() };
    }
    Ok(lambdas)
}

/// Wootters concurrence of a two-qubit state. Triplet-only and coupled-basis
/// inputs are embedded into the computational basis first.
pub fn wootters_concurrence(rho: &DensityMatrix) -> Result<ConcurrenceReport> {
    let rho = to_validated_computational(rho)?;
    Ok(ConcurrenceReport::from_lambdas(spin_flip_lambdas(&rho)?))
}

/// `(8τ − 16)/(τ² + 48)` for `τ ≥ 2`, zero below.
pub fn closed_form_concurrence(tau: f64) -> f64 {
    if tau <= 2.0 {
        0.0
    } else {
        (8.0 * tau - 16.0) / (tau * tau + 48.0)
    }
}

fn binary_entropy(x: f64) -> f64 {
    let term = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    term(x) + term(1.0 - x)
}

fn eof_unchecked(c: f64) -> f64 {
    binary_entropy((1.0 - (1.0 - c * c).max(0.0).sqrt()) / 2.0)
}

/// `h((1 − √(1 − C²))/2)` with `h` the base-2 binary entropy.
pub fn eof_from_concurrence(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) {
        return Err(EntanglementError::OutOfRange(format!("concurrence must be in [0, 1], got {c}")));
    }
    Ok(eof_unchecked(c))
}

/// Concurrence of `p|A⟩⟨A| + (1 − p)ρ_S` for a triplet-supported `ρ_S`, from
/// the spectrum `{qλ₁, qλ₂, qλ₃, p}`.
pub fn admixture_concurrence(p: f64, rho_s: &DensityMatrix) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EntanglementError::OutOfRange(format!("singlet weight must be in [0, 1], got {p}")));
    }
    let w = rho_s.singlet_weight();
    if w.abs() > tolerances::SINGLET_DECOUPLED.max(tolerances::STATE_TRACE) {
        return Err(EntanglementError::InvalidState(format!(
            "state must be triplet-supported (singlet weight {w:.3e})"
        )));
    }
    let report = wootters_concurrence(rho_s)?;
    let q = 1.0 - p;
    let [l1, l2, l3, _] = report.lambdas;
    let mut spectrum = [q * l1, q * l2, q * l3, p];
    spectrum.sort_by(|a, b| b.total_cmp(a));
    Ok(wootters_formula(&spectrum))
}
