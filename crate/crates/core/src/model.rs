//! Physical parameters of the atom pair and the operators built from them.
//!
//! Rates are dimensionless multiples of the single-atom decay constant `Γ`.
//! Single-qubit states are ordered `(|e⟩, |g⟩)`, so two-atom product states
//! come out as `(|ee⟩, |eg⟩, |ge⟩, |gg⟩)`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::qcore::{kron, pauli, ComplexMatrix, C64};
use crate::tolerances;

/// Fine structure constant, as used in the photon-number scaling of `τ`.
pub const ALPHA: f64 = 1.0 / 137.0;

/// The decay constant every rate is measured against.
pub const GAMMA: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;

/// Interatomic geometry: distance `k₀r` and dipole orientation `|μ̂·r̂|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    pub k0r: f64,
    pub mu_dot_rhat: f64,
}

impl Geometry {
    pub fn new(k0r: f64, mu_dot_rhat: f64) -> Result<Self> {
        let g = Self { k0r, mu_dot_rhat };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k0r > 0.0) || !self.k0r.is_finite() {
            return Err(ModelError::InvalidGeometry(format!("k0r must be > 0, got {}", self.k0r)));
        }
        if !(0.0..=1.0).contains(&self.mu_dot_rhat) {
            return Err(ModelError::InvalidGeometry(format!(
                "|mu.rhat| must lie in [0, 1], got {}",
                self.mu_dot_rhat
            )));
        }
        Ok(())
    }
}

/// Inputs of the driven pair. `geometry` is absent when the couplings are
/// supplied directly instead of derived from the interatomic distance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomPairConfig {
    /// Detuning `Δ/Γ`.
    pub delta: f64,
    /// Drive amplitude `E/Γ`.
    pub drive: f64,
    pub geometry: Option<Geometry>,
}

impl AtomPairConfig {
    pub fn new(delta: f64, drive: f64, geometry: Option<Geometry>) -> Result<Self> {
        let cfg = Self { delta, drive, geometry };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Config without geometry; couplings come from [`Couplings::direct`].
    pub fn direct(delta: f64, drive: f64) -> Result<Self> {
        Self::new(delta, drive, None)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.drive >= 0.0) || !self.drive.is_finite() {
            return Err(ModelError::InvalidParameter(format!(
                "drive must be >= 0, got {}",
                self.drive
            )));
        }
        if !self.delta.is_finite() {
            return Err(ModelError::InvalidParameter("detuning must be finite".into()));
        }
        if let Some(g) = &self.geometry {
            g.validate()?;
        }
        Ok(())
    }

    /// Couplings derived from the geometry.
    pub fn couplings(&self) -> Result<Couplings> {
        let g = self
            .geometry
            .as_ref()
            .ok_or_else(|| ModelError::InvalidGeometry("no geometry given".into()))?;
        Couplings::from_geometry(g)
    }
}

/// Coherent dipole coupling `Ω/Γ` and cross-decay rate `Γ¹²/Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub omega: f64,
    pub gamma12: f64,
}

impl Couplings {
    pub fn from_geometry(g: &Geometry) -> Result<Self> {
        Ok(Self { omega: omega_dipole(g.k0r, g.mu_dot_rhat)?, gamma12: gamma_cross(g.k0r)? })
    }

    pub fn direct(omega: f64, gamma12: f64) -> Result<Self> {
        if !omega.is_finite() || !gamma12.is_finite() {
            return Err(ModelError::InvalidParameter("couplings must be finite".into()));
        }
        if gamma12.abs() > GAMMA {
            return Err(ModelError::InvalidParameter(format!(
                "|gamma12| must not exceed the single-atom rate 1, got {gamma12}"
            )));
        }
        Ok(Self { omega, gamma12 })
    }

    /// Point-like limit: `Γ¹² = Γ`.
    pub fn lamb_dicke(omega: f64) -> Self {
        Self { omega, gamma12: GAMMA }
    }

    /// Whether the antisymmetric state is decoupled from the decay.
    pub fn singlet_decoupled(&self) -> bool {
        (self.gamma12 - GAMMA).abs() <= tolerances::SINGLET_DECOUPLED
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

fn check_k0r(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidGeometry(format!("k0r must be > 0, got {x}")))
    }
}

/// Dipole-dipole coupling `Ω/Γ` for identical atoms at distance `x = k₀r`.
pub fn omega_dipole(x: f64, mu_dot_rhat: f64) -> Result<f64> {
    check_k0r(x)?;
    Geometry { k0r: x, mu_dot_rhat }.validate()?;
    let m2 = mu_dot_rhat * mu_dot_rhat;
    let (far, near) = if x < tolerances::SERIES_SWITCH {
        // cos x / x and (x sin x + cos x) / x³, six terms each.
        let mut far = 0.0;
        let mut near = 0.0;
        for n in 0..6 {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            let f = factorial(2 * n);
            far += sign * x.powi(2 * n as i32 - 1) / f;
            near += sign * (1.0 - 2.0 * n as f64) / f * x.powi(2 * n as i32 - 3);
        }
        (far, near)
    } else {
        (x.cos() / x, x.sin() / (x * x) + x.cos() / (x * x * x))
    };
    Ok(0.75 * GAMMA * (-(1.0 - m2) * far + (1.0 - 3.0 * m2) * near))
}

/// Cross-decay rate `Γ¹²/Γ` at distance `x = k₀r`.
///
/// Below [`tolerances::SERIES_SWITCH`] the series
/// `1 − x²/10 + x⁴/280 − …` replaces the cancelling closed form.
pub fn gamma_cross(x: f64) -> Result<f64> {
    check_k0r(x)?;
    if x < tolerances::SERIES_SWITCH {
        let s: f64 = (1..=6)
            .map(|n: u32| {
                let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * (2 * n) as f64 / factorial(2 * n + 1) * x.powi(2 * n as i32 - 2)
            })
            .sum();
        Ok(-3.0 * GAMMA * s)
    } else {
        Ok(-3.0 * GAMMA * (x.cos() / (x * x) - x.sin() / (x * x * x)))
    }
}

/// Lowering operators `(σ₋⁽¹⁾, σ₋⁽²⁾)` on the two-atom space.
pub fn lowering_operators() -> [ComplexMatrix; 2] {
    let id = pauli::identity();
    [kron(&pauli::lowering(), &id), kron(&id, &pauli::lowering())]
}

/// Two-atom Hamiltonian in the computational basis:
/// `Σᵢ [(Δ/2)σz⁽ⁱ⁾ + E(σ₊⁽ⁱ⁾ + σ₋⁽ⁱ⁾)] + Ω(σ₊⁽¹⁾σ₋⁽²⁾ + σ₋⁽¹⁾σ₊⁽²⁾)`.
///
/// Drive phases are a common gauge for a field polarised along the
/// interatomic axis, so the drive couplings are real.
pub fn build_hamiltonian(cfg: &AtomPairConfig, omega: f64) -> ComplexMatrix {
    let id = pauli::identity();
    let sz = pauli::z();
    let sx = pauli::x();
    let half_delta = C64::new(cfg.delta / 2.0, 0.0);
    let drive = C64::new(cfg.drive, 0.0);
    let local = (kron(&sz, &id) + kron(&id, &sz)) * half_delta
        + (kron(&sx, &id) + kron(&id, &sx)) * drive;
    let exchange = kron(&pauli::raising(), &pauli::lowering());
    let exchange = (&exchange + &exchange.dagger()) * C64::new(omega, 0.0);
    let h = local + exchange;
    // Assembled from Hermitian pieces; symmetrise away any round-off.
    h.hermitize()
}

/// Computational → coupled change of basis. Row `k` holds the computational
/// amplitudes of coupled state `k` in the order `(|+1⟩, |0⟩, |−1⟩, |A⟩)`.
pub fn basis_change() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, s, s, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, s, -s, 0.0],
    ])
}

/// Columns are the triplet states written in the computational basis (4×3).
pub fn triplet_embedding() -> ComplexMatrix {
    basis_change().block(0, 0, 3, 4).dagger()
}

/// The antisymmetric state `(|eg⟩ − |ge⟩)/√2` as computational amplitudes.
pub fn singlet_amplitudes() -> [C64; 4] {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    [z, s, -s, z]
}

/// `T · op · T†`: computational operator into the coupled basis.
pub fn to_coupled(op: &ComplexMatrix) -> ComplexMatrix {
    let t = basis_change();
    &t * op * t.dagger()
}

/// `T† · op · T`: coupled operator into the computational basis.
pub fn to_computational(op: &ComplexMatrix) -> ComplexMatrix {
    let t = basis_change();
    t.dagger() * op * &t
}

/// Non-Hermitian effective Hamiltonian in the coupled basis
/// `(|+1⟩, |0⟩, |−1⟩, |A⟩)`. The singlet row and column carry only the
/// diagonal entry `−Ω − i(Γ − Γ¹²)/2`.
pub fn build_effective_hamiltonian(cfg: &AtomPairConfig, c: &Couplings) -> ComplexMatrix {
    let d = cfg.delta;
    let e = std::f64::consts::SQRT_2 * cfg.drive;
    let g = GAMMA;
    let g12 = c.gamma12;
    let z = C64::new(0.0, 0.0);
    let r = |x: f64| C64::new(x, 0.0);
    ComplexMatrix::from_rows(&[
        &[C64::new(d, -g), r(e), z, z],
        &[r(e), C64::new(c.omega, -(g + g12) / 2.0), r(e), z],
        &[z, r(e), r(-d), z],
        &[z, z, z, C64::new(-c.omega, -(g - g12) / 2.0)],
    ])
}

/// `τ`, quality factor `Q` and photon number `n̄V` linking `Ω = τE²` to the
/// geometry in the point-like limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveScaling {
    pub tau: f64,
    pub q: f64,
    pub nbar_v: f64,
}

impl DriveScaling {
    pub fn new(tau: f64, q: f64, nbar_v: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("Q", q), ("nbarV", nbar_v)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ModelError::InvalidGeometry(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(Self { tau, q, nbar_v })
    }

    /// Interatomic distance realising this `τ`.
    pub fn k0r(&self) -> f64 {
        (3.0 / (4.0 * PI * ALPHA * self.tau * self.q * self.nbar_v)).cbrt()
    }

    /// `Ω/Γ = τE²` for a given drive.
    pub fn omega_for_drive(&self, drive: f64) -> f64 {
        self.tau * drive * drive
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidGeometry(format!("{name} must be > 0, got {v}")))
    }
}

/// `τ = (3/(4πα)) / ((k₀r)³ Q n̄V)`.
pub fn tau_of_geometry(k0r: f64, q: f64, nbar_v: f64) -> Result<f64> {
    positive("k0r", k0r)?;
    positive("Q", q)?;
    positive("nbarV", nbar_v)?;
    Ok(3.0 / (4.0 * PI * ALPHA) / (k0r.powi(3) * q * nbar_v))
}

/// Inverse of [`tau_of_geometry`] in `k₀r`.
pub fn k0r_for_tau(tau: f64, q: f64, nbar_v: f64) -> Result<f64> {
    Ok(DriveScaling::new(tau, q, nbar_v)?.k0r())
}
