//! Closed-form eigenstructure of the driven pair in the symmetric sector.

use std::f64::consts::{PI, SQRT_2};

use thiserror::Error;

use crate::model::{self, AtomPairConfig};
use crate::qcore::{hermitian_eig, ComplexMatrix, LinalgError, C64};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("dressed states undefined at E = 0 and Ω = 0 (fully degenerate)")]
    DegenerateDrive,
    #[error("state is not normalized (|ψ|² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, SpectralError>;

/// Hamiltonian restricted to the triplet `(|+1⟩, |0⟩, |−1⟩)`.
pub fn triplet_block(delta: f64, omega: f64, drive: f64) -> ComplexMatrix {
    let e = SQRT_2 * drive;
    ComplexMatrix::from_real_rows(&[&[delta, e, 0.0], &[e, omega, e], &[0.0, e, -delta]])
}

/// Roots of `ε³ − Ωε² − (Δ² + 4E²)ε + Δ²Ω = 0`, descending.
///
/// All three roots are real since the polynomial is the characteristic
/// polynomial of a real symmetric block. The trigonometric formula is used
/// unless the discriminant is too close to zero, where the eigensolver is
/// more reliable.
pub fn triplet_cubic_roots(delta: f64, omega: f64, drive: f64) -> [f64; 3] {
    let a = -omega;
    let b = -(delta * delta + 4.0 * drive * drive);
    let c = delta * delta * omega;
    let p = b - a * a / 3.0;
    let q = 2.0 * a.powi(3) / 27.0 - a * b / 3.0 + c;
    // 4p³ + 27q² ≤ 0 for three real roots; compare on the scale of the coefficients.
    let scale = omega.abs().max(delta.abs()).max(drive.abs()).max(1.0).powi(6);
    let disc = -(4.0 * p.powi(3) + 27.0 * q * q);
    let mut roots = if p >= 0.0 || disc <= tolerances::CUBIC_DISCRIMINANT * scale {
        let values = hermitian_eig(&triplet_block(delta, omega, drive))
            .expect("triplet block is Hermitian")
            .values;
        [values[0], values[1], values[2]]
    } else {
        let r = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        let shift = -a / 3.0;
        [0, 1, 2].map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos() + shift)
    };
    roots.sort_by(|x, y| y.total_cmp(x));
    roots
}

/// A normalized eigenvector of the triplet block.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    /// Amplitudes on `(|+1⟩, |0⟩, |−1⟩)`.
    pub amplitudes: [C64; 3],
    pub eigenvalue: f64,
}

impl DressedState {
    fn from_real(v: [f64; 3], eigenvalue: f64) -> Self {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        Self { amplitudes: v.map(|x| C64::new(x / norm, 0.0)), eigenvalue }
    }

    /// Amplitudes on `(|ee⟩, |eg⟩, |ge⟩, |gg⟩)`.
    pub fn to_computational(&self) -> [C64; 4] {
        let [p, z, m] = self.amplitudes;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        [p, z * s, z * s, m]
    }

    pub fn column(&self) -> ComplexMatrix {
        ComplexMatrix::column(&self.amplitudes)
    }
}

/// Dressed states `(ψ₊, ψ₀, ψ₋)` of the resonant (`Δ = 0`) triplet block.
///
/// `ψ± ∝ (√2E, ε±, √2E)` with `ε± = Ω/2 ± √(Ω² + 16E²)/2`, and
/// `ψ₀ = (|+1⟩ − |−1⟩)/√2` at energy zero.
pub fn dressed_eigensystem(omega: f64, drive: f64) -> Result<[DressedState; 3]> {
    if !(drive >= 0.0) {
        return Err(SpectralError::InvalidParameter(format!("drive must be >= 0, got {drive}")));
    }
    if drive == 0.0 && omega == 0.0 {
        return Err(SpectralError::DegenerateDrive);
    }
    let root = (omega * omega + 16.0 * drive * drive).sqrt();
    let eps_plus = omega / 2.0 + root / 2.0;
    let eps_minus = omega / 2.0 - root / 2.0;
    let e = SQRT_2 * drive;
    let dressed = |eps: f64| {
        if drive == 0.0 {
            // Only the |0⟩ branch survives (ε = Ω); the other branch is the
            // E → 0⁺ limit of (√2E, ε, √2E), which is (1, 0, 1)/√2.
            if eps == 0.0 {
                DressedState::from_real([1.0, 0.0, 1.0], 0.0)
            } else {
                DressedState::from_real([0.0, 1.0, 0.0], eps)
            }
        } else {
            DressedState::from_real([e, eps, e], eps)
        }
    };
    let psi0 = DressedState::from_real([1.0, 0.0, -1.0], 0.0);
    Ok([dressed(eps_plus), psi0, dressed(eps_minus)])
}

/// `C = 2|c_ee c_gg − c_eg c_ge|` for a normalized two-qubit pure state.
pub fn pure_concurrence(state: &[C64; 4]) -> Result<f64> {
    let norm_sqr: f64 = state.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - 1.0).abs() > tolerances::STATE_NORM {
        return Err(SpectralError::NotNormalized { norm_sqr });
    }
    let [ee, eg, ge, gg] = *state;
    Ok((2.0 * (ee * gg - eg * ge).norm()).min(1.0))
}

/// Triplet roots (descending) and the singlet energy `−Ω`.
pub fn hamiltonian_spectrum(cfg: &AtomPairConfig, omega: f64) -> ([f64; 3], f64) {
    (triplet_cubic_roots(cfg.delta, omega, cfg.drive), -omega)
}

/// Numeric eigenvalues of the full 4×4 Hamiltonian, for cross-checks.
pub fn hamiltonian_eigenvalues(cfg: &AtomPairConfig, omega: f64) -> Result<Vec<f64>> {
    Ok(hermitian_eig(&model::build_hamiltonian(cfg, omega))?.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn undriven_roots_are_delta_omega_minus_delta() {
        let (d, o) = (0.8, 2.5);
        let r = triplet_cubic_roots(d, o, 0.0);
        assert!(close(&r, &[2.5, 0.8, -0.8], 1e-10), "{r:?}");
        let r = triplet_cubic_roots(3.0, 1.0, 0.0);
        assert!(close(&r, &[3.0, 1.0, -3.0], 1e-10), "{r:?}");
    }

    #[test]
    fn resonant_roots_match_dressed_energies() {
        let (o, e): (f64, f64) = (1.3, 0.7);
        let root = (o * o + 16.0 * e * e).sqrt();
        let r = triplet_cubic_roots(0.0, o, e);
        assert!(close(&r, &[o / 2.0 + root / 2.0, 0.0, o / 2.0 - root / 2.0], 1e-10));
    }

    #[test]
    fn degenerate_cubic_falls_back() {
        assert!(close(&triplet_cubic_roots(0.0, 0.0, 0.0), &[0.0, 0.0, 0.0], 1e-12));
        // Δ = Ω with E = 0 gives a double root.
        assert!(close(&triplet_cubic_roots(1.0, 1.0, 0.0), &[1.0, 1.0, -1.0], 1e-10));
    }

    #[test]
    fn dressed_states_are_eigenvectors() {
        for (o, e) in [(1.0, 0.5), (-2.0, 3.0), (0.0, 1.0), (10.0, 0.01)] {
            let h = triplet_block(0.0, o, e);
            for psi in dressed_eigensystem(o, e).unwrap() {
                let v = psi.column();
                let r = &h * &v - v.scale_real(psi.eigenvalue);
                assert!(r.max_abs() < 1e-10, "Ω={o} E={e}");
                assert!((v.frobenius_norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dressed_energies_without_coupling() {
        let e = 0.9;
        let [p, _, m] = dressed_eigensystem(0.0, e).unwrap();
        assert!((p.eigenvalue - 2.0 * e).abs() < 1e-14);
        assert!((m.eigenvalue + 2.0 * e).abs() < 1e-14);
    }

    #[test]
    fn weak_drive_lower_state_is_maximally_entangled() {
        let [_, _, m] = dressed_eigensystem(1.0, 1e-8).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((m.amplitudes[0].re - s).abs() < 1e-7);
        assert!(m.amplitudes[1].norm() < 1e-7);
        assert!((pure_concurrence(&m.to_computational()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn psi_zero_sign_convention() {
        let [_, z, _] = dressed_eigensystem(2.0, 1.0).unwrap();
        assert!(z.amplitudes[0].re > 0.0);
        assert_eq!(z.eigenvalue, 0.0);
    }

    #[test]
    fn degenerate_drive_rejected() {
        assert_eq!(dressed_eigensystem(0.0, 0.0), Err(SpectralError::DegenerateDrive));
    }

    #[test]
    fn pure_concurrence_basic_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let singlet = [z, C64::new(s, 0.0), C64::new(-s, 0.0), z];
        assert!((pure_concurrence(&singlet).unwrap() - 1.0).abs() < 1e-15);
        let gg = [z, z, z, C64::new(1.0, 0.0)];
        assert_eq!(pure_concurrence(&gg).unwrap(), 0.0);
        let bad = [z, z, z, C64::new(2.0, 0.0)];
        assert!(matches!(pure_concurrence(&bad), Err(SpectralError::NotNormalized { .. })));
    }

    #[test]
    fn dressed_concurrence_closed_form() {
        for (o, e) in [(1.0_f64, 0.5_f64), (3.0, 2.0), (-1.5, 0.2)] {
            let [p, _, m] = dressed_eigensystem(o, e).unwrap();
            for psi in [p, m] {
                let eps = psi.eigenvalue;
                let expected = (4.0 * e * e - eps * eps).abs() / (4.0 * e * e + eps * eps);
                let c = pure_concurrence(&psi.to_computational()).unwrap();
                assert!((c - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dressed_states_unentangled_without_coupling() {
        let [p, _, m] = dressed_eigensystem(0.0, 1.7).unwrap();
        assert!(pure_concurrence(&p.to_computational()).unwrap() < 1e-12);
        assert!(pure_concurrence(&m.to_computational()).unwrap() < 1e-12);
    }

    #[test]
    fn spectrum_agrees_with_full_hamiltonian() {
        let cfg = AtomPairConfig::direct(0.4, 1.1).unwrap();
        let (trip, singlet) = hamiltonian_spectrum(&cfg, 0.9);
        let mut all = trip.to_vec();
        all.push(singlet);
        all.sort_by(|a, b| b.total_cmp(a));
        let numeric = hamiltonian_eigenvalues(&cfg, 0.9).unwrap();
        assert!(close(&all, &numeric, 1e-10));
    }
}
