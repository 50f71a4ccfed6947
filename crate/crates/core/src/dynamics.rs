//! Lindblad dynamics of the atom pair with correlated spontaneous decay.
//!
//! Density matrices are vectorized by column stacking, so that
//! `vec(A X B) = (Bᵀ ⊗ A) vec(X)`. The [`Liouvillian`] always acts on the
//! 4-dimensional computational space; [`restrict_triplet`] projects it onto
//! the symmetric sector when the antisymmetric state decouples.

use std::fmt;

use thiserror::Error;

use crate::model::{
    self, basis_change, build_hamiltonian, lowering_operators, triplet_embedding, AtomPairConfig,
    Couplings, ModelError, GAMMA,
};
use crate::qcore::{hermitian_eig, kron, null_vector, BasisTag, ComplexMatrix, LinalgError, C64};
use crate::tolerances;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("invalid density matrix: {0}")]
    InvalidState(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("steady state is not unique (kernel is degenerate); restrict to the triplet sector")]
    DegenerateKernel,
    #[error("analytic steady state needs a nonzero drive; the undriven state is |gg⟩")]
    InvalidRegime { fallback: Box<DensityMatrix> },
    #[error("step too large at t = {time}: trace drift {drift:.3e} with dt = {dt} (try halving dt)")]
    StepTooLarge { time: f64, dt: f64, drift: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

pub type Result<T> = std::result::Result<T, DynamicsError>;

/// Normalization of the decay terms relative to the unit rate `Γ`.
///
/// `Unit` weighs each term `Γ⁽ⁱʲ⁾(2σ₋ρσ₊ − σ₊σ₋ρ − ρσ₊σ₋)` by `1/2`, so an
/// isolated excited atom loses population at rate `Γ`; its no-jump part is
/// exactly [`model::build_effective_hamiltonian`].
///
/// `Half` uses weight `1/4`: every dissipative rate is halved relative to the
/// coherent couplings. The analytic triplet steady state
/// ([`analytic_steady_state`]) and its point-like limit
/// ([`lamb_dicke_limit_state`]) are exact stationary states in this scale and
/// in no other, which makes it the default.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecayScale {
    Unit,
    #[default]
    Half,
}

impl DecayScale {
    pub fn weight(self) -> f64 {
        match self {
            DecayScale::Unit => 0.5,
            DecayScale::Half => 0.25,
        }
    }
}

impl fmt::Display for DecayScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DecayScale::Unit => "unit",
            DecayScale::Half => "half",
        })
    }
}

impl std::str::FromStr for DecayScale {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "unit" => Ok(DecayScale::Unit),
            "half" => Ok(DecayScale::Half),
            other => Err(format!("unknown decay scale '{other}' (expected unit|half)")),
        }
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix with a basis tag.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    basis: BasisTag,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, basis: BasisTag) -> Result<Self> {
        let n = basis.dim();
        if matrix.shape() != (n, n) {
            return Err(DynamicsError::InvalidState(format!(
                "{basis} basis needs a {n}×{n} matrix, got {}×{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm = matrix.hermiticity_error();
        if herm > tolerances::STATE_HERMITIAN {
            return Err(DynamicsError::InvalidState(format!("not Hermitian ({herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tolerances::STATE_TRACE {
            return Err(DynamicsError::InvalidState(format!("trace is {tr}")));
        }
        let low = *hermitian_eig(&matrix)?.values.last().expect("nonempty");
        if low < -tolerances::STATE_PSD {
            return Err(DynamicsError::InvalidState(format!("negative eigenvalue {low:.3e}")));
        }
        Ok(Self { matrix, basis })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector.
    pub fn pure(amplitudes: &[C64], basis: BasisTag) -> Result<Self> {
        Self::new(ComplexMatrix::outer(amplitudes, amplitudes), basis)
    }

    pub(crate) fn from_parts_unchecked(matrix: ComplexMatrix, basis: BasisTag) -> Self {
        Self { matrix, basis }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eig(&self.matrix).map(|e| e.values).unwrap_or_default()
    }

    /// The same state on `(|ee⟩, |eg⟩, |ge⟩, |gg⟩)`.
    pub fn to_computational(&self) -> DensityMatrix {
        let m = match self.basis {
            BasisTag::Computational => self.matrix.clone(),
            BasisTag::Coupled => model::to_computational(&self.matrix),
            BasisTag::TripletOnly => {
                let u = triplet_embedding();
                &u * &self.matrix * u.dagger()
            }
        };
        Self::from_parts_unchecked(m.hermitize(), BasisTag::Computational)
    }

    /// The same state on `(|+1⟩, |0⟩, |−1⟩, |A⟩)`.
    pub fn to_coupled(&self) -> DensityMatrix {
        let m = match self.basis {
            BasisTag::Coupled => self.matrix.clone(),
            BasisTag::Computational => model::to_coupled(&self.matrix),
            BasisTag::TripletOnly => {
                let mut m = ComplexMatrix::zeros(4, 4);
                for i in 0..3 {
                    for j in 0..3 {
                        m[(i, j)] = self.matrix[(i, j)];
                    }
                }
                m
            }
        };
        Self::from_parts_unchecked(m.hermitize(), BasisTag::Coupled)
    }

    /// Population of the antisymmetric state `|A⟩`.
    pub fn singlet_weight(&self) -> f64 {
        match self.basis {
            BasisTag::TripletOnly => 0.0,
            _ => self.to_coupled().matrix[(3, 3)].re,
        }
    }

    /// Coupled-basis populations `(ρ₁₁, ρ₂₂, ρ₃₃, ρ₄₄)` of `(|+1⟩, |0⟩, |−1⟩, |A⟩)`.
    pub fn coupled_populations(&self) -> [f64; 4] {
        let c = self.to_coupled();
        [0, 1, 2, 3].map(|k| c.matrix[(k, k)].re)
    }
}

/// Superoperator of the master equation on column-stacked 4×4 matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    matrix: ComplexMatrix,
    basis: BasisTag,
}

impl Liouvillian {
    /// Wraps a raw superoperator on `n×n` matrices (`n² × n²`).
    pub fn from_matrix(matrix: ComplexMatrix, basis: BasisTag) -> Result<Self> {
        let n = basis.dim();
        if matrix.shape() != (n * n, n * n) {
            return Err(DynamicsError::InvalidParameter(format!(
                "superoperator must be {0}×{0}",
                n * n
            )));
        }
        Ok(Self { matrix, basis })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> BasisTag {
        self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `L(ρ)` as a matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let v = &self.matrix * &rho.vectorize();
        ComplexMatrix::unvectorize(&v, self.dim()).expect("shape fixed at construction")
    }
}

/// `vec(A X) = (I ⊗ A) vec(X)`.
fn left_mul(a: &ComplexMatrix) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(a.nrows()), a)
}

/// `vec(X B) = (Bᵀ ⊗ I) vec(X)`.
fn right_mul(b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), &ComplexMatrix::identity(b.nrows()))
}

/// `vec(A X B) = (Bᵀ ⊗ A) vec(X)`.
fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), a)
}

/// Superoperator of `−i[H, ρ] + w Σᵢⱼ Γ⁽ⁱʲ⁾(2σ₋⁽ⁱ⁾ρσ₊⁽ʲ⁾ − σ₊⁽ⁱ⁾σ₋⁽ʲ⁾ρ − ρσ₊⁽ⁱ⁾σ₋⁽ʲ⁾)`
/// in the default [`DecayScale`].
pub fn build_liouvillian(cfg: &AtomPairConfig, c: &Couplings) -> Liouvillian {
    build_liouvillian_with(cfg, c, DecayScale::default())
}

pub fn build_liouvillian_with(cfg: &AtomPairConfig, c: &Couplings, scale: DecayScale) -> Liouvillian {
    let h = build_hamiltonian(cfg, c.omega);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = (left_mul(&h) - right_mul(&h)) * minus_i;

    let ops = lowering_operators();
    let rates = [[GAMMA, c.gamma12], [c.gamma12, GAMMA]];
    let w = scale.weight();
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            let rate = C64::new(w * rates[i][j], 0.0);
            let ad_b = a.dagger() * b;
            let term = sandwich(a, &b.dagger()).scale_real(2.0) - left_mul(&ad_b) - right_mul(&ad_b);
            l += &(term * rate);
        }
    }
    Liouvillian { matrix: l, basis: BasisTag::Computational }
}

fn state_from_null_vector(v: &ComplexMatrix, n: usize, basis: BasisTag) -> Result<DensityMatrix> {
    let m = ComplexMatrix::unvectorize(v, n)?;
    let tr = m.trace();
    if tr.norm() < 1e-300 {
        return Err(DynamicsError::InvalidState("kernel vector is traceless".into()));
    }
    let m = m.scale(tr.inv()).hermitize();
    DensityMatrix::new(m, basis)
}

/// Unique stationary state from the kernel of the full superoperator.
///
/// Fails with [`DynamicsError::DegenerateKernel`] when the kernel is more than
/// one-dimensional, which happens when `Γ¹² = Γ` (the antisymmetric state no
/// longer decays); use [`restrict_triplet`] or [`solve_steady_state`] there.
pub fn steady_state_numeric(l: &Liouvillian) -> Result<DensityMatrix> {
    let nv = null_vector(&l.matrix)?;
    if nv.degenerate {
        return Err(DynamicsError::DegenerateKernel);
    }
    state_from_null_vector(&nv.vector, l.dim(), l.basis)
}

/// Projection of the superoperator onto 3×3 triplet blocks, `P L E` with
/// `E(r) = U r U†` and `P(ρ) = U† ρ U`, `U` the 4×3 triplet embedding.
pub fn restrict_triplet(l: &Liouvillian) -> ComplexMatrix {
    let u = match l.basis {
        BasisTag::Computational => triplet_embedding(),
        // Coupled basis: triplet states are the first three unit vectors.
        _ => ComplexMatrix::identity(4).block(0, 0, 4, 3),
    };
    let embed = kron(&u.conj(), &u);
    let project = kron(&u.transpose(), &u.dagger());
    project * &l.matrix * embed
}

/// Stationary state of the triplet-restricted superoperator.
pub fn triplet_steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let l3 = restrict_triplet(l);
    let nv = null_vector(&l3)?;
    state_from_null_vector(&nv.vector, 3, BasisTag::TripletOnly)
}

/// Outcome of [`solve_steady_state`].
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    /// Stationary state in the computational basis.
    pub state: DensityMatrix,
    /// Whether the solve was restricted to the triplet sector.
    pub triplet_restricted: bool,
}

impl SteadyState {
    pub fn singlet_weight(&self) -> f64 {
        self.state.singlet_weight()
    }
}

/// Steady state for a parameter point, restricting to the triplet sector when
/// the antisymmetric state decouples (`Γ¹² = Γ`) or the kernel is numerically
/// degenerate. Under the symmetric drive the triplet sector is invariant, so
/// the restricted state is stationary for the full problem as well.
pub fn solve_steady_state(
    cfg: &AtomPairConfig,
    c: &Couplings,
    scale: DecayScale,
) -> Result<SteadyState> {
    let l = build_liouvillian_with(cfg, c, scale);
    if !c.singlet_decoupled() {
        match steady_state_numeric(&l) {
            Ok(state) => return Ok(SteadyState { state, triplet_restricted: false }),
            Err(DynamicsError::DegenerateKernel) => {}
            Err(e) => return Err(e),
        }
    }
    let trip = triplet_steady_state(&l)?;
    Ok(SteadyState { state: trip.to_computational(), triplet_restricted: true })
}

/// Unnormalized analytic triplet steady state at `Δ = 0`, `Γ¹² = Γ`, on
/// `(|+1⟩, |0⟩, |−1⟩)`.
pub fn analytic_steady_state_unnormalized(omega: f64, drive: f64) -> ComplexMatrix {
    let (o, e) = (omega, drive);
    let e2 = e * e;
    let s2 = std::f64::consts::SQRT_2;
    let c = C64::new;
    let i = c(0.0, 1.0);
    let r11 = c(64.0 * e2 * e2, 0.0);
    let r12 = c(0.0, -16.0 * e2 * e * s2);
    let r13 = c(8.0 * e2, 0.0) * (i * (2.0 * o) - 1.0);
    let r21 = c(0.0, 16.0 * e2 * e * s2);
    let r22 = c(8.0 * e2 * (1.0 + 8.0 * e2), 0.0);
    let r23 = c(-2.0 * e * s2, 0.0) * (c(2.0 * o, 0.0) + i + i * (8.0 * e2));
    let r31 = c(-8.0 * e2, 0.0) * (i * (2.0 * o) + 1.0);
    let r32 = c(-2.0 * e * s2, 0.0) * (c(2.0 * o, 0.0) - i - i * (8.0 * e2));
    let r33 = c(4.0 * (o * o + 2.0 * e2 + 16.0 * e2 * e2) + 1.0, 0.0);
    ComplexMatrix::from_rows(&[&[r11, r12, r13], &[r21, r22, r23], &[r31, r32, r33]])
}

/// Normalized analytic triplet steady state (see
/// [`analytic_steady_state_unnormalized`]). At zero drive this is `|gg⟩`,
/// returned as the `fallback` of [`DynamicsError::InvalidRegime`].
pub fn analytic_steady_state(omega: f64, drive: f64) -> Result<DensityMatrix> {
    if !(drive >= 0.0) || !drive.is_finite() || !omega.is_finite() {
        return Err(DynamicsError::InvalidParameter(format!(
            "need finite Ω and E >= 0, got Ω={omega}, E={drive}"
        )));
    }
    if drive == 0.0 {
        let gg = ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]);
        return Err(DynamicsError::InvalidRegime {
            fallback: Box::new(DensityMatrix::from_parts_unchecked(gg, BasisTag::TripletOnly)),
        });
    }
    let m = analytic_steady_state_unnormalized(omega, drive);
    let n = m.trace();
    DensityMatrix::new(m.scale(n.inv()).hermitize(), BasisTag::TripletOnly)
}

/// Point-like, strong-drive limit with `Ω = τE²`:
/// `[[16, 0, 4iτ], [0, 16, 0], [−4iτ, 0, 16 + τ²]] / (τ² + 48)`.
pub fn lamb_dicke_limit_state(tau: f64) -> Result<DensityMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(DynamicsError::InvalidParameter(format!("tau must be > 0, got {tau}")));
    }
    let n = tau * tau + 48.0;
    let c = |re: f64, im: f64| C64::new(re / n, im / n);
    let m = ComplexMatrix::from_rows(&[
        &[c(16.0, 0.0), c(0.0, 0.0), c(0.0, 4.0 * tau)],
        &[c(0.0, 0.0), c(16.0, 0.0), c(0.0, 0.0)],
        &[c(0.0, -4.0 * tau), c(0.0, 0.0), c(16.0 + tau * tau, 0.0)],
    ]);
    DensityMatrix::new(m, BasisTag::TripletOnly)
}

/// States sampled at every integration step, starting at `t = 0`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states.last().expect("trajectory holds the initial state")
    }
}

/// Classical fourth-order Runge-Kutta integration of `ρ̇ = L ρ`, calling
/// `observe(t, ρ)` after every step (and once at `t = 0`).
///
/// The step is shrunk so that an integer number of steps lands on `t_final`.
pub fn propagate_with(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    mut observe: impl FnMut(f64, &DensityMatrix),
) -> Result<DensityMatrix> {
    rho0.basis().expect(l.basis)?;
    if !(dt > 0.0) || !(t_final >= dt) {
        return Err(DynamicsError::InvalidParameter(format!(
            "need dt > 0 and t_final >= dt, got dt={dt}, t_final={t_final}"
        )));
    }
    let n = l.dim();
    let steps = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_final / steps as f64;
    let half = C64::new(h / 2.0, 0.0);
    let full = C64::new(h, 0.0);
    let sixth = C64::new(h / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let lm = &l.matrix;

    let mut v = rho0.matrix().vectorize();
    let mut current = rho0.clone();
    observe(0.0, &current);
    for k in 1..=steps {
        let k1 = lm * &v;
        let k2 = lm * &(&v + &(&k1 * half));
        let k3 = lm * &(&v + &(&k2 * half));
        let k4 = lm * &(&v + &(&k3 * full));
        let incr = (k1 + &(k2 * two) + &(k3 * two) + &k4) * sixth;
        v += &incr;

        let t = k as f64 * h;
        let m = ComplexMatrix::unvectorize(&v, n)?.hermitize();
        let drift = (m.trace() - C64::new(1.0, 0.0)).norm();
        let blown = !m.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
            || m.max_abs() > 1.0 + tolerances::TRACE_DRIFT;
        if drift > tolerances::TRACE_DRIFT || blown {
            return Err(DynamicsError::StepTooLarge { time: t, dt: h, drift });
        }
        v = m.vectorize();
        current = DensityMatrix::from_parts_unchecked(m, l.basis);
        observe(t, &current);
    }
    Ok(current)
}

/// [`propagate_with`], collecting every step.
pub fn propagate(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
) -> Result<Trajectory> {
    let mut traj = Trajectory { times: Vec::new(), states: Vec::new() };
    propagate_with(l, rho0, t_final, dt, |t, rho| {
        traj.times.push(t);
        traj.states.push(rho.clone());
    })?;
    Ok(traj)
}

/// `|gg⟩⟨gg|` in the computational basis.
pub fn ground_state() -> DensityMatrix {
    DensityMatrix::from_parts_unchecked(
        ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 0.0, 1.0]),
        BasisTag::Computational,
    )
}

/// Coupled-basis change matrix, re-exported for callers assembling states.
pub fn coupled_basis() -> ComplexMatrix {
    basis_change()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::singlet_amplitudes;

    fn lamb_dicke(delta: f64, drive: f64, omega: f64) -> (AtomPairConfig, Couplings) {
        (AtomPairConfig::direct(delta, drive).unwrap(), Couplings::lamb_dicke(omega))
    }

    #[test]
    fn density_matrix_validation() {
        let bad_trace = ComplexMatrix::from_real_diagonal(&[0.5, 0.6, 0.0]);
        assert!(DensityMatrix::new(bad_trace, BasisTag::TripletOnly).is_err());
        let negative = ComplexMatrix::from_real_diagonal(&[1.1, -0.1, 0.0, 0.0]);
        assert!(DensityMatrix::new(negative, BasisTag::Computational).is_err());
        let wrong_dim = ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0]);
        assert!(DensityMatrix::new(wrong_dim, BasisTag::Coupled).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), BasisTag::Coupled)
            .is_ok());
    }

    #[test]
    fn singlet_is_stationary_when_decoupled() {
        let (cfg, c) = lamb_dicke(0.0, 1.3, 2.0);
        let l = build_liouvillian(&cfg, &c);
        let a = DensityMatrix::pure(&singlet_amplitudes(), BasisTag::Computational).unwrap();
        assert!(l.apply(a.matrix()).max_abs() < 1e-14);
    }

    #[test]
    fn undriven_steady_state_is_ground() {
        let cfg = AtomPairConfig::direct(0.0, 0.0).unwrap();
        let c = Couplings::direct(3.0, 0.4).unwrap();
        let rho = steady_state_numeric(&build_liouvillian(&cfg, &c)).unwrap();
        assert!(rho.matrix().max_abs_diff(ground_state().matrix()) < 1e-10);
    }

    #[test]
    fn decoupled_singlet_gives_degenerate_kernel() {
        let (cfg, c) = lamb_dicke(0.0, 1.0, 2.0);
        let l = build_liouvillian(&cfg, &c);
        assert_eq!(steady_state_numeric(&l), Err(DynamicsError::DegenerateKernel));
        let ss = solve_steady_state(&cfg, &c, DecayScale::default()).unwrap();
        assert!(ss.triplet_restricted);
        assert!(ss.singlet_weight().abs() < 1e-12);
    }

    #[test]
    fn triplet_restriction_without_drive() {
        let (cfg, c) = lamb_dicke(0.0, 0.0, 1.5);
        let rho = triplet_steady_state(&build_liouvillian(&cfg, &c)).unwrap();
        let gg = ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]);
        assert!(rho.matrix().max_abs_diff(&gg) < 1e-10);
    }

    #[test]
    fn restricted_superoperator_preserves_trace() {
        let (cfg, c) = lamb_dicke(0.3, 1.2, 0.7);
        let l3 = restrict_triplet(&build_liouvillian(&cfg, &c));
        let tr = ComplexMatrix::identity(3).vectorize().dagger();
        assert!((tr * &l3).max_abs() < 1e-12);
    }

    #[test]
    fn analytic_state_zero_drive_fallback() {
        match analytic_steady_state(2.0, 0.0) {
            Err(DynamicsError::InvalidRegime { fallback }) => {
                assert_eq!(fallback.matrix()[(2, 2)], C64::new(1.0, 0.0));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(analytic_steady_state(2.0, -1.0).is_err());
    }

    #[test]
    fn analytic_state_weak_drive_tends_to_ground() {
        let rho = analytic_steady_state(1.0, 1e-6).unwrap();
        let gg = ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]);
        assert!(rho.matrix().max_abs_diff(&gg) < 1e-5);
    }

    #[test]
    fn lamb_dicke_state_properties() {
        for tau in [0.5, 2.0, 9.21, 100.0] {
            let rho = lamb_dicke_limit_state(tau).unwrap();
            assert!((rho.matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
        let far = lamb_dicke_limit_state(1e8).unwrap();
        let gg = ComplexMatrix::from_real_diagonal(&[0.0, 0.0, 1.0]);
        assert!(far.matrix().max_abs_diff(&gg) < 1e-7);
        assert!(lamb_dicke_limit_state(0.0).is_err());
    }

    #[test]
    fn propagate_rejects_bad_steps_and_bases() {
        let (cfg, c) = lamb_dicke(0.0, 1.0, 1.0);
        let l = build_liouvillian(&cfg, &c);
        let g = ground_state();
        assert!(propagate(&l, &g, 1.0, 0.0).is_err());
        assert!(propagate(&l, &g, 0.01, 0.1).is_err());
        let trip = lamb_dicke_limit_state(3.0).unwrap();
        assert!(matches!(
            propagate(&l, &trip, 1.0, 0.1),
            Err(DynamicsError::Linalg(LinalgError::BasisMismatch { .. }))
        ));
    }

    #[test]
    fn propagate_flags_unstable_step() {
        let (cfg, c) = lamb_dicke(0.0, 50.0, 200.0);
        let l = build_liouvillian(&cfg, &c);
        let r = propagate(&l, &ground_state(), 5.0, 0.5);
        assert!(matches!(r, Err(DynamicsError::StepTooLarge { .. })), "{r:?}");
    }

    #[test]
    fn zero_superoperator_keeps_state() {
        let l = Liouvillian::from_matrix(ComplexMatrix::zeros(16, 16), BasisTag::Computational)
            .unwrap();
        let rho = lamb_dicke_limit_state(4.0).unwrap().to_computational();
        let traj = propagate(&l, &rho, 1.0, 0.1).unwrap();
        assert_eq!(traj.states.len(), 11);
        for s in &traj.states {
            assert!(s.matrix().max_abs_diff(rho.matrix()) < 1e-15);
        }
    }

    #[test]
    fn decay_scale_parses() {
        assert_eq!("half".parse::<DecayScale>().unwrap(), DecayScale::Half);
        assert_eq!("unit".parse::<DecayScale>().unwrap(), DecayScale::Unit);
        assert!("double".parse::<DecayScale>().is_err());
        assert_eq!(DecayScale::default(), DecayScale::Half);
    }

    fn direct_rhs(cfg: &AtomPairConfig, c: &Couplings, scale: DecayScale, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = build_hamiltonian(cfg, c.omega);
        let mut out = (&h * rho - rho * &h) * C64::new(0.0, -1.0);
        let ops = lowering_operators();
        let rates = [[GAMMA, c.gamma12], [c.gamma12, GAMMA]];
        for i in 0..2 {
            for j in 0..2 {
                let (a, b) = (&ops[i], &ops[j]);
                let ad_b = a.dagger() * b;
                let term = (a * rho * b.dagger()).scale_real(2.0) - &ad_b * rho - rho * &ad_b;
                out += &term.scale_real(scale.weight() * rates[i][j]);
            }
        }
        out
    }

    fn lcg_matrix(seed: &mut u64) -> ComplexMatrix {
        let mut next = || {
            *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        ComplexMatrix::from_fn(4, 4, |_, _| C64::new(next(), next()))
    }

    #[test]
    fn superoperator_matches_direct_evaluation() {
        let cfg = AtomPairConfig::direct(0.37, 1.4).unwrap();
        let c = Couplings::direct(-0.8, 0.55).unwrap();
        let mut seed = 7;
        for scale in [DecayScale::Unit, DecayScale::Half] {
            let l = build_liouvillian_with(&cfg, &c, scale);
            for _ in 0..20 {
                let x = lcg_matrix(&mut seed);
                let diff = l.apply(&x).max_abs_diff(&direct_rhs(&cfg, &c, scale, &x));
                assert!(diff < 1e-13, "{diff}");
            }
        }
    }

    #[test]
    fn superoperator_is_trace_preserving() {
        let cfg = AtomPairConfig::direct(1.1, 2.0).unwrap();
        let c = Couplings::direct(0.3, -0.2).unwrap();
        let tr = ComplexMatrix::identity(4).vectorize().dagger();
        for scale in [DecayScale::Unit, DecayScale::Half] {
            let l = build_liouvillian_with(&cfg, &c, scale);
            assert!((&tr * l.matrix()).max_abs() < 1e-13);
        }
    }

    fn triplet_residual(scale: DecayScale, omega: f64, drive: f64, state: &ComplexMatrix) -> f64 {
        let (cfg, c) = lamb_dicke(0.0, drive, omega);
        let l3 = restrict_triplet(&build_liouvillian_with(&cfg, &c, scale));
        (&l3 * &state.vectorize()).max_abs()
    }

    #[test]
    fn analytic_state_is_stationary_in_half_scale() {
        for omega in [-3.0, 0.0, 0.5, 2.0, 10.0] {
            for drive in [0.1, 1.0, 4.0] {
                let rho = analytic_steady_state(omega, drive).unwrap();
                let r = triplet_residual(DecayScale::Half, omega, drive, rho.matrix());
                assert!(r < 1e-12, "Ω={omega} E={drive}: {r}");
            }
        }
    }

    #[test]
    fn unit_scale_matches_analytic_state_at_half_couplings() {
        let (omega, drive) = (2.0, 1.0);
        let rho = analytic_steady_state(omega, drive).unwrap();
        assert!(triplet_residual(DecayScale::Unit, omega, drive, rho.matrix()) > 1e-3);
        let (cfg, c) = lamb_dicke(0.0, 2.0 * drive, 2.0 * omega);
        let numeric = triplet_steady_state(&build_liouvillian_with(&cfg, &c, DecayScale::Unit)).unwrap();
        assert!(numeric.matrix().max_abs_diff(rho.matrix()) < 1e-10);
    }

    #[test]
    fn strong_drive_approaches_point_like_limit() {
        let tau = 9.21;
        let drive = 300.0;
        let rho = analytic_steady_state(tau * drive * drive, drive).unwrap();
        let limit = lamb_dicke_limit_state(tau).unwrap();
        assert!(rho.matrix().max_abs_diff(limit.matrix()) < 1e-3);
    }

    #[test]
    fn propagation_reaches_steady_state() {
        let cfg = AtomPairConfig::direct(0.2, 0.8).unwrap();
        let c = Couplings::direct(1.5, 0.4).unwrap();
        let scale = DecayScale::default();
        let l = build_liouvillian_with(&cfg, &c, scale);
        let ss = solve_steady_state(&cfg, &c, scale).unwrap();
        let last = propagate_with(&l, &ground_state(), 200.0, 0.01, |_, _| {}).unwrap();
        assert!(last.matrix().max_abs_diff(ss.state.matrix()) < 1e-6);
    }

    #[test]
    fn undriven_excited_pair_decays_to_ground() {
        let cfg = AtomPairConfig::direct(0.0, 0.0).unwrap();
        let c = Couplings::direct(0.7, 0.3).unwrap();
        let l = build_liouvillian_with(&cfg, &c, DecayScale::Unit);
        let ee = DensityMatrix::new(ComplexMatrix::from_real_diagonal(&[1.0, 0.0, 0.0, 0.0]), BasisTag::Computational).unwrap();
        let traj = propagate(&l, &ee, 60.0, 0.01).unwrap();
        assert!(traj.last().matrix().max_abs_diff(ground_state().matrix()) < 1e-10);
        // |ee⟩ population decays at the two-atom rate 2Γ.
        let k = traj.times.iter().position(|&t| (t - 1.0).abs() < 1e-9).unwrap();
        assert!((traj.states[k].matrix()[(0, 0)].re - (-2.0f64).exp()).abs() < 1e-8);
    }
}
