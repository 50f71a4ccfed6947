//! Self-check suite: exact steady state, concurrence law and headline numbers.

use std::fmt;

use crate::dynamics::{
    analytic_steady_state_unnormalized, build_liouvillian_with, lamb_dicke_limit_state,
    restrict_triplet, triplet_steady_state, DecayScale,
};
use crate::entanglement::{closed_form_concurrence, eof_from_concurrence, wootters_concurrence};
use crate::model::{AtomPairConfig, Couplings};
use crate::qcore::{golden_section_max, ComplexMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        if self.expected == 0.0 {
            write!(f, "{} {:.3e} expected 0 tol {:e} {status}", self.name, self.value, self.tolerance)
        } else {
            write!(
                f,
                "{} {:.4} expected {:.4} tol {:e} {status}",
                self.name, self.value, self.expected, self.tolerance
            )
        }
    }
}

/// `n` evenly spaced points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// The `(Ω, E)` grid of the exact-solution checks.
pub fn exact_solution_grid() -> Vec<(f64, f64)> {
    let omegas = linspace(0.1, 20.0, 20);
    let drives = linspace(0.1, 10.0, 20);
    omegas.iter().flat_map(|&o| drives.iter().map(move |&e| (o, e))).collect()
}

fn point_like_liouvillian(omega: f64, drive: f64) -> crate::dynamics::Liouvillian {
    let cfg = AtomPairConfig::direct(0.0, drive).expect("grid drive is valid");
    build_liouvillian_with(&cfg, &Couplings::lamb_dicke(omega), DecayScale::Half)
}

fn normalized(m: ComplexMatrix) -> ComplexMatrix {
    let t = m.trace();
    m.scale(t.inv())
}

/// Largest `‖L₃ vec(ρ)‖∞` over the grid for states produced by `provider`
/// (unnormalized triplet matrices; they are trace-normalized here).
pub fn kernel_residual_with(provider: impl Fn(f64, f64) -> ComplexMatrix) -> CheckResult {
    let value = exact_solution_grid()
        .into_iter()
        .map(|(o, e)| {
            let l3 = restrict_triplet(&point_like_liouvillian(o, e));
            (&l3 * &normalized(provider(o, e)).vectorize()).max_abs()
        })
        .fold(0.0, f64::max);
    CheckResult { name: "exact_state_kernel_residual", value, expected: 0.0, tolerance: 1e-9 }
}

pub fn kernel_residual() -> CheckResult {
    kernel_residual_with(analytic_steady_state_unnormalized)
}

/// Largest Frobenius distance between the numeric triplet steady state and
/// the state from `provider`.
pub fn numeric_agreement_with(provider: impl Fn(f64, f64) -> ComplexMatrix) -> CheckResult {
    let value = exact_solution_grid()
        .into_iter()
        .map(|(o, e)| match triplet_steady_state(&point_like_liouvillian(o, e)) {
            Ok(rho) => rho.matrix().frobenius_diff(&normalized(provider(o, e))),
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    CheckResult { name: "exact_state_vs_numeric", value, expected: 0.0, tolerance: 1e-9 }
}

pub fn numeric_agreement() -> CheckResult {
    numeric_agreement_with(analytic_steady_state_unnormalized)
}

pub const CLOSED_FORM_TAUS: [f64; 6] = [2.0, 3.0, 5.0, 9.21, 20.0, 50.0];

/// Largest deviation of the Wootters concurrence of the point-like state from
/// `(8τ − 16)/(τ² + 48)`.
pub fn closed_form_agreement() -> CheckResult {
    let value = CLOSED_FORM_TAUS
        .iter()
        .map(|&tau| {
            lamb_dicke_limit_state(tau)
                .ok()
                .and_then(|rho| wootters_concurrence(&rho).ok())
                .map_or(f64::INFINITY, |r| (r.concurrence - closed_form_concurrence(tau)).abs())
        })
        .fold(0.0, f64::max);
    CheckResult { name: "closed_form_concurrence", value, expected: 0.0, tolerance: 1e-9 }
}

fn argmax_tau() -> f64 {
    golden_section_max(closed_form_concurrence, 2.0, 50.0, 1e-8)
}

pub fn tau_max_check() -> CheckResult {
    CheckResult { name: "tau_max", value: argmax_tau(), expected: crate::tau_max(), tolerance: 1e-6 }
}

pub fn c_max_check() -> CheckResult {
    let value = lamb_dicke_limit_state(argmax_tau())
        .ok()
        .and_then(|rho| wootters_concurrence(&rho).ok())
        .map_or(f64::NAN, |r| r.concurrence);
    CheckResult { name: "C_max", value, expected: crate::concurrence_max(), tolerance: 1e-6 }
}

pub fn e_max_check() -> CheckResult {
    let value = eof_from_concurrence(crate::concurrence_max()).unwrap_or(f64::NAN);
    CheckResult { name: "E_max", value, expected: 0.2846, tolerance: 1e-3 }
}

pub fn run_all() -> Vec<CheckResult> {
    vec![
        kernel_residual(),
        numeric_agreement(),
        closed_form_agreement(),
        tau_max_check(),
        c_max_check(),
        e_max_check(),
    ]
}
