//! A single parameter point: resolution from flags and evaluation.

use dimer_core::dynamics::{analytic_steady_state, lamb_dicke_limit_state, DynamicsError};
use dimer_core::{
    solve_steady_state, wootters_concurrence, AtomPairConfig, ConcurrenceReport, Couplings,
    DecayScale, DensityMatrix, Geometry,
};

use crate::config::Config;
use crate::table::Cell;
use crate::{CliError, PointArgs};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Source {
    Geometry { k0r: f64, mu_dot_rhat: f64 },
    Direct { omega: f64, gamma12: f64 },
    /// `Ω = τE²`.
    Tau { tau: f64, gamma12: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSpec {
    pub delta: f64,
    pub drive: f64,
    pub source: Source,
    /// Analytic steady state with `Γ¹² = Γ`, `Δ = 0`.
    pub lamb_dicke: bool,
    pub scale: DecayScale,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl PointSpec {
    /// Resolves and validates a point from flags and config.
    pub fn resolve(args: &PointArgs, conf: &Config, scale: DecayScale) -> Result<Self, CliError> {
        let spec = Self::build(args, conf, scale)?;
        spec.validate()?;
        Ok(spec)
    }

    /// Resolves flag combinations without validating the values.
    pub fn build(args: &PointArgs, conf: &Config, scale: DecayScale) -> Result<Self, CliError> {
        let delta = conf.pick(args.delta, "delta")?;
        let drive = conf.pick(args.efield, "efield")?.unwrap_or(0.0);
        let omega = conf.pick(args.omega, "omega")?;
        let gamma12 = conf.pick(args.gamma12, "gamma12")?;
        let k0r = conf.pick(args.k0r, "k0r")?;
        let mu = conf.pick(args.mu_dot_rhat, "mu-dot-rhat")?;
        let tau = conf.pick(args.tau, "tau")?;
        let lamb_dicke = conf.flag(args.lamb_dicke, "lamb-dicke")?;

        if k0r.is_some() && (omega.is_some() || gamma12.is_some() || tau.is_some()) {
            return Err(usage("--k0r cannot be combined with --omega, --gamma12 or --tau"));
        }
        if omega.is_some() && tau.is_some() {
            return Err(usage("--omega and --tau are mutually exclusive"));
        }
        if mu.is_some() && k0r.is_none() {
            return Err(usage("--mu-dot-rhat needs --k0r"));
        }
        if lamb_dicke {
            if k0r.is_some() {
                return Err(usage("--lamb-dicke cannot be combined with --k0r"));
            }
            if delta.is_some_and(|d| d != 0.0) {
                return Err(usage("--lamb-dicke forces Δ = 0; drop --delta"));
            }
            if gamma12.is_some_and(|g| g != 1.0) {
                return Err(usage("--lamb-dicke forces Γ12 = Γ; drop --gamma12"));
            }
        }
        let gamma12 = if lamb_dicke { 1.0 } else { gamma12.unwrap_or(1.0) };
        let source = match (k0r, omega, tau) {
            (Some(k0r), _, _) => Source::Geometry { k0r, mu_dot_rhat: mu.unwrap_or(0.0) },
            (_, Some(omega), _) => Source::Direct { omega, gamma12 },
            (_, _, Some(tau)) => Source::Tau { tau, gamma12 },
            _ => return Err(usage("need one of --k0r, --omega or --tau")),
        };
        Ok(Self { delta: delta.unwrap_or(0.0), drive, source, lamb_dicke, scale })
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.drive >= 0.0) || !self.drive.is_finite() {
            return Err(usage(format!("drive must be ≥ 0 (got --efield {})", self.drive)));
        }
        if !self.delta.is_finite() {
            return Err(usage("--delta must be finite"));
        }
        match self.source {
            Source::Geometry { k0r, mu_dot_rhat } => {
                Geometry::new(k0r, mu_dot_rhat).map_err(|e| usage(e.to_string()))?;
            }
            Source::Direct { omega, gamma12 } => {
                Couplings::direct(omega, gamma12).map_err(|e| usage(e.to_string()))?;
            }
            Source::Tau { tau, gamma12 } => {
                if !(tau > 0.0) || !tau.is_finite() {
                    return Err(usage(format!("--tau must be > 0 (got {tau})")));
                }
                if self.drive == 0.0 && !self.lamb_dicke {
                    return Err(usage("--tau sets Ω = τE² and needs --efield > 0"));
                }
                Couplings::direct(0.0, gamma12).map_err(|e| usage(e.to_string()))?;
            }
        }
        Ok(())
    }

    pub fn config(&self) -> Result<AtomPairConfig, CliError> {
        let geometry = match self.source {
            Source::Geometry { k0r, mu_dot_rhat } => {
                Some(Geometry::new(k0r, mu_dot_rhat).map_err(|e| usage(e.to_string()))?)
            }
            _ => None,
        };
        AtomPairConfig::new(self.delta, self.drive, geometry).map_err(|e| usage(e.to_string()))
    }

    /// `(Ω, Γ¹²)`; `Ω` is NaN for the infinite-drive limit at fixed `τ`.
    pub fn couplings(&self) -> Result<Couplings, CliError> {
        let c = match self.source {
            Source::Geometry { .. } => self.config()?.couplings(),
            Source::Direct { omega, gamma12 } => Couplings::direct(omega, gamma12),
            Source::Tau { tau, gamma12 } => {
                if self.drive == 0.0 {
                    return Ok(Couplings { omega: f64::NAN, gamma12 });
                }
                Couplings::direct(tau * self.drive * self.drive, gamma12)
            }
        };
        c.map_err(|e| usage(e.to_string()))
    }

    fn analytic_state(&self, couplings: &Couplings) -> Result<DensityMatrix, CliError> {
        // The analytic formulas hold for the halved decay scale; the unit
        // scale maps onto them at (Ω/2, E/2), i.e. τ → 2τ.
        let factor = match self.scale {
            DecayScale::Half => 1.0,
            DecayScale::Unit => 0.5,
        };
        let state = match self.source {
            Source::Tau { tau, .. } if self.drive == 0.0 => lamb_dicke_limit_state(tau / factor),
            _ => analytic_steady_state(couplings.omega * factor, self.drive * factor),
        };
        match state {
            Ok(s) => Ok(s.to_computational()),
            Err(DynamicsError::InvalidRegime { fallback }) => Ok(fallback.to_computational()),
            Err(e) => Err(CliError::Failure(e.to_string())),
        }
    }

    pub fn evaluate(&self) -> Result<Evaluation, CliError> {
        self.validate()?;
        let couplings = self.couplings()?;
        let state = if self.lamb_dicke {
            self.analytic_state(&couplings)?
        } else {
            solve_steady_state(&self.config()?, &couplings, self.scale)
                .map_err(|e| CliError::Failure(e.to_string()))?
                .state
        };
        let report = wootters_concurrence(&state).map_err(|e| CliError::Failure(e.to_string()))?;
        Ok(Evaluation { spec: *self, couplings, state, report })
    }

    pub fn k0r(&self) -> f64 {
        match self.source {
            Source::Geometry { k0r, .. } => k0r,
            _ => f64::NAN,
        }
    }

    pub fn mu_dot_rhat(&self) -> f64 {
        match self.source {
            Source::Geometry { mu_dot_rhat, .. } => mu_dot_rhat,
            _ => f64::NAN,
        }
    }

    pub fn tau(&self, couplings: Option<&Couplings>) -> f64 {
        match (self.source, couplings) {
            (Source::Tau { tau, .. }, _) => tau,
            (_, Some(c)) if self.drive > 0.0 => c.omega / (self.drive * self.drive),
            _ => f64::NAN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Evaluation {
    pub spec: PointSpec,
    pub couplings: Couplings,
    pub state: DensityMatrix,
    pub report: ConcurrenceReport,
}

pub const RESULT_COLUMNS: [&str; 13] = [
    "delta",
    "efield",
    "omega",
    "gamma12",
    "k0r",
    "mu_dot_rhat",
    "tau",
    "rho11",
    "rho22",
    "rho33",
    "singlet_weight",
    "concurrence",
    "eof",
];

/// A result row; output columns are NaN when the point failed.
pub fn result_row(spec: &PointSpec, outcome: &Result<Evaluation, CliError>) -> Vec<Cell> {
    let couplings = match outcome {
        Ok(ev) => Some(ev.couplings),
        Err(_) => spec.couplings().ok(),
    };
    let mut row: Vec<Cell> = vec![
        spec.delta.into(),
        spec.drive.into(),
        couplings.map_or(f64::NAN, |c| c.omega).into(),
        couplings.map_or(f64::NAN, |c| c.gamma12).into(),
        spec.k0r().into(),
        spec.mu_dot_rhat().into(),
        spec.tau(couplings.as_ref()).into(),
    ];
    match outcome {
        Ok(ev) => {
            let [p1, p0, m1, a] = ev.state.coupled_populations();
            row.extend([p1, p0, m1, a, ev.report.concurrence, ev.report.eof].map(Cell::Num));
        }
        Err(_) => row.extend([f64::NAN; 6].map(Cell::Num)),
    }
    row
}
