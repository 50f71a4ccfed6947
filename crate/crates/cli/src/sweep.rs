//! Grid specifications and parallel evaluation in row-major order.

use rayon::prelude::*;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisName {
    K0r,
    Drive,
    Omega,
    Delta,
    Tau,
}

impl AxisName {
    fn parse(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "k0r" => AxisName::K0r,
            "efield" | "drive" => AxisName::Drive,
            "omega" => AxisName::Omega,
            "delta" => AxisName::Delta,
            "tau" => AxisName::Tau,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown axis '{other}' (expected k0r, efield, omega, delta or tau)"
                )))
            }
        })
    }

    /// Config/flag key holding a fixed value for this parameter.
    pub fn key(self) -> &'static str {
        match self {
            AxisName::K0r => "k0r",
            AxisName::Drive => "efield",
            AxisName::Omega => "omega",
            AxisName::Delta => "delta",
            AxisName::Tau => "tau",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: AxisName,
    pub values: Vec<f64>,
}

/// `count` points from `start` to `stop`, inclusive.
pub fn grid(start: f64, stop: f64, count: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if count < 2 {
        return Err(CliError::Usage(format!("axis needs at least 2 points, got {count}")));
    }
    if !(start < stop) || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Usage(format!("axis range needs start < stop, got {start}:{stop}")));
    }
    if log && start <= 0.0 {
        return Err(CliError::Usage(format!("logarithmic axis needs start > 0, got {start}")));
    }
    let t = |k: usize| k as f64 / (count - 1) as f64;
    Ok((0..count)
        .map(|k| {
            if k == count - 1 {
                stop
            } else if log {
                start * (stop / start).powf(t(k))
            } else {
                start + (stop - start) * t(k)
            }
        })
        .collect())
}

/// `start:stop` into a pair.
pub fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("range '{s}' must look like start:stop"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl Axis {
    /// `name=start:stop:count[:log]`.
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = || CliError::Usage(format!("axis '{spec}' must look like name=start:stop:count[:log]"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let name = AxisName::parse(name.trim())?;
        let parts: Vec<&str> = range.split(':').map(str::trim).collect();
        let log = match parts.len() {
            3 => false,
            4 if parts[3] == "log" => true,
            _ => return Err(bad()),
        };
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        Ok(Self { name, values: grid(start, stop, count, log)? })
    }
}

/// Evaluates `f` on every grid point in parallel; results come back in the
/// order of `points`.
pub fn evaluate_all<T, R>(points: Vec<T>, f: impl Fn(&T) -> R + Sync) -> Vec<(T, R)>
where
    T: Send + Sync,
    R: Send,
{
    let results: Vec<R> = points.par_iter().map(&f).collect();
    points.into_iter().zip(results).collect()
}

/// Row-major Cartesian product of one or two axes (first axis outermost).
pub fn cartesian(axes: &[Axis]) -> Vec<Vec<(AxisName, f64)>> {
    let mut out: Vec<Vec<(AxisName, f64)>> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.values.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push((axis.name, v));
                    p
                })
            })
            .collect();
    }
    out
}

/// Counts failed points and reports them on stderr; errors out when every
/// point failed.
pub fn report_failures<R>(results: &[Result<R, CliError>]) -> Result<(), CliError> {
    let failed = results.iter().filter(|r| r.is_err()).count();
    if failed > 0 {
        eprintln!("warning: {failed} of {} points failed (NaN rows)", results.len());
        if let Some(Err(e)) = results.iter().find(|r| r.is_err()) {
            eprintln!("warning: first failure: {e}");
        }
    }
    if failed == results.len() && !results.is_empty() {
        return Err(CliError::Failure("every grid point failed".into()));
    }
    Ok(())
}
