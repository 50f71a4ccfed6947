use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};

use dimer_core::checks::{self, CheckResult};
use dimer_core::spectral::hamiltonian_spectrum;
use dimer_core::{build_effective_hamiltonian, k0r_for_tau, ComplexMatrix, DecayScale};
use serde_json::json;

use crate::config::Config;
use crate::point::{result_row, PointSpec, RESULT_COLUMNS};
use crate::sweep::{self, Axis, AxisName};
use crate::table::{format_number, Cell, Table};
use crate::{CliError, Command, CommonArgs, Fig1Args, Fig2Args, Format, PointArgs, SweepArgs};

struct Context {
    conf: Config,
    format: Format,
    scale: DecayScale,
    common: CommonArgs,
}

impl Context {
    fn new(common: &CommonArgs, default_format: Format) -> Result<Self, CliError> {
        let conf = Config::load(common.config.as_deref())?;
        let format = conf.pick(common.format, "format")?.unwrap_or(default_format);
        let scale = conf.pick(common.decay_scale, "decay-scale")?.unwrap_or_default();
        Ok(Self { conf, format, scale, common: common.clone() })
    }

    fn writer(&self) -> Result<Box<dyn Write>, CliError> {
        let path = match &self.common.out {
            Some(p) => Some(p.clone()),
            None => self.conf.raw("out").map(Into::into),
        };
        Ok(match path {
            Some(p) => Box::new(BufWriter::new(File::create(&p).map_err(|e| {
                CliError::Usage(format!("cannot write {}: {e}", p.display()))
            })?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }

    fn emit_table(&self, table: &Table) -> Result<(), CliError> {
        let mut out = self.writer()?;
        match self.format {
            Format::Csv => table.write_csv(&mut out)?,
            Format::Json => table.write_json(&mut out)?,
            Format::Text => write!(out, "{}", render_text(table))?,
        }
        out.flush()?;
        Ok(())
    }
}

fn render_text(table: &Table) -> String {
    let cells: Vec<Vec<String>> = table
        .rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|c| match c {
                    Cell::Num(x) => format_number(*x),
                    Cell::Text(s) => s.clone(),
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = (0..table.columns.len())
        .map(|k| cells.iter().map(|r| r[k].chars().count()).chain([table.columns[k].len()]).max().unwrap_or(0))
        .collect();
    let mut s = String::new();
    let line = |s: &mut String, items: Vec<&str>| {
        let padded: Vec<String> = items.iter().zip(&widths).map(|(x, w)| format!("{x:>w$}")).collect();
        let _ = writeln!(s, "{}", padded.join("  ").trim_end());
    };
    line(&mut s, table.columns.clone());
    for r in &cells {
        line(&mut s, r.iter().map(String::as_str).collect());
    }
    s
}

pub fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Steady { point, common } => steady(&point, &common),
        Command::Spectrum { point, common } => spectrum(&point, &common),
        Command::Fig1(args) => fig1(&args),
        Command::Fig2(args) => fig2(&args),
        Command::Sweep(args) => run_sweep(&args),
        Command::Check { common } => check(&common),
    }
}

fn complex(z: dimer_core::C64) -> String {
    format!("{:+.6e}{:+.6e}i", z.re, z.im)
}

fn matrix_lines(m: &ComplexMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| complex(m[(i, j)])).collect();
        let _ = writeln!(s, "  {}", row.join("  "));
    }
    s
}

fn steady(point: &PointArgs, common: &CommonArgs) -> Result<(), CliError> {
    let ctx = Context::new(common, Format::Text)?;
    let spec = PointSpec::resolve(point, &ctx.conf, ctx.scale)?;
    let ev = spec.evaluate()?;
    if ctx.format != Format::Text {
        let mut t = Table::new(RESULT_COLUMNS.to_vec());
        t.push(result_row(&spec, &Ok(ev)));
        return ctx.emit_table(&t);
    }
    let mut s = String::new();
    let row = result_row(&spec, &Ok(ev.clone()));
    let _ = writeln!(s, "parameters (decay scale {})", ctx.scale);
    for (name, cell) in RESULT_COLUMNS.iter().zip(&row).take(7) {
        if let Cell::Num(x) = cell {
            if !x.is_nan() {
                let _ = writeln!(s, "  {name:<12} {}", format_number(*x));
            }
        }
    }
    let _ = writeln!(s, "steady state on |ee>, |eg>, |ge>, |gg>");
    s.push_str(&matrix_lines(ev.state.matrix()));
    let eig: Vec<String> = ev.state.eigenvalues().iter().map(|x| format_number(*x)).collect();
    let _ = writeln!(s, "eigenvalues  {}", eig.join("  "));
    let [p1, p0, m1, a] = ev.state.coupled_populations();
    let _ = writeln!(
        s,
        "populations  |+1> {}  |0> {}  |-1> {}  |A> {}",
        format_number(p1),
        format_number(p0),
        format_number(m1),
        format_number(a)
    );
    let lambdas: Vec<String> = ev.report.lambdas.iter().map(|x| format_number(*x)).collect();
    let _ = writeln!(s, "lambdas      {}", lambdas.join("  "));
    let _ = writeln!(s, "concurrence  {}", format_number(ev.report.concurrence));
    let _ = writeln!(s, "eof          {}", format_number(ev.report.eof));
    let mut out = ctx.writer()?;
    out.write_all(s.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn spectrum(point: &PointArgs, common: &CommonArgs) -> Result<(), CliError> {
    let ctx = Context::new(common, Format::Text)?;
    let spec = PointSpec::resolve(point, &ctx.conf, ctx.scale)?;
    let couplings = spec.couplings()?;
    if !couplings.omega.is_finite() {
        return Err(CliError::Usage("spectrum needs a finite Ω: give --omega, --k0r or --tau with --efield".into()));
    }
    let cfg = spec.config()?;
    let (triplet, singlet) = hamiltonian_spectrum(&cfg, couplings.omega);
    let heff = build_effective_hamiltonian(&cfg, &couplings);
    let block = heff.block(0, 0, 3, 3);
    let heff_triplet = dimer_core::qcore::general_eig(&block)?;
    let heff_singlet = heff[(3, 3)];

    let mut t = Table::new(vec!["operator", "level", "energy", "decay_rate"]);
    for (k, e) in triplet.iter().enumerate() {
        t.push(vec!["H".into(), Cell::Text(format!("triplet{}", k + 1)), (*e).into(), 0.0.into()]);
    }
    t.push(vec!["H".into(), "singlet".into(), singlet.into(), 0.0.into()]);
    for (k, z) in heff_triplet.iter().enumerate() {
        t.push(vec![
            "H_eff".into(),
            Cell::Text(format!("triplet{}", k + 1)),
            z.re.into(),
            (-2.0 * z.im).into(),
        ]);
    }
    t.push(vec!["H_eff".into(), "singlet".into(), heff_singlet.re.into(), (-2.0 * heff_singlet.im).into()]);
    ctx.emit_table(&t)
}

impl From<dimer_core::LinalgError> for CliError {
    fn from(e: dimer_core::LinalgError) -> Self {
        CliError::Failure(e.to_string())
    }
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::Usage(format!("--{name} must be > 0 (got {v})")))
    }
}

fn fig1(args: &Fig1Args) -> Result<(), CliError> {
    let ctx = Context::new(&args.common, Format::Csv)?;
    let c = &ctx.conf;
    let q = positive("q", c.pick(args.q, "q")?.unwrap_or(1e6))?;
    let tau = positive("tau", c.pick(args.tau, "tau")?.unwrap_or_else(dimer_core::tau_max))?;
    let lo = positive("nbar-min", c.pick(args.nbar_min, "nbar-min")?.unwrap_or(1.0))?;
    let hi = positive("nbar-max", c.pick(args.nbar_max, "nbar-max")?.unwrap_or(1e6))?;
    let points = c.pick(args.points, "points")?.unwrap_or(61);
    let grid = sweep::grid(lo, hi, points, true)?;
    let mut t = Table::new(vec!["nbar_v", "k0r"]);
    for n in grid {
        let k = k0r_for_tau(tau, q, n).map_err(|e| CliError::Usage(e.to_string()))?;
        t.push(vec![n.into(), k.into()]);
    }
    ctx.emit_table(&t)
}

fn fig2(args: &Fig2Args) -> Result<(), CliError> {
    let ctx = Context::new(&args.common, Format::Csv)?;
    let c = &ctx.conf;
    let k_range = c.pick(args.k0r_range.clone(), "k0r-range")?.unwrap_or_else(|| "0.01:1".into());
    let e_range = c.pick(args.efield_range.clone(), "efield-range")?.unwrap_or_else(|| "0:10".into());
    let points = c.pick(args.points, "points")?.unwrap_or(21);
    let delta = c.pick(args.delta, "delta")?.unwrap_or(0.0);
    let mu = c.pick(args.mu_dot_rhat, "mu-dot-rhat")?.unwrap_or(0.0);
    let (k0, k1) = sweep::parse_range(&k_range)?;
    let (e0, e1) = sweep::parse_range(&e_range)?;
    if e0 < 0.0 {
        return Err(CliError::Usage(format!("drive must be ≥ 0 (got {e0})")));
    }
    if !(0.0..=1.0).contains(&mu) || !delta.is_finite() {
        return Err(CliError::Usage("need |μ̂·r̂| in [0, 1] and finite --delta".into()));
    }
    let ks = sweep::grid(k0, k1, points, true)?;
    let es = sweep::grid(e0, e1, points, false)?;
    let specs: Vec<PointSpec> = ks
        .iter()
        .flat_map(|&k| {
            es.iter().map(move |&e| PointSpec {
                delta,
                drive: e,
                source: crate::point::Source::Geometry { k0r: k, mu_dot_rhat: mu },
                lamb_dicke: false,
                scale: ctx.scale,
            })
        })
        .collect();
    let results = sweep::evaluate_all(specs, PointSpec::evaluate);
    let outcomes: Vec<_> = results.iter().map(|(_, r)| r.as_ref().map(|_| ()).map_err(clone_err)).collect();
    sweep::report_failures(&outcomes)?;
    let mut t = Table::new(vec!["k0r", "efield", "omega", "gamma12", "concurrence"]);
    for (spec, r) in &results {
        let c = spec.couplings().ok();
        t.push(vec![
            spec.k0r().into(),
            spec.drive.into(),
            c.map_or(f64::NAN, |c| c.omega).into(),
            c.map_or(f64::NAN, |c| c.gamma12).into(),
            r.as_ref().map_or(f64::NAN, |ev| ev.report.concurrence).into(),
        ]);
    }
    ctx.emit_table(&t)
}

fn clone_err(e: &CliError) -> CliError {
    CliError::Failure(e.to_string())
}

fn set_axis(args: &mut PointArgs, name: AxisName, v: f64) {
    match name {
        AxisName::K0r => args.k0r = Some(v),
        AxisName::Drive => args.efield = Some(v),
        AxisName::Omega => args.omega = Some(v),
        AxisName::Delta => args.delta = Some(v),
        AxisName::Tau => args.tau = Some(v),
    }
}

fn fixed_value(args: &PointArgs, name: AxisName) -> Option<f64> {
    match name {
        AxisName::K0r => args.k0r,
        AxisName::Drive => args.efield,
        AxisName::Omega => args.omega,
        AxisName::Delta => args.delta,
        AxisName::Tau => args.tau,
    }
}

fn run_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let ctx = Context::new(&args.common, Format::Csv)?;
    let specs: Vec<String> = if args.axes.is_empty() {
        ctx.conf.raw("axis").map(|s| s.split(';').map(|x| x.trim().to_string()).collect()).unwrap_or_default()
    } else {
        args.axes.clone()
    };
    let axes = specs.iter().map(|s| Axis::parse(s)).collect::<Result<Vec<_>, _>>()?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(CliError::Usage("give one or two --axis specifications".into()));
    }
    if axes.len() == 2 && axes[0].name == axes[1].name {
        return Err(CliError::Usage("axes must be distinct".into()));
    }
    for a in &axes {
        let key = a.name.key();
        if fixed_value(&args.point, a.name).is_some() || ctx.conf.raw(key).is_some() {
            return Err(CliError::Usage(format!("{key} is both an axis and a fixed value")));
        }
    }
    let grid = sweep::cartesian(&axes);
    let mut specs = Vec::with_capacity(grid.len());
    for point in &grid {
        let mut pa = args.point.clone();
        for &(name, v) in point {
            set_axis(&mut pa, name, v);
        }
        specs.push(PointSpec::build(&pa, &ctx.conf, ctx.scale)?);
    }
    let results = sweep::evaluate_all(specs, PointSpec::evaluate);
    let outcomes: Vec<_> = results.iter().map(|(_, r)| r.as_ref().map(|_| ()).map_err(clone_err)).collect();
    sweep::report_failures(&outcomes)?;
    let mut t = Table::new(RESULT_COLUMNS.to_vec());
    for (spec, r) in &results {
        t.push(result_row(spec, r));
    }
    ctx.emit_table(&t)
}

fn check(common: &CommonArgs) -> Result<(), CliError> {
    let ctx = Context::new(common, Format::Text)?;
    let results: Vec<CheckResult> = checks::run_all();
    let mut out = ctx.writer()?;
    match ctx.format {
        Format::Json => {
            let rows: Vec<_> = results
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "value": c.value,
                        "expected": c.expected,
                        "tolerance": c.tolerance,
                        "passed": c.passed(),
                    })
                })
                .collect();
            serde_json::to_writer_pretty(&mut out, &rows)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut t = Table::new(vec!["name", "value", "expected", "tolerance", "passed"]);
            for c in &results {
                t.push(vec![
                    c.name.into(),
                    c.value.into(),
                    c.expected.into(),
                    c.tolerance.into(),
                    if c.passed() { "true".into() } else { "false".into() },
                ]);
            }
            t.write_csv(&mut out)?;
        }
        Format::Text => {
            for c in &results {
                writeln!(out, "{c}")?;
            }
        }
    }
    out.flush()?;
    let failed = results.iter().filter(|c| !c.passed()).count();
    if failed > 0 {
        eprintln!("{failed} of {} checks failed", results.len());
        return Err(CliError::ChecksFailed(failed, results.len()));
    }
    Ok(())
}
