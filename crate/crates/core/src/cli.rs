//! `gexpand` command line: derive, verify, sample, report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::catalog::{
    self, discrepancy_report, draws, engine_branches, engine_instance, evaluate, CatalogInstance,
    DiscrepancyReport, Grid, PdeOperator, ResidualReport, Verdict, DEFAULT_TOL, DRAWS,
};
use crate::error::{Error, Result};
use crate::expansion::{derive, CoefficientBranch};
use crate::expr::parse_rational;
use crate::gbranch::{DeltaCase, WaveProfile};
use crate::reduction::{Equation, PdeSpec};

#[derive(Debug, Parser)]
#[command(
    name = "gexpand",
    version,
    about = "Traveling-wave families by the modified (G'/G)-expansion"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the derivation pipeline for one equation.
    Derive(DeriveArgs),
    /// Residual check of one engine branch or printed family.
    Verify(VerifyArgs),
    /// Export `u` on a grid as CSV plus a gnuplot script.
    Sample(SampleArgs),
    /// Classify every engine branch and printed family.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CaseArg {
    Positive,
    Negative,
    Zero,
}

impl From<CaseArg> for DeltaCase {
    fn from(c: CaseArg) -> Self {
        match c {
            CaseArg::Positive => DeltaCase::Positive,
            CaseArg::Negative => DeltaCase::Negative,
            CaseArg::Zero => DeltaCase::Zero,
        }
    }
}

#[derive(Debug, Args)]
pub struct Common {
    /// Sign of sigma^2 in the KP equation.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma2: i8,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct DeriveArgs {
    #[arg(long)]
    pub equation: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// `U11`..`U34`, `U31+xi`/`U32+xi` for the corrected wave coordinate,
    /// `engine:<equation>:<index>` or `engine:<index>` with `--equation`.
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub equation: Option<String>,
    /// `name=value,...`; values are exact (`1/4`, `0.1`) decimals or fractions.
    /// Without it, parameters are drawn from `--seed`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Discriminant sign of drawn parameters.
    #[arg(long = "case", value_enum, default_value_t = CaseArg::Positive)]
    pub case: CaseArg,
    /// `x=min:max:n[,t=min:max:n][,y=min:max:n]`
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub family: String,
    #[arg(long)]
    pub equation: Option<String>,
    /// Every parameter of the family, including `lambda`, `mu`, `k1`, `k2`.
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub sigma2: i8,
    /// CSV path; the gnuplot script goes next to it with a `.gp` extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Limit to one equation; all three otherwise.
    #[arg(long)]
    pub equation: Option<String>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DRAWS)]
    pub draws: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    #[command(flatten)]
    pub common: Common,
}

/// Process exit status for a finished command.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EmptyGrid | Error::Pole { .. } => 1,
        Error::Usage(_) | Error::UnknownSymbol(_) | Error::Io(_) | Error::Json(_) => 2,
        Error::SolverIncomplete(_)
        | Error::Structural(_)
        | Error::NoBalance(_)
        | Error::UnsupportedForm(_)
        | Error::SymbolMismatch { .. } => 3,
    }
}

/// Run a parsed command; the return value is the exit code on success.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Derive(a) => cmd_derive(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Sample(a) => cmd_sample(&a),
        Command::Report(a) => cmd_report(&a),
    }
}

fn spec_for(equation: Equation, sigma2: i8) -> Result<PdeSpec> {
    match equation {
        Equation::Kp => PdeSpec::kp(sigma2),
        e => Ok(PdeSpec::new(e)),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// `name=value,...` with exact decimal or fractional values.
pub fn parse_params(src: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("expected name=value, got `{item}`")))?;
        let value = crate::algebra::rat_to_f64(&parse_rational(v.trim())?);
        if out.insert(k.trim().to_string(), value).is_some() {
            return Err(Error::Usage(format!("`{}` bound twice", k.trim())));
        }
    }
    Ok(out)
}

/// Names a candidate of `equation` may bind.
fn allowed(equation: Equation) -> Vec<&'static str> {
    let mut v = equation.parameters().to_vec();
    v.extend(["lambda", "mu", "C", "k1", "k2"]);
    v
}

fn check_names(equation: Equation, params: &BTreeMap<String, f64>, need_k: bool) -> Result<()> {
    let ok = allowed(equation);
    if let Some(bad) = params.keys().find(|k| !ok.contains(&k.as_str())) {
        return Err(Error::Usage(format!(
            "`{bad}` is not a parameter of {equation}"
        )));
    }
    for n in ok {
        let optional = !need_k && (n == "k1" || n == "k2");
        if !optional && !params.contains_key(n) {
            return Err(Error::Usage(format!("parameter `{n}` is not bound")));
        }
    }
    Ok(())
}

/// A resolved `--family` argument.
enum Target {
    Engine {
        equation: Equation,
        index: usize,
    },
    Paper {
        family: &'static catalog::PaperFamily,
        corrected: bool,
    },
}

impl Target {
    fn parse(id: &str, equation: Option<&str>) -> Result<Target> {
        let equation = equation.map(str::parse::<Equation>).transpose()?;
        if let Some(rest) = id.strip_prefix("engine:") {
            let (eq, idx) = match rest.split_once(':') {
                Some((e, i)) => (e.parse::<Equation>()?, i),
                None => (
                    equation.ok_or_else(|| Error::Usage(format!("`{id}` needs --equation")))?,
                    rest,
                ),
            };
            let index = idx
                .parse()
                .map_err(|_| Error::Usage(format!("bad branch index `{idx}`")))?;
            return Ok(Target::Engine {
                equation: eq,
                index,
            });
        }
        let (name, corrected) = match id.strip_suffix("+xi") {
            Some(n) => (n, true),
            None => (id, false),
        };
        let family =
            catalog::family(name).ok_or_else(|| Error::Usage(format!("unknown family `{id}`")))?;
        if corrected && family.corrected_xi.is_none() {
            return Err(Error::Usage(format!(
                "{} has no corrected wave coordinate",
                family.id
            )));
        }
        if let Some(e) = equation.filter(|e| *e != family.equation) {
            return Err(Error::Usage(format!(
                "{} is a {} family, not {e}",
                family.id, family.equation
            )));
        }
        Ok(Target::Paper { family, corrected })
    }

    fn equation(&self) -> Equation {
        match self {
            Target::Engine { equation, .. } => *equation,
            Target::Paper { family, .. } => family.equation,
        }
    }

    fn label(&self) -> String {
        match self {
            Target::Engine { equation, index } => format!("engine:{equation}:{index}"),
            Target::Paper {
                family,
                corrected: true,
            } => format!("{}+xi", family.id),
            Target::Paper { family, .. } => family.id.to_string(),
        }
    }
}

/// Assembles the candidate; `Ok(None)` when it is not real at these parameters.
fn instance(
    target: &Target,
    spec: &PdeSpec,
    params: &BTreeMap<String, f64>,
) -> Result<Option<Box<dyn WaveProfile + Sync>>> {
    Ok(match target {
        Target::Engine { index, .. } => {
            let branches = engine_branches(spec)?;
            let branch: &CoefficientBranch = branches.get(*index).ok_or_else(|| {
                Error::Usage(format!(
                    "{} has {} engine branches, no index {index}",
                    spec.equation,
                    branches.len()
                ))
            })?;
            engine_instance(branch, params)?.map(|u| Box::new(u) as Box<dyn WaveProfile + Sync>)
        }
        Target::Paper { family, corrected } => Some(Box::new(CatalogInstance::new(
            family, *corrected, spec, params,
        )?)),
    })
}

#[derive(Serialize)]
struct DeriveReport {
    equation: Equation,
    sigma2: Option<i8>,
    cases: Vec<CaseReport>,
    branches: Vec<BranchReport>,
}

#[derive(Serialize)]
struct CaseReport {
    c1_case: usize,
    c1: String,
    reduced_ode: String,
    m: usize,
    unknowns: Vec<String>,
    /// `w^0 .. w^deg` coefficients.
    system: Vec<String>,
}

#[derive(Serialize)]
struct BranchReport {
    id: String,
    c1_case: usize,
    m: usize,
    assignments: BTreeMap<String, String>,
    assumptions: Vec<String>,
    uses_sqrt_delta: bool,
    verified: bool,
}

pub fn cmd_derive(a: &DeriveArgs) -> Result<u8> {
    let equation: Equation = a.equation.parse()?;
    let spec = spec_for(equation, a.common.sigma2)?;
    let d = derive(&spec)?;
    let cases = d
        .cases
        .iter()
        .enumerate()
        .map(|(i, c)| CaseReport {
            c1_case: i,
            c1: c.c1.value.render(),
            reduced_ode: c.phi.render(),
            m: c.m,
            unknowns: c.system.unknown_names(),
            system: c.system.equations.iter().map(|e| e.render()).collect(),
        })
        .collect();
    let branches = engine_branches(&spec)?
        .iter()
        .enumerate()
        .map(|(i, b)| BranchReport {
            id: format!("engine:{equation}:{i}"),
            c1_case: b.c1_case,
            m: b.m,
            assignments: b
                .assignments
                .iter()
                .map(|(k, v)| (k.clone(), v.render()))
                .collect(),
            assumptions: b.assumptions.clone(),
            uses_sqrt_delta: b.uses_sqrt_delta,
            verified: b.verified,
        })
        .collect();
    let sigma2 = (equation == Equation::Kp).then_some(spec.sigma2);
    let report = DeriveReport {
        equation,
        sigma2,
        cases,
        branches,
    };
    let text = match a.common.format {
        Format::Json => to_json(&report)?,
        Format::Table => derive_table(&report),
    };
    emit(&a.common.out, &text)?;
    Ok(0)
}

fn derive_table(r: &DeriveReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "equation: {}", r.equation);
    for c in &r.cases {
        let _ = writeln!(s, "\nc1 case {}: c1 = {}  (m = {})", c.c1_case, c.c1, c.m);
        let _ = writeln!(s, "  ode: {}", c.reduced_ode);
        for (k, e) in c.system.iter().enumerate() {
            let _ = writeln!(s, "  w^{k}: {e} = 0");
        }
    }
    let _ = writeln!(s);
    for b in &r.branches {
        let _ = writeln!(s, "{} (c1 case {})", b.id, b.c1_case);
        for (k, v) in &b.assignments {
            let _ = writeln!(s, "  {k:>5} = {v}");
        }
        if !b.assumptions.is_empty() {
            let _ = writeln!(s, "  assuming {}", b.assumptions.join(", "));
        }
    }
    s
}

pub fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let target = Target::parse(&a.family, a.equation.as_deref())?;
    let equation = target.equation();
    let spec = spec_for(equation, a.common.sigma2)?;
    let grid = match &a.grid {
        Some(g) => Grid::parse(g, equation)?,
        None => Grid::default_for(equation),
    };
    let (params, draw) = match &a.params {
        Some(p) => {
            let p = parse_params(p)?;
            check_names(equation, &p, false)?;
            (p, None)
        }
        None => {
            let case = DeltaCase::from(a.case);
            (
                draws(equation, case, a.seed, &target.label(), 1).remove(0),
                Some(0),
            )
        }
    };
    let case = catalog::case_of(&params)?;
    let u = instance(&target, &spec, &params)?.ok_or_else(|| {
        Error::Usage(format!(
            "{} is not real for {}",
            target.label(),
            case.condition()
        ))
    })?;
    let op = PdeOperator::new(&spec, &params)?;
    let report = evaluate(
        &target.label(),
        &op,
        u.as_ref(),
        case,
        &params,
        draw,
        &grid,
        a.tol,
    )?;
    let text = match a.common.format {
        Format::Json => to_json(&report)?,
        Format::Table => verify_table(&report),
    };
    emit(&a.common.out, &text)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "non-real".to_string(), |v| format!("{v:.3e}"))
}

fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Fail => "FAIL",
        Verdict::NotApplicable => "not applicable",
    }
}

fn verify_table(r: &ResidualReport) -> String {
    let params: Vec<String> = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!(
        "{} [{}] {}\n  params: {}\n  max residual {} over {} points ({} poles, {} non-real), tol {:e}\n  \
         finite differences: {} points, max delta {}\n",
        r.id,
        r.delta_case,
        verdict_label(r.classification),
        params.join(", "),
        fmt_opt(r.max_residual),
        r.points,
        r.poles,
        r.nonreal,
        r.tol,
        r.fd.points,
        r.fd.max_delta.map_or("-".to_string(), |d| format!("{d:.3e}")),
    )
}

/// CSV of `u` over `grid`: `x,t[,y],u`, one block per `x` (and per `y`),
/// pole and non-real points as blank lines.
pub fn sample_csv(u: &dyn WaveProfile, grid: &Grid) -> Result<(String, usize)> {
    let mut s = String::from(if grid.y.is_some() {
        "x,t,y,u\n"
    } else {
        "x,t,u\n"
    });
    let ys: Vec<Option<f64>> = grid
        .y
        .map_or(vec![None], |a| a.values().map(Some).collect());
    let mut finite = 0;
    for (iy, y) in ys.iter().enumerate() {
        if iy > 0 {
            s.push('\n');
        }
        for (ix, x) in grid.x.values().enumerate() {
            if ix > 0 {
                s.push('\n');
            }
            for t in grid.t.values() {
                let v = match u.value([x, t, y.unwrap_or(0.0)]) {
                    Ok(v) if v.is_finite() => Some(v),
                    Ok(_) | Err(Error::Pole { .. }) => None,
                    Err(e) => return Err(e),
                };
                match (v, y) {
                    (Some(v), Some(y)) => {
                        finite += 1;
                        let _ = writeln!(s, "{x},{t},{y},{v}");
                    }
                    (Some(v), None) => {
                        finite += 1;
                        let _ = writeln!(s, "{x},{t},{v}");
                    }
                    (None, _) => s.push('\n'),
                }
            }
        }
    }
    if finite == 0 {
        return Err(Error::EmptyGrid);
    }
    Ok((s, finite))
}

/// Surface plot of a CSV written by `sample_csv`; KP grids show the middle `y` slice.
pub fn gnuplot_script(csv: &Path, title: &str, grid: &Grid) -> String {
    let name = csv.file_name().map_or_else(
        || csv.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    // blank lines mark poles, so slices are picked by value rather than by index
    let using = match grid.y {
        Some(y) => format!("1:2:($3 == {} ? $4 : 1/0)", y.at(y.count / 2)),
        None => "1:2:3".to_string(),
    };
    format!(
        "set datafile separator ','\nset key off\nset title '{title}'\nset xlabel 'x'\nset ylabel 't'\n\
         set zlabel 'u'\nset hidden3d\nsplot '{name}' skip 1 using {using} with lines\n"
    )
}

pub fn cmd_sample(a: &SampleArgs) -> Result<u8> {
    let target = Target::parse(&a.family, a.equation.as_deref())?;
    let equation = target.equation();
    let spec = spec_for(equation, a.sigma2)?;
    let params = parse_params(&a.params)?;
    check_names(equation, &params, true)?;
    let grid = match &a.grid {
        Some(g) => Grid::parse(g, equation)?,
        None => Grid::default_for(equation),
    };
    let u = instance(&target, &spec, &params)?.ok_or_else(|| {
        Error::Usage(format!(
            "{} is not real at these parameters",
            target.label()
        ))
    })?;
    let (csv, _) = sample_csv(u.as_ref(), &grid)?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            let gp = path.with_extension("gp");
            std::fs::write(&gp, gnuplot_script(path, &target.label(), &grid))?;
        }
        None => emit(&None, &csv)?,
    }
    Ok(0)
}

pub fn cmd_report(a: &ReportArgs) -> Result<u8> {
    let equations: Vec<Equation> = match &a.equation {
        Some(e) => vec![e.parse()?],
        None => Equation::ALL.to_vec(),
    };
    if a.draws == 0 {
        return Err(Error::Usage("--draws must be at least 1".into()));
    }
    let mut reports = Vec::new();
    for eq in equations {
        let spec = spec_for(eq, a.common.sigma2)?;
        let grid = match &a.grid {
            Some(g) => Grid::parse(g, eq)?,
            None => Grid::default_for(eq),
        };
        reports.push(discrepancy_report(&spec, a.tol, a.seed, &grid, a.draws)?);
    }
    let text = match a.common.format {
        Format::Json => to_json(&reports)?,
        Format::Table => reports.iter().map(report_table).collect(),
    };
    emit(&a.common.out, &text)?;
    // the engine's own branches failing is a verification failure
    let engine_ok = reports
        .iter()
        .flat_map(|r| &r.engine)
        .all(|r| r.classification != Verdict::Fail);
    Ok(if engine_ok { 0 } else { 1 })
}

fn report_table(r: &DiscrepancyReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} (seed {}, {} draws, tol {:e})",
        r.equation, r.seed, r.draws, r.tol
    );
    let _ = writeln!(
        s,
        "  {:<18} {:<9} {:<15} {:>12} {:>6}",
        "candidate", "delta", "verdict", "worst", "fd"
    );
    for row in r.rows() {
        let verdict = verdict_label(row.classification);
        let worst = match (row.classification, row.worst_residual) {
            (Verdict::NotApplicable, _) => "-".to_string(),
            (_, w) => fmt_opt(w),
        };
        let fd = if row.fd_agrees { "ok" } else { "DIFF" };
        let _ = writeln!(
            s,
            "  {:<18} {:<9} {:<15} {:>12} {:>6}",
            row.id,
            row.delta_case.to_string(),
            verdict,
            worst,
            fd
        );
    }
    for sys in &r.systems {
        let _ = writeln!(
            s,
            "  system, c1 case {}: {} engine rows, {} printed",
            sys.c1_case, sys.engine_rows, sys.paper_rows
        );
        for row in &sys.rows {
            let mark = if row.matches { "=" } else { "!" };
            let _ = writeln!(
                s,
                "    {mark} w^{}: {}",
                row.power,
                row.delta.as_deref().unwrap_or("(no printed row)")
            );
        }
    }
    s
}
