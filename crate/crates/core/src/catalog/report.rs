use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::families::{paper_catalog, paper_system, PaperFamily};
use super::residual::{fd_cross_check, residual_max, FdCheck, Grid, PdeOperator};
use crate::algebra::{ParamExpr, Rational};
use crate::error::{Error, Result};
use crate::expansion::{derive, CoefficientBranch};
use crate::expr::{Expr, Node};
use crate::gbranch::{AssembledSolution, DeltaCase, GBranch, Jet, WaveProfile, POLE_TOL};
use crate::reduction::{Equation, PdeSpec};

pub const DEFAULT_TOL: f64 = 1e-7;
/// Parameter draws per row in the discrepancy report.
pub const DRAWS: usize = 10;
/// Grid points sampled by the finite-difference cross-check.
pub const FD_BUDGET: usize = 200;
/// Largest accepted jet/finite-difference disagreement.
pub const FD_AGREEMENT: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    /// The candidate is not real for this discriminant sign.
    NotApplicable,
}

/// One residual evaluation of one candidate at one parameter draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub id: String,
    pub equation: Equation,
    pub delta_case: DeltaCase,
    pub draw: Option<usize>,
    pub params: BTreeMap<String, f64>,
    pub max_residual: Option<f64>,
    pub argmax: Option<[f64; 3]>,
    pub points: usize,
    pub poles: usize,
    pub nonreal: usize,
    pub tol: f64,
    pub classification: Verdict,
    pub fd: FdCheck,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.classification == Verdict::Pass
    }

    /// Jet and finite-difference operators agree, including on where the
    /// candidate stops being real.
    pub fn fd_agrees(&self) -> bool {
        self.fd.nonreal_mismatch == 0 && self.fd.max_delta.is_none_or(|d| d <= FD_AGREEMENT)
    }
}

/// Residual with finite-difference cross-check, classified at `tol`.
#[allow(clippy::too_many_arguments)]
pub fn evaluate(
    id: &str,
    op: &PdeOperator,
    u: &(dyn WaveProfile + Sync),
    case: DeltaCase,
    params: &BTreeMap<String, f64>,
    draw: Option<usize>,
    grid: &Grid,
    tol: f64,
) -> Result<ResidualReport> {
    if !(tol > 0.0) {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let stats = residual_max(op, u, grid)?;
    let fd = fd_cross_check(op, u, grid, stats.argmax, FD_BUDGET)?;
    let pass = stats.max_residual.is_some_and(|r| r <= tol);
    Ok(ResidualReport {
        id: id.to_string(),
        equation: op.equation,
        delta_case: case,
        draw,
        params: params.clone(),
        max_residual: stats.max_residual,
        argmax: stats.argmax,
        points: stats.points,
        poles: stats.poles,
        nonreal: stats.nonreal,
        tol,
        classification: if pass { Verdict::Pass } else { Verdict::Fail },
        fd,
    })
}

fn fnv1a(key: &str) -> u64 {
    key.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

/// Generator for one `(seed, key)` pair, independent of every other key.
pub fn draw_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(key));
    rng
}

/// Admissible parameters with the requested discriminant sign: positive
/// symbols from `[1/2, 3]`, `lambda` of either sign, then `mu` solved from
/// `lambda^2 - 4 mu = +d, -d, 0` with `d` in `[1, 4]`.
pub fn draw_params(
    equation: Equation,
    case: DeltaCase,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<String, f64> {
    let mut p = BTreeMap::new();
    for name in equation
        .parameters()
        .iter()
        .copied()
        .chain(["C", "k1", "k2"])
    {
        p.insert(name.to_string(), rng.gen_range(0.5..=3.0));
    }
    let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    let lambda: f64 = sign * rng.gen_range(0.5..=3.0);
    let d: f64 = rng.gen_range(1.0..=4.0);
    let mu = match case {
        DeltaCase::Positive => (lambda * lambda - d) / 4.0,
        DeltaCase::Negative => (lambda * lambda + d) / 4.0,
        DeltaCase::Zero => lambda * lambda / 4.0,
    };
    p.insert("lambda".into(), lambda);
    p.insert("mu".into(), mu);
    p
}

pub fn draws(
    equation: Equation,
    case: DeltaCase,
    seed: u64,
    key: &str,
    n: usize,
) -> Vec<BTreeMap<String, f64>> {
    let mut rng = draw_rng(seed, &format!("{key}/{case}"));
    (0..n)
        .map(|_| draw_params(equation, case, &mut rng))
        .collect()
}

/// `k1`, `k2` from the bindings, defaulting to `1, 0`.
pub fn k_pair(params: &BTreeMap<String, f64>) -> (f64, f64) {
    (
        params.get("k1").copied().unwrap_or(1.0),
        params.get("k2").copied().unwrap_or(0.0),
    )
}

pub fn case_of(params: &BTreeMap<String, f64>) -> Result<DeltaCase> {
    let get = |n: &str| {
        params
            .get(n)
            .copied()
            .ok_or_else(|| Error::Usage(format!("parameter `{n}` is not bound")))
    };
    let (l, m) = (get("lambda")?, get("mu")?);
    Ok(DeltaCase::classify(l * l - 4.0 * m))
}

/// A printed family row evaluated at numeric parameters.
#[derive(Debug, Clone)]
pub struct CatalogInstance {
    pub family: &'static PaperFamily,
    pub case: DeltaCase,
    pub corrected: bool,
    wave: [f64; 3],
    u: Node,
    g: GBranch,
}

impl CatalogInstance {
    /// The row is picked by the sign of `lambda^2 - 4 mu`; `sigma2` comes from
    /// the `PdeSpec` and `omega` from the family where it is printed.
    pub fn new(
        family: &'static PaperFamily,
        corrected: bool,
        spec: &PdeSpec,
        params: &BTreeMap<String, f64>,
    ) -> Result<Self> {
        if family.equation != spec.equation {
            return Err(Error::Usage(format!(
                "{} is a {} family",
                family.id, family.equation
            )));
        }
        let xi_src = match (corrected, family.corrected_xi) {
            (false, _) => family.xi,
            (true, Some(xi)) => xi,
            (true, None) => {
                return Err(Error::Usage(format!(
                    "{} has no corrected wave coordinate",
                    family.id
                )))
            }
        };
        let case = case_of(params)?;
        let row = Expr::parse(family.row(case).u)?;
        let xi: Vec<Expr> = xi_src
            .iter()
            .map(|s| Expr::parse(s))
            .collect::<Result<_>>()?;
        let omega = family.omega.map(Expr::parse).transpose()?;

        let mut needed = row.symbols();
        for e in xi.iter().chain(&omega) {
            needed.extend(e.symbols());
        }
        for name in family.nonzero {
            needed.extend(Expr::parse(name)?.symbols());
        }
        for n in &needed {
            let free = matches!(n.as_str(), "xi" | "f" | "g" | "sigma2" | "omega");
            if !free && !params.contains_key(n) {
                return Err(Error::Usage(format!("parameter `{n}` is not bound")));
            }
        }
        let sigma2 = spec.sigma2 as f64;
        let base = |n: &str| {
            if n == "sigma2" {
                Some(sigma2)
            } else {
                params.get(n).copied()
            }
        };
        for src in family.nonzero {
            if Expr::parse(src)?.eval_f64(&base)?.abs() < POLE_TOL {
                return Err(Error::Usage(format!("assumption {src} != 0 violated")));
            }
        }
        let omega = omega.map(|e| e.eval_f64(&base)).transpose()?;
        let env = |n: &str| if n == "omega" { omega } else { base(n) };
        let wave = [
            xi[0].eval_f64(&env)?,
            xi[1].eval_f64(&env)?,
            xi[2].eval_f64(&env)?,
        ];
        let u = row.compile(&["xi", "f", "g"], &env)?;
        let (k1, k2) = k_pair(params);
        let g = GBranch::new(params["lambda"], params["mu"], k1, k2)?;
        Ok(CatalogInstance {
            family,
            case,
            corrected,
            wave,
            u,
            g,
        })
    }

    pub fn label(&self) -> String {
        if self.corrected {
            format!("{}+xi", self.family.id)
        } else {
            self.family.id.to_string()
        }
    }
}

impl WaveProfile for CatalogInstance {
    fn wave(&self) -> [f64; 3] {
        self.wave
    }

    fn profile(&self, xi: f64, order: usize) -> Result<Jet> {
        let x = Jet::var(xi, order);
        let nan = Jet::constant(f64::NAN, order);
        let f = if self.case == DeltaCase::Positive {
            self.g.f_jet(x)?
        } else {
            nan
        };
        let g = if self.case == DeltaCase::Negative {
            self.g.g_jet(x)?
        } else {
            nan
        };
        self.u.eval(&[x, f, g], order)
    }
}

/// All draws of one candidate for one discriminant sign.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowSummary {
    pub id: String,
    pub delta_case: DeltaCase,
    /// PASS only if every draw passes.
    pub classification: Verdict,
    pub worst_residual: Option<f64>,
    pub fd_agrees: bool,
    /// A pass on any draw implies every draw stays within `10 tol`.
    pub consistent: bool,
    pub note: String,
    pub draws: Vec<ResidualReport>,
}

impl RowSummary {
    fn from_draws(
        id: String,
        case: DeltaCase,
        tol: f64,
        draws: Vec<ResidualReport>,
        note: String,
    ) -> Self {
        let all_pass = draws.iter().all(ResidualReport::passed);
        let worst = draws
            .iter()
            .try_fold(0.0f64, |m, r| r.max_residual.map(|v| m.max(v)));
        let any_pass = draws.iter().any(ResidualReport::passed);
        RowSummary {
            id,
            delta_case: case,
            classification: if all_pass && !draws.is_empty() {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            worst_residual: worst,
            fd_agrees: draws.iter().all(ResidualReport::fd_agrees),
            consistent: !any_pass || worst.is_some_and(|w| w <= 10.0 * tol),
            note,
            draws,
        }
    }

    fn not_applicable(id: String, case: DeltaCase, note: String) -> Self {
        RowSummary {
            id,
            delta_case: case,
            classification: Verdict::NotApplicable,
            worst_residual: None,
            fd_agrees: true,
            consistent: true,
            note,
            draws: Vec::new(),
        }
    }
}

/// One row of an engine system next to the printed one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowDiff {
    pub power: usize,
    pub engine: String,
    pub paper: Option<String>,
    /// `engine - paper`.
    pub delta: Option<String>,
    pub matches: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystemDiff {
    pub equation: Equation,
    pub c1_case: usize,
    pub engine_rows: usize,
    pub paper_rows: usize,
    pub rows: Vec<RowDiff>,
}

/// Subtract the printed rows from the engine's, power by power. Symbols only
/// the printed system uses are appended to the engine's table.
pub fn system_diff(spec: &PdeSpec, c1_case: usize, engine: &[ParamExpr]) -> Result<SystemDiff> {
    let printed = paper_system(spec.equation, c1_case);
    let sigma2 = Expr::Num(Rational::from_integer(spec.sigma2.into()));
    let parsed: Vec<Expr> = printed
        .iter()
        .map(|s| Ok(Expr::parse(s)?.bind("sigma2", &sigma2)))
        .collect::<Result<_>>()?;
    let base = engine
        .first()
        .map(|e| e.symbols().clone())
        .ok_or_else(|| Error::Structural("empty system".into()))?;
    let mut extra: Vec<String> = Vec::new();
    for e in &parsed {
        for s in e.symbols() {
            if base.index(&s).is_none() && !extra.contains(&s) {
                extra.push(s);
            }
        }
    }
    let syms = if extra.is_empty() {
        base.clone()
    } else {
        base.insert_before(None, &extra)?
    };
    let mut rows = Vec::new();
    for (power, eq) in engine.iter().enumerate() {
        let eng = eq.embed(&syms)?;
        let (paper, delta) = match parsed.get(power) {
            Some(p) => {
                let p = p.to_param(&syms)?;
                let d = eng.try_sub(&p)?;
                (Some(p), Some(d))
            }
            None => (None, None),
        };
        rows.push(RowDiff {
            power,
            engine: eng.render(),
            paper: paper.map(|p| p.render()),
            matches: delta.as_ref().is_some_and(ParamExpr::is_zero),
            delta: delta.map(|d| d.render()),
        });
    }
    Ok(SystemDiff {
        equation: spec.equation,
        c1_case,
        engine_rows: engine.len(),
        paper_rows: printed.len(),
        rows,
    })
}

/// An engine branch at `params`, or `None` where it is not real.
pub fn engine_instance(
    branch: &CoefficientBranch,
    params: &BTreeMap<String, f64>,
) -> Result<Option<AssembledSolution>> {
    let (k1, k2) = k_pair(params);
    if branch.uses_sqrt_delta && case_of(params)? == DeltaCase::Negative {
        return Ok(None);
    }
    AssembledSolution::from_branch(branch, params, k1, k2).map(Some)
}

/// Verdict on every engine branch and printed family of one equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub equation: Equation,
    pub sigma2: i8,
    pub seed: u64,
    pub tol: f64,
    pub draws: usize,
    pub grid: Grid,
    pub engine: Vec<RowSummary>,
    pub paper: Vec<RowSummary>,
    pub systems: Vec<SystemDiff>,
}

impl DiscrepancyReport {
    pub fn rows(&self) -> impl Iterator<Item = &RowSummary> {
        self.engine.iter().chain(&self.paper)
    }
}

pub fn discrepancy_report(
    spec: &PdeSpec,
    tol: f64,
    seed: u64,
    grid: &Grid,
    n: usize,
) -> Result<DiscrepancyReport> {
    if !(tol > 0.0) {
        return Err(Error::Usage(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let equation = spec.equation;
    let derivation = derive(spec)?;
    let mut branches: Vec<&CoefficientBranch> = derivation.branches().collect();
    branches.sort_by_key(|b| (b.c1_case, b.sort_key()));

    let mut engine = Vec::new();
    for (i, branch) in branches.iter().enumerate() {
        let id = format!("engine:{equation}:{i}");
        for case in DeltaCase::ALL {
            let mut reports = Vec::new();
            let mut real = true;
            for (d, params) in draws(equation, case, seed, &id, n).into_iter().enumerate() {
                let op = PdeOperator::new(spec, &params)?;
                match engine_instance(branch, &params)? {
                    Some(u) => {
                        reports.push(evaluate(&id, &op, &u, case, &params, Some(d), grid, tol)?)
                    }
                    None => real = false,
                }
            }
            engine.push(if real {
                RowSummary::from_draws(id.clone(), case, tol, reports, String::new())
            } else {
                RowSummary::not_applicable(
                    id.clone(),
                    case,
                    "coefficients involve sqrt(lambda^2 - 4*mu)".into(),
                )
            });
        }
    }

    let mut paper = Vec::new();
    for fam in paper_catalog().iter().filter(|f| f.equation == equation) {
        let variants: &[bool] = if fam.corrected_xi.is_some() {
            &[false, true]
        } else {
            &[false]
        };
        for &corrected in variants {
            for case in DeltaCase::ALL {
                let mut reports = Vec::new();
                let mut label = fam.id.to_string();
                for (d, params) in draws(equation, case, seed, fam.id, n)
                    .into_iter()
                    .enumerate()
                {
                    let op = PdeOperator::new(spec, &params)?;
                    let u = CatalogInstance::new(fam, corrected, spec, &params)?;
                    label = u.label();
                    reports.push(evaluate(
                        &label,
                        &op,
                        &u,
                        case,
                        &params,
                        Some(d),
                        grid,
                        tol,
                    )?);
                }
                paper.push(RowSummary::from_draws(
                    label,
                    case,
                    tol,
                    reports,
                    fam.notes.to_string(),
                ));
            }
        }
    }

    let systems = derivation
        .cases
        .iter()
        .enumerate()
        .map(|(c, cd)| system_diff(spec, c, &cd.system.equations))
        .collect::<Result<_>>()?;

    Ok(DiscrepancyReport {
        equation,
        sigma2: spec.sigma2,
        seed,
        tol,
        draws: n,
        grid: *grid,
        engine,
        paper,
        systems,
    })
}

/// Engine branches of an equation in report order: by c1 case, then by
/// the rendered assignments.
pub fn engine_branches(spec: &PdeSpec) -> Result<Vec<CoefficientBranch>> {
    let mut b = crate::expansion::derive_families(spec)?;
    b.sort_by_key(|b| (b.c1_case, b.sort_key()));
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::family;

    fn spec(e: Equation) -> PdeSpec {
        PdeSpec::new(e)
    }

    #[test]
    fn draws_respect_the_case() {
        for case in DeltaCase::ALL {
            for p in draws(Equation::Kdv, case, 3, "x", 20) {
                assert_eq!(case_of(&p).unwrap(), case);
                assert!(p["alpha"] >= 0.5 && p["alpha"] <= 3.0);
            }
        }
        assert_eq!(
            draws(Equation::Kp, DeltaCase::Zero, 9, "k", 3),
            draws(Equation::Kp, DeltaCase::Zero, 9, "k", 3)
        );
        assert_ne!(
            draws(Equation::Kp, DeltaCase::Zero, 9, "k", 3),
            draws(Equation::Kp, DeltaCase::Zero, 9, "j", 3)
        );
    }

    #[test]
    fn instance_checks_assumptions() {
        let mut p = draws(Equation::Burgers, DeltaCase::Positive, 1, "u", 1).remove(0);
        p.insert("alpha".into(), 0.0);
        let e = CatalogInstance::new(family("U11").unwrap(), false, &spec(Equation::Burgers), &p)
            .unwrap_err();
        assert!(e.to_string().contains("alpha != 0"), "{e}");
        p.remove("alpha");
        let e = CatalogInstance::new(family("U11").unwrap(), false, &spec(Equation::Burgers), &p)
            .unwrap_err();
        assert!(e.to_string().contains("`alpha`"), "{e}");
    }

    #[test]
    fn u11_zero_row_is_the_engine_family() {
        // u = 2b/a (k1/(k1 xi + k2)) with xi = x - (2C - 2b) t
        let s = spec(Equation::Burgers);
        for p in draws(Equation::Burgers, DeltaCase::Zero, 5, "z", 3) {
            let u = CatalogInstance::new(family("U11").unwrap(), false, &s, &p).unwrap();
            let (a, b, c) = (p["alpha"], p["beta"], p["C"]);
            let (k1, k2) = (p["k1"], p["k2"]);
            let (x, t) = (0.7, 0.3);
            let xi = x - (2.0 * c - 2.0 * b) * t;
            let want = 2.0 * b / a + 2.0 * b / a * (-p["lambda"] / 2.0 + k1 / (k1 * xi + k2));
            assert!((u.value([x, t, 0.0]).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn burgers_systems_diff() {
        let s = spec(Equation::Burgers);
        let d = derive(&s).unwrap();
        let diff = system_diff(&s, 1, &d.cases[1].system.equations).unwrap();
        assert_eq!(diff.engine_rows, 3);
        assert!(diff.rows[2].matches);
    }
}
