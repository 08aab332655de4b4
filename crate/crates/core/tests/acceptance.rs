//! Acceptance criteria, one verdict line each. Runs without the libtest
//! harness so every line is printed; exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use gexpand::algebra::{Fraction, Monomial};
use gexpand::catalog::{
    discrepancy_report, draws, engine_branches, engine_instance, residual_max, DiscrepancyReport,
    Grid, PdeOperator, Verdict, DEFAULT_TOL, DRAWS, NEAR_POLE,
};
use gexpand::expansion::{balance_degree, derive, CoefficientBranch};
use gexpand::expr::Expr;
use gexpand::gbranch::{eval_w_jet, DeltaCase, GBranch};
use gexpand::reduction::{Equation, PdeSpec};
use gexpand::Error;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ok(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        pass: false,
        detail: detail.into(),
    }
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn specs() -> [PdeSpec; 3] {
    Equation::ALL.map(PdeSpec::new)
}

/// |w' + w^2 + lambda w + mu| <= 1e-9 over 100 draws x 50 points per case, in under 1 s.
/// Near a simple pole w ~ 1/(xi - xi_p), so points with |w| > 1/NEAR_POLE sit closer than
/// NEAR_POLE to it; there w' and w^2 cancel at magnitude ~|w|^2 and f64 rounding alone
/// exceeds 1e-9. Those points are counted and reported with their own maximum.
fn riccati_certification() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut near_worst, mut near_rel) = (0.0f64, 0.0f64, 0.0f64);
    let (mut poles, mut near) = (0, 0);
    for case in DeltaCase::ALL {
        let mut rng = gexpand::catalog::draw_rng(1, &format!("riccati/{case}"));
        for _ in 0..100 {
            let lambda = if rng.gen_bool(0.5) { 1.0 } else { -1.0 } * rng.gen_range(0.5..=3.0);
            let d: f64 = rng.gen_range(1.0..=4.0);
            let mu = match case {
                DeltaCase::Positive => (lambda * lambda - d) / 4.0,
                DeltaCase::Negative => (lambda * lambda + d) / 4.0,
                DeltaCase::Zero => lambda * lambda / 4.0,
            };
            let (k1, k2) = (rng.gen_range(0.5..=3.0), rng.gen_range(0.5..=3.0));
            let g = GBranch::new(lambda, mu, k1, k2).unwrap();
            if g.case != case {
                return fail(format!("draw landed in {} instead of {case}", g.case));
            }
            for _ in 0..50 {
                let xi: f64 = rng.gen_range(-5.0..=5.0);
                match eval_w_jet(&g, xi, 1) {
                    Ok(w) => {
                        let r = (w.derivative(1) + w.value() * w.value() + lambda * w.value() + mu)
                            .abs();
                        if w.value().abs() > 1.0 / NEAR_POLE {
                            near += 1;
                            near_worst = near_worst.max(r);
                            near_rel = near_rel.max(r / (w.value() * w.value()));
                        } else {
                            worst = worst.max(r);
                        }
                    }
                    Err(Error::Pole { .. }) => poles += 1,
                    Err(e) => return fail(e.to_string()),
                }
            }
        }
    }
    let t = start.elapsed();
    check(
        worst <= 1e-9 && t < Duration::from_secs(1),
        format!(
            "max |w' + w^2 + lambda w + mu| = {worst:.2e} over {} points; {near} points within {NEAR_POLE:e} of a pole \
             (max {near_worst:.2e}, {near_rel:.1e} relative to w^2), {poles} poles; {t:.2?}",
            15000 - near - poles
        ),
    )
}

fn balancing() -> Outcome {
    let mut got = Vec::new();
    for spec in specs() {
        let d = match derive(&spec) {
            Ok(d) => d,
            Err(e) => return fail(e.to_string()),
        };
        for c in &d.cases {
            got.push((spec.equation, balance_degree(&c.phi).unwrap()));
        }
    }
    let want = |e: Equation| if e == Equation::Burgers { 1 } else { 2 };
    let pass = got.iter().all(|(e, m)| *m == want(*e));
    let shown: Vec<String> = got.iter().map(|(e, m)| format!("{e}:{m}")).collect();
    check(pass, format!("m per c1 case = {}", shown.join(" ")))
}

/// `num / den_symbol` as an exact fraction over the branch's table.
fn expected(b: &CoefficientBranch, num: &str, den: Option<&str>) -> Fraction {
    let n = Expr::parse(num).unwrap().to_param(&b.symbols).unwrap();
    let m = match den {
        Some(s) => Monomial::var(b.symbols.len(), b.symbols.require(s).unwrap()),
        None => Monomial::one(b.symbols.len()),
    };
    Fraction::new(n, m)
}

fn leading_coefficients() -> Outcome {
    let table: [(Equation, &[(&str, &str, Option<&str>)]); 3] = [
        (Equation::Burgers, &[("a1", "2*beta", Some("alpha"))]),
        (
            Equation::Kdv,
            &[
                ("a2", "-12*gamma", Some("alpha")),
                ("a1", "-12*gamma*lambda", Some("alpha")),
            ],
        ),
        (
            Equation::Kp,
            &[("a2", "-2*k^2", None), ("a1", "-2*k^2*lambda", None)],
        ),
    ];
    let mut checked = 0;
    for (eq, wants) in table {
        let branches = engine_branches(&PdeSpec::new(eq)).unwrap();
        for b in &branches {
            for (name, num, den) in wants {
                let got = b.get(name).unwrap();
                if !got.sub(&expected(b, num, *den)).is_zero() {
                    return fail(format!("{eq} {name} = {} on a branch", got.render()));
                }
                checked += 1;
            }
        }
    }
    ok(format!(
        "{checked} coefficients equal 2b/a, -12g/a, -12g*lambda/a, -2k^2, -2k^2*lambda exactly"
    ))
}

fn engine_draws(spec: &PdeSpec, i: usize, case: DeltaCase) -> Vec<BTreeMap<String, f64>> {
    draws(
        spec.equation,
        case,
        42,
        &format!("engine:{}:{i}", spec.equation),
        DRAWS,
    )
}

/// Every branch, every c1 case, 10 draws per discriminant sign, residual <= 1e-7; in under 30 s.
/// Branches whose coefficients carry sqrt(lambda^2 - 4 mu) are not real for negative sign and are counted apart.
fn end_to_end() -> Outcome {
    let start = Instant::now();
    let (mut runs, mut unreal, mut worst) = (0, 0, 0.0f64);
    for spec in specs() {
        let grid = Grid::default_for(spec.equation);
        for (i, b) in engine_branches(&spec).unwrap().iter().enumerate() {
            for case in DeltaCase::ALL {
                for p in engine_draws(&spec, i, case) {
                    let Some(u) = engine_instance(b, &p).unwrap() else {
                        unreal += 1;
                        continue;
                    };
                    let op = PdeOperator::new(&spec, &p).unwrap();
                    let r = residual_max(&op, &u, &grid).unwrap();
                    match r.max_residual {
                        Some(v) if v <= DEFAULT_TOL => worst = worst.max(v),
                        other => {
                            return fail(format!(
                                "engine:{}:{i} [{case}] residual {other:?}",
                                spec.equation
                            ))
                        }
                    }
                    runs += 1;
                }
            }
        }
    }
    let t = start.elapsed();
    check(
        t < Duration::from_secs(30),
        format!("{runs} runs, worst residual {worst:.2e}; {unreal} draws not real (sqrt of negative discriminant); {t:.2?}"),
    )
}

fn discriminating_power() -> Outcome {
    let (mut runs, mut weakest) = (0, f64::INFINITY);
    for spec in specs() {
        let grid = Grid::default_for(spec.equation);
        for (i, b) in engine_branches(&spec).unwrap().iter().enumerate() {
            for case in DeltaCase::ALL {
                for p in engine_draws(&spec, i, case) {
                    let Some(mut u) = engine_instance(b, &p).unwrap() else {
                        continue;
                    };
                    u.coeffs[0] += 0.1;
                    let op = PdeOperator::new(&spec, &p).unwrap();
                    let r = residual_max(&op, &u, &grid)
                        .unwrap()
                        .max_residual
                        .unwrap_or(f64::INFINITY);
                    weakest = weakest.min(r);
                    runs += 1;
                }
            }
        }
    }
    check(
        weakest > 1e-3,
        format!("smallest residual after a0 += 0.1: {weakest:.2e} over {runs} runs"),
    )
}

fn reports() -> Vec<DiscrepancyReport> {
    specs()
        .iter()
        .map(|s| {
            discrepancy_report(s, DEFAULT_TOL, 0, &Grid::default_for(s.equation), DRAWS).unwrap()
        })
        .collect()
}

fn catalog_classification(reports: &[DiscrepancyReport]) -> Outcome {
    let printed: Vec<_> = reports
        .iter()
        .flat_map(|r| &r.paper)
        .filter(|r| !r.id.ends_with("+xi"))
        .collect();
    if printed.len() != 36 {
        return fail(format!(
            "{} printed rows classified, expected 36",
            printed.len()
        ));
    }
    if let Some(r) = printed
        .iter()
        .find(|r| r.classification == Verdict::NotApplicable || r.draws.len() < DRAWS)
    {
        return fail(format!(
            "{} [{}] not classified over {DRAWS} draws",
            r.id, r.delta_case
        ));
    }
    let rows: Vec<_> = reports.iter().flat_map(|r| r.rows()).collect();
    let disagree: Vec<String> = rows
        .iter()
        .filter(|r| !r.fd_agrees)
        .map(|r| format!("{} [{}]", r.id, r.delta_case))
        .collect();
    let worst_fd = rows
        .iter()
        .flat_map(|r| &r.draws)
        .filter_map(|d| d.fd.max_delta)
        .fold(0.0f64, f64::max);
    // repeat the cheap equations to confirm the classification is reproducible
    let again: Vec<_> = specs()[..2]
        .iter()
        .map(|s| {
            discrepancy_report(s, DEFAULT_TOL, 0, &Grid::default_for(s.equation), DRAWS).unwrap()
        })
        .collect();
    let stable = again.iter().zip(reports).all(|(a, b)| a == b);
    let passing: Vec<String> = printed
        .iter()
        .filter(|r| r.classification == Verdict::Pass)
        .map(|r| format!("{}[{}]", r.id, r.delta_case))
        .collect();
    check(
        disagree.is_empty() && stable,
        format!(
            "36 rows classified, {} PASS ({}); jet vs finite differences max delta {worst_fd:.2e}{}{}",
            passing.len(),
            passing.join(" "),
            if disagree.is_empty() { String::new() } else { format!("; disagree: {}", disagree.join(", ")) },
            if stable { "" } else { "; rerun differs" },
        ),
    )
}

fn system_diff(reports: &[DiscrepancyReport]) -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (eq, rows, top) in [
        (Equation::Burgers, 3, "1/2*alpha*a1^2 - beta*a1"),
        (Equation::Kdv, 5, "1/2*alpha*a2^2 + 6*a2*gamma"),
    ] {
        let r = reports.iter().find(|r| r.equation == eq).unwrap();
        for sys in &r.systems {
            let d = derive(&PdeSpec::new(eq)).unwrap();
            let engine_top = d.cases[sys.c1_case].system.equations.last().unwrap();
            let want = Expr::parse(top)
                .unwrap()
                .to_param(engine_top.symbols())
                .unwrap();
            let top_ok = *engine_top == want;
            let emitted = sys.rows.len() == rows && sys.rows.iter().all(|r| r.delta.is_some());
            pass &= sys.engine_rows == rows && top_ok && emitted;
            let differing: Vec<String> = sys
                .rows
                .iter()
                .filter(|r| !r.matches)
                .map(|r| format!("w^{}", r.power))
                .collect();
            notes.push(format!(
                "{eq} c1 case {}: {} rows, top {}, printed differs at [{}]",
                sys.c1_case,
                sys.engine_rows,
                if top_ok { "matches" } else { "DIFFERS" },
                differing.join(",")
            ));
        }
    }
    check(pass, notes.join("; "))
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_gexpand"))
}

fn scratch_dir() -> PathBuf {
    std::env::temp_dir().join(format!("gexpand-acceptance-{}", std::process::id()))
}

fn scratch(name: &str) -> PathBuf {
    let dir = scratch_dir();
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn sample(family: &str, params: &str, out: &PathBuf) -> Result<String, String> {
    let status = Command::new(bin())
        .args(["sample", "--family", family, "--params", params, "--out"])
        .arg(out)
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("{family} exited with {status}"));
    }
    std::fs::read_to_string(out).map_err(|e| e.to_string())
}

/// Data rows as (x, t, u); blank lines are skipped.
fn rows(csv: &str) -> Vec<[f64; 3]> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|f| f.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect()
}

fn figure_sampling() -> Outcome {
    let start = Instant::now();
    // lambda = 5 gives a positive discriminant with mu = 4
    let fig1 = match sample(
        "U11",
        "alpha=2,beta=1,mu=4,C=2,lambda=5,k1=2,k2=2",
        &scratch("fig1.csv"),
    ) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let fig8 = match sample(
        "U24",
        "alpha=1/2,gamma=1,lambda=2,mu=1/2,C=0.1,k1=1,k2=0.3",
        &scratch("fig8.csv"),
    ) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let t = start.elapsed();
    let (r1, r8) = (rows(&fig1), rows(&fig8));
    let finite = !r1.is_empty() && !r8.is_empty() && r1.iter().chain(&r8).all(|r| r[2].is_finite());
    let scripts = scratch("fig1.gp").exists() && scratch("fig8.gp").exists();
    // along t = 0 the wave coordinate is x itself
    let line: Vec<f64> = r8.iter().filter(|r| r[1] == 0.0).map(|r| r[2]).collect();
    let peak = line
        .iter()
        .enumerate()
        .fold(0, |best, (i, v)| if *v > line[best] { i } else { best });
    let interior = peak > 0 && peak + 1 < line.len();
    let rising = line[..=peak].windows(2).all(|w| w[1] > w[0]);
    let falling = line[peak..].windows(2).all(|w| w[1] < w[0]);
    let one_hump = interior && rising && falling;
    check(
        finite && scripts && one_hump && t < Duration::from_secs(5),
        format!(
            "fig1 {} finite points (u in [{:.3}, {:.3}]), fig8 {} finite points, t=0 peak {:.4} at sample {peak}/{} ({}); {t:.2?}",
            r1.len(),
            r1.iter().map(|r| r[2]).fold(f64::INFINITY, f64::min),
            r1.iter().map(|r| r[2]).fold(f64::NEG_INFINITY, f64::max),
            r8.len(),
            line.get(peak).copied().unwrap_or(f64::NAN),
            line.len(),
            if one_hump { "single hump" } else { "NOT single-humped" },
        ),
    )
}

fn run_twice(args: &[&str], files: &[&str]) -> Result<bool, String> {
    let mut outputs = Vec::new();
    for round in 0..2 {
        let dir = scratch(&format!("det{round}"));
        std::fs::create_dir_all(&dir).unwrap();
        let out = Command::new(bin())
            .args(args)
            .current_dir(&dir)
            .output()
            .map_err(|e| e.to_string())?;
        let mut blob = out.stdout;
        for f in files {
            blob.extend(std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))?);
        }
        outputs.push((out.status.code(), blob));
    }
    Ok(outputs[0] == outputs[1] && !outputs[0].1.is_empty())
}

fn determinism() -> Outcome {
    let commands: [(&[&str], &[&str]); 6] = [
        (&["derive", "--equation", "kp"], &[]),
        (
            &[
                "verify",
                "--family",
                "engine:kdv:1",
                "--seed",
                "7",
                "--case",
                "negative",
            ],
            &[],
        ),
        (&["verify", "--family", "U33", "--seed", "3"], &[]),
        (
            &[
                "sample",
                "--family",
                "U24",
                "--params",
                "alpha=1/2,gamma=1,lambda=2,mu=1/2,C=0.1,k1=1,k2=0.3",
                "--out",
                "u.csv",
            ],
            &["u.csv", "u.gp"],
        ),
        (
            &[
                "sample",
                "--family",
                "U31+xi",
                "--params",
                "k=1,a=1/2,lambda=1,mu=-1,C=1,k1=1,k2=1/2",
                "--grid",
                "x=-2:2:8,t=0:1:5,y=-1:1:3",
                "--out",
                "kp.csv",
            ],
            &["kp.csv", "kp.gp"],
        ),
        (&["report", "--equation", "burgers", "--seed", "11"], &[]),
    ];
    for (args, files) in commands {
        match run_twice(args, files) {
            Ok(true) => {}
            Ok(false) => return fail(format!("`{}` differs between runs", args.join(" "))),
            Err(e) => return fail(e),
        }
    }
    ok("derive, verify (engine and printed), sample (2-D and KP) and report repeat byte for byte")
}

fn main() {
    let mut results: Vec<(&str, Outcome)> = vec![
        ("AC1 riccati certification", riccati_certification()),
        ("AC2 balancing degree", balancing()),
        ("AC3 leading coefficients", leading_coefficients()),
        ("AC4 end-to-end residual", end_to_end()),
        ("AC5 discriminating power", discriminating_power()),
    ];
    let reports = reports();
    results.push((
        "AC6 catalog classification",
        catalog_classification(&reports),
    ));
    results.push(("AC7 system diff", system_diff(&reports)));
    results.push(("AC8 figure sampling", figure_sampling()));
    results.push(("AC9 determinism", determinism()));

    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "{} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    let _ = std::fs::remove_dir_all(scratch_dir());
    if failed > 0 {
        std::process::exit(1);
    }
}
