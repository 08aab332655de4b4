//! Closed-form solutions of `G'' + lambda G' + mu G = 0`, jets of `w = G'/G`,
//! and assembly of `u = c1 + sum a_k w^k` along a linear wave coordinate.

mod jet;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use jet::{Jet, MAX_ORDER};

use crate::error::{Error, Result};
use crate::expansion::CoefficientBranch;
use crate::reduction::{Equation, SQRT_DELTA};

/// Discriminants with `|delta|` at or below this select the degenerate branch.
pub const ZERO_BAND: f64 = 1e-12;
/// Denominators below this magnitude are reported as poles.
pub const POLE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DeltaCase {
    Positive,
    Negative,
    Zero,
}

impl DeltaCase {
    pub const ALL: [DeltaCase; 3] = [DeltaCase::Positive, DeltaCase::Negative, DeltaCase::Zero];

    pub fn classify(delta: f64) -> DeltaCase {
        if delta.abs() <= ZERO_BAND {
            DeltaCase::Zero
        } else if delta > 0.0 {
            DeltaCase::Positive
        } else {
            DeltaCase::Negative
        }
    }

    pub fn condition(self) -> &'static str {
        match self {
            DeltaCase::Positive => "lambda^2 - 4*mu > 0",
            DeltaCase::Negative => "lambda^2 - 4*mu < 0",
            DeltaCase::Zero => "lambda^2 - 4*mu = 0",
        }
    }
}

impl fmt::Display for DeltaCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeltaCase::Positive => "positive",
            DeltaCase::Negative => "negative",
            DeltaCase::Zero => "zero",
        })
    }
}

/// One solution of the auxiliary linear ODE, fixed by `(k1, k2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GBranch {
    pub lambda: f64,
    pub mu: f64,
    pub k1: f64,
    pub k2: f64,
    pub case: DeltaCase,
}

fn pole(den: f64, xi: f64) -> Error {
    Error::Pole {
        denominator: den,
        location: format!("xi={xi}"),
    }
}

impl GBranch {
    pub fn new(lambda: f64, mu: f64, k1: f64, k2: f64) -> Result<Self> {
        if k1 == 0.0 && k2 == 0.0 {
            return Err(Error::Usage("k1 and k2 must not both vanish".into()));
        }
        let case = DeltaCase::classify(lambda * lambda - 4.0 * mu);
        Ok(GBranch {
            lambda,
            mu,
            k1,
            k2,
            case,
        })
    }

    pub fn delta(&self) -> f64 {
        self.lambda * self.lambda - 4.0 * self.mu
    }

    /// `sqrt(|delta|) / 2`, the frequency inside f and g.
    fn half_root(&self) -> f64 {
        self.delta().abs().sqrt() / 2.0
    }

    /// `f(xi) = (k1 sinh z + k2 cosh z) / (k1 cosh z + k2 sinh z)`, `z = sqrt(delta)/2 xi`,
    /// for positive delta. Evaluated as `tanh(z + atanh(k2/k1))` or
    /// `coth(z + atanh(k1/k2))`, whichever ratio is below one; `|k1| = |k2|`
    /// makes `f` the constant `k2/k1`.
    pub fn f_jet(&self, xi: Jet) -> Result<Jet> {
        let z = xi * self.half_root();
        let (k1, k2) = (self.k1, self.k2);
        if k1.abs() == k2.abs() {
            return Ok(Jet::constant(k2 / k1, xi.order()));
        }
        if k2.abs() < k1.abs() {
            return Ok((z + (k2 / k1).atanh()).tanh());
        }
        let t = (z + (k1 / k2).atanh()).tanh();
        if t.value().abs() < POLE_TOL {
            return Err(pole(t.value(), xi.value()));
        }
        Ok(t.recip())
    }

    /// `g(xi)` for negative delta.
    pub fn g_jet(&self, xi: Jet) -> Result<Jet> {
        let (s, c) = (xi * self.half_root()).sin_cos();
        let den = c * self.k1 + s * self.k2;
        if den.value().abs() < POLE_TOL {
            return Err(pole(den.value(), xi.value()));
        }
        Ok((c * self.k2 - s * self.k1) / den)
    }

    /// `k1 / (k1 xi + k2)`.
    pub fn rational_jet(&self, xi: Jet) -> Result<Jet> {
        let den = xi * self.k1 + self.k2;
        if den.value().abs() < POLE_TOL {
            return Err(pole(den.value(), xi.value()));
        }
        Ok(Jet::constant(self.k1, xi.order()) / den)
    }

    /// Jet of `w = G'/G` at `xi`.
    pub fn w_jet(&self, xi: Jet) -> Result<Jet> {
        let shift = -self.lambda / 2.0;
        Ok(match self.case {
            DeltaCase::Positive => (self.f_jet(xi)? * self.half_root()) + shift,
            DeltaCase::Negative => (self.g_jet(xi)? * self.half_root()) + shift,
            DeltaCase::Zero => self.rational_jet(xi)? + shift,
        })
    }
}

pub fn eval_w_jet(g: &GBranch, xi: f64, order: usize) -> Result<Jet> {
    if order > MAX_ORDER {
        return Err(Error::Usage(format!(
            "jet order {order} exceeds {MAX_ORDER}"
        )));
    }
    g.w_jet(Jet::var(xi, order))
}

/// The underlying `G(xi)`; zero marks a pole of `w`.
#[allow(non_snake_case)]
pub fn eval_G(g: &GBranch, xi: f64) -> f64 {
    let decay = (-g.lambda / 2.0 * xi).exp();
    let z = g.half_root() * xi;
    decay
        * match g.case {
            DeltaCase::Positive => g.k1 * z.cosh() + g.k2 * z.sinh(),
            DeltaCase::Negative => g.k1 * z.cos() + g.k2 * z.sin(),
            DeltaCase::Zero => g.k1 * xi + g.k2,
        }
}

/// A function of one wave coordinate `xi = px x + pt t + py y`.
pub trait WaveProfile {
    /// Coefficients `(px, pt, py)`.
    fn wave(&self) -> [f64; 3];

    /// Jet of the profile in `xi`.
    fn profile(&self, xi: f64, order: usize) -> Result<Jet>;

    fn xi(&self, point: [f64; 3]) -> f64 {
        let p = self.wave();
        p[0] * point[0] + p[1] * point[1] + p[2] * point[2]
    }

    fn value(&self, point: [f64; 3]) -> Result<f64> {
        self.profile(self.xi(point), 0)
            .map(|j| j.value())
            .map_err(|e| locate(e, point))
    }

    /// `d^(i+j+l) u / dx^i dt^j dy^l`, from the xi-jet by the chain rule.
    fn partial(&self, point: [f64; 3], orders: [usize; 3]) -> Result<f64> {
        let n: usize = orders.iter().sum();
        let jet = self
            .profile(self.xi(point), n)
            .map_err(|e| locate(e, point))?;
        let p = self.wave();
        let scale: f64 = (0..3).map(|a| p[a].powi(orders[a] as i32)).product();
        Ok(scale * jet.derivative(n))
    }
}

/// Replace the `xi=` location of a pole with the grid point.
pub fn locate(e: Error, point: [f64; 3]) -> Error {
    match e {
        Error::Pole { denominator, .. } => Error::Pole {
            denominator,
            location: format!("(x, t, y) = ({}, {}, {})", point[0], point[1], point[2]),
        },
        e => e,
    }
}

/// Numeric family: `u = c1 + sum a_k w(xi)^k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssembledSolution {
    pub equation: Equation,
    pub coeffs: Vec<f64>,
    pub c1: f64,
    pub wave: [f64; 3],
    pub g: GBranch,
}

impl AssembledSolution {
    pub fn new(
        equation: Equation,
        coeffs: Vec<f64>,
        c1: f64,
        wave: [f64; 3],
        g: GBranch,
    ) -> Result<Self> {
        let m = match equation {
            Equation::Burgers => 1,
            Equation::Kdv | Equation::Kp => 2,
        };
        if coeffs.len() != m + 1 {
            return Err(Error::Structural(format!(
                "{equation} families have degree {m}, got {} coefficients",
                coeffs.len()
            )));
        }
        Ok(AssembledSolution {
            equation,
            coeffs,
            c1,
            wave,
            g,
        })
    }

    /// Evaluate an engine branch at numeric bindings for its parameters,
    /// `lambda`, `mu` and `C`.
    pub fn from_branch(
        branch: &CoefficientBranch,
        bindings: &BTreeMap<String, f64>,
        k1: f64,
        k2: f64,
    ) -> Result<Self> {
        let syms = &branch.symbols;
        let get = |name: &str| {
            bindings
                .get(name)
                .copied()
                .ok_or_else(|| Error::Usage(format!("parameter `{name}` is not bound")))
        };
        let lambda = get("lambda")?;
        let mu = get("mu")?;
        let delta = lambda * lambda - 4.0 * mu;
        if branch.uses_sqrt_delta && delta < -ZERO_BAND {
            return Err(Error::Usage(format!(
                "branch is real only for lambda^2 - 4*mu >= 0, got {delta}"
            )));
        }
        let unknown = |n: &str| branch.assignments.contains_key(n);
        let mut values = vec![0.0; syms.len()];
        for (i, name) in syms.names().iter().enumerate() {
            values[i] = match name.as_str() {
                SQRT_DELTA => delta.max(0.0).sqrt(),
                n if unknown(n) => f64::NAN,
                n => get(n)?,
            };
        }
        for &i in &branch.den_symbols() {
            if values[i] == 0.0 {
                return Err(Error::Usage(format!(
                    "assumption {} != 0 violated",
                    syms.name(i)
                )));
            }
        }
        let omega = branch.assignments["omega"].eval_f64(&values);
        values[syms.require("omega")?] = omega;
        let coeffs: Vec<f64> = branch
            .ansatz_coeffs()
            .iter()
            .map(|f| f.eval_f64(&values))
            .collect();
        let c1 = branch.assignments["c1"].eval_f64(&values);
        let wave = branch.wave().map(|f| f.eval_f64(&values));
        AssembledSolution::new(
            branch.spec.equation,
            coeffs,
            c1,
            wave,
            GBranch::new(lambda, mu, k1, k2)?,
        )
    }
}

impl WaveProfile for AssembledSolution {
    fn wave(&self) -> [f64; 3] {
        self.wave
    }

    fn profile(&self, xi: f64, order: usize) -> Result<Jet> {
        let w = eval_w_jet(&self.g, xi, order)?;
        let mut u = Jet::constant(0.0, order);
        for a in self.coeffs.iter().rev() {
            u = u * w + *a;
        }
        Ok(u + self.c1)
    }
}

/// `assemble_u`: the family as an evaluable map over `(x, t, y)`.
pub fn assemble_u(family: AssembledSolution) -> impl Fn([f64; 3]) -> Result<f64> {
    move |p| family.value(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn riccati(g: &GBranch, xi: f64) -> f64 {
        let w = eval_w_jet(g, xi, 1).unwrap();
        let (v, d) = (w.value(), w.derivative(1));
        d + v * v + g.lambda * v + g.mu
    }

    #[test]
    fn spec_examples() {
        let g = GBranch::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.case, DeltaCase::Positive);
        let w = eval_w_jet(&g, 0.0, 2).unwrap();
        assert_eq!(w.value(), 0.0);
        assert!((w.derivative(1) - 1.0).abs() < 1e-15);
        assert_eq!(eval_G(&g, 0.0), 1.0);

        let g = GBranch::new(2.0, 1.0, 1.0, 1.0).unwrap();
        assert_eq!(g.case, DeltaCase::Zero);
        assert_eq!(eval_w_jet(&g, 0.0, 0).unwrap().value(), 0.0);

        let g = GBranch::new(0.0, 1.0, 1.0, 0.0).unwrap();
        let w = eval_w_jet(&g, 0.0, 1).unwrap();
        assert_eq!(w.value(), 0.0);
        assert!((w.derivative(1) + 1.0).abs() < 1e-15);
        assert!((eval_G(&g, std::f64::consts::PI) + 1.0).abs() < 1e-15);

        let g = GBranch::new(0.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(eval_G(&g, 3.7), 1.0);
    }

    #[test]
    fn zero_band() {
        assert_eq!(DeltaCase::classify(1e-13), DeltaCase::Zero);
        assert_eq!(DeltaCase::classify(-1e-11), DeltaCase::Negative);
    }

    #[test]
    fn pole_is_reported() {
        // k1 xi + k2 = 0 at xi = -1
        let g = GBranch::new(2.0, 1.0, 1.0, 1.0).unwrap();
        match eval_w_jet(&g, -1.0, 2) {
            Err(Error::Pole { denominator, .. }) => assert_eq!(denominator, 0.0),
            other => panic!("expected pole, got {other:?}"),
        }
        assert_eq!(eval_G(&g, -1.0), 0.0);
    }

    #[test]
    fn both_constants_zero_rejected() {
        assert!(GBranch::new(1.0, 0.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn constant_family() {
        let g = GBranch::new(1.0, 0.0, 1.0, 0.5).unwrap();
        let s = AssembledSolution::new(Equation::Burgers, vec![0.0, 0.0], 5.0, [1.0, -1.0, 0.0], g)
            .unwrap();
        let u = assemble_u(s);
        for p in [[0.0, 0.0, 0.0], [3.0, 1.0, 0.0], [-7.5, 2.0, 0.0]] {
            assert_eq!(u(p).unwrap(), 5.0);
        }
    }

    #[test]
    fn u11_rational_row_at_origin() {
        // 2 beta/alpha + 2 beta/alpha w, alpha = 2, beta = 1
        let g = GBranch::new(2.0, 1.0, 1.0, 1.0).unwrap();
        let s = AssembledSolution::new(Equation::Burgers, vec![1.0, 1.0], 0.0, [1.0, 0.0, 0.0], g)
            .unwrap();
        assert_eq!(s.value([0.0, 0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn kp_profile_constant_along_level_lines() {
        let g = GBranch::new(1.0, -2.0, 1.0, 0.3).unwrap();
        let (k, a) = (1.5, 0.7);
        let s = AssembledSolution::new(Equation::Kp, vec![-1.0, 0.2, 0.4], 0.0, [k, 0.9, a], g)
            .unwrap();
        let base = s.value([0.3, 1.0, 0.0]).unwrap();
        for y in [-2.0, 0.5, 4.0] {
            let x = 0.3 - a * y / k;
            assert!((s.value([x, 1.0, y]).unwrap() - base).abs() < 1e-12);
        }
    }

    #[test]
    fn degree_is_checked() {
        let g = GBranch::new(1.0, 0.0, 1.0, 0.0).unwrap();
        assert!(
            AssembledSolution::new(Equation::Kdv, vec![1.0, 2.0], 0.0, [1.0, 0.0, 0.0], g).is_err()
        );
    }

    #[test]
    fn equal_weights_have_no_pole() {
        // G = 2 e^z never vanishes, however negative z gets
        let g = GBranch::new(5.0, 4.0, 2.0, 2.0).unwrap();
        for xi in [-40.0, -8.0, 0.0, 9.0] {
            let w = eval_w_jet(&g, xi, 3).unwrap();
            assert!((w.value() - (-2.5 + 1.5)).abs() < 1e-15);
            assert_eq!(w.derivative(1), 0.0);
        }
    }

    proptest! {
        #[test]
        fn f_matches_hyperbolic_quotient(
            k1 in -3.0..3.0f64, k2 in -3.0..3.0f64, d in 0.25..9.0f64, xi in -4.0..4.0f64,
        ) {
            prop_assume!(k1.abs() > 0.05 || k2.abs() > 0.05);
            let g = GBranch::new(0.0, -d / 4.0, k1, k2).unwrap();
            let z = d.sqrt() / 2.0 * xi;
            let den = k1 * z.cosh() + k2 * z.sinh();
            prop_assume!(den.abs() > 1e-3 * z.cosh());
            let want = (k1 * z.sinh() + k2 * z.cosh()) / den;
            let got = g.f_jet(Jet::var(xi, 0)).unwrap().value();
            prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()), "{got} vs {want}");
        }

        #[test]
        fn riccati_identity(
            lambda in -3.0..3.0f64, d in 0.25..9.0f64, case in 0usize..3,
            k1 in 0.5..3.0f64, k2 in 0.5..3.0f64, xi in -10.0..10.0f64,
        ) {
            let delta = [d, -d, 0.0][case];
            let mu = (lambda * lambda - delta) / 4.0;
            let g = GBranch::new(lambda, mu, k1, k2).unwrap();
            if let Ok(w) = eval_w_jet(&g, xi, 1) {
                let scale = 1.0 + w.value().powi(2);
                prop_assert!(riccati(&g, xi).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn hyperbolic_reduction(lambda in -3.0..3.0f64, d in 0.25..9.0f64, xi in -10.0..10.0f64) {
            let mu = (lambda * lambda - d) / 4.0;
            let g = GBranch::new(lambda, mu, 1.0, 0.0).unwrap();
            let h = d.sqrt() / 2.0;
            let want = -lambda / 2.0 + h * (h * xi).tanh();
            prop_assert!((eval_w_jet(&g, xi, 0).unwrap().value() - want).abs() <= 1e-12);
        }

        #[test]
        fn log_derivative_of_g(
            lambda in -2.0..2.0f64, d in 0.25..4.0f64, case in 0usize..3,
            k1 in 0.5..3.0f64, k2 in 0.5..3.0f64, xi in -4.0..4.0f64,
        ) {
            let delta = [d, -d, 0.0][case];
            let mu = (lambda * lambda - delta) / 4.0;
            let g = GBranch::new(lambda, mu, k1, k2).unwrap();
            let rho = eval_w_jet(&g, xi, 8).map(|j| j.radius_estimate());
            prop_assume!(rho.is_ok());
            let h = (rho.unwrap() / 50.0).min(1e-3);
            let gv: Vec<f64> = (-3..=3).map(|i| eval_G(&g, xi + i as f64 * h)).collect();
            prop_assume!(gv.iter().all(|v| v.abs() > 1e-2));
            let lg: Vec<f64> = gv.iter().map(|v| v.abs().ln()).collect();
            let fd = (-lg[0] + 9.0 * lg[1] - 45.0 * lg[2] + 45.0 * lg[4] - 9.0 * lg[5] + lg[6]) / (60.0 * h);
            let w = eval_w_jet(&g, xi, 0).unwrap().value();
            prop_assert!((fd - w).abs() <= 1e-8 * (1.0 + w.abs()), "fd {fd} w {w}");
        }

        #[test]
        fn jet_matches_central_differences(
            lambda in -2.0..2.0f64, d in 0.25..4.0f64, case in 0usize..3,
            k1 in 0.5..3.0f64, k2 in 0.5..3.0f64, xi in -5.0..5.0f64,
        ) {
            let delta = [d, -d, 0.0][case];
            let mu = (lambda * lambda - delta) / 4.0;
            let g = GBranch::new(lambda, mu, k1, k2).unwrap();
            let s = AssembledSolution::new(Equation::Kdv, vec![0.3, -1.0, 2.0], 0.1, [1.0, 0.0, 0.0], g).unwrap();
            let jet = s.profile(xi, 8);
            prop_assume!(jet.is_ok());
            let jet = jet.unwrap();
            // smooth region: stay clear of poles
            prop_assume!(jet.radius_estimate() > 0.3);
            let h = (jet.radius_estimate() / 16.0).min(0.02);
            let u: Vec<f64> = (-3..=3).map(|i| s.profile(xi + i as f64 * h, 0).map(|j| j.value())).collect::<Result<_>>().unwrap();
            let d1 = (-u[0] + 9.0 * u[1] - 45.0 * u[2] + 45.0 * u[4] - 9.0 * u[5] + u[6]) / (60.0 * h);
            let d2 = (2.0 * u[0] - 27.0 * u[1] + 270.0 * u[2] - 490.0 * u[3] + 270.0 * u[4] - 27.0 * u[5] + 2.0 * u[6]) / (180.0 * h * h);
            let scale = 1.0 + jet.value().abs() + jet.derivative(1).abs() + jet.derivative(2).abs();
            prop_assert!((d1 - jet.derivative(1)).abs() <= 1e-5 * scale);
            prop_assert!((d2 - jet.derivative(2)).abs() <= 1e-5 * scale);
        }
    }
}
