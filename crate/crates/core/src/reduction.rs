//! PDE -> traveling-wave ODE -> integrated ODE -> shifted phi-ODE.
//!
//! A traveling-wave ODE is a differential polynomial in `u(xi)`: a map from
//! [`DiffMono`] (multiset of derivative orders) to a coefficient. The three
//! supported equations are stored as differential polynomials in the partials
//! of `u` and pushed through the chain rule for a linear wave coordinate.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{quadratic_roots, Fraction, ParamExpr, Rational, SymbolTable};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Burgers,
    Kdv,
    Kp,
}

impl Equation {
    pub const ALL: [Equation; 3] = [Equation::Burgers, Equation::Kdv, Equation::Kp];

    pub fn name(self) -> &'static str {
        match self {
            Equation::Burgers => "burgers",
            Equation::Kdv => "kdv",
            Equation::Kp => "kp",
        }
    }

    /// Coefficient symbols of the equation itself (sigma^2 is numeric).
    pub fn parameters(self) -> &'static [&'static str] {
        match self {
            Equation::Burgers => &["alpha", "beta"],
            Equation::Kdv => &["alpha", "gamma"],
            Equation::Kp => &["k", "a"],
        }
    }

    pub fn spatial_dims(self) -> usize {
        match self {
            Equation::Kp => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Equation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "burgers" => Ok(Equation::Burgers),
            "kdv" => Ok(Equation::Kdv),
            "kp" => Ok(Equation::Kp),
            other => Err(Error::Usage(format!(
                "unknown equation `{other}` (burgers|kdv|kp)"
            ))),
        }
    }
}

/// Which PDE, plus the numeric sign `sigma^2 = +-1` for KP.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PdeSpec {
    pub equation: Equation,
    pub sigma2: i8,
}

impl PdeSpec {
    pub fn new(equation: Equation) -> Self {
        PdeSpec {
            equation,
            sigma2: 1,
        }
    }

    pub fn kp(sigma2: i8) -> Result<Self> {
        if sigma2 != 1 && sigma2 != -1 {
            return Err(Error::Usage(format!(
                "sigma2 must be +1 or -1, got {sigma2}"
            )));
        }
        Ok(PdeSpec {
            equation: Equation::Kp,
            sigma2,
        })
    }

    /// Parse a `key=value` block (`equation=kp`, `sigma2=-1`, ...). Keys other
    /// than `equation` and `sigma2` are returned as parameter bindings.
    pub fn parse(text: &str) -> Result<(PdeSpec, BTreeMap<String, String>)> {
        let mut equation = None;
        let mut sigma2 = 1i8;
        let mut rest = BTreeMap::new();
        for item in text
            .split(['\n', ',', ';'])
            .map(str::trim)
            .filter(|s| !s.is_empty())
        {
            if item.starts_with('#') {
                continue;
            }
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::Usage(format!("expected key=value, got `{item}`")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "equation" => equation = Some(v.parse::<Equation>()?),
                "sigma2" => {
                    sigma2 = v
                        .parse()
                        .map_err(|_| Error::Usage(format!("bad sigma2 `{v}`")))?;
                }
                _ => {
                    if rest.insert(k.to_string(), v.to_string()).is_some() {
                        return Err(Error::Usage(format!("`{k}` bound twice")));
                    }
                }
            }
        }
        let equation = equation.ok_or_else(|| Error::Usage("missing `equation=`".into()))?;
        let spec = match equation {
            Equation::Kp => PdeSpec::kp(sigma2)?,
            e => PdeSpec::new(e),
        };
        Ok((spec, rest))
    }

    /// Session symbols before the ansatz unknowns are known.
    pub fn symbol_table(&self) -> Arc<SymbolTable> {
        let mut names: Vec<&str> = self.equation.parameters().to_vec();
        names.extend(["lambda", "mu", SQRT_DELTA, "omega", "c1", "C"]);
        SymbolTable::new(names).expect("static symbol list")
    }

    /// Wave-coordinate coefficients `(x, t, y)`: `xi = x - omega t` or
    /// `eta = k x + a y + omega t`.
    pub fn wave_coefficients(&self, syms: &Arc<SymbolTable>) -> [ParamExpr; 3] {
        let v = |n: &str| ParamExpr::var(syms, n).expect("session symbol");
        match self.equation {
            Equation::Burgers | Equation::Kdv => {
                [ParamExpr::one(syms), -v("omega"), ParamExpr::zero(syms)]
            }
            Equation::Kp => [v("k"), v("omega"), v("a")],
        }
    }

    /// The PDE as a sum of coefficient * product of partials of `u`.
    pub fn pde_terms(&self, syms: &Arc<SymbolTable>) -> Vec<(ParamExpr, Vec<Partial>)> {
        let v = |n: &str| ParamExpr::var(syms, n).expect("session symbol");
        let c = |n: i64| ParamExpr::int(syms, n);
        let p = |x, t, y| Partial { x, t, y };
        match self.equation {
            // u_t + alpha u u_x + beta u_xx
            Equation::Burgers => vec![
                (c(1), vec![p(0, 1, 0)]),
                (v("alpha"), vec![p(0, 0, 0), p(1, 0, 0)]),
                (v("beta"), vec![p(2, 0, 0)]),
            ],
            // u_t + alpha u u_x + gamma u_xxx
            Equation::Kdv => vec![
                (c(1), vec![p(0, 1, 0)]),
                (v("alpha"), vec![p(0, 0, 0), p(1, 0, 0)]),
                (v("gamma"), vec![p(3, 0, 0)]),
            ],
            // (u_t + 6 u u_x + u_xxx)_x + 3 sigma^2 u_yy
            Equation::Kp => vec![
                (c(1), vec![p(1, 1, 0)]),
                (c(6), vec![p(1, 0, 0), p(1, 0, 0)]),
                (c(6), vec![p(0, 0, 0), p(2, 0, 0)]),
                (c(1), vec![p(4, 0, 0)]),
                (c(3 * self.sigma2 as i64), vec![p(0, 0, 2)]),
            ],
        }
    }
}

/// Name of the symbol standing for `sqrt(lambda^2 - 4 mu)`.
pub const SQRT_DELTA: &str = "sqrt_delta";

/// A mixed partial derivative order of `u(x, t, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Partial {
    pub x: u32,
    pub t: u32,
    pub y: u32,
}

/// Product of derivatives `u^(e1) u^(e2) ...`, orders sorted ascending.
/// The empty product is the constant monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiffMono(Vec<u32>);

impl DiffMono {
    pub fn new(mut orders: Vec<u32>) -> Self {
        orders.sort_unstable();
        DiffMono(orders)
    }

    pub fn constant() -> Self {
        DiffMono(Vec::new())
    }

    pub fn orders(&self) -> &[u32] {
        &self.0
    }

    pub fn max_order(&self) -> Option<u32> {
        self.0.last().copied()
    }

    fn desc(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().rev().copied()
    }

    /// `d/dxi` by the product rule, as (monomial, multiplicity) pairs.
    pub fn derivative(&self) -> Vec<(DiffMono, u32)> {
        let mut out: Vec<(DiffMono, u32)> = Vec::new();
        for i in 0..self.0.len() {
            let mut e = self.0.clone();
            e[i] += 1;
            let m = DiffMono::new(e);
            match out.iter_mut().find(|(k, _)| *k == m) {
                Some((_, n)) => *n += 1,
                None => out.push((m, 1)),
            }
        }
        out
    }

    pub fn render(&self, var: &str) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|&e| match e {
                0 => var.to_string(),
                1..=3 => format!("{var}{}", "'".repeat(e as usize)),
                _ => format!("{var}^({e})"),
            })
            .collect();
        parts.join("*")
    }
}

// Ordered by descending derivative orders, so the most differentiated factor dominates.
impl Ord for DiffMono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.desc()
            .cmp(other.desc())
            .then(self.0.len().cmp(&other.0.len()))
    }
}

impl PartialOrd for DiffMono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Traveling-wave ODE `sum c_m m(u) + constant = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedOde {
    pub spec: PdeSpec,
    pub symbols: Arc<SymbolTable>,
    pub terms: BTreeMap<DiffMono, ParamExpr>,
    /// Integration constant; the product `c1*C` once integrated.
    pub constant: ParamExpr,
    pub integrations: u32,
}

impl ReducedOde {
    fn add(terms: &mut BTreeMap<DiffMono, ParamExpr>, m: DiffMono, c: ParamExpr) {
        let e = terms
            .entry(m.clone())
            .or_insert_with(|| ParamExpr::zero(c.symbols()));
        *e = &*e + &c;
        if e.is_zero() {
            terms.remove(&m);
        }
    }

    pub fn coeff(&self, orders: &[u32]) -> ParamExpr {
        self.terms
            .get(&DiffMono::new(orders.to_vec()))
            .cloned()
            .unwrap_or_else(|| ParamExpr::zero(&self.symbols))
    }

    /// Formal `d/dxi`; the constant is annihilated.
    pub fn differentiate(&self) -> ReducedOde {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            for (dm, n) in m.derivative() {
                Self::add(&mut terms, dm, c.scale(&Rational::from_integer(n.into())));
            }
        }
        ReducedOde {
            terms,
            constant: ParamExpr::zero(&self.symbols),
            integrations: self.integrations.saturating_sub(1),
            ..self.clone()
        }
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| format!("({c})*{}", m.render("u")))
            .collect();
        if !self.constant.is_zero() {
            parts.push(format!("({})", self.constant));
        }
        if parts.is_empty() {
            return "0 = 0".into();
        }
        format!("{} = 0", parts.join(" + "))
    }
}

/// Chain rule through the wave coordinate; the result is not yet integrated.
pub fn make_traveling_ode(pde: &PdeSpec) -> ReducedOde {
    let syms = pde.symbol_table();
    let [px, pt, py] = pde.wave_coefficients(&syms);
    let mut terms = BTreeMap::new();
    for (c, factors) in pde.pde_terms(&syms) {
        let mut coeff = c;
        let mut orders = Vec::new();
        for p in factors {
            coeff = &(&(&coeff * &px.pow(p.x)) * &pt.pow(p.t)) * &py.pow(p.y);
            orders.push(p.x + p.t + p.y);
        }
        ReducedOde::add(&mut terms, DiffMono::new(orders), coeff);
    }
    ReducedOde {
        spec: *pde,
        constant: ParamExpr::zero(&syms),
        symbols: syms,
        terms,
        integrations: 0,
    }
}

/// Antiderivative of the non-constant part, by peeling the dominant monomial.
fn antiderivative(terms: &BTreeMap<DiffMono, ParamExpr>) -> Result<BTreeMap<DiffMono, ParamExpr>> {
    let mut rem = terms.clone();
    let mut anti = BTreeMap::new();
    while let Some((top, c)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
        let not_exact =
            || Error::UnsupportedForm(format!("{} is not an exact derivative", top.render("u")));
        let orders = top.orders();
        let Some(&hi) = orders.last() else {
            return Err(not_exact());
        };
        if hi == 0 {
            return Err(not_exact());
        }
        let mut f = orders.to_vec();
        *f.last_mut().unwrap() -= 1;
        let f = DiffMono::new(f);
        let df = f.derivative();
        if df.iter().any(|(m, _)| *m > top) {
            return Err(not_exact());
        }
        let mult = df
            .iter()
            .find(|(m, _)| *m == top)
            .map(|(_, n)| *n)
            .ok_or_else(not_exact)?;
        let scale = c.scale(&(Rational::one() / Rational::from_integer(mult.into())));
        for (m, n) in df {
            ReducedOde::add(&mut rem, m, -scale.scale(&Rational::from_integer(n.into())));
        }
        ReducedOde::add(&mut anti, f, scale);
    }
    Ok(anti)
}

/// Integrate once; the integration constant is recorded as `c1*C`.
pub fn integrate_once(ode: &ReducedOde) -> Result<ReducedOde> {
    if !ode.constant.is_zero() {
        return Err(Error::UnsupportedForm(
            "ODE already carries an integration constant".into(),
        ));
    }
    let terms = antiderivative(&ode.terms)?;
    let s = &ode.symbols;
    let constant = &ParamExpr::var(s, "c1")? * &ParamExpr::var(s, "C")?;
    Ok(ReducedOde {
        terms,
        constant,
        integrations: ode.integrations + 1,
        ..ode.clone()
    })
}

/// Monomials of the shifted ODE: `1, phi, phi^2, phi', phi'', phi'''`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiTerm {
    One,
    Phi,
    PhiSquared,
    D1,
    D2,
    D3,
}

impl PhiTerm {
    pub const ALL: [PhiTerm; 6] = [
        PhiTerm::One,
        PhiTerm::Phi,
        PhiTerm::PhiSquared,
        PhiTerm::D1,
        PhiTerm::D2,
        PhiTerm::D3,
    ];

    pub fn label(self) -> &'static str {
        match self {
            PhiTerm::One => "1",
            PhiTerm::Phi => "phi",
            PhiTerm::PhiSquared => "phi^2",
            PhiTerm::D1 => "phi'",
            PhiTerm::D2 => "phi''",
            PhiTerm::D3 => "phi'''",
        }
    }

    pub fn derivative_order(self) -> Option<usize> {
        match self {
            PhiTerm::D1 => Some(1),
            PhiTerm::D2 => Some(2),
            PhiTerm::D3 => Some(3),
            _ => None,
        }
    }
}

/// One root of the constant-part condition.
#[derive(Debug, Clone, PartialEq)]
pub struct C1Branch {
    pub value: Fraction,
    /// Symbols that must not vanish for the root to be defined.
    pub nonzero: Vec<String>,
}

impl C1Branch {
    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }
}

/// Shifted ODE in `phi` with `u = phi + c1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiOde {
    pub spec: PdeSpec,
    pub symbols: Arc<SymbolTable>,
    /// Indexed by `PhiTerm as usize`.
    pub coeffs: [ParamExpr; 6],
    /// The expression forced to zero to fix `c1` (coefficient of `1` before specialization).
    pub constant_part: ParamExpr,
    pub branch: Option<C1Branch>,
    pub assumptions: Vec<String>,
}

impl PhiOde {
    pub fn coeff(&self, t: PhiTerm) -> &ParamExpr {
        &self.coeffs[t as usize]
    }

    pub fn highest_derivative(&self) -> Option<usize> {
        PhiTerm::ALL
            .iter()
            .rev()
            .filter(|t| !self.coeff(**t).is_zero())
            .find_map(|t| t.derivative_order())
    }

    /// Fix `c1` to one branch and clear denominators; the constant must vanish.
    pub fn specialize(&self, branch: &C1Branch) -> Result<PhiOde> {
        let c1 = self.symbols.require("c1")?;
        let subst: Vec<Fraction> = self
            .coeffs
            .iter()
            .map(|c| Fraction::substitute_into(c, c1, &branch.value))
            .collect();
        let lcm = subst
            .iter()
            .fold(crate::algebra::Monomial::one(self.symbols.len()), |l, f| {
                l.lcm(f.denom())
            });
        let mut assumptions = self.assumptions.clone();
        for (i, _) in lcm.0.iter().enumerate().filter(|(_, e)| **e > 0) {
            push_unique(&mut assumptions, format!("{} != 0", self.symbols.name(i)));
        }
        for n in &branch.nonzero {
            push_unique(&mut assumptions, format!("{n} != 0"));
        }
        let coeffs: Vec<ParamExpr> = subst
            .iter()
            .map(|f| {
                f.numer()
                    .mul_monomial(&f.denom().div_from(&lcm).expect("lcm"))
            })
            .collect();
        if !coeffs[PhiTerm::One as usize].is_zero() {
            return Err(Error::Structural(format!(
                "constant part `{}` does not vanish on branch c1 = {}",
                coeffs[0], branch.value
            )));
        }
        Ok(PhiOde {
            coeffs: coeffs.try_into().expect("six coefficients"),
            branch: Some(branch.clone()),
            assumptions,
            ..self.clone()
        })
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = PhiTerm::ALL
            .iter()
            .filter(|t| !self.coeff(**t).is_zero())
            .map(|t| format!("({})*{}", self.coeff(*t), t.label()))
            .collect();
        if parts.is_empty() {
            "0 = 0".into()
        } else {
            format!("{} = 0", parts.join(" + "))
        }
    }
}

pub(crate) fn push_unique(v: &mut Vec<String>, s: String) {
    if !v.contains(&s) {
        v.push(s);
    }
}

/// Substitute `u = phi + c1` into the integrated ODE. For KP the remaining
/// exact derivative is integrated once more, keeping the constant `c1*C`.
pub fn apply_shift(ode: &ReducedOde) -> Result<PhiOde> {
    if ode.integrations == 0 {
        return Err(Error::UnsupportedForm(
            "apply_shift needs an integrated ODE".into(),
        ));
    }
    let mut terms = ode.terms.clone();
    if ode.spec.equation == Equation::Kp && ode.integrations == 1 {
        terms = antiderivative(&terms)?;
    }
    let s = &ode.symbols;
    let zero = ParamExpr::zero(s);
    let mut cu = zero.clone();
    let mut cuu = zero.clone();
    let mut cd = [zero.clone(), zero.clone(), zero.clone()];
    for (m, c) in &terms {
        match m.orders() {
            [0] => cu = c.clone(),
            [0, 0] => cuu = c.clone(),
            [r @ 1..=3] => cd[*r as usize - 1] = c.clone(),
            _ => {
                return Err(Error::UnsupportedForm(format!(
                    "term {} outside the {{u, u^2, u', u'', u'''}} template",
                    m.render("u")
                )))
            }
        }
    }
    let c1 = ParamExpr::var(s, "c1")?;
    let two = Rational::from_integer(2.into());
    let phi = &cu + &(&c1 * &cuu).scale(&two);
    let constant = &(&ode.constant + &(&c1 * &cu)) + &(&(&c1 * &c1) * &cuu);
    let [d1, d2, d3] = cd;
    Ok(PhiOde {
        spec: ode.spec,
        symbols: s.clone(),
        coeffs: [constant.clone(), phi, cuu, d1, d2, d3],
        constant_part: constant,
        branch: None,
        assumptions: Vec::new(),
    })
}

/// Roots in `c1` of the constant part, `c1 = 0` first.
pub fn c1_branches(phi: &PhiOde) -> Result<Vec<C1Branch>> {
    let idx = phi.symbols.require("c1")?;
    let cs = phi.constant_part.coeffs_in(idx);
    if cs.len() > 3 {
        return Err(Error::Structural(format!(
            "constant part `{}` is not quadratic in c1",
            phi.constant_part
        )));
    }
    let get = |i: usize| {
        cs.get(i)
            .cloned()
            .unwrap_or_else(|| ParamExpr::zero(&phi.symbols))
    };
    let (a2, a1, a0) = (get(2), get(1), get(0));
    if a2.is_zero() && a1.is_zero() && a0.is_zero() {
        return Ok(vec![C1Branch {
            value: Fraction::zero(&phi.symbols),
            nonzero: Vec::new(),
        }]);
    }
    let roots = quadratic_roots(&a2, &a1, &a0, None)?;
    let mut out: Vec<C1Branch> = roots
        .into_iter()
        .map(|value| {
            let nonzero = value
                .den_symbols()
                .iter()
                .map(|&i| phi.symbols.name(i).to_string())
                .collect();
            C1Branch { value, nonzero }
        })
        .collect();
    out.sort_by_key(|b| !b.value.is_zero());
    Ok(out)
}

/// All branches with their specialized ODEs, in c1 order.
pub fn specialized_odes(pde: &PdeSpec) -> Result<Vec<PhiOde>> {
    let phi = apply_shift(&integrate_once(&make_traveling_ode(pde))?)?;
    c1_branches(&phi)?
        .iter()
        .map(|b| phi.specialize(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kp() -> PdeSpec {
        PdeSpec::kp(1).unwrap()
    }

    #[test]
    fn burgers_traveling_form() {
        let ode = make_traveling_ode(&PdeSpec::new(Equation::Burgers));
        assert_eq!(ode.render(), "(beta)*u'' + (alpha)*u*u' + (-omega)*u' = 0");
    }

    #[test]
    fn kdv_traveling_form_by_chain_rule() {
        // u_t -> -omega u', u u_x -> u u', u_xxx -> u'''
        let ode = make_traveling_ode(&PdeSpec::new(Equation::Kdv));
        assert_eq!(ode.coeff(&[1]).render(), "-omega");
        assert_eq!(ode.coeff(&[0, 1]).render(), "alpha");
        assert_eq!(ode.coeff(&[3]).render(), "gamma");
        assert_eq!(ode.terms.len(), 3);
    }

    #[test]
    fn kp_traveling_form() {
        // k omega u'' + 6k^2 (u'u)' + k^4 u'''' + 3 sigma^2 a^2 u''
        let ode = make_traveling_ode(&kp());
        assert_eq!(ode.coeff(&[2]).render(), "k*omega + 3*a^2");
        assert_eq!(ode.coeff(&[1, 1]).render(), "6*k^2");
        assert_eq!(ode.coeff(&[0, 2]).render(), "6*k^2");
        assert_eq!(ode.coeff(&[4]).render(), "k^4");
    }

    #[test]
    fn kp_negative_sigma() {
        let ode = make_traveling_ode(&PdeSpec::kp(-1).unwrap());
        assert_eq!(ode.coeff(&[2]).render(), "k*omega - 3*a^2");
        assert!(PdeSpec::kp(2).is_err());
    }

    #[test]
    fn burgers_integral_form() {
        let ode = integrate_once(&make_traveling_ode(&PdeSpec::new(Equation::Burgers))).unwrap();
        assert_eq!(
            ode.render(),
            "(beta)*u' + (1/2*alpha)*u*u + (-omega)*u + (c1*C) = 0"
        );
    }

    #[test]
    fn kdv_integral_form() {
        let ode = integrate_once(&make_traveling_ode(&PdeSpec::new(Equation::Kdv))).unwrap();
        assert_eq!(
            ode.render(),
            "(gamma)*u'' + (1/2*alpha)*u*u + (-omega)*u + (c1*C) = 0"
        );
    }

    #[test]
    fn kp_integral_form() {
        let ode = integrate_once(&make_traveling_ode(&kp())).unwrap();
        assert_eq!(ode.coeff(&[1]).render(), "k*omega + 3*a^2");
        assert_eq!(ode.coeff(&[0, 1]).render(), "6*k^2");
        assert_eq!(ode.coeff(&[3]).render(), "k^4");
        assert_eq!(ode.constant.render(), "c1*C");
    }

    #[test]
    fn non_exact_forms_are_rejected() {
        let base = make_traveling_ode(&PdeSpec::new(Equation::Burgers));
        let once = integrate_once(&base).unwrap();
        let mut stripped = once.clone();
        stripped.constant = ParamExpr::zero(&once.symbols);
        // contains u and u^2 which are not derivatives
        assert!(matches!(
            integrate_once(&stripped),
            Err(Error::UnsupportedForm(_))
        ));
        let mut lone = base.clone();
        lone.terms.clear();
        lone.terms
            .insert(DiffMono::new(vec![1, 1]), ParamExpr::one(&base.symbols));
        assert!(integrate_once(&lone).is_err());
    }

    #[test]
    fn integrate_then_differentiate_round_trip() {
        for e in Equation::ALL {
            let ode = make_traveling_ode(&PdeSpec::new(e));
            let back = integrate_once(&ode).unwrap().differentiate();
            assert_eq!(back.terms, ode.terms, "{e}");
        }
    }

    #[test]
    fn shifted_burgers() {
        let phi = apply_shift(
            &integrate_once(&make_traveling_ode(&PdeSpec::new(Equation::Burgers))).unwrap(),
        )
        .unwrap();
        assert_eq!(phi.coeff(PhiTerm::Phi).render(), "alpha*c1 - omega");
        assert_eq!(phi.coeff(PhiTerm::PhiSquared).render(), "1/2*alpha");
        assert_eq!(phi.coeff(PhiTerm::D1).render(), "beta");
        assert_eq!(
            phi.constant_part.render(),
            "1/2*alpha*c1^2 - omega*c1 + c1*C"
        );
    }

    #[test]
    fn shifted_kp_integrates_again() {
        let phi = apply_shift(&integrate_once(&make_traveling_ode(&kp())).unwrap()).unwrap();
        assert_eq!(
            phi.coeff(PhiTerm::Phi).render(),
            "6*k^2*c1 + k*omega + 3*a^2"
        );
        assert_eq!(phi.coeff(PhiTerm::PhiSquared).render(), "3*k^2");
        assert_eq!(phi.coeff(PhiTerm::D2).render(), "k^4");
        assert_eq!(
            phi.constant_part.render(),
            "3*k^2*c1^2 + k*omega*c1 + 3*a^2*c1 + c1*C"
        );
    }

    #[test]
    fn c1_roots() {
        let roots = |e| {
            let pde = if e == Equation::Kp {
                kp()
            } else {
                PdeSpec::new(e)
            };
            let phi = apply_shift(&integrate_once(&make_traveling_ode(&pde)).unwrap()).unwrap();
            c1_branches(&phi)
                .unwrap()
                .iter()
                .map(|b| b.value.render())
                .collect::<Vec<_>>()
        };
        assert_eq!(roots(Equation::Burgers), ["0", "(2*omega - 2*C)/alpha"]);
        assert_eq!(roots(Equation::Kdv), ["0", "(2*omega - 2*C)/alpha"]);
        assert_eq!(
            roots(Equation::Kp),
            ["0", "(-1/3*k*omega - a^2 - 1/3*C)/(k^2)"]
        );
    }

    #[test]
    fn specialized_constant_vanishes() {
        for e in Equation::ALL {
            let pde = if e == Equation::Kp {
                kp()
            } else {
                PdeSpec::new(e)
            };
            let odes = specialized_odes(&pde).unwrap();
            assert_eq!(odes.len(), 2);
            for o in &odes {
                assert!(o.coeff(PhiTerm::One).is_zero());
                assert!(!o.coeff(PhiTerm::PhiSquared).is_zero());
            }
        }
    }

    #[test]
    fn zero_branch_is_renamed_integrated_ode() {
        let pde = PdeSpec::new(Equation::Kdv);
        let once = integrate_once(&make_traveling_ode(&pde)).unwrap();
        let phi = apply_shift(&once).unwrap();
        let b = &c1_branches(&phi).unwrap()[0];
        let z = phi.specialize(b).unwrap();
        assert_eq!(z.coeff(PhiTerm::Phi), &once.coeff(&[0]));
        assert_eq!(z.coeff(PhiTerm::PhiSquared), &once.coeff(&[0, 0]));
        assert_eq!(z.coeff(PhiTerm::D2), &once.coeff(&[2]));
    }

    #[test]
    fn parse_key_value_block() {
        let (spec, rest) = PdeSpec::parse("equation=kp\nsigma2=-1\nk=2, a=1/2").unwrap();
        assert_eq!(spec, PdeSpec::kp(-1).unwrap());
        assert_eq!(rest["a"], "1/2");
        assert!(PdeSpec::parse("equation=heat").is_err());
        assert!(PdeSpec::parse("alpha=1").is_err());
    }
}
