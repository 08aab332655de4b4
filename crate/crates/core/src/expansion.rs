//! Homogeneous balance, ansatz substitution, coefficient extraction and the
//! back-substitution solver that turns a phi-ODE into coefficient branches.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{
    quadratic_roots, wpoly_derive, Fraction, ParamExpr, Radical, Rational, SymbolTable, WPoly,
};
use crate::error::{Error, Result};
use crate::reduction::{self, push_unique, C1Branch, PdeSpec, PhiOde, PhiTerm, SQRT_DELTA};

/// Ansatz degree from `deg(phi^2) = 2m` against `deg(phi^(r)) = m + r`.
pub fn balance_degree(phi: &PhiOde) -> Result<usize> {
    if phi.coeff(PhiTerm::PhiSquared).is_zero() {
        return Err(Error::NoBalance("no phi^2 term".into()));
    }
    let r = phi
        .highest_derivative()
        .ok_or_else(|| Error::NoBalance("no derivative term".into()))?;
    // 2m = m + r
    Ok(r)
}

/// Session table extended with `a0..am`, placed right after `omega`.
pub fn ansatz_symbols(base: &Arc<SymbolTable>, m: usize) -> Result<Arc<SymbolTable>> {
    let names: Vec<String> = (0..=m).map(|k| format!("a{k}")).collect();
    base.insert_before(Some("c1"), &names)
}

fn ansatz(syms: &Arc<SymbolTable>, m: usize) -> Result<WPoly> {
    let coeffs = (0..=m)
        .map(|k| ParamExpr::var(syms, &format!("a{k}")))
        .collect::<Result<Vec<_>>>()?;
    WPoly::new(syms, coeffs)
}

/// `phi = sum a_k w^k` pushed through every monomial of the phi-ODE.
pub fn substitute_ansatz(phi: &PhiOde, m: usize) -> Result<WPoly> {
    if m == 0 {
        return Err(Error::NoBalance("ansatz degree must be positive".into()));
    }
    let syms = ansatz_symbols(&phi.symbols, m)?;
    let p = ansatz(&syms, m)?;
    let d1 = wpoly_derive(&p);
    let d2 = wpoly_derive(&d1);
    let d3 = wpoly_derive(&d2);
    let one = WPoly::constant(ParamExpr::one(&syms))?;
    let basis = [one, p.clone(), p.mul(&p), d1, d2, d3];
    let mut out = WPoly::zero(&syms)?;
    for t in PhiTerm::ALL {
        let c = phi.coeff(t).embed(&syms)?;
        if !c.is_zero() {
            out = out.add(&basis[t as usize].scale(&c));
        }
    }
    Ok(out)
}

/// Coefficients of `w^0 .. w^deg`, each understood as `= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraicSystem {
    pub symbols: Arc<SymbolTable>,
    pub equations: Vec<ParamExpr>,
    /// Symbol indices of `omega, a0, .., am`.
    pub unknowns: Vec<usize>,
    pub m: usize,
    pub assumptions: Vec<String>,
}

impl AlgebraicSystem {
    pub fn unknown_names(&self) -> Vec<String> {
        self.unknowns
            .iter()
            .map(|&i| self.symbols.name(i).to_string())
            .collect()
    }

    fn radical(&self) -> Option<Radical> {
        let s = self.symbols.index(SQRT_DELTA)?;
        let l = ParamExpr::var(&self.symbols, "lambda").ok()?;
        let mu = ParamExpr::var(&self.symbols, "mu").ok()?;
        Some(Radical {
            symbol: s,
            square: &(&l * &l) - &mu.scale(&Rational::from_integer(4.into())),
        })
    }
}

pub fn extract_system(p: &WPoly, unknowns: &[usize]) -> AlgebraicSystem {
    let m = unknowns.len().saturating_sub(2);
    AlgebraicSystem {
        symbols: p.symbols().clone(),
        equations: p.coeffs().to_vec(),
        unknowns: unknowns.to_vec(),
        m,
        assumptions: Vec::new(),
    }
}

/// One solved family: exact assignments for `omega, a0..am` (and `c1` once
/// attached to a c1 case), with the assumptions introduced by division.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientBranch {
    pub spec: PdeSpec,
    pub symbols: Arc<SymbolTable>,
    /// Keyed by unknown name: `omega`, `a0`, .., `am`, `c1`.
    pub assignments: BTreeMap<String, Fraction>,
    pub m: usize,
    pub assumptions: Vec<String>,
    /// Assignments involve `sqrt_delta`; real only for `lambda^2 - 4 mu >= 0`.
    pub uses_sqrt_delta: bool,
    /// Every system equation vanishes exactly after substitution.
    pub verified: bool,
    /// Index of the c1 case this branch belongs to (0 is `c1 = 0`).
    pub c1_case: usize,
}

impl CoefficientBranch {
    pub fn get(&self, name: &str) -> Option<&Fraction> {
        self.assignments.get(name)
    }

    /// `a0 .. am` in order.
    pub fn ansatz_coeffs(&self) -> Vec<&Fraction> {
        (0..=self.m)
            .map(|k| &self.assignments[&format!("a{k}")])
            .collect()
    }

    /// Wave-coordinate coefficients `(x, t, y)` with `omega` substituted.
    pub fn wave(&self) -> [Fraction; 3] {
        let omega_idx = self.symbols.index("omega").expect("omega");
        let omega = &self.assignments["omega"];
        self.spec
            .wave_coefficients(&self.symbols)
            .map(|c| Fraction::substitute_into(&c, omega_idx, omega))
    }

    /// Symbols dividing any assignment.
    pub fn den_symbols(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .assignments
            .values()
            .flat_map(Fraction::den_symbols)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub(crate) fn sort_key(&self) -> Vec<String> {
        self.assignments.values().map(Fraction::render).collect()
    }
}

#[derive(Clone)]
struct State {
    assigned: Vec<(usize, Fraction)>,
    eqs: Vec<ParamExpr>,
    pending: Vec<usize>,
    assumptions: Vec<String>,
}

struct Solver<'a> {
    sys: &'a AlgebraicSystem,
    radical: Option<Radical>,
    top: usize,
}

impl Solver<'_> {
    fn name(&self, i: usize) -> &str {
        self.sys.symbols.name(i)
    }

    fn assign(&self, st: &State, x: usize, value: Fraction) -> State {
        let reduce = |p: &ParamExpr| match &self.radical {
            Some(r) => p.reduce_radical(r),
            None => p.clone(),
        };
        let mut next = st.clone();
        for i in value.den_symbols() {
            push_unique(&mut next.assumptions, format!("{} != 0", self.name(i)));
        }
        next.eqs = st
            .eqs
            .iter()
            .map(|e| reduce(Fraction::substitute_into(e, x, &value).numer()))
            .filter(|e| !e.is_zero())
            .collect();
        next.assigned = st
            .assigned
            .iter()
            .map(|(k, f)| (*k, f.substitute(x, &value).map_num(reduce)))
            .collect();
        next.assigned.push((x, value));
        next.pending.retain(|&p| p != x);
        next
    }

    fn involves(&self, e: &ParamExpr, pending: &[usize]) -> Vec<usize> {
        pending.iter().copied().filter(|&p| e.contains(p)).collect()
    }

    fn solve(&self, st: State) -> Result<Vec<State>> {
        if st
            .eqs
            .iter()
            .any(|e| self.involves(e, &st.pending).is_empty())
        {
            // a leftover parameter-only equation: the branch is inconsistent
            return Ok(Vec::new());
        }
        if st.pending.is_empty() {
            return Ok(vec![st]);
        }
        // preference: a_m, .., a_0, omega
        let omega = self.sys.unknowns[0];
        let mut order: Vec<usize> = self.sys.unknowns[1..].iter().rev().copied().collect();
        order.push(omega);

        for &x in order.iter().filter(|x| st.pending.contains(x)) {
            let mut candidates: Vec<(u32, usize)> = st
                .eqs
                .iter()
                .enumerate()
                .filter(|(_, e)| self.involves(e, &st.pending) == [x])
                .map(|(i, e)| (e.degree_in(x), i))
                .filter(|(d, _)| *d <= 2)
                .collect();
            candidates.sort_by_key(|&(d, i)| (d, std::cmp::Reverse(i)));
            let Some(&(_, i)) = candidates.first() else {
                continue;
            };
            let cs = st.eqs[i].coeffs_in(x);
            let zero = ParamExpr::zero(&self.sys.symbols);
            let get = |k: usize| cs.get(k).cloned().unwrap_or_else(|| zero.clone());
            let mut roots = quadratic_roots(&get(2), &get(1), &get(0), self.radical.as_ref())?;
            if x == self.top {
                roots.retain(|r| !r.is_zero());
            }
            let mut out = Vec::new();
            for r in roots {
                out.extend(self.solve(self.assign(&st, x, r))?);
            }
            return Ok(out);
        }

        let mut elim = vec![omega];
        elim.extend(self.sys.unknowns[1..].iter().rev());
        for &x in elim.iter().filter(|x| st.pending.contains(x)) {
            for e in st.eqs.iter().rev() {
                if e.degree_in(x) != 1 {
                    continue;
                }
                let cs = e.coeffs_in(x);
                if !self.involves(&cs[1], &st.pending).is_empty() || cs[1].as_monomial().is_none() {
                    continue;
                }
                let value = Fraction::from_poly(-&cs[0]).div_poly(&cs[1])?;
                return self.solve(self.assign(&st, x, value));
            }
        }
        Err(Error::SolverIncomplete(format!(
            "no linear or single-unknown quadratic step for {:?} in [{}]",
            st.pending.iter().map(|&p| self.name(p)).collect::<Vec<_>>(),
            st.eqs
                .iter()
                .map(ParamExpr::render)
                .collect::<Vec<_>>()
                .join("; ")
        )))
    }
}

/// Substitute assignments into a polynomial and reduce by the radical relation.
pub fn substitute_all(
    p: &ParamExpr,
    assignments: &BTreeMap<String, Fraction>,
    radical: Option<&Radical>,
) -> Fraction {
    let syms = p.symbols();
    let mut f = Fraction::from_poly(p.clone());
    for (name, value) in assignments {
        if let Some(idx) = syms.index(name) {
            f = f.substitute(idx, value);
        }
    }
    match radical {
        Some(r) => f.map_num(|n| n.reduce_radical(r)),
        None => f,
    }
}

/// Enumerate every coefficient branch of the system (unknown order `omega, a0..am`).
pub fn solve_branches(sys: &AlgebraicSystem, spec: &PdeSpec) -> Result<Vec<CoefficientBranch>> {
    if sys.unknowns.len() < 2 {
        return Err(Error::Structural(
            "system needs omega and at least a0".into(),
        ));
    }
    let solver = Solver {
        sys,
        radical: sys.radical(),
        top: *sys.unknowns.last().unwrap(),
    };
    let start = State {
        assigned: Vec::new(),
        eqs: sys
            .equations
            .iter()
            .filter(|e| !e.is_zero())
            .cloned()
            .collect(),
        pending: sys.unknowns.clone(),
        assumptions: sys.assumptions.clone(),
    };
    let sqrt_idx = sys.symbols.index(SQRT_DELTA);
    let mut out: Vec<CoefficientBranch> = Vec::new();
    for st in solver.solve(start)? {
        let assignments: BTreeMap<String, Fraction> = st
            .assigned
            .iter()
            .map(|(k, f)| (solver.name(*k).to_string(), f.clone()))
            .collect();
        let verified = sys
            .equations
            .iter()
            .all(|e| substitute_all(e, &assignments, solver.radical.as_ref()).is_zero());
        if !verified {
            return Err(Error::Structural("branch fails re-substitution".into()));
        }
        let top = &assignments[&format!("a{}", sys.m)];
        if top.is_zero() {
            continue;
        }
        let uses_sqrt_delta = sqrt_idx.is_some_and(|s| assignments.values().any(|f| f.contains(s)));
        let mut assumptions = st.assumptions;
        if uses_sqrt_delta {
            push_unique(&mut assumptions, "lambda^2 - 4*mu >= 0".into());
        }
        let b = CoefficientBranch {
            spec: *spec,
            symbols: sys.symbols.clone(),
            assignments,
            m: sys.m,
            assumptions,
            uses_sqrt_delta,
            verified,
            c1_case: 0,
        };
        if !out.contains(&b) {
            out.push(b);
        }
    }
    out.sort_by_key(CoefficientBranch::sort_key);
    Ok(out)
}

/// Everything derived for one c1 case.
#[derive(Debug, Clone)]
pub struct CaseDerivation {
    pub c1: C1Branch,
    pub phi: PhiOde,
    pub m: usize,
    pub expanded: WPoly,
    pub system: AlgebraicSystem,
    pub branches: Vec<CoefficientBranch>,
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub spec: PdeSpec,
    pub cases: Vec<CaseDerivation>,
}

impl Derivation {
    pub fn branches(&self) -> impl Iterator<Item = &CoefficientBranch> {
        self.cases.iter().flat_map(|c| c.branches.iter())
    }
}

/// Shift, balance, substitute, extract and solve for every c1 case.
pub fn derive(pde: &PdeSpec) -> Result<Derivation> {
    let phi0 = reduction::apply_shift(&reduction::integrate_once(
        &reduction::make_traveling_ode(pde),
    )?)?;
    let mut cases = Vec::new();
    for (case, c1) in reduction::c1_branches(&phi0)?.into_iter().enumerate() {
        let phi = phi0.specialize(&c1)?;
        let m = balance_degree(&phi)?;
        let expanded = substitute_ansatz(&phi, m)?;
        let syms = expanded.symbols().clone();
        let mut unknowns = vec![syms.require("omega")?];
        for k in 0..=m {
            unknowns.push(syms.require(&format!("a{k}"))?);
        }
        let mut system = extract_system(&expanded, &unknowns);
        system.assumptions = phi.assumptions.clone();
        let mut branches = solve_branches(&system, pde)?;
        let c1_value = c1.value.embed(&syms)?;
        let omega_idx = syms.require("omega")?;
        for b in &mut branches {
            let c1_here = c1_value.substitute(omega_idx, &b.assignments["omega"]);
            for i in c1_here.den_symbols() {
                push_unique(&mut b.assumptions, format!("{} != 0", syms.name(i)));
            }
            b.assignments.insert("c1".into(), c1_here);
            b.c1_case = case;
        }
        cases.push(CaseDerivation {
            c1,
            phi,
            m,
            expanded,
            system,
            branches,
        });
    }
    Ok(Derivation { spec: *pde, cases })
}

pub fn derive_families(pde: &PdeSpec) -> Result<Vec<CoefficientBranch>> {
    Ok(derive(pde)?.branches().cloned().collect())
}

/// `a_m` predicted by the leading-coefficient law for `B phi^2 + E phi^(r)`.
pub fn leading_coefficient_law(b: &ParamExpr, e: &ParamExpr, r: usize) -> Result<Fraction> {
    // top w-power of phi^(r) for phi ~ a_m w^m with m = r: (-1)^r m(m+1)..(m+r-1) a_m
    let m = r as i64;
    let rising: i64 = (m..m + r as i64).product();
    let sign = if r.is_multiple_of(2) { 1 } else { -1 };
    let factor = Rational::from_integer((-sign * rising).into());
    Fraction::from_poly(e.scale(&factor)).div_poly(b)
}
