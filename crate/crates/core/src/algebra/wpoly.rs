use std::sync::Arc;

use super::{ParamExpr, Rational, SymbolTable};
use crate::error::{Error, Result};

/// Polynomial in `w = G'/G`; `coeffs[k]` multiplies `w^k`.
///
/// The symbol table must contain `lambda` and `mu`, which parametrize the
/// derivation `D(w) = -(mu + lambda w + w^2)`.
#[derive(Clone, PartialEq, Eq)]
pub struct WPoly {
    symbols: Arc<SymbolTable>,
    lambda: usize,
    mu: usize,
    coeffs: Vec<ParamExpr>,
}

impl WPoly {
    pub fn new(symbols: &Arc<SymbolTable>, coeffs: Vec<ParamExpr>) -> Result<Self> {
        let lambda = symbols.require("lambda")?;
        let mu = symbols.require("mu")?;
        for c in &coeffs {
            if !SymbolTable::same(c.symbols(), symbols) {
                return Err(Error::SymbolMismatch {
                    left: symbols.describe(),
                    right: c.symbols().describe(),
                });
            }
        }
        let mut p = WPoly {
            symbols: symbols.clone(),
            lambda,
            mu,
            coeffs,
        };
        p.trim();
        Ok(p)
    }

    pub fn zero(symbols: &Arc<SymbolTable>) -> Result<Self> {
        Self::new(symbols, Vec::new())
    }

    pub fn constant(c: ParamExpr) -> Result<Self> {
        let s = c.symbols().clone();
        Self::new(&s, vec![c])
    }

    /// `w^k`
    pub fn monomial(symbols: &Arc<SymbolTable>, k: usize) -> Result<Self> {
        let mut c = vec![ParamExpr::zero(symbols); k + 1];
        c[k] = ParamExpr::one(symbols);
        Self::new(symbols, c)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(ParamExpr::is_zero) {
            self.coeffs.pop();
        }
    }

    fn with(&self, coeffs: Vec<ParamExpr>) -> WPoly {
        let mut p = WPoly {
            symbols: self.symbols.clone(),
            lambda: self.lambda,
            mu: self.mu,
            coeffs,
        };
        p.trim();
        p
    }

    pub fn symbols(&self) -> &Arc<SymbolTable> {
        &self.symbols
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[ParamExpr] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> ParamExpr {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| ParamExpr::zero(&self.symbols))
    }

    pub fn add(&self, other: &WPoly) -> WPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        self.with((0..n).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &WPoly) -> WPoly {
        if self.is_zero() || other.is_zero() {
            return self.with(Vec::new());
        }
        let mut out =
            vec![ParamExpr::zero(&self.symbols); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = &out[i + j] + &(a * b);
            }
        }
        self.with(out)
    }

    pub fn scale(&self, c: &ParamExpr) -> WPoly {
        self.with(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn map(&self, f: impl Fn(&ParamExpr) -> ParamExpr) -> WPoly {
        self.with(self.coeffs.iter().map(f).collect())
    }

    pub fn render(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format!("({c})"),
                1 => format!("({c})*w"),
                _ => format!("({c})*w^{k}"),
            })
            .collect();
        parts.join(" + ")
    }
}

impl std::fmt::Debug for WPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "WPoly({})", self.render())
    }
}

/// `D(w^k) = -k (mu w^(k-1) + lambda w^k + w^(k+1))`, extended linearly.
pub fn wpoly_derive(p: &WPoly) -> WPoly {
    let s = &p.symbols;
    let lambda = ParamExpr::var_idx(s, p.lambda);
    let mu = ParamExpr::var_idx(s, p.mu);
    let n = p.coeffs.len() + 1;
    let mut out = vec![ParamExpr::zero(s); n];
    for (k, a) in p.coeffs.iter().enumerate().skip(1) {
        if a.is_zero() {
            continue;
        }
        let ka = a.scale(&-Rational::from_integer(k.into()));
        out[k - 1] = &out[k - 1] + &(&ka * &mu);
        out[k] = &out[k] + &(&ka * &lambda);
        out[k + 1] = &out[k + 1] + &ka;
    }
    p.with(out)
}

/// Second derivative. Computed as `D(D(p))` and checked against the closed
/// five-term expansion of the ansatz derivative.
pub fn wpoly_derive2(p: &WPoly) -> WPoly {
    let iterated = wpoly_derive(&wpoly_derive(p));
    let closed = phi_second_closed(p);
    assert_eq!(iterated, closed, "second-derivative identity violated");
    iterated
}

/// Closed form of `phi'` for `phi = sum a_k w^k`.
pub fn phi_prime_closed(p: &WPoly) -> WPoly {
    let s = &p.symbols;
    let lambda = ParamExpr::var_idx(s, p.lambda);
    let mu = ParamExpr::var_idx(s, p.mu);
    let mut out = vec![ParamExpr::zero(s); p.coeffs.len() + 1];
    for (k, a) in p.coeffs.iter().enumerate().skip(1) {
        let ka = a.scale(&Rational::from_integer((k as i64).into()));
        out[k - 1] = &out[k - 1] - &(&ka * &mu);
        out[k] = &out[k] - &(&ka * &lambda);
        out[k + 1] = &out[k + 1] - &ka;
    }
    p.with(out)
}

/// Closed form of `phi''`:
/// `sum k a_k { mu^2 (k-1) w^(k-2) + mu lambda (2k-1) w^(k-1) + k (lambda^2 + 2 mu) w^k
///  + lambda (2k+1) w^(k+1) + (k+1) w^(k+2) }`.
pub fn phi_second_closed(p: &WPoly) -> WPoly {
    let s = &p.symbols;
    let lambda = ParamExpr::var_idx(s, p.lambda);
    let mu = ParamExpr::var_idx(s, p.mu);
    let int = |n: i64| Rational::from_integer(n.into());
    let mut out = vec![ParamExpr::zero(s); p.coeffs.len() + 2];
    for (k, a) in p.coeffs.iter().enumerate().skip(1) {
        let ki = k as i64;
        let ka = a.scale(&int(ki));
        if k >= 2 {
            out[k - 2] = &out[k - 2] + &(&ka * &(&mu * &mu)).scale(&int(ki - 1));
        }
        out[k - 1] = &out[k - 1] + &(&ka * &(&mu * &lambda)).scale(&int(2 * ki - 1));
        let l2 = &(&lambda * &lambda) + &mu.scale(&int(2));
        out[k] = &out[k] + &(&ka * &l2).scale(&int(ki));
        out[k + 1] = &out[k + 1] + &(&ka * &lambda).scale(&int(2 * ki + 1));
        out[k + 2] = &out[k + 2] + &ka.scale(&int(ki + 1));
    }
    p.with(out)
}
