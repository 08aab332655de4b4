use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{fmt_rational, rat_to_f64, Monomial, Rational, SymbolTable};
use crate::error::{Error, Result};

/// Exact multivariate polynomial over the session's symbol table.
///
/// Terms are kept in a `BTreeMap` keyed by graded-lex [`Monomial`]s and never
/// store a zero coefficient, so structural equality is mathematical equality.
#[derive(Clone)]
pub struct ParamExpr {
    symbols: Arc<SymbolTable>,
    terms: BTreeMap<Monomial, Rational>,
}

/// A symbol standing for a square root, reduced with `symbol^2 -> square`.
#[derive(Debug, Clone, PartialEq)]
pub struct Radical {
    pub symbol: usize,
    pub square: ParamExpr,
}

impl ParamExpr {
    pub fn zero(symbols: &Arc<SymbolTable>) -> Self {
        ParamExpr {
            symbols: symbols.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(symbols: &Arc<SymbolTable>, c: Rational) -> Self {
        Self::term(symbols, c, Monomial::one(symbols.len()))
    }

    pub fn int(symbols: &Arc<SymbolTable>, c: i64) -> Self {
        Self::constant(symbols, Rational::from_integer(c.into()))
    }

    pub fn one(symbols: &Arc<SymbolTable>) -> Self {
        Self::int(symbols, 1)
    }

    pub fn term(symbols: &Arc<SymbolTable>, c: Rational, m: Monomial) -> Self {
        assert_eq!(m.0.len(), symbols.len(), "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        ParamExpr {
            symbols: symbols.clone(),
            terms,
        }
    }

    pub fn var(symbols: &Arc<SymbolTable>, name: &str) -> Result<Self> {
        let idx = symbols.require(name)?;
        Ok(Self::var_idx(symbols, idx))
    }

    pub fn var_idx(symbols: &Arc<SymbolTable>, idx: usize) -> Self {
        Self::term(symbols, Rational::one(), Monomial::var(symbols.len(), idx))
    }

    pub fn symbols(&self) -> &Arc<SymbolTable> {
        &self.symbols
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value if the expression is a symbol-free constant.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_monomial(&self) -> Option<(Rational, Monomial)> {
        (self.terms.len() == 1).then(|| {
            let (m, c) = self.terms.iter().next().unwrap();
            (c.clone(), m.clone())
        })
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0)
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.degree_in(idx) > 0
    }

    pub fn symbols_used(&self) -> Vec<usize> {
        (0..self.symbols.len())
            .filter(|&i| self.contains(i))
            .collect()
    }

    fn check(&self, other: &ParamExpr) -> Result<()> {
        if SymbolTable::same(&self.symbols, &other.symbols) {
            Ok(())
        } else {
            Err(Error::SymbolMismatch {
                left: self.symbols.describe(),
                right: other.symbols.describe(),
            })
        }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &ParamExpr) -> Result<ParamExpr> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &ParamExpr) -> Result<ParamExpr> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &ParamExpr) -> Result<ParamExpr> {
        self.check(other)?;
        let mut out = ParamExpr::zero(&self.symbols);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> ParamExpr {
        if c.is_zero() {
            return ParamExpr::zero(&self.symbols);
        }
        ParamExpr {
            symbols: self.symbols.clone(),
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> ParamExpr {
        ParamExpr {
            symbols: self.symbols.clone(),
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k.mul(m), v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> ParamExpr {
        let mut out = ParamExpr::one(&self.symbols);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Largest monomial dividing every term (the empty monomial for zero).
    pub fn content(&self) -> Monomial {
        let mut it = self.terms.keys();
        match it.next() {
            None => Monomial::one(self.symbols.len()),
            Some(first) => it.fold(first.clone(), |g, m| g.gcd(m)),
        }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<ParamExpr> {
        let mut terms = BTreeMap::new();
        for (k, v) in &self.terms {
            terms.insert(m.div_from(k)?, v.clone());
        }
        Some(ParamExpr {
            symbols: self.symbols.clone(),
            terms,
        })
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a remainder.
    pub fn div_exact(&self, divisor: &ParamExpr) -> Option<ParamExpr> {
        self.check(divisor).ok()?;
        let (dm, dc) = divisor.leading()?;
        let (dm, dc) = (dm.clone(), dc.clone());
        let mut rem = self.clone();
        let mut quo = ParamExpr::zero(&self.symbols);
        while let Some((rm, rc)) = rem.leading() {
            let qm = dm.div_from(rm)?;
            let qc = rc / &dc;
            let t = ParamExpr::term(&self.symbols, qc, qm);
            rem = &rem - &(&t * divisor);
            quo = &quo + &t;
        }
        Some(quo)
    }

    /// Coefficients as a polynomial in symbol `idx`: entry `j` multiplies `x^j`.
    pub fn coeffs_in(&self, idx: usize) -> Vec<ParamExpr> {
        let deg = self.degree_in(idx) as usize;
        let mut out = vec![ParamExpr::zero(&self.symbols); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(idx) as usize;
            out[e].add_term(m.with_exp(idx, 0), c.clone());
        }
        out
    }

    pub fn substitute(&self, idx: usize, value: &ParamExpr) -> ParamExpr {
        let coeffs = self.coeffs_in(idx);
        let mut out = ParamExpr::zero(&self.symbols);
        for c in coeffs.iter().rev() {
            out = &(&out * value) + c;
        }
        out
    }

    pub fn reduce_radical(&self, rad: &Radical) -> ParamExpr {
        if self.degree_in(rad.symbol) < 2 {
            return self.clone();
        }
        let mut out = ParamExpr::zero(&self.symbols);
        for (m, c) in &self.terms {
            let e = m.exp(rad.symbol);
            let base = ParamExpr::term(&self.symbols, c.clone(), m.with_exp(rad.symbol, e % 2));
            out = &out + &(&base * &rad.square.pow(e / 2));
        }
        out
    }

    /// Square root if `self` is a perfect square in the ring (positive leading coefficient).
    pub fn sqrt(&self) -> Option<ParamExpr> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let (lm, lc) = self.leading()?;
        let root_lm = lm.sqrt()?;
        let root_lc = rational_sqrt(lc)?;
        let floor = self.terms.keys().next()?.sqrt()?;
        let two_lc = &root_lc * Rational::from_integer(2.into());
        let mut root = ParamExpr::term(&self.symbols, root_lc, root_lm.clone());
        let mut last = root_lm.clone();
        loop {
            let rem = self - &(&root * &root);
            let Some((rm, rc)) = rem.leading() else {
                return Some(root);
            };
            let tm = root_lm.div_from(rm)?;
            if tm >= last || tm < floor {
                return None;
            }
            let tc = rc / &two_lc;
            root = &root + &ParamExpr::term(&self.symbols, tc, tm.clone());
            last = tm;
        }
    }

    /// Re-express over a larger table that contains every current symbol.
    pub fn embed(&self, target: &Arc<SymbolTable>) -> Result<ParamExpr> {
        let map: Vec<usize> = self
            .symbols
            .names()
            .iter()
            .map(|n| target.require(n))
            .collect::<Result<_>>()?;
        let mut out = ParamExpr::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (i, &x) in m.0.iter().enumerate() {
                e[map[i]] = x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter()
                    .enumerate()
                    .fold(rat_to_f64(c), |acc, (i, &e)| acc * values[i].powi(e as i32))
            })
            .sum()
    }

    pub fn eval_exact(&self, values: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &values[i];
                }
            }
            acc += t;
        }
        acc
    }

    /// Canonical string: terms in descending graded-lex order.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let names = self.symbols.names();
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let body = m.render(names);
            if body.is_empty() {
                out.push_str(&fmt_rational(&a));
            } else if a.is_one() {
                out.push_str(&body);
            } else {
                out.push_str(&fmt_rational(&a));
                out.push('*');
                out.push_str(&body);
            }
        }
        out
    }
}

fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let isqrt = |n: &BigInt| {
        let s = n.sqrt();
        (&s * &s == *n).then_some(s)
    };
    Some(Rational::new(isqrt(r.numer())?, isqrt(r.denom())?))
}

/// Exact product; errors when the operands use different symbol tables.
pub fn param_mul(p: &ParamExpr, q: &ParamExpr) -> Result<ParamExpr> {
    p.try_mul(q)
}

impl PartialEq for ParamExpr {
    fn eq(&self, other: &Self) -> bool {
        SymbolTable::same(&self.symbols, &other.symbols) && self.terms == other.terms
    }
}

impl Eq for ParamExpr {}

impl fmt::Debug for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParamExpr({})", self.render())
    }
}

impl fmt::Display for ParamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// Operator sugar panics on a symbol-table mismatch; use the `try_*` methods
// when operands may come from different sessions.
macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&ParamExpr> for &ParamExpr {
            type Output = ParamExpr;
            fn $m(self, rhs: &ParamExpr) -> ParamExpr {
                self.$try(rhs)
                    .expect(concat!("ParamExpr::", stringify!($m)))
            }
        }
        impl $tr<ParamExpr> for ParamExpr {
            type Output = ParamExpr;
            fn $m(self, rhs: ParamExpr) -> ParamExpr {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&ParamExpr> for ParamExpr {
            type Output = ParamExpr;
            fn $m(self, rhs: &ParamExpr) -> ParamExpr {
                (&self).$m(rhs)
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &ParamExpr {
    type Output = ParamExpr;
    fn neg(self) -> ParamExpr {
        self.scale(&-Rational::one())
    }
}

impl Neg for ParamExpr {
    type Output = ParamExpr;
    fn neg(self) -> ParamExpr {
        -&self
    }
}
