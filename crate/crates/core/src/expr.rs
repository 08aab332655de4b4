//! A small arithmetic language for transcribed formulas: numbers, symbols,
//! `+ - * / ^`, parentheses and `sqrt(..)`. Expressions evaluate over jets or
//! convert to exact polynomials when they only divide by constants.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{ParamExpr, Rational, SymbolTable};
use crate::error::{Error, Result};
use crate::gbranch::{Jet, POLE_TOL};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(Rational),
    Sym(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sqrt(Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn parse_error(src: &str, msg: impl fmt::Display) -> Error {
    Error::Usage(format!("cannot parse `{src}`: {msg}"))
}

/// Exact value of a decimal literal such as `12`, `0.3` or `1.5e-3`.
fn decimal(lit: &str) -> Option<Rational> {
    let (mant, exp) = match lit.find(['e', 'E']) {
        Some(i) => (&lit[..i], lit[i + 1..].parse::<i32>().ok()?),
        None => (lit, 0),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let shift = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        Rational::from_integer(digits * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(digits, num_traits::pow(ten, (-shift) as usize))
    })
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let b = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &src[start..i];
            out.push(Tok::Num(decimal(lit).ok_or_else(|| {
                parse_error(src, format!("bad number `{lit}`"))
            })?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(src[start..i].to_string()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(parse_error(src, format!("unexpected `{c}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, op: char) -> Result<()> {
        if self.eat(op) {
            Ok(())
        } else {
            Err(parse_error(self.src, format!("expected `{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            match self.toks.get(self.pos).cloned() {
                Some(Tok::Num(n)) if n.is_integer() && n >= Rational::zero() => {
                    self.pos += 1;
                    let k = n
                        .to_integer()
                        .try_into()
                        .map_err(|_| parse_error(self.src, "exponent too large"))?;
                    return Ok(Expr::Pow(Box::new(base), k));
                }
                _ => {
                    return Err(parse_error(
                        self.src,
                        "exponent must be a non-negative integer",
                    ))
                }
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if name == "sqrt" {
                    self.expect('(')?;
                    let e = self.expr()?;
                    self.expect(')')?;
                    Ok(Expr::Sqrt(Box::new(e)))
                } else {
                    Ok(Expr::Sym(name))
                }
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            _ => Err(parse_error(self.src, "unexpected end or operator")),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser {
            src,
            toks: tokenize(src)?,
            pos: 0,
        };
        let e = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(parse_error(src, "trailing input"));
        }
        Ok(e)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Sym(s) => {
                out.insert(s.clone());
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Sqrt(a) => a.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Replace every occurrence of `name` by `value`.
    pub fn bind(&self, name: &str, value: &Expr) -> Expr {
        let r = |e: &Expr| Box::new(e.bind(name, value));
        match self {
            Expr::Sym(s) if s == name => value.clone(),
            Expr::Num(_) | Expr::Sym(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(r(a)),
            Expr::Pow(a, k) => Expr::Pow(r(a), *k),
            Expr::Sqrt(a) => Expr::Sqrt(r(a)),
            Expr::Add(a, b) => Expr::Add(r(a), r(b)),
            Expr::Sub(a, b) => Expr::Sub(r(a), r(b)),
            Expr::Mul(a, b) => Expr::Mul(r(a), r(b)),
            Expr::Div(a, b) => Expr::Div(r(a), r(b)),
        }
    }

    /// Evaluate over jets of the given order; `env` supplies every symbol.
    /// A divisor with a vanishing constant term is a pole.
    pub fn eval_jet(&self, env: &dyn Fn(&str) -> Option<Jet>, order: usize) -> Result<Jet> {
        let ev = |e: &Expr| e.eval_jet(env, order);
        Ok(match self {
            Expr::Num(n) => Jet::constant(crate::algebra::rat_to_f64(n), order),
            Expr::Sym(s) => env(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?,
            Expr::Neg(a) => -ev(a)?,
            Expr::Add(a, b) => ev(a)? + ev(b)?,
            Expr::Sub(a, b) => ev(a)? - ev(b)?,
            Expr::Mul(a, b) => ev(a)? * ev(b)?,
            Expr::Div(a, b) => {
                let d = ev(b)?;
                if d.value().abs() < POLE_TOL {
                    return Err(Error::Pole {
                        denominator: d.value(),
                        location: String::new(),
                    });
                }
                ev(a)? / d
            }
            Expr::Pow(a, k) => ev(a)?.powi(*k),
            // a negative radicand yields NaN and marks the row non-real
            Expr::Sqrt(a) => ev(a)?.sqrt(),
        })
    }

    pub fn eval_f64(&self, env: &dyn Fn(&str) -> Option<f64>) -> Result<f64> {
        self.eval_jet(&|s| env(s).map(|v| Jet::constant(v, 0)), 0)
            .map(|j| j.value())
    }

    /// Exact polynomial over `syms`; only numeric divisors are allowed.
    pub fn to_param(&self, syms: &Arc<SymbolTable>) -> Result<ParamExpr> {
        let r = |e: &Expr| e.to_param(syms);
        Ok(match self {
            Expr::Num(n) => ParamExpr::constant(syms, n.clone()),
            Expr::Sym(s) => ParamExpr::var(syms, s)?,
            Expr::Neg(a) => -r(a)?,
            Expr::Add(a, b) => r(a)?.try_add(&r(b)?)?,
            Expr::Sub(a, b) => r(a)?.try_sub(&r(b)?)?,
            Expr::Mul(a, b) => r(a)?.try_mul(&r(b)?)?,
            Expr::Div(a, b) => {
                let d = r(b)?
                    .as_constant()
                    .filter(|d| !d.is_zero())
                    .ok_or_else(|| {
                        Error::UnsupportedForm("division by a non-constant in a polynomial".into())
                    })?;
                r(a)?.scale(&(Rational::one() / d))
            }
            Expr::Pow(a, k) => r(a)?.pow(*k),
            Expr::Sqrt(_) => return Err(Error::UnsupportedForm("sqrt in a polynomial".into())),
        })
    }
}

/// An expression with every constant symbol folded to a float; only the
/// listed variables remain and are supplied as jets at evaluation time.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, u32),
    Sqrt(Box<Node>),
}

impl Expr {
    pub fn compile(&self, vars: &[&str], env: &dyn Fn(&str) -> Option<f64>) -> Result<Node> {
        let c = |e: &Expr| e.compile(vars, env);
        let node = match self {
            Expr::Num(n) => Node::Const(crate::algebra::rat_to_f64(n)),
            Expr::Sym(s) => match vars.iter().position(|v| v == s) {
                Some(i) => Node::Var(i),
                None => Node::Const(env(s).ok_or_else(|| Error::UnknownSymbol(s.clone()))?),
            },
            Expr::Neg(a) => Node::Neg(Box::new(c(a)?)),
            Expr::Add(a, b) => Node::Add(Box::new(c(a)?), Box::new(c(b)?)),
            Expr::Sub(a, b) => Node::Sub(Box::new(c(a)?), Box::new(c(b)?)),
            Expr::Mul(a, b) => Node::Mul(Box::new(c(a)?), Box::new(c(b)?)),
            Expr::Div(a, b) => {
                let d = c(b)?;
                if let Node::Const(v) = d {
                    if v.abs() < POLE_TOL {
                        return Err(Error::Usage(format!("division by zero in `{b}`")));
                    }
                }
                Node::Div(Box::new(c(a)?), Box::new(d))
            }
            Expr::Pow(a, k) => Node::Pow(Box::new(c(a)?), *k),
            Expr::Sqrt(a) => Node::Sqrt(Box::new(c(a)?)),
        };
        Ok(node.fold())
    }
}

impl Node {
    fn fold(self) -> Node {
        let k = |n: &Node| {
            if let Node::Const(v) = n {
                Some(*v)
            } else {
                None
            }
        };
        let folded = match &self {
            Node::Neg(a) => k(a).map(|a| -a),
            Node::Add(a, b) => k(a).zip(k(b)).map(|(a, b)| a + b),
            Node::Sub(a, b) => k(a).zip(k(b)).map(|(a, b)| a - b),
            Node::Mul(a, b) => k(a).zip(k(b)).map(|(a, b)| a * b),
            Node::Div(a, b) => k(a).zip(k(b)).map(|(a, b)| a / b),
            Node::Pow(a, e) => k(a).map(|a| a.powi(*e as i32)),
            Node::Sqrt(a) => k(a).map(f64::sqrt),
            _ => None,
        };
        folded.map(Node::Const).unwrap_or(self)
    }

    pub fn eval(&self, vars: &[Jet], order: usize) -> Result<Jet> {
        let ev = |n: &Node| n.eval(vars, order);
        Ok(match self {
            Node::Const(v) => Jet::constant(*v, order),
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -ev(a)?,
            Node::Add(a, b) => ev(a)? + ev(b)?,
            Node::Sub(a, b) => ev(a)? - ev(b)?,
            Node::Mul(a, b) => match (&**a, &**b) {
                (Node::Const(c), x) | (x, Node::Const(c)) => ev(x)?.scale(*c),
                _ => ev(a)? * ev(b)?,
            },
            Node::Div(a, b) => {
                let d = ev(b)?;
                if d.value().abs() < POLE_TOL {
                    return Err(Error::Pole {
                        denominator: d.value(),
                        location: String::new(),
                    });
                }
                ev(a)? / d
            }
            Node::Pow(a, k) => ev(a)?.powi(*k),
            Node::Sqrt(a) => ev(a)?.sqrt(),
        })
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(n) => write!(f, "{}", crate::algebra::fmt_rational(n)),
            Expr::Sym(s) => f.write_str(s),
            Expr::Neg(a) => write!(f, "-({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Div(a, b) => write!(f, "{a}/({b})"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
        }
    }
}

/// Exact rational from `1/4`, `-0.3`, `2` or `1.5e-3`.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let empty = SymbolTable::new(Vec::<String>::new())?;
    Expr::parse(src)?
        .to_param(&empty)
        .ok()
        .and_then(|p| {
            if p.is_zero() {
                Some(Rational::zero())
            } else {
                p.as_constant()
            }
        })
        .ok_or_else(|| parse_error(src, "not a rational number"))
}
