use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};

use super::{Monomial, ParamExpr, Rational, SymbolTable};
use crate::error::{Error, Result};

/// `num / den` with a monic monomial denominator.
///
/// Every symbol in `den` is an implicit nonvanishing assumption; callers
/// collect them through [`Fraction::den_symbols`]. Common monomial content is
/// cancelled on construction, so the representation is canonical.
#[derive(Clone, PartialEq, Eq)]
pub struct Fraction {
    num: ParamExpr,
    den: Monomial,
}

impl Fraction {
    pub fn new(num: ParamExpr, den: Monomial) -> Self {
        let n = num.symbols().len();
        if num.is_zero() {
            return Fraction {
                num,
                den: Monomial::one(n),
            };
        }
        let g = num.content().gcd(&den);
        let num = num.div_monomial(&g).expect("content divides");
        let den = g.div_from(&den).expect("gcd divides");
        Fraction { num, den }
    }

    pub fn from_poly(p: ParamExpr) -> Self {
        let n = p.symbols().len();
        Fraction {
            num: p,
            den: Monomial::one(n),
        }
    }

    pub fn zero(symbols: &Arc<SymbolTable>) -> Self {
        Self::from_poly(ParamExpr::zero(symbols))
    }

    pub fn numer(&self) -> &ParamExpr {
        &self.num
    }

    pub fn denom(&self) -> &Monomial {
        &self.den
    }

    pub fn denom_expr(&self) -> ParamExpr {
        ParamExpr::term(self.num.symbols(), Rational::one(), self.den.clone())
    }

    pub fn symbols(&self) -> &Arc<SymbolTable> {
        self.num.symbols()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn as_poly(&self) -> Option<&ParamExpr> {
        self.den.is_one().then_some(&self.num)
    }

    pub fn den_symbols(&self) -> Vec<usize> {
        (0..self.den.0.len())
            .filter(|&i| self.den.exp(i) > 0)
            .collect()
    }

    pub fn contains(&self, idx: usize) -> bool {
        self.num.contains(idx) || self.den.exp(idx) > 0
    }

    pub fn add(&self, other: &Fraction) -> Fraction {
        let l = self.den.lcm(&other.den);
        let a = self.num.mul_monomial(&self.den.div_from(&l).unwrap());
        let b = other.num.mul_monomial(&other.den.div_from(&l).unwrap());
        Fraction::new(&a + &b, l)
    }

    pub fn neg(&self) -> Fraction {
        Fraction {
            num: -&self.num,
            den: self.den.clone(),
        }
    }

    pub fn sub(&self, other: &Fraction) -> Fraction {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Fraction) -> Fraction {
        Fraction::new(&self.num * &other.num, self.den.mul(&other.den))
    }

    pub fn scale(&self, c: &Rational) -> Fraction {
        Fraction::new(self.num.scale(c), self.den.clone())
    }

    /// Divide by a polynomial; only a nonzero monomial (times a rational) is allowed.
    pub fn div_poly(&self, d: &ParamExpr) -> Result<Fraction> {
        let (c, m) = d.as_monomial().ok_or_else(|| {
            Error::SolverIncomplete(format!("division by non-monomial `{}`", d.render()))
        })?;
        Ok(Fraction::new(
            self.num.scale(&(Rational::one() / c)),
            self.den.mul(&m),
        ))
    }

    /// Substitute `symbol := value` into a polynomial.
    pub fn substitute_into(p: &ParamExpr, idx: usize, value: &Fraction) -> Fraction {
        let coeffs = p.coeffs_in(idx);
        let top = (coeffs.len() - 1) as u32;
        if top == 0 {
            return Fraction::from_poly(p.clone());
        }
        // sum_j c_j N^j d^(top-j) / d^top
        let mut num = ParamExpr::zero(p.symbols());
        let mut npow = ParamExpr::one(p.symbols());
        for (j, c) in coeffs.iter().enumerate() {
            if !c.is_zero() {
                let dpow = value.den.pow(top - j as u32);
                num = &num + &(c * &npow).mul_monomial(&dpow);
            }
            npow = &npow * &value.num;
        }
        Fraction::new(num, value.den.pow(top))
    }

    pub fn substitute(&self, idx: usize, value: &Fraction) -> Fraction {
        assert_eq!(
            self.den.exp(idx),
            0,
            "cannot substitute a denominator symbol"
        );
        let mut f = Fraction::substitute_into(&self.num, idx, value);
        f.den = f.den.mul(&self.den);
        Fraction::new(f.num, f.den)
    }

    pub fn map_num(&self, f: impl FnOnce(&ParamExpr) -> ParamExpr) -> Fraction {
        Fraction::new(f(&self.num), self.den.clone())
    }

    pub fn embed(&self, target: &Arc<SymbolTable>) -> Result<Fraction> {
        let num = self.num.embed(target)?;
        let den = ParamExpr::term(self.num.symbols(), Rational::one(), self.den.clone())
            .embed(target)?
            .as_monomial()
            .expect("monomial embeds to monomial")
            .1;
        Ok(Fraction::new(num, den))
    }

    pub fn eval_f64(&self, values: &[f64]) -> f64 {
        let d = self
            .den
            .0
            .iter()
            .enumerate()
            .fold(1.0, |acc, (i, &e)| acc * values[i].powi(e as i32));
        self.num.eval_f64(values) / d
    }

    /// Exact value; `None` when the denominator vanishes.
    pub fn eval_exact(&self, values: &[Rational]) -> Option<Rational> {
        let d = ParamExpr::term(self.num.symbols(), Rational::one(), self.den.clone())
            .eval_exact(values);
        (!d.is_zero()).then(|| self.num.eval_exact(values) / d)
    }

    pub fn render(&self) -> String {
        if self.den.is_one() {
            return self.num.render();
        }
        let names = self.num.symbols().names();
        let den = self.den.render(names);
        let num = if self.num.num_terms() == 1 {
            self.num.render()
        } else {
            format!("({})", self.num.render())
        };
        if self.den.degree() == 1 {
            format!("{num}/{den}")
        } else {
            format!("{num}/({den})")
        }
    }
}

impl fmt::Debug for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fraction({})", self.render())
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn renders_two_beta_over_alpha() {
        let s = SymbolTable::new(["alpha", "beta"]).unwrap();
        let beta = ParamExpr::var(&s, "beta").unwrap();
        let alpha = ParamExpr::var(&s, "alpha").unwrap();
        let f = Fraction::from_poly(beta.scale(&rat(2, 1)))
            .div_poly(&alpha)
            .unwrap();
        assert_eq!(f.render(), "2*beta/alpha");
        // times alpha/2 collapses back to beta
        let g = f.mul(&Fraction::from_poly(alpha.scale(&rat(1, 2))));
        assert_eq!(g.as_poly(), Some(&beta));
    }

    #[test]
    fn non_monomial_division_is_refused() {
        let s = SymbolTable::new(["alpha", "beta"]).unwrap();
        let d = &ParamExpr::var(&s, "alpha").unwrap() + &ParamExpr::one(&s);
        assert!(Fraction::from_poly(ParamExpr::one(&s))
            .div_poly(&d)
            .is_err());
    }

    #[test]
    fn substitution_clears_to_polynomial() {
        // alpha*c1 - omega with c1 = 2(omega - C)/alpha  ->  omega - 2C
        let s = SymbolTable::new(["alpha", "omega", "c1", "C"]).unwrap();
        let v = |n| ParamExpr::var(&s, n).unwrap();
        let expr = &(&v("alpha") * &v("c1")) - &v("omega");
        let c1 = Fraction::from_poly((&v("omega") - &v("C")).scale(&rat(2, 1)))
            .div_poly(&v("alpha"))
            .unwrap();
        let out = Fraction::substitute_into(&expr, 2, &c1);
        assert_eq!(out.as_poly().unwrap().render(), "omega - 2*C");
    }
}
