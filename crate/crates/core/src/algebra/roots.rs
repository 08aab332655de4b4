use num_traits::One;

use super::{Fraction, ParamExpr, Radical, Rational};
use crate::error::{Error, Result};

/// Roots in `x` of `a2 x^2 + a1 x + a0 = 0` as fractions over the ring.
///
/// The discriminant must be a perfect square, or a perfect square times the
/// radicand of `radical` (the root then carries the radical symbol). Division
/// is only by monomial leading coefficients. A double root is returned once.
pub fn quadratic_roots(
    a2: &ParamExpr,
    a1: &ParamExpr,
    a0: &ParamExpr,
    radical: Option<&Radical>,
) -> Result<Vec<Fraction>> {
    if a2.is_zero() {
        if a1.is_zero() {
            return Err(Error::SolverIncomplete(if a0.is_zero() {
                "equation vanishes identically; unknown left free".into()
            } else {
                format!("inconsistent constant equation `{a0} = 0`")
            }));
        }
        return Ok(vec![Fraction::from_poly(-a0).div_poly(a1)?]);
    }
    if a0.is_zero() {
        let zero = Fraction::zero(a0.symbols());
        return Ok(vec![zero, Fraction::from_poly(-a1).div_poly(a2)?]);
    }
    let disc = &(a1 * a1) - &(a2 * a0).scale(&Rational::from_integer(4.into()));
    let root = match disc.sqrt() {
        Some(r) => r,
        None => {
            let via_radical = radical.and_then(|rad| {
                let q = disc.div_exact(&rad.square)?.sqrt()?;
                Some(&q * &ParamExpr::var_idx(disc.symbols(), rad.symbol))
            });
            via_radical.ok_or_else(|| {
                Error::SolverIncomplete(format!("discriminant `{disc}` is not a perfect square"))
            })?
        }
    };
    let two_a2 = a2.scale(&(Rational::one() + Rational::one()));
    let plus = Fraction::from_poly(&(-a1) + &root).div_poly(&two_a2)?;
    if root.is_zero() {
        return Ok(vec![plus]);
    }
    let minus = Fraction::from_poly(&(-a1) - &root).div_poly(&two_a2)?;
    Ok(vec![plus, minus])
}
