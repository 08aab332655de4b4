//! Exact arithmetic foundation.
//!
//! - [`ParamExpr`]: sparse multivariate polynomial with `BigRational`
//!   coefficients over a fixed, ordered [`SymbolTable`].
//! - [`Fraction`]: a `ParamExpr` over a monic monomial denominator. This is the
//!   only place division by a parameter is allowed.
//! - [`WPoly`]: polynomial in the Riccati variable `w = G'/G` with `ParamExpr`
//!   coefficients, closed under the derivation `w' = -(w^2 + lambda w + mu)`.

mod fraction;
mod monomial;
mod param;
mod roots;
mod symbols;
mod wpoly;

pub use fraction::Fraction;
pub use monomial::Monomial;
pub use param::{param_mul, ParamExpr, Radical};
pub use roots::quadratic_roots;
pub use symbols::SymbolTable;
pub use wpoly::{phi_prime_closed, phi_second_closed, wpoly_derive, wpoly_derive2, WPoly};

/// Exact rational; always in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

#[cfg(test)]
pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub(crate) fn rat_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn fmt_rational(r: &Rational) -> String {
    if r.denom() == &num_bigint::BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
