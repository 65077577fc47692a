use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{PolyError, Rat, RatPoly, UniPoly};

/// Quotient of two polynomials of equal arity.
///
/// After [`reduce_fraction`] the numerator and denominator have integer
/// coefficients with no common integer content, the denominator's
/// graded-lex leading coefficient is positive, and univariate fractions are
/// in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: RatPoly,
    den: RatPoly,
}

impl RatFunc {
    pub fn num(&self) -> &RatPoly {
        &self.num
    }

    pub fn den(&self) -> &RatPoly {
        &self.den
    }

    pub fn arity(&self) -> usize {
        self.num.arity()
    }

    pub fn from_poly(p: RatPoly) -> RatFunc {
        let arity = p.arity();
        reduce_fraction(&p, &RatPoly::one(arity)).expect("unit denominator")
    }

    /// True when the denominator is constant.
    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// Numerator and denominator as univariate polynomials.
    pub fn as_univariate(&self) -> Result<(UniPoly, UniPoly), PolyError> {
        Ok((self.num.to_univariate()?, self.den.to_univariate()?))
    }

    /// Value at a rational point; `None` at a pole.
    pub fn evaluate(&self, point: &[Rat]) -> Result<Option<Rat>, PolyError> {
        let d = self.den.evaluate(point)?;
        if d.is_zero() {
            return Ok(None);
        }
        Ok(Some(self.num.evaluate(point)? / d))
    }

    pub fn scale(&self, c: &Rat) -> RatFunc {
        reduce_fraction(&self.num.scale(c), &self.den).expect("nonzero denominator")
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == RatPoly::one(self.den.arity()) {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

fn integer_normalizer(num: &RatPoly, den: &RatPoly) -> Rat {
    let coeffs: Vec<&Rat> = num.terms().chain(den.terms()).map(|(_, c)| c).collect();
    let lcm = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let gcd = coeffs.iter().fold(BigInt::zero(), |acc, c| {
        acc.gcd(&(c.numer() * (&lcm / c.denom())))
    });
    let mut s = Rat::new(lcm, gcd);
    if den.leading_coeff().is_some_and(Signed::is_negative) {
        s = -s;
    }
    s
}

/// Builds a normalized fraction. Univariate fractions are reduced by their
/// gcd; other arities are only reduced when the denominator is constant.
pub fn reduce_fraction(num: &RatPoly, den: &RatPoly) -> Result<RatFunc, PolyError> {
    if num.arity() != den.arity() {
        return Err(PolyError::ArityMismatch(num.arity(), den.arity()));
    }
    if den.is_zero() {
        return Err(PolyError::ZeroDenominator);
    }
    let arity = num.arity();
    let (mut n, mut d) = if num.is_zero() {
        (RatPoly::zero(arity), RatPoly::one(arity))
    } else if den.is_constant() {
        (num.scale(&den.constant_term().recip()), RatPoly::one(arity))
    } else if arity == 1 {
        let (nu, du) = (num.to_univariate()?, den.to_univariate()?);
        let g = nu.gcd(&du);
        (
            nu.exact_div(&g).expect("gcd divides").to_ratpoly(),
            du.exact_div(&g).expect("gcd divides").to_ratpoly(),
        )
    } else {
        (num.clone(), den.clone())
    };
    let s = integer_normalizer(&n, &d);
    n = n.scale(&s);
    d = d.scale(&s);
    Ok(RatFunc { num: n, den: d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat;

    fn xu() -> RatPoly {
        RatPoly::var(1, 0)
    }

    #[test]
    fn reduce_examples() {
        let one = RatPoly::one(1);
        let f = reduce_fraction(&(&xu().pow(2) - &one), &(&xu() - &one)).unwrap();
        assert_eq!(f.num(), &(&xu() + &one));
        assert_eq!(f.den(), &one);

        let f = reduce_fraction(&xu().scale(&rat(2)), &RatPoly::constant(1, rat(4))).unwrap();
        assert_eq!(f.num(), &xu());
        assert_eq!(f.den(), &RatPoly::constant(1, rat(2)));

        // ((2x + y) x) / x^2 at y = 3
        let x = RatPoly::var(2, 0);
        let y = RatPoly::var(2, 1);
        let n = (&(&x.scale(&rat(2)) + &y) * &x).slice(0, &rat(3)).to_ratpoly();
        let d = x.pow(2).slice(0, &rat(3)).to_ratpoly();
        let f = reduce_fraction(&n, &d).unwrap();
        assert_eq!(f.num(), &(&xu().scale(&rat(2)) + &RatPoly::constant(1, rat(3))));
        assert_eq!(f.den(), &xu());
    }

    #[test]
    fn reduce_errors_and_sign() {
        assert_eq!(
            reduce_fraction(&xu(), &RatPoly::zero(1)),
            Err(PolyError::ZeroDenominator)
        );
        let f = reduce_fraction(&RatPoly::one(1), &(-&xu())).unwrap();
        assert_eq!(f.num(), &RatPoly::constant(1, rat(-1)));
        assert_eq!(f.den(), &xu());
        let z = reduce_fraction(&RatPoly::zero(1), &xu()).unwrap();
        assert!(z.num().is_zero() && z.den() == &RatPoly::one(1));
    }
}
