use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::{fmt_rat, rat, PolyError, Rat, RatPoly};

/// Dense univariate polynomial over the rationals, coefficients in
/// ascending degree order with trailing zeros trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        UniPoly::new(c.iter().map(|&v| rat(v)).collect())
    }

    pub fn zero() -> Self {
        UniPoly::default()
    }

    pub fn one() -> Self {
        UniPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn x() -> Self {
        UniPoly::new(vec![Rat::zero(), Rat::one()])
    }

    pub fn monomial(k: usize, c: Rat) -> Self {
        let mut v = vec![Rat::zero(); k + 1];
        v[k] = c;
        UniPoly::new(v)
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rat {
        self.coeffs.get(k).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rat) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn monic(&self) -> UniPoly {
        match self.lc() {
            None => UniPoly::zero(),
            Some(lc) => self.scale(&lc.recip()),
        }
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> UniPoly {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * rat(k as i64))
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn integral(&self) -> UniPoly {
        let mut v = vec![Rat::zero()];
        v.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c / rat(k as i64 + 1)),
        );
        UniPoly::new(v)
    }

    pub fn pow(&self, e: u32) -> UniPoly {
        let mut acc = UniPoly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// self(inner(x)).
    pub fn compose(&self, inner: &UniPoly) -> UniPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(UniPoly::zero(), |acc, c| &(&acc * inner) + &UniPoly::constant(c.clone()))
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lc_inv = d.coeffs[dd].recip();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let top = &r[k + dd] * &lc_inv;
            if !top.is_zero() {
                for (j, c) in d.coeffs.iter().enumerate() {
                    r[k + j] -= &top * c;
                }
            }
            q[k] = top;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    pub fn rem(&self, d: &UniPoly) -> UniPoly {
        self.div_rem(d).1
    }

    /// Quotient if `d` divides `self` exactly.
    pub fn exact_div(&self, d: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; zero only when both inputs are zero.
    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.monic();
        }
        a.monic()
    }

    /// Returns (g, s, t) with s*self + t*other = g and g the monic gcd.
    pub fn ext_gcd(&self, other: &UniPoly) -> (UniPoly, UniPoly, UniPoly) {
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (UniPoly::one(), UniPoly::zero());
        let (mut t0, mut t1) = (UniPoly::zero(), UniPoly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lc().cloned() {
            None => (r0, s0, t0),
            Some(lc) => {
                let inv = lc.recip();
                (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
            }
        }
    }

    /// Monic p / gcd(p, p').
    pub fn squarefree_part(&self) -> Result<UniPoly, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let g = self.gcd(&self.derivative());
        Ok(self.exact_div(&g).expect("gcd divides").monic())
    }

    /// Lagrange interpolation through distinct nodes, in Newton form.
    pub fn interpolate(points: &[(Rat, Rat)]) -> Result<UniPoly, PolyError> {
        if points.is_empty() {
            return Err(PolyError::NoPoints);
        }
        for (i, (a, _)) in points.iter().enumerate() {
            if points[..i].iter().any(|(b, _)| b == a) {
                return Err(PolyError::DuplicateNode(fmt_rat(a)));
            }
        }
        let n = points.len();
        // divided differences
        let mut dd: Vec<Rat> = points.iter().map(|(_, v)| v.clone()).collect();
        for level in 1..n {
            for i in (level..n).rev() {
                dd[i] = (&dd[i] - &dd[i - 1]) / (&points[i].0 - &points[i - level].0);
            }
        }
        let mut acc = UniPoly::constant(dd[n - 1].clone());
        for i in (0..n - 1).rev() {
            let factor = UniPoly::new(vec![-points[i].0.clone(), Rat::one()]);
            acc = &(&acc * &factor) + &UniPoly::constant(dd[i].clone());
        }
        Ok(acc)
    }

    pub fn to_ratpoly(&self) -> RatPoly {
        RatPoly::from_univariate(self, 1, 0)
    }

    pub fn to_string_in(&self, var: &str) -> String {
        self.to_ratpoly().to_string_with(&[var])
    }
}

impl fmt::Display for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({self})")
    }
}

impl Add for &UniPoly {
    type Output = UniPoly;
    fn add(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &UniPoly {
    type Output = UniPoly;
    fn sub(self, rhs: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        UniPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &UniPoly {
    type Output = UniPoly;
    fn mul(self, rhs: &UniPoly) -> UniPoly {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }
}

impl Neg for &UniPoly {
    type Output = UniPoly;
    fn neg(self) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// Unique polynomial of degree below the number of points through every
/// (node, value) pair.
pub fn interpolate_univariate(points: &[(Rat, Rat)]) -> Result<RatPoly, PolyError> {
    Ok(UniPoly::interpolate(points)?.to_ratpoly())
}

/// Squarefree part of a nonzero univariate polynomial, made monic.
pub fn squarefree_part(p: &RatPoly) -> Result<RatPoly, PolyError> {
    Ok(p.to_univariate()?.squarefree_part()?.to_ratpoly())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn interpolation_examples() {
        let pts = [(rat(0), rat(1)), (rat(1), rat(2)), (rat(2), rat(5))];
        assert_eq!(UniPoly::interpolate(&pts).unwrap(), u(&[1, 0, 1]));
        assert_eq!(
            UniPoly::interpolate(&[(rat(0), ratio(7, 3))]).unwrap(),
            UniPoly::constant(ratio(7, 3))
        );
        assert_eq!(
            UniPoly::interpolate(&[(rat(1), rat(1)), (rat(2), rat(2))]).unwrap(),
            UniPoly::x()
        );
        assert!(matches!(
            UniPoly::interpolate(&[(rat(1), rat(1)), (rat(1), rat(2))]),
            Err(PolyError::DuplicateNode(_))
        ));
        assert_eq!(UniPoly::interpolate(&[]), Err(PolyError::NoPoints));
    }

    #[test]
    fn squarefree_examples() {
        // (x-1)^2 (x+2) = x^3 - 3x + 2
        assert_eq!(u(&[2, -3, 0, 1]).squarefree_part().unwrap(), u(&[-2, 1, 1]));
        assert_eq!(u(&[0, 0, 0, 1]).squarefree_part().unwrap(), UniPoly::x());
        assert_eq!(u(&[1, 0, 1]).squarefree_part().unwrap(), u(&[1, 0, 1]));
        assert_eq!(UniPoly::zero().squarefree_part(), Err(PolyError::ZeroPolynomial));
        let p = u(&[2, -3, 0, 1]).to_ratpoly();
        assert_eq!(squarefree_part(&p).unwrap(), u(&[-2, 1, 1]).to_ratpoly());
    }

    #[test]
    fn division_and_gcd() {
        let a = u(&[-1, 0, 1]);
        let b = u(&[-1, 1]);
        let (q, r) = a.div_rem(&b);
        assert_eq!(q, u(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(a.gcd(&u(&[1, 1]).scale(&rat(3))), u(&[1, 1]));
        let (g, s, t) = u(&[1, 0, 1]).ext_gcd(&u(&[0, 1]));
        assert_eq!(g, UniPoly::one());
        assert_eq!(&(&s * &u(&[1, 0, 1])) + &(&t * &u(&[0, 1])), g);
    }

    #[test]
    fn compose_integral() {
        let outer = u(&[0, 2, 1]);
        let inner = u(&[0, 0, 1]);
        assert_eq!(outer.compose(&inner), u(&[0, 0, 2, 0, 1]));
        assert_eq!(u(&[1, 2, 3]).integral(), u(&[0, 1, 1, 1]));
        assert_eq!(u(&[1, 2, 3]).integral().derivative(), u(&[1, 2, 3]));
    }
}
