//! Exact polynomial arithmetic over the rationals.
//!
//! [`RatPoly`] is a sparse multivariate polynomial in up to four variables
//! with arbitrary-precision rational coefficients, stored in graded
//! lexicographic order. [`UniPoly`] is the dense univariate companion used
//! for gcds, interpolation and decomposition. Only univariate gcds exist;
//! callers are arranged so that no multivariate gcd is ever needed.

mod field_eval;
mod ratfunc;
mod uni;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::{FieldError, PrimeField};

pub use field_eval::{horner, FieldPoly};
pub use ratfunc::{reduce_fraction, RatFunc};
pub use uni::{interpolate_univariate, squarefree_part, UniPoly};

pub type Rat = BigRational;

pub const MAX_ARITY: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("duplicate interpolation node {0}")]
    DuplicateNode(String),
    #[error("no interpolation points")]
    NoPoints,
    #[error("expected a point with {expected} coordinates, got {got}")]
    PointLength { expected: usize, got: usize },
    #[error("polynomial is not univariate (arity {0})")]
    NotUnivariate(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent vector ordered by total degree, then lexicographically with the
/// first variable most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Sparse polynomial in `arity` variables with exact rational coefficients.
/// No zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    arity: usize,
    terms: BTreeMap<Monomial, Rat>,
}

impl RatPoly {
    pub fn zero(arity: usize) -> Self {
        assert!((1..=MAX_ARITY).contains(&arity), "arity {arity} out of range");
        RatPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: Rat) -> Self {
        let mut p = RatPoly::zero(arity);
        p.add_term(Monomial::one(arity), c);
        p
    }

    pub fn one(arity: usize) -> Self {
        RatPoly::constant(arity, Rat::one())
    }

    /// The variable with index `i`.
    pub fn var(arity: usize, i: usize) -> Self {
        assert!(i < arity);
        let mut e = vec![0; arity];
        e[i] = 1;
        RatPoly::monomial(e, Rat::one())
    }

    pub fn monomial(exps: Vec<u32>, c: Rat) -> Self {
        let mut p = RatPoly::zero(exps.len());
        p.add_term(Monomial(exps), c);
        p
    }

    pub fn from_terms<I>(arity: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rat)>,
    {
        let mut p = RatPoly::zero(arity);
        for (e, c) in terms {
            assert_eq!(e.len(), arity, "exponent vector length");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Builds a polynomial from integer (exponents, coefficient) pairs.
    pub fn from_int_terms(arity: usize, terms: &[(&[u32], i64)]) -> Self {
        RatPoly::from_terms(arity, terms.iter().map(|(e, c)| (e.to_vec(), rat(*c))))
    }

    fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rat {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rat::zero)
    }

    pub fn constant_term(&self) -> Rat {
        self.coeff(&vec![0; self.arity])
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rat)> {
        self.terms.iter().next_back()
    }

    pub fn leading_coeff(&self) -> Option<&Rat> {
        self.leading_term().map(|(_, c)| c)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Degree in variable `var`; zero for the zero polynomial.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.degree_in(var) > 0
    }

    pub fn scale(&self, c: &Rat) -> RatPoly {
        if c.is_zero() {
            return RatPoly::zero(self.arity);
        }
        RatPoly {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v * c))
                .collect(),
        }
    }

    pub fn pow(&self, e: u32) -> RatPoly {
        let mut acc = RatPoly::one(self.arity);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    fn check_arity(&self, other: &RatPoly) -> Result<(), PolyError> {
        if self.arity == other.arity {
            Ok(())
        } else {
            Err(PolyError::ArityMismatch(self.arity, other.arity))
        }
    }

    pub fn partial_derivative(&self, var: usize) -> RatPoly {
        assert!(var < self.arity);
        let mut out = RatPoly::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.add_term(Monomial(exps), c * rat(e as i64));
        }
        out
    }

    pub fn evaluate(&self, point: &[Rat]) -> Result<Rat, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::PointLength {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut total = Rat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            total += t;
        }
        Ok(total)
    }

    /// Evaluates at a point of GF(p)^arity, reducing each coefficient n/d to
    /// n * d^-1 first.
    pub fn evaluate_mod(&self, point: &[u64], field: &PrimeField) -> Result<u64, PolyError> {
        if point.len() != self.arity {
            return Err(PolyError::PointLength {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut total = 0u64;
        for (m, c) in &self.terms {
            let mut t = field.reduce_rational(c)?;
            for (&x, &e) in point.iter().zip(&m.0) {
                t = field.mul(t, field.pow(x, e as u64));
            }
            total = field.add(total, t);
        }
        Ok(total)
    }

    /// Substitutes `subs[i]` for variable `i`; all substitutes share one
    /// arity, which becomes the arity of the result.
    pub fn compose(&self, subs: &[RatPoly]) -> RatPoly {
        assert_eq!(subs.len(), self.arity, "one substitute per variable");
        let target = subs[0].arity;
        assert!(subs.iter().all(|s| s.arity == target));
        let mut powers: Vec<Vec<RatPoly>> = subs.iter().map(|s| vec![RatPoly::one(s.arity)]).collect();
        let mut out = RatPoly::zero(target);
        for (m, c) in &self.terms {
            let mut t = RatPoly::constant(target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &subs[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = &out + &t;
        }
        out
    }

    /// Re-embeds into `arity` variables, sending variable `i` to `mapping[i]`.
    pub fn remap(&self, arity: usize, mapping: &[usize]) -> RatPoly {
        assert_eq!(mapping.len(), self.arity);
        let mut out = RatPoly::zero(arity);
        for (m, c) in &self.terms {
            let mut e = vec![0; arity];
            for (i, &k) in mapping.iter().enumerate() {
                e[k] += m.0[i];
            }
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Fixes variable `var` to `value`, keeping the arity.
    pub fn substitute_value(&self, var: usize, value: &Rat) -> RatPoly {
        let mut out = RatPoly::zero(self.arity);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = std::mem::take(&mut e[var]);
            out.add_term(Monomial(e), c * num_traits::pow(value.clone(), k as usize));
        }
        out
    }

    /// For a bivariate polynomial, fixes the other variable to `value` and
    /// returns the univariate polynomial in `keep`.
    pub fn slice(&self, keep: usize, value: &Rat) -> UniPoly {
        assert_eq!(self.arity, 2, "slice expects a bivariate polynomial");
        let other = 1 - keep;
        let mut coeffs = vec![Rat::zero(); self.degree_in(keep) as usize + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[keep] as usize] += c * num_traits::pow(value.clone(), m.0[other] as usize);
        }
        UniPoly::new(coeffs)
    }

    /// Coefficients of a bivariate polynomial as a polynomial in `var`,
    /// each coefficient being univariate in the other variable.
    pub fn coefficients_in(&self, var: usize) -> Vec<UniPoly> {
        assert_eq!(self.arity, 2);
        let other = 1 - var;
        let mut rows: Vec<Vec<Rat>> = vec![Vec::new(); self.degree_in(var) as usize + 1];
        for (m, c) in &self.terms {
            let row = &mut rows[m.0[var] as usize];
            let k = m.0[other] as usize;
            if row.len() <= k {
                row.resize(k + 1, Rat::zero());
            }
            row[k] += c;
        }
        rows.into_iter().map(UniPoly::new).collect()
    }

    /// Inverse of [`Self::coefficients_in`].
    pub fn from_coefficients_in(var: usize, rows: &[UniPoly]) -> RatPoly {
        let other = 1 - var;
        let mut out = RatPoly::zero(2);
        for (i, row) in rows.iter().enumerate() {
            for (k, c) in row.coeffs().iter().enumerate() {
                let mut e = vec![0u32; 2];
                e[var] = i as u32;
                e[other] = k as u32;
                out.add_term(Monomial(e), c.clone());
            }
        }
        out
    }

    pub fn to_univariate(&self) -> Result<UniPoly, PolyError> {
        if self.arity != 1 {
            return Err(PolyError::NotUnivariate(self.arity));
        }
        let mut coeffs = vec![Rat::zero(); self.degree_in(0) as usize + 1];
        for (m, c) in &self.terms {
            coeffs[m.0[0] as usize] = c.clone();
        }
        Ok(UniPoly::new(coeffs))
    }

    /// Embeds a univariate polynomial as a polynomial in variable `var` of
    /// an `arity`-variable ring.
    pub fn from_univariate(u: &UniPoly, arity: usize, var: usize) -> RatPoly {
        let mut out = RatPoly::zero(arity);
        for (k, c) in u.coeffs().iter().enumerate() {
            let mut e = vec![0; arity];
            e[var] = k as u32;
            out.add_term(Monomial(e), c.clone());
        }
        out
    }

    /// Graded-lex comparison of whole polynomials, leading terms first.
    pub fn grlex_cmp(&self, other: &RatPoly) -> Ordering {
        let mut a = self.terms.iter().rev();
        let mut b = other.terms.iter().rev();
        loop {
            match (a.next(), b.next()) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some((ma, ca)), Some((mb, cb))) => {
                    let o = ma.cmp(mb).then_with(|| ca.cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
            }
        }
    }

    pub fn default_names(arity: usize) -> &'static [&'static str] {
        match arity {
            1 => &["x"],
            2 => &["x", "y"],
            3 => &["x", "y", "z"],
            _ => &["a", "b", "c", "d"],
        }
    }

    /// Canonical text form: terms in descending graded-lex order, explicit
    /// `*`, `^` for powers and `n/d` rationals.
    pub fn to_string_with(&self, names: &[&str]) -> String {
        assert!(names.len() >= self.arity);
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let abs = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if m.degree() == 0 || !abs.is_one() {
                factors.push(fmt_rat(&abs));
            }
            for (k, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(names[k].to_string()),
                    _ => factors.push(format!("{}^{}", names[k], e)),
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

pub(crate) fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serializes a rational as its "n/d" string.
pub(crate) fn serialize_rat<S: serde::Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rat(r))
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_with(RatPoly::default_names(self.arity)))
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly[{}]({})", self.arity, self)
    }
}

/// Checked ring operation.
pub fn poly_arith(u: &RatPoly, v: &RatPoly, op: PolyOp) -> Result<RatPoly, PolyError> {
    u.check_arity(v)?;
    Ok(match op {
        PolyOp::Add => u + v,
        PolyOp::Sub => u - v,
        PolyOp::Mul => u * v,
    })
}

// The operator impls panic on mismatched arity; use `poly_arith` when the
// arities are not known to agree.
impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        assert_eq!(self.arity, rhs.arity, "arity mismatch");
        let mut acc: BTreeMap<Monomial, Rat> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                *acc.entry(ma.mul(mb)).or_insert_with(Rat::zero) += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        RatPoly {
            arity: self.arity,
            terms: acc,
        }
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for RatPoly {
            type Output = RatPoly;
            fn $f(self, rhs: RatPoly) -> RatPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
