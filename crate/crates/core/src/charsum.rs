//! Additive and multiplicative character sums over GF(p), evaluated in
//! double precision with compensated summation.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::par;
use crate::poly::{FieldPoly, PolyError, RatPoly};

/// Slack allowed when comparing a magnitude with its bound.
pub const BOUND_SLACK: f64 = 1e-6;
/// Default constant in the twisted-sum bound C p^(1/2).
pub const DEFAULT_TWIST_CONSTANT: f64 = 8.0;
/// Moduli up to this use a precomputed table of p-th roots of unity.
const ROOT_TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CharSumError {
    #[error("polynomial is constant modulo p")]
    ConstantPolynomial,
    #[error("degree {degree} is not below p = {p}")]
    DegreeTooLarge { degree: usize, p: u64 },
    #[error("factor {0} is not irreducible, or irreducibility was not checked")]
    NotIrreducible(usize),
    #[error("invalid factor {index}: {reason}")]
    InvalidFactor { index: usize, reason: String },
    #[error("character order {order} does not divide p - 1 = {p_minus_1}")]
    OrderMismatch { order: u64, p_minus_1: u64 },
    #[error("every character exponent is trivial; magnitude {0}")]
    TrivialCharacterProduct(f64),
    #[error("expected a univariate polynomial, got arity {0}")]
    Arity(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharSumResult {
    pub magnitude: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub terms: u64,
}

impl CharSumResult {
    fn new(sum: Complex64, bound: f64, terms: u64) -> Self {
        let magnitude = sum.norm();
        CharSumResult {
            magnitude,
            bound,
            satisfied: magnitude <= bound + BOUND_SLACK,
            terms,
        }
    }
}

/// The character x -> exp(2 pi i exponent dlog(x) / order) of GF(p)^*.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultChar {
    pub order: u64,
    pub exponent: u64,
}

impl MultChar {
    pub const LEGENDRE: MultChar = MultChar {
        order: 2,
        exponent: 1,
    };

    pub fn trivial() -> MultChar {
        MultChar {
            order: 1,
            exponent: 0,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent % self.order == 0
    }

    fn check(&self, field: &PrimeField) -> Result<(), CharSumError> {
        let p_minus_1 = field.p() - 1;
        if self.order == 0 || p_minus_1 % self.order != 0 {
            return Err(CharSumError::OrderMismatch {
                order: self.order,
                p_minus_1,
            });
        }
        Ok(())
    }
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Default)]
struct Accumulator {
    re: (f64, f64),
    im: (f64, f64),
}

fn neumaier(acc: (f64, f64), x: f64) -> (f64, f64) {
    let (s, c) = acc;
    let t = s + x;
    let c = if s.abs() >= x.abs() {
        c + ((s - t) + x)
    } else {
        c + ((x - t) + s)
    };
    (t, c)
}

impl Accumulator {
    fn add(&mut self, z: Complex64) {
        self.re = neumaier(self.re, z.re);
        self.im = neumaier(self.im, z.im);
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        self.add(other.value());
        self
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re.0 + self.re.1, self.im.0 + self.im.1)
    }
}

/// exp(2 pi i k / n) for all k, or computed on demand for large n.
struct Roots {
    n: u64,
    table: Vec<Complex64>,
}

impl Roots {
    fn new(n: u64) -> Roots {
        let table = if n <= ROOT_TABLE_LIMIT {
            (0..n).map(|k| Self::compute(k, n)).collect()
        } else {
            Vec::new()
        };
        Roots { n, table }
    }

    fn compute(k: u64, n: u64) -> Complex64 {
        Complex64::from_polar(1.0, TAU * (k as f64 / n as f64))
    }

    #[inline]
    fn get(&self, k: u64) -> Complex64 {
        if self.table.is_empty() {
            Self::compute(k % self.n, self.n)
        } else {
            self.table[(k % self.n) as usize]
        }
    }
}

/// Sums `term(t)` over t in 0..n in fixed blocks, combined in block order.
fn block_sum<F>(n: u64, term: F) -> (Complex64, u64)
where
    F: Fn(u64) -> Option<Complex64> + Sync + Send,
{
    let block = par::block_size(n as usize, 4096);
    let (acc, count) = par::map_reduce(
        n as usize,
        block,
        (Accumulator::default(), 0u64),
        |r| {
            let mut acc = Accumulator::default();
            let mut count = 0;
            for t in r {
                if let Some(z) = term(t as u64) {
                    acc.add(z);
                    count += 1;
                }
            }
            (acc, count)
        },
        |(a, n), (b, m)| (a.merge(b), n + m),
    );
    (acc.value(), count)
}

fn univariate(poly: &RatPoly, field: &PrimeField) -> Result<FieldPoly, CharSumError> {
    if poly.arity() != 1 {
        return Err(CharSumError::Arity(poly.arity()));
    }
    Ok(FieldPoly::new(poly, field)?)
}

/// |sum_t exp(2 pi i P(t) / p)| against (deg P - 1) p^(1/2).
pub fn additive_char_sum(poly: &RatPoly, field: &PrimeField) -> Result<CharSumResult, CharSumError> {
    let fp = univariate(poly, field)?;
    let p = field.p();
    let deg = match fp.degree_x() {
        None | Some(0) => return Err(CharSumError::ConstantPolynomial),
        Some(d) => d,
    };
    if deg as u64 >= p {
        return Err(CharSumError::DegreeTooLarge { degree: deg, p });
    }
    let roots = Roots::new(p);
    let (sum, terms) = block_sum(p, |t| Some(roots.get(fp.eval1(t, field))));
    Ok(CharSumResult::new(sum, (deg as f64 - 1.0) * (p as f64).sqrt(), terms))
}

/// |sum_{t != 0} (t / p) exp(2 pi i t / p)| against p^(1/2).
pub fn gauss_sum(field: &PrimeField) -> CharSumResult {
    let p = field.p();
    let roots = Roots::new(p);
    let (sum, terms) = block_sum(p, |t| {
        (t != 0).then(|| roots.get(t) * field.legendre(t) as f64)
    });
    CharSumResult::new(sum, (p as f64).sqrt(), terms)
}

/// Additive Fourier coefficient sum_{t in A} exp(2 pi i xi t / p).
pub fn fourier_coefficient(set: &[u64], xi: u64, field: &PrimeField) -> Complex64 {
    let p = field.p();
    let mut acc = Accumulator::default();
    for &t in set {
        acc.add(Roots::compute(field.mul(xi % p, t % p), p));
    }
    acc.value()
}

fn char_index(chi: MultChar, x: u64, field: &PrimeField) -> u64 {
    let l = field.dlog(x).expect("nonzero argument");
    (chi.exponent % chi.order) * (l % chi.order) % chi.order
}

/// |sum_t prod_i psi^{k_i}(P_i(t))| over t with every P_i(t) != 0, for
/// distinct monic irreducible P_i, against (sum deg P_i) p^(1/2).
///
/// Irreducibility is checked by root search up to degree 3; higher-degree
/// factors need `assume_irreducible`.
pub fn mult_char_sum(
    factors: &[(RatPoly, u64)],
    order: u64,
    field: &PrimeField,
    assume_irreducible: bool,
) -> Result<CharSumResult, CharSumError> {
    let base = MultChar { order, exponent: 1 };
    base.check(field)?;
    let mut reduced = Vec::with_capacity(factors.len());
    let mut total_deg = 0usize;
    for (index, (poly, k)) in factors.iter().enumerate() {
        let fp = univariate(poly, field)?;
        let invalid = |reason: &str| CharSumError::InvalidFactor {
            index,
            reason: reason.to_string(),
        };
        let deg = match fp.degree_x() {
            None | Some(0) => return Err(invalid("constant modulo p")),
            Some(d) => d,
        };
        let mp = fp.specialize_y(0, field);
        if mp.coeffs()[deg] != 1 {
            return Err(invalid("not monic modulo p"));
        }
        if reduced.iter().any(|(q, _): &(crate::field::ModPoly, u64)| *q == mp) {
            return Err(invalid("repeated factor"));
        }
        if deg >= 2 && (deg > 3 && !assume_irreducible || deg <= 3 && mp.has_root(field)) {
            return Err(CharSumError::NotIrreducible(index));
        }
        total_deg += deg;
        reduced.push((mp, *k % order));
    }
    let roots = Roots::new(order);
    let (sum, terms) = block_sum(field.p(), |t| {
        let mut e = 0;
        for (mp, k) in &reduced {
            let v = mp.eval(field, t);
            if v == 0 {
                return None;
            }
            e += char_index(MultChar { order, exponent: *k }, v, field);
        }
        Some(roots.get(e))
    });
    if reduced.iter().all(|(_, k)| *k == 0) {
        return Err(CharSumError::TrivialCharacterProduct(sum.norm()));
    }
    Ok(CharSumResult::new(sum, total_deg as f64 * (field.p() as f64).sqrt(), terms))
}

/// |sum_{x in E} psi(g(x)) exp(2 pi i f(x) / p)| against C p^(1/2). Points
/// with g(x) = 0 are skipped unless psi is trivial, which is taken to be 1
/// everywhere.
pub fn twisted_definable_sum(
    set: &[u64],
    f: &RatPoly,
    g: &RatPoly,
    chi: MultChar,
    field: &PrimeField,
    c: f64,
) -> Result<CharSumResult, CharSumError> {
    chi.check(field)?;
    let (ff, gf) = (univariate(f, field)?, univariate(g, field)?);
    let p = field.p();
    let additive = Roots::new(p);
    let mult = Roots::new(chi.order);
    let trivial = chi.is_trivial();
    let (sum, terms) = block_sum(set.len() as u64, |i| {
        let x = set[i as usize] % p;
        let twist = if trivial {
            Complex64::new(1.0, 0.0)
        } else {
            let gx = gf.eval1(x, field);
            if gx == 0 {
                return None;
            }
            mult.get(char_index(chi, gx, field))
        };
        Some(twist * additive.get(ff.eval1(x, field)))
    });
    Ok(CharSumResult::new(sum, c * (p as f64).sqrt(), terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t_pow(k: u32) -> RatPoly {
        RatPoly::from_int_terms(1, &[(&[k], 1)])
    }

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn additive_examples() {
        let r = additive_char_sum(&t_pow(1), &field(31)).unwrap();
        assert!(r.magnitude < 1e-9);
        let r = additive_char_sum(&t_pow(2), &field(13)).unwrap();
        assert!((r.magnitude - 13f64.sqrt()).abs() < 1e-9);
        let r = additive_char_sum(&t_pow(3), &field(101)).unwrap();
        assert!(r.satisfied && r.magnitude <= 2.0 * 101f64.sqrt());
        assert_eq!(r.terms, 101);
    }

    #[test]
    fn additive_errors() {
        let f = field(7);
        assert_eq!(
            additive_char_sum(&RatPoly::constant(1, crate::poly::rat(3)), &f),
            Err(CharSumError::ConstantPolynomial)
        );
        assert_eq!(
            additive_char_sum(&t_pow(7), &f),
            Err(CharSumError::DegreeTooLarge { degree: 7, p: 7 })
        );
    }

    #[test]
    fn gauss_examples() {
        for p in [3u64, 5, 13] {
            let r = gauss_sum(&field(p));
            assert!((r.magnitude - (p as f64).sqrt()).abs() < 1e-9);
            assert!(r.satisfied);
        }
    }

    #[test]
    fn multiplicative_examples() {
        let f = field(13);
        let r = mult_char_sum(&[(t_pow(1), 1)], 2, &f, false).unwrap();
        assert!(r.magnitude < 1e-9);
        assert_eq!(r.terms, 12);
        let t1 = RatPoly::from_int_terms(1, &[(&[1], 1), (&[0], 1)]);
        let r = mult_char_sum(&[(t_pow(1), 1), (t1, 1)], 2, &f, false).unwrap();
        // sum_t (t(t+1)/p) = -1 for the nondegenerate quadratic
        assert!((r.magnitude - 1.0).abs() < 1e-9);
        assert!(r.satisfied);
        assert!(matches!(
            mult_char_sum(&[(t_pow(1), 0)], 2, &f, false),
            Err(CharSumError::TrivialCharacterProduct(_))
        ));
    }

    #[test]
    fn multiplicative_factor_checks() {
        let f = field(13);
        // t^2 - 1 has roots
        let reducible = RatPoly::from_int_terms(1, &[(&[2], 1), (&[0], -1)]);
        assert_eq!(
            mult_char_sum(&[(reducible, 1)], 2, &f, false),
            Err(CharSumError::NotIrreducible(0))
        );
        let quartic = RatPoly::from_int_terms(1, &[(&[4], 1), (&[0], 2)]);
        assert_eq!(
            mult_char_sum(&[(quartic.clone(), 1)], 2, &f, false),
            Err(CharSumError::NotIrreducible(0))
        );
        assert!(mult_char_sum(&[(quartic, 1)], 2, &f, true).is_ok());
        assert!(matches!(
            mult_char_sum(&[(t_pow(1), 1)], 5, &f, false),
            Err(CharSumError::OrderMismatch { .. })
        ));
    }

    #[test]
    fn twisted_examples() {
        let f = field(13);
        let t = t_pow(1);
        let r = twisted_definable_sum(&[], &t, &t, MultChar::LEGENDRE, &f, 8.0).unwrap();
        assert_eq!((r.magnitude, r.terms), (0.0, 0));
        let all: Vec<u64> = (0..13).collect();
        let r = twisted_definable_sum(&all, &t, &t, MultChar::trivial(), &f, 8.0).unwrap();
        assert!(r.magnitude < 1e-9);
    }

    #[test]
    fn parseval_small() {
        let f = field(17);
        let a = [1u64, 4, 5, 9, 16];
        let total: f64 = (0..17).map(|xi| fourier_coefficient(&a, xi, &f).norm_sqr()).sum();
        assert!((total - 17.0 * 5.0).abs() < 1e-9);
    }
}
