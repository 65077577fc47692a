//! Point counts over GF(p) for plane curves and for projections
//! {x : exists t, P(x, t) = 0}, with small-denominator density estimates.

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::par;
use crate::poly::{horner, FieldPoly, PolyError, RatPoly};

pub const CURVE_LIMIT: u64 = 1 << 22;
pub const DEFINABLE_LIMIT: u64 = 1 << 20;
pub const FIBRE_BUDGET: u128 = 100_000_000;
/// Largest denominator tried for the density.
pub const MAX_DENOMINATOR: u64 = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CountError {
    #[error("polynomial is zero modulo p")]
    ZeroPolynomial,
    #[error("polynomial is constant, so the projection is empty or everything")]
    DegenerateInT,
    #[error("p = {p} exceeds the limit {limit} for this count")]
    BudgetExceeded { p: u64, limit: u128 },
    #[error("expected a bivariate polynomial, got arity {0}")]
    Arity(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountReport {
    pub p: u64,
    pub n: u64,
    /// 1 when N > p^(1/2), else 0.
    pub d: u32,
    /// N / p^d.
    pub sigma_estimate: f64,
    /// Small-denominator density as (numerator, denominator).
    pub sigma_rational: (u64, u64),
    /// False when no fraction with denominator <= 24 lies within
    /// p^(-1/2) / 2 of the estimate; the nearest one is reported instead.
    pub resolved: bool,
    /// (N - sigma p^d) / p^(d - 1/2).
    pub residual: f64,
    pub lang_weil_c: f64,
    /// (N - c p^d) / p^(d - 1/2).
    pub lang_weil_residual: f64,
}

/// The fraction a/q, q <= 24, used as the density for `estimate`.
pub fn nearest_small_rational(estimate: f64, tolerance: f64) -> ((u64, u64), bool) {
    if estimate <= 0.0 {
        return ((0, 1), true);
    }
    let mut best = ((1, 1), f64::INFINITY);
    for q in 1..=MAX_DENOMINATOR {
        let a = (estimate * q as f64).round().max(1.0) as u64;
        let err = (a as f64 / q as f64 - estimate).abs();
        if err <= tolerance {
            return ((a, q), true);
        }
        if err < best.1 {
            best = ((a, q), err);
        }
    }
    (best.0, false)
}

/// Builds the report for a raw count of a subset of the line or plane.
pub fn count_report(p: u64, n: u64, lang_weil_c: f64) -> CountReport {
    let pf = p as f64;
    let d = u32::from(n as f64 > pf.sqrt());
    let scale = pf.powi(d as i32);
    let sigma_estimate = n as f64 / scale;
    let (sigma_rational, resolved) = nearest_small_rational(sigma_estimate, 0.5 / pf.sqrt());
    let norm = pf.powf(d as f64 - 0.5);
    let sigma = sigma_rational.0 as f64 / sigma_rational.1 as f64;
    CountReport {
        p,
        n,
        d,
        sigma_estimate,
        sigma_rational,
        resolved,
        residual: (n as f64 - sigma * scale) / norm,
        lang_weil_c,
        lang_weil_residual: (n as f64 - lang_weil_c * scale) / norm,
    }
}

fn bivariate(poly: &RatPoly, field: &PrimeField) -> Result<FieldPoly, CountError> {
    if poly.arity() != 2 {
        return Err(CountError::Arity(poly.arity()));
    }
    Ok(FieldPoly::new(poly, field)?)
}

fn sum_over_x<F>(p: u64, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    par::map_reduce(
        p as usize,
        par::block_size(p as usize, 64),
        0u64,
        |r| r.map(|x| f(x as u64)).sum(),
        |a, b| a + b,
    )
}

/// |{(x, y) : P(x, y) = 0}| by counting the roots of each P(x0, y).
pub fn plane_curve_count(poly: &RatPoly, field: &PrimeField, lang_weil_c: f64) -> Result<CountReport, CountError> {
    let p = field.p();
    if p > CURVE_LIMIT {
        return Err(CountError::BudgetExceeded {
            p,
            limit: CURVE_LIMIT as u128,
        });
    }
    let fp = bivariate(poly, field)?;
    if fp.is_zero() {
        return Err(CountError::ZeroPolynomial);
    }
    let n = sum_over_x(p, |x| fp.specialize_x(x, field).distinct_root_count(field));
    Ok(count_report(p, n, lang_weil_c))
}

/// |{x : exists t, P(x, t) = 0}|, with P in variables (x, t).
pub fn definable_count(poly: &RatPoly, field: &PrimeField) -> Result<CountReport, CountError> {
    let p = field.p();
    if p > DEFINABLE_LIMIT {
        return Err(CountError::BudgetExceeded {
            p,
            limit: DEFINABLE_LIMIT as u128,
        });
    }
    let fp = bivariate(poly, field)?;
    if fp.degree_x().unwrap_or(0) == 0 && fp.degree_y().unwrap_or(0) == 0 {
        return Err(CountError::DegenerateInT);
    }
    let n = sum_over_x(p, |x| u64::from(fp.specialize_x(x, field).has_root(field)));
    Ok(count_report(p, n, 1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FibreHistogram {
    pub p: u64,
    /// `counts[u]` = |{(a, b) : P(a, b) = u}|.
    pub counts: Vec<u64>,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
}

pub fn fibre_histogram(poly: &RatPoly, field: &PrimeField) -> Result<FibreHistogram, CountError> {
    let p = field.p();
    if (p as u128) * (p as u128) > FIBRE_BUDGET {
        return Err(CountError::BudgetExceeded {
            p,
            limit: FIBRE_BUDGET,
        });
    }
    let fp = bivariate(poly, field)?;
    let pu = p as usize;
    let counts = par::map_reduce(
        pu,
        par::block_size(pu, 16),
        vec![0u64; pu],
        |r| {
            let mut local = vec![0u64; pu];
            for x in r {
                let row = fp.row_at(x as u64, field);
                for y in 0..p {
                    local[horner(&row, y, field) as usize] += 1;
                }
            }
            local
        },
        |mut a, b| {
            a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
            a
        },
    );
    Ok(FibreHistogram {
        p,
        min: counts.iter().copied().min().unwrap_or(0),
        max: counts.iter().copied().max().unwrap_or(0),
        mean: counts.iter().sum::<u64>() as f64 / p as f64,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn poly(t: &[(&[u32], i64)]) -> RatPoly {
        RatPoly::from_int_terms(2, t)
    }

    #[test]
    fn curve_examples() {
        let graph = poly(&[(&[0, 1], 1), (&[2, 0], -1)]);
        assert_eq!(plane_curve_count(&graph, &field(101), 1.0).unwrap().n, 101);
        let ell = poly(&[(&[0, 2], 1), (&[3, 0], -1), (&[1, 0], -1)]);
        assert_eq!(plane_curve_count(&ell, &field(5), 1.0).unwrap().n, 3);
        let lines = poly(&[(&[2, 0], 1), (&[0, 2], -1)]);
        let r = plane_curve_count(&lines, &field(7), 1.0).unwrap();
        assert_eq!((r.n, r.sigma_rational, r.resolved), (13, (2, 1), true));
        assert_eq!(
            plane_curve_count(&poly(&[(&[1, 0], 7)]), &field(7), 1.0),
            Err(CountError::ZeroPolynomial)
        );
    }

    #[test]
    fn definable_examples() {
        let f = field(101);
        let qr = poly(&[(&[1, 0], 1), (&[0, 2], -1)]);
        let r = definable_count(&qr, &f).unwrap();
        assert_eq!((r.n, r.sigma_rational), (51, (1, 2)));
        let units = poly(&[(&[1, 1], 1), (&[0, 0], -1)]);
        let r = definable_count(&units, &f).unwrap();
        assert_eq!((r.n, r.sigma_rational), (100, (1, 1)));
        let point = poly(&[(&[1, 0], 1)]);
        let r = definable_count(&point, &f).unwrap();
        assert_eq!((r.n, r.d), (1, 0));
        assert_eq!(
            definable_count(&poly(&[(&[0, 0], 3)]), &f),
            Err(CountError::DegenerateInT)
        );
    }

    #[test]
    fn fibre_examples() {
        let f = field(11);
        let h = fibre_histogram(&poly(&[(&[1, 0], 1), (&[0, 1], 1)]), &f).unwrap();
        assert!(h.counts.iter().all(|&c| c == 11));
        let h = fibre_histogram(&poly(&[(&[1, 1], 1)]), &f).unwrap();
        assert_eq!(h.counts[0], 21);
        assert!(h.counts[1..].iter().all(|&c| c == 10));
        assert_eq!(h.mean, 11.0);
    }

    #[test]
    fn small_rationals() {
        assert_eq!(nearest_small_rational(0.5004, 0.01), ((1, 2), true));
        assert_eq!(nearest_small_rational(0.0, 0.01), ((0, 1), true));
        let (r, ok) = nearest_small_rational(0.123_456, 1e-6);
        assert!(!ok && r.1 <= MAX_DENOMINATOR);
    }
}
