//! Residue analysis of the separated ratio without factoring denominators.
//!
//! Zero residues are detected by Hermite reduction: the proper part of `f`
//! has a rational antiderivative exactly when the reduction leaves no
//! logarithmic remainder. Commensurable residues are detected by solving
//! `F' D = lambda N F` for a polynomial `F`, which is linear in the
//! coefficients of `F` once `lambda` is pinned by leading coefficients.

use num_traits::One;

use super::{linalg, ClassifyError};
use crate::poly::{rat, Rat, RatFunc, RatPoly, UniPoly};

/// Degree cap used by [`residue_profile`] when searching for a polynomial
/// with the right logarithmic derivative.
pub const DEFAULT_LOG_DERIVATIVE_DEGREE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidueKind {
    AllZero,
    /// All residues are positive rational multiples of one scale; carries
    /// the `lambda` of the smallest-degree solution of `F'/F = lambda f`.
    AllRationalCommensurable(Rat),
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueProfile {
    /// Squarefree denominator of the logarithmic part left by Hermite
    /// reduction; constant exactly when every residue vanishes.
    pub poles: UniPoly,
    pub residue_kind: ResidueKind,
    /// Polynomial summand of `f`.
    pub polynomial_part: UniPoly,
}

/// Output of Hermite reduction of a proper fraction A/D:
/// A/D = (rational_num/rational_den)' + log_num/log_den with squarefree
/// `log_den`.
#[derive(Clone, Debug)]
pub struct HermiteReduction {
    pub rational_num: UniPoly,
    pub rational_den: UniPoly,
    pub log_num: UniPoly,
    pub log_den: UniPoly,
}

/// Solves s*a + t*b = c with deg s < deg b, for coprime a and b.
fn diophantine(a: &UniPoly, b: &UniPoly, c: &UniPoly) -> (UniPoly, UniPoly) {
    let (g, s, _) = a.ext_gcd(b);
    debug_assert!(g == UniPoly::one(), "arguments must be coprime");
    let s = (&s * c).rem(b);
    let t = (c - &(&s * a)).exact_div(b).expect("exact by construction");
    (s, t)
}

/// Mack's linear Hermite reduction.
pub fn hermite_reduce(a: &UniPoly, d: &UniPoly) -> HermiteReduction {
    let mut a = a.clone();
    let mut g_num = UniPoly::zero();
    let mut g_den = UniPoly::one();
    let mut d_minus = d.gcd(&d.derivative());
    let d_star = d.exact_div(&d_minus).expect("gcd divides");
    while d_minus.deg() > 0 {
        let d_minus2 = d_minus.gcd(&d_minus.derivative());
        let d_minus_star = d_minus.exact_div(&d_minus2).expect("gcd divides");
        let lhs = (-&(&d_star * &d_minus.derivative()))
            .exact_div(&d_minus)
            .expect("D^- divides D* D^-'");
        let (b, c) = diophantine(&lhs, &d_minus_star, &a);
        a = &c - &(&b.derivative() * &d_star)
            .exact_div(&d_minus_star)
            .expect("D^-* divides B' D*");
        // g += b / d_minus
        g_num = &(&g_num * &d_minus) + &(&b * &g_den);
        g_den = &g_den * &d_minus;
        d_minus = d_minus2;
    }
    let common = g_num.gcd(&g_den);
    if !g_num.is_zero() && common.deg() > 0 {
        g_num = g_num.exact_div(&common).unwrap();
        g_den = g_den.exact_div(&common).unwrap();
    }
    HermiteReduction {
        rational_num: g_num,
        rational_den: g_den,
        log_num: a,
        log_den: d_star,
    }
}

/// Monic polynomial solutions F, 1 <= deg F <= max_deg, of F' D = lambda N F
/// for f = N/D, with lambda = m lc(D) / lc(N) for each candidate degree m.
pub fn solve_log_derivative(f: &RatFunc, max_deg: usize) -> Result<Vec<(RatPoly, Rat)>, ClassifyError> {
    let (n, d) = f.as_univariate()?;
    if n.is_zero() {
        return Ok(Vec::new());
    }
    if n.deg() >= d.deg() {
        return Err(ClassifyError::ImproperFraction);
    }
    Ok(log_derivative_solutions(&n, &d, max_deg)
        .into_iter()
        .map(|(p, l)| (p.to_ratpoly(), l))
        .collect())
}

pub(crate) fn log_derivative_solutions(n: &UniPoly, d: &UniPoly, max_deg: usize) -> Vec<(UniPoly, Rat)> {
    let mut out = Vec::new();
    if n.is_zero() || n.deg() + 1 != d.deg() {
        return out;
    }
    let lc_n = n.lc().unwrap().clone();
    let lc_d = d.lc().unwrap().clone();
    for m in 1..=max_deg {
        let lambda = rat(m as i64) * &lc_d / &lc_n;
        let ln = n.scale(&lambda);
        // E_i = (a^i)' D - lambda N a^i
        let basis = |i: usize| -> UniPoly {
            let xi = UniPoly::monomial(i, Rat::one());
            &(&xi.derivative() * d) - &(&ln * &xi)
        };
        let rows = m - 1 + d.deg() + 1;
        let cols: Vec<UniPoly> = (0..m).map(basis).collect();
        let e0 = basis(m);
        let matrix: Vec<Vec<Rat>> = (0..rows)
            .map(|r| cols.iter().map(|c| c.coeff(r)).collect())
            .collect();
        let rhs: Vec<Rat> = (0..rows).map(|r| -e0.coeff(r)).collect();
        let Some(sol) = linalg::solve(matrix, rhs) else {
            continue;
        };
        let mut coeffs = sol;
        coeffs.push(Rat::one());
        let cand = UniPoly::new(coeffs);
        let check = &(&cand.derivative() * d) - &(&ln * &cand);
        if check.is_zero() {
            out.push((cand, lambda));
        }
    }
    out
}

pub fn residue_profile(f: &RatFunc) -> Result<ResidueProfile, ClassifyError> {
    residue_profile_with_cap(f, DEFAULT_LOG_DERIVATIVE_DEGREE)
}

pub fn residue_profile_with_cap(f: &RatFunc, max_deg: usize) -> Result<ResidueProfile, ClassifyError> {
    let (n, d) = f.as_univariate()?;
    let (q, r) = n.div_rem(&d);
    if d.is_constant() || r.is_zero() {
        return Ok(ResidueProfile {
            poles: UniPoly::one(),
            residue_kind: ResidueKind::AllZero,
            polynomial_part: q,
        });
    }
    let h = hermite_reduce(&r, &d);
    let log_rem = h.log_num.rem(&h.log_den);
    if log_rem.is_zero() {
        return Ok(ResidueProfile {
            poles: UniPoly::one(),
            residue_kind: ResidueKind::AllZero,
            polynomial_part: q,
        });
    }
    let g = log_rem.gcd(&h.log_den);
    let poles = h.log_den.exact_div(&g).expect("gcd divides").monic();
    let kind = if q.is_zero() {
        match log_derivative_solutions(&r, &d, max_deg).into_iter().next() {
            Some((_, lambda)) => ResidueKind::AllRationalCommensurable(lambda),
            None => ResidueKind::Other,
        }
    } else {
        ResidueKind::Other
    };
    Ok(ResidueProfile {
        poles,
        residue_kind: kind,
        polynomial_part: q,
    })
}
