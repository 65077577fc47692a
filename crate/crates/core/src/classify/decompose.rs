//! Functional decomposition: univariate p = outer(inner) in the style of
//! Kozen and Landau, and bivariate P = h(S) with univariate h.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{probe_values, ClassifyError, MAX_PROBES};
use crate::poly::{rat, Rat, RatPoly, UniPoly};

/// All decompositions p = outer(inner) with deg outer >= 2, deg inner >= 2
/// and inner monic without constant term, ordered by increasing inner degree.
pub fn decompose_univariate(p: &UniPoly) -> Vec<(UniPoly, UniPoly)> {
    let n = p.deg();
    if n < 2 {
        return Vec::new();
    }
    (2..n)
        .filter(|r| n % r == 0)
        .filter_map(|r| decompose_with_inner_degree(p, r))
        .collect()
}

/// The unique normalized decomposition with the given inner degree, if any.
pub fn decompose_with_inner_degree(p: &UniPoly, r: usize) -> Option<(UniPoly, UniPoly)> {
    let n = p.deg();
    if r == 0 || n % r != 0 {
        return None;
    }
    let s = n / r;
    let target = p.monic();
    // inner = x^r + b_{r-1} x^{r-1} + ... + b_1 x, fixed from the top
    // coefficients of target = inner^s + (terms of degree <= n - r)
    let mut inner = vec![Rat::zero(); r + 1];
    inner[r] = Rat::one();
    let s_rat = rat(s as i64);
    for k in 1..r {
        let cur = UniPoly::new(inner.clone()).pow(s as u32).coeff(n - k);
        inner[r - k] = (target.coeff(n - k) - cur) / &s_rat;
    }
    let inner = UniPoly::new(inner);
    let outer = inner_adic_expansion(p, &inner, s)?;
    (outer.compose(&inner) == *p).then_some((outer, inner))
}

/// Writes p as sum c_i inner^i with constant c_i, if possible.
fn inner_adic_expansion(p: &UniPoly, inner: &UniPoly, s: usize) -> Option<UniPoly> {
    let mut rest = p.clone();
    let mut coeffs = Vec::with_capacity(s + 1);
    for _ in 0..=s {
        let (q, r) = rest.div_rem(inner);
        if !r.is_constant() {
            return None;
        }
        coeffs.push(r.coeff(0));
        rest = q;
    }
    rest.is_zero().then(|| UniPoly::new(coeffs))
}

/// Exact k-th root of a rational, choosing the positive root for even k.
fn rational_root(v: &Rat, k: u32) -> Option<Rat> {
    if v.is_negative() && k % 2 == 0 {
        return None;
    }
    let int_root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(k);
        (num_traits::pow(r.clone(), k as usize) == n.abs()).then_some(r)
    };
    let num = int_root(v.numer())?;
    let den = int_root(v.denom())?;
    let r = Rat::new(num, den);
    Some(if v.is_negative() { -r } else { r })
}

/// Polynomials c with c^k = u; both signs for even k.
pub(crate) fn poly_roots(u: &UniPoly, k: u32) -> Vec<UniPoly> {
    let Some(n) = u.degree() else {
        return vec![UniPoly::zero()];
    };
    if n % k as usize != 0 {
        return Vec::new();
    }
    let d = n / k as usize;
    let Some(lead) = rational_root(u.lc().unwrap(), k) else {
        return Vec::new();
    };
    let mut c = vec![Rat::zero(); d + 1];
    c[d] = lead.clone();
    let denom = rat(k as i64) * num_traits::pow(lead, k as usize - 1);
    for j in 1..=d {
        let cur = UniPoly::new(c.clone()).pow(k).coeff(n - j);
        c[d - j] = (u.coeff(n - j) - cur) / &denom;
    }
    let c = UniPoly::new(c);
    if c.pow(k) != *u {
        return Vec::new();
    }
    if k % 2 == 0 {
        let neg = -&c;
        vec![c, neg]
    } else {
        vec![c]
    }
}

/// Solves h(S) = P for bivariate S, treating P as a polynomial in `var`
/// over Q[other] and extracting an approximate s-th root from the top
/// coefficients.
pub(crate) fn solve_inner(p: &RatPoly, h: &UniPoly, var: usize) -> Option<RatPoly> {
    let s = h.deg();
    if s < 2 {
        return None;
    }
    let n = p.degree_in(var) as usize;
    if n == 0 || n % s != 0 {
        return None;
    }
    let r = n / s;
    let hs = h.lc().unwrap().clone();
    // S' = S + shift turns h into hs * S'^s + (degree <= s - 2 in S')
    let shift = h.coeff(s - 1) / (rat(s as i64) * &hs);
    let rows: Vec<UniPoly> = p
        .coefficients_in(var)
        .iter()
        .map(|c| c.scale(&hs.recip()))
        .collect();
    let top = rows[n].clone();
    for lead in poly_roots(&top, s as u32) {
        let divisor = lead.pow(s as u32 - 1).scale(&rat(s as i64));
        let mut cs = vec![UniPoly::zero(); r + 1];
        cs[r] = lead;
        let mut ok = true;
        for k in 1..=r {
            let partial = RatPoly::from_coefficients_in(var, &cs);
            let cur = partial.pow(s as u32).coefficients_in(var);
            let cur_k = cur.get(n - k).cloned().unwrap_or_default();
            let residual = &rows[n - k] - &cur_k;
            match residual.exact_div(&divisor) {
                Some(c) => cs[r - k] = c,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            continue;
        }
        let s_shifted = RatPoly::from_coefficients_in(var, &cs);
        let inner = &s_shifted - &RatPoly::constant(2, shift.clone());
        if h.to_ratpoly().compose(&[inner.clone()]) == *p {
            return Some(inner);
        }
    }
    None
}

/// Moves the subleading coefficient of h into S: returns (h(t - c), S + c)
/// with h(t - c) free of t^{s-1}.
fn depress(h: &UniPoly, inner: &RatPoly) -> (UniPoly, RatPoly) {
    let s = h.deg();
    let c = h.coeff(s - 1) / (rat(s as i64) * h.lc().unwrap());
    let shifted = h.compose(&UniPoly::new(vec![-c.clone(), Rat::one()]));
    (shifted, inner + &RatPoly::constant(2, c))
}

/// A decomposition P = h(S) with deg h >= 2 of maximal degree, if one
/// exists. The returned h has no t^{deg h - 1} term.
pub fn decompose_composite(p: &RatPoly) -> Result<Option<(UniPoly, RatPoly)>, ClassifyError> {
    if p.arity() != 2 {
        return Err(ClassifyError::NotBivariate(p.arity()));
    }
    if p.is_constant() {
        return Err(ClassifyError::ConstantPolynomial);
    }
    let var = if p.depends_on(0) { 0 } else { 1 };
    let n = p.degree_in(var) as usize;
    for y0 in probe_values().take(MAX_PROBES) {
        let slice = p.slice(var, &y0);
        if slice.deg() != n {
            continue;
        }
        let mut outers: Vec<UniPoly> = decompose_univariate(&slice)
            .into_iter()
            .map(|(outer, _)| outer)
            .collect();
        if n >= 2 {
            outers.push(slice.clone());
        }
        outers.sort_by_key(|h| std::cmp::Reverse(h.deg()));
        for h in outers {
            if let Some(inner) = solve_inner(p, &h, var) {
                return Ok(Some(depress(&h, &inner)));
            }
        }
        return Ok(None);
    }
    Err(ClassifyError::ProbeDegenerate)
}
