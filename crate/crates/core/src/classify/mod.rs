//! Exact classification of P in Q[x, y] as Q(F(x) + G(y)), Q(F(x) G(y)),
//! a composite h(S(x, y)), or none of these.
//!
//! The pipeline: the determinant D(a, b, c, d) built from the partial
//! derivatives vanishes identically exactly for the structured cases. When
//! it does, P_x / P_y separates as f(a) / g(b); f and g with polynomial
//! antiderivatives give the additive case, and f, g that are scaled
//! logarithmic derivatives give the multiplicative one. Every witness is
//! checked by full expansion before it is reported.

mod decompose;
mod det;
mod linalg;
mod residue;

pub use decompose::{decompose_composite, decompose_univariate, decompose_with_inner_degree};
pub use residue::{
    hermite_reduce, residue_profile, residue_profile_with_cap, solve_log_derivative,
    HermiteReduction, ResidueKind, ResidueProfile, DEFAULT_LOG_DERIVATIVE_DEGREE,
};

use num_traits::Zero;
use thiserror::Error;

use crate::field::PrimeField;
use crate::par;
use crate::poly::{rat, reduce_fraction, PolyError, Rat, RatFunc, RatPoly, UniPoly};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("polynomial is zero")]
    ZeroPolynomial,
    #[error("expected a bivariate polynomial, got arity {0}")]
    NotBivariate(usize),
    #[error("no generic probe found in the first {MAX_PROBES} values")]
    ProbeDegenerate,
    #[error("separated ratio fails the cross-multiplied identity")]
    SeparationFailed,
    #[error("fraction is not proper; split off the polynomial part first")]
    ImproperFraction,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Number of probe values tried before giving up.
pub const MAX_PROBES: usize = 64;

/// The fixed probe sequence 1, 2, 3, 5, 7, 11, ...
pub fn probe_values() -> impl Iterator<Item = Rat> {
    std::iter::once(1u64)
        .chain((2u64..).filter(|&n| crate::field::is_prime(n)))
        .map(|n| rat(n as i64))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// P depends on one variable only (0 for x, 1 for y).
    DegenerateOneVariable { variable: usize },
    Additive { q: UniPoly, f: UniPoly, g: UniPoly },
    Multiplicative { q: UniPoly, f: UniPoly, g: UniPoly },
    /// The leading monomial of D in (a, b, c, d) and its coefficient.
    NoStructure { witness: Vec<u32>, coeff: Rat },
    Inconsistent { diagnostics: Vec<String> },
}

impl Verdict {
    pub fn name(&self) -> &'static str {
        match self {
            Verdict::DegenerateOneVariable { .. } => "DegenerateOneVariable",
            Verdict::Additive { .. } => "Additive",
            Verdict::Multiplicative { .. } => "Multiplicative",
            Verdict::NoStructure { .. } => "NoStructure",
            Verdict::Inconsistent { .. } => "Inconsistent",
        }
    }
}

/// Annotation for the special forms Q(a F(x) + b F(y)) and Q(F(x)^a F(y)^b).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    /// G = alpha F + beta.
    AffineImage { alpha: Rat, beta: Rat },
    /// F and G have the same squarefree part.
    SharedRadical { radical: UniPoly },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureReport {
    pub verdict: Verdict,
    /// P = h(S) with deg h >= 2.
    pub composite: Option<(UniPoly, RatPoly)>,
    pub refinement: Option<Refinement>,
    pub verified: bool,
}

fn check_bivariate(p: &RatPoly) -> Result<(), ClassifyError> {
    if p.arity() != 2 {
        return Err(ClassifyError::NotBivariate(p.arity()));
    }
    if p.is_zero() {
        return Err(ClassifyError::ZeroPolynomial);
    }
    if p.is_constant() {
        return Err(ClassifyError::ConstantPolynomial);
    }
    Ok(())
}

/// D(a,b,c,d) = P1(a,c) P2(a,d) P2(b,c) P1(b,d) - P2(a,c) P1(a,d) P1(b,c) P2(b,d)
/// with P1, P2 the partial derivatives in x and y.
pub fn determinant_criterion(p: &RatPoly) -> Result<RatPoly, ClassifyError> {
    check_bivariate(p)?;
    Ok(det::dense_determinant(p).unwrap_or_else(|| sparse_determinant(p)))
}

fn sparse_determinant(p: &RatPoly) -> RatPoly {
    let v: Vec<RatPoly> = (0..4).map(|i| RatPoly::var(4, i)).collect();
    let p1 = p.partial_derivative(0);
    let p2 = p.partial_derivative(1);
    let at = |q: &RatPoly, s: usize, t: usize| q.compose(&[v[s].clone(), v[t].clone()]);
    let (a, b, c, d) = (0, 1, 2, 3);
    let lhs = &(&at(&p1, a, c) * &at(&p2, a, d)) * &(&at(&p2, b, c) * &at(&p1, b, d));
    let rhs = &(&at(&p2, a, c) * &at(&p1, a, d)) * &(&at(&p1, b, c) * &at(&p2, b, d));
    &lhs - &rhs
}

fn univariate_fraction(num: &UniPoly, den: &UniPoly) -> Result<RatFunc, ClassifyError> {
    Ok(reduce_fraction(&num.to_ratpoly(), &den.to_ratpoly())?)
}

/// Splits P_x / P_y = f(a) / g(b) and checks P_x g - P_y f = 0 exactly.
pub fn separate_ratio(p: &RatPoly) -> Result<(RatFunc, RatFunc), ClassifyError> {
    check_bivariate(p)?;
    let p1 = p.partial_derivative(0);
    let p2 = p.partial_derivative(1);
    if p1.is_zero() || p2.is_zero() {
        return Err(ClassifyError::SeparationFailed);
    }
    let b0 = probe_values()
        .take(MAX_PROBES)
        .find(|b| !p1.slice(0, b).is_zero() && !p2.slice(0, b).is_zero())
        .ok_or(ClassifyError::ProbeDegenerate)?;
    let f = univariate_fraction(&p1.slice(0, &b0), &p2.slice(0, &b0))?;
    let (f_num, f_den) = f.as_univariate()?;
    let mut g = None;
    for a0 in probe_values().take(MAX_PROBES) {
        let (n1, n2) = (p1.slice(1, &a0), p2.slice(1, &a0));
        let (fn0, fd0) = (f_num.eval(&a0), f_den.eval(&a0));
        if n1.is_zero() || n2.is_zero() || fn0.is_zero() || fd0.is_zero() {
            continue;
        }
        g = Some(univariate_fraction(&n2.scale(&(fn0 / fd0)), &n1)?);
        break;
    }
    let g = g.ok_or(ClassifyError::ProbeDegenerate)?;
    let (g_num, g_den) = g.as_univariate()?;
    let lift = |u: &UniPoly, var| RatPoly::from_univariate(u, 2, var);
    let lhs = &(&p1 * &lift(&g_num, 1)) * &lift(&f_den, 0);
    let rhs = &(&p2 * &lift(&f_num, 0)) * &lift(&g_den, 1);
    if lhs != rhs {
        return Err(ClassifyError::SeparationFailed);
    }
    Ok((f, g))
}

/// Finds univariate Q with Q(h) = P, or `None` when no such Q exists.
pub fn recover_outer(p: &RatPoly, h: &RatPoly) -> Result<Option<UniPoly>, ClassifyError> {
    check_bivariate(h)?;
    let (dp, dh) = (p.total_degree().unwrap_or(0), h.total_degree().unwrap_or(0));
    let m = (dp / dh) as usize;
    if p.is_constant() {
        return Ok(Some(UniPoly::constant(p.constant_term())));
    }
    if m == 0 {
        return Ok(None);
    }
    let var = if h.depends_on(0) { 0 } else { 1 };
    for y0 in probe_values().take(MAX_PROBES) {
        let hs = h.slice(var, &y0);
        let ps = p.slice(var, &y0);
        let mut points: Vec<(Rat, Rat)> = Vec::with_capacity(m + 1);
        for xi in probe_values().take(16 * m) {
            let t = hs.eval(&xi);
            if points.iter().all(|(s, _)| *s != t) {
                points.push((t, ps.eval(&xi)));
                if points.len() == m + 1 {
                    break;
                }
            }
        }
        if points.len() < m + 1 {
            continue;
        }
        let q = UniPoly::interpolate(&points)?;
        let ok = q.to_ratpoly().compose(&[h.clone()]) == *p;
        return Ok(ok.then_some(q));
    }
    Err(ClassifyError::ProbeDegenerate)
}

/// Maps each coefficient into GF(p) and lifts it to the centered integer
/// range (-p/2, p/2]. A heuristic bridge for inputs given modulo p.
pub fn lift_from_field(p: &RatPoly, field: &PrimeField) -> Result<RatPoly, ClassifyError> {
    let mut terms = Vec::with_capacity(p.num_terms());
    for (m, c) in p.terms() {
        let r = field.reduce_rational(c).map_err(PolyError::from)?;
        terms.push((m.exps().to_vec(), rat(field.lift_centered(r))));
    }
    Ok(RatPoly::from_terms(p.arity(), terms))
}

fn additive_refinement(f: &UniPoly, g: &UniPoly) -> Option<Refinement> {
    if f.deg() != g.deg() {
        return None;
    }
    let alpha = g.lc()? / f.lc()?;
    let rest = g - &f.scale(&alpha);
    rest.is_constant().then(|| Refinement::AffineImage {
        alpha,
        beta: rest.coeff(0),
    })
}

fn multiplicative_refinement(f: &UniPoly, g: &UniPoly) -> Option<Refinement> {
    let rf = f.squarefree_part().ok()?;
    let rg = g.squarefree_part().ok()?;
    (rf == rg).then_some(Refinement::SharedRadical { radical: rf })
}

fn additive_path(p: &RatPoly, f: &RatFunc, g: &RatFunc) -> Result<Option<Verdict>, ClassifyError> {
    let (fnum, fden) = f.as_univariate()?;
    let (gnum, gden) = g.as_univariate()?;
    let ff = fnum.scale(&fden.coeff(0).recip()).integral();
    let gg = gnum.scale(&gden.coeff(0).recip()).integral();
    let h = &RatPoly::from_univariate(&ff, 2, 0) + &RatPoly::from_univariate(&gg, 2, 1);
    Ok(recover_outer(p, &h)?.map(|q| Verdict::Additive { q, f: ff, g: gg }))
}

/// Candidate (F, G) pairs with equal scale, lowest deg F then deg G first.
fn multiplicative_candidates(f: &RatFunc, g: &RatFunc, cap: usize) -> Result<Vec<(UniPoly, UniPoly)>, ClassifyError> {
    let (fnum, fden) = f.as_univariate()?;
    let (gnum, gden) = g.as_univariate()?;
    let fs = residue::log_derivative_solutions(&fnum, &fden, cap);
    let gs = residue::log_derivative_solutions(&gnum, &gden, cap);
    let mut pairs = Vec::new();
    for (ff, lf) in &fs {
        for (gg, lg) in &gs {
            if lf == lg {
                pairs.push((ff.clone(), gg.clone()));
            }
        }
    }
    pairs.sort_by_key(|(a, b)| (a.deg(), b.deg()));
    Ok(pairs)
}

fn multiplicative_path(p: &RatPoly, f: &RatFunc, g: &RatFunc) -> Result<Option<Verdict>, ClassifyError> {
    let cap = p.degree_in(0).max(p.degree_in(1)) as usize;
    let pairs = multiplicative_candidates(f, g, cap)?;
    let found = par::map_blocks(pairs.len(), 1, |r| {
        let (ff, gg) = &pairs[r.start];
        let h = &RatPoly::from_univariate(ff, 2, 0) * &RatPoly::from_univariate(gg, 2, 1);
        recover_outer(p, &h).map(|q| q.map(|q| (ff.clone(), gg.clone(), q)))
    });
    for res in found {
        if let Some((ff, gg, q)) = res? {
            return Ok(Some(Verdict::Multiplicative { q, f: ff, g: gg }));
        }
    }
    Ok(None)
}

fn structured_verdict(p: &RatPoly) -> Verdict {
    let mut diagnostics = Vec::new();
    let (f, g) = match separate_ratio(p) {
        Ok(fg) => fg,
        Err(e) => {
            diagnostics.push(format!("separate_ratio: {e}"));
            return Verdict::Inconsistent { diagnostics };
        }
    };
    let attempt = if f.is_polynomial() && g.is_polynomial() {
        additive_path(p, &f, &g)
    } else {
        multiplicative_path(p, &f, &g)
    };
    match attempt {
        Ok(Some(v)) => return v,
        Ok(None) => diagnostics.push(format!(
            "no witness recovered for f = {f}, g = {g}"
        )),
        Err(e) => diagnostics.push(e.to_string()),
    }
    Verdict::Inconsistent { diagnostics }
}

fn reconstructs(p: &RatPoly, verdict: &Verdict) -> bool {
    let lift = |u: &UniPoly, var| RatPoly::from_univariate(u, 2, var);
    match verdict {
        Verdict::Additive { q, f, g } => {
            q.to_ratpoly().compose(&[&lift(f, 0) + &lift(g, 1)]) == *p
        }
        Verdict::Multiplicative { q, f, g } => {
            q.to_ratpoly().compose(&[&lift(f, 0) * &lift(g, 1)]) == *p
        }
        Verdict::DegenerateOneVariable { variable } => !p.depends_on(1 - variable),
        Verdict::NoStructure { coeff, .. } => !coeff.is_zero(),
        Verdict::Inconsistent { .. } => false,
    }
}

/// Runs the full pipeline on a nonconstant bivariate polynomial.
pub fn classify(p: &RatPoly) -> Result<StructureReport, ClassifyError> {
    check_bivariate(p)?;
    let verdict = if !p.depends_on(0) {
        Verdict::DegenerateOneVariable { variable: 1 }
    } else if !p.depends_on(1) {
        Verdict::DegenerateOneVariable { variable: 0 }
    } else {
        let d = determinant_criterion(p)?;
        match d.leading_term() {
            Some((m, c)) => Verdict::NoStructure {
                witness: m.exps().to_vec(),
                coeff: c.clone(),
            },
            None => structured_verdict(p),
        }
    };
    let refinement = match &verdict {
        Verdict::Additive { f, g, .. } => additive_refinement(f, g),
        Verdict::Multiplicative { f, g, .. } => multiplicative_refinement(f, g),
        _ => None,
    };
    let composite = decompose_composite(p).ok().flatten();
    let verified = reconstructs(p, &verdict)
        && composite
            .as_ref()
            .is_none_or(|(h, s)| h.deg() >= 2 && h.to_ratpoly().compose(&[s.clone()]) == *p);
    Ok(StructureReport {
        verdict,
        composite,
        refinement,
        verified,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn xy() -> (RatPoly, RatPoly) {
        (RatPoly::var(2, 0), RatPoly::var(2, 1))
    }

    fn u(c: &[i64]) -> UniPoly {
        UniPoly::from_ints(c)
    }

    #[test]
    fn probe_sequence() {
        let got: Vec<Rat> = probe_values().take(6).collect();
        assert_eq!(got, [1, 2, 3, 5, 7, 11].map(rat).to_vec());
    }

    #[test]
    fn determinant_examples() {
        let (x, y) = xy();
        assert!(determinant_criterion(&(&x + &y)).unwrap().is_zero());
        assert!(determinant_criterion(&(&x * &y)).unwrap().is_zero());
        assert!(!determinant_criterion(&(&x.pow(2) + &(&x * &y))).unwrap().is_zero());
        assert_eq!(
            determinant_criterion(&RatPoly::constant(2, rat(3))),
            Err(ClassifyError::ConstantPolynomial)
        );
    }

    #[test]
    fn dense_determinant_matches_exact() {
        let cases = [
            RatPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], 1)]),
            RatPoly::from_int_terms(2, &[(&[3, 1], 2), (&[0, 2], -5), (&[1, 0], 7), (&[0, 0], 1)]),
            RatPoly::from_terms(2, [(vec![2, 2], ratio(1, 2)), (vec![1, 3], ratio(-2, 3)), (vec![0, 1], rat(1))]),
            RatPoly::from_int_terms(2, &[(&[4, 0], 1)]),
        ];
        for p in &cases {
            assert_eq!(det::dense_determinant(p).unwrap(), sparse_determinant(p), "{p}");
        }
    }

    #[test]
    fn separation_examples() {
        let (x, y) = xy();
        let (f, g) = separate_ratio(&(&x + &y)).unwrap();
        assert!(f.is_polynomial() && g.is_polynomial());
        assert_eq!(f.as_univariate().unwrap().0, u(&[1]));

        let (f, g) = separate_ratio(&(&x.pow(2) * &y.pow(3))).unwrap();
        let (fr, gr) = (f.as_univariate().unwrap(), g.as_univariate().unwrap());
        // f/g = (2/a)/(3/b) up to a common scalar
        let lhs = &fr.0 * &gr.1;
        assert_eq!(fr.1, UniPoly::x().scale(fr.1.lc().unwrap()));
        assert_eq!(gr.1, UniPoly::x().scale(gr.1.lc().unwrap()));
        let ratio_fg = fr.0.lc().unwrap() / fr.1.lc().unwrap() / (gr.0.lc().unwrap() / gr.1.lc().unwrap());
        assert_eq!(ratio_fg, ratio(2, 3));
        assert!(!lhs.is_zero());

        let (f, g) = separate_ratio(&(&x.pow(2) + &y).pow(2)).unwrap();
        let (fr, gr) = (f.as_univariate().unwrap(), g.as_univariate().unwrap());
        assert!(fr.1.is_constant() && gr.1.is_constant());
        assert_eq!(fr.0.deg(), 1);
        assert_eq!(gr.0.deg(), 0);
    }

    #[test]
    fn recover_outer_examples() {
        let (x, y) = xy();
        let s = &x + &y;
        assert_eq!(recover_outer(&s.pow(2), &s).unwrap(), Some(u(&[0, 0, 1])));
        let xy1 = &x * &y;
        let p = (&xy1 + &RatPoly::one(2)).pow(2);
        assert_eq!(recover_outer(&p, &xy1).unwrap(), Some(u(&[1, 2, 1])));
        assert_eq!(recover_outer(&s, &xy1).unwrap(), None);
    }

    #[test]
    fn classify_examples() {
        let (x, y) = xy();
        let r = classify(&(&x + &y)).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::Additive {
                q: u(&[0, 1]),
                f: u(&[0, 1]),
                g: u(&[0, 1])
            }
        );
        assert!(r.verified);

        let r = classify(&(&x.pow(2) * &y.pow(3))).unwrap();
        assert_eq!(
            r.verdict,
            Verdict::Multiplicative {
                q: u(&[0, 1]),
                f: u(&[0, 0, 1]),
                g: u(&[0, 0, 0, 1])
            }
        );
        assert!(r.verified);

        let r = classify(&(&x.pow(2) + &(&x * &y))).unwrap();
        assert_eq!(r.verdict.name(), "NoStructure");
        assert!(r.verified);
    }

    #[test]
    fn classify_composites_and_degenerate() {
        let (x, y) = xy();
        let one = RatPoly::one(2);
        let r = classify(&(&(&x * &y) + &one).pow(2)).unwrap();
        assert_eq!(r.verdict.name(), "Multiplicative");
        assert_eq!(r.composite.as_ref().unwrap().0, u(&[0, 0, 1]));
        assert!(r.verified);

        let r = classify(&(&x.pow(2) + &y).pow(2)).unwrap();
        assert_eq!(r.verdict.name(), "Additive");
        assert!(r.composite.is_some());

        let r = classify(&(&x.pow(3) + &one)).unwrap();
        assert_eq!(r.verdict, Verdict::DegenerateOneVariable { variable: 0 });
    }

    #[test]
    fn refinements() {
        let (x, y) = xy();
        let r = classify(&(&x.pow(2) + &y.pow(2).scale(&rat(3)))).unwrap();
        assert!(matches!(r.refinement, Some(Refinement::AffineImage { .. })));
        let r = classify(&(&x.pow(2) * &y.pow(3))).unwrap();
        assert_eq!(r.refinement, Some(Refinement::SharedRadical { radical: UniPoly::x() }));
        let r = classify(&(&x.pow(3) + &y.pow(2))).unwrap();
        assert_eq!(r.verdict.name(), "Additive");
        assert_eq!(r.refinement, None);
    }

    #[test]
    fn shifted_multiplicative() {
        let (x, y) = xy();
        let one = RatPoly::one(2);
        // 3 (x + 1)(y^2 + 2) - 5
        let p = &(&(&x + &one) * &(&y.pow(2) + &RatPoly::constant(2, rat(2)))).scale(&rat(3))
            - &RatPoly::constant(2, rat(5));
        let r = classify(&p).unwrap();
        assert_eq!(r.verdict.name(), "Multiplicative");
        assert!(r.verified);
    }

    #[test]
    fn lift_is_centered() {
        let f = PrimeField::new(7).unwrap();
        let p = RatPoly::from_int_terms(2, &[(&[1, 0], 6), (&[0, 1], 4), (&[0, 0], 3)]);
        let l = lift_from_field(&p, &f).unwrap();
        assert_eq!(l, RatPoly::from_int_terms(2, &[(&[1, 0], -1), (&[0, 1], -3), (&[0, 0], 3)]));
    }
}
