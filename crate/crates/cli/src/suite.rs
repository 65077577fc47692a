//! The acceptance battery. Each criterion returns its individual checks and
//! the data behind them; nothing time-dependent goes into a report.

use expanderlab::charsum;
use expanderlab::classify::{self, determinant_criterion};
use expanderlab::count;
use expanderlab::expansion::{self, CountMode, SubsetSpec};
use expanderlab::field::{is_prime, PrimeField};
use expanderlab::poly::{rat, Rat, RatPoly, UniPoly};
use expanderlab::regularity::{self, DefinableGraph, GraphKind};
use expanderlab::Verdict;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{classify_json, CliError};

pub const CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Values recorded from the brute-force oracles in the test suite.
pub mod frozen {
    /// |{a^2 + a b : a, b in A}| for A = random:957:3 over GF(1009).
    pub const SHKREDOV_RANDOM_IMAGE_1009: u64 = 1009;
    /// Distinct quadruples of x^2 + x y over GF(31).
    pub const SHKREDOV_QUADRUPLES_31: u64 = 408_301;
    /// |{(a, b) in A x B : a^2 + a b in C}| over GF(101), A, B, C = random:50:91, :92, :93.
    pub const INCIDENCE_101: u64 = 1222;
}

pub const INCIDENCE_SEEDS: [u64; 3] = [91, 92, 93];
pub const RANDOM_IMAGE_SPEC: SubsetSpec = SubsetSpec::Random { size: 957, seed: 3 };

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl CriterionOutcome {
    fn new(id: u8, title: &'static str, checks: Vec<Check>) -> Self {
        CriterionOutcome {
            id,
            title,
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("criterion {:>2} {verdict}  {}", self.id, self.title);
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("\n    failed: {} {}", c.name, c.detail));
        }
        s
    }
}

fn check(name: impl Into<String>, passed: bool, detail: Value) -> Check {
    Check {
        name: name.into(),
        passed,
        detail,
    }
}

pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionOutcome, CliError> {
    match id {
        1 => classifier_trichotomy(seed),
        2 => determinant_identity(seed),
        3 => paley_regularity(),
        4 => qr_product_partition(),
        5 => character_sums(seed),
        6 => point_counts(seed),
        7 => expansion_dichotomy(),
        8 => quadruple_statistics(),
        9 => incidence_bound(),
        _ => Err(CliError::Validation(format!("no criterion {id}"))),
    }
}

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).expect("battery primes are prime")
}

fn xy(terms: &[(&[u32], i64)]) -> RatPoly {
    RatPoly::from_int_terms(2, terms)
}

const XY: [&str; 2] = ["x", "y"];

/// Structure class a generated polynomial was built with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Built {
    Additive,
    Multiplicative,
}

fn random_uni(rng: &mut ChaCha8Rng, min_deg: usize, max_deg: usize, bound: i64) -> UniPoly {
    let deg = rng.gen_range(min_deg..=max_deg);
    let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-bound..=bound)).collect();
    while c[deg] == 0 {
        c[deg] = rng.gen_range(-bound..=bound);
    }
    UniPoly::from_ints(&c)
}

/// Q(F(x) + G(y)) and Q(F(x) G(y)) for `n` random triples of degree <= 3.
pub fn structured_corpus(seed: u64, n: usize) -> Vec<(RatPoly, Built)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut add = Vec::with_capacity(n);
    let mut mul = Vec::with_capacity(n);
    for _ in 0..n {
        let q = random_uni(&mut rng, 1, 3, 3).to_ratpoly();
        let f = RatPoly::from_univariate(&random_uni(&mut rng, 1, 3, 3), 2, 0);
        let g = RatPoly::from_univariate(&random_uni(&mut rng, 1, 3, 3), 2, 1);
        add.push((q.compose(&[&f + &g]), Built::Additive));
        mul.push((q.compose(&[&f * &g]), Built::Multiplicative));
    }
    add.extend(mul);
    add
}

/// Degree-4 polynomials with every monomial of total degree <= 4 present.
pub fn dense_quartics(seed: u64, n: usize) -> Vec<RatPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let mut terms = Vec::new();
            for total in 0..=4u32 {
                for i in 0..=total {
                    let mut c = 0;
                    while c == 0 {
                        c = rng.gen_range(-5i64..=5);
                    }
                    terms.push((vec![i, total - i], rat(c)));
                }
            }
            RatPoly::from_terms(2, terms)
        })
        .collect()
}

/// D(a, b, c, d) evaluated pointwise from the partial derivatives.
pub fn determinant_at(poly: &RatPoly, pt: [i64; 4]) -> Rat {
    let p1 = poly.partial_derivative(0);
    let p2 = poly.partial_derivative(1);
    let e = |q: &RatPoly, s: i64, t: i64| q.evaluate(&[rat(s), rat(t)]).expect("arity 2");
    let [a, b, c, d] = pt;
    e(&p1, a, c) * e(&p2, a, d) * e(&p2, b, c) * e(&p1, b, d) - e(&p2, a, c) * e(&p1, a, d) * e(&p1, b, c) * e(&p2, b, d)
}

fn random_points(rng: &mut ChaCha8Rng, n: usize) -> Vec<[i64; 4]> {
    (0..n)
        .map(|_| std::array::from_fn(|_| rng.gen_range(-10i64..=10)))
        .collect()
}

/// The fixed classifier corpus: source, expected verdict, composite expected.
pub const FIXED_CORPUS: [(&str, &str, bool); 8] = [
    ("x + y", "Additive", false),
    ("x*y", "Multiplicative", false),
    ("x^2*y^3", "Multiplicative", false),
    ("(x^2 + y)^2", "Additive", true),
    ("(x*y + 1)^2", "Multiplicative", true),
    ("x^3 + y^2", "Additive", false),
    ("x^2 + x*y", "NoStructure", false),
    ("x*(x + y) + 1", "NoStructure", false),
];

fn classifier_trichotomy(seed: u64) -> Result<CriterionOutcome, CliError> {
    let mut checks = Vec::new();
    for (src, want, composite) in FIXED_CORPUS {
        let poly = crate::parse::parse_poly(src, &XY).map_err(|e| CliError::Validation(e.to_string()))?;
        let report = classify::classify(&poly)?;
        let structured = want != "NoStructure";
        let ok = report.verdict.name() == want
            && report.composite.is_some() == composite
            && (!structured || report.verified);
        checks.push(check(src, ok, classify_json(&report, &poly, &XY)));
    }
    let corpus = structured_corpus(seed, 50);
    let mut failures = Vec::new();
    let mut counts = [0u64; 2];
    for (i, (poly, built)) in corpus.iter().enumerate() {
        let report = classify::classify(poly)?;
        let kind_ok = matches!(
            (&report.verdict, built),
            (Verdict::Additive { .. }, Built::Additive) | (Verdict::Multiplicative { .. }, Built::Multiplicative)
        );
        if kind_ok && report.verified {
            counts[(*built == Built::Multiplicative) as usize] += 1;
        } else {
            failures.push(json!({"index": i, "poly": poly.to_string(), "verdict": report.verdict.name(), "verified": report.verified}));
        }
    }
    checks.push(check(
        "random structured corpus verified",
        failures.is_empty(),
        json!({"additive": counts[0], "multiplicative": counts[1], "failures": failures}),
    ));
    Ok(CriterionOutcome::new(1, "classifier trichotomy", checks))
}

fn determinant_identity(seed: u64) -> Result<CriterionOutcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xd);
    let corpus = structured_corpus(seed, 50);
    let mut nonvanishing = Vec::new();
    for (i, (poly, _)) in corpus.iter().enumerate() {
        if !determinant_criterion(poly)?.is_zero() {
            nonvanishing.push(i);
        }
    }
    let mut checks = vec![check(
        "D identically zero on structured corpus",
        nonvanishing.is_empty(),
        json!({"count": corpus.len(), "nonzero": nonvanishing}),
    )];
    let mut targets = vec![("x^2 + x*y".to_string(), xy(&[(&[2, 0], 1), (&[1, 1], 1)]))];
    targets.extend(dense_quartics(seed ^ 0x4, 20).into_iter().map(|p| (p.to_string(), p)));
    let mut rows = Vec::new();
    let mut all = true;
    for (name, poly) in &targets {
        let d = determinant_criterion(poly)?;
        let pts = random_points(&mut rng, 20);
        let hits = pts.iter().filter(|&&pt| !determinant_at(poly, pt).is_zero()).count();
        let ok = !d.is_zero() && hits > 0;
        all &= ok;
        rows.push(json!({"poly": name, "terms": d.num_terms(), "nonzero_evaluations": hits}));
    }
    checks.push(check("D nonzero on expander and dense quartics", all, json!(rows)));
    Ok(CriterionOutcome::new(2, "determinant criterion", checks))
}

fn paley_regularity() -> Result<CriterionOutcome, CliError> {
    let mut checks = Vec::new();
    for p in [13u64, 17, 29, 101, 401] {
        let f = field(p);
        let graph = DefinableGraph::new(GraphKind::QrDifference, &f)?;
        let cert = regularity::spectral_discrepancy(&graph, &regularity::trivial_partition(&f))?;
        let pair = &cert.pairs[0];
        let want = (1.0 + (p as f64).sqrt()) / 2.0;
        let e = pair.exponent.unwrap_or(f64::INFINITY);
        checks.push(check(
            format!("sigma p={p}"),
            (pair.sigma - want).abs() <= 1e-4 && e <= -0.45,
            json!({"sigma": pair.sigma, "expected": want, "exponent": e, "d": pair.d}),
        ));
        if p <= 29 {
            let stats = regularity::codegree_stats(&graph, 1.0)?;
            let values: Vec<u64> = stats.histogram.keys().copied().collect();
            checks.push(check(
                format!("codegrees p={p}"),
                values == vec![(p - 5) / 4, (p - 1) / 4],
                json!({"values": values, "histogram": stats.histogram}),
            ));
        }
    }
    Ok(CriterionOutcome::new(3, "Paley regularity", checks))
}

fn qr_product_partition() -> Result<CriterionOutcome, CliError> {
    let mut checks = Vec::new();
    for p in [13u64, 101] {
        let f = field(p);
        let graph = DefinableGraph::new(GraphKind::QrProduct, &f)?;
        let cert = regularity::spectral_discrepancy(&graph, &regularity::qr_partition(&f))?;
        let densities: Vec<f64> = cert.pairs.iter().map(|c| c.d).collect();
        let ok = densities.iter().all(|&d| d == 0.0 || d == 1.0)
            && cert.pairs.iter().all(|c| {
                let (a, b) = (&cert.cell_members[c.i], &cert.cell_members[c.j]);
                let e = regularity::edge_count(&graph, a, b);
                e == 0 || e == (a.len() * b.len()) as u64
            });
        checks.push(check(format!("densities p={p}"), ok, json!({"cells": cert.cells, "densities": densities})));
    }
    Ok(CriterionOutcome::new(4, "QR-product partition", checks))
}

fn character_sums(seed: u64) -> Result<CriterionOutcome, CliError> {
    let mut checks = Vec::new();
    let mut worst: (u64, f64) = (0, 0.0);
    let mut count = 0;
    for p in (3..=997u64).filter(|&n| is_prime(n)) {
        let r = charsum::gauss_sum(&field(p));
        let err = (r.magnitude - (p as f64).sqrt()).abs();
        if err >= worst.1 {
            worst = (p, err);
        }
        count += 1;
    }
    checks.push(check(
        "Gauss sums have modulus sqrt(p)",
        worst.1 <= 1e-6,
        json!({"primes": count, "worst_p": worst.0, "worst_error": worst.1}),
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5);
    for p in [101u64, 199] {
        let f = field(p);
        let mut failures = Vec::new();
        let mut max_ratio: f64 = 0.0;
        for _ in 0..50 {
            let deg = rng.gen_range(1..=5usize);
            let mut c: Vec<i64> = (0..=deg).map(|_| rng.gen_range(-50i64..=50)).collect();
            c[deg] = rng.gen_range(1..=50);
            let poly = UniPoly::from_ints(&c).to_ratpoly();
            let r = charsum::additive_char_sum(&poly, &f)?;
            if r.bound > 0.0 {
                max_ratio = max_ratio.max(r.magnitude / r.bound);
            }
            if !r.satisfied {
                failures.push(json!({"poly": poly.to_string_with(&["t"]), "magnitude": r.magnitude, "bound": r.bound}));
            }
        }
        checks.push(check(
            format!("Weil additive p={p}"),
            failures.is_empty(),
            json!({"polynomials": 50, "max_ratio": max_ratio, "failures": failures}),
        ));
        let t = RatPoly::var(1, 0);
        let mut worst_add: f64 = 0.0;
        for a in 1..p {
            let r = charsum::additive_char_sum(&t.scale(&rat(a as i64)), &f)?;
            worst_add = worst_add.max(r.magnitude);
        }
        let mut worst_mult: f64 = 0.0;
        for j in 1..p - 1 {
            let r = charsum::mult_char_sum(&[(t.clone(), j)], p - 1, &f, false)?;
            worst_mult = worst_mult.max(r.magnitude);
        }
        checks.push(check(
            format!("full-line sums vanish p={p}"),
            worst_add <= 1e-9 && worst_mult <= 1e-9,
            json!({"additive_max": worst_add, "multiplicative_max": worst_mult}),
        ));
    }
    Ok(CriterionOutcome::new(5, "character sums", checks))
}

fn point_counts(seed: u64) -> Result<CriterionOutcome, CliError> {
    let mut checks = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6);
    for p in [5u64, 13, 101, 199] {
        let f = field(p);
        let mut rows = Vec::new();
        let mut ok = true;
        let mut seen = Vec::new();
        while rows.len() < 10 {
            let (a, b) = (rng.gen_range(0..p), rng.gen_range(0..p));
            let disc = f.add(f.mul(4, f.pow(a, 3)), f.mul(27, f.mul(b, b)));
            if disc == 0 || seen.contains(&(a, b)) {
                continue;
            }
            seen.push((a, b));
            let curve = xy(&[(&[0, 2], 1), (&[3, 0], -1), (&[1, 0], -(a as i64)), (&[0, 0], -(b as i64))]);
            let n = count::plane_curve_count(&curve, &f, 1.0)?.n;
            let dev = (n as f64 - p as f64).abs();
            ok &= dev <= 2.0 * (p as f64).sqrt();
            rows.push(json!({"a": a, "b": b, "n": n}));
        }
        checks.push(check(format!("Hasse p={p}"), ok, json!(rows)));
        let squares = xy(&[(&[1, 0], 1), (&[0, 2], -1)]);
        let r = count::definable_count(&squares, &f)?;
        checks.push(check(
            format!("squares p={p}"),
            r.n == (p + 1) / 2 && r.sigma_rational == (1, 2) && r.resolved,
            json!({"n": r.n, "sigma": format!("{}/{}", r.sigma_rational.0, r.sigma_rational.1)}),
        ));
    }
    Ok(CriterionOutcome::new(6, "Hasse and definable counts", checks))
}

fn image_size(poly: &RatPoly, spec: &SubsetSpec, f: &PrimeField) -> Result<(u64, u64), CliError> {
    let a = expansion::materialize(spec, f)?;
    let image = expansion::image_set(poly, &a, &a, f)?;
    Ok((a.len() as u64, image.len() as u64))
}

fn expansion_dichotomy() -> Result<CriterionOutcome, CliError> {
    let p = 1009u64;
    let f = field(p);
    let mut checks = Vec::new();
    let sum = xy(&[(&[1, 0], 1), (&[0, 1], 1)]);
    let (n, image) = image_size(&sum, &SubsetSpec::Ap { start: 0, step: 1, len: 957 }, &f)?;
    checks.push(check(
        "AP sumset equals 1913 below p",
        image == 1913 && 1913 < p,
        json!({"size": n, "image": image, "p": p}),
    ));
    let ratio = image as f64 / n as f64;
    checks.push(check("AP doubling below 2.01", ratio < 2.01, json!({"ratio": ratio})));
    let shkredov = xy(&[(&[2, 0], 1), (&[1, 1], 1)]);
    let (n, image) = image_size(&shkredov, &RANDOM_IMAGE_SPEC, &f)?;
    checks.push(check(
        "random image matches oracle",
        image == frozen::SHKREDOV_RANDOM_IMAGE_1009 && image as f64 >= p as f64 / 4.0,
        json!({"size": n, "image": image, "frozen": frozen::SHKREDOV_RANDOM_IMAGE_1009}),
    ));
    let g = f.generator();
    let len = 400u64;
    let product = xy(&[(&[1, 1], 1)]);
    let (n, image) = image_size(&product, &SubsetSpec::Gp { start: 1, ratio: g as i64, len }, &f)?;
    checks.push(check(
        "GP product set is 2 len - 1",
        n == len && image == 2 * len - 1,
        json!({"ratio": g, "size": n, "image": image}),
    ));
    Ok(CriterionOutcome::new(7, "expansion dichotomy", checks))
}

fn quadruple_statistics() -> Result<CriterionOutcome, CliError> {
    let p = 31u64;
    let f = field(p);
    let budget = expansion::DEFAULT_QUADRUPLE_BUDGET;
    let p4 = p.pow(4);
    let mut checks = Vec::new();
    let sum = expansion::quadruple_count(&xy(&[(&[1, 0], 1), (&[0, 1], 1)]), &f, budget, 0)?;
    checks.push(check(
        "x + y has p^3 quadruples",
        sum.mode == CountMode::Exact && sum.distinct == p.pow(3),
        json!(sum),
    ));
    let prod = expansion::quadruple_count(&xy(&[(&[1, 1], 1)]), &f, budget, 0)?;
    checks.push(check(
        "x y satisfies u1 u4 = u2 u3",
        prod.mode == CountMode::Exact && prod.multiplicative_relations == p4 && prod.total == p4,
        json!(prod),
    ));
    let shk = expansion::quadruple_count(&xy(&[(&[2, 0], 1), (&[1, 1], 1)]), &f, budget, 0)?;
    checks.push(check(
        "x^2 + x y matches oracle",
        shk.mode == CountMode::Exact
            && shk.distinct == frozen::SHKREDOV_QUADRUPLES_31
            && shk.distinct as f64 > 0.3 * p4 as f64,
        json!({"stats": shk, "frozen": frozen::SHKREDOV_QUADRUPLES_31}),
    ));
    Ok(CriterionOutcome::new(8, "quadruple statistics", checks))
}

/// The three seeded sets of the incidence check over GF(101).
pub fn incidence_sets(f: &PrimeField) -> Result<[Vec<u64>; 3], CliError> {
    let m = |seed| expansion::materialize(&SubsetSpec::Random { size: 50, seed }, f);
    Ok([m(INCIDENCE_SEEDS[0])?, m(INCIDENCE_SEEDS[1])?, m(INCIDENCE_SEEDS[2])?])
}

fn incidence_bound() -> Result<CriterionOutcome, CliError> {
    let p = 101u64;
    let f = field(p);
    let [a, b, c] = incidence_sets(&f)?;
    let shkredov = xy(&[(&[2, 0], 1), (&[1, 1], 1)]);
    let r = expansion::triple_incidence(&shkredov, &a, &b, &c, &f)?;
    let main: f64 = num_traits::ToPrimitive::to_f64(&r.main_term).unwrap_or(f64::NAN);
    let slack = 8.0 * ((p * a.len() as u64 * b.len() as u64) as f64).sqrt();
    let checks = vec![
        check(
            "count within main term plus 8 (p |A| |B|)^(1/2)",
            (r.count as f64 - main).abs() <= slack,
            json!({"count": r.count, "main_term": r.main_term.to_string(), "slack": slack}),
        ),
        check(
            "count matches oracle",
            r.count == frozen::INCIDENCE_101,
            json!({"count": r.count, "frozen": frozen::INCIDENCE_101}),
        ),
    ];
    Ok(CriterionOutcome::new(9, "incidence bound", checks))
}
