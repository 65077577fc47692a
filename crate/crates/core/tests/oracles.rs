//! Brute-force recomputation of the measured values, in plain modular
//! arithmetic, against the library and against the recorded constants.

use std::collections::HashSet;
use std::f64::consts::TAU;

use expanderlab::charsum::{self, MultChar};
use expanderlab::count;
use expanderlab::expansion::{self, ExpansionConstants, SubsetSpec};
use expanderlab::regularity::{self, DefinableGraph, GraphKind};
use expanderlab::{PrimeField, RatPoly};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const RANDOM_IMAGE_101: u64 = 101;
const QUADRUPLES_31: u64 = 408_301;
const INCIDENCE_101_SEED7: u64 = 1190;
const FIBRES_31: [u64; 31] = [
    61, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30, 30,
    30, 30, 30,
];
const MULT_T_T1_13: f64 = 1.0;
const TWISTED_QR_13: f64 = 1.302_775_637_731_995;

fn field(p: u64) -> PrimeField {
    PrimeField::new(p).unwrap()
}

fn shkredov() -> RatPoly {
    RatPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], 1)])
}

fn shk(a: u64, b: u64, p: u64) -> u64 {
    (a * a + a * b) % p
}

fn random_set(p: u64, size: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<u64> = rand::seq::index::sample(&mut rng, p as usize, size)
        .into_iter()
        .map(|i| i as u64)
        .collect();
    v.sort_unstable();
    v
}

fn euler(x: u64, p: u64) -> i64 {
    let mut r = 1u64;
    let (mut b, mut e) = (x % p, (p - 1) / 2);
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    match r {
        0 => 0,
        1 => 1,
        _ => -1,
    }
}

#[test]
fn random_image_over_101() {
    let p = 101;
    let a = random_set(p, 50, 1);
    let oracle: HashSet<u64> = a.iter().flat_map(|&x| a.iter().map(move |&y| shk(x, y, p))).collect();
    let got = expansion::image_set(&shkredov(), &a, &a, &field(p)).unwrap();
    assert_eq!(got.len(), oracle.len());
    assert_eq!(oracle.len() as u64, RANDOM_IMAGE_101);
    assert!(RANDOM_IMAGE_101 >= 51);
}

#[test]
fn quadruples_over_31() {
    let p = 31u64;
    let mut seen = HashSet::new();
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                for d in 0..p {
                    seen.insert((shk(a, c, p), shk(a, d, p), shk(b, c, p), shk(b, d, p)));
                }
            }
        }
    }
    let stats = expansion::quadruple_count(&shkredov(), &field(p), expansion::DEFAULT_QUADRUPLE_BUDGET, 0).unwrap();
    assert_eq!(stats.distinct, seen.len() as u64);
    assert_eq!(stats.distinct, QUADRUPLES_31);
    assert!(QUADRUPLES_31 as f64 > 0.3 * (p as f64).powi(4));
}

#[test]
fn incidence_over_101() {
    let p = 101;
    let (a, b, c) = (random_set(p, 50, 7), random_set(p, 50, 8), random_set(p, 50, 9));
    let oracle = a
        .iter()
        .flat_map(|&x| b.iter().map(move |&y| shk(x, y, p)))
        .filter(|v| c.contains(v))
        .count() as u64;
    let r = expansion::triple_incidence(&shkredov(), &a, &b, &c, &field(p)).unwrap();
    assert_eq!(r.count, oracle);
    assert_eq!(oracle, INCIDENCE_101_SEED7);
    assert!(r.residual.abs() <= 1.0);
}

#[test]
fn fibres_over_31() {
    let p = 31u64;
    let mut counts = [0u64; 31];
    for a in 0..p {
        for b in 0..p {
            counts[shk(a, b, p) as usize] += 1;
        }
    }
    let h = count::fibre_histogram(&shkredov(), &field(p)).unwrap();
    assert_eq!(h.counts, counts.to_vec());
    assert_eq!(counts, FIBRES_31);
    assert_eq!(h.mean, p as f64);
}

fn modulus(re: f64, im: f64) -> f64 {
    (re * re + im * im).sqrt()
}

#[test]
fn multiplicative_sum_over_13() {
    let p = 13u64;
    let sum: i64 = (0..p).map(|t| euler(t, p) * euler(t + 1, p)).sum();
    let oracle = (sum as f64).abs();
    let t = RatPoly::var(1, 0);
    let t1 = &t + &RatPoly::one(1);
    let r = charsum::mult_char_sum(&[(t, 1), (t1, 1)], 2, &field(p), false).unwrap();
    assert!((r.magnitude - oracle).abs() < 1e-9);
    assert!((oracle - MULT_T_T1_13).abs() < 1e-9);
    assert!(r.satisfied && r.bound == 2.0 * 13f64.sqrt());
}

#[test]
fn twisted_sum_over_13() {
    let p = 13u64;
    let f = field(p);
    // x^((p-1)/2) in {0, 1} picks out the squares.
    let squares = SubsetSpec::Pullback {
        f: RatPoly::from_int_terms(1, &[(&[6], 1)]),
        base: Box::new(SubsetSpec::Interval { start: 0, len: 2 }),
    };
    let e = expansion::materialize(&squares, &f).unwrap();
    assert_eq!(e, vec![0, 1, 3, 4, 9, 10, 12]);
    let (mut re, mut im) = (0.0, 0.0);
    for &x in &e {
        let chi = euler(x, p) as f64;
        if chi == 0.0 {
            continue;
        }
        re += chi * (TAU * x as f64 / p as f64).cos();
        im += chi * (TAU * x as f64 / p as f64).sin();
    }
    let oracle = modulus(re, im);
    let t = RatPoly::var(1, 0);
    let r = charsum::twisted_definable_sum(&e, &t, &t, MultChar::LEGENDRE, &f, 8.0).unwrap();
    assert!((r.magnitude - oracle).abs() < 1e-9);
    assert!((oracle - TWISTED_QR_13).abs() < 1e-9);
}

#[test]
fn paley_codegrees_by_brute_force() {
    for (p, want) in [(13u64, vec![2, 3]), (17, vec![3, 4]), (29, vec![6, 7])] {
        let adj = |v: u64, w: u64| v != w && euler((v + p - w) % p, p) == 1;
        let mut values = std::collections::BTreeSet::new();
        for v in 0..p {
            for w in v + 1..p {
                values.insert((0..p).filter(|&u| adj(v, u) && adj(w, u)).count() as u64);
            }
        }
        let graph = DefinableGraph::new(GraphKind::QrDifference, &field(p)).unwrap();
        let stats = regularity::codegree_stats(&graph, 1.0).unwrap();
        let got: Vec<u64> = stats.histogram.keys().copied().collect();
        assert_eq!(got, values.into_iter().collect::<Vec<_>>());
        assert_eq!(got, want);
    }
}

#[test]
fn paley_sigma_by_dense_eigenvalues() {
    // The Paley adjacency spectrum is (p-1)/2 once and (-1 +- sqrt p)/2; the
    // centered matrix keeps the second pair, so sigma is (1 + sqrt p)/2.
    let p = 13u64;
    let f = field(p);
    let graph = DefinableGraph::new(GraphKind::QrDifference, &f).unwrap();
    let cert = regularity::spectral_discrepancy(&graph, &regularity::trivial_partition(&f)).unwrap();
    let n = p as usize;
    let d = cert.pairs[0].d;
    let m: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f64::from(i != j && euler((i + n - j) as u64 % p, p) == 1) - d)
                .collect()
        })
        .collect();
    // Largest eigenvalue magnitude of the symmetric matrix M^2 by plain iteration.
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
    let mut lambda = 0.0;
    for _ in 0..2000 {
        let y: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * x[j]).sum()).collect();
        let z: Vec<f64> = (0..n).map(|i| (0..n).map(|j| m[i][j] * y[j]).sum()).collect();
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        lambda = norm / x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x = z.iter().map(|v| v / norm).collect();
    }
    let oracle = lambda.sqrt();
    assert!((oracle - (1.0 + 13f64.sqrt()) / 2.0).abs() < 1e-6);
    assert!((cert.pairs[0].sigma - oracle).abs() < 1e-6);
}

#[test]
fn gauss_sums_by_direct_summation() {
    for p in [3u64, 5, 13] {
        let (mut re, mut im) = (0.0, 0.0);
        for t in 1..p {
            let chi = euler(t, p) as f64;
            re += chi * (TAU * t as f64 / p as f64).cos();
            im += chi * (TAU * t as f64 / p as f64).sin();
        }
        let r = charsum::gauss_sum(&field(p));
        assert!((modulus(re, im) - (p as f64).sqrt()).abs() < 1e-9);
        assert!((r.magnitude - modulus(re, im)).abs() < 1e-9);
    }
}

#[test]
fn expansion_flags_at_1009() {
    let f = field(1009);
    let c = ExpansionConstants::default();
    let ap = SubsetSpec::Ap { start: 0, step: 1, len: 957 };
    let sum = RatPoly::from_int_terms(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
    let r = expansion::expansion_report(&sum, &ap, &ap, &f, c).unwrap();
    // 2 |A| - 1 = 1913 wraps past p, so the sumset is the whole field.
    assert_eq!(r.image_size, 1009);
    assert!(r.moderate.holds);
    let random = SubsetSpec::Random { size: 957, seed: 3 };
    let r = expansion::expansion_report(&shkredov(), &random, &random, &f, c).unwrap();
    let a = random_set(1009, 957, 3);
    let oracle: HashSet<u64> = a.iter().flat_map(|&x| a.iter().map(move |&y| shk(x, y, 1009))).collect();
    assert_eq!(r.image_size, oracle.len() as u64);
    assert!(r.moderate.holds);
}
