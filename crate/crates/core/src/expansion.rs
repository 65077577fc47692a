//! Image sizes, quadruple statistics and incidence counts for bivariate
//! polynomials over GF(p).

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::par::{self, AtomicBitset};
use crate::poly::{horner, serialize_rat, FieldPoly, PolyError, Rat, RatPoly};

/// Largest |A| |B| an image or incidence enumeration will attempt.
pub const PAIR_BUDGET: u128 = 100_000_000;
/// Default quadruple budget: exhaustive up to p = 41.
pub const DEFAULT_QUADRUPLE_BUDGET: u128 = 41 * 41 * 41 * 41;
/// Moduli above this use sorted value lists instead of an occupancy bitset.
const DENSE_LIMIT: u64 = 1 << 28;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpansionError {
    #[error("subset is empty")]
    EmptySet,
    #[error("invalid subset: {0}")]
    InvalidSpec(String),
    #[error("quadruple budget {budget} below p^2 = {min}")]
    BudgetTooSmall { budget: u128, min: u128 },
    #[error("work {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("expected a polynomial in {expected} variables, got {got}")]
    Arity { expected: usize, got: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SubsetSpec {
    Interval { start: i64, len: u64 },
    Ap { start: i64, step: i64, len: u64 },
    Gp { start: i64, ratio: i64, len: u64 },
    Random { size: u64, seed: u64 },
    /// {x : F(x) in base} for univariate F.
    Pullback { f: RatPoly, base: Box<SubsetSpec> },
}

fn check_len(len: u64, p: u64) -> Result<(), ExpansionError> {
    if len == 0 || len > p {
        return Err(ExpansionError::InvalidSpec(format!(
            "length {len} outside 1..={p}"
        )));
    }
    Ok(())
}

fn sorted_unique(mut v: Vec<u64>) -> Vec<u64> {
    v.sort_unstable();
    v.dedup();
    v
}

fn check_budget(needed: u128, budget: u128) -> Result<(), ExpansionError> {
    if needed > budget {
        return Err(ExpansionError::BudgetExceeded { needed, budget });
    }
    Ok(())
}

/// The elements of a subset spec, sorted and deduplicated.
pub fn materialize(spec: &SubsetSpec, field: &PrimeField) -> Result<Vec<u64>, ExpansionError> {
    let p = field.p();
    let set = match spec {
        SubsetSpec::Interval { start, len } => {
            check_len(*len, p)?;
            let s = field.reduce_i64(*start);
            sorted_unique((0..*len).map(|i| field.add(s, i % p)).collect())
        }
        SubsetSpec::Ap { start, step, len } => {
            check_len(*len, p)?;
            let (s, d) = (field.reduce_i64(*start), field.reduce_i64(*step));
            let mut out = Vec::with_capacity(*len as usize);
            let mut cur = s;
            for _ in 0..*len {
                out.push(cur);
                cur = field.add(cur, d);
            }
            sorted_unique(out)
        }
        SubsetSpec::Gp { start, ratio, len } => {
            check_len(*len, p)?;
            let r = field.reduce_i64(*ratio);
            if r == 0 {
                return Err(ExpansionError::InvalidSpec("ratio is 0 mod p".into()));
            }
            let mut out = Vec::with_capacity(*len as usize);
            let mut cur = field.reduce_i64(*start);
            for _ in 0..*len {
                out.push(cur);
                cur = field.mul(cur, r);
            }
            sorted_unique(out)
        }
        SubsetSpec::Random { size, seed } => {
            check_len(*size, p)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let idx = rand::seq::index::sample(&mut rng, p as usize, *size as usize);
            sorted_unique(idx.into_iter().map(|i| i as u64).collect())
        }
        SubsetSpec::Pullback { f, base } => {
            if f.arity() != 1 {
                return Err(ExpansionError::Arity {
                    expected: 1,
                    got: f.arity(),
                });
            }
            check_budget(p as u128, PAIR_BUDGET)?;
            let base = materialize(base, field)?;
            let member = AtomicBitset::new(p as usize);
            base.iter().for_each(|&b| member.set(b as usize));
            let fp = FieldPoly::new(f, field)?;
            let hits = AtomicBitset::new(p as usize);
            par::map_blocks(p as usize, par::block_size(p as usize, 1024), |r| {
                for x in r {
                    if member.get(fp.eval1(x as u64, field) as usize) {
                        hits.set(x);
                    }
                }
            });
            hits.ones()
        }
    };
    if set.is_empty() {
        return Err(ExpansionError::EmptySet);
    }
    Ok(set)
}

fn bivariate(poly: &RatPoly, field: &PrimeField) -> Result<FieldPoly, ExpansionError> {
    if poly.arity() != 2 {
        return Err(ExpansionError::Arity {
            expected: 2,
            got: poly.arity(),
        });
    }
    Ok(FieldPoly::new(poly, field)?)
}

/// {P(a, b) : a in A, b in B}, sorted.
pub fn image_set(poly: &RatPoly, a: &[u64], b: &[u64], field: &PrimeField) -> Result<Vec<u64>, ExpansionError> {
    check_budget(a.len() as u128 * b.len() as u128, PAIR_BUDGET)?;
    let fp = bivariate(poly, field)?;
    let p = field.p();
    let block = par::block_size(a.len(), 4);
    if p <= DENSE_LIMIT {
        let occ = AtomicBitset::new(p as usize);
        par::map_blocks(a.len(), block, |r| {
            for &x in &a[r] {
                let row = fp.row_at(x, field);
                for &y in b {
                    occ.set(horner(&row, y, field) as usize);
                }
            }
        });
        Ok(occ.ones())
    } else {
        let parts = par::map_blocks(a.len(), block, |r| {
            let mut vals = Vec::with_capacity(r.len() * b.len());
            for &x in &a[r] {
                let row = fp.row_at(x, field);
                vals.extend(b.iter().map(|&y| horner(&row, y, field)));
            }
            sorted_unique(vals)
        });
        Ok(sorted_unique(parts.concat()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    Exact,
    Sampled,
}

/// Statistics of (u1, u2, u3, u4) = (P(a,c), P(a,d), P(b,c), P(b,d)).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadrupleStats {
    pub p: u64,
    pub distinct: u64,
    pub total: u64,
    pub mode: CountMode,
    /// Tuples with u1 + u4 = u2 + u3.
    pub additive_relations: u64,
    /// Tuples with u1 u4 = u2 u3.
    pub multiplicative_relations: u64,
}

#[derive(Default)]
struct Tally {
    additive: u64,
    multiplicative: u64,
}

impl Tally {
    fn record(&mut self, u: [u64; 4], field: &PrimeField) {
        if field.add(u[0], u[3]) == field.add(u[1], u[2]) {
            self.additive += 1;
        }
        if field.mul(u[0], u[3]) == field.mul(u[1], u[2]) {
            self.multiplicative += 1;
        }
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.additive += o.additive;
        self.multiplicative += o.multiplicative;
        self
    }
}

/// Counts distinct quadruples exactly when p^4 <= budget, otherwise over
/// `budget` tuples sampled with the given seed.
pub fn quadruple_count(poly: &RatPoly, field: &PrimeField, budget: u128, seed: u64) -> Result<QuadrupleStats, ExpansionError> {
    let fp = bivariate(poly, field)?;
    let p = field.p();
    let p2 = p as u128 * p as u128;
    if budget < p2 {
        return Err(ExpansionError::BudgetTooSmall { budget, min: p2 });
    }
    if p2 * p2 <= budget {
        let pu = p as usize;
        let table = fp.table(field);
        let seen = AtomicBitset::new(pu * pu * pu * pu);
        let tally = par::map_reduce(
            pu,
            1,
            Tally::default(),
            |r| {
                let mut t = Tally::default();
                for a in r {
                    for b in 0..pu {
                        for c in 0..pu {
                            let (u1, u3) = (table[a * pu + c], table[b * pu + c]);
                            for d in 0..pu {
                                let u = [u1, table[a * pu + d], u3, table[b * pu + d]];
                                let key = ((u[0] as usize * pu + u[1] as usize) * pu + u[2] as usize) * pu
                                    + u[3] as usize;
                                seen.set(key);
                                t.record(u, field);
                            }
                        }
                    }
                }
                t
            },
            Tally::merge,
        );
        return Ok(QuadrupleStats {
            p,
            distinct: seen.count_ones(),
            total: (p2 * p2) as u64,
            mode: CountMode::Exact,
            additive_relations: tally.additive,
            multiplicative_relations: tally.multiplicative,
        });
    }
    let samples = budget.min(u64::MAX as u128) as usize;
    let block = 1 << 16;
    let parts = par::map_blocks(samples, block, |r| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((r.start / block) as u64);
        let mut t = Tally::default();
        let mut quads = Vec::with_capacity(r.len());
        for _ in r {
            let [a, b, c, d]: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..p));
            let u = [
                fp.eval(a, c, field),
                fp.eval(a, d, field),
                fp.eval(b, c, field),
                fp.eval(b, d, field),
            ];
            t.record(u, field);
            quads.push(u);
        }
        quads.sort_unstable();
        quads.dedup();
        (quads, t)
    });
    let mut all = Vec::new();
    let mut tally = Tally::default();
    for (q, t) in parts {
        all.extend(q);
        tally = tally.merge(t);
    }
    all.sort_unstable();
    all.dedup();
    Ok(QuadrupleStats {
        p,
        distinct: all.len() as u64,
        total: samples as u64,
        mode: CountMode::Sampled,
        additive_relations: tally.additive,
        multiplicative_relations: tally.multiplicative,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IncidenceReport {
    pub p: u64,
    pub count: u64,
    /// |A| |B| |C| / p.
    #[serde(serialize_with = "serialize_rat")]
    pub main_term: Rat,
    /// (count - main_term) / (p |A| |B|)^(1/2).
    pub residual: f64,
}

/// Number of pairs (a, b) in A x B with P(a, b) in C.
pub fn triple_incidence(
    poly: &RatPoly,
    a: &[u64],
    b: &[u64],
    c: &[u64],
    field: &PrimeField,
) -> Result<IncidenceReport, ExpansionError> {
    check_budget(a.len() as u128 * b.len() as u128, PAIR_BUDGET)?;
    let fp = bivariate(poly, field)?;
    let p = field.p();
    let in_c: Box<dyn Fn(u64) -> bool + Sync> = if p <= DENSE_LIMIT {
        let bits = AtomicBitset::new(p as usize);
        c.iter().for_each(|&v| bits.set(v as usize));
        Box::new(move |v| bits.get(v as usize))
    } else {
        let sorted = sorted_unique(c.to_vec());
        Box::new(move |v| sorted.binary_search(&v).is_ok())
    };
    let count = par::map_reduce(
        a.len(),
        par::block_size(a.len(), 4),
        0u64,
        |r| {
            let mut n = 0;
            for &x in &a[r] {
                let row = fp.row_at(x, field);
                n += b.iter().filter(|&&y| in_c(horner(&row, y, field))).count() as u64;
            }
            n
        },
        |x, y| x + y,
    );
    let sizes = a.len() as u64 * b.len() as u64;
    let main_term = Rat::new((sizes as u128 * c.len() as u128).into(), p.into());
    let residual = (count as f64 - main_term.to_f64().unwrap_or(f64::NAN)) / ((p as f64) * sizes as f64).sqrt();
    Ok(IncidenceReport {
        p,
        count,
        main_term,
        residual,
    })
}

/// Constants of the expander-class thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExpansionConstants {
    pub c_mod: f64,
    pub c_weak: f64,
    pub c_as: f64,
}

impl Default for ExpansionConstants {
    fn default() -> Self {
        ExpansionConstants {
            c_mod: 4.0,
            c_weak: 4.0,
            c_as: 8.0,
        }
    }
}

/// A measured statistic against its threshold.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassCheck {
    pub value: f64,
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionReport {
    pub p: u64,
    pub size_a: u64,
    pub size_b: u64,
    pub image_size: u64,
    pub complement_size: u64,
    pub ratio_to_p: f64,
    pub ratio_to_min: f64,
    pub constants: ExpansionConstants,
    /// image >= p / C_mod
    pub moderate: ClassCheck,
    /// image >= (p min(|A|, |B|))^(1/2) / C_weak
    pub weak: ClassCheck,
    /// complement <= C_as p ((|A| |B|) / p^(15/8))^(-1/2)
    pub almost_strong: ClassCheck,
}

pub fn expansion_report(
    poly: &RatPoly,
    spec_a: &SubsetSpec,
    spec_b: &SubsetSpec,
    field: &PrimeField,
    constants: ExpansionConstants,
) -> Result<ExpansionReport, ExpansionError> {
    let a = materialize(spec_a, field)?;
    let b = materialize(spec_b, field)?;
    let image = image_set(poly, &a, &b, field)?.len() as u64;
    let p = field.p();
    let pf = p as f64;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let min = na.min(nb);
    let complement = p - image;
    let moderate_t = pf / constants.c_mod;
    let weak_t = (pf * min).sqrt() / constants.c_weak;
    let as_t = constants.c_as * pf * ((na * nb) / pf.powf(2.0 - 1.0 / 8.0)).powf(-0.5);
    Ok(ExpansionReport {
        p,
        size_a: a.len() as u64,
        size_b: b.len() as u64,
        image_size: image,
        complement_size: complement,
        ratio_to_p: image as f64 / pf,
        ratio_to_min: image as f64 / min,
        constants,
        moderate: ClassCheck {
            value: image as f64,
            threshold: moderate_t,
            holds: image as f64 >= moderate_t,
        },
        weak: ClassCheck {
            value: image as f64,
            threshold: weak_t,
            holds: image as f64 >= weak_t,
        },
        almost_strong: ClassCheck {
            value: complement as f64,
            threshold: as_t,
            holds: complement as f64 <= as_t,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn poly(src: &[(&[u32], i64)]) -> RatPoly {
        RatPoly::from_int_terms(2, src)
    }

    #[test]
    fn materialize_examples() {
        let ap = SubsetSpec::Ap { start: 0, step: 1, len: 5 };
        assert_eq!(materialize(&ap, &f(101)).unwrap(), vec![0, 1, 2, 3, 4]);
        let gp = SubsetSpec::Gp { start: 1, ratio: 3, len: 4 };
        assert_eq!(materialize(&gp, &f(7)).unwrap(), vec![1, 2, 3, 6]);
        let full = SubsetSpec::Pullback {
            f: RatPoly::from_int_terms(1, &[(&[2], 1)]),
            base: Box::new(SubsetSpec::Ap { start: 0, step: 1, len: 11 }),
        };
        assert_eq!(materialize(&full, &f(11)).unwrap().len(), 11);
    }

    #[test]
    fn materialize_errors() {
        let field = f(11);
        let empty = SubsetSpec::Pullback {
            f: RatPoly::from_int_terms(1, &[(&[2], 1)]),
            base: Box::new(SubsetSpec::Interval { start: 2, len: 1 }),
        };
        assert_eq!(materialize(&empty, &field), Err(ExpansionError::EmptySet));
        let bad = SubsetSpec::Gp { start: 1, ratio: 22, len: 3 };
        assert!(matches!(materialize(&bad, &field), Err(ExpansionError::InvalidSpec(_))));
        let long = SubsetSpec::Random { size: 12, seed: 0 };
        assert!(matches!(materialize(&long, &field), Err(ExpansionError::InvalidSpec(_))));
    }

    #[test]
    fn random_is_seeded() {
        let field = f(101);
        let s = SubsetSpec::Random { size: 50, seed: 1 };
        let a = materialize(&s, &field).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, materialize(&s, &field).unwrap());
        let t = SubsetSpec::Random { size: 50, seed: 2 };
        assert_ne!(a, materialize(&t, &field).unwrap());
    }

    #[test]
    fn image_examples() {
        let field = f(101);
        let a: Vec<u64> = (0..10).collect();
        let sum = poly(&[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(image_set(&sum, &a, &a, &field).unwrap(), (0..19).collect::<Vec<_>>());
        let gp = materialize(&SubsetSpec::Gp { start: 1, ratio: 2, len: 10 }, &field).unwrap();
        let prod = poly(&[(&[1, 1], 1)]);
        assert_eq!(image_set(&prod, &gp, &gp, &field).unwrap().len(), 19);
    }

    #[test]
    fn quadruple_small_exact() {
        let field = f(7);
        let sum = poly(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let s = quadruple_count(&sum, &field, DEFAULT_QUADRUPLE_BUDGET, 0).unwrap();
        assert_eq!((s.distinct, s.mode), (343, CountMode::Exact));
        assert_eq!(s.additive_relations, s.total);
        let prod = poly(&[(&[1, 1], 1)]);
        let s = quadruple_count(&prod, &field, 49, 5).unwrap();
        assert_eq!(s.mode, CountMode::Sampled);
        assert_eq!(s.multiplicative_relations, s.total);
    }

    #[test]
    fn incidence_trivial_cases() {
        let field = f(13);
        let sum = poly(&[(&[1, 0], 1), (&[0, 1], 1)]);
        let all: Vec<u64> = (0..13).collect();
        let a = vec![1, 4, 6];
        let r = triple_incidence(&sum, &a, &a, &all, &field).unwrap();
        assert_eq!(r.count, 9);
        assert_eq!(r.residual, 0.0);
        let r = triple_incidence(&sum, &[0], &[0], &[0], &field).unwrap();
        assert_eq!(r.count, 1);
        assert_eq!(r.main_term, Rat::new(1.into(), 13.into()));
    }

    #[test]
    fn budget_guard() {
        let field = PrimeField::new(1_000_000_007).unwrap();
        let a: Vec<u64> = (0..20_000).collect();
        let sum = poly(&[(&[1, 0], 1), (&[0, 1], 1)]);
        assert!(matches!(
            image_set(&sum, &a, &a, &field),
            Err(ExpansionError::BudgetExceeded { .. })
        ));
    }
}
