//! Arithmetic in the prime field GF(p) for odd primes below 2^61.
//!
//! Hot loops work on raw `u64` residues through the methods on
//! [`PrimeField`]; [`FieldElem`] is the checked value type used at API
//! boundaries.

mod modpoly;
mod nt;

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use thiserror::Error;

pub use modpoly::ModPoly;
pub use nt::{factorize, is_prime, mul_mod, pow_mod};

/// Largest supported modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 61;
/// Residue and discrete-log tables are only built up to this size.
pub const TABLE_LIMIT: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not an odd prime below 2^61")]
    InvalidModulus(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("operands belong to GF({0}) and GF({1})")]
    FieldMismatch(u64, u64),
    #[error("denominator not invertible modulo {0}")]
    DenominatorNotInvertible(u64),
}

/// The prime field GF(p). Immutable after construction; lazily built tables
/// are initialised at most once and the type is safe to share across threads.
pub struct PrimeField {
    p: u64,
    /// Distinct prime factors of p - 1.
    order_factors: Vec<u64>,
    generator: OnceLock<u64>,
    qr_mask: OnceLock<Option<Vec<bool>>>,
    dlog: OnceLock<Option<Vec<u32>>>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.p)
    }
}

impl Clone for PrimeField {
    fn clone(&self) -> Self {
        PrimeField {
            p: self.p,
            order_factors: self.order_factors.clone(),
            generator: self.generator.clone(),
            qr_mask: self.qr_mask.clone(),
            dlog: self.dlog.clone(),
        }
    }
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if !(3..MAX_MODULUS).contains(&p) || p % 2 == 0 || !is_prime(p) {
            return Err(FieldError::InvalidModulus(p));
        }
        let mut order_factors: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
        order_factors.sort_unstable();
        Ok(PrimeField {
            p,
            order_factors,
            generator: OnceLock::new(),
            qr_mask: OnceLock::new(),
            dlog: OnceLock::new(),
        })
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: u64) -> FieldElem {
        FieldElem {
            value: v % self.p,
            p: self.p,
        }
    }

    pub fn zero(&self) -> FieldElem {
        self.elem(0)
    }

    pub fn one(&self) -> FieldElem {
        self.elem(1)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    #[inline]
    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.p)
    }

    /// Inverse by Fermat; `None` for zero.
    pub fn inv(&self, a: u64) -> Option<u64> {
        let a = a % self.p;
        if a == 0 {
            None
        } else {
            Some(self.pow(a, self.p - 2))
        }
    }

    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.p as i64) as u64
    }

    pub fn reduce_bigint(&self, v: &BigInt) -> u64 {
        let m = BigInt::from(self.p);
        v.mod_floor(&m).to_u64().expect("residue fits in u64")
    }

    /// Maps n/d to n * d^-1 mod p.
    pub fn reduce_rational(&self, v: &BigRational) -> Result<u64, FieldError> {
        let den = self.reduce_bigint(v.denom());
        let inv = self
            .inv(den)
            .ok_or(FieldError::DenominatorNotInvertible(self.p))?;
        Ok(self.mul(self.reduce_bigint(v.numer()), inv))
    }

    /// Representative of `v` in (-p/2, p/2].
    pub fn lift_centered(&self, v: u64) -> i64 {
        let v = v % self.p;
        if v > self.p / 2 {
            v as i64 - self.p as i64
        } else {
            v as i64
        }
    }

    fn qr_table(&self) -> Option<&Vec<bool>> {
        self.qr_mask
            .get_or_init(|| {
                (self.p <= TABLE_LIMIT).then(|| {
                    let mut mask = vec![false; self.p as usize];
                    for y in 0..=self.p / 2 {
                        mask[self.mul(y, y) as usize] = true;
                    }
                    mask
                })
            })
            .as_ref()
    }

    /// Quadratic residue test on a raw residue; zero counts as a residue.
    #[inline]
    pub fn is_qr(&self, x: u64) -> bool {
        let x = x % self.p;
        match self.qr_table() {
            Some(mask) => mask[x as usize],
            None => x == 0 || self.pow(x, (self.p - 1) / 2) == 1,
        }
    }

    /// Legendre symbol (x/p) in {-1, 0, 1}.
    #[inline]
    pub fn legendre(&self, x: u64) -> i8 {
        let x = x % self.p;
        if x == 0 {
            0
        } else if self.is_qr(x) {
            1
        } else {
            -1
        }
    }

    pub fn is_quadratic_residue(&self, x: FieldElem) -> Result<bool, FieldError> {
        self.check(x)?;
        Ok(self.is_qr(x.value))
    }

    /// Smallest primitive root of GF(p)^x.
    pub fn generator(&self) -> u64 {
        *self.generator.get_or_init(|| {
            (2..self.p)
                .find(|&g| self.is_primitive_root(g))
                .unwrap_or(self.p - 1)
        })
    }

    pub fn find_generator(&self) -> FieldElem {
        self.elem(self.generator())
    }

    pub fn is_primitive_root(&self, g: u64) -> bool {
        let g = g % self.p;
        g != 0
            && self
                .order_factors
                .iter()
                .all(|&q| self.pow(g, (self.p - 1) / q) != 1)
    }

    /// Distinct prime factors of p - 1.
    pub fn order_factors(&self) -> &[u64] {
        &self.order_factors
    }

    fn dlog_table(&self) -> Option<&Vec<u32>> {
        self.dlog
            .get_or_init(|| {
                (self.p <= TABLE_LIMIT).then(|| {
                    let g = self.generator();
                    let mut table = vec![0u32; self.p as usize];
                    let mut x = 1u64;
                    for k in 0..self.p - 1 {
                        table[x as usize] = k as u32;
                        x = self.mul(x, g);
                    }
                    table
                })
            })
            .as_ref()
    }

    /// Discrete logarithm base [`Self::generator`]; `None` for zero.
    pub fn dlog(&self, x: u64) -> Option<u64> {
        let x = x % self.p;
        if x == 0 {
            return None;
        }
        if let Some(t) = self.dlog_table() {
            return Some(t[x as usize] as u64);
        }
        Some(self.pohlig_hellman(x))
    }

    fn pohlig_hellman(&self, x: u64) -> u64 {
        let n = self.p - 1;
        let g = self.generator();
        let mut residues = Vec::new();
        for (q, e) in factorize(n) {
            let qe = q.pow(e);
            let cofactor = n / qe;
            let gq = self.pow(g, cofactor);
            let xq = self.pow(x, cofactor);
            // digits of log base q in the subgroup of order q^e
            let gamma = self.pow(gq, qe / q);
            let mut k = 0u64;
            let mut qi = 1u64;
            for i in 0..e {
                let ginv = self.inv(self.pow(gq, k)).expect("unit");
                let h = self.pow(self.mul(ginv, xq), qe / q / q.pow(i));
                let d = self.bsgs(gamma, h, q);
                k += d * qi;
                qi *= q;
            }
            residues.push((k, qe));
        }
        // combine by CRT
        let mut acc = 0u128;
        let mut modulus = 1u128;
        for (r, m) in residues {
            let (r, m) = (r as u128, m as u128);
            while acc % m != r {
                acc += modulus;
            }
            modulus *= m;
        }
        acc as u64
    }

    /// Solves base^k = target for 0 <= k < order.
    fn bsgs(&self, base: u64, target: u64, order: u64) -> u64 {
        let m = (order as f64).sqrt().ceil() as u64 + 1;
        let mut baby = HashMap::with_capacity(m as usize);
        let mut cur = 1u64;
        for j in 0..m {
            baby.entry(cur).or_insert(j);
            cur = self.mul(cur, base);
        }
        let giant = self.inv(self.pow(base, m)).expect("base is a unit");
        let mut gamma = target;
        for i in 0..m {
            if let Some(&j) = baby.get(&gamma) {
                return (i * m + j) % order;
            }
            gamma = self.mul(gamma, giant);
        }
        unreachable!("target lies in the subgroup generated by base")
    }

    fn check(&self, x: FieldElem) -> Result<(), FieldError> {
        if x.p != self.p {
            Err(FieldError::FieldMismatch(self.p, x.p))
        } else {
            Ok(())
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem {
    value: u64,
    p: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Raises `x` to the canonical integer value of `y`.
    Pow,
}

impl FieldElem {
    pub fn value(self) -> u64 {
        self.value
    }

    pub fn modulus(self) -> u64 {
        self.p
    }

    pub fn pow(self, e: u64) -> FieldElem {
        FieldElem {
            value: pow_mod(self.value, e, self.p),
            p: self.p,
        }
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// Checked binary operation on two elements of the same field.
pub fn field_arith(x: FieldElem, y: FieldElem, op: FieldOp) -> Result<FieldElem, FieldError> {
    if x.p != y.p {
        return Err(FieldError::FieldMismatch(x.p, y.p));
    }
    let p = x.p;
    let value = match op {
        FieldOp::Add => (x.value + y.value) % p,
        FieldOp::Sub => (x.value + p - y.value) % p,
        FieldOp::Mul => mul_mod(x.value, y.value, p),
        FieldOp::Div => {
            if y.value == 0 {
                return Err(FieldError::DivisionByZero(p));
            }
            mul_mod(x.value, pow_mod(y.value, p - 2, p), p)
        }
        FieldOp::Pow => pow_mod(x.value, y.value, p),
    };
    Ok(FieldElem { value, p })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn arith_examples() {
        let f5 = gf(5);
        assert_eq!(
            field_arith(f5.elem(3), f5.elem(4), FieldOp::Add).unwrap().value(),
            2
        );
        let f13 = gf(13);
        for x in 0..13 {
            let r = field_arith(f13.elem(x), f13.elem(1), FieldOp::Mul).unwrap();
            assert_eq!(r.value(), x);
        }
        let f7 = gf(7);
        assert_eq!(
            field_arith(f7.elem(2), f7.elem(3), FieldOp::Pow).unwrap().value(),
            1
        );
    }

    #[test]
    fn arith_errors() {
        let f7 = gf(7);
        let f11 = gf(11);
        assert_eq!(
            field_arith(f7.elem(1), f7.elem(0), FieldOp::Div),
            Err(FieldError::DivisionByZero(7))
        );
        assert_eq!(
            field_arith(f7.elem(1), f11.elem(1), FieldOp::Add),
            Err(FieldError::FieldMismatch(7, 11))
        );
        assert_eq!(
            f7.is_quadratic_residue(f11.elem(2)),
            Err(FieldError::FieldMismatch(7, 11))
        );
    }

    #[test]
    fn rejects_bad_moduli() {
        for p in [0, 1, 2, 4, 9, 15, 561, MAX_MODULUS + 1] {
            assert!(PrimeField::new(p).is_err(), "{p}");
        }
        assert!(PrimeField::new(2305843009213693951).is_ok());
    }

    #[test]
    fn quadratic_residue_examples() {
        let f7 = gf(7);
        assert!(f7.is_quadratic_residue(f7.elem(4)).unwrap());
        assert!(!f7.is_quadratic_residue(f7.elem(3)).unwrap());
        let f13 = gf(13);
        assert!(f13.is_quadratic_residue(f13.elem(0)).unwrap());
    }

    #[test]
    fn generator_examples() {
        assert_eq!(gf(7).find_generator().value(), 3);
        assert_eq!(gf(5).find_generator().value(), 2);
        assert_eq!(gf(3).find_generator().value(), 2);
    }

    #[test]
    fn dlog_without_table_matches_powers() {
        // above the table limit the Pohlig-Hellman path is used
        let f = gf(1_000_000_007);
        assert!(f.p() > TABLE_LIMIT);
        let g = f.generator();
        for k in [0u64, 1, 2, 17, 999, 500_000, 1_000_000_005] {
            assert_eq!(f.dlog(f.pow(g, k)), Some(k));
        }
        assert_eq!(f.dlog(0), None);
    }

    #[test]
    fn euler_fallback_agrees_with_table() {
        let f = gf(1_000_000_007);
        let mut count = 0;
        for x in 0..2000u64 {
            let y = f.mul(x, x);
            assert!(f.is_qr(y));
            if f.is_qr(x) {
                count += 1;
            }
        }
        assert!(count > 900 && count < 1100);
    }

    #[test]
    fn reduce_rational_and_lift() {
        let f = gf(7);
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(f.reduce_rational(&half).unwrap(), 4);
        let bad = BigRational::new(1.into(), 14.into());
        assert_eq!(
            f.reduce_rational(&bad),
            Err(FieldError::DenominatorNotInvertible(7))
        );
        assert_eq!(f.lift_centered(4), -3);
        assert_eq!(f.lift_centered(3), 3);
    }
}
