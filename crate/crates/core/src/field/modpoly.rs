//! Dense univariate polynomials over GF(p), used for root counting.

use super::PrimeField;

/// Coefficients in ascending degree order, trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ModPoly {
    coeffs: Vec<u64>,
}

impl ModPoly {
    pub fn new(mut coeffs: Vec<u64>) -> Self {
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        ModPoly { coeffs }
    }

    pub fn x() -> Self {
        ModPoly { coeffs: vec![0, 1] }
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, f: &PrimeField, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn sub(&self, other: &ModPoly, f: &PrimeField) -> ModPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let c = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                f.sub(a, b)
            })
            .collect();
        ModPoly::new(c)
    }

    pub fn mul(&self, other: &ModPoly, f: &PrimeField) -> ModPoly {
        if self.is_zero() || other.is_zero() {
            return ModPoly::default();
        }
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        ModPoly::new(out)
    }

    /// Remainder of division by a nonzero `m`.
    pub fn rem(&self, m: &ModPoly, f: &PrimeField) -> ModPoly {
        let dm = m.degree().expect("division by zero polynomial");
        let lead_inv = f.inv(m.coeffs[dm]).expect("nonzero leading coefficient");
        let mut r = self.coeffs.clone();
        while r.len() > dm {
            let top = *r.last().unwrap();
            if top != 0 {
                let q = f.mul(top, lead_inv);
                let shift = r.len() - 1 - dm;
                for (j, &c) in m.coeffs.iter().enumerate() {
                    r[shift + j] = f.sub(r[shift + j], f.mul(q, c));
                }
            }
            r.pop();
        }
        ModPoly::new(r)
    }

    pub fn monic(&self, f: &PrimeField) -> ModPoly {
        match self.coeffs.last() {
            None => ModPoly::default(),
            Some(&lc) => {
                let inv = f.inv(lc).expect("nonzero");
                ModPoly::new(self.coeffs.iter().map(|&c| f.mul(c, inv)).collect())
            }
        }
    }

    /// Monic gcd; zero only if both inputs are zero.
    pub fn gcd(&self, other: &ModPoly, f: &PrimeField) -> ModPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b, f);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// x^e mod m.
    pub fn x_pow_mod(e: u64, m: &ModPoly, f: &PrimeField) -> ModPoly {
        let mut acc = ModPoly::new(vec![1]).rem(m, f);
        let mut base = ModPoly::x().rem(m, f);
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base, f).rem(m, f);
            }
            base = base.mul(&base, f).rem(m, f);
            e >>= 1;
        }
        acc
    }

    /// Number of distinct roots in GF(p): the degree of gcd(self, x^p - x).
    /// The zero polynomial vanishes everywhere and reports p.
    pub fn distinct_root_count(&self, f: &PrimeField) -> u64 {
        match self.degree() {
            None => f.p(),
            Some(0) => 0,
            Some(1) => 1,
            Some(_) => {
                let xp = ModPoly::x_pow_mod(f.p(), self, f);
                let frob = xp.sub(&ModPoly::x(), f);
                self.gcd(&frob, f).degree().unwrap_or(0) as u64
            }
        }
    }

    pub fn has_root(&self, f: &PrimeField) -> bool {
        self.distinct_root_count(f) > 0
    }
}
