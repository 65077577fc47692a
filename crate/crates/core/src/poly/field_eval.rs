use crate::field::{ModPoly, PrimeField};

use super::{PolyError, RatPoly};

/// A univariate or bivariate polynomial reduced once into a dense table
/// over GF(p), for use inside enumeration loops.
#[derive(Clone, Debug)]
pub struct FieldPoly {
    p: u64,
    arity: usize,
    /// `rows[i][j]` is the coefficient of x^i y^j.
    rows: Vec<Vec<u64>>,
}

impl FieldPoly {
    pub fn new(poly: &RatPoly, field: &PrimeField) -> Result<Self, PolyError> {
        let arity = poly.arity();
        if arity > 2 {
            return Err(PolyError::ArityMismatch(arity, 2));
        }
        let dx = poly.degree_in(0) as usize;
        let dy = if arity == 2 { poly.degree_in(1) as usize } else { 0 };
        let mut rows = vec![vec![0u64; dy + 1]; dx + 1];
        for (m, c) in poly.terms() {
            let e = m.exps();
            let j = if arity == 2 { e[1] as usize } else { 0 };
            rows[e[0] as usize][j] = field.reduce_rational(c)?;
        }
        Ok(FieldPoly {
            p: field.p(),
            arity,
            rows,
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|&c| c == 0))
    }

    /// Degree in x after reduction; `None` when zero mod p.
    pub fn degree_x(&self) -> Option<usize> {
        self.rows.iter().rposition(|r| r.iter().any(|&c| c != 0))
    }

    /// Degree in y after reduction; `None` when zero mod p.
    pub fn degree_y(&self) -> Option<usize> {
        (0..self.rows[0].len())
            .rev()
            .find(|&j| self.rows.iter().any(|r| r[j] != 0))
    }

    /// Univariate polynomial in y obtained by fixing x = a.
    pub fn specialize_x(&self, a: u64, field: &PrimeField) -> ModPoly {
        debug_assert_eq!(field.p(), self.p);
        let mut out = vec![0u64; self.rows[0].len()];
        let mut pow = 1u64;
        for row in &self.rows {
            for (o, &c) in out.iter_mut().zip(row) {
                if c != 0 {
                    *o = field.add(*o, field.mul(c, pow));
                }
            }
            pow = field.mul(pow, a);
        }
        ModPoly::new(out)
    }

    /// Univariate polynomial in x obtained by fixing y = b.
    pub fn specialize_y(&self, b: u64, field: &PrimeField) -> ModPoly {
        debug_assert_eq!(field.p(), self.p);
        ModPoly::new(
            self.rows
                .iter()
                .map(|row| horner(row, b, field))
                .collect(),
        )
    }

    pub fn eval(&self, x: u64, y: u64, field: &PrimeField) -> u64 {
        let mut acc = 0u64;
        for row in self.rows.iter().rev() {
            acc = field.add(field.mul(acc, x), horner(row, y, field));
        }
        acc
    }

    pub fn eval1(&self, x: u64, field: &PrimeField) -> u64 {
        self.eval(x, 0, field)
    }

    /// Coefficients in y at x = a, for repeated evaluation with [`horner`].
    pub fn row_at(&self, a: u64, field: &PrimeField) -> Vec<u64> {
        self.specialize_x(a, field).coeffs().to_vec()
    }

    /// Full value table t[a * p + b] = P(a, b); only for small p.
    pub fn table(&self, field: &PrimeField) -> Vec<u64> {
        let p = field.p() as usize;
        let mut t = vec![0u64; p * p];
        for a in 0..p {
            let row = self.row_at(a as u64, field);
            for b in 0..p {
                t[a * p + b] = horner(&row, b as u64, field);
            }
        }
        t
    }
}

/// Evaluates ascending coefficients at x.
#[inline]
pub fn horner(coeffs: &[u64], x: u64, field: &PrimeField) -> u64 {
    coeffs
        .iter()
        .rev()
        .fold(0, |acc, &c| field.add(field.mul(acc, x), c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat, ratio};

    #[test]
    fn agrees_with_sparse_evaluation() {
        let f = PrimeField::new(101).unwrap();
        let p = RatPoly::from_terms(
            2,
            [
                (vec![2, 0], rat(1)),
                (vec![1, 1], rat(1)),
                (vec![0, 3], ratio(-3, 7)),
                (vec![0, 0], rat(5)),
            ],
        );
        let fp = FieldPoly::new(&p, &f).unwrap();
        for a in [0u64, 1, 17, 100] {
            for b in [0u64, 2, 55, 99] {
                assert_eq!(fp.eval(a, b, &f), p.evaluate_mod(&[a, b], &f).unwrap());
                assert_eq!(fp.specialize_x(a, &f).eval(&f, b), fp.eval(a, b, &f));
                assert_eq!(fp.specialize_y(b, &f).eval(&f, a), fp.eval(a, b, &f));
            }
        }
        assert_eq!(fp.degree_x(), Some(2));
        assert_eq!(fp.degree_y(), Some(3));
    }

    #[test]
    fn degree_drops_mod_p() {
        let f = PrimeField::new(7).unwrap();
        let p = RatPoly::from_terms(2, [(vec![2, 0], rat(7)), (vec![1, 0], rat(1))]);
        let fp = FieldPoly::new(&p, &f).unwrap();
        assert_eq!(fp.degree_x(), Some(1));
        assert_eq!(fp.degree_y(), Some(0));
    }
}
