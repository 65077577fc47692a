//! Dense integer evaluation of the determinant polynomial.
//!
//! With L(a, b, c, d) = U(a, c, d) V(b, c, d), U = P1(a, c) P2(a, d) and
//! V = P2(b, c) P1(b, d), the second product of D is L with a and b
//! swapped, so D = L(a, b, c, d) - L(b, a, c, d). Coefficients are cleared
//! of denominators and accumulated in checked i128; `None` means an
//! intermediate overflowed and the caller should use exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::poly::{Rat, RatPoly};

/// Dense coefficient grid `g[i][j]` of x^i y^j.
type Grid = Vec<Vec<i128>>;

fn grid(p: &RatPoly, scale: &BigInt) -> Option<Grid> {
    let (dx, dy) = (p.degree_in(0) as usize, p.degree_in(1) as usize);
    let mut g = vec![vec![0i128; dy + 1]; dx + 1];
    for (m, c) in p.terms() {
        let v = (c * Rat::from_integer(scale.clone())).to_integer().to_i128()?;
        g[m.exps()[0] as usize][m.exps()[1] as usize] = v;
    }
    Some(g)
}

fn mac(acc: &mut i128, x: i128, y: i128) -> Option<()> {
    *acc = acc.checked_add(x.checked_mul(y)?)?;
    Some(())
}

/// W[a][c][d] = sum over a1 + a2 = a of s[a1][c] t[a2][d].
fn outer(s: &Grid, t: &Grid) -> Option<Vec<Vec<Vec<i128>>>> {
    let (ns, nt) = (s.len(), t.len());
    let (cs, ct) = (s[0].len(), t[0].len());
    let mut w = vec![vec![vec![0i128; ct]; cs]; ns + nt - 1];
    for (a1, srow) in s.iter().enumerate() {
        for (a2, trow) in t.iter().enumerate() {
            for (c, &x) in srow.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (d, &y) in trow.iter().enumerate() {
                    mac(&mut w[a1 + a2][c][d], x, y)?;
                }
            }
        }
    }
    Some(w)
}

pub(crate) fn dense_determinant(p: &RatPoly) -> Option<RatPoly> {
    let scale = p
        .terms()
        .fold(BigInt::one(), |l, (_, c)| l.lcm(c.denom()));
    let a = grid(&p.partial_derivative(0), &scale)?;
    let b = grid(&p.partial_derivative(1), &scale)?;
    let u = outer(&a, &b)?;
    let v = outer(&b, &a)?;
    let (na, nc, nd) = (u.len(), u[0].len(), u[0][0].len());
    let (vc, vd) = (v[0].len(), v[0][0].len());
    let (mc, md) = (nc + vc - 1, nd + vd - 1);
    // l[a][b] is the (c, d) grid of U(a, ., .) V(b, ., .).
    let mut l = vec![vec![vec![0i128; mc * md]; na]; na];
    for (ia, ua) in u.iter().enumerate() {
        for (ib, vb) in v.iter().enumerate() {
            let cell = &mut l[ia][ib];
            for (c1, urow) in ua.iter().enumerate() {
                for (d1, &x) in urow.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (c2, vrow) in vb.iter().enumerate() {
                        for (d2, &y) in vrow.iter().enumerate() {
                            if y != 0 {
                                mac(&mut cell[(c1 + c2) * md + d1 + d2], x, y)?;
                            }
                        }
                    }
                }
            }
        }
    }
    let denom = Rat::from_integer(scale.pow(4u32));
    let mut terms = Vec::new();
    for ia in 0..na {
        for ib in 0..na {
            for c in 0..mc {
                for d in 0..md {
                    let k = c * md + d;
                    let diff = l[ia][ib][k].checked_sub(l[ib][ia][k])?;
                    if diff != 0 {
                        let e = vec![ia as u32, ib as u32, c as u32, d as u32];
                        terms.push((e, Rat::from_integer(diff.into()) / &denom));
                    }
                }
            }
        }
    }
    Some(RatPoly::from_terms(4, terms))
}
