//! Definable bipartite graphs over GF(p), codegree statistics and spectral
//! discrepancy certificates.
//!
//! A certificate bounds, for every A in V_i and B in W_j,
//! | |E n (A x B)| - d_ij |A| |B| | <= sigma_ij (|A| |B|)^(1/2),
//! where sigma_ij is the top singular value of the centered incidence
//! array of the cell pair.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldError, PrimeField};
use crate::par;
use crate::poly::{FieldPoly, PolyError, RatPoly};

/// Largest modulus for dense spectral work.
pub const SPECTRAL_LIMIT: u64 = 4096;
/// Largest modulus for exact codegree enumeration.
pub const CODEGREE_LIMIT: u64 = 1 << 14;
pub const MAX_ITERATIONS: usize = 10_000;
const START_SEED: u64 = 0x5eed_0f_5eed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegularityError {
    #[error("vertex pair ({0}, {1}) outside the declared vertex sets")]
    VertexOutOfRange(u64, u64),
    #[error("p = {p} exceeds the limit {limit} for this computation")]
    BudgetExceeded { p: u64, limit: u64 },
    #[error("power iteration did not converge in {0} iterations")]
    ConvergenceFailure(usize),
    #[error("expected a bivariate polynomial, got arity {0}")]
    Arity(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GraphKind {
    /// v - w is a nonzero square.
    QrDifference,
    /// v w is a square, on nonzero vertices.
    QrProduct,
    /// P(v, w) is a square (0 included).
    PolyInQr(RatPoly),
    /// P(v, w) lies in the given set.
    PolyLevelSet(RatPoly, Vec<u64>),
}

impl GraphKind {
    pub fn name(&self) -> &'static str {
        match self {
            GraphKind::QrDifference => "qr-difference",
            GraphKind::QrProduct => "qr-product",
            GraphKind::PolyInQr(_) => "poly-in-qr",
            GraphKind::PolyLevelSet(..) => "poly-level-set",
        }
    }
}

pub struct DefinableGraph {
    kind: GraphKind,
    field: PrimeField,
    poly: Option<FieldPoly>,
    level: Vec<bool>,
}

impl DefinableGraph {
    pub fn new(kind: GraphKind, field: &PrimeField) -> Result<Self, RegularityError> {
        let (poly, level) = match &kind {
            GraphKind::PolyInQr(p) | GraphKind::PolyLevelSet(p, _) => {
                if p.arity() != 2 {
                    return Err(RegularityError::Arity(p.arity()));
                }
                let level = match &kind {
                    GraphKind::PolyLevelSet(_, s) => {
                        let mut l = vec![false; field.p() as usize];
                        for &v in s {
                            l[(v % field.p()) as usize] = true;
                        }
                        l
                    }
                    _ => Vec::new(),
                };
                (Some(FieldPoly::new(p, field)?), level)
            }
            _ => (None, Vec::new()),
        };
        Ok(DefinableGraph {
            kind,
            field: field.clone(),
            poly,
            level,
        })
    }

    pub fn kind(&self) -> &GraphKind {
        &self.kind
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// The common vertex set of both sides.
    pub fn vertices(&self) -> Vec<u64> {
        let start = u64::from(self.kind == GraphKind::QrProduct);
        (start..self.field.p()).collect()
    }

    fn in_range(&self, v: u64) -> bool {
        v < self.field.p() && !(self.kind == GraphKind::QrProduct && v == 0)
    }

    pub fn adjacency(&self, v: u64, w: u64) -> Result<bool, RegularityError> {
        if !self.in_range(v) || !self.in_range(w) {
            return Err(RegularityError::VertexOutOfRange(v, w));
        }
        Ok(self.edge(v, w))
    }

    #[inline]
    fn edge(&self, v: u64, w: u64) -> bool {
        let f = &self.field;
        match &self.kind {
            GraphKind::QrDifference => {
                let d = f.sub(v, w);
                d != 0 && f.is_qr(d)
            }
            GraphKind::QrProduct => f.is_qr(f.mul(v, w)),
            GraphKind::PolyInQr(_) => f.is_qr(self.poly.as_ref().unwrap().eval(v, w, f)),
            GraphKind::PolyLevelSet(..) => {
                self.level[self.poly.as_ref().unwrap().eval(v, w, f) as usize]
            }
        }
    }

    /// Neighbourhoods N(w) = {v : (v, w) in E} as bitsets over the vertex list.
    fn neighbourhoods(&self, verts: &[u64]) -> Vec<Vec<u64>> {
        let words = verts.len().div_ceil(64);
        par::map_blocks(verts.len(), par::block_size(verts.len(), 8), |r| {
            r.map(|j| {
                let mut bits = vec![0u64; words];
                for (i, &v) in verts.iter().enumerate() {
                    if self.edge(v, verts[j]) {
                        bits[i / 64] |= 1 << (i % 64);
                    }
                }
                bits
            })
            .collect::<Vec<_>>()
        })
        .concat()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationLevel {
    /// Candidate level c, as a fraction of p.
    pub level: f64,
    /// Share of pairs with |mu - c p| <= K p^(1/2).
    pub fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CodegreeStats {
    pub p: u64,
    pub pairs: u64,
    /// mu value -> number of unordered pairs w != w'.
    pub histogram: BTreeMap<u64, u64>,
    pub min: u64,
    pub max: u64,
    pub mean: f64,
    pub k: f64,
    pub levels: Vec<ConcentrationLevel>,
}

/// Share of the histogram's pairs within `k p^(1/2)` of `level p`.
pub fn concentration(histogram: &BTreeMap<u64, u64>, p: u64, level: f64, k: f64) -> f64 {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return 0.0;
    }
    let (pf, radius) = (p as f64, k * (p as f64).sqrt());
    let near: u64 = histogram
        .iter()
        .filter(|(&mu, _)| (mu as f64 - level * pf).abs() <= radius)
        .map(|(_, &n)| n)
        .sum();
    near as f64 / total as f64
}

/// Exact codegree histogram over unordered pairs of distinct vertices,
/// with concentration around the mean level and the three most frequent
/// values, at radius `k p^(1/2)`.
pub fn codegree_stats(graph: &DefinableGraph, k: f64) -> Result<CodegreeStats, RegularityError> {
    let p = graph.field.p();
    if p > CODEGREE_LIMIT {
        return Err(RegularityError::BudgetExceeded {
            p,
            limit: CODEGREE_LIMIT,
        });
    }
    let verts = graph.vertices();
    let nbhd = graph.neighbourhoods(&verts);
    let n = verts.len();
    let parts = par::map_blocks(n, 1, |r| {
        let mut h = BTreeMap::new();
        for a in r {
            for b in a + 1..n {
                let mu: u32 = nbhd[a].iter().zip(&nbhd[b]).map(|(x, y)| (x & y).count_ones()).sum();
                *h.entry(mu as u64).or_insert(0u64) += 1;
            }
        }
        h
    });
    let mut histogram = BTreeMap::new();
    for h in parts {
        for (mu, c) in h {
            *histogram.entry(mu).or_insert(0) += c;
        }
    }
    let pairs: u64 = histogram.values().sum();
    let mean = if pairs == 0 {
        0.0
    } else {
        histogram.iter().map(|(&m, &c)| m as f64 * c as f64).sum::<f64>() / pairs as f64
    };
    let mut frequent: Vec<(u64, u64)> = histogram.iter().map(|(&m, &c)| (m, c)).collect();
    frequent.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut levels = vec![mean / p as f64];
    levels.extend(frequent.iter().take(3).map(|&(m, _)| m as f64 / p as f64));
    let levels = levels
        .into_iter()
        .map(|level| ConcentrationLevel {
            level,
            fraction: concentration(&histogram, p, level, k),
        })
        .collect();
    Ok(CodegreeStats {
        p,
        pairs,
        min: histogram.keys().next().copied().unwrap_or(0),
        max: histogram.keys().next_back().copied().unwrap_or(0),
        mean,
        k,
        histogram,
        levels,
    })
}

/// Cells applied to both sides of the graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub cells: Vec<Vec<u64>>,
}

/// {0 and the nonzero squares} and {non-squares}.
pub fn qr_partition(field: &PrimeField) -> Partition {
    let (qr, nqr): (Vec<u64>, Vec<u64>) = (0..field.p()).partition(|&x| field.is_qr(x));
    Partition { cells: vec![qr, nqr] }
}

pub fn trivial_partition(field: &PrimeField) -> Partition {
    Partition {
        cells: vec![(0..field.p()).collect()],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairCertificate {
    pub i: usize,
    pub j: usize,
    pub edges: u64,
    pub d: f64,
    pub sigma: f64,
    /// log(sigma / (|V_i| |W_j|)^(1/2)) / log p; absent when sigma = 0.
    pub exponent: Option<f64>,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyCertificate {
    pub p: u64,
    pub kind: String,
    pub cells: Vec<u64>,
    pub pairs: Vec<PairCertificate>,
    #[serde(skip)]
    pub cell_members: Vec<Vec<u64>>,
}

impl DiscrepancyCertificate {
    /// The certified bound for subsets of cells i and j.
    pub fn bound(&self, i: usize, j: usize, size_a: usize, size_b: usize) -> Option<f64> {
        let pair = self.pairs.iter().find(|c| c.i == i && c.j == j)?;
        Some(pair.sigma * ((size_a * size_b) as f64).sqrt())
    }
}

/// Dense 0/1 incidence array of a cell pair, row-major and transposed.
struct Block {
    rows: usize,
    cols: usize,
    by_row: Vec<u8>,
    by_col: Vec<u8>,
}

impl Block {
    fn new(graph: &DefinableGraph, vs: &[u64], ws: &[u64]) -> Block {
        let (rows, cols) = (vs.len(), ws.len());
        let by_row: Vec<u8> = par::map_blocks(rows, par::block_size(rows, 8), |r| {
            let mut out = Vec::with_capacity(r.len() * cols);
            for i in r {
                out.extend(ws.iter().map(|&w| graph.edge(vs[i], w) as u8));
            }
            out
        })
        .concat();
        let mut by_col = vec![0u8; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                by_col[j * rows + i] = by_row[i * cols + j];
            }
        }
        Block {
            rows,
            cols,
            by_row,
            by_col,
        }
    }

    fn edges(&self) -> u64 {
        self.by_row.iter().map(|&b| b as u64).sum()
    }
}

/// y = (E - d J) x for an incidence array stored as `n_out` rows of length
/// x.len().
fn centered_apply(data: &[u8], n_out: usize, d: f64, x: &[f64]) -> Vec<f64> {
    let n_in = x.len();
    let total: f64 = x.iter().sum();
    par::map_blocks(n_out, par::block_size(n_out, 16), |r| {
        r.map(|i| {
            let row = &data[i * n_in..(i + 1) * n_in];
            let s: f64 = row.iter().zip(x).filter(|(&e, _)| e == 1).map(|(_, v)| v).sum();
            s - d * total
        })
        .collect::<Vec<_>>()
    })
    .concat()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Top singular value of E - d J by power iteration on its Gram matrix.
fn top_singular_value(block: &Block, d: f64, tol: f64) -> Result<(f64, usize), RegularityError> {
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<f64> = (0..block.cols).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let n0 = norm(&x);
    x.iter_mut().for_each(|v| *v /= n0);
    let mut sigma = 0.0f64;
    for it in 1..=MAX_ITERATIONS {
        let y = centered_apply(&block.by_row, block.rows, d, &x);
        let next_sigma = norm(&y);
        if next_sigma == 0.0 {
            return Ok((0.0, it));
        }
        let z = centered_apply(&block.by_col, block.cols, d, &y);
        let nz = norm(&z);
        if nz == 0.0 {
            return Ok((next_sigma, it));
        }
        x = z.into_iter().map(|v| v / nz).collect();
        if (next_sigma - sigma).abs() <= tol {
            return Ok((next_sigma, it));
        }
        sigma = next_sigma;
    }
    Err(RegularityError::ConvergenceFailure(MAX_ITERATIONS))
}

/// Densities and spectral bounds for every cell pair. Cells are first
/// intersected with the graph's vertex set; empty cells are dropped.
pub fn spectral_discrepancy(graph: &DefinableGraph, partition: &Partition) -> Result<DiscrepancyCertificate, RegularityError> {
    let p = graph.field.p();
    if p > SPECTRAL_LIMIT {
        return Err(RegularityError::BudgetExceeded {
            p,
            limit: SPECTRAL_LIMIT,
        });
    }
    let cells: Vec<Vec<u64>> = partition
        .cells
        .iter()
        .map(|c| c.iter().copied().filter(|&v| graph.in_range(v)).collect::<Vec<_>>())
        .filter(|c| !c.is_empty())
        .collect();
    let tol = 1e-9 * p as f64;
    let mut pairs = Vec::new();
    for (i, vs) in cells.iter().enumerate() {
        for (j, ws) in cells.iter().enumerate() {
            let block = Block::new(graph, vs, ws);
            let size = (vs.len() * ws.len()) as f64;
            let edges = block.edges();
            let d = edges as f64 / size;
            let (sigma, iterations) = top_singular_value(&block, d, tol)?;
            let exponent = (sigma > 0.0).then(|| (sigma / size.sqrt()).ln() / (p as f64).ln());
            pairs.push(PairCertificate {
                i,
                j,
                edges,
                d,
                sigma,
                exponent,
                iterations,
            });
        }
    }
    Ok(DiscrepancyCertificate {
        p,
        kind: graph.kind.name().to_string(),
        cells: cells.iter().map(|c| c.len() as u64).collect(),
        pairs,
        cell_members: cells,
    })
}

/// |E n (A x B)| for explicit vertex lists.
pub fn edge_count(graph: &DefinableGraph, a: &[u64], b: &[u64]) -> u64 {
    a.iter()
        .map(|&v| b.iter().filter(|&&w| graph.edge(v, w)).count() as u64)
        .sum()
}
