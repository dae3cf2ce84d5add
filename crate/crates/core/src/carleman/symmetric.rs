//! Carleman system restricted to symmetric tensors.
//!
//! Every y_j = U^{⊗j} is invariant under permutations of its factors, and so
//! is the truncated flow started from a lifted state. Storing one value per
//! multiset {i_1 <= ... <= i_j} shrinks block j from n^j to C(n+j-1, j)
//! entries. The matrix in these coordinates is assembled explicitly as CSR.

use crate::error::{invalid, Error, Result};
use crate::grid::{Csr, SparseOperator};

use super::system::EVOLVE_CAP;

fn binomial_table(max_n: usize, max_k: usize) -> Vec<Vec<usize>> {
    let mut c = vec![vec![0usize; max_k + 1]; max_n + 1];
    for n in 0..=max_n {
        c[n][0] = 1;
        for k in 1..=max_k.min(n) {
            c[n][k] = c[n - 1][k - 1].saturating_add(if k <= n - 1 { c[n - 1][k] } else { 0 });
        }
    }
    c
}

/// Colex ranking of sorted multisets of a fixed size over {0..n-1}.
#[derive(Debug, Clone)]
struct MultisetRank {
    binom: Vec<Vec<usize>>,
}

impl MultisetRank {
    fn new(n: usize, max_len: usize) -> Self {
        MultisetRank {
            binom: binomial_table(n + max_len, max_len + 1),
        }
    }

    fn count(&self, n: usize, j: usize) -> usize {
        self.binom[n + j - 1][j]
    }

    /// `s` must be sorted ascending.
    fn rank(&self, s: &[usize]) -> usize {
        s.iter()
            .enumerate()
            .map(|(i, &c)| self.binom[c + i][i + 1])
            .sum()
    }
}

/// Calls `f` on every sorted multiset of size `j` over {0..n-1}.
fn for_each_multiset(n: usize, j: usize, mut f: impl FnMut(&[usize])) {
    let mut s = vec![0usize; j];
    loop {
        f(&s);
        // next in lexicographic order of non-decreasing sequences
        let mut k = j;
        while k > 0 && s[k - 1] == n - 1 {
            k -= 1;
        }
        if k == 0 {
            return;
        }
        let v = s[k - 1] + 1;
        for x in &mut s[k - 1..] {
            *x = v;
        }
    }
}

fn multinomial(s: &[usize]) -> f64 {
    // j! / prod(mult!)
    let mut out = 1.0;
    let mut run = 0usize;
    for (i, _) in s.iter().enumerate() {
        if i > 0 && s[i] == s[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        out *= (i + 1) as f64 / run as f64;
    }
    out
}

#[derive(Debug, Clone)]
pub struct SymmetricCarleman {
    pub n_trunc: usize,
    pub m: usize,
    pub nd: usize,
    pub coeff: f64,
    pub offsets: Vec<usize>,
    pub dim: usize,
    pub matrix: Csr,
    /// Full-layout multiplicity of each stored entry (multinomial counts).
    weights: Vec<f64>,
    /// Members of each stored multiset, block by block, in rank order.
    index_sets: Vec<Vec<u32>>,
}

impl SymmetricCarleman {
    /// `f1` is n_d x n_d; the nonlinearity is b U^{.M}.
    pub fn build(f1: &SparseOperator, b: f64, m: usize, n_trunc: usize, cap: usize) -> Result<Self> {
        if f1.nrows != f1.ncols {
            return invalid("F1 must be square");
        }
        if m < 2 || n_trunc == 0 {
            return invalid("need M >= 2 and N >= 1");
        }
        let nd = f1.nrows;
        let f1 = f1.to_csr();
        let max_len = n_trunc + m;
        let rk = MultisetRank::new(nd, max_len);
        let mut offsets = vec![0usize];
        for j in 1..=n_trunc {
            let c = rk.count(nd, j);
            if c == usize::MAX {
                return Err(Error::Overflow(format!("C({}, {j})", nd + j - 1)));
            }
            let next = offsets[j - 1]
                .checked_add(c)
                .ok_or_else(|| Error::Overflow("symmetric dimension".into()))?;
            offsets.push(next);
        }
        let dim = offsets[n_trunc];
        if dim > cap {
            return Err(Error::SizeCap {
                what: "symmetric Carleman state",
                size: dim,
                cap,
            });
        }
        let mut trip = Vec::new();
        let mut weights = vec![0.0; dim];
        let mut index_sets = Vec::with_capacity(n_trunc);
        let mut buf = Vec::with_capacity(max_len);
        for j in 1..=n_trunc {
            let mut sets = vec![0u32; (offsets[j] - offsets[j - 1]) * j];
            for_each_multiset(nd, j, |s| {
                let r = rk.rank(s);
                let row = offsets[j - 1] + r;
                weights[row] = multinomial(s);
                for (slot, &x) in sets[r * j..(r + 1) * j].iter_mut().zip(s) {
                    *slot = x as u32;
                }
                for nu in 0..j {
                    for (k, v) in f1.row(s[nu]) {
                        buf.clear();
                        buf.extend_from_slice(s);
                        buf[nu] = k;
                        buf.sort_unstable();
                        trip.push((row, offsets[j - 1] + rk.rank(&buf), v));
                    }
                }
                let src = j + m - 1;
                if src <= n_trunc {
                    for nu in 0..j {
                        buf.clear();
                        buf.extend_from_slice(s);
                        for _ in 1..m {
                            buf.push(s[nu]);
                        }
                        buf.sort_unstable();
                        trip.push((row, offsets[src - 1] + rk.rank(&buf), b));
                    }
                }
            });
            index_sets.push(sets);
        }
        let matrix = Csr::from_triplets(dim, dim, trip);
        Ok(SymmetricCarleman {
            n_trunc,
            m,
            nd,
            coeff: b,
            offsets,
            dim,
            matrix,
            weights,
            index_sets,
        })
    }

    pub fn build_default(f1: &SparseOperator, b: f64, m: usize, n_trunc: usize) -> Result<Self> {
        Self::build(f1, b, m, n_trunc, EVOLVE_CAP)
    }

    /// Stored dimension without building anything.
    pub fn stored_dimension(nd: usize, n_trunc: usize) -> Result<usize> {
        let rk = MultisetRank::new(nd, n_trunc + 1);
        let mut total: usize = 0;
        for j in 1..=n_trunc {
            let c = rk.count(nd, j);
            if c == usize::MAX {
                return Err(Error::Overflow("symmetric dimension".into()));
            }
            total = total
                .checked_add(c)
                .ok_or_else(|| Error::Overflow("symmetric dimension".into()))?;
        }
        Ok(total)
    }

    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        self.matrix.matvec(y, out);
    }

    pub fn lift(&self, u: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim);
        for (j, sets) in self.index_sets.iter().enumerate() {
            let len = j + 1;
            for s in sets.chunks(len) {
                out.push(s.iter().map(|&i| u[i as usize]).product());
            }
        }
        out
    }

    /// Full-layout l2 norm; `base_weight` multiplies each factor (2^d for a
    /// reflection-reduced base grid, 1 otherwise).
    pub fn lifted_norm(&self, y: &[f64], base_weight: f64) -> f64 {
        let mut s = 0.0;
        for j in 1..=self.n_trunc {
            let w = base_weight.powi(j as i32);
            for i in self.offsets[j - 1]..self.offsets[j] {
                s += w * self.weights[i] * y[i] * y[i];
            }
        }
        s.sqrt()
    }

    /// Full-layout l2 norm of one block.
    pub fn block_norm(&self, y: &[f64], j: usize, base_weight: f64) -> f64 {
        let w = base_weight.powi(j as i32);
        (self.offsets[j - 1]..self.offsets[j])
            .map(|i| w * self.weights[i] * y[i] * y[i])
            .sum::<f64>()
            .sqrt()
    }
}
