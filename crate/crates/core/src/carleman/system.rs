//! Full tensor-layout Carleman system, matrix-free.

use nalgebra::DMatrix;

use crate::error::{invalid, Error, Result};
use crate::grid::{apply_axis_add, Csr, SparseOperator, MATERIALIZE_CAP};

/// Default cap on the lifted dimension for vector-only work.
pub const EVOLVE_CAP: usize = 200_000;

/// F_M: output r reads input multi-index (r, ..., r) with weight `coeff`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerMap {
    pub dim: usize,
    pub degree: usize,
    pub coeff: f64,
}

impl PowerMap {
    pub fn new(dim: usize, degree: usize, coeff: f64) -> Self {
        PowerMap { dim, degree, coeff }
    }

    /// Flat offset of (r, ..., r) divided by r: 1 + n + ... + n^{M-1}.
    pub fn diagonal_stride(&self) -> usize {
        (0..self.degree).map(|k| self.dim.pow(k as u32)).sum()
    }

    /// out += F_M x, with x of length dim^M.
    pub fn apply_add(&self, x: &[f64], out: &mut [f64]) {
        let s = self.diagonal_stride();
        for (r, o) in out.iter_mut().enumerate() {
            *o += self.coeff * x[r * s];
        }
    }

    pub fn to_csr(&self, cap: usize) -> Result<Csr> {
        let cols = checked_pow(self.dim, self.degree)?;
        if cols > cap {
            return Err(Error::SizeCap {
                what: "F_M",
                size: cols,
                cap,
            });
        }
        let s = self.diagonal_stride();
        let t = (0..self.dim).map(|r| (r, r * s, self.coeff)).collect();
        Ok(Csr::from_triplets(self.dim, cols, t))
    }
}

fn checked_pow(base: usize, e: usize) -> Result<usize> {
    let mut p: usize = 1;
    for _ in 0..e {
        p = p
            .checked_mul(base)
            .ok_or_else(|| Error::Overflow(format!("{base}^{e}")))?;
    }
    Ok(p)
}

/// 𝒩 = n_d + n_d^2 + ... + n_d^N, overflow-checked.
pub fn carleman_dimension(nd: usize, n_trunc: usize) -> Result<usize> {
    if nd == 0 || n_trunc == 0 {
        return invalid("need n_d >= 1 and N >= 1");
    }
    let mut total: usize = 0;
    let mut p: usize = 1;
    for j in 1..=n_trunc {
        p = p
            .checked_mul(nd)
            .ok_or_else(|| Error::Overflow(format!("{nd}^{j}")))?;
        total = total
            .checked_add(p)
            .ok_or_else(|| Error::Overflow(format!("sum of {nd}^j up to j = {n_trunc}")))?;
    }
    Ok(total)
}

/// Truncated Carleman matrix in the stacked layout [y_1; y_2; ...; y_N],
/// y_j = U^{⊗j} with the first tensor factor slowest.
#[derive(Debug, Clone)]
pub struct CarlemanSystem {
    pub n_trunc: usize,
    pub m: usize,
    pub nd: usize,
    pub f1: Csr,
    pub fm: PowerMap,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

pub fn build_blocks(f1: &SparseOperator, fm: &PowerMap, n_trunc: usize, m: usize) -> Result<CarlemanSystem> {
    if f1.nrows != f1.ncols {
        return invalid("F1 must be square");
    }
    if fm.dim != f1.nrows || fm.degree != m {
        return invalid("F_M does not match F1 dimension or degree M");
    }
    if m < 2 {
        return invalid("M must be at least 2");
    }
    let nd = f1.nrows;
    let dim = carleman_dimension(nd, n_trunc)?;
    let mut offsets = Vec::with_capacity(n_trunc + 1);
    let mut acc = 0;
    offsets.push(0);
    for j in 1..=n_trunc {
        acc += nd.pow(j as u32);
        offsets.push(acc);
    }
    Ok(CarlemanSystem {
        n_trunc,
        m,
        nd,
        f1: f1.to_csr(),
        fm: *fm,
        offsets,
        dim,
    })
}

impl CarlemanSystem {
    pub fn block<'a>(&self, y: &'a [f64], j: usize) -> &'a [f64] {
        &y[self.offsets[j - 1]..self.offsets[j]]
    }

    /// out = A y
    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let n = self.nd;
        for j in 1..=self.n_trunc {
            let (o0, o1) = (self.offsets[j - 1], self.offsets[j]);
            let (yj, oj) = (&y[o0..o1], &mut out[o0..o1]);
            for nu in 0..j {
                apply_axis_add(&self.f1, 1.0, yj, oj, n.pow(nu as u32), n.pow((j - 1 - nu) as u32));
            }
            let src = j + self.m - 1;
            if src <= self.n_trunc {
                let ys = &y[self.offsets[src - 1]..self.offsets[src]];
                let s = self.fm.diagonal_stride();
                let nm = n.pow(self.m as u32);
                let b = self.fm.coeff;
                for nu in 0..j {
                    let outer = n.pow(nu as u32);
                    let inner = n.pow((j - 1 - nu) as u32);
                    for pre in 0..outer {
                        for r in 0..n {
                            let dst = (pre * n + r) * inner;
                            let from = (pre * nm + r * s) * inner;
                            for post in 0..inner {
                                oj[dst + post] += b * ys[from + post];
                            }
                        }
                    }
                }
            }
        }
    }

    /// Dense A, refused above the materialization cap.
    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<f64>> {
        if self.dim > cap {
            return Err(Error::SizeCap {
                what: "Carleman matrix",
                size: self.dim,
                cap,
            });
        }
        let mut m = DMatrix::zeros(self.dim, self.dim);
        let mut e = vec![0.0; self.dim];
        let mut col = vec![0.0; self.dim];
        for c in 0..self.dim {
            e[c] = 1.0;
            self.apply(&e, &mut col);
            e[c] = 0.0;
            for r in 0..self.dim {
                m[(r, c)] = col[r];
            }
        }
        Ok(m)
    }

    pub fn to_dense_default(&self) -> Result<DMatrix<f64>> {
        self.to_dense(MATERIALIZE_CAP)
    }

    /// Dense block A_j^k (rows of block j, columns of block k).
    pub fn dense_block(&self, j: usize, k: usize) -> Result<DMatrix<f64>> {
        let a = self.to_dense(MATERIALIZE_CAP)?;
        let (r0, r1) = (self.offsets[j - 1], self.offsets[j]);
        let (c0, c1) = (self.offsets[k - 1], self.offsets[k]);
        Ok(a.view((r0, c0), (r1 - r0, c1 - c0)).into_owned())
    }

    /// Full-layout l2 norm of a lifted vector.
    pub fn lifted_norm(&self, y: &[f64]) -> f64 {
        crate::grid::norm2(y)
    }
}

/// ŷ_in = [U; U⊗U; ...; U^{⊗N}]
pub fn lift_initial(u: &[f64], n_trunc: usize, cap: usize) -> Result<Vec<f64>> {
    let dim = carleman_dimension(u.len().max(1), n_trunc)?;
    if dim > cap {
        return Err(Error::SizeCap {
            what: "lifted vector",
            size: dim,
            cap,
        });
    }
    let mut out = Vec::with_capacity(dim);
    let mut block = u.to_vec();
    out.extend_from_slice(&block);
    for _ in 2..=n_trunc {
        let mut next = Vec::with_capacity(block.len() * u.len());
        for &x in &block {
            for &v in u {
                next.push(x * v);
            }
        }
        out.extend_from_slice(&next);
        block = next;
    }
    Ok(out)
}
