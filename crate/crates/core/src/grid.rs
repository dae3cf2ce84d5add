//! Uniform grids on the unit cube, discrete Laplacians and norm helpers.
//!
//! Layout: a multi-index (l_1, ..., l_d) maps to the flat index
//! `l_1 n^{d-1} + ... + l_d`, so axis 1 is the slowest. Dirichlet axes come
//! first, periodic axes after them.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

/// Default cap on rows for dense materialization.
pub const MATERIALIZE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Periodic,
}

/// Where `u0` is sampled on a Dirichlet axis.
///
/// `Interior` uses x_j = (j+1)/(n+1), the nodes the Laplacian is built on.
/// `Endpoints` uses x_j = j/(n-1), which puts the first and last sample on the
/// boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    #[default]
    Interior,
    Endpoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    pub d: usize,
    pub d1: usize,
    pub d2: usize,
}

impl GridSpec {
    pub fn new(n: usize, d: usize, d1: usize) -> Result<Self> {
        if n < 2 {
            return invalid(format!("n = {n} < 2"));
        }
        if d == 0 {
            return invalid("d must be at least 1");
        }
        if d1 > d {
            return invalid(format!("d1 = {d1} exceeds d = {d}"));
        }
        let g = GridSpec { n, d, d1, d2: d - d1 };
        g.checked_size()?;
        Ok(g)
    }

    pub fn dirichlet(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, d)
    }

    pub fn periodic(n: usize, d: usize) -> Result<Self> {
        Self::new(n, d, 0)
    }

    fn checked_size(&self) -> Result<usize> {
        let mut s: usize = 1;
        for _ in 0..self.d {
            s = s
                .checked_mul(self.n)
                .ok_or_else(|| Error::Overflow(format!("{}^{}", self.n, self.d)))?;
        }
        Ok(s)
    }

    /// n_d = n^d.
    pub fn size(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn axis_bcs(&self) -> Vec<BoundaryKind> {
        (0..self.d).map(|k| self.axis_bc(k)).collect()
    }

    pub fn axis_bc(&self, axis: usize) -> BoundaryKind {
        if axis < self.d1 {
            BoundaryKind::Dirichlet
        } else {
            BoundaryKind::Periodic
        }
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        match self.axis_bc(axis) {
            BoundaryKind::Dirichlet => 1.0 / (self.n as f64 + 1.0),
            BoundaryKind::Periodic => 1.0 / self.n as f64,
        }
    }

    /// Coordinate of node `l` on `axis`.
    pub fn node(&self, axis: usize, l: usize, sampling: Sampling) -> f64 {
        let n = self.n as f64;
        match (self.axis_bc(axis), sampling) {
            (BoundaryKind::Dirichlet, Sampling::Interior) => (l as f64 + 1.0) / (n + 1.0),
            (BoundaryKind::Dirichlet, Sampling::Endpoints) => l as f64 / (n - 1.0),
            (BoundaryKind::Periodic, _) => l as f64 / n,
        }
    }

    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.d];
        for k in (0..self.d).rev() {
            out[k] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn ravel(&self, multi: &[usize]) -> usize {
        multi.iter().fold(0, |acc, &l| acc * self.n + l)
    }

    /// Product of the per-axis spacings.
    pub fn cell_volume(&self) -> f64 {
        (0..self.d).map(|k| self.spacing(k)).product()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField {
    pub values: Vec<f64>,
    pub grid: GridSpec,
}

impl SpatialField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.size() {
            return invalid(format!(
                "field length {} does not match n^d = {}",
                values.len(),
                grid.size()
            ));
        }
        Ok(SpatialField { values, grid })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        SpatialField {
            values: vec![0.0; grid.size()],
            grid,
        }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        SpatialField {
            values: vec![c; grid.size()],
            grid,
        }
    }

    pub fn from_fn(grid: GridSpec, sampling: Sampling, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; grid.d];
        let values = (0..grid.size())
            .map(|i| {
                for (k, l) in grid.unravel(i).into_iter().enumerate() {
                    x[k] = grid.node(k, l, sampling);
                }
                f(&x)
            })
            .collect();
        SpatialField { values, grid }
    }

    pub fn norm(&self, p: f64) -> Result<Norm> {
        norms(&self.values, self.grid.n, self.grid.d, p)
    }
}

/// Raw l_p norm and its rescaled L^p estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Norm {
    pub raw: f64,
    pub rescaled: f64,
}

pub fn norms(v: &[f64], n: usize, d: usize, p: f64) -> Result<Norm> {
    if p.is_nan() || p < 1.0 {
        return invalid(format!("p = {p} < 1"));
    }
    if p.is_infinite() {
        let m = norm_inf(v);
        return Ok(Norm { raw: m, rescaled: m });
    }
    let raw = if p == 2.0 {
        norm2(v)
    } else {
        v.iter().map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    };
    let rescaled = raw / (n as f64).powf(d as f64 / p);
    Ok(Norm { raw, rescaled })
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    /// Builds from (row, col, value) triplets; duplicates are summed and
    /// explicit zeros dropped.
    pub fn from_triplets(nrows: usize, ncols: usize, mut t: Vec<(usize, usize, f64)>) -> Self {
        t.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut indptr = vec![0; nrows + 1];
        let mut indices = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(t.len());
        for (r, c, v) in t {
            assert!(r < nrows && c < ncols, "triplet out of range");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                rows.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for k in 0..indices.len() {
            if values[k] != 0.0 {
                keep_idx.push(indices[k]);
                keep_val.push(values[k]);
                indptr[rows[k] + 1] += 1;
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Csr {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        }
    }

    pub fn identity(n: usize) -> Self {
        Csr {
            nrows: n,
            ncols: n,
            indptr: (0..=n).collect(),
            indices: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (s, e) = (self.indptr[r], self.indptr[r + 1]);
        self.indices[s..e]
            .iter()
            .copied()
            .zip(self.values[s..e].iter().copied())
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[r] = acc;
        }
    }

    /// y += alpha A x
    pub fn matvec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for k in self.indptr[r]..self.indptr[r + 1] {
                acc += self.values[k] * x[self.indices[k]];
            }
            y[r] += alpha * acc;
        }
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.nrows)
            .map(|r| self.indptr[r + 1] - self.indptr[r])
            .max()
            .unwrap_or(0)
    }

    pub fn max_col_nnz(&self) -> usize {
        let mut c = vec![0usize; self.ncols];
        for &j in &self.indices {
            c[j] += 1;
        }
        c.into_iter().max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows, self.ncols);
        for r in 0..self.nrows {
            for (c, v) in self.row(r) {
                m[(r, c)] += v;
            }
        }
        m
    }

    pub fn scaled(&self, s: f64) -> Csr {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// Gershgorin interval enclosing the spectrum of a symmetric matrix.
    pub fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.nrows {
            let mut diag = 0.0;
            let mut off = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    diag += v;
                } else {
                    off += v.abs();
                }
            }
            lo = lo.min(diag - off);
            hi = hi.max(diag + off);
        }
        (lo, hi)
    }
}

/// Adds `alpha * (I_outer ⊗ op ⊗ I_inner) x` into `y`.
pub fn apply_axis_add(op: &Csr, alpha: f64, x: &[f64], y: &mut [f64], outer: usize, inner: usize) {
    let n = op.nrows;
    debug_assert_eq!(x.len(), outer * n * inner);
    for a in 0..outer {
        let base = a * n * inner;
        for i in 0..n {
            let yrow = base + i * inner;
            for (j, v) in op.row(i) {
                let w = alpha * v;
                let xrow = base + j * inner;
                for c in 0..inner {
                    y[yrow + c] += w * x[xrow + c];
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorForm {
    Csr(Csr),
    /// scale * (sum over axes of I ⊗ .. ⊗ factor_k ⊗ .. ⊗ I) + shift * I
    KroneckerSum {
        factors: Vec<Csr>,
        scale: f64,
        shift: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    pub nrows: usize,
    pub ncols: usize,
    pub form: OperatorForm,
    pub symmetric: bool,
}

impl SparseOperator {
    pub fn from_csr(csr: Csr, symmetric: bool) -> Self {
        SparseOperator {
            nrows: csr.nrows,
            ncols: csr.ncols,
            form: OperatorForm::Csr(csr),
            symmetric,
        }
    }

    pub fn kronecker_sum(factors: Vec<Csr>) -> Self {
        let dim = factors.iter().map(|f| f.nrows).product();
        SparseOperator {
            nrows: dim,
            ncols: dim,
            form: OperatorForm::KroneckerSum {
                factors,
                scale: 1.0,
                shift: 0.0,
            },
            symmetric: true,
        }
    }

    /// Returns `scale * self + shift * I`.
    pub fn affine(&self, scale: f64, shift: f64) -> SparseOperator {
        let form = match &self.form {
            OperatorForm::KroneckerSum {
                factors,
                scale: s0,
                shift: h0,
            } => OperatorForm::KroneckerSum {
                factors: factors.clone(),
                scale: scale * s0,
                shift: scale * h0 + shift,
            },
            OperatorForm::Csr(c) => {
                let mut t = Vec::with_capacity(c.nnz() + c.nrows);
                for r in 0..c.nrows {
                    for (j, v) in c.row(r) {
                        t.push((r, j, scale * v));
                    }
                    t.push((r, r, shift));
                }
                OperatorForm::Csr(Csr::from_triplets(c.nrows, c.ncols, t))
            }
        };
        SparseOperator {
            nrows: self.nrows,
            ncols: self.ncols,
            form,
            symmetric: self.symmetric,
        }
    }

    /// y = A x, matrix-free for the Kronecker form.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        match &self.form {
            OperatorForm::Csr(c) => c.matvec(x, y),
            OperatorForm::KroneckerSum {
                factors,
                scale,
                shift,
            } => {
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi = shift * xi;
                }
                let mut outer = 1;
                let mut inner: usize = self.nrows;
                for f in factors {
                    inner /= f.nrows;
                    apply_axis_add(f, *scale, x, y, outer, inner);
                    outer *= f.nrows;
                }
            }
        }
    }

    /// Explicit sparse form; always available (nnz is linear in the size).
    pub fn to_csr(&self) -> Csr {
        match &self.form {
            OperatorForm::Csr(c) => c.clone(),
            OperatorForm::KroneckerSum {
                factors,
                scale,
                shift,
            } => {
                let dims: Vec<usize> = factors.iter().map(|f| f.nrows).collect();
                let total: usize = dims.iter().product();
                let mut t = Vec::new();
                let mut inner = total;
                let mut outer = 1;
                for (k, f) in factors.iter().enumerate() {
                    inner /= dims[k];
                    for a in 0..outer {
                        for i in 0..dims[k] {
                            for (j, v) in f.row(i) {
                                for c in 0..inner {
                                    let r = (a * dims[k] + i) * inner + c;
                                    let col = (a * dims[k] + j) * inner + c;
                                    t.push((r, col, scale * v));
                                }
                            }
                        }
                    }
                    outer *= dims[k];
                }
                if *shift != 0.0 {
                    for r in 0..total {
                        t.push((r, r, *shift));
                    }
                }
                Csr::from_triplets(total, total, t)
            }
        }
    }

    pub fn to_dense(&self, cap: usize) -> Result<DMatrix<f64>> {
        if self.nrows > cap {
            return Err(Error::SizeCap {
                what: "dense operator",
                size: self.nrows,
                cap,
            });
        }
        Ok(self.to_csr().to_dense())
    }

    /// Declared sparsity: max nonzeros in any row or column.
    pub fn sparsity(&self) -> usize {
        match &self.form {
            OperatorForm::Csr(c) => c.max_row_nnz().max(c.max_col_nnz()),
            OperatorForm::KroneckerSum { factors, .. } => {
                1 + factors
                    .iter()
                    .map(|f| f.max_row_nnz().saturating_sub(1))
                    .sum::<usize>()
            }
        }
    }
}

/// 1-D discrete Laplacian.
pub fn laplacian_1d_csr(n: usize, bc: BoundaryKind) -> Result<Csr> {
    if n < 2 {
        return invalid(format!("n = {n} < 2"));
    }
    let mut t = Vec::with_capacity(3 * n);
    match bc {
        BoundaryKind::Dirichlet => {
            let s = ((n + 1) * (n + 1)) as f64;
            for i in 0..n {
                t.push((i, i, -2.0 * s));
                if i > 0 {
                    t.push((i, i - 1, s));
                }
                if i + 1 < n {
                    t.push((i, i + 1, s));
                }
            }
        }
        BoundaryKind::Periodic => {
            let s = (n * n) as f64;
            for i in 0..n {
                t.push((i, i, -2.0 * s));
                t.push((i, (i + n - 1) % n, s));
                t.push((i, (i + 1) % n, s));
            }
        }
    }
    Ok(Csr::from_triplets(n, n, t))
}

pub fn build_laplacian_1d(n: usize, bc: BoundaryKind) -> Result<SparseOperator> {
    Ok(SparseOperator::from_csr(laplacian_1d_csr(n, bc)?, true))
}

pub fn build_laplacian_nd(spec: &GridSpec) -> Result<SparseOperator> {
    let factors = spec
        .axis_bcs()
        .into_iter()
        .map(|bc| laplacian_1d_csr(spec.n, bc))
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseOperator::kronecker_sum(factors))
}

/// Largest eigenvalue of the 1-D Laplacian.
pub fn mu1(n: usize, bc: BoundaryKind) -> f64 {
    match bc {
        BoundaryKind::Dirichlet => {
            let np1 = n as f64 + 1.0;
            -4.0 * np1 * np1 * (PI / (2.0 * np1)).sin().powi(2)
        }
        BoundaryKind::Periodic => 0.0,
    }
}

/// Second Dirichlet eigenvalue, 4 mu1 cos^2(pi/(2n+2)).
pub fn mu2(n: usize) -> f64 {
    let np1 = n as f64 + 1.0;
    4.0 * mu1(n, BoundaryKind::Dirichlet) * (PI / (2.0 * np1)).cos().powi(2)
}

/// All eigenvalues of the 1-D Laplacian in descending order.
pub fn laplacian_1d_eigenvalues(n: usize, bc: BoundaryKind) -> Vec<f64> {
    let mut ev: Vec<f64> = match bc {
        BoundaryKind::Dirichlet => {
            let np1 = n as f64 + 1.0;
            (1..=n)
                .map(|k| -4.0 * np1 * np1 * (k as f64 * PI / (2.0 * np1)).sin().powi(2))
                .collect()
        }
        BoundaryKind::Periodic => {
            let nf = n as f64;
            (0..n)
                .map(|k| -4.0 * nf * nf * (k as f64 * PI / nf).sin().powi(2))
                .collect()
        }
    };
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

/// Reflection parity of a field about the centre of a Dirichlet axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Restriction of reflection-symmetric fields to the first half of every axis.
///
/// The reaction-diffusion flow on an all-Dirichlet grid commutes with the
/// reflection x_k -> 1 - x_k, so a field with a fixed parity on every axis
/// keeps it, provided the power nonlinearity preserves it (always for even,
/// only for odd M when odd). The half-grid operator is the Kronecker sum of
/// 1-D Laplacians on n/2 points whose last diagonal entry absorbs the mirror
/// neighbour.
#[derive(Debug, Clone, PartialEq)]
pub struct Reflection {
    pub grid: GridSpec,
    pub parity: Vec<Parity>,
}

impl Reflection {
    pub fn half(&self) -> usize {
        self.grid.n / 2
    }

    pub fn reduced_size(&self) -> usize {
        self.half().pow(self.grid.d as u32)
    }

    /// Number of full-grid points each reduced point stands for.
    pub fn multiplicity(&self) -> f64 {
        (1usize << self.grid.d) as f64
    }

    /// Finds a parity pattern that `u` satisfies to `rel_tol` and that the
    /// degree-`m` nonlinearity preserves.
    pub fn detect(u: &SpatialField, m: usize, rel_tol: f64) -> Option<Reflection> {
        let g = u.grid;
        if g.d1 != g.d || g.n % 2 != 0 {
            return None;
        }
        let scale = norm_inf(&u.values).max(f64::MIN_POSITIVE);
        let mut parity = Vec::with_capacity(g.d);
        for axis in 0..g.d {
            let mut found = None;
            for p in [Parity::Even, Parity::Odd] {
                if p == Parity::Odd && m % 2 == 0 {
                    continue;
                }
                let ok = (0..g.size()).all(|i| {
                    let mut mi = g.unravel(i);
                    mi[axis] = g.n - 1 - mi[axis];
                    let j = g.ravel(&mi);
                    (u.values[j] - p.sign() * u.values[i]).abs() <= rel_tol * scale
                });
                if ok {
                    found = Some(p);
                    break;
                }
            }
            parity.push(found?);
        }
        Some(Reflection { grid: g, parity })
    }

    pub fn reduced_grid(&self) -> GridSpec {
        GridSpec {
            n: self.half(),
            d: self.grid.d,
            d1: self.grid.d,
            d2: 0,
        }
    }

    pub fn reduced_laplacian(&self) -> SparseOperator {
        let n = self.grid.n;
        let h = self.half();
        let s = ((n + 1) * (n + 1)) as f64;
        let factors = self
            .parity
            .iter()
            .map(|p| {
                let mut t = Vec::with_capacity(3 * h);
                for i in 0..h {
                    let mut diag = -2.0 * s;
                    if i + 1 == h {
                        diag += p.sign() * s;
                    }
                    t.push((i, i, diag));
                    if i > 0 {
                        t.push((i, i - 1, s));
                    }
                    if i + 1 < h {
                        t.push((i, i + 1, s));
                    }
                }
                Csr::from_triplets(h, h, t)
            })
            .collect();
        SparseOperator::kronecker_sum(factors)
    }

    pub fn reduce(&self, full: &[f64]) -> Vec<f64> {
        let rg = self.reduced_grid();
        (0..rg.size())
            .map(|i| full[self.grid.ravel(&rg.unravel(i))])
            .collect()
    }

    pub fn expand(&self, reduced: &[f64]) -> Vec<f64> {
        let rg = self.reduced_grid();
        let h = self.half();
        (0..self.grid.size())
            .map(|i| {
                let mut mi = self.grid.unravel(i);
                let mut sign = 1.0;
                for (k, l) in mi.iter_mut().enumerate() {
                    if *l >= h {
                        *l = self.grid.n - 1 - *l;
                        sign *= self.parity[k].sign();
                    }
                }
                sign * reduced[rg.ravel(&mi)]
            })
            .collect()
    }

    /// l2 norm of the full field from its reduced values.
    pub fn full_norm2(&self, reduced: &[f64]) -> f64 {
        norm2(reduced) * self.multiplicity().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn dense_eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| b.partial_cmp(a).unwrap());
        e
    }

    #[test]
    fn dirichlet_n2_matrix() {
        let l = build_laplacian_1d(2, BoundaryKind::Dirichlet).unwrap();
        let m = l.to_dense(MATERIALIZE_CAP).unwrap();
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[-18.0, 9.0, 9.0, -18.0]));
    }

    #[test]
    fn periodic_n3_top_eigenvalue_is_zero() {
        let l = build_laplacian_1d(3, BoundaryKind::Periodic).unwrap();
        let e = dense_eigs(l.to_dense(MATERIALIZE_CAP).unwrap());
        assert!(e[0].abs() < 1e-12);
    }

    #[test]
    fn mu1_n3_matches_eigensolve() {
        let l = build_laplacian_1d(3, BoundaryKind::Dirichlet).unwrap();
        let e = dense_eigs(l.to_dense(MATERIALIZE_CAP).unwrap());
        let m = mu1(3, BoundaryKind::Dirichlet);
        assert!((e[0] - m).abs() < 1e-12);
        assert!((m + 64.0 * (PI / 8.0).sin().powi(2)).abs() < 1e-12);
        assert!((m + 9.3726).abs() < 1e-4);
    }

    #[test]
    fn mu1_large_n_approaches_minus_pi_squared() {
        let m = mu1(10_000, BoundaryKind::Dirichlet);
        let p2 = PI * PI;
        assert!(m > -p2);
        assert!(m < -0.999 * p2);
        assert_eq!(mu1(7, BoundaryKind::Periodic), 0.0);
    }

    #[test]
    fn closed_form_spectrum() {
        for n in 2..=64 {
            for bc in [BoundaryKind::Dirichlet, BoundaryKind::Periodic] {
                let l = build_laplacian_1d(n, bc).unwrap();
                let e = dense_eigs(l.to_dense(MATERIALIZE_CAP).unwrap());
                let c = laplacian_1d_eigenvalues(n, bc);
                let scale = 4.0 * ((n + 1) * (n + 1)) as f64;
                for (a, b) in e.iter().zip(&c) {
                    assert!((a - b).abs() <= 1e-10 * scale, "n={n} {bc:?}");
                }
            }
        }
    }

    #[test]
    fn kron_2x2_dirichlet() {
        let g = GridSpec::dirichlet(2, 2).unwrap();
        let m = build_laplacian_nd(&g).unwrap().to_dense(100).unwrap();
        let d = laplacian_1d_csr(2, BoundaryKind::Dirichlet).unwrap().to_dense();
        let i = DMatrix::<f64>::identity(2, 2);
        let expect = d.kronecker(&i) + i.kronecker(&d);
        assert_eq!(m, expect);
    }

    #[test]
    fn kron_sum_eigenvalues_are_sums() {
        for n in 2..=4 {
            for d in 1..=3 {
                for d1 in 0..=d {
                    let g = GridSpec::new(n, d, d1).unwrap();
                    let e = dense_eigs(build_laplacian_nd(&g).unwrap().to_dense(100).unwrap());
                    let per: Vec<Vec<f64>> = g
                        .axis_bcs()
                        .into_iter()
                        .map(|bc| laplacian_1d_eigenvalues(n, bc))
                        .collect();
                    let mut sums = vec![0.0];
                    for ev in &per {
                        sums = sums
                            .iter()
                            .flat_map(|s| ev.iter().map(move |x| s + x))
                            .collect();
                    }
                    sums.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    for (a, b) in e.iter().zip(&sums) {
                        assert!((a - b).abs() < 1e-9, "n={n} d={d} d1={d1}");
                    }
                }
            }
        }
    }

    #[test]
    fn top_eigenvalue_2d_is_twice_mu1() {
        let g = GridSpec::dirichlet(3, 2).unwrap();
        let e = dense_eigs(build_laplacian_nd(&g).unwrap().to_dense(100).unwrap());
        assert!((e[0] - 2.0 * mu1(3, BoundaryKind::Dirichlet)).abs() < 1e-10);
    }

    #[test]
    fn applier_matches_columns() {
        let g = GridSpec::new(3, 2, 1).unwrap();
        let op = build_laplacian_nd(&g).unwrap();
        let m = op.to_dense(100).unwrap();
        for j in 0..g.size() {
            let mut e = vec![0.0; g.size()];
            e[j] = 1.0;
            let mut y = vec![0.0; g.size()];
            op.apply(&e, &mut y);
            for i in 0..g.size() {
                assert_eq!(y[i], m[(i, j)]);
            }
        }
    }

    #[test]
    fn materialization_cap() {
        let g = GridSpec::dirichlet(101, 2).unwrap();
        let op = build_laplacian_nd(&g).unwrap();
        assert!(matches!(op.to_dense(MATERIALIZE_CAP), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn rejects_small_n() {
        assert!(build_laplacian_1d(1, BoundaryKind::Dirichlet).is_err());
        assert!(GridSpec::new(1, 1, 1).is_err());
        assert!(GridSpec::new(4, 2, 3).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = GridSpec::dirichlet(4, 1).unwrap();
        let one = SpatialField::constant(g, 1.0);
        let ni = one.norm(f64::INFINITY).unwrap();
        assert_eq!((ni.raw, ni.rescaled), (1.0, 1.0));
        let n2 = one.norm(2.0).unwrap();
        assert!((n2.raw - 2.0).abs() < 1e-15 && (n2.rescaled - 1.0).abs() < 1e-15);
        assert!(one.norm(0.5).is_err());

        let gp = GridSpec::periodic(64, 1).unwrap();
        let s = SpatialField::from_fn(gp, Sampling::Interior, |x| (2.0 * PI * x[0]).sin());
        let r = s.norm(2.0).unwrap().rescaled;
        assert!((r - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ravel_round_trip() {
        let g = GridSpec::new(3, 3, 2).unwrap();
        for i in 0..g.size() {
            assert_eq!(g.ravel(&g.unravel(i)), i);
        }
        assert_eq!(g.unravel(1), vec![0, 0, 1]);
    }

    #[test]
    fn reflection_reduction_matches_full_operator() {
        let g = GridSpec::dirichlet(8, 1).unwrap();
        for (m, f) in [
            (2usize, Box::new(|x: f64| (PI * x).sin()) as Box<dyn Fn(f64) -> f64>),
            (3, Box::new(|x: f64| (2.0 * PI * x).sin())),
        ] {
            let u = SpatialField::from_fn(g, Sampling::Interior, |x| f(x[0]));
            let r = Reflection::detect(&u, m, 1e-13).unwrap();
            let op = build_laplacian_nd(&g).unwrap();
            let mut full = vec![0.0; 8];
            op.apply(&u.values, &mut full);
            let red = r.reduce(&u.values);
            let mut ry = vec![0.0; 4];
            r.reduced_laplacian().apply(&red, &mut ry);
            let back = r.expand(&ry);
            for (a, b) in full.iter().zip(&back) {
                assert!((a - b).abs() < 1e-10);
            }
            assert!((r.full_norm2(&red) - norm2(&u.values)).abs() < 1e-13);
        }
        let odd = SpatialField::from_fn(g, Sampling::Interior, |x| (2.0 * PI * x[0]).sin());
        assert!(Reflection::detect(&odd, 2, 1e-13).is_none());
    }
}
