//! Exact l∞ norms of discrete heat semigroups and the decay bounds they
//! are checked against.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;
use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::grid::{build_laplacian_1d, build_laplacian_nd, mu1, mu2, BoundaryKind, GridSpec, SparseOperator};

/// Largest operator size handled by the dense eigendecomposition.
pub const SEMIGROUP_CAP: usize = 1024;

/// e^{t op} for a symmetric operator, via one eigendecomposition.
#[derive(Debug, Clone)]
pub struct Semigroup {
    vectors: DMatrix<f64>,
    values: DVector<f64>,
}

impl Semigroup {
    pub fn new(op: &SparseOperator) -> Result<Self> {
        if !op.symmetric {
            return invalid("semigroup norms need a symmetric operator");
        }
        let dense = op.to_dense(SEMIGROUP_CAP).map_err(|e| match e {
            Error::SizeCap { size, cap, .. } => Error::SizeCap {
                what: "semigroup operator",
                size,
                cap,
            },
            other => other,
        })?;
        let e = SymmetricEigen::new(dense);
        Ok(Semigroup {
            vectors: e.eigenvectors,
            values: e.eigenvalues,
        })
    }

    pub fn exp(&self, t: f64) -> DMatrix<f64> {
        let mut scaled = self.vectors.clone();
        for (j, mut col) in scaled.column_iter_mut().enumerate() {
            col *= (t * self.values[j]).exp();
        }
        scaled * self.vectors.transpose()
    }

    /// max row absolute sum of e^{t op}
    pub fn inf_norm(&self, t: f64) -> f64 {
        self.exp(t)
            .row_iter()
            .map(|r| r.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// ||e^{t op}||∞ by dense eigendecomposition.
pub fn semigroup_inf_norm(op: &SparseOperator, t: f64) -> Result<f64> {
    Ok(Semigroup::new(op)?.inf_norm(t))
}

/// (4/π + 2 e^{μ2 t} / (e^{-2 μ1 t/π} - 1)) e^{μ1 t} for the 1-D Dirichlet
/// Laplacian on n points.
pub fn dirichlet_decay_bound(n: usize, t: f64) -> f64 {
    let m1 = mu1(n, BoundaryKind::Dirichlet);
    let m2 = mu2(n);
    let den = (-2.0 * m1 * t / std::f64::consts::PI).exp_m1();
    (4.0 / std::f64::consts::PI + 2.0 * (m2 * t).exp() / den) * (m1 * t).exp()
}

/// 1 before the breakpoint ln3 / (2 D (μ - μ1)), e^{t D d1 μ} after it.
pub fn piecewise_decay_bound(diff: f64, d1: usize, n: usize, mu: f64, t: f64) -> Result<f64> {
    let m1 = mu1(n, BoundaryKind::Dirichlet);
    if !(mu > m1) {
        return invalid(format!("mu = {mu} must exceed mu1 = {m1}"));
    }
    if d1 == 0 {
        return Ok(1.0);
    }
    Ok(if t < piecewise_breakpoint(diff, n, mu) {
        1.0
    } else {
        (t * diff * d1 as f64 * mu).exp()
    })
}

pub fn piecewise_breakpoint(diff: f64, n: usize, mu: f64) -> f64 {
    3f64.ln() / (2.0 * diff * (mu - mu1(n, BoundaryKind::Dirichlet)))
}

/// Bound on ∫_0^t ||e^{j(t-s)(D Δ_h + a)}||∞ ds, uniform in t.
pub fn integral_decay_bound(j: usize, d1: usize, a: f64, lambda1: f64, lambda: f64) -> Result<f64> {
    if j == 0 {
        return invalid("j must be at least 1");
    }
    if !(lambda1 < lambda && lambda < 0.0) {
        return invalid(format!("need lambda1 < lambda < 0, got {lambda1} and {lambda}"));
    }
    let jf = j as f64;
    let k = 3f64.ln() * d1 as f64 / (2.0 * (lambda - lambda1));
    let head = if a != 0.0 { (k * a).exp_m1() / (jf * a) } else { k / jf };
    Ok(head + 1.0 / (jf * lambda.abs()))
}

/// ∫_0^t ||e^{j s f1}||∞ ds by composite Simpson, starting at `panels`
/// and doubling until two successive values agree to `tol`.
pub fn integral_of_norms(sg: &Semigroup, j: usize, t: f64, panels: usize, tol: f64) -> f64 {
    let f = |s: f64| sg.inf_norm(j as f64 * s);
    let simpson = |k: usize| {
        let k = k + k % 2;
        let h = t / k as f64;
        let mut s = f(0.0) + f(t);
        for i in 1..k {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        s * h / 3.0
    };
    let mut k = panels.max(2);
    let mut prev = simpson(k);
    for _ in 0..6 {
        k *= 2;
        let next = simpson(k);
        if (next - prev).abs() <= tol * next.abs().max(1.0) {
            return next;
        }
        prev = next;
    }
    prev
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// ||e^{t D_h}||∞ <= 1, Dirichlet
    MaxPrinciple,
    /// ||e^{t D_h}||∞ = 1, periodic
    PeriodicUnit,
    /// eigenvalue-gap bound, Dirichlet
    DirichletDecay,
    /// 1 / e^{t D d1 μ} split at the breakpoint
    PiecewiseDecay,
    /// time integral of the shifted semigroup
    IntegralDecay,
}

impl BoundKind {
    pub fn id(self) -> &'static str {
        match self {
            BoundKind::MaxPrinciple => "max_principle",
            BoundKind::PeriodicUnit => "periodic_unit",
            BoundKind::DirichletDecay => "dirichlet_decay",
            BoundKind::PiecewiseDecay => "piecewise_decay",
            BoundKind::IntegralDecay => "integral_decay",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub n: usize,
    pub bc: BoundaryKind,
    pub t: f64,
    pub exact_norm: f64,
    pub bound: BoundKind,
    pub bound_value: f64,
    pub ok: bool,
}

/// Probe results for one (n, boundary) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayProbe {
    pub n: usize,
    pub bc: BoundaryKind,
    pub diff: f64,
    pub d1: usize,
    pub d2: usize,
    pub times: Vec<f64>,
    pub exact: Vec<f64>,
    pub rows: Vec<ProbeRow>,
}

impl DecayProbe {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| !r.ok).count()
    }
}

pub fn logspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    if k == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..k)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (k - 1) as f64))
        .collect()
}

/// Checks the 1-D semigroup of D·Δ_h against every pointwise bound at the
/// given times. For Dirichlet, the piecewise bound uses μ = μ1 / 2 and is
/// checked for d1 = 1 and, through the tensor identity, d1 = 2.
pub fn probe_1d(n: usize, bc: BoundaryKind, diff: f64, times: &[f64]) -> Result<DecayProbe> {
    if times.is_empty() || times[0] <= 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("probe times must be positive and strictly increasing");
    }
    let op = build_laplacian_1d(n, bc)?.affine(diff, 0.0);
    let sg = Semigroup::new(&op)?;
    let mut rows = Vec::new();
    let mut exact = Vec::with_capacity(times.len());
    let mut push = |t: f64, ex: f64, bound: BoundKind, value: f64, ok: bool| {
        rows.push(ProbeRow {
            n,
            bc,
            t,
            exact_norm: ex,
            bound,
            bound_value: value,
            ok,
        });
    };
    let tol = 1e-12;
    for &t in times {
        let ex = sg.inf_norm(t);
        exact.push(ex);
        match bc {
            BoundaryKind::Periodic => {
                push(t, ex, BoundKind::PeriodicUnit, 1.0, (ex - 1.0).abs() <= 1e-10);
            }
            BoundaryKind::Dirichlet => {
                push(t, ex, BoundKind::MaxPrinciple, 1.0, ex <= 1.0 + tol);
                let b = dirichlet_decay_bound(n, diff * t);
                push(t, ex, BoundKind::DirichletDecay, b, ex <= b * (1.0 + tol));
                let mu = mu1(n, BoundaryKind::Dirichlet) / 2.0;
                for d1 in [1usize, 2] {
                    let b = piecewise_decay_bound(diff, d1, n, mu, t)?;
                    let ex_d = ex.powi(d1 as i32);
                    push(t, ex_d, BoundKind::PiecewiseDecay, b, ex_d <= b * (1.0 + tol));
                }
            }
        }
    }
    let d1 = usize::from(bc == BoundaryKind::Dirichlet);
    Ok(DecayProbe {
        n,
        bc,
        diff,
        d1,
        d2: 1 - d1,
        times: times.to_vec(),
        exact,
        rows,
    })
}

/// Quadrature of the exact norms of e^{j s (D Δ_h + a)} on `grid` against
/// the uniform-in-t integral bound, at each time in `times`.
pub fn probe_integral(
    grid: &GridSpec,
    diff: f64,
    a: f64,
    lambda: f64,
    js: &[usize],
    times: &[f64],
) -> Result<Vec<ProbeRow>> {
    let lambda1 = diff * grid.d1 as f64 * mu1(grid.n, BoundaryKind::Dirichlet) + a;
    let op = build_laplacian_nd(grid)?.affine(diff, a);
    let sg = Semigroup::new(&op)?;
    let mut rows = Vec::new();
    let bc = if grid.d1 > 0 {
        BoundaryKind::Dirichlet
    } else {
        BoundaryKind::Periodic
    };
    for &j in js {
        let bound = integral_decay_bound(j, grid.d1, a, lambda1, lambda)?;
        for &t in times {
            let q = integral_of_norms(&sg, j, t, 1000, 1e-8);
            rows.push(ProbeRow {
                n: grid.n,
                bc,
                t,
                exact_norm: q,
                bound: BoundKind::IntegralDecay,
                bound_value: bound,
                ok: q <= bound * (1.0 + 1e-8),
            });
        }
    }
    Ok(rows)
}

pub fn write_probe_csv<'a, W: Write>(rows: impl IntoIterator<Item = &'a ProbeRow>, w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["n", "bc", "t", "exact_norm", "bound_lemma_id", "bound_value", "ok"])?;
    for r in rows {
        let bc = match r.bc {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Periodic => "periodic",
        };
        wr.write_record([
            r.n.to_string(),
            bc.to_string(),
            format!("{:.6e}", r.t),
            format!("{:.12e}", r.exact_norm),
            r.bound.id().to_string(),
            format!("{:.12e}", r.bound_value),
            r.ok.to_string(),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_at_time_zero() {
        let op = build_laplacian_1d(6, BoundaryKind::Dirichlet).unwrap();
        assert!((semigroup_inf_norm(&op, 0.0).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn periodic_norm_is_one() {
        let op = build_laplacian_1d(8, BoundaryKind::Periodic).unwrap();
        for t in [0.001, 0.01, 0.1] {
            assert!((semigroup_inf_norm(&op, t).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dirichlet_examples() {
        let op = build_laplacian_1d(8, BoundaryKind::Dirichlet).unwrap();
        let sg = Semigroup::new(&op).unwrap();
        assert!(sg.inf_norm(0.01) <= 1.0);
        for t in logspace(1e-4, 1.0, 25) {
            assert!(sg.inf_norm(t) <= dirichlet_decay_bound(8, t));
        }
        let op4 = build_laplacian_1d(4, BoundaryKind::Dirichlet).unwrap();
        assert!(semigroup_inf_norm(&op4, 0.05).unwrap() <= dirichlet_decay_bound(4, 0.05));
        let t = 50.0;
        let ratio = dirichlet_decay_bound(8, t) / (mu1(8, BoundaryKind::Dirichlet) * t).exp();
        assert!((ratio - 4.0 / std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn piecewise_gap_at_breakpoint() {
        let (d, n) = (0.1, 8);
        let mu = mu1(n, BoundaryKind::Dirichlet) / 2.0;
        let tb = piecewise_breakpoint(d, n, mu);
        let after = piecewise_decay_bound(d, 1, n, mu, tb).unwrap();
        let before = piecewise_decay_bound(d, 1, n, mu, tb * (1.0 - 1e-12)).unwrap();
        assert_eq!(before, 1.0);
        assert!(before / after <= 3f64.sqrt() + 1e-9);
        assert!(piecewise_decay_bound(d, 1, n, mu1(n, BoundaryKind::Dirichlet), 1.0).is_err());
        assert_eq!(piecewise_decay_bound(d, 0, n, mu, 100.0).unwrap(), 1.0);
    }

    #[test]
    fn integral_bound_branches() {
        let (l1, l) = (-2.0, -1.0);
        let a0 = integral_decay_bound(1, 1, 0.0, l1, l).unwrap();
        assert!((a0 - (3f64.ln() / 2.0 + 1.0)).abs() < 1e-15);
        let a2 = integral_decay_bound(2, 1, 0.0, l1, l).unwrap();
        assert!((a0 / a2 - 2.0).abs() < 1e-14);
        let near = integral_decay_bound(1, 1, 1e-9, l1, l).unwrap();
        assert!((near - a0).abs() < 1e-8);
        assert!(integral_decay_bound(1, 1, 0.0, l1, 0.5).is_err());
    }

    #[test]
    fn mu2_at_most_three_mu1() {
        for n in 2..=64 {
            let m1 = mu1(n, BoundaryKind::Dirichlet);
            assert!(mu2(n) <= 3.0 * m1 + 1e-12 * m1.abs());
        }
    }
}
