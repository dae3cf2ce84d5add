//! Forward Euler on the truncated Carleman system, seen as one block
//! lower-bidiagonal linear system L Y = B, and the bounds that go with it.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::carleman::{evolve_truncated, CarlemanSystem, EvolveOptions, LinearFlow, SpectrumBounds};
use crate::error::{invalid, Error, Result};
use crate::grid::norm2;
use crate::report::BoundReport;

/// Largest (m+1) 𝒩 for which L is built densely.
pub const L_DENSE_CAP: usize = 5000;

/// h <= 1 / (N^2 [4 D d (n+1)^2 + a])
pub fn max_stable_timestep(n_trunc: usize, diff: f64, d: usize, n: usize, a: f64) -> Result<f64> {
    let f1 = 4.0 * diff * d as f64 * ((n + 1) * (n + 1)) as f64 + a;
    let den = (n_trunc * n_trunc) as f64 * f1;
    if !(den > 0.0) || !den.is_finite() {
        return invalid(format!("F1 norm bound invalid: 4Dd(n+1)^2 + a = {f1}"));
    }
    Ok(1.0 / den)
}

/// Block-1 history of an Euler run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistoryState {
    pub h: f64,
    pub m: usize,
    /// y_1^k for k = 0..=m
    pub block1: Vec<Vec<f64>>,
    /// ||y^k|| of the whole lifted vector
    pub lifted_norms: Vec<f64>,
    block1_sq: Vec<f64>,
    sum_block1_sq: f64,
}

impl HistoryState {
    pub fn new(h: f64, block1: Vec<Vec<f64>>, lifted_norms: Vec<f64>) -> Result<Self> {
        if block1.is_empty() || block1.len() != lifted_norms.len() {
            return invalid("history needs matching, non-empty block and norm lists");
        }
        let block1_sq: Vec<f64> = block1.iter().map(|v| norm2(v).powi(2)).collect();
        let sum_block1_sq = block1_sq.iter().sum();
        Ok(HistoryState {
            h,
            m: block1.len() - 1,
            block1,
            lifted_norms,
            block1_sq,
            sum_block1_sq,
        })
    }

    /// ||Y_evo||^2 = Σ_k ||y_1^k||^2
    pub fn evo_norm_sq(&self) -> f64 {
        self.sum_block1_sq
    }

    pub fn block1_norm_sq(&self, k: usize) -> f64 {
        self.block1_sq[k]
    }

    pub fn final_block1(&self) -> &[f64] {
        self.block1.last().unwrap()
    }
}

/// Runs y^{k+1} = (I + A h) y^k for m = ⌈T/h⌉ steps of size T/m.
pub fn euler_evolve<F: LinearFlow + ?Sized>(flow: &F, y_in: &[f64], t_end: f64, h: f64) -> Result<HistoryState> {
    let (m, h) = step_count(t_end, h)?;
    if y_in.len() != flow.dim() {
        return invalid("lifted vector length does not match the system");
    }
    let nb = flow.base_dim();
    let mut y = y_in.to_vec();
    let mut ay = vec![0.0; y.len()];
    let mut block1 = vec![y[..nb].to_vec()];
    let mut norms = vec![flow.lifted_norm(&y)];
    for _ in 0..m {
        flow.apply(&y, &mut ay);
        for (v, d) in y.iter_mut().zip(&ay) {
            *v += h * d;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Instability("step bound violated".into()));
        }
        block1.push(y[..nb].to_vec());
        norms.push(flow.lifted_norm(&y));
    }
    HistoryState::new(h, block1, norms)
}

fn step_count(t_end: f64, h: f64) -> Result<(usize, f64)> {
    if !(h > 0.0) || !(t_end >= 0.0) {
        return invalid("need h > 0 and T >= 0");
    }
    let m = (t_end / h - 1e-9).ceil().max(0.0) as usize;
    Ok(if m == 0 { (0, h) } else { (m, t_end / m as f64) })
}

/// max_k ||ŷ(kh) - y^k|| over the whole lifted vector, with ŷ from the
/// Chebyshev propagator.
pub fn lifted_global_errors<F: LinearFlow + ?Sized>(
    flow: &F,
    spectrum: SpectrumBounds,
    y_in: &[f64],
    t_end: f64,
    h: f64,
) -> Result<Vec<f64>> {
    let (m, h) = step_count(t_end, h)?;
    if m == 0 {
        return Ok(vec![0.0]);
    }
    let mut opts = EvolveOptions::new(t_end, m);
    opts.keep_states = true;
    let exact = evolve_truncated(flow, spectrum, y_in, &opts)?.states.unwrap();
    let mut y = y_in.to_vec();
    let mut ay = vec![0.0; y.len()];
    let mut errs = vec![0.0];
    for ex in exact.iter().skip(1) {
        flow.apply(&y, &mut ay);
        for (v, d) in y.iter_mut().zip(&ay) {
            *v += h * d;
        }
        let diff: Vec<f64> = ex.iter().zip(&y).map(|(a, b)| a - b).collect();
        errs.push(flow.lifted_norm(&diff));
    }
    Ok(errs)
}

/// Dense L: identity diagonal blocks, -(I + A h) below the diagonal,
/// m + 1 block rows.
#[allow(non_snake_case)]
pub fn build_L_dense(system: &CarlemanSystem, m: usize, h: f64) -> Result<DMatrix<f64>> {
    let nd = system.dim;
    let size = (m + 1)
        .checked_mul(nd)
        .ok_or_else(|| Error::Overflow("L dimension".into()))?;
    if size > L_DENSE_CAP {
        return Err(Error::SizeCap {
            what: "L",
            size,
            cap: L_DENSE_CAP,
        });
    }
    let step = i_plus_ah(system, h)?;
    let mut l = DMatrix::identity(size, size);
    for k in 1..=m {
        l.view_mut((k * nd, (k - 1) * nd), (nd, nd)).copy_from(&(-&step));
    }
    Ok(l)
}

fn i_plus_ah(system: &CarlemanSystem, h: f64) -> Result<DMatrix<f64>> {
    let a = system.to_dense(L_DENSE_CAP)?;
    Ok(DMatrix::identity(system.dim, system.dim) + a * h)
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().svd(false, false).singular_values.max()
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionReport {
    pub bound: f64,
    pub measured: Option<f64>,
    pub l_norm: Option<f64>,
    pub report: BoundReport,
}

/// Largest eigenvalue of a symmetric positive semidefinite operator by
/// Lanczos with full reorthogonalization, run until the top Ritz value
/// settles to `rel_tol`.
fn lanczos_max(apply: &mut dyn FnMut(&[f64], &mut [f64]), n: usize, rel_tol: f64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nq = norm2(&q);
    q.iter_mut().for_each(|v| *v /= nq);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let (mut alpha, mut beta) = (Vec::new(), Vec::<f64>::new());
    let mut w = vec![0.0; n];
    let mut last = f64::NAN;
    for k in 0..n {
        apply(&basis[k], &mut w);
        let a: f64 = w.iter().zip(&basis[k]).map(|(x, y)| x * y).sum();
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
            }
        }
        let t = DMatrix::from_fn(k + 1, k + 1, |i, j| {
            if i == j {
                alpha[i]
            } else if i + 1 == j {
                beta[i]
            } else if j + 1 == i {
                beta[j]
            } else {
                0.0
            }
        });
        let top = t.symmetric_eigenvalues().max();
        let bk = norm2(&w);
        if (top - last).abs() <= rel_tol * top || bk <= 1e-14 * top.abs().max(1e-300) || k + 1 == n {
            return top;
        }
        last = top;
        beta.push(bk);
        basis.push(w.iter().map(|x| x / bk).collect());
    }
    last
}

/// σ_max(L) and σ_min(L) for L = I - S ⊗ B, applied blockwise.
fn l_extreme_singular_values(step: &DMatrix<f64>, m: usize) -> (f64, f64) {
    let nd = step.nrows();
    let size = (m + 1) * nd;
    let bt = step.transpose();
    let mv = |mat: &DMatrix<f64>, x: &[f64], out: &mut [f64]| {
        for (r, o) in out.iter_mut().enumerate() {
            *o = (0..nd).map(|c| mat[(r, c)] * x[c]).sum();
        }
    };
    let mut tmp = vec![0.0; size];
    let mut buf = vec![0.0; nd];
    // L^T L
    let mut ltl = |x: &[f64], y: &mut [f64]| {
        tmp.copy_from_slice(x);
        for k in 1..=m {
            mv(step, &x[(k - 1) * nd..k * nd], &mut buf);
            tmp[k * nd..(k + 1) * nd].iter_mut().zip(&buf).for_each(|(t, b)| *t -= b);
        }
        y.copy_from_slice(&tmp);
        for k in 0..m {
            mv(&bt, &tmp[(k + 1) * nd..(k + 2) * nd], &mut buf);
            y[k * nd..(k + 1) * nd].iter_mut().zip(&buf).for_each(|(t, b)| *t -= b);
        }
    };
    let top = lanczos_max(&mut ltl, size, 1e-13);
    let mut tmp = vec![0.0; size];
    let mut buf = vec![0.0; nd];
    // L^{-1} L^{-T}
    let mut inv = |x: &[f64], y: &mut [f64]| {
        tmp.copy_from_slice(x);
        for k in (0..m).rev() {
            mv(&bt, &tmp[(k + 1) * nd..(k + 2) * nd], &mut buf);
            tmp[k * nd..(k + 1) * nd].iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
        }
        y.copy_from_slice(&tmp);
        for k in 1..=m {
            let (head, tail) = y.split_at_mut(k * nd);
            mv(step, &head[(k - 1) * nd..], &mut buf);
            tail[..nd].iter_mut().zip(&buf).for_each(|(t, b)| *t += b);
        }
    };
    let inv_top = lanczos_max(&mut inv, size, 1e-13);
    (top.sqrt(), 1.0 / inv_top.sqrt())
}

/// κ(L) <= 2(m+1). The measurement works on the (m+1)-block structure with
/// a dense I + A h, so it needs 𝒩 within the materialization cap and
/// (m+1) 𝒩 within the L cap.
pub fn condition_bound_and_measure(system: &CarlemanSystem, m: usize, h: f64) -> ConditionReport {
    let bound = 2.0 * (m + 1) as f64;
    let mut report = BoundReport::new("condition number of L");
    let size = (m + 1).saturating_mul(system.dim);
    let step = if size > L_DENSE_CAP {
        Err(Error::SizeCap {
            what: "L",
            size,
            cap: L_DENSE_CAP,
        })
    } else {
        i_plus_ah(system, h)
    };
    match step {
        Ok(step) => {
            let (hi, lo) = l_extreme_singular_values(&step, m);
            let kappa = hi / lo;
            report.le("||L|| <= 2", hi, 2.0, 1e-12);
            report.le("kappa(L) <= 2(m+1)", kappa, bound, 1e-9 * bound);
            ConditionReport {
                bound,
                measured: Some(kappa),
                l_norm: Some(hi),
                report,
            }
        }
        Err(e) => {
            report.skip("kappa(L) <= 2(m+1)", e.to_string());
            ConditionReport {
                bound,
                measured: None,
                l_norm: None,
                report,
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityReport {
    pub h: f64,
    pub norm_i_plus_ah: f64,
    /// ||K_j|| for j = 1..=N
    pub k_norms: Vec<f64>,
    pub report: BoundReport,
    /// Per-piece bounds ||K_j|| <= 1/N. Informational: the I/N part on the
    /// other blocks keeps ||K_j|| >= 1/N, so any coupling pushes it over.
    pub decomposition: BoundReport,
}

/// ||I + A h|| <= 1 through the splitting I + A h = Σ_j K_j with
/// K_j = I/N + h (row block j of A).
pub fn stability_check(system: &CarlemanSystem, h: f64) -> Result<StabilityReport> {
    let step = i_plus_ah(system, h)?;
    let a = system.to_dense(L_DENSE_CAP)?;
    let n = system.n_trunc;
    let dim = system.dim;
    let mut k_norms = Vec::with_capacity(n);
    for j in 1..=n {
        let (r0, r1) = (system.offsets[j - 1], system.offsets[j]);
        let mut k = DMatrix::identity(dim, dim) / n as f64;
        let rows = a.rows(r0, r1 - r0) * h;
        let mut dst = k.rows_mut(r0, r1 - r0);
        dst += rows;
        k_norms.push(spectral_norm(&k));
    }
    let norm = spectral_norm(&step);
    let mut report = BoundReport::new("forward Euler stability");
    report.le("||I + A h|| <= 1", norm, 1.0, 1e-12);
    let mut decomposition = BoundReport::new("splitting I + A h = sum K_j");
    for (j, kn) in k_norms.iter().enumerate() {
        decomposition.le(format!("||K_{}|| <= 1/N", j + 1), *kn, 1.0 / n as f64, 1e-12);
    }
    decomposition.le("sum_j ||K_j|| <= 1", k_norms.iter().sum(), 1.0, 1e-12);
    Ok(StabilityReport {
        h,
        norm_i_plus_ah: norm,
        k_norms,
        report,
        decomposition,
    })
}

/// (N^2 T h / 2) (4 D d (n+1)^2 + a + |b|)^2 max_t ||ŷ(t)||
#[allow(clippy::too_many_arguments)]
pub fn global_error_bound(
    n_trunc: usize,
    diff: f64,
    d: usize,
    n: usize,
    a: f64,
    b: f64,
    t_end: f64,
    h: f64,
    max_yhat: f64,
) -> f64 {
    let f = 4.0 * diff * d as f64 * ((n + 1) * (n + 1)) as f64 + a + b.abs();
    (n_trunc * n_trunc) as f64 * t_end * h / 2.0 * f * f * max_yhat
}

/// G = sqrt(Σ_k ||y_1^k||^2 / (m+1))
#[allow(non_snake_case)]
pub fn compute_G(history: &HistoryState) -> f64 {
    (history.evo_norm_sq() / (history.m + 1) as f64).sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureReport {
    pub exact: f64,
    pub bound: Option<f64>,
    pub precondition: bool,
    pub report: BoundReport,
}

/// Exact Σ||y_1^k||^2 / Σ||y^k||^2 against 2G^2 / (16 max||ŷ||^2 + G^2).
/// The bound needs max_k ||ŷ(kh) - y^k|| <= G/2.
pub fn measurement_probability_bound(history: &HistoryState, max_yhat: f64, max_global_error: f64) -> MeasureReport {
    let g = compute_G(history);
    let total: f64 = history.lifted_norms.iter().map(|x| x * x).sum();
    let exact = if total > 0.0 { history.evo_norm_sq() / total } else { 1.0 };
    let precondition = max_global_error <= g / 2.0;
    let mut report = BoundReport::new("measurement probability");
    let bound = if precondition {
        let b = 2.0 * g * g / (16.0 * max_yhat * max_yhat + g * g);
        report.ge("P_exact >= 2G^2/(16 max||y||^2 + G^2)", exact, b, 1e-14);
        Some(b)
    } else {
        report.skip(
            "P_exact >= 2G^2/(16 max||y||^2 + G^2)",
            format!("global error {max_global_error:.3e} > G/2 = {:.3e}", g / 2.0),
        );
        None
    };
    MeasureReport {
        exact,
        bound,
        precondition,
        report,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryEstimate {
    pub value: f64,
    /// ||U_in||^{2N}
    pub prefactor_uin_2n: f64,
    pub polylog: String,
    pub polylog_factor: f64,
    /// (1/(G ε)) N^2 T^2 D^2 d^2 n^4 max||ŷ||
    pub kappa_estimate: f64,
    /// 2 Σ_j ||U_in||^j, the a priori bound on max_t ||ŷ(t)||
    pub max_yhat_bound: f64,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryInputs {
    pub diff: f64,
    pub d: usize,
    pub n: usize,
    pub n_trunc: usize,
    pub t_end: f64,
    pub epsilon: f64,
    pub g: f64,
    pub sparsity: usize,
    pub u_in_norm: f64,
    pub r_d: f64,
    pub polylog_factor: f64,
}

/// (1/(G^2 ε)) s T^2 D^2 d^2 n^4 N^3 ||U_in||^{2N}, up to polylog factors.
pub fn query_complexity_estimate(q: &QueryInputs) -> Result<QueryEstimate> {
    if !(q.g > 0.0) || !(q.epsilon > 0.0) {
        return invalid("need G > 0 and epsilon > 0");
    }
    let nt = q.n_trunc as f64;
    let core = q.sparsity as f64
        * q.t_end.powi(2)
        * q.diff.powi(2)
        * (q.d * q.d) as f64
        * (q.n as f64).powi(4)
        * nt.powi(3);
    let pre = q.u_in_norm.powi(2 * q.n_trunc as i32);
    let value = core * pre / (q.g * q.g * q.epsilon) * q.polylog_factor;
    let max_yhat_bound = 2.0 * (1..=q.n_trunc).map(|j| q.u_in_norm.powi(j as i32)).sum::<f64>();
    let kappa_estimate = nt * nt * q.t_end.powi(2) * q.diff.powi(2) * (q.d * q.d) as f64 * (q.n as f64).powi(4)
        * max_yhat_bound
        / (q.g * q.epsilon);
    Ok(QueryEstimate {
        value,
        prefactor_uin_2n: pre,
        polylog: "polylog(a D d n N s T / (G epsilon))".into(),
        polylog_factor: q.polylog_factor,
        kappa_estimate,
        max_yhat_bound,
        warning: (q.r_d >= 1.0).then(|| format!("R_D = {:.4} >= 1: convergence not guaranteed", q.r_d)),
    })
}

/// Resource summary for one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct ResourceReport {
    pub lambda1: f64,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R_D")]
    pub r_d: f64,
    pub h_bound: f64,
    pub m: usize,
    pub kappa_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa_measured: Option<f64>,
    #[serde(rename = "G")]
    pub g: f64,
    #[serde(rename = "P_measure_bound")]
    pub p_measure_bound: Option<f64>,
    pub query_estimate: f64,
    #[serde(rename = "prefactor_UinN")]
    pub prefactor_uin_n: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carleman::{build_blocks, PowerMap};
    use crate::grid::{Csr, SparseOperator};

    fn scalar(lam: f64, b: f64, n_trunc: usize) -> CarlemanSystem {
        let f1 = SparseOperator::from_csr(Csr::from_triplets(1, 1, vec![(0, 0, lam)]), true);
        build_blocks(&f1, &PowerMap::new(1, 2, b), n_trunc, 2).unwrap()
    }

    #[test]
    fn timestep_formula() {
        let h = max_stable_timestep(1, 0.2, 1, 16, 0.2).unwrap();
        assert!((h - 1.0 / (4.0 * 0.2 * 289.0 + 0.2)).abs() < 1e-18);
        let h2 = max_stable_timestep(2, 0.2, 1, 16, 0.2).unwrap();
        assert!((h / h2 - 4.0).abs() < 1e-12);
        assert!(max_stable_timestep(1, 0.0, 1, 4, -1.0).is_err());
    }

    #[test]
    fn euler_geometric_decay() {
        let s = scalar(-1.0, 0.0, 1);
        let hist = euler_evolve(&s, &[1.0], 1.0, 0.1).unwrap();
        assert_eq!(hist.m, 10);
        assert!((hist.final_block1()[0] - 0.9f64.powi(10)).abs() < 1e-15);
        let zero = scalar(0.0, 0.0, 2);
        let hist = euler_evolve(&zero, &[0.3, 0.09], 1.0, 0.25).unwrap();
        assert!(hist.block1.iter().all(|v| v[0] == 0.3));
    }

    #[test]
    fn l_small_examples() {
        let s = scalar(0.0, 0.0, 1);
        let l = build_L_dense(&s, 1, 0.5).unwrap();
        assert_eq!(l, DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 1.0]));
        let c = condition_bound_and_measure(&s, 3, 0.5);
        assert!(c.measured.unwrap() <= 8.0 && c.report.all_ok());
        let c = condition_bound_and_measure(&s, 0, 0.5);
        assert!((c.measured.unwrap() - 1.0).abs() < 1e-15 && c.bound == 2.0);
    }

    #[test]
    fn lanczos_matches_dense_svd() {
        let f1 = SparseOperator::from_csr(
            Csr::from_triplets(3, 3, vec![(0, 0, -2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, -2.0), (1, 2, 1.0), (2, 1, 1.0), (2, 2, -2.0)]),
            true,
        );
        let s = build_blocks(&f1, &PowerMap::new(3, 2, 0.4), 2, 2).unwrap();
        for m in [0, 1, 4, 15] {
            let l = build_L_dense(&s, m, 0.05).unwrap();
            let sv = l.svd(false, false).singular_values;
            let c = condition_bound_and_measure(&s, m, 0.05);
            assert!((c.l_norm.unwrap() - sv.max()).abs() < 1e-10);
            assert!((c.measured.unwrap() - sv.max() / sv.min()).abs() < 1e-8 * c.measured.unwrap());
        }
    }

    #[test]
    fn zero_step_is_identity() {
        let s = scalar(-2.0, 0.5, 3);
        let st = stability_check(&s, 0.0).unwrap();
        assert!((st.norm_i_plus_ah - 1.0).abs() < 1e-15);
    }

    #[test]
    fn g_examples() {
        let h = HistoryState::new(0.1, vec![vec![3.0, 4.0]; 5], vec![5.0; 5]).unwrap();
        assert!((compute_G(&h) - 5.0).abs() < 1e-15);
        let mut v = vec![vec![0.0, 0.0]; 4];
        v[0] = vec![3.0, 4.0];
        let h = HistoryState::new(0.1, v, vec![5.0, 0.0, 0.0, 0.0]).unwrap();
        assert!((compute_G(&h) - 2.5).abs() < 1e-15);
        let m = measurement_probability_bound(&h, 5.0, 0.0);
        assert_eq!(m.exact, 1.0);
        assert!(m.report.all_ok());
    }

    #[test]
    fn g_of_exponential_decay() {
        let s = scalar(-1.0, 0.0, 1);
        let hist = euler_evolve(&s, &[1.0], 10.0, 1e-4).unwrap();
        let g2 = compute_G(&hist).powi(2);
        assert!((g2 - 0.05).abs() / 0.05 < 1e-3);
    }

    #[test]
    fn query_scaling() {
        let mut q = QueryInputs {
            diff: 0.012,
            d: 1,
            n: 16,
            n_trunc: 2,
            t_end: 1.0,
            epsilon: 0.01,
            g: 0.3,
            sparsity: 3,
            u_in_norm: 0.4,
            r_d: 0.93,
            polylog_factor: 1.0,
        };
        let a = query_complexity_estimate(&q).unwrap();
        assert!(a.value.is_finite() && a.warning.is_none());
        assert!((a.prefactor_uin_2n - 0.4f64.powi(4)).abs() < 1e-15);
        q.t_end = 2.0;
        let b = query_complexity_estimate(&q).unwrap();
        assert!((b.value / a.value - 4.0).abs() < 1e-12);
        q.u_in_norm = 1.0;
        for nt in 1..5 {
            q.n_trunc = nt;
            assert_eq!(query_complexity_estimate(&q).unwrap().prefactor_uin_2n, 1.0);
        }
    }

    #[test]
    fn global_bound_scaling() {
        let b1 = global_error_bound(2, 0.2, 1, 8, 0.2, 1.0, 1.0, 1e-3, 1.0);
        let b2 = global_error_bound(2, 0.2, 1, 8, 0.2, 2.0, 1.0, 1e-3, 1.0);
        let base: f64 = 4.0 * 0.2 * 81.0 + 0.2;
        assert!((b2 / b1 - ((base + 2.0) / (base + 1.0)).powi(2)).abs() < 1e-12);
        assert_eq!(global_error_bound(2, 0.2, 1, 8, 0.2, 1.0, 1.0, 0.0, 1.0), 0.0);
    }
}
