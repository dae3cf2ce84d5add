//! The semi-discrete reaction-diffusion system
//! U' = (D Δ_h + a I) U + b U^{.M}.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{invalid, Error, Result};
use crate::grid::{mu1, norm2, norm_inf, BoundaryKind, GridSpec, SparseOperator, SpatialField};
use crate::ode::rk4_outputs;
use crate::report::BoundReport;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RDParams {
    #[serde(rename = "D")]
    pub d: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl RDParams {
    pub fn new(d: f64, a: f64, b: f64, m: usize) -> Result<Self> {
        if !(d > 0.0) {
            return invalid(format!("D = {d} must be positive"));
        }
        if m < 2 {
            return invalid(format!("M = {m} must be at least 2"));
        }
        Ok(RDParams { d, a, b, m })
    }

    /// f(u) = a u + b u^M
    pub fn reaction(&self, u: f64) -> f64 {
        self.a * u + self.b * u.powi(self.m as i32)
    }

    /// Potential with F' = -f.
    pub fn potential(&self, u: f64) -> f64 {
        let m = self.m as i32;
        -(self.a * u * u / 2.0 + self.b * u.powi(m + 1) / (m as f64 + 1.0))
    }

    /// λ1 = D d1 μ1 + a, the largest eigenvalue of F1 = D Δ_h + a I.
    pub fn lambda1(&self, grid: &GridSpec) -> f64 {
        self.d * grid.d1 as f64 * mu1(grid.n, BoundaryKind::Dirichlet) + self.a
    }

    /// F1 = D Δ_h + a I as an operator.
    pub fn f1(&self, lap: &SparseOperator) -> SparseOperator {
        lap.affine(self.d, self.a)
    }
}

/// γ = (|a|/|b|)^{1/(M-1)}.
pub fn gamma(p: &RDParams) -> Result<f64> {
    if p.b == 0.0 {
        return Err(Error::GammaUndefined);
    }
    if p.m < 2 {
        return invalid("M must be at least 2");
    }
    Ok((p.a.abs() / p.b.abs()).powf(1.0 / (p.m as f64 - 1.0)))
}

/// Extreme real roots of f on [-2γ, 2γ].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Roots {
    pub gamma1: f64,
    pub gamma2: f64,
    /// False when f has a single real root; the invariant-region argument
    /// needs two.
    pub distinct: bool,
}

pub fn reaction_roots(p: &RDParams) -> Result<Roots> {
    let g = gamma(p)?;
    let mut roots = vec![0.0];
    if g > 0.0 {
        let (lo, hi) = (-2.0 * g, 2.0 * g);
        let k = 4000;
        let f = |u: f64| p.reaction(u);
        let mut x0 = lo;
        let mut f0 = f(x0);
        for i in 1..=k {
            let x1 = lo + (hi - lo) * i as f64 / k as f64;
            let f1 = f(x1);
            if f1 == 0.0 {
                roots.push(x1);
            } else if f0 * f1 < 0.0 {
                let (mut a, mut b, mut fa) = (x0, x1, f0);
                for _ in 0..200 {
                    let c = 0.5 * (a + b);
                    let fc = f(c);
                    if fc == 0.0 || (b - a) < 1e-17 * g {
                        a = c;
                        b = c;
                        break;
                    }
                    if fa * fc < 0.0 {
                        b = c;
                    } else {
                        a = c;
                        fa = fc;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
    }
    let gamma1 = roots.iter().copied().fold(f64::INFINITY, f64::min);
    let gamma2 = roots.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(Roots {
        gamma1,
        gamma2,
        distinct: gamma2 > gamma1,
    })
}

/// out = D Δ_h U + a U + b U^{.M}
pub fn rhs_into(p: &RDParams, lap: &SparseOperator, u: &[f64], out: &mut [f64]) {
    lap.apply(u, out);
    let m = p.m as i32;
    for (o, &x) in out.iter_mut().zip(u) {
        *o = p.d * *o + p.a * x + p.b * x.powi(m);
    }
}

pub fn rhs(p: &RDParams, lap: &SparseOperator, u: &SpatialField) -> SpatialField {
    let mut out = vec![0.0; u.values.len()];
    rhs_into(p, lap, &u.values, &mut out);
    SpatialField {
        values: out,
        grid: u.grid,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditMetric {
    /// |max_t ||U_h||_inf - max_t ||U_{h/2}||_inf|
    MaxSupNorm,
    /// max over output times of ||U_h - U_{h/2}||_inf
    Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub t_end: f64,
    pub n_out: usize,
    pub tol: f64,
    pub metric: AuditMetric,
    pub max_halvings: usize,
}

impl SolveOptions {
    pub fn new(t_end: f64, tol: f64) -> Self {
        SolveOptions {
            t_end,
            n_out: 100,
            tol,
            metric: AuditMetric::MaxSupNorm,
            max_halvings: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub grid: GridSpec,
    pub method: String,
    pub step: f64,
    pub tol: f64,
    /// Size of the last step-halving change, in the audit metric.
    pub audit_change: f64,
}

impl Trajectory {
    pub fn field(&self, i: usize) -> SpatialField {
        SpatialField {
            values: self.states[i].clone(),
            grid: self.grid,
        }
    }

    pub fn max_sup_norm(&self) -> f64 {
        self.states.iter().map(|s| norm_inf(s)).fold(0.0, f64::max)
    }

    pub fn max_l2_norm(&self) -> f64 {
        self.states.iter().map(|s| norm2(s)).fold(0.0, f64::max)
    }

    /// Writes columns t, j, value with a header row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "j", "value"])?;
        for (t, s) in self.times.iter().zip(&self.states) {
            for (j, v) in s.iter().enumerate() {
                wr.write_record([format!("{t:.17e}"), j.to_string(), format!("{v:.17e}")])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// First stored time where ||U(t)||_inf exceeds ||U(0)||_inf.
    pub fn first_sup_norm_increase(&self) -> Option<f64> {
        let u0 = norm_inf(&self.states[0]);
        self.times
            .iter()
            .zip(&self.states)
            .find(|(_, s)| norm_inf(s) > u0)
            .map(|(t, _)| *t)
    }
}

fn audit_change(metric: AuditMetric, a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    match metric {
        AuditMetric::MaxSupNorm => {
            let ma = a.iter().map(|s| norm_inf(s)).fold(0.0, f64::max);
            let mb = b.iter().map(|s| norm_inf(s)).fold(0.0, f64::max);
            (ma - mb).abs()
        }
        AuditMetric::Trajectory => a
            .iter()
            .zip(b)
            .map(|(x, y)| x.iter().zip(y).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs())))
            .fold(0.0, f64::max),
    }
}

/// Classic RK4 with a fixed step chosen by halving until the audit metric
/// changes by less than `tol`; `op` is the discrete Laplacian the system is
/// built on (possibly a reflection-reduced one).
pub fn reference_solve_op(
    p: &RDParams,
    op: &SparseOperator,
    grid: GridSpec,
    u0: &[f64],
    opts: &SolveOptions,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return invalid("tol must be positive");
    }
    if !(opts.t_end > 0.0) || opts.n_out == 0 {
        return invalid("need t_end > 0 and at least one output interval");
    }
    let dt = opts.t_end / opts.n_out as f64;
    // start near the RK4 stability edge for the stiff part
    let (lo, hi) = op.to_csr().gershgorin();
    let rho = p.d * lo.abs().max(hi.abs()) + p.a.abs() + p.m as f64 * p.b.abs() * norm_inf(u0).max(gamma(p).unwrap_or(0.0)).powi(p.m as i32 - 1);
    let h0 = if rho > 0.0 { 2.0 / rho } else { dt };
    let mut sub = ((dt / h0).ceil() as usize).max(1);
    let mut f = |y: &[f64], dy: &mut [f64]| rhs_into(p, op, y, dy);
    let mut prev = rk4_outputs(&mut f, u0, opts.t_end, opts.n_out, sub);
    for _ in 0..opts.max_halvings {
        let next = rk4_outputs(&mut f, u0, opts.t_end, opts.n_out, 2 * sub);
        sub *= 2;
        if let (Some(a), Some(b)) = (&prev, &next) {
            let change = audit_change(opts.metric, a, b);
            if change < opts.tol {
                return Ok(Trajectory {
                    times: (0..=opts.n_out).map(|k| k as f64 * dt).collect(),
                    states: next.unwrap(),
                    grid,
                    method: "rk4".into(),
                    step: dt / sub as f64,
                    tol: opts.tol,
                    audit_change: change,
                });
            }
        }
        prev = next;
    }
    Err(Error::Stiffness(format!(
        "no step met tol {:e} after {} halvings",
        opts.tol, opts.max_halvings
    )))
}

/// Reference trajectory on the full grid Laplacian.
pub fn reference_solve(
    p: &RDParams,
    grid: &GridSpec,
    u0: &SpatialField,
    t_end: f64,
    tol: f64,
) -> Result<Trajectory> {
    let lap = crate::grid::build_laplacian_nd(grid)?;
    reference_solve_op(p, &lap, *grid, &u0.values, &SolveOptions::new(t_end, tol))
}

/// Comparison and maximum principle along a trajectory.
pub fn check_maximum_principle(traj: &Trajectory, gamma1: f64, gamma2: f64, slack: f64) -> BoundReport {
    let mut r = BoundReport::new("maximum principle");
    let u0 = &traj.states[0];
    let min0 = u0.iter().copied().fold(f64::INFINITY, f64::min);
    let max0 = u0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if min0 < gamma1 || max0 > gamma2 {
        r.skip("comparison principle", "initial state outside [gamma1, gamma2]");
    } else {
        let lo = traj
            .states
            .iter()
            .flat_map(|s| s.iter().copied())
            .fold(f64::INFINITY, f64::min);
        let hi = traj
            .states
            .iter()
            .flat_map(|s| s.iter().copied())
            .fold(f64::NEG_INFINITY, f64::max);
        r.ge("min_t,j U_j(t) >= gamma1", lo, gamma1, slack);
        r.le("max_t,j U_j(t) <= gamma2", hi, gamma2, slack);
    }
    let g = gamma1.abs().max(gamma2.abs());
    if norm_inf(u0) <= g {
        r.le("max_t ||U(t)||_inf <= gamma", traj.max_sup_norm(), g, slack);
    } else {
        r.skip("max_t ||U(t)||_inf <= gamma", "||U(0)||_inf > gamma");
    }
    r
}

/// l2 decay estimates along a trajectory.
///
/// The growth bound needs ||U(0)||_inf <= γ. The non-increase bound is checked
/// whenever λ1 < 0: if |b| ||U(0)||^{M-1} + λ1 >= 0 it is the Bernoulli
/// argument, otherwise y' <= (λ1 + |b| y^{M-1}) y is already negative at
/// y = ||U(0)||. The note records which case applied.
pub fn l2_decay_checks(traj: &Trajectory, p: &RDParams, lambda1: f64, norm_weight: f64) -> Result<BoundReport> {
    let mut r = BoundReport::new("l2 decay");
    let g = gamma(p)?;
    let w = norm_weight.sqrt();
    let u0 = &traj.states[0];
    let n0 = w * norm2(u0);
    let rate = lambda1 + p.b.abs() * g.powi(p.m as i32 - 1);
    if norm_inf(u0) <= g {
        let mut worst: Option<(f64, f64, f64)> = None;
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let m = w * norm2(s);
            let b = (rate * t).exp() * n0;
            if worst.is_none_or(|(_, wm, wb)| m - b > wm - wb) {
                worst = Some((*t, m, b));
            }
        }
        let (t, m, b) = worst.unwrap();
        r.le("||U(t)|| <= exp((lambda1 + |b| gamma^(M-1)) t) ||U(0)||", m, b, 1e-12 * n0.max(1e-300));
        r.note(format!("worst at t = {t}"));
    } else {
        r.skip("l2 growth bound", "||U(0)||_inf > gamma");
    }
    if lambda1 < 0.0 {
        let pre = p.b.abs() * n0.powi(p.m as i32 - 1) + lambda1 >= 0.0;
        let worst = traj
            .states
            .iter()
            .map(|s| w * norm2(s))
            .fold(0.0, f64::max);
        r.le("||U(t)|| <= ||U(0)||", worst, n0, 1e-12 * n0.max(1e-300));
        r.note(if pre {
            "bernoulli case: |b| ||U(0)||^(M-1) + lambda1 >= 0"
        } else {
            "sub-threshold case: |b| ||U(0)||^(M-1) + lambda1 < 0"
        });
    } else {
        r.skip("||U(t)|| <= ||U(0)||", "lambda1 >= 0");
    }
    Ok(r)
}

/// Discrete free energy (D/2) Σ |∇_h u|^2 Δx^d + Σ F(u_j) Δx^d with forward
/// differences; Dirichlet axes pad with zeros, periodic axes wrap.
pub fn energy(p: &RDParams, grid: &GridSpec, u: &[f64]) -> f64 {
    let n = grid.n;
    let vol = grid.cell_volume();
    let mut grad2 = 0.0;
    let mut inner = grid.size();
    let mut outer = 1;
    for axis in 0..grid.d {
        inner /= n;
        let hx = grid.spacing(axis);
        let bc = grid.axis_bc(axis);
        for a in 0..outer {
            for c in 0..inner {
                let at = |l: usize| u[(a * n + l) * inner + c];
                match bc {
                    BoundaryKind::Dirichlet => {
                        let mut prev = 0.0;
                        for l in 0..n {
                            let v = at(l);
                            grad2 += ((v - prev) / hx).powi(2);
                            prev = v;
                        }
                        grad2 += (prev / hx).powi(2);
                    }
                    BoundaryKind::Periodic => {
                        for l in 0..n {
                            grad2 += ((at((l + 1) % n) - at(l)) / hx).powi(2);
                        }
                    }
                }
            }
        }
        outer *= n;
    }
    let pot: f64 = u.iter().map(|&x| p.potential(x)).sum();
    (0.5 * p.d * grad2 + pot) * vol
}

/// Checks E(U(t_{k+1})) <= E(U(t_k)) + slack along the trajectory.
pub fn energy_monotonicity(p: &RDParams, traj: &Trajectory, slack: f64) -> BoundReport {
    let mut r = BoundReport::new("energy");
    let e: Vec<f64> = traj.states.iter().map(|s| energy(p, &traj.grid, s)).collect();
    let (k, inc) = e
        .windows(2)
        .enumerate()
        .map(|(k, w)| (k, w[1] - w[0]))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    r.le("max_k E(t_k+1) - E(t_k) <= 0", inc, 0.0, slack);
    r.note(format!("largest increment at step {k}"));
    r
}

#[derive(Debug, Clone, Serialize)]
pub struct HardnessDemo {
    pub r: f64,
    pub epsilon: f64,
    pub theta: f64,
    pub w0: f64,
    pub t_star: f64,
    pub times: Vec<f64>,
    pub overlap: Vec<f64>,
    /// First time the overlap is at most 3/√10.
    pub crossing: Option<f64>,
}

/// Two initial states with fidelity 1 - ε evolved under u_i' = -u_i + R u_i^2
/// until 0.99 t*, where t* is the blow-up time of the larger component.
pub fn hardness_demo(r: f64, epsilon: f64, n_samples: usize) -> Result<HardnessDemo> {
    if !(r >= 2f64.sqrt() - 1e-12) {
        return invalid(format!("R = {r} < sqrt(2)"));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return invalid(format!("epsilon = {epsilon} outside (0, 1/2)"));
    }
    let theta = 2.0 * (epsilon / 2.0).sqrt().asin();
    let w0 = (theta + PI / 4.0).sin();
    let v0 = (theta + PI / 4.0).cos();
    let t_star = (r / (r - 1.0 / w0)).ln();
    let t_end = 0.99 * t_star;
    let phi0 = [1.0 / 2f64.sqrt(), 1.0 / 2f64.sqrt()];
    let mut f = |y: &[f64], dy: &mut [f64]| {
        for i in 0..y.len() {
            dy[i] = -y[i] + r * y[i] * y[i];
        }
    };
    let n_out = n_samples.max(2);
    let sub = 400;
    let y0 = [phi0[0], phi0[1], v0, w0];
    let states = rk4_outputs(&mut f, &y0, t_end, n_out, sub)
        .ok_or_else(|| Error::Instability("hardness demo diverged before 0.99 t*".into()))?;
    let times: Vec<f64> = (0..=n_out).map(|k| t_end * k as f64 / n_out as f64).collect();
    let overlap: Vec<f64> = states
        .iter()
        .map(|s| {
            let dot = s[0] * s[2] + s[1] * s[3];
            dot / ((s[0] * s[0] + s[1] * s[1]).sqrt() * (s[2] * s[2] + s[3] * s[3]).sqrt())
        })
        .collect();
    let thr = 3.0 / 10f64.sqrt();
    let crossing = times
        .iter()
        .zip(&overlap)
        .find(|(_, o)| **o <= thr)
        .map(|(t, _)| *t);
    Ok(HardnessDemo {
        r,
        epsilon,
        theta,
        w0,
        t_star,
        times,
        overlap,
        crossing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_laplacian_nd, Sampling, MATERIALIZE_CAP};

    #[test]
    fn gamma_examples() {
        let g = |a, b, m| gamma(&RDParams { d: 1.0, a, b, m }).unwrap();
        assert!((g(0.2, -1.0, 2) - 0.2).abs() < 1e-15);
        assert!((g(0.16, -1.0, 3) - 0.4).abs() < 1e-15);
        assert!((g(-1.0, 2f64.sqrt(), 2) - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(
            gamma(&RDParams { d: 1.0, a: 1.0, b: 0.0, m: 2 }),
            Err(Error::GammaUndefined)
        ));
    }

    #[test]
    fn roots_match_closed_form() {
        let r = reaction_roots(&RDParams { d: 1.0, a: 0.2, b: -1.0, m: 2 }).unwrap();
        assert!(r.gamma1.abs() < 1e-15 && (r.gamma2 - 0.2).abs() < 1e-14);
        let r = reaction_roots(&RDParams { d: 1.0, a: 0.16, b: -1.0, m: 3 }).unwrap();
        assert!((r.gamma1 + 0.4).abs() < 1e-14 && (r.gamma2 - 0.4).abs() < 1e-14);
        let r = reaction_roots(&RDParams { d: 1.0, a: -1.0, b: -1.0, m: 3 }).unwrap();
        assert!(!r.distinct);
    }

    #[test]
    fn rhs_matches_scalar_loop() {
        let p = RDParams { d: 0.3, a: 0.2, b: -1.1, m: 3 };
        let g = GridSpec::dirichlet(4, 1).unwrap();
        let lap = build_laplacian_nd(&g).unwrap();
        let u = SpatialField::new(g, vec![0.3, -0.7, 0.11, 0.5]).unwrap();
        let out = rhs(&p, &lap, &u);
        let s = 25.0;
        let v = &u.values;
        for j in 0..4 {
            let l = if j > 0 { v[j - 1] } else { 0.0 };
            let r = if j < 3 { v[j + 1] } else { 0.0 };
            let e = p.d * s * (l - 2.0 * v[j] + r) + p.a * v[j] + p.b * v[j].powi(3);
            assert!((out.values[j] - e).abs() < 1e-14);
        }
        assert!(rhs(&p, &lap, &SpatialField::zeros(g)).values.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn equilibrium_on_periodic_grid() {
        let p = RDParams { d: 0.1, a: 0.16, b: -1.0, m: 3 };
        let g = GridSpec::periodic(8, 1).unwrap();
        let lap = build_laplacian_nd(&g).unwrap();
        let u = SpatialField::constant(g, gamma(&p).unwrap());
        assert!(rhs(&p, &lap, &u).values.iter().all(|x| x.abs() < 1e-15));
        let tr = reference_solve(&p, &g, &u, 1.0, 1e-10).unwrap();
        let last = tr.states.last().unwrap();
        assert!(last.iter().all(|x| (x - 0.4).abs() < 1e-14));
    }

    #[test]
    fn zero_initial_state_stays_zero() {
        let p = RDParams { d: 0.2, a: 0.2, b: -1.0, m: 2 };
        let g = GridSpec::dirichlet(8, 1).unwrap();
        let tr = reference_solve(&p, &g, &SpatialField::zeros(g), 1.0, 1e-10).unwrap();
        assert!(tr.states.iter().all(|s| s.iter().all(|&x| x == 0.0)));
    }

    #[test]
    fn tiny_b_matches_matrix_exponential() {
        let p = RDParams { d: 0.2, a: 0.2, b: -1e-12, m: 2 };
        let g = GridSpec::dirichlet(8, 1).unwrap();
        let lap = build_laplacian_nd(&g).unwrap();
        let u0 = SpatialField::from_fn(g, Sampling::Interior, |x| (PI * x[0]).sin());
        let tr = reference_solve(&p, &g, &u0, 1.0, 1e-12).unwrap();
        let f1 = p.f1(&lap).to_dense(MATERIALIZE_CAP).unwrap();
        let eig = nalgebra::SymmetricEigen::new(f1);
        let q = &eig.eigenvectors;
        let ex = q * nalgebra::DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.exp())) * q.transpose();
        let want = ex * nalgebra::DVector::from_vec(u0.values.clone());
        let got = tr.states.last().unwrap();
        for i in 0..8 {
            assert!((got[i] - want[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn rk4_order_on_smooth_problem() {
        let p = RDParams { d: 0.2, a: 0.2, b: -1.0, m: 2 };
        let g = GridSpec::dirichlet(16, 1).unwrap();
        let lap = build_laplacian_nd(&g).unwrap();
        let u0 = SpatialField::from_fn(g, Sampling::Interior, |x| 0.1 * (1.0 - (2.0 * PI * x[0]).cos()));
        let mut f = |y: &[f64], dy: &mut [f64]| rhs_into(&p, &lap, y, dy);
        let mut run = |sub| rk4_outputs(&mut f, &u0.values, 1.0, 1, sub).unwrap().pop().unwrap();
        let fine = run(8192);
        let e1 = norm_inf(&run(256).iter().zip(&fine).map(|(a, b)| a - b).collect::<Vec<_>>());
        let e2 = norm_inf(&run(512).iter().zip(&fine).map(|(a, b)| a - b).collect::<Vec<_>>());
        assert!(e1 / e2 >= 8.0, "ratio {}", e1 / e2);
    }

    #[test]
    fn energy_zero_and_quadratic_limit() {
        let g = GridSpec::dirichlet(6, 1).unwrap();
        let p = RDParams { d: 0.3, a: -1.0, b: -1e-300, m: 2 };
        assert_eq!(energy(&p, &g, &[0.0; 6]), 0.0);
        let u = [0.1, -0.4, 0.3, 0.2, 0.0, 0.5];
        // 1/2 U^T (-D Δ_h + I) U Δx
        let lap = build_laplacian_nd(&g).unwrap().to_dense(100).unwrap();
        let uv = nalgebra::DVector::from_row_slice(&u);
        let q = (-(lap * &uv) * p.d + &uv).dot(&uv) * 0.5 / 7.0;
        assert!((energy(&p, &g, &u) - q).abs() < 1e-14);
    }

    #[test]
    fn hardness_demo_crosses_before_blowup() {
        let demo = hardness_demo(2f64.sqrt(), 0.01, 400).unwrap();
        let theta = 2.0 * (0.005f64).sqrt().asin();
        assert!((2.0 * (theta / 2.0).sin().powi(2) - 0.01).abs() < 1e-15);
        let w0 = (theta + PI / 4.0).sin();
        let ts = (2f64.sqrt() / (2f64.sqrt() - 1.0 / w0)).ln();
        assert!((demo.t_star - ts).abs() < 1e-14);
        assert!(demo.crossing.unwrap() < demo.t_star);
        assert!((demo.overlap[0] - (1.0 - 0.01)).abs() < 1e-12);
        assert!(hardness_demo(1.0, 0.01, 10).is_err());
    }
}
