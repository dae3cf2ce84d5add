//! Convergence radii R, R̄, R_D and the constant C(λ).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};
use crate::grid::GridSpec;
use crate::rdode::{gamma, RDParams};

/// Constant in the heat-semigroup breakpoint t_0 = κ d1 / (D(μ - μ1)) that
/// enters C(λ).
///
/// `Sharp` (κ = ln3 / 2) is the form C(λ) is stated with. `Loose` (κ = ln3)
/// is a valid but weaker constant; the published R_D = 0.9299 for the
/// n = 16 example is reproduced with it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Breakpoint {
    #[default]
    Sharp,
    Loose,
}

impl Breakpoint {
    pub fn kappa(self) -> f64 {
        match self {
            Breakpoint::Sharp => 3f64.ln() / 2.0,
            Breakpoint::Loose => 3f64.ln(),
        }
    }
}

/// How λ in (λ1, 0) is picked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum LambdaPolicy {
    Optimize,
    /// λ = λ1 / value
    Ratio(f64),
    Pinned(f64),
}

impl Default for LambdaPolicy {
    fn default() -> Self {
        LambdaPolicy::Optimize
    }
}

pub fn c_lambda_with(conv: Breakpoint, a: f64, d1: usize, lambda1: f64, lambda: f64) -> Result<f64> {
    if !(lambda1 < lambda && lambda < 0.0) {
        return invalid(format!("lambda = {lambda} outside (lambda1, 0) = ({lambda1}, 0)"));
    }
    let k = conv.kappa() * d1 as f64 / (lambda - lambda1);
    let l1 = lambda1.abs();
    let tail = l1 / lambda.abs();
    if a != 0.0 {
        Ok(l1 * (k * a).exp_m1() / a + tail)
    } else {
        Ok(k * l1 + tail)
    }
}

/// C(λ) with the sharp breakpoint constant.
#[allow(non_snake_case)]
pub fn compute_C_lambda(a: f64, d1: usize, lambda1: f64, lambda: f64) -> Result<f64> {
    c_lambda_with(Breakpoint::Sharp, a, d1, lambda1, lambda)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct COptimum {
    pub lambda: f64,
    pub c_min: f64,
}

pub fn optimize_c_with(conv: Breakpoint, a: f64, d1: usize, lambda1: f64) -> Result<COptimum> {
    if !(lambda1 < 0.0) {
        return Err(Error::NotDissipative(lambda1));
    }
    if d1 == 0 {
        // C = |λ1|/|λ|, infimum 1 approached as λ -> λ1
        let lambda = lambda1 * (1.0 - 1e-9);
        let c_min = c_lambda_with(conv, a, d1, lambda1, lambda)?;
        return Ok(COptimum { lambda, c_min });
    }
    if a == 0.0 {
        let s = (conv.kappa() * d1 as f64).sqrt();
        return Ok(COptimum {
            lambda: lambda1 / (s + 1.0),
            c_min: (s + 1.0) * (s + 1.0),
        });
    }
    // s = (λ - λ1)/|λ1| in (0, 1)
    let c = |s: f64| c_lambda_with(conv, a, d1, lambda1, lambda1 * (1.0 - s)).unwrap_or(f64::INFINITY);
    let k = 4000;
    let mut best = (0.5, c(0.5));
    for i in 1..k {
        // cosine spacing, clustered near both ends
        let u = i as f64 / k as f64;
        let s = 0.5 * (1.0 - (PI * u).cos());
        let v = c(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let step = 0.5 * PI / k as f64;
    let (mut lo, mut hi) = ((best.0 - 2.0 * step).max(1e-300), (best.0 + 2.0 * step).min(1.0 - 1e-16));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (c(x1), c(x2));
    for _ in 0..300 {
        if (hi - lo) <= 1e-10 * (lo.abs() + hi.abs()) * 0.5 {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = c(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = c(x2);
        }
    }
    let s = 0.5 * (lo + hi);
    let (s, v) = if c(s) <= best.1 { (s, c(s)) } else { best };
    Ok(COptimum {
        lambda: lambda1 * (1.0 - s),
        c_min: v,
    })
}

/// argmin and min of C(λ) over (λ1, 0); closed form when a = 0.
#[allow(non_snake_case)]
pub fn optimize_C(a: f64, d1: usize, lambda1: f64) -> Result<COptimum> {
    optimize_c_with(Breakpoint::Sharp, a, d1, lambda1)
}

/// n-independent upper bound C_1 on min C(λ), with λ* = -π² D d1 + a.
///
/// Valid once n is large enough that λ1 <= 0.9 λ*; `applies` reports that.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct C1Bound {
    pub c1: f64,
    pub lambda_star: f64,
    pub applies: bool,
}

pub fn c1_upper_bound(a: f64, d: f64, d1: usize, lambda1: f64) -> Result<C1Bound> {
    let ls = -PI * PI * d * d1 as f64 + a;
    if !(ls < 0.0) || a == 0.0 {
        return invalid("upper bound needs lambda* < 0 and a != 0");
    }
    let x = 3f64.ln() * d1 as f64 * a / (0.9 * ls.abs());
    let c1 = ls.abs() / a * x.exp_m1() + 2.0;
    Ok(C1Bound {
        c1,
        lambda_star: ls,
        applies: ls <= lambda1 && lambda1 <= 0.9 * ls,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRadii {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "R_bar")]
    pub r_bar: Option<f64>,
    #[serde(rename = "R_D")]
    pub r_d: f64,
    pub lambda_used: f64,
    #[serde(rename = "C_lambda")]
    pub c_lambda: f64,
    pub lambda1: f64,
    pub gamma: f64,
    pub convention: Breakpoint,
    /// R_D and C(λ) at the same λ with the sharp constant.
    #[serde(rename = "R_D_sharp")]
    pub r_d_sharp: f64,
    #[serde(rename = "C_lambda_sharp")]
    pub c_lambda_sharp: f64,
}

fn dissipative_lambda1(p: &RDParams, grid: &GridSpec) -> Result<f64> {
    let l1 = p.lambda1(grid);
    if !(l1 < 0.0) {
        return Err(Error::NotDissipative(l1));
    }
    Ok(l1)
}

/// R = |b|/|λ1| ||U_in||^{M-1} and R̄ from max_t ||U(t)|| when known.
#[allow(non_snake_case)]
pub fn compute_R(p: &RDParams, grid: &GridSpec, u_in_norm: f64, traj_max_norm: Option<f64>) -> Result<(f64, Option<f64>)> {
    let l1 = dissipative_lambda1(p, grid)?;
    let e = p.m as i32 - 1;
    let r = p.b.abs() / l1.abs() * u_in_norm.powi(e);
    let r_bar = match traj_max_norm {
        Some(mx) => Some(p.b.abs() / l1.abs() * mx.max(u_in_norm).powi(e)),
        None if r <= 1.0 => Some(r),
        None => None,
    };
    Ok((r, r_bar))
}

/// R_D = |b|/|λ1| γ^{M-1} C(λ).
#[allow(non_snake_case)]
pub fn compute_RD(p: &RDParams, grid: &GridSpec, policy: LambdaPolicy, conv: Breakpoint) -> Result<ConvergenceRadii> {
    let l1 = dissipative_lambda1(p, grid)?;
    let g = gamma(p)?;
    let lambda = match policy {
        LambdaPolicy::Optimize => optimize_c_with(conv, p.a, grid.d1, l1)?.lambda,
        LambdaPolicy::Ratio(q) => l1 / q,
        LambdaPolicy::Pinned(v) => v,
    };
    let c = c_lambda_with(conv, p.a, grid.d1, l1, lambda)?;
    let cs = c_lambda_with(Breakpoint::Sharp, p.a, grid.d1, l1, lambda)?;
    let pre = p.b.abs() / l1.abs() * g.powi(p.m as i32 - 1);
    Ok(ConvergenceRadii {
        r: f64::NAN,
        r_bar: None,
        r_d: pre * c,
        lambda_used: lambda,
        c_lambda: c,
        lambda1: l1,
        gamma: g,
        convention: conv,
        r_d_sharp: pre * cs,
        c_lambda_sharp: cs,
    })
}

/// Full radii record.
pub fn compute_radii(
    p: &RDParams,
    grid: &GridSpec,
    u_in_norm: f64,
    traj_max_norm: Option<f64>,
    policy: LambdaPolicy,
    conv: Breakpoint,
) -> Result<ConvergenceRadii> {
    let mut out = compute_RD(p, grid, policy, conv)?;
    let (r, r_bar) = compute_R(p, grid, u_in_norm, traj_max_norm)?;
    out.r = r;
    out.r_bar = r_bar;
    Ok(out)
}

/// ⌈k / (M-1)⌉ for the order-k bound exponent.
pub fn bound_exponent(k: usize, m: usize) -> i32 {
    k.div_ceil(m - 1) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_zero_closed_form() {
        let l1 = -2.0;
        let s = (3f64.ln() / 2.0).sqrt();
        let lam = l1 / (s + 1.0);
        let c = compute_C_lambda(0.0, 1, l1, lam).unwrap();
        assert!((c - (s + 1.0).powi(2)).abs() < 1e-12);
        assert!((c - 3.0316).abs() < 1e-4);
        let opt = optimize_C(0.0, 1, l1).unwrap();
        assert!((opt.c_min - c).abs() < 1e-12 && (opt.lambda - lam).abs() < 1e-12);
        // dense scan oracle
        let scan = (1..1_000_000)
            .map(|i| compute_C_lambda(0.0, 1, l1, l1 * (1.0 - i as f64 / 1e6)).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(scan >= opt.c_min - 1e-12 && scan - opt.c_min < 1e-6);
        let d4 = optimize_C(0.0, 4, l1).unwrap().c_min;
        assert!((d4 - ((2.0 * 3f64.ln()).sqrt() + 1.0).powi(2)).abs() < 1e-12);
    }

    #[test]
    fn pole_and_range() {
        let l1 = -1.0;
        assert!(compute_C_lambda(0.0, 1, l1, l1 * (1.0 - 1e-9)).unwrap() > 1e8);
        assert!(compute_C_lambda(0.0, 1, l1, 0.0).is_err());
        assert!(compute_C_lambda(0.0, 1, l1, -1.5).is_err());
    }

    #[test]
    fn small_a_limit() {
        let (l1, lam) = (-1.7, -0.9);
        let c0 = compute_C_lambda(0.0, 1, l1, lam).unwrap();
        let ca = compute_C_lambda(1e-9, 1, l1, lam).unwrap();
        assert!((c0 - ca).abs() < 1e-6);
    }

    #[test]
    fn golden_section_beats_scan() {
        for &(a, l1) in &[(0.2, -1.77), (0.0196, -0.094), (-0.3, -2.0), (0.16, -0.826)] {
            let opt = optimize_C(a, 1, l1).unwrap();
            let scan = (1..200_000)
                .map(|i| compute_C_lambda(a, 1, l1, l1 * (1.0 - i as f64 / 2e5)).unwrap())
                .fold(f64::INFINITY, f64::min);
            assert!(opt.c_min <= scan * (1.0 + 1e-9), "a={a}");
        }
    }

    #[test]
    fn scalar_r_is_sqrt2() {
        // u' = -u + sqrt2 u^2 as a single periodic cell: λ1 = a = -1
        let g = GridSpec { n: 2, d: 1, d1: 0, d2: 1 };
        let p = RDParams { d: 1.0, a: -1.0, b: 2f64.sqrt(), m: 2 };
        let (r, _) = compute_R(&p, &g, 1.0, None).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(compute_R(&p, &g, 0.0, None).unwrap().0, 0.0);
    }

    #[test]
    fn exponent_is_ceiling() {
        assert_eq!(bound_exponent(1, 3), 1);
        assert_eq!(bound_exponent(2, 3), 1);
        assert_eq!(bound_exponent(3, 3), 2);
        assert_eq!(bound_exponent(5, 2), 5);
    }
}
