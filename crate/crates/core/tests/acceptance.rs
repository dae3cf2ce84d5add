//! One line per acceptance criterion; the test fails if any line is FAIL.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rdcarleman::carleman::{compute_radii, Breakpoint, LambdaPolicy};
use rdcarleman::experiments::*;
use rdcarleman::grid::{norm2, GridSpec};
use rdcarleman::spectral::*;
use std::f64::consts::PI;
use std::time::Instant;

struct Line {
    id: usize,
    ok: bool,
    detail: String,
}

fn radii_reproduction() -> Line {
    let t0 = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let p = Preset::builtin("fig4b_n16").unwrap();
    let art = run_preset(&p, dir.path()).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("radii.json")).unwrap()).unwrap();
    let (r, rd) = (v["R"].as_f64().unwrap(), v["R_D"].as_f64().unwrap());
    let secs = t0.elapsed().as_secs_f64();
    let ok = (r - 1.4924).abs() <= 5e-4 && (rd - 0.9299).abs() <= 5e-4 && secs < 5.0 && art.radii.is_some();
    Line {
        id: 1,
        ok,
        detail: format!("R = {r:.5}, R_D = {rd:.5} (lambda = lambda1/2.3), {secs:.2} s"),
    }
}

struct Convergence {
    line: Line,
    arts: Vec<RunArtifacts>,
}

fn carleman_convergence() -> Convergence {
    let mut ok = true;
    let mut detail = Vec::new();
    let mut arts = Vec::new();
    for name in ["fig2", "fig3"] {
        let t0 = Instant::now();
        let art = compute_preset(&Preset::builtin(name).unwrap()).unwrap();
        let secs = t0.elapsed().as_secs_f64();
        let m = art.preset.rd.m;
        let errs = art.max_errors();
        // coinciding orders agree to rounding, so compare with an absolute floor
        let non_increasing = errs.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-12);
        // for M = 3 orders pair up (N = 2k-1, 2k give the same block 1), so
        // strict decrease is across multiples of M - 1
        let step: Vec<f64> = errs.iter().filter(|e| e.0 % (m - 1) == 0).map(|e| e.1).collect();
        let strict = step.windows(2).all(|w| w[1] < w[0]);
        let x: Vec<f64> = errs.iter().map(|e| e.0 as f64).collect();
        let y: Vec<f64> = errs.iter().map(|e| e.1.ln()).collect();
        let slope = fit_slope(&x, &y);
        let this = strict && non_increasing && slope < 0.0 && secs < 60.0;
        ok &= this;
        detail.push(format!(
            "{name}: max errors {} non-increasing {non_increasing} log-slope {slope:.2} {secs:.1} s",
            errs.iter().map(|e| format!("{:.2e}", e.1)).collect::<Vec<_>>().join(" "),
        ));
        arts.push(art);
    }
    Convergence {
        line: Line {
            id: 2,
            ok,
            detail: detail.join("; "),
        },
        arts,
    }
}

fn block1_gap(art: &RunArtifacts, a: usize, b: usize) -> f64 {
    let (ra, rb) = (art.run(a).unwrap(), art.run(b).unwrap());
    ra.block1
        .iter()
        .zip(&rb.block1)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}

fn curve_coincidence(fig3: &RunArtifacts) -> Line {
    let t0 = Instant::now();
    let g12 = block1_gap(fig3, 1, 2);
    let g34 = block1_gap(fig3, 3, 4);
    let g23 = block1_gap(fig3, 2, 3);
    Line {
        id: 3,
        ok: g12 <= 1e-12 && g34 <= 1e-12 && g23 > 1e-9,
        detail: format!(
            "fig3 max|y1(N=1)-y1(N=2)| = {g12:.1e}, N=3 vs 4: {g34:.1e} (N=2 vs 3 differ by {g23:.1e}), {:.2} s beyond the fig3 run",
            t0.elapsed().as_secs_f64()
        ),
    }
}

fn bound_dominance(conv: &[RunArtifacts]) -> Line {
    let mut arts: Vec<RunArtifacts> = conv.to_vec();
    for name in ["fig4b_n16", "fig4b_n14"] {
        arts.push(compute_preset(&Preset::builtin(name).unwrap()).unwrap());
    }
    let mut ok = true;
    let mut asserted = 0;
    let mut detail = Vec::new();
    for art in &arts {
        let mut n_inf = 0;
        let mut n_l2 = 0;
        for run in &art.runs {
            for rec in &run.report.checks.records {
                if rec.status == rdcarleman::report::Status::Skipped {
                    continue;
                }
                ok &= rec.status == rdcarleman::report::Status::Pass;
                if rec.check.contains("R_D") {
                    n_inf += 1;
                } else {
                    n_l2 += 1;
                }
            }
        }
        asserted += n_inf + n_l2;
        let rd = art.radii.as_ref().unwrap();
        detail.push(format!(
            "{}: R_D {:.3} R_bar {:.3} -> {n_inf} inf-norm and {n_l2} l2 checks",
            art.preset.name,
            rd.r_d,
            rd.r_bar.unwrap_or(f64::NAN)
        ));
    }
    Line {
        id: 4,
        ok: ok && asserted > 0,
        detail: detail.join("; "),
    }
}

fn linear_system_suite() -> Line {
    let t0 = Instant::now();
    let mut ok = true;
    let mut n = 0;
    for name in ["fig2", "fig3"] {
        let r = linsys_audit(&Preset::builtin(name).unwrap(), 2, 50).unwrap();
        ok &= r.all_ok() && r.count(rdcarleman::report::Status::Skipped) == 0;
        n += r.records.len();
    }
    let secs = t0.elapsed().as_secs_f64();
    Line {
        id: 5,
        ok: ok && secs < 60.0,
        detail: format!("fig2/fig3 at n = 8, N = 2, m <= 50: {n} checks (stability, kappa, Euler error, measurement) in {secs:.2} s"),
    }
}

fn heat_decay_audit() -> Line {
    let t0 = Instant::now();
    let r = audit_bounds("heatdecay").unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let viol = r[0].records[0].measured;
    Line {
        id: 6,
        ok: r.iter().all(|x| x.all_ok()) && secs < 120.0,
        detail: format!("{viol} violations over n = 2..32, both boundary conditions, 50 times ({}), {secs:.2} s", r[0].records[0].note),
    }
}

fn maximum_principle_energy() -> Line {
    let mut ok = true;
    let mut increase = false;
    let mut detail = Vec::new();
    for name in ["fig1a", "fig1b"] {
        let art = compute_preset(&Preset::builtin(name).unwrap()).unwrap();
        let mp = art.checks.records.iter().filter(|r| r.check.contains("gamma")).collect::<Vec<_>>();
        let en = art.checks.records.iter().find(|r| r.check.contains("E(t_k+1)")).unwrap();
        let this = !mp.is_empty()
            && mp.iter().all(|r| r.status == rdcarleman::report::Status::Pass)
            && en.status == rdcarleman::report::Status::Pass;
        ok &= this;
        increase |= art.sup_norm_increase.is_some();
        detail.push(format!(
            "{name}: bounds ok {this}, sup norm rises above ||U(0)|| at {}",
            art.sup_norm_increase.map(|t| format!("t = {t}")).unwrap_or_else(|| "no sampled time".into())
        ));
    }
    Line {
        id: 7,
        ok: ok && increase,
        detail: detail.join("; "),
    }
}

fn spectral_gradient_checks() -> Line {
    let h = HistoryTensor::from_fn(1, 32, 1, 1.0, |_, x| (2.0 * PI * x[0]).sin()).unwrap();
    let g = spectral_gradient(&h, 16).unwrap();
    let sin_err = g
        .values
        .iter()
        .enumerate()
        .map(|(l, v)| (v - 2.0 * PI * (2.0 * PI * l as f64 / 32.0).cos()).abs())
        .fold(0.0, f64::max);
    let fam = audit_bounds("spectral").unwrap();
    let fam_ok = fam.iter().all(|r| r.all_ok());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let v: Vec<Complex64> = (0..64).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        for axis in 0..2 {
            let c = dft_axis(&v, 8, 2, axis, true);
            let back = dft_axis(&c, 8, 2, axis, false);
            let e0: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            let e1: f64 = c.iter().map(|z| z.norm_sqr()).sum();
            worst = worst.max((e0 - e1).abs());
            worst = worst.max(v.iter().zip(&back).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max));
        }
    }
    Line {
        id: 8,
        ok: sin_err <= 1e-10 && fam_ok && worst <= 1e-10,
        detail: format!(
            "sin(2 pi x) error {sin_err:.1e}; smooth family within the minimized bound: {fam_ok} ({} probes); Parseval/round-trip worst {worst:.1e}",
            fam[0].records.len()
        ),
    }
}

fn grid_refinement() -> Line {
    let p = Preset::builtin("fig2").unwrap();
    let ns = [8usize, 16, 32, 64, 128];
    let mut r = Vec::new();
    let mut rd = Vec::new();
    for &n in &ns {
        let q = p.with_overrides(&[format!("grid.n={n}")]).unwrap();
        let g = GridSpec::dirichlet(n, 1).unwrap();
        let u = norm2(&q.initial_field().unwrap().values);
        let c = compute_radii(&q.rd, &g, u, None, LambdaPolicy::Optimize, Breakpoint::Sharp).unwrap();
        r.push(c.r);
        rd.push(c.r_d);
    }
    let x: Vec<f64> = ns.iter().map(|n| (*n as f64).ln()).collect();
    let y: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let slope = fit_slope(&x, &y);
    let lo = rd.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = rd.iter().copied().fold(0.0, f64::max);
    let spread = (hi - lo) / lo;
    Line {
        id: 9,
        ok: (slope - 0.5).abs() <= 0.15 && spread < 0.05,
        detail: format!("fig2 family, n = 8..128: R exponent {slope:.3}, R_D in [{lo:.4}, {hi:.4}] (spread {:.2}%)", 100.0 * spread),
    }
}

fn sampling_scaling_line() -> Line {
    let fit = sampling_scaling((0.2, 0.4), 9, 201, 11).unwrap();
    Line {
        id: 10,
        ok: (fit.emulator_exponent - 1.0).abs() <= 0.3 && (fit.monte_carlo_exponent - 2.0).abs() <= 0.3,
        detail: format!(
            "queries ~ (1/eps)^k: emulator k = {:.3}, Monte Carlo k = {:.3} (error model only, no quantum speedup claimed)",
            fit.emulator_exponent, fit.monte_carlo_exponent
        ),
    }
}

#[test]
fn acceptance_criteria() {
    let mut lines = vec![radii_reproduction()];
    let conv = carleman_convergence();
    lines.push(conv.line);
    lines.push(curve_coincidence(&conv.arts[1]));
    lines.push(bound_dominance(&conv.arts));
    lines.push(linear_system_suite());
    lines.push(heat_decay_audit());
    lines.push(maximum_principle_energy());
    lines.push(spectral_gradient_checks());
    lines.push(grid_refinement());
    lines.push(sampling_scaling_line());
    for l in &lines {
        println!("criterion {:>2}: {} | {}", l.id, if l.ok { "PASS" } else { "FAIL" }, l.detail);
    }
    let failed: Vec<usize> = lines.iter().filter(|l| !l.ok).map(|l| l.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
