//! Observables of space-time histories on periodic grids: spectral
//! gradients with a truncated frequency multiplier, amplitude and kinetic
//! energy ratios over sub-domains, an amplitude-estimation error emulator,
//! and equilibrium-time detection.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustfft::{FftDirection, FftPlanner};
use serde::Serialize;
use std::f64::consts::PI;
use std::io::Write;

use crate::error::{invalid, Error, Result};

/// Direction of the transform that maps samples to Fourier coefficients.
/// The quantum Fourier transform matches the classical inverse DFT, so its
/// inverse, which extracts coefficients, is the classical forward DFT
/// (kernel e^{-2πi kl/n}).
pub const COEFFICIENT_DIRECTION: FftDirection = FftDirection::Forward;

/// Real samples f(kT/m, l/n) on a periodic grid; time index slowest, then
/// spatial axes with axis 0 slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryTensor {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub t_end: f64,
    pub values: Vec<f64>,
}

impl HistoryTensor {
    pub fn new(m: usize, n: usize, d: usize, t_end: f64, values: Vec<f64>) -> Result<Self> {
        if m == 0 || n < 2 || d == 0 {
            return invalid("need m >= 1, n >= 2, d >= 1");
        }
        let len = n.checked_pow(d as u32).and_then(|s| s.checked_mul(m));
        if len != Some(values.len()) {
            return invalid(format!("expected m n^d = {m} * {n}^{d} values, got {}", values.len()));
        }
        Ok(HistoryTensor { m, n, d, t_end, values })
    }

    /// Samples f(t, x) at t = kT/m, x = l/n.
    pub fn from_fn(m: usize, n: usize, d: usize, t_end: f64, f: impl Fn(f64, &[f64]) -> f64) -> Result<Self> {
        let s = n.pow(d as u32);
        let mut values = Vec::with_capacity(m * s);
        let mut x = vec![0.0; d];
        for k in 0..m {
            let t = k as f64 * t_end / m as f64;
            for idx in 0..s {
                let mut r = idx;
                for a in (0..d).rev() {
                    x[a] = (r % n) as f64 / n as f64;
                    r /= n;
                }
                values.push(f(t, &x));
            }
        }
        Self::new(m, n, d, t_end, values)
    }

    pub fn spatial_size(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn step(&self) -> f64 {
        self.t_end / self.m as f64
    }
}

/// ∇f with the axis index slowest: shape (d, m, n, ..., n).
#[derive(Debug, Clone, PartialEq)]
pub struct GradientTensor {
    pub m: usize,
    pub n: usize,
    pub d: usize,
    pub t_end: f64,
    pub values: Vec<f64>,
    /// max |Im| of the transformed result relative to ||f||.
    pub imag_residue: f64,
}

impl GradientTensor {
    pub fn axis(&self, j: usize) -> &[f64] {
        let len = self.m * self.n.pow(self.d as u32);
        &self.values[j * len..(j + 1) * len]
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["j", "k", "l", "value"])?;
        let s = self.n.pow(self.d as u32);
        for j in 0..self.d {
            for (i, v) in self.axis(j).iter().enumerate() {
                wr.write_record([j.to_string(), (i / s).to_string(), (i % s).to_string(), format!("{v:.15e}")])?;
            }
        }
        wr.flush()?;
        Ok(())
    }
}

/// Time window and axis-aligned spatial box, both closed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubDomain {
    pub t: (f64, f64),
    pub x: Vec<(f64, f64)>,
}

impl SubDomain {
    pub fn everything(d: usize) -> Self {
        SubDomain {
            t: (f64::NEG_INFINITY, f64::INFINITY),
            x: vec![(0.0, 1.0); d],
        }
    }

    fn contains(&self, t: f64, x: &[f64]) -> bool {
        t >= self.t.0 && t <= self.t.1 && x.iter().zip(&self.x).all(|(v, (lo, hi))| v >= lo && v <= hi)
    }

    /// Membership mask over (k, l) for a history layout.
    fn mask(&self, m: usize, n: usize, d: usize, t_end: f64) -> Result<Vec<bool>> {
        if self.x.len() != d {
            return invalid("sub-domain dimension does not match the history");
        }
        let s = n.pow(d as u32);
        let mut out = Vec::with_capacity(m * s);
        let mut x = vec![0.0; d];
        for k in 0..m {
            let t = k as f64 * t_end / m as f64;
            for idx in 0..s {
                let mut r = idx;
                for a in (0..d).rev() {
                    x[a] = (r % n) as f64 / n as f64;
                    r /= n;
                }
                out.push(self.contains(t, &x));
            }
        }
        if !out.iter().any(|&b| b) {
            return invalid("sub-domain contains no grid point");
        }
        Ok(out)
    }
}

/// Unscaled diagonal of D_{j,θ} along one axis: 2πi l for 1 <= l <= θ,
/// 2πi (l - n) for n - θ <= l <= n - 1, zero elsewhere. At l = n/2 with
/// θ = n/2 the first case applies.
pub fn build_d_theta(theta: usize, n: usize) -> Result<Vec<Complex64>> {
    if theta == 0 || 2 * theta > n {
        return invalid(format!("theta = {theta} outside [1, n/2] for n = {n}"));
    }
    Ok((0..n)
        .map(|l| {
            let f = if l >= 1 && l <= theta {
                l as f64
            } else if l >= n - theta {
                l as f64 - n as f64
            } else {
                0.0
            };
            Complex64::new(0.0, 2.0 * PI * f)
        })
        .collect())
}

struct AxisFft {
    planner: FftPlanner<f64>,
}

impl AxisFft {
    fn new() -> Self {
        AxisFft {
            planner: FftPlanner::new(),
        }
    }

    /// Unitary transform of every line along `axis` of a block of shape
    /// (outer, n, inner) repeated to cover `data`.
    fn apply(&mut self, data: &mut [Complex64], n: usize, d: usize, axis: usize, dir: FftDirection) {
        let fft = self.planner.plan_fft(n, dir);
        let inner = n.pow((d - 1 - axis) as u32);
        let line_block = n * inner;
        let scale = 1.0 / (n as f64).sqrt();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for block in data.chunks_mut(line_block) {
            for c in 0..inner {
                for (l, b) in buf.iter_mut().enumerate() {
                    *b = block[l * inner + c];
                }
                fft.process(&mut buf);
                for (l, b) in buf.iter().enumerate() {
                    block[l * inner + c] = b * scale;
                }
            }
        }
    }
}

fn flip(dir: FftDirection) -> FftDirection {
    match dir {
        FftDirection::Forward => FftDirection::Inverse,
        FftDirection::Inverse => FftDirection::Forward,
    }
}

/// Unitary DFT along one axis of spatial slices (length a multiple of n^d).
/// `to_coefficients` selects the coefficient-extracting direction.
pub fn dft_axis(values: &[Complex64], n: usize, d: usize, axis: usize, to_coefficients: bool) -> Vec<Complex64> {
    let mut out = values.to_vec();
    let dir = if to_coefficients {
        COEFFICIENT_DIRECTION
    } else {
        flip(COEFFICIENT_DIRECTION)
    };
    AxisFft::new().apply(&mut out, n, d, axis, dir);
    out
}

/// Per axis: coefficients along the axis, multiply by D_{j,θ}, transform
/// back. Returns the real part; the largest imaginary part relative to
/// ||f|| is kept as a diagnostic.
pub fn spectral_gradient(f: &HistoryTensor, theta: usize) -> Result<GradientTensor> {
    let diag = build_d_theta(theta, f.n)?;
    let s = f.spatial_size();
    let inner_of = |axis: usize| f.n.pow((f.d - 1 - axis) as u32);
    let fnorm = f.values.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut fft = AxisFft::new();
    let mut values = Vec::with_capacity(f.d * f.values.len());
    let mut resid: f64 = 0.0;
    for axis in 0..f.d {
        let mut data: Vec<Complex64> = f.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft.apply(&mut data, f.n, f.d, axis, COEFFICIENT_DIRECTION);
        let inner = inner_of(axis);
        for (i, v) in data.iter_mut().enumerate() {
            let l = (i % s) / inner % f.n;
            *v *= diag[l];
        }
        fft.apply(&mut data, f.n, f.d, axis, flip(COEFFICIENT_DIRECTION));
        for v in &data {
            resid = resid.max(v.im.abs());
            values.push(v.re);
        }
    }
    Ok(GradientTensor {
        m: f.m,
        n: f.n,
        d: f.d,
        t_end: f.t_end,
        values,
        imag_residue: if fnorm > 0.0 { resid / fnorm } else { resid },
    })
}

/// True when the imaginary residue stays below 1e-10 ||f||.
pub fn residue_ok(g: &GradientTensor) -> bool {
    g.imag_residue <= 1e-10
}

fn ratio_over(values: &[f64], mask: &[bool]) -> Result<f64> {
    let total: f64 = values.iter().map(|v| v * v).sum();
    if total == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let part: f64 = values
        .iter()
        .zip(mask.iter().cycle())
        .filter(|(_, &m)| m)
        .map(|(v, _)| v * v)
        .sum();
    Ok(part / total)
}

/// Σ_{dom} |f|^2 / Σ |f|^2
pub fn mean_square_ratio(f: &HistoryTensor, dom: &SubDomain) -> Result<f64> {
    let mask = dom.mask(f.m, f.n, f.d, f.t_end)?;
    ratio_over(&f.values, &mask)
}

/// The same ratio for |∇f|^2, summing over axes.
pub fn kinetic_energy_ratio(f: &HistoryTensor, dom: &SubDomain, theta: usize) -> Result<f64> {
    let g = spectral_gradient(f, theta)?;
    let mask = dom.mask(f.m, f.n, f.d, f.t_end)?;
    ratio_over(&g.values, &mask)
}

/// Error bound for the truncated spectral derivative given ||∂^p f||∞:
/// 8 S / (π^{p-1} n^{p-2}) + 2√2 S n / ((2π)^{p-1} θ^{p-1}).
pub fn gradient_error_bound(sup_p: f64, p: usize, n: usize, theta: usize) -> f64 {
    let pf = p as f64 - 1.0;
    8.0 * sup_p / (PI.powf(pf) * (n as f64).powf(p as f64 - 2.0))
        + 2.0 * 2f64.sqrt() * sup_p * n as f64 / ((2.0 * PI).powf(pf) * (theta as f64).powf(pf))
}

/// min over p in `ps` of the bound, with sup norms indexed by p.
pub fn min_gradient_error_bound(sups: &[f64], ps: std::ops::RangeInclusive<usize>, n: usize, theta: usize) -> (usize, f64) {
    ps.filter(|&p| p < sups.len())
        .map(|p| (p, gradient_error_bound(sups[p], p, n, theta)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a })
}

/// ||∂^p f||∞ for p = 0..=pmax, estimated from 8n samples of a 1-periodic
/// f by full-spectrum differentiation (Nyquist mode dropped).
pub fn derivative_sup_norms(f: impl Fn(f64) -> f64, n: usize, pmax: usize) -> Vec<f64> {
    let big = 8 * n;
    let samples: Vec<Complex64> = (0..big).map(|l| Complex64::new(f(l as f64 / big as f64), 0.0)).collect();
    let coeffs = dft_axis(&samples, big, 1, 0, true);
    let freq: Vec<f64> = (0..big)
        .map(|l| {
            if 2 * l < big {
                l as f64
            } else if 2 * l > big {
                l as f64 - big as f64
            } else {
                0.0
            }
        })
        .collect();
    (0..=pmax)
        .map(|p| {
            let c: Vec<Complex64> = coeffs
                .iter()
                .zip(&freq)
                .map(|(c, &k)| c * Complex64::new(0.0, 2.0 * PI * k).powu(p as u32))
                .collect();
            dft_axis(&c, big, 1, 0, false)
                .iter()
                .map(|v| v.re.abs())
                .fold(0.0, f64::max)
        })
        .collect()
}

/// Smooth 1-periodic test functions with their derivatives.
pub fn smooth_test_family() -> Vec<(&'static str, fn(f64) -> f64, fn(f64) -> f64)> {
    vec![
        ("exp_sin", |x| (2.0 * PI * x).sin().exp(), |x| {
            2.0 * PI * (2.0 * PI * x).cos() * (2.0 * PI * x).sin().exp()
        }),
        ("inv_cos", |x| 1.0 / (2.0 + (2.0 * PI * x).cos()), |x| {
            2.0 * PI * (2.0 * PI * x).sin() / (2.0 + (2.0 * PI * x).cos()).powi(2)
        }),
        ("sin3", |x| (6.0 * PI * x).sin(), |x| 6.0 * PI * (6.0 * PI * x).cos()),
        ("exp_cos_sin2", |x| (2.0 * PI * x).cos().exp() * (4.0 * PI * x).sin(), |x| {
            let e = (2.0 * PI * x).cos().exp();
            e * (4.0 * PI * (4.0 * PI * x).cos() - 2.0 * PI * (2.0 * PI * x).sin() * (4.0 * PI * x).sin())
        }),
    ]
}

/// ℓ2 error of the truncated spectral derivative of a family member on n
/// points against the minimized bound: (error, bound, best p).
pub fn gradient_bound_probe(f: fn(f64) -> f64, df: fn(f64) -> f64, n: usize, theta: usize) -> Result<(f64, f64, usize)> {
    let sups = derivative_sup_norms(f, n, 12);
    let h = HistoryTensor::from_fn(1, n, 1, 1.0, |_, x| f(x[0]))?;
    let g = spectral_gradient(&h, theta)?;
    let err = g
        .values
        .iter()
        .enumerate()
        .map(|(l, v)| (v - df(l as f64 / n as f64)).powi(2))
        .sum::<f64>()
        .sqrt();
    let (p, bound) = min_gradient_error_bound(&sups, 3..=12, n, theta);
    Ok((err, bound, p))
}

/// Lower estimate of 4√d ||f|| (max_{j,p} ||∂^p f||∞^{1/p} + 1) / ||∇f||,
/// with the max taken over the supplied p >= 1.
pub fn q_diagnostic(f_norm: f64, grad_norm: f64, d: usize, sups: &[f64]) -> Result<f64> {
    if grad_norm == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let s = sups
        .iter()
        .enumerate()
        .skip(1)
        .map(|(p, v)| v.powf(1.0 / p as f64))
        .fold(0.0, f64::max);
    Ok(4.0 * (d as f64).sqrt() * f_norm * (s + 1.0) / grad_norm)
}

/// Outcome law of phase estimation with q points for a = sin^2(π φ):
/// P(y) = (F(y/q - φ) + F(y/q + φ)) / 2 with the Fejér kernel
/// F(δ) = sin^2(π q δ) / (q^2 sin^2(π δ)).
pub fn phase_outcome_probabilities(a: f64, q: usize) -> Vec<f64> {
    let phi = a.clamp(0.0, 1.0).sqrt().asin() / PI;
    let qf = q as f64;
    let fejer = |delta: f64| {
        let s = (PI * delta).sin();
        if s.abs() < 1e-12 {
            1.0
        } else {
            ((PI * qf * delta).sin() / (qf * s)).powi(2)
        }
    };
    let mut p: Vec<f64> = (0..q)
        .map(|y| {
            let x = y as f64 / qf;
            0.5 * (fejer(x - phi) + fejer(x + phi))
        })
        .collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= s);
    p
}

/// 2π √(a(1-a)) / q + π^2 / q^2
pub fn estimation_envelope(a: f64, q: usize) -> f64 {
    let qf = q as f64;
    2.0 * PI * (a * (1.0 - a)).sqrt() / qf + PI * PI / (qf * qf)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmulatorStats {
    pub q: usize,
    pub trials: usize,
    pub true_ratio: f64,
    pub median_err: f64,
    pub envelope: f64,
    /// Probability that one run lands inside the envelope.
    pub single_run_success: f64,
    /// Error quantiles (50%, 90%) over the boosted repetitions.
    pub err_q50: f64,
    pub err_q90: f64,
    /// Bernoulli samples giving the same standard error as median_err.
    pub mc_samples_equivalent: f64,
}

fn quantile(v: &mut [f64], q: f64) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let i = ((v.len() - 1) as f64 * q).round() as usize;
    v[i]
}

fn sample_index(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c < u).min(cdf.len() - 1)
}

/// Emulated amplitude estimation: each run draws a phase-estimation outcome
/// from its exact law and reports sin^2(π y/q); `trials` runs are combined
/// by their median. Repeated `reps` times to collect error statistics.
pub fn amplitude_estimation_emulator(true_ratio: f64, q: usize, trials: usize, reps: usize, seed: u64) -> Result<EmulatorStats> {
    if !(0.0..=1.0).contains(&true_ratio) || q == 0 || trials == 0 || reps == 0 {
        return invalid("need ratio in [0, 1], q >= 1, trials >= 1, reps >= 1");
    }
    let probs = phase_outcome_probabilities(true_ratio, q);
    let mut cdf = Vec::with_capacity(q);
    let mut acc = 0.0;
    for p in &probs {
        acc += p;
        cdf.push(acc);
    }
    let env = estimation_envelope(true_ratio, q);
    let estimate = |y: usize| (PI * y as f64 / q as f64).sin().powi(2);
    let single: f64 = probs
        .iter()
        .enumerate()
        .filter(|(y, _)| (estimate(*y) - true_ratio).abs() <= env)
        .map(|(_, p)| p)
        .sum();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs = Vec::with_capacity(reps);
    let mut runs = vec![0.0; trials];
    for _ in 0..reps {
        for r in runs.iter_mut() {
            *r = estimate(sample_index(&cdf, rng.gen::<f64>()));
        }
        let med = quantile(&mut runs, 0.5);
        errs.push((med - true_ratio).abs());
    }
    let median_err = quantile(&mut errs, 0.5);
    let err_q90 = quantile(&mut errs, 0.9);
    let var = true_ratio * (1.0 - true_ratio);
    Ok(EmulatorStats {
        q,
        trials,
        true_ratio,
        median_err,
        envelope: env,
        single_run_success: single,
        err_q50: median_err,
        err_q90,
        mc_samples_equivalent: if median_err > 0.0 { var / (median_err * median_err) } else { f64::INFINITY },
    })
}

/// Error quantile of the sample mean of `samples` Bernoulli(true_ratio)
/// draws over `reps` repetitions.
pub fn monte_carlo_error(true_ratio: f64, samples: usize, reps: usize, q: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut errs: Vec<f64> = (0..reps).map(|_| mc_error_once(true_ratio, samples, &mut rng)).collect();
    quantile(&mut errs, q)
}

fn mc_error_once(a: f64, samples: usize, rng: &mut ChaCha8Rng) -> f64 {
    let hits = (0..samples).filter(|_| rng.gen::<f64>() < a).count();
    (hits as f64 / samples as f64 - a).abs()
}

fn emulated_error_once(a: f64, q: usize, trials: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut acc = 0.0;
    let cdf: Vec<f64> = phase_outcome_probabilities(a, q)
        .into_iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect();
    let mut runs: Vec<f64> = (0..trials)
        .map(|_| (PI * sample_index(&cdf, rng.gen::<f64>()) as f64 / q as f64).sin().powi(2))
        .collect();
    (quantile(&mut runs, 0.5) - a).abs()
}

/// Least-squares slope of y on x.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    /// (1/ε, queries) pairs for the emulator and for Monte Carlo.
    pub emulator: Vec<(f64, f64)>,
    pub monte_carlo: Vec<(f64, f64)>,
    /// slope of log(queries) against log(1/ε)
    pub emulator_exponent: f64,
    pub monte_carlo_exponent: f64,
}

/// Queries-versus-precision exponents. The emulator runs at q on a
/// geometric grid with `trials` runs each (cost q·trials), Monte Carlo at a
/// geometric grid of sample counts. Each repetition draws the amplitude
/// uniformly from `ratios`, so a lucky alignment of one amplitude with the
/// outcome grid does not dominate; precision is the 90% error quantile.
pub fn sampling_scaling(ratios: (f64, f64), trials: usize, reps: usize, seed: u64) -> Result<ScalingFit> {
    let (lo, hi) = ratios;
    if !(0.0 < lo && lo <= hi && hi < 1.0) || trials == 0 || reps < 10 {
        return invalid("need 0 < lo <= hi < 1, trials >= 1, reps >= 10");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut emulator = Vec::new();
    for q in [16usize, 32, 64, 128, 256, 512, 1024] {
        let mut errs: Vec<f64> = (0..reps)
            .map(|_| {
                let a = rng.gen_range(lo..=hi);
                emulated_error_once(a, q, trials, &mut rng)
            })
            .collect();
        emulator.push((1.0 / quantile(&mut errs, 0.9), (q * trials) as f64));
    }
    let mut monte_carlo = Vec::new();
    for s in [64usize, 256, 1024, 4096, 16384] {
        let mut errs: Vec<f64> = (0..reps)
            .map(|_| {
                let a = rng.gen_range(lo..=hi);
                mc_error_once(a, s, &mut rng)
            })
            .collect();
        monte_carlo.push((1.0 / quantile(&mut errs, 0.9), s as f64));
    }
    let slope = |pts: &[(f64, f64)]| {
        let x: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
        let y: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
        fit_slope(&x, &y)
    };
    Ok(ScalingFit {
        emulator_exponent: slope(&emulator),
        monte_carlo_exponent: slope(&monte_carlo),
        emulator,
        monte_carlo,
    })
}

/// Σ_{j,l} |∇f(k, l)|^2 for each time index k.
pub fn kinetic_profile(g: &GradientTensor) -> Vec<f64> {
    let s = g.n.pow(g.d as u32);
    let mut out = vec![0.0; g.m];
    for j in 0..g.d {
        for (i, v) in g.axis(j).iter().enumerate() {
            out[i / s] += v * v;
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumTime {
    /// max of the sampled time indices, times h
    pub sampled: f64,
    /// first time the profile drops below threshold * max
    pub deterministic: f64,
    pub threshold: f64,
    pub samples: usize,
}

/// Draws `samples` time indices with probability proportional to the
/// kinetic profile and reports the largest, times h.
pub fn equilibrium_time_from_profile(profile: &[f64], h: f64, samples: usize, seed: u64, threshold: f64) -> Result<EquilibriumTime> {
    let total: f64 = profile.iter().sum();
    if !(total > 0.0) {
        return invalid("zero gradient tensor");
    }
    let mut cdf = Vec::with_capacity(profile.len());
    let mut acc = 0.0;
    for p in profile {
        acc += p / total;
        cdf.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let kmax = (0..samples).map(|_| sample_index(&cdf, rng.gen::<f64>())).max().unwrap_or(0);
    let peak = profile.iter().copied().fold(0.0, f64::max);
    let kdet = profile
        .iter()
        .position(|&e| e < threshold * peak)
        .unwrap_or(profile.len() - 1);
    Ok(EquilibriumTime {
        sampled: kmax as f64 * h,
        deterministic: kdet as f64 * h,
        threshold,
        samples,
    })
}

pub fn equilibrium_time(g: &GradientTensor, samples: usize, seed: u64) -> Result<EquilibriumTime> {
    equilibrium_time_from_profile(&kinetic_profile(g), g.t_end / g.m as f64, samples, seed, 1e-3)
}
