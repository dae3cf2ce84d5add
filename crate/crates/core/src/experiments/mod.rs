//! Named presets, the run pipeline behind them, bound audits and resource
//! reports.
//!
//! A preset is a TOML document; the built-in ones live in `presets/`.
//! Fields can be overridden dot-path style (`rd.D=0.2`, `grid.n=16`).

mod plot;

pub use plot::convergence_svg;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use crate::carleman::*;
use crate::error::{invalid, Error, Result};
use crate::grid::*;
use crate::heatdecay::{logspace, probe_1d, probe_integral};
use crate::linsys::*;
use crate::rdode::*;
use crate::report::BoundReport;
use crate::spectral;

pub const PRESET_NAMES: [&str; 7] = ["fig1a", "fig1b", "fig2", "fig3", "fig4a", "fig4b_n16", "fig4b_n14"];

pub const AUDIT_SCOPES: [&str; 6] = ["all", "rdode", "carleman", "linsys", "heatdecay", "spectral"];

fn preset_source(name: &str) -> Option<&'static str> {
    Some(match name {
        "fig1a" => include_str!("presets/fig1a.toml"),
        "fig1b" => include_str!("presets/fig1b.toml"),
        "fig2" => include_str!("presets/fig2.toml"),
        "fig3" => include_str!("presets/fig3.toml"),
        "fig4a" => include_str!("presets/fig4a.toml"),
        "fig4b_n16" | "fig4b" => include_str!("presets/fig4b_n16.toml"),
        "fig4b_n14" => include_str!("presets/fig4b_n14.toml"),
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum U0Kind {
    /// A Π sin(2π k x_i)
    Sin,
    /// A Π (1 - cos(2π k x_i))
    OneMinusCos,
    /// A
    Constant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialCondition {
    pub kind: U0Kind,
    pub amplitude: f64,
    #[serde(default = "one")]
    pub k: u32,
}

fn one() -> u32 {
    1
}

impl InitialCondition {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let k = self.k as f64;
        let g: f64 = match self.kind {
            U0Kind::Sin => x.iter().map(|v| (2.0 * PI * k * v).sin()).product(),
            U0Kind::OneMinusCos => x.iter().map(|v| 1.0 - (2.0 * PI * k * v).cos()).product(),
            U0Kind::Constant => 1.0,
        };
        self.amplitude * g
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub d: usize,
    /// Dirichlet axes; defaults to all of them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<usize>,
    #[serde(default)]
    pub sampling: Sampling,
}

impl GridConfig {
    pub fn spec(&self) -> Result<GridSpec> {
        GridSpec::new(self.n, self.d, self.d1.unwrap_or(self.d))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaConfig {
    #[serde(default)]
    pub policy: LambdaPolicy,
    #[serde(default)]
    pub breakpoint: Breakpoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Preset {
    pub name: String,
    pub rd: RDParams,
    pub grid: GridConfig,
    pub u0: InitialCondition,
    pub t_end: f64,
    #[serde(default = "default_n_out")]
    pub n_out: usize,
    #[serde(default)]
    pub n_list: Vec<usize>,
    #[serde(default)]
    pub lambda: LambdaConfig,
    /// reference-solver step-halving tolerance
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

fn default_n_out() -> usize {
    100
}

fn default_tol() -> f64 {
    1e-12
}

impl Preset {
    pub fn parse(src: &str) -> Result<Self> {
        let p: Preset = toml::from_str(src)?;
        p.validate()?;
        Ok(p)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let src = preset_source(name).ok_or_else(|| {
            Error::Config(format!("unknown preset '{name}' (known: {})", PRESET_NAMES.join(", ")))
        })?;
        Self::parse(src)
    }

    fn validate(&self) -> Result<()> {
        RDParams::new(self.rd.d, self.rd.a, self.rd.b, self.rd.m)?;
        self.grid.spec()?;
        if !(self.t_end > 0.0) || self.n_out == 0 {
            return invalid("need t_end > 0 and n_out >= 1");
        }
        if self.n_list.contains(&0) {
            return invalid("truncation orders start at 1");
        }
        Ok(())
    }

    /// Applies `key=value` overrides; values are read as TOML scalars or
    /// arrays, falling back to a bare string.
    pub fn with_overrides(&self, sets: &[String]) -> Result<Self> {
        let mut doc = toml::Value::try_from(self).map_err(|e| Error::Config(e.to_string()))?;
        for s in sets {
            let (key, raw) = s
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("override '{s}' is not key=value")))?;
            let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.to_string()));
            set_path(&mut doc, key.trim(), value)?;
        }
        let p: Preset = doc.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn output_dir(&self, root: &Path) -> PathBuf {
        match &self.output {
            Some(o) => PathBuf::from(o),
            None => root.join(&self.name),
        }
    }

    pub fn initial_field(&self) -> Result<SpatialField> {
        Ok(SpatialField::from_fn(self.grid.spec()?, self.grid.sampling, |x| self.u0.eval(x)))
    }
}

fn set_path(doc: &mut toml::Value, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    if key.is_empty() || parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key '{key}'")));
    }
    let mut cur = doc;
    for p in &parts[..parts.len() - 1] {
        let t = cur
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("'{key}': '{p}' is not a table")))?;
        cur = t
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(Default::default()));
    }
    cur.as_table_mut()
        .ok_or_else(|| Error::Config(format!("'{key}' does not name a field")))?
        .insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

/// Block-1 output of one truncation order, on the full grid.
#[derive(Debug, Clone)]
pub struct CarlemanRun {
    pub n_trunc: usize,
    /// stored (symmetric, possibly reflection-reduced) dimension
    pub dim: usize,
    pub matvecs: usize,
    pub block1: Vec<Vec<f64>>,
    pub lifted_norms: Vec<f64>,
    pub report: TruncationReport,
    /// root-mean-square block-1 norm over the output samples
    pub g: f64,
    pub max_yhat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistoryStats {
    #[serde(rename = "N")]
    pub n_trunc: usize,
    #[serde(rename = "G")]
    pub g: f64,
    pub max_yhat: f64,
}

#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub preset: Preset,
    pub dir: PathBuf,
    pub reference: Trajectory,
    pub radii: Option<ConvergenceRadii>,
    pub radii_error: Option<String>,
    pub runs: Vec<CarlemanRun>,
    /// first sampled time with ||U(t)||_inf > ||U(0)||_inf
    pub sup_norm_increase: Option<f64>,
    pub checks: BoundReport,
    pub files: Vec<PathBuf>,
}

impl RunArtifacts {
    pub fn run(&self, n_trunc: usize) -> Option<&CarlemanRun> {
        self.runs.iter().find(|r| r.n_trunc == n_trunc)
    }

    /// (N, max_t ||η1||_inf)
    pub fn max_errors(&self) -> Vec<(usize, f64)> {
        self.runs.iter().map(|r| (r.n_trunc, r.report.max_eta_inf())).collect()
    }

    pub fn history(&self) -> Vec<HistoryStats> {
        self.runs
            .iter()
            .map(|r| HistoryStats {
                n_trunc: r.n_trunc,
                g: r.g,
                max_yhat: r.max_yhat,
            })
            .collect()
    }
}

fn with_context<T>(preset: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| Error::Preset {
        preset: preset.to_string(),
        source: Box::new(e),
    })
}

/// Reference solve, Carleman runs over the N list, radii, bound checks and
/// a small-scale linear-system audit; writes CSV, JSON and SVG into `dir`.
pub fn run_preset(preset: &Preset, dir: &Path) -> Result<RunArtifacts> {
    with_context(&preset.name, run_inner(preset, dir))
}

/// Same as `run_preset` without touching the filesystem.
pub fn compute_preset(preset: &Preset) -> Result<RunArtifacts> {
    with_context(&preset.name, compute(preset))
}

fn compute(preset: &Preset) -> Result<RunArtifacts> {
    let p = RDParams::new(preset.rd.d, preset.rd.a, preset.rd.b, preset.rd.m)?;
    let grid = preset.grid.spec()?;
    let u0 = preset.initial_field()?;
    let lap = build_laplacian_nd(&grid)?;
    let mut so = SolveOptions::new(preset.t_end, preset.tol);
    so.n_out = preset.n_out;
    so.metric = AuditMetric::Trajectory;
    let reference = reference_solve_op(&p, &lap, grid, &u0.values, &so)?;

    let mut checks = BoundReport::new(format!("preset {}", preset.name));
    match reaction_roots(&p) {
        Ok(r) if r.distinct => checks.extend(check_maximum_principle(&reference, r.gamma1, r.gamma2, 1e-8)),
        Ok(_) => checks.skip("maximum principle", "f has a single real root"),
        Err(e) => checks.skip("maximum principle", e.to_string()),
    }
    checks.extend(energy_monotonicity(&p, &reference, 1e-8));
    let lambda1 = p.lambda1(&grid);
    if let Ok(r) = l2_decay_checks(&reference, &p, lambda1, 1.0) {
        checks.extend(r);
    }
    let sup_norm_increase = reference.first_sup_norm_increase();
    match sup_norm_increase {
        Some(t) => checks.note(format!("||U(t)||_inf first exceeds ||U(0)||_inf at t = {t}")),
        None => checks.note("||U(t)||_inf never exceeds ||U(0)||_inf at the sampled times"),
    }

    let (radii, radii_error) = match compute_radii(
        &p,
        &grid,
        norm2(&u0.values),
        Some(reference.max_l2_norm()),
        preset.lambda.policy,
        preset.lambda.breakpoint,
    ) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };

    let runs = carleman_runs(preset, &p, &u0, &reference, radii.as_ref())?;
    for r in &runs {
        checks.extend(r.report.checks.clone());
    }
    if !preset.n_list.is_empty() {
        checks.extend(linsys_audit(preset, 2, 50)?);
    }
    Ok(RunArtifacts {
        preset: preset.clone(),
        dir: PathBuf::new(),
        reference,
        radii,
        radii_error,
        runs,
        sup_norm_increase,
        checks,
        files: Vec::new(),
    })
}

fn carleman_runs(
    preset: &Preset,
    p: &RDParams,
    u0: &SpatialField,
    reference: &Trajectory,
    radii: Option<&ConvergenceRadii>,
) -> Result<Vec<CarlemanRun>> {
    if preset.n_list.is_empty() {
        return Ok(Vec::new());
    }
    let refl = Reflection::detect(u0, p.m, 1e-12);
    let (f1, y_base, weight) = match &refl {
        Some(r) => (p.f1(&r.reduced_laplacian()), r.reduce(&u0.values), r.multiplicity()),
        None => (p.f1(&build_laplacian_nd(&u0.grid)?), u0.values.clone(), 1.0),
    };
    let bounds = radii.map(|r| BoundInputs::from_radii(r, reference.max_l2_norm()));
    let one = |n_trunc: usize| -> Result<CarlemanRun> {
        let s = SymmetricCarleman::build_default(&f1, p.b, p.m, n_trunc)?;
        let flow = WeightedSymmetric {
            system: &s,
            base_weight: weight,
        };
        let sp = SpectrumBounds::from_f1(&f1, n_trunc);
        let lt = evolve_truncated(&flow, sp, &s.lift(&y_base), &EvolveOptions::new(preset.t_end, preset.n_out))?;
        let block1: Vec<Vec<f64>> = match &refl {
            Some(r) => lt.block1.iter().map(|b| r.expand(b)).collect(),
            None => lt.block1.clone(),
        };
        let report = truncation_error(&lt.times, &block1, &reference.times, &reference.states, bounds.as_ref(), n_trunc, p.m);
        let hist = HistoryState::new(preset.t_end / preset.n_out as f64, block1.clone(), lt.lifted_norms.clone())?;
        Ok(CarlemanRun {
            n_trunc,
            dim: s.dim,
            matvecs: lt.matvecs,
            g: compute_G(&hist),
            max_yhat: lt.lifted_norms.iter().copied().fold(0.0, f64::max),
            block1,
            lifted_norms: lt.lifted_norms,
            report,
        })
    };
    let results: Vec<Result<CarlemanRun>> = std::thread::scope(|sc| {
        let handles: Vec<_> = preset.n_list.iter().map(|&n| sc.spawn(move || one(n))).collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::Config("worker panicked".into()))))
            .collect()
    });
    results.into_iter().collect()
}

/// Linear-system checks on a coarsened copy of the preset (n <= 8, the
/// given N): stability of I + A h at the step bound, κ(L) on at most
/// `m_cap` steps, Euler error against the global bound, and the
/// measurement-probability bound.
pub fn linsys_audit(preset: &Preset, n_trunc: usize, m_cap: usize) -> Result<BoundReport> {
    let mut out = BoundReport::new(format!("linsys {} (n <= 8, N = {n_trunc})", preset.name));
    let p = RDParams::new(preset.rd.d, preset.rd.a, preset.rd.b, preset.rd.m)?;
    let mut small = preset.grid;
    small.n = small.n.min(8);
    let grid = small.spec()?;
    let u0 = SpatialField::from_fn(grid, small.sampling, |x| preset.u0.eval(x));
    let f1 = p.f1(&build_laplacian_nd(&grid)?);
    let sys = build_blocks(&f1, &PowerMap::new(grid.size(), p.m, p.b), n_trunc, p.m)?;
    let y = lift_initial(&u0.values, n_trunc, EVOLVE_CAP)?;
    let lambda1 = p.lambda1(&grid);
    if !(lambda1 < 0.0) {
        out.skip("linear-system bounds", format!("lambda1 = {lambda1:.4} >= 0 on the coarse grid"));
        return Ok(out);
    }
    let h = max_stable_timestep(n_trunc, p.d, grid.d, grid.n, p.a)?;
    out.extend(stability_check(&sys, h)?.report);
    let m_full = (preset.t_end / h - 1e-9).ceil() as usize;
    let m = m_full.min(m_cap);
    let cond = condition_bound_and_measure(&sys, m, h);
    out.extend(cond.report);
    if m < m_full {
        out.note(format!("kappa(L) measured on {m} of {m_full} steps"));
    }
    let sp = SpectrumBounds::from_f1(&f1, n_trunc);
    let hist = euler_evolve(&sys, &y, preset.t_end, h)?;
    let exact = evolve_truncated(&sys, sp, &y, &EvolveOptions::new(preset.t_end, 1))?;
    let errs = lifted_global_errors(&sys, sp, &y, preset.t_end, h)?;
    let max_err = errs.iter().copied().fold(0.0, f64::max);
    let max_yhat = exact.lifted_norms.iter().copied().fold(0.0, f64::max).max(
        hist.lifted_norms.iter().copied().fold(0.0, f64::max),
    );
    let diff: Vec<f64> = hist.final_block1().iter().zip(&exact.block1[1]).map(|(a, b)| a - b).collect();
    let bound = global_error_bound(n_trunc, p.d, grid.d, grid.n, p.a, p.b, preset.t_end, hist.h, max_yhat);
    out.le("||y_1(T) - y_1^m|| <= global Euler bound", norm2(&diff), bound, 0.0);
    let meas = measurement_probability_bound(&hist, max_yhat + max_err, max_err);
    out.extend(meas.report);
    Ok(out)
}

fn run_inner(preset: &Preset, dir: &Path) -> Result<RunArtifacts> {
    let mut art = compute(preset)?;
    fs::create_dir_all(dir)?;
    art.dir = dir.to_path_buf();
    let mut files = Vec::new();
    let mut put = |name: &str, bytes: Vec<u8>| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, bytes)?;
        files.push(path);
        Ok(())
    };

    let mut buf = Vec::new();
    art.reference.write_csv(&mut buf)?;
    put("reference.csv", buf)?;

    let mut buf = Vec::new();
    write_state_stats_csv(preset, &art.reference, &mut buf)?;
    put("state_stats.csv", buf)?;

    if !art.runs.is_empty() {
        let reports: Vec<TruncationReport> = art.runs.iter().map(|r| r.report.clone()).collect();
        let mut buf = Vec::new();
        write_truncation_csv(&reports, &mut buf)?;
        put("truncation.csv", buf)?;

        let mut buf = Vec::new();
        write_max_error_csv(&art.runs, &mut buf)?;
        put("max_error.csv", buf)?;

        put("convergence.svg", convergence_svg(&preset.name, &reports).into_bytes())?;
        put("history.json", serde_json::to_vec_pretty(&art.history())?)?;
    }

    let radii = match (&art.radii, &art.radii_error) {
        (Some(r), _) => serde_json::to_value(r)?,
        (None, Some(e)) => serde_json::json!({ "error": e }),
        _ => serde_json::Value::Null,
    };
    put("radii.json", serde_json::to_vec_pretty(&radii)?)?;
    put("checks.json", serde_json::to_vec_pretty(&art.checks)?)?;
    put("summary.txt", art.checks.summary_table().into_bytes())?;
    put("preset.toml", preset.to_toml()?.into_bytes())?;
    art.files = files;
    Ok(art)
}

fn write_state_stats_csv<W: std::io::Write>(preset: &Preset, traj: &Trajectory, w: W) -> Result<()> {
    let p = preset.rd;
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["t", "min", "max", "sup_norm", "l2_norm", "energy"])?;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        wr.write_record([t, &lo, &hi, &norm_inf(s), &norm2(s), &energy(&p, &traj.grid, s)].map(|v| format!("{v:.15e}")))?;
    }
    wr.flush()?;
    Ok(())
}

fn write_max_error_csv<W: std::io::Write>(runs: &[CarlemanRun], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["N", "dim", "max_eta1_inf", "max_eta1_l2", "bound_inf", "ratio_to_previous"])?;
    let mut prev: Option<f64> = None;
    for r in runs {
        let e = r.report.max_eta_inf();
        let ratio = prev.map(|p| format!("{:.15e}", e / p)).unwrap_or_default();
        wr.write_record([
            r.n_trunc.to_string(),
            r.dim.to_string(),
            format!("{e:.15e}"),
            format!("{:.15e}", r.report.max_eta_l2()),
            r.report.bound_inf.map(|b| format!("{b:.15e}")).unwrap_or_default(),
            ratio,
        ])?;
        prev = Some(e);
    }
    wr.flush()?;
    Ok(())
}

/// Reads the per-N history statistics a previous run wrote.
pub fn load_history(dir: &Path, n_trunc: usize) -> Result<Option<HistoryStats>> {
    let path = dir.join("history.json");
    if !path.exists() {
        return Ok(None);
    }
    let all: Vec<HistoryStats> = serde_json::from_slice(&fs::read(path)?)?;
    Ok(all.into_iter().find(|h| h.n_trunc == n_trunc))
}

#[derive(Debug, Clone, Serialize)]
pub struct GridRefinementTags {
    #[serde(rename = "R")]
    pub r: &'static str,
    #[serde(rename = "R_D")]
    pub r_d: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResourceSummary {
    pub preset: String,
    #[serde(rename = "N")]
    pub n_trunc: usize,
    pub epsilon: f64,
    pub resources: ResourceReport,
    pub query: QueryEstimate,
    #[serde(rename = "R_gt_1")]
    pub r_gt_1: bool,
    #[serde(rename = "R_D_lt_1")]
    pub r_d_lt_1: bool,
    pub grid_refinement: GridRefinementTags,
    /// Σ over block rows of the nonzeros per row used as the sparsity s
    pub sparsity: usize,
}

/// Query-count estimate and the radii comparison for one preset and N.
/// `history` carries G and max ||ŷ||, from a previous run or supplied.
pub fn resource_report(preset: &Preset, n_trunc: usize, epsilon: f64, history: Option<HistoryStats>) -> Result<ResourceSummary> {
    let hs = history.ok_or_else(|| {
        Error::Config(format!(
            "G is not available for {} at N = {n_trunc}: run `rdcarleman run {}` with N = {n_trunc} in its list first, or supply G",
            preset.name, preset.name
        ))
    })?;
    if n_trunc == 0 {
        return invalid("N must be at least 1");
    }
    let p = RDParams::new(preset.rd.d, preset.rd.a, preset.rd.b, preset.rd.m)?;
    let grid = preset.grid.spec()?;
    let u0 = preset.initial_field()?;
    let u_norm = norm2(&u0.values);
    let radii = compute_radii(&p, &grid, u_norm, None, preset.lambda.policy, preset.lambda.breakpoint)?;
    let h = max_stable_timestep(n_trunc, p.d, grid.d, grid.n, p.a)?;
    let m = (preset.t_end / h - 1e-9).ceil() as usize;
    let f1 = p.f1(&build_laplacian_nd(&grid)?);
    let sparsity = n_trunc * (f1.sparsity() + 1);
    let kappa_measured = if (m + 1) * carleman_dimension(grid.size(), n_trunc)? <= L_DENSE_CAP {
        let sys = build_blocks(&f1, &PowerMap::new(grid.size(), p.m, p.b), n_trunc, p.m)?;
        condition_bound_and_measure(&sys, m, h).measured
    } else {
        None
    };
    let ge = global_error_bound(n_trunc, p.d, grid.d, grid.n, p.a, p.b, preset.t_end, h, hs.max_yhat);
    let p_bound = (ge <= hs.g / 2.0).then(|| 2.0 * hs.g * hs.g / (16.0 * hs.max_yhat * hs.max_yhat + hs.g * hs.g));
    let q = query_complexity_estimate(&QueryInputs {
        diff: p.d,
        d: grid.d,
        n: grid.n,
        n_trunc,
        t_end: preset.t_end,
        epsilon,
        g: hs.g,
        sparsity,
        u_in_norm: u_norm,
        r_d: radii.r_d,
        polylog_factor: 1.0,
    })?;
    Ok(ResourceSummary {
        preset: preset.name.clone(),
        n_trunc,
        epsilon,
        resources: ResourceReport {
            lambda1: radii.lambda1,
            gamma: radii.gamma,
            r: radii.r,
            r_d: radii.r_d,
            h_bound: h,
            m,
            kappa_bound: 2.0 * (m + 1) as f64,
            kappa_measured,
            g: hs.g,
            p_measure_bound: p_bound,
            query_estimate: q.value,
            prefactor_uin_n: q.prefactor_uin_2n,
        },
        r_gt_1: radii.r > 1.0,
        r_d_lt_1: radii.r_d < 1.0,
        grid_refinement: GridRefinementTags {
            r: "O(n_d^{1/2})",
            r_d: "O(1)",
        },
        sparsity,
        query: q,
    })
}

/// Runs the inequality checks of one module (or all of them) across their
/// probe grids. Failures are results, not errors.
pub fn audit_bounds(scope: &str) -> Result<Vec<BoundReport>> {
    let scope = scope.trim();
    if scope.is_empty() {
        return invalid(format!("empty audit scope (one of {})", AUDIT_SCOPES.join(", ")));
    }
    if !AUDIT_SCOPES.contains(&scope) {
        return invalid(format!("unknown audit scope '{scope}' (one of {})", AUDIT_SCOPES.join(", ")));
    }
    let want = |s: &str| scope == "all" || scope == s;
    let mut out = Vec::new();
    if want("rdode") {
        out.extend(audit_rdode()?);
    }
    if want("carleman") {
        out.extend(audit_carleman()?);
    }
    if want("linsys") {
        for name in ["fig2", "fig3"] {
            out.push(linsys_audit(&Preset::builtin(name)?, 2, 50)?);
        }
    }
    if want("heatdecay") {
        out.push(audit_heatdecay()?);
    }
    if want("spectral") {
        out.push(audit_spectral()?);
    }
    Ok(out)
}

fn audit_rdode() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    for name in ["fig1a", "fig1b", "fig2", "fig3"] {
        let mut pr = Preset::builtin(name)?;
        pr.n_list.clear();
        let art = compute_preset(&pr)?;
        let mut r = art.checks;
        r.scope = format!("rdode {name}");
        out.push(r);
    }
    Ok(out)
}

fn audit_carleman() -> Result<Vec<BoundReport>> {
    let mut out = Vec::new();
    let fig4b = Preset::builtin("fig4b_n16")?;
    let art = compute_preset(&fig4b.with_overrides(&["n_list=[2, 4]".into()])?)?;
    let mut r = BoundReport::new("carleman fig4b_n16");
    if let Some(rd) = &art.radii {
        r.le("|R - 1.4924|", (rd.r - 1.4924).abs(), 5e-4, 0.0);
        r.le("|R_D - 0.9299|", (rd.r_d - 0.9299).abs(), 5e-4, 0.0);
    }
    for run in &art.runs {
        r.extend(run.report.checks.clone());
    }
    out.push(r);
    let fig3 = Preset::builtin("fig3")?.with_overrides(&["grid.n=16".into(), "n_list=[2, 4, 6]".into()])?;
    let art = compute_preset(&fig3)?;
    let mut r = BoundReport::new("carleman fig3 (n = 16)");
    for run in &art.runs {
        r.extend(run.report.checks.clone());
    }
    out.push(r);
    Ok(out)
}

fn audit_heatdecay() -> Result<BoundReport> {
    let mut r = BoundReport::new("heatdecay");
    let times = logspace(1e-4, 5.0, 50);
    let mut bad = 0usize;
    let mut rows = 0usize;
    for n in 2..=32 {
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Periodic] {
            let p = probe_1d(n, bc, 1.0, &times)?;
            bad += p.violations();
            rows += p.rows.len();
        }
    }
    for (d, a) in [(0.012, 0.0196), (0.2, 0.0), (0.1, 0.16)] {
        let g = GridSpec::dirichlet(8, 1)?;
        let l1 = d * mu1(8, BoundaryKind::Dirichlet) + a;
        let rr = probe_integral(&g, d, a, l1 / 2.3, &[1, 2, 3], &[0.5, 2.0, 5.0])?;
        bad += rr.iter().filter(|x| !x.ok).count();
        rows += rr.len();
    }
    r.le("violations over the probe grid", bad as f64, 0.0, 0.0);
    r.note(format!("{rows} probe rows"));
    Ok(r)
}

fn audit_spectral() -> Result<BoundReport> {
    let mut r = BoundReport::new("spectral");
    for (name, f, df) in spectral::smooth_test_family() {
        for n in [8usize, 16, 32, 64, 128] {
            let mut thetas = vec![1, 2, n / 8, n / 4, n / 2];
            thetas.dedup();
            for theta in thetas {
                let (err, bound, p) = spectral::gradient_bound_probe(f, df, n, theta)?;
                r.le(format!("{name} n={n} theta={theta} (p={p}): error <= bound"), err, bound, 0.0);
            }
        }
    }
    Ok(r)
}
