use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use rdcarleman::experiments::{self, HistoryStats, Preset};
use rdcarleman::spectral::{self, HistoryTensor, SubDomain};
use rdcarleman::Error;

#[derive(Parser)]
#[command(name = "rdcarleman", version, about = "Carleman linearization experiments for reaction-diffusion equations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a preset and write its artifacts
    Run {
        preset: String,
        /// dot-path override, e.g. rd.D=0.2 or n_list=[1,2]
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run bound checks: all, rdode, carleman, linsys, heatdecay, spectral
    Audit {
        #[arg(default_value = "all")]
        scope: String,
        /// also print every record as JSON
        #[arg(long)]
        json: bool,
    },
    /// Query-complexity estimate and radii comparison as JSON
    Resources {
        preset: String,
        #[arg(long = "N")]
        n_trunc: usize,
        #[arg(long)]
        eps: f64,
        /// G to use instead of the one stored by a previous run
        #[arg(long = "G")]
        g: Option<f64>,
        /// max ||y(t)|| paired with --G (defaults to G)
        #[arg(long)]
        max_yhat: Option<f64>,
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Ratios and equilibrium time of a periodic history stored as CSV
    /// (columns k,l,value or t,l,value; l is the flattened spatial index)
    Spectral {
        input: PathBuf,
        #[arg(long)]
        theta: usize,
        /// t0,t1,x0_lo,x0_hi[,x1_lo,x1_hi...]
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        domain: Vec<f64>,
        /// final time when the first column is a step index
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// write the gradient tensor here
        #[arg(long)]
        gradient_csv: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Runtime(String),
    Checks,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidArgument(_) | Error::Toml(_) => Failure::Usage(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("usage error: {m}");
            ExitCode::from(2)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Run { preset, set, out } => {
            let p = Preset::builtin(&preset)?.with_overrides(&set)?;
            let dir = p.output_dir(&out);
            let art = experiments::run_preset(&p, &dir)?;
            if let Some(r) = &art.radii {
                println!("R = {:.6}  R_D = {:.6}  lambda1 = {:.6}  lambda = {:.6}", r.r, r.r_d, r.lambda1, r.lambda_used);
            } else if let Some(e) = &art.radii_error {
                println!("radii: {e}");
            }
            for (n, e) in art.max_errors() {
                println!("N = {n}: max_t ||eta1||_inf = {e:.4e}");
            }
            print!("{}", art.checks.summary_table());
            println!("wrote {} files to {}", art.files.len(), dir.display());
            if art.checks.all_ok() {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Audit { scope, json } => {
            let reports = experiments::audit_bounds(&scope)?;
            let mut ok = true;
            for r in &reports {
                print!("{}", r.summary_table());
                ok &= r.all_ok();
            }
            if json {
                println!("{}", serde_json::to_string_pretty(&reports).map_err(Error::from)?);
            }
            if ok {
                Ok(())
            } else {
                Err(Failure::Checks)
            }
        }
        Cmd::Resources {
            preset,
            n_trunc,
            eps,
            g,
            max_yhat,
            set,
            out,
        } => {
            let p = Preset::builtin(&preset)?.with_overrides(&set)?;
            let hist = match g {
                Some(g) => Some(HistoryStats {
                    n_trunc,
                    g,
                    max_yhat: max_yhat.unwrap_or(g),
                }),
                None => experiments::load_history(&p.output_dir(&out), n_trunc)?,
            };
            let rep = experiments::resource_report(&p, n_trunc, eps, hist)?;
            println!("{}", serde_json::to_string_pretty(&rep).map_err(Error::from)?);
            Ok(())
        }
        Cmd::Spectral {
            input,
            theta,
            domain,
            t_end,
            samples,
            seed,
            gradient_csv,
        } => {
            if domain.len() < 4 || domain.len() % 2 != 0 {
                return Err(Failure::Usage("--domain needs t0,t1 followed by one lo,hi pair per axis".into()));
            }
            let d = domain.len() / 2 - 1;
            let h = read_history(&input, d, t_end)?;
            let dom = SubDomain {
                t: (domain[0], domain[1]),
                x: domain[2..].chunks(2).map(|c| (c[0], c[1])).collect(),
            };
            let g = spectral::spectral_gradient(&h, theta)?;
            let eq = spectral::equilibrium_time(&g, samples, seed)?;
            let out = serde_json::json!({
                "m": h.m,
                "n": h.n,
                "d": h.d,
                "theta": theta,
                "mean_square_ratio": spectral::mean_square_ratio(&h, &dom)?,
                "kinetic_energy_ratio": spectral::kinetic_energy_ratio(&h, &dom, theta)?,
                "imag_residue": g.imag_residue,
                "equilibrium_time": eq,
            });
            if let Some(path) = gradient_csv {
                g.write_csv(std::fs::File::create(path).map_err(Error::from)?)?;
            }
            println!("{}", serde_json::to_string_pretty(&out).map_err(Error::from)?);
            Ok(())
        }
    }
}

fn read_history(path: &PathBuf, d: usize, t_end: f64) -> Result<HistoryTensor, Failure> {
    let mut rd = csv::Reader::from_path(path).map_err(Error::from)?;
    let timed = rd.headers().map_err(Error::from)?.get(0).map(|h| h.trim() == "t").unwrap_or(false);
    let mut rows: Vec<(f64, usize, f64)> = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(Error::from)?;
        let parse = |i: usize| -> Result<f64, Failure> {
            rec.get(i)
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| Failure::Usage(format!("bad field {i} in {:?}", rec)))
        };
        rows.push((parse(0)?, parse(1)? as usize, parse(2)?));
    }
    if rows.is_empty() {
        return Err(Failure::Usage("empty input".into()));
    }
    let mut times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup();
    let m = times.len();
    let s = rows.iter().map(|r| r.1).max().unwrap() + 1;
    let n = (s as f64).powf(1.0 / d as f64).round() as usize;
    if n.pow(d as u32) != s || rows.len() != m * s {
        return Err(Failure::Usage(format!("{} rows do not form an m x n^{d} history", rows.len())));
    }
    let t_end = if timed && m > 1 { m as f64 * (times[1] - times[0]) } else { t_end };
    let mut values = vec![0.0; m * s];
    for (t, l, v) in rows {
        let k = times.iter().position(|x| *x == t).unwrap();
        values[k * s + l] = v;
    }
    Ok(HistoryTensor::new(m, n, d, t_end, values)?)
}
