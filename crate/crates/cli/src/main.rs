use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand};

use linked_kde::bandwidth::log_time_grid;
use linked_kde::bench::{
    run_mise_experiment, sample_synthetic, write_mise_csv, BandwidthChoice, EstimatorMethod,
    SyntheticTarget,
};
use linked_kde::{
    bin_samples, build_four_corners, estimate_r, lscv_bandwidth, matrix_exponential_evolve,
    series_estimate, silverman_bandwidth, spectral_data, BinnedDensity, BoundaryRatio,
    DiffusionTime, EvaluationGrid, GridDensity, SampleSet, SummationControl,
};

/// Kernel density estimation on [0, 1] with linked boundary conditions.
#[derive(Parser)]
#[command(name = "linked-kde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a density from samples, one per line.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        /// Boundary ratio f(0)/f(1), or `est` to estimate it from the data.
        #[arg(long, default_value = "est")]
        r: String,
        /// silverman, lscv or fixed:VALUE (VALUE is the diffusion time t).
        #[arg(long, default_value = "silverman")]
        bandwidth: String,
        /// series or binned.
        #[arg(long, default_value = "series")]
        method: String,
        /// Interior nodes for the binned method.
        #[arg(long, default_value_t = 256)]
        bins: usize,
        /// Number of evenly spaced output points on [0, 1].
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        output: PathBuf,
    },
    /// Draw samples from a synthetic target.
    Synth {
        /// beta_mixture:a=A, cosine_bump:amp=B, parabolic or trimodal.
        #[arg(long)]
        target: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Mean error table over replicates for several sample sizes.
    Bench {
        #[arg(long)]
        target: String,
        #[arg(long, value_delimiter = ',', default_value = "linked,cosine,gaussian")]
        methods: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "100,316,1000,3162,10000")]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        reps: usize,
        /// oracle, silverman, lscv or fixed:VALUE.
        #[arg(long, default_value = "oracle")]
        bandwidth: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Eigenpairs of the four-corners matrix with their residuals.
    Eigs {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<linked_kde::Error>() {
        Some(err) if !err.is_input_error() => 3,
        _ => 2,
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    match command {
        Command::Estimate {
            input,
            r,
            bandwidth,
            method,
            bins,
            grid,
            output,
        } => {
            let samples = read_samples(&input)?;
            let r = parse_ratio(&r, &samples)?;
            let t = select_time(&bandwidth, &samples, r)?;
            let grid = EvaluationGrid::uniform(grid)?;
            let est = match method.as_str() {
                "series" => series_estimate(&samples, r, t, &grid, &SummationControl::default())?,
                "binned" => {
                    let u = bin_samples(&samples, bins, r)?;
                    let evolved = matrix_exponential_evolve(&u, t)?.density;
                    interpolate(&evolved, &grid, t)
                }
                other => bail!(linked_kde::Error::InvalidParameter(format!(
                    "unknown method '{other}', expected series or binned"
                ))),
            };
            write_output(&output, |w| write_density(&est, w))
        }
        Command::Synth {
            target,
            n,
            seed,
            output,
        } => {
            let target = parse_target(&target)?;
            let samples = sample_synthetic(&target, n, seed)?;
            write_output(&output, |w| {
                for x in samples.values() {
                    writeln!(w, "{x:.16e}")?;
                }
                Ok(())
            })
        }
        Command::Bench {
            target,
            methods,
            ns,
            reps,
            bandwidth,
            seed,
            output,
        } => {
            let target = parse_target(&target)?;
            let choice = parse_choice(&bandwidth)?;
            let mut rows = Vec::new();
            for m in &methods {
                let method = EstimatorMethod::parse(m.trim())?;
                rows.extend(run_mise_experiment(
                    &target, method, &ns, reps, choice, seed,
                )?);
            }
            write_output(&output, |w| write_mise_csv(&rows, w))
        }
        Command::Eigs { m, r, output } => {
            let r = BoundaryRatio::new(r)?;
            let sd = spectral_data(m, r)?;
            let a = build_four_corners(m, r)?.dense();
            write_output(&output, |w| {
                writeln!(w, "k,angle,eigenvalue,residual,stationary")?;
                for k in 0..m {
                    let v = sd.eigenvectors.column(k);
                    let res = (&a * v - v * sd.eigenvalues[k]).amax() / v.amax();
                    writeln!(
                        w,
                        "{k},{:.16e},{:.16e},{res:.16e},{}",
                        sd.angles[k],
                        sd.eigenvalues[k],
                        u8::from(k == sd.stationary_index)
                    )?;
                }
                Ok(())
            })
        }
    }
}

fn read_samples(path: &Path) -> anyhow::Result<SampleSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line
            .parse()
            .map_err(|_| anyhow!("{}:{}: not a number: '{line}'", path.display(), i + 1))?;
        values.push(v);
    }
    Ok(SampleSet::new(values)?)
}

fn parse_ratio(s: &str, samples: &SampleSet) -> anyhow::Result<BoundaryRatio> {
    if s == "est" {
        return Ok(match estimate_r(samples) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("warning: {e}; using r = 1");
                BoundaryRatio::PERIODIC
            }
        });
    }
    let v: f64 = s
        .parse()
        .map_err(|_| anyhow!("--r expects a number or 'est', got '{s}'"))?;
    Ok(BoundaryRatio::new(v)?)
}

fn parse_fixed(s: &str) -> anyhow::Result<Option<DiffusionTime>> {
    match s.strip_prefix("fixed:") {
        Some(v) => {
            let t: f64 = v
                .parse()
                .map_err(|_| anyhow!("bad fixed bandwidth '{v}'"))?;
            Ok(Some(DiffusionTime::new(t)?))
        }
        None => Ok(None),
    }
}

fn select_time(s: &str, samples: &SampleSet, r: BoundaryRatio) -> anyhow::Result<DiffusionTime> {
    if let Some(t) = parse_fixed(s)? {
        return Ok(t);
    }
    Ok(match s {
        "silverman" => silverman_bandwidth(samples)?.t,
        "lscv" => lscv_bandwidth(samples, r, &log_time_grid(1e-4, 1.0, 30)?)?.t,
        _ => bail!(linked_kde::Error::InvalidParameter(format!(
            "unknown bandwidth rule '{s}', expected silverman, lscv or fixed:VALUE"
        ))),
    })
}

fn parse_choice(s: &str) -> anyhow::Result<BandwidthChoice> {
    if let Some(t) = parse_fixed(s)? {
        return Ok(BandwidthChoice::Fixed(t));
    }
    Ok(match s {
        "oracle" => BandwidthChoice::Oracle,
        "silverman" => BandwidthChoice::Silverman,
        "lscv" => BandwidthChoice::Lscv,
        _ => bail!(linked_kde::Error::InvalidParameter(format!(
            "unknown bandwidth rule '{s}', expected oracle, silverman, lscv or fixed:VALUE"
        ))),
    })
}

fn parse_target(s: &str) -> anyhow::Result<SyntheticTarget> {
    let (name, arg) = match s.split_once(':') {
        Some((name, arg)) => (name, Some(arg)),
        None => (s, None),
    };
    let param = |key: &str| -> anyhow::Result<f64> {
        let arg = arg.ok_or_else(|| anyhow!("target '{name}' needs {key}=VALUE"))?;
        let v = arg
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| anyhow!("target '{name}' needs {key}=VALUE, got '{arg}'"))?;
        v.parse().map_err(|_| anyhow!("bad value for {key}: '{v}'"))
    };
    Ok(match name {
        "beta_mixture" => SyntheticTarget::beta_mixture(param("a")?)?,
        "cosine_bump" => SyntheticTarget::cosine_bump(param("amp")?)?,
        "parabolic" if arg.is_none() => SyntheticTarget::parabolic(),
        "trimodal" if arg.is_none() => SyntheticTarget::trimodal(),
        _ => bail!(linked_kde::Error::InvalidTarget(format!(
            "unknown target '{s}'"
        ))),
    })
}

/// Piecewise-linear interpolation of the node values, ghosts included.
fn interpolate(u: &BinnedDensity, grid: &EvaluationGrid, t: DiffusionTime) -> GridDensity {
    let nodes = u.nodes();
    let last = nodes.len() - 1;
    let values = grid
        .points()
        .iter()
        .map(|&x| {
            let pos = x / u.grid.h();
            let j = (pos.floor() as usize).min(last - 1);
            let frac = pos - j as f64;
            nodes[j] * (1.0 - frac) + nodes[j + 1] * frac
        })
        .collect();
    GridDensity {
        grid: grid.clone(),
        values,
        r: Some(u.r),
        t,
    }
}

fn write_density(est: &GridDensity, w: &mut dyn Write) -> std::io::Result<()> {
    writeln!(w, "x,density")?;
    for (x, v) in est.grid.points().iter().zip(&est.values) {
        writeln!(w, "{x:.16e},{v:.16e}")?;
    }
    Ok(())
}

fn write_output(
    path: &Path,
    body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    body(&mut w).with_context(|| format!("writing {}", path.display()))?;
    w.flush()
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
