//! `smeary`: Fréchet means, FSS tests, mean tests, simulations and the wind
//! pipeline from the command line.

mod io;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::Utc;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use smeary_core::distributions::DistributionSpec;
use smeary_core::fss::fss_test;
use smeary_core::inference::{self, BootstrapOptions, Method, TestOutcome};
use smeary_core::mean::{frechet_mean_torus, CircleSample, TorusSample};
use smeary_core::rng::{substream, tag, StreamRng};
use smeary_core::simlab::{self, ExperimentConfig};
use smeary_core::windpipe::{self, YearData};
use smeary_core::TorusPoint;

use io::{csv_bytes, read_angle_rows, write_atomic, RunManifest};

#[derive(Parser, Debug)]
#[command(name = "smeary", version, about = "Fréchet means, smeariness diagnostics and mean tests on circles and tori")]
struct Cli {
    /// Master seed; every stochastic step derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (output does not depend on it).
    #[arg(long, global = true, env = "SMEARY_WORKERS")]
    workers: Option<usize>,
    #[arg(long, global = true, default_value_t = 0.05)]
    alpha: f64,
    /// Bootstrap resamples B.
    #[arg(long = "bootstrap", short = 'B', global = true, default_value_t = 1000)]
    bootstrap: usize,
    /// Angles in input and output files are degrees instead of radians.
    #[arg(long, global = true)]
    degrees: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fréchet mean of a CSV of angles (one column per torus coordinate).
    Mean(InArgs),
    /// Test for the presence of finite sample smeariness.
    Fss(InArgs),
    /// One-sample test of H0: mean = mu0.
    Test1 {
        #[arg(long = "in")]
        input: PathBuf,
        /// Hypothesized mean, comma separated for tori.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        mu0: Vec<f64>,
        #[arg(long, default_value = "quantile")]
        method: Method,
    },
    /// Two-sample test of H0: equal means.
    Test2 {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
        #[arg(long, default_value = "quantile")]
        method: Method,
    },
    #[command(subcommand)]
    Simulate(Simulate),
    #[command(subcommand)]
    Wind(Wind),
}

#[derive(Args, Debug)]
struct InArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Args, Debug)]
struct SimArgs {
    /// ExperimentConfig JSON.
    #[arg(long)]
    config: PathBuf,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Simulate {
    VarianceCurve(SimArgs),
    SizePower(SimArgs),
    FssTable(SimArgs),
    LogSmeary(SimArgs),
}

#[derive(Args, Debug)]
struct WindArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Minimum records for a day to count.
    #[arg(long, default_value_t = 1)]
    min_count: usize,
    /// Restrict to these stations (repeatable); all stations by default.
    #[arg(long = "station")]
    stations: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Wind {
    /// FSS test per station and year; writes fss_table.csv.
    Fss(WindArgs),
    /// BH-corrected two-sample tests between all years; stations are
    /// paired by date into a torus sample when more than one is selected.
    Pairs {
        #[command(flatten)]
        args: WindArgs,
        #[arg(long, default_value = "bootstrap")]
        method: Method,
    },
    /// Writes the synthetic 20-year two-station fixture.
    Synth {
        #[arg(long)]
        out: PathBuf,
    },
}

/// Bad flag combinations detected after parsing.
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

struct Ctx {
    seed: u64,
    workers: Option<usize>,
    alpha: f64,
    b: usize,
    degrees: bool,
    started: chrono::DateTime<Utc>,
}

impl Ctx {
    fn rng(&self, label: &str) -> StreamRng {
        substream(self.seed, tag(label), 0)
    }

    fn angle_out(&self, rad: f64) -> f64 {
        if self.degrees {
            rad.to_degrees()
        } else {
            rad
        }
    }

    fn manifest(&self, subcommand: &str, config: serde_json::Value, outputs: Vec<PathBuf>) -> RunManifest {
        RunManifest {
            subcommand: subcommand.into(),
            config,
            seed: self.seed,
            workers: self.workers,
            started: self.started,
            finished: Utc::now(),
            outputs,
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

fn print_json<T: Serialize>(v: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(v)?;
    bytes.push(b'\n');
    print_bytes(&bytes)
}

fn print_bytes(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn read_torus(path: &Path, degrees: bool) -> Result<TorusSample> {
    let rows = read_angle_rows(path, degrees)?;
    let k = rows[0].len();
    let cols = (0..k)
        .map(|c| CircleSample::from_radians(&rows.iter().map(|r| r[c]).collect::<Vec<_>>()))
        .collect::<smeary_core::Result<Vec<_>>>()?;
    Ok(TorusSample::from_marginals(cols)?)
}

fn read_circle(path: &Path, degrees: bool) -> Result<CircleSample> {
    let s = read_torus(path, degrees)?;
    if s.dim() != 1 {
        bail!("{}: expected one column of angles, found {}", path.display(), s.dim());
    }
    Ok(s.marginals()[0].clone())
}

fn cmd_mean(ctx: &Ctx, a: &InArgs) -> Result<()> {
    let s = read_torus(&a.input, ctx.degrees)?;
    let m = frechet_mean_torus(&s, &mut ctx.rng("cli/mean"));
    let coords: Vec<f64> = m.mean.coords().iter().map(|x| ctx.angle_out(x.radians())).collect();
    let mean = if coords.len() == 1 { json!(coords[0]) } else { json!(coords) };
    let ties: Vec<serde_json::Value> = m
        .tied_minimizers()
        .iter()
        .take(1000)
        .map(|p| {
            let c: Vec<f64> = p.coords().iter().map(|x| ctx.angle_out(x.radians())).collect();
            if c.len() == 1 {
                json!(c[0])
            } else {
                json!(c)
            }
        })
        .collect();
    print_json(&json!({
        "mean": mean,
        "ties": m.tie_count(),
        "variance": m.frechet_variance,
        "fourth_moment": m.fourth_moment,
        "tied_minimizers": ties,
        "n": s.len(),
        "seed": ctx.seed,
    }))
}

fn cmd_fss(ctx: &Ctx, a: &InArgs) -> Result<()> {
    let s = read_circle(&a.input, ctx.degrees)?;
    let r = fss_test(&s, ctx.b, ctx.alpha, &mut ctx.rng("cli/fss"))?;
    print_json(&r)
}

fn test_json(ctx: &Ctx, out: &TestOutcome) -> Result<()> {
    let mut v = serde_json::to_value(out)?;
    v["seed"] = json!(ctx.seed);
    print_json(&v)
}

fn cmd_test1(ctx: &Ctx, input: &Path, mu0: &[f64], method: Method) -> Result<()> {
    let s = read_torus(input, ctx.degrees)?;
    let mu0: Vec<f64> = if ctx.degrees { mu0.iter().map(|d| d.to_radians()).collect() } else { mu0.to_vec() };
    if mu0.len() != s.dim() {
        return Err(usage(format!("--mu0 has {} coordinates but the sample has {}", mu0.len(), s.dim())));
    }
    let mu0 = TorusPoint::from_radians(&mu0)?;
    let mut rng = ctx.rng("cli/test1");
    let out = match method {
        Method::Quantile => inference::quantile_one_sample(&s, &mu0, ctx.alpha, &mut rng)?,
        Method::Bootstrap => {
            inference::bootstrap_one_sample(&s, &mu0, ctx.alpha, BootstrapOptions::new(ctx.b), &mut rng)?
        }
    };
    test_json(ctx, &out)
}

fn cmd_test2(ctx: &Ctx, x: &Path, y: &Path, method: Method) -> Result<()> {
    let (x, y) = (read_torus(x, ctx.degrees)?, read_torus(y, ctx.degrees)?);
    let mut rng = ctx.rng("cli/test2");
    let out = match method {
        Method::Quantile => inference::quantile_two_sample(&x, &y, ctx.alpha, &mut rng)?,
        Method::Bootstrap => {
            inference::bootstrap_two_sample(&x, &y, ctx.alpha, BootstrapOptions::new(ctx.b), &mut rng)?
        }
    };
    test_json(ctx, &out)
}

#[derive(Serialize)]
struct VarianceRow {
    spec: String,
    n: usize,
    scaled_var: f64,
    scaled_var_over_sigma2: f64,
    stderr: f64,
    sigma_sq: f64,
}

fn emit_table(ctx: &Ctx, name: &str, cfg: &ExperimentConfig, out: Option<&Path>, bytes: Vec<u8>) -> Result<()> {
    match out {
        Some(path) => {
            write_atomic(path, &bytes)?;
            let mut mpath = path.as_os_str().to_owned();
            mpath.push(".manifest.json");
            ctx.manifest(name, serde_json::to_value(cfg)?, vec![path.to_path_buf()]).write(Path::new(&mpath))
        }
        None => {
            print_bytes(&bytes)
        }
    }
}

fn cmd_simulate(ctx: &Ctx, which: &Simulate, cfg: ExperimentConfig) -> Result<()> {
    let (name, args) = match which {
        Simulate::VarianceCurve(a) => ("simulate variance-curve", a),
        Simulate::SizePower(a) => ("simulate size-power", a),
        Simulate::FssTable(a) => ("simulate fss-table", a),
        Simulate::LogSmeary(a) => ("simulate log-smeary", a),
    };
    cfg.validate()?;
    let master = ctx.seed;
    let bytes = match which {
        Simulate::VarianceCurve(_) => {
            let mut rows = Vec::new();
            for spec in &cfg.specs {
                let mut rng = substream(master, tag(&format!("cli/variance-curve/{}", spec.label())), 0);
                let c = simlab::variance_curve(spec, &cfg.n_grid, cfg.reps, &mut rng)?;
                rows.extend(c.points.into_iter().map(|p| VarianceRow {
                    spec: spec.label(),
                    n: p.n,
                    scaled_var: p.scaled_var,
                    scaled_var_over_sigma2: p.scaled_var_over_sigma2,
                    stderr: p.stderr,
                    sigma_sq: p.normalizer_sigma_sq,
                }));
            }
            csv_bytes(&rows)?
        }
        Simulate::SizePower(_) => csv_bytes(&simlab::size_power_curve(&cfg, master)?)?,
        Simulate::FssTable(_) => csv_bytes(&simlab::fss_scale_table(&cfg.specs, &cfg.n_grid, cfg.b, cfg.reps, master)?)?,
        Simulate::LogSmeary(_) => {
            let mut rows = Vec::new();
            for spec in &cfg.specs {
                let DistributionSpec::LogSmeary { order_r } = spec else {
                    return Err(usage(format!("log-smeary needs log_smeary specs, got {}", spec.label())));
                };
                for &n in &cfg.n_grid {
                    rows.push(simlab::log_smeary_smoke(*order_r, n, cfg.reps, master)?);
                }
            }
            csv_bytes(&rows)?
        }
    };
    emit_table(ctx, name, &cfg, args.out.as_deref(), bytes)
}

fn load_wind(ctx: &Ctx, a: &WindArgs) -> Result<(Vec<windpipe::YearlySample>, usize)> {
    let parsed = windpipe::read_wind_csv(&a.input)?;
    if parsed.skipped > 0 {
        log::warn!("{}: skipped {} invalid rows", a.input.display(), parsed.skipped);
    }
    let mut samples = windpipe::yearly_samples(&parsed.records, a.min_count, &mut ctx.rng("cli/wind/daily"));
    if !a.stations.is_empty() {
        samples.retain(|s| a.stations.contains(&s.station_id));
        if let Some(missing) = a.stations.iter().find(|st| !samples.iter().any(|s| &s.station_id == *st)) {
            bail!("station {missing} has no data");
        }
    }
    Ok((samples, parsed.skipped))
}

fn wind_config(ctx: &Ctx, a: &WindArgs, method: Option<Method>) -> serde_json::Value {
    json!({
        "input": a.input,
        "min_count": a.min_count,
        "stations": a.stations,
        "alpha": ctx.alpha,
        "B": ctx.b,
        "method": method,
    })
}

fn cmd_wind(ctx: &Ctx, w: &Wind) -> Result<()> {
    match w {
        Wind::Fss(a) => {
            let (samples, skipped) = load_wind(ctx, a)?;
            let rows = windpipe::fss_by_year(&samples, ctx.b, ctx.alpha, ctx.seed)?;
            let path = a.out_dir.join("fss_table.csv");
            let mut buf = Vec::new();
            windpipe::write_fss_table(&rows, &mut buf)?;
            write_atomic(&path, &buf)?;
            ctx.manifest("wind fss", wind_config(ctx, a, None), vec![path]).write(&a.out_dir.join("manifest.json"))?;
            print_json(&json!({ "skipped_rows": skipped, "years": rows }))
        }
        Wind::Pairs { args: a, method } => {
            let (samples, skipped) = load_wind(ctx, a)?;
            let mut stations: Vec<String> = samples.iter().map(|s| s.station_id.clone()).collect();
            stations.dedup();
            let data: Vec<YearData> = if stations.len() == 1 {
                samples.iter().map(YearData::from).collect()
            } else {
                let per: Vec<Vec<_>> = stations
                    .iter()
                    .map(|st| samples.iter().filter(|s| &s.station_id == st).cloned().collect())
                    .collect();
                windpipe::pair_stations(&per)?
            };
            let m = windpipe::yearly_pairwise_matrix(&data, *method, ctx.alpha, ctx.b, ctx.seed)?;
            let outputs = windpipe::write_pairwise(&m, &a.out_dir)?;
            ctx.manifest("wind pairs", wind_config(ctx, a, Some(*method)), outputs)
                .write(&a.out_dir.join("manifest.json"))?;
            let y = m.years.len();
            print_json(&json!({
                "skipped_rows": skipped,
                "stations": stations,
                "dimension_k": m.dimension_k,
                "years": m.years,
                "tests": y * (y - 1) / 2,
                "rejected_pairs": m.rejected_pairs(),
            }))
        }
        Wind::Synth { out } => {
            let truth = windpipe::synthetic_layout();
            let mut buf = Vec::new();
            windpipe::write_synthetic_fixture(&truth, ctx.seed, &mut buf)?;
            write_atomic(out, &buf)?;
            print_json(&truth)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    if !(cli.alpha > 0.0 && cli.alpha < 1.0) {
        return Err(usage(format!("--alpha must lie in (0, 1), got {}", cli.alpha)));
    }
    let config = match &cli.command {
        Command::Simulate(s) => {
            let p = match s {
                Simulate::VarianceCurve(a) | Simulate::SizePower(a) | Simulate::FssTable(a) | Simulate::LogSmeary(a) => {
                    &a.config
                }
            };
            let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
            Some(serde_json::from_str::<ExperimentConfig>(&text).with_context(|| format!("invalid config {}", p.display()))?)
        }
        _ => None,
    };
    let seed = cli.seed.or(config.as_ref().and_then(|c| c.seed)).unwrap_or(1);
    let workers = cli.workers.or(config.as_ref().and_then(|c| c.workers));
    if let Some(n) = workers {
        if n == 0 {
            return Err(usage("--workers must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let ctx = Ctx { seed, workers, alpha: cli.alpha, b: cli.bootstrap, degrees: cli.degrees, started: Utc::now() };
    match &cli.command {
        Command::Mean(a) => cmd_mean(&ctx, a),
        Command::Fss(a) => cmd_fss(&ctx, a),
        Command::Test1 { input, mu0, method } => cmd_test1(&ctx, input, mu0, *method),
        Command::Test2 { x, y, method } => cmd_test2(&ctx, x, y, *method),
        Command::Simulate(s) => {
            let mut cfg = config.expect("parsed above");
            cfg.seed = Some(seed);
            cmd_simulate(&ctx, s, cfg)
        }
        Command::Wind(w) => cmd_wind(&ctx, w),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
