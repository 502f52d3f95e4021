use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use efpp_core::estimators::{
    box_pair_sup_probe, concentration_tail, curve_from_records, estimate_mu_both, MeasureSpec,
};
use efpp_core::geodesic::GeodesicSolver;
use efpp_core::geometry::{iterated_log, Point};
use efpp_core::harness::{
    load_records_checked, render_report, run_experiment, summary_from_records, verify,
    write_summary, ExperimentConfig, HarnessError,
};
use efpp_core::poisson::{sample_poisson, SeedPolicy};

/// Euclidean first-passage percolation: exact geodesics on Poisson point
/// clouds and the Monte Carlo estimator suite around them.
#[derive(Parser)]
#[command(name = "efpp", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// JSON configuration file; flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Scale grid, comma separated (e.g. 16,32,64).
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Replicates per scale.
    #[arg(long)]
    replicates: Option<u64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Edge-cost exponent alpha (> 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Ambient dimension (>= 2).
    #[arg(long)]
    d: Option<usize>,
    /// Output directory (fallback: config, then $EFPP_OUT, then ./efpp-out).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one Poisson sample (the box an experiment at --n would use) and dump its points.
    Gen {
        #[command(flatten)]
        common: CommonOpts,
        /// Replicate index to reproduce.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
    /// Compute one geodesic between two endpoints and dump its path.
    Geodesic {
        #[command(flatten)]
        common: CommonOpts,
        /// Start point, comma separated coordinates (default: origin).
        #[arg(long)]
        from: Option<String>,
        /// End point, comma separated coordinates (default: n e1).
        #[arg(long)]
        to: Option<String>,
        /// Replicate index selecting the sample.
        #[arg(long, default_value_t = 0)]
        replicate: u64,
    },
    /// Run the mean-curve experiment and estimate the time constant.
    Mu {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Concentration tail of T_n about its mean at the largest configured n.
    Concentration {
        #[command(flatten)]
        common: CommonOpts,
        /// Largest lambda in the tail grid.
        #[arg(long, default_value_t = 4.0)]
        lambda_max: f64,
        /// Number of lambda grid points.
        #[arg(long, default_value_t = 17)]
        lambda_steps: usize,
    },
    /// Geodesic wandering statistics across the scale grid.
    Wander {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Nonrandom-gap envelope report (mean - mu n against iterated-log envelopes).
    Gap {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Passage-time spread over a cylinder pair (finite-grid sup probe).
    Probe {
        #[command(flatten)]
        common: CommonOpts,
        /// Iterate level of the cylinder transverse scale.
        #[arg(long, default_value_t = 2)]
        k: u32,
    },
    /// Run the oracle and property verification battery.
    Verify {
        /// Smaller trial counts, a few seconds total.
        #[arg(long)]
        quick: bool,
    },
    /// Summarize stored records (refuses mixed config hashes).
    Report {
        /// records.jsonl files to merge.
        #[arg(long, value_delimiter = ',', required = true)]
        records: Vec<PathBuf>,
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage problems exit 1 (clap's default would be 2).
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    match cli.command {
        Command::Gen { common, replicate } => gen(common, replicate),
        Command::Geodesic {
            common,
            from,
            to,
            replicate,
        } => one_geodesic(common, from, to, replicate),
        Command::Mu { common } => mu(common),
        Command::Concentration {
            common,
            lambda_max,
            lambda_steps,
        } => concentration(common, lambda_max, lambda_steps),
        Command::Wander { common } => wander(common),
        Command::Gap { common } => gap(common),
        Command::Probe { common, k } => probe(common, k),
        Command::Verify { quick } => Ok(run_verify(quick)),
        Command::Report { records, common } => report(records, common),
    }
}

fn resolve_config(common: &CommonOpts) -> Result<ExperimentConfig, HarnessError> {
    let mut config = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(n) = &common.n {
        config.n_grid = n.clone();
    }
    if let Some(r) = common.replicates {
        config.replicates = r;
    }
    if let Some(s) = common.seed {
        config.master_seed = s;
    }
    if let Some(a) = common.alpha {
        config.alpha = a;
    }
    if let Some(d) = common.d {
        config.d = d;
    }
    config.params()?;
    Ok(config)
}

fn resolve_out(common: &CommonOpts, config: &ExperimentConfig) -> PathBuf {
    common
        .out
        .clone()
        .or_else(|| config.output_dir.as_ref().map(PathBuf::from))
        .or_else(|| std::env::var_os("EFPP_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("efpp-out"))
}

fn ensure_dir(dir: &PathBuf) -> Result<(), HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))
}

/// The sample an experiment replicate would draw for scale n.
fn replicate_sample(
    config: &ExperimentConfig,
    n: u64,
    replicate: u64,
) -> Result<(efpp_core::poisson::PoissonSample, MeasureSpec), HarnessError> {
    let spec = config.measure_spec()?;
    let nf = n as f64;
    let psi_n = spec.psi.eval(nf);
    let a = Point::origin(spec.params.d);
    let b = Point::unit(spec.params.d, 0).scale(nf);
    let bounds = spec
        .padding
        .sample_box(&a, &b, psi_n, spec.params.alpha)
        .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
    let seed_policy = SeedPolicy::new(config.master_seed, replicate);
    let dir_label = {
        let u = Point::unit(spec.params.d, 0);
        u.coords().iter().fold(0u64, |acc, c| {
            efpp_core::poisson::splitmix64(acc ^ c.to_bits())
        })
    };
    let seed = seed_policy.derive(&[n, dir_label]);
    let sample = sample_poisson(&bounds, spec.intensity, SeedPolicy::new(seed, 0))
        .map_err(|e| HarnessError::Estimator(e.into()))?;
    Ok((sample, spec))
}

fn gen(common: CommonOpts, replicate: u64) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    ensure_dir(&out)?;
    let n = *config.n_grid.first().expect("validated non-empty grid");
    let (sample, _) = replicate_sample(&config, n, replicate)?;
    let path = out.join(format!("points_n{n}_r{replicate}.txt"));
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    sample
        .dump_points(std::io::BufWriter::new(file))
        .map_err(|e| HarnessError::io(&path, e))?;
    println!(
        "wrote {} points (seed {}) to {}",
        sample.len(),
        sample.seed(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn parse_point(text: &str, dim: usize) -> Result<Point, HarnessError> {
    let coords: Result<Vec<f64>, _> = text.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| HarnessError::InvalidConfig(format!("bad point: {e}")))?;
    if coords.len() != dim {
        return Err(HarnessError::InvalidConfig(format!(
            "point has {} coordinates, expected {dim}",
            coords.len()
        )));
    }
    Point::new(coords).map_err(|e| HarnessError::InvalidConfig(e.to_string()))
}

fn one_geodesic(
    common: CommonOpts,
    from: Option<String>,
    to: Option<String>,
    replicate: u64,
) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    ensure_dir(&out)?;
    let n = *config.n_grid.first().expect("validated non-empty grid");
    let dim = config.d;
    let x = match &from {
        Some(t) => parse_point(t, dim)?,
        None => Point::origin(dim),
    };
    let y = match &to {
        Some(t) => parse_point(t, dim)?,
        None => Point::unit(dim, 0).scale(n as f64),
    };
    let (sample, spec) = replicate_sample(&config, n, replicate)?;
    let mut solver = GeodesicSolver::new(&sample, spec.params.alpha)
        .map_err(|e| HarnessError::Estimator(e.into()))?;
    let geo = solver
        .solve(&x, &y)
        .map_err(|e| HarnessError::Estimator(e.into()))?;
    let path = out.join(format!("geodesic_n{n}_r{replicate}.txt"));
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(
            w,
            "# efpp-geodesic total={} alpha={}",
            geo.total, spec.params.alpha
        )?;
        for p in &geo.path {
            let line: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
        w.flush()
    })()
    .map_err(|e| HarnessError::io(&path, e))?;
    println!(
        "T = {:.6} over {} hops (max edge {:.4}, boundary: {}) -> {}",
        geo.total,
        geo.path.len(),
        geo.max_edge,
        geo.touched_boundary,
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn mu(common: CommonOpts) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    let outcome = run_experiment(&config, &out, common.workers)?;
    let params = config.params()?;
    println!(
        "{} records ({} computed, {} resumed) -> {}",
        outcome.records.len(),
        outcome.computed,
        outcome.resumed,
        outcome.records_path.display()
    );
    let report = render_report(
        &outcome.records,
        &config.psi_kind,
        &params,
        &outcome.config_hash,
    )?;
    print!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn concentration(
    common: CommonOpts,
    lambda_max: f64,
    lambda_steps: usize,
) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    let outcome = run_experiment(&config, &out, common.workers)?;
    let n = *config.n_grid.last().expect("validated non-empty grid");
    let values: Vec<f64> = outcome
        .records
        .iter()
        .filter(|r| r.n == n && r.unbiased())
        .map(|r| r.t_n.expect("unbiased record"))
        .collect();
    let psi_n = config.psi_kind.eval(n as f64);
    let grid: Vec<f64> = (0..lambda_steps.max(2))
        .map(|i| lambda_max * i as f64 / (lambda_steps.max(2) - 1) as f64)
        .collect();
    let tail = concentration_tail(&values, psi_n, &grid)?;
    let path = out.join("tail.csv");
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "# config={}", outcome.config_hash)?;
        writeln!(w, "lambda,exceed,total,prob,wilson_lo,wilson_hi")?;
        for p in &tail.points {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                p.lambda, p.exceed, p.total, p.prob, p.wilson_lo, p.wilson_hi
            )?;
        }
        w.flush()
    })()
    .map_err(|e| HarnessError::io(&path, e))?;
    println!(
        "n = {n}: mean {:.4}, var {:.4}, {} replicates -> {}",
        tail.mean,
        tail.var,
        values.len(),
        path.display()
    );
    for p in &tail.points {
        println!(
            "  lambda {:>7.3}: P = {:.4} [{:.4}, {:.4}] ({}/{})",
            p.lambda, p.prob, p.wilson_lo, p.wilson_hi, p.exceed, p.total
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn wander(common: CommonOpts) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    let outcome = run_experiment(&config, &out, common.workers)?;
    let params = config.params()?;
    let report = render_report(
        &outcome.records,
        &config.psi_kind,
        &params,
        &outcome.config_hash,
    )?;
    print!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn gap(common: CommonOpts) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    let outcome = run_experiment(&config, &out, common.workers)?;
    let params = config.params()?;
    let curve = curve_from_records(&outcome.records)?;
    let pair = estimate_mu_both(&curve, &config.psi_kind, &params)?;
    let path = out.join("gap.csv");
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    (|| -> std::io::Result<()> {
        writeln!(w, "# config={}", outcome.config_hash)?;
        writeln!(w, "n,mean_t,gap,envelope_k1,envelope_k2")?;
        for p in &curve.points {
            let nf = p.n as f64;
            let gap = p.mean - pair.envelope.mu_hat * nf;
            let env = |k: u32| -> f64 {
                match iterated_log(k, nf) {
                    Ok(v) if v > 0.0 => config.psi_kind.eval(nf) * v.powf(1.0 / params.kappa1),
                    _ => f64::NAN,
                }
            };
            writeln!(w, "{},{},{},{},{}", p.n, p.mean, gap, env(1), env(2))?;
        }
        w.flush()
    })()
    .map_err(|e| HarnessError::io(&path, e))?;
    println!(
        "mu (envelope fit) = {:.6} +- {:.6}; mu (doubling) = {:.6} +- {:.6}{}",
        pair.envelope.mu_hat,
        pair.envelope.mu_se,
        pair.doubling.mu_hat,
        pair.doubling.mu_se,
        if pair.disagree_beyond_2se {
            "  [warning: disagree beyond 2 SE]"
        } else {
            ""
        }
    );
    println!("gap table -> {}", path.display());
    Ok(ExitCode::SUCCESS)
}

fn probe(common: CommonOpts, k: u32) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let out = resolve_out(&common, &config);
    ensure_dir(&out)?;
    let params = config.params()?;
    let n = *config.n_grid.last().expect("validated non-empty grid");
    let path = out.join("probe.csv");
    let file = fs::File::create(&path).map_err(|e| HarnessError::io(&path, e))?;
    let mut w = std::io::BufWriter::new(file);
    writeln!(w, "# config={}", config.hash()).map_err(|e| HarnessError::io(&path, e))?;
    writeln!(w, "replicate,max_diff,ratio_to_psi,grid_points,pairs")
        .map_err(|e| HarnessError::io(&path, e))?;
    let mut ratios = Vec::new();
    for replicate in 0..config.replicates {
        let (sample, _) = replicate_sample(&config, n, replicate)?;
        let result = box_pair_sup_probe(
            &sample,
            n,
            k,
            &config.psi_kind,
            &params,
            config.grid_resolution,
            params.alpha,
        )?;
        writeln!(
            w,
            "{},{},{},{},{}",
            replicate,
            result.max_diff,
            result.ratio_to_psi,
            result.grid_per_cylinder,
            result.pairs_evaluated
        )
        .map_err(|e| HarnessError::io(&path, e))?;
        ratios.push(result.ratio_to_psi);
    }
    w.flush().map_err(|e| HarnessError::io(&path, e))?;
    ratios.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    let mid = ratios[ratios.len() / 2];
    println!(
        "probe at n = {n}, k = {k}: median sup/psi = {mid:.4} over {} replicates -> {}",
        ratios.len(),
        path.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn run_verify(quick: bool) -> ExitCode {
    let results = verify::run_battery(quick);
    let mut all_ok = true;
    for suite in &results {
        println!(
            "{:<24} {:>4}/{:<4} {}",
            suite.name,
            suite.passed,
            suite.total,
            if suite.ok() { "ok" } else { "FAILED" }
        );
        for failure in &suite.failures {
            println!("    {failure}");
        }
        all_ok &= suite.ok();
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    }
}

fn report(paths: Vec<PathBuf>, common: CommonOpts) -> Result<ExitCode, HarnessError> {
    let config = resolve_config(&common)?;
    let params = config.params()?;
    let (hash, records) = load_records_checked(&paths)?;
    let text = render_report(&records, &config.psi_kind, &params, &hash)?;
    print!("{text}");
    if let Some(out) = &common.out {
        ensure_dir(out)?;
        let path = out.join("summary.csv");
        write_summary(&path, &hash, &summary_from_records(&records))?;
        println!("summary -> {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}
