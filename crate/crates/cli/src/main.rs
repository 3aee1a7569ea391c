//! Command-line front end: tabulates the extremal laws, the finite-n and
//! limiting free order statistics, and runs the random-matrix verification
//! experiments.

mod config;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use fevt::extremes::{finite_free_order_cdf, free_max_cdf, norming_constants};
use fevt::matrixlab::{
    hermitian_spectrum, sample_free_family, verify_levy_norm, verify_weyl, DecomposedFamily,
    EnsembleConfig, SpectrumReport,
};
use fevt::measures::poisson::free_poisson;
use fevt::measures::Cdf;
use fevt::{free_poisson_cdf, limit_free_order_cdf};

use config::{Format, RunConfig};
use output::{Table, TableJson};

#[derive(Parser)]
#[command(name = "fevt", version, about = "Free extreme value computations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// TOML config file; command-line flags override file values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when omitted)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for stochastic commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Law family (gumbel, frechet, weibull)
    #[arg(long)]
    law: Option<String>,
    /// Shape parameter for frechet/weibull laws and the Pareto base
    #[arg(long)]
    alpha: Option<f64>,
    /// Base distribution (pareto, exponential, uniform)
    #[arg(long)]
    base: Option<String>,
    /// Explicit evaluation points, comma separated
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t: Option<Vec<f64>>,
    /// Evaluation grid lo:hi:count
    #[arg(long, allow_hyphen_values = true)]
    t_grid: Option<String>,
    /// Order indices k, comma separated
    #[arg(long, value_delimiter = ',')]
    k: Option<Vec<f64>>,
    /// Sample sizes n, comma separated
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<u64>>,
    /// Matrix dimensions d, comma separated
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<u64>>,
    /// Number of randomized trials
    #[arg(long)]
    trials: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the classical and free extremal laws and the tail intensity
    Laws(CommonArgs),
    /// Limit law of the k-th free order statistic with its oracle identity
    #[command(name = "limit-k")]
    LimitK(CommonArgs),
    /// Finite-n free order statistics against the limit law
    #[command(name = "finite-n")]
    FiniteN(CommonArgs),
    /// Random-matrix verification of point-process spectra
    #[command(name = "matrix-verify")]
    MatrixVerify(CommonArgs),
    /// Randomized Weyl and Levy-norm operator inequality trials
    #[command(name = "inequality-suite")]
    InequalitySuite(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args): (&'static str, &CommonArgs) = match &cli.command {
        Command::Laws(a) => ("laws", a),
        Command::LimitK(a) => ("limit-k", a),
        Command::FiniteN(a) => ("finite-n", a),
        Command::MatrixVerify(a) => ("matrix-verify", a),
        Command::InequalitySuite(a) => ("inequality-suite", a),
    };
    match run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            // numerical failures exit 3, validation problems exit 2
            let numerical = err
                .chain()
                .any(|c| matches!(c.downcast_ref::<fevt::Error>(), Some(fevt::Error::Numerical { .. })));
            if numerical {
                ExitCode::from(3)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn gather(args: &CommonArgs) -> Result<RunConfig> {
    let flags = RunConfig {
        law: args.law.clone(),
        alpha: args.alpha,
        base: args.base.clone(),
        t: args.t.clone(),
        t_grid: args.t_grid.clone(),
        k: args.k.clone(),
        n: args.n.clone(),
        d: args.d.clone(),
        trials: args.trials,
        seed: args.seed,
        output: args.output.clone(),
        format: args.format,
    };
    Ok(match &args.config {
        Some(path) => flags.merged_over(RunConfig::from_file(path)?),
        None => flags,
    })
}

fn run(name: &'static str, args: &CommonArgs) -> Result<()> {
    let cfg = gather(args)?;
    let (table, spectra) = match name {
        "laws" => (cmd_laws(&cfg)?, None),
        "limit-k" => (cmd_limit_k(&cfg)?, None),
        "finite-n" => (cmd_finite_n(&cfg)?, None),
        "matrix-verify" => {
            let (t, s) = cmd_matrix_verify(&cfg)?;
            (t, Some(s))
        }
        "inequality-suite" => (cmd_inequality_suite(&cfg)?, None),
        _ => unreachable!(),
    };
    emit(name, &cfg, table, spectra)
}

fn emit(
    name: &'static str,
    cfg: &RunConfig,
    table: Table,
    spectra: Option<Vec<SpectrumReport>>,
) -> Result<()> {
    let format = cfg.format.unwrap_or(Format::Csv);
    let mut buf: Vec<u8> = Vec::new();
    match format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            let doc = TableJson {
                command: name,
                config: cfg.clone(),
                columns: table.columns.clone(),
                rows: table.rounded_rows(),
                spectra,
            };
            serde_json::to_writer_pretty(&mut buf, &doc)?;
            buf.push(b'\n');
        }
    }
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, &buf).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn cmd_laws(cfg: &RunConfig) -> Result<Table> {
    let law = cfg.law()?;
    let free = law.free();
    let ts = cfg.t_values()?;
    let mut table = Table::new(vec!["t", "classical_cdf", "free_cdf", "tail_intensity"]);
    for &t in &ts {
        table.push(vec![t, law.cdf(t), free.cdf(t), law.tail_intensity(t)]);
    }
    Ok(table)
}

fn cmd_limit_k(cfg: &RunConfig) -> Result<Table> {
    let law = cfg.law()?;
    let ts = cfg.t_values()?;
    let ks = cfg.k_values()?;
    let mut table = Table::new(vec!["t", "k", "limit_cdf", "oracle_cdf", "abs_diff"]);
    for &k in &ks {
        for &t in &ts {
            let limit = limit_free_order_cdf(&law, k, t)?;
            let lambda = law.tail_intensity(t);
            let oracle = if lambda.is_infinite() {
                0.0
            } else {
                free_poisson_cdf(lambda, k)?
            };
            table.push(vec![t, k, limit, oracle, (limit - oracle).abs()]);
        }
    }
    Ok(table)
}

fn cmd_finite_n(cfg: &RunConfig) -> Result<Table> {
    let base = cfg.base()?;
    let law = cfg.law()?;
    let sched = norming_constants(&base, &law)?;
    let ts = cfg.t_values()?;
    let ks = cfg.k_values()?;
    let ns = cfg.n_values()?;
    let mut table = Table::new(vec!["n", "k", "t", "finite_cdf", "limit_cdf", "sup_gap"]);
    for &n in &ns {
        for &k in &ks {
            let mut rows = Vec::with_capacity(ts.len());
            let mut sup: f64 = 0.0;
            for &t in &ts {
                let fin = finite_free_order_cdf(&base, &sched, n, k, t)?;
                let lim = limit_free_order_cdf(&law, k, t)?;
                sup = sup.max((fin - lim).abs());
                rows.push((t, fin, lim));
            }
            for (t, fin, lim) in rows {
                table.push(vec![n as f64, k, t, fin, lim, sup]);
            }
        }
    }
    Ok(table)
}

fn cmd_matrix_verify(cfg: &RunConfig) -> Result<(Table, Vec<SpectrumReport>)> {
    let base = cfg.base()?;
    let law = cfg.law()?;
    let sched = norming_constants(&base, &law)?;
    let seed = cfg.seed_required()?;
    let ts = cfg.t_values()?;
    let ds = cfg.d_values()?;
    let count = *cfg.n_values()?.first().unwrap();
    let mut table = Table::new(vec![
        "d",
        "n",
        "t",
        "levy_free_poisson",
        "kernel_fraction",
        "free_max_cdf",
        "violations",
    ]);
    let mut reports = Vec::new();
    for &d in &ds {
        let ens = EnsembleConfig::new(d as usize, count as usize, base.clone(), seed)?;
        let family = sample_free_family(&ens)?;
        let dec = DecomposedFamily::new(&family)?;
        let a_n = sched.a(count)?;
        let b_n = sched.b(count);
        for &t in &ts {
            let thr = a_n * t + b_n;
            let y = dec.apply(|x| if x > thr { 1.0 } else { 0.0 });
            let spec = hermitian_spectrum(&y)?;
            let lambda = law.tail_intensity(t);
            let target = Cdf::from_measure(free_poisson(lambda)?);
            let report = SpectrumReport::against(ens.descriptor(), &spec, &target, 0.1);
            // kernel of the projection sum = intersection of the kernels
            let top = spec.eigenvalues[0].max(0.0);
            let tol = 1e-8 * top.max(1.0);
            let kernel = spec.eigenvalues.iter().filter(|&&v| v.abs() <= tol).count() as f64
                / d as f64;
            let fm = free_max_cdf(&base, &sched, count, t)?;
            table.push(vec![
                d as f64,
                count as f64,
                t,
                report.metrics.levy,
                kernel,
                fm,
                report.metrics.violations as f64,
            ]);
            reports.push(report);
        }
    }
    Ok((table, reports))
}

fn cmd_inequality_suite(cfg: &RunConfig) -> Result<Table> {
    use nalgebra::{Complex, DMatrix};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    let seed = cfg.seed_required()?;
    let trials = cfg.trials.unwrap_or(100);
    let d = *cfg.d_values()?.first().unwrap() as usize;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let ginibre = |rng: &mut ChaCha12Rng| {
        DMatrix::from_fn(d, d, |_, _| {
            Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    };
    let mut table = Table::new(vec![
        "trial",
        "weyl_violations",
        "weyl_lower_margin",
        "weyl_upper_margin",
        "levy",
        "norm_diff",
        "levy_norm_holds",
    ]);
    for trial in 0..trials {
        let g = ginibre(&mut rng);
        let a = (&g + g.adjoint()).scale(0.5);
        let c = ginibre(&mut rng);
        let b = (&c * c.adjoint()).scale(1.0 / d as f64);
        let weyl = verify_weyl(&a, &b)?;
        let sum = &a + &b;
        let levy = verify_levy_norm(&a, &sum)?;
        table.push(vec![
            trial as f64,
            weyl.violations as f64,
            weyl.min_lower_margin,
            weyl.min_upper_margin,
            levy.levy,
            levy.norm_diff,
            if levy.holds { 1.0 } else { 0.0 },
        ]);
    }
    Ok(table)
}
