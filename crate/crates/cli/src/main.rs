//! `tailbench` command line: estimates on data files, rate tables, and
//! seeded reproduction of the Monte-Carlo tables.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use tailbench::asymptotics::{mef_rate_exponents, tail_rate_exponents, RateExponent, TailClass};
use tailbench::config::{parse_config, parse_number};
use tailbench::estimators::{estimate_mef, estimate_tail, EstimateRecord, Estimator};
use tailbench::report::{
    format_mc_value, rate_table1_markdown, rate_table2_markdown, rate_table5_markdown, rates_dat,
    table_csv, table_markdown,
};
use tailbench::{
    default_r, hill_fit, run_cell, run_table, Error, HallParams, SortedSample, TableId,
    WeibullTailParams,
};

/// Minimum number of observations accepted from a data file.
const MIN_OBSERVATIONS: usize = 10;

#[derive(Parser)]
#[command(
    name = "tailbench",
    version,
    about = "Tail probability and mean excess estimation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a tail probability or mean excess from a data file.
    Estimate(EstimateArgs),
    /// Print convergence-rate exponents.
    Rates(RatesArgs),
    /// Re-run one of the Monte-Carlo tables.
    Reproduce(ReproduceArgs),
    /// Run a single Monte-Carlo cell described by a config file.
    Simulate(SimulateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Pi,
    Pt,
    Al,
    Pb,
    PiMef,
    Pe,
    AlMef,
    PbMef,
}

impl Method {
    fn split(self) -> (Estimator, bool) {
        match self {
            Method::Pi => (Estimator::Pi, false),
            Method::Pt => (Estimator::Pt, false),
            Method::Al => (Estimator::Al, false),
            Method::Pb => (Estimator::Pb, false),
            Method::PiMef => (Estimator::Pi, true),
            Method::Pe => (Estimator::Pt, true),
            Method::AlMef => (Estimator::Al, true),
            Method::PbMef => (Estimator::Pb, true),
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long, value_enum)]
    method: Method,
    /// Evaluation point of a tail estimate.
    #[arg(long)]
    x: Option<f64>,
    /// Threshold (PT tail, all mean-excess methods).
    #[arg(long)]
    u: Option<f64>,
    /// Number of upper order statistics for the tail index (default n^{2/3}).
    #[arg(long)]
    r: Option<usize>,
    /// Data file: one number per line, `#` comments allowed.
    file: PathBuf,
}

#[derive(Args)]
struct RatesArgs {
    /// Burr law `c,ell`.
    #[arg(long, conflicts_with_all = ["weibull", "table"])]
    burr: Option<String>,
    /// Weibull law `kappa,C`.
    #[arg(long, conflicts_with = "table")]
    weibull: Option<String>,
    /// Constant of the Weibull evaluation point `x = C2 (ln n)^{1/kappa}`.
    #[arg(long)]
    c2: Option<String>,
    /// Mean-excess rates (Burr only) at threshold `u = n^p`.
    #[arg(long)]
    mef: bool,
    #[arg(long)]
    p: Option<String>,
    /// Print a whole rate table (1, 2 or 5).
    #[arg(long)]
    table: Option<u32>,
    /// Also write gnuplot-ready rate data to this path.
    #[arg(long)]
    dat: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// t3, t4, t6 or t7.
    table: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Replications per cell; fewer than the table default is a quick run.
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Directory for the JSON result and manifest; stdout only if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Written next to every reproduce or simulate output.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    config_path: Option<PathBuf>,
    seed: u64,
    output_dir: PathBuf,
    version: String,
    replications: Option<usize>,
    quick_mode: bool,
    note: Option<String>,
    files: Vec<String>,
}

enum Failure {
    Input(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn input<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(Failure::Input(msg.into()))
}

fn read_data(path: &Path) -> CliResult<Vec<f64>> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let mut values = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(v),
            _ => {
                return input(format!(
                    "{}: line {} is not a finite number: {line:?}",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    if values.len() < MIN_OBSERVATIONS {
        return input(format!(
            "{}: {} observations, at least {MIN_OBSERVATIONS} needed",
            path.display(),
            values.len()
        ));
    }
    Ok(values)
}

fn print_record(rec: &EstimateRecord, at: &str) -> CliResult<()> {
    let what = match rec.quantity {
        tailbench::estimators::Quantity::Tail => "tail probability",
        tailbench::estimators::Quantity::Mef => "mean excess",
    };
    println!("{} {what} at {at}: {}", rec.estimator, rec.value);
    let json = serde_json::to_string(rec).map_err(|e| Failure::Numerical(e.to_string()))?;
    println!("{json}");
    if rec.is_flagged() {
        eprintln!("warning: estimate flagged {:?}", rec.diagnostics.flags);
    }
    Ok(())
}

fn cmd_estimate(a: EstimateArgs) -> CliResult<()> {
    let sample = SortedSample::new(read_data(&a.file)?)?;
    let (estimator, mef) = a.method.split();
    let tail_est = if estimator.needs_tail_index() {
        Some(hill_fit(
            &sample,
            a.r.unwrap_or_else(|| default_r(sample.len())),
        )?)
    } else {
        None
    };
    let need = |v: Option<f64>, name: &str| match v {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => input(format!("--{name} must be finite, got {v}")),
        None => input(format!("--{name} is required for this method")),
    };
    if mef {
        let u = need(a.u, "u")?;
        let rec = estimate_mef(estimator, &sample, u, tail_est.as_ref())?;
        print_record(&rec, &format!("u={u}"))
    } else {
        let x = need(a.x, "x")?;
        let (u, at) = if estimator == Estimator::Pt {
            let u = need(a.u, "u")?;
            (u, format!("x={x} (u={u})"))
        } else {
            (f64::NAN, format!("x={x}"))
        };
        let rec = estimate_tail(estimator, &sample, x, u, tail_est.as_ref())?;
        print_record(&rec, &at)
    }
}

fn pair(s: &str, what: &str) -> CliResult<(f64, f64)> {
    let Some((a, b)) = s.split_once(',') else {
        return input(format!(
            "{what} expects two comma-separated numbers, got {s:?}"
        ));
    };
    Ok((parse_number(a)?, parse_number(b)?))
}

fn rate_text(r: &RateExponent) -> String {
    if r.is_applicable() {
        r.cell()
    } else {
        "n/a".into()
    }
}

fn cmd_rates(a: RatesArgs) -> CliResult<()> {
    if let Some(path) = &a.dat {
        fs::write(path, rates_dat())
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    if let Some(t) = a.table {
        let text = match t {
            1 => rate_table1_markdown(),
            2 => rate_table2_markdown(),
            5 => rate_table5_markdown(),
            other => return input(format!("rate tables are 1, 2 and 5, not {other}")),
        };
        print!("{text}");
        return Ok(());
    }
    if a.mef {
        let Some(burr) = &a.burr else {
            return input("--mef needs --burr c,ell");
        };
        let Some(p) = &a.p else {
            return input("--mef needs --p (threshold u = n^p)");
        };
        let (c, ell) = pair(burr, "--burr")?;
        let params = burr_params(c, ell)?;
        let m = mef_rate_exponents(&params, parse_number(p)?)?;
        println!(
            "NE: {}  PT: {}  PI: {}",
            rate_text(&m.ne),
            rate_text(&m.pt),
            rate_text(&m.pi)
        );
        return Ok(());
    }
    let rates = if let Some(burr) = &a.burr {
        let (c, ell) = pair(burr, "--burr")?;
        tail_rate_exponents(&TailClass::Hall(burr_params(c, ell)?), None)?
    } else if let Some(w) = &a.weibull {
        let (kappa, scale_c) = pair(w, "--weibull")?;
        let Some(c2) = &a.c2 else {
            return input("--weibull needs --c2");
        };
        let class = TailClass::Weibull(WeibullTailParams::new(scale_c, kappa)?);
        tail_rate_exponents(&class, Some(parse_number(c2)?))?
    } else if a.dat.is_some() {
        return Ok(());
    } else {
        return input("give --burr, --weibull or --table");
    };
    println!(
        "NE: {}  PT: {}  PI: {}",
        rate_text(&rates.ne),
        rate_text(&rates.pt),
        rate_text(&rates.pi)
    );
    Ok(())
}

fn burr_params(c: f64, ell: f64) -> CliResult<HallParams> {
    let d = tailbench::BurrDist::new(c, ell)?;
    Ok(tailbench::distributions::hall_params_of_burr(&d)?)
}

fn write_file(dir: &Path, name: &str, body: &str) -> CliResult<()> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_manifest(dir: &Path, name: &str, m: &RunManifest) -> CliResult<()> {
    let body = serde_json::to_string_pretty(m).map_err(|e| Failure::Numerical(e.to_string()))?;
    write_file(dir, name, &(body + "\n"))
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| Failure::Input(format!("{}: {e}", dir.display())))
}

fn cmd_reproduce(a: ReproduceArgs) -> CliResult<()> {
    let id: TableId = a.table.parse()?;
    if a.reps == Some(0) {
        return input("--reps must be at least 1");
    }
    ensure_dir(&a.out)?;
    let run = run_table(id, a.seed, a.reps)?;
    let stem = format!("table{}_seed{}", id.number(), a.seed);
    write_file(&a.out, &format!("{stem}.csv"), &table_csv(&run)?)?;
    write_file(&a.out, &format!("{stem}.md"), &table_markdown(&run))?;
    let quick = run.replications < id.default_replications();
    let note = quick.then(|| {
        format!(
            "quick mode: {} replications per cell instead of {}; Monte-Carlo error is about {:.1}x the full run, widen comparison tolerances accordingly",
            run.replications,
            id.default_replications(),
            (id.default_replications() as f64 / run.replications as f64).sqrt()
        )
    });
    write_manifest(
        &a.out,
        &format!("{stem}.manifest.json"),
        &RunManifest {
            command: format!("reproduce {}", a.table),
            config_path: None,
            seed: a.seed,
            output_dir: a.out.clone(),
            version: env!("CARGO_PKG_VERSION").into(),
            replications: Some(run.replications),
            quick_mode: quick,
            note,
            files: vec![format!("{stem}.csv"), format!("{stem}.md")],
        },
    )?;
    println!(
        "table {}: {} cells, {} replications each -> {}",
        id.number(),
        run.cells.len(),
        run.replications,
        a.out.join(format!("{stem}.{{csv,md}}")).display()
    );
    Ok(())
}

fn cmd_simulate(a: SimulateArgs) -> CliResult<()> {
    let text = fs::read_to_string(&a.config)
        .map_err(|e| Failure::Input(format!("{}: {e}", a.config.display())))?;
    let cfg =
        parse_config(&text).map_err(|e| Failure::Input(format!("{}: {e}", a.config.display())))?;
    let result = run_cell(&cfg)?;
    println!(
        "{} n={} x={} u={} truth={:e} ({} replications, seed {})",
        result.label,
        result.n,
        result.resolved.x,
        result.resolved.u,
        result.resolved.truth,
        result.replications,
        result.base_seed
    );
    for s in &result.estimators {
        let mean = if s.show_infinite {
            "∞".to_string()
        } else {
            format_mc_value(s.rel_mse_x100)
        };
        println!(
            "  {}: relative MSE x100 {mean}  sd {}  nonfinite {}  flagged {}{}",
            s.estimator,
            format_mc_value(s.sd_x100),
            s.n_nonfinite,
            s.n_flagged,
            if s.unstable { "  [unstable]" } else { "" }
        );
    }
    let json = serde_json::to_string(&result).map_err(|e| Failure::Numerical(e.to_string()))?;
    if let Some(dir) = &a.out {
        ensure_dir(dir)?;
        let stem = format!("cell_seed{}", result.base_seed);
        write_file(dir, &format!("{stem}.json"), &(json + "\n"))?;
        write_manifest(
            dir,
            &format!("{stem}.manifest.json"),
            &RunManifest {
                command: "simulate".into(),
                config_path: Some(a.config.clone()),
                seed: result.base_seed,
                output_dir: dir.clone(),
                version: env!("CARGO_PKG_VERSION").into(),
                replications: Some(result.replications),
                quick_mode: false,
                note: None,
                files: vec![format!("{stem}.json")],
            },
        )?;
    } else {
        println!("{json}");
    }
    Ok(())
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("TAILBENCH_THREADS") else {
        return Ok(());
    };
    let n: usize = match v.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return input(format!(
                "TAILBENCH_THREADS must be a positive integer, got {v:?}"
            ))
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numerical(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = init_threads().and_then(|_| match cli.command {
        Command::Estimate(a) => cmd_estimate(a),
        Command::Rates(a) => cmd_rates(a),
        Command::Reproduce(a) => cmd_reproduce(a),
        Command::Simulate(a) => cmd_simulate(a),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(3)
        }
    }
}
