use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use rough_hilbert::cli_reports::{run, Command, ErrorRecord, ExperimentConfig};
use rough_hilbert::kernel_factory::Variant;
use rough_hilbert::{LabError, Result};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Sub {
    BuildKernel,
    Autocorrelate,
    VerifyRegularity,
    Count,
    ExpSums,
    AlgebraAudit,
    Resolvent,
    Counterexample,
    FullReport,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    MOverS,
    MalphaOverS,
}

/// Truncated rough Hilbert transform laboratory. Flags override the
/// values of `--config`, which override the built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "rough-hilbert", version)]
struct Cli {
    #[arg(value_enum)]
    command: Sub,
    /// JSON configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    budget_mb: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    delta_l: Option<f64>,
    #[arg(long)]
    delta0: Option<f64>,
    #[arg(long = "M", visible_alias = "m")]
    m: Option<u64>,
    /// Comma-separated list of scales.
    #[arg(long = "M-grid", visible_alias = "m-grid", value_delimiter = ',')]
    m_grid: Option<Vec<u64>>,
    #[arg(long, value_delimiter = ',')]
    s_grid: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    variant: Option<VariantArg>,
    /// Inclusive census range `lo:hi`; `lo > hi` gives an empty census.
    #[arg(long)]
    x_range: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    lambda_re: Option<f64>,
    #[arg(long)]
    lambda_im: Option<f64>,
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    window: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    c_kappa: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    counterexample_m: Option<Vec<u64>>,
    #[arg(long)]
    precision_max_bits: Option<u32>,
    #[arg(long)]
    write_kernels: bool,
}

fn parse_range(s: &str) -> Result<(u64, u64)> {
    let (a, b) = s.split_once(':').ok_or_else(|| LabError::Config(format!("x-range {s:?} is not lo:hi")))?;
    let p = |t: &str| t.trim().parse::<u64>().map_err(|e| LabError::Config(format!("x-range: {e}")));
    Ok((p(a)?, p(b)?))
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut c = match &cli.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = cli.$f.clone() { c.$f = v; } )* };
    }
    set!(out, seed, threads, budget_mb, alpha, theta, delta, delta_l, delta0, m, m_grid, s_grid, samples, terms);
    set!(tolerance, c_kappa, counterexample_m, precision_max_bits);
    if cli.lambda_re.is_some() {
        c.lambda_re = cli.lambda_re;
    }
    if cli.lambda_im.is_some() {
        c.lambda_im = cli.lambda_im;
    }
    if cli.window.is_some() {
        c.window = cli.window;
    }
    if let Some(v) = cli.variant {
        c.variant = match v {
            VariantArg::MOverS => Variant::PhiOfMOverS,
            VariantArg::MalphaOverS => Variant::PhiOfMalphaOverS,
        };
    }
    if let Some(r) = &cli.x_range {
        c.x_range = Some(parse_range(r)?);
    }
    c.write_kernels |= cli.write_kernels;
    c.validate()?;
    Ok(c)
}

fn command(s: Sub) -> Command {
    match s {
        Sub::BuildKernel => Command::BuildKernel,
        Sub::Autocorrelate => Command::Autocorrelate,
        Sub::VerifyRegularity => Command::VerifyRegularity,
        Sub::Count => Command::Count,
        Sub::ExpSums => Command::ExpSums,
        Sub::AlgebraAudit => Command::AlgebraAudit,
        Sub::Resolvent => Command::Resolvent,
        Sub::Counterexample => Command::Counterexample,
        Sub::FullReport => Command::FullReport,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = build_config(&cli);
    let out_dir = match &cfg {
        Ok(c) => c.out.clone(),
        Err(_) => cli.out.clone().unwrap_or_else(|| ExperimentConfig::default().out),
    };
    match cfg.and_then(|cfg| run(command(cli.command), &cfg)) {
        Ok(m) => {
            println!("{}: {} outputs in {}", m.subcommand, m.outputs.len(), out_dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let rec = ErrorRecord::from(&e);
            let json = serde_json::to_string_pretty(&rec).unwrap_or_else(|_| e.to_string());
            eprintln!("{json}");
            if std::fs::create_dir_all(&out_dir).is_ok() {
                let _ = std::fs::write(out_dir.join("error.json"), json + "\n");
            }
            ExitCode::from(rec.exit_code as u8)
        }
    }
}
