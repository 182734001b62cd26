use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qaud::{ExecMode, PilotScheme};
use qaud_experiments::config::parse_snr;
use qaud_experiments::{run, ExpError, ExpResult, Experiment, ExperimentConfig, KChoice};

#[derive(Parser)]
#[command(name = "qaud", version, about = "Quantum-annealing activity detection experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// NNLS error rate against antenna count at infinite SNR.
    AerVsK(Opts),
    /// Smallest antenna count meeting the target error rate.
    CalibrateK(Opts),
    /// Mean squared spectral gap per pilot scheme.
    MeanGap(Opts),
    /// Success probability along single annealing runs.
    AnnealDemo(Opts),
    /// Quantum and classical error rates against SNR.
    QaerVsSnr(Opts),
    /// Quantum error rate against annealing time.
    QaerVsTime(Opts),
}

#[derive(Args, Debug)]
struct Opts {
    /// TOML file whose keys are the config field names.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reduced trial count for quick runs (1000 trials).
    #[arg(long)]
    smoke: bool,
    /// Publication run; requires an explicit seed.
    #[arg(long, requires = "seed")]
    publication: bool,
    /// Run trials on one thread.
    #[arg(long)]
    sequential: bool,
    #[arg(long, value_delimiter = ',')]
    scheme: Option<Vec<PilotScheme>>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Antenna count or `calibrate`.
    #[arg(long)]
    k: Option<KChoice>,
    #[arg(long, value_delimiter = ',', value_parser = parse_snr, allow_negative_numbers = true)]
    snr_db: Option<Vec<f64>>,
    #[arg(long)]
    p_active: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    epsilon: Option<Vec<f64>>,
    #[arg(long)]
    n_trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    k_sweep: Option<Vec<usize>>,
    #[arg(long)]
    target_aer: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    #[arg(long)]
    calibration_trials: Option<usize>,
    #[arg(long)]
    gap_samples: Option<usize>,
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long, value_parser = parse_snr, allow_negative_numbers = true)]
    time_snr_db: Option<f64>,
    #[arg(long)]
    demo_points: Option<usize>,
    #[arg(long)]
    demo_instance: Option<usize>,
}

macro_rules! overlay {
    ($cfg:ident, $opts:ident, $($field:ident => $target:ident),* $(,)?) => {
        $(if let Some(v) = $opts.$field.clone() { $cfg.$target = v; })*
    };
}

impl Opts {
    /// Defaults, then the smoke preset, then the config file, then flags.
    fn resolve(&self) -> ExpResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None if self.smoke => ExperimentConfig::smoke(),
            None => ExperimentConfig::default(),
        };
        if self.smoke && self.config.is_some() && self.n_trials.is_none() {
            cfg.n_trials = ExperimentConfig::smoke().n_trials;
        }
        overlay!(cfg, self,
            scheme => scheme, m => m, n => n, k => k, snr_db => snr_db, p_active => p_active,
            n_trials => n_trials, seed => master_seed, k_sweep => k_sweep, target_aer => target_aer,
            k_max => k_max, calibration_trials => calibration_trials, gap_samples => gap_samples,
            grid_points => grid_points, max_step => max_step, time_snr_db => time_snr_db,
            demo_points => demo_points, demo_instance => demo_instance,
        );
        if let Some(e) = &self.epsilon {
            cfg.epsilon = Some(e.clone());
        }
        if let Some(o) = &self.output {
            cfg.output_path = Some(o.clone());
        }
        if let Some(c) = &self.cache_dir {
            cfg.cache_dir = Some(c.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> ExpResult<()> {
    let (exp, opts) = match cli.command {
        Command::AerVsK(o) => (Experiment::AerVsK, o),
        Command::CalibrateK(o) => (Experiment::CalibrateK, o),
        Command::MeanGap(o) => (Experiment::MeanGap, o),
        Command::AnnealDemo(o) => (Experiment::AnnealDemo, o),
        Command::QaerVsSnr(o) => (Experiment::QaerVsSnr, o),
        Command::QaerVsTime(o) => (Experiment::QaerVsTime, o),
    };
    let cfg = opts.resolve()?;
    let mode = if opts.sequential {
        ExecMode::Sequential
    } else {
        ExecMode::Parallel
    };
    let text = run(exp, &cfg, mode)?.render(&cfg);
    match &cfg.output_path {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|source| ExpError::Io {
                    path: dir.display().to_string(),
                    source,
                })?;
            }
            std::fs::write(path, text).map_err(|source| ExpError::Io {
                path: path.display().to_string(),
                source,
            })
        }
        None => std::io::stdout().write_all(text.as_bytes()).map_err(|source| ExpError::Io {
            path: "<stdout>".into(),
            source,
        }),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
