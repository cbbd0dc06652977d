use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use grp_core::io::{read_history_file, write_history_file};
use grp_core::{
    evaluate, fit_mle, generate, run_study, CeConfig, FitSpace, GenerationConfig, GrpError,
    RestorationFactors, Result, StudyConfig, WeibullParams,
};

#[derive(Parser)]
#[command(name = "grp", version, about = "Generalized renewal process simulation and fitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an event history and write it as CSV.
    Generate(GenerateArgs),
    /// Log-likelihood of a CSV history at fixed parameters.
    Loglik(LoglikArgs),
    /// Maximum-likelihood fit of a CSV history.
    Fit(FitArgs),
    /// Repeated generate-and-fit study.
    Study(StudyArgs),
}

#[derive(Args, Serialize, Clone)]
struct ParamArgs {
    /// Characteristic life, (1/a)^(1/b).
    #[arg(long, conflicts_with = "a", required_unless_present = "a")]
    theta: Option<f64>,
    /// Weibull scale a.
    #[arg(long)]
    a: Option<f64>,
    /// Weibull shape.
    #[arg(long)]
    b: f64,
    #[arg(long)]
    qpm: f64,
    #[arg(long)]
    qcm: f64,
}

impl ParamArgs {
    fn resolve(&self) -> Result<(WeibullParams, RestorationFactors)> {
        let params = match (self.theta, self.a) {
            (Some(theta), None) => WeibullParams::from_theta(theta, self.b)?,
            (None, Some(a)) => WeibullParams::new(a, self.b)?,
            _ => return Err(GrpError::InvalidInput("give exactly one of --theta or --a".into())),
        };
        Ok((params, RestorationFactors::new(self.qpm, self.qcm)?))
    }
}

#[derive(Args, Serialize, Clone)]
struct SpaceArgs {
    #[arg(long, default_value_t = 1e-8_f64.ln(), allow_hyphen_values = true)]
    ln_a_min: f64,
    #[arg(long, default_value_t = 1e3_f64.ln(), allow_hyphen_values = true)]
    ln_a_max: f64,
    #[arg(long, default_value_t = 0.1)]
    b_min: f64,
    #[arg(long, default_value_t = 10.0)]
    b_max: f64,
    /// Pin q_pm instead of fitting it.
    #[arg(long)]
    fix_qpm: Option<f64>,
    /// Pin q_cm instead of fitting it.
    #[arg(long)]
    fix_qcm: Option<f64>,
    /// Independent optimizer restarts.
    #[arg(long, default_value_t = 5)]
    starts: usize,
    #[arg(long, default_value_t = 1000)]
    population: usize,
    #[arg(long, default_value_t = 0.1)]
    elite_fraction: f64,
    #[arg(long, default_value_t = 0.7)]
    smoothing: f64,
    #[arg(long, default_value_t = 200)]
    max_iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    epsilon: f64,
}

impl SpaceArgs {
    fn space(&self) -> FitSpace {
        FitSpace {
            ln_a: (self.ln_a_min, self.ln_a_max),
            b: (self.b_min, self.b_max),
            fixed_q_pm: self.fix_qpm,
            fixed_q_cm: self.fix_qcm,
            starts: self.starts,
        }
    }

    fn ce(&self, seed: u64) -> CeConfig {
        CeConfig {
            population: self.population,
            elite_fraction: self.elite_fraction,
            smoothing: self.smoothing,
            max_iterations: self.max_iterations,
            convergence_epsilon: self.epsilon,
            seed,
            ..CeConfig::default()
        }
    }
}

#[derive(Args, Serialize)]
struct GenerateArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// PM candidate multiplier; smaller values give fewer CM events.
    #[arg(long, default_value_t = 1.0)]
    kcm: f64,
    /// Events per item.
    #[arg(long)]
    events: usize,
    #[arg(long, default_value_t = 1)]
    items: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct LoglikArgs {
    #[arg(long)]
    data: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    /// Replace the final inter-arrival time before fitting (single item only).
    #[arg(long)]
    override_last_time: Option<f64>,
    #[command(flatten)]
    space: SpaceArgs,
    /// Optimizer seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct StudyArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 1.0)]
    kcm: f64,
    #[arg(long, default_value_t = 100)]
    events: usize,
    #[arg(long, default_value_t = 1)]
    items: usize,
    #[arg(long, default_value_t = 20)]
    replications: usize,
    /// Replication r uses generation seed `seed + r`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct Output<'a, F: Serialize, R: Serialize> {
    command: &'a str,
    flags: &'a F,
    result: R,
}

fn emit<F: Serialize, R: Serialize>(command: &str, flags: &F, result: R, out: Option<&Path>) -> Result<()> {
    let doc = Output {
        command,
        flags,
        result,
    };
    let text = serde_json::to_string_pretty(&doc).expect("output is serializable");
    match out {
        Some(path) => fs::write(path, text + "\n").map_err(|source| GrpError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let (params, factors) = args.params.resolve()?;
    let config = GenerationConfig {
        params,
        factors,
        k_cm: args.kcm,
        events_per_item: args.events,
        n_items: args.items,
        seed: args.seed,
    };
    let history = generate(&config)?;
    write_history_file(&history, &args.out)?;
    let (pm, cm) = history.counts();
    println!("PM {pm} CM {cm} total {}", pm + cm);
    Ok(())
}

fn cmd_loglik(args: &LoglikArgs) -> Result<()> {
    let (params, factors) = args.params.resolve()?;
    let history = read_history_file(&args.data)?;
    let ll = evaluate(&history, &params, &factors)?;
    println!("{ll:.4}");

    #[derive(Serialize)]
    struct LoglikResult {
        params: WeibullParams,
        factors: RestorationFactors,
        items: usize,
        events: usize,
        log_likelihood: f64,
    }
    let result = LoglikResult {
        params,
        factors,
        items: history.items().len(),
        events: history.total_events(),
        log_likelihood: ll,
    };
    emit("loglik", args, result, args.out.as_deref())
}

fn cmd_fit(args: &FitArgs) -> Result<()> {
    let mut history = read_history_file(&args.data)?;
    if let Some(t) = args.override_last_time {
        history = history.with_last_time(t)?;
    }
    let fit = fit_mle(&history, &args.space.space(), &args.space.ce(args.seed))?;
    eprintln!(
        "theta {:.4} b {:.4} q_pm {:.4} q_cm {:.4} loglik {:.4}",
        fit.params.theta(),
        fit.params.b(),
        fit.factors.q_pm(),
        fit.factors.q_cm(),
        fit.log_likelihood
    );
    emit("fit", args, fit, args.out.as_deref())
}

fn cmd_study(args: &StudyArgs) -> Result<()> {
    let (params, factors) = args.params.resolve()?;
    GenerationConfig {
        params,
        factors,
        k_cm: args.kcm,
        events_per_item: args.events,
        n_items: args.items,
        seed: args.seed,
    }
    .validate()?;
    if args.replications == 0 {
        return Err(GrpError::InvalidInput("at least one replication is required".into()));
    }
    let config = StudyConfig {
        params,
        factors,
        k_cm: args.kcm,
        events_per_item: args.events,
        n_items: args.items,
        replications: args.replications,
        base_seed: args.seed,
        space: args.space.space(),
        ce: args.space.ce(0),
    };
    let report = run_study(&config);
    print!("{}", report.table());
    emit("study", args, report, args.out.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Loglik(args) => cmd_loglik(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Study(args) => cmd_study(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
