use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sailcover::{actual_speed, Flow};
use sailcover_harness::{
    emit_plot_data, parse_seeds, run_batch, run_experiment, HarnessError, LoadedConfig, Method,
};

#[derive(Parser)]
#[command(name = "sailcover", version, about = "Sailboat coverage planning experiments")]
struct Cli {
    /// TOML experiment config; built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one mission.
    Run {
        #[arg(long)]
        method: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_plots: bool,
    },
    /// Run every method on every seed and summarize.
    Batch {
        /// Comma separated, e.g. `base,mcts_k0,mcts_k1`.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
        /// `40..47` or `40,41,42`.
        #[arg(long)]
        seeds: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long)]
        emit_plots: bool,
    },
    /// Dump the true wind and current fields as CSV.
    Fields {
        #[arg(long)]
        seed: u64,
        /// Number of stages to dump.
        #[arg(long, default_value_t = 1)]
        stages: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print boat speed over true wind angle for one wind speed.
    PolarCheck {
        #[arg(long, default_value_t = 4.0)]
        tws: f64,
        #[arg(long, default_value_t = 10.0)]
        step: f64,
    },
    /// Parse the config and print its digest.
    ValidateConfig,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn load(path: Option<&Path>) -> Result<LoadedConfig, HarnessError> {
    match path {
        Some(p) => LoadedConfig::load(p),
        None => Ok(LoadedConfig::defaults()),
    }
}

fn run(cli: Cli) -> Result<(), HarnessError> {
    let config = load(cli.config.as_deref())?;
    let default_out = config.config.run.out_dir.clone();
    match cli.command {
        Command::Run { method, seed, out, emit_plots } => {
            let method: Method = method.parse()?;
            let out = out.unwrap_or(default_out);
            sailcover_harness::run::prepare_output(&out, &config)?;
            let rec = run_experiment(&config, method, seed, &out)?;
            println!(
                "{} seed {}: coverage {:.2}% finish {:.1} s (await {:.1} s) redundancy {:.2}% distance {:.1} m",
                rec.method, rec.seed, rec.coverage_pct, rec.finish_time_s, rec.await_time_s, rec.redundancy_pct, rec.distance_m
            );
            println!("{}", sailcover_harness::run_dir(&out, &config, method, seed).display());
            if emit_plots {
                println!("{}", emit_plot_data(&config, std::slice::from_ref(&rec), &out)?.display());
            }
            if !rec.completed() {
                return Err(HarnessError::Aborted(1));
            }
        }
        Command::Batch { methods, seeds, out, jobs, emit_plots } => {
            let methods: Vec<Method> = match methods {
                Some(m) => m.iter().map(|s| s.parse()).collect::<Result<_, _>>()?,
                None => config.config.methods()?,
            };
            let seeds = match seeds {
                Some(s) => parse_seeds(&s)?,
                None => config.config.run.seeds.clone(),
            };
            let out = out.unwrap_or(default_out);
            let batch = run_batch(&config, &methods, &seeds, &out, jobs)?;
            print!("{}", batch.summary.to_table(&batch.records));
            println!("{}", batch.dir.display());
            if emit_plots {
                println!("{}", emit_plot_data(&config, &batch.records, &out)?.display());
            }
            let failed = batch.records.iter().filter(|r| !r.completed()).count();
            if failed > 0 {
                return Err(HarnessError::Aborted(failed));
            }
        }
        Command::Fields { seed, stages, out } => {
            let last = stages.max(1) - 1;
            match out {
                Some(p) => sailcover_harness::run::write_fields(&p, &config, seed, last)?,
                None => {
                    let stdout = std::io::stdout();
                    let mut lock = stdout.lock();
                    sailcover_harness::run::write_fields_to(&mut lock, &config, seed, last)?;
                    lock.flush().map_err(HarnessError::io("<stdout>"))?;
                }
            }
        }
        Command::PolarCheck { tws, step } => {
            if !(step > 0.0) {
                return Err(HarnessError::Config("--step must be positive".into()));
            }
            println!("twa_deg,boat_speed_mps");
            let mut twa = 0.0;
            while twa <= 180.0 + 1e-9 {
                // Wind from north, track bearing `twa`.
                let v = actual_speed(Flow::new(tws, 0.0), twa, &config.polar);
                println!("{twa},{v:.4}");
                twa += step;
            }
        }
        Command::ValidateConfig => println!("ok {}", config.digest),
    }
    Ok(())
}
