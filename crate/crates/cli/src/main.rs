use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hybrid_minnorm_cli::commands::parse_side;
use hybrid_minnorm_cli::config::parse_vector;
use hybrid_minnorm_cli::{
    cmd_check_minnorm, cmd_feasible_set, cmd_simulate, cmd_verify_clf, CheckArgs, CliError, FeasibleArgs, RunConfig,
    VerifyArgs, EXIT_CONFIG,
};

#[derive(Parser)]
#[command(name = "hybrid-minnorm", version, about = "Min-norm control synthesis for hybrid benchmark systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate the closed loop and write the trajectory as CSV.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long)]
        dt: Option<String>,
        #[arg(long = "max-t")]
        max_t: Option<String>,
        #[arg(long = "max-j")]
        max_j: Option<String>,
        #[arg(long)]
        priority: Option<String>,
    },
    /// Check the CLF inequalities on a grid.
    VerifyClf {
        #[command(flatten)]
        common: Common,
        #[arg(long = "grid-n", default_value_t = 100)]
        grid_n: usize,
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
    },
    /// Compare the synthesized laws with the oracle and the reference laws.
    CheckMinnorm {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long = "oracle-samples", default_value_t = 20_000)]
        oracle_samples: usize,
    },
    /// Print the admissible input set at a state.
    FeasibleSet {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, default_value = "flow")]
        side: String,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    system: Option<String>,
    /// Parameter override, repeatable: `--param gamma=0.2`.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(s) = &self.system {
            cfg.set("system", s)?;
        }
        for p in &self.params {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("--param expects KEY=VALUE, got '{p}'")))?;
            let k = k.trim();
            let key = if k.starts_with("system.") { k.to_string() } else { format!("system.{k}") };
            cfg.set(&key, v)?;
        }
        if let Some(m) = &self.mode {
            cfg.set("controller.mode", m)?;
        }
        if let Some(r) = &self.r {
            cfg.set("controller.r", r)?;
        }
        if let Some(s) = &self.seed {
            cfg.set("seed", s)?;
        }
        if let Some(o) = &self.out {
            cfg.out = Some(o.clone());
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Simulate {
            common,
            x0,
            dt,
            max_t,
            max_j,
            priority,
        } => {
            let mut cfg = common.load()?;
            for (key, v) in [
                ("x0", x0),
                ("solver.dt", dt),
                ("solver.max_t", max_t),
                ("solver.max_j", max_j),
                ("solver.priority", priority),
            ] {
                if let Some(v) = v {
                    cfg.set(key, &v)?;
                }
            }
            cmd_simulate(&cfg, &mut stdout)
        }
        Command::VerifyClf { common, grid_n, tol } => {
            let cfg = common.load()?;
            cmd_verify_clf(&cfg, VerifyArgs { grid_n, tol }, &mut stdout)
        }
        Command::CheckMinnorm {
            common,
            samples,
            oracle_samples,
        } => {
            let cfg = common.load()?;
            cmd_check_minnorm(&cfg, CheckArgs { samples, oracle_samples }, &mut stdout)
        }
        Command::FeasibleSet { common, x, side } => {
            let cfg = common.load()?;
            let args = FeasibleArgs {
                x: parse_vector("x", &x)?,
                side: parse_side(&side).map_err(CliError::Usage)?,
            };
            cmd_feasible_set(&cfg, &args, &mut stdout)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG as u8) } else { ExitCode::SUCCESS };
        }
    };
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(u8::try_from(code).unwrap_or(EXIT_CONFIG as u8))
}
