use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opdyn_cli::commands::{parse_values, run_preset, run_to_file, validate_report, Overrides};
use opdyn_cli::CommandKind;

#[derive(Parser)]
#[command(name = "opdyn", version, about = "Operator dynamics of fake and good news on agent networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Override the output horizon
    #[arg(long)]
    t_max: Option<f64>,
    /// Override the output spacing
    #[arg(long)]
    dt_out: Option<f64>,
}

impl Common {
    fn overrides(&self) -> Overrides {
        Overrides {
            t_max: self.t_max,
            dt_out: self.dt_out,
            ..Overrides::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form mean values without rules
    Heisenberg(Common),
    /// Piecewise dynamics with rule-driven inertia updates
    Hrho(Common),
    /// Open-system dynamics of the density operator
    Gksl {
        #[command(flatten)]
        common: Common,
        /// Integrator step
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Asymptotic value of an observable across parameter values
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dt: Option<f64>,
        /// e.g. gksl.channels.17.strength
        #[arg(long)]
        param: Option<String>,
        /// START:STOP:STEP
        #[arg(long)]
        values: Option<String>,
        /// e.g. G_6
        #[arg(long)]
        observable: Option<String>,
        /// Worker threads (defaults to all cores)
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Write a named configuration and run it
    Preset {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        t_max: Option<f64>,
        #[arg(long)]
        dt_out: Option<f64>,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Check the anticommutation relations and optionally a configuration
    Validate {
        #[arg(long, default_value_t = 4)]
        modes: usize,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn install_pool(jobs: Option<usize>) -> anyhow::Result<()> {
    if let Some(n) = jobs {
        if n == 0 {
            anyhow::bail!("--jobs must be at least 1");
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Heisenberg(c) => run_to_file(CommandKind::Heisenberg, &c.config, &c.out, &c.overrides()),
        Command::Hrho(c) => run_to_file(CommandKind::Hrho, &c.config, &c.out, &c.overrides()),
        Command::Gksl { common, dt } => {
            let ov = Overrides { dt, ..common.overrides() };
            run_to_file(CommandKind::Gksl, &common.config, &common.out, &ov)
        }
        Command::Sweep {
            common,
            dt,
            param,
            values,
            observable,
            jobs,
        } => {
            install_pool(jobs)?;
            let ov = Overrides {
                dt,
                param,
                values: values.as_deref().map(parse_values).transpose()?,
                observable,
                ..common.overrides()
            };
            run_to_file(CommandKind::Sweep, &common.config, &common.out, &ov)
        }
        Command::Preset {
            name,
            out_dir,
            t_max,
            dt_out,
            jobs,
        } => {
            install_pool(jobs)?;
            let ov = Overrides {
                t_max,
                dt_out,
                ..Overrides::default()
            };
            let (toml, csv) = run_preset(&name, &out_dir, &ov)?;
            println!("{}\n{}", toml.display(), csv.display());
            Ok(())
        }
        Command::Validate { modes, config } => {
            print!("{}", validate_report(modes, config.as_deref())?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
