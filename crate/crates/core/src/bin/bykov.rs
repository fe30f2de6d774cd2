use bykov_core::commands::{execute, write_outputs, Command};
use bykov_core::io::RunConfig;
use bykov_core::Error;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

/// Environment variable that overrides the output directory of the config.
const OUT_DIR_ENV: &str = "BYKOV_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "bykov", version, about = "Return maps and rank-one diagnostics for unfolded Bykov attractors")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides BYKOV_OUT_DIR and the config).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for all randomness (overrides the config).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Iterate the return map and write the orbit.
    Iterate,
    /// Lyapunov exponents, Birkhoff average and autocorrelation.
    Lyapunov,
    /// Regime classification over a (lambda, K_omega) grid.
    Scan,
    /// Numerical audit of hypotheses H1-H7.
    Audit,
    /// Misiurewicz certificates with Collet-Eckmann follow-up.
    Misiurewicz,
    /// Superstable parameters of the singular-limit family.
    Superstable {
        #[arg(long)]
        period: Option<usize>,
    },
    /// Rotation interval of the circle map and rotation set of the return map.
    Rotation,
    /// Convergence table of the rescaled map to its singular limit.
    SingularLimit,
    /// Circle-map graphs for several twisting numbers.
    PlotCircle,
}

impl From<&Cmd> for Command {
    fn from(c: &Cmd) -> Self {
        match c {
            Cmd::Iterate => Command::Iterate,
            Cmd::Lyapunov => Command::Lyapunov,
            Cmd::Scan => Command::Scan,
            Cmd::Audit => Command::Audit,
            Cmd::Misiurewicz => Command::Misiurewicz,
            Cmd::Superstable { period } => Command::Superstable(*period),
            Cmd::Rotation => Command::Rotation,
            Cmd::SingularLimit => Command::SingularLimit,
            Cmd::PlotCircle => Command::PlotCircle,
        }
    }
}

fn exit_code(e: &Error) -> ExitCode {
    if e.is_validation() {
        ExitCode::from(1)
    } else {
        ExitCode::from(2)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let level = if cli.verbose { log::LevelFilter::Info } else { log::LevelFilter::Warn };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();

    let Some(config_path) = cli.config.as_ref() else {
        log::error!("--config is required");
        return ExitCode::from(1);
    };
    let mut config = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => {
            log::error!("{e}");
            return ExitCode::from(1);
        }
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    let out_dir = cli
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .or_else(|| config.out.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    let threads = cli.threads.or(config.threads).unwrap_or(0);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            log::error!("cannot start worker threads: {e}");
            return ExitCode::from(2);
        }
    };

    let command = Command::from(&cli.command);
    log::info!("running {command:?} with {} threads", pool.current_num_threads());
    let result = match pool.install(|| execute(command, &config)) {
        Ok(r) => r,
        Err(e) => {
            log::error!("{e}");
            return exit_code(&e);
        }
    };
    for w in &result.warnings {
        log::warn!("{w}");
    }
    match write_outputs(&out_dir, &result.outputs) {
        Ok(paths) => {
            for p in paths {
                log::info!("wrote {}", p.display());
            }
            log::info!("{}", result.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(2)
        }
    }
}
