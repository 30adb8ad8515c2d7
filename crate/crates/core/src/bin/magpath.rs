use clap::Parser;
use magpath::experiment::{exit_code, run_and_write, ExperimentConfig, EXPERIMENTS};
use magpath::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Runs one configured path-integral experiment and writes its tables.
#[derive(Parser, Debug)]
#[command(name = "magpath", version)]
struct Cli {
    /// TOML experiment config.
    #[arg(long, required_unless_present = "template")]
    config: Option<PathBuf>,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the number of Monte Carlo samples.
    #[arg(long)]
    samples: Option<u64>,
    /// Overrides the number of time steps per path.
    #[arg(long)]
    steps: Option<usize>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    threads: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print a starting config for the named experiment and exit.
    #[arg(long, value_name = "EXPERIMENT")]
    template: Option<String>,
}

fn load(cli: &Cli) -> Result<ExperimentConfig, Error> {
    if let Some(name) = &cli.template {
        return ExperimentConfig::template(name);
    }
    let path = cli.config.as_ref().expect("clap enforces --config");
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(n) = cli.samples {
        cfg.budget.n_samples = n;
    }
    if let Some(n) = cli.steps {
        cfg.budget.n_steps = n;
    }
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        cfg.budget.threads = Some(n);
    }
    if let Some(o) = &cli.out {
        cfg.out = o.to_string_lossy().into_owned();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("magpath: {e}");
            if cli.template.is_some() {
                eprintln!("experiments: {}", EXPERIMENTS.join(", "));
            }
            return ExitCode::from(2);
        }
    };
    if cli.template.is_some() {
        print!("{}", cfg.to_text());
        return ExitCode::SUCCESS;
    }
    match run_and_write(&cfg) {
        Ok(dir) => {
            println!("{} [{}] -> {}", cfg.experiment, cfg.hash(), dir.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("magpath: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
