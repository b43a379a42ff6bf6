use asymconv_cli::args::{Cli, Command, FormatArg};
use asymconv_cli::config::{usage, ExperimentConfig, GlobalConfig, UsageError};
use asymconv_cli::record::{self, ExperimentRecord};
use asymconv_cli::commands;
use clap::Parser;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<asymconv::Error>() {
        Some(
            asymconv::Error::InvalidParameter(_)
            | asymconv::Error::Parse { .. }
            | asymconv::Error::DimensionMismatch { .. }
            | asymconv::Error::ArgumentCount { .. },
        ) => 2,
        _ => 1,
    }
}

/// Reads either a full record (`{"config": ...}`) or a bare config.
fn read_config(path: &Path) -> anyhow::Result<ExperimentConfig> {
    let bytes = std::fs::read(path).or_else(|e| usage(format!("cannot read '{}': {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_slice(&bytes).or_else(|e| usage(format!("invalid JSON in '{}': {e}", path.display())))?;
    let config = value.get("config").cloned().unwrap_or(value);
    serde_json::from_value(config).or_else(|e| usage(format!("invalid config in '{}': {e}", path.display())))
}

fn run_experiment(config: ExperimentConfig, out: &Path) -> anyhow::Result<bool> {
    let start = Instant::now();
    let outcome = commands::run(&config)?;
    let record = ExperimentRecord::new(config, outcome, start.elapsed().as_secs_f64());
    let path = record::persist(out, &record)?;
    println!("{} {} -> {}", record.config.command.name(), record.id, path.display());
    for a in &record.assertions {
        println!("  {} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    println!("{}", if record.passed { "all assertions passed" } else { "some assertions failed" });
    Ok(record.passed)
}

fn real_main(cli: Cli) -> anyhow::Result<bool> {
    let global = GlobalConfig {
        seed: cli.seed,
        samples: cli.samples,
        tolerance_profile: cli.tolerance_profile,
    };
    if global.samples == 0 {
        return usage("--samples must be positive");
    }
    if let Some(path) = &cli.replay {
        if cli.command.is_some() {
            return usage("--replay cannot be combined with a subcommand");
        }
        return run_experiment(read_config(path)?, &cli.out);
    }
    let Some(command) = &cli.command else {
        return usage("a subcommand is required (see --help)");
    };
    if let Command::Export(a) = command {
        let (rec, dir) = record::load(&cli.out, &a.record)?;
        let dest = a.dest.clone().unwrap_or_else(|| dir.join("export"));
        for p in record::export(&rec, &dest, a.format == FormatArg::Json)? {
            println!("{}", p.display());
        }
        return Ok(true);
    }
    run_experiment(ExperimentConfig::from_args(global, command)?, &cli.out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match real_main(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
