//! `emergence-lab`: named, seeded, config-driven experiments over the
//! dynamics library, each emitting CSVs, gnuplot-ready data files, and a
//! JSON manifest that `check` can re-verify byte for byte.

mod config;
mod experiments;
mod manifest;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::Config;
use crate::manifest::ExperimentManifest;

#[derive(Parser)]
#[command(
    name = "emergence-lab",
    version,
    about = "Reproducible experiments on the statistical complexity of dynamical systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one experiment: write its data files and manifest, report checks
    Run {
        /// Experiment name (see `list`)
        #[arg(long)]
        experiment: String,
        /// Optional key=value file overriding the experiment's defaults
        #[arg(long)]
        config: Option<PathBuf>,
        /// Seed for every random choice the experiment makes
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory, created if missing
        #[arg(long)]
        out: PathBuf,
    },
    /// List every experiment with its claim and default configuration
    List,
    /// Re-verify the manifests in an output directory (digests and checks)
    Check {
        /// Directory holding *.manifest.json and the files they list
        #[arg(long)]
        out: PathBuf,
    },
}

const EXIT_OK: i32 = 0;
const EXIT_CHECK_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;
const EXIT_IO: i32 = 3;

fn main() {
    // The thread cap must be in place before any parallel region spins up
    // the global pool, so handle it ahead of argument parsing.
    if let Ok(raw) = std::env::var("EMERGENCE_LAB_THREADS") {
        match raw.trim().parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("EMERGENCE_LAB_THREADS must be a positive integer, got {raw:?}");
                std::process::exit(EXIT_USAGE);
            }
        }
    }
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Run {
            experiment,
            config,
            seed,
            out,
        } => cmd_run(&experiment, config.as_deref(), seed, &out),
        Cmd::List => cmd_list(),
        Cmd::Check { out } => cmd_check(&out),
    };
    std::process::exit(code);
}

fn cmd_list() -> i32 {
    for info in experiments::EXPERIMENTS {
        println!("{}", info.name);
        println!("  {}", info.claim);
        let defaults: Vec<String> = info
            .defaults
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        println!("  defaults: {}", defaults.join(" "));
    }
    EXIT_OK
}

fn cmd_check(out: &Path) -> i32 {
    match manifest::verify_dir(out) {
        Ok((ok, lines)) => {
            for line in lines {
                println!("{line}");
            }
            if ok {
                println!("all manifests verified");
                EXIT_OK
            } else {
                println!("verification FAILED");
                EXIT_CHECK_FAILED
            }
        }
        Err(e) => {
            eprintln!("cannot read {}: {e}", out.display());
            EXIT_IO
        }
    }
}

fn cmd_run(name: &str, config: Option<&Path>, seed: u64, out: &Path) -> i32 {
    let Some(info) = experiments::find(name) else {
        let known: Vec<&str> = experiments::EXPERIMENTS.iter().map(|e| e.name).collect();
        eprintln!("unknown experiment {name:?}; available: {}", known.join(", "));
        return EXIT_USAGE;
    };
    let cfg = match Config::load(info.defaults, config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_USAGE;
        }
    };
    let mut outs = match manifest::Outputs::new(out) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("cannot prepare output directory {}: {e}", out.display());
            return EXIT_IO;
        }
    };
    let started = manifest::now_unix_ms();
    let checks = match (info.run)(&cfg, seed, &mut outs) {
        Ok(c) => c,
        Err(e) => {
            // bad config values surface here (types are checked on use)
            let code = if e.is::<config::ConfigError>() {
                EXIT_USAGE
            } else {
                EXIT_IO
            };
            eprintln!("experiment {name} failed: {e:#}");
            return code;
        }
    };
    let manifest = ExperimentManifest {
        experiment: info.name.to_string(),
        seed,
        config: cfg.snapshot(),
        started_unix_ms: started,
        finished_unix_ms: manifest::now_unix_ms(),
        outputs: outs.files.clone(),
        checks,
    };
    for f in &manifest.outputs {
        println!("wrote {} ({} bytes)", f.name, f.bytes);
    }
    for c in &manifest.checks {
        let verdict = if c.pass { "pass" } else { "FAIL" };
        println!("check {}: {verdict} ({})", c.name, c.detail);
    }
    match manifest.write(out) {
        Ok(path) => println!("manifest {}", path.display()),
        Err(e) => {
            eprintln!("cannot write manifest: {e}");
            return EXIT_IO;
        }
    }
    if manifest.all_pass() {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}
