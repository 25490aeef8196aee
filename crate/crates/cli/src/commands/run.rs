use crate::commands::out_path;
use crate::config::ConfigFile;
use crate::manifest::ManifestBuilder;
use crate::{GlobalArgs, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::dsmc;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Simulation config file (TOML).
    #[arg(long, short)]
    pub config: PathBuf,
}

pub fn execute(global: &GlobalArgs, args: &RunArgs) -> u8 {
    let file = match ConfigFile::load(&args.config) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let config = match file.to_simulation(global.seed) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    let stem = args
        .config
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "run".to_string());
    let csv_path = match out_path(global, &format!("{stem}.csv")) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let manifest_path = match out_path(global, &format!("{stem}.manifest.toml")) {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    let mut manifest = ManifestBuilder::new(&config);
    let result = match dsmc::run(&config) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };

    // Flush whatever was recorded, aborted or not.
    if let Err(e) = std::fs::write(&csv_path, result.series.to_csv()) {
        eprintln!("error: cannot write {}: {e}", csv_path.display());
        return EXIT_NUMERIC;
    }
    manifest.add_output(&csv_path);
    if let Err(e) = std::fs::write(&manifest_path, manifest.render()) {
        eprintln!("error: cannot write {}: {e}", manifest_path.display());
        return EXIT_NUMERIC;
    }

    match result.aborted {
        Some(err) => {
            eprintln!("run aborted: {err}; partial series flushed to {}", csv_path.display());
            EXIT_NUMERIC
        }
        None => {
            let last = result.series.rows.last();
            println!(
                "run complete: {} rows, {} collisions, E(t_end) = {:.6e} -> {}",
                result.series.rows.len(),
                last.map(|r| r.collisions).unwrap_or(0),
                last.map(|r| r.energy).unwrap_or(f64::NAN),
                csv_path.display()
            );
            EXIT_OK
        }
    }
}
