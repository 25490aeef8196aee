use crate::commands::out_path;
use crate::config::ConfigFile;
use crate::table::Table;
use crate::{GlobalArgs, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::haff;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Base config file; its restitution section is ignored and the
    /// standard model sweep is run instead.
    #[arg(long, short)]
    pub config: PathBuf,
}

pub fn execute(global: &GlobalArgs, args: &ReportArgs) -> u8 {
    let file = match ConfigFile::load(&args.config) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let base = match file.to_simulation(global.seed) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    let entries = haff::default_matrix(&base);
    let runs = haff::experiment_matrix(&entries);

    let mut summaries = Vec::new();
    let mut failures = 0;
    for run in &runs {
        match &run.result {
            Ok(success) => {
                for (suffix, series) in
                    [("dsmc", &success.dsmc), ("meanfield", &success.meanfield)]
                {
                    let path = match out_path(global, &format!("{}_{suffix}.csv", run.run_id)) {
                        Ok(p) => p,
                        Err(msg) => {
                            eprintln!("error: {msg}");
                            return EXIT_USAGE;
                        }
                    };
                    if let Err(e) = std::fs::write(&path, series.to_csv()) {
                        eprintln!("error: cannot write {}: {e}", path.display());
                        return EXIT_NUMERIC;
                    }
                }
                summaries.push(success.summary.clone());
            }
            Err(err) => {
                eprintln!("run {} failed: {err}", run.run_id);
                failures += 1;
            }
        }
    }

    let summary_path = match out_path(global, "summary.csv") {
        Ok(p) => p,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = std::fs::write(&summary_path, haff::summary_csv(&summaries)) {
        eprintln!("error: cannot write {}: {e}", summary_path.display());
        return EXIT_NUMERIC;
    }

    let mut table = Table::new(&["run", "gamma", "theory", "fitted", "c", "C", "threshold"]);
    for s in &summaries {
        table.row(vec![
            s.run_id.clone(),
            format!("{:.2}", s.gamma),
            format!("{:.4}", s.theory_exp),
            format!("{:.4}", s.fitted_exp),
            format!("{:.3e}", s.c_hat),
            format!("{:.3e}", s.big_c_hat),
            s.threshold_verdict.clone(),
        ]);
    }
    print!("{}", table.render(&global.format));
    println!("summary written to {}", summary_path.display());

    if failures > 0 && global.strict {
        return EXIT_NUMERIC;
    }
    EXIT_OK
}
