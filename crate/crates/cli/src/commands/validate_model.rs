use crate::config::ConfigFile;
use crate::table::Table;
use crate::{GlobalArgs, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::dissipation;
use granular_core::restitution::LogGrid;
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Config file whose `[restitution]` section is validated.
    #[arg(long, short)]
    pub config: PathBuf,
    /// Grid points for the checks.
    #[arg(long, default_value_t = 512)]
    pub grid_points: usize,
}

pub fn execute(global: &GlobalArgs, args: &ValidateArgs) -> u8 {
    let file = match ConfigFile::load(&args.config) {
        Ok(f) => f,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let model = match file.restitution.to_model() {
        Ok(m) => m,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };
    let grid = LogGrid { points: args.grid_points.max(64), ..LogGrid::default() };
    let report = match model.check_assumptions(&grid) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_NUMERIC;
        }
    };
    let shape = match dissipation::verify_psi_shape(&model, &grid) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_NUMERIC;
        }
    };

    let names = [
        "e maps into (0, 1]",
        "theta strictly increasing",
        "limsup e < 1 at large r",
        "Psi increasing and convex",
    ];
    let mut table = Table::new(&["check", "verdict", "worst r", "margin"]);
    for (item, name) in report.hyp1.iter().zip(names) {
        table.row(vec![
            name.into(),
            if item.pass { "pass".into() } else { "FAIL".into() },
            format!("{:.3e}", item.witness_r),
            format!("{:.3e}", item.margin),
        ]);
    }
    table.row(vec![
        "Psi monotone".into(),
        if shape.monotone { "pass".into() } else { "FAIL".into() },
        format!("{:.3e}", shape.worst_pair.0),
        format!("{:.3e}", shape.monotonicity_margin),
    ]);
    table.row(vec![
        "Psi convex".into(),
        if shape.convex { "pass".into() } else { "FAIL".into() },
        format!("{:.3e}", shape.worst_triple.0),
        format!("{:.3e}", shape.convexity_margin),
    ]);
    print!("{}", table.render(&global.format));
    println!(
        "detected: gamma = {:.4}, m = {:.4}, C = {:.4e}, ell_gamma = {:.6e}",
        report.gamma_detected, report.m_detected, report.c_large, report.ell_gamma
    );

    let all_pass = report.hyp1_pass() && shape.monotone && shape.convex;
    if !all_pass && global.strict {
        return EXIT_NUMERIC;
    }
    EXIT_OK
}
