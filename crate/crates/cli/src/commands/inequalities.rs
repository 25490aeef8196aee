use crate::table::Table;
use crate::{GlobalArgs, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::entropy;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Args)]
pub struct InequalityArgs {
    /// Number of random Gaussian mixtures in the sweep.
    #[arg(long, default_value_t = 100)]
    pub mixtures: usize,
    /// Number of uniform balls (radii log-spaced over [1e-3, 1e3]).
    #[arg(long, default_value_t = 20)]
    pub balls: usize,
}

pub fn execute(global: &GlobalArgs, args: &InequalityArgs) -> u8 {
    let mut rng = ChaCha12Rng::seed_from_u64(global.seed.unwrap_or(0));
    let family = entropy::random_family(args.mixtures, args.balls, &mut rng);
    let report = match entropy::check_inequalities(&family) {
        Ok(r) => r,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };

    let mut table = Table::new(&["quantity", "value"]);
    table.row(vec!["distributions checked".into(), report.checked.to_string()]);
    table.row(vec!["violations".into(), report.violations.to_string()]);
    table.row(vec![
        "worst h_abs bound slack".into(),
        format!("{:.6e}", report.worst_hbar_slack),
    ]);
    table.row(vec![
        "worst M_2 bound slack".into(),
        format!("{:.6e}", report.worst_moment_slack),
    ]);
    print!("{}", table.render(&global.format));

    if report.violations > 0 && global.strict {
        return EXIT_NUMERIC;
    }
    EXIT_OK
}
