use crate::table::Table;
use crate::{GlobalArgs, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::moments;

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// Small-impact exponent of the restitution model (> 0); omit for the
    /// constant-restitution table.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Uniform bound on m_(2 gamma)^(1/3) past the transient.
    #[arg(long, requires = "gamma")]
    pub a_bound: Option<f64>,
    /// Scaled cubic moment m_(3/2)(t0) / E(t0)^(3/2).
    #[arg(long, requires = "gamma")]
    pub rho_t0: Option<f64>,
}

pub fn execute(global: &GlobalArgs, args: &ThresholdArgs) -> u8 {
    let report = match args.gamma {
        None => moments::constant_threshold(),
        Some(gamma) => {
            let a_bound = args.a_bound.unwrap_or(1.0);
            let rho_t0 = args.rho_t0.unwrap_or(1.0);
            match moments::ell0_threshold(gamma, a_bound, rho_t0) {
                Ok(r) => r,
                Err(err) => {
                    eprintln!("error: {err}");
                    return EXIT_USAGE;
                }
            }
        }
    };

    let mut table = Table::new(&["quantity", "value"]);
    table.row(vec!["kappa_3/2".into(), format!("{:.12}", report.kappa_32)]);
    table.row(vec!["critical_e".into(), format!("{:.12}", report.critical_e)]);
    if let (Some(c), Some(k0), Some(ell0)) = (report.c_gamma, report.k0, report.ell0) {
        table.row(vec!["c_gamma".into(), format!("{c:.12}")]);
        table.row(vec!["K0".into(), format!("{k0:.12}")]);
        table.row(vec!["ell0".into(), format!("{ell0:.6e}")]);
    }
    print!("{}", table.render(&global.format));
    EXIT_OK
}
