use crate::table::Table;
use crate::{GlobalArgs, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE};
use clap::Args;
use granular_core::haff;
use granular_core::timeseries::{Column, TimeSeries};
use std::path::PathBuf;

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Time-series CSV produced by `run` (or hand-built in the same scheme).
    pub csv: PathBuf,
    /// Small-impact exponent used for the sandwich compensation.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Column to fit: E, entropy or a moment name like m_1.5.
    #[arg(long, default_value = "E")]
    pub column: String,
}

fn parse_column(name: &str) -> Result<Column, String> {
    match name {
        "E" => Ok(Column::Energy),
        "entropy" => Ok(Column::Entropy),
        other => other
            .strip_prefix("m_")
            .and_then(|s| s.parse::<f64>().ok())
            .map(Column::Moment)
            .ok_or_else(|| format!("unknown column {other:?} (expected E, entropy or m_<p>)")),
    }
}

pub fn execute(global: &GlobalArgs, args: &FitArgs) -> u8 {
    let text = match std::fs::read_to_string(&args.csv) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", args.csv.display());
            return EXIT_USAGE;
        }
    };
    let series = match TimeSeries::from_csv(&text) {
        Ok(s) => s,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_USAGE;
        }
    };
    let column = match parse_column(&args.column) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_USAGE;
        }
    };

    let window = haff::default_window(&series);
    let fit = match haff::fit_decay(&series, column, window) {
        Ok(f) => f,
        Err(err) => {
            eprintln!("error: {err}");
            return EXIT_NUMERIC;
        }
    };

    let mut table = Table::new(&["quantity", "value"]);
    table.row(vec!["column".into(), args.column.clone()]);
    table.row(vec!["window".into(), format!("[{:.6e}, {:.6e}]", window.0, window.1)]);
    table.row(vec!["points".into(), fit.n_points.to_string()]);
    table.row(vec!["exponent".into(), format!("{:.6}", fit.exponent)]);
    table.row(vec!["prefactor".into(), format!("{:.6e}", fit.prefactor)]);
    table.row(vec!["log-residual rms".into(), format!("{:.3e}", fit.residual)]);
    let mut failed = false;
    if matches!(column, Column::Energy) {
        match haff::check_sandwich(&series, args.gamma, 10.0) {
            Ok(s) => {
                table.row(vec!["sandwich c".into(), format!("{:.6e}", s.c_hat)]);
                table.row(vec!["sandwich C".into(), format!("{:.6e}", s.big_c_hat)]);
                table.row(vec![
                    "sandwich verdict".into(),
                    if s.pass { "pass".into() } else { "fail".into() },
                ]);
                failed = !s.pass;
            }
            Err(err) => {
                table.row(vec!["sandwich verdict".into(), format!("skipped ({err})")]);
            }
        }
    }
    print!("{}", table.render(&global.format));
    if failed && global.strict {
        return EXIT_NUMERIC;
    }
    EXIT_OK
}
