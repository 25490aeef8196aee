//! Sampled run diagnostics and their CSV wire format.
//!
//! Every run (particle, mean-field or hierarchy) emits the same column
//! scheme: `t,E,m_<p>...,entropy,collisions`. Floats are serialized with 17
//! significant digits so a parse round-trips bit-exactly; entropy is `NaN`
//! when it was not measured.

use crate::{Error, Result};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

/// One sampled diagnostic row.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub energy: f64,
    /// Aligned with the owning series' `moment_ps`.
    pub moments: Vec<f64>,
    /// Signed entropy integral `H(f) = int f log f` (`NaN` if not measured).
    pub entropy: f64,
    pub collisions: u64,
}

/// Time-ordered diagnostics of a single run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TimeSeries {
    pub moment_ps: Vec<f64>,
    pub rows: Vec<Sample>,
}

/// Column selector for analysis operations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Column {
    Energy,
    Moment(f64),
    Entropy,
}

impl TimeSeries {
    pub fn new(moment_ps: Vec<f64>) -> TimeSeries {
        TimeSeries { moment_ps, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Sample) {
        debug_assert_eq!(row.moments.len(), self.moment_ps.len());
        self.rows.push(row);
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.rows.iter().map(|r| r.t)
    }

    /// Values of `column`, one per row (`NaN` for a missing moment index).
    pub fn column(&self, column: Column) -> Vec<f64> {
        match column {
            Column::Energy => self.rows.iter().map(|r| r.energy).collect(),
            Column::Entropy => self.rows.iter().map(|r| r.entropy).collect(),
            Column::Moment(p) => match self.moment_index(p) {
                Some(i) => self.rows.iter().map(|r| r.moments[i]).collect(),
                None => self.rows.iter().map(|_| f64::NAN).collect(),
            },
        }
    }

    pub fn moment_index(&self, p: f64) -> Option<usize> {
        self.moment_ps.iter().position(|&q| (q - p).abs() <= 1e-12)
    }

    pub fn header(&self) -> String {
        let mut h = String::from("t,E");
        for &p in &self.moment_ps {
            let _ = write!(h, ",m_{p}");
        }
        h.push_str(",entropy,collisions");
        h
    }

    /// Render the whole series in the common CSV scheme.
    pub fn to_csv(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:.16e},{:.16e}", row.t, row.energy);
            for m in &row.moments {
                let _ = write!(out, ",{m:.16e}");
            }
            let _ = writeln!(out, ",{:.16e},{}", row.entropy, row.collisions);
        }
        out
    }

    /// Parse a series previously rendered by [`TimeSeries::to_csv`].
    pub fn from_csv(text: &str) -> Result<TimeSeries> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Config("empty CSV".into()))?;
        let cols: Vec<&str> = header.split(',').collect();
        if cols.len() < 4 || cols[0] != "t" || cols[1] != "E" {
            return Err(Error::Config(format!("unexpected CSV header: {header}")));
        }
        if cols[cols.len() - 2] != "entropy" || cols[cols.len() - 1] != "collisions" {
            return Err(Error::Config(format!("unexpected CSV header: {header}")));
        }
        let mut moment_ps = Vec::new();
        for c in &cols[2..cols.len() - 2] {
            let p = c
                .strip_prefix("m_")
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| Error::Config(format!("bad moment column name: {c}")))?;
            moment_ps.push(p);
        }
        let mut series = TimeSeries::new(moment_ps);
        for (lineno, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols.len() {
                return Err(Error::Config(format!(
                    "row {} has {} fields, expected {}",
                    lineno + 2,
                    fields.len(),
                    cols.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad float {s:?} on row {}", lineno + 2)))
            };
            let t = parse(fields[0])?;
            let energy = parse(fields[1])?;
            let mut moments = Vec::with_capacity(series.moment_ps.len());
            for f in &fields[2..fields.len() - 2] {
                moments.push(parse(f)?);
            }
            let entropy = parse(fields[fields.len() - 2])?;
            let collisions = fields[fields.len() - 1].parse::<u64>().map_err(|_| {
                Error::Config(format!("bad collision count on row {}", lineno + 2))
            })?;
            series.push(Sample { t, energy, moments, entropy, collisions });
        }
        Ok(series)
    }
}

/// Log-spaced sample times: `1 + t` spans `[1, 1 + t_end]` with
/// `per_decade` points per decade, always starting at `t = 0` and ending
/// exactly at `t_end`.
pub fn log_output_times(t_end: f64, per_decade: usize) -> Vec<f64> {
    assert!(t_end > 0.0 && per_decade > 0);
    let decades = (1.0 + t_end).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    for i in 1..=n {
        let t = 10f64.powf(decades * i as f64 / n as f64) - 1.0;
        out.push(t.min(t_end));
    }
    let last = out.len() - 1;
    out[last] = t_end;
    out
}

#[allow(unused_imports)]
use crate::math::real::Real;

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn csv_round_trip_is_exact() {
        let mut s = TimeSeries::new(vec![0.5, 1.0, 1.5]);
        s.push(Sample {
            t: 0.0,
            energy: 1.0 / 3.0,
            moments: vec![0.1, 0.2, 0.30000000000000004],
            entropy: f64::NAN,
            collisions: 0,
        });
        s.push(Sample {
            t: 17.25,
            energy: 2.2250738585072014e-308,
            moments: vec![1e300, -0.0, 5.5],
            entropy: -4.256815599614018,
            collisions: 123456789,
        });
        let text = s.to_csv();
        let back = TimeSeries::from_csv(&text).unwrap();
        assert_eq!(back.moment_ps, s.moment_ps);
        for (a, b) in back.rows.iter().zip(&s.rows) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.energy.to_bits(), b.energy.to_bits());
            for (x, y) in a.moments.iter().zip(&b.moments) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
            assert_eq!(a.entropy.is_nan(), b.entropy.is_nan());
            assert_eq!(a.collisions, b.collisions);
        }
    }

    #[test]
    fn header_formats_half_integer_moments() {
        let s = TimeSeries::new(vec![0.5, 1.0, 1.5, 0.4]);
        assert_eq!(s.header(), "t,E,m_0.5,m_1,m_1.5,m_0.4,entropy,collisions");
    }

    #[test]
    fn log_times_cover_range() {
        let ts = log_output_times(999.0, 16);
        assert_eq!(ts[0], 0.0);
        assert_eq!(*ts.last().unwrap(), 999.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
        assert!(ts.len() >= 48);
    }

    #[test]
    fn bad_header_rejected() {
        assert!(TimeSeries::from_csv("a,b,c\n").is_err());
    }
}
