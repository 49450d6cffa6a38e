//! Column-oriented CSV tables of aligned signals.
//!
//! Files carry a header row; the first column is `t` in seconds and every
//! further column is one named channel. Numbers are written with nine
//! significant digits.

use std::io::{Read, Write};
use std::path::Path;

use super::series::{same_dt, TimeSeries};
use crate::error::{Error, Result};

/// Formats `x` with nine significant digits, choosing fixed or scientific
/// notation by magnitude and trimming trailing zeros.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exponent) = sci.split_once('e').expect("exponent in {:e} output");
    let exponent: i32 = exponent.parse().expect("integer exponent");
    if (-5..9).contains(&exponent) {
        let decimals = (8 - exponent).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exponent}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Aligned named channels on one uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalTable {
    dt: f64,
    len: usize,
    channels: Vec<(String, Vec<f64>)>,
}

impl SignalTable {
    pub fn new(dt: f64, len: usize) -> Self {
        Self {
            dt,
            len,
            channels: Vec::new(),
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.channels.iter().map(|(n, _)| n.as_str())
    }

    pub fn push(&mut self, name: &str, series: &TimeSeries) -> Result<()> {
        self.push_values(name, series.values().to_vec(), series.dt())
    }

    fn push_values(&mut self, name: &str, values: Vec<f64>, dt: f64) -> Result<()> {
        if name == "t" || self.channel(name).is_some() {
            return Err(Error::Data(format!("duplicate channel `{name}`")));
        }
        if !same_dt(dt, self.dt) || values.len() != self.len {
            return Err(Error::Data(format!(
                "channel `{name}` is not aligned with the table ({} samples at dt {dt})",
                values.len()
            )));
        }
        self.channels.push((name.to_string(), values));
        Ok(())
    }

    pub fn channel(&self, name: &str) -> Option<&[f64]> {
        self.channels.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn series(&self, name: &str) -> Option<Result<TimeSeries>> {
        self.channel(name).map(|v| TimeSeries::new(self.dt, v.to_vec()))
    }

    pub fn require(&self, name: &str) -> Result<TimeSeries> {
        self.series(name)
            .unwrap_or_else(|| Err(Error::MissingChannel(name.to_string())))
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        let mut header = vec!["t"];
        header.extend(self.names());
        out.write_record(&header)?;
        let mut row = Vec::with_capacity(header.len());
        for k in 0..self.len {
            row.clear();
            row.push(format_sig9(k as f64 * self.dt));
            row.extend(self.channels.iter().map(|(_, v)| format_sig9(v[k])));
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(file))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let header: Vec<String> = input.headers()?.iter().map(str::to_string).collect();
        if header.first().map(String::as_str) != Some("t") {
            return Err(Error::Parse("first CSV column must be `t`".into()));
        }
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
        for (line, record) in input.records().enumerate() {
            let record = record?;
            if record.len() != header.len() {
                return Err(Error::Parse(format!("row {} has {} fields", line + 2, record.len())));
            }
            for (col, field) in columns.iter_mut().zip(record.iter()) {
                let value: f64 = field
                    .parse()
                    .map_err(|_| Error::Parse(format!("row {}: `{field}` is not a number", line + 2)))?;
                col.push(value);
            }
        }
        let times = &columns[0];
        let n = times.len();
        if n < 2 {
            return Err(Error::Data("a table needs at least two rows".into()));
        }
        let span = times[n - 1] - times[0];
        // Times were written with nine significant digits; so is dt.
        let dt: f64 = format!("{:.8e}", span / (n - 1) as f64)
            .parse()
            .expect("formatted float");
        if !(dt > 0.0) {
            return Err(Error::Data("time column is not increasing".into()));
        }
        let tol = 1e-6 * dt.max(1e-7 * times[n - 1].abs());
        for (k, &t) in times.iter().enumerate() {
            if (t - times[0] - k as f64 * dt).abs() > tol.max(1e-8 * t.abs()) {
                return Err(Error::Data(format!("non-uniform sampling at row {}", k + 2)));
            }
        }
        let mut table = Self::new(dt, n);
        for (name, values) in header.iter().zip(columns).skip(1) {
            if let Some(k) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data(format!(
                    "channel `{name}` has a non-finite value at row {}",
                    k + 2
                )));
            }
            table.push_values(name, values, dt)?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }
}

impl TimeSeries {
    /// Writes this series as a two-column table `t,<name>`.
    pub fn write_csv<W: Write>(&self, name: &str, writer: W) -> Result<()> {
        let mut table = SignalTable::new(self.dt(), self.len());
        table.push(name, self)?;
        table.write_csv(writer)
    }

    /// Reads channel `name` from a table.
    pub fn read_csv<R: Read>(name: &str, reader: R) -> Result<Self> {
        SignalTable::read_csv(reader)?.require(name)
    }
}
