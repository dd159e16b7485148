//! Plain-text data emission. Every number is written with 17 significant
//! digits so that files round-trip to identical doubles.

use std::io::{self, Write};

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column-oriented numeric table. `None` cells are written empty.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub columns: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_column(&mut self, name: &str, values: Vec<Option<f64>>) {
        if let Some(first) = self.columns.first() {
            assert_eq!(first.len(), values.len(), "column {name} has wrong length");
        }
        self.names.push(name.to_owned());
        self.columns.push(values);
    }

    pub fn push_dense(&mut self, name: &str, values: &[f64]) {
        self.push_column(name, values.iter().copied().map(Some).collect());
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn column(&self, name: &str) -> Option<&[Option<f64>]> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(&self.columns[k])
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.names.join(","))?;
        for r in 0..self.rows() {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| c[r].map(fmt17).unwrap_or_default())
                .collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is ascii")
    }
}

/// `n` evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| start + (end - start) * (k as f64 / (n - 1) as f64))
            .collect(),
    }
}

/// `n` log-spaced points from `start` to `end` inclusive (both positive).
pub fn logspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    linspace(start.ln(), end.ln(), n)
        .into_iter()
        .map(f64::exp)
        .collect()
}
