//! Reports and plot-ready CSV tables. Floats use the shortest round-trip form, so equal
//! inputs give byte-identical files.

use std::path::Path;

use serde::Serialize;

use crate::error::AppResult;

/// A CSV table held as formatted cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn fmt(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 {
        return "0".into();
    }
    if (1e-4..1e15).contains(&a) || !a.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> AppResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        Ok(w.into_inner()
            .map_err(|e| std::io::Error::other(e.to_string()))?)
    }

    pub fn write(&self, path: &Path) -> AppResult<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }
}

pub fn eta_table(m: &lplab_core::paraproduct::EtaMeasurement) -> Table {
    let mut t = Table::new(&["n", "trials", "ratio_max", "ratio_median", "theory_rate"]);
    for r in &m.rows {
        t.push(vec![
            r.n.to_string(),
            r.trials.to_string(),
            fmt(r.ratio_max),
            fmt(r.ratio_median),
            m.theory_rate.map(fmt).unwrap_or_default(),
        ]);
    }
    t
}

/// `envelope` and `ratio` refer to the low-high part R_j.
pub fn diagnostics_table(rows: &[lplab_core::duhamel::BandDiagnostic]) -> Table {
    let mut t = Table::new(&["j", "t", "Rj", "Cj", "envelope", "ratio"]);
    for d in rows {
        t.push(vec![
            d.j.to_string(),
            fmt(d.t),
            fmt(d.rj),
            fmt(d.cj),
            fmt(d.envelope_r),
            fmt(d.ratio_r()),
        ]);
    }
    t
}

pub fn series_table(norms: &[f64], bounds: &[f64]) -> Table {
    let mut t = Table::new(&["k", "norm", "bound"]);
    for (i, (n, b)) in norms.iter().zip(bounds).enumerate() {
        t.push(vec![(i + 1).to_string(), fmt(*n), fmt(*b)]);
    }
    t
}

#[derive(Debug, Serialize)]
pub struct Report<'a, T: Serialize> {
    pub command: &'a str,
    pub config: &'a crate::config::RunConfig,
    pub result: T,
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}
