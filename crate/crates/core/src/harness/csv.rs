//! CSV output: trajectories, control realizations and run summaries.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::conflict_sim::AimingResult;
use crate::error::{Error, Result};
use crate::frac_ops::Trajectory;

/// Decimal rendering with 12 significant digits.
pub fn format_value(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_nan() { "NaN".into() } else if v.is_infinite() { format!("{v}") } else { "0".into() };
    }
    let exponent = v.abs().log10().floor() as i32;
    let decimals = (11 - exponent).max(0) as usize;
    format!("{v:.decimals$}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

fn write_rows<I>(path: &Path, header: &[String], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = create(path)?;
    let io = |e| Error::io(path, e);
    writeln!(w, "{}", header.join(",")).map_err(io)?;
    for row in rows {
        writeln!(w, "{}", row.join(",")).map_err(io)?;
    }
    w.flush().map_err(io)
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |i| format!("{prefix}_{i}"))
}

/// Writes `t,x_1..x_n,xt_1..xt_n`, one row per grid node.
pub fn emit_csv(x: &Trajectory, x_tilde: &Trajectory, path: &Path) -> Result<()> {
    x.same_shape(x_tilde)?;
    let n = x.dim();
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(numbered("x", n))
        .chain(numbered("xt", n))
        .collect();
    let grid = *x.grid();
    let rows = (0..grid.count()).map(|k| {
        std::iter::once(grid.node(k))
            .chain(x.at(k).iter().copied())
            .chain(x_tilde.at(k).iter().copied())
            .map(format_value)
            .collect()
    });
    write_rows(path, &header, rows)
}

/// Writes `t,x_1..x_n` for a single solution.
pub fn emit_solution_csv(x: &Trajectory, path: &Path) -> Result<()> {
    let header: Vec<String> = std::iter::once("t".to_string()).chain(numbered("x", x.dim())).collect();
    let grid = *x.grid();
    let rows = (0..grid.count()).map(|k| {
        std::iter::once(grid.node(k))
            .chain(x.at(k).iter().copied())
            .map(format_value)
            .collect()
    });
    write_rows(path, &header, rows)
}

/// Writes the four realizations of an aiming run, `t,u_*,v_*,ut_*,vt_*`.
pub fn emit_controls_csv(result: &AimingResult, path: &Path) -> Result<()> {
    let signals = [
        ("u", &result.u),
        ("v", &result.v),
        ("ut", &result.u_tilde),
        ("vt", &result.v_tilde),
    ];
    let header: Vec<String> = std::iter::once("t".to_string())
        .chain(signals.iter().flat_map(|(name, r)| numbered(name, r.dim()).collect::<Vec<_>>()))
        .collect();
    let grid = *result.x.grid();
    let rows = (0..grid.count()).map(|k| {
        let mut row = vec![format_value(grid.node(k))];
        for (_, r) in &signals {
            row.extend(r.at(k).iter().copied().map(format_value));
        }
        row
    });
    write_rows(path, &header, rows)
}

/// One line of a run summary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryRow {
    pub h: f64,
    pub delta: Option<f64>,
    pub sup_error: f64,
}

/// Writes `h,delta,sup_error`; `delta` is empty for runs without a partition.
pub fn emit_summary_csv(rows: &[SummaryRow], path: &Path) -> Result<()> {
    let header = ["h", "delta", "sup_error"].map(String::from);
    let lines = rows.iter().map(|r| {
        vec![
            format_value(r.h),
            r.delta.map(format_value).unwrap_or_default(),
            format_value(r.sup_error),
        ]
    });
    write_rows(path, &header, lines)
}

/// A CSV file read back as a header and raw cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn read(path: &Path) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = BufReader::new(file).lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(path, e))?,
            None => return Err(Error::invalid(format!("{} is empty", path.display()))),
        };
        let header: Vec<String> = header.split(',').map(String::from).collect();
        let mut rows = Vec::new();
        for line in lines {
            let line = line.map_err(|e| Error::io(path, e))?;
            let cells: Vec<String> = line.split(',').map(String::from).collect();
            if cells.len() != header.len() {
                return Err(Error::invalid(format!(
                    "{}: row {} has {} cells, header has {}",
                    path.display(),
                    rows.len() + 2,
                    cells.len(),
                    header.len()
                )));
            }
            rows.push(cells);
        }
        Ok(Self { header, rows })
    }

    /// Numeric values of a column; empty cells become `None`.
    pub fn column(&self, name: &str) -> Result<Vec<Option<f64>>> {
        let idx = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::invalid(format!("no column `{name}`")))?;
        self.rows
            .iter()
            .map(|r| {
                let cell = r[idx].trim();
                if cell.is_empty() {
                    Ok(None)
                } else {
                    cell.parse::<f64>()
                        .map(Some)
                        .map_err(|_| Error::invalid(format!("bad number `{cell}` in column `{name}`")))
                }
            })
            .collect()
    }

    /// Rows `0..n` of columns with the given prefix, e.g. `x` for `x_1..x_n`.
    pub fn vectors(&self, prefix: &str) -> Result<Vec<Vec<f64>>> {
        let mut cols = Vec::new();
        let mut i = 1;
        while self.header.iter().any(|h| *h == format!("{prefix}_{i}")) {
            cols.push(self.column(&format!("{prefix}_{i}"))?);
            i += 1;
        }
        if cols.is_empty() {
            return Err(Error::invalid(format!("no columns with prefix `{prefix}`")));
        }
        Ok((0..self.rows.len())
            .map(|r| cols.iter().map(|c| c[r].unwrap_or(f64::NAN)).collect())
            .collect())
    }
}
