//! CSV output. Floats use Rust's shortest round-trip `Debug` formatting, so reading a table back gives
//! the same bits.

use std::fs::File;
use std::path::Path;

use stadesign::verify::InvariantSpectrum;
use stadesign::{DMatrix, ShortcutSolution};

use crate::CliError;

fn writer(path: &Path) -> Result<csv::Writer<File>, CliError> {
    csv::Writer::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e))
}

fn write_rows(path: &Path, header: Vec<String>, rows: impl Iterator<Item = Vec<f64>>) -> Result<(), CliError> {
    let mut w = writer(path)?;
    let wrap = |e| CliError::Csv(path.to_path_buf(), e);
    w.write_record(&header).map_err(wrap)?;
    for row in rows {
        w.write_record(row.iter().map(|x| format!("{x:?}"))).map_err(wrap)?;
    }
    w.flush().map_err(|e| CliError::Io(path.to_path_buf(), e))
}

/// Columns `t, h_1..h_N, f_1..f_N`.
pub fn write_trajectory(path: &Path, sol: &ShortcutSolution) -> Result<(), CliError> {
    let n = sol.h_traj.ncols();
    let mut header = vec!["t".to_string()];
    header.extend((1..=n).map(|a| format!("h_{a}")));
    header.extend((1..=n).map(|a| format!("f_{a}")));
    let rows = (0..sol.len()).map(|i| {
        let mut row = vec![sol.times[i]];
        row.extend(sol.h_traj.row(i).iter());
        row.extend(sol.f_traj.row(i).iter());
        row
    });
    write_rows(path, header, rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub h: DMatrix<f64>,
    pub f: DMatrix<f64>,
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
    let bad = |why: String| CliError::Schema(path.to_path_buf(), why);
    let width = r.headers().map_err(|e| CliError::Csv(path.to_path_buf(), e))?.len();
    if width < 3 || (width - 1) % 2 != 0 {
        return Err(bad(format!("trajectory table has {width} columns")));
    }
    let n = (width - 1) / 2;
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Csv(path.to_path_buf(), e))?;
        let row = rec.iter().map(|s| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")))).collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let m = rows.len();
    Ok(Trajectory {
        times: rows.iter().map(|r| r[0]).collect(),
        h: DMatrix::from_fn(m, n, |i, a| rows[i][1 + a]),
        f: DMatrix::from_fn(m, n, |i, a| rows[i][1 + n + a]),
    })
}

/// Columns `t, lambda_1..lambda_d, pop_1..pop_d, invariant_residual_local`.
pub fn write_verify(path: &Path, times: &[f64], track: &[InvariantSpectrum], pops: &DMatrix<f64>, local: &[f64]) -> Result<(), CliError> {
    let d = pops.ncols();
    let mut header = vec!["t".to_string()];
    header.extend((1..=d).map(|n| format!("lambda_{n}")));
    header.extend((1..=d).map(|n| format!("pop_{n}")));
    header.push("invariant_residual_local".into());
    let rows = (0..times.len()).map(|i| {
        let mut row = vec![times[i]];
        row.extend(track[i].eigenvalues.iter());
        row.extend(pops.row(i).iter());
        row.push(local[i]);
        row
    });
    write_rows(path, header, rows)
}
