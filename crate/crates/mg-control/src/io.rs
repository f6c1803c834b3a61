//! Trajectory CSV emission and re-ingestion.
//!
//! Format: header `t,x,k_active,tau_active`, one row per grid node, values
//! printed with 17 significant digits so an emitted file reloads
//! bit-exactly, UTF-8, LF line endings.

use std::io::{self, BufRead, Write};

use thiserror::Error;

use crate::dde::Trajectory;
use crate::scenario::MgSystem;

pub const CSV_HEADER: &str = "t,x,k_active,tau_active";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: f64,
    pub x: f64,
    pub k_active: f64,
    pub tau_active: f64,
}

/// 17 significant digits: enough to reproduce any f64 exactly.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(
    mut w: W,
    traj: &Trajectory<f64>,
    system: &MgSystem<f64>,
) -> Result<(), CsvError> {
    writeln!(w, "{CSV_HEADER}")?;
    for node in traj.nodes() {
        let k = system.control_value(node.t, node.x);
        let tau = system.delay_value(node.t, node.x);
        writeln!(w, "{},{},{},{}", fmt(node.t), fmt(node.x), fmt(k), fmt(tau))?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(r: R) -> Result<Vec<CsvRow>, CsvError> {
    let mut rows = Vec::new();
    for (i, line) in r.lines().enumerate() {
        let line = line?;
        if i == 0 {
            if line.trim() != CSV_HEADER {
                return Err(CsvError::Malformed {
                    line: 1,
                    msg: format!("expected header `{CSV_HEADER}`, got `{line}`"),
                });
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split(',');
        let mut field = |name: &str| -> Result<f64, CsvError> {
            parts
                .next()
                .ok_or_else(|| CsvError::Malformed {
                    line: i + 1,
                    msg: format!("missing field {name}"),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| CsvError::Malformed {
                    line: i + 1,
                    msg: format!("bad {name}: {e}"),
                })
        };
        rows.push(CsvRow {
            t: field("t")?,
            x: field("x")?,
            k_active: field("k_active")?,
            tau_active: field("tau_active")?,
        });
    }
    Ok(rows)
}
