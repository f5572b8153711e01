use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::SolutionState;

/// Coefficients of `f^(k)` for `n = 2` with binomial weights:
/// `entries[i] = a_{k−2i, 2i} / √C(k, 2i)` with `a = 2F`, so the `x₂`
/// exponent ascends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: usize,
    pub entries: Vec<f64>,
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn bombieri_row<T: Real>(state: &SolutionState<T>, k: usize) -> Result<TableRow> {
    if state.n() != 2 {
        return Err(Error::invalid("n", format!("the coefficient table needs n = 2, got {}", state.n())));
    }
    if !k.is_multiple_of(2) || k == 0 {
        return Err(Error::invalid("k", format!("row degree {k} must be even and positive")));
    }
    if k / 2 > state.k_max() {
        return Err(Error::invalid(
            "K",
            format!("row k = {k} needs order {} but the state stops at {}", k / 2, state.k_max()),
        ));
    }
    let half = (k / 2) as u32;
    let entries = (0..=half)
        .map(|i| {
            let f = state.f_coeff(&[half - i, i]).to_f64();
            2.0 * f / binomial(k as u64, 2 * i as u64).sqrt()
        })
        .collect();
    Ok(TableRow { k, entries })
}

/// Rows for `k = 4, 6, …, 2K`.
pub fn bombieri_table<T: Real>(state: &SolutionState<T>) -> Result<Vec<TableRow>> {
    (2..=state.k_max())
        .map(|h| bombieri_row(state, 2 * h))
        .collect()
}

/// `k,j1,entry` with `j1` the `x₁` exponent.
pub fn write_table_csv(rows: &[TableRow], mut w: impl Write) -> Result<()> {
    writeln!(w, "k,j1,entry")?;
    for r in rows {
        for (i, e) in r.entries.iter().enumerate() {
            writeln!(w, "{},{},{:e}", r.k, r.k - 2 * i, e)?;
        }
    }
    Ok(())
}

/// Compares `value` with a published decimal that may be rounded or
/// truncated: `value` is cut to the printed number of decimals both ways and
/// the closer result must be within `rel_tol` of `printed`.
pub fn matches_printed(value: f64, printed: &str, rel_tol: f64) -> bool {
    let Ok(p) = printed.trim().parse::<f64>() else {
        return false;
    };
    let decimals = printed.trim().split_once('.').map_or(0, |(_, d)| d.len()) as i32;
    let unit = 10f64.powi(-decimals);
    let rounded = (value / unit).round() * unit;
    let truncated = (value / unit).trunc() * unit;
    let diff = (rounded - p).abs().min((truncated - p).abs());
    diff <= rel_tol * p.abs()
}
