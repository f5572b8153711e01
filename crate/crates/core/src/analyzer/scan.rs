use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{default_window, fit_asymptotic, RatioFit};
use super::ratios::ratios;
use crate::error::{Error, Result};
use crate::frequency::{make_frequencies, FrequencySpec, Ratio};
use crate::scalar::{DoubleDouble, Precision, Real};
use crate::solver::{solve_in, SolverConfig};

/// Grid denominator: prime, so no grid point sits on a low-order resonance.
pub const GRID_DEN: u64 = 509;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    Ok,
    /// Small divisor: a resonance.
    Gap,
    /// Any other failure.
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub alpha_over_2pi: f64,
    pub b_inf_inv_sqrt: Option<f64>,
    pub status: ScanStatus,
    pub sigma: Option<f64>,
    pub sigma_richardson: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    pub k_max: usize,
    pub precision: Precision,
    pub window: Option<(usize, usize)>,
    pub divisor_floor: Option<f64>,
    /// Worker threads; all cores when `None`.
    pub workers: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            k_max: 100,
            precision: Precision::Ext,
            window: None,
            divisor_floor: None,
            workers: None,
        }
    }
}

/// `p/509` for the 101 numerators in `153..=253`, which covers (0.3, 0.5), plus
/// the resonant probes 3/10 and 1/3; sorted.
pub fn default_grid() -> Vec<FrequencySpec> {
    let mut g: Vec<Ratio> = (153..=253).map(|p| Ratio::new(p, GRID_DEN).unwrap()).collect();
    g.push(Ratio::new(3, 10).unwrap());
    g.push(Ratio::new(1, 3).unwrap());
    g.sort_by(|a, b| (a.num() * b.den()).cmp(&(b.num() * a.den())));
    g.into_iter().map(FrequencySpec::Ratio).collect()
}

/// Solve at `K` and fit the ratio sequence for one `α`.
pub fn scan_one(spec: &FrequencySpec, opts: &ScanOptions) -> Result<RatioFit> {
    let fv = make_frequencies(std::slice::from_ref(spec), 9)?;
    let mut config = SolverConfig::new(1, opts.k_max).with_precision(opts.precision);
    config.divisor_floor = opts.divisor_floor;
    let coeffs: Vec<f64> = match opts.precision {
        Precision::F64 => solve_in::<f64>(&config, &fv)?.one_dim_coefficients(),
        Precision::Ext => solve_in::<DoubleDouble>(&config, &fv)?
            .one_dim_coefficients()
            .into_iter()
            .map(|c| c.to_f64())
            .collect(),
    };
    let r = ratios(&coeffs)?;
    fit_asymptotic(&r.pairs(), opts.window.unwrap_or(default_window(opts.k_max)))
}

fn point(spec: &FrequencySpec, opts: &ScanOptions) -> ScanPoint {
    let alpha_over_2pi = spec.turns::<f64>();
    match scan_one(spec, opts) {
        Ok(fit) => ScanPoint {
            alpha_over_2pi,
            b_inf_inv_sqrt: (fit.b_inf > 0.0).then(|| fit.b_inf_inv_sqrt()),
            status: if fit.b_inf > 0.0 { ScanStatus::Ok } else { ScanStatus::Error },
            sigma: Some(fit.sigma),
            sigma_richardson: Some(fit.richardson.sigma),
            detail: if fit.agree { String::new() } else { "estimates disagree".into() },
        },
        Err(e) => ScanPoint {
            alpha_over_2pi,
            b_inf_inv_sqrt: None,
            status: match e {
                Error::SmallDivisor { .. } | Error::Gap(_) => ScanStatus::Gap,
                _ => ScanStatus::Error,
            },
            sigma: None,
            sigma_richardson: None,
            detail: e.to_string(),
        },
    }
}

/// Runs every grid point independently; failures become gap or error rows.
/// The output follows the order of `grid`.
pub fn alpha_scan(grid: &[FrequencySpec], opts: &ScanOptions) -> Result<Vec<ScanPoint>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(w) = opts.workers {
        builder = builder.num_threads(w);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    Ok(pool.install(|| grid.par_iter().map(|s| point(s, opts)).collect()))
}

pub fn write_scan_csv(points: &[ScanPoint], w: impl Write) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    for p in points {
        wr.serialize(p).map_err(csv_err)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_scan_csv(r: impl Read) -> Result<Vec<ScanPoint>> {
    csv::Reader::from_reader(r)
        .deserialize()
        .map(|row| row.map_err(csv_err))
        .collect()
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("scan csv: {other:?}")),
    }
}
