use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest allowed left end of a fit window.
pub const MIN_J: usize = 5;
/// Largest condition number of the column-scaled design matrix.
pub const MAX_CONDITION: f64 = 1e12;
/// Allowed disagreement of the two `σ` estimates.
pub const SIGMA_AGREEMENT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Richardson {
    /// Index where the estimate is taken (the right end of the window).
    pub j: usize,
    pub b_inf: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioFit {
    pub b_inf: f64,
    pub sigma: f64,
    /// Coefficient of `1/j²` relative to `b_∞`.
    pub second_order: f64,
    pub window: (usize, usize),
    pub rms_residual: f64,
    pub condition: f64,
    pub richardson: Richardson,
    /// `|σ − σ_Richardson| ≤ 0.05`.
    pub agree: bool,
}

impl RatioFit {
    pub fn b_inf_inv_sqrt(&self) -> f64 {
        self.b_inf.powf(-0.5)
    }
}

/// `[K/3, K]`, moved right to start at 5 or later.
pub fn default_window(k_max: usize) -> (usize, usize) {
    ((k_max / 3).max(MIN_J), k_max)
}

/// Least squares of `b_j` on `{1, 1/j, 1/j²}` over the window, read as
/// `b_∞(1 + σ/j + c/j²)`, plus a three-point Richardson estimate at the right
/// end of the window.
pub fn fit_asymptotic(b: &[(usize, f64)], window: (usize, usize)) -> Result<RatioFit> {
    let (lo, hi) = window;
    if lo < MIN_J {
        return Err(Error::Fit(format!("window starts at j = {lo}, below {MIN_J}")));
    }
    if hi < lo + 2 {
        return Err(Error::Fit(format!("window [{lo}, {hi}] holds fewer than 3 points")));
    }
    let pts: Vec<(f64, f64)> = b
        .iter()
        .filter(|(j, _)| *j >= lo && *j <= hi)
        .map(|&(j, v)| (j as f64, v))
        .collect();
    if pts.len() != hi - lo + 1 {
        return Err(Error::Fit(format!(
            "window [{lo}, {hi}] is not covered by the sequence ({} of {} points)",
            pts.len(),
            hi - lo + 1
        )));
    }
    if pts.iter().any(|p| !p.1.is_finite()) {
        return Err(Error::Fit("non-finite ratio in the window".into()));
    }

    let m = pts.len();
    let mut a = DMatrix::from_fn(m, 3, |r, c| pts[r].0.powi(-(c as i32)));
    let scale: Vec<f64> = (0..3).map(|c| a.column(c).norm()).collect();
    for (c, s) in scale.iter().enumerate() {
        a.column_mut(c).scale_mut(1.0 / s);
    }
    let y = DVector::from_iterator(m, pts.iter().map(|p| p.1));
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let condition = sv.max() / sv.min();
    if !(condition <= MAX_CONDITION) {
        return Err(Error::Fit(format!(
            "design matrix on [{lo}, {hi}] has condition number {condition:.3e}"
        )));
    }
    let coef = svd
        .solve(&y, 0.0)
        .map_err(|e| Error::Fit(format!("least squares failed: {e}")))?;
    let c: Vec<f64> = (0..3).map(|i| coef[i] / scale[i]).collect();
    let resid = &a * &coef - &y;
    let rms_residual = (resid.norm_squared() / m as f64).sqrt();
    let b_inf = c[0];
    if b_inf == 0.0 {
        return Err(Error::Fit("fitted b_∞ is zero".into()));
    }

    let richardson = richardson(b, hi)?;
    let sigma = c[1] / b_inf;
    Ok(RatioFit {
        b_inf,
        sigma,
        second_order: c[2] / b_inf,
        window,
        rms_residual,
        condition,
        richardson,
        agree: (sigma - richardson.sigma).abs() <= SIGMA_AGREEMENT,
    })
}

/// Second-order Richardson for `b_∞` from `b_j, b_{j−1}, b_{j−2}`, then
/// first-order Richardson on `σ_j = j(b_j/b_∞ − 1)`.
pub fn richardson(b: &[(usize, f64)], j: usize) -> Result<Richardson> {
    let get = |i: usize| -> Result<f64> {
        b.iter()
            .find(|p| p.0 == i)
            .map(|p| p.1)
            .ok_or_else(|| Error::Fit(format!("b_{i} missing for the Richardson estimate")))
    };
    if j < 3 {
        return Err(Error::Fit("Richardson needs j ≥ 3".into()));
    }
    let (b0, b1, b2) = (get(j)?, get(j - 1)?, get(j - 2)?);
    let (x0, x1, x2) = (j as f64, (j - 1) as f64, (j - 2) as f64);
    let b_inf = (x0 * x0 * b0 - 2.0 * x1 * x1 * b1 + x2 * x2 * b2) / 2.0;
    let s0 = x0 * (b0 / b_inf - 1.0);
    let s1 = x1 * (b1 / b_inf - 1.0);
    Ok(Richardson {
        j,
        b_inf,
        sigma: x0 * s0 - x1 * s1,
    })
}
