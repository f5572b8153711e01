use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fewest nonzero coefficients accepted by [`ratios`].
pub const MIN_COEFFICIENTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioPoint {
    pub j: usize,
    pub f_2j: f64,
    /// `f_{2j} / f_{2j−2}`.
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ratios {
    pub points: Vec<RatioPoint>,
    /// Every `j` with `b_j < 0`. With `f₀ < 0 < f₂`, `j = 1` is always here.
    pub sign_changes: Vec<usize>,
}

impl Ratios {
    /// `(j, b_j)` pairs.
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.points.iter().map(|p| (p.j, p.b)).collect()
    }

    /// No sign change at or after `j`.
    pub fn positive_from(&self, j: usize) -> bool {
        self.sign_changes.iter().all(|&s| s < j)
    }

    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "j,f_2j,b_j")?;
        for p in &self.points {
            writeln!(w, "{},{:e},{:e}", p.j, p.f_2j, p.b)?;
        }
        Ok(())
    }
}

/// `b_j = f_{2j}/f_{2j−2}` for `j = 1..K` from `[f_0, f_2, …, f_{2K}]`.
pub fn ratios(coeffs: &[f64]) -> Result<Ratios> {
    let nonzero = coeffs.iter().filter(|c| **c != 0.0).count();
    if nonzero < MIN_COEFFICIENTS {
        return Err(Error::Fit(format!(
            "{nonzero} nonzero coefficients, at least {MIN_COEFFICIENTS} are needed"
        )));
    }
    let mut points = Vec::with_capacity(coeffs.len().saturating_sub(1));
    let mut sign_changes = Vec::new();
    for j in 1..coeffs.len() {
        let (num, den) = (coeffs[j], coeffs[j - 1]);
        if den == 0.0 || !den.is_finite() || !num.is_finite() {
            return Err(Error::Gap(format!("f_{} = {den:e}, ratio b_{j} is undefined", 2 * (j - 1))));
        }
        let b = num / den;
        if b < 0.0 {
            sign_changes.push(j);
        }
        points.push(RatioPoint { j, f_2j: num, b });
    }
    Ok(Ratios { points, sign_changes })
}
