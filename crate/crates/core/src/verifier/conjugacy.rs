use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::flight::{complete_triple, ImpactTriple};
use super::surface::{norm, SurfacePoly};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::TruncatedSeries;
use crate::solver::SolutionState;

/// Allowed imaginary part of `χ` at a real point, relative to `|χ|`.
const REALITY_TOL: f64 = 1e-8;

/// The solved `χ` and the truncated surface, ready to be compared with the
/// billiard map.
pub struct Conjugacy<T: Real = f64> {
    chi: Vec<TruncatedSeries<T>>,
    lambdas: Vec<Complex<T>>,
    surface: SurfacePoly<T>,
}

impl<T: Real> Conjugacy<T> {
    pub fn new(state: &SolutionState<T>, r_max: T) -> Result<Self> {
        let trunc = 2 * state.k_max() as u32 - 1;
        Ok(Conjugacy {
            chi: state.chi_series(trunc)?,
            lambdas: state.frequencies.lambdas_in(),
            surface: SurfacePoly::from_state(state, r_max)?,
        })
    }

    pub fn surface(&self) -> &SurfacePoly<T> {
        &self.surface
    }

    /// `χ∘ρ^p` at `(z, z̄)`.
    pub fn chi_at(&self, z: &[Complex<T>], p: i64) -> Result<Vec<T>> {
        let n = self.lambdas.len();
        if z.len() != n {
            return Err(Error::Structural(format!("z has {} components, expected {n}", z.len())));
        }
        let mut point = Vec::with_capacity(2 * n);
        for (zj, lj) in z.iter().zip(&self.lambdas) {
            let mut w = *zj;
            let l = if p < 0 { lj.conj() } else { *lj };
            for _ in 0..p.unsigned_abs() {
                w = w * l;
            }
            point.push(w);
        }
        for j in 0..n {
            point.push(point[j].conj());
        }
        let zscale = z.iter().fold(T::zero(), |m, w| m.max(w.re.abs()).max(w.im.abs()));
        let mut out = Vec::with_capacity(n);
        for c in &self.chi {
            let v = c.evaluate(&point)?;
            let scale = v.re.abs().max(zscale);
            if v.im.abs() > T::from_f64(REALITY_TOL) * scale && scale > T::zero() {
                return Err(Error::Consistency(format!(
                    "χ is not real at a real point: imaginary part {:.3e}",
                    v.im.to_f64()
                )));
            }
            out.push(v.re);
        }
        Ok(out)
    }

    /// The triple `(χ∘ρ⁻¹, χ, χ∘ρ)` predicted by the conjugacy.
    pub fn predicted(&self, z: &[Complex<T>]) -> Result<ImpactTriple<T>> {
        Ok(ImpactTriple {
            a: self.chi_at(z, -1)?,
            b: self.chi_at(z, 0)?,
            c: self.chi_at(z, 1)?,
        })
    }

    /// `|c − χ∘ρ(z, z̄)|` where `c` is the true next impact after
    /// `χ∘ρ⁻¹(z, z̄)` and `χ(z, z̄)`.
    pub fn residual(&self, z: &[Complex<T>]) -> Result<T> {
        let pred = self.predicted(z)?;
        let truth = complete_triple(&self.surface, &pred.a, &pred.b)?;
        let d: Vec<T> = truth.c.iter().zip(&pred.c).map(|(&x, &y)| x - y).collect();
        Ok(norm(&d))
    }
}

/// Residual scaling between two radii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeCheck {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub radii: (f64, f64),
    /// Largest residual over the sampled directions at each radius.
    pub residuals: (f64, f64),
    /// `log₂` of the residual ratio divided by `log₂` of the radius ratio.
    pub slope: f64,
    pub required: f64,
    pub pass: bool,
}

/// Slack on the required slope.
pub const SLOPE_SLACK: f64 = 0.5;

/// Measures the residual at `radius` and `radius/2` along each unit
/// direction. The required slope is `2K − 1`.
pub fn slope_check<T: Real>(conj: &Conjugacy<T>, k: usize, radius: f64, directions: &[Vec<Complex<f64>>]) -> Result<SlopeCheck> {
    let n = conj.lambdas.len();
    let radii = (radius, radius / 2.0);
    let worst = |r: f64| -> Result<f64> {
        let mut m = 0.0f64;
        for d in directions {
            let z: Vec<Complex<T>> = d
                .iter()
                .map(|w| {
                    Complex::new(
                        T::from_f64(w.re) * T::from_f64(r),
                        T::from_f64(w.im) * T::from_f64(r),
                    )
                })
                .collect();
            m = m.max(conj.residual(&z)?.to_f64());
        }
        Ok(m)
    };
    let residuals = (worst(radii.0)?, worst(radii.1)?);
    let slope = (residuals.0 / residuals.1).log2() / (radii.0 / radii.1).log2();
    let required = (2 * k - 1) as f64;
    Ok(SlopeCheck {
        n,
        k,
        radii,
        residuals,
        slope,
        required,
        pass: slope.is_finite() && slope >= required - SLOPE_SLACK,
    })
}
