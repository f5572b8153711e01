//! Numerical oracle for solved states: evaluates the truncated surface, traces
//! billiard trajectories with the reflection law, and measures how closely
//! `χ` conjugates the billiard map to the rotation.
//!
//! Nothing here calls into the solver's engine; the series algebra and the
//! state accessors are the only shared code.

mod conjugacy;
mod flight;
mod polynomial;
mod surface;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::frequency::{make_frequencies, FrequencySpec, FrequencyVector};
use crate::scalar::{DoubleDouble, Precision, Real};
use crate::solver::{solve_in, SolverConfig};

pub use conjugacy::{slope_check, Conjugacy, SlopeCheck, SLOPE_SLACK};
pub use flight::{
    collinearity_defect, complete_triple, direction, fermat_residual, lift, next_impact, reflect, ImpactTriple,
    Sheet,
};
pub use polynomial::{polynomial_equation_residual, polynomial_equations, polynomial_equations_for};
pub use surface::{SurfacePoly, DEFAULT_R_MAX};

/// Bound on the Fermat residual of generated triples.
pub const FERMAT_TOL: f64 = 1e-11;
/// Bound on the disagreement of the two reflection formulations.
pub const COLLINEARITY_TOL: f64 = 1e-12;
/// Bound on the polynomial-equation residual.
pub const POLY_TOL: f64 = 1e-9;
/// Allowed relative distance of `f₄` from the sphere value at the smallest `ε`.
pub const SPHERE_TOL: f64 = 0.02;

/// Unit directions in `Cⁿ`, reproducible from `seed`.
pub fn random_directions(n: usize, count: usize, seed: u64) -> Vec<Vec<Complex<f64>>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let v: Vec<Complex<f64>> = (0..n)
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let l = v.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|w| w / l).collect()
        })
        .collect()
}

/// Residual scaling of a state solved at order `k`. The residuals reach
/// `|z|^{2K+1}`, below binary64 resolution from moderate `K` on, so the state
/// and the trajectories are computed in extended precision.
pub fn conjugacy_slope(
    fv: &FrequencyVector,
    k: usize,
    radius: f64,
    directions: &[Vec<Complex<f64>>],
) -> Result<SlopeCheck> {
    let config = SolverConfig::new(fv.n(), k).with_precision(Precision::Ext);
    let state = solve_in::<DoubleDouble>(&config, fv)?;
    let conj = Conjugacy::new(&state, DoubleDouble::from_f64(DEFAULT_R_MAX))?;
    slope_check(&conj, k, radius, directions)
}

/// Worst Fermat residual and reflection disagreement over trajectories
/// started near the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryCheck {
    pub samples: usize,
    pub fermat_max: f64,
    pub collinearity_max: f64,
}

pub fn trajectory_check(sp: &SurfacePoly<f64>, samples: usize, scale: f64, seed: u64) -> Result<TrajectoryCheck> {
    let n = sp.n();
    let mut rng = StdRng::seed_from_u64(seed);
    let point = |rng: &mut StdRng| -> Vec<f64> { (0..n).map(|_| scale * rng.gen_range(-1.0..1.0)).collect() };
    let mut fermat_max = 0.0f64;
    let mut collinearity_max = 0.0f64;
    for _ in 0..samples {
        let a = point(&mut rng);
        let b = point(&mut rng);
        let tr = complete_triple(sp, &a, &b)?;
        fermat_max = fermat_max.max(fermat_residual(sp, &tr)?);
        collinearity_max = collinearity_max.max(collinearity_defect(sp, &tr)?);
    }
    Ok(TrajectoryCheck {
        samples,
        fermat_max,
        collinearity_max,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub eps: f64,
    pub f2: f64,
    /// `(1 − cos α)/2`, the order-1 value at `f₀ = −1/2`.
    pub f2_formula: f64,
    pub f4: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphereLimit {
    pub points: Vec<SpherePoint>,
    pub f2_max_error: f64,
    /// `|f₄ − 1|` decreases along the sequence.
    pub monotone: bool,
    /// `|f₄ − 1|` at the last `ε`.
    pub final_distance: f64,
    pub pass: bool,
}

/// Solves `n = 1` at `α = π(1 − ε)` and compares `f₂`, `f₄` with the sphere
/// of radius `1/2`, whose expansion is `−1/2 + x² + x⁴ + …`.
pub fn sphere_limit(epsilons: &[f64]) -> Result<SphereLimit> {
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let fv = make_frequencies(&[FrequencySpec::Turns((1.0 - eps) / 2.0)], 3)?;
        let config = SolverConfig::new(1, 2).with_precision(Precision::Ext);
        let st = solve_in::<DoubleDouble>(&config, &fv)?;
        let alpha = std::f64::consts::PI * (1.0 - eps);
        points.push(SpherePoint {
            eps,
            f2: st.f_coeff(&[1]).to_f64(),
            f2_formula: (1.0 - alpha.cos()) / 2.0,
            f4: st.f_coeff(&[2]).to_f64(),
        });
    }
    let f2_max_error = points
        .iter()
        .map(|p| (p.f2 - p.f2_formula).abs())
        .fold(0.0, f64::max);
    let dist: Vec<f64> = points.iter().map(|p| (p.f4 - 1.0).abs()).collect();
    let monotone = dist.windows(2).all(|w| w[1] < w[0]);
    let final_distance = dist.last().copied().unwrap_or(f64::NAN);
    Ok(SphereLimit {
        pass: monotone && final_distance <= SPHERE_TOL && f2_max_error < 1e-12,
        points,
        f2_max_error,
        monotone,
        final_distance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyCheck {
    pub n: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub degree: u32,
    pub residual: f64,
    pub pass: bool,
}

pub fn poly_check(fv: &FrequencyVector, k: usize, degree: u32, precision: Precision) -> Result<PolyCheck> {
    let config = SolverConfig::new(fv.n(), k).with_precision(precision);
    let residual = match precision {
        Precision::F64 => polynomial_equation_residual(&solve_in::<f64>(&config, fv)?, degree)?,
        Precision::Ext => polynomial_equation_residual(&solve_in::<DoubleDouble>(&config, fv)?, degree)?,
    };
    Ok(PolyCheck {
        n: fv.n(),
        k,
        degree,
        residual,
        pass: residual < POLY_TOL,
    })
}

/// What `verify` runs.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub frequencies: FrequencyVector,
    /// Orders for the residual-scaling checks.
    pub slope_orders: Vec<usize>,
    pub radius: f64,
    pub directions: usize,
    /// Order and degree of the polynomial-equation check.
    pub poly_order: usize,
    pub poly_degree: u32,
    pub precision: Precision,
    pub trajectories: usize,
    pub sphere_eps: Vec<f64>,
    pub seed: u64,
}

impl VerifyOptions {
    pub fn new(frequencies: FrequencyVector) -> Self {
        let n = frequencies.n();
        let (slope_orders, poly_order, poly_degree) = if n == 1 { (vec![3, 5, 7], 8, 13) } else { (vec![5], 5, 9) };
        VerifyOptions {
            frequencies,
            slope_orders,
            radius: 1e-2,
            directions: 4,
            poly_order,
            poly_degree,
            precision: Precision::F64,
            trajectories: 64,
            sphere_eps: vec![1e-1, 1e-2, 1e-3],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub slope_checks: Vec<SlopeCheck>,
    pub fermat_max: f64,
    pub collinearity_max: f64,
    pub poly_residual_max: f64,
    pub poly_check: PolyCheck,
    pub sphere_limit: SphereLimit,
    pub pass: bool,
}

pub fn verify(opts: &VerifyOptions) -> Result<VerifyReport> {
    let fv = &opts.frequencies;
    let dirs = random_directions(fv.n(), opts.directions, opts.seed);
    let slope_checks = opts
        .slope_orders
        .iter()
        .map(|&k| conjugacy_slope(fv, k, opts.radius, &dirs))
        .collect::<Result<Vec<_>>>()?;
    let poly = poly_check(fv, opts.poly_order, opts.poly_degree, opts.precision)?;
    let config = SolverConfig::new(fv.n(), opts.poly_order).with_precision(opts.precision);
    let state = crate::solver::solve(&config, fv)?;
    let sp = SurfacePoly::from_state(&state, DEFAULT_R_MAX)?;
    let traj = trajectory_check(&sp, opts.trajectories, 1e-2, opts.seed)?;
    let sphere = sphere_limit(&opts.sphere_eps)?;
    let pass = slope_checks.iter().all(|s| s.pass)
        && poly.pass
        && traj.fermat_max < FERMAT_TOL
        && traj.collinearity_max < COLLINEARITY_TOL
        && sphere.pass;
    Ok(VerifyReport {
        slope_checks,
        fermat_max: traj.fermat_max,
        collinearity_max: traj.collinearity_max,
        poly_residual_max: poly.residual,
        poly_check: poly,
        sphere_limit: sphere,
        pass,
    })
}
