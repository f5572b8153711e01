//! Order-by-order construction of `f` and `χ`.
//!
//! Order 1 is fixed in closed form: `F_{e_j} = (2 − λ_j − λ_j^{-1})/(−8 f₀)` and
//! `χ_j^(1) = a_j (z_j + z̄_j)`. At every order `k ≥ 2` the averaged chord length
//! determines `f^(2k)` and the degree `2k − 1` part of the explicit equation,
//! divided by `λ_j + λ_j^{-1} − λ^m − λ^{-m}`, determines `χ^(2k−1)`. Monomials
//! with `m = ±e_j` are gauge freedom; they are set to zero and their residual
//! must vanish on its own.

mod blocks;
mod engine;
mod grid;
pub mod reference;
mod state;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frequency::FrequencyVector;
use crate::scalar::{DoubleDouble, Precision, Real};
use blocks::{BlockAlgebra, SparseBlocks};
use engine::{Engine, EngineInput};
use grid::GridBlocks;

pub use state::{ChiForm, FForm, SolutionState};

/// Radius of the sampling circle used by the one-frequency engine.
const GRID_RADIUS: f64 = 0.3;

/// Residual bound of the order-1 cancellation.
pub const DEGREE2_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EngineKind {
    /// Grid for one frequency, sparse otherwise.
    #[default]
    Auto,
    Sparse,
    Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    /// Target order: `f` through degree `2K`, `χ` through `2K − 1`.
    #[serde(rename = "K")]
    pub k_max: usize,
    pub f0: f64,
    pub gauge_a: Vec<f64>,
    /// Defaults to `1e-10` at binary64 and `1e-25` at extended precision.
    pub divisor_floor: Option<f64>,
    pub precision: Precision,
    pub gauge_rule: String,
    #[serde(default)]
    pub engine: EngineKind,
}

impl SolverConfig {
    pub fn new(n: usize, k_max: usize) -> Self {
        SolverConfig {
            n,
            k_max,
            f0: -0.5,
            gauge_a: vec![1.0; n],
            divisor_floor: None,
            precision: Precision::F64,
            gauge_rule: "zero".into(),
            engine: EngineKind::Auto,
        }
    }

    pub fn with_precision(mut self, p: Precision) -> Self {
        self.precision = p;
        self
    }

    pub fn with_gauge(mut self, a: Vec<f64>) -> Self {
        self.gauge_a = a;
        self
    }

    pub fn with_engine(mut self, e: EngineKind) -> Self {
        self.engine = e;
        self
    }

    pub fn effective_floor(&self) -> f64 {
        self.divisor_floor.unwrap_or(match self.precision {
            Precision::F64 => 1e-10,
            Precision::Ext => 1e-25,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::invalid("n", "dimension must be at least 1"));
        }
        if self.k_max == 0 {
            return Err(Error::invalid("K", "target order must be at least 1"));
        }
        if !(self.f0 < 0.0 && self.f0.is_finite()) {
            return Err(Error::invalid("f0", format!("f0 = {} must be a finite negative number", self.f0)));
        }
        if self.gauge_a.len() != self.n {
            return Err(Error::invalid(
                "gauge_a",
                format!("expected {} gauge constants, got {}", self.n, self.gauge_a.len()),
            ));
        }
        if let Some(a) = self.gauge_a.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(Error::invalid("gauge_a", format!("gauge constant {a} must be positive")));
        }
        if let Some(fl) = self.divisor_floor {
            if !(fl > 0.0 && fl.is_finite()) {
                return Err(Error::invalid("divisor_floor", format!("{fl} must be positive")));
            }
        }
        if self.gauge_rule != "zero" {
            return Err(Error::invalid(
                "gauge_rule",
                format!("only the \"zero\" gauge rule is supported, got {:?}", self.gauge_rule),
            ));
        }
        if self.engine == EngineKind::Grid && self.n != 1 {
            return Err(Error::invalid("engine", "the grid engine handles n = 1 only"));
        }
        Ok(())
    }
}

/// Per-order diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderDiagnostics {
    pub k: usize,
    /// Largest relative imaginary part met while reading `F`.
    pub f_imag: f64,
    /// Order 1 only: closed form versus the averaged-chord reading of `F_{e_j}`.
    pub init_mismatch: f64,
    /// Largest gauge-monomial coefficient of the residual, relative to the
    /// largest product summed into it.
    pub resonant_residual: f64,
    /// Largest parity-violating coefficient, relative to `residual_scale`.
    pub parity_residual: f64,
    /// Largest residual coefficient before the solve.
    pub residual_scale: f64,
    /// Largest residual coefficient after the solve (absolute).
    pub post_residual: f64,
    /// Largest diagonal coefficient of `⟨L⟩` at degree `2k` after the solve.
    pub average_residual: f64,
    pub min_divisor: Option<f64>,
}

impl OrderDiagnostics {
    pub(crate) fn new(k: usize) -> Self {
        OrderDiagnostics {
            k,
            f_imag: 0.0,
            init_mismatch: 0.0,
            resonant_residual: 0.0,
            parity_residual: 0.0,
            residual_scale: 0.0,
            post_residual: 0.0,
            average_residual: 0.0,
            min_divisor: None,
        }
    }
}

/// Solves in the configured precision and returns binary64 coefficients.
pub fn solve(config: &SolverConfig, fv: &FrequencyVector) -> Result<SolutionState<f64>> {
    match config.precision {
        Precision::F64 => solve_in::<f64>(config, fv),
        Precision::Ext => Ok(solve_in::<DoubleDouble>(config, fv)?.cast()),
    }
}

/// Solves with coefficients in `T`, whatever `config.precision` says.
pub fn solve_in<T: Real>(config: &SolverConfig, fv: &FrequencyVector) -> Result<SolutionState<T>> {
    solve_with_progress(config, fv, |_| {})
}

pub fn solve_with_progress<T: Real>(
    config: &SolverConfig,
    fv: &FrequencyVector,
    progress: impl FnMut(&OrderDiagnostics),
) -> Result<SolutionState<T>> {
    config.validate()?;
    if fv.n() != config.n {
        return Err(Error::invalid(
            "n",
            format!("n = {} but {} frequencies were given", config.n, fv.n()),
        ));
    }
    let turns: Vec<T> = fv.turns_in();
    let input = EngineInput {
        n: config.n,
        k_max: config.k_max,
        f0: T::from_f64(config.f0),
        gauge: config.gauge_a.iter().map(|&a| T::from_f64(a)).collect(),
        turns: turns.clone(),
        divisor_floor: config.effective_floor(),
    };
    let max_degree = 2 * config.k_max as u32;
    let grid = match config.engine {
        EngineKind::Auto => config.n == 1,
        EngineKind::Grid => true,
        EngineKind::Sparse => false,
    };
    let out = if grid {
        let alg = GridBlocks::new(turns[0], max_degree, T::from_f64(GRID_RADIUS));
        run(&alg, input, progress)?
    } else {
        let alg = SparseBlocks::new(&turns, max_degree)?;
        run(&alg, input, progress)?
    };
    Ok(SolutionState::from_engine(config.clone(), fv.clone(), out))
}

fn run<T: Real, A: BlockAlgebra<T>>(
    alg: &A,
    input: EngineInput<T>,
    progress: impl FnMut(&OrderDiagnostics),
) -> Result<engine::EngineOutput<T>> {
    Engine::new(alg, input).run(progress)
}

/// Re-assembles the degree-1 part of the explicit equation and the degree-2
/// part of the averaged chord length from the stored order-1 data.
pub fn degree2_sanity<T: Real>(state: &SolutionState<T>) -> Result<f64> {
    let r = reference::assemble(state, 2)?;
    let mut worst = 0.0f64;
    for e in &r.explicit {
        worst = worst.max(e.homogeneous_part(1).max_abs_coeff());
    }
    worst = worst.max(r.average_excess().homogeneous_part(2).max_abs_coeff());
    if worst > DEGREE2_TOL {
        return Err(Error::Consistency(format!(
            "order-1 cancellation fails: residual {worst:.3e} exceeds {DEGREE2_TOL:e}"
        )));
    }
    Ok(worst)
}
