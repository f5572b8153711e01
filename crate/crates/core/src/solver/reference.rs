//! Whole-series assembly of the explicit equation and the averaged chord
//! length from stored `(f, χ)`, using only generic series operations. Slow,
//! but it shares nothing with the incremental engine and so serves as its
//! check.

use super::SolutionState;
use crate::error::Result;
use crate::scalar::Real;
use crate::series::{Sign, TruncatedSeries, VariableRoles};

pub struct Assembly<T: Real> {
    /// `E_j`, one per component; vanishes up to the solved degree.
    pub explicit: Vec<TruncatedSeries<T>>,
    /// `⟨L(χ∘ρ^{-1}, χ)⟩`.
    pub average_chord: TruncatedSeries<T>,
    pub l00: T,
}

impl<T: Real> Assembly<T> {
    /// `⟨L⟩ − L(0,0)`.
    pub fn average_excess(&self) -> TruncatedSeries<T> {
        self.average_chord.filter_terms(|e| e.degree() > 0)
    }

    /// Largest diagonal coefficient of `⟨L⟩ − L(0,0)` through `degree`.
    pub fn chord_residual(&self, degree: u32) -> f64 {
        self.average_excess()
            .filter_terms(|e| e.degree() <= degree)
            .max_abs_coeff()
    }
}

pub fn assemble<T: Real>(state: &SolutionState<T>, trunc_degree: u32) -> Result<Assembly<T>> {
    let n = state.n();
    let roles = VariableRoles::standard(state.frequencies.lambdas_in::<T>())?;
    let f = state.f_series(trunc_degree)?;
    let chi = state.chi_series(trunc_degree)?;
    let g = f.substitute(&chi)?;
    let gm = g.tau(&roles, Sign::Minus)?;
    let gp = g.tau(&roles, Sign::Plus)?;
    let tm: Vec<_> = chi.iter().map(|c| c.tau(&roles, Sign::Minus)).collect::<Result<_>>()?;
    let tp: Vec<_> = chi.iter().map(|c| c.tau(&roles, Sign::Plus)).collect::<Result<_>>()?;
    let mut s = gm.mul(&gm)?;
    for t in &tm {
        s = s.add(&t.mul(t)?)?;
    }
    let l = s.sqrt_series()?;
    let w = l.reciprocal()?;
    let wp = w.rotate(&roles, 1)?;
    let mut explicit = Vec::with_capacity(n);
    for j in 0..n {
        let fp = f.partial(j)?.substitute(&chi)?;
        let p = tm[j].add(&gm.mul(&fp)?)?;
        let q = tp[j].add(&gp.mul(&fp)?)?;
        explicit.push(p.mul(&w)?.add(&q.mul(&wp)?)?);
    }
    let l00 = (T::from_f64(2.0) * state.f0()).abs();
    Ok(Assembly {
        explicit,
        average_chord: l.average(&roles)?,
        l00,
    })
}
