//! The conjugacy written as collinearity of `C τ₋(χ, f∘χ)` and
//! `I C τ₊(χ, f∘χ)`. Cross-multiplying the components gives equations that
//! are polynomial in `χ`, `f∘χ` and `∂f∘χ`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::series::{Sign, TruncatedSeries, VariableRoles};
use crate::solver::SolutionState;

type S<T> = TruncatedSeries<T>;

/// Left sides of the polynomial equations, one per component.
pub fn polynomial_equations<T: Real>(state: &SolutionState<T>, trunc_degree: u32) -> Result<Vec<S<T>>> {
    let chi = state.chi_series(trunc_degree)?;
    // ∂f at degree d needs the degree d + 1 part of f
    let f = state.f_series(trunc_degree + 1)?;
    polynomial_equations_for(state, &f, &chi, trunc_degree)
}

/// Same, for an arbitrary `(f, χ)` with the frequencies of `state`; `f` is
/// truncated one degree above `χ`.
pub fn polynomial_equations_for<T: Real>(
    state: &SolutionState<T>,
    f: &S<T>,
    chi: &[S<T>],
    trunc_degree: u32,
) -> Result<Vec<S<T>>> {
    let n = state.n();
    if n > 2 {
        return Err(Error::Domain(format!("polynomial equations are written out for n ≤ 2, got n = {n}")));
    }
    let roles = VariableRoles::standard(state.frequencies.lambdas_in::<T>())?;
    let df: Vec<S<T>> = (0..n)
        .map(|j| f.partial(j)?.with_trunc_degree(trunc_degree))
        .collect::<Result<_>>()?;
    let f = f.with_trunc_degree(trunc_degree)?;
    let g = f.substitute(chi)?;
    let gm = g.tau(&roles, Sign::Minus)?;
    let gp = g.tau(&roles, Sign::Plus)?;
    let tm: Vec<S<T>> = chi.iter().map(|c| c.tau(&roles, Sign::Minus)).collect::<Result<_>>()?;
    let tp: Vec<S<T>> = chi.iter().map(|c| c.tau(&roles, Sign::Plus)).collect::<Result<_>>()?;
    let s: Vec<S<T>> = df.iter().map(|d| d.substitute(chi)).collect::<Result<_>>()?;
    let one = S::constant(2 * n, trunc_degree, Complex::new(T::one(), T::zero()))?;
    let two = T::from_f64(2.0);

    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // 2 s_i (τ₋g τ₊g − τ₋χ_i τ₊χ_i) + (1 − s_i²)(τ₋χ_i τ₊g + τ₊χ_i τ₋g)
        let cross = gm.mul(&gp)?.sub(&tm[i].mul(&tp[i])?)?;
        let mut e = s[i].mul(&cross)?.scale_real(two);
        let mixed = tm[i].mul(&gp)?.add(&tp[i].mul(&gm)?)?;
        e = e.add(&one.sub(&s[i].mul(&s[i])?)?.mul(&mixed)?)?;
        for o in (0..n).filter(|&o| o != i) {
            // − s_o (τ₊χ_o τ₋χ_i + τ₋χ_o τ₊χ_i) − s_o s_i (τ₋χ_o τ₊g + τ₊χ_o τ₋g)
            let a = tp[o].mul(&tm[i])?.add(&tm[o].mul(&tp[i])?)?;
            e = e.sub(&s[o].mul(&a)?)?;
            let b = tm[o].mul(&gp)?.add(&tp[o].mul(&gm)?)?;
            e = e.sub(&s[o].mul(&s[i])?.mul(&b)?)?;
        }
        out.push(e);
    }
    Ok(out)
}

/// Largest coefficient of any equation through degree `d`.
pub fn polynomial_equation_residual<T: Real>(state: &SolutionState<T>, d: u32) -> Result<f64> {
    let top = 2 * state.k_max() as u32 - 1;
    if d > top {
        return Err(Error::Domain(format!("degree {d} exceeds the solved degree {top}")));
    }
    let eqs = polynomial_equations(state, d)?;
    Ok(eqs.iter().map(|e| e.max_abs_coeff()).fold(0.0, f64::max))
}
