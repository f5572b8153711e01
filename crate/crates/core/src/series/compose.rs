use num_complex::Complex;
use num_traits::Zero;

use super::{Key, Layout, TruncatedSeries};
use crate::error::{Error, Result};
use crate::scalar::Real;

impl<T: Real> TruncatedSeries<T> {
    /// Composition `f(χ_1, …, χ_n)` where `self` is `f` in `n` variables and
    /// every `χ_j` shares one layout. Nested Horner in the variables of `f`.
    pub fn substitute(&self, chi: &[TruncatedSeries<T>]) -> Result<TruncatedSeries<T>> {
        if chi.len() != self.num_vars() {
            return Err(Error::Structural(format!(
                "substituting {} series into a {}-variable polynomial",
                chi.len(),
                self.num_vars()
            )));
        }
        let target = chi[0].layout();
        for (j, c) in chi.iter().enumerate() {
            if c.layout() != target {
                return Err(Error::Structural(format!(
                    "substituted series {j} has a different shape from series 0"
                )));
            }
            if !c.constant_term().is_zero() {
                return Err(Error::Domain(format!(
                    "substituted series {j} has a nonzero constant term"
                )));
            }
        }
        let d = target.trunc_degree;
        let terms: Vec<(Vec<u32>, Complex<T>)> = self
            .iter()
            .filter(|(e, _)| e.degree() <= d)
            .map(|(e, c)| (e.into_vec(), c))
            .collect();
        Ok(horner(&terms, 0, chi, target))
    }

    /// Formal partial derivative in variable `var`.
    pub fn partial(&self, var: usize) -> Result<TruncatedSeries<T>> {
        if var >= self.num_vars() {
            return Err(Error::Structural(format!(
                "variable {var} out of range for {} variables",
                self.num_vars()
            )));
        }
        let layout = self.layout();
        let unit = layout.unit_key(var);
        // subtracting the same unit key keeps the graded-lex order
        let terms: Vec<(Key, Complex<T>)> = self
            .raw_terms()
            .iter()
            .filter_map(|&(k, c)| {
                let e = layout.exponent(k, var);
                (e > 0).then(|| (k - unit, c * T::from_f64(e as f64)))
            })
            .collect();
        Ok(Self::from_sorted(layout, terms))
    }
}

/// Σ_e χ_v^e · (terms with exponent e in variable v, recursively substituted).
fn horner<T: Real>(
    terms: &[(Vec<u32>, Complex<T>)],
    v: usize,
    chi: &[TruncatedSeries<T>],
    layout: Layout,
) -> TruncatedSeries<T> {
    let empty = TruncatedSeries::from_sorted(layout, Vec::new());
    if terms.is_empty() {
        return empty;
    }
    if v == chi.len() {
        let c: Complex<T> = terms.iter().map(|t| t.1).fold(Complex::zero(), |a, b| a + b);
        return TruncatedSeries::from_sorted(layout, vec![(0, c)]);
    }
    let top = terms.iter().map(|t| t.0[v]).max().unwrap_or(0);
    let mut groups: Vec<Vec<(Vec<u32>, Complex<T>)>> = vec![Vec::new(); top as usize + 1];
    for t in terms {
        groups[t.0[v] as usize].push(t.clone());
    }
    let mut acc = empty;
    for e in (0..=top as usize).rev() {
        if !acc.is_zero() {
            acc = acc.mul_upto(&chi[v], layout.trunc_degree);
        }
        if !groups[e].is_empty() {
            let inner = horner(&groups[e], v + 1, chi, layout);
            acc = acc.merge(&inner, T::one());
        }
    }
    acc
}
