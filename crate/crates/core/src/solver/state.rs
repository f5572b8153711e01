use std::io::Write;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::engine::EngineOutput;
use super::{OrderDiagnostics, SolverConfig};
use crate::error::Result;
use crate::frequency::FrequencyVector;
use crate::scalar::Real;
use crate::series::TruncatedSeries;

/// `f^(2k) = Σ_{‖s‖=k} F_{2s} x^{2s}`; `coeffs` holds `(s, F_{2s})`.
#[derive(Debug, Clone, PartialEq)]
pub struct FForm<T: Real = f64> {
    pub k: usize,
    pub coeffs: Vec<(Vec<u32>, T)>,
}

/// `χ_j^(degree)`, coefficients keyed by exponents in `(z, z̄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiForm<T: Real = f64> {
    /// 1-based component index.
    pub j: usize,
    pub degree: u32,
    pub coeffs: Vec<(Vec<u32>, Complex<T>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionState<T: Real = f64> {
    pub config: SolverConfig,
    pub frequencies: FrequencyVector,
    pub f_forms: Vec<FForm<T>>,
    pub chi_forms: Vec<ChiForm<T>>,
    pub diagnostics: Vec<OrderDiagnostics>,
}

#[derive(Serialize, Deserialize)]
struct FFormJson {
    k: usize,
    coeffs: Vec<(Vec<u32>, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ChiFormJson {
    j: usize,
    degree: u32,
    coeffs: Vec<(Vec<u32>, f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct StateJson {
    config: SolverConfig,
    frequencies: FrequencyVector,
    f_forms: Vec<FFormJson>,
    chi_forms: Vec<ChiFormJson>,
    diagnostics: Vec<OrderDiagnostics>,
}

impl<T: Real> SolutionState<T> {
    pub(crate) fn from_engine(config: SolverConfig, frequencies: FrequencyVector, out: EngineOutput<T>) -> Self {
        let mut f_forms: Vec<FForm<T>> = (0..=config.k_max)
            .map(|k| FForm { k, coeffs: Vec::new() })
            .collect();
        for (s, v) in out.f {
            let k = s.iter().sum::<u32>() as usize;
            f_forms[k].coeffs.push((s, v));
        }
        for form in &mut f_forms {
            form.coeffs.sort_by(|a, b| b.0.cmp(&a.0));
        }
        let mut chi_forms = Vec::new();
        for (j, per_degree) in out.chi.into_iter().enumerate() {
            for (degree, mut coeffs) in per_degree {
                coeffs.sort_by(|a, b| b.0.cmp(&a.0));
                chi_forms.push(ChiForm { j: j + 1, degree, coeffs });
            }
        }
        SolutionState {
            config,
            frequencies,
            f_forms,
            chi_forms,
            diagnostics: out.diagnostics,
        }
    }

    pub fn n(&self) -> usize {
        self.config.n
    }

    pub fn k_max(&self) -> usize {
        self.config.k_max
    }

    pub fn f0(&self) -> T {
        T::from_f64(self.config.f0)
    }

    /// `F_{2s}`, zero if `s` is beyond the solved order.
    pub fn f_coeff(&self, s: &[u32]) -> T {
        let k = s.iter().sum::<u32>() as usize;
        self.f_forms
            .get(k)
            .and_then(|f| f.coeffs.iter().find(|c| c.0 == s))
            .map(|c| c.1)
            .unwrap_or(T::zero())
    }

    /// `f_{2j}` for `j = 0..=K` when `n = 1`.
    pub fn one_dim_coefficients(&self) -> Vec<T> {
        (0..=self.k_max()).map(|j| self.f_coeff(&[j as u32])).collect()
    }

    /// `f` as a series in `x`, truncated at `trunc_degree`.
    pub fn f_series(&self, trunc_degree: u32) -> Result<TruncatedSeries<T>> {
        let terms = self.f_forms.iter().flat_map(|f| {
            f.coeffs.iter().map(|(s, v)| {
                let e: Vec<u32> = s.iter().map(|x| 2 * x).collect();
                (e, Complex::new(*v, T::zero()))
            })
        });
        let terms: Vec<_> = terms.filter(|(e, _)| e.iter().sum::<u32>() <= trunc_degree).collect();
        TruncatedSeries::from_terms(self.n(), trunc_degree, terms)
    }

    /// `χ_1, …, χ_n` as series in `(z, z̄)`, truncated at `trunc_degree`.
    pub fn chi_series(&self, trunc_degree: u32) -> Result<Vec<TruncatedSeries<T>>> {
        (1..=self.n())
            .map(|j| {
                let terms: Vec<_> = self
                    .chi_forms
                    .iter()
                    .filter(|c| c.j == j && c.degree <= trunc_degree)
                    .flat_map(|c| c.coeffs.iter().cloned())
                    .collect();
                TruncatedSeries::from_terms(2 * self.n(), trunc_degree, terms)
            })
            .collect()
    }

    pub fn cast<U: Real>(&self) -> SolutionState<U> {
        let c = |v: T| U::from_f64(v.to_f64());
        SolutionState {
            config: self.config.clone(),
            frequencies: self.frequencies.clone(),
            f_forms: self
                .f_forms
                .iter()
                .map(|f| FForm {
                    k: f.k,
                    coeffs: f.coeffs.iter().map(|(s, v)| (s.clone(), c(*v))).collect(),
                })
                .collect(),
            chi_forms: self
                .chi_forms
                .iter()
                .map(|f| ChiForm {
                    j: f.j,
                    degree: f.degree,
                    coeffs: f
                        .coeffs
                        .iter()
                        .map(|(e, v)| (e.clone(), Complex::new(c(v.re), c(v.im))))
                        .collect(),
                })
                .collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    fn to_json_struct(&self) -> StateJson {
        StateJson {
            config: self.config.clone(),
            frequencies: self.frequencies.clone(),
            f_forms: self
                .f_forms
                .iter()
                .map(|f| FFormJson {
                    k: f.k,
                    coeffs: f.coeffs.iter().map(|(s, v)| (s.clone(), v.to_f64())).collect(),
                })
                .collect(),
            chi_forms: self
                .chi_forms
                .iter()
                .map(|f| ChiFormJson {
                    j: f.j,
                    degree: f.degree,
                    coeffs: f
                        .coeffs
                        .iter()
                        .map(|(e, v)| (e.clone(), v.re.to_f64(), v.im.to_f64()))
                        .collect(),
                })
                .collect(),
            diagnostics: self.diagnostics.clone(),
        }
    }

    /// JSON document with binary64 coefficients.
    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_struct())?)
    }

    /// CSV of `f`: columns `s1..sn, F`.
    pub fn write_f_csv(&self, mut w: impl Write) -> Result<()> {
        let head: Vec<String> = (1..=self.n()).map(|j| format!("s{j}")).collect();
        writeln!(w, "{},F", head.join(","))?;
        for f in &self.f_forms {
            for (s, v) in &f.coeffs {
                let idx: Vec<String> = s.iter().map(u32::to_string).collect();
                writeln!(w, "{},{:e}", idx.join(","), v.to_f64())?;
            }
        }
        Ok(())
    }
}

impl SolutionState<f64> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: StateJson = serde_json::from_str(s)?;
        Ok(SolutionState {
            config: j.config,
            frequencies: j.frequencies,
            f_forms: j
                .f_forms
                .into_iter()
                .map(|f| FForm { k: f.k, coeffs: f.coeffs })
                .collect(),
            chi_forms: j
                .chi_forms
                .into_iter()
                .map(|f| ChiForm {
                    j: f.j,
                    degree: f.degree,
                    coeffs: f
                        .coeffs
                        .into_iter()
                        .map(|(e, re, im)| (e, Complex::new(re, im)))
                        .collect(),
                })
                .collect(),
            diagnostics: j.diagnostics,
        })
    }
}
