use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::TruncatedSeries;
use crate::error::Result;
use crate::scalar::Real;

/// Wire form of a series: terms are `[exponents, re, im]` in graded-lex order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub num_vars: usize,
    pub trunc_degree: u32,
    pub terms: Vec<(Vec<u32>, f64, f64)>,
}

impl<T: Real> TruncatedSeries<T> {
    /// Coefficients are rounded to binary64.
    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            num_vars: self.num_vars(),
            trunc_degree: self.trunc_degree(),
            terms: self
                .iter()
                .map(|(e, c)| (e.into_vec(), c.re.to_f64(), c.im.to_f64()))
                .collect(),
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        Self::from_terms(
            j.num_vars,
            j.trunc_degree,
            j.terms
                .iter()
                .map(|(e, re, im)| (e.clone(), Complex::new(T::from_f64(*re), T::from_f64(*im)))),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let g = TruncatedSeries::from_terms(
            3,
            5,
            [
                (vec![0, 2, 1], Complex::new(0.1 + 0.2, -1.0 / 3.0)),
                (vec![1, 0, 0], Complex::new(std::f64::consts::PI, 1e-300)),
                (vec![0, 0, 0], Complex::new(-2.5e-17, 0.0)),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&g.to_json()).unwrap();
        let back: SeriesJson = serde_json::from_str(&text).unwrap();
        let h = TruncatedSeries::<f64>::from_json(&back).unwrap();
        assert_eq!(g, h);
        for ((_, a), (_, b)) in g.iter().zip(h.iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        assert_eq!(back.terms[0].0, vec![0, 0, 0]);
    }
}
