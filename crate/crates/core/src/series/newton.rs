//! Reciprocal and square root by Newton iteration with precision doubling.
//!
//! Each step works at truncation `p`, then the next at `min(2p, D)`. The
//! square root goes through the inverse square root so that no division is
//! needed inside the loop.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::TruncatedSeries;
use crate::error::{Error, Result};
use crate::scalar::{cabs, Real};

impl<T: Real> TruncatedSeries<T> {
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::Domain("reciprocal of a series with zero constant term".into()));
        }
        let d = self.trunc_degree();
        let one = Self::constant(self.num_vars(), d, Complex::one())?;
        let mut w = Self::constant(self.num_vars(), 0, c0.inv())?;
        let mut p = 0;
        while p < d {
            p = (2 * p).clamp(1, d);
            let g = self.with_trunc_degree(p)?;
            let w_p = w.with_trunc_degree(p)?;
            // w <- w (2 - g w)
            let e = one.with_trunc_degree(p)?.sub(&g.mul(&w_p)?)?;
            w = w_p.add(&w_p.mul(&e)?)?;
        }
        w.with_trunc_degree(d)
    }

    /// Inverse square root; the constant term must be real and positive.
    pub fn inv_sqrt(&self) -> Result<Self> {
        let c0 = positive_constant(self)?;
        let d = self.trunc_degree();
        let half = T::from_f64(0.5);
        let mut y = Self::constant(self.num_vars(), 0, Complex::new(T::one() / c0.sqrt(), T::zero()))?;
        let mut p = 0;
        while p < d {
            p = (2 * p).clamp(1, d);
            let g = self.with_trunc_degree(p)?;
            let y_p = y.with_trunc_degree(p)?;
            // y <- y + y (1 - g y^2) / 2
            let one = Self::constant(self.num_vars(), p, Complex::one())?;
            let e = one.sub(&g.mul(&y_p.mul(&y_p)?)?)?;
            y = y_p.add(&y_p.mul(&e)?.scale_real(half))?;
        }
        y.with_trunc_degree(d)
    }

    pub fn sqrt_series(&self) -> Result<Self> {
        self.mul(&self.inv_sqrt()?)
    }
}

fn positive_constant<T: Real>(g: &TruncatedSeries<T>) -> Result<T> {
    let c0 = g.constant_term();
    let tol = T::from_f64(1e-14) * cabs(c0);
    if c0.re <= T::zero() || c0.im.abs() > tol {
        return Err(Error::Domain(format!(
            "square root needs a positive real constant term, got {}{:+}i",
            c0.re.to_f64(),
            c0.im.to_f64()
        )));
    }
    Ok(c0.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::DoubleDouble;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    #[test]
    fn binomial_square_root() {
        let g = TruncatedSeries::from_terms(2, 4, [(vec![0, 0], c(1.0)), (vec![1, 1], c(1.0))])
            .unwrap();
        let h = g.sqrt_series().unwrap();
        let want = TruncatedSeries::from_terms(
            2,
            4,
            [(vec![0, 0], c(1.0)), (vec![1, 1], c(0.5)), (vec![2, 2], c(-0.125))],
        )
        .unwrap();
        assert!(h.sub(&want).unwrap().max_abs_coeff() < 1e-16);
    }

    #[test]
    fn chord_at_origin() {
        let f0 = -0.5;
        let g = TruncatedSeries::constant(2, 6, c(4.0 * f0 * f0)).unwrap();
        assert_eq!(g.sqrt_series().unwrap().constant_term(), c(1.0));
    }

    #[test]
    fn nonpositive_constant_rejected() {
        let g = TruncatedSeries::constant(2, 3, c(-1.0)).unwrap();
        assert!(matches!(g.sqrt_series(), Err(Error::Domain(_))));
        let z = TruncatedSeries::monomial(2, 3, &[1, 0], c(1.0)).unwrap();
        assert!(matches!(z.sqrt_series(), Err(Error::Domain(_))));
        assert!(matches!(z.reciprocal(), Err(Error::Domain(_))));
        let i = TruncatedSeries::constant(2, 3, Complex::new(1.0, 1.0)).unwrap();
        assert!(i.sqrt_series().is_err());
        assert!(i.reciprocal().is_ok());
    }

    #[test]
    fn reciprocal_of_geometric() {
        // 1/(1 - x) = 1 + x + ... + x^7
        let g = TruncatedSeries::from_terms(1, 7, [(vec![0], c(1.0)), (vec![1], c(-1.0))])
            .unwrap();
        let w = g.reciprocal().unwrap();
        for e in 0..=7 {
            assert!((w.coeff(&[e]) - c(1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn extended_precision_square_root() {
        let one = Complex::new(DoubleDouble::from(1.0), DoubleDouble::from(0.0));
        let g = TruncatedSeries::from_terms(
            2,
            6,
            [(vec![0, 0], one.scale(DoubleDouble::from(2.0))), (vec![1, 1], one)],
        )
        .unwrap();
        let h = g.sqrt_series().unwrap();
        let r = h.mul(&h).unwrap().sub(&g).unwrap();
        assert!(r.max_abs_coeff() < 1e-30);
    }
}
