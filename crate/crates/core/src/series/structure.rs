//! Rotation-related operators on series written in `(z, z̄)` coordinates.

use num_complex::Complex;
use num_traits::One;

use super::{Key, TruncatedSeries};
use crate::error::{Error, Result};
use crate::scalar::{cabs, Real};

/// Which variables form the conjugate pairs `(z_j, z̄_j)`, and the unit
/// eigenvalue attached to each pair.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableRoles<T: Real = f64> {
    pairing: Vec<(usize, usize)>,
    eigenvalues: Vec<Complex<T>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn power(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl<T: Real> VariableRoles<T> {
    pub fn new(pairing: Vec<(usize, usize)>, eigenvalues: Vec<Complex<T>>) -> Result<Self> {
        if pairing.len() != eigenvalues.len() {
            return Err(Error::Structural(format!(
                "{} pairs but {} eigenvalues",
                pairing.len(),
                eigenvalues.len()
            )));
        }
        let m = 2 * pairing.len();
        let mut seen = vec![false; m];
        for &(a, b) in &pairing {
            for v in [a, b] {
                if v >= m || seen[v] {
                    return Err(Error::Structural(format!(
                        "pairing {pairing:?} is not a perfect matching of {m} variables"
                    )));
                }
                seen[v] = true;
            }
        }
        for (j, l) in eigenvalues.iter().enumerate() {
            let r = cabs(*l).to_f64();
            if (r - 1.0).abs() > 1e-14 {
                return Err(Error::Domain(format!(
                    "eigenvalue {j} has modulus {r}, expected 1"
                )));
            }
        }
        Ok(VariableRoles {
            pairing,
            eigenvalues,
        })
    }

    /// `z_j` is variable `j`, `z̄_j` is variable `n + j`.
    pub fn standard(eigenvalues: Vec<Complex<T>>) -> Result<Self> {
        let n = eigenvalues.len();
        Self::new((0..n).map(|j| (j, n + j)).collect(), eigenvalues)
    }

    pub fn n(&self) -> usize {
        self.pairing.len()
    }

    pub fn num_vars(&self) -> usize {
        2 * self.pairing.len()
    }

    pub fn pairing(&self) -> &[(usize, usize)] {
        &self.pairing
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    /// Harmonic `s' - s''` of a monomial.
    pub fn harmonic(&self, exps: &[u32]) -> Vec<i64> {
        self.pairing
            .iter()
            .map(|&(a, b)| exps[a] as i64 - exps[b] as i64)
            .collect()
    }

    /// `λ^m = Π λ_j^{m_j}`.
    pub fn lambda_pow(&self, m: &[i64]) -> Complex<T> {
        m.iter()
            .zip(&self.eigenvalues)
            .fold(Complex::one(), |acc, (&e, &l)| acc * unit_pow(l, e))
    }

    fn check(&self, g: &TruncatedSeries<T>) -> Result<()> {
        if g.num_vars() != self.num_vars() {
            return Err(Error::Structural(format!(
                "series in {} variables used with {} paired variables",
                g.num_vars(),
                self.num_vars()
            )));
        }
        Ok(())
    }
}

/// Integer power of a unit complex number; negative powers use the conjugate.
pub fn unit_pow<T: Real>(l: Complex<T>, e: i64) -> Complex<T> {
    let base = if e < 0 { l.conj() } else { l };
    let mut n = e.unsigned_abs();
    let mut acc = Complex::one();
    let mut b = base;
    while n > 0 {
        if n & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        n >>= 1;
    }
    acc
}

impl<T: Real> TruncatedSeries<T> {
    /// `(ρ^p)^* g`: the coefficient at `z^{s'} z̄^{s''}` is multiplied by
    /// `λ^{p(s' - s'')}`.
    pub fn rotate(&self, roles: &VariableRoles<T>, p: i64) -> Result<Self> {
        roles.check(self)?;
        if p == 0 {
            return Ok(self.clone());
        }
        let layout = self.layout();
        let d = self.trunc_degree() as i64;
        let span = d * p.abs();
        // powers[j][q + span] = λ_j^q for |q| <= span
        let powers: Vec<Vec<Complex<T>>> = roles
            .eigenvalues
            .iter()
            .map(|&l| (-span..=span).map(|q| unit_pow(l, q)).collect())
            .collect();
        let terms: Vec<(Key, Complex<T>)> = self
            .raw_terms()
            .iter()
            .map(|&(k, c)| {
                let mut f = c;
                for (j, &(a, b)) in roles.pairing.iter().enumerate() {
                    let m = layout.exponent(k, a) as i64 - layout.exponent(k, b) as i64;
                    if m != 0 {
                        f = f * powers[j][(p * m + span) as usize];
                    }
                }
                (k, f)
            })
            .collect();
        Ok(Self::from_sorted(layout, terms))
    }

    /// Pullback by `(z, z̄) ↦ (-z, -z̄)`: degree-`d` terms pick up `(-1)^d`.
    pub fn central_symmetry(&self) -> Self {
        let terms = self
            .raw_terms()
            .iter()
            .map(|&(k, c)| {
                if super::Layout::degree(k) % 2 == 1 {
                    (k, -c)
                } else {
                    (k, c)
                }
            })
            .collect();
        Self::from_sorted(self.layout(), terms)
    }

    /// `τ± = id + ι^* ∘ (ρ^{±1})^*`. On odd series this is `g - g∘ρ^{±1}`, on
    /// even series `g + g∘ρ^{±1}`.
    pub fn tau(&self, roles: &VariableRoles<T>, sign: Sign) -> Result<Self> {
        self.add(&self.rotate(roles, sign.power())?.central_symmetry())
    }

    /// Projection onto monomials with `s' = s''` in every pair.
    pub fn average(&self, roles: &VariableRoles<T>) -> Result<Self> {
        roles.check(self)?;
        let layout = self.layout();
        let terms = self
            .raw_terms()
            .iter()
            .filter(|&&(k, _)| is_diagonal(layout, roles, k))
            .copied()
            .collect();
        Ok(Self::from_sorted(layout, terms))
    }

    /// `g - ⟨g⟩`.
    pub fn bracket(&self, roles: &VariableRoles<T>) -> Result<Self> {
        roles.check(self)?;
        let layout = self.layout();
        let terms = self
            .raw_terms()
            .iter()
            .filter(|&&(k, _)| !is_diagonal(layout, roles, k))
            .copied()
            .collect();
        Ok(Self::from_sorted(layout, terms))
    }

    /// Coefficients of `(z z̄)^s` in the series, keyed by `s`.
    pub fn diagonal_coefficients(&self, roles: &VariableRoles<T>) -> Result<Vec<(Vec<u32>, Complex<T>)>> {
        let avg = self.average(roles)?;
        Ok(avg
            .iter()
            .map(|(e, c)| (roles.pairing.iter().map(|&(a, _)| e[a]).collect(), c))
            .collect())
    }

    pub fn is_real_symmetric(&self, roles: &VariableRoles<T>, tol: f64) -> bool {
        // coefficient at (s', s'') must be the conjugate of the one at (s'', s')
        self.iter().all(|(e, c)| {
            let mut swapped = e.exponents().to_vec();
            for &(a, b) in &roles.pairing {
                swapped.swap(a, b);
            }
            let other = self.coeff(&swapped).conj();
            cabs(c - other).to_f64() <= tol * (1.0 + cabs(c).to_f64())
        })
    }
}

fn is_diagonal<T: Real>(layout: super::Layout, roles: &VariableRoles<T>, k: Key) -> bool {
    roles
        .pairing
        .iter()
        .all(|&(a, b)| layout.exponent(k, a) == layout.exponent(k, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TruncatedSeries;

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    fn roles1(turns: f64) -> VariableRoles<f64> {
        VariableRoles::standard(vec![f64::unit_from_turns(turns)]).unwrap()
    }

    #[test]
    fn rotation_of_z_multiplies_by_lambda() {
        let r = roles1(0.13);
        let z = TruncatedSeries::monomial(2, 3, &[1, 0], c(1.0)).unwrap();
        let rz = z.rotate(&r, 1).unwrap();
        assert_eq!(rz.coeff(&[1, 0]), r.eigenvalues()[0]);
    }

    #[test]
    fn diagonal_monomial_is_rotation_invariant() {
        let r = roles1(0.13);
        let g = TruncatedSeries::monomial(2, 4, &[1, 1], c(1.0)).unwrap();
        assert_eq!(g.rotate(&r, 7).unwrap(), g);
    }

    #[test]
    fn central_symmetry_by_parity() {
        let z = TruncatedSeries::monomial(4, 3, &[1, 0, 0, 0], c(1.0)).unwrap();
        assert_eq!(z.central_symmetry(), z.neg());
        let w = TruncatedSeries::monomial(4, 3, &[1, 0, 0, 1], c(1.0)).unwrap();
        assert_eq!(w.central_symmetry(), w);
        let k = TruncatedSeries::constant(4, 3, c(2.0)).unwrap();
        assert_eq!(k.central_symmetry(), k);
    }

    #[test]
    fn tau_minus_of_linear_chi() {
        let r = roles1(0.21);
        let l = r.eigenvalues()[0];
        let a = 0.7;
        let chi = TruncatedSeries::from_terms(2, 3, [(vec![1, 0], c(a)), (vec![0, 1], c(a))])
            .unwrap();
        let t = chi.tau(&r, Sign::Minus).unwrap();
        let one = Complex::new(1.0, 0.0);
        assert!((t.coeff(&[1, 0]) - (one - l.inv()) * a).norm() < 1e-15);
        assert!((t.coeff(&[0, 1]) - (one - l) * a).norm() < 1e-15);
        let k = TruncatedSeries::constant(2, 3, c(1.5)).unwrap();
        assert_eq!(k.tau(&r, Sign::Minus).unwrap().constant_term(), c(3.0));
        let d = TruncatedSeries::monomial(2, 3, &[1, 1], c(1.0)).unwrap();
        assert_eq!(d.tau(&r, Sign::Plus).unwrap().coeff(&[1, 1]), c(2.0));
    }

    #[test]
    fn average_keeps_diagonal_only() {
        let r = roles1(0.3);
        let d = TruncatedSeries::monomial(2, 4, &[2, 2], c(1.0)).unwrap();
        assert_eq!(d.average(&r).unwrap(), d);
        let o = TruncatedSeries::monomial(2, 4, &[3, 1], c(1.0)).unwrap();
        assert!(o.average(&r).unwrap().is_zero());
        assert_eq!(o.bracket(&r).unwrap(), o);
    }

    #[test]
    fn roles_validate_matching_and_modulus() {
        let l = f64::unit_from_turns(0.1);
        assert!(VariableRoles::new(vec![(0, 1), (1, 2)], vec![l, l]).is_err());
        assert!(VariableRoles::new(vec![(0, 1)], vec![l * 1.001]).is_err());
        assert!(VariableRoles::new(vec![(1, 0)], vec![l]).is_ok());
    }

    #[test]
    fn unit_pow_negative_is_conjugate() {
        let l = f64::unit_from_turns(0.37);
        let p = unit_pow(l, -5) * unit_pow(l, 5);
        assert!((p - Complex::one()).norm() < 1e-14);
    }
}
