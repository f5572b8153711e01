use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::SolutionState;

/// Default radius of the ball where a truncated surface is trusted.
pub const DEFAULT_R_MAX: f64 = 0.1;

/// The even polynomial `f(x) = Σ F_{2s} x^{2s}`; the lower sheet is its graph
/// and the upper sheet the graph of `−f`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfacePoly<T: Real = f64> {
    n: usize,
    /// `(s, F_{2s})` with `s = 0` excluded.
    terms: Vec<(Vec<u32>, T)>,
    f0: T,
    r_max: T,
    /// Largest `‖s‖` present, for the power tables.
    top: usize,
}

impl<T: Real> SurfacePoly<T> {
    pub fn new(n: usize, f0: T, terms: Vec<(Vec<u32>, T)>, r_max: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("n", "surface needs at least one horizontal coordinate"));
        }
        if !(f0 < T::zero()) {
            return Err(Error::invalid("f0", "the surface must lie below the horizontal plane at 0"));
        }
        if !(r_max > T::zero()) {
            return Err(Error::invalid("r_max", "must be positive"));
        }
        let mut kept = Vec::with_capacity(terms.len());
        let mut top = 0;
        for (s, v) in terms {
            if s.len() != n {
                return Err(Error::Structural(format!("exponent {s:?} has the wrong length for n = {n}")));
            }
            let k = s.iter().sum::<u32>() as usize;
            if k == 0 || v == T::zero() {
                continue;
            }
            top = top.max(k);
            kept.push((s, v));
        }
        Ok(SurfacePoly { n, terms: kept, f0, r_max, top })
    }

    /// The truncation of `f` stored in a solved state.
    pub fn from_state(state: &SolutionState<T>, r_max: T) -> Result<Self> {
        let terms = state
            .f_forms
            .iter()
            .flat_map(|f| f.coeffs.iter().cloned())
            .collect();
        Self::new(state.n(), state.f0(), terms, r_max)
    }

    /// Lower half of the sphere `|x|² + y² = f0²`, expanded through `|x|^{2k_max}`.
    pub fn sphere(n: usize, f0: T, k_max: usize, r_max: T) -> Result<Self> {
        // −R√(1 − u) = −R Σ c_k u^k with c_0 = 1, c_k = c_{k−1}(2k − 3)/(2k), u = |x|²/R²
        let r = f0.abs();
        let r2 = r * r;
        let mut c = T::one();
        let mut scale = -r;
        let mut terms = Vec::new();
        for k in 1..=k_max {
            c = c * T::from_i64(2 * k as i64 - 3) / T::from_i64(2 * k as i64);
            scale = scale / r2;
            for s in compositions(n, k as u32) {
                terms.push((s.clone(), c * scale * T::from_f64(multinomial(&s))));
            }
        }
        Self::new(n, f0, terms, r_max)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn f0(&self) -> T {
        self.f0
    }

    pub fn r_max(&self) -> T {
        self.r_max
    }

    pub fn terms(&self) -> &[(Vec<u32>, T)] {
        &self.terms
    }

    pub fn check_domain(&self, x: &[T]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Structural(format!(
                "point has {} coordinates, surface has {}",
                x.len(),
                self.n
            )));
        }
        let r = norm(x);
        if x.iter().any(|v| !v.is_finite()) || !(r < self.r_max) {
            return Err(Error::OutOfDomain(format!(
                "|x| = {:.6e} is not below r_max = {}",
                r.to_f64(),
                self.r_max.to_f64()
            )));
        }
        Ok(())
    }

    /// `f(x)` and `∇f(x)`.
    pub fn eval(&self, x: &[T]) -> Result<(T, Vec<T>)> {
        self.check_domain(x)?;
        if self.n == 1 {
            return Ok(self.horner(x[0]));
        }
        // even powers x_i^{2e}
        let sq: Vec<Vec<T>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(self.top + 1);
                let mut acc = T::one();
                for _ in 0..=self.top {
                    p.push(acc);
                    acc = acc * xi * xi;
                }
                p
            })
            .collect();
        let mut value = self.f0;
        let mut grad = vec![T::zero(); self.n];
        for (s, c) in &self.terms {
            let mono: T = s
                .iter()
                .enumerate()
                .fold(*c, |acc, (i, &e)| acc * sq[i][e as usize]);
            value += mono;
            for i in 0..self.n {
                let e = s[i] as usize;
                if e == 0 {
                    continue;
                }
                // ∂_i x_i^{2e} = 2e x_i^{2e−1}
                let mut d = *c * T::from_i64(2 * e as i64) * sq[i][e - 1] * x[i];
                for (l, &el) in s.iter().enumerate() {
                    if l != i {
                        d = d * sq[l][el as usize];
                    }
                }
                grad[i] += d;
            }
        }
        Ok((value, grad))
    }

    fn horner(&self, x: T) -> (T, Vec<T>) {
        let mut coef = vec![T::zero(); self.top + 1];
        coef[0] = self.f0;
        for (s, c) in &self.terms {
            coef[s[0] as usize] += *c;
        }
        let u = x * x;
        let mut v = T::zero();
        for k in (0..=self.top).rev() {
            v = v * u + coef[k];
        }
        // d/dx Σ c_k x^{2k} = 2x Σ k c_k x^{2k−2}
        let mut g = T::zero();
        for k in (1..=self.top).rev() {
            g = g * u + T::from_i64(k as i64) * coef[k];
        }
        (v, vec![T::from_f64(2.0) * x * g])
    }
}

pub(crate) fn norm<T: Real>(v: &[T]) -> T {
    let big = v.iter().fold(T::zero(), |m, x| m.max(x.abs()));
    if big == T::zero() {
        return big;
    }
    let s: T = v.iter().map(|&x| (x / big) * (x / big)).sum();
    big * s.sqrt()
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Exponent vectors of length `n` summing to `k`.
fn compositions(n: usize, k: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in compositions(n - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(s: &[u32]) -> f64 {
    let mut acc = 1.0;
    let mut total = 0u32;
    for &e in s {
        for i in 1..=e {
            total += 1;
            acc = acc * total as f64 / i as f64;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multinomials() {
        assert_eq!(multinomial(&[2, 1]), 3.0);
        assert_eq!(multinomial(&[2, 2]), 6.0);
        assert_eq!(compositions(2, 2), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn horner_matches_power_sums() {
        let sp = SurfacePoly::new(1, -0.5, vec![(vec![1], 0.8), (vec![3], -0.3)], 0.1).unwrap();
        let x = 0.07f64;
        let (v, g) = sp.eval(&[x]).unwrap();
        assert!((v - (-0.5 + 0.8 * x * x - 0.3 * x.powi(6))).abs() < 1e-16);
        assert!((g[0] - (1.6 * x - 1.8 * x.powi(5))).abs() < 1e-16);
    }
}
