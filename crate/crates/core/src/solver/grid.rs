//! One-frequency blocks sampled on a circle.
//!
//! With `n = 1` a homogeneous form of degree `d` in `(z, z̄)` is determined by
//! its restriction to `z = r e^{iθ}`: the monomial `z^{l'} z̄^{l''}` becomes
//! `r^d e^{i(l'−l'')θ}`, and distinct monomials of one degree have distinct
//! harmonics. The forms the solver handles are real on that circle, so a block
//! is `N` real samples, products are pointwise and `ρ^*` is a shift in `θ`
//! carried out on the harmonics. `N > 2D` keeps every product alias-free.
//!
//! The radius `r` keeps samples of high degree inside the exponent range.

use num_complex::Complex;
use num_traits::Zero;

use super::blocks::BlockAlgebra;
use crate::scalar::Real;

pub(crate) struct GridBlocks<T: Real> {
    size: usize,
    radius: T,
    cos: Vec<T>,
    sin: Vec<T>,
    /// `λ^m` for `m` in `0..=D`.
    phase: Vec<Complex<T>>,
}

/// `x · base^d` without forming `base^d`, which may leave the exponent range.
pub(crate) fn mul_pow<T: Real>(x: T, base: T, d: u32) -> T {
    let mut v = x;
    let mut left = d;
    while left > 0 {
        let step = left.min(64);
        let mut p = T::one();
        for _ in 0..step {
            p *= base;
        }
        v *= p;
        left -= step;
    }
    v
}

impl<T: Real> GridBlocks<T> {
    pub fn new(turns: T, max_degree: u32, radius: T) -> Self {
        let size = 2 * max_degree as usize + 2;
        let nn = T::from_f64(size as f64);
        let (cos, sin) = (0..size)
            .map(|q| {
                let w = T::unit_from_turns(T::from_i64(q as i64) / nn);
                (w.re, w.im)
            })
            .unzip();
        let phase = (0..=max_degree as i64)
            .map(|m| T::unit_from_turns(T::from_i64(m) * turns))
            .collect();
        GridBlocks {
            size,
            radius,
            cos,
            sin,
            phase,
        }
    }

    /// `c_m` for `m = d, d−2, …, ≥ 0`, in that order, still scaled by `r^d`.
    fn harmonics(&self, v: &[T], degree: u32) -> Vec<(u32, Complex<T>)> {
        let inv = T::one() / T::from_f64(self.size as f64);
        let mut out = Vec::with_capacity(degree as usize / 2 + 1);
        let mut m = degree as i64;
        while m >= 0 {
            let step = m as usize;
            let (mut re, mut im) = (T::zero(), T::zero());
            let mut idx = 0usize;
            for &x in v {
                re += x * self.cos[idx];
                im -= x * self.sin[idx];
                idx += step;
                if idx >= self.size {
                    idx -= self.size;
                }
            }
            out.push((m as u32, Complex::new(re * inv, im * inv)));
            m -= 2;
        }
        out
    }

    /// Real samples of `Σ_m c_m e^{imθ}` given `c_m` for `m ≥ 0`, the
    /// negative harmonics being the conjugates.
    fn synthesize(&self, harmonics: &[(u32, Complex<T>)]) -> Vec<T> {
        let mut v = vec![T::zero(); self.size];
        let two = T::from_f64(2.0);
        for &(m, c) in harmonics {
            if m == 0 {
                for x in v.iter_mut() {
                    *x += c.re;
                }
                continue;
            }
            let (a, b) = (two * c.re, two * c.im);
            let mut idx = 0usize;
            let step = m as usize;
            for x in v.iter_mut() {
                *x += a * self.cos[idx] - b * self.sin[idx];
                idx += step;
                if idx >= self.size {
                    idx -= self.size;
                }
            }
        }
        v
    }

    fn unscale(&self, c: Complex<T>, degree: u32) -> Complex<T> {
        let inv = T::one() / self.radius;
        Complex::new(mul_pow(c.re, inv, degree), mul_pow(c.im, inv, degree))
    }

    fn rescale(&self, c: Complex<T>, degree: u32) -> Complex<T> {
        Complex::new(mul_pow(c.re, self.radius, degree), mul_pow(c.im, self.radius, degree))
    }
}

impl<T: Real> BlockAlgebra<T> for GridBlocks<T> {
    type Block = Vec<T>;
    type Acc = Vec<T>;

    fn start(&self, _degree: u32) -> Self::Acc {
        vec![T::zero(); self.size]
    }

    #[inline]
    fn add_product(&self, acc: &mut Self::Acc, c: T, a: &Self::Block, b: &Self::Block) {
        for ((o, &x), &y) in acc.iter_mut().zip(a).zip(b) {
            *o += c * x * y;
        }
    }

    #[inline]
    fn add_scaled(&self, acc: &mut Self::Acc, c: T, a: &Self::Block) {
        for (o, &x) in acc.iter_mut().zip(a) {
            *o += c * x;
        }
    }

    fn finish(&self, acc: Self::Acc) -> Self::Block {
        acc
    }

    fn constant(&self, c: T) -> Self::Block {
        vec![c; self.size]
    }

    fn rotate_pm(&self, a: &Self::Block, degree: u32) -> (Self::Block, Self::Block) {
        let h = self.harmonics(a, degree);
        let minus: Vec<_> = h
            .iter()
            .map(|&(m, c)| (m, c * self.phase[m as usize].conj()))
            .collect();
        let plus: Vec<_> = h
            .iter()
            .map(|&(m, c)| (m, c * self.phase[m as usize]))
            .collect();
        (self.synthesize(&minus), self.synthesize(&plus))
    }

    fn rotate_plus(&self, a: &Self::Block, degree: u32) -> Self::Block {
        let plus: Vec<_> = self
            .harmonics(a, degree)
            .into_iter()
            .map(|(m, c)| (m, c * self.phase[m as usize]))
            .collect();
        self.synthesize(&plus)
    }

    fn coefficients(&self, a: &Self::Block, degree: u32) -> Vec<(Vec<u32>, Complex<T>)> {
        let d = degree;
        let mut out = Vec::with_capacity(d as usize + 1);
        for (m, c) in self.harmonics(a, degree) {
            let c = self.unscale(c, degree);
            out.push((vec![(d + m) / 2, (d - m) / 2], c));
            if m > 0 {
                out.push((vec![(d - m) / 2, (d + m) / 2], c.conj()));
            }
        }
        out
    }

    fn diagonal(&self, a: &Self::Block, degree: u32) -> Vec<(Vec<u32>, Complex<T>)> {
        if degree % 2 == 1 {
            return Vec::new();
        }
        let inv = T::one() / T::from_f64(self.size as f64);
        let mean: T = a.iter().copied().sum::<T>() * inv;
        vec![(
            vec![degree / 2],
            self.unscale(Complex::new(mean, T::zero()), degree),
        )]
    }

    fn from_coefficients(&self, degree: u32, coeffs: &[(Vec<u32>, Complex<T>)]) -> Self::Block {
        let half = T::from_f64(0.5);
        let mut h = vec![Complex::zero(); degree as usize + 1];
        // average each harmonic with the conjugate of its mirror
        for (e, c) in coeffs {
            let m = e[0] as i64 - e[1] as i64;
            let c = self.rescale(*c, degree);
            let add = match m.signum() {
                1 => c.scale(half),
                -1 => c.conj().scale(half),
                _ => Complex::new(c.re, T::zero()),
            };
            let slot = &mut h[m.unsigned_abs() as usize];
            *slot = *slot + add;
        }
        let h: Vec<(u32, Complex<T>)> = h
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m as u32, c))
            .collect();
        self.synthesize(&h)
    }

    fn in_range(&self, a: &Self::Block) -> bool {
        let sup = a.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
        sup.is_finite() && (sup == 0.0 || (1e-280..1e280).contains(&sup))
    }

    /// Sup norm on the circle `|z| = 1`.
    fn log_norm(&self, a: &Self::Block, degree: u32) -> f64 {
        let sup = a.iter().map(|x| x.abs().to_f64()).fold(0.0, f64::max);
        sup.ln() - degree as f64 * self.radius.to_f64().ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_round_trip() {
        let g = GridBlocks::new(0.37, 9, 0.3);
        let coeffs = vec![
            (vec![4, 1], Complex::new(1.5, -0.25)),
            (vec![1, 4], Complex::new(1.5, 0.25)),
            (vec![3, 2], Complex::new(-2.0, 1.0)),
            (vec![2, 3], Complex::new(-2.0, -1.0)),
        ];
        let b = g.from_coefficients(5, &coeffs);
        let back = g.coefficients(&b, 5);
        for (e, c) in back {
            let want = coeffs
                .iter()
                .find(|x| x.0 == e)
                .map(|x| x.1)
                .unwrap_or(Complex::zero());
            assert!((c - want).norm() < 1e-12, "{e:?}: {c} vs {want}");
        }
    }

    #[test]
    fn rotation_multiplies_harmonics() {
        let t = 0.213;
        let g = GridBlocks::new(t, 7, 1.0);
        let b = g.from_coefficients(
            3,
            &[(vec![2, 1], Complex::new(1.0, 0.0)), (vec![1, 2], Complex::new(1.0, 0.0))],
        );
        let (minus, plus) = g.rotate_pm(&b, 3);
        let lam = f64::unit_from_turns(t);
        let cp = g.coefficients(&plus, 3);
        let cm = g.coefficients(&minus, 3);
        let at = |v: &[(Vec<u32>, Complex<f64>)], e: &[u32]| v.iter().find(|x| x.0 == e).unwrap().1;
        assert!((at(&cp, &[2, 1]) - lam).norm() < 1e-14);
        assert!((at(&cm, &[2, 1]) - lam.conj()).norm() < 1e-14);
        assert!((at(&cp, &[1, 2]) - lam.conj()).norm() < 1e-14);
    }

    #[test]
    fn pointwise_product_is_series_product() {
        let g = GridBlocks::new(0.3, 6, 0.5);
        // (z + z̄)^2 = z² + 2 z z̄ + z̄²
        let one = Complex::new(1.0, 0.0);
        let lin = g.from_coefficients(1, &[(vec![1, 0], one), (vec![0, 1], one)]);
        let mut acc = g.start(2);
        g.add_product(&mut acc, 1.0, &lin, &lin);
        let sq = g.finish(acc);
        let c = g.coefficients(&sq, 2);
        let get = |e: [u32; 2]| c.iter().find(|x| x.0 == e).unwrap().1.re;
        assert!((get([2, 0]) - 1.0).abs() < 1e-14);
        assert!((get([1, 1]) - 2.0).abs() < 1e-14);
        assert!((get([0, 2]) - 1.0).abs() < 1e-14);
        assert!((g.diagonal(&sq, 2)[0].1.re - 2.0).abs() < 1e-14);
    }

    #[test]
    fn mul_pow_survives_extreme_exponents() {
        let small = mul_pow(1e200, 0.15, 400);
        assert!(small > 1e-131 && small < 1e-129);
        let x = mul_pow(small, 1.0 / 0.15, 400);
        assert!((x / 1e200 - 1.0).abs() < 1e-12);
    }
}
