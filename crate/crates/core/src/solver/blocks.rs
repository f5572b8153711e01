//! Homogeneous blocks in the `(z, z̄)` variables and the operations the
//! incremental solver needs on them.

use num_complex::Complex;
use num_traits::Zero;

use crate::error::Result;
use crate::scalar::Real;
use crate::series::{Key, KeyMap, Layout, TruncatedSeries};

/// Storage for homogeneous forms of a fixed degree. All scalars passed in are
/// real; the solver never needs complex scaling of a whole block.
pub(crate) trait BlockAlgebra<T: Real>: Sync {
    type Block: Clone + Send + Sync;
    type Acc;

    fn start(&self, degree: u32) -> Self::Acc;
    /// `acc += c·a·b`.
    fn add_product(&self, acc: &mut Self::Acc, c: T, a: &Self::Block, b: &Self::Block);
    /// `acc += c·a`.
    fn add_scaled(&self, acc: &mut Self::Acc, c: T, a: &Self::Block);
    fn finish(&self, acc: Self::Acc) -> Self::Block;

    fn constant(&self, c: T) -> Self::Block;
    /// `(ρ^{-1})^* a` and `ρ^* a`.
    fn rotate_pm(&self, a: &Self::Block, degree: u32) -> (Self::Block, Self::Block);
    /// `ρ^* a`.
    fn rotate_plus(&self, a: &Self::Block, degree: u32) -> Self::Block {
        self.rotate_pm(a, degree).1
    }

    /// Every monomial of the block as `(exponents in 2n variables, coefficient)`.
    fn coefficients(&self, a: &Self::Block, degree: u32) -> Vec<(Vec<u32>, Complex<T>)>;
    /// Coefficients of `(z z̄)^s`, keyed by `s`.
    fn diagonal(&self, a: &Self::Block, degree: u32) -> Vec<(Vec<u32>, Complex<T>)>;
    fn from_coefficients(&self, degree: u32, coeffs: &[(Vec<u32>, Complex<T>)]) -> Self::Block;
    /// False when a block has left the safely representable range.
    fn in_range(&self, _a: &Self::Block) -> bool {
        true
    }
    /// Natural log of a submultiplicative norm bounding every coefficient.
    fn log_norm(&self, a: &Self::Block, degree: u32) -> f64;
}

/// Sparse blocks: sorted `(key, coefficient)` lists.
pub(crate) struct SparseBlocks<T: Real> {
    layout: Layout,
    n: usize,
    /// `phase[j][q]` is `λ_j^q` for `q` in `-D..=D`, stored at `q + D`.
    phase: Vec<Vec<Complex<T>>>,
    max_degree: i64,
}

impl<T: Real> SparseBlocks<T> {
    pub fn new(turns: &[T], max_degree: u32) -> Result<Self> {
        let n = turns.len();
        let d = max_degree as i64;
        let phase = turns
            .iter()
            .map(|&t| {
                (-d..=d)
                    .map(|q| T::unit_from_turns(T::from_i64(q) * t))
                    .collect()
            })
            .collect();
        Ok(SparseBlocks {
            layout: Layout::new(2 * n, max_degree)?,
            n,
            phase,
            max_degree: d,
        })
    }

    fn rotate(&self, a: &[(Key, Complex<T>)], p: i64) -> Vec<(Key, Complex<T>)> {
        a.iter()
            .map(|&(k, c)| {
                let mut v = c;
                for j in 0..self.n {
                    let m = self.layout.exponent(k, j) as i64
                        - self.layout.exponent(k, self.n + j) as i64;
                    if m != 0 {
                        v = v * self.phase[j][(p * m + self.max_degree) as usize];
                    }
                }
                (k, v)
            })
            .collect()
    }
}

impl<T: Real> BlockAlgebra<T> for SparseBlocks<T> {
    type Block = Vec<(Key, Complex<T>)>;
    type Acc = KeyMap<Complex<T>>;

    fn start(&self, _degree: u32) -> Self::Acc {
        KeyMap::default()
    }

    fn add_product(&self, acc: &mut Self::Acc, c: T, a: &Self::Block, b: &Self::Block) {
        for &(ka, ca) in a {
            let ca = ca * c;
            for &(kb, cb) in b {
                let e = acc.entry(ka + kb).or_insert_with(Complex::zero);
                *e = *e + ca * cb;
            }
        }
    }

    fn add_scaled(&self, acc: &mut Self::Acc, c: T, a: &Self::Block) {
        for &(k, v) in a {
            let e = acc.entry(k).or_insert_with(Complex::zero);
            *e = *e + v * c;
        }
    }

    fn finish(&self, acc: Self::Acc) -> Self::Block {
        TruncatedSeries::from_map(self.layout, acc).raw_terms().to_vec()
    }

    fn constant(&self, c: T) -> Self::Block {
        vec![(0, Complex::new(c, T::zero()))]
    }

    fn rotate_pm(&self, a: &Self::Block, _degree: u32) -> (Self::Block, Self::Block) {
        (self.rotate(a, -1), self.rotate(a, 1))
    }

    fn rotate_plus(&self, a: &Self::Block, _degree: u32) -> Self::Block {
        self.rotate(a, 1)
    }

    fn coefficients(&self, a: &Self::Block, _degree: u32) -> Vec<(Vec<u32>, Complex<T>)> {
        a.iter()
            .map(|&(k, c)| (self.layout.unpack(k).into_vec(), c))
            .collect()
    }

    fn diagonal(&self, a: &Self::Block, _degree: u32) -> Vec<(Vec<u32>, Complex<T>)> {
        a.iter()
            .filter_map(|&(k, c)| {
                let s: Vec<u32> = (0..self.n).map(|j| self.layout.exponent(k, j)).collect();
                let diag = (0..self.n).all(|j| self.layout.exponent(k, self.n + j) == s[j]);
                diag.then_some((s, c))
            })
            .collect()
    }

    fn from_coefficients(&self, _degree: u32, coeffs: &[(Vec<u32>, Complex<T>)]) -> Self::Block {
        let mut acc = KeyMap::default();
        for (e, c) in coeffs {
            let v = acc.entry(self.layout.pack(e)).or_insert_with(Complex::zero);
            *v = *v + *c;
        }
        self.finish(acc)
    }

    fn log_norm(&self, a: &Self::Block, _degree: u32) -> f64 {
        a.iter().map(|x| crate::scalar::cabs(x.1).to_f64()).sum::<f64>().ln()
    }
}
