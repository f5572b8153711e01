//! Sparse truncated power series in `m` commuting variables over complex
//! coefficients.
//!
//! Terms are kept in a vector sorted by packed key, so the terms of each total
//! degree form one contiguous bucket. Multiplication walks pairs of buckets and
//! stops as soon as the degree sum passes the truncation degree.

mod compose;
mod index;
mod json;
mod newton;
mod structure;

use std::ops::Range;

use num_complex::Complex;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use index::{indices_of_degree, MultiIndex};
pub(crate) use index::{Key, KeyMap, Layout};
pub use json::SeriesJson;
pub use structure::{Sign, VariableRoles};

/// Coefficients smaller than this in magnitude are dropped.
pub const ZERO_THRESHOLD: f64 = 1e-300;

#[inline]
pub(crate) fn negligible<T: Real>(c: &Complex<T>) -> bool {
    c.re.abs().to_f64() < ZERO_THRESHOLD && c.im.abs().to_f64() < ZERO_THRESHOLD
}

/// Truncated formal power series, canonical sparse form.
#[derive(Clone, Debug)]
pub struct TruncatedSeries<T: Real = f64> {
    layout: Layout,
    terms: Vec<(Key, Complex<T>)>,
}

impl<T: Real> PartialEq for TruncatedSeries<T> {
    fn eq(&self, other: &Self) -> bool {
        self.layout == other.layout && self.terms == other.terms
    }
}

impl<T: Real> TruncatedSeries<T> {
    pub fn zero(num_vars: usize, trunc_degree: u32) -> Result<Self> {
        Ok(TruncatedSeries {
            layout: Layout::new(num_vars, trunc_degree)?,
            terms: Vec::new(),
        })
    }

    pub fn constant(num_vars: usize, trunc_degree: u32, c: Complex<T>) -> Result<Self> {
        let mut s = Self::zero(num_vars, trunc_degree)?;
        if !negligible(&c) {
            s.terms.push((0, c));
        }
        Ok(s)
    }

    pub fn monomial(
        num_vars: usize,
        trunc_degree: u32,
        exponents: &[u32],
        c: Complex<T>,
    ) -> Result<Self> {
        Self::from_terms(num_vars, trunc_degree, [(exponents.to_vec(), c)])
    }

    /// Builds a series from (exponents, coefficient) pairs; repeated exponents
    /// are summed and terms above the truncation degree discarded.
    pub fn from_terms<I, E>(num_vars: usize, trunc_degree: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (E, Complex<T>)>,
        E: AsRef<[u32]>,
    {
        let layout = Layout::new(num_vars, trunc_degree)?;
        let mut map: KeyMap<Complex<T>> = KeyMap::default();
        for (e, c) in terms {
            let e = e.as_ref();
            if e.len() != num_vars {
                return Err(Error::Structural(format!(
                    "exponent vector of length {} in a {}-variable series",
                    e.len(),
                    num_vars
                )));
            }
            if e.iter().sum::<u32>() > trunc_degree {
                continue;
            }
            let k = layout.pack(e);
            let v = map.entry(k).or_insert_with(Complex::zero);
            *v = *v + c;
        }
        Ok(Self::from_map(layout, map))
    }

    pub(crate) fn from_map(layout: Layout, map: KeyMap<Complex<T>>) -> Self {
        let mut terms: Vec<_> = map.into_iter().filter(|(_, c)| !negligible(c)).collect();
        terms.sort_unstable_by_key(|t| t.0);
        TruncatedSeries { layout, terms }
    }

    /// Wraps terms that are already sorted, unique and within the truncation.
    pub(crate) fn from_sorted(layout: Layout, mut terms: Vec<(Key, Complex<T>)>) -> Self {
        terms.retain(|(_, c)| !negligible(c));
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        TruncatedSeries { layout, terms }
    }

    pub(crate) fn layout(&self) -> Layout {
        self.layout
    }

    pub(crate) fn raw_terms(&self) -> &[(Key, Complex<T>)] {
        &self.terms
    }

    pub fn num_vars(&self) -> usize {
        self.layout.num_vars
    }

    pub fn trunc_degree(&self) -> u32 {
        self.layout.trunc_degree
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (MultiIndex, Complex<T>)> + '_ {
        self.terms.iter().map(|&(k, c)| (self.layout.unpack(k), c))
    }

    pub fn coeff(&self, exponents: &[u32]) -> Complex<T> {
        if exponents.len() != self.num_vars() || exponents.iter().sum::<u32>() > self.trunc_degree()
        {
            return Complex::zero();
        }
        let key = self.layout.pack(exponents);
        match self.terms.binary_search_by_key(&key, |t| t.0) {
            Ok(i) => self.terms[i].1,
            Err(_) => Complex::zero(),
        }
    }

    pub fn constant_term(&self) -> Complex<T> {
        match self.terms.first() {
            Some(&(0, c)) => c,
            _ => Complex::zero(),
        }
    }

    /// Lowest total degree carrying a nonzero coefficient.
    pub fn min_degree(&self) -> Option<u32> {
        self.terms.first().map(|t| Layout::degree(t.0))
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.last().map(|t| Layout::degree(t.0))
    }

    /// Largest coefficient modulus, as `f64`.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| crate::scalar::cabs(*c).to_f64())
            .fold(0.0, f64::max)
    }

    /// Contiguous ranges of `terms` sharing one total degree.
    pub(crate) fn buckets(&self) -> Vec<(u32, Range<usize>)> {
        let mut out: Vec<(u32, Range<usize>)> = Vec::new();
        let mut start = 0;
        while start < self.terms.len() {
            let d = Layout::degree(self.terms[start].0);
            let mut end = start + 1;
            while end < self.terms.len() && Layout::degree(self.terms[end].0) == d {
                end += 1;
            }
            out.push((d, start..end));
            start = end;
        }
        out
    }

    fn check_compatible(&self, other: &Self, op: &str) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::Structural(format!(
                "{op}: ({} vars, degree {}) vs ({} vars, degree {})",
                self.num_vars(),
                self.trunc_degree(),
                other.num_vars(),
                other.trunc_degree()
            )));
        }
        Ok(())
    }

    fn merge(&self, other: &Self, sign: T) -> Self {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i]);
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, b[j].1 * sign));
                j += 1;
            } else {
                out.push((a[i].0, a[i].1 + b[j].1 * sign));
                i += 1;
                j += 1;
            }
        }
        Self::from_sorted(self.layout, out)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "add")?;
        Ok(self.merge(other, T::one()))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "sub")?;
        Ok(self.merge(other, -T::one()))
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        Self::from_sorted(
            self.layout,
            self.terms.iter().map(|&(k, v)| (k, v * c)).collect(),
        )
    }

    pub fn scale_real(&self, c: T) -> Self {
        self.scale(Complex::new(c, T::zero()))
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            layout: self.layout,
            terms: self.terms.iter().map(|&(k, v)| (k, -v)).collect(),
        }
    }

    /// Truncated product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other, "mul")?;
        Ok(self.mul_upto(other, self.trunc_degree()))
    }

    /// Product keeping terms of degree at most `max_degree`, returned with the
    /// receiver's truncation degree.
    pub(crate) fn mul_upto(&self, other: &Self, max_degree: u32) -> Self {
        let ba = self.buckets();
        let bb = other.buckets();
        let mut acc: KeyMap<Complex<T>> = KeyMap::default();
        for (da, ra) in &ba {
            for (db, rb) in &bb {
                if da + db > max_degree {
                    break;
                }
                for &(ka, ca) in &self.terms[ra.clone()] {
                    for &(kb, cb) in &other.terms[rb.clone()] {
                        let e = acc.entry(ka + kb).or_insert_with(Complex::zero);
                        *e = *e + ca * cb;
                    }
                }
            }
        }
        Self::from_map(self.layout, acc)
    }

    /// Terms of total degree exactly `d`.
    pub fn homogeneous_part(&self, d: u32) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|t| Layout::degree(t.0) == d)
            .copied()
            .collect();
        TruncatedSeries {
            layout: self.layout,
            terms,
        }
    }

    /// Same series viewed with a different truncation degree; terms above the
    /// new degree are dropped.
    pub fn with_trunc_degree(&self, trunc_degree: u32) -> Result<Self> {
        let layout = Layout::new(self.num_vars(), trunc_degree)?;
        Ok(TruncatedSeries {
            layout,
            terms: self
                .terms
                .iter()
                .filter(|t| Layout::degree(t.0) <= trunc_degree)
                .copied()
                .collect(),
        })
    }

    /// Applies `f(exponents, coefficient)` to every term.
    pub fn map_terms(&self, mut f: impl FnMut(&MultiIndex, Complex<T>) -> Complex<T>) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(k, c)| (k, f(&self.layout.unpack(k), c)))
            .collect();
        Self::from_sorted(self.layout, terms)
    }

    pub fn filter_terms(&self, mut keep: impl FnMut(&MultiIndex) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|&&(k, _)| keep(&self.layout.unpack(k)))
            .copied()
            .collect();
        TruncatedSeries {
            layout: self.layout,
            terms,
        }
    }

    /// Evaluates the polynomial at a point of `C^m`.
    pub fn evaluate(&self, point: &[Complex<T>]) -> Result<Complex<T>> {
        if point.len() != self.num_vars() {
            return Err(Error::Structural(format!(
                "evaluation point has {} coordinates, series has {} variables",
                point.len(),
                self.num_vars()
            )));
        }
        let d = self.trunc_degree() as usize;
        let powers: Vec<Vec<Complex<T>>> = point
            .iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(d + 1);
                let mut acc = Complex::new(T::one(), T::zero());
                for _ in 0..=d {
                    p.push(acc);
                    acc = acc * x;
                }
                p
            })
            .collect();
        let mut sum = Complex::zero();
        for &(k, c) in &self.terms {
            let mut t = c;
            for (v, pw) in powers.iter().enumerate() {
                let e = self.layout.exponent(k, v) as usize;
                if e > 0 {
                    t = t * pw[e];
                }
            }
            sum = sum + t;
        }
        Ok(sum)
    }

    /// Converts coefficients to another scalar type.
    pub fn cast<U: Real>(&self) -> TruncatedSeries<U> {
        TruncatedSeries::from_sorted(
            self.layout,
            self.terms
                .iter()
                .map(|&(k, c)| {
                    (
                        k,
                        Complex::new(U::from_f64(c.re.to_f64()), U::from_f64(c.im.to_f64())),
                    )
                })
                .collect(),
        )
    }
}
