//! Exponent vectors and their packed `u128` keys.
//!
//! A key stores the total degree in the top 16 bits followed by one fixed-width
//! field per variable, variable 0 most significant. Integer order on keys is
//! therefore graded-lexicographic order on exponent vectors, and adding two
//! keys multiplies the corresponding monomials as long as no field overflows.

use std::fmt;
use std::hash::{BuildHasherDefault, Hasher};

use crate::error::{Error, Result};

pub(crate) type Key = u128;

const DEGREE_SHIFT: u32 = 112;

/// Exponent vector of a monomial in `m` commuting variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(exponents: Vec<u32>) -> Self {
        MultiIndex(exponents)
    }

    pub fn zeros(m: usize) -> Self {
        MultiIndex(vec![0; m])
    }

    /// Unit vector `e_j` in `m` variables.
    pub fn unit(m: usize, j: usize) -> Self {
        let mut e = vec![0; m];
        e[j] = 1;
        MultiIndex(e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u32> {
        self.0
    }
}

impl std::ops::Index<usize> for MultiIndex {
    type Output = u32;
    fn index(&self, i: usize) -> &u32 {
        &self.0[i]
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        MultiIndex(v)
    }
}

/// Every exponent vector of total degree `d` in `m` variables, graded-lex order.
pub fn indices_of_degree(m: usize, d: u32) -> Vec<MultiIndex> {
    fn rec(m: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
        if prefix.len() + 1 == m {
            prefix.push(left);
            out.push(MultiIndex(prefix.clone()));
            prefix.pop();
            return;
        }
        for e in 0..=left {
            prefix.push(e);
            rec(m, left - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m == 0 {
        if d == 0 {
            out.push(MultiIndex(vec![]));
        }
        return out;
    }
    rec(m, d, &mut Vec::with_capacity(m), &mut out);
    out
}

/// Packing scheme shared by all series with the same variable count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Layout {
    pub num_vars: usize,
    pub trunc_degree: u32,
    width: u32,
}

impl Layout {
    pub fn new(num_vars: usize, trunc_degree: u32) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::Structural("a series needs at least one variable".into()));
        }
        if num_vars > 56 {
            return Err(Error::Structural(format!(
                "{num_vars} variables exceed the packed-key capacity (56)"
            )));
        }
        let width = (DEGREE_SHIFT / num_vars as u32).min(32);
        let max_exponent = if width >= 32 { u32::MAX } else { (1u32 << width) - 1 };
        if trunc_degree > max_exponent || trunc_degree > u16::MAX as u32 {
            return Err(Error::Structural(format!(
                "truncation degree {trunc_degree} too large for {num_vars} variables"
            )));
        }
        Ok(Layout {
            num_vars,
            trunc_degree,
            width,
        })
    }

    #[inline]
    fn shift(&self, var: usize) -> u32 {
        (self.num_vars - 1 - var) as u32 * self.width
    }

    pub fn pack(&self, exps: &[u32]) -> Key {
        debug_assert_eq!(exps.len(), self.num_vars);
        let mut key: Key = 0;
        let mut deg: u32 = 0;
        for (i, &e) in exps.iter().enumerate() {
            key |= (e as Key) << self.shift(i);
            deg += e;
        }
        key | ((deg as Key) << DEGREE_SHIFT)
    }

    #[inline]
    pub fn degree(key: Key) -> u32 {
        (key >> DEGREE_SHIFT) as u32
    }

    #[inline]
    pub fn exponent(&self, key: Key, var: usize) -> u32 {
        let mask: Key = if self.width >= 32 {
            u32::MAX as Key
        } else {
            (1 << self.width) - 1
        };
        ((key >> self.shift(var)) & mask) as u32
    }

    pub fn unpack(&self, key: Key) -> MultiIndex {
        MultiIndex((0..self.num_vars).map(|v| self.exponent(key, v)).collect())
    }

    /// Key of `x_var` (degree one).
    #[inline]
    pub fn unit_key(&self, var: usize) -> Key {
        (1 << self.shift(var)) | (1 << DEGREE_SHIFT)
    }
}

/// splitmix64 finaliser over both halves of a key.
#[derive(Default)]
pub(crate) struct KeyHasher(u64);

impl Hasher for KeyHasher {
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100_0000_01b3);
        }
    }

    #[inline]
    fn write_u128(&mut self, v: u128) {
        let mut x = (v as u64) ^ ((v >> 64) as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15);
        x ^= x >> 30;
        x = x.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 27;
        x = x.wrapping_mul(0x94d0_49bb_1331_11eb);
        x ^= x >> 31;
        self.0 = x;
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

pub(crate) type KeyMap<V> = std::collections::HashMap<Key, V, BuildHasherDefault<KeyHasher>>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_order_is_graded_lex() {
        let l = Layout::new(3, 10).unwrap();
        let a = l.pack(&[0, 0, 2]);
        let b = l.pack(&[0, 1, 1]);
        let c = l.pack(&[1, 0, 0]);
        let d = l.pack(&[2, 0, 0]);
        assert!(c < a && a < b && b < d);
    }

    #[test]
    fn key_addition_multiplies_monomials() {
        let l = Layout::new(4, 30).unwrap();
        let a = l.pack(&[1, 2, 0, 3]);
        let b = l.pack(&[4, 0, 5, 1]);
        assert_eq!(l.unpack(a + b).exponents(), &[5, 2, 5, 4]);
        assert_eq!(Layout::degree(a + b), 16);
        assert_eq!(l.unit_key(2), l.pack(&[0, 0, 1, 0]));
    }

    #[test]
    fn enumerates_degree_shell() {
        let v = indices_of_degree(3, 2);
        assert_eq!(v.len(), 6);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
        assert!(v.iter().all(|i| i.degree() == 2));
    }

    #[test]
    fn rejects_oversized_degree() {
        assert!(Layout::new(16, 200).is_err());
        assert!(Layout::new(2, 400).is_ok());
    }
}
