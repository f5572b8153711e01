//! Floating-point scalars used by the series kernel.
//!
//! Everything numeric in the crate is generic over [`Real`], implemented for
//! `f64` and for [`DoubleDouble`], an unevaluated sum of two `f64`s carrying a
//! 106-bit significand. The extended type is used when small divisors eat too
//! many digits of binary64, and by the verifier when truncation residuals fall
//! below the binary64 rounding floor.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{Num, One, Zero};
use serde::{Deserialize, Serialize};

/// Coefficient precision selectable per run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Precision {
    #[default]
    F64,
    Ext,
}

impl Precision {
    pub fn name(self) -> &'static str {
        match self {
            Precision::F64 => "f64",
            Precision::Ext => "ext",
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f64" | "binary64" => Ok(Precision::F64),
            "ext" | "extended" => Ok(Precision::Ext),
            other => Err(format!("unknown precision '{other}' (expected f64 or ext)")),
        }
    }
}

/// Real scalar usable as a series coefficient component.
pub trait Real:
    Copy
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Num
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
{
    /// Unit roundoff of the type, as an `f64`.
    const EPSILON: f64;
    const PRECISION: Precision;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    /// Sine and cosine of `self` (radians).
    fn sin_cos(self) -> (Self, Self);
    fn pi() -> Self;
    fn floor(self) -> Self;

    /// Reads `x` as the decimal number printed by its shortest representation,
    /// so that an input such as `0.3` means exactly 3/10 in wider types.
    fn from_f64_decimal(x: f64) -> Self {
        Self::from_f64(x)
    }

    fn from_i64(n: i64) -> Self {
        Self::from_f64(n as f64)
    }

    fn is_finite(self) -> bool {
        self.to_f64().is_finite()
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    /// `e^{2 pi i t}` for `t` measured in turns.
    fn unit_from_turns(t: Self) -> Complex<Self> {
        let two = Self::from_f64(2.0);
        let t = t - t.floor();
        let (s, c) = (two * Self::pi() * t).sin_cos();
        Complex::new(c, s)
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;
    const PRECISION: Precision = Precision::F64;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sin_cos(self) -> (Self, Self) {
        f64::sin_cos(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn floor(self) -> Self {
        f64::floor(self)
    }
}

/// Modulus of a complex number without requiring `Float`, scaled so that
/// squaring cannot overflow.
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    let (a, b) = (z.re.abs(), z.im.abs());
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == T::zero() {
        return big;
    }
    let q = small / big;
    big * (T::one() + q * q).sqrt()
}

/// Double-double number `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn split(a: f64) -> (f64, f64) {
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl DoubleDouble {
    pub const ZERO: DoubleDouble = DoubleDouble { hi: 0.0, lo: 0.0 };
    pub const ONE: DoubleDouble = DoubleDouble { hi: 1.0, lo: 0.0 };
    pub const PI: DoubleDouble = DoubleDouble {
        hi: std::f64::consts::PI,
        lo: 1.224_646_799_147_353_2e-16,
    };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        DoubleDouble { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    fn mul_f64(self, b: f64) -> Self {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        DoubleDouble { hi, lo }
    }

    /// Taylor series of sin and cos, accurate for |x| below about 0.02.
    fn sin_cos_small(x: Self) -> (Self, Self) {
        let x2 = x * x;
        let mut sin = x;
        let mut cos = DoubleDouble::ONE;
        let mut term_s = x;
        let mut term_c = DoubleDouble::ONE;
        let mut n = 1.0;
        loop {
            term_c = -(term_c * x2) / DoubleDouble::from(n * (n + 1.0));
            term_s = -(term_s * x2) / DoubleDouble::from((n + 1.0) * (n + 2.0));
            cos += term_c;
            sin += term_s;
            n += 2.0;
            if term_s.hi.abs() < 1e-34 && term_c.hi.abs() < 1e-34 {
                break;
            }
        }
        (sin, cos)
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }
}

impl fmt::Debug for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DoubleDouble({:e} + {:e})", self.hi, self.lo)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&(self.hi + self.lo), f)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, b: Self) -> Self {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        DoubleDouble { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        DoubleDouble {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, b: Self) -> Self {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let (hi, lo) = quick_two_sum(p1, p2 + (self.hi * b.lo + self.lo * b.hi));
        DoubleDouble { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        DoubleDouble { hi, lo } + DoubleDouble::from(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, b: Self) -> Self {
        let q = self / b;
        let whole = if q.hi.fract() == 0.0 {
            DoubleDouble::new(q.hi, q.lo.trunc())
        } else {
            DoubleDouble::from(q.hi.trunc())
        };
        self - b * whole
    }
}

macro_rules! assign_op {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr for DoubleDouble {
            #[inline]
            fn $m(&mut self, b: Self) {
                *self = *self $op b;
            }
        }
    };
}
assign_op!(AddAssign, add_assign, +);
assign_op!(SubAssign, sub_assign, -);
assign_op!(MulAssign, mul_assign, *);
assign_op!(DivAssign, div_assign, /);

impl Sum for DoubleDouble {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(DoubleDouble::ZERO, |a, b| a + b)
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        DoubleDouble::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        DoubleDouble::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;

    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(DoubleDouble::from)
    }
}

impl Real for DoubleDouble {
    const EPSILON: f64 = 4.93e-32; // 2^-104
    const PRECISION: Precision = Precision::Ext;

    fn from_f64(x: f64) -> Self {
        DoubleDouble::from(x)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                DoubleDouble::ZERO
            } else {
                DoubleDouble::from(f64::NAN)
            };
        }
        let x = self.hi.sqrt();
        let y = DoubleDouble::from(x);
        let r = (self - y * y).hi * (0.5 / x);
        let (hi, lo) = quick_two_sum(x, r);
        DoubleDouble { hi, lo }
    }

    fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    fn sin_cos(self) -> (Self, Self) {
        // Reduce modulo 2 pi, halve 8 times, then double back up.
        let two_pi = DoubleDouble::PI.mul_f64(2.0);
        let n = (self / two_pi).hi.round();
        let x = self - two_pi.mul_f64(n);
        let (mut s, mut c) = Self::sin_cos_small(x.mul_f64(1.0 / 256.0));
        for _ in 0..8 {
            let s2 = (s * c).mul_f64(2.0);
            c = DoubleDouble::ONE - (s * s).mul_f64(2.0);
            s = s2;
        }
        (s, c)
    }

    fn pi() -> Self {
        DoubleDouble::PI
    }

    fn floor(self) -> Self {
        let hi = self.hi.floor();
        if hi == self.hi {
            DoubleDouble::new(hi, self.lo.floor())
        } else {
            DoubleDouble::from(hi)
        }
    }

    fn from_f64_decimal(x: f64) -> Self {
        if !x.is_finite() || x == 0.0 {
            return DoubleDouble::from(x);
        }
        let text = format!("{}", x.abs());
        let (int_part, frac_part) = text.split_once('.').unwrap_or((&text, ""));
        let digits = format!("{int_part}{frac_part}");
        let Ok(mantissa) = digits.parse::<u128>() else {
            return DoubleDouble::from(x);
        };
        let hi = mantissa as f64;
        let lo = (mantissa as i128 - hi as i128) as f64;
        let mut v = DoubleDouble::new(hi, lo);
        let mut scale = frac_part.len() as i32;
        while scale > 0 {
            let step = scale.min(22);
            v /= DoubleDouble::from(10f64.powi(step));
            scale -= step;
        }
        if x < 0.0 {
            -v
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_double_arithmetic_carries_extra_bits() {
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0) - DoubleDouble::ONE;
        assert!(back.to_f64().abs() < 1e-31);
        let tiny = DoubleDouble::ONE + DoubleDouble::from(1e-20);
        assert_eq!((tiny - DoubleDouble::ONE).to_f64(), 1e-20);
    }

    #[test]
    fn double_double_sqrt_squares_back() {
        let two = DoubleDouble::from(2.0);
        let r = two.sqrt();
        assert!((r * r - two).to_f64().abs() < 1e-31);
    }

    #[test]
    fn double_double_sin_cos_matches_identities() {
        for &x in &[0.1, 1.0, 2.5, -3.0, 7.0, 100.0] {
            let (s, c) = DoubleDouble::from(x).sin_cos();
            let unit = s * s + c * c - DoubleDouble::ONE;
            assert!(unit.to_f64().abs() < 1e-30, "x={x}");
            assert!((s.to_f64() - x.sin()).abs() < 1e-14);
            assert!((c.to_f64() - x.cos()).abs() < 1e-14);
        }
        // sin(pi/6) = 1/2 to double-double accuracy
        let (s, _) = (DoubleDouble::PI / DoubleDouble::from(6.0)).sin_cos();
        assert!((s - DoubleDouble::from(0.5)).to_f64().abs() < 1e-30);
    }

    #[test]
    fn decimal_reading_is_exact() {
        let t = DoubleDouble::from_f64_decimal(0.3);
        let r = t * DoubleDouble::from(10.0) - DoubleDouble::from(3.0);
        assert!(r.to_f64().abs() < 1e-31);
        assert!((DoubleDouble::from_f64_decimal(-1.25e-3).to_f64() + 1.25e-3).abs() < 1e-20);
        assert_eq!(DoubleDouble::from(2.5).floor().to_f64(), 2.0);
        assert_eq!(DoubleDouble::new(3.0, -1e-20).floor().to_f64(), 2.0);
    }

    #[test]
    fn unit_from_turns_quarter_is_i() {
        let z = f64::unit_from_turns(0.25);
        assert!((z.re).abs() < 1e-16 && (z.im - 1.0).abs() < 1e-16);
        let w = DoubleDouble::unit_from_turns(DoubleDouble::from(0.25));
        assert!(w.re.to_f64().abs() < 1e-31);
    }
}
