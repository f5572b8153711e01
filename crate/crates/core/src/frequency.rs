//! Rotation frequencies `λ_j = e^{iα_j}`, given either directly as
//! `α_j/(2π)` or as periodic continued fractions, plus a brute-force scan of
//! the divisors `λ_j + λ_j⁻¹ − λ^m − λ^{−m}`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `[0; q_1, q_2, …]` with an eventually periodic tail.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ContinuedFraction {
    preperiod: Vec<u64>,
    period: Vec<u64>,
}

impl ContinuedFraction {
    pub fn new(preperiod: Vec<u64>, period: Vec<u64>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("continued fraction needs a nonempty period".into()));
        }
        if preperiod.iter().chain(&period).any(|&q| q == 0) {
            return Err(Error::Parse("partial quotients must be positive".into()));
        }
        Ok(ContinuedFraction { preperiod, period })
    }

    pub fn preperiod(&self) -> &[u64] {
        &self.preperiod
    }

    pub fn period(&self) -> &[u64] {
        &self.period
    }

    /// Möbius matrix `(a b; c d)` of `x ↦ [0; p_1, …, p_r + x]` for the period.
    fn period_matrix<T: Real>(&self) -> [T; 4] {
        let one = T::one();
        let zero = T::zero();
        let mut m = [one, zero, zero, one];
        for &q in &self.period {
            // x ↦ 1 / (q + x) is the matrix (0 1; 1 q)
            let q = T::from_f64(q as f64);
            m = [m[1], m[0] + m[1] * q, m[3], m[2] + m[3] * q];
        }
        m
    }

    /// Value of the purely periodic tail: the root in (0, 1) of
    /// `c x² + (d − a) x − b = 0`.
    pub fn tail_value<T: Real>(&self) -> T {
        let [a, b, c, d] = self.period_matrix::<T>();
        let p = d - a;
        let disc = (p * p + T::from_f64(4.0) * b * c).sqrt();
        if p >= T::zero() {
            T::from_f64(2.0) * b / (p + disc)
        } else {
            (disc - p) / (T::from_f64(2.0) * c)
        }
    }

    /// Residual of the tail's defining quadratic at `x`.
    pub fn tail_quadratic<T: Real>(&self, x: T) -> T {
        let [a, b, c, d] = self.period_matrix::<T>();
        c * x * x + (d - a) * x - b
    }

    pub fn eval<T: Real>(&self) -> T {
        let mut x = self.tail_value::<T>();
        for &q in self.preperiod.iter().rev() {
            x = T::one() / (T::from_f64(q as f64) + x);
        }
        x
    }
}

impl FromStr for ContinuedFraction {
    type Err = Error;

    /// Grammar: `q1,q2,…,[p1,p2,…]`; the bracketed list is the period.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let open = s
            .find('[')
            .ok_or_else(|| Error::Parse(format!("`{s}`: missing `[period]`")))?;
        if !s.ends_with(']') {
            return Err(Error::Parse(format!("`{s}`: period must close the expression")));
        }
        let head = s[..open].trim_end_matches(',');
        let body = &s[open + 1..s.len() - 1];
        let list = |part: &str| -> Result<Vec<u64>> {
            if part.is_empty() {
                return Ok(Vec::new());
            }
            part.split(',')
                .map(|q| {
                    q.parse::<u64>()
                        .map_err(|_| Error::Parse(format!("`{s}`: bad partial quotient `{q}`")))
                })
                .collect()
        };
        ContinuedFraction::new(list(head)?, list(body)?)
    }
}

impl fmt::Display for ContinuedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in &self.preperiod {
            write!(f, "{q},")?;
        }
        let period: Vec<String> = self.period.iter().map(u64::to_string).collect();
        write!(f, "[{}]", period.join(","))
    }
}

impl TryFrom<String> for ContinuedFraction {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<ContinuedFraction> for String {
    fn from(cf: ContinuedFraction) -> String {
        cf.to_string()
    }
}

/// `p/q` in lowest terms, written `"p/q"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Ratio {
    num: u64,
    den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Parse("zero denominator".into()));
        }
        let (mut a, mut b) = (num, den);
        while b != 0 {
            (a, b) = (b, a % b);
        }
        Ok(Ratio { num: num / a, den: den / a })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (p, q) = s
            .split_once('/')
            .ok_or_else(|| Error::Parse(format!("`{s}`: expected p/q")))?;
        let int = |x: &str| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Error::Parse(format!("`{s}`: bad integer `{x}`")))
        };
        Ratio::new(int(p)?, int(q)?)
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl TryFrom<String> for Ratio {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Ratio> for String {
    fn from(r: Ratio) -> String {
        r.to_string()
    }
}

/// One coordinate's frequency: `α/(2π)` as a number, an exact fraction, or a
/// continued fraction.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FrequencySpec {
    Turns(f64),
    Ratio(Ratio),
    Cf(ContinuedFraction),
}

impl FrequencySpec {
    pub fn turns<T: Real>(&self) -> T {
        match self {
            FrequencySpec::Turns(t) => T::from_f64_decimal(*t),
            FrequencySpec::Ratio(r) => T::from_f64(r.num as f64) / T::from_f64(r.den as f64),
            FrequencySpec::Cf(cf) => cf.eval(),
        }
    }
}

impl FromStr for FrequencySpec {
    type Err = Error;

    /// `0.38`, `3/10`, or a continued fraction such as `3,3,[1]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.contains('[') || s.contains(',') {
            return Ok(FrequencySpec::Cf(s.parse()?));
        }
        if s.contains('/') {
            return Ok(FrequencySpec::Ratio(s.parse()?));
        }
        s.parse::<f64>()
            .map(FrequencySpec::Turns)
            .map_err(|_| Error::Parse(format!("`{s}`: expected a number, p/q, or a continued fraction")))
    }
}

/// Accepts a JSON number or any string `FromStr` understands.
impl<'de> Deserialize<'de> for FrequencySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(t) => Ok(FrequencySpec::Turns(t)),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl fmt::Display for FrequencySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencySpec::Turns(t) => write!(f, "{t}"),
            FrequencySpec::Ratio(r) => write!(f, "{r}"),
            FrequencySpec::Cf(cf) => write!(f, "cf {cf}"),
        }
    }
}

/// Smallest divisor found by [`min_divisor`] and where it occurred.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivisorScan {
    pub max_degree: u32,
    pub value: f64,
    pub j: usize,
    pub m: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyVector {
    pub specs: Vec<FrequencySpec>,
    /// `α_j/(2π)` rounded to binary64.
    pub turns: Vec<f64>,
    pub alphas: Vec<f64>,
    pub lambdas: Vec<(f64, f64)>,
    pub min_divisor_scan: DivisorScan,
}

impl FrequencyVector {
    pub fn n(&self) -> usize {
        self.specs.len()
    }

    pub fn turns_in<T: Real>(&self) -> Vec<T> {
        self.specs.iter().map(FrequencySpec::turns).collect()
    }

    pub fn lambdas_in<T: Real>(&self) -> Vec<Complex<T>> {
        self.turns_in::<T>().into_iter().map(T::unit_from_turns).collect()
    }

    /// Same vector with `α_a` and `α_b` exchanged.
    pub fn swapped(&self, a: usize, b: usize) -> Result<Self> {
        let mut specs = self.specs.clone();
        specs.swap(a, b);
        make_frequencies(&specs, self.min_divisor_scan.max_degree)
    }
}

/// `2cos(2π t_j) − 2cos(2π ⟨m, t⟩)`, computed in `T` with the phase reduced
/// modulo one turn first.
pub fn divisor<T: Real>(turns: &[T], j: usize, m: &[i64]) -> T {
    let phase: T = m
        .iter()
        .zip(turns)
        .map(|(&mi, &t)| {
            let x = T::from_i64(mi) * t;
            x - x.floor()
        })
        .sum();
    let two = T::from_f64(2.0);
    let a = T::unit_from_turns(turns[j]).re;
    let b = T::unit_from_turns(phase).re;
    two * a - two * b
}

/// Validates frequency specs and scans divisors up to `scan_degree`.
pub fn make_frequencies(specs: &[FrequencySpec], scan_degree: u32) -> Result<FrequencyVector> {
    if specs.is_empty() {
        return Err(Error::invalid("frequencies", "at least one frequency is required"));
    }
    let turns: Vec<f64> = specs.iter().map(|s| s.turns::<f64>()).collect();
    for (j, &t) in turns.iter().enumerate() {
        if !(t > 0.0 && t < 0.5) {
            let hint = if t == 0.5 {
                " (α = π gives λ = −1, the degenerate sphere-like case)"
            } else if t > 0.5 && t < 1.0 {
                "; use 1 − α/(2π) instead, the reflected frequency gives the same f"
            } else {
                ""
            };
            return Err(Error::invalid(
                format!("frequencies[{j}]"),
                format!("α/(2π) = {t} must lie in the open interval (0, 1/2){hint}"),
            ));
        }
    }
    for a in 0..turns.len() {
        for b in a + 1..turns.len() {
            if (turns[a] - turns[b]).abs() < 1e-15 {
                return Err(Error::Degenerate(format!(
                    "λ_{} = λ_{} (α/(2π) = {}); the frequencies must be distinct",
                    a + 1,
                    b + 1,
                    turns[a]
                )));
            }
        }
    }
    let alphas = turns.iter().map(|t| 2.0 * std::f64::consts::PI * t).collect();
    let lambdas = turns
        .iter()
        .map(|&t| {
            let l = f64::unit_from_turns(t);
            (l.re, l.im)
        })
        .collect();
    let scan = scan_divisors(&turns, scan_degree.max(3));
    Ok(FrequencyVector {
        specs: specs.to_vec(),
        turns,
        alphas,
        lambdas,
        min_divisor_scan: scan,
    })
}

pub fn min_divisor(fv: &FrequencyVector, max_degree: u32) -> DivisorScan {
    scan_divisors(&fv.turns, max_degree)
}

fn scan_divisors(turns: &[f64], max_degree: u32) -> DivisorScan {
    let n = turns.len();
    let mut best = DivisorScan {
        max_degree,
        value: f64::INFINITY,
        j: 0,
        m: vec![0; n],
    };
    let mut m = vec![0i64; n];
    for_each_lattice_point(&mut m, 0, max_degree as i64, &mut |m| {
        for j in 0..n {
            let trivial = m
                .iter()
                .enumerate()
                .all(|(i, &v)| if i == j { v.abs() == 1 } else { v == 0 });
            if trivial {
                continue;
            }
            let v = divisor(turns, j, m).abs();
            if v < best.value {
                best.value = v;
                best.j = j;
                best.m = m.to_vec();
            }
        }
    });
    best
}

/// Visits every `m ∈ ℤⁿ` with `‖m‖₁ ≤ budget`, coordinates from `pos` on.
fn for_each_lattice_point(m: &mut [i64], pos: usize, budget: i64, f: &mut impl FnMut(&[i64])) {
    if pos == m.len() {
        f(m);
        return;
    }
    for v in -budget..=budget {
        m[pos] = v;
        for_each_lattice_point(m, pos + 1, budget - v.abs(), f);
    }
    m[pos] = 0;
}
