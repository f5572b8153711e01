//! Order-by-order assembly of the explicit equation.
//!
//! Every series entering the equation is kept as a stream of homogeneous
//! blocks indexed by degree. Order `k` only ever touches degrees `2k − 1` and
//! `2k`, and all lower blocks are final, so one order costs one sweep of
//! block products instead of a full re-expansion.
//!
//! Streams, with `u_j = χ_j²` and `U_s = Π u_j^{s_j}`:
//!
//! ```text
//! g   = f∘χ = Σ F_s U_s              h_j = Σ 2 s_j F_s U_{s−e_j}
//! fp_j = ∂_j f∘χ = χ_j h_j           tm_j, tp_j = τ∓ χ_j   gm, gp = τ∓ g
//! S   = gm² + Σ tm_j²                L = √S    W = 1/L    Wp = ρ^* W
//! P_j = tm_j + gm fp_j               Q_j = tp_j + gp fp_j
//! E_j = P_j W + Q_j Wp
//! ```
//!
//! `S, L, W, g, h, u, U` are even, `χ, fp, P, Q, E` odd.

use std::collections::HashMap;

use num_complex::Complex;

use super::blocks::BlockAlgebra;
use super::OrderDiagnostics;
use crate::error::{Error, Result};
use crate::frequency::divisor;
use crate::scalar::{cabs, Real};

type Stream<B> = Vec<Option<B>>;

/// Tolerances of the per-order checks.
pub(crate) const RESONANT_TOL: f64 = 1e-8;
pub(crate) const IMAG_TOL: f64 = 1e-9;

pub(crate) struct EngineInput<T: Real> {
    pub n: usize,
    pub k_max: usize,
    pub f0: T,
    pub gauge: Vec<T>,
    pub turns: Vec<T>,
    pub divisor_floor: f64,
}

pub(crate) struct EngineOutput<T: Real> {
    /// `F_s` for every `s` with `‖s‖ ≤ K`, `s = 0` included.
    pub f: Vec<(Vec<u32>, T)>,
    /// Per component, per odd degree `d`, the coefficients of `χ_j^{(d)}`.
    pub chi: Vec<Vec<(u32, Vec<(Vec<u32>, Complex<T>)>)>>,
    pub diagnostics: Vec<OrderDiagnostics>,
}

struct Acc<'a, T: Real, A: BlockAlgebra<T>> {
    alg: &'a A,
    acc: A::Acc,
    touched: bool,
}

impl<'a, T: Real, A: BlockAlgebra<T>> Acc<'a, T, A> {
    fn new(alg: &'a A, degree: usize) -> Self {
        Acc {
            alg,
            acc: alg.start(degree as u32),
            touched: false,
        }
    }

    fn prod(&mut self, c: T, a: &A::Block, b: &A::Block) {
        self.alg.add_product(&mut self.acc, c, a, b);
        self.touched = true;
    }

    fn scaled(&mut self, c: T, a: &A::Block) {
        self.alg.add_scaled(&mut self.acc, c, a);
        self.touched = true;
    }

    /// `Σ_{i ∈ range} a_i b_{d−i}` over present blocks.
    fn conv(&mut self, c: T, a: &Stream<A::Block>, b: &Stream<A::Block>, d: usize, lo: usize, hi: usize) {
        for i in lo..=hi.min(d) {
            if let (Some(x), Some(y)) = (&a[i], &b[d - i]) {
                self.prod(c, x, y);
            }
        }
    }

    fn done(self) -> Option<A::Block> {
        self.touched.then(|| self.alg.finish(self.acc))
    }
}

pub(crate) struct Engine<'a, T: Real, A: BlockAlgebra<T>> {
    alg: &'a A,
    inp: EngineInput<T>,
    /// Multi-indices `s` with `1 ≤ ‖s‖ ≤ K`, by increasing norm.
    s_list: Vec<Vec<u32>>,
    s_norm: Vec<usize>,
    s_index: HashMap<Vec<u32>, usize>,
    /// For `‖s‖ ≥ 2`: `(i, index of s − e_i)` with `i` the first nonzero slot.
    parent: Vec<Option<(usize, usize)>>,
    fvals: Vec<Option<T>>,
    one: Stream<A::Block>,
    chi: Vec<Stream<A::Block>>,
    tm: Vec<Stream<A::Block>>,
    tp: Vec<Stream<A::Block>>,
    fp: Vec<Stream<A::Block>>,
    pp: Vec<Stream<A::Block>>,
    qq: Vec<Stream<A::Block>>,
    e: Vec<Stream<A::Block>>,
    u: Vec<Stream<A::Block>>,
    big_u: Vec<Stream<A::Block>>,
    h: Vec<Stream<A::Block>>,
    g: Stream<A::Block>,
    gm: Stream<A::Block>,
    gp: Stream<A::Block>,
    s: Stream<A::Block>,
    l: Stream<A::Block>,
    w: Stream<A::Block>,
    wp: Stream<A::Block>,
    l0: T,
    /// Solved coefficients of `χ_j^(d)`, kept exactly as divided.
    chi_coeffs: Vec<Vec<(u32, Vec<(Vec<u32>, Complex<T>)>)>>,
    diagnostics: Vec<OrderDiagnostics>,
}

fn multi_indices(n: usize, norm: usize) -> Vec<Vec<u32>> {
    crate::series::indices_of_degree(n, norm as u32)
        .into_iter()
        .map(|m| m.into_vec())
        .collect()
}

/// `C(2s, s)` in `T`.
fn central_binomial<T: Real>(s: u32) -> T {
    let mut c = T::one();
    for i in 1..=s {
        c = c * T::from_f64((s + i) as f64) / T::from_f64(i as f64);
    }
    c
}

impl<'a, T: Real, A: BlockAlgebra<T>> Engine<'a, T, A> {
    pub fn new(alg: &'a A, inp: EngineInput<T>) -> Self {
        let n = inp.n;
        let deg = 2 * inp.k_max;
        let mut s_list = Vec::new();
        let mut s_norm = Vec::new();
        for norm in 1..=inp.k_max {
            for s in multi_indices(n, norm) {
                s_list.push(s);
                s_norm.push(norm);
            }
        }
        let s_index: HashMap<Vec<u32>, usize> =
            s_list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let parent = s_list
            .iter()
            .zip(&s_norm)
            .map(|(s, &norm)| {
                (norm >= 2).then(|| {
                    let i = s.iter().position(|&x| x > 0).unwrap();
                    let mut p = s.clone();
                    p[i] -= 1;
                    (i, s_index[&p])
                })
            })
            .collect();
        let empty = || vec![None; deg + 1];
        let per_j = || vec![empty(); n];
        let mut one = empty();
        one[0] = Some(alg.constant(T::one()));
        let l0 = (T::from_f64(2.0) * inp.f0).abs();
        let ns = s_list.len();
        Engine {
            alg,
            s_list,
            s_norm,
            s_index,
            parent,
            fvals: vec![None; ns],
            one,
            chi: per_j(),
            tm: per_j(),
            tp: per_j(),
            fp: per_j(),
            pp: per_j(),
            qq: per_j(),
            e: per_j(),
            u: per_j(),
            big_u: vec![empty(); ns],
            h: per_j(),
            g: empty(),
            gm: empty(),
            gp: empty(),
            s: empty(),
            l: empty(),
            w: empty(),
            wp: empty(),
            l0,
            chi_coeffs: vec![Vec::new(); n],
            diagnostics: Vec::new(),
            inp,
        }
    }

    fn acc(&self, d: usize) -> Acc<'a, T, A> {
        Acc::new(self.alg, d)
    }

    /// `U_s` at degree `d`; `‖s‖ = 1` reads `u_j` directly.
    fn big_u_block(&self, si: usize, d: usize) -> Option<&A::Block> {
        if self.s_norm[si] == 1 {
            let j = self.s_list[si].iter().position(|&x| x == 1).unwrap();
            self.u[j][d].as_ref()
        } else {
            self.big_u[si][d].as_ref()
        }
    }

    fn fill_u(&mut self, j: usize, d: usize) {
        let mut a = self.acc(d);
        a.conv(T::one(), &self.chi[j], &self.chi[j], d, 1, d.saturating_sub(1));
        self.u[j][d] = a.done();
    }

    fn fill_big_u(&mut self, si: usize, d: usize) {
        let Some((i, p)) = self.parent[si] else {
            return;
        };
        let mut a = self.acc(d);
        let lo = 2 * (self.s_norm[si] - 1);
        for d1 in lo..=d.saturating_sub(2) {
            if let (Some(x), Some(y)) = (self.big_u_block(p, d1), self.u[i][d - d1].as_ref()) {
                a.prod(T::one(), x, y);
            }
        }
        self.big_u[si][d] = a.done();
    }

    fn fill_g(&mut self, d: usize) {
        let mut a = self.acc(d);
        if d == 0 {
            a.scaled(self.inp.f0, self.one[0].as_ref().unwrap());
        }
        for si in 0..self.s_list.len() {
            if 2 * self.s_norm[si] > d {
                break;
            }
            if let (Some(f), Some(b)) = (self.fvals[si], self.big_u_block(si, d)) {
                a.scaled(f, b);
            }
        }
        self.g[d] = a.done();
    }

    fn fill_h(&mut self, j: usize, d: usize) {
        let mut a = self.acc(d);
        for si in 0..self.s_list.len() {
            let s = &self.s_list[si];
            if s[j] == 0 || 2 * (self.s_norm[si] - 1) > d {
                continue;
            }
            let Some(f) = self.fvals[si] else { continue };
            let c = T::from_f64(2.0 * s[j] as f64) * f;
            let block = if self.s_norm[si] == 1 {
                self.one[d].as_ref()
            } else {
                let mut p = s.clone();
                p[j] -= 1;
                self.big_u_block(self.s_index[&p], d)
            };
            if let Some(b) = block {
                a.scaled(c, b);
            }
        }
        self.h[j][d] = a.done();
    }

    fn fill_tau_chi(&mut self, j: usize, d: usize) {
        let Some(x) = &self.chi[j][d] else {
            self.tm[j][d] = None;
            self.tp[j][d] = None;
            return;
        };
        let (rm, rp) = self.alg.rotate_pm(x, d as u32);
        let mut a = self.acc(d);
        a.scaled(T::one(), x);
        a.scaled(-T::one(), &rm);
        let mut b = self.acc(d);
        b.scaled(T::one(), x);
        b.scaled(-T::one(), &rp);
        self.tm[j][d] = a.done();
        self.tp[j][d] = b.done();
    }

    fn fill_tau_g(&mut self, d: usize) {
        let Some(x) = &self.g[d] else {
            self.gm[d] = None;
            self.gp[d] = None;
            return;
        };
        let (rm, rp) = self.alg.rotate_pm(x, d as u32);
        let mut a = self.acc(d);
        a.scaled(T::one(), x);
        a.scaled(T::one(), &rm);
        let mut b = self.acc(d);
        b.scaled(T::one(), x);
        b.scaled(T::one(), &rp);
        self.gm[d] = a.done();
        self.gp[d] = b.done();
    }

    fn fill_fp(&mut self, j: usize, d: usize) {
        let mut a = self.acc(d);
        a.conv(T::one(), &self.chi[j], &self.h[j], d, 1, d);
        self.fp[j][d] = a.done();
    }

    fn fill_pq(&mut self, j: usize, d: usize) {
        let mut a = self.acc(d);
        if let Some(x) = &self.tm[j][d] {
            a.scaled(T::one(), x);
        }
        a.conv(T::one(), &self.gm, &self.fp[j], d, 0, d.saturating_sub(1));
        let mut b = self.acc(d);
        if let Some(x) = &self.tp[j][d] {
            b.scaled(T::one(), x);
        }
        b.conv(T::one(), &self.gp, &self.fp[j], d, 0, d.saturating_sub(1));
        self.pp[j][d] = a.done();
        self.qq[j][d] = b.done();
    }

    fn fill_s(&mut self, d: usize) {
        let mut a = self.acc(d);
        a.conv(T::one(), &self.gm, &self.gm, d, 0, d);
        for j in 0..self.inp.n {
            a.conv(T::one(), &self.tm[j], &self.tm[j], d, 1, d.saturating_sub(1));
        }
        self.s[d] = a.done();
    }

    fn fill_l(&mut self, d: usize) {
        if d == 0 {
            self.l[0] = Some(self.alg.constant(self.l0));
            return;
        }
        let inv = T::one() / (T::from_f64(2.0) * self.l0);
        let mut a = self.acc(d);
        if let Some(x) = &self.s[d] {
            a.scaled(inv, x);
        }
        a.conv(-inv, &self.l, &self.l, d, 1, d.saturating_sub(1));
        self.l[d] = a.done();
    }

    fn fill_w(&mut self, d: usize) {
        if d == 0 {
            let w0 = self.alg.constant(T::one() / self.l0);
            self.wp[0] = Some(w0.clone());
            self.w[0] = Some(w0);
            return;
        }
        let mut a = self.acc(d);
        a.conv(-T::one() / self.l0, &self.l, &self.w, d, 1, d);
        self.w[d] = a.done();
        self.wp[d] = self.w[d].as_ref().map(|x| self.alg.rotate_plus(x, d as u32));
    }

    fn fill_e(&mut self, j: usize, d: usize) {
        let mut a = self.acc(d);
        a.conv(T::one(), &self.pp[j], &self.w, d, 1, d);
        a.conv(T::one(), &self.qq[j], &self.wp, d, 1, d);
        self.e[j][d] = a.done();
    }

    fn fill_odd_tail(&mut self, d: usize) {
        for j in 0..self.inp.n {
            self.fill_fp(j, d);
            self.fill_pq(j, d);
            self.fill_e(j, d);
        }
    }

    fn fill_even_top(&mut self, d: usize) {
        self.fill_g(d);
        self.fill_tau_g(d);
        self.fill_s(d);
        self.fill_l(d);
    }

    fn f_denominator(&self, s: &[u32]) -> T {
        let mut c = T::from_f64(2.0);
        for (j, &sj) in s.iter().enumerate() {
            c *= central_binomial::<T>(sj);
            for _ in 0..2 * sj {
                c *= self.inp.gauge[j];
            }
        }
        c
    }

    /// Reads `F_s`, `‖s‖ = k`, from the averaged chord length at degree `2k`.
    fn determine_f(&mut self, k: usize) -> Result<f64> {
        let d = 2 * k;
        let diag = match &self.l[d] {
            Some(b) => self.alg.diagonal(b, d as u32),
            None => Vec::new(),
        };
        let mut worst = 0.0f64;
        for si in 0..self.s_list.len() {
            if self.s_norm[si] != k {
                continue;
            }
            let s = &self.s_list[si];
            let c = diag
                .iter()
                .find(|(e, _)| e == s)
                .map(|x| x.1)
                .unwrap_or_else(|| Complex::new(T::zero(), T::zero()));
            let mag = cabs(c).to_f64();
            let imag = if mag > 0.0 { c.im.abs().to_f64() / mag } else { 0.0 };
            if imag > IMAG_TOL {
                return Err(Error::Consistency(format!(
                    "coefficient F_{s:?} has relative imaginary part {imag:.3e} at order {k}"
                )));
            }
            worst = worst.max(imag);
            self.fvals[si] = Some(c.re / self.f_denominator(s));
        }
        Ok(worst)
    }

    /// Log of the largest norm among the products summed into `E_j` at
    /// degree `d`; rounding noise in `E_j` is relative to this, not to `E_j`.
    fn summand_log_norm(&self, j: usize, d: usize) -> f64 {
        let mut best = f64::NEG_INFINITY;
        let mut take = |a: &Stream<A::Block>, b: &Stream<A::Block>| {
            for i in 1..=d {
                if let (Some(x), Some(y)) = (&a[i], &b[d - i]) {
                    let v = self.alg.log_norm(x, i as u32) + self.alg.log_norm(y, (d - i) as u32);
                    best = best.max(v);
                }
            }
        };
        take(&self.pp[j], &self.w);
        take(&self.qq[j], &self.wp);
        best
    }

    fn sanity_scale(v: &[(Vec<u32>, Complex<T>)]) -> f64 {
        v.iter().map(|x| cabs(x.1).to_f64()).fold(0.0, f64::max)
    }

    /// Divides the degree-`2k−1` residual of component `j` by the divisors.
    fn determine_chi(&mut self, k: usize, diag: &mut OrderDiagnostics) -> Result<()> {
        let d = 2 * k - 1;
        let n = self.inp.n;
        let two_f0 = T::from_f64(2.0) * self.inp.f0.abs();
        for j in 0..n {
            let coeffs = match &self.e[j][d] {
                Some(b) => self.alg.coefficients(b, d as u32),
                None => Vec::new(),
            };
            let scale = Self::sanity_scale(&coeffs);
            diag.residual_scale = diag.residual_scale.max(scale);
            let terms = self.summand_log_norm(j, d);
            let mut solved: HashMap<Vec<u32>, Complex<T>> = HashMap::new();
            for (exps, c) in &coeffs {
                let m: Vec<i64> = (0..n).map(|i| exps[i] as i64 - exps[n + i] as i64).collect();
                let parity_ok = (0..n).all(|i| (exps[i] + exps[n + i]) % 2 == u32::from(i == j));
                let rel = if scale > 0.0 { cabs(*c).to_f64() / scale } else { 0.0 };
                if !parity_ok {
                    diag.parity_residual = diag.parity_residual.max(rel);
                    continue;
                }
                let gauge = (0..n).all(|i| if i == j { m[i].abs() == 1 } else { m[i] == 0 });
                if gauge {
                    let c = cabs(*c).to_f64();
                    let rel = if c > 0.0 { (c.ln() - terms).exp() } else { 0.0 };
                    diag.resonant_residual = diag.resonant_residual.max(rel);
                    continue;
                }
                let div = divisor(&self.inp.turns, j, &m);
                let adiv = div.abs().to_f64();
                if adiv < self.inp.divisor_floor {
                    return Err(Error::SmallDivisor {
                        j: j + 1,
                        m,
                        k,
                        degree: d,
                        divisor: adiv,
                    });
                }
                diag.min_divisor = Some(diag.min_divisor.map_or(adiv, |v| v.min(adiv)));
                solved.insert(exps.clone(), -c.scale(two_f0).unscale(div));
            }
            if diag.resonant_residual > RESONANT_TOL {
                return Err(Error::Consistency(format!(
                    "resonant coefficient of component {} at order {k} is {:.3e} relative to the \
                     summed terms (limit {RESONANT_TOL:e}); accumulated rounding or a true \
                     inconsistency; comparing precisions tells them apart",
                    j + 1,
                    diag.resonant_residual
                )));
            }
            // enforce χ_{l', l''} = conj χ_{l'', l'} exactly
            let mut out: Vec<(Vec<u32>, Complex<T>)> = Vec::with_capacity(solved.len());
            let half = T::from_f64(0.5);
            let mut keys: Vec<&Vec<u32>> = solved.keys().collect();
            keys.sort();
            for e in keys {
                let mut mirror = e.clone();
                for i in 0..n {
                    mirror.swap(i, n + i);
                }
                let c = solved[e];
                let v = match solved.get(&mirror) {
                    Some(mc) => (c + mc.conj()).scale(half),
                    None => c.scale(half),
                };
                out.push((e.clone(), v));
                if !solved.contains_key(&mirror) {
                    out.push((mirror, v.conj()));
                }
            }
            self.chi[j][d] = (!out.is_empty()).then(|| self.alg.from_coefficients(d as u32, &out));
            self.chi_coeffs[j].push((d as u32, out));
        }
        Ok(())
    }

    fn post_residual(&self, k: usize) -> (f64, f64) {
        let d = 2 * k - 1;
        let mut e_max = 0.0f64;
        for j in 0..self.inp.n {
            if let Some(b) = &self.e[j][d] {
                e_max = e_max.max(Self::sanity_scale(&self.alg.coefficients(b, d as u32)));
            }
        }
        let avg = match &self.l[2 * k] {
            Some(b) => Self::sanity_scale(&self.alg.diagonal(b, 2 * k as u32)),
            None => 0.0,
        };
        (e_max, avg)
    }

    /// Runs orders `1..=K`. `progress` is called after each order.
    pub fn run(mut self, mut progress: impl FnMut(&OrderDiagnostics)) -> Result<EngineOutput<T>> {
        let n = self.inp.n;
        self.fill_g(0);
        self.fill_tau_g(0);
        self.fill_s(0);
        self.fill_l(0);
        self.fill_w(0);
        // order 1: χ^(1) is the gauge, F_{e_j} from the closed form
        for j in 0..n {
            let a = self.inp.gauge[j];
            let mut ez = vec![0u32; 2 * n];
            ez[j] = 1;
            let mut ezb = vec![0u32; 2 * n];
            ezb[n + j] = 1;
            let zero = T::zero();
            let c = vec![(ez, Complex::new(a, zero)), (ezb, Complex::new(a, zero))];
            self.chi[j][1] = Some(self.alg.from_coefficients(1, &c));
            self.chi_coeffs[j].push((1, c));
        }
        for k in 1..=self.inp.k_max {
            let mut diag = OrderDiagnostics::new(k);
            let (d_odd, d_even) = (2 * k - 1, 2 * k);
            // phase A: unknowns of this order set to zero
            for j in 0..n {
                self.fill_tau_chi(j, d_odd);
                self.fill_u(j, d_even);
            }
            for si in 0..self.s_list.len() {
                if self.s_norm[si] >= 2 && 2 * self.s_norm[si] <= d_even {
                    self.fill_big_u(si, d_even);
                }
            }
            self.fill_even_top(d_even);
            diag.f_imag = self.determine_f(k)?;
            if k == 1 {
                for j in 0..n {
                    let t = self.inp.turns[j];
                    let closed = (T::from_f64(2.0) - T::from_f64(2.0) * T::unit_from_turns(t).re)
                        / (T::from_f64(-8.0) * self.inp.f0);
                    let si = self.s_index[&unit(n, j)];
                    let got = self.fvals[si].unwrap();
                    diag.init_mismatch = diag
                        .init_mismatch
                        .max(((got - closed) / closed).abs().to_f64());
                    self.fvals[si] = Some(closed);
                }
            }
            // phase B: ∇f picks up the new F, then χ^(2k−1) from the divisors
            for j in 0..n {
                self.fill_h(j, d_even - 2);
            }
            if k >= 2 {
                self.fill_odd_tail(d_odd);
                self.determine_chi(k, &mut diag)?;
            }
            // phase C: refill both degrees with the solved unknowns
            for j in 0..n {
                self.fill_tau_chi(j, d_odd);
                self.fill_u(j, d_even);
            }
            self.fill_even_top(d_even);
            self.fill_w(d_even);
            self.fill_odd_tail(d_odd);
            let (e_max, avg) = self.post_residual(k);
            diag.post_residual = e_max;
            diag.average_residual = avg;
            if k == 1 && e_max.max(avg) > super::DEGREE2_TOL {
                return Err(Error::Consistency(format!(
                    "order-1 cancellation fails: residual {:.3e}",
                    e_max.max(avg)
                )));
            }
            let escaped = (0..n).any(|j| {
                [&self.chi[j][d_odd], &self.e[j][d_odd]]
                    .into_iter()
                    .flatten()
                    .any(|b| !self.alg.in_range(b))
            }) || [&self.l[d_even], &self.w[d_even]]
                .into_iter()
                .flatten()
                .any(|b| !self.alg.in_range(b));
            if escaped {
                return Err(Error::Consistency(format!(
                    "coefficients at order {k} left the representable range of the sampled engine"
                )));
            }
            let non_finite = self.fvals.iter().flatten().any(|v| !v.is_finite());
            if non_finite {
                return Err(Error::Consistency(format!(
                    "non-finite coefficient at order {k}"
                )));
            }
            progress(&diag);
            self.diagnostics.push(diag);
        }
        self.into_output()
    }

    fn into_output(self) -> Result<EngineOutput<T>> {
        let n = self.inp.n;
        let mut f = vec![(vec![0u32; n], self.inp.f0)];
        for (si, s) in self.s_list.iter().enumerate() {
            f.push((s.clone(), self.fvals[si].unwrap_or(T::zero())));
        }
        let chi = self.chi_coeffs;
        Ok(EngineOutput {
            f,
            chi,
            diagnostics: self.diagnostics,
        })
    }
}

fn unit(n: usize, j: usize) -> Vec<u32> {
    let mut e = vec![0; n];
    e[j] = 1;
    e
}
