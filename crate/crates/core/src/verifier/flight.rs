//! Free flight between the sheets and the law of elastic reflection.
//!
//! Points of `E = Rⁿ × R` are slices of length `n + 1`, vertical coordinate
//! last. Impacts alternate: `a` and `c` lie on the upper sheet `y = −f(x)`,
//! `b` on the lower sheet `y = f(x)`.

use serde::{Deserialize, Serialize};

use super::surface::{dot, norm, SurfacePoly};
use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sheet {
    /// `y = f(x)`.
    Lower,
    /// `y = −f(x)`.
    Upper,
}

impl Sheet {
    fn sign<T: Real>(self) -> T {
        match self {
            Sheet::Lower => T::one(),
            Sheet::Upper => -T::one(),
        }
    }

    pub fn other(self) -> Sheet {
        match self {
            Sheet::Lower => Sheet::Upper,
            Sheet::Upper => Sheet::Lower,
        }
    }
}

/// Horizontal coordinates of three successive impacts.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactTriple<T: Real = f64> {
    pub a: Vec<T>,
    pub b: Vec<T>,
    pub c: Vec<T>,
}

/// The point of `sheet` above or below `x`.
pub fn lift<T: Real>(sp: &SurfacePoly<T>, x: &[T], sheet: Sheet) -> Result<Vec<T>> {
    let (v, _) = sp.eval(x)?;
    let mut p = x.to_vec();
    p.push(sheet.sign::<T>() * v);
    Ok(p)
}

/// First crossing of the ray `start + t·dir`, `t > 0`, with `sheet`;
/// returns the horizontal part of the crossing.
pub fn next_impact<T: Real>(sp: &SurfacePoly<T>, start: &[T], dir: &[T], sheet: Sheet) -> Result<Vec<T>> {
    let n = sp.n();
    if start.len() != n + 1 || dir.len() != n + 1 {
        return Err(Error::Structural(format!("ray needs {} coordinates", n + 1)));
    }
    let (x0, y0) = (&start[..n], start[n]);
    let (dx, dy) = (&dir[..n], dir[n]);
    sp.check_domain(x0)?;
    let toward = match sheet {
        Sheet::Upper => dy > T::zero(),
        Sheet::Lower => dy < T::zero(),
    };
    if !toward {
        return Err(Error::Escape(format!(
            "direction with vertical component {:.3e} never reaches the {sheet:?} sheet",
            dy.to_f64()
        )));
    }
    let sigma: T = sheet.sign();
    let at = |t: T| -> Vec<T> { x0.iter().zip(dx).map(|(&x, &d)| x + t * d).collect() };
    // φ(t) = y(t) − σ f(x(t)), φ'(t) = dy − σ ∇f·dx
    let phi = |t: T| -> Result<(T, T)> {
        let (v, g) = sp.eval(&at(t))?;
        Ok((y0 + t * dy - sigma * v, dy - sigma * dot(&g, dx)))
    };

    let two = T::from_f64(2.0);
    let dx2 = dot(dx, dx);
    let r2 = sp.r_max() * sp.r_max();
    let mut hi = (y0.abs() + T::from_f64(4.0) * sp.f0().abs()) / dy.abs();
    if dx2 > T::zero() {
        // |x0 + t dx|² = r_max² at the exit time
        let b = dot(x0, dx);
        let c = dot(x0, x0) - r2;
        let exit = (-b + (b * b - dx2 * c).sqrt()) / dx2;
        let exit = exit * (T::one() - T::from_f64(1e-12));
        if exit < hi {
            hi = exit;
        }
    }
    let mut lo = T::zero();
    let (p_lo, _) = phi(lo)?;
    if p_lo == T::zero() {
        return Ok(x0.to_vec());
    }
    let (p_hi, _) = phi(hi)?;
    if (p_hi > T::zero()) == (p_lo > T::zero()) {
        return Err(Error::Escape(format!(
            "ray leaves |x| < {} before meeting the {sheet:?} sheet",
            sp.r_max().to_f64()
        )));
    }
    let lo_positive = p_lo > T::zero();

    // chord estimate: the sheet at the height of its value over x0
    let (v0, _) = sp.eval(x0)?;
    let mut t = (sigma * v0 - y0) / dy;
    if !(t > lo && t < hi) {
        t = (lo + hi) / two;
    }
    let tol = T::from_f64(8.0 * T::EPSILON) * (sp.f0().abs() + y0.abs());
    for _ in 0..MAX_ITER {
        let (p, dp) = phi(t)?;
        if p.abs() <= tol {
            return Ok(at(t));
        }
        if (p > T::zero()) == lo_positive {
            lo = t;
        } else {
            hi = t;
        }
        let newton = if dp != T::zero() { t - p / dp } else { lo - T::one() };
        let next = if newton > lo && newton < hi { newton } else { (lo + hi) / two };
        let step = (next - t).abs();
        t = next;
        if step <= T::from_f64(T::EPSILON) * t.abs() {
            return Ok(at(t));
        }
    }
    let (p, _) = phi(t)?;
    if p.abs() <= T::from_f64(1e3) * tol {
        return Ok(at(t));
    }
    Err(Error::Escape(format!(
        "no convergence after {MAX_ITER} steps, residual {:.3e}",
        p.to_f64()
    )))
}

/// Mirror image of `incoming` in the tangent plane of `sheet` over `x`.
pub fn reflect<T: Real>(sp: &SurfacePoly<T>, x: &[T], sheet: Sheet, incoming: &[T]) -> Result<Vec<T>> {
    let (_, g) = sp.eval(x)?;
    let mut nrm: Vec<T> = g.iter().map(|&gi| sheet.sign::<T>() * gi).collect();
    nrm.push(-T::one());
    if incoming.len() != nrm.len() {
        return Err(Error::Structural(format!("direction needs {} coordinates", nrm.len())));
    }
    let k = T::from_f64(2.0) * dot(&nrm, incoming) / dot(&nrm, &nrm);
    Ok(incoming.iter().zip(&nrm).map(|(&v, &m)| v - k * m).collect())
}

/// Unit vector from `p` to `q`.
pub fn direction<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    let d: Vec<T> = q.iter().zip(p).map(|(&a, &b)| a - b).collect();
    let l = norm(&d);
    d.into_iter().map(|v| v / l).collect()
}

/// Completes a triple from the first two impacts by reflecting at `b` and
/// flying to the upper sheet.
pub fn complete_triple<T: Real>(sp: &SurfacePoly<T>, a: &[T], b: &[T]) -> Result<ImpactTriple<T>> {
    let pa = lift(sp, a, Sheet::Upper)?;
    let pb = lift(sp, b, Sheet::Lower)?;
    let out = reflect(sp, b, Sheet::Lower, &direction(&pa, &pb))?;
    let c = next_impact(sp, &pb, &out, Sheet::Upper)?;
    Ok(ImpactTriple { a: a.to_vec(), b: b.to_vec(), c })
}

/// Collinearity defect of `C(b − a)` and `I C(b − c)` for the normal at `b`:
/// `min |u/|u| ± v/|v||`.
pub fn collinearity_defect<T: Real>(sp: &SurfacePoly<T>, tr: &ImpactTriple<T>) -> Result<T> {
    let n = sp.n();
    let pa = lift(sp, &tr.a, Sheet::Upper)?;
    let pb = lift(sp, &tr.b, Sheet::Lower)?;
    let pc = lift(sp, &tr.c, Sheet::Upper)?;
    let (_, s) = sp.eval(&tr.b)?;
    // C w = (w_h + s w_v, ⟨s, w_h⟩ − w_v), rows permuted
    let c_times = |w: &[T]| -> Vec<T> {
        let (h, v) = (&w[..n], w[n]);
        let mut out: Vec<T> = h.iter().zip(&s).map(|(&hi, &si)| hi + si * v).collect();
        out.push(dot(&s, h) - v);
        out
    };
    let ba: Vec<T> = pb.iter().zip(&pa).map(|(&x, &y)| x - y).collect();
    let bc: Vec<T> = pb.iter().zip(&pc).map(|(&x, &y)| x - y).collect();
    let u = c_times(&ba);
    let mut v = c_times(&bc);
    v[n] = -v[n];
    let (nu, nv) = (norm(&u), norm(&v));
    let mut plus = Vec::with_capacity(n + 1);
    let mut minus = Vec::with_capacity(n + 1);
    for (&x, &y) in u.iter().zip(&v) {
        plus.push(x / nu + y / nv);
        minus.push(x / nu - y / nv);
    }
    let (p, m) = (norm(&plus), norm(&minus));
    Ok(if p < m { p } else { m })
}

/// Norm of `∂_b (L(a, b) + L(b, c))`.
pub fn fermat_residual<T: Real>(sp: &SurfacePoly<T>, tr: &ImpactTriple<T>) -> Result<T> {
    let (fa, _) = sp.eval(&tr.a)?;
    let (fb, gb) = sp.eval(&tr.b)?;
    let (fc, _) = sp.eval(&tr.c)?;
    let term = |p: &[T], fp: T| -> Vec<T> {
        let mut d: Vec<T> = tr.b.iter().zip(p).map(|(&x, &y)| x - y).collect();
        let vert = fp + fb;
        let mut all = d.clone();
        all.push(vert);
        let l = norm(&all);
        for (di, gi) in d.iter_mut().zip(&gb) {
            *di = (*di + *gi * vert) / l;
        }
        d
    };
    let t1 = term(&tr.a, fa);
    let t2 = term(&tr.c, fc);
    let sum: Vec<T> = t1.iter().zip(&t2).map(|(&x, &y)| x + y).collect();
    Ok(norm(&sum))
}
