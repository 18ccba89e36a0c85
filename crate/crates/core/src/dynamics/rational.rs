//! Polynomial structure of the Birkhoff sums at rational `alpha = a / q`.

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{rotate, SkewSystem};
use crate::error::{Error, Result};
use crate::numtheory::RotationNumber;
use crate::periodic::PeriodicFn;
use crate::scalar::FloatScalar;

fn denominator(rn: &RotationNumber) -> Result<u64> {
    let (_, q) = rn
        .as_rational()
        .ok_or_else(|| Error::Precondition("alpha must be rational".into()))?;
    q.to_u64().ok_or_else(|| Error::Range(format!("denominator {q} exceeds 64 bits")))
}

/// `C_h(n, t) = sum_{r<n} h(t + r alpha)` by direct summation.
fn partial<T: FloatScalar>(h: &PeriodicFn<T>, rn: &RotationNumber, n: u64, t: T) -> T {
    (0..n).fold(T::zero(), |acc, r| acc + h.eval_re(rotate(rn, t, r as i128)))
}

/// `C_h(n, t)` through `q^-1 C_h(q, t) (n - b) + C_h(b, t)`, `b = n mod q`.
pub fn rational_birkhoff<T: FloatScalar>(h: &PeriodicFn<T>, rn: &RotationNumber, n: u64, t: T) -> Result<T> {
    let q = denominator(rn)?;
    let b = n % q;
    let cq = partial(h, rn, q, t);
    Ok(cq * T::of((n - b) as f64 / q as f64) + partial(h, rn, b, t))
}

/// `H_n(t) = a2 n^2 + a1 n + a0` for `n = b mod q`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct RationalQuadratic<T> {
    pub b: u64,
    pub q: u64,
    pub a2: T,
    pub a1: T,
    pub a0: T,
}

impl<T: FloatScalar> RationalQuadratic<T> {
    pub fn eval(&self, n: u64) -> T {
        let n = T::of(n as f64);
        (self.a2 * n + self.a1) * n + self.a0
    }
}

/// Coefficients of `H_n(t)` in `n` on the residue class `n = b mod q`.
pub fn rational_h_coeffs<T: FloatScalar>(sys: &SkewSystem<T>, t: T, b: u64) -> Result<RationalQuadratic<T>> {
    let rn = sys.alpha();
    let q = denominator(rn)?;
    if b >= q {
        return Err(Error::Range(format!("residue {b} must be below q = {q}")));
    }
    let (phi, eta) = (sys.phi(), sys.eta());
    let cphi_q = partial(phi, rn, q, t);
    let p = partial(eta, rn, q, rotate(rn, t, 1)) * cphi_q;
    // sum_{j=1}^{J} eta(t + j alpha) C_phi(j, t), accumulated incrementally
    let mut tail = Vec::with_capacity(q as usize);
    let mut cphi = T::zero();
    let mut acc = T::zero();
    tail.push(acc);
    for j in 1..q {
        cphi = cphi + phi.eval_re(rotate(rn, t, j as i128 - 1));
        acc = acc + eta.eval_re(rotate(rn, t, j as i128)) * cphi;
        tail.push(acc);
    }
    let s = tail[(q - 1) as usize] + partial(eta, rn, b, t) * cphi_q;
    let rest = if b >= 2 { tail[(b - 1) as usize] } else { T::zero() };
    let (qf, bf) = (T::of(q as f64), T::of(b as f64));
    let half = T::of(0.5) / (qf * qf);
    Ok(RationalQuadratic {
        b,
        q,
        a2: half * p,
        a1: -half * p * (qf + bf + bf) + s / qf,
        a0: half * p * (qf + bf) * bf - s * bf / qf + rest,
    })
}
