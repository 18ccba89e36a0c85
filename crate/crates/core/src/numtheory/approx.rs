use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use serde::Serialize;

use super::rotation::RotationNumber;
use crate::error::{Error, Result};

/// Largest `q_{k+1}` for which best approximation is verified by exhaustive scan.
pub const SCAN_CAP: u64 = 1 << 22;
const CHUNK: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum BestApproxMethod {
    /// Exhaustive scan over `1 <= q < q_{k+1}`.
    Scan { minimizer: u64, minimum: f64 },
    /// Exact unimodular certificate: `q_k l_{k+1} - l_k q_{k+1} = +-1` and the
    /// errors of `q_k` and `q_{k+1}` have opposite signs.
    Certificate,
    /// Last convergent of a rational: `||q_k alpha|| = 0`.
    Terminal,
}

#[derive(Clone, Debug, Serialize)]
pub struct BestApproxReport {
    pub k: usize,
    pub q_k: String,
    pub dist: f64,
    /// `||q_k alpha|| > 1/(2 q_{k+1})`, exact.
    pub lower_ok: bool,
    /// `||q_k alpha|| < 1/q_{k+1}`, exact.
    pub upper_ok: bool,
    pub best_ok: bool,
    pub method: BestApproxMethod,
}

impl BestApproxReport {
    pub fn holds(&self) -> bool {
        self.lower_ok && self.upper_ok && self.best_ok
    }
}

/// Minimum of `||q alpha||` over `lo <= q < hi` with the smallest minimizer.
fn scan_min(rn: &RotationNumber, lo: u64, hi: u64) -> Result<(u64, f64)> {
    let starts: Vec<u64> = (lo..hi).step_by(CHUNK as usize).collect();
    let parts: Vec<Result<(u64, f64)>> = starts
        .par_iter()
        .map(|&s| {
            let mut best = (0u64, f64::INFINITY);
            for q in s..(s + CHUNK).min(hi) {
                let d = rn.dist_mul(q as i128)?;
                if d < best.1 {
                    best = (q, d);
                }
            }
            Ok(best)
        })
        .collect();
    let mut best = (0u64, f64::INFINITY);
    for p in parts {
        let p = p?;
        if p.1 < best.1 {
            best = p;
        }
    }
    Ok(best)
}

/// Checks the sandwich `1/(2q_{k+1}) < ||q_k alpha|| < 1/q_{k+1}` exactly and
/// that `q_k` minimizes `||q alpha||` over `1 <= q < q_{k+1}`.
pub fn check_best_approx(rn: &RotationNumber, k: usize) -> Result<BestApproxReport> {
    if k == 0 || k > rn.depth() {
        return Err(Error::Range(format!("k = {k} outside 1..={}", rn.depth())));
    }
    if k == rn.depth() {
        if rn.is_terminated() {
            return Ok(BestApproxReport {
                k,
                q_k: rn.q(k).to_string(),
                dist: 0.0,
                lower_ok: true,
                upper_ok: true,
                best_ok: true,
                method: BestApproxMethod::Terminal,
            });
        }
        return Err(Error::Range(format!("q_{} is not expanded", k + 1)));
    }
    let qn = rn.q(k + 1);
    let upper = BigRational::new(BigInt::one(), qn.clone());
    let lower = BigRational::new(BigInt::one(), qn * 2);
    let upper_ok = rn.cmp_convergent_error(k, &upper)? == Ordering::Less;
    let lower_ok = rn.cmp_convergent_error(k, &lower)? == Ordering::Greater;
    let dist = rn.dist_convergent(k)?;
    let (best_ok, method) = match qn.to_u64().filter(|&v| v <= SCAN_CAP) {
        Some(hi) => {
            let qk = rn.q(k).to_i128().expect("below scan cap");
            let dk = rn.dist_mul(qk)?;
            let (minimizer, minimum) = scan_min(rn, 1, hi)?;
            (dk <= minimum, BestApproxMethod::Scan { minimizer, minimum })
        }
        None => {
            let det = rn.q(k) * rn.l(k + 1) - rn.l(k) * rn.q(k + 1);
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let ok = det.abs().is_one()
                && rn.convergent_error_sign(k) != rn.convergent_error_sign(k + 1)
                && rn.cmp_convergent_error(k, &half)? != Ordering::Greater;
            (ok, BestApproxMethod::Certificate)
        }
    };
    Ok(BestApproxReport { k, q_k: rn.q(k).to_string(), dist, lower_ok, upper_ok, best_ok, method })
}

#[derive(Clone, Debug, Serialize)]
pub struct SmallDenominatorSums {
    pub k: usize,
    /// `sum_{0<|q|<q_k} ||q alpha||^-1`.
    pub s1: f64,
    /// `sum_{0<|q|<q_{k+1}} ||q alpha||^-2`.
    pub s2: f64,
    /// `s1 / (q_k log(q_k + 1))`.
    pub ratio1: f64,
    /// `s2 / q_{k+1}^2`.
    pub ratio2: f64,
}

fn sum_pow(rn: &RotationNumber, lo: u64, hi: u64, f: impl Fn(u64, f64) -> f64 + Sync) -> Result<f64> {
    let starts: Vec<u64> = (lo..hi).step_by(CHUNK as usize).collect();
    let parts: Vec<Result<f64>> = starts
        .par_iter()
        .map(|&s| {
            let mut acc = 0.0;
            for q in s..(s + CHUNK).min(hi) {
                let d = rn.dist_mul(q as i128)?;
                if d == 0.0 {
                    return Err(Error::SmallDivisor { freq: q as i64, size: 0.0 });
                }
                acc += f(q, d);
            }
            Ok(acc)
        })
        .collect();
    parts.into_iter().try_fold(0.0, |a, p| Ok(a + p?))
}

fn scan_bound(rn: &RotationNumber, k: usize) -> Result<u64> {
    rn.q(k)
        .to_u64()
        .filter(|&v| v <= 4 * SCAN_CAP)
        .ok_or_else(|| Error::Range(format!("q_{k} exceeds the summation budget {}", 4 * SCAN_CAP)))
}

/// Direct evaluation of the two small-denominator sums at level `k`.
pub fn small_denominator_sums(rn: &RotationNumber, k: usize) -> Result<SmallDenominatorSums> {
    if k == 0 || k + 1 > rn.depth() {
        return Err(Error::Range(format!("k = {k} needs q_(k+1) within depth {}", rn.depth())));
    }
    let qk = scan_bound(rn, k)?;
    let qn = scan_bound(rn, k + 1)?;
    let s1 = 2.0 * sum_pow(rn, 1, qk, |_, d| 1.0 / d)?;
    let s2 = 2.0 * sum_pow(rn, 1, qn, |_, d| 1.0 / (d * d))?;
    let qkf = qk as f64;
    let qnf = qn as f64;
    Ok(SmallDenominatorSums { k, s1, s2, ratio1: s1 / (qkf * (qkf + 1.0).ln()), ratio2: s2 / (qnf * qnf) })
}

/// `sum_{q_k <= |q| < q_{k+1}} q^-2 min(||q alpha||^-2, c^2)`.
pub fn truncated_sum(rn: &RotationNumber, k: usize, c: f64) -> Result<f64> {
    if k + 1 > rn.depth() {
        return Err(Error::Range(format!("k = {k} needs q_(k+1)")));
    }
    let lo = scan_bound(rn, k)?;
    let hi = scan_bound(rn, k + 1)?;
    let c2 = c * c;
    Ok(2.0 * sum_pow(rn, lo, hi, |q, d| (1.0 / (d * d)).min(c2) / (q as f64 * q as f64))?)
}

/// Largest `truncated_sum * q_k / c` over `c` on a geometric grid in `[1, q_k]`.
pub fn truncated_sum_constant(rn: &RotationNumber, k: usize) -> Result<f64> {
    let qk = scan_bound(rn, k)? as f64;
    let steps = 16;
    let mut worst: f64 = 0.0;
    for i in 0..=steps {
        let c = qk.powf(i as f64 / steps as f64);
        worst = worst.max(truncated_sum(rn, k, c)? * qk / c);
    }
    Ok(worst)
}
