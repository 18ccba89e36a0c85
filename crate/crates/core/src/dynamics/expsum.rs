//! Closed forms for `sum_{j=1}^{n-1} sum_{r=0}^{j-1} e((u r + v j) alpha)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{e_alpha, geom, one_minus_e_alpha};
use crate::numtheory::RotationNumber;
use crate::scalar::FloatScalar;

const DIVISOR_FLOOR: f64 = 1e-300;

fn divisor<T: FloatScalar>(rn: &RotationNumber, u: i64) -> Result<Complex<T>> {
    let d = one_minus_e_alpha::<T>(rn, u as i128);
    let size = d.norm().to_f64_lossy();
    if size < DIVISOR_FLOOR {
        return Err(Error::SmallDivisor { freq: u, size });
    }
    Ok(d)
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::Range("n must be at least 1".into()))
    } else {
        Ok(())
    }
}

/// The diagonal case `v = -u`:
/// `{(1 - e(-n u alpha)) / (1 - e(-u alpha)) - n} / (1 - e(u alpha))`.
pub fn expsum_w0<T: FloatScalar>(u: i64, n: u64, rn: &RotationNumber) -> Result<Complex<T>> {
    check_n(n)?;
    let d = divisor::<T>(rn, u)?;
    Ok((geom::<T>(rn, -(u as i128), n) - T::of(n as f64)) / d)
}

/// Summing over `r` first; divides by `1 - e(u alpha)`.
pub fn expsum_w1<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber) -> Result<Complex<T>> {
    check_n(n)?;
    let d = divisor::<T>(rn, u)?;
    Ok(w1_unchecked(u, v, n, rn, d))
}

/// Summing over `j` first; divides by `1 - e(v alpha)`.
pub fn expsum_w2<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber) -> Result<Complex<T>> {
    check_n(n)?;
    let d = divisor::<T>(rn, v)?;
    Ok(w2_unchecked(u, v, n, rn, d))
}

fn w1_unchecked<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber, d: Complex<T>) -> Complex<T> {
    let (u, v) = (u as i128, v as i128);
    (geom::<T>(rn, v, n) - geom::<T>(rn, u + v, n)) / d
}

fn w2_unchecked<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber, d: Complex<T>) -> Complex<T> {
    let (u, v) = (u as i128, v as i128);
    let a = geom::<T>(rn, u + v, n) * e_alpha::<T>(rn, v);
    let b = geom::<T>(rn, u, n) * e_alpha::<T>(rn, n as i128 * v);
    (a - b) / d
}

/// Off-diagonal case `u + v != 0`, choosing the branch whose outer divisor
/// is larger. Routes `u + v = 0` to [`expsum_w0`].
pub fn expsum_w1w2<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber) -> Result<Complex<T>> {
    check_n(n)?;
    if v == 0 {
        return Err(Error::Precondition("expsum_w1w2 needs v != 0".into()));
    }
    if u + v == 0 {
        return expsum_w0(u, n, rn);
    }
    if rn.signed_phase(u as i128).abs() >= rn.signed_phase(v as i128).abs() {
        expsum_w1(u, v, n, rn)
    } else {
        expsum_w2(u, v, n, rn)
    }
}

/// The double sum for any `u, v`, including the degenerate cases where
/// `e(u alpha) = 1` or `e(v alpha) = 1` exactly.
pub fn double_sum<T: FloatScalar>(u: i64, v: i64, n: u64, rn: &RotationNumber) -> Complex<T> {
    let pu = rn.signed_phase(u as i128).abs();
    let pv = rn.signed_phase(v as i128).abs();
    if pu == 0.0 && pv == 0.0 {
        let n = n as f64;
        return Complex::new(T::of(n * (n - 1.0) / 2.0), T::zero());
    }
    if pu >= pv {
        w1_unchecked(u, v, n, rn, one_minus_e_alpha::<T>(rn, u as i128))
    } else {
        w2_unchecked(u, v, n, rn, one_minus_e_alpha::<T>(rn, v as i128))
    }
}
