use crate::scalar::Scalar;

/// Signed distance to the nearest integer, `<z> = z - n_z`, with the tie
/// `<n + 1/2> = +1/2`.
pub fn signed_frac<S: Scalar>(z: &S) -> S {
    let n = (z.clone() - S::half()).integer_ceil();
    z.clone() - n
}

/// `(<z>, ||z||)`.
pub fn nearest_frac<S: Scalar>(z: &S) -> (S, S) {
    let s = signed_frac(z);
    let d = s.abs();
    (s, d)
}

/// `||z||`, the distance to the nearest integer.
pub fn dist_int<S: Scalar>(z: &S) -> S {
    signed_frac(z).abs()
}

/// Fractional part in `[0, 1)`.
pub fn frac01<S: Scalar>(z: &S) -> S {
    z.clone() - z.integer_floor()
}
