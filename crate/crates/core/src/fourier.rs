//! Exponentials `e(x) = exp(2 pi i x)` at exact phases of `m alpha`.

use num_complex::Complex;

use crate::numtheory::RotationNumber;
use crate::scalar::FloatScalar;

/// `e(x)` for `x` in turns.
pub fn cis<T: FloatScalar>(turns: T) -> Complex<T> {
    let a = T::TAU() * turns;
    Complex::new(a.cos(), a.sin())
}

/// `e(m alpha)`.
pub fn e_alpha<T: FloatScalar>(rn: &RotationNumber, m: i128) -> Complex<T> {
    cis(T::of(rn.signed_phase(m)))
}

/// `1 - e(theta)` for a signed phase, accurate for small `theta`.
pub fn one_minus_cis<T: FloatScalar>(theta: T) -> Complex<T> {
    let s = (T::PI() * theta).sin();
    let two = T::of(2.0);
    Complex::new(two * s * s, -(T::TAU() * theta).sin())
}

/// `1 - e(m alpha)`.
pub fn one_minus_e_alpha<T: FloatScalar>(rn: &RotationNumber, m: i128) -> Complex<T> {
    one_minus_cis(T::of(rn.signed_phase(m)))
}

/// `sum_{j=0}^{n-1} e(j m alpha)`.
pub fn geom<T: FloatScalar>(rn: &RotationNumber, m: i128, n: u64) -> Complex<T> {
    if rn.phase(m) == 0.0 {
        return Complex::new(T::of(n as f64), T::zero());
    }
    one_minus_e_alpha::<T>(rn, m * n as i128) / one_minus_e_alpha::<T>(rn, m)
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug)]
pub struct Compensated<T> {
    sum: Complex<T>,
    comp: Complex<T>,
}

impl<T: FloatScalar> Default for Compensated<T> {
    fn default() -> Self {
        Compensated { sum: Complex::new(T::zero(), T::zero()), comp: Complex::new(T::zero(), T::zero()) }
    }
}

fn neumaier<T: FloatScalar>(sum: &mut T, comp: &mut T, v: T) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp = *comp + ((*sum - t) + v);
    } else {
        *comp = *comp + ((v - t) + *sum);
    }
    *sum = t;
}

impl<T: FloatScalar> Compensated<T> {
    pub fn add(&mut self, v: Complex<T>) {
        neumaier(&mut self.sum.re, &mut self.comp.re, v.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, v.im);
    }

    pub fn value(&self) -> Complex<T> {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::AlphaSpec;

    #[test]
    fn geom_matches_direct() {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 20).unwrap();
        for m in [-7i128, -1, 1, 3, 13] {
            for n in [1u64, 2, 17, 144] {
                let g: Complex<f64> = geom(&rn, m, n);
                let d: Complex<f64> = (0..n).map(|j| cis((j as f64 * m as f64 * rn.value()).fract())).sum();
                assert!((g - d).norm() < 1e-10, "m={m} n={n}");
            }
        }
        let r = RotationNumber::expand(&AlphaSpec::rational(1, 3), usize::MAX).unwrap();
        assert_eq!(geom::<f64>(&r, 3, 5), Complex::new(5.0, 0.0));
    }

    #[test]
    fn compensated_sum() {
        let mut c = Compensated::<f64>::default();
        c.add(Complex::new(1e16, 0.0));
        c.add(Complex::new(1.0, 0.0));
        c.add(Complex::new(-1e16, 0.0));
        assert_eq!(c.value().re, 1.0);
    }
}
