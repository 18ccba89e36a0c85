//! Finite Fourier series with declared decay classes, the resonant split and
//! the coboundary solver.

use std::collections::BTreeMap;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::{cis, e_alpha, geom, one_minus_e_alpha, Compensated};
use crate::numtheory::{IndexSets, RotationNumber};
use crate::scalar::FloatScalar;

/// Largest spectrum a product may produce.
pub const MAX_WIDTH: i64 = 1 << 14;
const DIVISOR_FLOOR: f64 = 1e-300;

/// `|f^(m)| <= c |m|^-r` for every nonzero stored frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayClass {
    pub r: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

/// A trigonometric polynomial `sum_m f^(m) e(m t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFn<T> {
    coeffs: BTreeMap<i64, Complex<T>>,
    decay: Option<DecayClass>,
}

impl<T: FloatScalar> PeriodicFn<T> {
    /// Builds from coefficients (frequency 0 is the mean), checking the decay
    /// certificate when one is given.
    pub fn new(coeffs: impl IntoIterator<Item = (i64, Complex<T>)>, decay: Option<DecayClass>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (m, c) in coeffs {
            let e = map.entry(m).or_insert(Complex::new(T::zero(), T::zero()));
            *e = *e + c;
        }
        map.retain(|_, c: &mut Complex<T>| c.re != T::zero() || c.im != T::zero());
        let f = PeriodicFn { coeffs: map, decay };
        if let Some(d) = decay {
            for (&m, c) in f.coeffs.iter().filter(|(&m, _)| m != 0) {
                let bound = d.c * (m.unsigned_abs() as f64).powf(-d.r);
                let size = c.norm().to_f64_lossy();
                if size > bound * (1.0 + 1e-12) {
                    return Err(Error::Precondition(format!(
                        "|f^({m})| = {size} violates the decay class C |m|^-r = {bound}"
                    )));
                }
            }
        }
        Ok(f)
    }

    /// Real-valued function from coefficients at `m >= 0`; negative
    /// frequencies are filled by conjugation.
    pub fn real(half: impl IntoIterator<Item = (i64, Complex<T>)>, decay: Option<DecayClass>) -> Result<Self> {
        let mut all = Vec::new();
        for (m, c) in half {
            if m < 0 {
                return Err(Error::Precondition("real() takes frequencies m >= 0".into()));
            }
            if m == 0 {
                all.push((0, Complex::new(c.re, T::zero())));
            } else {
                all.push((m, c));
                all.push((-m, c.conj()));
            }
        }
        Self::new(all, decay)
    }

    pub fn zero() -> Self {
        PeriodicFn { coeffs: BTreeMap::new(), decay: None }
    }

    pub fn constant(c: T) -> Self {
        Self::new([(0, Complex::new(c, T::zero()))], None).expect("no decay class")
    }

    /// `amp cos(2 pi m t)`.
    pub fn cos(m: i64, amp: T) -> Self {
        let h = amp * T::of(0.5);
        Self::new([(m, Complex::new(h, T::zero())), (-m, Complex::new(h, T::zero()))], None).expect("no decay class")
    }

    /// `amp sin(2 pi m t)`.
    pub fn sin(m: i64, amp: T) -> Self {
        let h = amp * T::of(0.5);
        Self::new([(m, Complex::new(T::zero(), -h)), (-m, Complex::new(T::zero(), h))], None).expect("no decay class")
    }

    /// `e(m t)`.
    pub fn exp(m: i64) -> Self {
        Self::new([(m, Complex::new(T::one(), T::zero()))], None).expect("no decay class")
    }

    pub fn with_decay(mut self, decay: DecayClass) -> Result<Self> {
        self.decay = Some(decay);
        Self::new(self.coeffs, self.decay)
    }

    pub fn decay(&self) -> Option<DecayClass> {
        self.decay
    }

    pub fn coeff(&self, m: i64) -> Complex<T> {
        self.coeffs.get(&m).copied().unwrap_or(Complex::new(T::zero(), T::zero()))
    }

    pub fn mean(&self) -> Complex<T> {
        self.coeff(0)
    }

    /// Nonzero coefficients in increasing frequency order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex<T>)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Largest `|m|` in the spectrum.
    pub fn width(&self) -> i64 {
        self.coeffs.keys().map(|m| m.abs()).max().unwrap_or(0)
    }

    /// `f^(-m) = conj f^(m)` within `tol`.
    pub fn is_real(&self, tol: T) -> bool {
        self.coeffs.iter().all(|(&m, &c)| (self.coeff(-m).conj() - c).norm() <= tol)
    }

    /// `sum |f^(m)|`, a bound for `sup |f|`.
    pub fn l1_norm(&self) -> T {
        self.coeffs.values().fold(T::zero(), |a, c| a + c.norm())
    }

    pub fn eval(&self, t: T) -> Complex<T> {
        let mut acc = Compensated::default();
        for (&m, &c) in &self.coeffs {
            let x = T::of(m as f64) * t;
            acc.add(c * cis(x - x.floor()));
        }
        acc.value()
    }

    pub fn eval_re(&self, t: T) -> T {
        self.eval(t).re
    }

    pub fn map_coeffs(&self, f: impl Fn(i64, Complex<T>) -> Complex<T>) -> Self {
        Self::new(self.coeffs.iter().map(|(&m, &c)| (m, f(m, c))), None).expect("no decay class")
    }

    pub fn scale(&self, s: T) -> Self {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.terms().chain(other.terms()), None).expect("no decay class")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-T::one()))
    }

    /// Exact product by convolution of the spectra.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let width = self.width() + other.width();
        if width > MAX_WIDTH {
            return Err(Error::Truncation { width: width as usize, cap: MAX_WIDTH as usize });
        }
        let mut out = Vec::with_capacity(self.coeffs.len() * other.coeffs.len());
        for (&m, &a) in &self.coeffs {
            for (&n, &b) in &other.coeffs {
                out.push((m + n, a * b));
            }
        }
        Self::new(out, None)
    }

    /// `f(t + k alpha)`.
    pub fn shift(&self, rn: &RotationNumber, k: i64) -> Self {
        self.map_coeffs(|m, c| c * e_alpha::<T>(rn, m as i128 * k as i128))
    }

    /// `Delta_alpha f = f o l_alpha - f`.
    pub fn delta(&self, rn: &RotationNumber) -> Self {
        self.shift(rn, 1).sub(self)
    }

    pub fn cast<U: FloatScalar>(&self) -> PeriodicFn<U> {
        PeriodicFn {
            coeffs: self
                .coeffs
                .iter()
                .map(|(&m, c)| (m, Complex::new(U::of(c.re.to_f64_lossy()), U::of(c.im.to_f64_lossy()))))
                .collect(),
            decay: self.decay,
        }
    }
}

/// `f = plus + minus` with `minus = Delta_alpha cobound`.
#[derive(Clone, Debug)]
pub struct ResonantSplit<T> {
    pub plus: PeriodicFn<T>,
    pub minus: PeriodicFn<T>,
    pub cobound: PeriodicFn<T>,
}

/// Partitions the spectrum by `M_1(B)` / `M_2(B)` and solves the coboundary
/// equation on `M_2(B)`: `g^(m) = f^(m) / (e(m alpha) - 1)`.
pub fn split_resonant<T: FloatScalar>(
    f: &PeriodicFn<T>,
    sets: &IndexSets,
    rn: &RotationNumber,
) -> Result<ResonantSplit<T>> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    let mut cob = Vec::new();
    for (m, c) in f.terms() {
        if sets.in_m1(m)? {
            plus.push((m, c));
            continue;
        }
        let d = -one_minus_e_alpha::<T>(rn, m as i128);
        if d.norm().to_f64_lossy() < DIVISOR_FLOOR {
            return Err(Error::SmallDivisor { freq: m, size: d.norm().to_f64_lossy() });
        }
        minus.push((m, c));
        cob.push((m, c / d));
    }
    Ok(ResonantSplit {
        plus: PeriodicFn::new(plus, None)?,
        minus: PeriodicFn::new(minus, None)?,
        cobound: PeriodicFn::new(cob, None)?,
    })
}

/// Result of [`birkhoff_avg_defect`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AvgDefect {
    pub defect: f64,
    /// `q^-B`.
    pub comparison: f64,
}

/// `max_t |(1/q) sum_{j=0}^{q} f(t + j alpha) - f^(0)|` over `grid` equispaced
/// points. The sum has `q + 1` terms.
pub fn birkhoff_avg_defect<T: FloatScalar>(
    f: &PeriodicFn<T>,
    rn: &RotationNumber,
    q: u64,
    b: f64,
    grid: usize,
) -> Result<AvgDefect> {
    if q == 0 || grid == 0 {
        return Err(Error::Range("q and grid must be positive".into()));
    }
    let qt = T::of(q as f64);
    let avg = PeriodicFn::new(
        f.terms().map(|(m, c)| {
            if m == 0 {
                (0, c / qt)
            } else {
                (m, c * geom::<T>(rn, m as i128, q + 1) / qt)
            }
        }),
        None,
    )?;
    let mut worst = 0.0f64;
    for i in 0..grid {
        let t = T::of(i as f64 / grid as f64);
        worst = worst.max(avg.eval(t).norm().to_f64_lossy());
    }
    Ok(AvgDefect { defect: worst, comparison: (q as f64).powf(-b) })
}
