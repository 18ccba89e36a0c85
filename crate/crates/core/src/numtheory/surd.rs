use std::cmp::Ordering;

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A real quadratic irrational `(p + sqrt(d)) / q` with `q | d - p^2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    p: BigInt,
    d: BigInt,
    q: BigInt,
}

impl Surd {
    /// `(a + b sqrt(d)) / c`. Fails when the value is rational.
    pub fn new(a: BigInt, b: BigInt, d: BigInt, c: BigInt) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::Parse("surd denominator is zero".into()));
        }
        if d.is_negative() {
            return Err(Error::Parse("surd radicand is negative".into()));
        }
        if b.is_zero() || is_square(&d) {
            return Err(Error::Parse("surd value is rational".into()));
        }
        let (mut a, mut b, mut c) = (a, b, c);
        if c.is_negative() {
            a = -a;
            b = -b;
            c = -c;
        }
        let big_d = &b * &b * &d;
        let (mut p, mut q) = if b.is_positive() { (a, c) } else { (-a, -c) };
        let mut dd = big_d;
        if !(&dd - &p * &p).is_multiple_of(&q) {
            let qa = q.abs();
            p *= &qa;
            dd *= &q * &q;
            q *= &qa;
        }
        Ok(Surd { p, d: dd, q })
    }

    pub fn radicand(&self) -> &BigInt {
        &self.d
    }

    /// Writes the value as `(u + v sqrt(d)) / w` with `w > 0`.
    pub fn linear(&self) -> (BigInt, BigInt, BigInt) {
        if self.q.is_positive() {
            (self.p.clone(), BigInt::one(), self.q.clone())
        } else {
            (-&self.p, -BigInt::one(), -&self.q)
        }
    }

    pub fn floor(&self) -> BigInt {
        let s: BigInt = Roots::sqrt(&self.d);
        if self.q.is_positive() {
            (&self.p + s).div_floor(&self.q)
        } else {
            (&self.p + s + BigInt::one()).div_floor(&self.q)
        }
    }

    /// The complete quotient `1 / (x - a)`.
    pub fn next(&self, a: &BigInt) -> Surd {
        let p = a * &self.q - &self.p;
        let q = (&self.d - &p * &p) / &self.q;
        Surd { p, d: self.d.clone(), q }
    }

    pub fn to_f64(&self) -> f64 {
        let r = self.d.to_f64().unwrap_or(f64::INFINITY).sqrt();
        (self.p.to_f64().unwrap_or(f64::NAN) + r) / self.q.to_f64().unwrap_or(f64::NAN)
    }

    /// `floor(frac(x) * 2^128)`, exact.
    pub fn fixed_frac(&self) -> u128 {
        let shift = BigInt::one() << 128usize;
        let s: BigInt = Roots::sqrt(&(&self.d << 256usize));
        let num = &self.p * &shift + s;
        let scaled = if self.q.is_positive() {
            num.div_floor(&self.q)
        } else {
            (num + BigInt::one()).div_floor(&self.q)
        };
        let frac = scaled.mod_floor(&shift);
        frac.to_u128().expect("reduced below 2^128")
    }
}

/// Sign of `u + v sqrt(d)` for non-square `d > 0`.
pub fn sign_lin(u: &BigInt, v: &BigInt, d: &BigInt) -> Ordering {
    let su = u.sign();
    let sv = v.sign();
    match (su, sv) {
        (Sign::NoSign, Sign::NoSign) => Ordering::Equal,
        (Sign::Minus, Sign::Minus) | (Sign::Minus, Sign::NoSign) | (Sign::NoSign, Sign::Minus) => {
            Ordering::Less
        }
        (Sign::Plus, Sign::Plus) | (Sign::Plus, Sign::NoSign) | (Sign::NoSign, Sign::Plus) => {
            Ordering::Greater
        }
        (Sign::Plus, Sign::Minus) => (u * u).cmp(&(v * v * d)),
        (Sign::Minus, Sign::Plus) => (v * v * d).cmp(&(u * u)),
    }
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let s: BigInt = Roots::sqrt(n);
    &s * &s == *n
}
