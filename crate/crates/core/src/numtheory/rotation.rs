use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use regex::Regex;

use super::surd::{sign_lin, Surd};
use crate::error::{Error, Result};

/// Partial quotient generator: `k -> a_k` for `k >= 1`.
pub type QuotientFn = Arc<dyn Fn(usize) -> BigInt + Send + Sync>;

const TWO_128: f64 = 340282366920938463463374607431768211456.0;
const FLOAT_TRUST_BITS: u32 = 50;
const TAIL_TERMS: usize = 48;

/// How a rotation number is specified.
#[derive(Clone)]
pub enum AlphaSpec {
    Rational { p: BigInt, q: BigInt },
    /// `(a + b sqrt(d)) / c`.
    Surd { a: BigInt, b: BigInt, d: BigInt, c: BigInt },
    /// `[0; prefix, period, period, ...]`; an empty period means a finite expansion.
    ContinuedFraction { prefix: Vec<BigInt>, period: Vec<BigInt> },
    Stream(QuotientFn),
    Float(f64),
}

impl AlphaSpec {
    pub fn rational(p: i64, q: i64) -> Self {
        AlphaSpec::Rational { p: p.into(), q: q.into() }
    }

    pub fn surd(a: i64, b: i64, d: i64, c: i64) -> Self {
        AlphaSpec::Surd { a: a.into(), b: b.into(), d: d.into(), c: c.into() }
    }

    /// `(sqrt(5) - 1) / 2`.
    pub fn golden() -> Self {
        Self::surd(-1, 1, 5, 2)
    }

    pub fn stream(f: impl Fn(usize) -> BigInt + Send + Sync + 'static) -> Self {
        AlphaSpec::Stream(Arc::new(f))
    }
}

impl fmt::Debug for AlphaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Rational { p, q } => write!(f, "rational:{p}/{q}"),
            AlphaSpec::Surd { a, b, d, c } => write!(f, "surd:({a}+{b}*sqrt({d}))/{c}"),
            AlphaSpec::ContinuedFraction { prefix, period } => {
                write!(f, "cf:{prefix:?}")?;
                if !period.is_empty() {
                    write!(f, " repeat:{period:?}")?;
                }
                Ok(())
            }
            AlphaSpec::Stream(_) => write!(f, "stream"),
            AlphaSpec::Float(v) => write!(f, "float:{v}"),
        }
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::Parse(format!("not an integer: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<BigInt>> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_int).collect()
}

impl FromStr for AlphaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        static SURD: OnceLock<Regex> = OnceLock::new();
        static CF: OnceLock<Regex> = OnceLock::new();
        let s = s.trim();
        if s == "golden" {
            return Ok(AlphaSpec::golden());
        }
        if let Some(rest) = s.strip_prefix("rational:") {
            let (p, q) = rest
                .split_once('/')
                .ok_or_else(|| Error::Parse(format!("expected p/q in {s:?}")))?;
            return Ok(AlphaSpec::Rational { p: parse_int(p)?, q: parse_int(q)? });
        }
        if s.starts_with("surd:") {
            let re = SURD.get_or_init(|| {
                Regex::new(
                    r"^surd:\(\s*([+-]?\d+)\s*([+-])\s*(\d*)\s*\*?\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*([+-]?\d+)$",
                )
                .expect("static regex")
            });
            let c = re
                .captures(s)
                .ok_or_else(|| Error::Parse(format!("expected surd:(a+b*sqrt(d))/c, got {s:?}")))?;
            let mut b = if c[3].is_empty() { BigInt::one() } else { parse_int(&c[3])? };
            if &c[2] == "-" {
                b = -b;
            }
            return Ok(AlphaSpec::Surd {
                a: parse_int(&c[1])?,
                b,
                d: parse_int(&c[4])?,
                c: parse_int(&c[5])?,
            });
        }
        if s.starts_with("cf:") {
            let re = CF.get_or_init(|| {
                Regex::new(r"^cf:\[([^\]]*)\]\s*(?:[,;]?\s*repeat:\[([^\]]*)\])?$").expect("static regex")
            });
            let c = re
                .captures(s)
                .ok_or_else(|| Error::Parse(format!("expected cf:[...] [repeat:[...]], got {s:?}")))?;
            let prefix = parse_list(&c[1])?;
            let period = match c.get(2) {
                Some(m) => {
                    let p = parse_list(m.as_str())?;
                    if p.is_empty() {
                        return Err(Error::Parse("empty repeat block".into()));
                    }
                    p
                }
                None => Vec::new(),
            };
            return Ok(AlphaSpec::ContinuedFraction { prefix, period });
        }
        Err(Error::Parse(format!("unknown alpha form {s:?}")))
    }
}

#[derive(Clone)]
enum Source {
    Rational { p: BigInt, q: BigInt, from_float: bool },
    Surd(Surd),
    Stream(QuotientFn),
}

/// A rotation number with its continued fraction expanded to a fixed depth.
///
/// Convergents are exact; `||m alpha||` is computed from an exact residue
/// (rational) or a 128-bit fixed-point fraction with a tracked error bound.
#[derive(Clone)]
pub struct RotationNumber {
    source: Source,
    a: Vec<BigInt>,
    l: Vec<BigInt>,
    q: Vec<BigInt>,
    x: Vec<f64>,
    terminated: bool,
    fix: u128,
    fix_err: u128,
    small_rational: Option<(i128, i128)>,
    value: f64,
}

impl fmt::Debug for RotationNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RotationNumber")
            .field("value", &self.value)
            .field("depth", &self.depth())
            .field("terminated", &self.terminated)
            .finish()
    }
}

fn cf_matrix(qs: &[BigInt]) -> [BigInt; 4] {
    let mut m = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::one()];
    for a in qs {
        m = [
            &m[0] * a + &m[1],
            m[0].clone(),
            &m[2] * a + &m[3],
            m[2].clone(),
        ];
    }
    m
}

/// Exact value of `[0; prefix, period, period, ...]`.
fn periodic_to_source(prefix: &[BigInt], period: &[BigInt]) -> Result<Source> {
    if prefix.iter().chain(period).any(|a| !a.is_positive()) {
        return Err(Error::Parse("partial quotients must be positive".into()));
    }
    let mut full = vec![BigInt::zero()];
    full.extend_from_slice(prefix);
    if period.is_empty() {
        let m = cf_matrix(&full);
        return rational_source(m[0].clone(), m[2].clone(), false);
    }
    // y = [period; y] solves m2 y^2 + (m3 - m0) y - m1 = 0.
    let m = cf_matrix(period);
    let disc = (&m[3] - &m[0]) * (&m[3] - &m[0]) + BigInt::from(4) * &m[2] * &m[1];
    let ya = &m[0] - &m[3];
    let yc = BigInt::from(2) * &m[2];
    // alpha = (n0 y + n1) / (n2 y + n3) with y = (ya + sqrt(disc)) / yc.
    let n = cf_matrix(&full);
    let u1 = &n[0] * &ya + &n[1] * &yc;
    let v1 = n[0].clone();
    let u2 = &n[2] * &ya + &n[3] * &yc;
    let v2 = n[2].clone();
    let a = &u1 * &u2 - &v1 * &v2 * &disc;
    let b = &v1 * &u2 - &u1 * &v2;
    let c = &u2 * &u2 - &v2 * &v2 * &disc;
    let g = a.gcd(&b).gcd(&c);
    Ok(Source::Surd(Surd::new(a / &g, b / &g, disc, c / &g)?))
}

fn rational_source(p: BigInt, q: BigInt, from_float: bool) -> Result<Source> {
    if q.is_zero() {
        return Err(Error::Parse("zero denominator".into()));
    }
    let (mut p, mut q) = (p, q);
    if q.is_negative() {
        p = -p;
        q = -q;
    }
    let g = p.gcd(&q);
    if !g.is_zero() {
        p /= &g;
        q /= &g;
    }
    if p.is_negative() || p >= q {
        return Err(Error::Range(format!("alpha = {p}/{q} is outside [0, 1)")));
    }
    Ok(Source::Rational { p, q, from_float })
}

fn normalize(spec: &AlphaSpec) -> Result<Source> {
    match spec {
        AlphaSpec::Rational { p, q } => rational_source(p.clone(), q.clone(), false),
        AlphaSpec::Surd { a, b, d, c } => {
            let s = Surd::new(a.clone(), b.clone(), d.clone(), c.clone())?;
            if s.floor() != BigInt::zero() {
                return Err(Error::Range(format!("{spec:?} is outside [0, 1)")));
            }
            Ok(Source::Surd(s))
        }
        AlphaSpec::ContinuedFraction { prefix, period } => periodic_to_source(prefix, period),
        AlphaSpec::Stream(f) => Ok(Source::Stream(f.clone())),
        AlphaSpec::Float(v) => {
            if !v.is_finite() || *v < 0.0 || *v >= 1.0 {
                return Err(Error::Range(format!("alpha = {v} is outside [0, 1)")));
            }
            let r = BigRational::from_float(*v).expect("finite");
            rational_source(r.numer().clone(), r.denom().clone(), true)
        }
    }
}

fn big_to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Natural logarithm of a positive integer of any size.
pub fn big_ln(v: &BigInt) -> f64 {
    let bits = v.bits();
    if bits <= 1000 {
        big_to_f64(v).ln()
    } else {
        let shift = bits - 64;
        big_to_f64(&(v >> shift)).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn tail_value(qs: &[BigInt]) -> f64 {
    let mut x = f64::INFINITY;
    for a in qs.iter().rev() {
        x = big_to_f64(a) + 1.0 / x;
    }
    x
}

impl RotationNumber {
    /// Expands `spec` to `depth` partial quotients (fewer if it terminates).
    pub fn expand(spec: &AlphaSpec, depth: usize) -> Result<Self> {
        let source = normalize(spec)?;
        Self::build(source, depth)
    }

    /// Re-expands to a larger depth.
    pub fn extended(&self, depth: usize) -> Result<Self> {
        if depth <= self.depth() || self.terminated {
            return Ok(self.clone());
        }
        Self::build(self.source.clone(), depth)
    }

    fn build(source: Source, depth: usize) -> Result<Self> {
        if depth > 1 << 20 && !matches!(source, Source::Rational { .. }) {
            return Err(Error::Range(format!("depth {depth} for an irrational alpha")));
        }
        let mut a = vec![BigInt::zero()];
        let mut x = vec![f64::NAN];
        let mut terminated = false;
        match &source {
            Source::Rational { p, q, from_float } => {
                let (mut num, mut den) = (p.clone(), q.clone());
                while !num.is_zero() && a.len() <= depth.saturating_add(1) {
                    let (ak, r) = den.div_rem(&num);
                    x.push(BigRational::new(den.clone(), num.clone()).to_f64().unwrap_or(f64::INFINITY));
                    a.push(ak);
                    den = num;
                    num = r;
                }
                terminated = num.is_zero() && a.len() - 1 <= depth;
                if *from_float && !terminated && depth == usize::MAX {
                    return Err(Error::PrecisionExhausted("unbounded depth for a float alpha".into()));
                }
            }
            Source::Surd(s) => {
                let mut cur = s.next(&BigInt::zero());
                for _ in 0..=depth {
                    let ak = cur.floor();
                    x.push(cur.to_f64());
                    cur = cur.next(&ak);
                    a.push(ak);
                }
            }
            Source::Stream(f) => {
                let want = depth + 1;
                let mut qs = Vec::with_capacity(want + TAIL_TERMS);
                for k in 1..=want + TAIL_TERMS {
                    let ak = f(k);
                    if !ak.is_positive() {
                        return Err(Error::Parse(format!("partial quotient a_{k} = {ak} is not positive")));
                    }
                    qs.push(ak);
                }
                for k in 0..want {
                    x.push(tail_value(&qs[k..k + TAIL_TERMS]));
                    a.push(qs[k].clone());
                }
            }
        }
        // a and x carry one extra quotient so the last convergent's distance is available.
        let kmax = if terminated { a.len() - 1 } else { (a.len() - 2).min(depth) };
        let mut l = vec![BigInt::zero()];
        let mut q = vec![BigInt::one()];
        let (mut lp, mut qp) = (BigInt::one(), BigInt::zero());
        for k in 1..=kmax {
            let ln = &a[k] * &l[k - 1] + &lp;
            let qn = &a[k] * &q[k - 1] + &qp;
            lp = l[k - 1].clone();
            qp = q[k - 1].clone();
            l.push(ln);
            q.push(qn);
        }
        if let Source::Rational { from_float: true, .. } = &source {
            let limit = BigInt::one() << FLOAT_TRUST_BITS;
            if let Some(k) = q.iter().position(|qk| qk * qk > limit) {
                return Err(Error::PrecisionExhausted(format!(
                    "float alpha resolves convergents only up to k = {}, requested {kmax}",
                    k.saturating_sub(1)
                )));
            }
        }
        let (fix, fix_err, value) = match &source {
            Source::Rational { p, q, .. } => {
                let f = ((p << 128usize) / q).to_u128().expect("alpha < 1");
                let v = BigRational::new(p.clone(), q.clone()).to_f64().unwrap_or(0.0);
                (f, 1, v)
            }
            Source::Surd(s) => {
                let f = s.fixed_frac();
                (f, 1, f as f64 / TWO_128)
            }
            Source::Stream(g) => {
                let bound = BigInt::one() << 66;
                let (mut l0, mut q0) = (BigInt::one(), BigInt::zero());
                let (mut l1, mut q1) = (BigInt::zero(), BigInt::one());
                let mut k = 1;
                while q1 < bound {
                    let ak = g(k);
                    let l2 = &ak * &l1 + &l0;
                    let q2 = &ak * &q1 + &q0;
                    l0 = l1;
                    q0 = q1;
                    l1 = l2;
                    q1 = q2;
                    k += 1;
                }
                let f = ((&l1 << 128usize) / &q1).to_u128().expect("alpha < 1");
                (f, 2, f as f64 / TWO_128)
            }
        };
        let small_rational = match &source {
            Source::Rational { p, q, .. } if q.bits() < 62 => {
                Some((p.to_i128().expect("fits"), q.to_i128().expect("fits")))
            }
            _ => None,
        };
        a.truncate(kmax + 2);
        x.truncate(kmax + 2);
        Ok(RotationNumber { source, a, l, q, x, terminated, fix, fix_err, small_rational, value })
    }

    /// Index of the last expanded convergent.
    pub fn depth(&self) -> usize {
        self.q.len() - 1
    }

    pub fn is_rational(&self) -> bool {
        matches!(self.source, Source::Rational { from_float: false, .. })
    }

    /// True once a rational expansion has been exhausted.
    pub fn is_terminated(&self) -> bool {
        self.terminated
    }

    /// `(p, q)` for rational inputs.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        match &self.source {
            Source::Rational { p, q, from_float: false } => Some((p.clone(), q.clone())),
            _ => None,
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Partial quotient `a_k`, `k >= 1`.
    pub fn a(&self, k: usize) -> &BigInt {
        &self.a[k]
    }

    pub fn l(&self, k: usize) -> &BigInt {
        &self.l[k]
    }

    pub fn q(&self, k: usize) -> &BigInt {
        &self.q[k]
    }

    pub fn qs(&self) -> &[BigInt] {
        &self.q
    }

    pub fn q_u64(&self, k: usize) -> Option<u64> {
        self.q.get(k).and_then(|v| v.to_u64())
    }

    pub fn q_f64(&self, k: usize) -> f64 {
        big_to_f64(&self.q[k])
    }

    pub fn ln_q(&self, k: usize) -> f64 {
        big_ln(&self.q[k])
    }

    /// Complete quotient `x_k` with `a_k = floor(x_k)`, as a float.
    pub fn complete_quotient(&self, k: usize) -> Option<f64> {
        self.x.get(k).copied()
    }

    /// `frac(m alpha)` in `[0, 1)`; exactly 0 when `m alpha` is an integer.
    pub fn phase(&self, m: i128) -> f64 {
        if let Some((p, q)) = self.small_rational {
            let r = (m.rem_euclid(q) * p).rem_euclid(q);
            return r as f64 / q as f64;
        }
        if let Source::Rational { p, q, .. } = &self.source {
            let r = (BigInt::from(m) * p).mod_floor(q);
            return BigRational::new(r, q.clone()).to_f64().unwrap_or(0.0);
        }
        (m as u128).wrapping_mul(self.fix) as f64 / TWO_128
    }

    /// `<m alpha>` in `(-1/2, 1/2]`.
    pub fn signed_phase(&self, m: i128) -> f64 {
        if let Some((p, q)) = self.small_rational {
            let r = (m.rem_euclid(q) * p).rem_euclid(q);
            return if 2 * r > q { (r - q) as f64 / q as f64 } else { r as f64 / q as f64 };
        }
        if let Source::Rational { p, q, .. } = &self.source {
            let r = (BigInt::from(m) * p).mod_floor(q);
            let s = if BigInt::from(2) * &r > *q { r - q } else { r };
            return BigRational::new(s, q.clone()).to_f64().unwrap_or(0.0);
        }
        let v = (m as u128).wrapping_mul(self.fix);
        if v > 1u128 << 127 {
            -(v.wrapping_neg() as f64 / TWO_128)
        } else {
            v as f64 / TWO_128
        }
    }

    /// Absolute error bound of `phase(m)` beyond float rounding.
    pub fn phase_error(&self, m: i128) -> f64 {
        if self.small_rational.is_some() || matches!(self.source, Source::Rational { .. }) {
            0.0
        } else {
            m.unsigned_abs() as f64 * self.fix_err as f64 / TWO_128
        }
    }

    /// `||m alpha||`, failing when the fixed-point error is not small
    /// relative to the value.
    pub fn dist_mul(&self, m: i128) -> Result<f64> {
        let d = self.signed_phase(m).abs();
        let err = self.phase_error(m);
        if err > 0.0 && err > 1e-9 * d {
            return Err(Error::PrecisionExhausted(format!(
                "||{m} alpha|| = {d:e} is below the 128-bit resolution {err:e}"
            )));
        }
        Ok(d)
    }

    /// `frac(t + m alpha)`.
    pub fn rotate(&self, t: f64, m: i128) -> f64 {
        let s = t + self.phase(m);
        let s = s - s.floor();
        if s >= 1.0 {
            0.0
        } else {
            s
        }
    }

    /// `||q_k alpha||` from the complete quotient, `1 / (x_{k+1} q_k + q_{k-1})`.
    pub fn dist_convergent(&self, k: usize) -> Result<f64> {
        if k > self.depth() {
            return Err(Error::Range(format!("k = {k} beyond expanded depth {}", self.depth())));
        }
        if self.terminated && k == self.depth() {
            return Ok(0.0);
        }
        if k == 0 {
            return Ok(self.signed_phase(1).abs());
        }
        let xk = self.x[k + 1];
        let qk = self.q_f64(k);
        let qp = if k == 0 { 0.0 } else { self.q_f64(k - 1) };
        let d = 1.0 / (xk * qk + qp);
        if !d.is_finite() || d == 0.0 {
            return Err(Error::PrecisionExhausted(format!("||q_{k} alpha|| underflows")));
        }
        Ok(d)
    }

    /// Compares `|q_k alpha - l_k|` with a positive rational threshold, exactly.
    pub fn cmp_convergent_error(&self, k: usize, thr: &BigRational) -> Result<Ordering> {
        let qk = &self.q[k];
        let lk = &self.l[k];
        let (n, dd) = (thr.numer(), thr.denom());
        match &self.source {
            Source::Rational { p, q, .. } => {
                let err = BigRational::new((qk * p - lk * q).abs(), q.clone());
                Ok(err.cmp(thr))
            }
            Source::Surd(s) => {
                let (u, v, w) = s.linear();
                let uu = qk * &u - lk * &w;
                let vv = qk * &v;
                let d = s.radicand();
                let sgn = match sign_lin(&uu, &vv, d) {
                    Ordering::Less => BigInt::from(-1),
                    _ => BigInt::one(),
                };
                Ok(sign_lin(&(&sgn * dd * &uu - n * &w), &(&sgn * dd * &vv), d))
            }
            Source::Stream(f) => {
                let (mut l0, mut q0) = if k == 0 {
                    (BigInt::one(), BigInt::zero())
                } else {
                    (self.l[k - 1].clone(), self.q[k - 1].clone())
                };
                let (mut l1, mut q1) = (lk.clone(), qk.clone());
                for j in k + 1..k + 400 {
                    let aj = f(j);
                    let l2 = &aj * &l1 + &l0;
                    let q2 = &aj * &q1 + &q0;
                    l0 = l1;
                    q0 = q1;
                    l1 = l2;
                    q1 = q2;
                    if j < k + 2 {
                        continue;
                    }
                    let e0 = BigRational::new((qk * &l0 - lk * &q0).abs(), q0.clone());
                    let e1 = BigRational::new((qk * &l1 - lk * &q1).abs(), q1.clone());
                    let (lo, hi) = if e0 < e1 { (e0, e1) } else { (e1, e0) };
                    if *thr <= lo {
                        return Ok(Ordering::Greater);
                    }
                    if *thr >= hi {
                        return Ok(Ordering::Less);
                    }
                }
                Err(Error::PrecisionExhausted(format!("cannot separate |D_{k}| from {thr}")))
            }
        }
    }

    /// Sign of `q_k alpha - l_k` (exact).
    pub fn convergent_error_sign(&self, k: usize) -> Ordering {
        match &self.source {
            Source::Rational { p, q, .. } => (&self.q[k] * p).cmp(&(&self.l[k] * q)),
            Source::Surd(s) => {
                let (u, v, w) = s.linear();
                sign_lin(&(&self.q[k] * &u - &self.l[k] * &w), &(&self.q[k] * &v), s.radicand())
            }
            Source::Stream(_) => {
                if k % 2 == 0 {
                    Ordering::Greater
                } else {
                    Ordering::Less
                }
            }
        }
    }
}
