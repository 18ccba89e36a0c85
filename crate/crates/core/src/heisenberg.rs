//! The Heisenberg group, its nilmanifold `Gamma \ G` and the phase space
//! `T x Gamma \ G`.
//!
//! `HeisElt { x, y, z }` is the matrix `(1 y z; 0 1 x; 0 0 1)`, so
//! `(x, y, z)(x', y', z') = (x + x', y + y', z + z' + y x')`.
//!
//! Two distances are provided on the nilmanifold:
//!
//! * [`dist_nil_upper`]: `min_gamma ||kappa(p^-1 gamma q)||_inf` over a lattice window,
//!   with the central coordinate reduced by `<.>`. It dominates every left-invariant
//!   metric bounded by `||kappa||_inf`, but is itself neither symmetric nor subadditive.
//! * [`dist_nil`]: the quotient of `rho*`, the largest left-invariant metric on `G`
//!   bounded by `||kappa||_inf`. This is the metric of record; [`dist_phase`] uses it.
//!
//! With `c = z - xy/2`, `rho*(x, y, z) = max(|x|, |y|, R)` where `R > 0` solves
//! `R^2/4 + R (1 + (|x| + |y|)/4) - |xy|/4 = |c|`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::numtheory::signed_frac;
use crate::scalar::{FloatScalar, Scalar};

/// Default lattice search radius.
pub const DEFAULT_WINDOW: i64 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct HeisElt<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Serialize> Serialize for HeisElt<S> {
    fn serialize<Z: Serializer>(&self, s: Z) -> Result<Z::Ok, Z::Error> {
        (&self.x, &self.y, &self.z).serialize(s)
    }
}

impl<'de, S: Deserialize<'de>> Deserialize<'de> for HeisElt<S> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let (x, y, z) = <(S, S, S)>::deserialize(d)?;
        Ok(HeisElt { x, y, z })
    }
}

impl<S: Scalar> HeisElt<S> {
    pub fn new(x: S, y: S, z: S) -> Self {
        HeisElt { x, y, z }
    }

    pub fn identity() -> Self {
        HeisElt::new(S::zero(), S::zero(), S::zero())
    }

    /// Central element `(0, 0, c)`.
    pub fn central(c: S) -> Self {
        HeisElt::new(S::zero(), S::zero(), c)
    }

    /// Lattice element with integer entries.
    pub fn lattice(m: i64, n: i64, k: i64) -> Self {
        HeisElt::new(S::from_i64(m), S::from_i64(n), S::from_i64(k))
    }

    pub fn mul(&self, h: &Self) -> Self {
        HeisElt {
            x: self.x.clone() + h.x.clone(),
            y: self.y.clone() + h.y.clone(),
            z: self.z.clone() + h.z.clone() + self.y.clone() * h.x.clone(),
        }
    }

    pub fn inv(&self) -> Self {
        HeisElt {
            x: -self.x.clone(),
            y: -self.y.clone(),
            z: self.x.clone() * self.y.clone() - self.z.clone(),
        }
    }

    /// `kappa(g) = (x, y, z - xy)`.
    pub fn kappa(&self) -> (S, S, S) {
        (self.x.clone(), self.y.clone(), self.z.clone() - self.x.clone() * self.y.clone())
    }

    /// `||kappa(g)||_inf`.
    pub fn kappa_norm(&self) -> S {
        let (a, b, c) = self.kappa();
        max_s(max_s(a.abs(), b.abs()), c.abs())
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> HeisElt<T> {
        HeisElt { x: f(&self.x), y: f(&self.y), z: f(&self.z) }
    }
}

impl<S: Scalar> std::ops::Mul for &HeisElt<S> {
    type Output = HeisElt<S>;
    fn mul(self, h: &HeisElt<S>) -> HeisElt<S> {
        HeisElt::mul(self, h)
    }
}

fn max_s<S: Scalar>(a: S, b: S) -> S {
    if a >= b {
        a
    } else {
        b
    }
}

/// A coset `Gamma g` held by its canonical representative: `x, y` in `[0, 1)`
/// and `z` in `(-1/2, 1/2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NilPoint<S> {
    rep: HeisElt<S>,
}

impl<S: Scalar> NilPoint<S> {
    /// The coset of `g`, reduced by the left lattice action
    /// `(m, n, k) g = (x + m, y + n, z + k + n x)`.
    pub fn new(g: HeisElt<S>) -> Self {
        let HeisElt { x, y, z } = g;
        let mut n = -y.integer_floor();
        let mut y2 = y + n.clone();
        if y2 >= S::one() {
            y2 = y2 - S::one();
            n = n - S::one();
        }
        let z = z + n * x.clone();
        let mut x2 = x.clone() - x.integer_floor();
        if x2 >= S::one() {
            x2 = x2 - S::one();
        }
        NilPoint { rep: HeisElt { x: x2, y: y2, z: signed_frac(&z) } }
    }

    pub fn identity() -> Self {
        NilPoint { rep: HeisElt::identity() }
    }

    pub fn rep(&self) -> &HeisElt<S> {
        &self.rep
    }

    /// `Gamma (g h)`.
    pub fn mul_right(&self, h: &HeisElt<S>) -> Self {
        NilPoint::new(self.rep.mul(h))
    }
}

/// A point `(t, Gamma g)` of the phase space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint<S> {
    pub t: S,
    pub p: NilPoint<S>,
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(t: S, g: HeisElt<S>) -> Self {
        let mut t = t.clone() - t.integer_floor();
        if t >= S::one() {
            t = t - S::one();
        }
        PhasePoint { t, p: NilPoint::new(g) }
    }
}

/// `p^-1 (m, n, 0) q` for the canonical representatives.
fn relative<S: Scalar>(p: &HeisElt<S>, q: &HeisElt<S>, m: i64, n: i64) -> HeisElt<S> {
    p.inv().mul(&HeisElt::lattice(m, n, 0).mul(q))
}

/// Windowed upper proxy `min_gamma ||kappa(p^-1 gamma q)||_inf`, with the
/// central entry of `gamma` chosen exactly through `<.>`.
pub fn dist_nil_upper<S: Scalar>(p: &NilPoint<S>, q: &NilPoint<S>, window: i64) -> S {
    let w = window.max(1);
    let mut best: Option<S> = None;
    for m in -w..=w {
        for n in -w..=w {
            let h = relative(&p.rep, &q.rep, m, n);
            let c = signed_frac(&(h.z.clone() - h.x.clone() * h.y.clone())).abs();
            let v = max_s(max_s(h.x.abs(), h.y.abs()), c);
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
    }
    best.expect("window is nonempty")
}

/// `rho*(h)` for `h = (x, y, z)`, given `|c| = |z - xy/2|`.
fn rho_parts<T: FloatScalar>(x: T, y: T, c_abs: T) -> T {
    let ax = x.abs();
    let ay = y.abs();
    let quarter = T::of(0.25);
    let beta = T::one() + (ax + ay) * quarter;
    let s = ax * ay * quarter + c_abs;
    let r = (s + s) / (beta + (beta * beta + s).sqrt());
    ax.max(ay).max(r)
}

/// The left-invariant metric `rho*(e, h)` on `G`.
pub fn rho_star<T: FloatScalar>(h: &HeisElt<T>) -> T {
    rho_parts(h.x, h.y, (h.z - h.x * h.y * T::of(0.5)).abs())
}

/// Quotient metric induced by `rho*`, minimized over the lattice window.
pub fn dist_nil<T: FloatScalar>(p: &NilPoint<T>, q: &NilPoint<T>, window: i64) -> T {
    if p == q {
        return T::zero();
    }
    let key = |g: &HeisElt<T>| (g.x, g.y, g.z);
    if key(&q.rep).partial_cmp(&key(&p.rep)) == Some(std::cmp::Ordering::Less) {
        return dist_nil(q, p, window);
    }
    let w = window.max(1);
    let mut best = T::infinity();
    for m in -w..=w {
        for n in -w..=w {
            let h = relative(&p.rep, &q.rep, m, n);
            if h.x.abs().max(h.y.abs()) >= best {
                continue;
            }
            let c = signed_frac(&(h.z - h.x * h.y * T::of(0.5))).abs();
            best = best.min(rho_parts(h.x, h.y, c));
        }
    }
    best
}

/// `sqrt(||t - t'||^2 + dist_nil^2)`.
pub fn dist_phase<T: FloatScalar>(u: &PhasePoint<T>, v: &PhasePoint<T>, window: i64) -> T {
    let dt = signed_frac(&(u.t - v.t)).abs();
    let dn = dist_nil(&u.p, &v.p, window);
    (dt * dt + dn * dn).sqrt()
}

/// The same product construction with the windowed upper proxy.
pub fn dist_phase_upper<T: FloatScalar>(u: &PhasePoint<T>, v: &PhasePoint<T>, window: i64) -> T {
    let dt = signed_frac(&(u.t - v.t)).abs();
    let dn = dist_nil_upper(&u.p, &v.p, window);
    (dt * dt + dn * dn).sqrt()
}

/// Explicit bound for the distance between `Gamma g Y` and `Gamma g* Y*`, where
/// `Y = (a, b, c)` has `a` in the x-slot and `b` in the y-slot:
/// `(1+|y|+|b|)|x*-x| + (1+|a|)|y*-y| + |z*-z| + (1+|b|)|a-a*| + |b-b*| + ||c*-c||`.
pub fn translate_bound<S: Scalar>(g: &HeisElt<S>, gs: &HeisElt<S>, yy: &HeisElt<S>, ys: &HeisElt<S>) -> S {
    let one = S::one();
    let (a, b, c) = (&yy.x, &yy.y, &yy.z);
    let (a2, b2, c2) = (&ys.x, &ys.y, &ys.z);
    (one.clone() + g.y.abs() + b.abs()) * (gs.x.clone() - g.x.clone()).abs()
        + (one.clone() + a.abs()) * (gs.y.clone() - g.y.clone()).abs()
        + (gs.z.clone() - g.z.clone()).abs()
        + (one + b.abs()) * (a.clone() - a2.clone()).abs()
        + (b.clone() - b2.clone()).abs()
        + signed_frac(&(c2.clone() - c.clone())).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn e(x: f64, y: f64, z: f64) -> HeisElt<f64> {
        HeisElt::new(x, y, z)
    }

    #[test]
    fn product_examples() {
        // (a = 1 top, b = 2 right)(c = 3 top, d = 4 right)
        let g = e(2.0, 1.0, 0.0).mul(&e(4.0, 3.0, 0.0));
        assert_eq!(g, e(6.0, 4.0, 4.0));
        let h = e(4.0, 3.0, 0.0).mul(&e(2.0, 1.0, 0.0));
        assert_eq!(h.z, 6.0);
        let g = e(0.3, -1.2, 5.0);
        assert_eq!(g.mul(&HeisElt::identity()), g);
    }

    #[test]
    fn inverse_and_kappa() {
        let g = e(1.0, 2.0, 3.0);
        assert_eq!(g.inv().z, -1.0);
        assert_eq!(g.kappa(), (1.0, 2.0, 1.0));
        assert_eq!(e(0.0, 5.0, 7.0).kappa(), (0.0, 5.0, 7.0));
        assert_eq!(HeisElt::<f64>::identity().inv(), HeisElt::identity());
    }

    #[test]
    fn exact_rational_mode() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let g = HeisElt::new(r(1, 3), r(-7, 5), r(2, 9));
        assert_eq!(g.mul(&g.inv()), HeisElt::identity());
        let p = NilPoint::new(HeisElt::new(r(7, 3), r(-7, 5), r(11, 2)));
        assert_eq!(NilPoint::new(p.rep().clone()), p);
        assert!(p.rep().z > r(-1, 2) && p.rep().z <= r(1, 2));
        let q = p.mul_right(&HeisElt::central(r(3, 1)));
        assert_eq!(dist_nil_upper(&p, &q, 3), r(0, 1));
    }

    #[test]
    fn canonical_idempotent() {
        let p = NilPoint::new(e(3.7, -2.2, 9.9));
        let r = p.rep();
        assert!((0.0..1.0).contains(&r.x) && (0.0..1.0).contains(&r.y));
        assert_eq!(NilPoint::new(r.clone()), p);
        let p2 = NilPoint::new(HeisElt::lattice(2, -5, 4).mul(&e(3.7, -2.2, 9.9)));
        assert!(dist_nil(&p, &p2, 3) < 1e-12);
    }

    #[test]
    fn distance_examples() {
        let p = NilPoint::new(e(0.3, 0.6, 0.1));
        assert_eq!(dist_nil_upper(&p, &p, 3), 0.0);
        let q = p.mul_right(&HeisElt::central(1.0));
        assert!(dist_nil_upper(&p, &q, 3) < 1e-15);
        let yy = e(0.2, 0.1, 0.3);
        let q = p.mul_right(&yy);
        assert!(dist_nil_upper(&p, &q, 3) <= 0.6 + 1e-12);
        assert!(dist_nil(&p, &q, 3) <= dist_nil_upper(&p, &q, 3) + 1e-15);
        let u = PhasePoint::new(0.1, e(0.3, 0.6, 0.1));
        let v = PhasePoint::new(0.6, e(0.3, 0.6, 0.1));
        assert!((dist_phase(&u, &v, 3) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn proxy_is_not_a_metric() {
        let h1 = NilPoint::new(e(0.2, 0.0, -0.2));
        let h2 = NilPoint::new(e(0.2, 0.2, -0.4));
        let o = NilPoint::identity();
        // the straight proxy of h1^-1 h2 = (0, 0.2, -0.2)
        let d13 = dist_nil_upper(&o, &h2, 3);
        let d12 = dist_nil_upper(&o, &h1, 3);
        let d23 = dist_nil_upper(&h1, &h2, 3);
        assert!(d13 > d12 + d23 + 1e-3);
        let r13 = dist_nil(&o, &h2, 3);
        assert!(r13 <= dist_nil(&o, &h1, 3) + dist_nil(&h1, &h2, 3) + 1e-12);
    }

    #[test]
    fn bound_examples() {
        let g = e(0.1, 0.2, 0.3);
        let yy = e(0.4, 0.5, 0.6);
        assert_eq!(translate_bound(&g, &g, &yy, &yy), 0.0);
        let ys = yy.mul(&HeisElt::central(1.0));
        assert!(translate_bound(&g, &g, &yy, &ys).abs() < 1e-15);
    }

    #[test]
    fn json_triple() {
        let s = serde_json::to_string(&e(1.0, 2.0, 3.0)).unwrap();
        assert_eq!(s, "[1.0,2.0,3.0]");
        let g: HeisElt<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(g, e(1.0, 2.0, 3.0));
    }
}
