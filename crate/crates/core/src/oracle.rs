//! Brute-force oracle suites run by `oracle-check`.

use num_complex::Complex;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complexity::Grid;
use crate::dynamics::{expsum_w0, expsum_w1, expsum_w2, rational_birkhoff, rational_h_coeffs, rotate, Conjugacy, SkewSystem};
use crate::error::Result;
use crate::fourier::cis;
use crate::heisenberg::{dist_phase, HeisElt, PhasePoint, DEFAULT_WINDOW};
use crate::numtheory::{check_best_approx, classify_index_sets, mobius_sieve, AlphaSpec, RotationNumber};
use crate::periodic::{birkhoff_avg_defect, split_resonant, PeriodicFn};
use crate::rigidity::{parseval, rigidity_integrals};

#[derive(Clone, Debug, Serialize)]
pub struct OracleResult {
    pub name: &'static str,
    pub cases: usize,
    pub max_err: f64,
    pub tol: f64,
    pub passed: bool,
}

struct Tally {
    cases: usize,
    max_err: f64,
}

impl Tally {
    fn new() -> Self {
        Tally { cases: 0, max_err: 0.0 }
    }

    /// Records `|got - want| / max(1, |want|)`.
    fn rel(&mut self, got: Complex<f64>, want: Complex<f64>) {
        self.cases += 1;
        let e = (got - want).norm() / want.norm().max(1.0);
        self.max_err = self.max_err.max(if e.is_nan() { f64::INFINITY } else { e });
    }

    fn abs(&mut self, e: f64) {
        self.cases += 1;
        self.max_err = self.max_err.max(if e.is_nan() { f64::INFINITY } else { e });
    }

    fn flag(&mut self, ok: bool) {
        self.abs(if ok { 0.0 } else { 1.0 });
    }
}

fn re(x: f64) -> Complex<f64> {
    Complex::new(x, 0.0)
}

/// A random irrational `(a + sqrt(d)) / c`.
pub fn random_surd(rng: &mut ChaCha8Rng, depth: usize) -> RotationNumber {
    loop {
        let d = rng.gen_range(2..60);
        let a = rng.gen_range(-20..20);
        let c = rng.gen_range(1..15);
        if let Ok(rn) = RotationNumber::expand(&AlphaSpec::surd(a, 1, d, c), depth) {
            return rn;
        }
    }
}

/// A random real trigonometric polynomial with frequencies in `1..=k`.
pub fn random_trig(rng: &mut ChaCha8Rng, k: i64, terms: usize, mean: f64) -> PeriodicFn<f64> {
    let half: Vec<(i64, Complex<f64>)> = (0..terms)
        .map(|_| (rng.gen_range(1..=k), Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .chain(std::iter::once((0, re(mean))))
        .collect();
    PeriodicFn::real(half, None).expect("no decay class")
}

pub fn random_system(rng: &mut ChaCha8Rng, rn: RotationNumber, k: i64) -> SkewSystem<f64> {
    let phi = random_trig(rng, k, 3, 0.0);
    let eta = random_trig(rng, k, 3, 0.0);
    let mean = rng.gen_range(-1.0..1.0);
    let psi = random_trig(rng, k, 3, mean);
    SkewSystem::new(rn, phi, eta, psi).expect("real, zero-mean drivers")
}

fn random_point(rng: &mut ChaCha8Rng) -> PhasePoint<f64> {
    PhasePoint::new(rng.gen(), HeisElt::new(rng.gen(), rng.gen(), rng.gen::<f64>() - 0.5))
}

fn brute_double(u: i64, v: i64, n: u64, rn: &RotationNumber) -> Complex<f64> {
    let mut s = Complex::new(0.0, 0.0);
    for j in 1..n as i128 {
        for r in 0..j {
            s += cis(rn.phase(u as i128 * r + v as i128 * j));
        }
    }
    s
}

fn brute_h(sys: &SkewSystem<f64>, n: u64, t: f64) -> f64 {
    let rn = sys.alpha();
    let mut h = 0.0;
    for j in 1..n {
        let mut c = 0.0;
        for r in 0..j {
            c += sys.phi().eval_re(rotate(rn, t, r as i128));
        }
        h += c * sys.eta().eval_re(rotate(rn, t, j as i128));
    }
    h
}

fn finish(name: &'static str, t: Tally, tol: f64) -> OracleResult {
    OracleResult { name, cases: t.cases, max_err: t.max_err, tol, passed: t.cases > 0 && t.max_err <= tol }
}

fn expsums(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let (mut w0, mut w12, mut mutual) = (Tally::new(), Tally::new(), Tally::new());
    for _ in 0..60 {
        let rn = random_surd(rng, 20);
        let n = rng.gen_range(1..=120);
        let u = rng.gen_range(1..=12) * if rng.gen() { 1 } else { -1 };
        let mut v = rng.gen_range(-12..=12);
        if v == 0 || u + v == 0 {
            v = u + 1;
        }
        w0.rel(expsum_w0(u, n, &rn)?, brute_double(u, -u, n, &rn));
        let a = expsum_w1(u, v, n, &rn)?;
        let b = expsum_w2(u, v, n, &rn)?;
        mutual.rel(a, b);
        w12.rel(a, brute_double(u, v, n, &rn));
    }
    Ok(vec![finish("expsum_w0", w0, 1e-10), finish("expsum_w1w2", w12, 1e-10), finish("w1_equals_w2", mutual, 1e-10)])
}

fn iterates(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let (mut it, mut h, mut s0) = (Tally::new(), Tally::new(), Tally::new());
    for _ in 0..20 {
        let rn = random_surd(rng, 25);
        let sys = random_system(rng, rn, 6);
        let p0 = random_point(rng);
        let n = rng.gen_range(1..=300);
        let mut p = p0.clone();
        for _ in 0..n {
            p = sys.step(&p);
        }
        it.abs(dist_phase(&p, &sys.iterate(&p0, n)?, DEFAULT_WINDOW));
        let m = rng.gen_range(1..=80);
        let bs = sys.birkhoff(m)?;
        let t = rng.gen();
        h.rel(re(bs.h(t)), re(brute_h(&sys, m, t)));
        let mean = (0..4096).map(|i| bs.h(i as f64 / 4096.0)).sum::<f64>() / 4096.0;
        s0.rel(re(mean), bs.sigma_n0);
    }
    Ok(vec![finish("iterate_vs_steps", it, 1e-9), finish("h_double_sum", h, 1e-9), finish("sigma_n0_quadrature", s0, 1e-10)])
}

fn rational(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let (mut lin, mut quad) = (Tally::new(), Tally::new());
    for &(a, q) in &[(1i64, 2i64), (1, 3), (2, 5), (3, 7)] {
        let rn = RotationNumber::expand(&AlphaSpec::rational(a, q), usize::MAX)?;
        for _ in 0..10 {
            let sys = random_system(rng, rn.clone(), 8);
            let t: f64 = rng.gen();
            let n = rng.gen_range(0..60);
            let direct: f64 = (0..n).map(|r| sys.psi().eval_re(rotate(&rn, t, r as i128))).sum();
            lin.rel(re(rational_birkhoff(sys.psi(), &rn, n, t)?), re(direct));
            let b = rng.gen_range(0..q as u64);
            let c = rational_h_coeffs(&sys, t, b)?;
            let n = b + q as u64 * rng.gen_range(0..6);
            quad.rel(re(c.eval(n)), re(brute_h(&sys, n, t)));
        }
    }
    Ok(vec![finish("rational_linear_law", lin, 1e-10), finish("rational_quadratic_law", quad, 1e-10)])
}

fn conjugacy(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let (mut cob, mut comp) = (Tally::new(), Tally::new());
    for _ in 0..5 {
        let rn = random_surd(rng, 25);
        let sets = classify_index_sets(&rn, 0.001125, 2.018)?;
        let sys = random_system(rng, rn.clone(), 8);
        let s = split_resonant(sys.phi(), &sets, &rn)?;
        let d = s.cobound.delta(&rn);
        let c = Conjugacy::new(&sys, &sets)?;
        for _ in 0..50 {
            let t: f64 = rng.gen();
            cob.abs((d.eval(t) - s.minus.eval(t)).norm());
            let p = random_point(rng);
            let lhs = c.conjugated_step_t1(&p);
            let rhs = c.apply_r_inv(&sys.step(&c.apply_r(&p)));
            comp.abs(dist_phase(&lhs, &rhs, DEFAULT_WINDOW));
        }
    }
    Ok(vec![finish("coboundary", cob, 1e-10), finish("t1_composition", comp, 1e-8)])
}

fn numtheory(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let mut best = Tally::new();
    for rn in [
        RotationNumber::expand(&AlphaSpec::golden(), 26)?,
        RotationNumber::expand(&AlphaSpec::surd(-1, 1, 2, 1), 26)?,
        random_surd(rng, 26),
    ] {
        for k in 1..=25 {
            best.flag(check_best_approx(&rn, k)?.holds());
        }
    }
    let mut mu = Tally::new();
    let table = mobius_sieve(5000)?;
    for n in 1..=5000usize {
        let (mut m, mut k, mut sign) = (n, 2, 1i8);
        while k * k <= m {
            if m % k == 0 {
                m /= k;
                if m % k == 0 {
                    sign = 0;
                    break;
                }
                sign = -sign;
            }
            k += 1;
        }
        if sign != 0 && m > 1 {
            sign = -sign;
        }
        mu.flag(table.get(n) == sign);
    }
    Ok(vec![finish("best_approximation", best, 0.0), finish("mobius_trial_division", mu, 0.0)])
}

fn integrals(rng: &mut ChaCha8Rng) -> Result<Vec<OracleResult>> {
    let (mut pars, mut avg) = (Tally::new(), Tally::new());
    for _ in 0..10 {
        let rn = random_surd(rng, 25);
        let sys = random_system(rng, rn.clone(), 6);
        let n = rng.gen_range(1..200);
        let bs = sys.birkhoff(n)?;
        let r = rigidity_integrals(&sys, n, 256)?;
        pars.rel(re(r.i_phi), re(parseval(&bs.phi_n)));
        let q = rng.gen_range(2..200);
        let d = birkhoff_avg_defect(sys.phi(), &rn, q, 3.0, 32)?;
        let mut worst: f64 = 0.0;
        for i in 0..32 {
            let t = i as f64 / 32.0;
            let s: f64 = (0..=q).map(|j| sys.phi().eval_re(rotate(&rn, t, j as i128))).sum();
            worst = worst.max((s / q as f64).abs());
        }
        avg.rel(re(d.defect), re(worst));
    }
    let mut grid = Tally::new();
    for _ in 0..20 {
        let q = rng.gen_range(1..6u64);
        let l = rng.gen_range(3..9) as f64;
        let g = Grid::new(0.5, l, q)?;
        grid.rel(re(g.count()? as f64), re(g.formula()));
    }
    Ok(vec![finish("parseval", pars, 1e-12), finish("avg_defect", avg, 1e-12), finish("grid_count", grid, 0.0)])
}

fn group(rng: &mut ChaCha8Rng) -> Vec<OracleResult> {
    let mut ax = Tally::new();
    let mut rat = || BigRational::new(rng.gen_range(-50..50).into(), rng.gen_range(1..20).into());
    for _ in 0..200 {
        let a = HeisElt::new(rat(), rat(), rat());
        let b = HeisElt::new(rat(), rat(), rat());
        let c = HeisElt::new(rat(), rat(), rat());
        let assoc = a.mul(&b).mul(&c) == a.mul(&b.mul(&c));
        let inv = a.mul(&a.inv()) == HeisElt::identity();
        ax.flag(assoc && inv);
    }
    vec![finish("group_axioms_exact", ax, 0.0)]
}

/// Runs every suite with a seeded generator.
pub fn run_all(seed: u64) -> Result<Vec<OracleResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    out.extend(expsums(&mut rng)?);
    out.extend(iterates(&mut rng)?);
    out.extend(rational(&mut rng)?);
    out.extend(conjugacy(&mut rng)?);
    out.extend(numtheory(&mut rng)?);
    out.extend(integrals(&mut rng)?);
    out.extend(group(&mut rng));
    Ok(out)
}
