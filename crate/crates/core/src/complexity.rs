//! The averaged metric `dbar_n`, the grid family `F_eps(k)` and covering
//! number estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{rotate, SkewSystem};
use crate::error::{Error, Result};
use crate::heisenberg::{dist_phase, HeisElt, PhasePoint};
use crate::numtheory::{IndexSets, RotationNumber};

/// Lattice window for distances between canonical representatives; the
/// quotient minimum is attained within it.
pub const ORBIT_WINDOW: i64 = 1;
/// Safety factor in the default choice of `L`.
pub const L_MARGIN: f64 = 10.0;

/// `T^j u` for `j < n`, with `t` taken from the exact phase of `j alpha`.
pub fn orbit(sys: &SkewSystem<f64>, u: &PhasePoint<f64>, n: u64) -> Vec<PhasePoint<f64>> {
    let mut out = Vec::with_capacity(n as usize);
    let mut p = u.clone();
    for j in 0..n {
        if j > 0 {
            p = sys.step(&p);
            p.t = rotate(sys.alpha(), u.t, j as i128);
        }
        out.push(p.clone());
    }
    out
}

fn mean_dist(a: &[PhasePoint<f64>], b: &[PhasePoint<f64>]) -> f64 {
    a.iter().zip(b).map(|(p, q)| dist_phase(p, q, ORBIT_WINDOW)).sum::<f64>() / a.len() as f64
}

/// `(1/n) sum_{j<n} d(T^j u, T^j v)`.
pub fn dbar(sys: &SkewSystem<f64>, u: &PhasePoint<f64>, v: &PhasePoint<f64>, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Range("n must be at least 1".into()));
    }
    Ok(mean_dist(&orbit(sys, u, n), &orbit(sys, v, n)))
}

/// Mesh parameters of `F_eps(k)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Grid {
    pub eps: f64,
    pub l: f64,
    pub q_k: u64,
    /// Number of `t` levels, `floor(q_k^2 L / eps)`.
    pub nt: u64,
    /// Levels per group coordinate, `floor(q_k L)`.
    pub ng: u64,
}

impl Grid {
    pub fn new(eps: f64, l: f64, q_k: u64) -> Result<Self> {
        if !(eps > 0.0) || !(l > 1.0 / eps) || q_k == 0 {
            return Err(Error::Precondition(format!("grid needs eps > 0, L > 1/eps, q_k >= 1 (eps={eps}, L={l})")));
        }
        let q = q_k as f64;
        let nt = (q * q * l / eps).floor();
        let ng = (q * l).floor();
        if nt >= u64::MAX as f64 || ng >= u64::MAX as f64 {
            return Err(Error::Capacity("grid levels exceed 64 bits".into()));
        }
        Ok(Grid { eps, l, q_k, nt: nt as u64, ng: ng as u64 })
    }

    /// `#F_eps(k)`, checked against 64-bit overflow.
    pub fn count(&self) -> Result<u64> {
        self.ng
            .checked_mul(self.ng)
            .and_then(|v| v.checked_mul(self.ng))
            .and_then(|v| v.checked_mul(self.nt))
            .ok_or_else(|| Error::Capacity(format!("grid count {} * {}^3 overflows 64 bits", self.nt, self.ng)))
    }

    /// Grid point by index coordinates `(j, j1, j2, j3)`.
    pub fn point(&self, j: u64, j1: u64, j2: u64, j3: u64) -> PhasePoint<f64> {
        let q = self.q_k as f64;
        let s = 1.0 / (q * self.l);
        PhasePoint::new(
            j as f64 * self.eps / (q * q * self.l),
            HeisElt::new(j1 as f64 * s, j2 as f64 * s, j3 as f64 * s),
        )
    }

    /// Decodes a linear index in `0..count()`.
    pub fn index(&self, i: u64) -> (u64, u64, u64, u64) {
        let j3 = i % self.ng;
        let r = i / self.ng;
        let j2 = r % self.ng;
        let r = r / self.ng;
        (r / self.ng, r % self.ng, j2, j3)
    }

    pub fn points(&self) -> Result<impl Iterator<Item = PhasePoint<f64>> + '_> {
        let n = self.count()?;
        Ok((0..n).map(move |i| {
            let (j, j1, j2, j3) = self.index(i);
            self.point(j, j1, j2, j3)
        }))
    }

    /// `eps^-1 q_k^5 L^4`.
    pub fn formula(&self) -> f64 {
        (self.q_k as f64).powi(5) * self.l.powi(4) / self.eps
    }
}

/// `L = max(2 / eps, 4 (1 + sup|phi| + sup|eta|) L_MARGIN)` for the driving
/// functions of `sys`.
pub fn default_l(eps: f64, sys: &SkewSystem<f64>) -> f64 {
    let sup = sys.phi().l1_norm() + sys.eta().l1_norm();
    (2.0 / eps).max(4.0 * (1.0 + sup) * L_MARGIN)
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjacencyReport {
    pub k: usize,
    pub q_k: u64,
    pub n_k: u64,
    pub eps: f64,
    pub l: f64,
    pub samples: usize,
    pub max_dbar: f64,
    pub violations: usize,
    /// `q_k^{B-1}` is not an element of `Q_B` in the window.
    pub exploratory: bool,
}

/// Samples adjacent pairs of `F_eps(k)` and measures `dbar_{n_k}` under `sys`
/// (normally `T_1`), `n_k = round(q_k^{B-1})` unless `n` is given.
pub fn adjacency_check(
    sys: &SkewSystem<f64>,
    sets: &IndexSets,
    k: usize,
    eps: f64,
    l: f64,
    n: Option<u64>,
    samples: usize,
    seed: u64,
) -> Result<AdjacencyReport> {
    let rn = sys.alpha();
    let q_k = rn.q_u64(k).ok_or_else(|| Error::Range(format!("q_{k} exceeds 64 bits")))?;
    let grid = Grid::new(eps, l, q_k)?;
    let n_k = match n {
        Some(n) => n,
        None => (q_k as f64).powf(sets.b - 1.0).round() as u64,
    };
    if n_k == 0 {
        return Err(Error::Range("n_k must be at least 1".into()));
    }
    if grid.nt < 2 || grid.ng < 2 {
        return Err(Error::Range("grid too small to have adjacent pairs".into()));
    }
    let exploratory = !sets.qb.iter().any(|e| e.ell == k);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<_> = (0..samples)
        .map(|_| {
            let j = rng.gen_range(0..grid.nt - 1);
            let c: [u64; 3] = std::array::from_fn(|_| rng.gen_range(0..grid.ng - 1));
            let d: [u64; 4] = std::array::from_fn(|_| rng.gen_range(0..2));
            let a = grid.point(j, c[0], c[1], c[2]);
            let b = grid.point(j + d[0], c[0] + d[1], c[1] + d[2], c[2] + d[3]);
            (a, b)
        })
        .collect();
    let dists: Vec<f64> = pairs.par_iter().map(|(a, b)| dbar(sys, a, b, n_k)).collect::<Result<_>>()?;
    Ok(AdjacencyReport {
        k,
        q_k,
        n_k,
        eps,
        l,
        samples,
        max_dbar: dists.iter().copied().fold(0.0, f64::max),
        violations: dists.iter().filter(|&&d| d >= eps).count(),
        exploratory,
    })
}

/// Box in `(t, x, y, z)` coordinates of the fundamental domain.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Region {
    pub t: [f64; 2],
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub z: [f64; 2],
}

impl Default for Region {
    fn default() -> Self {
        Region { t: [0.0, 1.0], x: [0.0, 1.0], y: [0.0, 1.0], z: [-0.5, 0.5] }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub n: u64,
    pub eps: f64,
    pub sample_size: usize,
    pub centers: usize,
    pub covered_fraction: f64,
    /// The center budget ran out before `1 - eps` of the sample was covered.
    pub exhausted: bool,
}

/// Draws `sample_size` uniform points of `region`, then repeatedly takes the
/// first uncovered point as a center and covers every point within `dbar_n`
/// distance `< eps`, until more than `1 - eps` of the sample is covered.
pub fn greedy_cover(
    sys: &SkewSystem<f64>,
    n: u64,
    eps: f64,
    sample_size: usize,
    region: Region,
    max_centers: usize,
    seed: u64,
) -> Result<CoverReport> {
    if n == 0 || sample_size == 0 || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Range("need n >= 1, a nonempty sample and eps in (0, 1)".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |r: [f64; 2]| if r[1] > r[0] { rng.gen_range(r[0]..r[1]) } else { r[0] };
    let starts: Vec<PhasePoint<f64>> = (0..sample_size)
        .map(|_| {
            let t = draw(region.t);
            let x = draw(region.x);
            let y = draw(region.y);
            let z = draw(region.z);
            PhasePoint::new(t, HeisElt::new(x, y, z))
        })
        .collect();
    let orbits: Vec<Vec<PhasePoint<f64>>> = starts.par_iter().map(|p| orbit(sys, p, n)).collect();
    let mut covered = vec![false; sample_size];
    let mut count = 0usize;
    let mut centers = 0usize;
    let target = (1.0 - eps) * sample_size as f64;
    let mut next = 0usize;
    while (count as f64) <= target {
        if centers == max_centers {
            break;
        }
        while covered[next] {
            next += 1;
        }
        let c = &orbits[next];
        let hits: Vec<usize> = (0..sample_size)
            .into_par_iter()
            .filter(|&i| !covered[i] && mean_dist(c, &orbits[i]) < eps)
            .collect();
        for i in hits {
            covered[i] = true;
            count += 1;
        }
        centers += 1;
    }
    let covered_fraction = count as f64 / sample_size as f64;
    Ok(CoverReport {
        n,
        eps,
        sample_size,
        centers,
        covered_fraction,
        exhausted: covered_fraction <= 1.0 - eps,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendRow {
    pub k: usize,
    pub q_k: f64,
    /// `ln n_k = (B - 1) ln q_k`.
    pub ln_n_k: f64,
    pub grid_count: f64,
    /// `eps^-1 q_k^5 L^4 / n_k^tau`.
    pub ratio: f64,
    pub tau: f64,
    pub b: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendTable {
    pub rows: Vec<TrendRow>,
    pub decreasing: bool,
    /// Least-squares slope of `ln ratio` against `ln q_k`.
    pub slope: f64,
}

/// `#F_eps(k) / n_k^tau` with `B = 6/tau + 1`, over the indices `ks`.
pub fn subpoly_trend(rn: &RotationNumber, ks: &[usize], eps: f64, l: f64, tau: f64) -> Result<TrendTable> {
    if ks.len() < 3 {
        return Err(Error::Range("subpoly_trend needs at least 3 values of k".into()));
    }
    if !(tau > 0.0) || !(eps > 0.0) || !(l > 0.0) {
        return Err(Error::Range("tau, eps and L must be positive".into()));
    }
    let b = 6.0 / tau + 1.0;
    let mut rows = Vec::with_capacity(ks.len());
    for &k in ks {
        if k > rn.depth() {
            return Err(Error::Range(format!("k = {k} beyond depth {}", rn.depth())));
        }
        let lq = rn.ln_q(k);
        let ln_count = 5.0 * lq + 4.0 * l.ln() - eps.ln();
        let ln_n = (b - 1.0) * lq;
        rows.push(TrendRow {
            k,
            q_k: lq.exp(),
            ln_n_k: ln_n,
            grid_count: ln_count.exp(),
            ratio: (ln_count - tau * ln_n).exp(),
            tau,
            b,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].ratio < w[0].ratio || w[1].q_k == w[0].q_k);
    let xs: Vec<f64> = rows.iter().map(|r| r.q_k.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.ratio.ln()).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { f64::NAN };
    Ok(TrendTable { rows, decreasing, slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numtheory::AlphaSpec;
    use crate::periodic::PeriodicFn;
    use std::collections::HashSet;

    fn golden_sys() -> SkewSystem<f64> {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 30).unwrap();
        SkewSystem::new(rn, PeriodicFn::cos(1, 1.0), PeriodicFn::sin(1, 1.0), PeriodicFn::cos(2, 0.2)).unwrap()
    }

    #[test]
    fn grid_examples() {
        let g = Grid::new(1.0, 2.0, 1).unwrap();
        assert_eq!(g.count().unwrap(), 16);
        let g = Grid::new(0.5, 3.0, 2).unwrap();
        assert_eq!(g.count().unwrap() as f64, g.formula());
        let pts: HashSet<_> = g
            .points()
            .unwrap()
            .map(|p| {
                let r = p.p.rep();
                [p.t, r.x, r.y, r.z].map(f64::to_bits)
            })
            .collect();
        assert_eq!(pts.len() as u64, g.count().unwrap());
        assert!(Grid::new(0.5, 1.5, 1).is_err());
        assert!(Grid::new(1e-3, 1e4, 1 << 12).unwrap().count().is_err());
    }

    #[test]
    fn dbar_examples() {
        let sys = golden_sys();
        let u = PhasePoint::new(0.1, HeisElt::new(0.2, 0.3, 0.1));
        let v = PhasePoint::new(0.15, HeisElt::new(0.25, 0.2, -0.3));
        assert_eq!(dbar(&sys, &u, &u, 20).unwrap(), 0.0);
        let d1 = dbar(&sys, &u, &v, 1).unwrap();
        assert!((d1 - dist_phase(&u, &v, 3)).abs() < 1e-15, "{d1} {}", dist_phase(&u, &v, 3));
        assert!((dbar(&sys, &u, &v, 30).unwrap() - dbar(&sys, &v, &u, 30).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn one_ball_covers_small_slice() {
        let sys = golden_sys();
        let region = Region { t: [0.0, 0.1], x: [0.0, 0.1], y: [0.0, 0.1], z: [0.0, 0.1] };
        let r = greedy_cover(&sys, 1, 0.6, 200, region, 100, 7).unwrap();
        assert_eq!(r.centers, 1);
        assert!(!r.exhausted);
    }

    #[test]
    fn trend_slope() {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 20).unwrap();
        let t = subpoly_trend(&rn, &[10, 12, 14, 16], 0.1, 20.0, 0.5).unwrap();
        assert!(t.decreasing);
        assert!((t.slope + 1.0).abs() < 1e-9);
        assert!(subpoly_trend(&rn, &[1, 2], 0.1, 20.0, 0.5).is_err());
    }

    #[test]
    fn trivial_adjacency() {
        let rn = RotationNumber::expand(&AlphaSpec::golden(), 20).unwrap();
        let sets = IndexSets::from_epsilon(&rn, 0.009).unwrap();
        let z = PeriodicFn::zero();
        let sys = SkewSystem::new(rn, z.clone(), z.clone(), z).unwrap();
        let r = adjacency_check(&sys, &sets, 5, 0.5, 40.0, Some(50), 100, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.exploratory);
        let q = r.q_k as f64;
        assert!(r.max_dbar <= (0.5 / (q * q * 40.0)).hypot(3.0 / (q * 40.0)));
    }
}
