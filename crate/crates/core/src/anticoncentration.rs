//! Ball probabilities of Rademacher sums:
//! `sup_a P(|Σ ξ_i x_i − a| < t)` for independent signs `ξ_i = ±1`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::disc::{max_disc_cover, max_interval_cover, Boundary};
use crate::vector::norm;
use crate::{Error, Result, C64};

/// Largest `m` accepted by [`lo_ball_exact`].
pub const MAX_EXACT_M: usize = 24;

/// Default number of grid steps per radius in Monte Carlo mode (spacing `t/10`).
pub const DEFAULT_GRID_DIVISIONS: u32 = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LoQuery {
    x: Vec<C64>,
    t: f64,
    grid_divisions: u32,
}

impl LoQuery {
    /// Requires `|x_i| ≥ 1` for all `i` and `t ≥ 1`.
    pub fn new(x: Vec<C64>, t: f64) -> Result<Self> {
        Self::with_grid(x, t, DEFAULT_GRID_DIVISIONS)
    }

    /// Monte Carlo centers lie on the lattice of spacing `t / grid_divisions` (at least 10 divisions).
    pub fn with_grid(x: Vec<C64>, t: f64, grid_divisions: u32) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::InvalidParameter("need at least one weight".into()));
        }
        if let Some((i, v)) = x.iter().enumerate().find(|(_, v)| !(v.norm() >= 1.0) || !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight {i} = {v} has modulus below 1")));
        }
        if !(t >= 1.0) || !t.is_finite() {
            return Err(Error::InvalidParameter(format!("need finite t >= 1, got {t}")));
        }
        if grid_divisions < DEFAULT_GRID_DIVISIONS {
            return Err(Error::InvalidParameter(format!("grid spacing must be at most t/10, got t/{grid_divisions}")));
        }
        Ok(LoQuery { x, t, grid_divisions })
    }

    pub fn x(&self) -> &[C64] {
        &self.x
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn m(&self) -> usize {
        self.x.len()
    }
}

fn key(z: C64) -> (u64, u64) {
    ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits())
}

/// Multiset of all `2^m` signed sums, merging bit-identical values as it goes.
fn achievable_sums(x: &[C64]) -> Vec<(C64, u64)> {
    let mut cur: Vec<(C64, u64)> = vec![(C64::new(0.0, 0.0), 1)];
    for &xi in x {
        let mut next: HashMap<(u64, u64), (C64, u64)> = HashMap::with_capacity(cur.len() * 2);
        for &(s, w) in &cur {
            for v in [s + xi, s - xi] {
                next.entry(key(v)).or_insert((v, 0)).1 += w;
            }
        }
        cur = next.into_values().collect();
        cur.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    }
    cur
}

/// Unit direction `u` with every `x_i` a real multiple of `u`, if one exists.
fn common_direction(x: &[C64]) -> Option<C64> {
    let scale = norm(x);
    let u = x.iter().find(|v| v.norm() > 0.0).map(|v| v / v.norm())?;
    x.iter().all(|v| (v * u.conj()).im.abs() <= 1e-12 * scale).then_some(u)
}

/// Exact ball probability. The supremum over centers is attained by an open
/// disc covering a heaviest subset of the achievable sums, found by the exact
/// disc sweep (or an interval sweep when all weights are collinear).
pub fn lo_ball_exact(q: &LoQuery) -> Result<f64> {
    let m = q.m();
    if m > MAX_EXACT_M {
        return Err(Error::TooLarge { what: "m", value: m as u128, cap: MAX_EXACT_M as u128 });
    }
    let sums = achievable_sums(&q.x);
    let best = match common_direction(&q.x) {
        Some(u) => {
            let line: Vec<(f64, u64)> = sums.iter().map(|&(s, w)| ((s * u.conj()).re, w)).collect();
            max_interval_cover(&line, q.t, Boundary::Open).0
        }
        None => max_disc_cover(&sums, q.t, Boundary::Open).weight,
    };
    Ok(best as f64 / 2f64.powi(m as i32))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    /// Binomial standard error `√(p(1−p)/N)` at the maximizing center.
    pub stderr: f64,
    pub center: C64,
    pub samples: u64,
}

/// Monte Carlo ball probability: `samples` random sign vectors, supremum over
/// the lattice of centers with spacing `t / grid_divisions`. The grid supremum
/// does not exceed the true supremum of the empirical measure.
pub fn lo_ball_mc(q: &LoQuery, samples: u64, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sums: HashMap<(u64, u64), (C64, u64)> = HashMap::new();
    for _ in 0..samples {
        let s: C64 = q.x.iter().map(|&v| if rng.gen::<bool>() { v } else { -v }).sum();
        sums.entry(key(s)).or_insert((s, 0)).1 += 1;
    }
    let mut distinct: Vec<(C64, u64)> = sums.into_values().collect();
    distinct.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let t = q.t;
    let h = t / q.grid_divisions as f64;
    let mut counts: HashMap<(i64, i64), u64> = HashMap::new();
    for &(s, w) in &distinct {
        let i_lo = ((s.re - t) / h).ceil() as i64;
        let i_hi = ((s.re + t) / h).floor() as i64;
        for i in i_lo..=i_hi {
            let dx = s.re - i as f64 * h;
            let reach = (t * t - dx * dx).max(0.0).sqrt();
            let j_lo = ((s.im - reach) / h).ceil() as i64;
            let j_hi = ((s.im + reach) / h).floor() as i64;
            for j in j_lo..=j_hi {
                let a = C64::new(i as f64 * h, j as f64 * h);
                if (s - a).norm() < t {
                    *counts.entry((i, j)).or_insert(0) += w;
                }
            }
        }
    }
    let ((bi, bj), best) = counts
        .into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .unwrap_or(((0, 0), 0));
    let p = best as f64 / samples as f64;
    Ok(McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / samples as f64).sqrt(),
        center: C64::new(bi as f64 * h, bj as f64 * h),
        samples,
    })
}

/// Empirical constant `P·√m/t` for the exact ball probability.
pub fn lo_bound_ratio(q: &LoQuery) -> Result<f64> {
    Ok(lo_ball_exact(q)? * (q.m() as f64).sqrt() / q.t)
}

/// Fixed query corpus: flat weights, random unimodular and random real
/// weights, and mixed real/imaginary weights, at radii 1, 2 and 3.
pub fn corpus() -> Vec<LoQuery> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x10_0FF0);
    let mut out = Vec::new();
    for t in [1.0, 2.0, 3.0] {
        for m in 1..=20 {
            out.push(LoQuery::new(vec![C64::new(1.0, 0.0); m], t).expect("valid"));
        }
        for m in [6, 10, 14] {
            // modulus nudged above 1 so rounding in cos/sin keeps |x_i| >= 1
            let x = (0..m).map(|_| C64::from_polar(1.0 + 1e-12, rng.gen_range(0.0..std::f64::consts::TAU))).collect();
            out.push(LoQuery::new(x, t).expect("valid"));
        }
        for m in [8, 12, 16] {
            let x = (0..m)
                .map(|_| C64::new(rng.gen_range(1.0..3.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0))
                .collect();
            out.push(LoQuery::new(x, t).expect("valid"));
        }
        for m in [4, 9, 16] {
            let x = (0..m).map(|k| if k % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) }).collect();
            out.push(LoQuery::new(x, t).expect("valid"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ones(m: usize, t: f64) -> LoQuery {
        LoQuery::new(vec![C64::new(1.0, 0.0); m], t).unwrap()
    }

    fn central_binomial(m: usize) -> f64 {
        let mut c = 1.0;
        for k in 0..m / 2 {
            c = c * (m - k) as f64 / (k + 1) as f64;
        }
        c / 2f64.powi(m as i32)
    }

    #[test]
    fn flat_weights() {
        assert!((lo_ball_exact(&ones(4, 1.0)).unwrap() - 0.375).abs() < 1e-12);
        assert!((lo_ball_exact(&ones(10, 1.0)).unwrap() - 252.0 / 1024.0).abs() < 1e-12);
        for m in 1..=20 {
            assert!((lo_ball_exact(&ones(m, 1.0)).unwrap() - central_binomial(m)).abs() < 1e-12);
        }
        assert!((lo_bound_ratio(&ones(4, 1.0)).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn single_weight() {
        for x in [C64::new(1.0, 0.0), C64::new(0.6, 0.8), C64::new(-3.0, 2.0)] {
            assert_eq!(lo_ball_exact(&LoQuery::new(vec![x], 1.0).unwrap()).unwrap(), 0.5);
        }
    }

    #[test]
    fn validation() {
        assert!(LoQuery::new(vec![C64::new(0.5, 0.0)], 1.0).is_err());
        assert!(LoQuery::new(vec![C64::new(1.0, 0.0)], 0.5).is_err());
        assert!(LoQuery::new(vec![], 1.0).is_err());
        assert!(LoQuery::with_grid(vec![C64::new(1.0, 0.0)], 1.0, 5).is_err());
        assert!(lo_ball_exact(&ones(25, 1.0)).is_err());
    }

    #[test]
    fn invariances() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let m = rng.gen_range(2..10);
            let x: Vec<C64> = (0..m).map(|_| C64::from_polar(rng.gen_range(1.0..2.0), rng.gen_range(0.0..6.3))).collect();
            let t = rng.gen_range(1.0..3.0);
            let base = lo_ball_exact(&LoQuery::new(x.clone(), t).unwrap()).unwrap();
            let phase = C64::from_polar(1.0, rng.gen_range(0.0..6.3));
            let rotated: Vec<C64> = x.iter().map(|v| v * phase).collect();
            assert_eq!(lo_ball_exact(&LoQuery::new(rotated, t).unwrap()).unwrap(), base);
            let mut flipped = x.clone();
            flipped[0] = -flipped[0];
            assert_eq!(lo_ball_exact(&LoQuery::new(flipped, t).unwrap()).unwrap(), base);
            assert!(lo_ball_exact(&LoQuery::new(x, t * 1.5).unwrap()).unwrap() >= base);
        }
    }

    #[test]
    fn monte_carlo_agrees_and_is_deterministic() {
        let q = ones(8, 1.0);
        let a = lo_ball_mc(&q, 20_000, 7).unwrap();
        assert_eq!(a, lo_ball_mc(&q, 20_000, 7).unwrap());
        let exact = lo_ball_exact(&q).unwrap();
        assert!((a.estimate - exact).abs() <= 3.0 * a.stderr, "{a:?} vs {exact}");
        let wide = lo_ball_mc(&ones(8, 2.0), 20_000, 7).unwrap();
        assert!(wide.estimate >= a.estimate);
    }

    #[test]
    fn corpus_is_valid() {
        let c = corpus();
        assert!(c.len() > 60);
        assert!(c.iter().all(|q| q.m() <= 20));
    }
}
