//! Maximum weight of points covered by a disc of fixed radius.
//!
//! Exact sweep: some optimal disc has a point on its boundary, so for every
//! point `p` the centers `p + r·e^{iα}` are swept over `α`, each neighbour `q`
//! with `|q − p| ≤ 2r` contributing the arc of angles whose disc contains `q`.
//! A uniform grid of cell size `2r` restricts the neighbour search.

use std::collections::HashMap;
use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::C64;

/// Whether the disc includes its boundary circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Closed,
    Open,
}

/// Relative slack applied to the radius: closed discs are widened and open
/// discs narrowed by this factor, so rounding noise in the inputs does not
/// decide membership of points lying on the circle.
pub const RADIUS_SLACK: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cover {
    pub weight: u64,
    pub center: C64,
}

fn effective_radius(radius: f64, boundary: Boundary) -> f64 {
    match boundary {
        Boundary::Closed => radius * (1.0 + RADIUS_SLACK),
        Boundary::Open => radius * (1.0 - RADIUS_SLACK),
    }
}

struct Grid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl Grid {
    fn new(points: &[(C64, u64)], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (k, (z, _)) in points.iter().enumerate() {
            buckets.entry(Self::key(*z, cell)).or_default().push(k);
        }
        Grid { cell, buckets }
    }

    fn key(z: C64, cell: f64) -> (i64, i64) {
        ((z.re / cell).floor() as i64, (z.im / cell).floor() as i64)
    }

    fn neighbours(&self, z: C64) -> impl Iterator<Item = usize> + '_ {
        let (a, b) = Self::key(z, self.cell);
        // keys saturate when the cell is tiny next to the coordinates; dedup so
        // no bucket is visited twice
        let mut keys: Vec<(i64, i64)> = (-1..=1)
            .flat_map(|da: i64| (-1..=1).map(move |db: i64| (a.saturating_add(da), b.saturating_add(db))))
            .collect();
        keys.sort_unstable();
        keys.dedup();
        keys.into_iter()
            .filter_map(move |k| self.buckets.get(&k))
            .flatten()
            .copied()
    }
}

/// Exact maximum total weight inside a disc of the given radius, with a center achieving it.
pub fn max_disc_cover(points: &[(C64, u64)], radius: f64, boundary: Boundary) -> Cover {
    if points.is_empty() {
        return Cover { weight: 0, center: C64::new(0.0, 0.0) };
    }
    let r = effective_radius(radius, boundary);
    if r.is_infinite() {
        return Cover { weight: points.iter().map(|p| p.1).sum(), center: points[0].0 };
    }
    if !(r > 0.0) {
        return match boundary {
            Boundary::Open => Cover { weight: 0, center: points[0].0 },
            Boundary::Closed => max_coincident(points),
        };
    }
    let grid = Grid::new(points, 2.0 * r);
    // each anchor point is independent; ties go to the lowest index
    points
        .par_iter()
        .enumerate()
        .map(|(k, &(p, wp))| (k, sweep_around(points, &grid, k, p, wp, r)))
        .reduce(
            || (usize::MAX, Cover { weight: 0, center: points[0].0 }),
            |a, b| if b.1.weight > a.1.weight || (b.1.weight == a.1.weight && b.0 < a.0) { b } else { a },
        )
        .1
}

fn sweep_around(points: &[(C64, u64)], grid: &Grid, k: usize, p: C64, wp: u64, r: f64) -> Cover {
    let mut events: Vec<(f64, i64)> = Vec::new();
    let mut base = wp;
    for q_idx in grid.neighbours(p) {
        if q_idx == k {
            continue;
        }
        let (q, wq) = points[q_idx];
        let delta = q - p;
        let dist = delta.norm();
        if dist > 2.0 * r {
            continue;
        }
        if dist <= r * 1e-12 {
            base += wq;
            continue;
        }
        let theta = delta.im.atan2(delta.re);
        let phi = (dist / (2.0 * r)).min(1.0).acos();
        let start = (theta - phi).rem_euclid(TAU);
        let end = start + 2.0 * phi;
        if end <= TAU {
            events.push((start, wq as i64));
            events.push((end, -(wq as i64)));
        } else {
            events.push((start, wq as i64));
            events.push((TAU, -(wq as i64)));
            events.push((0.0, wq as i64));
            events.push((end - TAU, -(wq as i64)));
        }
    }
    // arcs are closed: at equal angles, openings precede closings
    events.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
    let mut cur: i64 = 0;
    let mut local_best = (0i64, 0.0f64);
    for &(angle, w) in &events {
        cur += w;
        if cur > local_best.0 {
            local_best = (cur, angle);
        }
    }
    let center = if local_best.0 > 0 { p + C64::from_polar(r, local_best.1) } else { p };
    Cover { weight: base + local_best.0 as u64, center }
}

fn max_coincident(points: &[(C64, u64)]) -> Cover {
    let mut groups: HashMap<(u64, u64), (u64, C64)> = HashMap::new();
    for &(z, w) in points {
        let key = ((z.re + 0.0).to_bits(), (z.im + 0.0).to_bits());
        groups.entry(key).or_insert((0, z)).0 += w;
    }
    let (weight, center) = groups.into_values().max_by_key(|g| g.0).expect("nonempty");
    Cover { weight, center }
}

/// Largest weight inside a disc centered at one of the input points.
///
/// Any disc of radius `r` containing a point `p` lies inside the disc of radius
/// `2r` centered at `p`; callers use this for a two-sided approximation.
pub fn max_cover_centered_at_points(points: &[(C64, u64)], radius: f64, boundary: Boundary) -> Cover {
    if points.is_empty() {
        return Cover { weight: 0, center: C64::new(0.0, 0.0) };
    }
    let r = effective_radius(radius, boundary);
    if r <= 0.0 {
        return if boundary == Boundary::Open {
            Cover { weight: 0, center: points[0].0 }
        } else {
            max_coincident(points)
        };
    }
    let grid = Grid::new(points, r);
    let mut best = Cover { weight: 0, center: points[0].0 };
    for &(p, _) in points {
        let w: u64 = grid
            .neighbours(p)
            .filter(|&q| (points[q].0 - p).norm() <= r)
            .map(|q| points[q].1)
            .sum();
        if w > best.weight {
            best = Cover { weight: w, center: p };
        }
    }
    best
}

/// One-dimensional analogue: maximum weight in an interval of half-width `half_width`.
/// Returns the weight and the interval's midpoint.
pub fn max_interval_cover(values: &[(f64, u64)], half_width: f64, boundary: Boundary) -> (u64, f64) {
    if values.is_empty() {
        return (0, 0.0);
    }
    let mut v: Vec<(f64, u64)> = values.to_vec();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let width = 2.0 * effective_radius(half_width, boundary);
    if boundary == Boundary::Open && !(width > 0.0) {
        return (0, v[0].0);
    }
    let mut best = (0u64, v[0].0);
    let mut lo = 0usize;
    let mut acc = 0u64;
    for hi in 0..v.len() {
        acc += v[hi].1;
        while v[hi].0 - v[lo].0 > width {
            acc -= v[lo].1;
            lo += 1;
        }
        if acc > best.0 {
            best = (acc, 0.5 * (v[lo].0 + v[hi].0));
        }
    }
    best
}

/// Total weight within (closed/open) distance `radius` of `center`.
pub fn weight_within(points: &[(C64, u64)], center: C64, radius: f64, boundary: Boundary) -> u64 {
    let r = effective_radius(radius, boundary);
    points
        .iter()
        .filter(|(z, _)| match boundary {
            Boundary::Closed => (z - center).norm() <= r,
            Boundary::Open => (z - center).norm() < r,
        })
        .map(|p| p.1)
        .sum()
}
