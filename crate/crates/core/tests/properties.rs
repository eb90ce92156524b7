use proptest::prelude::*;

use regsing_core::anticoncentration::{lo_ball_exact, LoQuery};
use regsing_core::disc::{max_disc_cover, Boundary};
use regsing_core::events::{check_omega1, eps1_of_delta, find_zero_minor, reverify, MinorMode, Verdict};
use regsing_core::exact::is_exactly_singular;
use regsing_core::sampler::{derive_seed, sample, ChainState};
use regsing_core::spectra::dense_extremes;
use regsing_core::taxonomy::{classify_dense, compute_params, rearrange};
use regsing_core::{RegularMatrix, C64};

fn nd() -> impl Strategy<Value = (usize, usize)> {
    (2usize..24).prop_flat_map(|n| (Just(n), 1..=n))
}

fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-4i32..5, -4i32..5), 1..max)
        .prop_map(|v| v.into_iter().map(|(a, b)| (a as f64 * 0.5, b as f64 * 0.5)).collect())
}

/// Brute force: best closed disc among centers at points, midpoints and circle intersections.
fn brute_cover(pts: &[C64], r: f64) -> u64 {
    let mut centers: Vec<C64> = pts.to_vec();
    for (i, &a) in pts.iter().enumerate() {
        for &b in &pts[i + 1..] {
            let mid = (a + b) * 0.5;
            let half = (b - a).norm() / 2.0;
            if half > 0.0 && half <= r {
                let h = (r * r - half * half).max(0.0).sqrt();
                let perp = (b - a) * C64::new(0.0, 1.0) / (b - a).norm();
                centers.push(mid + perp * h);
                centers.push(mid - perp * h);
            }
        }
    }
    centers
        .iter()
        .map(|&c| pts.iter().filter(|&&p| (p - c).norm() <= r * (1.0 + 1e-9) + 1e-12).count() as u64)
        .max()
        .unwrap_or(0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_matrices_are_regular((n, d) in nd(), seed in any::<u64>(), steps in 0u64..2000) {
        let m = sample(n, d, steps, seed).unwrap();
        prop_assert!(m.check_invariants());
        prop_assert_eq!((m.n(), m.d()), (n, d));
        let t = m.transpose();
        prop_assert!(t.check_invariants());
        prop_assert_eq!(t.transpose(), m);
    }

    #[test]
    fn switch_is_its_own_inverse((n, d) in nd(), seed in any::<u64>(), i1 in 0usize..24, i2 in 0usize..24, j1 in 0usize..24, j2 in 0usize..24) {
        let m = sample(n, d, 50, seed).unwrap();
        let (i1, i2, j1, j2) = (i1 % n, i2 % n, j1 % n, j2 % n);
        let mut state = ChainState::new(m.clone(), 0);
        if state.propose(i1, i2, j1, j2) {
            prop_assert_ne!(state.matrix(), &m);
            prop_assert!(state.propose(i1, i2, j2, j1));
        }
        prop_assert_eq!(state.matrix(), &m);
    }

    #[test]
    fn matrix_json_round_trip((n, d) in nd(), seed in any::<u64>()) {
        let m = sample(n, d, 100, seed).unwrap();
        prop_assert_eq!(RegularMatrix::from_json(&m.to_json().unwrap()).unwrap(), m);
    }

    #[test]
    fn shifted_apply_matches_dense((n, d) in nd(), seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let m = sample(n, d, 100, seed).unwrap();
        let z = C64::new(re, im);
        let x: Vec<C64> = (0..n).map(|k| C64::new(k as f64 - 1.5, (k * k % 7) as f64)).collect();
        let fast = m.apply_shifted(z, &x).unwrap();
        let dense = m.shifted_dense(z) * nalgebra::DVector::from_column_slice(&x);
        for (a, b) in fast.iter().zip(dense.iter()) {
            prop_assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn singular_values_bracket_shift((n, d) in nd(), seed in any::<u64>(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let m = sample(n, d, 100, seed).unwrap();
        let z = C64::new(re, im);
        let r = dense_extremes(&m, z);
        // s_min ≤ |d − z| ≤ s_max via the all-ones eigenvector
        let gap = (C64::new(d as f64, 0.0) - z).norm();
        prop_assert!(r.s_min <= gap + 1e-9 && gap <= r.s_max + 1e-9);
        prop_assert!(r.s_max <= d as f64 + z.norm() + 1e-9);
    }

    #[test]
    fn numerical_and_exact_singularity_agree_at_zero((n, d) in nd(), seed in any::<u64>()) {
        let m = sample(n, d, 200, seed).unwrap();
        let r = dense_extremes(&m, C64::new(0.0, 0.0));
        let exact = is_exactly_singular(&m, C64::new(0.0, 0.0));
        // integer determinants: nonsingular ⇒ s_min ≥ |det| / s_max^{n−1} ≥ d^{1−n}
        if exact {
            prop_assert!(r.s_min < 1e-8);
        } else {
            prop_assert!(r.s_min >= (d as f64).powi(1 - n as i32) * 0.5);
        }
    }

    #[test]
    fn disc_cover_matches_brute_force(pts in points(14), r in 0.2..2.5f64) {
        let weighted: Vec<(C64, u64)> = pts.iter().map(|&(a, b)| (C64::new(a, b), 1)).collect();
        let plain: Vec<C64> = weighted.iter().map(|p| p.0).collect();
        let cover = max_disc_cover(&weighted, r, Boundary::Closed);
        prop_assert_eq!(cover.weight, brute_cover(&plain, r));
        let inside = plain.iter().filter(|&&p| (p - cover.center).norm() <= r * (1.0 + 1e-9) + 1e-12).count() as u64;
        prop_assert!(inside >= cover.weight);
    }

    #[test]
    fn small_ball_monotone_in_radius(xs in prop::collection::vec((1.0..3.0f64, 0.0..6.3f64), 1..10), t in 1.0..3.0f64, dt in 0.0..2.0f64) {
        let x: Vec<C64> = xs.iter().map(|&(r, a)| C64::from_polar(r, a)).collect();
        let small = lo_ball_exact(&LoQuery::new(x.clone(), t).unwrap()).unwrap();
        let large = lo_ball_exact(&LoQuery::new(x.clone(), t + dt).unwrap()).unwrap();
        prop_assert!(small <= large + 1e-15);
        prop_assert!(small >= 0.5f64.powi(x.len() as i32) - 1e-15 && large <= 1.0);
    }

    #[test]
    fn rearrangement_is_sorted_permutation(x in prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 1..40)) {
        let x: Vec<C64> = x.into_iter().map(|(a, b)| C64::new(a, b)).collect();
        let (s, sigma) = rearrange(&x);
        prop_assert!(s.windows(2).all(|w| w[0] >= w[1]));
        let mut seen = sigma.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..x.len()).collect::<Vec<_>>());
        for (k, &i) in sigma.iter().enumerate() {
            prop_assert_eq!(s[k], x[i].norm());
        }
    }

    #[test]
    fn classification_ignores_scale(seed in any::<u64>(), re in -5.0..5.0f64, im in -5.0..5.0f64) {
        prop_assume!(re.abs() + im.abs() > 1e-3);
        let a1 = 4.3;
        let p = compute_params(1000, 150, a1, a1 / 28.0, a1 / 784.0).unwrap();
        let x: Vec<C64> = (0..1000u64)
            .map(|k| {
                let h = derive_seed(seed, k);
                C64::new((h % 7) as f64 - 3.0, ((h >> 8) % 3) as f64)
            })
            .collect();
        prop_assume!(x.iter().any(|v| v.norm() > 0.0));
        let s = C64::new(re, im);
        let scaled: Vec<C64> = x.iter().map(|&v| v * s).collect();
        let a = classify_dense(&x, &p, p.delta).unwrap();
        let b = classify_dense(&scaled, &p, p.delta).unwrap();
        prop_assert_eq!(a.label, b.label);
    }

    #[test]
    fn event_witnesses_reverify((n, d) in nd(), seed in any::<u64>(), eps in 0.0..0.9f64) {
        let m = sample(n, d, 300, seed).unwrap();
        let rep = check_omega1(&m, eps);
        prop_assert!(reverify(&m, &rep).unwrap());
        let minor = find_zero_minor(&m, 0.3, 0.3, MinorMode::Exact).unwrap();
        prop_assert!(reverify(&m, &minor).unwrap());
        // any a rows meet at most a·d columns, so a·d + b ≤ n forces an a × b zero block
        let a = (0.3 * n as f64).ceil() as usize;
        if a * d + a <= n {
            prop_assert_eq!(minor.verdict, Verdict::Fails);
        }
    }

    #[test]
    fn eps1_decreases_with_delta(a in 0.01..0.98f64, b in 0.01..0.98f64, c1 in 0.1..10.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(eps1_of_delta(lo, c1).unwrap() >= eps1_of_delta(hi, c1).unwrap());
    }
}
