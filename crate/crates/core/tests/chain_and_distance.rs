use std::collections::HashSet;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use regsing_core::enumerate::enumerate_all;
use regsing_core::sampler::{derive_seed, initial_matrix, sample, ChainState};
use regsing_core::spectra::{distance_to_span, verify_distance_lower_bound};
use regsing_core::vector::random_unit;
use regsing_core::C64;

#[test]
fn chain_visits_every_state_of_m42() {
    let all: HashSet<_> = enumerate_all(4, 2).unwrap().into_iter().collect();
    let mut state = ChainState::new(initial_matrix(4, 2).unwrap(), 17);
    let mut seen = HashSet::new();
    seen.insert(state.matrix().clone());
    for _ in 0..1_000_000 {
        if state.switch_step() {
            seen.insert(state.matrix().clone());
        }
    }
    assert_eq!(state.steps_taken(), 1_000_000);
    assert_eq!(seen, all);
}

#[test]
fn same_seed_same_matrix() {
    for k in 0..5 {
        let s = derive_seed(9, k);
        assert_eq!(sample(20, 4, 2000, s).unwrap(), sample(20, 4, 2000, s).unwrap());
    }
    assert_ne!(sample(20, 4, 2000, 1).unwrap(), sample(20, 4, 2000, 2).unwrap());
}

/// Distance from `target` to the span of `span`, by modified Gram–Schmidt.
fn gram_schmidt_distance(target: &[C64], span: &[Vec<C64>]) -> f64 {
    let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>();
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in span {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let norm = dot(&w, &w).re.sqrt();
        let scale = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-10 * scale.max(1.0) {
            basis.push(w.iter().map(|x| x / norm).collect());
        }
    }
    let mut r = target.to_vec();
    for _ in 0..2 {
        for q in &basis {
            let c = dot(q, &r);
            for (ri, qi) in r.iter_mut().zip(q) {
                *ri -= c * qi;
            }
        }
    }
    dot(&r, &r).re.sqrt()
}

fn rows(a: &DMatrix<C64>) -> Vec<Vec<C64>> {
    (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()
}

#[test]
fn distance_matches_gram_schmidt() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for k in 0..60u64 {
        let n = 3 + (k as usize % 25);
        let d = 1 + (k as usize % n.min(6));
        let m = sample(n, d, 2000, derive_seed(21, k)).unwrap();
        let z = C64::new((k % 5) as f64 - 2.0, (k % 3) as f64 * 0.7);
        let a = m.shifted_dense(z);
        let r = rows(&a);
        let (i, j) = ((k as usize) % n, (k as usize + 1) % n);
        let mut span: Vec<Vec<C64>> = vec![r[i].iter().zip(&r[j]).map(|(x, y)| x + y).collect()];
        span.extend((0..n).filter(|&l| l != i && l != j).map(|l| r[l].clone()));
        let oracle = gram_schmidt_distance(&r[i], &span);
        let got = distance_to_span(&a, i, j).unwrap();
        assert!((got - oracle).abs() <= 1e-9, "n = {n}, d = {d}: {got} vs {oracle}");

        let v = random_unit(n, &mut rng);
        let cert = verify_distance_lower_bound(&a, &v).unwrap();
        assert!(cert.holds);
    }
}

#[test]
fn singular_shift_has_zero_distance_somewhere() {
    // all-ones: every row is the same, so R_1 lies in the span of the others
    let m = regsing_core::RegularMatrix::all_ones(5);
    let a = m.shifted_dense(C64::new(0.0, 0.0));
    assert!(distance_to_span(&a, 0, 1).unwrap() < 1e-12);
}
