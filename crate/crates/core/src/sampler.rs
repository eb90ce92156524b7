//! Approximately uniform sampling from `M_{n,d}` with the 2×2 switch chain.
//!
//! Each step proposes rows `i1 ≠ i2` and columns `j1 ≠ j2` uniformly. If the
//! submatrix on those lines is `[[1,0],[0,1]]` it is flipped to `[[0,1],[1,0]]`;
//! otherwise the chain holds. The proposal is symmetric, so the uniform law on
//! `M_{n,d}` is stationary.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::enumerate::{enumerate_all, MAX_ENUM_N};
use crate::{Error, RegularMatrix, Result};

/// Switch attempts used when no burn-in is configured: `20·n·d`.
pub fn default_burn_in(n: usize, d: usize) -> u64 {
    20 * n as u64 * d as u64
}

/// Seed for trial `index` of a campaign with `master` seed.
///
/// SplitMix64 finaliser over `master ⊕ (index+1)·φ`; stable across versions.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Circulant start: row `i` is supported on `{i, …, i+d−1} mod n`.
pub fn initial_matrix(n: usize, d: usize) -> Result<RegularMatrix> {
    if n == 0 || d == 0 || d > n {
        return Err(Error::InvalidParameter(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
    }
    let rows = (0..n)
        .map(|i| {
            let mut r: Vec<usize> = (0..d).map(|k| (i + k) % n).collect();
            r.sort_unstable();
            r
        })
        .collect();
    RegularMatrix::from_row_supports(n, d, rows)
}

/// One chain: current matrix, its RNG and a step counter.
#[derive(Clone, Debug)]
pub struct ChainState {
    matrix: RegularMatrix,
    rng: ChaCha8Rng,
    seed: u64,
    steps_taken: u64,
}

impl ChainState {
    pub fn new(matrix: RegularMatrix, seed: u64) -> Self {
        ChainState { matrix, rng: ChaCha8Rng::seed_from_u64(seed), seed, steps_taken: 0 }
    }

    pub fn matrix(&self) -> &RegularMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RegularMatrix {
        self.matrix
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn steps_taken(&self) -> u64 {
        self.steps_taken
    }

    /// One lazy switch step with a random proposal. Returns whether the state moved.
    pub fn switch_step(&mut self) -> bool {
        let n = self.matrix.n();
        self.steps_taken += 1;
        if n < 2 {
            return false;
        }
        let (i1, i2) = distinct_pair(&mut self.rng, n);
        let (j1, j2) = distinct_pair(&mut self.rng, n);
        self.matrix.try_switch(i1, i2, j1, j2)
    }

    /// Applies the given proposal deterministically (counts as a step).
    pub fn propose(&mut self, i1: usize, i2: usize, j1: usize, j2: usize) -> bool {
        self.steps_taken += 1;
        let n = self.matrix.n();
        if i1 >= n || i2 >= n || j1 >= n || j2 >= n {
            return false;
        }
        self.matrix.try_switch(i1, i2, j1, j2)
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.switch_step();
        }
    }
}

fn distinct_pair<R: Rng>(rng: &mut R, n: usize) -> (usize, usize) {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    (a, b)
}

/// Runs `burn_in` switch attempts from the circulant start. Deterministic in all arguments.
pub fn sample(n: usize, d: usize, burn_in: u64, seed: u64) -> Result<RegularMatrix> {
    let mut state = ChainState::new(initial_matrix(n, d)?, seed);
    state.run(burn_in);
    Ok(state.into_matrix())
}

/// `count` independent samples; sample `k` uses seed `derive_seed(seed, k)`.
pub fn sample_many(n: usize, d: usize, burn_in: u64, seed: u64, count: usize) -> Result<Vec<RegularMatrix>> {
    initial_matrix(n, d)?;
    (0..count as u64)
        .into_par_iter()
        .map(|k| sample(n, d, burn_in, derive_seed(seed, k)))
        .collect()
}

/// Pearson statistic of sampled class counts against the uniform law on `M_{n,d}`.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub classes: usize,
    pub samples: usize,
}

impl ChiSquare {
    /// Upper `q`-quantile of the reference distribution (0 when there is one class).
    pub fn quantile(&self, q: f64) -> f64 {
        if self.dof == 0 {
            return 0.0;
        }
        ChiSquared::new(self.dof as f64).expect("positive dof").inverse_cdf(q)
    }

    pub fn p_value(&self) -> f64 {
        if self.dof == 0 {
            return 1.0;
        }
        1.0 - ChiSquared::new(self.dof as f64).expect("positive dof").cdf(self.statistic)
    }
}

/// Draws `samples` independent chains and tests the class frequencies for uniformity.
pub fn uniformity_chi_square(n: usize, d: usize, samples: usize, burn_in: u64, seed: u64) -> Result<ChiSquare> {
    if n > MAX_ENUM_N {
        return Err(Error::TooLarge { what: "n", value: n as u128, cap: MAX_ENUM_N as u128 });
    }
    let drawn = sample_many(n, d, burn_in, seed, samples)?;
    chi_square_of(n, d, &drawn)
}

/// Pearson statistic of the given matrices against the uniform law on `M_{n,d}` (`n ≤ 7`).
pub fn chi_square_of(n: usize, d: usize, drawn: &[RegularMatrix]) -> Result<ChiSquare> {
    let classes = enumerate_all(n, d)?;
    let index: HashMap<&RegularMatrix, usize> = classes.iter().enumerate().map(|(k, m)| (m, k)).collect();
    let mut counts = vec![0u64; classes.len()];
    for m in drawn {
        let k = index.get(m).ok_or_else(|| Error::InvalidParameter("matrix outside M_{n,d}".into()))?;
        counts[*k] += 1;
    }
    let samples = drawn.len();
    let expected = samples as f64 / classes.len() as f64;
    let statistic = if samples == 0 {
        0.0
    } else {
        counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum()
    };
    Ok(ChiSquare { statistic, dof: classes.len() - 1, classes: classes.len(), samples })
}
