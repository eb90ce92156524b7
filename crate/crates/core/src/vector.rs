//! Small helpers on complex vectors stored as plain slices.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::C64;

pub fn norm(x: &[C64]) -> f64 {
    // scaled accumulation keeps tiny and huge vectors finite
    let scale = x.iter().fold(0.0f64, |m, v| m.max(v.re.abs()).max(v.im.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let s: f64 = x
        .iter()
        .map(|v| {
            let (a, b) = (v.re / scale, v.im / scale);
            a * a + b * b
        })
        .sum();
    scale * s.sqrt()
}

/// Hermitian inner product `Σ a_i · conj(b_i)`.
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn scale(x: &[C64], c: C64) -> Vec<C64> {
    x.iter().map(|v| v * c).collect()
}

pub fn normalized(x: &[C64]) -> Option<Vec<C64>> {
    let nrm = norm(x);
    if nrm == 0.0 || !nrm.is_finite() {
        return None;
    }
    Some(x.iter().map(|v| v / nrm).collect())
}

pub fn is_finite(x: &[C64]) -> bool {
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}

/// Uniformly distributed unit vector in `C^n` (normalised complex Gaussian).
pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let x: Vec<C64> = (0..n)
            .map(|_| C64::new(gaussian(rng), gaussian(rng)))
            .collect();
        if let Some(u) = normalized(&x) {
            return u;
        }
    }
}

/// Standard normal deviate.
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
