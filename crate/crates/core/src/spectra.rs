//! Extreme singular values of `A = M − zI` and the distance-to-span verifier.
//!
//! Two routes compute `s_min`:
//!
//! * dense: full SVD (Householder bidiagonalisation + implicit QR), used for `n ≤ 512`;
//! * iterative: block inverse iteration on the Gram operator `A†A`, applied as
//!   `A⁻¹A⁻†` through LU factors of `A` and `A†`, with Rayleigh–Ritz on the block.
//!   `s_max` comes from block power iteration using sparse products only.
//!
//! Tolerances: the iterative route stops once the smallest Ritz value changes by
//! less than `rel_tol` (default `1e-13`) relative, or `abs_tol·s_max` (default
//! `1e-14`) absolute, between sweeps.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::vector::{self, norm};
use crate::{Error, RegularMatrix, Result, C64};

/// Largest dimension handled by the dense route in [`singular_extremes`].
pub const DENSE_LIMIT: usize = 512;

/// `s_min < SINGULAR_REL · s_max` is reported as numerically singular.
pub const SINGULAR_REL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub s_min: f64,
    pub s_max: f64,
    /// Unit vector with `‖A v_min‖ = s_min` (one choice when `s_min` is multiple).
    pub v_min: Vec<C64>,
    /// `| ‖A v_min‖ − s_min |` as measured when the report was produced.
    pub residual: f64,
    pub method: Method,
}

impl SpectralReport {
    pub fn is_numerically_singular(&self) -> bool {
        self.s_min < SINGULAR_REL * self.s_max
    }

    /// Re-checks the report against `M − zI`: unit `v_min`, ordering, and
    /// `| ‖A v_min‖ − s_min | ≤ tol`.
    pub fn verify(&self, m: &RegularMatrix, z: C64, tol: f64) -> Result<bool> {
        let av = m.apply_shifted(z, &self.v_min)?;
        let unit = (norm(&self.v_min) - 1.0).abs() <= 1e-12;
        let ordered = 0.0 <= self.s_min && self.s_min <= self.s_max * (1.0 + 1e-12);
        Ok(unit && ordered && (norm(&av) - self.s_min).abs() <= tol)
    }
}

/// Default residual tolerance for a report: `1e-10·max(1, s_max)`.
pub fn residual_tolerance(s_max: f64) -> f64 {
    1e-10 * s_max.max(1.0)
}

#[derive(Clone, Copy, Debug)]
pub struct IterativeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_iters: usize,
    pub block: usize,
    pub seed: u64,
}

impl Default for IterativeOptions {
    fn default() -> Self {
        IterativeOptions { rel_tol: 1e-13, abs_tol: 1e-14, max_iters: 500, block: 4, seed: 0x5eed }
    }
}

/// `s_min` and `s_max` of `M − zI`, dense for `n ≤ 512`, iterative above.
pub fn singular_extremes(m: &RegularMatrix, z: C64) -> Result<SpectralReport> {
    if m.n() <= DENSE_LIMIT {
        Ok(dense_extremes(m, z))
    } else {
        iterative_extremes(m, z, &IterativeOptions::default())
    }
}

pub fn singular_extremes_with(m: &RegularMatrix, z: C64, method: Method) -> Result<SpectralReport> {
    match method {
        Method::Dense => Ok(dense_extremes(m, z)),
        Method::Iterative => iterative_extremes(m, z, &IterativeOptions::default()),
    }
}

/// Full SVD route. Real arithmetic is used when `z` is real.
pub fn dense_extremes(m: &RegularMatrix, z: C64) -> SpectralReport {
    let (s_min, s_max, v_min) = if z.im == 0.0 {
        let svd = m.shifted_dense_real(z.re).svd(false, true);
        let (k_min, k_max) = extreme_indices(svd.singular_values.as_slice());
        let vt = svd.v_t.expect("v requested");
        let v: Vec<C64> = vt.row(k_min).iter().map(|&x| C64::new(x, 0.0)).collect();
        (svd.singular_values[k_min], svd.singular_values[k_max], v)
    } else {
        let svd = m.shifted_dense(z).svd(false, true);
        let (k_min, k_max) = extreme_indices(svd.singular_values.as_slice());
        let vt = svd.v_t.expect("v requested");
        let v: Vec<C64> = vt.row(k_min).iter().map(|x| x.conj()).collect();
        (svd.singular_values[k_min], svd.singular_values[k_max], v)
    };
    let v_min = vector::normalized(&v_min).unwrap_or(v_min);
    let residual = (norm(&m.apply_shifted(z, &v_min).expect("dims")) - s_min).abs();
    SpectralReport { s_min, s_max, v_min, residual, method: Method::Dense }
}

fn extreme_indices(s: &[f64]) -> (usize, usize) {
    let mut k_min = 0;
    let mut k_max = 0;
    for (k, &v) in s.iter().enumerate() {
        if v < s[k_min] {
            k_min = k;
        }
        if v > s[k_max] {
            k_max = k;
        }
    }
    (k_min, k_max)
}

/// Block inverse iteration for `s_min`, block power iteration for `s_max`.
pub fn iterative_extremes(m: &RegularMatrix, z: C64, opts: &IterativeOptions) -> Result<SpectralReport> {
    let n = m.n();
    let block = opts.block.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let s_max = largest_singular(m, z, block, opts, &mut rng)?;

    let a = m.shifted_dense(z);
    let lu = a.clone().lu();
    let lu_adj = a.adjoint().lu();
    let mut q = random_block(n, block, &mut rng);
    let mut prev = f64::INFINITY;
    let mut best = (f64::INFINITY, Vec::new());
    for iter in 0..opts.max_iters {
        // Y = A⁻¹ A⁻† Q
        let mut y = q.clone();
        if !lu_adj.solve_mut(&mut y) || !lu.solve_mut(&mut y) || y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            // exactly singular to working precision: only the dense route can give a null vector
            let mut rep = dense_extremes(m, z);
            rep.s_max = s_max.max(rep.s_max);
            return Ok(rep);
        }
        q = orthonormal_columns(&y);
        let (sigma, v) = smallest_ritz(m, z, &q);
        if sigma < best.0 {
            best = (sigma, v.clone());
        }
        let settled = (prev - sigma).abs() <= opts.rel_tol * sigma + opts.abs_tol * s_max;
        prev = sigma;
        if iter >= 2 && settled {
            let residual = (norm(&m.apply_shifted(z, &v)?) - sigma).abs();
            return Ok(SpectralReport { s_min: sigma, s_max, v_min: v, residual, method: Method::Iterative });
        }
    }
    let residual = (norm(&m.apply_shifted(z, &best.1)?) - best.0).abs();
    Err(Error::NotConverged { iters: opts.max_iters, residual })
}

fn largest_singular(m: &RegularMatrix, z: C64, block: usize, opts: &IterativeOptions, rng: &mut ChaCha8Rng) -> Result<f64> {
    let n = m.n();
    let mut q = random_block(n, block, rng);
    let mut prev = 0.0f64;
    for iter in 0..opts.max_iters {
        let mut y = DMatrix::<C64>::zeros(n, q.ncols());
        for c in 0..q.ncols() {
            let col: Vec<C64> = q.column(c).iter().copied().collect();
            let ax = m.apply_shifted(z, &col)?;
            let g = m.apply_hermitian_adjoint(z, &ax)?;
            y.set_column(c, &DVector::from_vec(g));
        }
        q = orthonormal_columns(&y);
        let aq = apply_block(m, z, &q);
        let s = aq.singular_values();
        let top = s.iter().copied().fold(0.0, f64::max);
        if iter >= 2 && (top - prev).abs() <= 1e-15 * top {
            return Ok(top);
        }
        prev = top;
    }
    Ok(prev)
}

fn random_block(n: usize, b: usize, rng: &mut ChaCha8Rng) -> DMatrix<C64> {
    let cols: Vec<C64> = (0..n * b).map(|_| C64::new(vector::gaussian(rng), vector::gaussian(rng))).collect();
    orthonormal_columns(&DMatrix::from_vec(n, b, cols))
}

fn apply_block(m: &RegularMatrix, z: C64, q: &DMatrix<C64>) -> DMatrix<C64> {
    let mut out = DMatrix::<C64>::zeros(q.nrows(), q.ncols());
    for c in 0..q.ncols() {
        let col: Vec<C64> = q.column(c).iter().copied().collect();
        out.set_column(c, &DVector::from_vec(m.apply_shifted(z, &col).expect("dims")));
    }
    out
}

/// Rayleigh–Ritz on span(Q): smallest singular value of `A Q` and its lifted vector.
fn smallest_ritz(m: &RegularMatrix, z: C64, q: &DMatrix<C64>) -> (f64, Vec<C64>) {
    let aq = apply_block(m, z, q);
    let svd = aq.svd(false, true);
    let (k_min, _) = extreme_indices(svd.singular_values.as_slice());
    let w: DVector<C64> = svd.v_t.expect("v requested").row(k_min).adjoint();
    let v = q * w;
    let v: Vec<C64> = v.iter().copied().collect();
    let v = vector::normalized(&v).unwrap_or(v);
    let sigma = norm(&m.apply_shifted(z, &v).expect("dims"));
    (sigma, v)
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass; dependent columns are dropped.
fn orthonormal_columns(y: &DMatrix<C64>) -> DMatrix<C64> {
    let mut cols: Vec<DVector<C64>> = Vec::with_capacity(y.ncols());
    for c in 0..y.ncols() {
        let mut v: DVector<C64> = y.column(c).into_owned();
        let original = v.norm();
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let nv = v.norm();
        if nv > 1e-12 * original && nv > 0.0 {
            cols.push(v / C64::new(nv, 0.0));
        }
    }
    if cols.is_empty() {
        let mut e = DVector::<C64>::zeros(y.nrows());
        e[0] = C64::new(1.0, 0.0);
        cols.push(e);
    }
    DMatrix::from_columns(&cols)
}

/// Rows of a dense matrix as vectors of `C^n` (no conjugation).
fn row_vec(a: &DMatrix<C64>, i: usize) -> DVector<C64> {
    a.row(i).transpose()
}

/// `dist(R_i, span({R_k : k ≠ i, j} ∪ {R_i + R_j}))` via an SVD projector on the spanning set.
pub fn distance_to_span(a: &DMatrix<C64>, i: usize, j: usize) -> Result<f64> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a.ncols() });
    }
    if i >= n || j >= n {
        return Err(Error::IndexOutOfRange { index: i.max(j), n });
    }
    if i == j {
        return Err(Error::InvalidParameter("distance_to_span needs i != j".into()));
    }
    let target = row_vec(a, i);
    let mut span: Vec<DVector<C64>> = vec![&target + row_vec(a, j)];
    span.extend((0..n).filter(|&k| k != i && k != j).map(|k| row_vec(a, k)));
    let b = DMatrix::from_columns(&span);
    let svd = b.svd(true, false);
    let u = svd.u.expect("u requested");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = smax * f64::EPSILON * n as f64;
    let mut residual = target.clone();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let uk = u.column(k);
            let coef = uk.dotc(&target);
            residual -= uk * coef;
        }
    }
    Ok(residual.norm())
}

/// Every quantity entering the distance inequality for rows 1 and 2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceCertificate {
    pub s_n: f64,
    /// `|⟨R_1†, v⟩| = |(Av)_1|`
    pub inner_1: f64,
    /// `|⟨R_1† + R_2†, v⟩| = |(Av)_1 + (Av)_2|`
    pub inner_12: f64,
    /// `‖A^{1,2} v‖`: `Av` without its first two coordinates.
    pub tail_norm: f64,
    pub distance: f64,
    pub bound: f64,
    pub holds: bool,
    /// Whether `‖A^{1,2}v‖ ≤ s_n` and `|⟨R_1†+R_2†, v⟩| ≤ 2 s_n`.
    pub corollary_hypotheses: bool,
    /// `dist ≥ |⟨R_1†, v⟩|/4`, evaluated only under the hypotheses.
    pub corollary_holds: Option<bool>,
}

/// Slack allowed when comparing the distance with the bound.
pub const DISTANCE_SLACK: f64 = 1e-9;

/// Evaluates `dist(R_1, Y) ≥ s_n |⟨R_1†,v⟩| / (s_n + ‖A^{1,2}v‖ + |⟨R_1†+R_2†,v⟩|)`
/// and the `/4` corollary when its hypotheses hold.
pub fn verify_distance_lower_bound(a: &DMatrix<C64>, v: &[C64]) -> Result<DistanceCertificate> {
    let n = a.nrows();
    if a.ncols() != n || v.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: v.len() });
    }
    if n < 2 {
        return Err(Error::InvalidParameter("need at least two rows".into()));
    }
    let nv = norm(v);
    if (nv - 1.0).abs() > 1e-10 {
        return Err(Error::NotUnit(nv));
    }
    let s_n = a.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    let av = a * DVector::from_column_slice(v);
    let inner_1 = av[0].norm();
    let inner_12 = (av[0] + av[1]).norm();
    let tail: Vec<C64> = av.iter().skip(2).copied().collect();
    let tail_norm = norm(&tail);
    let denom = s_n + tail_norm + inner_12;
    let bound = if denom > 0.0 { s_n * inner_1 / denom } else { 0.0 };
    let distance = distance_to_span(a, 0, 1)?;
    let holds = distance >= bound - DISTANCE_SLACK;
    let loose = |x: f64, cap: f64| x <= cap * (1.0 + 1e-9) + 1e-12;
    let corollary_hypotheses = loose(tail_norm, s_n) && loose(inner_12, 2.0 * s_n);
    let corollary_holds = corollary_hypotheses.then(|| distance >= inner_1 / 4.0 - DISTANCE_SLACK);
    Ok(DistanceCertificate {
        s_n,
        inner_1,
        inner_12,
        tail_norm,
        distance,
        bound,
        holds,
        corollary_hypotheses,
        corollary_holds,
    })
}
