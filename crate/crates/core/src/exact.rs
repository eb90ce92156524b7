//! Exact arithmetic for confirming or refuting tiny singular values.
//!
//! Every `f64` is a dyadic rational, so a floating shift `z` makes `M − zI` an
//! exact matrix over `Q(i)`. Two tools are provided:
//!
//! * fraction-free (Bareiss) elimination over the Gaussian integers, deciding
//!   exact singularity;
//! * an enclosure `lower ≤ s_min ≤ upper` from a floating approximate inverse
//!   `X`: the residual `E = I − AX` is formed exactly, and when `‖E‖_F < 1`,
//!   `s_min ≥ (1 − ‖E‖_F)/‖X‖_F`; any vector `v` gives `s_min ≤ ‖Av‖/‖v‖`.
//!
//! Dyadic-to-float conversions at the very end are widened by `CONVERSION_SLACK`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::{Error, RegularMatrix, Result, C64};

/// Relative widening applied when rounding exact quantities to `f64`.
pub const CONVERSION_SLACK: f64 = 1e-13;

/// Exact `mant · 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic conversion of a non-finite value");
        if x == 0.0 {
            return Self::zero();
        }
        let (mant, exp, sign) = Float::integer_decode(x);
        let mant = BigInt::from(mant) * i64::from(sign);
        Dyadic { mant, exp: i64::from(exp) }
    }

    pub fn from_int(k: i64) -> Self {
        Dyadic { mant: BigInt::from(k), exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let exp = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - exp) as usize;
        let b = &other.mant << (other.exp - exp) as usize;
        Dyadic { mant: a + b, exp }
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let diff = self.sub(other);
        if diff.mant.is_zero() {
            Ordering::Equal
        } else if diff.mant.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }

    /// Nearest-ish `f64`; relative error at most a few ulps.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let shift = (bits - 62).max(0);
        let top = (&self.mant >> shift as usize).to_f64().expect("fits after shift");
        let e = self.exp + shift;
        // split the scaling to stay clear of intermediate overflow
        let half = (e / 2) as i32;
        top * 2f64.powi(half) * 2f64.powi(e as i32 - half)
    }

    /// The pair `(mant, exp)` with `mant` an integer.
    pub fn parts(&self) -> (&BigInt, i64) {
        (&self.mant, self.exp)
    }
}

/// Exact complex dyadic `re + i·im`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexDyadic {
    pub re: Dyadic,
    pub im: Dyadic,
}

impl ComplexDyadic {
    pub fn from_c64(z: C64) -> Self {
        ComplexDyadic { re: Dyadic::from_f64(z.re), im: Dyadic::from_f64(z.im) }
    }

    pub fn zero() -> Self {
        ComplexDyadic { re: Dyadic::zero(), im: Dyadic::zero() }
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexDyadic { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexDyadic { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexDyadic {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn norm_sqr(&self) -> Dyadic {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }
}

/// Gaussian integer `a + bi` with `BigInt` parts.
#[derive(Clone, Debug, PartialEq, Eq)]
struct GaussInt {
    re: BigInt,
    im: BigInt,
}

impl GaussInt {
    fn zero() -> Self {
        GaussInt { re: BigInt::zero(), im: BigInt::zero() }
    }

    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    fn mul(&self, o: &Self) -> Self {
        GaussInt { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }

    fn sub(&self, o: &Self) -> Self {
        GaussInt { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    /// Exact quotient; the caller guarantees divisibility.
    fn div_exact(&self, o: &Self) -> Self {
        let n = &o.re * &o.re + &o.im * &o.im;
        let re = &self.re * &o.re + &self.im * &o.im;
        let im = &self.im * &o.re - &self.re * &o.im;
        debug_assert!((&re % &n).is_zero() && (&im % &n).is_zero(), "Bareiss division must be exact");
        GaussInt { re: re / &n, im: im / &n }
    }
}

/// `2^K (M − zI)` as a Gaussian-integer matrix, with `K` the smallest scale clearing denominators.
fn scaled_integer_matrix(m: &RegularMatrix, z: C64) -> Vec<Vec<GaussInt>> {
    let zd = ComplexDyadic::from_c64(z);
    let min_exp = zd.re.exp.min(zd.im.exp).min(0);
    let k = (-min_exp).max(0);
    let lift = |d: &Dyadic| -> BigInt {
        if d.is_zero() {
            BigInt::zero()
        } else {
            &d.mant << (d.exp + k) as usize
        }
    };
    let (zr, zi) = (lift(&zd.re), lift(&zd.im));
    let one = BigInt::one() << k as usize;
    let n = m.n();
    let mut a = vec![vec![GaussInt::zero(); n]; n];
    for (i, row) in m.rows().iter().enumerate() {
        for &j in row {
            a[i][j].re = one.clone();
        }
        a[i][i].re -= &zr;
        a[i][i].im -= &zi;
    }
    a
}

/// Exact singularity of `M − zI` (with `z` read as the dyadic rational it stores)
/// by Bareiss elimination over `Z[i]`.
pub fn is_exactly_singular(m: &RegularMatrix, z: C64) -> bool {
    let mut a = scaled_integer_matrix(m, z);
    let n = a.len();
    let mut prev = GaussInt { re: BigInt::one(), im: BigInt::zero() };
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return true;
        };
        a.swap(k, p);
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev);
            }
            a[i][k] = GaussInt::zero();
        }
        prev = a[k][k].clone();
    }
    false
}

/// Exact integer determinant of `M` (zero shift), for cross-checks.
pub fn determinant_unshifted(m: &RegularMatrix) -> BigInt {
    let mut a = scaled_integer_matrix(m, C64::new(0.0, 0.0));
    let n = a.len();
    let mut prev = GaussInt { re: BigInt::one(), im: BigInt::zero() };
    let mut sign = BigInt::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return BigInt::zero();
        };
        if p != k {
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let t = a[i][j].mul(&a[k][k]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = t.div_exact(&prev);
            }
            a[i][k] = GaussInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * &prev.re
}

/// Rigorous bracket on `s_min(M − zI)`. `lower` is `None` when the approximate
/// inverse was not accurate enough (`‖I − AX‖_F ≥ 1`) or `A` is numerically singular.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SminEnclosure {
    pub lower: Option<f64>,
    pub upper: f64,
    pub residual_frobenius: Option<f64>,
}

fn exact_row_action(m: &RegularMatrix, z: &ComplexDyadic, x: &[ComplexDyadic]) -> Vec<ComplexDyadic> {
    m.rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut acc = ComplexDyadic::zero();
            for &j in row {
                acc = acc.add(&x[j]);
            }
            acc.sub(&z.mul(&x[i]))
        })
        .collect()
}

fn widen_up(x: f64) -> f64 {
    x * (1.0 + CONVERSION_SLACK)
}

fn widen_down(x: f64) -> f64 {
    x * (1.0 - CONVERSION_SLACK)
}

/// Upper bound `‖Av‖/‖v‖` computed exactly, then rounded upward.
pub fn smin_upper_bound(m: &RegularMatrix, z: C64, v: &[C64]) -> Result<f64> {
    if v.len() != m.n() {
        return Err(Error::DimensionMismatch { expected: m.n(), got: v.len() });
    }
    let zd = ComplexDyadic::from_c64(z);
    let vd: Vec<ComplexDyadic> = v.iter().map(|&c| ComplexDyadic::from_c64(c)).collect();
    let av = exact_row_action(m, &zd, &vd);
    let num = av.iter().fold(Dyadic::zero(), |s, c| s.add(&c.norm_sqr()));
    let den = vd.iter().fold(Dyadic::zero(), |s, c| s.add(&c.norm_sqr()));
    if den.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(widen_up((widen_up(num.to_f64()) / widen_down(den.to_f64())).sqrt()))
}

/// Two-sided enclosure of `s_min(M − zI)` using the test vector `v` for the upper side.
pub fn certify_smin(m: &RegularMatrix, z: C64, v: &[C64]) -> Result<SminEnclosure> {
    let upper = smin_upper_bound(m, z, v)?;
    let n = m.n();
    let Some(x) = m.shifted_dense(z).lu().try_inverse() else {
        return Ok(SminEnclosure { lower: None, upper, residual_frobenius: None });
    };
    if x.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Ok(SminEnclosure { lower: None, upper, residual_frobenius: None });
    }
    let zd = ComplexDyadic::from_c64(z);
    let mut e_sq = Dyadic::zero();
    let mut x_sq = Dyadic::zero();
    for k in 0..n {
        let col: Vec<ComplexDyadic> = (0..n).map(|i| ComplexDyadic::from_c64(x[(i, k)])).collect();
        for c in &col {
            x_sq = x_sq.add(&c.norm_sqr());
        }
        let ax = exact_row_action(m, &zd, &col);
        for (i, v) in ax.into_iter().enumerate() {
            let e = if i == k { ComplexDyadic { re: Dyadic::from_int(1), im: Dyadic::zero() }.sub(&v) } else { v.neg_all() };
            e_sq = e_sq.add(&e.norm_sqr());
        }
    }
    let e_f = widen_up(widen_up(e_sq.to_f64()).sqrt());
    let x_f = widen_up(widen_up(x_sq.to_f64()).sqrt());
    let lower = (e_f < 1.0).then(|| widen_down((1.0 - e_f) / x_f));
    Ok(SminEnclosure { lower, upper, residual_frobenius: Some(e_f) })
}

impl ComplexDyadic {
    fn neg_all(&self) -> Self {
        ComplexDyadic { re: self.re.neg(), im: self.im.neg() }
    }
}

/// Verdict of an exact re-check of the claim `s_min < threshold`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recheck {
    /// `s_min < threshold` proved.
    Confirmed,
    /// `s_min ≥ threshold` proved.
    Refuted,
    Inconclusive,
}

/// Decides `s_min(M − zI) < threshold` exactly where possible.
///
/// Exact singularity is tried first for `n ≤ exact_singular_cap`, then the enclosure.
pub fn recheck_below(m: &RegularMatrix, z: C64, v: &[C64], threshold: f64, exact_singular_cap: usize) -> Result<(Recheck, SminEnclosure)> {
    let enc = certify_smin(m, z, v)?;
    if m.n() <= exact_singular_cap && is_exactly_singular(m, z) {
        return Ok((Recheck::Confirmed, enc));
    }
    let verdict = if enc.upper < threshold {
        Recheck::Confirmed
    } else if enc.lower.is_some_and(|l| l >= threshold) {
        Recheck::Refuted
    } else {
        Recheck::Inconclusive
    };
    Ok((verdict, enc))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_all;
    use crate::spectra::dense_extremes;

    #[test]
    fn dyadic_arithmetic_is_exact() {
        let a = Dyadic::from_f64(0.1);
        let b = Dyadic::from_f64(0.2);
        let s = a.add(&b);
        // 0.1 + 0.2 in exact dyadics differs from the f64 sum 0.30000000000000004 rounding
        assert_eq!(s.cmp_value(&Dyadic::from_f64(0.3)), Ordering::Greater);
        assert_eq!(a.mul(&Dyadic::from_int(4)).to_f64(), 0.4);
        assert_eq!(Dyadic::from_f64(-3.5).to_f64(), -3.5);
        assert_eq!(Dyadic::from_f64(1e-300).mul(&Dyadic::from_f64(1e300)).to_f64(), 1e-300 * 1e300);
    }

    #[test]
    fn singularity_of_small_classes() {
        assert!(is_exactly_singular(&RegularMatrix::all_ones(3), C64::new(0.0, 0.0)));
        assert!(!is_exactly_singular(&RegularMatrix::identity(3), C64::new(0.0, 0.0)));
        assert!(is_exactly_singular(&RegularMatrix::identity(3), C64::new(1.0, 0.0)));
        // d is always an eigenvalue of a d-regular matrix
        let m = crate::sampler::initial_matrix(5, 2).unwrap();
        assert!(is_exactly_singular(&m, C64::new(2.0, 0.0)));
        assert!(!is_exactly_singular(&m, C64::new(2.0, 1e-9)));
    }

    #[test]
    fn bareiss_matches_float_determinant_sign_of_zero() {
        for m in enumerate_all(4, 2).unwrap() {
            let det = determinant_unshifted(&m);
            let f = m.shifted_dense_real(0.0).determinant();
            assert!((det.to_f64().unwrap() - f).abs() < 1e-9, "{det} vs {f}");
            assert_eq!(det.is_zero(), is_exactly_singular(&m, C64::new(0.0, 0.0)));
        }
    }

    #[test]
    fn enclosure_brackets_float_value() {
        let m = crate::sampler::sample(30, 4, 3_000, 9).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(0.5, 0.5 * 2f64.sqrt())] {
            let rep = dense_extremes(&m, z);
            let enc = certify_smin(&m, z, &rep.v_min).unwrap();
            let lower = enc.lower.expect("well conditioned");
            assert!(lower <= rep.s_min * (1.0 + 1e-9) && rep.s_min <= enc.upper * (1.0 + 1e-9));
            assert!(enc.upper / lower < 1.0 + 1e-3 || enc.upper / lower < (m.n() as f64).sqrt() + 1.0);
            let (verdict, _) = recheck_below(&m, z, &rep.v_min, lower / 2.0, 24).unwrap();
            assert_eq!(verdict, Recheck::Refuted);
            let (verdict, _) = recheck_below(&m, z, &rep.v_min, enc.upper * 2.0, 24).unwrap();
            assert_eq!(verdict, Recheck::Confirmed);
        }
    }
}
