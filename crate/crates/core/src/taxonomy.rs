//! Parameter system and classification of vectors into steep, almost-constant
//! and essentially non-constant classes, with the norm bounds and per-class
//! lower-bound certificates attached to each class.
//!
//! All logarithms are natural. Ranks (`x*_k`) are 1-based, as in the usual
//! non-increasing rearrangement notation; index sets returned to callers are 0-based.
//!
//! Classification works on a [`Profile`]: the rearranged moduli as runs, the
//! Euclidean norm and the distinct coordinate values with multiplicities. A
//! profile can be built from a dense vector or from a run-length [`RunVector`],
//! which is how vectors of length `10⁹` are handled.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::disc::{max_cover_centered_at_points, max_disc_cover, max_interval_cover, Boundary};
use crate::{Error, Result, C64};

/// Above this many distinct coordinate values the disc cover is approximated.
pub const EXACT_COVER_CAP: usize = 2000;

/// Relative tolerance when checking the ordering constraint on `a1, a2, a3`.
const CONSTRAINT_TOL: f64 = 1e-12;

/// Which branch of the `n0` case split is active.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `n0 = 1`: no `T0` class.
    Flat,
    /// `1 < n0 ≤ p`: `T0 = T0,0`, `n1 = n0`.
    Short,
    /// `n0 > p`: the ladder `T0,0 … T0,r`, `n1 = p^{r+1}`.
    Ladder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub n: usize,
    pub d: usize,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub eps0: f64,
    pub p: usize,
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
    pub regime: Regime,
    /// Ladder height; 0 outside the ladder regime.
    pub r: usize,
    /// `ln(4d)/ln p − 2`; absent when `p < 2`.
    pub alpha_d: Option<f64>,
    /// `h_0 … h_{r+1}`; outside the ladder regime this is `[h_0, h_top]`.
    pub h: Vec<f64>,
    pub b_st: f64,
    pub rho: f64,
    pub delta: f64,
}

impl TaxonomyParams {
    /// The last entry of `h`, used for vectors outside `T0`.
    pub fn h_top(&self) -> f64 {
        *self.h.last().expect("h is never empty")
    }

    /// Size `m` of the first ladder step: `x*_1 > 4d·x*_m`.
    pub fn first_step(&self) -> usize {
        self.n0.min(self.p)
    }
}

/// Default constants: `a1 = 0.1`, `a2 = a1/28`, `a3 = a2/28`.
pub fn default_constants() -> (f64, f64, f64) {
    let a1 = 0.1;
    (a1, a1 / 28.0, a1 / 784.0)
}

fn degenerate(msg: String) -> Error {
    Error::Degenerate(msg)
}

pub fn compute_params(n: usize, d: usize, a1: f64, a2: f64, a3: f64) -> Result<TaxonomyParams> {
    if d < 3 {
        return Err(Error::InvalidParameter(format!("need d >= 3 so that ln d > 1, got d = {d}")));
    }
    if d > n {
        return Err(Error::InvalidParameter(format!("need d <= n, got n = {n}, d = {d}")));
    }
    if !(a1 > 0.0 && a2 > 0.0 && a3 > 0.0) || ![a1, a2, a3].iter().all(|a| a.is_finite()) {
        return Err(Error::InvalidParameter("constants a1, a2, a3 must be positive and finite".into()));
    }
    let within = |lo: f64, hi: f64| lo <= hi * (1.0 + CONSTRAINT_TOL);
    if !(within(a3, a2 / 28.0) && within(a2 / 28.0, a1 / 784.0)) {
        return Err(Error::InvalidParameter(format!(
            "constants must satisfy a3 <= a2/28 <= a1/784, got a1 = {a1}, a2 = {a2}, a3 = {a3}"
        )));
    }
    let (nf, df) = (n as f64, d as f64);
    let ln_d = df.ln();
    let eps0 = (ln_d / df).sqrt();
    let p = (1.0 / (5.0 * eps0)).floor() as usize;
    let n0 = ((a1 * nf * ln_d / (df * df)).ceil() as usize).max(1);
    let n2 = (a2 * nf / df).floor() as usize;
    let n3 = (a3 * nf / ln_d).floor() as usize;
    if n2 < 1 || n3 < 1 {
        return Err(degenerate(format!("n2 = {n2}, n3 = {n3}; both must be at least 1")));
    }
    if n2 > n3 {
        return Err(degenerate(format!("n2 = {n2} exceeds n3 = {n3}")));
    }
    let sqrt_n = nf.sqrt();
    let alpha_d = (p >= 2).then(|| (4.0 * df).ln() / (p as f64).ln() - 2.0);
    let (regime, r, n1, h) = if n0 == 1 {
        (Regime::Flat, 0, 1, vec![sqrt_n, sqrt_n])
    } else if n0 <= p {
        (Regime::Short, 0, n0, vec![sqrt_n, 2.0 * df.powf(1.5) / ln_d.sqrt()])
    } else {
        if p < 2 {
            return Err(degenerate(format!("n0 = {n0} exceeds p = {p} but p < 2 leaves the ladder undefined")));
        }
        let alpha = alpha_d.expect("p >= 2");
        // smallest r ≥ 1 with p^{r+1} ≥ n0
        let mut r = 1usize;
        let mut top: u128 = (p as u128).pow(2);
        while top < n0 as u128 {
            r += 1;
            top *= p as u128;
        }
        if top > n as u128 {
            return Err(degenerate(format!("n1 = p^(r+1) = {top} exceeds n = {n}")));
        }
        let n1 = top as usize;
        let pf = p as f64;
        let mut h = vec![sqrt_n];
        for i in 1..=r {
            h.push(sqrt_n + (2.0 * pf).sqrt() * pf.powf(i as f64 * (2.0 + alpha)));
        }
        h.push((3.0 * pf).sqrt() * (n1 as f64).powf(2.0 + alpha));
        (Regime::Ladder, r, n1, h)
    };
    if n1 > n2 {
        return Err(degenerate(format!("n1 = {n1} exceeds n2 = {n2}")));
    }
    let h_top = *h.last().expect("nonempty");
    let b_st = if n0 > 1 { 4.0 * df.powf(1.5) * h_top } else { df * sqrt_n };
    let rho = 1.0 / (df.powf(1.5) * b_st);
    let delta = (n - n3) as f64 / nf;
    Ok(TaxonomyParams { n, d, a1, a2, a3, eps0, p, n0, n1, n2, n3, regime, r, alpha_d, h, b_st, rho, delta })
}

/// Non-increasing rearrangement of the moduli, with the permutation (0-based):
/// `xstar[k] = |x[sigma[k]]|`, ties broken by ascending index.
pub fn rearrange(x: &[C64]) -> (Vec<f64>, Vec<usize>) {
    let mut sigma: Vec<usize> = (0..x.len()).collect();
    let moduli: Vec<f64> = x.iter().map(|z| z.norm()).collect();
    sigma.sort_by(|&a, &b| moduli[b].total_cmp(&moduli[a]).then(a.cmp(&b)));
    (sigma.iter().map(|&k| moduli[k]).collect(), sigma)
}

/// Vector stored as runs `(value, count)`; its length is the total count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunVector {
    pub runs: Vec<(C64, usize)>,
}

impl RunVector {
    pub fn new(runs: Vec<(C64, usize)>) -> Self {
        RunVector { runs: runs.into_iter().filter(|r| r.1 > 0).collect() }
    }

    pub fn len(&self) -> usize {
        self.runs.iter().map(|r| r.1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn scaled(&self, c: C64) -> RunVector {
        RunVector { runs: self.runs.iter().map(|&(v, k)| (v * c, k)).collect() }
    }

    pub fn to_dense(&self) -> Vec<C64> {
        self.runs.iter().flat_map(|&(v, k)| std::iter::repeat_n(v, k)).collect()
    }
}

/// Everything classification needs to know about a vector.
#[derive(Clone, Debug)]
pub struct Profile {
    len: usize,
    norm: f64,
    /// `(modulus, cumulative count)` in non-increasing modulus order.
    moduli: Vec<(f64, usize)>,
    points: Vec<(C64, u64)>,
}

impl Profile {
    pub fn from_dense(x: &[C64]) -> Self {
        Self::from_runs(x.iter().map(|&v| (v, 1)))
    }

    pub fn from_run_vector(x: &RunVector) -> Self {
        Self::from_runs(x.runs.iter().copied())
    }

    fn from_runs(runs: impl Iterator<Item = (C64, usize)>) -> Self {
        let mut merged: HashMap<(u64, u64), (C64, u64)> = HashMap::new();
        let mut order = Vec::new();
        for (v, k) in runs.filter(|r| r.1 > 0) {
            // +0.0 folds −0.0 into the same key
            let key = ((v.re + 0.0).to_bits(), (v.im + 0.0).to_bits());
            merged
                .entry(key)
                .or_insert_with(|| {
                    order.push(key);
                    (v, 0)
                })
                .1 += k as u64;
        }
        let points: Vec<(C64, u64)> = order.iter().map(|k| merged[k]).collect();
        let len = points.iter().map(|p| p.1 as usize).sum();
        let scale = points.iter().map(|p| p.0.norm()).fold(0.0, f64::max);
        let norm = if scale == 0.0 || !scale.is_finite() {
            scale
        } else {
            scale * points.iter().map(|&(v, k)| k as f64 * (v.norm() / scale).powi(2)).sum::<f64>().sqrt()
        };
        let mut by_mod: Vec<(f64, u64)> = points.iter().map(|&(v, k)| (v.norm(), k)).collect();
        by_mod.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut moduli = Vec::with_capacity(by_mod.len());
        let mut acc = 0usize;
        for (m, k) in by_mod {
            acc += k as usize;
            moduli.push((m, acc));
        }
        Profile { len, norm, moduli, points }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn distinct_values(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[(C64, u64)] {
        &self.points
    }

    /// `x*_k` for 1-based rank `k`.
    pub fn order_stat(&self, k: usize) -> f64 {
        assert!(k >= 1 && k <= self.len, "rank {k} out of range 1..={}", self.len);
        let pos = self.moduli.partition_point(|&(_, cum)| cum < k);
        self.moduli[pos].0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassLabel {
    T0(usize),
    T1,
    T2,
    AlmostConstSloping,
    EssentiallyNonConstant,
}

impl ClassLabel {
    pub fn is_steep(self) -> bool {
        matches!(self, ClassLabel::T0(_) | ClassLabel::T1 | ClassLabel::T2)
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::T0(i) => write!(f, "T0({i})"),
            ClassLabel::T1 => write!(f, "T1"),
            ClassLabel::T2 => write!(f, "T2"),
            ClassLabel::AlmostConstSloping => write!(f, "AlmostConstSloping"),
            ClassLabel::EssentiallyNonConstant => write!(f, "EssentiallyNonConstant"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    /// 1-based ranks `(upper, lower)` with `x*_upper > factor·x*_lower`.
    Jump { upper: usize, lower: usize },
    /// Center of a disc of radius `ρ‖x‖` holding more than `n − n3` coordinates.
    Center { lambda: C64 },
}

/// Tri-state answer for membership in `B(ρ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlmostConstant {
    Yes { lambda: C64 },
    No,
    /// Only the doubled radius reaches the count (approximate mode).
    Boundary { lambda: C64 },
}

impl AlmostConstant {
    pub fn is_yes(&self) -> bool {
        matches!(self, AlmostConstant::Yes { .. })
    }
}

/// Closed-disc cover counts at radius `ρ‖x‖`; `lower == upper` when exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverBounds {
    pub lower: u64,
    pub upper: u64,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorClass {
    pub label: ClassLabel,
    pub witness: Option<Witness>,
    pub almost_constant: AlmostConstant,
    pub cover: CoverBounds,
    /// Whether at most `δn` coordinates fit in any disc of radius `ρ‖x‖`;
    /// absent when the approximate bounds straddle `δn`.
    pub in_s_rho_delta: Option<bool>,
    /// Set when the disc cover was approximated.
    pub approximate: bool,
}

fn check_len(profile: &Profile, params: &TaxonomyParams) -> Result<()> {
    if profile.len() != params.n {
        return Err(Error::DimensionMismatch { expected: params.n, got: profile.len() });
    }
    if !(profile.norm() > 0.0) || !profile.norm().is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(())
}

/// Steep ladder in priority order. Returns the label and its jump witness.
fn steep_label(x: &Profile, prm: &TaxonomyParams) -> Option<(ClassLabel, Witness)> {
    let s = |k: usize| x.order_stat(k);
    let four_d = 4.0 * prm.d as f64;
    if prm.regime != Regime::Flat {
        let m = prm.first_step();
        if s(1) > four_d * s(m) {
            return Some((ClassLabel::T0(0), Witness::Jump { upper: 1, lower: m }));
        }
        if prm.regime == Regime::Ladder {
            let mut lo = prm.p;
            for i in 1..=prm.r {
                let hi = lo * prm.p;
                if s(lo) > four_d * s(hi) {
                    return Some((ClassLabel::T0(i), Witness::Jump { upper: lo, lower: hi }));
                }
                lo = hi;
            }
        }
    }
    if s(prm.n1) > (prm.d as f64).powf(1.5) * s(prm.n2) {
        return Some((ClassLabel::T1, Witness::Jump { upper: prm.n1, lower: prm.n2 }));
    }
    if s(prm.n2) > 4.0 * s(prm.n3) {
        return Some((ClassLabel::T2, Witness::Jump { upper: prm.n2, lower: prm.n3 }));
    }
    None
}

fn cover_bounds(x: &Profile, radius: f64) -> (CoverBounds, C64, C64) {
    let pts = x.points();
    if pts.len() <= EXACT_COVER_CAP {
        let c = max_disc_cover(pts, radius, Boundary::Closed);
        (CoverBounds { lower: c.weight, upper: c.weight, exact: true }, c.center, c.center)
    } else {
        let lo = max_cover_centered_at_points(pts, radius, Boundary::Closed);
        let hi = max_cover_centered_at_points(pts, 2.0 * radius, Boundary::Closed);
        (CoverBounds { lower: lo.weight, upper: hi.weight, exact: false }, lo.center, hi.center)
    }
}

fn almost_constant_from(cover: CoverBounds, lo_center: C64, hi_center: C64, n3: usize, n: usize) -> AlmostConstant {
    let need = (n - n3) as u64;
    if cover.lower > need {
        AlmostConstant::Yes { lambda: lo_center }
    } else if cover.upper > need {
        AlmostConstant::Boundary { lambda: hi_center }
    } else {
        AlmostConstant::No
    }
}

/// Membership in `B(ρ)`: more than `n − n3` coordinates within `ρ‖x‖` of some `λ`.
///
/// Exact up to [`EXACT_COVER_CAP`] distinct values; beyond it, centers are
/// restricted to coordinate values (radius `ρ‖x‖` for `Yes`, `2ρ‖x‖` for `Boundary`).
pub fn is_almost_constant(x: &Profile, rho: f64, n3: usize) -> Result<AlmostConstant> {
    if !(x.norm() > 0.0) {
        return Err(Error::ZeroVector);
    }
    if n3 > x.len() {
        return Err(Error::InvalidParameter(format!("n3 = {n3} exceeds the length {}", x.len())));
    }
    let (cover, lo, hi) = cover_bounds(x, rho * x.norm());
    Ok(almost_constant_from(cover, lo, hi, n3, x.len()))
}

/// Classifies a nonzero vector of length `params.n`; `delta` sets the `S(ρ, δ)` threshold.
///
/// In approximate mode a `Boundary` answer for `B(ρ)` is not treated as
/// membership: such non-steep vectors are labelled essentially non-constant
/// and flagged `approximate`.
pub fn classify(x: &Profile, params: &TaxonomyParams, delta: f64) -> Result<VectorClass> {
    check_len(x, params)?;
    let (cover, lo, hi) = cover_bounds(x, params.rho * x.norm());
    let almost_constant = almost_constant_from(cover, lo, hi, params.n3, params.n);
    let limit = delta * params.n as f64;
    let in_s_rho_delta = if cover.upper as f64 <= limit {
        Some(true)
    } else if cover.lower as f64 > limit {
        Some(false)
    } else {
        None
    };
    let (label, witness) = match steep_label(x, params) {
        Some((l, w)) => (l, Some(w)),
        None => match almost_constant {
            AlmostConstant::Yes { lambda } => (ClassLabel::AlmostConstSloping, Some(Witness::Center { lambda })),
            _ => (ClassLabel::EssentiallyNonConstant, None),
        },
    };
    Ok(VectorClass { label, witness, almost_constant, cover, in_s_rho_delta, approximate: !cover.exact })
}

pub fn classify_dense(x: &[C64], params: &TaxonomyParams, delta: f64) -> Result<VectorClass> {
    classify(&Profile::from_dense(x), params, delta)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormBound {
    pub holds: bool,
    pub norm: f64,
    pub bound: f64,
    /// `bound − norm`.
    pub slack: f64,
    /// 1-based rank whose order statistic multiplies the bound's constant.
    pub rank: usize,
}

/// Checks the norm-versus-order-statistic bound for the class of `x`.
pub fn norm_bound_check(x: &Profile, cls: &VectorClass, params: &TaxonomyParams) -> Result<NormBound> {
    check_len(x, params)?;
    let actual = steep_label(x, params).map(|s| s.0);
    let claimed = cls.label;
    let consistent = match actual {
        Some(l) => l == claimed,
        None => !claimed.is_steep(),
    };
    if !consistent {
        let actual = actual.map_or_else(|| "sloping".to_string(), |l| l.to_string());
        return Err(Error::ClassMismatch { claimed: claimed.to_string(), actual });
    }
    let (constant, rank) = match claimed {
        ClassLabel::T0(0) => (params.h[0], 1),
        ClassLabel::T0(i) => (params.h[i], params.p.pow(i as u32)),
        ClassLabel::T1 => (params.h_top(), params.n1),
        ClassLabel::T2 => (params.b_st / 4.0, params.n2),
        _ => (params.b_st, params.n3),
    };
    let bound = constant * x.order_stat(rank);
    let norm = x.norm();
    Ok(NormBound { holds: norm <= bound * (1.0 + 1e-12), norm, bound, slack: bound - norm, rank })
}

/// Which coordinate part separated the pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Part {
    Real,
    Imaginary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedPairs {
    pub j: Vec<usize>,
    pub q: Vec<usize>,
    pub part: Part,
    /// `min_{i∈J, k∈Q} |x_i − x_k|`.
    pub separation: f64,
}

/// Disjoint index sets `J, Q` of size at least `εm/4` whose coordinates are
/// pairwise at least `ρ/√2` apart.
///
/// The hypothesis (every `λ` has at least `εm` coordinates at distance `≥ ρ`)
/// is checked with the exact open-disc cover; the construction picks a real
/// or imaginary part on which every open window of half-width `ρ/√2` misses
/// at least `εm/2` coordinates, sorts it, and takes the top and bottom `⌈εm/4⌉`.
pub fn separated_pairs(x: &[C64], rho: f64, eps: f64) -> Result<SeparatedPairs> {
    let m = x.len();
    if m == 0 {
        return Err(Error::ZeroVector);
    }
    if !(rho > 0.0) || !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!("need rho > 0 and 0 < eps < 1, got rho = {rho}, eps = {eps}")));
    }
    let mf = m as f64;
    let pts: Vec<(C64, u64)> = x.iter().map(|&v| (v, 1)).collect();
    let crowded = max_disc_cover(&pts, rho, Boundary::Open).weight as f64;
    if crowded > mf - eps * mf {
        return Err(Error::Hypothesis(format!(
            "an open disc of radius {rho} holds {crowded} of {m} coordinates, more than (1 - eps)m"
        )));
    }
    let half = rho / 2f64.sqrt();
    let part_of = |part: Part, v: C64| if part == Part::Real { v.re } else { v.im };
    let part = [Part::Real, Part::Imaginary]
        .into_iter()
        .find(|&part| {
            let line: Vec<(f64, u64)> = x.iter().map(|&v| (part_of(part, v), 1)).collect();
            max_interval_cover(&line, half, Boundary::Open).0 as f64 <= mf - eps * mf / 2.0
        })
        .ok_or_else(|| Error::Hypothesis("neither coordinate part is spread out".into()))?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| part_of(part, x[b]).total_cmp(&part_of(part, x[a])).then(a.cmp(&b)));
    let p = (eps * mf / 4.0).ceil() as usize;
    let j: Vec<usize> = order[..p].to_vec();
    let q: Vec<usize> = order[m - p..].to_vec();
    let separation = j
        .iter()
        .flat_map(|&a| q.iter().map(move |&b| (x[a] - x[b]).norm()))
        .fold(f64::INFINITY, f64::min);
    assert!(j.iter().all(|a| !q.contains(a)), "J and Q must be disjoint");
    assert!(
        separation >= half * (1.0 - 1e-9),
        "separation {separation} below rho/sqrt(2) = {half}"
    );
    assert!(p as f64 >= eps * mf / 4.0);
    Ok(SeparatedPairs { j, q, part, separation })
}

/// Which lower-bound statement a certificate comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// Deterministic, every `M`, `|z| ≤ d/6`: `d√(3n)/(5 b_st)`.
    AlmostConstant,
    /// On the high-probability steep event, `|z| ≤ d`: `√(n2 d)/(25 b_st)`.
    Steep,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    /// Predicted lower bound on `‖(M − zI)x‖/‖x‖`.
    pub value: f64,
}

/// Lower bound on `‖(M − zI)x‖/‖x‖` guaranteed for the class; `None` for
/// essentially non-constant vectors, which carry no per-class bound.
pub fn lower_bound_certificate(cls: &VectorClass, params: &TaxonomyParams, z: C64) -> Result<Option<Certificate>> {
    let (d, n) = (params.d as f64, params.n as f64);
    match cls.label {
        ClassLabel::AlmostConstSloping => {
            if z.norm() > d / 6.0 {
                return Err(Error::InvalidParameter(format!("|z| = {} exceeds d/6 = {}", z.norm(), d / 6.0)));
            }
            let value = d * (3.0 * n).sqrt() / (5.0 * params.b_st);
            Ok(Some(Certificate { kind: CertificateKind::AlmostConstant, value }))
        }
        ClassLabel::T0(_) | ClassLabel::T1 | ClassLabel::T2 => {
            if z.norm() > d {
                return Err(Error::InvalidParameter(format!("|z| = {} exceeds d = {d}", z.norm())));
            }
            let value = (params.n2 as f64 * d).sqrt() / (25.0 * params.b_st);
            Ok(Some(Certificate { kind: CertificateKind::Steep, value }))
        }
        ClassLabel::EssentiallyNonConstant => Ok(None),
    }
}

/// Uniform lower-bound shape `h(d, n)` (up to the constant `c`) and its branch
/// (1: `n1 = 1`, 2: `1 < n1 ≤ p`, 3: `n1 > p`).
pub fn uniform_bound_shape(params: &TaxonomyParams, c: f64) -> (u8, f64) {
    let (d, n) = (params.d as f64, params.n as f64);
    let ln_d = d.ln();
    if params.n1 == 1 {
        (1, c * d.powf(-1.5))
    } else if params.n1 <= params.p {
        (2, c * n.sqrt() * d.powi(-3) / ln_d.sqrt())
    } else {
        let alpha = params.alpha_d.expect("ladder regime has p >= 2");
        (3, c * d.powf(1.25) * ln_d * ln_d * n.powf(-1.5 - alpha))
    }
}
