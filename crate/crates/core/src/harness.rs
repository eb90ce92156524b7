//! Monte Carlo campaigns: sample matrices, measure the extreme singular values
//! of `M − zI`, classify the minimizing vector, run event checks, and compare
//! against the `n⁻⁶` bound and the regime-dependent lower-bound shapes.
//!
//! Trials are independent and run on a rayon pool; records are collected in
//! trial order, so output is identical for any thread count.
//!
//! Configuration is JSON; every field except `n`, `d` and `trials` has a default:
//!
//! ```json
//! {
//!   "n": [100, 200], "d": 20, "z": [[0, 0], [0.125, 0.125]], "z_scaled_by_d": true,
//!   "trials": 300, "burn_in": null, "master_seed": 1,
//!   "a1": 0.1, "a2": 0.0035714285714285713, "a3": 0.00012755102040816328,
//!   "checks": ["omega1", "omega_k_eps", "zero_minor", "row_overlap", "csj"],
//!   "check_params": { "eps": 0.5, "k": 2, "alpha": 0.25, "beta": 0.25, "overlap_a": 2.0,
//!                     "sampled_trials": 1000, "csj_m": 1, "csj_p": 2 },
//!   "thresholds": { "singular_rel": 1e-10, "c1": 1.0, "big_c": 1.0, "small_c": 1.0,
//!                   "regime_c1": 1.0, "regime_c2": 1.0, "exact_cap": 24 },
//!   "classify": true, "probe_transpose": true, "method": null
//! }
//! ```
//!
//! `REGSING_THREADS` sets the worker count.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::events::{
    check_csj, check_omega1, check_omega_k_eps, find_zero_minor, row_overlap_bound, EventReport, MinorMode,
    SearchMode, Verdict, ZERO_MINOR_EXACT_CAP,
};
use crate::exact::{is_exactly_singular, recheck_below, Recheck, SminEnclosure};
use crate::sampler::{chi_square_of, default_burn_in, derive_seed, sample, ChiSquare};
use crate::spectra::{singular_extremes, singular_extremes_with, Method, SpectralReport, SINGULAR_REL};
use crate::taxonomy::{classify, compute_params, default_constants, rearrange, Profile, TaxonomyParams, VectorClass};
use crate::{Error, RegularMatrix, Result, C64};

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "REGSING_THREADS";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    pub fn values(&self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Omega1,
    OmegaKEps,
    ZeroMinor,
    RowOverlap,
    Csj,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckParams {
    pub eps: f64,
    pub k: usize,
    pub alpha: f64,
    pub beta: f64,
    pub overlap_a: f64,
    /// Probes used when an exhaustive search is out of reach.
    pub sampled_trials: u64,
    pub csj_m: usize,
    pub csj_p: usize,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            eps: 0.5,
            k: 2,
            alpha: 0.25,
            beta: 0.25,
            overlap_a: 2.0,
            sampled_trials: 1000,
            csj_m: 1,
            csj_p: 2,
        }
    }
}

/// Numerical tolerances and the unspecified absolute constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    pub singular_rel: f64,
    pub c1: f64,
    /// Degree range `big_c < d < small_c · n / (ln n · ln ln n)` of the `n⁻⁶` bound.
    pub big_c: f64,
    pub small_c: f64,
    /// Regime boundaries `regime_c1 · n^{2/5} ln^{3/5} n` and `regime_c2 · √(n ln n)`.
    pub regime_c1: f64,
    pub regime_c2: f64,
    /// Largest `n` for exact rational singularity tests.
    pub exact_cap: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { singular_rel: SINGULAR_REL, c1: 1.0, big_c: 1.0, small_c: 1.0, regime_c1: 1.0, regime_c2: 1.0, exact_cap: 24 }
    }
}

fn default_true() -> bool {
    true
}
fn default_a1() -> f64 {
    default_constants().0
}
fn default_a2() -> f64 {
    default_constants().1
}
fn default_a3() -> f64 {
    default_constants().2
}
fn default_z() -> Vec<C64> {
    vec![C64::new(0.0, 0.0)]
}
fn default_checks() -> Vec<Check> {
    vec![Check::Omega1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: OneOrMany<usize>,
    pub d: OneOrMany<usize>,
    #[serde(default = "default_z")]
    pub z: Vec<C64>,
    /// Multiply every shift by `d` for each cell.
    #[serde(default)]
    pub z_scaled_by_d: bool,
    pub trials: usize,
    #[serde(default)]
    pub burn_in: Option<u64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_a1")]
    pub a1: f64,
    #[serde(default = "default_a2")]
    pub a2: f64,
    #[serde(default = "default_a3")]
    pub a3: f64,
    #[serde(default = "default_checks")]
    pub checks: Vec<Check>,
    #[serde(default)]
    pub check_params: CheckParams,
    #[serde(default)]
    pub thresholds: Thresholds,
    #[serde(default = "default_true")]
    pub classify: bool,
    /// Also classify the minimizing vector of the adjoint `(M − zI)^*`.
    #[serde(default = "default_true")]
    pub probe_transpose: bool,
    #[serde(default)]
    pub method: Option<Method>,
}

impl ExperimentConfig {
    /// Minimal config for a single `(n, d)` with defaults elsewhere.
    pub fn simple(n: usize, d: usize, z: Vec<C64>, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            n: OneOrMany::One(n),
            d: OneOrMany::One(d),
            z,
            z_scaled_by_d: false,
            trials,
            burn_in: None,
            master_seed,
            a1: default_a1(),
            a2: default_a2(),
            a3: default_a3(),
            checks: default_checks(),
            check_params: CheckParams::default(),
            thresholds: Thresholds::default(),
            classify: true,
            probe_transpose: true,
            method: None,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let (ns, ds) = (self.n.values(), self.d.values());
        if ns.is_empty() || ds.is_empty() || self.z.is_empty() {
            return Err(Error::InvalidParameter("n, d and z must each have at least one value".into()));
        }
        for &n in &ns {
            for &d in &ds {
                if n == 0 || d == 0 || d > n {
                    return Err(Error::InvalidParameter(format!("need 1 <= d <= n, got n = {n}, d = {d}")));
                }
            }
        }
        if self.z.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("shifts must be finite".into()));
        }
        Ok(())
    }

    /// `(n, d, z)` cells in row-major order over `n`, `d`, `z`.
    pub fn cells(&self) -> Vec<(usize, usize, C64)> {
        let mut out = Vec::new();
        for n in self.n.values() {
            for d in self.d.values() {
                for &z in &self.z {
                    out.push((n, d, if self.z_scaled_by_d { z * d as f64 } else { z }));
                }
            }
        }
        out
    }

    pub fn burn_in_for(&self, n: usize, d: usize) -> u64 {
        self.burn_in.unwrap_or_else(|| default_burn_in(n, d))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassOutcome {
    Classified(VectorClass),
    /// Parameters or classification unavailable (e.g. degenerate regime at this size).
    Unavailable(String),
    Skipped,
}

impl ClassOutcome {
    pub fn tag(&self) -> String {
        match self {
            ClassOutcome::Classified(c) => c.label.to_string(),
            ClassOutcome::Unavailable(_) => "unavailable".into(),
            ClassOutcome::Skipped => "skipped".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecheckOutcome {
    pub verdict: Recheck,
    pub enclosure: SminEnclosure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub z: C64,
    pub spectral: Option<SpectralReport>,
    pub v_class: ClassOutcome,
    pub v_class_adjoint: ClassOutcome,
    pub events: Vec<EventReport>,
    /// `s_min ≥ n⁻⁶`.
    pub bound_n6: Option<bool>,
    /// Degree and shift inside the range where the `n⁻⁶` bound is claimed.
    pub within_hypotheses: bool,
    pub bound_regime: u8,
    pub bound_shape: Option<f64>,
    pub bound_ratio: Option<f64>,
    pub recheck: Option<RecheckOutcome>,
    /// Confirmed counterexample inside the hypotheses, or a violated deterministic inequality.
    pub red: bool,
    pub error: Option<String>,
}

impl RunRecord {
    /// Regenerates the sampled matrix of this record.
    pub fn matrix(&self, cfg: &ExperimentConfig) -> Result<RegularMatrix> {
        sample(self.n, self.d, cfg.burn_in_for(self.n, self.d), self.seed)
    }
}

/// Lower-bound regime for `(n, d)`: 1 below `c1·n^{2/5}·ln^{3/5} n`, 2 below `c2·√(n ln n)`, 3 otherwise.
pub fn bound_regime(n: usize, d: usize, c1: f64, c2: f64) -> u8 {
    let (nf, df) = (n as f64, d as f64);
    let ln_n = nf.ln();
    if df < c1 * nf.powf(0.4) * ln_n.powf(0.6) {
        1
    } else if df < c2 * (nf * ln_n).sqrt() {
        2
    } else {
        3
    }
}

/// Shape of the lower bound in the given regime with unit constant. Regime 1
/// needs `p = ⌊1/(5√(ln d/d))⌋ ≥ 2` and is `None` otherwise.
pub fn bound_shape(regime: u8, n: usize, d: usize) -> Option<f64> {
    let (nf, df) = (n as f64, d as f64);
    match regime {
        1 => {
            let ln_d = df.ln();
            let p = (1.0 / (5.0 * (ln_d / df).sqrt())).floor();
            if p < 2.0 {
                return None;
            }
            let alpha = (4.0 * df).ln() / p.ln() - 2.0;
            Some(df.powf(1.5) * ln_d.powf(4.5) * nf.powf(-4.0 - 2.0 * alpha))
        }
        2 => Some(nf.powf(-4.5) * nf.ln().powf(-3.5)),
        3 => Some(1.0 / (df.powi(5) * nf)),
        _ => None,
    }
}

/// Whether `(n, d, z)` lies in `big_c < d < small_c·n/(ln n·ln ln n)`, `|z| ≤ d/6`.
pub fn within_hypotheses(n: usize, d: usize, z: C64, th: &Thresholds) -> bool {
    let (nf, df) = (n as f64, d as f64);
    let ln_n = nf.ln();
    n >= 3 && ln_n.ln() > 0.0 && th.big_c < df && df < th.small_c * nf / (ln_n * ln_n.ln()) && z.norm() <= df / 6.0
}

struct Cell {
    n: usize,
    d: usize,
    z: C64,
    params: std::result::Result<TaxonomyParams, String>,
}

fn classify_vector(params: &std::result::Result<TaxonomyParams, String>, v: &[C64]) -> ClassOutcome {
    match params {
        Err(reason) => ClassOutcome::Unavailable(reason.clone()),
        Ok(p) => match classify(&Profile::from_dense(v), p, p.delta) {
            Ok(c) => ClassOutcome::Classified(c),
            Err(e) => ClassOutcome::Unavailable(e.to_string()),
        },
    }
}

fn run_checks(cfg: &ExperimentConfig, m: &RegularMatrix, v: &[C64], seed: u64) -> Result<Vec<EventReport>> {
    let cp = &cfg.check_params;
    let n = m.n();
    let mut checks = cfg.checks.clone();
    checks.sort();
    checks.dedup();
    let (_, order) = rearrange(v);
    let mut out = Vec::new();
    for check in checks {
        let report = match check {
            Check::Omega1 => check_omega1(m, cp.eps),
            Check::OmegaKEps => {
                let exact = check_omega_k_eps(m, cp.k, cp.eps, SearchMode::Exact);
                match exact {
                    Err(Error::TooLarge { .. }) => check_omega_k_eps(
                        m,
                        cp.k,
                        cp.eps,
                        SearchMode::Sampled { trials: cp.sampled_trials, seed: derive_seed(seed, 1) },
                    )?,
                    other => other?,
                }
            }
            Check::ZeroMinor => {
                let mode = if n <= ZERO_MINOR_EXACT_CAP { MinorMode::Exact } else { MinorMode::Greedy };
                find_zero_minor(m, cp.alpha, cp.beta, mode)?
            }
            // columns carrying the largest coordinates of the minimizing vector
            Check::RowOverlap => row_overlap_bound(m, &order[..cp.k.min(n)], cp.overlap_a)?,
            Check::Csj => {
                let (ml, mr) = (cp.csj_m, (cp.csj_p.max(2) - 1) * cp.csj_m);
                if ml + mr > n {
                    return Err(Error::InvalidParameter(format!("csj needs {} columns, n = {n}", ml + mr)));
                }
                check_csj(m, &order[..ml], &order[n - mr..], cp.eps, cp.csj_p)?
            }
        };
        out.push(report);
    }
    Ok(out)
}

fn run_trial(cfg: &ExperimentConfig, cell: &Cell, trial: usize, seed: u64) -> RunRecord {
    let (n, d, z) = (cell.n, cell.d, cell.z);
    let th = &cfg.thresholds;
    let regime = bound_regime(n, d, th.regime_c1, th.regime_c2);
    let shape = bound_shape(regime, n, d);
    let mut rec = RunRecord {
        trial,
        seed,
        n,
        d,
        z,
        spectral: None,
        v_class: ClassOutcome::Skipped,
        v_class_adjoint: ClassOutcome::Skipped,
        events: Vec::new(),
        bound_n6: None,
        within_hypotheses: within_hypotheses(n, d, z, th),
        bound_regime: regime,
        bound_shape: shape,
        bound_ratio: None,
        recheck: None,
        red: false,
        error: None,
    };
    let outcome = (|| -> Result<()> {
        let m = sample(n, d, cfg.burn_in_for(n, d), seed)?;
        let report = match cfg.method {
            Some(method) => singular_extremes_with(&m, z, method)?,
            None => singular_extremes(&m, z)?,
        };
        let threshold = (n as f64).powi(-6);
        rec.bound_n6 = Some(report.s_min >= threshold);
        rec.bound_ratio = shape.map(|s| report.s_min / s);
        if report.s_min < threshold {
            let (verdict, enclosure) = recheck_below(&m, z, &report.v_min, threshold, th.exact_cap)?;
            rec.red |= verdict == Recheck::Confirmed && rec.within_hypotheses;
            rec.recheck = Some(RecheckOutcome { verdict, enclosure });
        }
        if cfg.classify {
            rec.v_class = classify_vector(&cell.params, &report.v_min);
            if cfg.probe_transpose {
                rec.v_class_adjoint = match &cell.params {
                    Err(reason) => ClassOutcome::Unavailable(reason.clone()),
                    Ok(_) => {
                        let adj = singular_extremes(&m.transpose(), z.conj())?;
                        classify_vector(&cell.params, &adj.v_min)
                    }
                };
            }
        }
        rec.events = run_checks(cfg, &m, &report.v_min, seed)?;
        // the incidence-set and overlap checks test deterministic inequalities
        rec.red |= rec.events.iter().any(|e| {
            e.verdict == Verdict::Fails
                && matches!(e.event, crate::events::EventKind::Csj | crate::events::EventKind::RowOverlap)
        });
        rec.spectral = Some(report);
        Ok(())
    })();
    if let Err(e) = outcome {
        rec.error = Some(e.to_string());
    }
    rec
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventTally {
    pub holds: usize,
    pub fails: usize,
    pub estimated: usize,
    pub vacuous: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub n: usize,
    pub d: usize,
    pub z: C64,
    pub trials: usize,
    pub errors: usize,
    /// Fraction of measured trials with `s_min ≥ n⁻⁶`.
    pub success_fraction: f64,
    pub min_s_min: Option<f64>,
    pub median_s_min: Option<f64>,
    pub numerically_singular: usize,
    pub red: usize,
    /// Trials below `n⁻⁶` whose exact re-check was inconclusive.
    pub unresolved: usize,
    pub classes: BTreeMap<String, usize>,
    pub events: BTreeMap<String, EventTally>,
    /// Sampler uniformity over this cell's matrices, for `n ≤ 7`.
    pub chi_square: Option<ChiSquare>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub total: usize,
    pub red: usize,
    pub cells: Vec<CellSummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Campaign {
    pub records: Vec<RunRecord>,
    pub summary: CampaignSummary,
}

impl Campaign {
    pub fn any_red(&self) -> bool {
        self.summary.red > 0
    }
}

/// Worker count from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&k| k > 0)
}

pub fn run_campaign(cfg: &ExperimentConfig) -> Result<Campaign> {
    run_campaign_with_threads(cfg, threads_from_env())
}

/// Runs the campaign on a dedicated pool of `threads` workers (rayon default when `None`).
pub fn run_campaign_with_threads(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<Campaign> {
    cfg.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let cells: Vec<Cell> = cfg
        .cells()
        .into_iter()
        .map(|(n, d, z)| Cell {
            n,
            d,
            z,
            params: compute_params(n, d, cfg.a1, cfg.a2, cfg.a3).map_err(|e| e.to_string()),
        })
        .collect();
    let jobs: Vec<(usize, usize)> = (0..cells.len()).flat_map(|c| (0..cfg.trials).map(move |t| (c, t))).collect();
    let records: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .enumerate()
            .map(|(k, &(c, _))| run_trial(cfg, &cells[c], k, derive_seed(cfg.master_seed, k as u64)))
            .collect()
    });
    let summary = summarize(cfg, &cells, &records);
    Ok(Campaign { records, summary })
}

fn summarize(cfg: &ExperimentConfig, cells: &[Cell], records: &[RunRecord]) -> CampaignSummary {
    let per_cell = cfg.trials;
    let out = cells
        .iter()
        .enumerate()
        .map(|(c, cell)| {
            let recs = &records[c * per_cell..(c + 1) * per_cell];
            let mut s: Vec<f64> = recs.iter().filter_map(|r| r.spectral.as_ref().map(|s| s.s_min)).collect();
            s.sort_by(f64::total_cmp);
            let measured = s.len();
            let ok = recs.iter().filter(|r| r.bound_n6 == Some(true)).count();
            let mut classes = BTreeMap::new();
            let mut events: BTreeMap<String, EventTally> = BTreeMap::new();
            for r in recs {
                *classes.entry(r.v_class.tag()).or_insert(0) += 1;
                for e in &r.events {
                    let key = serde_json::to_value(e.event).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
                    let t = events.entry(key).or_default();
                    match e.verdict {
                        Verdict::Holds => t.holds += 1,
                        Verdict::Fails => t.fails += 1,
                        Verdict::Estimated { .. } => t.estimated += 1,
                        Verdict::Vacuous => t.vacuous += 1,
                    }
                }
            }
            let chi_square = (cell.n <= crate::enumerate::MAX_ENUM_N && per_cell > 0)
                .then(|| {
                    let ms: Result<Vec<RegularMatrix>> = recs.iter().map(|r| r.matrix(cfg)).collect();
                    chi_square_of(cell.n, cell.d, &ms.ok()?).ok()
                })
                .flatten();
            CellSummary {
                n: cell.n,
                d: cell.d,
                z: cell.z,
                trials: recs.len(),
                errors: recs.iter().filter(|r| r.error.is_some()).count(),
                success_fraction: if measured == 0 { 0.0 } else { ok as f64 / measured as f64 },
                min_s_min: s.first().copied(),
                median_s_min: (measured > 0).then(|| {
                    if measured % 2 == 1 {
                        s[measured / 2]
                    } else {
                        0.5 * (s[measured / 2 - 1] + s[measured / 2])
                    }
                }),
                numerically_singular: recs.iter().filter(|r| r.spectral.as_ref().is_some_and(|s| s.is_numerically_singular())).count(),
                red: recs.iter().filter(|r| r.red).count(),
                unresolved: recs
                    .iter()
                    .filter(|r| r.recheck.as_ref().is_some_and(|x| x.verdict == Recheck::Inconclusive))
                    .count(),
                classes,
                events,
                chi_square,
            }
        })
        .collect::<Vec<_>>();
    CampaignSummary { total: records.len(), red: records.iter().filter(|r| r.red).count(), cells: out }
}

/// Frozen CSV column order.
pub const CSV_COLUMNS: [&str; 13] = [
    "trial", "seed", "n", "d", "z_re", "z_im", "s_min", "s_max", "v_class", "bound_n6", "remark33_regime",
    "remark33_ratio", "events_json",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in records {
        let events = serde_json::to_string(&r.events)?;
        w.write_record([
            r.trial.to_string(),
            r.seed.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.z.re.to_string(),
            r.z.im.to_string(),
            opt(r.spectral.as_ref().map(|s| s.s_min)),
            opt(r.spectral.as_ref().map(|s| s.s_max)),
            r.v_class.tag(),
            opt(r.bound_n6),
            r.bound_regime.to_string(),
            opt(r.bound_ratio),
            events,
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_jsonl<W: Write>(records: &[RunRecord], out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<RunRecord>> {
    BufReader::new(File::open(path)?)
        .lines()
        .filter(|l| !l.as_ref().is_ok_and(|s| s.trim().is_empty()))
        .map(|l| Ok(serde_json::from_str(&l?)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SingularityRate {
    pub trials: usize,
    /// Trials with `s_min ≤ singular_rel · s_max`.
    pub numeric_hits: usize,
    /// Exact rational verdicts, available for `n ≤ 24`.
    pub exact_hits: Option<usize>,
    pub rate: f64,
}

/// Fraction of sampled `M` (default burn-in) that are singular. For `n ≤ 24`
/// each matrix is decided by exact elimination; otherwise by the numerical test.
pub fn singularity_rate(n: usize, d: usize, trials: usize, seed: u64) -> Result<SingularityRate> {
    let zero = C64::new(0.0, 0.0);
    let exact = n <= ZERO_MINOR_EXACT_CAP;
    let verdicts: Vec<(bool, Option<bool>)> = (0..trials)
        .into_par_iter()
        .map(|k| -> Result<(bool, Option<bool>)> {
            let m = sample(n, d, default_burn_in(n, d), derive_seed(seed, k as u64))?;
            let numeric = singular_extremes(&m, zero)?.is_numerically_singular();
            Ok((numeric, exact.then(|| is_exactly_singular(&m, zero))))
        })
        .collect::<Result<_>>()?;
    let numeric_hits = verdicts.iter().filter(|v| v.0).count();
    let exact_hits = exact.then(|| verdicts.iter().filter(|v| v.1 == Some(true)).count());
    let hits = exact_hits.unwrap_or(numeric_hits);
    Ok(SingularityRate { trials, numeric_hits, exact_hits, rate: if trials == 0 { 0.0 } else { hits as f64 / trials as f64 } })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub n: usize,
    pub d: usize,
    pub regime: u8,
    pub shape: Option<f64>,
    pub observed_min: Option<f64>,
    pub ratio: Option<f64>,
}

/// Per `(n, d)`: regime, unit-constant shape, smallest observed `s_min` (over all shifts) and their ratio.
pub fn bound_table_from(cfg: &ExperimentConfig, records: &[RunRecord]) -> Vec<BoundRow> {
    let th = &cfg.thresholds;
    let mut rows = Vec::new();
    for n in cfg.n.values() {
        for d in cfg.d.values() {
            let regime = bound_regime(n, d, th.regime_c1, th.regime_c2);
            let shape = bound_shape(regime, n, d);
            let observed_min = records
                .iter()
                .filter(|r| r.n == n && r.d == d)
                .filter_map(|r| r.spectral.as_ref().map(|s| s.s_min))
                .min_by(f64::total_cmp);
            let ratio = match (observed_min, shape) {
                (Some(o), Some(s)) => Some(o / s),
                _ => None,
            };
            rows.push(BoundRow { n, d, regime, shape, observed_min, ratio });
        }
    }
    rows
}

pub fn bound_table(cfg: &ExperimentConfig) -> Result<Vec<BoundRow>> {
    let campaign = run_campaign(cfg)?;
    Ok(bound_table_from(cfg, &campaign.records))
}
