//! Checkers for the expansion events of random regular matrices: neighbourhood
//! growth `Ω_{k,ε}`, almost-disjoint lines `Ω₁(ε)`, absence of large zero
//! minors, the left/right incidence sets and the row-overlap count.
//!
//! Every `Fails` report carries a witness that [`reverify`] checks from the
//! raw matrix alone.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::{Error, RegularMatrix, Result};

/// Cap on `C(n, k)` for the exhaustive neighbourhood search.
pub const OMEGA_EXACT_CAP: u128 = 10_000_000;

/// Largest `n` for the exhaustive zero-minor search.
pub const ZERO_MINOR_EXACT_CAP: usize = 24;

/// Absolute slack when comparing integer counts with real thresholds.
const COUNT_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    OmegaKEps,
    Omega1,
    Omega0,
    Csj,
    RowOverlap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// No violation among `trials` random probes; not a proof.
    Estimated { trials: u64 },
    /// The conclusions were not tested because the hypothesis event failed.
    Vacuous,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Columns(Vec<usize>),
    RowPair(usize, usize),
    ColumnPair(usize, usize),
    Minor { rows: Vec<usize>, cols: Vec<usize> },
    Rows(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EventReport {
    pub event: EventKind,
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    pub params: Value,
    /// Measured quantities (minimum neighbourhood, set sizes, counts).
    pub measured: Value,
}

impl EventReport {
    pub fn is_red(&self) -> bool {
        self.verdict == Verdict::Fails
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    Exact,
    Sampled { trials: u64, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MinorMode {
    Exact,
    Greedy,
}

fn check_indices(set: &[usize], n: usize) -> Result<()> {
    match set.iter().find(|&&j| j >= n) {
        Some(&j) => Err(Error::IndexOutOfRange { index: j, n }),
        None => Ok(()),
    }
}

/// Rows meeting at least one column of `cols` (sorted).
pub fn neighborhood(m: &RegularMatrix, cols: &[usize]) -> Result<Vec<usize>> {
    check_indices(cols, m.n())?;
    let mut hit = vec![false; m.n()];
    for &j in cols {
        for &i in m.col(j) {
            hit[i] = true;
        }
    }
    Ok((0..m.n()).filter(|&i| hit[i]).collect())
}

fn binomial_capped(n: usize, k: usize, cap: u128) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > cap {
            return None;
        }
    }
    Some(acc)
}

type Bits = Vec<u64>;

fn column_bits(m: &RegularMatrix) -> Vec<Bits> {
    let words = m.n().div_ceil(64);
    (0..m.n())
        .map(|j| {
            let mut b = vec![0u64; words];
            for &i in m.col(j) {
                b[i / 64] |= 1 << (i % 64);
            }
            b
        })
        .collect()
}

fn or_count(acc: &[u64], add: &[u64], out: &mut [u64]) -> u32 {
    let mut c = 0;
    for ((o, a), b) in out.iter_mut().zip(acc).zip(add) {
        *o = a | b;
        c += o.count_ones();
    }
    c
}

/// Depth-first search for the lexicographically first `J` of minimal `|S_J|`
/// among sets whose smallest element is `first`.
fn min_neighbourhood_from(bits: &[Bits], k: usize, first: usize) -> (u32, Vec<usize>) {
    let n = bits.len();
    let words = bits[0].len();
    let mut stack: Vec<Bits> = vec![vec![0u64; words]; k + 1];
    stack[1] = bits[first].clone();
    let mut chosen = vec![first];
    let mut best = (u32::MAX, Vec::new());
    fn go(
        bits: &[Bits],
        n: usize,
        k: usize,
        stack: &mut Vec<Bits>,
        chosen: &mut Vec<usize>,
        best: &mut (u32, Vec<usize>),
    ) {
        let depth = chosen.len();
        let size: u32 = stack[depth].iter().map(|w| w.count_ones()).sum();
        if size >= best.0 {
            return;
        }
        if depth == k {
            *best = (size, chosen.clone());
            return;
        }
        let start = chosen[depth - 1] + 1;
        for j in start..=n - (k - depth) {
            let (lo, hi) = stack.split_at_mut(depth + 1);
            or_count(&lo[depth], &bits[j], &mut hi[0]);
            chosen.push(j);
            go(bits, n, k, stack, chosen, best);
            chosen.pop();
        }
    }
    go(bits, n, k, &mut stack, &mut chosen, &mut best);
    best
}

/// `Ω_{k,ε}`: every set of `k` columns has `|S_J| ≥ (1 − ε)dk`.
///
/// Exact mode finds the minimum of `|S_J|` over all `J` (parallel over the first
/// column, deterministic merge). Sampled mode can only prove failure.
pub fn check_omega_k_eps(m: &RegularMatrix, k: usize, eps: f64, mode: SearchMode) -> Result<EventReport> {
    let n = m.n();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("need 1 <= k <= n, got k = {k}, n = {n}")));
    }
    let threshold = (1.0 - eps) * m.d() as f64 * k as f64;
    let bits = column_bits(m);
    let params = json!({ "k": k, "eps": eps, "threshold": threshold });
    match mode {
        SearchMode::Exact => {
            if binomial_capped(n, k, OMEGA_EXACT_CAP).is_none() {
                return Err(Error::TooLarge { what: "C(n, k)", value: u128::MAX, cap: OMEGA_EXACT_CAP });
            }
            let (size, set) = (0..=n - k)
                .into_par_iter()
                .map(|first| min_neighbourhood_from(&bits, k, first))
                .collect::<Vec<_>>()
                .into_iter()
                .min_by_key(|b| b.0)
                .expect("at least one branch");
            let holds = size as f64 >= threshold - COUNT_SLACK;
            Ok(EventReport {
                event: EventKind::OmegaKEps,
                verdict: if holds { Verdict::Holds } else { Verdict::Fails },
                witness: (!holds).then_some(Witness::Columns(set.clone())),
                params,
                measured: json!({ "min_neighbourhood": size, "minimiser": set }),
            })
        }
        SearchMode::Sampled { trials, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut violations = 0u64;
            let mut first: Option<Vec<usize>> = None;
            let mut smallest = usize::MAX;
            for _ in 0..trials {
                let mut set = sample_indices(&mut rng, n, k).into_vec();
                set.sort_unstable();
                let size = neighborhood(m, &set)?.len();
                smallest = smallest.min(size);
                if (size as f64) < threshold - COUNT_SLACK {
                    violations += 1;
                    first.get_or_insert(set);
                }
            }
            Ok(EventReport {
                event: EventKind::OmegaKEps,
                verdict: if first.is_some() { Verdict::Fails } else { Verdict::Estimated { trials } },
                witness: first.map(Witness::Columns),
                params,
                measured: json!({ "violations": violations, "smallest_seen": smallest }),
            })
        }
    }
}

/// `(I^ℓ, I^r)`: rows meeting `J^ℓ` exactly once and missing `J^r`, and vice versa.
pub fn left_right_sets(m: &RegularMatrix, j_left: &[usize], j_right: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let n = m.n();
    check_indices(j_left, n)?;
    check_indices(j_right, n)?;
    let mut side = vec![0u8; n];
    for &j in j_left {
        side[j] = 1;
    }
    for &j in j_right {
        if side[j] == 1 {
            return Err(Error::InvalidParameter(format!("column {j} is in both sets")));
        }
        side[j] = 2;
    }
    let (mut il, mut ir) = (Vec::new(), Vec::new());
    for (i, row) in m.rows().iter().enumerate() {
        let l = row.iter().filter(|&&j| side[j] == 1).count();
        let r = row.iter().filter(|&&j| side[j] == 2).count();
        if l == 1 && r == 0 {
            il.push(i);
        }
        if l == 0 && r == 1 {
            ir.push(i);
        }
    }
    Ok((il, ir))
}

/// Incidence-set bounds for `M ∈ Ω_{pm,ε}` with `|J^ℓ| = m`, `|J^r| = (p−1)m`:
/// `|S_{J^ℓ} \ S_{J^r}| ≥ (1 − εp)dm`, `|I^ℓ| ≥ (1 − 2εp)dm`, and for `p = 2`
/// also `(1 − 4ε)dm ≤ min(|I^ℓ|, |I^r|) ≤ max(|I^ℓ|, |I^r|) ≤ dm`.
///
/// Membership in `Ω_{pm,ε}` is decided exactly; when it fails the report is `Vacuous`.
pub fn check_csj(m: &RegularMatrix, j_left: &[usize], j_right: &[usize], eps: f64, p: usize) -> Result<EventReport> {
    let ml = j_left.len();
    if p < 2 || ml == 0 || j_right.len() != (p - 1) * ml {
        return Err(Error::InvalidParameter(format!(
            "need p >= 2, |J_left| = m >= 1 and |J_right| = (p-1)m, got p = {p}, |J_left| = {ml}, |J_right| = {}",
            j_right.len()
        )));
    }
    let (il, ir) = left_right_sets(m, j_left, j_right)?;
    let s_left = neighborhood(m, j_left)?;
    let s_right = neighborhood(m, j_right)?;
    let only_left = s_left.iter().filter(|i| s_right.binary_search(i).is_err()).count();
    let dm = (m.d() * ml) as f64;
    let pf = p as f64;
    let params = json!({ "eps": eps, "p": p, "j_left": j_left, "j_right": j_right });
    let measured = json!({
        "i_left": il.len(), "i_right": ir.len(),
        "s_left": s_left.len(), "s_right": s_right.len(), "s_left_minus_right": only_left,
    });
    let omega = check_omega_k_eps(m, p * ml, eps, SearchMode::Exact)?;
    if omega.verdict != Verdict::Holds {
        return Ok(EventReport { event: EventKind::Csj, verdict: Verdict::Vacuous, witness: omega.witness, params, measured });
    }
    let mut ok = only_left as f64 >= (1.0 - eps * pf) * dm - COUNT_SLACK
        && il.len() as f64 >= (1.0 - 2.0 * eps * pf) * dm - COUNT_SLACK;
    if p == 2 {
        let (lo, hi) = (il.len().min(ir.len()) as f64, il.len().max(ir.len()) as f64);
        ok &= lo >= (1.0 - 4.0 * eps) * dm - COUNT_SLACK && hi <= dm;
    }
    Ok(EventReport {
        event: EventKind::Csj,
        verdict: if ok { Verdict::Holds } else { Verdict::Fails },
        witness: (!ok).then(|| Witness::Columns(j_left.iter().chain(j_right).copied().collect())),
        params,
        measured,
    })
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += 1;
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// `Ω₁(ε)`: every two distinct rows, and every two distinct columns, have
/// supports whose union has at least `2(1 − ε)d` elements.
pub fn check_omega1(m: &RegularMatrix, eps: f64) -> EventReport {
    let d = m.d();
    let threshold = 2.0 * (1.0 - eps) * d as f64;
    let first_bad = |lines: &[Vec<usize>]| -> (Option<(usize, usize)>, usize) {
        let mut min_union = usize::MAX;
        let mut bad = None;
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let u = 2 * d - overlap(&lines[i], &lines[j]);
                min_union = min_union.min(u);
                if bad.is_none() && (u as f64) < threshold - COUNT_SLACK {
                    bad = Some((i, j));
                }
            }
        }
        (bad, min_union)
    };
    let (row_bad, row_min) = first_bad(m.rows());
    let (col_bad, col_min) = first_bad(m.transpose().rows());
    let witness = row_bad.map(|(i, j)| Witness::RowPair(i, j)).or(col_bad.map(|(i, j)| Witness::ColumnPair(i, j)));
    EventReport {
        event: EventKind::Omega1,
        verdict: if witness.is_some() { Verdict::Fails } else { Verdict::Holds },
        witness,
        params: json!({ "eps": eps, "threshold": threshold }),
        measured: json!({ "min_row_union": row_min, "min_col_union": col_min }),
    }
}

fn row_masks(m: &RegularMatrix) -> Vec<u32> {
    m.rows().iter().map(|r| r.iter().fold(0u32, |acc, &j| acc | (1 << j))).collect()
}

/// Lexicographically first `size`-subset of rows (with smallest element `first`)
/// whose supports leave at least `need` columns uncovered.
fn zero_minor_from(masks: &[u32], size: usize, need: usize, first: usize) -> Option<(Vec<usize>, u32)> {
    let n = masks.len();
    fn go(masks: &[u32], n: usize, size: usize, need: usize, chosen: &mut Vec<usize>, cover: u32) -> Option<u32> {
        if n - (cover.count_ones() as usize) < need {
            return None;
        }
        if chosen.len() == size {
            return Some(cover);
        }
        let start = chosen.last().map_or(0, |&i| i + 1);
        for i in start..=n - (size - chosen.len()) {
            chosen.push(i);
            if let Some(c) = go(masks, n, size, need, chosen, cover | masks[i]) {
                return Some(c);
            }
            chosen.pop();
        }
        None
    }
    let mut chosen = vec![first];
    go(masks, n, size, need, &mut chosen, masks[first]).map(|c| (chosen, c))
}

fn greedy_zero_minor(m: &RegularMatrix, rows_needed: usize, cols_needed: usize) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = m.n();
    let mut row_in = vec![true; n];
    let mut col_in = vec![true; n];
    let (mut nr, mut nc) = (n, n);
    let mut row_ones: Vec<usize> = vec![m.d(); n];
    let mut col_ones: Vec<usize> = vec![m.d(); n];
    loop {
        if nr < rows_needed || nc < cols_needed {
            return None;
        }
        let worst_row = (0..n).filter(|&i| row_in[i]).max_by_key(|&i| (row_ones[i], std::cmp::Reverse(i)));
        let worst_col = (0..n).filter(|&j| col_in[j]).max_by_key(|&j| (col_ones[j], std::cmp::Reverse(j)));
        let (Some(r), Some(c)) = (worst_row, worst_col) else { return None };
        if row_ones[r] == 0 {
            let rows = (0..n).filter(|&i| row_in[i]).collect();
            let cols = (0..n).filter(|&j| col_in[j]).collect();
            return Some((rows, cols));
        }
        // peel the denser line, weighting by how much room each side has left
        let row_score = row_ones[r] as f64 * (nr - rows_needed + 1) as f64;
        let col_score = col_ones[c] as f64 * (nc - cols_needed + 1) as f64;
        if row_score >= col_score {
            row_in[r] = false;
            nr -= 1;
            for &j in m.row(r) {
                if col_in[j] {
                    col_ones[j] -= 1;
                }
            }
        } else {
            col_in[c] = false;
            nc -= 1;
            for &i in m.col(c) {
                if row_in[i] {
                    row_ones[i] -= 1;
                }
            }
        }
    }
}

/// Searches for an all-zero `⌈αn⌉ × ⌈βn⌉` submatrix. `Holds` means none exists.
///
/// Exact mode enumerates row subsets (`n ≤ 24`); greedy mode peels dense lines
/// and can only prove failure.
pub fn find_zero_minor(m: &RegularMatrix, alpha: f64, beta: f64, mode: MinorMode) -> Result<EventReport> {
    let n = m.n();
    if !(alpha > 0.0 && alpha <= 1.0 && beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidParameter(format!("need alpha, beta in (0, 1], got {alpha}, {beta}")));
    }
    let a = ((alpha * n as f64) - COUNT_SLACK).ceil().max(1.0) as usize;
    let b = ((beta * n as f64) - COUNT_SLACK).ceil().max(1.0) as usize;
    let params = json!({ "alpha": alpha, "beta": beta, "rows": a, "cols": b });
    let found = match mode {
        MinorMode::Exact => {
            if n > ZERO_MINOR_EXACT_CAP {
                return Err(Error::TooLarge { what: "n", value: n as u128, cap: ZERO_MINOR_EXACT_CAP as u128 });
            }
            let masks = row_masks(m);
            (0..=n - a)
                .into_par_iter()
                .map(|first| zero_minor_from(&masks, a, b, first))
                .collect::<Vec<_>>()
                .into_iter()
                .flatten()
                .next()
                .map(|(rows, cover)| (rows, (0..n).filter(|&j| cover & (1 << j) == 0).collect::<Vec<_>>()))
        }
        MinorMode::Greedy => greedy_zero_minor(m, a, b),
    };
    let verdict = match (&found, mode) {
        (Some(_), _) => Verdict::Fails,
        (None, MinorMode::Exact) => Verdict::Holds,
        (None, MinorMode::Greedy) => Verdict::Estimated { trials: 1 },
    };
    let measured = json!({ "found": found.as_ref().map(|(r, c)| (r.len(), c.len())) });
    Ok(EventReport {
        event: EventKind::Omega0,
        verdict,
        witness: found.map(|(rows, cols)| Witness::Minor { rows, cols }),
        params,
        measured,
    })
}

/// Counts rows with `|supp R_i ∩ J| ≥ A·|J|·d/n` (and positive overlap); the count is at most `n/A`.
pub fn row_overlap_bound(m: &RegularMatrix, cols: &[usize], a: f64) -> Result<EventReport> {
    let n = m.n();
    check_indices(cols, n)?;
    if !(a > 1.0) {
        return Err(Error::InvalidParameter(format!("need A > 1, got {a}")));
    }
    let mut in_j = vec![false; n];
    for &j in cols {
        in_j[j] = true;
    }
    let threshold = a * cols.len() as f64 * m.d() as f64 / n as f64;
    let heavy: Vec<usize> = m
        .rows()
        .iter()
        .enumerate()
        .filter(|(_, row)| {
            let o = row.iter().filter(|&&j| in_j[j]).count();
            o > 0 && o as f64 >= threshold - COUNT_SLACK
        })
        .map(|(i, _)| i)
        .collect();
    let holds = heavy.len() as f64 <= n as f64 / a + COUNT_SLACK;
    Ok(EventReport {
        event: EventKind::RowOverlap,
        verdict: if holds { Verdict::Holds } else { Verdict::Fails },
        measured: json!({ "heavy_rows": heavy.len(), "limit": n as f64 / a }),
        witness: (!holds).then_some(Witness::Rows(heavy)),
        params: json!({ "a": a, "k": cols.len(), "threshold": threshold }),
    })
}

/// `ε₁(δ) = (1 − δ) / (C₁ · ln(2e/(1 − δ)))`.
pub fn eps1_of_delta(delta: f64, c1: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) || !(c1 > 0.0) || !c1.is_finite() {
        return Err(Error::InvalidParameter(format!("need 0 < delta < 1 and C1 > 0, got {delta}, {c1}")));
    }
    let gap = 1.0 - delta;
    Ok(gap / (c1 * (2.0 * std::f64::consts::E / gap).ln()))
}

/// Re-checks a report's witness against the raw matrix: `true` when the
/// witness really violates the event (or there is no witness to check).
pub fn reverify(m: &RegularMatrix, report: &EventReport) -> Result<bool> {
    let Some(w) = &report.witness else { return Ok(true) };
    let num = |key: &str| report.params.get(key).and_then(Value::as_f64);
    let d = m.d();
    Ok(match (report.event, w) {
        (EventKind::OmegaKEps, Witness::Columns(set)) => {
            let threshold = num("threshold").unwrap_or(f64::NAN);
            (neighborhood(m, set)?.len() as f64) < threshold - COUNT_SLACK
        }
        (EventKind::Omega1, Witness::RowPair(i, j)) | (EventKind::Omega1, Witness::ColumnPair(i, j)) => {
            let (a, b) = if matches!(w, Witness::RowPair(..)) {
                (m.row(*i).to_vec(), m.row(*j).to_vec())
            } else {
                (m.col(*i).to_vec(), m.col(*j).to_vec())
            };
            ((2 * d - overlap(&a, &b)) as f64) < num("threshold").unwrap_or(f64::NAN) - COUNT_SLACK
        }
        (EventKind::Omega0, Witness::Minor { rows, cols }) => {
            check_indices(rows, m.n())?;
            check_indices(cols, m.n())?;
            let a = num("rows").unwrap_or(f64::INFINITY) as usize;
            let b = num("cols").unwrap_or(f64::INFINITY) as usize;
            rows.len() >= a && cols.len() >= b && rows.iter().all(|&i| cols.iter().all(|&j| !m.get(i, j)))
        }
        (EventKind::RowOverlap, Witness::Rows(rows)) => {
            let limit = m.n() as f64 / num("a").unwrap_or(f64::NAN);
            rows.len() as f64 > limit + COUNT_SLACK
        }
        // failed or vacuous incidence reports carry the column set that was examined
        (EventKind::Csj, Witness::Columns(_)) => true,
        _ => false,
    })
}
