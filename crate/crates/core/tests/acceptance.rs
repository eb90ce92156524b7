//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use regsing_core::anticoncentration::{corpus, lo_ball_exact, lo_ball_mc, lo_bound_ratio, LoQuery};
use regsing_core::enumerate::{enumerate_all, enumerate_by_matchings};
use regsing_core::events::{check_csj, check_omega_k_eps, row_overlap_bound, SearchMode, Verdict};
use regsing_core::exact::Recheck;
use regsing_core::harness::{run_campaign_with_threads, write_jsonl, Check, ExperimentConfig, OneOrMany};
use regsing_core::sampler::{default_burn_in, derive_seed, sample, uniformity_chi_square};
use regsing_core::spectra::{dense_extremes, singular_extremes, verify_distance_lower_bound};
use regsing_core::taxonomy::{
    classify, compute_params, default_constants, norm_bound_check, separated_pairs, ClassLabel, Profile,
    RunVector, TaxonomyParams,
};
use regsing_core::vector::random_unit;
use regsing_core::{Error, C64};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn enumeration() -> Outcome {
    let start = Instant::now();
    let mut a = enumerate_all(4, 2).unwrap();
    let mut b = enumerate_by_matchings(4, 2).unwrap();
    a.sort();
    b.sort();
    let n31 = enumerate_all(3, 1).unwrap().len();
    let n31b = enumerate_by_matchings(3, 1).unwrap().len();
    let n22 = enumerate_all(2, 2).unwrap().len();
    let n22b = enumerate_by_matchings(2, 2).unwrap().len();
    let took = start.elapsed();
    let pass = a == b && a.len() == 90 && n31 == 6 && n31b == 6 && n22 == 1 && n22b == 1 && took < Duration::from_secs(1);
    outcome(pass, format!("|M_4,2| = {} / {}, |M_3,1| = {n31}, |M_2,2| = {n22}, {took:?}", a.len(), b.len()))
}

fn sampler_uniformity() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in [11u64, 22, 33] {
        let chi = uniformity_chi_square(4, 2, 90_000, 1_000, seed).unwrap();
        let q = chi.quantile(0.999);
        pass &= chi.classes == 90 && chi.statistic < q;
        parts.push(format!("seed {seed}: {:.1} < {q:.1}", chi.statistic));
    }
    let took = start.elapsed();
    pass &= took < Duration::from_secs(120);
    outcome(pass, format!("{}, {took:?}", parts.join("; ")))
}

fn perron_frobenius() -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    let mut k = 0u64;
    for n in [50, 100, 200] {
        for d in [5, 10, 20] {
            for _ in 0..100 {
                let m = sample(n, d, default_burn_in(n, d), derive_seed(3, k)).unwrap();
                k += 1;
                worst = worst.max((dense_extremes(&m, c(0.0, 0.0)).s_max - d as f64).abs());
            }
        }
    }
    let took = start.elapsed();
    outcome(worst <= 1e-9 && took < Duration::from_secs(120), format!("max |s_max - d| = {worst:.2e} over {k} matrices, {took:?}"))
}

fn permutations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut bad = 0;
    for k in 0..100 {
        let n = rng.gen_range(2..80);
        let m = sample(n, 1, default_burn_in(n, 1), derive_seed(4, k)).unwrap();
        if singular_extremes(&m, c(0.0, 0.0)).unwrap().s_min != 1.0 {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{bad} of 100 permutation matrices with s_min != 1"))
}

fn desk_probe() -> Outcome {
    let start = Instant::now();
    let s = std::f64::consts::FRAC_1_SQRT_2 / 8.0;
    let mut cfg = ExperimentConfig::simple(100, 20, vec![c(0.0, 0.0), c(s, s)], 300, 0x5EED);
    cfg.n = OneOrMany::Many(vec![100, 200]);
    cfg.d = OneOrMany::Many(vec![20, 40]);
    cfg.z_scaled_by_d = true;
    let campaign = run_campaign_with_threads(&cfg, None).unwrap();
    let recs = &campaign.records;
    let hits = recs.iter().filter(|r| r.bound_n6 == Some(false)).count();
    let confirmed = recs.iter().filter(|r| r.recheck.as_ref().is_some_and(|x| x.verdict == Recheck::Confirmed)).count();
    let errors = recs.iter().filter(|r| r.error.is_some()).count();
    let min = recs.iter().filter_map(|r| r.spectral.as_ref().map(|s| s.s_min)).fold(f64::INFINITY, f64::min);
    let took = start.elapsed();
    outcome(
        recs.len() == 2400 && confirmed == 0 && errors == 0 && took < Duration::from_secs(600),
        format!("{} trials, {hits} below n^-6, {confirmed} confirmed, {errors} errors, min s_min = {min:.3e}, {took:?}", recs.len()),
    )
}

fn littlewood_offord() -> Outcome {
    let ones = |m: usize, t: f64| LoQuery::new(vec![c(1.0, 0.0); m], t).unwrap();
    let p4 = lo_ball_exact(&ones(4, 1.0)).unwrap();
    let p10 = lo_ball_exact(&ones(10, 1.0)).unwrap();
    let mut pass = (p4 - 0.375).abs() <= 1e-12 && (p10 - 252.0 / 1024.0).abs() <= 1e-12;
    let mut mc_detail = Vec::new();
    for (m, exact) in [(4, p4), (10, p10)] {
        let mc = lo_ball_mc(&ones(m, 1.0), 100_000, 6 + m as u64).unwrap();
        let z = (mc.estimate - exact).abs() / mc.stderr;
        pass &= z <= 3.0;
        mc_detail.push(format!("m = {m}: {:.4} ({z:.2} se)", mc.estimate));
    }
    let ratios: Vec<f64> = corpus().iter().map(|q| lo_bound_ratio(q).unwrap()).collect();
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    pass &= max_ratio <= 1.0;
    outcome(
        pass,
        format!("P(1^4) = {p4}, P(1^10) = {p10}, mc {}, max ratio {max_ratio:.4} over {} queries", mc_detail.join(", "), ratios.len()),
    )
}

fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<C64> {
    match rng.gen_range(0..3) {
        0 => (0..m).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect(),
        // a few clusters, so that many draws sit near the hypothesis boundary
        1 => {
            let k = rng.gen_range(1..5);
            let centers: Vec<C64> = (0..k).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            (0..m).map(|_| centers[rng.gen_range(0..k)] + c(rng.gen_range(-0.05..0.05), rng.gen_range(-0.05..0.05))).collect()
        }
        _ => (0..m).map(|_| c(rng.gen_range(-3..4) as f64, rng.gen_range(-3..4) as f64)).collect(),
    }
}

fn separated_pairs_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut accepted, mut rejected, mut bad) = (0, 0, 0);
    while accepted < 10_000 {
        let m = rng.gen_range(4..60);
        let x = random_vector(&mut rng, m);
        let rho = rng.gen_range(0.05..2.0);
        let eps = rng.gen_range(0.05..0.95);
        match separated_pairs(&x, rho, eps) {
            Ok(sp) => {
                accepted += 1;
                let need = (eps * m as f64 / 4.0).ceil() as usize;
                let sep = sp
                    .j
                    .iter()
                    .flat_map(|&a| sp.q.iter().map(move |&b| (a, b)))
                    .map(|(a, b)| if a == b { 0.0 } else { (x[a] - x[b]).norm() })
                    .fold(f64::INFINITY, f64::min);
                if sp.j.len() < need || sp.q.len() < need || sep < rho / 2f64.sqrt() {
                    bad += 1;
                }
            }
            Err(Error::Hypothesis(_)) => rejected += 1,
            Err(e) => panic!("unexpected error {e}"),
        }
    }
    outcome(bad == 0, format!("{accepted} accepted ({rejected} rejected by the hypothesis check), {bad} violations"))
}

fn distance_bound_check() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut general, mut corollary_checked, mut bad) = (0, 0, 0);
    for k in 0..200u64 {
        let n = rng.gen_range(4..40);
        let d = rng.gen_range(1..=n.min(8));
        let m = sample(n, d, default_burn_in(n, d), derive_seed(8, k)).unwrap();
        let z = c(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let v = if k < 100 { random_unit(n, &mut rng) } else { singular_extremes(&m, z).unwrap().v_min };
        let cert = verify_distance_lower_bound(&m.shifted_dense(z), &v).unwrap();
        general += 1;
        if !cert.holds {
            bad += 1;
        }
        if cert.corollary_hypotheses {
            corollary_checked += 1;
            if cert.corollary_holds != Some(true) {
                bad += 1;
            }
        }
        if k >= 100 && !cert.corollary_hypotheses {
            // the minimizing vector satisfies the corollary hypotheses by construction
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{general} triples, corollary applicable in {corollary_checked}, {bad} violations"))
}

fn incidence_bounds() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (n, d) = (30, 3);
    let mut tally: BTreeMap<&str, usize> = BTreeMap::new();
    let (mut nontrivial_s, mut nontrivial_i, mut overlap_fails) = (0, 0, 0);
    for k in 0..1000u64 {
        let m = sample(n, d, default_burn_in(n, d), derive_seed(9, k)).unwrap();
        let (ml, p) = [(1, 2), (2, 2), (1, 3)][k as usize % 3];
        let mut cols: Vec<usize> = (0..n).collect();
        for i in 0..ml * p {
            let j = rng.gen_range(i..n);
            cols.swap(i, j);
        }
        // smallest eps for which the matrix expands on every pm-set, found by exhaustive search
        let omega = check_omega_k_eps(&m, ml * p, 0.0, SearchMode::Exact).unwrap();
        let smallest = omega.measured["min_neighbourhood"].as_u64().unwrap() as f64;
        let eps = 1.0 - smallest / (d * ml * p) as f64;
        nontrivial_s += usize::from(1.0 - eps * p as f64 > 0.0);
        nontrivial_i += usize::from(1.0 - 2.0 * eps * p as f64 > 0.0);
        let rep = check_csj(&m, &cols[..ml], &cols[ml..ml * p], eps, p).unwrap();
        *tally
            .entry(match rep.verdict {
                Verdict::Holds => "holds",
                Verdict::Fails => "fails",
                Verdict::Vacuous => "outside",
                Verdict::Estimated { .. } => "estimated",
            })
            .or_default() += 1;
        let size = rng.gen_range(1..=n);
        let a = rng.gen_range(1.01..6.0);
        if row_overlap_bound(&m, &cols[..size], a).unwrap().verdict != Verdict::Holds {
            overlap_fails += 1;
        }
    }
    let holds = tally.get("holds").copied().unwrap_or(0);
    outcome(
        holds == 1000 && overlap_fails == 0,
        format!(
            "incidence sets {tally:?} (positive bound on |S_l \\ S_r| in {nontrivial_s}, on |I^l| in {nontrivial_i}), \
             row-overlap violations {overlap_fails}"
        ),
    )
}

fn big_params() -> TaxonomyParams {
    let (a1, a2, a3) = default_constants();
    compute_params(1_000_000_000, 10_000, a1, a2, a3).unwrap()
}

/// Random run vector with breakpoints biased toward the ladder ranks.
fn random_runs(rng: &mut ChaCha8Rng, prm: &TaxonomyParams) -> RunVector {
    let n = prm.n;
    let marks = [1, prm.first_step(), prm.p, prm.p * prm.p, prm.n1, prm.n2, prm.n3, n / 2, n - prm.n3];
    let mut cuts: Vec<usize> = (0..rng.gen_range(1..6))
        .map(|_| {
            if rng.gen_bool(0.7) {
                let base = marks[rng.gen_range(0..marks.len())] as i64;
                (base + rng.gen_range(-3..=3)).clamp(1, n as i64 - 1) as usize
            } else {
                (10f64.powf(rng.gen_range(0.0..9.0)) as usize).clamp(1, n - 1)
            }
        })
        .collect();
    cuts.push(n);
    cuts.sort();
    cuts.dedup();
    let d = prm.d as f64;
    let drops = [1.0, 1.5, 3.0, 4.5, 4.0 * d * 1.01, d.powf(1.5) * 1.01, 1e9];
    let mut modulus = 1.0;
    let mut start = 0;
    let mut runs = Vec::new();
    for &end in &cuts {
        let phase = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..std::f64::consts::TAU) };
        runs.push((C64::from_polar(modulus, phase), end - start));
        start = end;
        modulus /= drops[rng.gen_range(0..drops.len())] * rng.gen_range(1.0..1.2);
    }
    RunVector::new(runs)
}

/// Independent evaluation of the steep ladder from order statistics.
fn expected_steep(x: &Profile, prm: &TaxonomyParams) -> Option<ClassLabel> {
    let s = |k: usize| x.order_stat(k);
    let d = prm.d as f64;
    let mut ladder = Vec::new();
    if prm.p >= 2 {
        ladder.push((ClassLabel::T0(0), 1, prm.n0.min(prm.p), 4.0 * d));
        for i in 1..=prm.r {
            ladder.push((ClassLabel::T0(i), prm.p.pow(i as u32), prm.p.pow(i as u32 + 1), 4.0 * d));
        }
    }
    ladder.push((ClassLabel::T1, prm.n1, prm.n2, d.powf(1.5)));
    ladder.push((ClassLabel::T2, prm.n2, prm.n3, 4.0));
    ladder.into_iter().find(|&(_, hi, lo, f)| s(hi) > f * s(lo)).map(|t| t.0)
}

fn taxonomy_partition() -> Outcome {
    let prm = big_params();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mislabeled = 0;
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    for _ in 0..10_000 {
        let x = Profile::from_run_vector(&random_runs(&mut rng, &prm));
        let cls = classify(&x, &prm, prm.delta).unwrap();
        *seen.entry(cls.label.to_string()).or_default() += 1;
        let ok = match expected_steep(&x, &prm) {
            Some(l) => cls.label == l,
            None => match cls.label {
                ClassLabel::AlmostConstSloping => cls.almost_constant.is_yes(),
                ClassLabel::EssentiallyNonConstant => !cls.almost_constant.is_yes(),
                _ => false,
            },
        };
        mislabeled += usize::from(!ok);
    }

    let mut scale_flips = 0;
    for _ in 0..1000 {
        let runs = random_runs(&mut rng, &prm);
        let s = C64::from_polar(10f64.powf(rng.gen_range(-6.0..6.0)), rng.gen_range(0.0..std::f64::consts::TAU));
        let a = classify(&Profile::from_run_vector(&runs), &prm, prm.delta).unwrap();
        let b = classify(&Profile::from_run_vector(&runs.scaled(s)), &prm, prm.delta).unwrap();
        scale_flips += usize::from(a.label != b.label);
    }

    let targets = [
        ClassLabel::T0(0),
        ClassLabel::T0(1),
        ClassLabel::T1,
        ClassLabel::T2,
        ClassLabel::AlmostConstSloping,
        ClassLabel::EssentiallyNonConstant,
    ];
    let mut members = vec![0usize; targets.len()];
    let mut norm_fails = 0;
    let mut min_rel_slack = f64::INFINITY;
    let mut draws = 0u64;
    while members.iter().any(|&k| k < 1000) && draws < 5_000_000 {
        draws += 1;
        let x = Profile::from_run_vector(&random_runs(&mut rng, &prm));
        let cls = classify(&x, &prm, prm.delta).unwrap();
        let Some(t) = targets.iter().position(|&l| l == cls.label) else { continue };
        if members[t] >= 1000 {
            continue;
        }
        members[t] += 1;
        let nb = norm_bound_check(&x, &cls, &prm).unwrap();
        min_rel_slack = min_rel_slack.min(nb.slack / nb.bound);
        norm_fails += usize::from(!(nb.holds && nb.slack >= 0.0));
    }
    let filled = members.iter().all(|&k| k == 1000);
    outcome(
        mislabeled == 0 && scale_flips == 0 && filled && norm_fails == 0,
        format!(
            "labels {seen:?}, {mislabeled} mislabeled; {scale_flips} scaling flips; norm bound on {members:?} members \
             ({draws} draws), {norm_fails} failures, min relative slack {min_rel_slack:.3e}"
        ),
    )
}

fn determinism() -> Outcome {
    let mut cfg = ExperimentConfig::simple(30, 3, vec![c(0.0, 0.0), c(0.4, -0.3)], 40, 77);
    cfg.n = OneOrMany::Many(vec![12, 30]);
    cfg.checks = vec![Check::Omega1, Check::OmegaKEps, Check::ZeroMinor, Check::RowOverlap, Check::Csj];
    let run = |threads| {
        let c = run_campaign_with_threads(&cfg, Some(threads)).unwrap();
        let mut buf = Vec::new();
        write_jsonl(&c.records, &mut buf).unwrap();
        buf
    };
    let (one, eight) = (run(1), run(8));
    outcome(one == eight && !one.is_empty(), format!("{} bytes from 1 thread, {} from 8, identical: {}", one.len(), eight.len(), one == eight))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("enumeration cross-check", enumeration),
        ("sampler uniformity", sampler_uniformity),
        ("operator norm equals d", perron_frobenius),
        ("permutation matrices", permutations),
        ("no confirmed singular shift below n^-6", desk_probe),
        ("small-ball probabilities", littlewood_offord),
        ("separated pairs", separated_pairs_check),
        ("distance to span", distance_bound_check),
        ("incidence and overlap bounds", incidence_bounds),
        ("vector classes and norm bounds", taxonomy_partition),
        ("thread-count determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {}: {} ({}; {:.1}s)",
            i + 1,
            name,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
