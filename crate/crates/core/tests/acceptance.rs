//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `EXPECTED_FAILURES` are evaluated in full and reported
//! as FAIL; the run only errors if one of them unexpectedly passes or any
//! other criterion fails.

mod common;

use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xdof::channel::{derive_seed, sample_network, schedule_slot_sets, NetworkConfig};
use xdof::dof::{self, asymptotic_dof_t1, asymptotic_dof_t3, table1_row, two_user_length, Piecewise};
use xdof::linalg::rank_tol;
use xdof::misox::{self, misox_config, misox_trial, MisoxPayload};
use xdof::precoding::czp_precoder;
use xdof::ria::{self, plan_ria, ria_trial_with_plan, side_info_mismatch, RiaPayload};
use xdof::scheme::TrialOutcome;
use xdof::stia2::{self, stia_case, stia_trial, StiaPayload, DEFAULT_TIMING};
use xdof::verify::converges;

use common::RecordingProvider;

const SEED: u64 = 0xAC_CE97;
const RESIDUAL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-9;
const ALIGN_TOL: f64 = 1e-9;
const SIDE_INFO_TOL: f64 = 1e-12;

/// Criteria whose statement the reference formulas cannot satisfy; see the
/// detail printed on their line.
const EXPECTED_FAILURES: &[u32] = &[6, 8];

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

struct Tally {
    trials: usize,
    failures: usize,
    worst: f64,
    ratios: Vec<Rational64>,
}

fn show(r: &[Rational64]) -> String {
    r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn tally(outcomes: &[TrialOutcome]) -> Tally {
    let mut ratios: Vec<Rational64> = outcomes.iter().map(|o| q(o.symbols as i64, o.slots as i64)).collect();
    ratios.sort();
    ratios.dedup();
    Tally {
        trials: outcomes.len(),
        failures: outcomes.iter().filter(|o| !o.success() || o.max_residual() > RESIDUAL).count(),
        worst: outcomes.iter().map(TrialOutcome::max_residual).fold(0.0, f64::max),
        ratios,
    }
}

fn stia_runs(a: usize, b: usize, n: u64) -> Vec<TrialOutcome> {
    let cfg = stia_case(a, b).unwrap();
    (0..n).map(|t| stia_trial(&cfg, DEFAULT_TIMING, SEED, t).unwrap()).collect()
}

fn criterion1() -> (bool, String) {
    let start = Instant::now();
    let out = stia_runs(2, 1, 100);
    let elapsed = start.elapsed();
    let t = tally(&out);
    let counts = out.iter().all(|o| o.decoded_symbols() == 8 && o.slots == 5);
    let ok = t.failures == 0 && counts && t.ratios == [q(8, 5)] && elapsed < Duration::from_secs(1);
    (ok, format!("(2,1): {}/{} decoded 8 over 5, ratio {}, worst residual {:.2e}, {:?}", t.trials - t.failures, t.trials, show(&t.ratios), t.worst, elapsed))
}

fn criterion2() -> (bool, String) {
    let start = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for (a, b, len, symbols, ratio) in [(5, 2, 6, 20, q(10, 3)), (5, 3, 5, 20, q(4, 1))] {
        let out = stia_runs(a, b, 500);
        let t = tally(&out);
        let counts = out.iter().all(|o| o.decoded_symbols() == symbols && o.slots == len);
        ok &= two_user_length(a, b) == len && counts && t.failures == 0 && t.ratios == [ratio];
        parts.push(format!("({a},{b}) T={} ratio {} {}/{} worst {:.2e}", two_user_length(a, b), show(&t.ratios), t.trials - t.failures, t.trials, t.worst));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(10);
    (ok, format!("{}; {:?}", parts.join("; "), elapsed))
}

/// Every receiver report has the expected rank, both as recorded and recomputed.
fn ranks_ok(out: &[TrialOutcome], expected: usize) -> usize {
    out.iter()
        .flat_map(|o| &o.reports)
        .filter(|r| r.rank != expected || rank_tol(&r.effective_matrix, RANK_TOL) != expected || r.effective_matrix.cols() != expected)
        .count()
}

fn criterion3() -> (bool, String) {
    let seeds = 500;
    let mut bad = 0;
    let mut parts = Vec::new();
    let h1 = stia_runs(2, 1, seeds);
    let v = ranks_ok(&h1, 4);
    bad += v;
    parts.push(format!("H1 (2,1)=4: {v} bad"));
    for (a, b) in [(3, 2), (5, 2), (5, 3), (3, 3), (3, 5)] {
        let v = ranks_ok(&stia_runs(a, b, seeds), 2 * a);
        bad += v;
        parts.push(format!("H2 ({a},{b})={}: {v} bad", 2 * a));
    }
    let plan = plan_ria(3, ria::DEFAULT_TIMING.0, ria::DEFAULT_TIMING.1).unwrap();
    let h3: Vec<_> = (0..seeds).map(|t| ria_trial_with_plan(&plan, SEED, t).unwrap()).collect();
    let v = ranks_ok(&h3, 5);
    bad += v;
    parts.push(format!("H3 K=3=5: {v} bad"));
    for (m, n) in [(2, 3), (3, 3), (2, 4)] {
        let cfg = misox_config(m, n).unwrap();
        let out: Vec<_> = (0..seeds).map(|t| misox_trial(&cfg, misox::DEFAULT_TIMING, SEED, t).unwrap()).collect();
        let v = ranks_ok(&out, m * cfg.a);
        bad += v;
        parts.push(format!("H5 ({m},{n})={}: {v} bad", m * cfg.a));
    }
    (bad == 0, format!("{seeds} seeds each; {}", parts.join(", ")))
}

fn criterion4() -> (bool, String) {
    let start = Instant::now();
    let mut violations = 0;
    let mut worst: f64 = 0.0;
    for (a, b) in [(3, 2), (5, 2), (5, 3), (7, 3)] {
        for t in 0..1000 {
            let net = NetworkConfig::symmetric(1, 1, a, b, 8, 2, derive_seed(SEED, t));
            let p = sample_network(net, 2).unwrap();
            let (now, target) = (p.channel_at(0, 0, 9).unwrap(), p.channel_at(0, 0, 1).unwrap());
            let v = czp_precoder(now, target).unwrap();
            let pattern = v.pattern.as_ref().unwrap();
            let support_full = (0..a).all(|j| pattern.columns[j].iter().all(|&i| v.matrix[(i, j)].norm() > 0.0));
            let residual = v.alignment_residual(now, target);
            worst = worst.max(residual);
            if !pattern.admits(&v.matrix) || !support_full || residual > ALIGN_TOL || rank_tol(&v.matrix, RANK_TOL) != a {
                violations += 1;
            }
        }
    }
    let mut diagonal_bad = 0;
    for t in 0..1000 {
        let net = NetworkConfig::symmetric(1, 1, 2, 1, 8, 2, derive_seed(SEED, t));
        let p = sample_network(net, 2).unwrap();
        let (now, target) = (p.channel_at(0, 0, 9).unwrap(), p.channel_at(0, 0, 1).unwrap());
        let v = czp_precoder(now, target).unwrap().matrix;
        let off_zero = v[(0, 1)].norm() == 0.0 && v[(1, 0)].norm() == 0.0;
        let ratio_ok = (0..2).all(|i| (v[(i, i)] - target[(0, i)] / now[(0, i)]).norm() <= 1e-12 * v[(i, i)].norm());
        if !(off_zero && ratio_ok) {
            diagonal_bad += 1;
        }
    }
    let elapsed = start.elapsed();
    let ok = violations == 0 && diagonal_bad == 0 && elapsed < Duration::from_secs(5);
    (ok, format!("4x1000 precoders: {violations} violations, worst alignment {worst:.2e}; B=1 diagonal: {diagonal_bad} bad of 1000; {elapsed:?}"))
}

fn criterion5() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    for k in 2..=5usize {
        let plan = plan_ria(k, ria::DEFAULT_TIMING.0, ria::DEFAULT_TIMING.1).unwrap();
        let (mut failures, mut mismatch, mut ratios) = (0, 0.0f64, Vec::new());
        for t in 0..300 {
            let seed = derive_seed(SEED, t);
            let net = NetworkConfig::symmetric(k, k, 1, 1, plan.coherence, plan.feedback_delay, seed);
            let process = sample_network(net, plan.blocks_needed()).unwrap();
            let payload = RiaPayload::random(&mut ChaCha8Rng::seed_from_u64(seed), k);
            let tr = ria::run_ria(&plan, &process, &payload).unwrap();
            mismatch = mismatch.max(side_info_mismatch(&tr));
            let decoded: usize = (0..k)
                .map(|j| ria::decode_ria_receiver(&plan, &tr, &process, j).unwrap())
                .filter(|r| r.success && r.max_residual <= RESIDUAL)
                .map(|r| r.symbols())
                .sum();
            if decoded != tr.symbols_delivered() || tr.side_info.len() != k * (k - 1) {
                failures += 1;
            }
            ratios.push(q(decoded as i64, tr.slots_used() as i64));
        }
        ratios.sort();
        ratios.dedup();
        let kk = k as i64;
        let expected = q(2 * (2 * kk - 1), 3 * kk - 1);
        let exact = ratios == [expected] && (k != 3 || (plan.total_symbols, plan.total_slots) == (15, 12));
        ok &= failures == 0 && exact && mismatch <= SIDE_INFO_TOL;
        parts.push(format!("K={k} {}/{} = {expected}: {failures} failures, side-info {mismatch:.1e}", plan.total_symbols, plan.total_slots));
    }
    (ok, format!("300 seeds each; {}", parts.join("; ")))
}

fn criterion6() -> (bool, String) {
    let mut ok = true;
    let mut parts = Vec::new();
    // Ratios as stated by the criterion. For (2,4) the plateau MN(N-1)/(M(N-1)+1)
    // evaluates to 24/7, not 24/9.
    for (m, n, (num, den)) in [(2, 3, (12, 5)), (3, 3, (18, 7)), (2, 4, (24, 9))] {
        let stated = q(num, den);
        let cfg = misox_config(m, n).unwrap();
        let out: Vec<_> = (0..300).map(|t| misox_trial(&cfg, misox::DEFAULT_TIMING, SEED, t).unwrap()).collect();
        let t = tally(&out);
        let plateau = dof::theorem3_region(m, n, q(0, 1)).unwrap().dof;
        let matches = t.ratios == [stated];
        ok &= t.failures == 0 && matches;
        parts.push(format!(
            "({m},{n}) ratio {} vs stated {num}/{den}{} (plateau {plateau}), {}/{} decoded",
            show(&t.ratios),
            if matches { "" } else { " MISMATCH" },
            t.trials - t.failures,
            t.trials
        ));
    }
    (ok, parts.join("; "))
}

fn criterion7() -> (bool, String) {
    let got: Vec<_> = [(5, 2), (5, 3), (10, 11)]
        .iter()
        .map(|&(a, b)| {
            let r = table1_row(a, b).unwrap();
            (r.stia, r.gak)
        })
        .collect();
    let want = vec![(q(10, 3), q(8, 3)), (q(4, 1), q(66, 17)), (q(40, 3), q(66, 5))];
    let text: Vec<String> = got.iter().map(|(s, g)| format!("{s} / {g}")).collect();
    (got == want, format!("(5,2), (5,3), (10,11) stia / global-delayed: {}", text.join(", ")))
}

fn continuous(p: &Piecewise) -> bool {
    let one = q(1, 1);
    let at = |l: Rational64| p.at(l).unwrap().dof;
    if p.knee >= one {
        return at(q(0, 1)) == p.plateau && at(one) == p.saturation;
    }
    p.slope * p.knee + p.intercept == p.plateau && p.slope + p.intercept == p.saturation && at(p.knee) == p.plateau && at(one) == p.saturation
}

fn non_increasing(p: &Piecewise) -> bool {
    let grid: Vec<Rational64> = (0..=60).map(|i| q(i, 40)).collect();
    grid.windows(2).all(|w| p.at(w[1]).unwrap().dof <= p.at(w[0]).unwrap().dof)
}

fn criterion8() -> (bool, String) {
    let mut regions: Vec<(String, Piecewise)> = Vec::new();
    for a in 1..=12 {
        for b in 1..=12 {
            regions.push((format!("theorem1({a},{b})"), dof::theorem1_pieces(a, b).unwrap()));
            if 2 * b <= a {
                regions.push((format!("corollary1({a},{b})"), dof::corollary1_pieces(a, b).unwrap()));
            }
        }
    }
    for k in 2..=12 {
        regions.push((format!("theorem2({k})"), dof::theorem2_pieces(k).unwrap()));
    }
    for m in 2..=6 {
        for n in 3..=6 {
            regions.push((format!("theorem3({m},{n})"), dof::theorem3_pieces(m, n).unwrap()));
        }
    }
    let discontinuous: Vec<&str> = regions.iter().filter(|(_, p)| !continuous(p)).map(|(s, _)| s.as_str()).collect();
    let rising: Vec<&str> = regions.iter().filter(|(_, p)| !non_increasing(p)).map(|(s, _)| s.as_str()).collect();

    let ns = [1u64, 10, 1_000, 1_000_000];
    let mut slow = Vec::new();
    for a in 1..=8 {
        for b in 1..=8 {
            let vals: Vec<_> = ns.iter().map(|&n| asymptotic_dof_t1(a, b, n)).collect();
            if !converges(&vals, dof::theorem1_pieces(a, b).unwrap().plateau) {
                slow.push(format!("t1({a},{b})"));
            }
        }
    }
    for m in 2..=5 {
        for n in 3..=5 {
            let vals: Vec<_> = ns.iter().map(|&x| asymptotic_dof_t3(m, n, x)).collect();
            if !converges(&vals, dof::theorem3_pieces(m, n).unwrap().plateau) {
                slow.push(format!("t3({m},{n})"));
            }
        }
    }
    let ok = discontinuous.is_empty() && rising.is_empty() && slow.is_empty();
    let detail = format!(
        "{} regions: {} discontinuous, {} not non-increasing {:?}; asymptotics: {} not converging{}",
        regions.len(),
        discontinuous.len(),
        rising.len(),
        rising,
        slow.len(),
        if rising.is_empty() {
            String::new()
        } else {
            " (two-user formula with A < B < 2A, 3B > 4A: plateau 4A/3 lies below the saturated value B)".into()
        }
    );
    (ok, detail)
}

fn criterion9() -> (bool, String) {
    let mut parts = Vec::new();
    let mut ok = true;
    let (tc, tfb) = DEFAULT_TIMING;
    for (a, b) in [(2, 1), (5, 2), (5, 3), (3, 5)] {
        let cfg = stia_case(a, b).unwrap();
        let set = schedule_slot_sets(tc, tfb, cfg.slots_per_run(), 1, cfg.phase_one_len()).unwrap().remove(0);
        let process = sample_network(NetworkConfig::symmetric(2, 2, a, b, tc, tfb, SEED), set.blocks.last().unwrap() + 1).unwrap();
        let payload = StiaPayload::random(&mut ChaCha8Rng::seed_from_u64(SEED), a);
        let rec = RecordingProvider::new(&process);
        ok &= stia2::run_stia_two_user_with(&cfg, &process, &rec, &set, &payload).is_ok();
        ok &= rec.cross_reads() == 0;
        parts.push(format!("stia2({a},{b}) {} reads/{} cross", rec.accesses().len(), rec.cross_reads()));
    }
    for k in [3, 5] {
        let plan = plan_ria(k, tc, tfb).unwrap();
        let process = sample_network(NetworkConfig::symmetric(k, k, 1, 1, tc, tfb, SEED), plan.blocks_needed()).unwrap();
        let payload = RiaPayload::random(&mut ChaCha8Rng::seed_from_u64(SEED), k);
        let rec = RecordingProvider::new(&process);
        ok &= ria::run_ria_with(&plan, &process, &rec, &payload).is_ok();
        ok &= rec.cross_reads() == 0 && !rec.accesses().is_empty();
        parts.push(format!("ria({k}) {} reads/{} cross", rec.accesses().len(), rec.cross_reads()));
    }
    for (m, n) in [(2, 3), (3, 3), (2, 4)] {
        let cfg = misox_config(m, n).unwrap();
        let set = schedule_slot_sets(tc, tfb, cfg.scheme_length, 1, 1).unwrap().remove(0);
        let process = sample_network(NetworkConfig::symmetric(m, n, cfg.a, 1, tc, tfb, SEED), set.blocks.last().unwrap() + 1).unwrap();
        let payload = MisoxPayload::random(&mut ChaCha8Rng::seed_from_u64(SEED), &cfg);
        let rec = RecordingProvider::new(&process);
        ok &= misox::run_misox_with(&cfg, &process, &rec, &set, &payload).is_ok();
        ok &= rec.cross_reads() == 0 && !rec.accesses().is_empty();
        parts.push(format!("misox({m},{n}) {} reads/{} cross", rec.accesses().len(), rec.cross_reads()));
    }
    (ok, parts.join(", "))
}

fn main() {
    let criteria: [fn() -> (bool, String); 9] =
        [criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7, criterion8, criterion9];
    let mut unexpected = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let id = i as u32 + 1;
        let (passed, detail) = run();
        let expected_fail = EXPECTED_FAILURES.contains(&id);
        let note = if expected_fail { " [expected failure]" } else { "" };
        println!("{} criterion {id}: {detail}{note}", if passed { "PASS" } else { "FAIL" });
        if passed == expected_fail {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
