//! Seeded invariant suites, one per module, runnable by name.

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, sample_network, schedule_slot_sets, NetworkConfig};
use crate::dof::{self, Piecewise};
use crate::error::{Error, Result};
use crate::linalg::{det, rank_tol, solve_square, CMatrix};
use crate::misox::{self, misox_config};
use crate::precoding::{czp_pattern, czp_precoder, misox_precoder, ZeroPattern};
use crate::ria::{self, plan_ria};
use crate::scheme::TrialOutcome;
use crate::stia2::{self, stia_case, StiaCase};

pub const SUITES: &[&str] = &["linalg", "channel", "precoding", "stia2", "ria", "misox", "dof"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Overrides every Monte Carlo trial count when set.
    pub trials: Option<usize>,
    /// Swaps in a deliberately wrong zero pattern to prove the pattern check bites.
    pub canary: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0x00C0_FFEE, trials: None, canary: false }
    }
}

impl VerifyOptions {
    fn trials(&self, default: usize) -> usize {
        self.trials.unwrap_or(default).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite<'a> {
    name: &'a str,
    checks: Vec<Check>,
}

impl Suite<'_> {
    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            suite: self.name.to_string(),
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

/// Runs the named suites, or all of them when `selected` is empty.
pub fn run(selected: &[String], opts: &VerifyOptions) -> Result<VerifyReport> {
    let names: Vec<&str> = if selected.is_empty() {
        SUITES.to_vec()
    } else {
        selected.iter().map(String::as_str).collect()
    };
    let mut checks = Vec::new();
    for name in names {
        checks.extend(run_suite(name, opts)?);
    }
    Ok(VerifyReport { checks })
}

pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<Check>> {
    let Some(&name) = SUITES.iter().find(|&&s| s == name) else {
        return Err(Error::Config(format!("unknown suite {name:?}; known: {}", SUITES.join(", "))));
    };
    let mut s = Suite { name, checks: Vec::new() };
    match name {
        "linalg" => linalg_suite(&mut s, opts),
        "channel" => channel_suite(&mut s, opts)?,
        "precoding" => precoding_suite(&mut s, opts),
        "stia2" => stia2_suite(&mut s, opts)?,
        "ria" => ria_suite(&mut s, opts)?,
        "misox" => misox_suite(&mut s, opts)?,
        "dof" => dof_suite(&mut s)?,
        _ => unreachable!(),
    }
    Ok(s.checks)
}

fn gaussian(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

fn linalg_suite(s: &mut Suite, opts: &VerifyOptions) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let n = opts.trials(1000);
    let mut worst: f64 = 0.0;
    for t in 0..n {
        let size = 1 + t % 16;
        let a = &gaussian(&mut rng, size, size) + &CMatrix::identity(size).scale(Complex64::new(size as f64, 0.0));
        let b = gaussian(&mut rng, size, 1);
        match solve_square(&a, &b) {
            Ok(x) => {
                let r = (&(&a * &x) - &b).frobenius_norm() / b.frobenius_norm().max(f64::MIN_POSITIVE);
                worst = worst.max(r);
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    s.check("solve_residual", worst <= 1e-10, format!("{n} solves, worst relative residual {worst:.3e}"));

    let mut worst: f64 = 0.0;
    for t in 0..opts.trials(200) {
        let size = 2 + t % 7;
        let (a, b) = (gaussian(&mut rng, size, size), gaussian(&mut rng, size, size));
        let lhs = det(&(&a * &b)).unwrap_or_default();
        let rhs = det(&a).unwrap_or_default() * det(&b).unwrap_or_default();
        worst = worst.max((lhs - rhs).norm() / rhs.norm().max(f64::MIN_POSITIVE));
    }
    s.check("det_multiplicative", worst <= 1e-8, format!("worst relative gap {worst:.3e}"));

    let mut ok = true;
    for t in 0..opts.trials(200) {
        let (r, c, k) = (1 + t % 6, 1 + (t / 6) % 6, 1 + t % 4);
        let m = &gaussian(&mut rng, r, k) * &gaussian(&mut rng, k, c);
        ok &= rank_tol(&m, 1e-9) == rank_tol(&m.transpose(), 1e-9);
    }
    s.check("rank_transpose", ok, "rank(A) == rank(A^T) on random low-rank products");
}

fn channel_suite(s: &mut Suite, opts: &VerifyOptions) -> Result<()> {
    let cfg = NetworkConfig::symmetric(2, 2, 3, 2, 5, 2, opts.seed);
    let (lo, hi) = cfg.magnitude_bounds;
    let p = sample_network(cfg.clone(), 200)?;
    let inside = p.blocks().iter().flatten().all(|h| h.as_slice().iter().all(|z| z.norm() >= lo && z.norm() <= hi));
    s.check("magnitude_bounds", inside, format!("all coefficients of 200 blocks in [{lo}, {hi}]"));

    let sets = schedule_slot_sets(5, 2, 5, 3, 2)?;
    let got: Vec<Vec<u64>> = sets.iter().map(|x| x.slots.clone()).collect();
    let want = vec![vec![1, 6, 13, 18, 23], vec![2, 7, 14, 19, 24], vec![3, 8, 15, 20, 25]];
    s.check("staggered_schedule", got == want, format!("{got:?}"));

    let mut lazy = sample_network(cfg.clone(), 3)?;
    lazy.extend_to(50);
    s.check("lazy_extension", lazy == sample_network(cfg, 50)?, "lazily extended blocks equal eager sampling");

    let view = p.csit_view(0, 20)?;
    let future = crate::channel::LocalCsit::channel(&view, 0, 19).is_err();
    let past = crate::channel::LocalCsit::channel(&view, 1, 18).is_ok();
    let own_only = view.entries().keys().all(|&(rx, slot)| rx < 2 && slot <= 18);
    s.check("view_causality", future && past && own_only, "views expose slots up to now - T_fb only");
    Ok(())
}

/// A pattern whose band shifts the wrong way; the pattern check must reject it.
fn corrupted_pattern(size: usize, band: usize) -> ZeroPattern {
    let columns = (0..size).map(|j| {
        let mut rows: Vec<usize> = (0..band).map(|r| (r + j) % size).collect();
        rows.sort_unstable();
        rows
    });
    ZeroPattern { size, band, columns: columns.collect() }
}

/// Closed-form row sets of each pattern column (0-based).
fn band_index_rows(size: usize, band: usize, j: usize) -> Vec<usize> {
    let j1 = j + 1;
    let mut rows: Vec<usize> = if j1 <= band + 1 {
        (1..=band + 1 - j1).chain(size + 2 - j1..=size).map(|i| i - 1).collect()
    } else {
        (size + 2 - j1..=size + 1 + band - j1).map(|i| i - 1).collect()
    };
    rows.sort_unstable();
    rows
}

fn precoding_suite(s: &mut Suite, opts: &VerifyOptions) {
    let mut ok = true;
    let mut first_bad = String::new();
    for size in 1..=12 {
        for band in 1..=size {
            let pattern = if opts.canary && band < size {
                corrupted_pattern(size, band)
            } else {
                czp_pattern(size, band).expect("valid dimensions")
            };
            for (j, rows) in pattern.columns.iter().enumerate() {
                let good = rows.len() == band && *rows == band_index_rows(size, band, j);
                if !good && ok {
                    first_bad = format!("A={size}, B={band}, column {j}: {rows:?}");
                }
                ok &= good;
            }
        }
    }
    s.check("pattern_exact", ok, if ok { "all 1 <= B <= A <= 12".to_string() } else { first_bad });

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 1);
    for (a, b) in [(3, 2), (5, 2), (5, 3), (7, 3)] {
        let n = opts.trials(1000);
        let (mut worst, mut full, mut admitted) = (0.0f64, 0, 0);
        for _ in 0..n {
            let (h_now, h_t) = (gaussian(&mut rng, b, a), gaussian(&mut rng, b, a));
            if let Ok(v) = czp_precoder(&h_now, &h_t) {
                worst = worst.max(v.alignment_residual(&h_now, &h_t));
                full += usize::from(rank_tol(&v.matrix, 1e-9) == a);
                admitted += usize::from(v.pattern.as_ref().is_some_and(|p| p.admits(&v.matrix)));
            }
        }
        let pass = worst <= 1e-9 && full == n && admitted == n;
        s.check(
            &format!("full_rank_{a}x{b}"),
            pass,
            format!("{full}/{n} full rank, {admitted}/{n} in pattern, worst residual {worst:.3e}"),
        );
    }

    let (h_now, h_t) = (gaussian(&mut rng, 1, 2), gaussian(&mut rng, 1, 2));
    let v = czp_precoder(&h_now, &h_t).expect("generic");
    let zero = Complex64::new(0.0, 0.0);
    let diag = v.matrix[(0, 1)] == zero
        && v.matrix[(1, 0)] == zero
        && (0..2).all(|i| (v.matrix[(i, i)] - h_t[(0, i)] / h_now[(0, i)]).norm() <= 1e-12);
    s.check("single_row_diagonal", diag, "A = 2, B = 1 precoders equal diag(h_target / h_now)");

    let mut monomial = true;
    for a in 3..=8 {
        let (h_now, h_t) = (gaussian(&mut rng, 1, a), gaussian(&mut rng, 1, a));
        let v = czp_precoder(&h_now, &h_t).expect("generic");
        for j in 0..a {
            let nz: Vec<usize> = (0..a).filter(|&i| v.matrix[(i, j)] != zero).collect();
            monomial &= nz.len() == 1 && (h_now[(0, nz[0])] * v.matrix[(nz[0], j)] - h_t[(0, j)]).norm() <= 1e-12;
        }
    }
    s.check("single_row_monomial", monomial, "B = 1 precoders have one ratio entry per column for A = 3..8");

    let mut worst: f64 = 0.0;
    for n_rx in 3..=5 {
        let a = n_rx - 1;
        let (now, t1) = (gaussian(&mut rng, a, a), gaussian(&mut rng, a, a));
        let v = misox_precoder(&now, &t1).expect("generic");
        for r in 0..a {
            let lhs = &now.select_rows(&[r]) * &v.matrix;
            worst = worst.max((&lhs - &t1.select_rows(&[r])).max_abs());
        }
    }
    s.check("misox_rows", worst <= 1e-9, format!("worst row mismatch {worst:.3e}"));
}

fn summarize(outcomes: &[TrialOutcome]) -> (usize, usize, f64, f64) {
    let ok = outcomes.iter().filter(|o| o.success()).count();
    let degenerate = outcomes.iter().filter(|o| o.degenerate.is_some()).count();
    let residual = outcomes.iter().map(TrialOutcome::max_residual).fold(0.0, f64::max);
    let leakage = outcomes.iter().map(|o| o.leakage).fold(0.0, f64::max);
    (ok, degenerate, residual, leakage)
}

fn stia2_suite(s: &mut Suite, opts: &VerifyOptions) -> Result<()> {
    for (a, b) in [(2, 1), (3, 2), (5, 2), (5, 3), (4, 4), (3, 5)] {
        let cfg = stia_case(a, b)?;
        let n = opts.trials(500);
        let outs = (0..n as u64)
            .map(|t| stia2::stia_trial(&cfg, stia2::DEFAULT_TIMING, opts.seed, t))
            .collect::<Result<Vec<_>>>()?;
        let (ok, degenerate, residual, leakage) = summarize(&outs);
        s.check(
            &format!("decode_{a}x{b}"),
            ok == n && degenerate == 0 && residual <= 1e-8,
            format!("{ok}/{n} decoded, {degenerate} degenerate, max residual {residual:.3e}"),
        );
        s.check(&format!("leakage_{a}x{b}"), leakage <= 1e-9, format!("max leakage {leakage:.3e}"));
        let ratio = Rational64::new(outs[0].symbols as i64, cfg.scheme_length as i64);
        let plateau = dof::theorem1_region(a, b, Rational64::from_integer(0))?.dof;
        let per_slot = match cfg.case {
            StiaCase::VeryTall => Rational64::new(outs[0].symbols as i64, outs[0].slots as i64) == plateau,
            _ => outs[0].slots == cfg.scheme_length,
        };
        s.check(
            &format!("counting_{a}x{b}"),
            ratio == plateau || (cfg.case == StiaCase::VeryTall && per_slot),
            format!("{} symbols over {} slots, plateau {plateau}", outs[0].symbols, outs[0].slots),
        );
    }
    Ok(())
}

fn ria_suite(s: &mut Suite, opts: &VerifyOptions) -> Result<()> {
    for k in 2..=5 {
        let n = opts.trials(300);
        let plan = plan_ria(k, ria::DEFAULT_TIMING.0, ria::DEFAULT_TIMING.1)?;
        let mut side: f64 = 0.0;
        let mut outs = Vec::with_capacity(n);
        for t in 0..n as u64 {
            let seed = derive_seed(opts.seed, t);
            let net = NetworkConfig::symmetric(k, k, 1, 1, plan.coherence, plan.feedback_delay, seed);
            let process = sample_network(net, plan.blocks_needed())?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let tr = ria::run_ria(&plan, &process, &ria::RiaPayload::random(&mut rng, k))?;
            side = side.max(ria::side_info_mismatch(&tr));
            outs.push(ria::ria_trial_with_plan(&plan, opts.seed, t)?);
        }
        let (ok, degenerate, residual, leakage) = summarize(&outs);
        s.check(
            &format!("decode_k{k}"),
            ok == n && degenerate == 0,
            format!("{ok}/{n} decoded, max residual {residual:.3e}"),
        );
        s.check(&format!("side_info_k{k}"), side <= 1e-12, format!("max mismatch {side:.3e}"));
        s.check(&format!("leakage_k{k}"), leakage <= 1e-9, format!("max leftover coefficient {leakage:.3e}"));
        let ratio = Rational64::new(outs[0].symbols as i64, outs[0].slots as i64);
        let plateau = dof::theorem2_region(k, Rational64::from_integer(0))?.dof;
        s.check(&format!("counting_k{k}"), ratio == plateau, format!("{ratio} vs plateau {plateau}"));
    }

    let plan = plan_ria(3, 8, 2)?;
    let permuted = plan.permute_phases(&[1, 2, 0])?;
    let mut same = true;
    for t in 0..opts.trials(50) as u64 {
        let a = ria::ria_trial_with_plan(&plan, opts.seed, t)?;
        let b = ria::ria_trial_with_plan(&permuted, opts.seed, t)?;
        let flags = |o: &TrialOutcome| o.reports.iter().map(|r| r.success).collect::<Vec<_>>();
        same &= flags(&a) == flags(&b);
    }
    s.check("phase_permutation", same, "success flags unchanged when phases swap blocks");
    Ok(())
}

fn misox_suite(s: &mut Suite, opts: &VerifyOptions) -> Result<()> {
    for (m, n_rx) in [(2, 3), (3, 3), (2, 4), (3, 4)] {
        let cfg = misox_config(m, n_rx)?;
        let n = opts.trials(300);
        let outs = (0..n as u64)
            .map(|t| misox::misox_trial(&cfg, misox::DEFAULT_TIMING, opts.seed, t))
            .collect::<Result<Vec<_>>>()?;
        let (ok, degenerate, residual, leakage) = summarize(&outs);
        s.check(
            &format!("decode_{m}x{n_rx}"),
            ok == n && degenerate == 0 && residual <= 1e-8,
            format!("{ok}/{n} decoded, max residual {residual:.3e}"),
        );
        s.check(&format!("leakage_{m}x{n_rx}"), leakage <= 1e-9, format!("max leakage {leakage:.3e}"));
        let ratio = Rational64::new(outs[0].symbols as i64, outs[0].slots as i64);
        let plateau = dof::theorem3_region(m, n_rx, Rational64::from_integer(0))?.dof;
        s.check(&format!("counting_{m}x{n_rx}"), ratio == plateau, format!("{ratio} vs plateau {plateau}"));
    }
    Ok(())
}

/// Whether the line meets the plateau at the knee and the saturation at 1.
pub fn is_continuous(p: &Piecewise) -> bool {
    p.slope * p.knee + p.intercept == p.plateau && p.slope + p.intercept == p.saturation
}

/// Whether the region never increases in λ.
pub fn is_non_increasing(p: &Piecewise) -> bool {
    p.plateau >= p.saturation && p.slope <= Rational64::from_integer(0)
}

/// Two-user configurations whose region rises with λ: `A < B < 2A` and `3B > 4A`,
/// where the saturated value `B` exceeds the plateau `4A/3`.
pub fn theorem1_rises(a: usize, b: usize) -> bool {
    a < b && b < 2 * a && 3 * b > 4 * a
}

fn dof_suite(s: &mut Suite) -> Result<()> {
    let mut regions = Vec::new();
    for a in 1..=12 {
        for b in 1..=12 {
            regions.push((format!("theorem1({a},{b})"), dof::theorem1_pieces(a, b)?, theorem1_rises(a, b)));
            if 2 * b <= a {
                regions.push((format!("corollary1({a},{b})"), dof::corollary1_pieces(a, b)?, false));
            }
        }
    }
    for k in 2..=12 {
        regions.push((format!("theorem2({k})"), dof::theorem2_pieces(k)?, false));
    }
    for m in 1..=6 {
        for n in 3..=8 {
            regions.push((format!("theorem3({m},{n})"), dof::theorem3_pieces(m, n)?, false));
        }
    }
    // Flat regions (B ≥ 2A) have no middle segment to check.
    let flat = |p: &Piecewise| p.slope == Rational64::from_integer(0) && p.plateau == p.saturation;
    let broken: Vec<&str> = regions
        .iter()
        .filter(|(_, p, _)| !flat(p) && !is_continuous(p))
        .map(|(n, _, _)| n.as_str())
        .collect();
    s.check("continuity", broken.is_empty(), format!("{} regions, discontinuous: {broken:?}", regions.len()));

    let rising: Vec<&str> = regions
        .iter()
        .filter(|(_, p, exempt)| !exempt && !is_non_increasing(p))
        .map(|(n, _, _)| n.as_str())
        .collect();
    s.check("monotonicity", rising.is_empty(), format!("increasing: {rising:?}"));
    let exempt_rise = regions
        .iter()
        .filter(|(_, _, exempt)| *exempt)
        .all(|(_, p, _)| p.saturation > p.plateau);
    s.check(
        "theorem1_tall_rise",
        exempt_rise,
        "for A < B < 2A with 3B > 4A the region rises from 4A/3 to B",
    );

    let mut dominance = true;
    for b in 1..=4 {
        for a in 2 * b..=6 * b {
            let r = dof::table1_row(a, b)?;
            dominance &= r.stia >= r.gak && r.gak >= r.vv;
        }
    }
    s.check("table_dominance", dominance, "stia >= gak >= vv for 2B <= A, B <= 4, A <= 6B");

    let ns = [1u64, 10, 1_000, 1_000_000];
    let mut conv = true;
    for (a, b) in [(2, 1), (3, 2), (5, 2), (5, 3), (4, 4), (3, 4)] {
        let plateau = dof::theorem1_region(a, b, Rational64::from_integer(0))?.dof;
        let vals: Vec<Rational64> = ns.iter().map(|&n| dof::asymptotic_dof_t1(a, b, n)).collect();
        conv &= converges(&vals, plateau);
    }
    for (m, n_rx) in [(2, 3), (3, 3), (2, 4), (3, 4)] {
        let plateau = dof::theorem3_region(m, n_rx, Rational64::from_integer(0))?.dof;
        let vals: Vec<Rational64> = ns.iter().map(|&n| dof::asymptotic_dof_t3(m, n_rx, n)).collect();
        conv &= converges(&vals, plateau);
    }
    s.check("asymptotic_convergence", conv, "finite-n rates approach the plateaus monotonically");
    Ok(())
}

/// Distances to `limit` shrink strictly and end below `1e−4`.
pub fn converges(values: &[Rational64], limit: Rational64) -> bool {
    let gaps: Vec<Rational64> = values.iter().map(|&v| (v - limit).abs()).collect();
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0] || w[0] == Rational64::from_integer(0));
    let last = gaps.last().copied().unwrap_or_default();
    shrinking && last < Rational64::new(1, 10_000)
}
