//! K-user SISO X network with retrospective interference alignment.
//!
//! Phase `j` (one per receiver) spends `K` slots on receiver `j`: transmitter
//! `j` sends `K` fresh symbols while every other transmitter repeats one symbol,
//! scaled so that it reappears at one unintended receiver exactly as in the
//! phase's first slot. A final phase exchanges the resulting side information
//! pairwise, one slot per unordered transmitter pair.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, sample_network, ChannelProcess, CsitProvider, LocalCsit, NetworkConfig, SlotSet};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Tolerances};
use crate::precoding::Precoder;
use crate::scheme::{decode_system, local_view, random_symbols, DecodeReport, PrecoderRecord, SchemeKind, Transcript, TrialOutcome};

/// One slot of the side-information exchange.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FinalSlot {
    pub slot: u64,
    /// Transmitter pair `(p, q)` with `p < q`.
    pub pair: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RiaPlan {
    pub k: usize,
    pub coherence: u64,
    pub feedback_delay: u64,
    /// `phase_slots[j]` holds the `K` slots of the phase dedicated to receiver `j`.
    pub phase_slots: Vec<Vec<u64>>,
    pub final_slots: Vec<FinalSlot>,
    pub total_symbols: usize,
    pub total_slots: usize,
}

/// Receivers other than `j`, ascending. In phase `j`, slot `m ≥ 2` aligns
/// at `others(k, j)[m − 2]`.
pub fn others(k: usize, j: usize) -> Vec<usize> {
    (0..k).filter(|&r| r != j).collect()
}

fn other_index(j: usize, r: usize) -> usize {
    if r < j {
        r
    } else {
        r - 1
    }
}

pub fn plan_ria(k: usize, coherence: u64, feedback_delay: u64) -> Result<RiaPlan> {
    if k < 2 {
        return Err(Error::Config(format!("RIA needs K ≥ 2 users, got {k}")));
    }
    if feedback_delay >= coherence {
        return Err(Error::Scheduling(format!(
            "feedback delay {feedback_delay} must be shorter than coherence time {coherence}"
        )));
    }
    let kk = k as u64;
    let phase_slots = (0..kk)
        .map(|j| {
            (0..kk)
                .map(|m| {
                    let offset = if m == 0 { 1 } else { feedback_delay + 1 };
                    (j * kk + m) * coherence + offset
                })
                .collect()
        })
        .collect();
    let pairs = (0..k).flat_map(|p| (p + 1..k).map(move |q| (p, q)));
    let final_slots = pairs
        .enumerate()
        .map(|(f, pair)| FinalSlot {
            slot: (kk * kk + f as u64) * coherence + feedback_delay + 1,
            pair,
        })
        .collect();
    let plan = RiaPlan {
        k,
        coherence,
        feedback_delay,
        phase_slots,
        final_slots,
        total_symbols: k * (2 * k - 1),
        total_slots: k * (3 * k - 1) / 2,
    };
    plan.validate()?;
    Ok(plan)
}

impl RiaPlan {
    /// Checks slot distinctness, per-phase block separation, current CSIT in
    /// slots `2..K` and that side information can be rebuilt in time.
    pub fn validate(&self) -> Result<()> {
        if self.phase_slots.len() != self.k || self.phase_slots.iter().any(|p| p.len() != self.k) {
            return Err(Error::Scheduling(format!("plan needs {} phases of {} slots", self.k, self.k)));
        }
        if self.final_slots.len() != self.k * (self.k - 1) / 2 {
            return Err(Error::Scheduling("one final slot per transmitter pair is required".into()));
        }
        for slots in &self.phase_slots {
            SlotSet::new(slots.clone(), self.coherence, self.feedback_delay, 1)?;
        }
        let all = self.all_slots();
        let mut sorted = all.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != all.len() {
            return Err(Error::Scheduling("plan reuses a slot".into()));
        }
        let last_phase = self.phase_slots.iter().flatten().copied().max().unwrap_or(0);
        if let Some(f) = self.final_slots.iter().find(|f| f.slot <= last_phase + self.feedback_delay) {
            return Err(Error::Scheduling(format!(
                "final slot {} precedes the feedback of the dedicated phases",
                f.slot
            )));
        }
        Ok(())
    }

    /// Phase slots in phase order, then final slots.
    pub fn all_slots(&self) -> Vec<u64> {
        self.phase_slots
            .iter()
            .flatten()
            .copied()
            .chain(self.final_slots.iter().map(|f| f.slot))
            .collect()
    }

    /// Blocks that must be materialized to run the plan.
    pub fn blocks_needed(&self) -> u64 {
        self.all_slots().iter().map(|&s| (s - 1) / self.coherence + 1).max().unwrap_or(0)
    }

    /// Reassigns the slot groups among phases: phase `j` takes the slots that
    /// phase `order[j]` had.
    pub fn permute_phases(&self, order: &[usize]) -> Result<RiaPlan> {
        let mut seen = vec![false; self.k];
        if order.len() != self.k || order.iter().any(|&o| o >= self.k || std::mem::replace(&mut seen[o], true)) {
            return Err(Error::Config(format!("{order:?} is not a permutation of 0..{}", self.k)));
        }
        let mut plan = self.clone();
        plan.phase_slots = order.iter().map(|&o| self.phase_slots[o].clone()).collect();
        plan.validate()?;
        Ok(plan)
    }

    pub fn final_slot_of(&self, p: usize, q: usize) -> Option<u64> {
        let pair = (p.min(q), p.max(q));
        self.final_slots.iter().find(|f| f.pair == pair).map(|f| f.slot)
    }
}

/// Symbols of phase `j`: `fresh` from transmitter `j`, and `others[i]` from
/// transmitter `others(K, j)[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiaPhasePayload {
    pub fresh: Vec<Complex64>,
    pub others: Vec<Complex64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiaPayload {
    pub phases: Vec<RiaPhasePayload>,
}

impl RiaPayload {
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, k: usize) -> Self {
        let phases = (0..k)
            .map(|_| RiaPhasePayload {
                fresh: random_symbols(rng, k),
                others: random_symbols(rng, k - 1),
            })
            .collect();
        RiaPayload { phases }
    }

    pub fn zeros(k: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        RiaPayload {
            phases: vec![RiaPhasePayload { fresh: vec![z; k], others: vec![z; k - 1] }; k],
        }
    }
}

/// One `h·s` product of a side-information value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfoTerm {
    pub slot: u64,
    pub channel: Complex64,
    pub symbol: Complex64,
}

/// `value = plus.channel·plus.symbol − minus.channel·minus.symbol`: what
/// receiver `blocked_rx` overheard of transmitter `origin_tx`'s fresh symbols
/// once the repeated symbols cancel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfo {
    pub value: Complex64,
    pub origin_tx: usize,
    pub blocked_rx: usize,
    pub plus: SideInfoTerm,
    pub minus: SideInfoTerm,
}

/// Transmitter-side versus receiver-side value of one side-information symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideInfoAudit {
    pub info: SideInfo,
    pub receiver_value: Complex64,
    pub abs_diff: f64,
}

/// Rebuilds the side information of transmitter `view.owner()` from its own
/// delayed CSI and its own fresh symbols.
pub fn reconstruct_side_info(view: &dyn LocalCsit, plan: &RiaPlan, fresh: &[Complex64]) -> Result<Vec<SideInfo>> {
    let p = view.owner();
    if p >= plan.k {
        return Err(Error::IndexOutOfRange { what: "transmitter", index: p, limit: plan.k });
    }
    if fresh.len() != plan.k {
        return Err(Error::Dimension(format!("expected {} fresh symbols, got {}", plan.k, fresh.len())));
    }
    let slots = &plan.phase_slots[p];
    others(plan.k, p)
        .into_iter()
        .enumerate()
        .map(|(idx, r)| {
            let m = idx + 1;
            let plus = SideInfoTerm { slot: slots[m], channel: view.channel(r, slots[m])?[(0, 0)], symbol: fresh[m] };
            let minus = SideInfoTerm { slot: slots[0], channel: view.channel(r, slots[0])?[(0, 0)], symbol: fresh[0] };
            Ok(SideInfo {
                value: plus.channel * plus.symbol - minus.channel * minus.symbol,
                origin_tx: p,
                blocked_rx: r,
                plus,
                minus,
            })
        })
        .collect()
}

fn check_setup(plan: &RiaPlan, process: &ChannelProcess, payload: &RiaPayload) -> Result<()> {
    let net = process.config();
    if net.num_tx != plan.k || net.num_rx != plan.k {
        return Err(Error::Config(format!("plan for K={} on a {}x{} network", plan.k, net.num_tx, net.num_rx)));
    }
    if net.tx_antennas.iter().chain(&net.rx_antennas).any(|&a| a != 1) {
        return Err(Error::Config("RIA runs on single-antenna nodes".into()));
    }
    if net.coherence != plan.coherence || net.feedback_delay != plan.feedback_delay {
        return Err(Error::Config("plan timing differs from the network timing".into()));
    }
    let ok = payload.phases.len() == plan.k
        && payload.phases.iter().all(|p| p.fresh.len() == plan.k && p.others.len() == plan.k - 1);
    if !ok {
        return Err(Error::Dimension(format!("payload does not fit K={}", plan.k)));
    }
    plan.validate()
}

pub fn run_ria(plan: &RiaPlan, process: &ChannelProcess, payload: &RiaPayload) -> Result<Transcript> {
    run_ria_with(plan, process, process, payload)
}

/// As [`run_ria`], with encoders served by `provider`.
pub fn run_ria_with(
    plan: &RiaPlan,
    process: &ChannelProcess,
    provider: &dyn CsitProvider,
    payload: &RiaPayload,
) -> Result<Transcript> {
    check_setup(plan, process, payload)?;
    let k = plan.k;
    let mut tr = Transcript::new(SchemeKind::Ria, plan.all_slots(), k, k);
    let one = |z: Complex64| vec![z];

    for j in 0..k {
        let slots = &plan.phase_slots[j];
        let ph = &payload.phases[j];
        let rxs = others(k, j);
        for m in 0..k {
            let pos = j * k + m;
            tr.transmitted[pos][j] = one(ph.fresh[m]);
            for (idx, &p) in rxs.iter().enumerate() {
                let sym = ph.others[idx];
                if m == 0 {
                    tr.transmitted[pos][p] = one(sym);
                    continue;
                }
                let target_rx = rxs[m - 1];
                let view = local_view(provider, p, slots[m])?;
                let ratio = view.current_ratio(target_rx, slots[0])?;
                tr.transmitted[pos][p] = one(ratio * sym);
                let precoder = Precoder {
                    matrix: CMatrix::diag(&[ratio]),
                    pattern: None,
                    source_slots: Some((slots[0], slots[m])),
                };
                tr.precoders.push(PrecoderRecord { position: pos, tx: p, stream: j, precoder });
            }
        }
    }

    let mut sent = Vec::new();
    for (f, fs) in plan.final_slots.iter().enumerate() {
        let pos = k * k + f;
        let (p, q) = fs.pair;
        for (tx, blocked) in [(p, q), (q, p)] {
            let view = local_view(provider, tx, fs.slot)?;
            let info = reconstruct_side_info(view.as_ref(), plan, &payload.phases[tx].fresh)?
                .into_iter()
                .find(|s| s.blocked_rx == blocked)
                .expect("every other receiver has side information");
            tr.transmitted[pos][tx] = one(info.value);
            sent.push(info);
        }
    }

    for pos in 0..tr.slots.len() {
        tr.propagate(process, pos)?;
    }

    tr.side_info = sent
        .into_iter()
        .map(|info| {
            let rv = receiver_side_info(&tr, plan, info.origin_tx, info.blocked_rx);
            SideInfoAudit { info, receiver_value: rv, abs_diff: (rv - info.value).norm() }
        })
        .collect();

    tr.truth = payload
        .phases
        .iter()
        .map(|ph| [ph.fresh.as_slice(), ph.others.as_slice()].concat())
        .collect();
    Ok(tr)
}

/// `y^{[r]}(t_m) − y^{[r]}(t_1)` in phase `j`, where slot `m` aligns at `r`.
fn receiver_side_info(tr: &Transcript, plan: &RiaPlan, j: usize, r: usize) -> Complex64 {
    let m = other_index(j, r) + 1;
    let base = j * plan.k;
    tr.received[base + m][r][0] - tr.received[base][r][0]
}

pub fn decode_ria_receiver(
    plan: &RiaPlan,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
) -> Result<DecodeReport> {
    decode_ria_receiver_with(plan, transcript, process, receiver, &Tolerances::DEFAULT)
}

pub fn decode_ria_receiver_with(
    plan: &RiaPlan,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
    tol: &Tolerances,
) -> Result<DecodeReport> {
    let k = plan.k;
    let p = receiver;
    if p >= k {
        return Err(Error::IndexOutOfRange { what: "receiver", index: p, limit: k });
    }
    let h = |tx: usize, rx: usize, slot: u64| -> Result<Complex64> { Ok(process.channel_at(tx, rx, slot)?[(0, 0)]) };
    let n = 2 * k - 1;
    let mut a = CMatrix::zeros(n, n);
    let mut rhs = Vec::with_capacity(n);
    let slots = &plan.phase_slots[p];
    let rxs = others(k, p);

    for m in 0..k {
        let pos = p * k + m;
        a[(m, m)] = h(p, p, slots[m])?;
        for (idx, &q) in rxs.iter().enumerate() {
            let mut coeff = h(q, p, slots[m])?;
            if m > 0 {
                coeff *= transcript.require_precoder(pos, q, p)?.matrix[(0, 0)];
            }
            a[(m, k + idx)] = coeff;
        }
        rhs.push(transcript.received[pos][p][0]);
    }

    for (idx, &r) in rxs.iter().enumerate() {
        let row = k + idx;
        let f = plan
            .final_slot_of(p, r)
            .ok_or_else(|| Error::Scheduling(format!("no final slot for pair ({p},{r})")))?;
        let fpos = transcript
            .position_of(f)
            .ok_or_else(|| Error::Dimension(format!("final slot {f} missing from transcript")))?;
        // Strip what this receiver already knows, then undo the direct link.
        let known = receiver_side_info(transcript, plan, r, p);
        let y = transcript.received[fpos][p][0];
        let wanted = (y - h(r, p, f)? * known) / h(p, p, f)?;
        let m = idx + 1;
        a[(row, 0)] = -h(p, r, slots[0])?;
        a[(row, m)] += h(p, r, slots[m])?;
        rhs.push(wanted);
    }
    Ok(decode_system(p, a, &rhs, &transcript.truth[p], tol))
}

/// Largest coefficient left on a repeated symbol after an unintended receiver
/// subtracts the phase's first slot.
pub fn ria_leakage(plan: &RiaPlan, transcript: &Transcript, process: &ChannelProcess) -> Result<f64> {
    let k = plan.k;
    let mut worst: f64 = 0.0;
    for j in 0..k {
        let slots = &plan.phase_slots[j];
        let rxs = others(k, j);
        for m in 1..k {
            let r = rxs[m - 1];
            for &q in &rxs {
                let ratio = transcript.require_precoder(j * k + m, q, j)?.matrix[(0, 0)];
                let now = process.channel_at(q, r, slots[m])?[(0, 0)];
                let then = process.channel_at(q, r, slots[0])?[(0, 0)];
                worst = worst.max((now * ratio - then).norm());
            }
        }
    }
    Ok(worst)
}

/// Largest side-information mismatch between transmitters and receivers.
pub fn side_info_mismatch(transcript: &Transcript) -> f64 {
    transcript.side_info.iter().map(|a| a.abs_diff).fold(0.0, f64::max)
}

pub const DEFAULT_TIMING: (u64, u64) = (8, 2);

pub fn ria_trial(k: usize, timing: (u64, u64), base_seed: u64, trial: u64) -> Result<TrialOutcome> {
    let plan = plan_ria(k, timing.0, timing.1)?;
    ria_trial_with_plan(&plan, base_seed, trial)
}

pub fn ria_trial_with_plan(plan: &RiaPlan, base_seed: u64, trial: u64) -> Result<TrialOutcome> {
    let seed = derive_seed(base_seed, trial);
    let net = NetworkConfig::symmetric(plan.k, plan.k, 1, 1, plan.coherence, plan.feedback_delay, seed);
    let process = sample_network(net, plan.blocks_needed())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5E_ED0F_5A1D);
    let payload = RiaPayload::random(&mut rng, plan.k);
    let tr = match run_ria(plan, &process, &payload) {
        Ok(tr) => tr,
        Err(e @ Error::DegenerateChannel(_)) => return Ok(TrialOutcome::degenerate(trial, seed, &e)),
        Err(e) => return Err(e),
    };
    let reports = (0..plan.k)
        .map(|j| decode_ria_receiver(plan, &tr, &process, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        trial,
        seed,
        symbols: tr.symbols_delivered(),
        slots: tr.slots_used(),
        reports,
        leakage: ria_leakage(plan, &tr, &process)?,
        degenerate: None,
    })
}
