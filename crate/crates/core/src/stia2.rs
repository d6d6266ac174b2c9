//! Two-user MIMO X network with `A` transmit and `B` receive antennas per node,
//! run with space-time interference alignment over one slot set.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, sample_network, schedule_slot_sets, ChannelProcess, CsitProvider, NetworkConfig, SlotSet};
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, vec_sub, CMatrix, Tolerances};
use crate::precoding::czp_precoder;
use crate::scheme::{decode_system, local_view, random_symbols, DecodeReport, PrecoderRecord, SchemeKind, Transcript, TrialOutcome};

/// Stream index of the symbols meant for receiver 0 (the `u` vectors).
pub const STREAM_U: usize = 0;
/// Stream index of the symbols meant for receiver 1 (the `v` vectors).
pub const STREAM_V: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StiaCase {
    /// `B ≤ A`.
    Wide,
    /// `A < B < 2A`: the last `B − A` receive antennas are switched off.
    Tall,
    /// `B ≥ 2A`: no alignment needed.
    VeryTall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stia2Config {
    pub a: usize,
    pub b: usize,
    pub case: StiaCase,
    /// Scheme length `T_AB`.
    pub scheme_length: usize,
}

pub fn stia_case(a: usize, b: usize) -> Result<Stia2Config> {
    if a == 0 || b == 0 {
        return Err(Error::Config(format!("antenna counts must be positive, got A={a}, B={b}")));
    }
    let (case, scheme_length) = if b <= a {
        (StiaCase::Wide, 2 + (2 * a - b).div_ceil(b))
    } else if b < 2 * a {
        (StiaCase::Tall, 3)
    } else {
        (StiaCase::VeryTall, 1)
    };
    Ok(Stia2Config { a, b, case, scheme_length })
}

impl Stia2Config {
    /// Receive antennas the decoders use.
    pub fn active_rx_antennas(&self) -> usize {
        match self.case {
            StiaCase::Wide => self.b,
            StiaCase::Tall => self.a,
            StiaCase::VeryTall => 2 * self.a,
        }
    }

    /// Slots of one run. The very tall case serves the two receivers in two
    /// separate uncoded slots.
    pub fn slots_per_run(&self) -> usize {
        match self.case {
            StiaCase::VeryTall => 2,
            _ => self.scheme_length,
        }
    }

    pub fn symbols_per_run(&self) -> usize {
        4 * self.a
    }

    pub fn phase_one_len(&self) -> usize {
        2
    }
}

/// The four symbol vectors of one run: `u[i]` from transmitter `i` to
/// receiver 0, `v[i]` from transmitter `i` to receiver 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiaPayload {
    pub u: [Vec<Complex64>; 2],
    pub v: [Vec<Complex64>; 2],
}

impl StiaPayload {
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, a: usize) -> Self {
        let u = [random_symbols(rng, a), random_symbols(rng, a)];
        let v = [random_symbols(rng, a), random_symbols(rng, a)];
        StiaPayload { u, v }
    }

    pub fn zeros(a: usize) -> Self {
        let z = vec![Complex64::new(0.0, 0.0); a];
        StiaPayload {
            u: [z.clone(), z.clone()],
            v: [z.clone(), z],
        }
    }
}

fn check_setup(cfg: &Stia2Config, process: &ChannelProcess, slot_set: &SlotSet, payload: &StiaPayload) -> Result<()> {
    let net = process.config();
    if net.num_tx != 2 || net.num_rx != 2 {
        return Err(Error::Config(format!(
            "two-user scheme needs a 2x2 network, got {}x{}",
            net.num_tx, net.num_rx
        )));
    }
    if net.tx_antennas.iter().any(|&a| a != cfg.a) || net.rx_antennas.iter().any(|&b| b != cfg.b) {
        return Err(Error::Config(format!(
            "network antennas {:?}/{:?} do not match A={}, B={}",
            net.tx_antennas, net.rx_antennas, cfg.a, cfg.b
        )));
    }
    if slot_set.len() != cfg.slots_per_run() {
        return Err(Error::Scheduling(format!(
            "slot set has {} slots, the run needs {}",
            slot_set.len(),
            cfg.slots_per_run()
        )));
    }
    if cfg.case != StiaCase::VeryTall && slot_set.phase_one_len != cfg.phase_one_len() {
        return Err(Error::Scheduling(format!(
            "slot set has {} uncoded slots, the run needs {}",
            slot_set.phase_one_len,
            cfg.phase_one_len()
        )));
    }
    let all = payload.u.iter().chain(payload.v.iter());
    if all.clone().any(|s| s.len() != cfg.a) {
        return Err(Error::Dimension(format!("every payload vector must have length A={}", cfg.a)));
    }
    Ok(())
}

pub fn run_stia_two_user(
    cfg: &Stia2Config,
    process: &ChannelProcess,
    slot_set: &SlotSet,
    payload: &StiaPayload,
) -> Result<Transcript> {
    run_stia_two_user_with(cfg, process, process, slot_set, payload)
}

/// As [`run_stia_two_user`], with encoders served by `provider`.
pub fn run_stia_two_user_with(
    cfg: &Stia2Config,
    process: &ChannelProcess,
    provider: &dyn CsitProvider,
    slot_set: &SlotSet,
    payload: &StiaPayload,
) -> Result<Transcript> {
    check_setup(cfg, process, slot_set, payload)?;
    let slots = slot_set.slots.clone();
    let (t1, t2) = (slots[0], slots[1]);
    let mut tr = Transcript::new(SchemeKind::Stia2, slots.clone(), 2, 2);
    for i in 0..2 {
        tr.transmitted[0][i] = payload.u[i].clone();
        tr.transmitted[1][i] = payload.v[i].clone();
    }
    let rows = cfg.active_rx_antennas();
    for (pos, &n) in slots.iter().enumerate().skip(2) {
        for i in 0..2 {
            let view = local_view(provider, i, n)?;
            // V2 aligns the v-streams with what receiver 0 saw at t2.
            let h0_now = view.current_channel(0)?.top_rows(rows);
            let h0_t2 = view.channel(0, t2)?.top_rows(rows);
            let v2 = czp_precoder(&h0_now, &h0_t2)?.with_slots(t2, n);
            // V1 aligns the u-streams with what receiver 1 saw at t1.
            let h1_now = view.current_channel(1)?.top_rows(rows);
            let h1_t1 = view.channel(1, t1)?.top_rows(rows);
            let v1 = czp_precoder(&h1_now, &h1_t1)?.with_slots(t1, n);
            let x: Vec<Complex64> = v1
                .matrix
                .mul_vec(&payload.u[i])
                .into_iter()
                .zip(v2.matrix.mul_vec(&payload.v[i]))
                .map(|(a, b)| a + b)
                .collect();
            tr.transmitted[pos][i] = x;
            tr.precoders.push(PrecoderRecord { position: pos, tx: i, stream: STREAM_U, precoder: v1 });
            tr.precoders.push(PrecoderRecord { position: pos, tx: i, stream: STREAM_V, precoder: v2 });
        }
    }
    for pos in 0..slots.len() {
        tr.propagate(process, pos)?;
    }
    tr.truth = vec![
        [payload.u[0].as_slice(), payload.u[1].as_slice()].concat(),
        [payload.v[0].as_slice(), payload.v[1].as_slice()].concat(),
    ];
    Ok(tr)
}

pub fn decode_stia_receiver(
    cfg: &Stia2Config,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
) -> Result<DecodeReport> {
    decode_stia_receiver_with(cfg, transcript, process, receiver, &Tolerances::DEFAULT)
}

pub fn decode_stia_receiver_with(
    cfg: &Stia2Config,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
    tol: &Tolerances,
) -> Result<DecodeReport> {
    if receiver > 1 {
        return Err(Error::IndexOutOfRange { what: "receiver", index: receiver, limit: 2 });
    }
    let rows = cfg.active_rx_antennas();
    let slots = &transcript.slots;
    // Receiver 0 keeps t1 and cancels with t2; receiver 1 the other way round.
    let (keep, cancel, stream) = if receiver == 0 { (0, 1, STREAM_U) } else { (1, 0, STREAM_V) };
    let j = receiver;
    let h = |tx: usize, slot: u64| -> Result<CMatrix> { Ok(process.channel_at(tx, j, slot)?.top_rows(rows)) };

    let mut blocks = vec![CMatrix::hstack(&[h(0, slots[keep])?, h(1, slots[keep])?])?];
    let mut rhs = transcript.received[keep][j][..rows].to_vec();
    if cfg.case != StiaCase::VeryTall {
        for pos in 2..slots.len() {
            let n = slots[pos];
            let mut parts = Vec::with_capacity(2);
            for i in 0..2 {
                let v = transcript.require_precoder(pos, i, stream)?;
                parts.push(&h(i, n)? * &v.matrix);
            }
            blocks.push(CMatrix::hstack(&parts)?);
            rhs.extend(vec_sub(
                &transcript.received[pos][j][..rows],
                &transcript.received[cancel][j][..rows],
            ));
        }
    }
    let effective = CMatrix::vstack(&blocks)?;
    Ok(decode_system(receiver, effective, &rhs, &transcript.truth[receiver], tol))
}

/// Largest relative leakage of the unwanted streams after cancellation, over
/// every phase-two slot and both receivers.
pub fn stia_leakage(cfg: &Stia2Config, transcript: &Transcript, process: &ChannelProcess) -> Result<f64> {
    let rows = cfg.active_rx_antennas();
    let slots = &transcript.slots;
    let a = cfg.a;
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        // Unwanted symbols at receiver j and the slot they were first seen in.
        let (unwanted, stream, reference) = if j == 0 {
            (&transcript.truth[1], STREAM_V, 1)
        } else {
            (&transcript.truth[0], STREAM_U, 0)
        };
        for pos in 2..slots.len() {
            let mut now = vec![Complex64::new(0.0, 0.0); rows];
            let mut then = vec![Complex64::new(0.0, 0.0); rows];
            for i in 0..2 {
                let sym = &unwanted[i * a..(i + 1) * a];
                let v = transcript.require_precoder(pos, i, stream)?;
                let hn = process.channel_at(i, j, slots[pos])?.top_rows(rows);
                let ht = process.channel_at(i, j, slots[reference])?.top_rows(rows);
                for (acc, z) in now.iter_mut().zip((&hn * &v.matrix).mul_vec(sym)) {
                    *acc += z;
                }
                for (acc, z) in then.iter_mut().zip(ht.mul_vec(sym)) {
                    *acc += z;
                }
            }
            let scale = vec_norm(&then).max(f64::MIN_POSITIVE);
            worst = worst.max(vec_norm(&vec_sub(&now, &then)) / scale);
        }
    }
    Ok(worst)
}

/// Timing used by seeded trials when the caller does not override it.
pub const DEFAULT_TIMING: (u64, u64) = (8, 2);

/// One seeded trial: fresh channels, one slot set, random payload, both decoders.
pub fn stia_trial(cfg: &Stia2Config, timing: (u64, u64), base_seed: u64, trial: u64) -> Result<TrialOutcome> {
    let seed = derive_seed(base_seed, trial);
    let (tc, tfb) = timing;
    let net = NetworkConfig::symmetric(2, 2, cfg.a, cfg.b, tc, tfb, seed);
    let set = schedule_slot_sets(tc, tfb, cfg.slots_per_run(), 1, cfg.phase_one_len())?.remove(0);
    let process = sample_network(net, set.blocks.last().copied().unwrap_or(0) + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5E_ED0F_5A1D);
    let payload = StiaPayload::random(&mut rng, cfg.a);
    let tr = match run_stia_two_user(cfg, &process, &set, &payload) {
        Ok(tr) => tr,
        Err(e @ Error::DegenerateChannel(_)) => return Ok(TrialOutcome::degenerate(trial, seed, &e)),
        Err(e) => return Err(e),
    };
    let reports = (0..2)
        .map(|j| decode_stia_receiver(cfg, &tr, &process, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        trial,
        seed,
        symbols: tr.symbols_delivered(),
        slots: tr.slots_used(),
        reports,
        leakage: stia_leakage(cfg, &tr, &process)?,
        degenerate: None,
    })
}
