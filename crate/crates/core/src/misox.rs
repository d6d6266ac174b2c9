//! `M×N` MISO X network: `M` transmitters with `N − 1` antennas each, `N`
//! single-antenna receivers, one slot set of length `M(N − 1) + 1`.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{derive_seed, sample_network, schedule_slot_sets, ChannelProcess, CsitProvider, NetworkConfig, SlotSet};
use crate::dof::asymptotic_dof_t3;
use crate::error::{Error, Result};
use crate::linalg::{vec_norm, CMatrix, Tolerances};
use crate::precoding::misox_precoder;
use crate::scheme::{decode_system, local_view, random_symbols, DecodeReport, PrecoderRecord, SchemeKind, Transcript, TrialOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MisoxConfig {
    pub m: usize,
    pub n: usize,
    /// Antennas per transmitter, `N − 1`.
    pub a: usize,
    /// Slots per run, `M·A + 1`.
    pub scheme_length: usize,
}

pub fn misox_config(m: usize, n: usize) -> Result<MisoxConfig> {
    if m == 0 {
        return Err(Error::Config("at least one transmitter is needed".into()));
    }
    if n < 3 {
        return Err(Error::Unsupported(format!(
            "MISO X scheme needs N ≥ 3 receivers, got {n}; use the two-user scheme for N = 2"
        )));
    }
    let a = n - 1;
    Ok(MisoxConfig { m, n, a, scheme_length: m * a + 1 })
}

impl MisoxConfig {
    pub fn symbols_per_run(&self) -> usize {
        self.m * self.n * self.a
    }

    pub fn exact_ratio(&self) -> Rational64 {
        Rational64::new(self.symbols_per_run() as i64, self.scheme_length as i64)
    }

    /// Rate when `sets` slot sets share `T` blocks and the leftover slots of
    /// those blocks carry one symbol each.
    pub fn filled_ratio(&self, sets: u64) -> Rational64 {
        asymptotic_dof_t3(self.m, self.n, sets)
    }
}

/// `streams[j][i]`: the `A` symbols transmitter `i` sends to receiver `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MisoxPayload {
    pub streams: Vec<Vec<Vec<Complex64>>>,
}

impl MisoxPayload {
    pub fn random<R: rand::Rng + ?Sized>(rng: &mut R, cfg: &MisoxConfig) -> Self {
        let streams = (0..cfg.n)
            .map(|_| (0..cfg.m).map(|_| random_symbols(rng, cfg.a)).collect())
            .collect();
        MisoxPayload { streams }
    }

    pub fn zeros(cfg: &MisoxConfig) -> Self {
        MisoxPayload {
            streams: vec![vec![vec![Complex64::new(0.0, 0.0); cfg.a]; cfg.m]; cfg.n],
        }
    }
}

fn check_setup(cfg: &MisoxConfig, process: &ChannelProcess, slot_set: &SlotSet, payload: &MisoxPayload) -> Result<()> {
    let net = process.config();
    if net.num_tx != cfg.m || net.num_rx != cfg.n {
        return Err(Error::Config(format!(
            "config {}x{} on a {}x{} network",
            cfg.m, cfg.n, net.num_tx, net.num_rx
        )));
    }
    if net.tx_antennas.iter().any(|&a| a != cfg.a) || net.rx_antennas.iter().any(|&b| b != 1) {
        return Err(Error::Config(format!("transmitters need {} antennas and receivers one", cfg.a)));
    }
    if slot_set.len() != cfg.scheme_length || slot_set.phase_one_len != 1 {
        return Err(Error::Scheduling(format!(
            "slot set must have {} slots with one uncoded slot",
            cfg.scheme_length
        )));
    }
    let ok = payload.streams.len() == cfg.n
        && payload.streams.iter().all(|r| r.len() == cfg.m && r.iter().all(|s| s.len() == cfg.a));
    if !ok {
        return Err(Error::Dimension("payload does not fit the configuration".into()));
    }
    Ok(())
}

pub fn run_misox(cfg: &MisoxConfig, process: &ChannelProcess, slot_set: &SlotSet, payload: &MisoxPayload) -> Result<Transcript> {
    run_misox_with(cfg, process, process, slot_set, payload)
}

/// As [`run_misox`], with encoders served by `provider`.
pub fn run_misox_with(
    cfg: &MisoxConfig,
    process: &ChannelProcess,
    provider: &dyn CsitProvider,
    slot_set: &SlotSet,
    payload: &MisoxPayload,
) -> Result<Transcript> {
    check_setup(cfg, process, slot_set, payload)?;
    let slots = slot_set.slots.clone();
    let t1 = slots[0];
    let mut tr = Transcript::new(SchemeKind::Misox, slots.clone(), cfg.m, cfg.n);
    let zero = vec![Complex64::new(0.0, 0.0); cfg.a];

    for i in 0..cfg.m {
        let mut x = zero.clone();
        for j in 0..cfg.n {
            for (acc, s) in x.iter_mut().zip(&payload.streams[j][i]) {
                *acc += s;
            }
        }
        tr.transmitted[0][i] = x;
    }

    for (pos, &n) in slots.iter().enumerate().skip(1) {
        for i in 0..cfg.m {
            let view = local_view(provider, i, n)?;
            let now: Vec<CMatrix> = (0..cfg.n).map(|j| view.current_channel(j)).collect::<Result<_>>()?;
            let then: Vec<CMatrix> = (0..cfg.n).map(|j| view.channel(j, t1)).collect::<Result<_>>()?;
            let mut x = zero.clone();
            for k in 0..cfg.n {
                let keep: Vec<CMatrix> = (0..cfg.n).filter(|&j| j != k).map(|j| now[j].clone()).collect();
                let keep_t1: Vec<CMatrix> = (0..cfg.n).filter(|&j| j != k).map(|j| then[j].clone()).collect();
                let v = misox_precoder(&CMatrix::vstack(&keep)?, &CMatrix::vstack(&keep_t1)?)?.with_slots(t1, n);
                for (acc, z) in x.iter_mut().zip(v.matrix.mul_vec(&payload.streams[k][i])) {
                    *acc += z;
                }
                tr.precoders.push(PrecoderRecord { position: pos, tx: i, stream: k, precoder: v });
            }
            tr.transmitted[pos][i] = x;
        }
    }

    for pos in 0..slots.len() {
        tr.propagate(process, pos)?;
    }
    tr.truth = payload.streams.iter().map(|r| r.concat()).collect();
    Ok(tr)
}

pub fn decode_misox_receiver(
    cfg: &MisoxConfig,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
) -> Result<DecodeReport> {
    decode_misox_receiver_with(cfg, transcript, process, receiver, &Tolerances::DEFAULT)
}

pub fn decode_misox_receiver_with(
    cfg: &MisoxConfig,
    transcript: &Transcript,
    process: &ChannelProcess,
    receiver: usize,
    tol: &Tolerances,
) -> Result<DecodeReport> {
    let j = receiver;
    if j >= cfg.n {
        return Err(Error::IndexOutOfRange { what: "receiver", index: j, limit: cfg.n });
    }
    let slots = &transcript.slots;
    let t1 = slots[0];
    let mut rows = Vec::with_capacity(slots.len() - 1);
    let mut rhs = Vec::with_capacity(slots.len() - 1);
    for pos in 1..slots.len() {
        let mut blocks = Vec::with_capacity(cfg.m);
        for i in 0..cfg.m {
            let v = transcript.require_precoder(pos, i, j)?;
            let now = process.channel_at(i, j, slots[pos])?;
            let then = process.channel_at(i, j, t1)?;
            blocks.push(&(now * &v.matrix) - then);
        }
        rows.push(CMatrix::hstack(&blocks)?);
        rhs.push(transcript.received[pos][j][0] - transcript.received[0][j][0]);
    }
    let effective = CMatrix::vstack(&rows)?;
    Ok(decode_system(j, effective, &rhs, &transcript.truth[j], tol))
}

/// Largest relative difference between the unwanted part of `y^{[j]}(n)` and
/// that of `y^{[j]}(t_1)`, over all coded slots and receivers.
pub fn misox_leakage(cfg: &MisoxConfig, transcript: &Transcript, process: &ChannelProcess) -> Result<f64> {
    let slots = &transcript.slots;
    let a = cfg.a;
    let mut worst: f64 = 0.0;
    for j in 0..cfg.n {
        let unwanted = |i: usize, k: usize| &transcript.truth[k][i * a..(i + 1) * a];
        let mut then = Complex64::new(0.0, 0.0);
        for i in 0..cfg.m {
            let h = process.channel_at(i, j, slots[0])?;
            for k in (0..cfg.n).filter(|&k| k != j) {
                then += h.mul_vec(unwanted(i, k))[0];
            }
        }
        for pos in 1..slots.len() {
            let mut now = Complex64::new(0.0, 0.0);
            for i in 0..cfg.m {
                let h = process.channel_at(i, j, slots[pos])?;
                for k in (0..cfg.n).filter(|&k| k != j) {
                    let v = transcript.require_precoder(pos, i, k)?;
                    now += (h * &v.matrix).mul_vec(unwanted(i, k))[0];
                }
            }
            let scale = vec_norm(&[then]).max(f64::MIN_POSITIVE);
            worst = worst.max((now - then).norm() / scale);
        }
    }
    Ok(worst)
}

pub const DEFAULT_TIMING: (u64, u64) = (8, 2);

pub fn misox_trial(cfg: &MisoxConfig, timing: (u64, u64), base_seed: u64, trial: u64) -> Result<TrialOutcome> {
    let seed = derive_seed(base_seed, trial);
    let (tc, tfb) = timing;
    let net = NetworkConfig::symmetric(cfg.m, cfg.n, cfg.a, 1, tc, tfb, seed);
    let set = schedule_slot_sets(tc, tfb, cfg.scheme_length, 1, 1)?.remove(0);
    let process = sample_network(net, set.blocks.last().copied().unwrap_or(0) + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5E_ED0F_5A1D);
    let payload = MisoxPayload::random(&mut rng, cfg);
    let tr = match run_misox(cfg, &process, &set, &payload) {
        Ok(tr) => tr,
        Err(e @ Error::DegenerateChannel(_)) => return Ok(TrialOutcome::degenerate(trial, seed, &e)),
        Err(e) => return Err(e),
    };
    let reports = (0..cfg.n)
        .map(|j| decode_misox_receiver(cfg, &tr, &process, j))
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        trial,
        seed,
        symbols: tr.symbols_delivered(),
        slots: tr.slots_used(),
        reports,
        leakage: misox_leakage(cfg, &tr, &process)?,
        degenerate: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(m: usize, n: usize, seed: u64) -> (MisoxConfig, ChannelProcess, SlotSet) {
        let cfg = misox_config(m, n).unwrap();
        let set = schedule_slot_sets(8, 2, cfg.scheme_length, 1, 1).unwrap().remove(0);
        let net = NetworkConfig::symmetric(m, n, cfg.a, 1, 8, 2, seed);
        let process = sample_network(net, set.blocks.last().unwrap() + 1).unwrap();
        (cfg, process, set)
    }

    #[test]
    fn config_counts() {
        let c = misox_config(2, 3).unwrap();
        assert_eq!((c.a, c.scheme_length, c.symbols_per_run()), (2, 5, 12));
        assert_eq!(c.exact_ratio(), Rational64::new(12, 5));
        assert_eq!(misox_config(3, 3).unwrap().exact_ratio(), Rational64::new(18, 7));
        assert!(matches!(misox_config(2, 2), Err(Error::Unsupported(_))));
    }

    #[test]
    fn two_by_three_decodes() {
        let (cfg, process, set) = setup(2, 3, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let tr = run_misox(&cfg, &process, &set, &MisoxPayload::random(&mut rng, &cfg)).unwrap();
        assert_eq!(tr.symbols_delivered(), 12);
        assert!(misox_leakage(&cfg, &tr, &process).unwrap() <= 1e-9);
        for j in 0..3 {
            let rep = decode_misox_receiver(&cfg, &tr, &process, j).unwrap();
            assert_eq!(rep.effective_matrix.shape(), (4, 4));
            assert_eq!(rep.rank, 4);
            assert!(rep.success, "{rep:?}");
        }
    }

    #[test]
    fn other_receivers_payload_does_not_matter() {
        let (cfg, process, set) = setup(2, 3, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let p1 = MisoxPayload::random(&mut rng, &cfg);
        let mut p2 = p1.clone();
        p2.streams[1] = MisoxPayload::random(&mut rng, &cfg).streams[1].clone();
        let a = run_misox(&cfg, &process, &set, &p1).unwrap();
        let b = run_misox(&cfg, &process, &set, &p2).unwrap();
        let ra = decode_misox_receiver(&cfg, &a, &process, 0).unwrap();
        let rb = decode_misox_receiver(&cfg, &b, &process, 0).unwrap();
        let diff = crate::linalg::max_abs_diff(&ra.recovered, &rb.recovered);
        assert!(diff <= 1e-9);
    }

    #[test]
    fn zero_payload_zero_transcript() {
        let (cfg, process, set) = setup(3, 3, 7);
        let tr = run_misox(&cfg, &process, &set, &MisoxPayload::zeros(&cfg)).unwrap();
        assert!(tr.received.iter().flatten().flatten().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn filled_ratio_at_one_set() {
        let c = misox_config(2, 3).unwrap();
        assert_eq!(c.filled_ratio(1), Rational64::new(32, 25));
    }
}
