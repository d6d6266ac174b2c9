mod common;

use common::{bits, perturb, RecordingProvider, WrongOwner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xdof::channel::{sample_network, schedule_slot_sets, ChannelProcess, CsitProvider, NetworkConfig, SlotSet};
use xdof::misox::{self, misox_config, MisoxConfig, MisoxPayload};
use xdof::ria::{self, plan_ria, RiaPayload, RiaPlan};
use xdof::scheme::Transcript;
use xdof::stia2::{self, stia_case, Stia2Config, StiaPayload};
use xdof::Error;

const TC: u64 = 8;
const TFB: u64 = 2;

struct Stia {
    cfg: Stia2Config,
    set: SlotSet,
    payload: StiaPayload,
}

impl Stia {
    fn new(a: usize, b: usize, seed: u64) -> (Self, ChannelProcess) {
        let cfg = stia_case(a, b).unwrap();
        let set = schedule_slot_sets(TC, TFB, cfg.slots_per_run(), 1, cfg.phase_one_len()).unwrap().remove(0);
        let net = NetworkConfig::symmetric(2, 2, a, b, TC, TFB, seed);
        let process = sample_network(net, set.blocks.last().unwrap() + 1).unwrap();
        let payload = StiaPayload::random(&mut ChaCha8Rng::seed_from_u64(seed), a);
        (Stia { cfg, set, payload }, process)
    }

    fn run(&self, process: &ChannelProcess, provider: &dyn CsitProvider) -> xdof::Result<Transcript> {
        stia2::run_stia_two_user_with(&self.cfg, process, provider, &self.set, &self.payload)
    }
}

struct Ria {
    plan: RiaPlan,
    payload: RiaPayload,
}

impl Ria {
    fn new(k: usize, seed: u64) -> (Self, ChannelProcess) {
        let plan = plan_ria(k, TC, TFB).unwrap();
        let net = NetworkConfig::symmetric(k, k, 1, 1, TC, TFB, seed);
        let process = sample_network(net, plan.blocks_needed()).unwrap();
        let payload = RiaPayload::random(&mut ChaCha8Rng::seed_from_u64(seed), k);
        (Ria { plan, payload }, process)
    }

    fn run(&self, process: &ChannelProcess, provider: &dyn CsitProvider) -> xdof::Result<Transcript> {
        ria::run_ria_with(&self.plan, process, provider, &self.payload)
    }
}

struct Misox {
    cfg: MisoxConfig,
    set: SlotSet,
    payload: MisoxPayload,
}

impl Misox {
    fn new(m: usize, n: usize, seed: u64) -> (Self, ChannelProcess) {
        let cfg = misox_config(m, n).unwrap();
        let set = schedule_slot_sets(TC, TFB, cfg.scheme_length, 1, 1).unwrap().remove(0);
        let net = NetworkConfig::symmetric(m, n, cfg.a, 1, TC, TFB, seed);
        let process = sample_network(net, set.blocks.last().unwrap() + 1).unwrap();
        let payload = MisoxPayload::random(&mut ChaCha8Rng::seed_from_u64(seed), &cfg);
        (Misox { cfg, set, payload }, process)
    }

    fn run(&self, process: &ChannelProcess, provider: &dyn CsitProvider) -> xdof::Result<Transcript> {
        misox::run_misox_with(&self.cfg, process, provider, &self.set, &self.payload)
    }
}

/// Reads are own-links only and never newer than the feedback allows.
fn audit(rec: &RecordingProvider, num_tx: usize) {
    let log = rec.accesses();
    assert!(!log.is_empty(), "encoders made no CSI reads");
    assert_eq!(rec.cross_reads(), 0);
    for a in &log {
        assert!(a.requested < num_tx);
        assert!(a.slot + TFB <= a.now || (a.slot - 1) / TC == (a.now - 1) / TC, "{a:?}");
    }
    for tx in 0..num_tx {
        assert!(log.iter().any(|a| a.requested == tx), "tx {tx} never read its CSI");
    }
}

/// Redrawing one transmitter's links leaves every other transmit signal bit-identical.
fn assert_signals_local(base: &Transcript, perturbed: &Transcript, victim: usize) {
    for (pos, (a, b)) in base.transmitted.iter().zip(&perturbed.transmitted).enumerate() {
        for tx in 0..a.len() {
            if tx != victim {
                assert_eq!(bits(&a[tx]), bits(&b[tx]), "tx {tx} at position {pos} reacted to tx {victim}");
            }
        }
    }
}

#[test]
fn two_user_encoders_read_only_their_links() {
    for (a, b) in [(2, 1), (3, 2), (5, 2), (5, 3), (3, 3), (2, 3)] {
        let (s, process) = Stia::new(a, b, 11);
        let rec = RecordingProvider::new(&process);
        let tr = s.run(&process, &rec).unwrap();
        audit(&rec, 2);
        assert_eq!(tr, s.run(&process, &process).unwrap());
        for victim in 0..2 {
            let other = perturb(&process, victim, 999);
            assert_signals_local(&tr, &s.run(&other, &other).unwrap(), victim);
        }
    }
}

#[test]
fn ria_encoders_read_only_their_links() {
    for k in 2..=5 {
        let (r, process) = Ria::new(k, 5);
        let rec = RecordingProvider::new(&process);
        let tr = r.run(&process, &rec).unwrap();
        audit(&rec, k);
        for victim in 0..k {
            let other = perturb(&process, victim, 1234);
            assert_signals_local(&tr, &r.run(&other, &other).unwrap(), victim);
        }
    }
}

#[test]
fn misox_encoders_read_only_their_links() {
    for (m, n) in [(2, 3), (3, 3), (2, 4)] {
        let (x, process) = Misox::new(m, n, 3);
        let rec = RecordingProvider::new(&process);
        let tr = x.run(&process, &rec).unwrap();
        audit(&rec, m);
        for victim in 0..m {
            let other = perturb(&process, victim, 77);
            assert_signals_local(&tr, &x.run(&other, &other).unwrap(), victim);
        }
    }
}

#[test]
fn foreign_views_are_refused() {
    let (s, process) = Stia::new(5, 2, 1);
    assert!(matches!(s.run(&process, &WrongOwner(&process)), Err(Error::Locality { .. })));
    let (r, process) = Ria::new(3, 1);
    assert!(matches!(r.run(&process, &WrongOwner(&process)), Err(Error::Locality { .. })));
    let (x, process) = Misox::new(2, 3, 1);
    assert!(matches!(x.run(&process, &WrongOwner(&process)), Err(Error::Locality { .. })));
}
