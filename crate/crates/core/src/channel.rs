//! Block-fading channel process, local delayed-CSIT views and slot scheduling.
//!
//! Slots are 1-based: slot `n` lies in block `(n − 1) / T_c`. Transmitter and
//! receiver indices are 0-based. A transmitter sees feedback of its own links
//! only, and only for slots `m ≤ n − T_fb` at time `n`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::precoding::scalar_ratio_precoder;

/// Magnitude range used when a config does not override it.
pub const DEFAULT_MAGNITUDE_BOUNDS: (f64, f64) = (0.1, 10.0);

/// Static description of an `M×N` X network and its fading/feedback timing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub num_tx: usize,
    pub num_rx: usize,
    pub tx_antennas: Vec<usize>,
    pub rx_antennas: Vec<usize>,
    /// Coherence time `T_c` in slots.
    pub coherence: u64,
    /// Feedback delay `T_fb` in slots.
    pub feedback_delay: u64,
    pub magnitude_bounds: (f64, f64),
    pub seed: u64,
}

impl NetworkConfig {
    /// Every transmitter has `tx_antennas` antennas and every receiver `rx_antennas`.
    pub fn symmetric(
        num_tx: usize,
        num_rx: usize,
        tx_antennas: usize,
        rx_antennas: usize,
        coherence: u64,
        feedback_delay: u64,
        seed: u64,
    ) -> Self {
        NetworkConfig {
            num_tx,
            num_rx,
            tx_antennas: vec![tx_antennas; num_tx],
            rx_antennas: vec![rx_antennas; num_rx],
            coherence,
            feedback_delay,
            magnitude_bounds: DEFAULT_MAGNITUDE_BOUNDS,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_tx == 0 || self.num_rx == 0 {
            return Err(Error::Config("network needs at least one transmitter and receiver".into()));
        }
        if self.tx_antennas.len() != self.num_tx || self.rx_antennas.len() != self.num_rx {
            return Err(Error::Config("antenna lists must have one entry per node".into()));
        }
        if self.tx_antennas.iter().chain(&self.rx_antennas).any(|&a| a == 0) {
            return Err(Error::Config("antenna counts must be at least 1".into()));
        }
        if self.coherence == 0 {
            return Err(Error::Config("coherence time must be at least one slot".into()));
        }
        if self.feedback_delay >= self.coherence {
            return Err(Error::Config(format!(
                "feedback delay {} must be shorter than coherence time {}",
                self.feedback_delay, self.coherence
            )));
        }
        let (lo, hi) = self.magnitude_bounds;
        if !(lo > 0.0 && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!(
                "magnitude bounds ({lo}, {hi}) must satisfy 0 < min < max < inf"
            )));
        }
        Ok(())
    }

    /// Normalized feedback delay `T_fb / T_c`.
    pub fn lambda(&self) -> f64 {
        self.feedback_delay as f64 / self.coherence as f64
    }

    /// 0-based block index of a 1-based slot.
    pub fn block_of(&self, slot: u64) -> u64 {
        block_of(slot, self.coherence)
    }
}

pub fn block_of(slot: u64, coherence: u64) -> u64 {
    debug_assert!(slot >= 1, "slots are 1-based");
    (slot - 1) / coherence
}

/// Whether a transmitter knows the current channel in `slot`: the slot fed
/// back `T_fb` slots ago lies in the same block.
pub fn current_csit_available(slot: u64, coherence: u64, feedback_delay: u64) -> bool {
    (slot - 1) % coherence >= feedback_delay
}

/// One realization of the ideal block-fading process.
///
/// Block `b` is drawn from its own ChaCha stream keyed by `(seed, b)`, so a
/// process extended lazily is identical to one sampled up front.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelProcess {
    config: NetworkConfig,
    /// `blocks[b][tx * num_rx + rx]` is `H^{[rx,tx]}` in block `b`.
    blocks: Vec<Vec<CMatrix>>,
}

/// Samples the first `num_blocks` blocks of a process.
pub fn sample_network(config: NetworkConfig, num_blocks: u64) -> Result<ChannelProcess> {
    config.validate()?;
    let mut process = ChannelProcess {
        config,
        blocks: Vec::new(),
    };
    process.extend_to(num_blocks);
    Ok(process)
}

fn sample_coefficient(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> Complex64 {
    loop {
        let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
        let mag = z.norm();
        if mag >= lo && mag <= hi {
            return z;
        }
    }
}

impl ChannelProcess {
    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    /// Materialized blocks, each indexed by `tx * num_rx + rx`.
    pub fn blocks(&self) -> &[Vec<CMatrix>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> u64 {
        self.blocks.len() as u64
    }

    /// Materializes blocks up to (excluding) `num_blocks`.
    pub fn extend_to(&mut self, num_blocks: u64) {
        let cfg = &self.config;
        while (self.blocks.len() as u64) < num_blocks {
            let b = self.blocks.len() as u64;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(b);
            let mut links = Vec::with_capacity(cfg.num_tx * cfg.num_rx);
            for tx in 0..cfg.num_tx {
                for rx in 0..cfg.num_rx {
                    let (rows, cols) = (cfg.rx_antennas[rx], cfg.tx_antennas[tx]);
                    links.push(CMatrix::from_fn(rows, cols, |_, _| {
                        sample_coefficient(&mut rng, cfg.magnitude_bounds)
                    }));
                }
            }
            self.blocks.push(links);
        }
    }

    /// Makes sure every slot up to `slot` is backed by a sampled block.
    pub fn ensure_slot(&mut self, slot: u64) {
        let needed = self.config.block_of(slot.max(1)) + 1;
        self.extend_to(needed);
    }

    fn check_link(&self, tx: usize, rx: usize) -> Result<()> {
        if tx >= self.config.num_tx {
            return Err(Error::IndexOutOfRange {
                what: "tx",
                index: tx,
                limit: self.config.num_tx,
            });
        }
        if rx >= self.config.num_rx {
            return Err(Error::IndexOutOfRange {
                what: "rx",
                index: rx,
                limit: self.config.num_rx,
            });
        }
        Ok(())
    }

    /// `H^{[rx,tx]}(slot)`, a `B_rx × A_tx` matrix.
    pub fn channel_at(&self, tx: usize, rx: usize, slot: u64) -> Result<&CMatrix> {
        self.check_link(tx, rx)?;
        if slot == 0 {
            return Err(Error::IndexOutOfRange {
                what: "slot (1-based)",
                index: 0,
                limit: 1,
            });
        }
        let block = self.config.block_of(slot);
        let links = self
            .blocks
            .get(block as usize)
            .ok_or(Error::BlockNotMaterialized {
                slot,
                block,
                materialized: self.num_blocks(),
            })?;
        Ok(&links[tx * self.config.num_rx + rx])
    }

    pub fn has_current_csit(&self, slot: u64) -> bool {
        current_csit_available(slot, self.config.coherence, self.config.feedback_delay)
    }

    /// Transmitter `tx`'s local view of the feedback at time `now`.
    pub fn csit_view(&self, tx: usize, now: u64) -> Result<CsitView<'_>> {
        self.check_link(tx, 0)?;
        Ok(CsitView {
            process: self,
            tx,
            now,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("channel process serializes")
    }

    /// Parses a snapshot written by [`ChannelProcess::to_json`], checking shapes.
    pub fn from_json(s: &str) -> Result<Self> {
        let p: ChannelProcess =
            serde_json::from_str(s).map_err(|e| Error::Config(format!("bad snapshot: {e}")))?;
        p.config.validate()?;
        let cfg = &p.config;
        for links in &p.blocks {
            if links.len() != cfg.num_tx * cfg.num_rx {
                return Err(Error::Config("snapshot block has the wrong link count".into()));
            }
            for tx in 0..cfg.num_tx {
                for rx in 0..cfg.num_rx {
                    let m = &links[tx * cfg.num_rx + rx];
                    if m.shape() != (cfg.rx_antennas[rx], cfg.tx_antennas[tx]) {
                        return Err(Error::Config("snapshot matrix has the wrong shape".into()));
                    }
                }
            }
        }
        Ok(p)
    }
}

/// What an encoder may know about the channel: the links of one transmitter,
/// delayed by the feedback delay.
///
/// Scheme encoders are written against this trait only. The provided methods
/// build the usual derived quantities on top of [`LocalCsit::channel`].
pub trait LocalCsit {
    /// Transmitter whose links this view exposes.
    fn owner(&self) -> usize;
    /// Current slot.
    fn now(&self) -> u64;
    fn coherence(&self) -> u64;
    fn feedback_delay(&self) -> u64;
    /// `H^{[rx,owner]}(slot)`, available for `slot ≤ now − T_fb`.
    fn channel(&self, rx: usize, slot: u64) -> Result<CMatrix>;

    /// The current channel `H^{[rx,owner]}(now)`, recovered from the feedback
    /// of slot `now − T_fb` when both slots share a block.
    fn current_channel(&self, rx: usize) -> Result<CMatrix> {
        let (now, delay, tc) = (self.now(), self.feedback_delay(), self.coherence());
        if !current_csit_available(now, tc, delay) {
            return Err(Error::Scheduling(format!(
                "slot {now} has no current CSIT (T_c = {tc}, T_fb = {delay})"
            )));
        }
        self.channel(rx, now - delay)
    }

    /// Scalar ratio `h^{[rx,owner]}(target) / h^{[rx,owner]}(now)` for
    /// single-antenna links.
    fn current_ratio(&self, rx: usize, target_slot: u64) -> Result<Complex64> {
        let now = self.current_channel(rx)?;
        let target = self.channel(rx, target_slot)?;
        if now.shape() != (1, 1) || target.shape() != (1, 1) {
            return Err(Error::Dimension("ratio feedback needs single-antenna links".into()));
        }
        scalar_ratio_precoder(target[(0, 0)], now[(0, 0)], self.magnitude_floor())
    }

    /// Smallest coefficient magnitude the channel law can produce.
    fn magnitude_floor(&self) -> f64 {
        0.0
    }
}

/// Hands out local views to encoders. [`ChannelProcess`] is the real one;
/// tests substitute recording doubles.
pub trait CsitProvider {
    fn view(&self, tx: usize, now: u64) -> Result<Box<dyn LocalCsit + '_>>;
}

impl CsitProvider for ChannelProcess {
    fn view(&self, tx: usize, now: u64) -> Result<Box<dyn LocalCsit + '_>> {
        Ok(Box::new(self.csit_view(tx, now)?))
    }
}

/// Local, delayed view of one transmitter's links.
#[derive(Debug, Clone, Copy)]
pub struct CsitView<'a> {
    process: &'a ChannelProcess,
    tx: usize,
    now: u64,
}

/// Serializable content of a [`CsitView`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsitSnapshot {
    pub tx: usize,
    pub now: u64,
    /// `(rx, slot, H^{[rx,tx]}(slot))`.
    pub entries: Vec<(usize, u64, CMatrix)>,
}

impl CsitView<'_> {
    /// Newest slot whose feedback has arrived, if any.
    pub fn newest_slot(&self) -> Option<u64> {
        let d = self.process.config.feedback_delay;
        (self.now > d).then(|| self.now - d)
    }

    /// Every `(rx, slot)` entry of the view over materialized blocks.
    pub fn entries(&self) -> BTreeMap<(usize, u64), CMatrix> {
        let mut out = BTreeMap::new();
        let Some(newest) = self.newest_slot() else {
            return out;
        };
        let cfg = &self.process.config;
        let last = newest.min(self.process.num_blocks() * cfg.coherence);
        for slot in 1..=last {
            for rx in 0..cfg.num_rx {
                if let Ok(h) = self.process.channel_at(self.tx, rx, slot) {
                    out.insert((rx, slot), h.clone());
                }
            }
        }
        out
    }

    pub fn snapshot(&self) -> CsitSnapshot {
        CsitSnapshot {
            tx: self.tx,
            now: self.now,
            entries: self
                .entries()
                .into_iter()
                .map(|((rx, slot), h)| (rx, slot, h))
                .collect(),
        }
    }
}

impl LocalCsit for CsitView<'_> {
    fn owner(&self) -> usize {
        self.tx
    }

    fn now(&self) -> u64 {
        self.now
    }

    fn coherence(&self) -> u64 {
        self.process.config.coherence
    }

    fn feedback_delay(&self) -> u64 {
        self.process.config.feedback_delay
    }

    fn magnitude_floor(&self) -> f64 {
        self.process.config.magnitude_bounds.0
    }

    fn channel(&self, rx: usize, slot: u64) -> Result<CMatrix> {
        let delay = self.process.config.feedback_delay;
        match self.newest_slot() {
            Some(newest) if slot >= 1 && slot <= newest => {
                Ok(self.process.channel_at(self.tx, rx, slot)?.clone())
            }
            _ => Err(Error::NotReady {
                slot,
                now: self.now,
                delay,
            }),
        }
    }
}

/// Ordered slots `t_1..t_T` of one scheme run, each in its own block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotSet {
    pub slots: Vec<u64>,
    /// 0-based block index of every slot.
    pub blocks: Vec<u64>,
    /// Current-CSIT availability of every slot.
    pub current_csit: Vec<bool>,
    /// Number of leading slots that are sent without CSIT.
    pub phase_one_len: usize,
}

impl SlotSet {
    /// Validates and wraps explicit slots.
    pub fn new(slots: Vec<u64>, coherence: u64, feedback_delay: u64, phase_one_len: usize) -> Result<Self> {
        if slots.contains(&0) {
            return Err(Error::Scheduling("slots are 1-based".into()));
        }
        let blocks: Vec<u64> = slots.iter().map(|&s| block_of(s, coherence)).collect();
        let mut sorted = blocks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != blocks.len() {
            return Err(Error::Scheduling(format!(
                "slots {slots:?} do not lie in pairwise distinct blocks"
            )));
        }
        let current_csit: Vec<bool> = slots
            .iter()
            .map(|&s| current_csit_available(s, coherence, feedback_delay))
            .collect();
        if let Some(k) = (phase_one_len..slots.len()).find(|&k| !current_csit[k]) {
            return Err(Error::Scheduling(format!(
                "slot {} (position {}) has no current CSIT",
                slots[k],
                k + 1
            )));
        }
        Ok(SlotSet {
            slots,
            blocks,
            current_csit,
            phase_one_len,
        })
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn last_slot(&self) -> u64 {
        self.slots.iter().copied().max().unwrap_or(0)
    }
}

/// Staggered slot sets over `T` consecutive blocks starting at block 0.
///
/// Set `l` (1-based) uses `t_{l,k} = (k−1)·T_c + l` for the first
/// `phase_one_len` positions and `(k−1)·T_c + T_fb + l` afterwards.
pub fn schedule_slot_sets(
    coherence: u64,
    feedback_delay: u64,
    scheme_length: usize,
    n_sets: usize,
    phase_one_len: usize,
) -> Result<Vec<SlotSet>> {
    schedule_slot_sets_from(0, coherence, feedback_delay, scheme_length, n_sets, phase_one_len)
}

/// As [`schedule_slot_sets`], but starting at block `first_block`; use it to
/// lay further batches over fresh blocks.
pub fn schedule_slot_sets_from(
    first_block: u64,
    coherence: u64,
    feedback_delay: u64,
    scheme_length: usize,
    n_sets: usize,
    phase_one_len: usize,
) -> Result<Vec<SlotSet>> {
    if feedback_delay >= coherence {
        return Err(Error::Scheduling(format!(
            "feedback delay {feedback_delay} must be shorter than coherence time {coherence}"
        )));
    }
    let capacity = coherence - feedback_delay;
    if n_sets as u64 > capacity {
        return Err(Error::Scheduling(format!(
            "{n_sets} sets exceed the {capacity} available per batch (T_c − T_fb)"
        )));
    }
    if scheme_length == 0 {
        return Err(Error::Scheduling("scheme length must be positive".into()));
    }
    let base = first_block * coherence;
    (1..=n_sets as u64)
        .map(|l| {
            let slots = (1..=scheme_length as u64)
                .map(|k| {
                    let offset = if (k as usize) <= phase_one_len { 0 } else { feedback_delay };
                    base + (k - 1) * coherence + offset + l
                })
                .collect();
            SlotSet::new(slots, coherence, feedback_delay, phase_one_len)
        })
        .collect()
}

/// Mixes a base seed with a trial index (SplitMix64 finalizer), giving
/// independent, reproducible per-trial seeds.
pub fn derive_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
