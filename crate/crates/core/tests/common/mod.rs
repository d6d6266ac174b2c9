#![allow(dead_code)]

use std::cell::RefCell;

use num_complex::Complex64;
use xdof::channel::{sample_network, ChannelProcess, CsitProvider, LocalCsit, NetworkConfig};
use xdof::linalg::CMatrix;
use xdof::Result;

/// One `channel()` call made through a recorded view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Access {
    pub requested: usize,
    pub owner: usize,
    pub rx: usize,
    pub slot: u64,
    pub now: u64,
}

/// Serves real views and logs every read made through them.
pub struct RecordingProvider<'a> {
    pub inner: &'a ChannelProcess,
    pub log: RefCell<Vec<Access>>,
}

impl<'a> RecordingProvider<'a> {
    pub fn new(inner: &'a ChannelProcess) -> Self {
        RecordingProvider { inner, log: RefCell::new(Vec::new()) }
    }

    pub fn accesses(&self) -> Vec<Access> {
        self.log.borrow().clone()
    }

    pub fn cross_reads(&self) -> usize {
        self.log.borrow().iter().filter(|a| a.owner != a.requested).count()
    }
}

struct RecordingView<'a> {
    view: Box<dyn LocalCsit + 'a>,
    requested: usize,
    log: &'a RefCell<Vec<Access>>,
}

impl LocalCsit for RecordingView<'_> {
    fn owner(&self) -> usize {
        self.view.owner()
    }
    fn now(&self) -> u64 {
        self.view.now()
    }
    fn coherence(&self) -> u64 {
        self.view.coherence()
    }
    fn feedback_delay(&self) -> u64 {
        self.view.feedback_delay()
    }
    fn magnitude_floor(&self) -> f64 {
        self.view.magnitude_floor()
    }
    fn channel(&self, rx: usize, slot: u64) -> Result<CMatrix> {
        self.log.borrow_mut().push(Access {
            requested: self.requested,
            owner: self.view.owner(),
            rx,
            slot,
            now: self.view.now(),
        });
        self.view.channel(rx, slot)
    }
}

impl CsitProvider for RecordingProvider<'_> {
    fn view(&self, tx: usize, now: u64) -> Result<Box<dyn LocalCsit + '_>> {
        Ok(Box::new(RecordingView { view: self.inner.view(tx, now)?, requested: tx, log: &self.log }))
    }
}

/// Hands every encoder the view of the next transmitter.
pub struct WrongOwner<'a>(pub &'a ChannelProcess);

impl CsitProvider for WrongOwner<'_> {
    fn view(&self, tx: usize, now: u64) -> Result<Box<dyn LocalCsit + '_>> {
        let n = self.0.config().num_tx;
        self.0.view((tx + 1) % n, now)
    }
}

/// Copy of `process` in which every link of `victim` is redrawn from `seed`.
pub fn perturb(process: &ChannelProcess, victim: usize, seed: u64) -> ChannelProcess {
    let mut cfg: NetworkConfig = process.config().clone();
    cfg.seed = seed;
    let other = sample_network(cfg, process.num_blocks()).unwrap();
    let mut value: serde_json::Value = serde_json::from_str(&process.to_json()).unwrap();
    let n_rx = process.config().num_rx;
    let fresh: serde_json::Value = serde_json::from_str(&other.to_json()).unwrap();
    for b in 0..process.num_blocks() as usize {
        for rx in 0..n_rx {
            let idx = victim * n_rx + rx;
            value["blocks"][b][idx] = fresh["blocks"][b][idx].clone();
        }
    }
    let out = ChannelProcess::from_json(&value.to_string()).unwrap();
    for b in 0..process.num_blocks() as usize {
        for (idx, h) in out.blocks()[b].iter().enumerate() {
            assert_eq!(idx / n_rx == victim, h != &process.blocks()[b][idx], "block {b} link {idx}");
        }
    }
    out
}

pub fn bits(v: &[Complex64]) -> Vec<(u64, u64)> {
    v.iter().map(|z| (z.re.to_bits(), z.im.to_bits())).collect()
}
