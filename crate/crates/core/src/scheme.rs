//! Types shared by the three scheme runners: transcripts, decode reports and
//! per-trial outcomes.

use num_complex::Complex64;
use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{ChannelProcess, CsitProvider, LocalCsit};
use crate::error::{Error, Result};
use crate::linalg::{cond_estimate, max_abs_diff, rank_tol, solve_consistent, CMatrix, Tolerances};
use crate::precoding::Precoder;
use crate::ria::SideInfoAudit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeKind {
    Stia2,
    Ria,
    Misox,
}

/// One precoder applied by transmitter `tx` in slot position `position`.
///
/// `stream` names the message the precoder carries: the intended receiver
/// for the two-user and MISO schemes, the dedicated phase for RIA.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrecoderRecord {
    pub position: usize,
    pub tx: usize,
    pub stream: usize,
    pub precoder: Precoder,
}

/// Everything a scheme run produced. Noiseless: every received vector is
/// exactly `Σ_i H^{[j,i]}(n)·X^{[i]}(n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub scheme: SchemeKind,
    pub slots: Vec<u64>,
    /// `transmitted[position][tx]`.
    pub transmitted: Vec<Vec<Vec<Complex64>>>,
    /// `received[position][rx]`.
    pub received: Vec<Vec<Vec<Complex64>>>,
    pub precoders: Vec<PrecoderRecord>,
    /// Desired symbols of each receiver, in the order its decoder solves for them.
    pub truth: Vec<Vec<Complex64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub side_info: Vec<SideInfoAudit>,
}

impl Transcript {
    pub(crate) fn new(scheme: SchemeKind, slots: Vec<u64>, num_tx: usize, num_rx: usize) -> Self {
        let n = slots.len();
        Transcript {
            scheme,
            slots,
            transmitted: vec![vec![Vec::new(); num_tx]; n],
            received: vec![vec![Vec::new(); num_rx]; n],
            precoders: Vec::new(),
            truth: Vec::new(),
            side_info: Vec::new(),
        }
    }

    pub fn slots_used(&self) -> usize {
        self.slots.len()
    }

    pub fn symbols_delivered(&self) -> usize {
        self.truth.iter().map(Vec::len).sum()
    }

    /// Symbols per channel use of this run, as an exact fraction.
    pub fn dof_ratio(&self) -> Rational64 {
        Rational64::new(self.symbols_delivered() as i64, self.slots_used() as i64)
    }

    pub fn position_of(&self, slot: u64) -> Option<usize> {
        self.slots.iter().position(|&s| s == slot)
    }

    pub fn precoder(&self, position: usize, tx: usize, stream: usize) -> Option<&Precoder> {
        self.precoders
            .iter()
            .find(|r| r.position == position && r.tx == tx && r.stream == stream)
            .map(|r| &r.precoder)
    }

    pub(crate) fn require_precoder(&self, position: usize, tx: usize, stream: usize) -> Result<&Precoder> {
        self.precoder(position, tx, stream).ok_or_else(|| {
            Error::Dimension(format!(
                "transcript lacks the precoder of tx {tx}, stream {stream} at position {position}"
            ))
        })
    }

    /// Fills in the received signals of `position` from the transmitted ones.
    pub(crate) fn propagate(&mut self, process: &ChannelProcess, position: usize) -> Result<()> {
        let slot = self.slots[position];
        let cfg = process.config();
        for rx in 0..cfg.num_rx {
            let mut y = vec![Complex64::new(0.0, 0.0); cfg.rx_antennas[rx]];
            for tx in 0..cfg.num_tx {
                let x = &self.transmitted[position][tx];
                if x.is_empty() {
                    continue;
                }
                let h = process.channel_at(tx, rx, slot)?;
                for (acc, hx) in y.iter_mut().zip(h.mul_vec(x)) {
                    *acc += hx;
                }
            }
            self.received[position][rx] = y;
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serializes")
    }
}

/// Result of one receiver's decoding attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub receiver: usize,
    pub effective_matrix: CMatrix,
    pub rank: usize,
    pub condition_estimate: f64,
    pub recovered: Vec<Complex64>,
    /// `max |recovered − truth|`; infinite when nothing was recovered.
    pub max_residual: f64,
    pub success: bool,
}

impl DecodeReport {
    pub fn symbols(&self) -> usize {
        self.effective_matrix.cols()
    }
}

/// Solves a receiver's stacked system and scores it against the truth.
/// Rank deficiency is recorded in the report, not raised.
pub(crate) fn decode_system(
    receiver: usize,
    effective: CMatrix,
    rhs: &[Complex64],
    truth: &[Complex64],
    tol: &Tolerances,
) -> DecodeReport {
    let unknowns = effective.cols();
    let rank = rank_tol(&effective, tol.rank);
    let condition_estimate = if effective.is_square() {
        cond_estimate(&effective)
    } else {
        f64::NAN
    };
    let solved = if rank == unknowns {
        solve_consistent(&effective, rhs, tol).ok()
    } else {
        None
    };
    let (recovered, max_residual) = match solved {
        Some(x) => {
            let r = max_abs_diff(&x, truth);
            (x, r)
        }
        None => (Vec::new(), f64::INFINITY),
    };
    let success = rank == unknowns && max_residual <= tol.decode_residual;
    DecodeReport {
        receiver,
        effective_matrix: effective,
        rank,
        condition_estimate,
        recovered,
        max_residual,
        success,
    }
}

/// Unit-modulus symbols with uniformly random phase.
pub fn random_symbols<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
        .collect()
}

/// Returns the view of `tx` and checks that the provider honoured the request.
pub(crate) fn local_view<'a>(
    provider: &'a dyn CsitProvider,
    tx: usize,
    now: u64,
) -> Result<Box<dyn LocalCsit + 'a>> {
    let view = provider.view(tx, now)?;
    if view.owner() != tx {
        return Err(Error::Locality {
            encoder: tx,
            view: view.owner(),
        });
    }
    Ok(view)
}

/// Summary of one seeded trial of any scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub seed: u64,
    pub symbols: usize,
    pub slots: usize,
    pub reports: Vec<DecodeReport>,
    /// Largest relative interference leakage after cancellation.
    pub leakage: f64,
    /// Set when the trial hit a probability-zero degenerate channel.
    pub degenerate: Option<String>,
}

impl TrialOutcome {
    pub fn success(&self) -> bool {
        self.degenerate.is_none() && self.reports.iter().all(|r| r.success)
    }

    pub fn max_residual(&self) -> f64 {
        self.reports.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }

    pub fn decoded_symbols(&self) -> usize {
        self.reports
            .iter()
            .filter(|r| r.success)
            .map(DecodeReport::symbols)
            .sum()
    }

    pub(crate) fn degenerate(trial: u64, seed: u64, err: &Error) -> Self {
        TrialOutcome {
            trial,
            seed,
            symbols: 0,
            slots: 0,
            reports: Vec::new(),
            leakage: f64::NAN,
            degenerate: Some(err.to_string()),
        }
    }
}
