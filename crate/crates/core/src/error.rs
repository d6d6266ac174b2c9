use thiserror::Error;

/// Errors raised by the channel model, the precoders and the scheme runners.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("index out of range: {what} = {index} (limit {limit})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("slot {slot} lies in block {block}, but only {materialized} blocks are materialized")]
    BlockNotMaterialized {
        slot: u64,
        block: u64,
        materialized: u64,
    },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is numerically singular (pivot magnitude {pivot:e})")]
    Singular { pivot: f64 },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("scheduling error: {0}")]
    Scheduling(String),

    #[error("CSI for slot {slot} is not yet available at slot {now} (feedback delay {delay})")]
    NotReady { slot: u64, now: u64, delay: u64 },

    #[error("locality violation: encoder of transmitter {encoder} was handed the view of transmitter {view}")]
    Locality { encoder: usize, view: usize },

    #[error("lambda {0} lies outside the time-sharing segment")]
    OutsideSegment(String),
}

pub type Result<T> = std::result::Result<T, Error>;
