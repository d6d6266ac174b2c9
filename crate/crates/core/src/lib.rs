//! Simulation and analysis of interference alignment in MIMO X networks whose
//! transmitters only know their own links, with feedback that arrives before
//! the channel changes.
//!
//! Three schemes are provided, each with encoders that see only a local,
//! delayed view of the channel:
//!
//! * [`stia2`]: two users, `A` transmit and `B` receive antennas.
//! * [`ria`]: `K` single-antenna users.
//! * [`misox`]: `M` transmitters with `N − 1` antennas, `N` single-antenna receivers.
//!
//! [`dof`] evaluates the matching closed-form sum-DoF regions exactly.

pub mod channel;
pub mod dof;
pub mod error;
pub mod linalg;
pub mod misox;
pub mod precoding;
pub mod ria;
pub mod scheme;
pub mod stia2;
pub mod verify;

pub use error::{Error, Result};
