//! Chaotic-waveform wireless power transfer: chaos generation, DCSK and
//! short-reference DCSK framing, Nakagami-m fading, correlator reception, a
//! fourth-order rectenna model, closed-form harvested DC and a seeded Monte
//! Carlo engine to check it.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod chaos;
pub mod cli;
pub mod error;
pub mod montecarlo;
pub mod receiver;
pub mod waveform;

pub use analysis::{harvested_dc, ClosedFormInputs, HpaModel};
pub use channel::{effective_gains, EffectiveGains, Fading, LinkBudget};
pub use chaos::{Bit, ChaosConfig, ChipSequence, TrajectoryMode};
pub use error::{Error, Result};
pub use montecarlo::{estimate_harvest, estimate_papr, HarvestEstimate, SimConfig, SweepParam};
pub use receiver::{PaprMeasurement, ReceiverConfig};
pub use waveform::{Frame, Scheme, WaveformSpec};
