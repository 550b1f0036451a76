//! Harvested DC power of a DCSK wireless power transfer link over a two-ray
//! frequency-selective Nakagami-m channel.
//!
//! The crate has two independent routes to the same quantity:
//!
//! * [`analytics`] evaluates the closed-form harvested power of the
//!   WPT-optimal DCSK waveform (exact two-ray expression, its zero-delay
//!   limit and the flat-fading baseline);
//! * [`montecarlo`] estimates the second and fourth moments of the
//!   correlator output by simulation, either chip by chip through
//!   [`waveform`], [`channel`] and [`receiver`], or by sampling the
//!   per-symbol decomposition directly.
//!
//! Everything is expressed in watts; conversion to dBm is left to callers.

pub mod analytics;
pub mod channel;
pub mod chaos;
mod error;
pub mod montecarlo;
pub mod receiver;
pub mod specfun;
pub mod waveform;

pub use channel::{ChannelParams, FadeRealization, PathlossScales, SystemConfig};
pub use chaos::ChaosGenerator;
pub use error::{Error, Result};
pub use montecarlo::{McConfig, McMode, McResult};
pub use receiver::PowerEstimate;
pub use waveform::{ChipFrame, WaveformKind, WaveformSpec};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
