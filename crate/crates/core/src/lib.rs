//! Polar codes for channel coding, lossless and lossy source coding.
//!
//! The crate covers the polar transform, code construction (Arıkan and RM
//! rules, dual codes), SC, BP and MAP decoders, the source-coding schemes
//! built on them and a seeded Monte Carlo harness.

pub mod bp;
pub mod channel;
pub mod construction;
pub mod error;
pub mod map;
pub mod sc;
pub mod sim;
pub mod source;
pub mod transform;

pub use channel::{ChannelKind, ChannelParam, Observation, SoftBlock, Ternary, TernarySourceBlock};
pub use construction::{CodeSpec, ConstructionOptions, DecodingOrder, Orientation, RuleTag, ZProfile};
pub use error::{PolarError, Result};
pub use sc::{GenieReport, ScOutput};
pub use sim::{ExperimentConfig, Scheme, TrialSummary};
pub use transform::{BitBlock, BitIndex};
