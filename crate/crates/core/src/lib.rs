//! Non-binary LDPC coding over GF(2^m) for the half-duplex decode-and-forward
//! relay channel.
//!
//! The building blocks are field arithmetic ([`gf`]), regular code
//! construction and encoding ([`code`]), multiplicative repetition and
//! recoverable-step puncturing ([`rate`]), and a Walsh-Hadamard belief
//! propagation decoder ([`bp`]). On top sit the channel models ([`channel`]),
//! the relay protocol ([`protocol`]), rate and threshold analysis
//! ([`analysis`]) and the Monte Carlo sweep runner ([`harness`]).

pub mod analysis;
pub mod bp;
pub mod channel;
pub mod code;
pub mod error;
pub mod gf;
pub mod harness;
pub mod protocol;
pub mod rate;

pub use bp::{BpConfig, BpDecoder, CheckKernel, DecodeResult, Likelihoods, ProbVector};
pub use channel::{Noise, PowerAllocation, PowerSplit, RelayGeometry};
pub use code::{MotherCode, ParityCheckMatrix, RegularParams, TannerGraph};
pub use error::{Error, Result};
pub use gf::{Field, Symbol};
pub use harness::{AggregateStats, ExperimentConfig};
pub use protocol::{RelaySystemConfig, TrialOutcome};
pub use rate::{PunctureSchedule, RepetitionScheme};
