//! Security analysis of time-coding quantum key distribution.
//!
//! The crate covers the three time-slot protocols (3TS, 2TS and C3TS):
//!
//! - [`linalg`]: small dense complex matrices, Hermitian spectra and entropies.
//! - [`protocol`]: pulse encodings, joint Alice/Bob states and the imbalanced
//!   interferometer.
//! - [`attack`]: Eve's optimal collective attack, Holevo bound, secret-key rate,
//!   tolerable QBER and a brute-force optimizer that cross-checks the closed forms.
//! - [`channel`]: fiber transmission, QBER with dark counts, depolarization.
//! - [`pulse`]: faint-pulse sources, PNS-limited and decoy-state rates.
//! - [`distance`]: cut-off distances and rate/QBER sweeps.
//! - [`sim`]: seeded pulse-level Monte Carlo with an optional intercept-resend
//!   eavesdropper.
//! - [`cli`]: JSON configuration and the `tempokey` subcommands.
//!
//! ```
//! use tempokey::attack::max_qber;
//! use tempokey::protocol::ProtocolKind;
//!
//! let q = max_qber(ProtocolKind::Ts2, 1.0).unwrap();
//! assert!((q - 0.110).abs() < 1e-3);
//! ```

pub mod attack;
pub mod channel;
pub mod cli;
pub mod distance;
pub mod error;
pub mod linalg;
pub mod protocol;
pub mod pulse;
pub(crate) mod roots;
pub mod sim;

pub use error::{Error, Result};
