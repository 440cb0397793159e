//! Guessing Random Additive Noise Decoding with ordered-reliability
//! schedules, posterior-driven schedule reshuffling, and the simulation and
//! verification tooling around them.
//!
//! ## Examples
//!
//! - **`channel_basics`** - noise level, LLRs and reliability ranks
//! - **`codes`** - BCH(127,113), CRC-aided polar(128,114) and toy codes
//! - **`schedules`** - rank, CDF and three-line schedules
//! - **`decode_bch`** - ORBGRAND and SGRAND on noisy BCH words
//! - **`reshuffle_train`** - learn a reshuffled schedule and compare held out
//! - **`rmatrix_export`** - pairwise ordering violations as CSV and PGM
//! - **`bler_sweep`** - BLER and average queries from a config
//! - **`oracle_checks`** - ML equivalence and the search-cost formula
//!
//! ```bash
//! cargo run --release --example decode_bch
//! ```

pub mod bits;
pub mod channel;
pub mod cli;
pub mod codebook;
pub mod error;
pub mod grand;
pub mod oracle;
pub mod pattern;
pub mod reshuffle;
pub mod rng;
pub mod sim;
pub mod verify;

mod par;

pub use bits::BitWord;
pub use error::{Error, Result};
