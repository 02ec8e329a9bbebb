//! Pseudorandom wake/sleep scheduling for sensor networks.
//!
//! Core pieces: a Blum–Blum–Shub generator ([`bbs`]), the concrete security
//! bound that ties its modulus size to an attacker's budget ([`bound`]),
//! schedule construction ([`sched`]), empirical distinguishers
//! ([`distinguish`]), a field simulator ([`sim`]) and Monte Carlo versions of
//! the indistinguishability, non-malleability and detection-resistance games
//! ([`games`]).

pub mod bbs;
pub mod bound;
pub mod distinguish;
pub mod games;
pub mod sched;
pub mod seed;
pub mod sim;
pub mod source;

pub use bbs::{generate_params, seed_state, BbsError, BbsParams, BbsState};
pub use bound::{is_secure_against, BoundReport, ExtFloat, Interpretation, SecurityQuery, Verdict};
pub use distinguish::{AdvantageEstimate, Distinguisher, RunOptions};
pub use games::{CommSystem, GameConfig, GameResult, KeyExposure, OracleModel, SecurityLevel};
pub use sched::{ToggleOrder, WakePlan};
pub use seed::derive_seed;
pub use sim::{SimConfig, SimOutcome, SimTrace};
pub use source::{BitStream, LcgParams, SourceSpec};
