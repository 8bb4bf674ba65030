//! Simulator and analysis toolkit for a single-photon measure-resend
//! authenticated semi-quantum key distribution protocol.
//!
//! Alice (full quantum capability) distributes an n-bit key to classical
//! Bob, who can only Z-measure, Z-prepare, and reflect photons. The payload
//! is authenticated with an m-bit universal-hash tag keyed by one pre-shared
//! key; a second pre-shared key hides |+⟩ decoy photons among the payload.
//! Both sides verify their checks and recycle the pre-shared keys only on
//! success.
//!
//! The crate provides:
//! - [`quantum`]: a dense pure-state simulator for up to 8 qubits;
//! - [`hashing`]: the GF(2^m) polynomial-evaluation hash family;
//! - [`protocol`]: the session state machines and per-session transcript;
//! - [`adversary`]: eavesdropper models, exact per-index detection and
//!   Holevo-information figures for collective attacks, and a constrained
//!   numerical search for the strongest attack under a detection budget;
//! - [`analysis`]: Monte-Carlo batch statistics, qubit efficiency, and the
//!   protocol comparison table.
//!
//! Every stochastic entry point takes an explicit seeded generator (or a
//! seed it splits per trial), so all results are bit-reproducible.

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod hashing;
pub(crate) mod linalg;
pub mod protocol;
pub mod quantum;
pub mod seeding;

pub use adversary::{AttackModel, CollectiveAttack};
pub use analysis::{run_batch, BatchStats, KeysPolicy};
pub use bits::BitString;
pub use protocol::{run_session, PreSharedKeys, RunOutcome, SessionConfig, Transcript};
pub use quantum::{Basis, PureState, UnitaryMatrix};
