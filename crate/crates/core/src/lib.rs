//! Vertical federated learning protocol lab.
//!
//! The crate simulates a small group of parties that hold disjoint feature
//! columns of the same samples and jointly train a split neural network.
//! Two cut-layer protocols are provided:
//!
//! * **Concat** — the classic SplitNN wiring: every passive party ships its
//!   bottom-model output to the active party in the clear, where the pieces
//!   are concatenated and fed to the top model.
//! * **SfaSum** — Secure Forward Aggregation: the cut layer becomes a
//!   summation, and every bottom output that crosses the wire is hidden by an
//!   additive one-time mask derived from a Paillier-encrypted weight block.
//!   The masks cancel in the aggregate, so the sum the active party sees is
//!   exactly what a centralized model would have computed.
//!
//! All traffic flows through an in-process transport that records a
//! [`protocol::Transcript`]; the transcript is the surface audited by
//! [`protocol::transcript_audit`]. A generative-regression-network attack
//! harness ([`attack`]) measures how much of a passive party's raw features
//! an honest-but-curious active party can reconstruct from its view under
//! either protocol.
//!
//! Modules:
//!
//! * [`numeric`] — dense matrices, MLPs, losses, backprop, SGD.
//! * [`he`] — Paillier encryption, a signed fixed-point codec, and the
//!   encrypted matrix product used for mask generation.
//! * [`protocol`] — party state machines, message schema, transcripts,
//!   the two forward protocols, and the transcript audit.
//! * [`training`] — end-to-end VFL training plus the centralized oracle
//!   model and the trajectory-equivalence check.
//! * [`attack`] — the GRN feature-inference attack and the trade-off sweep.
//! * [`data`] — CSV ingestion and synthetic task generation.

pub mod attack;
pub mod data;
pub mod error;
pub mod he;
pub mod numeric;
pub mod protocol;
pub mod rng;
pub mod training;

pub use error::{Error, Result};
