//! Protocol engine: session configuration, particle bookkeeping, the
//! qubit register and the role state machines.

pub mod config;
pub mod particle;
pub mod register;
pub mod session;
pub mod transcript;

pub use config::{ProtocolKind, SessionConfig, Subprotocol};
pub use particle::{insert_items, ParticleRef, ParticleSequence, Permutation, SequenceItem};
pub use register::{QubitId, Register};
pub use session::{run_session, MessagePayload, Session, SessionOutcome};
pub use transcript::{
    Actor, CheckSummary, DeliveredMessage, Direction, Event, EventKind, Link, SessionResult,
    Transcript,
};
