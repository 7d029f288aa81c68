//! Ordered session event log with per-event resource costs.
//!
//! The transcript is the single source for resource accounting and for
//! byte-identical replay comparison. Classical bit costs are recorded only
//! on decode-enabling disclosures; classical traffic that belongs to
//! eavesdropping checks is never counted, matching the efficiency
//! accounting convention.

use serde::{Deserialize, Serialize};

use crate::check::CheckMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Charlie,
    Alice,
    Bob,
    Eve,
}

/// A tappable transmission link between two parties.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    CharlieToAlice,
    CharlieToBob,
    AliceToBob,
    BobToAlice,
}

impl Link {
    pub fn receiver(self) -> Actor {
        match self {
            Link::CharlieToAlice | Link::BobToAlice => Actor::Alice,
            Link::CharlieToBob | Link::AliceToBob => Actor::Bob,
        }
    }

    pub fn sender(self) -> Actor {
        match self {
            Link::CharlieToAlice | Link::CharlieToBob => Actor::Charlie,
            Link::AliceToBob => Actor::Alice,
            Link::BobToAlice => Actor::Bob,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Link::CharlieToAlice => "charlie-to-alice",
            Link::CharlieToBob => "charlie-to-bob",
            Link::AliceToBob => "alice-to-bob",
            Link::BobToAlice => "bob-to-alice",
        }
    }
}

/// Message direction; unidirectional sessions use `AliceToBob` throughout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

impl Direction {
    pub fn encoder(self) -> Actor {
        match self {
            Direction::AliceToBob => Actor::Alice,
            Direction::BobToAlice => Actor::Bob,
        }
    }

    pub fn decoder(self) -> Actor {
        match self {
            Direction::AliceToBob => Actor::Bob,
            Direction::BobToAlice => Actor::Alice,
        }
    }

    pub fn transfer_link(self) -> Link {
        match self {
            Direction::AliceToBob => Link::AliceToBob,
            Direction::BobToAlice => Link::BobToAlice,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "data", rename_all = "snake_case")]
pub enum EventKind {
    BlocksPrepared {
        family: String,
        blocks: usize,
        distributed_qubits: usize,
    },
    ControllerRetained {
        qubits: usize,
    },
    SequencePermuted {
        direction: Direction,
        length: usize,
    },
    DecoysInserted {
        link: Link,
        direction: Direction,
        mode: CheckMode,
        count: usize,
    },
    QubitsTransmitted {
        link: Link,
        direction: Direction,
        count: usize,
    },
    AttackApplied {
        link: Link,
        kind: String,
        affected: usize,
    },
    Acknowledged {
        link: Link,
        direction: Direction,
    },
    DecoyPositionsDisclosed {
        link: Link,
        direction: Direction,
        count: usize,
    },
    CheckCompleted {
        link: Link,
        direction: Direction,
        mode: CheckMode,
        compared: usize,
        mismatches: usize,
        error_rate: f64,
    },
    SessionAborted {
        link: Link,
        error_rate: f64,
        threshold: f64,
    },
    MessageEncoded {
        direction: Direction,
        subprotocol: String,
        bits: usize,
    },
    PermutationDisclosed {
        direction: Direction,
        length: usize,
    },
    OutcomesDisclosed {
        outcomes: Vec<String>,
    },
    MessageDecoded {
        direction: Direction,
        bits: usize,
        message_hex: String,
    },
    SessionCompleted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    pub actor: Actor,
    pub event: EventKind,
    pub qubit_cost: u64,
    pub classical_bit_cost: u64,
}

/// Complete ordered event log of one session.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_events(events: Vec<Event>) -> Self {
        Self { events }
    }

    pub fn record(&mut self, actor: Actor, event: EventKind) {
        self.record_with_costs(actor, event, 0, 0);
    }

    pub fn record_with_costs(
        &mut self,
        actor: Actor,
        event: EventKind,
        qubit_cost: u64,
        classical_bit_cost: u64,
    ) {
        self.events.push(Event {
            seq: self.events.len() as u64,
            actor,
            event,
            qubit_cost,
            classical_bit_cost,
        });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn is_complete(&self) -> bool {
        matches!(
            self.events.last().map(|e| &e.event),
            Some(EventKind::SessionCompleted) | Some(EventKind::SessionAborted { .. })
        )
    }

    pub fn contains_ack(&self, link: Link) -> bool {
        self.events
            .iter()
            .any(|e| matches!(&e.event, EventKind::Acknowledged { link: l, .. } if *l == link))
    }
}

/// Per-direction delivered message.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeliveredMessage {
    pub direction: Direction,
    pub bits: usize,
    pub hex: String,
}

/// Summary of one eavesdrop check, embedded in the session result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub link: Link,
    pub direction: Direction,
    pub mode: CheckMode,
    pub compared: usize,
    pub mismatches: usize,
    pub error_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionResult {
    pub delivered: Vec<DeliveredMessage>,
    pub abort: bool,
    pub abort_reason: Option<String>,
    pub checks: Vec<CheckSummary>,
}
