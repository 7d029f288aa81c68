//! Internal-attack scenario: a semi-honest Alice tries to escape the
//! controller.
//!
//! In a flow where Alice prepares the channel herself and hands the
//! controller a separable qubit (the style of the protocol this one
//! improves on), she knows the full pairing and Bob decodes without any
//! disclosure. When the controller prepares and permutes the channel, the
//! same script leaves Bob pairing blind: his pre-disclosure accuracy sits
//! at chance.

use crate::catalog::{bell_table_for_initial, make_bell, BellVariant, ChannelSpec};
use crate::error::Result;
use crate::protocol::config::{ProtocolKind, SessionConfig};
use crate::protocol::particle::Permutation;
use crate::protocol::register::Register;
use crate::protocol::session::{MessagePayload, Session};
use crate::protocol::transcript::{Actor, Direction, EventKind, Transcript};
use crate::rng::SessionRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemiHonestFlow {
    /// Alice prepares the entangled pairs; the controller holds only a
    /// separable qubit she supplied.
    HhStyleAlicePrepares,
    /// The controller prepares and permutes the channel.
    ProposedCharliePrepares,
}

#[derive(Debug, Clone)]
pub struct SemiHonestOutcome {
    pub control_bypassed: bool,
    /// Fraction of correctly decoded 2-bit symbols before any disclosure,
    /// over the wrongly paired blocks.
    pub pre_disclosure_accuracy: f64,
    pub evidence: Transcript,
}

/// Run the internal-attack scenario with `blocks` two-bit symbols.
pub fn run_semi_honest_scenario(
    flow: SemiHonestFlow,
    blocks: usize,
    seed: u64,
) -> Result<SemiHonestOutcome> {
    match flow {
        SemiHonestFlow::HhStyleAlicePrepares => hh_style(blocks, seed),
        SemiHonestFlow::ProposedCharliePrepares => proposed(blocks, seed),
    }
}

fn hh_style(blocks: usize, seed: u64) -> Result<SemiHonestOutcome> {
    let mut rng = SessionRng::new(seed);
    let mut register = Register::new();
    let mut transcript = Transcript::new();
    let message = rng.random_bits(2 * blocks);
    let table = bell_table_for_initial(BellVariant::PsiPlus)?;

    // Alice prepares every Bell pair herself; Charlie is handed a separable
    // qubit and never learns the pairing, because there is none to hide
    // from Alice.
    let mut pairs = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        pairs.push(register.alloc_block(make_bell(BellVariant::PsiPlus)));
    }
    let _charlie_qubit = register.alloc_block(crate::quantum::StateVector::zero());
    transcript.record_with_costs(
        Actor::Alice,
        EventKind::BlocksPrepared {
            family: "bell".to_string(),
            blocks,
            distributed_qubits: 2 * blocks,
        },
        2 * blocks as u64,
        0,
    );
    transcript.record(
        Actor::Alice,
        EventKind::MessageEncoded {
            direction: Direction::AliceToBob,
            subprotocol: "cl".to_string(),
            bits: message.len(),
        },
    );

    let mut decoded = Vec::with_capacity(message.len());
    for (i, pair) in pairs.iter().enumerate() {
        let chunk = &message[2 * i..2 * i + 2];
        let gate = table.gate_for(chunk)?;
        register.apply_gate(gate, &[pair[0]])?;
        // Bob measures with Alice's pairing knowledge; no controller
        // disclosure exists anywhere in this transcript.
        let label = register.measure(table.decode_basis(), pair, &mut rng)?;
        decoded.extend(table.decode(&label).expect("bell outcome"));
    }
    let bypassed = decoded == message;
    let accuracy = symbol_accuracy(&message, &decoded);
    transcript.record(
        Actor::Bob,
        EventKind::MessageDecoded {
            direction: Direction::AliceToBob,
            bits: decoded.len(),
            message_hex: crate::bits::bits_to_hex(&decoded),
        },
    );
    Ok(SemiHonestOutcome {
        control_bypassed: bypassed,
        pre_disclosure_accuracy: accuracy,
        evidence: transcript,
    })
}

fn proposed(blocks: usize, seed: u64) -> Result<SemiHonestOutcome> {
    // Run the proposed flow in batches and let Bob decode before any
    // disclosure with his best guess (identity pairing). Accuracy is scored
    // over the blocks where the guess misses Charlie's permutation.
    let per_session = 4usize;
    let sessions = blocks.div_ceil(per_session);
    let mut wrong = 0usize;
    let mut correct_on_wrong = 0usize;
    let mut evidence = Transcript::new();

    for s in 0..sessions {
        let config = SessionConfig::new(
            ProtocolKind::Cdsqc,
            ChannelSpec::Bell,
            per_session,
            seed.wrapping_add(s as u64),
        );
        let mut rng = SessionRng::new(!seed ^ s as u64);
        let message = rng.random_bits(2 * per_session);
        let payload = MessagePayload::unidirectional(message.clone());
        let mut session = Session::new(&config, &payload, &[])?;
        session.prepare()?;
        if !(session.distribute()? && session.encode_and_transfer()?) {
            continue;
        }
        let truth = session.permutation(0).expect("pop session").clone();
        let guess = Permutation::identity(per_session);
        let decoded = session.decode_with_pairing(0, &guess)?;
        for i in 0..per_session {
            if truth.source_of(i) != i {
                wrong += 1;
                if decoded[2 * i..2 * i + 2] == message[2 * i..2 * i + 2] {
                    correct_on_wrong += 1;
                }
            }
        }
        if s == 0 {
            evidence = session.transcript().clone();
        }
    }
    let accuracy = if wrong > 0 {
        correct_on_wrong as f64 / wrong as f64
    } else {
        0.0
    };
    Ok(SemiHonestOutcome {
        // Chance-level accuracy means the script failed to communicate.
        control_bypassed: accuracy > 0.9,
        pre_disclosure_accuracy: accuracy,
        evidence,
    })
}

fn symbol_accuracy(sent: &[bool], got: &[bool]) -> f64 {
    let symbols = sent.len() / 2;
    if symbols == 0 {
        return 0.0;
    }
    let hits = (0..symbols)
        .filter(|&i| sent[2 * i..2 * i + 2] == got[2 * i..2 * i + 2])
        .count();
    hits as f64 / symbols as f64
}
