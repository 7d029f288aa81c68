//! Role state machines for the controlled secure-communication sessions.
//!
//! A session is a single-threaded deterministic execution: Charlie prepares
//! and distributes the entangled blocks (permuting the receiver-side
//! sequence for the permutation-of-particles protocols), every transmission
//! is checked for eavesdropping over interleaved decoys, the encoder applies
//! dense-coding gates and forwards its qubits, and the receiver can decode
//! only after Charlie's disclosure (the permutation, or his measurement
//! outcomes for the controlled-channel variant).

use crate::adversary::{apply_attack, AttackModel};
use crate::bits::bits_to_hex;
use crate::catalog::{
    bell_table_for_initial, dense_coding_table, make_controlled_state, make_swap_state,
    pp_table_for_initial, BellVariant, ChannelSpec, DenseCodingTable,
};
use crate::check::{bb84_check, gv_check, prepare_decoys, CheckMode};
use crate::error::{Error, Result};
use crate::protocol::config::{ProtocolKind, SessionConfig};
use crate::protocol::particle::{
    insert_items, ParticleRef, ParticleSequence, Permutation, SequenceItem,
};
use crate::protocol::register::{QubitId, Register};
use crate::protocol::transcript::{
    Actor, CheckSummary, DeliveredMessage, Direction, EventKind, Link, SessionResult, Transcript,
};
use crate::quantum::StateVector;
use crate::rng::SessionRng;

/// Message payload(s): one bit string per communication direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessagePayload {
    pub a_to_b: Vec<bool>,
    pub b_to_a: Option<Vec<bool>>,
}

impl MessagePayload {
    pub fn unidirectional(bits: Vec<bool>) -> Self {
        Self {
            a_to_b: bits,
            b_to_a: None,
        }
    }

    pub fn bidirectional(a_to_b: Vec<bool>, b_to_a: Vec<bool>) -> Self {
        Self {
            a_to_b,
            b_to_a: Some(b_to_a),
        }
    }

    /// Random payload of the exact capacity the config expects.
    pub fn random_for(config: &SessionConfig, rng: &mut SessionRng) -> Result<Self> {
        let bits = config.message_bits()?;
        Ok(Self {
            a_to_b: rng.random_bits(bits),
            b_to_a: if config.protocol == ProtocolKind::Cbdsqc {
                Some(rng.random_bits(bits))
            } else {
                None
            },
        })
    }
}

/// Transcript plus final result of one completed session.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub result: SessionResult,
}

/// Qubit handles of one resource block, split by role.
#[derive(Debug, Clone)]
pub struct BlockHandles {
    pub enc: Vec<QubitId>,
    pub rec: Vec<QubitId>,
    pub ctrl: Option<QubitId>,
    /// Cat blocks beyond the simulable size hold no amplitudes; their
    /// dense coding is accounted for classically.
    pub symbolic: bool,
}

#[derive(Debug)]
struct DirectionState {
    direction: Direction,
    block_start: usize,
    block_count: usize,
    enc_seq: ParticleSequence,
    rec_seq: ParticleSequence,
    permutation: Option<Permutation>,
    encoded: Option<Vec<bool>>,
    branch_labels: Option<Vec<String>>,
    disclosed: bool,
    decoded: Option<Vec<bool>>,
}

/// One protocol session in progress.
pub struct Session {
    config: SessionConfig,
    attacks: Vec<AttackModel>,
    messages: Vec<Vec<bool>>,
    rng: SessionRng,
    register: Register,
    transcript: Transcript,
    checks: Vec<CheckSummary>,
    blocks: Vec<BlockHandles>,
    dirs: Vec<DirectionState>,
    table: Option<DenseCodingTable>,
    abort: Option<(Link, f64)>,
    next_decoy: usize,
    eve_records: Vec<(Link, String)>,
    prepared: bool,
}

/// Run a full session: preparation, distribution, encoding transfer,
/// disclosure and decoding, with the configured adversary at its tap.
pub fn run_session(
    config: &SessionConfig,
    payload: &MessagePayload,
    attacks: &[AttackModel],
) -> Result<SessionOutcome> {
    let mut session = Session::new(config, payload, attacks)?;
    session.prepare()?;
    if session.distribute()? && session.encode_and_transfer()? {
        session.disclose()?;
        session.decode()?;
    }
    Ok(session.finish())
}

impl Session {
    pub fn new(
        config: &SessionConfig,
        payload: &MessagePayload,
        attacks: &[AttackModel],
    ) -> Result<Self> {
        config.validate()?;
        let expected = config.message_bits()?;
        if payload.a_to_b.len() != expected {
            return Err(Error::MessageLength {
                expected,
                got: payload.a_to_b.len(),
            });
        }
        let mut messages = vec![payload.a_to_b.clone()];
        match (&config.protocol, &payload.b_to_a) {
            (ProtocolKind::Cbdsqc, Some(back)) => {
                if back.len() != expected {
                    return Err(Error::MessageLength {
                        expected,
                        got: back.len(),
                    });
                }
                messages.push(back.clone());
            }
            (ProtocolKind::Cbdsqc, None) => {
                return Err(Error::InvalidConfig(
                    "cbdsqc needs a message for each direction".to_string(),
                ))
            }
            (_, Some(_)) => {
                return Err(Error::InvalidConfig(
                    "second message given for a unidirectional protocol".to_string(),
                ))
            }
            _ => {}
        }
        for model in attacks {
            if !(0.0..=1.0).contains(&model.probability) {
                return Err(Error::InvalidConfig(format!(
                    "attack probability must lie in [0, 1], got {}",
                    model.probability
                )));
            }
            if model.is_active() && matches!(config.channel, ChannelSpec::Cat { .. }) {
                return Err(Error::InvalidConfig(
                    "attacks tap cat-channel blocks, which are tracked symbolically".to_string(),
                ));
            }
        }
        Ok(Self {
            config: config.clone(),
            attacks: attacks.to_vec(),
            messages,
            rng: SessionRng::new(config.seed),
            register: Register::new(),
            transcript: Transcript::new(),
            checks: Vec::new(),
            blocks: Vec::new(),
            dirs: Vec::new(),
            table: None,
            abort: None,
            next_decoy: 0,
            eve_records: Vec::new(),
            prepared: false,
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.config
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn blocks(&self) -> &[BlockHandles] {
        &self.blocks
    }

    pub fn register_mut(&mut self) -> &mut Register {
        &mut self.register
    }

    /// Charlie's private permutation for a direction (test access).
    pub fn permutation(&self, dir: usize) -> Option<&Permutation> {
        self.dirs.get(dir).and_then(|d| d.permutation.as_ref())
    }

    /// Current encoder-side and receiver-side sequences of a direction.
    pub fn sequences(&self, dir: usize) -> (&ParticleSequence, &ParticleSequence) {
        (&self.dirs[dir].enc_seq, &self.dirs[dir].rec_seq)
    }

    pub fn eve_records(&self) -> &[(Link, String)] {
        &self.eve_records
    }

    pub fn aborted(&self) -> bool {
        self.abort.is_some()
    }

    fn block_state(&self) -> Result<Option<StateVector>> {
        Ok(match &self.config.channel {
            ChannelSpec::Bell => Some(BellVariant::PsiPlus.state()),
            ChannelSpec::GhzLike { .. } => Some(make_controlled_state(&self.config.channel)?),
            ChannelSpec::NQubitDense { state, .. } => Some(state.clone()),
            ChannelSpec::Swap { .. } | ChannelSpec::SwapCustom { .. } => {
                Some(make_swap_state(&self.config.channel)?)
            }
            ChannelSpec::Cat { .. } => None,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "channel `{other}` is not usable in sessions"
                )))
            }
        })
    }

    /// Step 1/2: prepare all blocks, build the ordered sequences, permute
    /// the receiver-side sequences.
    pub fn prepare(&mut self) -> Result<()> {
        assert!(!self.prepared, "session already prepared");
        self.prepared = true;

        let enc_per_block = self.config.encoder_qubits_per_block()?;
        let rec_per_block = self.config.receiver_qubits_per_block()?;
        let ctrl_per_block = self.config.controller_qubits_per_block();
        let template = self.block_state()?;

        let directions: Vec<Direction> = if self.config.protocol == ProtocolKind::Cbdsqc {
            vec![Direction::AliceToBob, Direction::BobToAlice]
        } else {
            vec![Direction::AliceToBob]
        };
        let total_blocks = self.config.n * directions.len();

        for (d, _) in directions.iter().enumerate() {
            for _ in 0..self.config.n {
                let ids = match &template {
                    Some(state) => self.register.alloc_block(state.clone()),
                    None => self
                        .register
                        .alloc_virtual(self.config.channel.block_qubits()),
                };
                // For the reverse direction of a Bell pair the roles swap:
                // the encoder holds the second qubit of each pair.
                let (enc, rec): (Vec<QubitId>, Vec<QubitId>) = if d == 1 {
                    (
                        ids[enc_per_block..enc_per_block + rec_per_block].to_vec(),
                        ids[..enc_per_block].to_vec(),
                    )
                } else {
                    (
                        ids[..enc_per_block].to_vec(),
                        ids[enc_per_block..enc_per_block + rec_per_block].to_vec(),
                    )
                };
                let ctrl = (ctrl_per_block == 1).then(|| ids[ids.len() - 1]);
                self.blocks.push(BlockHandles {
                    enc,
                    rec,
                    ctrl,
                    symbolic: template.is_none(),
                });
            }
        }

        let distributed = total_blocks * (self.config.channel.block_qubits() - ctrl_per_block);
        self.transcript.record_with_costs(
            Actor::Charlie,
            EventKind::BlocksPrepared {
                family: self.config.channel.family().to_string(),
                blocks: total_blocks,
                distributed_qubits: distributed,
            },
            distributed as u64,
            0,
        );
        if ctrl_per_block > 0 {
            self.transcript.record_with_costs(
                Actor::Charlie,
                EventKind::ControllerRetained {
                    qubits: total_blocks,
                },
                total_blocks as u64,
                0,
            );
        }

        for (d, &direction) in directions.iter().enumerate() {
            let start = d * self.config.n;
            let mut enc_items = Vec::new();
            let mut rec_items = Vec::new();
            for local in 0..self.config.n {
                let block = start + local;
                for (slot, &qubit) in self.blocks[block].enc.iter().enumerate() {
                    enc_items.push(SequenceItem {
                        particle: ParticleRef::Message { block, slot },
                        qubit,
                    });
                }
                for (slot, &qubit) in self.blocks[block].rec.iter().enumerate() {
                    rec_items.push(SequenceItem {
                        particle: ParticleRef::Message {
                            block,
                            slot: enc_per_block + slot,
                        },
                        qubit,
                    });
                }
            }
            let enc_seq = ParticleSequence::new(enc_items)?;
            let rec_base = ParticleSequence::new(rec_items)?;

            let (rec_seq, permutation) = if self.config.protocol == ProtocolKind::CdsqcAlt3 {
                (rec_base, None)
            } else {
                let pi = Permutation::new(self.rng.permutation_mapping(rec_base.len()))?;
                let permuted = pi.apply_sequence(&rec_base)?;
                self.transcript.record(
                    Actor::Charlie,
                    EventKind::SequencePermuted {
                        direction,
                        length: pi.len(),
                    },
                );
                (permuted, Some(pi))
            };

            self.dirs.push(DirectionState {
                direction,
                block_start: start,
                block_count: self.config.n,
                enc_seq,
                rec_seq,
                permutation,
                encoded: None,
                branch_labels: None,
                disclosed: false,
                decoded: None,
            });
        }
        Ok(())
    }

    fn charlie_link(&self, to: Actor) -> Link {
        match to {
            Actor::Alice => Link::CharlieToAlice,
            Actor::Bob => Link::CharlieToBob,
            _ => unreachable!("charlie distributes to alice and bob"),
        }
    }

    /// Step 3/4: send each distribution sequence with interleaved decoys
    /// and run the configured eavesdrop check. Returns false on abort.
    pub fn distribute(&mut self) -> Result<bool> {
        let mode = self.config.check;
        for d in 0..self.dirs.len() {
            let direction = self.dirs[d].direction;
            let enc_link = self.charlie_link(direction.encoder());
            let rec_link = self.charlie_link(direction.decoder());

            let mut seq = std::mem::take(&mut self.dirs[d].enc_seq);
            let passed =
                self.transmit_checked(&mut seq, Actor::Charlie, enc_link, direction, mode)?;
            self.dirs[d].enc_seq = seq;
            if !passed {
                return Ok(false);
            }

            let mut seq = std::mem::take(&mut self.dirs[d].rec_seq);
            let passed =
                self.transmit_checked(&mut seq, Actor::Charlie, rec_link, direction, mode)?;
            self.dirs[d].rec_seq = seq;
            if !passed {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One link transmission: decoys in, attack tap, acknowledgment,
    /// position disclosure, decoy extraction, check. Returns false on abort.
    fn transmit_checked(
        &mut self,
        seq: &mut ParticleSequence,
        sender: Actor,
        link: Link,
        direction: Direction,
        mode: CheckMode,
    ) -> Result<bool> {
        let count = self.config.decoy_count(seq.len());
        let batch = prepare_decoys(&mut self.register, mode, count, &mut self.rng)?;
        let items: Vec<SequenceItem> = batch
            .qubits()
            .into_iter()
            .map(|qubit| {
                let id = self.next_decoy;
                self.next_decoy += 1;
                SequenceItem {
                    particle: ParticleRef::Decoy { id },
                    qubit,
                }
            })
            .collect();
        let positions = insert_items(seq, items, &mut self.rng);
        self.transcript.record_with_costs(
            sender,
            EventKind::DecoysInserted {
                link,
                direction,
                mode,
                count,
            },
            count as u64,
            0,
        );
        self.transcript.record(
            sender,
            EventKind::QubitsTransmitted {
                link,
                direction,
                count: seq.len(),
            },
        );

        let in_flight = seq.qubits();
        for model in self.attacks.clone() {
            let outcome =
                apply_attack(&model, link, &in_flight, &mut self.register, &mut self.rng)?;
            if outcome.affected > 0 {
                self.transcript.record(
                    Actor::Eve,
                    EventKind::AttackApplied {
                        link,
                        kind: model.kind.label().to_string(),
                        affected: outcome.affected,
                    },
                );
                for label in outcome.eve_outcomes {
                    self.eve_records.push((link, label));
                }
            }
        }

        // Authenticated acknowledgment, then position disclosure; both are
        // check traffic and carry no decode-classical cost.
        let receiver = link.receiver();
        self.transcript
            .record(receiver, EventKind::Acknowledged { link, direction });
        self.transcript.record(
            sender,
            EventKind::DecoyPositionsDisclosed {
                link,
                direction,
                count: positions.len(),
            },
        );
        let _extracted = seq.remove_positions(&positions);

        let report = match mode {
            CheckMode::Bb84 => bb84_check(&mut self.register, &batch, &mut self.rng)?,
            CheckMode::Gv => {
                let acknowledged = self.transcript.contains_ack(link);
                gv_check(&mut self.register, &batch, acknowledged, &mut self.rng)?
            }
        };
        self.transcript.record(
            receiver,
            EventKind::CheckCompleted {
                link,
                direction,
                mode,
                compared: report.compared,
                mismatches: report.mismatches,
                error_rate: report.error_rate,
            },
        );
        self.checks.push(CheckSummary {
            link,
            direction,
            mode,
            compared: report.compared,
            mismatches: report.mismatches,
            error_rate: report.error_rate,
        });

        if report.error_rate > self.config.error_threshold {
            self.transcript.record(
                receiver,
                EventKind::SessionAborted {
                    link,
                    error_rate: report.error_rate,
                    threshold: self.config.error_threshold,
                },
            );
            self.abort = Some((link, report.error_rate));
            return Ok(false);
        }
        Ok(true)
    }

    fn encoding_table(&mut self) -> Result<&DenseCodingTable> {
        if self.table.is_none() {
            let table = match (&self.config.protocol, &self.config.channel) {
                (ProtocolKind::Cdsqc | ProtocolKind::Cbdsqc, ChannelSpec::Bell) => {
                    if self.config.subprotocol.is_pp() {
                        pp_table_for_initial(BellVariant::PsiPlus)?
                    } else {
                        bell_table_for_initial(BellVariant::PsiPlus)?
                    }
                }
                // The controlled channel encodes with the Bell-pair gate set;
                // decoding picks the branch table after disclosure.
                (ProtocolKind::CdsqcAlt3, ChannelSpec::GhzLike { .. }) => {
                    bell_table_for_initial(BellVariant::PsiPlus)?
                }
                _ => dense_coding_table(&self.config.channel)?,
            };
            self.table = Some(table);
        }
        Ok(self.table.as_ref().expect("just set"))
    }

    /// Step 5: encode each direction's message and transfer the encoder's
    /// qubits with fresh decoys. Returns false on abort.
    pub fn encode_and_transfer(&mut self) -> Result<bool> {
        let bits_per_block = self.config.bits_per_block()?;
        let transfer_mode = self.config.subprotocol.transfer_check();
        for d in 0..self.dirs.len() {
            let direction = self.dirs[d].direction;
            let bits = self.messages[d].clone();
            self.transcript.record(
                direction.encoder(),
                EventKind::MessageEncoded {
                    direction,
                    subprotocol: self.config.subprotocol.label().to_string(),
                    bits: bits.len(),
                },
            );
            let symbolic = matches!(self.config.channel, ChannelSpec::Cat { .. });
            if !symbolic {
                let table = self.encoding_table()?.clone();
                for local in 0..self.dirs[d].block_count {
                    let block = self.dirs[d].block_start + local;
                    let chunk = &bits[local * bits_per_block..(local + 1) * bits_per_block];
                    let gate = table.gate_for(chunk)?;
                    let targets = self.blocks[block].enc.clone();
                    self.register.apply_gate(gate, &targets)?;
                }
            }
            self.dirs[d].encoded = Some(bits);

            let mut seq = std::mem::take(&mut self.dirs[d].enc_seq);
            let passed = self.transmit_checked(
                &mut seq,
                direction.encoder(),
                direction.transfer_link(),
                direction,
                transfer_mode,
            )?;
            self.dirs[d].enc_seq = seq;
            if !passed {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Step 6: Charlie releases decoding — permutation(s) for the
    /// permutation-of-particles protocols, his measurement outcomes for the
    /// controlled channel.
    pub fn disclose(&mut self) -> Result<()> {
        if self.config.protocol == ProtocolKind::CdsqcAlt3 {
            let mut outcomes = Vec::with_capacity(self.config.n);
            for d in 0..self.dirs.len() {
                for local in 0..self.dirs[d].block_count {
                    let block = self.dirs[d].block_start + local;
                    let label = match (self.blocks[block].symbolic, self.blocks[block].ctrl) {
                        (false, Some(ctrl)) => {
                            let basis = crate::catalog::control_basis(&self.config.channel)?;
                            self.register.measure(&basis, &[ctrl], &mut self.rng)?
                        }
                        // Symbolic cat block: both branches carry exactly
                        // probability 1/2.
                        _ => if self.rng.bit() { "b" } else { "a" }.to_string(),
                    };
                    outcomes.push(label);
                }
                self.dirs[d].branch_labels = Some(outcomes.clone());
                self.dirs[d].disclosed = true;
            }
            let cost = outcomes.len() as u64;
            self.transcript.record_with_costs(
                Actor::Charlie,
                EventKind::OutcomesDisclosed { outcomes },
                0,
                cost,
            );
        } else {
            for d in 0..self.dirs.len() {
                let direction = self.dirs[d].direction;
                let length = self.dirs[d]
                    .permutation
                    .as_ref()
                    .map(|p| p.len())
                    .unwrap_or(0);
                self.transcript.record_with_costs(
                    Actor::Charlie,
                    EventKind::PermutationDisclosed { direction, length },
                    0,
                    length as u64,
                );
                self.dirs[d].disclosed = true;
            }
        }
        Ok(())
    }

    /// Step 7: the receiver reorders via the disclosed permutation (or
    /// selects the branch table from Charlie's outcome), measures each
    /// block jointly and maps outcomes back to message bits.
    pub fn decode(&mut self) -> Result<()> {
        for d in 0..self.dirs.len() {
            if !self.dirs[d].disclosed {
                return Err(Error::DisclosureMissing(
                    "decode attempted before Charlie's disclosure".to_string(),
                ));
            }
            let direction = self.dirs[d].direction;
            let bits = match (&self.config.protocol, &self.config.channel) {
                (ProtocolKind::CdsqcAlt3, ChannelSpec::Cat { .. }) => {
                    self.dirs[d].encoded.clone().expect("encode phase ran")
                }
                (ProtocolKind::CdsqcAlt3, _) => self.decode_alt3(d)?,
                _ => {
                    let pairing = self.dirs[d]
                        .permutation
                        .clone()
                        .expect("pop protocols hold a permutation");
                    self.decode_with_pairing(d, &pairing)?
                }
            };
            let hex = bits_to_hex(&bits);
            self.transcript.record(
                direction.decoder(),
                EventKind::MessageDecoded {
                    direction,
                    bits: bits.len(),
                    message_hex: hex,
                },
            );
            self.dirs[d].decoded = Some(bits);
        }
        Ok(())
    }

    fn decode_alt3(&mut self, d: usize) -> Result<Vec<bool>> {
        let ChannelSpec::GhzLike { psi1, psi2, .. } = self.config.channel else {
            return Err(Error::InvalidConfig(
                "alt3 decoding requires a controlled channel".to_string(),
            ));
        };
        let labels = self.dirs[d]
            .branch_labels
            .clone()
            .ok_or_else(|| Error::DisclosureMissing("no branch outcomes".to_string()))?;
        let mut bits = Vec::new();
        for (local, outcome) in labels.iter().enumerate().take(self.dirs[d].block_count) {
            let block = self.dirs[d].block_start + local;
            let branch = match outcome.as_str() {
                "a" => psi1,
                _ => psi2,
            };
            let table = bell_table_for_initial(branch)?;
            let qubits = [self.blocks[block].enc[0], self.blocks[block].rec[0]];
            let label = self
                .register
                .measure(table.decode_basis(), &qubits, &mut self.rng)?;
            let chunk = table.decode(&label).ok_or_else(|| {
                Error::ConditionViolation(format!("outcome {label} has no decode entry"))
            })?;
            bits.extend(chunk);
        }
        Ok(bits)
    }

    /// Joint per-block measurement after restoring the receiver sequence
    /// with `pairing` (the honest decode passes Charlie's permutation; the
    /// control-property experiments pass a wrong guess).
    pub fn decode_with_pairing(&mut self, d: usize, pairing: &Permutation) -> Result<Vec<bool>> {
        let table = self.encoding_table()?.clone();
        let restored = pairing.inverse().apply_sequence(&self.dirs[d].rec_seq)?;
        let rec_per_block = self.config.receiver_qubits_per_block()?;
        let mut bits = Vec::new();
        for local in 0..self.dirs[d].block_count {
            let block = self.dirs[d].block_start + local;
            let mut qubits = self.blocks[block].enc.clone();
            for r in 0..rec_per_block {
                qubits.push(restored.get(local * rec_per_block + r).qubit);
            }
            let label = self
                .register
                .measure(table.decode_basis(), &qubits, &mut self.rng)?;
            let chunk = table.decode(&label).ok_or_else(|| {
                Error::ConditionViolation(format!("outcome {label} has no decode entry"))
            })?;
            bits.extend(chunk);
        }
        Ok(bits)
    }

    /// Close the transcript and assemble the result.
    pub fn finish(mut self) -> SessionOutcome {
        let mut delivered = Vec::new();
        if self.abort.is_none() {
            for d in &self.dirs {
                if let Some(bits) = &d.decoded {
                    delivered.push(DeliveredMessage {
                        direction: d.direction,
                        bits: bits.len(),
                        hex: bits_to_hex(bits),
                    });
                }
            }
            self.transcript
                .record(Actor::Charlie, EventKind::SessionCompleted);
        }
        let (abort, abort_reason) = match self.abort {
            Some((link, rate)) => (
                true,
                Some(format!(
                    "error rate {rate:.4} on {} exceeded threshold {}",
                    link.label(),
                    self.config.error_threshold
                )),
            ),
            None => (false, None),
        };
        SessionOutcome {
            transcript: self.transcript,
            result: SessionResult {
                delivered,
                abort,
                abort_reason,
                checks: self.checks,
            },
        }
    }
}
