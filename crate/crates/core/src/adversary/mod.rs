//! Pluggable attack models applied at channel tap points.

pub mod semi_honest;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::register::{QubitId, Register};
use crate::protocol::transcript::Link;
use crate::quantum::MeasurementBasis;
use crate::rng::SessionRng;

pub use semi_honest::{run_semi_honest_scenario, SemiHonestFlow, SemiHonestOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    None,
    /// Measure each in-flight qubit in a random conjugate basis and
    /// forward the collapsed state.
    InterceptResendRandomBasis,
    /// Measure each in-flight qubit in the computational basis.
    InterceptResendComputational,
    /// Bell-measure transmitted qubits under Eve's guessed pairing,
    /// forwarding the post-measurement states.
    BellPairing,
}

impl AttackKind {
    pub fn label(self) -> &'static str {
        match self {
            AttackKind::None => "none",
            AttackKind::InterceptResendRandomBasis => "intercept-resend",
            AttackKind::InterceptResendComputational => "intercept-resend-z",
            AttackKind::BellPairing => "bell-pairing",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "none" => Some(AttackKind::None),
            "intercept-resend" => Some(AttackKind::InterceptResendRandomBasis),
            "intercept-resend-z" => Some(AttackKind::InterceptResendComputational),
            "bell-pairing" => Some(AttackKind::BellPairing),
            _ => None,
        }
    }
}

/// Where Eve taps: one link, always after decoy insertion, so she sees the
/// transmitted sequence but never the private metadata (decoy positions,
/// permutations, pairings).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapPoint {
    pub link: Link,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttackModel {
    pub kind: AttackKind,
    pub tap: TapPoint,
    /// Per-qubit (intercept-resend) or per-pair (bell-pairing) attack
    /// probability.
    pub probability: f64,
    /// Start offset of Eve's adjacent pairing guess.
    pub pairing_offset: usize,
}

impl AttackModel {
    pub fn none() -> Self {
        Self {
            kind: AttackKind::None,
            tap: TapPoint {
                link: Link::CharlieToAlice,
            },
            probability: 0.0,
            pairing_offset: 0,
        }
    }

    pub fn intercept_resend(link: Link, probability: f64) -> Self {
        Self {
            kind: AttackKind::InterceptResendRandomBasis,
            tap: TapPoint { link },
            probability,
            pairing_offset: 0,
        }
    }

    pub fn bell_pairing(link: Link, probability: f64) -> Self {
        Self {
            kind: AttackKind::BellPairing,
            tap: TapPoint { link },
            probability,
            pairing_offset: 0,
        }
    }

    pub fn is_active(&self) -> bool {
        self.kind != AttackKind::None && self.probability > 0.0
    }
}

/// What Eve did to one transmission, with her outcome labels (used by the
/// leakage analysis).
#[derive(Debug, Clone, Default)]
pub struct AttackOutcome {
    pub affected: usize,
    pub eve_outcomes: Vec<String>,
}

/// Apply `model` to the in-flight qubits of its tap. Mutates the register
/// (Eve's measurements collapse the forwarded states).
pub fn apply_attack(
    model: &AttackModel,
    link: Link,
    in_flight: &[QubitId],
    register: &mut Register,
    rng: &mut SessionRng,
) -> Result<AttackOutcome> {
    if model.kind == AttackKind::None || model.tap.link != link {
        return Ok(AttackOutcome::default());
    }
    if !(0.0..=1.0).contains(&model.probability) {
        return Err(Error::InvalidConfig(format!(
            "attack probability must lie in [0, 1], got {}",
            model.probability
        )));
    }
    let mut outcome = AttackOutcome::default();
    match model.kind {
        AttackKind::None => {}
        AttackKind::InterceptResendRandomBasis | AttackKind::InterceptResendComputational => {
            let computational = MeasurementBasis::computational(1);
            let diagonal = MeasurementBasis::diagonal();
            for &qubit in in_flight {
                if !rng.bool_with_prob(model.probability) {
                    continue;
                }
                let use_diagonal =
                    model.kind == AttackKind::InterceptResendRandomBasis && rng.bit();
                let basis = if use_diagonal {
                    &diagonal
                } else {
                    &computational
                };
                let label = register.measure(basis, &[qubit], rng)?;
                outcome.affected += 1;
                outcome.eve_outcomes.push(label);
            }
        }
        AttackKind::BellPairing => {
            let bell = MeasurementBasis::bell();
            let mut index = model.pairing_offset;
            while index + 1 < in_flight.len() {
                let pair = [in_flight[index], in_flight[index + 1]];
                if rng.bool_with_prob(model.probability) {
                    let label = register.measure(&bell, &pair, rng)?;
                    outcome.affected += 1;
                    outcome.eve_outcomes.push(label);
                }
                index += 2;
            }
        }
    }
    Ok(outcome)
}
