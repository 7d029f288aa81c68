//! Eavesdrop-check subroutines over decoy qubits.
//!
//! Two interchangeable link checkers: conjugate-coding verification over
//! {|0⟩,|1⟩,|+⟩,|−⟩} decoys (BB84 subroutine) and orthogonal-state
//! verification over |ψ+⟩ decoy pairs whose partner positions stay secret
//! until disclosure (GV subroutine). A wrong-pair Bell measurement by an
//! eavesdropper swaps entanglement and shows up as non-ψ+ outcomes.

use serde::{Deserialize, Serialize};

use crate::catalog::{make_bell, BellVariant};
use crate::error::{Error, Result};
use crate::protocol::register::{QubitId, Register};
use crate::quantum::{MeasurementBasis, StateVector};
use crate::rng::SessionRng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    Bb84,
    Gv,
}

impl CheckMode {
    pub fn label(self) -> &'static str {
        match self {
            CheckMode::Bb84 => "bb84",
            CheckMode::Gv => "gv",
        }
    }
}

/// Conjugate coding basis of a BB84 decoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConjugateBasis {
    Computational,
    Diagonal,
}

/// Preparation record of one decoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoyPrep {
    /// Single qubit prepared as one of {|0⟩, |1⟩, |+⟩, |−⟩}.
    Bb84 {
        basis: ConjugateBasis,
        value: bool,
        qubit: QubitId,
    },
    /// One |ψ+⟩ pair; both qubits travel on the same link at independent
    /// positions.
    GvPair { first: QubitId, second: QubitId },
}

/// The decoys of one link transmission, with preparation metadata held by
/// the sender until disclosure.
#[derive(Debug, Clone)]
pub struct DecoyBatch {
    pub mode: CheckMode,
    pub items: Vec<DecoyPrep>,
}

impl DecoyBatch {
    /// Number of physical decoy qubits in the batch.
    pub fn qubit_count(&self) -> usize {
        self.items
            .iter()
            .map(|d| match d {
                DecoyPrep::Bb84 { .. } => 1,
                DecoyPrep::GvPair { .. } => 2,
            })
            .sum()
    }

    /// Decoy qubit handles in insertion order.
    pub fn qubits(&self) -> Vec<QubitId> {
        let mut out = Vec::with_capacity(self.qubit_count());
        for d in &self.items {
            match d {
                DecoyPrep::Bb84 { qubit, .. } => out.push(*qubit),
                DecoyPrep::GvPair { first, second } => {
                    out.push(*first);
                    out.push(*second);
                }
            }
        }
        out
    }
}

/// Prepare a fresh batch of `count` decoy qubits in the register. For GV
/// mode `count` must be even (ψ+ pairs).
pub fn prepare_decoys(
    register: &mut Register,
    mode: CheckMode,
    count: usize,
    rng: &mut SessionRng,
) -> Result<DecoyBatch> {
    let items = match mode {
        CheckMode::Bb84 => (0..count)
            .map(|_| {
                let basis = if rng.bit() {
                    ConjugateBasis::Diagonal
                } else {
                    ConjugateBasis::Computational
                };
                let value = rng.bit();
                let state = match (basis, value) {
                    (ConjugateBasis::Computational, false) => StateVector::zero(),
                    (ConjugateBasis::Computational, true) => StateVector::one(),
                    (ConjugateBasis::Diagonal, false) => StateVector::plus(),
                    (ConjugateBasis::Diagonal, true) => StateVector::minus(),
                };
                let qubit = register.alloc_block(state)[0];
                DecoyPrep::Bb84 {
                    basis,
                    value,
                    qubit,
                }
            })
            .collect(),
        CheckMode::Gv => {
            if !count.is_multiple_of(2) {
                return Err(Error::InvalidConfig(format!(
                    "gv decoys come in psi+ pairs; {count} is odd"
                )));
            }
            (0..count / 2)
                .map(|_| {
                    let ids = register.alloc_block(make_bell(BellVariant::PsiPlus));
                    DecoyPrep::GvPair {
                        first: ids[0],
                        second: ids[1],
                    }
                })
                .collect()
        }
    };
    Ok(DecoyBatch { mode, items })
}

/// Per-decoy comparison record.
#[derive(Debug, Clone, PartialEq)]
pub struct DecoyDetail {
    pub index: usize,
    pub outcome: String,
    pub compared: bool,
    pub mismatch: bool,
}

/// Result of one link check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub mode: CheckMode,
    pub compared: usize,
    pub mismatches: usize,
    pub error_rate: f64,
    pub per_decoy_detail: Vec<DecoyDetail>,
}

impl CheckReport {
    fn from_details(mode: CheckMode, per_decoy_detail: Vec<DecoyDetail>) -> Self {
        let compared = per_decoy_detail.iter().filter(|d| d.compared).count();
        let mismatches = per_decoy_detail
            .iter()
            .filter(|d| d.compared && d.mismatch)
            .count();
        let error_rate = if compared > 0 {
            (mismatches as f64 / compared as f64).clamp(0.0, 1.0)
        } else {
            0.0
        };
        Self {
            mode,
            compared,
            mismatches,
            error_rate,
            per_decoy_detail,
        }
    }
}

/// BB84 subroutine: the receiver measures each decoy in a random conjugate
/// basis; only basis-matched outcomes are compared against the sender's
/// preparation.
pub fn bb84_check(
    register: &mut Register,
    batch: &DecoyBatch,
    rng: &mut SessionRng,
) -> Result<CheckReport> {
    if batch.mode != CheckMode::Bb84 {
        return Err(Error::CheckModeMismatch {
            expected: "bb84".to_string(),
            got: batch.mode.label().to_string(),
        });
    }
    let diagonal = MeasurementBasis::diagonal();
    let computational = MeasurementBasis::computational(1);
    let mut details = Vec::with_capacity(batch.items.len());
    for (index, item) in batch.items.iter().enumerate() {
        let DecoyPrep::Bb84 {
            basis,
            value,
            qubit,
        } = item
        else {
            return Err(Error::CheckModeMismatch {
                expected: "bb84 decoy".to_string(),
                got: "gv pair".to_string(),
            });
        };
        let receiver_basis = if rng.bit() {
            ConjugateBasis::Diagonal
        } else {
            ConjugateBasis::Computational
        };
        let outcome = match receiver_basis {
            ConjugateBasis::Diagonal => register.measure(&diagonal, &[*qubit], rng)?,
            ConjugateBasis::Computational => register.measure(&computational, &[*qubit], rng)?,
        };
        let compared = receiver_basis == *basis;
        let expected = match (basis, value) {
            (ConjugateBasis::Computational, false) => "0",
            (ConjugateBasis::Computational, true) => "1",
            (ConjugateBasis::Diagonal, false) => "+",
            (ConjugateBasis::Diagonal, true) => "-",
        };
        let mismatch = compared && outcome != expected;
        details.push(DecoyDetail {
            index,
            outcome,
            compared,
            mismatch,
        });
    }
    Ok(CheckReport::from_details(CheckMode::Bb84, details))
}

/// GV subroutine: after the acknowledged receipt, the sender discloses the
/// partner pairing and the receiver Bell-measures each pair. Any outcome
/// other than ψ+ counts as a mismatch.
pub fn gv_check(
    register: &mut Register,
    batch: &DecoyBatch,
    acknowledged: bool,
    rng: &mut SessionRng,
) -> Result<CheckReport> {
    if batch.mode != CheckMode::Gv {
        return Err(Error::CheckModeMismatch {
            expected: "gv".to_string(),
            got: batch.mode.label().to_string(),
        });
    }
    if !acknowledged {
        return Err(Error::AcknowledgmentMissing);
    }
    let bell = MeasurementBasis::bell();
    let mut seen = std::collections::HashSet::new();
    let mut details = Vec::with_capacity(batch.items.len());
    for (index, item) in batch.items.iter().enumerate() {
        let DecoyPrep::GvPair { first, second } = item else {
            return Err(Error::CheckModeMismatch {
                expected: "gv pair".to_string(),
                got: "bb84 decoy".to_string(),
            });
        };
        if first == second || !seen.insert(*first) || !seen.insert(*second) {
            return Err(Error::BadPairing(format!("qubit reused in pair {index}")));
        }
        let outcome = register.measure(&bell, &[*first, *second], rng)?;
        let mismatch = outcome != "psi+";
        details.push(DecoyDetail {
            index,
            outcome,
            compared: true,
            mismatch,
        });
    }
    Ok(CheckReport::from_details(CheckMode::Gv, details))
}
