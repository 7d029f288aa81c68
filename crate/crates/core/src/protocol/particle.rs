//! Particle identities and ordered transmission sequences.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::register::QubitId;

/// Identity of a physical qubit within a session: a slot of a resource
/// block for message particles, or a numbered decoy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParticleRef {
    Message { block: usize, slot: usize },
    Decoy { id: usize },
}

impl ParticleRef {
    pub fn is_decoy(&self) -> bool {
        matches!(self, ParticleRef::Decoy { .. })
    }
}

/// One entry of a transmission sequence: logical identity plus the
/// register handle of the physical qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceItem {
    pub particle: ParticleRef,
    pub qubit: QubitId,
}

/// Ordered sequence of particles with no duplicates.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParticleSequence {
    items: Vec<SequenceItem>,
}

impl ParticleSequence {
    pub fn new(items: Vec<SequenceItem>) -> Result<Self> {
        for (i, item) in items.iter().enumerate() {
            if items[..i].iter().any(|o| o.particle == item.particle) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate particle {:?} in sequence",
                    item.particle
                )));
            }
        }
        Ok(Self { items })
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[SequenceItem] {
        &self.items
    }

    pub fn qubits(&self) -> Vec<QubitId> {
        self.items.iter().map(|i| i.qubit).collect()
    }

    pub fn get(&self, index: usize) -> &SequenceItem {
        &self.items[index]
    }

    pub fn push(&mut self, item: SequenceItem) {
        debug_assert!(!self.items.iter().any(|o| o.particle == item.particle));
        self.items.push(item);
    }

    pub fn insert(&mut self, index: usize, item: SequenceItem) {
        self.items.insert(index, item);
    }

    /// Remove the items at `positions` (ascending recorded order), returning
    /// them and leaving the remaining items in their original relative order.
    pub fn remove_positions(&mut self, positions: &[usize]) -> Vec<SequenceItem> {
        let mut removed = Vec::with_capacity(positions.len());
        let mut sorted: Vec<usize> = positions.to_vec();
        sorted.sort_unstable();
        for &pos in sorted.iter().rev() {
            removed.push(self.items.remove(pos));
        }
        removed.reverse();
        removed
    }
}

/// Insert `items` into `seq`, one at a time at uniformly random slots.
/// Returns the final positions of the inserted items (ascending); removing
/// exactly those positions restores the original sequence order.
pub fn insert_items(
    seq: &mut ParticleSequence,
    items: Vec<SequenceItem>,
    rng: &mut crate::rng::SessionRng,
) -> Vec<usize> {
    let inserted: Vec<ParticleRef> = items.iter().map(|i| i.particle).collect();
    for item in items {
        let pos = rng.below(seq.len() + 1);
        seq.insert(pos, item);
    }
    seq.items()
        .iter()
        .enumerate()
        .filter(|(_, it)| inserted.contains(&it.particle))
        .map(|(pos, _)| pos)
        .collect()
}

/// Bijection on {0..n-1}; item i of the permuted sequence is item
/// mapping[i] of the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &m in &mapping {
            if m >= n || seen[m] {
                return Err(Error::InvalidConfig(format!(
                    "mapping is not a bijection on 0..{n}"
                )));
            }
            seen[m] = true;
        }
        Ok(Self { mapping })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            mapping: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn source_of(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0usize; self.mapping.len()];
        for (i, &m) in self.mapping.iter().enumerate() {
            inv[m] = i;
        }
        Self { mapping: inv }
    }

    /// Apply to a sequence: result[i] = seq[mapping[i]].
    pub fn apply<T: Clone>(&self, seq: &[T]) -> Result<Vec<T>> {
        if seq.len() != self.mapping.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mapping.len(),
                got: seq.len(),
            });
        }
        Ok(self.mapping.iter().map(|&m| seq[m].clone()).collect())
    }

    pub fn apply_sequence(&self, seq: &ParticleSequence) -> Result<ParticleSequence> {
        Ok(ParticleSequence {
            items: self.apply(&seq.items)?,
        })
    }
}
