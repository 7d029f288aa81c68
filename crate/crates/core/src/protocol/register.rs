//! Session-wide qubit store.
//!
//! Each entangled resource lives in its own small block. Blocks are merged
//! on demand when an operation (Eve's cross-block Bell measurement, a
//! wrong-pairing decode) spans two of them; merging tensors the block
//! states and is physically the identity.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::quantum::{
    measure_enumerate, measure_sampled, Gate, MeasurementBasis, OutcomeDistribution, StateVector,
};
use crate::rng::SessionRng;

/// Opaque handle of one physical qubit in the session register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(u32);

impl QubitId {
    pub fn new(raw: u32) -> Self {
        Self(raw)
    }

    pub fn raw(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone)]
struct Block {
    state: StateVector,
    qubits: Vec<QubitId>,
}

/// The set of live blocks plus a qubit → (block, position) index.
#[derive(Debug, Default, Clone)]
pub struct Register {
    blocks: Vec<Option<Block>>,
    locs: HashMap<QubitId, (usize, usize)>,
    next_qubit: u32,
}

impl Register {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocate a block holding `state`; returns its qubit handles in
    /// state order.
    pub fn alloc_block(&mut self, state: StateVector) -> Vec<QubitId> {
        let ids: Vec<QubitId> = (0..state.num_qubits())
            .map(|_| {
                let id = QubitId(self.next_qubit);
                self.next_qubit += 1;
                id
            })
            .collect();
        let block_index = self.blocks.len();
        for (pos, &id) in ids.iter().enumerate() {
            self.locs.insert(id, (block_index, pos));
        }
        self.blocks.push(Some(Block {
            state,
            qubits: ids.clone(),
        }));
        ids
    }

    /// Reserve qubit handles without amplitudes behind them. Used for
    /// blocks tracked symbolically; any quantum operation on such a handle
    /// fails with `UnknownQubit`.
    pub fn alloc_virtual(&mut self, count: usize) -> Vec<QubitId> {
        (0..count)
            .map(|_| {
                let id = QubitId(self.next_qubit);
                self.next_qubit += 1;
                id
            })
            .collect()
    }

    fn location(&self, qubit: QubitId) -> Result<(usize, usize)> {
        self.locs
            .get(&qubit)
            .copied()
            .ok_or(Error::UnknownQubit(qubit.raw()))
    }

    /// Current joint state of the block holding `qubit`, with the qubit's
    /// position inside it.
    pub fn block_state(&self, qubit: QubitId) -> Result<(&StateVector, usize)> {
        let (block, pos) = self.location(qubit)?;
        let b = self.blocks[block].as_ref().expect("live block");
        Ok((&b.state, pos))
    }

    fn merge(&mut self, a: usize, b: usize) -> Result<usize> {
        if a == b {
            return Ok(a);
        }
        let right = self.blocks[b].take().expect("live block");
        let left = self.blocks[a].take().expect("live block");
        let state = left.state.tensor(&right.state)?;
        let mut qubits = left.qubits;
        qubits.extend(right.qubits);
        for (pos, &id) in qubits.iter().enumerate() {
            self.locs.insert(id, (a, pos));
        }
        self.blocks[a] = Some(Block { state, qubits });
        Ok(a)
    }

    /// Bring all listed qubits into one block, returning it.
    fn unify(&mut self, qubits: &[QubitId]) -> Result<usize> {
        let mut target = self.location(qubits[0])?.0;
        for &q in &qubits[1..] {
            let other = self.location(q)?.0;
            target = self.merge(target.min(other), target.max(other))?;
        }
        Ok(target)
    }

    fn positions_in(&self, block: usize, qubits: &[QubitId]) -> Result<Vec<usize>> {
        qubits
            .iter()
            .map(|&q| {
                let (b, pos) = self.location(q)?;
                debug_assert_eq!(b, block);
                Ok(pos)
            })
            .collect()
    }

    /// Apply a gate across the listed qubits (merging blocks if needed).
    pub fn apply_gate(&mut self, gate: &Gate, qubits: &[QubitId]) -> Result<()> {
        let block = self.unify(qubits)?;
        let targets = self.positions_in(block, qubits)?;
        let b = self.blocks[block].as_mut().expect("live block");
        b.state = b.state.apply_gate(gate, &targets)?;
        Ok(())
    }

    /// Sample a projective measurement of `qubits` in `basis`, collapsing
    /// the block state.
    pub fn measure(
        &mut self,
        basis: &MeasurementBasis,
        qubits: &[QubitId],
        rng: &mut SessionRng,
    ) -> Result<String> {
        let block = self.unify(qubits)?;
        let targets = self.positions_in(block, qubits)?;
        let b = self.blocks[block].as_mut().expect("live block");
        let (label, post) = measure_sampled(&b.state, basis, &targets, rng)?;
        b.state = post;
        Ok(label)
    }

    /// Exhaustive outcome distribution for measuring `qubits` in `basis`.
    /// Merges blocks if the qubits span several; does not collapse.
    pub fn enumerate(
        &mut self,
        basis: &MeasurementBasis,
        qubits: &[QubitId],
    ) -> Result<OutcomeDistribution> {
        let block = self.unify(qubits)?;
        let targets = self.positions_in(block, qubits)?;
        let b = self.blocks[block].as_ref().expect("live block");
        measure_enumerate(&b.state, basis, &targets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_bell, BellVariant};

    #[test]
    fn alloc_and_measure_single_block() {
        let mut reg = Register::new();
        let ids = reg.alloc_block(make_bell(BellVariant::PsiPlus));
        let mut rng = SessionRng::new(0);
        let label = reg
            .measure(&MeasurementBasis::bell(), &ids, &mut rng)
            .unwrap();
        assert_eq!(label, "psi+");
    }

    #[test]
    fn cross_block_measurement_merges() {
        let mut reg = Register::new();
        let a = reg.alloc_block(make_bell(BellVariant::PsiPlus));
        let b = reg.alloc_block(make_bell(BellVariant::PsiPlus));
        // Bell measurement across blocks: qubit 0 of block a, qubit 0 of b.
        let dist = reg
            .enumerate(&MeasurementBasis::bell(), &[a[0], b[0]])
            .unwrap();
        assert_eq!(dist.entries().len(), 4);
        for e in dist.entries() {
            assert!((e.probability - 0.25).abs() < 1e-12);
        }
        // After a cross measurement the partners are swapped into a Bell state.
        let mut rng = SessionRng::new(1);
        let _ = reg
            .measure(&MeasurementBasis::bell(), &[a[0], b[0]], &mut rng)
            .unwrap();
        let partner = reg
            .enumerate(&MeasurementBasis::bell(), &[a[1], b[1]])
            .unwrap();
        // Exactly one Bell outcome remains for the partner pair.
        assert_eq!(partner.entries().len(), 1);
        assert!((partner.entries()[0].probability - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gate_on_registered_qubit() {
        let mut reg = Register::new();
        let ids = reg.alloc_block(make_bell(BellVariant::PsiPlus));
        reg.apply_gate(&Gate::pauli_x(), &[ids[0]]).unwrap();
        let mut rng = SessionRng::new(2);
        let label = reg
            .measure(&MeasurementBasis::bell(), &ids, &mut rng)
            .unwrap();
        assert_eq!(label, "phi+");
    }

    #[test]
    fn unknown_qubit_is_an_error() {
        let mut reg = Register::new();
        let err = reg.apply_gate(&Gate::pauli_x(), &[QubitId::new(99)]);
        assert!(matches!(err, Err(Error::UnknownQubit(99))));
    }
}
