//! Dense-coding encode/decode tables per channel family.
//!
//! A table maps bit-string messages to gate sequences on the encoder's
//! qubits and joint-measurement outcomes back to messages. All encoded
//! states of a table are mutually orthogonal, so the decode measurement
//! distinguishes them perfectly.

use num_complex::Complex64;

use super::{swap_basis_sets, BellVariant, ChannelSpec};
use crate::error::{Error, Result};
use crate::quantum::state::C_ZERO;
use crate::quantum::{measure_enumerate, Gate, MeasurementBasis, StateVector};

/// Bijective message ↔ encoded-state table for one block.
#[derive(Debug, Clone)]
pub struct DenseCodingTable {
    bits_per_block: usize,
    encoder_slots: Vec<usize>,
    measured_slots: Vec<usize>,
    gates: Vec<Gate>,
    encoded: Vec<StateVector>,
    decode_basis: MeasurementBasis,
    /// decode_map[i] = (joint outcome label, message bits) for message i.
    decode_map: Vec<(String, Vec<bool>)>,
}

impl DenseCodingTable {
    pub fn bits_per_block(&self) -> usize {
        self.bits_per_block
    }

    pub fn num_messages(&self) -> usize {
        self.gates.len()
    }

    pub fn encoder_slots(&self) -> &[usize] {
        &self.encoder_slots
    }

    pub fn measured_slots(&self) -> &[usize] {
        &self.measured_slots
    }

    pub fn decode_basis(&self) -> &MeasurementBasis {
        &self.decode_basis
    }

    /// Gate for a message given as bits (most significant first).
    pub fn gate_for(&self, message: &[bool]) -> Result<&Gate> {
        if message.len() != self.bits_per_block {
            return Err(Error::MessageLength {
                expected: self.bits_per_block,
                got: message.len(),
            });
        }
        Ok(&self.gates[bits_to_index(message)])
    }

    /// Encoded full-block state for a message index (test support).
    pub fn encoded_state(&self, index: usize) -> &StateVector {
        &self.encoded[index]
    }

    /// Message bits for a joint-measurement outcome label.
    pub fn decode(&self, label: &str) -> Option<Vec<bool>> {
        self.decode_map
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, bits)| bits.clone())
    }

    pub fn outcome_for(&self, message: &[bool]) -> Result<&str> {
        if message.len() != self.bits_per_block {
            return Err(Error::MessageLength {
                expected: self.bits_per_block,
                got: message.len(),
            });
        }
        Ok(&self.decode_map[bits_to_index(message)].0)
    }
}

pub fn bits_to_index(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
}

pub fn index_to_bits(index: usize, width: usize) -> Vec<bool> {
    (0..width)
        .map(|i| (index >> (width - 1 - i)) & 1 == 1)
        .collect()
}

/// The four CL-rule operators in message order 00, 01, 10, 11.
fn cl_gates() -> [Gate; 4] {
    [
        Gate::identity(1),
        Gate::pauli_x(),
        Gate::pauli_iy(),
        Gate::pauli_z(),
    ]
}

fn bell_label_of(state: &StateVector) -> Result<String> {
    for variant in BellVariant::ALL {
        if state.fidelity(&variant.state())? > 1.0 - 1e-9 {
            return Ok(variant.label().to_string());
        }
    }
    Err(Error::ConditionViolation(
        "encoded state is not a Bell state".to_string(),
    ))
}

/// Two-bit table on a Bell pair starting from `initial`; the CL rule sends
/// 00, 01, 10, 11 to I, X, iY, Z on the encoder's qubit (slot 0).
pub fn bell_table_for_initial(initial: BellVariant) -> Result<DenseCodingTable> {
    let start = initial.state();
    let mut gates = Vec::with_capacity(4);
    let mut encoded = Vec::with_capacity(4);
    let mut decode_map = Vec::with_capacity(4);
    for (index, gate) in cl_gates().into_iter().enumerate() {
        let state = start.apply_gate(&gate, &[0])?;
        let label = bell_label_of(&state)?;
        decode_map.push((label, index_to_bits(index, 2)));
        gates.push(gate);
        encoded.push(state);
    }
    Ok(DenseCodingTable {
        bits_per_block: 2,
        encoder_slots: vec![0],
        measured_slots: vec![0, 1],
        gates,
        encoded,
        decode_basis: MeasurementBasis::bell(),
        decode_map,
    })
}

/// One-bit table (message 0 ↦ I, 1 ↦ X) on a Bell pair.
pub fn pp_table_for_initial(initial: BellVariant) -> Result<DenseCodingTable> {
    let start = initial.state();
    let mut gates = Vec::with_capacity(2);
    let mut encoded = Vec::with_capacity(2);
    let mut decode_map = Vec::with_capacity(2);
    for (index, gate) in [Gate::identity(1), Gate::pauli_x()].into_iter().enumerate() {
        let state = start.apply_gate(&gate, &[0])?;
        let label = bell_label_of(&state)?;
        decode_map.push((label, vec![index == 1]));
        gates.push(gate);
        encoded.push(state);
    }
    Ok(DenseCodingTable {
        bits_per_block: 1,
        encoder_slots: vec![0],
        measured_slots: vec![0, 1],
        gates,
        encoded,
        decode_basis: MeasurementBasis::bell(),
        decode_map,
    })
}

/// All 4^p products of {I, X, iY, Z} over `p` qubits, lexicographic.
fn pauli_products(p: usize) -> Vec<Gate> {
    let singles = cl_gates();
    let mut out: Vec<Gate> = vec![Gate::identity(0)];
    for _ in 0..p {
        let mut next = Vec::with_capacity(out.len() * 4);
        for g in &out {
            for s in &singles {
                next.push(if g.arity() == 0 {
                    s.clone()
                } else {
                    g.tensor(s)
                });
            }
        }
        out = next;
    }
    out
}

/// Depth-first search for a maximum mutually orthogonal subset of the
/// candidate encoded states. Candidates are visited in fixed order, so the
/// result is deterministic.
fn max_orthogonal_subset(states: &[StateVector]) -> Vec<usize> {
    let n = states.len();
    let mut ortho = vec![vec![false; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let f = states[i].fidelity(&states[j]).unwrap_or(1.0);
            ortho[i][j] = f < 1e-9;
            ortho[j][i] = ortho[i][j];
        }
    }
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn dfs(
        start: usize,
        n: usize,
        ortho: &[Vec<bool>],
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() + (n - start) <= best.len() {
            return;
        }
        if current.len() > best.len() {
            *best = current.clone();
        }
        for cand in start..n {
            if current.iter().all(|&c| ortho[c][cand]) {
                current.push(cand);
                dfs(cand + 1, n, ortho, current, best);
                current.pop();
            }
        }
    }
    dfs(0, n, &ortho, &mut current, &mut best);
    best
}

/// Complete a partial orthonormal set to a full basis of its space by
/// Gram-Schmidt against computational kets.
fn complete_basis(partial: &[StateVector]) -> Result<Vec<StateVector>> {
    let n = partial[0].num_qubits();
    let dim = 1usize << n;
    let mut basis: Vec<StateVector> = partial.to_vec();
    for ket in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut amps: Vec<Complex64> = StateVector::computational(n, ket).amplitudes().to_vec();
        for existing in &basis {
            let overlap: Complex64 = existing
                .amplitudes()
                .iter()
                .zip(&amps)
                .map(|(e, a)| e.conj() * a)
                .sum();
            for (slot, e) in amps.iter_mut().zip(existing.amplitudes()) {
                *slot -= overlap * e;
            }
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr > 1e-9 {
            let scale = Complex64::new(1.0 / norm_sqr.sqrt(), 0.0);
            for a in amps.iter_mut() {
                *a *= scale;
            }
            basis.push(StateVector::new(n, amps)?);
        }
    }
    if basis.len() != dim {
        return Err(Error::IncompleteBasis {
            detail: format!("completed only {} of {} vectors", basis.len(), dim),
        });
    }
    Ok(basis)
}

/// Search-based table for an N-qubit dense channel: the encoder applies
/// Pauli products to its `p` qubits (slots 0..p); the decode measurement is
/// over all N qubits in the basis of the encoded states.
fn searched_table(initial: &StateVector, p: usize) -> Result<DenseCodingTable> {
    let n = initial.num_qubits();
    let slots: Vec<usize> = (0..p).collect();
    let candidates = pauli_products(p);
    let candidate_states: Vec<StateVector> = candidates
        .iter()
        .map(|g| initial.apply_gate(g, &slots))
        .collect::<Result<_>>()?;
    let chosen = max_orthogonal_subset(&candidate_states);
    let bits = chosen.len().ilog2() as usize;
    let usable = 1usize << bits;
    if usable < 2 {
        return Err(Error::UnsupportedFamily(format!(
            "no dense coding found for this {n}-qubit state with p={p}"
        )));
    }

    let mut gates = Vec::with_capacity(usable);
    let mut encoded = Vec::with_capacity(usable);
    let mut decode_map = Vec::with_capacity(usable);
    let mut labels = Vec::with_capacity(usable);
    for (index, &cand) in chosen.iter().take(usable).enumerate() {
        let message = index_to_bits(index, bits);
        let label: String = message.iter().map(|&b| if b { '1' } else { '0' }).collect();
        gates.push(candidates[cand].clone());
        encoded.push(candidate_states[cand].clone());
        decode_map.push((label.clone(), message));
        labels.push(label);
    }
    // complete_basis leaves the leading vectors untouched, so labels and
    // vectors stay aligned.
    let full = complete_basis(&encoded)?;
    for i in encoded.len()..full.len() {
        labels.push(format!("aux{i}"));
    }
    let decode_basis = MeasurementBasis::custom(labels, full)?;
    Ok(DenseCodingTable {
        bits_per_block: bits,
        encoder_slots: slots,
        measured_slots: (0..n).collect(),
        gates,
        encoded,
        decode_basis,
        decode_map,
    })
}

/// Swap-channel table: message j maps the e-basis index i to i XOR j via a
/// basis-permutation unitary on the encoder's m qubits.
fn swap_table(spec: &ChannelSpec) -> Result<DenseCodingTable> {
    let (s, m, l) = match spec {
        ChannelSpec::Swap { s, m, l } | ChannelSpec::SwapCustom { s, m, l, .. } => (*s, *m, *l),
        _ => unreachable!("caller matched swap families"),
    };
    let (e, _f) = swap_basis_sets(spec)?;
    let initial = super::make_swap_state(spec)?;
    let dim = 1usize << m;
    let count = 1usize << s;

    // U_j = Σ_i |e_{i⊕j}⟩⟨e_i| + (I − Σ_i |e_i⟩⟨e_i|); the complement term
    // keeps U_j unitary when the e-set does not span the encoder space.
    let mut gates = Vec::with_capacity(count);
    for j in 0..count {
        if j == 0 {
            gates.push(Gate::identity(m));
            continue;
        }
        let mut matrix = vec![C_ZERO; dim * dim];
        for row in 0..dim {
            matrix[row * dim + row] = Complex64::new(1.0, 0.0);
        }
        for i in 0..count {
            let src = &e[i];
            let dst = &e[i ^ j];
            for row in 0..dim {
                for col in 0..dim {
                    matrix[row * dim + col] +=
                        (dst.amplitude(row) - src.amplitude(row)) * src.amplitude(col).conj();
                }
            }
        }
        gates.push(Gate::new(m, matrix)?);
    }

    let slots: Vec<usize> = (0..m).collect();
    let mut encoded = Vec::with_capacity(count);
    let mut decode_map = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for (j, gate) in gates.iter().enumerate() {
        let state = initial.apply_gate(gate, &slots)?;
        let message = index_to_bits(j, s);
        let label: String = message.iter().map(|&b| if b { '1' } else { '0' }).collect();
        encoded.push(state);
        decode_map.push((label.clone(), message));
        labels.push(label);
    }
    let full = complete_basis(&encoded)?;
    for (i, _) in full.iter().enumerate().skip(encoded.len()) {
        labels.push(format!("aux{i}"));
    }
    let decode_basis = MeasurementBasis::custom(labels, full)?;
    Ok(DenseCodingTable {
        bits_per_block: s,
        encoder_slots: slots,
        measured_slots: (0..m + l).collect(),
        gates,
        encoded,
        decode_basis,
        decode_map,
    })
}

/// Dense-coding table for a channel family, or an unsupported-family error
/// for families that carry no block-level table (controlled, cat).
pub fn dense_coding_table(spec: &ChannelSpec) -> Result<DenseCodingTable> {
    let report = super::validate_conditions(spec);
    if !report.ok {
        return Err(Error::ConditionViolation(report.violations.join("; ")));
    }
    match spec {
        ChannelSpec::Bell => bell_table_for_initial(BellVariant::PsiPlus),
        ChannelSpec::GhzLike { .. } => {
            let initial = super::make_controlled_state(spec)?;
            let table = searched_table(&initial, 2)?;
            debug_assert_eq!(table.bits_per_block(), 3);
            Ok(table)
        }
        ChannelSpec::NQubitDense { state, p } => searched_table(state, *p),
        ChannelSpec::Swap { .. } | ChannelSpec::SwapCustom { .. } => swap_table(spec),
        other => Err(Error::UnsupportedFamily(format!(
            "{} has no block-level dense-coding table",
            other.family()
        ))),
    }
}

/// Exercise a table end to end on a fresh block: encode `message`, measure
/// in the decode basis, map the outcome back.
pub fn table_round_trip(
    spec: &ChannelSpec,
    table: &DenseCodingTable,
    message: &[bool],
) -> Result<Vec<bool>> {
    let initial = match spec {
        ChannelSpec::Bell => BellVariant::PsiPlus.state(),
        ChannelSpec::GhzLike { .. } => super::make_controlled_state(spec)?,
        ChannelSpec::NQubitDense { state, .. } => state.clone(),
        ChannelSpec::Swap { .. } | ChannelSpec::SwapCustom { .. } => super::make_swap_state(spec)?,
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "{} has no block-level dense-coding table",
                other.family()
            )))
        }
    };
    let gate = table.gate_for(message)?;
    let encoded = initial.apply_gate(gate, table.encoder_slots())?;
    let dist = measure_enumerate(&encoded, table.decode_basis(), table.measured_slots())?;
    let top = dist
        .entries()
        .iter()
        .max_by(|a, b| a.probability.total_cmp(&b.probability))
        .expect("nonempty distribution");
    if top.probability < 1.0 - 1e-9 {
        return Err(Error::ConditionViolation(format!(
            "decode measurement is not deterministic (p = {:.6})",
            top.probability
        )));
    }
    table.decode(&top.label).ok_or_else(|| {
        Error::ConditionViolation(format!("outcome {} has no decode entry", top.label))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::Sign;
    use crate::quantum::TOL;

    #[test]
    fn bell_table_matches_cl_rule() {
        let table = bell_table_for_initial(BellVariant::PsiPlus).unwrap();
        assert_eq!(table.bits_per_block(), 2);
        let expect = [
            ("psi+", [false, false]),
            ("phi+", [false, true]),
            ("phi-", [true, false]),
            ("psi-", [true, true]),
        ];
        for (label, bits) in expect {
            assert_eq!(table.decode(label).unwrap(), bits.to_vec());
            assert_eq!(table.outcome_for(&bits).unwrap(), label);
        }
    }

    #[test]
    fn bell_message_01_yields_phi_plus() {
        let table = bell_table_for_initial(BellVariant::PsiPlus).unwrap();
        let recovered = table_round_trip(&ChannelSpec::Bell, &table, &[false, true]).unwrap();
        assert_eq!(recovered, vec![false, true]);
        assert_eq!(table.outcome_for(&[false, true]).unwrap(), "phi+");
    }

    #[test]
    fn bell_tables_for_all_initials_round_trip() {
        for initial in BellVariant::ALL {
            let table = bell_table_for_initial(initial).unwrap();
            for msg in 0..4 {
                let bits = index_to_bits(msg, 2);
                let label = table.outcome_for(&bits).unwrap().to_string();
                assert_eq!(table.decode(&label).unwrap(), bits);
            }
        }
    }

    #[test]
    fn encoded_states_are_pairwise_orthogonal() {
        let table = dense_coding_table(&ChannelSpec::Bell).unwrap();
        for i in 0..table.num_messages() {
            for j in 0..table.num_messages() {
                if i != j {
                    let f = table
                        .encoded_state(i)
                        .fidelity(table.encoded_state(j))
                        .unwrap();
                    assert!(f < TOL, "messages {i},{j} overlap: {f}");
                }
            }
        }
    }

    #[test]
    fn ghz_like_search_finds_eight_states() {
        let spec = ChannelSpec::ghz_like_default();
        let table = dense_coding_table(&spec).unwrap();
        assert_eq!(table.bits_per_block(), 3);
        assert_eq!(table.num_messages(), 8);
        for i in 0..8 {
            for j in (i + 1)..8 {
                let f = table
                    .encoded_state(i)
                    .fidelity(table.encoded_state(j))
                    .unwrap();
                assert!(f < 1e-9);
            }
        }
        for msg in 0..8 {
            let bits = index_to_bits(msg, 3);
            let recovered = table_round_trip(&spec, &table, &bits).unwrap();
            assert_eq!(recovered, bits);
        }
    }

    #[test]
    fn swap_table_round_trips() {
        let spec = ChannelSpec::Swap { s: 1, m: 2, l: 1 };
        let table = dense_coding_table(&spec).unwrap();
        assert_eq!(table.bits_per_block(), 1);
        for msg in [[false], [true]] {
            assert_eq!(table_round_trip(&spec, &table, &msg).unwrap(), msg.to_vec());
        }

        let spec = ChannelSpec::Swap { s: 2, m: 2, l: 2 };
        let table = dense_coding_table(&spec).unwrap();
        assert_eq!(table.bits_per_block(), 2);
        for msg in 0..4 {
            let bits = index_to_bits(msg, 2);
            assert_eq!(table_round_trip(&spec, &table, &bits).unwrap(), bits);
        }
    }

    #[test]
    fn controlled_family_has_no_table() {
        let spec = ChannelSpec::Cat { m: 2 };
        assert!(matches!(
            dense_coding_table(&spec),
            Err(Error::UnsupportedFamily(_))
        ));
    }

    #[test]
    fn degenerate_ghz_spec_rejected() {
        let spec = ChannelSpec::GhzLike {
            psi1: BellVariant::PsiPlus,
            psi2: BellVariant::PsiPlus,
            sign: Sign::Plus,
        };
        assert!(matches!(
            dense_coding_table(&spec),
            Err(Error::ConditionViolation(_))
        ));
    }
}
