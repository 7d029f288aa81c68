//! Projective measurements: Born-rule sampling and exhaustive enumeration.

use num_complex::Complex64;

use super::basis::MeasurementBasis;
use super::state::{StateVector, C_ZERO, TOL};
use crate::error::{Error, Result};
use crate::rng::SessionRng;

/// One possible measurement result with its probability and post-state.
#[derive(Debug, Clone)]
pub struct OutcomeEntry {
    pub label: String,
    pub probability: f64,
    pub post_state: StateVector,
}

/// Full outcome distribution of a projective measurement. Zero-probability
/// outcomes are omitted; the remaining probabilities sum to 1.
#[derive(Debug, Clone)]
pub struct OutcomeDistribution {
    entries: Vec<OutcomeEntry>,
}

impl OutcomeDistribution {
    pub fn entries(&self) -> &[OutcomeEntry] {
        &self.entries
    }

    pub fn probability_of(&self, label: &str) -> f64 {
        self.entries
            .iter()
            .find(|e| e.label == label)
            .map(|e| e.probability)
            .unwrap_or(0.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }
}

/// Projection bookkeeping for one outcome: amplitude of ⟨b_j| on each
/// assignment of the non-target qubits.
struct Projection {
    probability: f64,
    post: Vec<Complex64>,
}

fn project(state: &StateVector, basis_vector: &StateVector, targets: &[usize]) -> Projection {
    let n = state.num_qubits();
    let k = targets.len();
    let subdim = 1usize << k;
    let shifts: Vec<usize> = targets.iter().map(|&t| n - 1 - t).collect();
    let target_mask: usize = shifts.iter().map(|&s| 1usize << s).sum();
    let scatter = |sub: usize| -> usize {
        let mut out = 0usize;
        for (j, &s) in shifts.iter().enumerate() {
            if (sub >> (k - 1 - j)) & 1 == 1 {
                out |= 1 << s;
            }
        }
        out
    };
    let offsets: Vec<usize> = (0..subdim).map(scatter).collect();

    let mut post = vec![C_ZERO; state.dim()];
    let mut probability = 0.0f64;
    for base in 0..state.dim() {
        if base & target_mask != 0 {
            continue;
        }
        // c = ⟨b| ψ(·, rest)⟩ over the target subsystem.
        let mut c = C_ZERO;
        for (sub, &offset) in offsets.iter().enumerate() {
            c += basis_vector.amplitude(sub).conj() * state.amplitude(base | offset);
        }
        probability += c.norm_sqr();
        if c != C_ZERO {
            // Post-state component |b⟩ ⊗ c|rest⟩ (renormalized by caller).
            for (sub, &offset) in offsets.iter().enumerate() {
                post[base | offset] = basis_vector.amplitude(sub) * c;
            }
        }
    }
    Projection {
        probability: probability.clamp(0.0, 1.0),
        post,
    }
}

fn check_measurement(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= state.num_qubits() {
            return Err(Error::QubitOutOfRange {
                index: t,
                num_qubits: state.num_qubits(),
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget { index: t });
        }
    }
    if basis.num_qubits() != targets.len() {
        return Err(Error::IncompleteBasis {
            detail: format!(
                "{}-qubit basis for {} targets",
                basis.num_qubits(),
                targets.len()
            ),
        });
    }
    Ok(())
}

/// Enumerate every outcome of measuring `targets` in `basis`.
pub fn measure_enumerate(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
) -> Result<OutcomeDistribution> {
    check_measurement(state, basis, targets)?;
    let mut entries = Vec::new();
    for outcome in 0..basis.len() {
        let proj = project(state, basis.vector(outcome), targets);
        if proj.probability > TOL {
            let scale = Complex64::new(1.0 / proj.probability.sqrt(), 0.0);
            let amps: Vec<Complex64> = proj.post.iter().map(|a| a * scale).collect();
            entries.push(OutcomeEntry {
                label: basis.label(outcome).to_string(),
                probability: proj.probability,
                post_state: StateVector::new(state.num_qubits(), amps)?,
            });
        }
    }
    Ok(OutcomeDistribution { entries })
}

/// Sample one outcome by the Born rule; deterministic given the rng state.
pub fn measure_sampled(
    state: &StateVector,
    basis: &MeasurementBasis,
    targets: &[usize],
    rng: &mut SessionRng,
) -> Result<(String, StateVector)> {
    check_measurement(state, basis, targets)?;
    let u = rng.unit();
    let mut cumulative = 0.0f64;
    let mut fallback: Option<usize> = None;
    for outcome in 0..basis.len() {
        let proj = project(state, basis.vector(outcome), targets);
        if proj.probability > TOL {
            fallback = Some(outcome);
            cumulative += proj.probability;
            if u < cumulative {
                return collapse(state, basis, outcome, proj);
            }
        }
    }
    // Rounding left u beyond the accumulated mass; take the last viable
    // outcome so a zero-probability projection can never be selected.
    let outcome = fallback.expect("state has no measurable support");
    let proj = project(state, basis.vector(outcome), targets);
    collapse(state, basis, outcome, proj)
}

fn collapse(
    state: &StateVector,
    basis: &MeasurementBasis,
    outcome: usize,
    proj: Projection,
) -> Result<(String, StateVector)> {
    let scale = Complex64::new(1.0 / proj.probability.sqrt(), 0.0);
    let amps: Vec<Complex64> = proj.post.iter().map(|a| a * scale).collect();
    Ok((
        basis.label(outcome).to_string(),
        StateVector::new(state.num_qubits(), amps)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::C_ONE;

    fn bell_psi_plus() -> StateVector {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        StateVector::new(2, vec![h, C_ZERO, C_ZERO, h]).unwrap()
    }

    #[test]
    fn eigenstate_measures_deterministically() {
        let st = StateVector::computational(2, 0);
        let dist = measure_enumerate(&st, &MeasurementBasis::computational(2), &[0, 1]).unwrap();
        assert_eq!(dist.entries().len(), 1);
        assert_eq!(dist.entries()[0].label, "00");
        assert!((dist.entries()[0].probability - 1.0).abs() < TOL);
    }

    #[test]
    fn bell_state_in_bell_basis_is_its_own_label() {
        let mut rng = SessionRng::new(3);
        let (label, post) = measure_sampled(
            &bell_psi_plus(),
            &MeasurementBasis::bell(),
            &[0, 1],
            &mut rng,
        )
        .unwrap();
        assert_eq!(label, "psi+");
        assert!((post.fidelity(&bell_psi_plus()).unwrap() - 1.0).abs() < TOL);
    }

    #[test]
    fn single_qubit_of_bell_pair_is_uniform() {
        let dist =
            measure_enumerate(&bell_psi_plus(), &MeasurementBasis::computational(1), &[0]).unwrap();
        assert_eq!(dist.entries().len(), 2);
        for entry in dist.entries() {
            assert!((entry.probability - 0.5).abs() < TOL);
            // Post states |00⟩ or |11⟩.
            let expected = if entry.label == "0" {
                StateVector::computational(2, 0b00)
            } else {
                StateVector::computational(2, 0b11)
            };
            assert!((entry.post_state.fidelity(&expected).unwrap() - 1.0).abs() < TOL);
        }
    }

    #[test]
    fn plus_in_computational_basis() {
        let dist = measure_enumerate(
            &StateVector::plus(),
            &MeasurementBasis::computational(1),
            &[0],
        )
        .unwrap();
        assert!((dist.probability_of("0") - 0.5).abs() < TOL);
        assert!((dist.probability_of("1") - 0.5).abs() < TOL);
    }

    #[test]
    fn cross_pair_bell_measurement_is_uniform() {
        // |ψ+⟩₀₁ ⊗ |ψ+⟩₂₃, Bell measurement on qubits (0, 2).
        let two_pairs = bell_psi_plus().tensor(&bell_psi_plus()).unwrap();
        let dist = measure_enumerate(&two_pairs, &MeasurementBasis::bell(), &[0, 2]).unwrap();
        assert_eq!(dist.entries().len(), 4);
        for entry in dist.entries() {
            assert!((entry.probability - 0.25).abs() < TOL);
        }
    }

    #[test]
    fn sampled_matches_enumerated_within_three_sigma() {
        // Fixed state: |+⟩ ⊗ |0⟩ measured on qubit 0 diagonal? Use a state
        // with non-trivial probabilities: apply H-like superposition.
        let st =
            StateVector::new(1, vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]).unwrap();
        let basis = MeasurementBasis::computational(1);
        let dist = measure_enumerate(&st, &basis, &[0]).unwrap();
        let p0 = dist.probability_of("0");

        let mut rng = SessionRng::new(11);
        let samples = 10_000usize;
        let mut count0 = 0usize;
        for _ in 0..samples {
            let (label, _) = measure_sampled(&st, &basis, &[0], &mut rng).unwrap();
            if label == "0" {
                count0 += 1;
            }
        }
        let freq = count0 as f64 / samples as f64;
        let sigma = (p0 * (1.0 - p0) / samples as f64).sqrt();
        assert!(
            (freq - p0).abs() < 3.0 * sigma,
            "freq {freq} vs p {p0} (sigma {sigma})"
        );
    }

    #[test]
    fn probabilities_sum_to_one() {
        let st = bell_psi_plus()
            .apply_gate(&crate::quantum::gate::Gate::hadamard(), &[1])
            .unwrap();
        let dist = measure_enumerate(&st, &MeasurementBasis::bell(), &[0, 1]).unwrap();
        assert!((dist.total_probability() - 1.0).abs() < 1e-9);
        for e in dist.entries() {
            assert!((e.post_state.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn measured_state_collapses() {
        let mut rng = SessionRng::new(5);
        let (label, post) = measure_sampled(
            &bell_psi_plus(),
            &MeasurementBasis::computational(1),
            &[0],
            &mut rng,
        )
        .unwrap();
        let expected = if label == "0" { 0b00 } else { 0b11 };
        assert!(
            (post
                .fidelity(&StateVector::computational(2, expected))
                .unwrap()
                - 1.0)
                .abs()
                < TOL
        );
        let _ = C_ONE;
    }
}
