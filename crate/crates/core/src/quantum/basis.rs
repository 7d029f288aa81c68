//! Measurement bases over a measured subsystem.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::state::{StateVector, C_ZERO, TOL};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisName {
    Computational,
    Diagonal,
    Bell,
    Custom,
}

/// A complete orthonormal basis of the measured subsystem, one labeled
/// projector vector per outcome.
#[derive(Debug, Clone)]
pub struct MeasurementBasis {
    name: BasisName,
    labels: Vec<String>,
    vectors: Vec<StateVector>,
}

impl MeasurementBasis {
    /// Build a custom basis; vectors must be mutually orthonormal and span
    /// the subsystem (2^k vectors of k qubits each).
    pub fn custom(labels: Vec<String>, vectors: Vec<StateVector>) -> Result<Self> {
        Self::build(BasisName::Custom, labels, vectors)
    }

    fn build(name: BasisName, labels: Vec<String>, vectors: Vec<StateVector>) -> Result<Self> {
        if vectors.is_empty() || labels.len() != vectors.len() {
            return Err(Error::IncompleteBasis {
                detail: format!("{} labels for {} vectors", labels.len(), vectors.len()),
            });
        }
        let k = vectors[0].num_qubits();
        if vectors.iter().any(|v| v.num_qubits() != k) {
            return Err(Error::IncompleteBasis {
                detail: "mixed vector dimensions".into(),
            });
        }
        if vectors.len() != 1 << k {
            return Err(Error::IncompleteBasis {
                detail: format!(
                    "{} vectors cannot span a {}-qubit subsystem",
                    vectors.len(),
                    k
                ),
            });
        }
        for i in 0..vectors.len() {
            for j in i..vectors.len() {
                let overlap = vectors[i].inner(&vectors[j])?;
                let expected = if i == j { 1.0 } else { 0.0 };
                if (overlap.norm() - expected).abs() > 1e-9 {
                    return Err(Error::NotOrthonormal {
                        detail: format!("⟨{}|{}⟩ = {:.3e}", labels[i], labels[j], overlap.norm()),
                    });
                }
            }
        }
        Ok(Self {
            name,
            labels,
            vectors,
        })
    }

    /// {|0..0⟩, ..., |1..1⟩} with bit-string labels.
    pub fn computational(num_qubits: usize) -> Self {
        let dim = 1 << num_qubits;
        let labels = (0..dim)
            .map(|i| format!("{:0width$b}", i, width = num_qubits))
            .collect();
        let vectors = (0..dim)
            .map(|i| StateVector::computational(num_qubits, i))
            .collect();
        Self {
            name: BasisName::Computational,
            labels,
            vectors,
        }
    }

    /// Single-qubit {|+⟩, |−⟩}.
    pub fn diagonal() -> Self {
        Self {
            name: BasisName::Diagonal,
            labels: vec!["+".into(), "-".into()],
            vectors: vec![StateVector::plus(), StateVector::minus()],
        }
    }

    /// The four Bell states, labeled psi+/phi+/phi-/psi-.
    ///
    /// Conventions: ψ± = (|00⟩ ± |11⟩)/√2, φ± = (|01⟩ ± |10⟩)/√2.
    pub fn bell() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let mk = |a: Complex64, b: Complex64, c: Complex64, d: Complex64| {
            StateVector::new(2, vec![a, b, c, d]).expect("bell basis vector")
        };
        Self {
            name: BasisName::Bell,
            labels: vec!["psi+".into(), "phi+".into(), "phi-".into(), "psi-".into()],
            vectors: vec![
                mk(h, C_ZERO, C_ZERO, h),
                mk(C_ZERO, h, h, C_ZERO),
                mk(C_ZERO, h, -h, C_ZERO),
                mk(h, C_ZERO, C_ZERO, -h),
            ],
        }
    }

    /// Two-outcome basis {|a⟩, |b⟩} on one qubit, labeled "a"/"b".
    pub fn two_state(a: &StateVector, b: &StateVector) -> Result<Self> {
        if a.num_qubits() != 1 || b.num_qubits() != 1 {
            return Err(Error::IncompleteBasis {
                detail: "control basis states must be single qubits".into(),
            });
        }
        if a.inner(b)?.norm() > TOL {
            return Err(Error::NotOrthonormal {
                detail: "⟨a|b⟩ ≠ 0".into(),
            });
        }
        Self::build(
            BasisName::Custom,
            vec!["a".into(), "b".into()],
            vec![a.clone(), b.clone()],
        )
    }

    pub fn name(&self) -> BasisName {
        self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.vectors[0].num_qubits()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn label(&self, outcome: usize) -> &str {
        &self.labels[outcome]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vector(&self, outcome: usize) -> &StateVector {
        &self.vectors[outcome]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_basis_is_orthonormal() {
        let basis = MeasurementBasis::bell();
        for i in 0..4 {
            for j in 0..4 {
                let f = basis.vector(i).fidelity(basis.vector(j)).unwrap();
                if i == j {
                    assert!((f - 1.0).abs() < TOL);
                } else {
                    assert!(f < TOL);
                }
            }
        }
    }

    #[test]
    fn custom_rejects_non_orthonormal() {
        let res = MeasurementBasis::custom(
            vec!["x".into(), "y".into()],
            vec![StateVector::zero(), StateVector::plus()],
        );
        assert!(matches!(res, Err(Error::NotOrthonormal { .. })));
    }

    #[test]
    fn custom_rejects_incomplete_span() {
        let res = MeasurementBasis::custom(vec!["x".into()], vec![StateVector::zero()]);
        assert!(matches!(res, Err(Error::IncompleteBasis { .. })));
    }

    #[test]
    fn two_state_requires_orthogonality() {
        assert!(MeasurementBasis::two_state(&StateVector::zero(), &StateVector::zero()).is_err());
        assert!(MeasurementBasis::two_state(&StateVector::plus(), &StateVector::minus()).is_ok());
    }
}
