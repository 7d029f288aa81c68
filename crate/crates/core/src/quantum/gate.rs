//! Unitary gates on one or more qubits.

use num_complex::Complex64;

use super::state::{C_ONE, C_ZERO, TOL};
use crate::error::{Error, Result};

/// A 2^arity × 2^arity unitary, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    arity: usize,
    dim: usize,
    matrix: Vec<Complex64>,
}

impl Gate {
    /// Build a gate, rejecting non-unitary matrices.
    pub fn new(arity: usize, matrix: Vec<Complex64>) -> Result<Self> {
        let dim = 1usize << arity;
        if matrix.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: matrix.len(),
            });
        }
        let gate = Self { arity, dim, matrix };
        let deviation = gate.unitarity_deviation();
        if deviation > TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(gate)
    }

    /// Max |(U†U − I)_{ij}| over all entries.
    fn unitarity_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let mut acc = C_ZERO;
                for k in 0..d {
                    acc += self.matrix[k * d + i].conj() * self.matrix[k * d + j];
                }
                let expected = if i == j { C_ONE } else { C_ZERO };
                worst = worst.max((acc - expected).norm());
            }
        }
        worst
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn identity(arity: usize) -> Self {
        let dim = 1usize << arity;
        let mut matrix = vec![C_ZERO; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = C_ONE;
        }
        Self { arity, dim, matrix }
    }

    pub fn pauli_x() -> Self {
        Self {
            arity: 1,
            dim: 2,
            matrix: vec![C_ZERO, C_ONE, C_ONE, C_ZERO],
        }
    }

    /// iY as the real matrix [[0, 1], [−1, 0]].
    pub fn pauli_iy() -> Self {
        Self {
            arity: 1,
            dim: 2,
            matrix: vec![C_ZERO, C_ONE, -C_ONE, C_ZERO],
        }
    }

    pub fn pauli_z() -> Self {
        Self {
            arity: 1,
            dim: 2,
            matrix: vec![C_ONE, C_ZERO, C_ZERO, -C_ONE],
        }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            arity: 1,
            dim: 2,
            matrix: vec![h, h, h, -h],
        }
    }

    /// Tensor product self ⊗ other as a larger gate.
    pub fn tensor(&self, other: &Self) -> Self {
        let arity = self.arity + other.arity;
        let dim = self.dim * other.dim;
        let mut matrix = vec![C_ZERO; dim * dim];
        for r0 in 0..self.dim {
            for c0 in 0..self.dim {
                let a = self.entry(r0, c0);
                if a == C_ZERO {
                    continue;
                }
                for r1 in 0..other.dim {
                    for c1 in 0..other.dim {
                        let b = other.entry(r1, c1);
                        if b != C_ZERO {
                            matrix[(r0 * other.dim + r1) * dim + (c0 * other.dim + c1)] = a * b;
                        }
                    }
                }
            }
        }
        Self { arity, dim, matrix }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_gates_are_unitary() {
        for g in [
            Gate::identity(1),
            Gate::pauli_x(),
            Gate::pauli_iy(),
            Gate::pauli_z(),
            Gate::hadamard(),
        ] {
            assert!(g.unitarity_deviation() < TOL);
        }
    }

    #[test]
    fn non_unitary_rejected() {
        let bad = vec![C_ONE, C_ONE, C_ZERO, C_ONE];
        assert!(matches!(Gate::new(1, bad), Err(Error::NotUnitary { .. })));
    }

    #[test]
    fn wrong_size_rejected() {
        assert!(matches!(
            Gate::new(1, vec![C_ONE; 3]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn tensor_of_paulis_is_unitary() {
        let xz = Gate::pauli_x().tensor(&Gate::pauli_z());
        assert_eq!(xz.arity(), 2);
        assert!(xz.unitarity_deviation() < TOL);
        // X⊗Z maps |00⟩ -> |10⟩.
        assert_eq!(xz.entry(0b10, 0b00), C_ONE);
    }
}
