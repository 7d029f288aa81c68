//! Dense state vectors over small multi-qubit blocks.
//!
//! Amplitudes are indexed so that qubit 0 is the most significant bit of
//! the basis-state index, matching left-to-right ket notation: the
//! amplitude of |01⟩ in a 2-qubit state sits at index 0b01 with qubit 0
//! contributing the leading bit.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Numerical tolerance for normalization, unitarity and orthonormality.
pub const TOL: f64 = 1e-12;

/// Hard cap on qubits per simulated block.
pub const MAX_BLOCK_QUBITS: usize = 16;

pub const C_ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const C_ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Normalized complex amplitude vector of an entangled block.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Build from raw amplitudes, enforcing length and normalization.
    pub fn new(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_BLOCK_QUBITS {
            return Err(Error::BlockCapacity {
                requested: num_qubits,
                limit: MAX_BLOCK_QUBITS,
            });
        }
        if amps.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                expected: 1 << num_qubits,
                got: amps.len(),
            });
        }
        let state = Self { num_qubits, amps };
        let deviation = (state.norm_sqr() - 1.0).abs();
        if deviation > TOL {
            return Err(Error::NotNormalized { deviation });
        }
        Ok(state)
    }

    /// Build from possibly unnormalized amplitudes by rescaling.
    pub fn normalized(num_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= TOL {
            return Err(Error::NotNormalized { deviation: 1.0 });
        }
        let scale = 1.0 / norm_sqr.sqrt();
        for a in amps.iter_mut() {
            *a *= scale;
        }
        Self::new(num_qubits, amps)
    }

    /// Computational basis ket |index⟩ on `num_qubits` qubits.
    pub fn computational(num_qubits: usize, index: usize) -> Self {
        assert!((1..=MAX_BLOCK_QUBITS).contains(&num_qubits));
        assert!(index < (1 << num_qubits));
        let mut amps = vec![C_ZERO; 1 << num_qubits];
        amps[index] = C_ONE;
        Self { num_qubits, amps }
    }

    pub fn zero() -> Self {
        Self::computational(1, 0)
    }

    pub fn one() -> Self {
        Self::computational(1, 1)
    }

    /// |+⟩ = (|0⟩ + |1⟩)/√2
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            num_qubits: 1,
            amps: vec![h, h],
        }
    }

    /// |−⟩ = (|0⟩ − |1⟩)/√2
    pub fn minus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            num_qubits: 1,
            amps: vec![h, -h],
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// ⟨self|other⟩
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|²
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr().clamp(0.0, 1.0))
    }

    /// Kronecker product self ⊗ other.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let total = self.num_qubits + other.num_qubits;
        if total > MAX_BLOCK_QUBITS {
            return Err(Error::BlockCapacity {
                requested: total,
                limit: MAX_BLOCK_QUBITS,
            });
        }
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Self {
            num_qubits: total,
            amps,
        })
    }

    /// Tensor product of several factors, left to right.
    pub fn tensor_all(factors: &[&Self]) -> Result<Self> {
        assert!(!factors.is_empty());
        let mut acc = factors[0].clone();
        for f in &factors[1..] {
            acc = acc.tensor(f)?;
        }
        Ok(acc)
    }

    /// Linear combination a·self + b·other, renormalized.
    pub fn superpose(&self, other: &Self, a: Complex64, b: Complex64) -> Result<Self> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let amps: Vec<Complex64> = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::normalized(self.num_qubits, amps)
    }

    /// Bit of `index` corresponding to `qubit` (qubit 0 = most significant).
    #[inline]
    pub fn bit_of(index: usize, qubit: usize, num_qubits: usize) -> usize {
        (index >> (num_qubits - 1 - qubit)) & 1
    }

    fn check_targets(&self, targets: &[usize]) -> Result<()> {
        for (i, &t) in targets.iter().enumerate() {
            if t >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    index: t,
                    num_qubits: self.num_qubits,
                });
            }
            if targets[..i].contains(&t) {
                return Err(Error::DuplicateTarget { index: t });
            }
        }
        Ok(())
    }

    /// Apply `gate` to the listed target qubits (identity elsewhere).
    ///
    /// Target order matters: targets[0] is the most significant bit of the
    /// gate's own index space.
    pub fn apply_gate(&self, gate: &super::gate::Gate, targets: &[usize]) -> Result<Self> {
        self.check_targets(targets)?;
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        let n = self.num_qubits;
        let k = targets.len();
        let subdim = 1usize << k;
        // Bit positions (from LSB) of each target within the full index.
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

        let mut out = vec![C_ZERO; self.dim()];
        for base in 0..self.dim() {
            if base & target_mask != 0 {
                continue;
            }
            for (row, &row_offset) in offsets.iter().enumerate() {
                let mut acc = C_ZERO;
                for (col, &col_offset) in offsets.iter().enumerate() {
                    let m = gate.entry(row, col);
                    if m != C_ZERO {
                        acc += m * self.amps[base | col_offset];
                    }
                }
                out[base | row_offset] = acc;
            }
        }
        Ok(Self {
            num_qubits: n,
            amps: out,
        })
    }
}
