//! Constructors and validators for the entangled resource families, plus
//! the dense-coding tables attached to each family.

pub mod dense;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::state::{C_ZERO, TOL};
use crate::quantum::{MeasurementBasis, StateVector, MAX_BLOCK_QUBITS};

pub use dense::{
    bell_table_for_initial, dense_coding_table, pp_table_for_initial, table_round_trip,
    DenseCodingTable,
};

/// The four Bell states. Conventions follow the protocol description:
/// ψ± = (|00⟩ ± |11⟩)/√2 and φ± = (|01⟩ ± |10⟩)/√2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BellVariant {
    PsiPlus,
    PhiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellVariant {
    /// In dense-coding message order: ψ+ ↦ 00, φ+ ↦ 01, φ− ↦ 10, ψ− ↦ 11.
    pub const ALL: [BellVariant; 4] = [
        BellVariant::PsiPlus,
        BellVariant::PhiPlus,
        BellVariant::PhiMinus,
        BellVariant::PsiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellVariant::PsiPlus => "psi+",
            BellVariant::PhiPlus => "phi+",
            BellVariant::PhiMinus => "phi-",
            BellVariant::PsiMinus => "psi-",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.label() == label)
    }

    pub fn state(self) -> StateVector {
        make_bell(self)
    }
}

impl fmt::Display for BellVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Relative sign between the two branches of a controlled state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

/// Description of the shared entangled resource distributed per block.
#[derive(Debug, Clone, PartialEq)]
pub enum ChannelSpec {
    /// One Bell pair per block; encoder holds qubit 0, receiver qubit 1.
    Bell,
    /// (|ψ₁⟩|0⟩ ± |ψ₂⟩|1⟩)/√2 on three qubits. Used both as a dense-coding
    /// channel (encoder holds qubits 0–1) and as a controlled channel
    /// (qubit 2 is the controller's).
    GhzLike {
        psi1: BellVariant,
        psi2: BellVariant,
        sign: Sign,
    },
    /// (|Cat₁⟩|0⟩ + |Cat₂⟩|1⟩)/√2 with 2m-qubit cat components; the final
    /// qubit is the controller's.
    Cat { m: usize },
    /// Entanglement-swapping channel 2^{-s/2} Σ |eᵢ⟩|fᵢ⟩ with the canonical
    /// basis sets (cat-type maximally entangled eᵢ, computational fᵢ).
    Swap { s: usize, m: usize, l: usize },
    /// Same construction with caller-supplied basis sets.
    SwapCustom {
        s: usize,
        m: usize,
        l: usize,
        e: Vec<StateVector>,
        f: Vec<StateVector>,
    },
    /// Generic N-qubit dense-coding channel; encoder holds the first `p`
    /// qubits of `state`.
    NQubitDense { state: StateVector, p: usize },
    /// General controlled state (|ψ₁⟩|a⟩ ± |ψ₂⟩|b⟩)/√2 with the
    /// controller's qubit last.
    Controlled {
        psi1: StateVector,
        psi2: StateVector,
        a: StateVector,
        b: StateVector,
        sign: Sign,
    },
    /// Controlled bidirectional state
    /// (|ψ₁⟩|ψ₂⟩|a⟩ ± |ψ₃⟩|ψ₄⟩|b⟩)/√2; the 5-qubit family arises when all
    /// ψᵢ are Bell states.
    ControlledBidirectional {
        psi1: StateVector,
        psi2: StateVector,
        psi3: StateVector,
        psi4: StateVector,
        a: StateVector,
        b: StateVector,
        sign: Sign,
    },
}

/// Family tag used in diagnostics and transcript headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelFamily {
    Bell,
    GhzLike,
    NQubitDense,
    SwapGeneric,
    ControlledNPlus1,
    Controlled2NPlus1,
    FiveQubitBcst,
    Cat,
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ChannelFamily::Bell => "bell",
            ChannelFamily::GhzLike => "ghz_like",
            ChannelFamily::NQubitDense => "n_qubit_dense",
            ChannelFamily::SwapGeneric => "swap_generic",
            ChannelFamily::ControlledNPlus1 => "controlled_n_plus_1",
            ChannelFamily::Controlled2NPlus1 => "controlled_2n_plus_1",
            ChannelFamily::FiveQubitBcst => "five_qubit_bcst",
            ChannelFamily::Cat => "cat",
        };
        f.write_str(s)
    }
}

impl ChannelSpec {
    pub fn ghz_like_default() -> Self {
        ChannelSpec::GhzLike {
            psi1: BellVariant::PsiPlus,
            psi2: BellVariant::PhiPlus,
            sign: Sign::Plus,
        }
    }

    pub fn family(&self) -> ChannelFamily {
        match self {
            ChannelSpec::Bell => ChannelFamily::Bell,
            ChannelSpec::GhzLike { .. } => ChannelFamily::GhzLike,
            ChannelSpec::Cat { .. } => ChannelFamily::Cat,
            ChannelSpec::Swap { .. } | ChannelSpec::SwapCustom { .. } => ChannelFamily::SwapGeneric,
            ChannelSpec::NQubitDense { .. } => ChannelFamily::NQubitDense,
            ChannelSpec::Controlled { .. } => ChannelFamily::ControlledNPlus1,
            ChannelSpec::ControlledBidirectional { psi1, .. } => {
                if psi1.num_qubits() == 2 {
                    ChannelFamily::FiveQubitBcst
                } else {
                    ChannelFamily::Controlled2NPlus1
                }
            }
        }
    }

    /// Total qubits per block, including any controller qubit.
    pub fn block_qubits(&self) -> usize {
        match self {
            ChannelSpec::Bell => 2,
            ChannelSpec::GhzLike { .. } => 3,
            ChannelSpec::Cat { m } => 2 * m + 1,
            ChannelSpec::Swap { m, l, .. } | ChannelSpec::SwapCustom { m, l, .. } => m + l,
            ChannelSpec::NQubitDense { state, .. } => state.num_qubits(),
            ChannelSpec::Controlled { psi1, .. } => psi1.num_qubits() + 1,
            ChannelSpec::ControlledBidirectional { psi1, psi2, .. } => {
                psi1.num_qubits() + psi2.num_qubits() + 1
            }
        }
    }

    /// Whether the canonical text form can express this spec.
    pub fn has_canonical_text(&self) -> bool {
        matches!(
            self,
            ChannelSpec::Bell
                | ChannelSpec::GhzLike { .. }
                | ChannelSpec::Cat { .. }
                | ChannelSpec::Swap { .. }
        )
    }
}

impl fmt::Display for ChannelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelSpec::Bell => write!(f, "bell"),
            ChannelSpec::GhzLike { psi1, psi2, sign } => {
                if *psi1 == BellVariant::PsiPlus
                    && *psi2 == BellVariant::PhiPlus
                    && *sign == Sign::Plus
                {
                    write!(f, "ghz-like")
                } else {
                    write!(
                        f,
                        "controlled:psi1={},psi2={},sign={}",
                        psi1.label(),
                        psi2.label(),
                        sign.symbol()
                    )
                }
            }
            ChannelSpec::Cat { m } => write!(f, "cat:m={m}"),
            ChannelSpec::Swap { s, m, l } => write!(f, "swap:s={s},m={m},l={l}"),
            ChannelSpec::SwapCustom { s, m, l, .. } => {
                write!(f, "swap-custom:s={s},m={m},l={l}")
            }
            ChannelSpec::NQubitDense { state, p } => {
                write!(f, "dense-custom:n={},p={}", state.num_qubits(), p)
            }
            ChannelSpec::Controlled { .. } => write!(f, "controlled:custom"),
            ChannelSpec::ControlledBidirectional { .. } => {
                write!(f, "controlled-bidirectional:custom")
            }
        }
    }
}

fn parse_kv(params: &str) -> Result<Vec<(&str, &str)>> {
    params
        .split(',')
        .map(|item| {
            item.split_once('=')
                .ok_or_else(|| Error::InvalidChannel(format!("expected key=value, got `{item}`")))
        })
        .collect()
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::InvalidChannel(format!("`{key}` must be an integer, got `{value}`")))
}

impl FromStr for ChannelSpec {
    type Err = Error;

    /// Grammar: `bell | ghz-like | cat:m=<int> | swap:s=<int>,m=<int>,l=<int>
    /// | controlled:psi1=<bell>,psi2=<bell>,sign=<+|->`.
    fn from_str(text: &str) -> Result<Self> {
        let (head, params) = match text.split_once(':') {
            Some((h, p)) => (h, Some(p)),
            None => (text, None),
        };
        match (head, params) {
            ("bell", None) => Ok(ChannelSpec::Bell),
            ("ghz-like", None) => Ok(ChannelSpec::ghz_like_default()),
            ("cat", Some(p)) => {
                let kv = parse_kv(p)?;
                match kv.as_slice() {
                    [("m", v)] => Ok(ChannelSpec::Cat {
                        m: parse_usize("m", v)?,
                    }),
                    _ => Err(Error::InvalidChannel(format!(
                        "cat takes only m=<int>: `{text}`"
                    ))),
                }
            }
            ("swap", Some(p)) => {
                let mut s = None;
                let mut m = None;
                let mut l = None;
                for (k, v) in parse_kv(p)? {
                    match k {
                        "s" => s = Some(parse_usize(k, v)?),
                        "m" => m = Some(parse_usize(k, v)?),
                        "l" => l = Some(parse_usize(k, v)?),
                        _ => {
                            return Err(Error::InvalidChannel(format!(
                                "unknown swap parameter `{k}`"
                            )))
                        }
                    }
                }
                match (s, m, l) {
                    (Some(s), Some(m), Some(l)) => Ok(ChannelSpec::Swap { s, m, l }),
                    _ => Err(Error::InvalidChannel(
                        "swap requires s=, m= and l=".to_string(),
                    )),
                }
            }
            ("controlled", Some(p)) => {
                let mut psi1 = BellVariant::PsiPlus;
                let mut psi2 = BellVariant::PhiPlus;
                let mut sign = Sign::Plus;
                for (k, v) in parse_kv(p)? {
                    match k {
                        "psi1" => {
                            psi1 = BellVariant::from_label(v).ok_or_else(|| {
                                Error::InvalidChannel(format!("unknown Bell state `{v}`"))
                            })?
                        }
                        "psi2" => {
                            psi2 = BellVariant::from_label(v).ok_or_else(|| {
                                Error::InvalidChannel(format!("unknown Bell state `{v}`"))
                            })?
                        }
                        "sign" => {
                            sign = match v {
                                "+" => Sign::Plus,
                                "-" => Sign::Minus,
                                _ => {
                                    return Err(Error::InvalidChannel(format!(
                                        "sign must be + or -, got `{v}`"
                                    )))
                                }
                            }
                        }
                        _ => {
                            return Err(Error::InvalidChannel(format!(
                                "unknown controlled parameter `{k}`"
                            )))
                        }
                    }
                }
                Ok(ChannelSpec::GhzLike { psi1, psi2, sign })
            }
            _ => Err(Error::InvalidChannel(format!(
                "unrecognized channel `{text}`"
            ))),
        }
    }
}

/// Outcome of `validate_conditions`: overall verdict plus one diagnostic
/// per violated constraint.
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

impl ConditionReport {
    fn from_violations(violations: Vec<String>) -> Self {
        Self {
            ok: violations.is_empty(),
            violations,
        }
    }
}

/// The named Bell state.
pub fn make_bell(variant: BellVariant) -> StateVector {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let amps = match variant {
        BellVariant::PsiPlus => vec![h, C_ZERO, C_ZERO, h],
        BellVariant::PsiMinus => vec![h, C_ZERO, C_ZERO, -h],
        BellVariant::PhiPlus => vec![C_ZERO, h, h, C_ZERO],
        BellVariant::PhiMinus => vec![C_ZERO, h, -h, C_ZERO],
    };
    StateVector::new(2, amps).expect("bell state")
}

/// k-qubit cat state (|0…0⟩ ± |1…1⟩)/√2.
pub fn make_cat(k: usize, sign: Sign) -> Result<StateVector> {
    if !(1..=MAX_BLOCK_QUBITS).contains(&k) {
        return Err(Error::BlockCapacity {
            requested: k,
            limit: MAX_BLOCK_QUBITS,
        });
    }
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2 * sign.factor(), 0.0);
    let mut amps = vec![C_ZERO; 1 << k];
    amps[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[(1 << k) - 1] = h;
    StateVector::new(k, amps)
}

fn branch_superposition(
    branch_a: StateVector,
    branch_b: StateVector,
    sign: Sign,
) -> Result<StateVector> {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    branch_a.superpose(&branch_b, h, h * sign.factor())
}

/// Validate every family constraint; diagnostics name the violated one.
pub fn validate_conditions(spec: &ChannelSpec) -> ConditionReport {
    let mut violations = Vec::new();
    match spec {
        ChannelSpec::Bell => {}
        ChannelSpec::GhzLike { psi1, psi2, .. } => {
            if psi1 == psi2 {
                violations.push(format!(
                    "branch states must differ (|psi1> != |psi2>): both are {}",
                    psi1.label()
                ));
            }
        }
        ChannelSpec::Cat { m } => {
            if *m < 1 {
                violations.push("cat channel requires m >= 1".to_string());
            }
        }
        ChannelSpec::Swap { s, m, l } => {
            check_swap_shape(*s, *m, *l, &mut violations);
        }
        ChannelSpec::SwapCustom { s, m, l, e, f } => {
            check_swap_shape(*s, *m, *l, &mut violations);
            check_basis_set("e", e, *m, 1 << s, &mut violations);
            check_basis_set("f", f, *l, 1 << s, &mut violations);
        }
        ChannelSpec::NQubitDense { state, p } => {
            let n = state.num_qubits();
            if !(*p >= n.div_ceil(2) && *p < n) {
                violations.push(format!(
                    "dense-coding split requires N/2 <= p < N, got p={p} of N={n}"
                ));
            }
        }
        ChannelSpec::Controlled {
            psi1, psi2, a, b, ..
        } => {
            if psi1.num_qubits() != psi2.num_qubits() {
                violations.push("branch states must have equal size".to_string());
            } else if states_equal(psi1, psi2) {
                violations.push("branch states must differ (|psi1> != |psi2>)".to_string());
            }
            check_control_pair(a, b, &mut violations);
        }
        ChannelSpec::ControlledBidirectional {
            psi1,
            psi2,
            psi3,
            psi4,
            a,
            b,
            ..
        } => {
            if psi1.num_qubits() != psi3.num_qubits() || psi2.num_qubits() != psi4.num_qubits() {
                violations.push("branch states must have matching sizes".to_string());
            } else {
                if states_equal(psi1, psi3) {
                    violations.push(
                        "bidirectional condition violated: |psi1> must differ from |psi3>"
                            .to_string(),
                    );
                }
                if states_equal(psi2, psi4) {
                    violations.push(
                        "bidirectional condition violated: |psi2> must differ from |psi4>"
                            .to_string(),
                    );
                }
            }
            check_control_pair(a, b, &mut violations);
        }
    }
    ConditionReport::from_violations(violations)
}

fn states_equal(a: &StateVector, b: &StateVector) -> bool {
    a.fidelity(b).map(|f| f > 1.0 - TOL).unwrap_or(false)
}

fn check_control_pair(a: &StateVector, b: &StateVector, violations: &mut Vec<String>) {
    if a.num_qubits() != 1 || b.num_qubits() != 1 {
        violations.push("control states |a>, |b> must be single qubits".to_string());
        return;
    }
    if a.inner(b).map(|v| v.norm()).unwrap_or(1.0) > 1e-9 {
        violations.push("control states must satisfy <a|b> = 0".to_string());
    }
}

fn check_swap_shape(s: usize, m: usize, l: usize, violations: &mut Vec<String>) {
    if s < 1 {
        violations.push("swap channel requires s >= 1".to_string());
    }
    if m < 2 {
        violations.push("swap channel requires m >= 2 (|e_i> must be entangled)".to_string());
    }
    if m < s {
        violations.push(format!("swap channel requires m >= s, got m={m}, s={s}"));
    }
    if l < s {
        violations.push(format!("swap channel requires l >= s, got l={l}, s={s}"));
    }
}

fn check_basis_set(
    name: &str,
    set: &[StateVector],
    qubits: usize,
    expected_len: usize,
    violations: &mut Vec<String>,
) {
    if set.len() != expected_len {
        violations.push(format!(
            "{name}-set must contain 2^s = {expected_len} states, got {}",
            set.len()
        ));
        return;
    }
    for (i, v) in set.iter().enumerate() {
        if v.num_qubits() != qubits {
            violations.push(format!(
                "{name}[{i}] must be a {qubits}-qubit state, got {}",
                v.num_qubits()
            ));
            return;
        }
    }
    for i in 0..set.len() {
        for j in (i + 1)..set.len() {
            let overlap = set[i].inner(&set[j]).map(|v| v.norm()).unwrap_or(1.0);
            if overlap > 1e-9 {
                violations.push(format!(
                    "{name}-set is not orthonormal: |<{name}{i}|{name}{j}>| = {overlap:.3e}"
                ));
                return;
            }
        }
    }
}

/// Canonical maximally entangled m-qubit set of size `count`: cat-type
/// states (|x⟩ ± |x̄⟩)/√2, plus-sign states first. For m = 2 this is
/// exactly [ψ+, φ+, ψ−, φ−].
pub fn canonical_entangled_set(m: usize, count: usize) -> Result<Vec<StateVector>> {
    let half = 1usize << (m - 1);
    if count > 2 * half {
        return Err(Error::InvalidChannel(format!(
            "cannot build {count} orthonormal {m}-qubit cat-type states"
        )));
    }
    let full = (1usize << m) - 1;
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut set = Vec::with_capacity(count);
    for idx in 0..count {
        let (x, sign) = if idx < half {
            (idx, 1.0)
        } else {
            (idx - half, -1.0)
        };
        let mut amps = vec![C_ZERO; 1 << m];
        amps[x] = h;
        amps[full ^ x] = h * sign;
        set.push(StateVector::new(m, amps)?);
    }
    Ok(set)
}

/// Canonical l-qubit set: computational kets |0⟩, |1⟩, ….
pub fn canonical_computational_set(l: usize, count: usize) -> Result<Vec<StateVector>> {
    if count > 1 << l {
        return Err(Error::InvalidChannel(format!(
            "cannot build {count} computational {l}-qubit states"
        )));
    }
    Ok((0..count)
        .map(|i| StateVector::computational(l, i))
        .collect())
}

/// Resolve the concrete basis sets of a swap channel.
pub fn swap_basis_sets(spec: &ChannelSpec) -> Result<(Vec<StateVector>, Vec<StateVector>)> {
    match spec {
        ChannelSpec::Swap { s, m, l } => Ok((
            canonical_entangled_set(*m, 1 << s)?,
            canonical_computational_set(*l, 1 << s)?,
        )),
        ChannelSpec::SwapCustom { e, f, .. } => Ok((e.clone(), f.clone())),
        other => Err(Error::UnsupportedFamily(format!(
            "{} is not a swap channel",
            other.family()
        ))),
    }
}

/// Build the Eq.-style swap state 2^{-s/2} Σ |eᵢ⟩|fᵢ⟩.
pub fn make_swap_state(spec: &ChannelSpec) -> Result<StateVector> {
    let report = validate_conditions(spec);
    if !report.ok {
        return Err(Error::ConditionViolation(report.violations.join("; ")));
    }
    let (m, l, s) = match spec {
        ChannelSpec::Swap { s, m, l } | ChannelSpec::SwapCustom { s, m, l, .. } => (*m, *l, *s),
        other => {
            return Err(Error::UnsupportedFamily(format!(
                "{} is not a swap channel",
                other.family()
            )))
        }
    };
    let (e, f) = swap_basis_sets(spec)?;
    let total = m + l;
    if total > MAX_BLOCK_QUBITS {
        return Err(Error::BlockCapacity {
            requested: total,
            limit: MAX_BLOCK_QUBITS,
        });
    }
    let scale = Complex64::new(1.0 / ((1usize << s) as f64).sqrt(), 0.0);
    let mut amps = vec![C_ZERO; 1 << total];
    for i in 0..(1usize << s) {
        let term = e[i].tensor(&f[i])?;
        for (idx, amp) in term.amplitudes().iter().enumerate() {
            amps[idx] += scale * amp;
        }
    }
    StateVector::new(total, amps)
}

/// Build a controlled-family state with the controller's qubit last.
pub fn make_controlled_state(spec: &ChannelSpec) -> Result<StateVector> {
    let report = validate_conditions(spec);
    if !report.ok {
        return Err(Error::ConditionViolation(report.violations.join("; ")));
    }
    match spec {
        ChannelSpec::GhzLike { psi1, psi2, sign } => branch_superposition(
            psi1.state().tensor(&StateVector::zero())?,
            psi2.state().tensor(&StateVector::one())?,
            *sign,
        ),
        ChannelSpec::Cat { m } => make_cat_controlled(*m),
        ChannelSpec::Controlled {
            psi1,
            psi2,
            a,
            b,
            sign,
        } => branch_superposition(psi1.tensor(a)?, psi2.tensor(b)?, *sign),
        ChannelSpec::ControlledBidirectional {
            psi1,
            psi2,
            psi3,
            psi4,
            a,
            b,
            sign,
        } => branch_superposition(
            StateVector::tensor_all(&[psi1, psi2, a])?,
            StateVector::tensor_all(&[psi3, psi4, b])?,
            *sign,
        ),
        other => Err(Error::UnsupportedFamily(format!(
            "{} is not a controlled family",
            other.family()
        ))),
    }
}

/// (2m+1)-qubit state (|Cat₁⟩|0⟩ + |Cat₂⟩|1⟩)/√2 with orthogonal 2m-qubit
/// cat components.
pub fn make_cat_controlled(m: usize) -> Result<StateVector> {
    if m < 1 {
        return Err(Error::InvalidChannel(
            "cat channel requires m >= 1".to_string(),
        ));
    }
    if 2 * m + 1 > MAX_BLOCK_QUBITS {
        return Err(Error::BlockCapacity {
            requested: 2 * m + 1,
            limit: MAX_BLOCK_QUBITS,
        });
    }
    branch_superposition(
        make_cat(2 * m, Sign::Plus)?.tensor(&StateVector::zero())?,
        make_cat(2 * m, Sign::Minus)?.tensor(&StateVector::one())?,
        Sign::Plus,
    )
}

/// Measurement basis for the controller's qubit of a controlled channel.
pub fn control_basis(spec: &ChannelSpec) -> Result<MeasurementBasis> {
    match spec {
        ChannelSpec::GhzLike { .. } | ChannelSpec::Cat { .. } => {
            MeasurementBasis::two_state(&StateVector::zero(), &StateVector::one())
        }
        ChannelSpec::Controlled { a, b, .. }
        | ChannelSpec::ControlledBidirectional { a, b, .. } => MeasurementBasis::two_state(a, b),
        other => Err(Error::UnsupportedFamily(format!(
            "{} has no controller qubit",
            other.family()
        ))),
    }
}

/// The two branch states a controller measurement collapses to, in outcome
/// order ("a" first). Branches exclude the controller qubit.
pub fn control_branches(spec: &ChannelSpec) -> Result<[StateVector; 2]> {
    match spec {
        ChannelSpec::GhzLike { psi1, psi2, .. } => Ok([psi1.state(), psi2.state()]),
        ChannelSpec::Cat { m } => Ok([make_cat(2 * m, Sign::Plus)?, make_cat(2 * m, Sign::Minus)?]),
        ChannelSpec::Controlled { psi1, psi2, .. } => Ok([psi1.clone(), psi2.clone()]),
        ChannelSpec::ControlledBidirectional {
            psi1,
            psi2,
            psi3,
            psi4,
            ..
        } => Ok([psi1.tensor(psi2)?, psi3.tensor(psi4)?]),
        other => Err(Error::UnsupportedFamily(format!(
            "{} has no controller qubit",
            other.family()
        ))),
    }
}
