//! Session configuration and validation.

use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::catalog::{dense_coding_table, validate_conditions, ChannelSpec};
use crate::check::CheckMode;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProtocolKind {
    /// Permutation-of-particles protocol over a dense-coding channel.
    Cdsqc,
    /// Bidirectional variant over 2n Bell pairs with two permutations.
    Cbdsqc,
    /// Entanglement-swapping channel variant.
    CdsqcAlt2,
    /// Controlled-channel variant: release via the controller's
    /// measurement instead of a permutation.
    CdsqcAlt3,
}

impl ProtocolKind {
    pub fn label(self) -> &'static str {
        match self {
            ProtocolKind::Cdsqc => "cdsqc",
            ProtocolKind::Cbdsqc => "cbdsqc",
            ProtocolKind::CdsqcAlt2 => "cdsqc-alt2",
            ProtocolKind::CdsqcAlt3 => "cdsqc-alt3",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "cdsqc" => Some(ProtocolKind::Cdsqc),
            "cbdsqc" => Some(ProtocolKind::Cbdsqc),
            "cdsqc-alt2" | "cdsqc_alt2" => Some(ProtocolKind::CdsqcAlt2),
            "cdsqc-alt3" | "cdsqc_alt3" => Some(ProtocolKind::CdsqcAlt3),
            _ => None,
        }
    }
}

/// The secure-direct-communication sub-protocol used for the encoding
/// transfer. The GV-suffixed variants are the orthogonal-state-based
/// counterparts: same encoding, GV subroutine on the transfer leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subprotocol {
    Pp,
    Cl,
    Dll,
    PpGv,
    ClGv,
    DllGv,
}

impl Subprotocol {
    pub const ALL: [Subprotocol; 6] = [
        Subprotocol::Pp,
        Subprotocol::Cl,
        Subprotocol::Dll,
        Subprotocol::PpGv,
        Subprotocol::ClGv,
        Subprotocol::DllGv,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Subprotocol::Pp => "pp",
            Subprotocol::Cl => "cl",
            Subprotocol::Dll => "dll",
            Subprotocol::PpGv => "pp-gv",
            Subprotocol::ClGv => "cl-gv",
            Subprotocol::DllGv => "dll-gv",
        }
    }

    pub fn from_label(label: &str) -> Option<Self> {
        match label {
            "pp" => Some(Subprotocol::Pp),
            "cl" => Some(Subprotocol::Cl),
            "dll" => Some(Subprotocol::Dll),
            "pp-gv" | "pp_gv" => Some(Subprotocol::PpGv),
            "cl-gv" | "cl_gv" => Some(Subprotocol::ClGv),
            "dll-gv" | "dll_gv" => Some(Subprotocol::DllGv),
            _ => None,
        }
    }

    /// Check mode on the encoding-transfer leg.
    pub fn transfer_check(self) -> CheckMode {
        match self {
            Subprotocol::Pp | Subprotocol::Cl | Subprotocol::Dll => CheckMode::Bb84,
            Subprotocol::PpGv | Subprotocol::ClGv | Subprotocol::DllGv => CheckMode::Gv,
        }
    }

    /// Ping-pong encoding carries one bit per Bell pair.
    pub fn is_pp(self) -> bool {
        matches!(self, Subprotocol::Pp | Subprotocol::PpGv)
    }
}

fn serialize_channel<S: Serializer>(
    spec: &ChannelSpec,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    if !spec.has_canonical_text() {
        return Err(serde::ser::Error::custom(format!(
            "channel `{spec}` has no canonical text form"
        )));
    }
    ser.serialize_str(&spec.to_string())
}

fn deserialize_channel<'de, D: Deserializer<'de>>(
    de: D,
) -> std::result::Result<ChannelSpec, D::Error> {
    let text = String::deserialize(de)?;
    ChannelSpec::from_str(&text).map_err(D::Error::custom)
}

/// Everything that determines a session apart from the message payloads
/// and the adversary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: ProtocolKind,
    pub subprotocol: Subprotocol,
    #[serde(
        serialize_with = "serialize_channel",
        deserialize_with = "deserialize_channel"
    )]
    pub channel: ChannelSpec,
    pub n: usize,
    pub check: CheckMode,
    pub decoy_fraction: f64,
    pub error_threshold: f64,
    pub seed: u64,
}

impl SessionConfig {
    pub fn new(protocol: ProtocolKind, channel: ChannelSpec, n: usize, seed: u64) -> Self {
        Self {
            protocol,
            subprotocol: Subprotocol::Cl,
            channel,
            n,
            check: CheckMode::Bb84,
            decoy_fraction: 0.5,
            error_threshold: 0.0,
            seed,
        }
    }

    /// Qubits the encoder holds per block.
    pub fn encoder_qubits_per_block(&self) -> Result<usize> {
        match (&self.protocol, &self.channel) {
            (ProtocolKind::Cdsqc | ProtocolKind::Cbdsqc, ChannelSpec::Bell) => Ok(1),
            (ProtocolKind::Cdsqc, ChannelSpec::GhzLike { .. }) => Ok(2),
            (ProtocolKind::Cdsqc, ChannelSpec::NQubitDense { p, .. }) => Ok(*p),
            (ProtocolKind::CdsqcAlt2, ChannelSpec::Swap { m, .. })
            | (ProtocolKind::CdsqcAlt2, ChannelSpec::SwapCustom { m, .. }) => Ok(*m),
            (ProtocolKind::CdsqcAlt3, ChannelSpec::GhzLike { .. }) => Ok(1),
            (ProtocolKind::CdsqcAlt3, ChannelSpec::Cat { m }) => Ok(*m),
            _ => Err(Error::InvalidConfig(format!(
                "channel `{}` is not usable with protocol {}",
                self.channel,
                self.protocol.label()
            ))),
        }
    }

    /// Qubits the receiver holds per block (controller qubits excluded).
    pub fn receiver_qubits_per_block(&self) -> Result<usize> {
        let controller = self.controller_qubits_per_block();
        Ok(self.channel.block_qubits() - controller - self.encoder_qubits_per_block()?)
    }

    pub fn controller_qubits_per_block(&self) -> usize {
        match (&self.protocol, &self.channel) {
            (ProtocolKind::CdsqcAlt3, _) => 1,
            _ => 0,
        }
    }

    /// Message bits per block for one direction.
    pub fn bits_per_block(&self) -> Result<usize> {
        match (&self.protocol, &self.channel) {
            (ProtocolKind::Cdsqc | ProtocolKind::Cbdsqc, ChannelSpec::Bell) => {
                Ok(if self.subprotocol.is_pp() { 1 } else { 2 })
            }
            (ProtocolKind::Cdsqc, ChannelSpec::GhzLike { .. })
            | (ProtocolKind::Cdsqc, ChannelSpec::NQubitDense { .. })
            | (ProtocolKind::CdsqcAlt2, ChannelSpec::Swap { .. })
            | (ProtocolKind::CdsqcAlt2, ChannelSpec::SwapCustom { .. }) => {
                Ok(dense_coding_table(&self.channel)?.bits_per_block())
            }
            (ProtocolKind::CdsqcAlt3, ChannelSpec::GhzLike { .. }) => Ok(2),
            // The cat family is credited with maximal dense coding: 2 bits
            // per travel qubit, i.e. 2m per block.
            (ProtocolKind::CdsqcAlt3, ChannelSpec::Cat { m }) => Ok(2 * m),
            _ => Err(Error::InvalidConfig(format!(
                "channel `{}` is not usable with protocol {}",
                self.channel,
                self.protocol.label()
            ))),
        }
    }

    /// Total message bits expected per direction.
    pub fn message_bits(&self) -> Result<usize> {
        Ok(self.bits_per_block()? * self.n)
    }

    /// Decoy count for a sequence of `len` message qubits at the session's
    /// decoy fraction f: d such that d/(len+d) = f.
    pub fn decoy_count(&self, len: usize) -> usize {
        if self.decoy_fraction <= 0.0 {
            0
        } else {
            let f = self.decoy_fraction;
            (len as f64 * f / (1.0 - f)).round() as usize
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min_n = if self.protocol == ProtocolKind::CdsqcAlt3 {
            1
        } else {
            2
        };
        if self.n < min_n {
            return Err(Error::InvalidConfig(format!(
                "{} requires n >= {min_n}, got n = {}",
                self.protocol.label(),
                self.n
            )));
        }
        if !(0.0..1.0).contains(&self.decoy_fraction) {
            return Err(Error::InvalidConfig(format!(
                "decoy fraction must lie in [0, 1), got {}",
                self.decoy_fraction
            )));
        }
        if !(0.0..=1.0).contains(&self.error_threshold) {
            return Err(Error::InvalidConfig(format!(
                "error threshold must lie in [0, 1], got {}",
                self.error_threshold
            )));
        }
        let report = validate_conditions(&self.channel);
        if !report.ok {
            return Err(Error::ConditionViolation(report.violations.join("; ")));
        }
        if self.subprotocol.is_pp() && !matches!(self.channel, ChannelSpec::Bell) {
            return Err(Error::InvalidConfig(
                "ping-pong encoding is defined over the Bell channel only".to_string(),
            ));
        }
        // Resolves the compatibility matrix and, for table-driven channels,
        // proves a dense-coding table exists.
        self.bits_per_block()?;

        // GV decoys come in pairs within a link.
        let encoder_len = self.n * self.encoder_qubits_per_block()?;
        let receiver_len = self.n * self.receiver_qubits_per_block()?;
        if self.check == CheckMode::Gv {
            for len in [encoder_len, receiver_len] {
                if !self.decoy_count(len).is_multiple_of(2) {
                    return Err(Error::InvalidConfig(format!(
                        "gv check needs an even decoy count per link; n = {} gives {}",
                        self.n,
                        self.decoy_count(len)
                    )));
                }
            }
        }
        if self.subprotocol.transfer_check() == CheckMode::Gv
            && !self.decoy_count(encoder_len).is_multiple_of(2)
        {
            return Err(Error::InvalidConfig(format!(
                "{} needs an even decoy count on the transfer leg; n = {} gives {}",
                self.subprotocol.label(),
                self.n,
                self.decoy_count(encoder_len)
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_defaults_validate() {
        let config = SessionConfig::new(ProtocolKind::Cdsqc, ChannelSpec::Bell, 4, 0);
        config.validate().unwrap();
        assert_eq!(config.message_bits().unwrap(), 8);
        assert_eq!(config.decoy_count(4), 4);
    }

    #[test]
    fn n_below_two_rejected_for_pop_protocols() {
        let config = SessionConfig::new(ProtocolKind::Cdsqc, ChannelSpec::Bell, 1, 0);
        assert!(matches!(config.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn alt3_allows_single_block() {
        let config = SessionConfig::new(
            ProtocolKind::CdsqcAlt3,
            ChannelSpec::ghz_like_default(),
            1,
            0,
        );
        config.validate().unwrap();
        assert_eq!(config.bits_per_block().unwrap(), 2);
    }

    #[test]
    fn pp_requires_bell_channel() {
        let mut config = SessionConfig::new(ProtocolKind::Cdsqc, ChannelSpec::Bell, 4, 0);
        config.subprotocol = Subprotocol::Pp;
        config.validate().unwrap();
        assert_eq!(config.message_bits().unwrap(), 4);

        config.channel = ChannelSpec::ghz_like_default();
        assert!(config.validate().is_err());
    }

    #[test]
    fn gv_requires_even_decoy_counts() {
        let mut config = SessionConfig::new(ProtocolKind::Cdsqc, ChannelSpec::Bell, 3, 0);
        config.check = CheckMode::Gv;
        assert!(config.validate().is_err());
        config.n = 4;
        config.validate().unwrap();
    }

    #[test]
    fn cat_capacity_is_two_bits_per_travel_qubit() {
        let config = SessionConfig::new(ProtocolKind::CdsqcAlt3, ChannelSpec::Cat { m: 5 }, 2, 0);
        assert_eq!(config.bits_per_block().unwrap(), 10);
        assert_eq!(config.encoder_qubits_per_block().unwrap(), 5);
        assert_eq!(config.receiver_qubits_per_block().unwrap(), 5);
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = SessionConfig::new(ProtocolKind::Cdsqc, ChannelSpec::Bell, 4, 7);
        let text = serde_json::to_string(&config).unwrap();
        let back: SessionConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, config);
    }
}
