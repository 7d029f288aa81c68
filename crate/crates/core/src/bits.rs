//! Bit-string ↔ hex helpers for message payloads.
//!
//! Bits are packed most-significant first; the final nibble is zero-padded
//! on the right. `hex_to_bits` takes the leading `count` bits back out.

use crate::error::{Error, Result};

pub fn bits_to_hex(bits: &[bool]) -> String {
    let mut out = String::with_capacity(bits.len().div_ceil(4));
    for chunk in bits.chunks(4) {
        let mut nibble = 0u8;
        for (i, &b) in chunk.iter().enumerate() {
            if b {
                nibble |= 1 << (3 - i);
            }
        }
        out.push(char::from_digit(nibble as u32, 16).expect("nibble"));
    }
    out
}

pub fn hex_to_bits(hex: &str, count: usize) -> Result<Vec<bool>> {
    let mut bits = Vec::with_capacity(hex.len() * 4);
    for c in hex.chars() {
        let nibble = c
            .to_digit(16)
            .ok_or_else(|| Error::InvalidConfig(format!("`{c}` is not a hex digit")))?
            as u8;
        for i in (0..4).rev() {
            bits.push((nibble >> i) & 1 == 1);
        }
    }
    if bits.len() < count {
        return Err(Error::MessageLength {
            expected: count,
            got: bits.len(),
        });
    }
    if bits[count..].iter().any(|&b| b) {
        return Err(Error::InvalidConfig(format!(
            "message hex carries more than {count} significant bits"
        )));
    }
    bits.truncate(count);
    Ok(bits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_various_lengths() {
        for len in [1, 3, 4, 7, 8, 13] {
            let bits: Vec<bool> = (0..len).map(|i| i % 3 == 0).collect();
            let hex = bits_to_hex(&bits);
            assert_eq!(hex_to_bits(&hex, len).unwrap(), bits);
        }
    }

    #[test]
    fn known_encoding() {
        assert_eq!(bits_to_hex(&[true, false, true, false]), "a");
        assert_eq!(bits_to_hex(&[true, true, true]), "e");
        assert_eq!(
            hex_to_bits("a3", 8).unwrap().iter().filter(|&&b| b).count(),
            4
        );
    }

    #[test]
    fn trailing_garbage_rejected() {
        assert!(hex_to_bits("ff", 4).is_err());
        assert!(hex_to_bits("f0", 4).is_ok());
    }
}
