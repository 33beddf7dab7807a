use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A binary vector, one `bool` per position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Bits(Vec<bool>);

impl Bits {
    pub fn new(bits: Vec<bool>) -> Self {
        Bits(bits)
    }

    pub fn zeros(len: usize) -> Self {
        Bits(vec![false; len])
    }

    /// The `width` least significant bits of `value`, most significant first.
    pub fn from_uint(value: u64, width: usize) -> Self {
        Bits((0..width).rev().map(|i| i < 64 && value >> i & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.0.iter().copied()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn complement(&self) -> Self {
        Bits(self.0.iter().map(|b| !b).collect())
    }

    pub fn xor(&self, other: &Bits) -> Result<Bits> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(Bits(self.iter().zip(other.iter()).map(|(a, b)| a ^ b).collect()))
    }

    /// Packs MSB-first into hex digits, left-aligned with zero padding.
    pub fn to_hex(&self) -> String {
        self.0
            .chunks(4)
            .map(|nibble| {
                let v = nibble
                    .iter()
                    .chain(std::iter::repeat(&false))
                    .take(4)
                    .fold(0u32, |acc, &b| acc << 1 | b as u32);
                char::from_digit(v, 16).unwrap()
            })
            .collect()
    }

    /// Inverse of [`Bits::to_hex`]. Pad bits beyond `len` must be zero.
    pub fn from_hex(hex: &str, len: usize) -> Result<Bits> {
        let digits = len.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::InvalidParameter(format!(
                "{len} bits need {digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut bits = Vec::with_capacity(digits * 4);
        for c in hex.chars() {
            let v = c
                .to_digit(16)
                .ok_or_else(|| Error::InvalidParameter(format!("bad hex digit {c:?}")))?;
            bits.extend((0..4).rev().map(|i| v >> i & 1 == 1));
        }
        if bits[len..].iter().any(|&b| b) {
            return Err(Error::InvalidParameter("nonzero pad bits".into()));
        }
        bits.truncate(len);
        Ok(Bits(bits))
    }
}

impl From<Vec<bool>> for Bits {
    fn from(v: Vec<bool>) -> Self {
        Bits(v)
    }
}

impl FromStr for Bits {
    type Err = Error;

    /// Parses a string of `0`/`1` characters.
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("bad bit character {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Bits)
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_packing_is_msb_first_left_aligned() {
        let b: Bits = "101".parse().unwrap();
        assert_eq!(b.to_hex(), "a");
        let b: Bits = "11110000_1".replace('_', "").parse().unwrap();
        assert_eq!(b.to_hex(), "f08");
        assert_eq!(Bits::from_hex("f08", 9).unwrap(), b);
    }

    #[test]
    fn hex_rejects_nonzero_padding() {
        assert!(Bits::from_hex("f", 3).is_err());
        assert!(Bits::from_hex("e", 3).is_ok());
        assert!(Bits::from_hex("e0", 3).is_err());
    }

    #[test]
    fn from_uint_is_msb_first() {
        assert_eq!(Bits::from_uint(5, 4).to_string(), "0101");
        assert_eq!(Bits::from_uint(0, 3).to_string(), "000");
    }
}
