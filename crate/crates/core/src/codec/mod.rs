//! Canonical self-delimiting binary codes.
//!
//! Every object class (naturals, integers, rationals, Gaussian rationals,
//! sparse state vectors, sparse matrices, pairs) gets a prefix-free code, and
//! the code length defines the surrogate description complexity used by the
//! rest of the crate. Naturals use the Elias gamma code of k+1; integers are
//! zigzag-mapped onto naturals so a single unsigned path serves both.

mod object;

pub use object::{
    decode_object, decode_state_payload, encode_object, len_gaussian, len_int, len_matrix_payload,
    len_nat, len_pair_payload, len_rational, len_state_payload, EncodableObject, MAX_QUBITS,
    OBJECT_TAG_BITS, SCALAR_TAG_BITS,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A self-delimiting bit string.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Code {
    bits: Vec<bool>,
}

impl Code {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Parses a string of '0'/'1' characters; test helper.
    pub fn from_bit_str(s: &str) -> Self {
        Self {
            bits: s.chars().map(|c| c == '1').collect(),
        }
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// 2^{-len}, the weight this code contributes to algorithmic probability.
    pub fn weight(&self) -> f64 {
        (-(self.bits.len() as f64)).exp2()
    }

    pub fn is_prefix_of(&self, other: &Code) -> bool {
        other.bits.len() >= self.bits.len() && other.bits[..self.bits.len()] == self.bits[..]
    }

    /// Hex packing, most significant bit first, zero-padded to a whole byte.
    pub fn to_hex(&self) -> String {
        let mut out = String::new();
        for chunk in self.bits.chunks(8) {
            let mut byte = 0u8;
            for (i, &b) in chunk.iter().enumerate() {
                if b {
                    byte |= 1 << (7 - i);
                }
            }
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }

    pub fn from_hex(hex: &str, bit_len: usize) -> Result<Self> {
        if !hex.len().is_multiple_of(2) {
            return Err(Error::Decode("hex string must have even length".into()));
        }
        let mut bits = Vec::with_capacity(hex.len() * 4);
        for i in (0..hex.len()).step_by(2) {
            let byte = u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|e| Error::Decode(format!("bad hex byte: {e}")))?;
            for k in 0..8 {
                bits.push(byte & (1 << (7 - k)) != 0);
            }
        }
        if bit_len > bits.len() || bits.len() - bit_len >= 8 {
            return Err(Error::Decode(format!(
                "bit length {bit_len} inconsistent with {} hex bits",
                bits.len()
            )));
        }
        if bits[bit_len..].iter().any(|&b| b) {
            return Err(Error::Decode("nonzero padding bits".into()));
        }
        bits.truncate(bit_len);
        Ok(Self { bits })
    }
}

/// Serialized form: hex digits plus the exact bit length, so trailing
/// padding is never ambiguous.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CodeRepr {
    pub hex: String,
    pub bit_len: usize,
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CodeRepr {
            hex: self.to_hex(),
            bit_len: self.len(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Code {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = CodeRepr::deserialize(deserializer)?;
        Code::from_hex(&repr.hex, repr.bit_len).map_err(serde::de::Error::custom)
    }
}

/// Append-only bit sink used by the encoders.
#[derive(Debug, Default)]
pub struct BitWriter {
    bits: Vec<bool>,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    /// Writes `width` bits of `value`, most significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        for i in (0..width).rev() {
            self.bits.push(value & (1 << i) != 0);
        }
    }

    /// Elias gamma code of `value >= 1`: floor(log2 v) zeros, then the
    /// binary expansion of v.
    pub fn push_gamma(&mut self, value: u64) {
        debug_assert!(value >= 1);
        let width = 64 - value.leading_zeros();
        for _ in 0..(width - 1) {
            self.bits.push(false);
        }
        self.push_bits(value, width);
    }

    pub fn push_nat(&mut self, k: u64) -> Result<()> {
        let v = k
            .checked_add(1)
            .ok_or_else(|| Error::Unencodable("natural too large for gamma code".into()))?;
        self.push_gamma(v);
        Ok(())
    }

    pub fn push_int(&mut self, i: i64) -> Result<()> {
        self.push_nat(zigzag(i))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn finish(self) -> Code {
        Code { bits: self.bits }
    }
}

/// Cursor over a bit string used by the decoders.
#[derive(Debug)]
pub struct BitReader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bits: &'a [bool]) -> Self {
        Self { bits, pos: 0 }
    }

    pub fn read_bit(&mut self) -> Result<bool> {
        if self.pos >= self.bits.len() {
            return Err(Error::Decode("unexpected end of code".into()));
        }
        let b = self.bits[self.pos];
        self.pos += 1;
        Ok(b)
    }

    pub fn read_gamma(&mut self) -> Result<u64> {
        let mut zeros = 0u32;
        loop {
            if self.read_bit()? {
                break;
            }
            zeros += 1;
            if zeros >= 64 {
                return Err(Error::Decode("gamma code too long".into()));
            }
        }
        let mut value = 1u64;
        for _ in 0..zeros {
            value = (value << 1) | u64::from(self.read_bit()?);
        }
        Ok(value)
    }

    pub fn read_nat(&mut self) -> Result<u64> {
        Ok(self.read_gamma()? - 1)
    }

    pub fn read_int(&mut self) -> Result<i64> {
        Ok(unzigzag(self.read_nat()?))
    }

    pub fn consumed(&self) -> usize {
        self.pos
    }

    pub fn fully_consumed(&self) -> bool {
        self.pos == self.bits.len()
    }
}

/// 0, -1, 1, -2, 2, ... onto 0, 1, 2, 3, 4, ...
pub fn zigzag(i: i64) -> u64 {
    ((i << 1) ^ (i >> 63)) as u64
}

pub fn unzigzag(k: u64) -> i64 {
    ((k >> 1) as i64) ^ -((k & 1) as i64)
}

/// Kraft sum of a family of codes after verifying pairwise prefix-freedom.
///
/// Returns the sum of 2^{-len}; a prefix collision is an error naming the
/// offending pair, and a sum above 1 (which prefix-freedom rules out up to
/// rounding) is an error as well.
pub fn kraft_check(codes: &[Code]) -> Result<f64> {
    let mut sorted: Vec<&Code> = codes.iter().collect();
    sorted.sort();
    for pair in sorted.windows(2) {
        if pair[0].is_prefix_of(pair[1]) {
            return Err(Error::PrefixViolation {
                shorter: pair[0].to_hex(),
                longer: pair[1].to_hex(),
            });
        }
    }
    let mut sum = 0.0_f64;
    for code in codes {
        sum += code.weight();
    }
    if sum > 1.0 + 1e-9 {
        return Err(Error::Other(format!("Kraft sum {sum} exceeds 1")));
    }
    Ok(sum)
}
