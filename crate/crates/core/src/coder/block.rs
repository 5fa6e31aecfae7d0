//! Self-describing compressed block and its wire format.
//!
//! Layout (little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "MAUC"
//! 4       1     version (1)
//! 5       2     k (u16)
//! 7       1     order (u8)
//! 8       8     n, symbol count (u64)
//! 16      8     context fingerprint (u64)
//! 24      8     payload length in bits (u64)
//! 32      ...   payload, ceil(bits / 8) bytes, last byte zero-padded
//! ```

use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"MAUC";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 32;

/// Header plus arithmetic-coded payload for one sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodedBlock {
    pub k: u16,
    pub order: u8,
    pub n: u64,
    pub context_fingerprint: u64,
    pub payload_length_bits: u64,
    pub payload: Vec<u8>,
}

impl EncodedBlock {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.extend_from_slice(&self.k.to_le_bytes());
        out.push(self.order);
        out.extend_from_slice(&self.n.to_le_bytes());
        out.extend_from_slice(&self.context_fingerprint.to_le_bytes());
        out.extend_from_slice(&self.payload_length_bits.to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::MalformedBlock(format!(
                "block is {} bytes, shorter than the {HEADER_LEN}-byte header",
                bytes.len()
            )));
        }
        if bytes[0..4] != MAGIC {
            return Err(Error::MalformedBlock("bad magic".to_string()));
        }
        if bytes[4] != VERSION {
            return Err(Error::MalformedBlock(format!(
                "unsupported version {}",
                bytes[4]
            )));
        }
        let k = u16::from_le_bytes([bytes[5], bytes[6]]);
        let order = bytes[7];
        let n = u64::from_le_bytes(bytes[8..16].try_into().unwrap());
        let context_fingerprint = u64::from_le_bytes(bytes[16..24].try_into().unwrap());
        let payload_length_bits = u64::from_le_bytes(bytes[24..32].try_into().unwrap());
        let payload = bytes[HEADER_LEN..].to_vec();
        let block = EncodedBlock {
            k,
            order,
            n,
            context_fingerprint,
            payload_length_bits,
            payload,
        };
        block.validate()?;
        Ok(block)
    }

    /// Structural checks: payload byte count matches the bit count and the
    /// zero padding in the final byte is intact.
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::MalformedBlock(format!("alphabet size {}", self.k)));
        }
        if self.order > 1 {
            return Err(Error::MalformedBlock(format!("order {}", self.order)));
        }
        let want_bytes = self.payload_length_bits.div_ceil(8);
        if self.payload.len() as u64 != want_bytes {
            return Err(Error::MalformedBlock(format!(
                "payload is {} bytes but {} bits require {} bytes (truncated payload?)",
                self.payload.len(),
                self.payload_length_bits,
                want_bytes
            )));
        }
        let pad_bits = (8 - (self.payload_length_bits % 8) as u8) % 8;
        if pad_bits > 0 {
            let last = *self.payload.last().unwrap();
            if last & ((1u8 << pad_bits) - 1) != 0 {
                return Err(Error::MalformedBlock(
                    "nonzero padding bits in final payload byte".to_string(),
                ));
            }
        }
        Ok(())
    }
}

/// FNV-1a over a byte stream; used to fingerprint warm-start counts.
pub(crate) struct Fnv1a(u64);

impl Fnv1a {
    const OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
    const PRIME: u64 = 0x0000_0100_0000_01b3;

    pub fn new() -> Self {
        Fnv1a(Self::OFFSET)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(Self::PRIME);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_roundtrips_bit_exactly() {
        let block = EncodedBlock {
            k: 5,
            order: 1,
            n: 12345,
            context_fingerprint: 0xdead_beef_cafe_f00d,
            payload_length_bits: 11,
            payload: vec![0b1011_0110, 0b1010_0000],
        };
        let bytes = block.to_bytes();
        let back = EncodedBlock::from_bytes(&bytes).unwrap();
        assert_eq!(back, block);
        assert_eq!(back.to_bytes(), bytes);
    }

    #[test]
    fn rejects_structural_damage() {
        let block = EncodedBlock {
            k: 2,
            order: 0,
            n: 4,
            context_fingerprint: 1,
            payload_length_bits: 10,
            payload: vec![0xff, 0b1100_0000],
        };
        let good = block.to_bytes();
        assert!(EncodedBlock::from_bytes(&good).is_ok());

        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(EncodedBlock::from_bytes(&bad_magic).is_err());

        let mut bad_version = good.clone();
        bad_version[4] = 9;
        assert!(EncodedBlock::from_bytes(&bad_version).is_err());

        // Dropping the final payload byte breaks the bit-count contract.
        let truncated = &good[..good.len() - 1];
        assert!(EncodedBlock::from_bytes(truncated).is_err());

        // Nonzero padding in the final byte.
        let mut bad_pad = good;
        *bad_pad.last_mut().unwrap() |= 0b0000_0001;
        assert!(EncodedBlock::from_bytes(&bad_pad).is_err());
    }

    #[test]
    fn fnv1a_known_vectors() {
        // Published FNV-1a 64 test vectors.
        let mut h = Fnv1a::new();
        h.write(b"");
        assert_eq!(h.finish(), 0xcbf29ce484222325);
        let mut h = Fnv1a::new();
        h.write(b"a");
        assert_eq!(h.finish(), 0xaf63dc4c8601ec8c);
        let mut h = Fnv1a::new();
        h.write(b"foobar");
        assert_eq!(h.finish(), 0x85944171f73967e8);
    }
}
