//! Forward error correction for the 96-byte drone-ID block: CRC-24A
//! framing, LTE turbo coding and rate matching to 7200 channel bits.

mod crc;
mod rate_match;
mod turbo;

pub use crc::{crc24, crc24_bytes, CRC24_POLY};
pub use rate_match::{rate_dematch, rate_match};
pub use turbo::{turbo_decode_soft, turbo_encode, CODED_BITS, INFO_BITS, MAX_ITERATIONS, STREAM_LEN};

use crate::error::{Error, Result};
use crate::layout::CHANNEL_BITS;

/// Decoded block size in bytes, CRC included.
pub const BLOCK_BYTES: usize = INFO_BITS / 8;
/// Bytes covered by the CRC.
pub const CONTENT_BYTES: usize = BLOCK_BYTES - 3;

/// Soft magnitude assigned to a hard channel bit.
pub const HARD_BIT_LLR: f64 = 8.0;

pub type Block = [u8; BLOCK_BYTES];

/// MSB-first bit expansion.
pub fn bytes_to_bits(bytes: &[u8]) -> Vec<u8> {
    bytes.iter().flat_map(|b| (0..8).rev().map(move |i| (b >> i) & 1)).collect()
}

pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    bits.chunks(8)
        .map(|c| c.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect()
}

/// Append the CRC-24 of the first 93 bytes.
pub fn seal_block(content: &[u8]) -> Result<Block> {
    if content.len() != CONTENT_BYTES {
        return Err(Error::InvalidArgument(format!(
            "block content must be {CONTENT_BYTES} bytes, got {}",
            content.len()
        )));
    }
    let mut block = [0u8; BLOCK_BYTES];
    block[..CONTENT_BYTES].copy_from_slice(content);
    block[CONTENT_BYTES..].copy_from_slice(&crc24_bytes(content));
    Ok(block)
}

/// `crc24` over the whole block; zero for an intact block.
pub fn block_residual(block: &[u8]) -> u32 {
    crc24(block)
}

/// A block together with its channel representation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodedBlock {
    /// 768 bits, MSB-first per byte.
    pub info_bits: Vec<u8>,
    /// 7200 rate-matched bits.
    pub channel_bits: Vec<u8>,
}

impl CodedBlock {
    pub fn encode(block: &Block) -> Result<Self> {
        if block_residual(block) != 0 {
            return Err(Error::InvalidArgument("block fails its CRC-24".into()));
        }
        let info_bits = bytes_to_bits(block);
        let channel_bits = rate_match(&turbo_encode(&info_bits)?)?;
        Ok(Self { info_bits, channel_bits })
    }
}

pub fn hard_to_soft(bits: &[u8]) -> Vec<f64> {
    bits.iter()
        .map(|&b| if b & 1 == 0 { HARD_BIT_LLR } else { -HARD_BIT_LLR })
        .collect()
}

/// Decode 7200 descrambled hard bits. Only a block whose CRC-24 verifies
/// is returned.
pub fn turbo_decode(channel_bits: &[u8]) -> Result<Block> {
    if channel_bits.len() != CHANNEL_BITS {
        return Err(Error::InvalidArgument(format!(
            "need {CHANNEL_BITS} channel bits, got {}",
            channel_bits.len()
        )));
    }
    let soft = rate_dematch(&hard_to_soft(channel_bits))?;
    let (bits, ok) = turbo_decode_soft(&soft, |bits| crc24(&bits_to_bytes(bits)) == 0)?;
    let bytes = bits_to_bytes(&bits);
    if !ok {
        return Err(Error::Integrity { residual: crc24(&bytes) });
    }
    let mut block = [0u8; BLOCK_BYTES];
    block.copy_from_slice(&bytes);
    Ok(block)
}
