//! CRC-24A: polynomial 0x864CFB, zero init, MSB first, no final XOR.

pub const CRC24_POLY: u32 = 0x86_4CFB;

const TABLE: [u32; 256] = build_table();

const fn build_table() -> [u32; 256] {
    let mut table = [0u32; 256];
    let mut i = 0;
    while i < 256 {
        let mut crc = (i as u32) << 16;
        let mut bit = 0;
        while bit < 8 {
            crc <<= 1;
            if crc & 0x100_0000 != 0 {
                crc ^= CRC24_POLY | 0x100_0000;
            }
            bit += 1;
        }
        table[i] = crc & 0xFF_FFFF;
        i += 1;
    }
    table
}

pub fn crc24(data: &[u8]) -> u32 {
    data.iter().fold(0u32, |crc, &b| {
        let idx = ((crc >> 16) as u8 ^ b) as usize;
        ((crc << 8) & 0xFF_FFFF) ^ TABLE[idx]
    })
}

/// Big-endian, ready to append to the protected data.
pub fn crc24_bytes(data: &[u8]) -> [u8; 3] {
    let c = crc24(data);
    [(c >> 16) as u8, (c >> 8) as u8, c as u8]
}
