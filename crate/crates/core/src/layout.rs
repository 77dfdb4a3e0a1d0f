//! Burst geometry shared by the transmitter and receiver.

use once_cell::sync::Lazy;

/// LTE-style sample rate the bursts are defined at.
pub const SAMPLE_RATE: f64 = 15.36e6;

pub const FFT_SIZE: usize = 1024;

pub const NUM_SYMBOLS: usize = 9;

/// Cyclic prefix length of each of the nine OFDM symbols.
pub const CP_LENGTHS: [usize; NUM_SYMBOLS] = [80, 72, 72, 72, 72, 72, 72, 72, 80];

/// `(80 * 2) + (72 * 7) + (1024 * 9)`
pub const BURST_LEN: usize = 80 * 2 + 72 * 7 + FFT_SIZE * 9;

/// Distance from the burst start to the first body sample of the first
/// Zadoff-Chu symbol (grid row 3).
pub const ZC_OFFSET: usize = 80 + 72 * 3 + FFT_SIZE * 3;

pub const NUM_DATA_CARRIERS: usize = 600;

/// Bits carried by one data symbol (two per carrier).
pub const BITS_PER_SYMBOL: usize = 2 * NUM_DATA_CARRIERS;

/// Grid rows holding the Zadoff-Chu pilots and their roots.
pub const PILOT_ROWS: [usize; 2] = [3, 5];
pub const PILOT_ROOTS: [u32; 2] = [600, 147];

/// Grid rows carrying scrambled payload, in payload order. Row 0 is
/// discardable and rows 3 and 5 are pilots.
pub const DATA_ROWS: [usize; 6] = [1, 2, 4, 6, 7, 8];

/// Number of scrambled channel bits in one burst.
pub const CHANNEL_BITS: usize = DATA_ROWS.len() * BITS_PER_SYMBOL;

/// Center-shifted FFT bins occupied by data: `[212, 813)` without DC (512).
pub static DATA_CARRIERS: Lazy<[usize; NUM_DATA_CARRIERS]> = Lazy::new(|| {
    let mut out = [0usize; NUM_DATA_CARRIERS];
    for (slot, bin) in out.iter_mut().zip((212..813).filter(|&i| i != 512)) {
        *slot = bin;
    }
    out
});

/// Offset of the first body (post-prefix) sample of each symbol.
pub fn symbol_body_offsets() -> [usize; NUM_SYMBOLS] {
    let mut out = [0usize; NUM_SYMBOLS];
    let mut cursor = 0;
    for (slot, cp) in out.iter_mut().zip(CP_LENGTHS) {
        cursor += cp;
        *slot = cursor;
        cursor += FFT_SIZE;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burst_geometry() {
        assert_eq!(ZC_OFFSET, 3368);
        assert_eq!(BURST_LEN, 9880);
        assert_eq!(CP_LENGTHS.iter().sum::<usize>() + NUM_SYMBOLS * FFT_SIZE, BURST_LEN);
        assert_eq!(symbol_body_offsets()[3], ZC_OFFSET);
        assert_eq!(CHANNEL_BITS, 7200);
    }

    #[test]
    fn carrier_layout() {
        let c = &*DATA_CARRIERS;
        assert_eq!(c.len(), 600);
        assert_eq!(c[0], 212);
        assert_eq!(c[599], 812);
        assert!(!c.contains(&512));
        assert!(c.windows(2).all(|w| w[0] < w[1]));
    }
}
