//! Deterministic reference sequences: Zadoff-Chu pilots and the gold
//! scrambling sequence.

use std::f64::consts::PI;

use num_complex::Complex64;
use once_cell::sync::Lazy;

use crate::layout::{CHANNEL_BITS, NUM_DATA_CARRIERS};
use crate::ofdm;

/// Odd length the Zadoff-Chu formula is evaluated at before the middle
/// element is punctured.
pub const ZC_GENERATOR_LEN: u64 = 601;

const ZC_PUNCTURED_INDEX: usize = 300;

#[derive(Clone, Debug, PartialEq)]
pub struct ZcSequence {
    pub root: u32,
    /// 600 unit-magnitude values, one per data carrier.
    pub values: Vec<Complex64>,
}

/// `exp(-j*pi*root*n*(n+1)/601)` for `n = 0..=600`, before puncturing.
///
/// The integer part of the exponent is reduced modulo `2 * 601` first so
/// the phase is exact regardless of root size.
pub fn zadoff_chu_full(root: u32) -> Vec<Complex64> {
    (0..ZC_GENERATOR_LEN)
        .map(|n| {
            let k = (root as u64 % (2 * ZC_GENERATOR_LEN)) * (n * (n + 1) % (2 * ZC_GENERATOR_LEN))
                % (2 * ZC_GENERATOR_LEN);
            Complex64::from_polar(1.0, -PI * k as f64 / ZC_GENERATOR_LEN as f64)
        })
        .collect()
}

pub fn zadoff_chu(root: u32) -> ZcSequence {
    let mut values = zadoff_chu_full(root);
    values.remove(ZC_PUNCTURED_INDEX);
    debug_assert_eq!(values.len(), NUM_DATA_CARRIERS);
    ZcSequence { root, values }
}

/// The pilot's 1024-bin frequency layout: ZC values on the data carriers,
/// zeros elsewhere (including DC at bin 512).
pub fn zc_carrier_buffer(root: u32) -> Vec<Complex64> {
    ofdm::carriers_to_bins(&zadoff_chu(root).values)
}

/// Time-domain pilot symbol body (no cyclic prefix).
pub fn zc_time_domain(root: u32) -> Vec<Complex64> {
    ofdm::synthesize(&zc_carrier_buffer(root)).expect("layout buffer is 1024 bins")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoldSequence {
    /// 7200 values in `{0, 1}`.
    pub bits: Vec<u8>,
}

/// Scrambler seed for the second m-sequence.
pub const X2_SEED: u32 = 0x1234_5678;

/// LTE offset into the combined sequence.
pub const NC: usize = 1600;

const REG_LEN: usize = 31;

/// The two m-sequences, each `NC + 7200 + 31` long.
pub(crate) fn m_sequences() -> (Vec<u8>, Vec<u8>) {
    let total = NC + CHANNEL_BITS + REG_LEN;
    let mut x1 = vec![0u8; total];
    let mut x2 = vec![0u8; total];
    x1[0] = 1;
    // Seed bits least-significant first; bit 31 does not fit the register.
    for (i, bit) in x2.iter_mut().take(REG_LEN).enumerate() {
        *bit = ((X2_SEED >> i) & 1) as u8;
    }
    for i in 0..NC + CHANNEL_BITS {
        x1[i + 31] = (x1[i + 3] + x1[i]) % 2;
        x2[i + 31] = (x2[i + 3] + x2[i + 2] + x2[i + 1] + x2[i]) % 2;
    }
    (x1, x2)
}

static GOLD: Lazy<GoldSequence> = Lazy::new(|| {
    let (x1, x2) = m_sequences();
    let bits = (0..CHANNEL_BITS).map(|i| (x1[i + NC] + x2[i + NC]) % 2).collect();
    GoldSequence { bits }
});

pub fn gold_sequence() -> &'static GoldSequence {
    &GOLD
}
