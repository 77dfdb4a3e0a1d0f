//! QPSK hard decisions and gold-sequence (de)scrambling.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{BITS_PER_SYMBOL, CHANNEL_BITS, DATA_ROWS, NUM_SYMBOLS};
use crate::refsig::gold_sequence;

/// Quadrant slicer, two bits per carrier:
///
/// | I | Q | bits |
/// |---|---|------|
/// | + | + | 00   |
/// | + | - | 01   |
/// | - | + | 10   |
/// | - | - | 11   |
///
/// A component that is exactly zero counts as non-negative.
pub fn qpsk_demod(carriers: &[Complex64]) -> Vec<u8> {
    carriers
        .iter()
        .flat_map(|c| [(c.re < 0.0) as u8, (c.im < 0.0) as u8])
        .collect()
}

pub fn qpsk_mod(bits: &[u8]) -> Result<Vec<Complex64>> {
    if !bits.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("odd bit count {}", bits.len())));
    }
    let level = |b: u8| if b & 1 == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Ok(bits
        .chunks_exact(2)
        .map(|p| Complex64::new(level(p[0]), level(p[1])))
        .collect())
}

/// Hard bits of every grid row plus the descrambled payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitPlane {
    /// 9 rows of 1200 bits.
    pub demod_bits: Vec<Vec<u8>>,
    /// 7200 bits from rows 1, 2, 4, 6, 7, 8 after removing the gold sequence.
    pub payload_bits: Vec<u8>,
}

impl BitPlane {
    pub fn from_rows(demod_bits: Vec<Vec<u8>>) -> Result<Self> {
        let payload_bits = descramble(&demod_bits)?;
        Ok(Self { demod_bits, payload_bits })
    }
}

fn check_plane(plane: &[Vec<u8>]) -> Result<()> {
    if plane.len() != NUM_SYMBOLS || plane.iter().any(|r| r.len() != BITS_PER_SYMBOL) {
        return Err(Error::InvalidArgument(format!(
            "bit plane must be {NUM_SYMBOLS}x{BITS_PER_SYMBOL}"
        )));
    }
    Ok(())
}

pub fn descramble(plane: &[Vec<u8>]) -> Result<Vec<u8>> {
    check_plane(plane)?;
    Ok(DATA_ROWS
        .iter()
        .flat_map(|&r| plane[r].iter())
        .zip(&gold_sequence().bits)
        .map(|(b, g)| (b ^ g) & 1)
        .collect())
}

/// Inverse of [`descramble`]. Pilot rows 3 and 5 are left zero; row 0
/// repeats row 1.
pub fn scramble(payload: &[u8]) -> Result<Vec<Vec<u8>>> {
    if payload.len() != CHANNEL_BITS {
        return Err(Error::InvalidArgument(format!(
            "payload must be {CHANNEL_BITS} bits, got {}",
            payload.len()
        )));
    }
    let mixed: Vec<u8> = payload
        .iter()
        .zip(&gold_sequence().bits)
        .map(|(b, g)| (b ^ g) & 1)
        .collect();
    let mut plane = vec![vec![0u8; BITS_PER_SYMBOL]; NUM_SYMBOLS];
    for (chunk, &r) in mixed.chunks_exact(BITS_PER_SYMBOL).zip(&DATA_ROWS) {
        plane[r].copy_from_slice(chunk);
    }
    plane[0] = plane[1].clone();
    Ok(plane)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const H: f64 = FRAC_1_SQRT_2;

    #[test]
    fn table_points() {
        assert_eq!(qpsk_demod(&[Complex64::new(H, H)]), vec![0, 0]);
        assert_eq!(qpsk_demod(&[Complex64::new(H, -H)]), vec![0, 1]);
        assert_eq!(qpsk_demod(&[Complex64::new(-H, H)]), vec![1, 0]);
        assert_eq!(qpsk_demod(&[Complex64::new(-H, -H)]), vec![1, 1]);
        assert_eq!(qpsk_demod(&[Complex64::new(0.0, 0.0)]), vec![0, 0]);
        assert_eq!(qpsk_mod(&[0, 0]).unwrap(), vec![Complex64::new(H, H)]);
    }

    #[test]
    fn mod_demod_exhaustive() {
        for pair in [[0, 0], [0, 1], [1, 0], [1, 1]] {
            let sym = qpsk_mod(&pair).unwrap();
            assert!((sym[0].norm() - 1.0).abs() < 1e-12);
            assert_eq!(qpsk_demod(&sym), pair.to_vec());
        }
        assert!(qpsk_mod(&[1]).is_err());
    }

    #[test]
    fn gray_symmetries() {
        for pair in [[0u8, 0], [0, 1], [1, 0], [1, 1]] {
            let s = qpsk_mod(&pair).unwrap()[0];
            assert_eq!(qpsk_demod(&[s.conj()]), vec![pair[0], pair[1] ^ 1]);
            assert_eq!(qpsk_demod(&[Complex64::new(-s.re, s.im)]), vec![pair[0] ^ 1, pair[1]]);
        }
    }

    #[test]
    fn zero_rows_descramble_to_gold() {
        let plane = vec![vec![0u8; 1200]; 9];
        assert_eq!(descramble(&plane).unwrap(), gold_sequence().bits);
    }

    #[test]
    fn row_selection_skips_pilots_and_row_zero() {
        let mut plane = vec![vec![0u8; 1200]; 9];
        for r in [0, 3, 5] {
            plane[r] = vec![1u8; 1200];
        }
        assert_eq!(descramble(&plane).unwrap(), gold_sequence().bits);
    }

    #[test]
    fn gold_applied_once() {
        let payload = vec![0u8; 7200];
        let plane = scramble(&payload).unwrap();
        assert_eq!(plane.len(), 9);
        assert!(plane.iter().all(|r| r.len() == 1200));
        let flat: Vec<u8> = DATA_ROWS.iter().flat_map(|&r| plane[r].clone()).collect();
        assert_eq!(flat, gold_sequence().bits);
        assert_eq!(plane[0], plane[1]);
    }

    #[test]
    fn shape_errors() {
        assert!(descramble(&vec![vec![0u8; 1200]; 8]).is_err());
        assert!(scramble(&[0u8; 10]).is_err());
    }

    proptest! {
        #[test]
        fn scramble_round_trip(bits in proptest::collection::vec(0u8..2, 7200)) {
            prop_assert_eq!(descramble(&scramble(&bits).unwrap()).unwrap(), bits);
        }
    }
}
