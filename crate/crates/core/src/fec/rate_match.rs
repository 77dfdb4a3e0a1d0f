//! Circular-buffer rate matching between the 2316 coded bits and the 7200
//! channel bits, using the LTE sub-block interleaver (32 columns) and
//! redundancy version 0.

use once_cell::sync::Lazy;

use crate::error::{Error, Result};
use crate::layout::CHANNEL_BITS;

use super::turbo::{CODED_BITS, STREAM_LEN};

const COLUMNS: usize = 32;

const COLUMN_PERMUTATION: [usize; COLUMNS] = [
    0, 16, 8, 24, 4, 20, 12, 28, 2, 18, 10, 26, 6, 22, 14, 30, 1, 17, 9, 25, 5, 21, 13, 29, 3,
    19, 11, 27, 7, 23, 15, 31,
];

const ROWS: usize = STREAM_LEN.div_ceil(COLUMNS);
const INTERLEAVED_LEN: usize = ROWS * COLUMNS;
const DUMMIES: usize = INTERLEAVED_LEN - STREAM_LEN;

/// For each interleaved position of a stream, the stream index it reads,
/// or `None` for a padding bit.
fn subblock(stream: usize) -> Vec<Option<usize>> {
    let from_padded = |y: usize| y.checked_sub(DUMMIES);
    (0..INTERLEAVED_LEN)
        .map(|k| {
            let y = if stream < 2 {
                let (col, row) = (k / ROWS, k % ROWS);
                row * COLUMNS + COLUMN_PERMUTATION[col]
            } else {
                (COLUMN_PERMUTATION[k / ROWS] + COLUMNS * (k % ROWS) + 1) % INTERLEAVED_LEN
            };
            from_padded(y)
        })
        .collect()
}

/// Coded-bit index (into `d0 ++ d1 ++ d2`) feeding each channel bit.
static SOURCES: Lazy<Vec<usize>> = Lazy::new(|| {
    let v: Vec<Vec<Option<usize>>> = (0..3).map(subblock).collect();
    let mut circular = Vec::with_capacity(3 * INTERLEAVED_LEN);
    circular.extend(v[0].iter().copied());
    for (a, b) in v[1].iter().zip(&v[2]) {
        circular.push(a.map(|i| STREAM_LEN + i));
        circular.push(b.map(|i| 2 * STREAM_LEN + i));
    }
    let start = 2 * ROWS;
    circular
        .iter()
        .cycle()
        .skip(start)
        .filter_map(|p| *p)
        .take(CHANNEL_BITS)
        .collect()
});

pub fn rate_match(coded: &[u8]) -> Result<Vec<u8>> {
    if coded.len() != CODED_BITS {
        return Err(Error::InvalidArgument(format!(
            "rate matcher needs {CODED_BITS} coded bits, got {}",
            coded.len()
        )));
    }
    Ok(SOURCES.iter().map(|&i| coded[i]).collect())
}

/// Sum the soft values of every repetition of each coded bit.
pub fn rate_dematch(channel: &[f64]) -> Result<Vec<f64>> {
    if channel.len() != CHANNEL_BITS {
        return Err(Error::InvalidArgument(format!(
            "rate dematcher needs {CHANNEL_BITS} values, got {}",
            channel.len()
        )));
    }
    let mut out = vec![0.0; CODED_BITS];
    for (&i, &v) in SOURCES.iter().zip(channel) {
        out[i] += v;
    }
    Ok(out)
}
