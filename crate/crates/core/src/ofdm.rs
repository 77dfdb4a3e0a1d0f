//! OFDM symbol handling: the 1024-point transform, cyclic-prefix removal,
//! pilot-based channel estimation and equalization.

use std::sync::Arc;

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::layout::{
    symbol_body_offsets, BURST_LEN, DATA_CARRIERS, FFT_SIZE, NUM_DATA_CARRIERS, NUM_SYMBOLS,
    PILOT_ROOTS, PILOT_ROWS,
};
use crate::refsig;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Unnormalized sum.
    Forward,
    /// Divides by the transform size, so `inverse(forward(x)) == x`.
    Inverse,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

static PLANS: Lazy<Plans> = Lazy::new(|| {
    let mut planner = FftPlanner::new();
    Plans {
        forward: planner.plan_fft_forward(FFT_SIZE),
        inverse: planner.plan_fft_inverse(FFT_SIZE),
    }
});

/// In-place 1024-point transform.
pub fn dft_1024_in_place(x: &mut [Complex64], direction: Direction) -> Result<()> {
    if x.len() != FFT_SIZE {
        return Err(Error::InvalidArgument(format!(
            "transform needs {FFT_SIZE} samples, got {}",
            x.len()
        )));
    }
    match direction {
        Direction::Forward => PLANS.forward.process(x),
        Direction::Inverse => {
            PLANS.inverse.process(x);
            let scale = 1.0 / FFT_SIZE as f64;
            x.iter_mut().for_each(|v| *v *= scale);
        }
    }
    Ok(())
}

pub fn dft_1024(x: &[Complex64], direction: Direction) -> Result<Vec<Complex64>> {
    let mut out = x.to_vec();
    dft_1024_in_place(&mut out, direction)?;
    Ok(out)
}

/// Swap the two halves so DC moves to the middle (bin 512). For an even
/// length the operation is its own inverse.
pub fn center_shift(x: &mut [Complex64]) {
    let half = x.len() / 2;
    x.rotate_left(half);
}

/// Center-shifted forward transform of one symbol body.
pub fn spectrum(time: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = dft_1024(time, Direction::Forward)?;
    center_shift(&mut out);
    Ok(out)
}

/// Inverse of [`spectrum`]: undo the center shift, then inverse transform.
pub fn synthesize(freq: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut buf = freq.to_vec();
    center_shift(&mut buf);
    dft_1024_in_place(&mut buf, Direction::Inverse)?;
    Ok(buf)
}

/// Nine prefix-stripped symbols in time and frequency domain.
#[derive(Clone, Debug)]
pub struct SymbolGrid {
    pub time_domain: Vec<Vec<Complex64>>,
    /// Row `r` is the center-shifted forward transform of `time_domain[r]`.
    pub freq_domain: Vec<Vec<Complex64>>,
}

pub fn extract_symbols(burst: &[Complex64]) -> Result<SymbolGrid> {
    if burst.len() < BURST_LEN {
        return Err(Error::InsufficientData { needed: BURST_LEN, got: burst.len() });
    }
    let mut time_domain = Vec::with_capacity(NUM_SYMBOLS);
    let mut freq_domain = Vec::with_capacity(NUM_SYMBOLS);
    for start in symbol_body_offsets() {
        let body = burst[start..start + FFT_SIZE].to_vec();
        freq_domain.push(spectrum(&body)?);
        time_domain.push(body);
    }
    Ok(SymbolGrid { time_domain, freq_domain })
}

/// Per-carrier equalizer weights referenced to grid row 4 (midway between
/// the two pilots), plus the per-symbol phase walk between the pilots.
#[derive(Clone, Debug)]
pub struct ChannelEstimate {
    pub est: Vec<Complex64>,
    /// Phase correction in radians per symbol; row `a` is rotated by
    /// `phase_offset * (a - 4)` after multiplying by `est`.
    pub phase_offset: f64,
    /// Carriers whose pilot bins were zero or non-finite in both pilots.
    pub zeroed_carriers: usize,
}

impl ChannelEstimate {
    pub fn is_low_quality(&self) -> bool {
        self.zeroed_carriers > 0
    }
}

/// Reference over received, with unusable bins weighted to zero.
fn pilot_ratio(reference: &[Complex64], received: &[Complex64]) -> Vec<Option<Complex64>> {
    DATA_CARRIERS
        .iter()
        .zip(reference)
        .map(|(&bin, r)| {
            let y = received[bin];
            let ratio = r / y;
            (y.norm_sqr() > 0.0 && ratio.is_finite()).then_some(ratio)
        })
        .collect()
}

pub fn estimate_channel(grid: &SymbolGrid) -> Result<ChannelEstimate> {
    if grid.freq_domain.len() != NUM_SYMBOLS {
        return Err(Error::InvalidArgument(format!(
            "grid has {} rows, expected {NUM_SYMBOLS}",
            grid.freq_domain.len()
        )));
    }
    let first = pilot_ratio(
        &refsig::zadoff_chu(PILOT_ROOTS[0]).values,
        &grid.freq_domain[PILOT_ROWS[0]],
    );
    let second = pilot_ratio(
        &refsig::zadoff_chu(PILOT_ROOTS[1]).values,
        &grid.freq_domain[PILOT_ROWS[1]],
    );

    // The ratio's angle is minus the received phase, so the pilot-to-pilot
    // rotation of the ratios is minus twice the per-symbol walk.
    let walk: Complex64 = first
        .iter()
        .zip(&second)
        .filter_map(|(a, b)| Some(b.as_ref()? * a.as_ref()?.conj()))
        .sum();
    let phase_offset = if walk.norm_sqr() > 0.0 { walk.arg() / 2.0 } else { 0.0 };
    let to_mid = Complex64::from_polar(1.0, phase_offset);

    let mut zeroed_carriers = 0;
    let est = first
        .iter()
        .zip(&second)
        .map(|(a, b)| match (a, b) {
            (Some(a), Some(b)) => (a * to_mid + b / to_mid) * 0.5,
            (Some(a), None) => a * to_mid,
            (None, Some(b)) => b / to_mid,
            (None, None) => {
                zeroed_carriers += 1;
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Ok(ChannelEstimate { est, phase_offset, zeroed_carriers })
}

/// Equalized data carriers of one grid row.
pub fn equalize(
    grid: &SymbolGrid,
    ch: &ChannelEstimate,
    symbol_index: usize,
) -> Result<Vec<Complex64>> {
    let row = grid.freq_domain.get(symbol_index).ok_or_else(|| {
        Error::InvalidArgument(format!("symbol index {symbol_index} out of range"))
    })?;
    let rot = Complex64::from_polar(1.0, ch.phase_offset * (symbol_index as f64 - 4.0));
    Ok(DATA_CARRIERS
        .iter()
        .zip(&ch.est)
        .map(|(&bin, w)| row[bin] * w * rot)
        .collect::<Vec<_>>())
}

/// Place data-carrier values into a zeroed, center-shifted 1024-bin buffer.
pub fn carriers_to_bins(carriers: &[Complex64]) -> Vec<Complex64> {
    debug_assert_eq!(carriers.len(), NUM_DATA_CARRIERS);
    let mut bins = vec![Complex64::new(0.0, 0.0); FFT_SIZE];
    for (&bin, &v) in DATA_CARRIERS.iter().zip(carriers) {
        bins[bin] = v;
    }
    bins
}
