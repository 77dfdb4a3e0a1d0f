//! Burst conditioning: low-pass filtering and coarse carrier frequency
//! offset (CFO) correction from the cyclic prefix of symbol 1.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::{FFT_SIZE, SAMPLE_RATE};

pub const LOWPASS_TAPS: usize = 51;
pub const LOWPASS_BANDWIDTH: f64 = 10e6;

/// Cyclic prefix of symbol 1 and the body samples it was copied from.
pub const CFO_PREFIX_WINDOW: std::ops::Range<usize> = 1104..1176;
pub const CFO_COPY_WINDOW: std::ops::Range<usize> = 2128..2200;

#[derive(Clone, Debug, PartialEq)]
pub struct FirFilter {
    pub taps: Vec<f64>,
}

impl FirFilter {
    /// Hamming-windowed sinc low-pass with unity DC gain.
    ///
    /// `cutoff` follows the `firwin` convention: a fraction of the Nyquist
    /// frequency. Taps are computed for the first half and mirrored, so the
    /// filter is exactly linear phase.
    pub fn lowpass(num_taps: usize, cutoff: f64) -> Result<Self> {
        if num_taps == 0 || num_taps.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("need an odd tap count, got {num_taps}")));
        }
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidArgument(format!("cutoff {cutoff} outside (0, 1)")));
        }
        let mid = (num_taps - 1) / 2;
        let mut taps = vec![0.0; num_taps];
        for n in 0..=mid {
            let m = n as f64 - mid as f64;
            let x = cutoff * m;
            let sinc = if x == 0.0 { 1.0 } else { (PI * x).sin() / (PI * x) };
            let window = if num_taps == 1 {
                1.0
            } else {
                0.54 - 0.46 * (2.0 * PI * n as f64 / (num_taps - 1) as f64).cos()
            };
            taps[n] = cutoff * sinc * window;
            taps[num_taps - 1 - n] = taps[n];
        }
        let gain: f64 = taps.iter().sum();
        taps.iter_mut().for_each(|t| *t /= gain);
        Ok(Self { taps })
    }

    /// Response magnitude at `freq_hz` relative to DC, in dB.
    pub fn response_db(&self, freq_hz: f64, sample_rate: f64) -> f64 {
        let w = 2.0 * PI * freq_hz / sample_rate;
        let h: Complex64 = self
            .taps
            .iter()
            .enumerate()
            .map(|(k, &t)| Complex64::from_polar(t, -w * k as f64))
            .sum();
        let dc: f64 = self.taps.iter().sum();
        20.0 * (h.norm() / dc.abs()).log10()
    }

    /// Group delay in samples.
    pub fn delay(&self) -> usize {
        (self.taps.len() - 1) / 2
    }
}

/// The 51-tap burst filter: 10 MHz of bandwidth at 15.36 Msps.
pub fn design_lowpass() -> FirFilter {
    design_lowpass_for(SAMPLE_RATE)
}

pub fn design_lowpass_for(sample_rate: f64) -> FirFilter {
    FirFilter::lowpass(LOWPASS_TAPS, LOWPASS_BANDWIDTH / sample_rate)
        .expect("burst bandwidth is below the sample rate")
}

/// Causal direct-form convolution with zero initial state; the output has
/// the input's length.
pub fn apply_filter(filter: &FirFilter, x: &[Complex64]) -> Vec<Complex64> {
    let taps = &filter.taps;
    (0..x.len())
        .map(|n| {
            let depth = taps.len().min(n + 1);
            (0..depth).map(|k| x[n - k] * taps[k]).sum()
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CfoEstimate {
    pub radians_per_sample: f64,
    /// Set when the correlation windows carried no energy.
    pub degenerate: bool,
}

impl CfoEstimate {
    pub const ZERO: Self = Self { radians_per_sample: 0.0, degenerate: false };

    pub fn from_hz(hz: f64, sample_rate: f64) -> Self {
        Self { radians_per_sample: 2.0 * PI * hz / sample_rate, degenerate: false }
    }

    pub fn hz(&self, sample_rate: f64) -> f64 {
        self.radians_per_sample * sample_rate / (2.0 * PI)
    }
}

pub fn estimate_cfo(burst: &[Complex64]) -> Result<CfoEstimate> {
    if burst.len() < CFO_COPY_WINDOW.end {
        return Err(Error::InsufficientData { needed: CFO_COPY_WINDOW.end, got: burst.len() });
    }
    let corr: Complex64 = burst[CFO_PREFIX_WINDOW]
        .iter()
        .zip(&burst[CFO_COPY_WINDOW])
        .map(|(cp, copy)| cp.conj() * copy)
        .sum();
    if corr.norm_sqr() == 0.0 || !corr.is_finite() {
        return Ok(CfoEstimate { radians_per_sample: 0.0, degenerate: true });
    }
    Ok(CfoEstimate { radians_per_sample: corr.arg() / FFT_SIZE as f64, degenerate: false })
}

/// Multiply sample `k` by `exp(-j * w * (k + 1))`.
pub fn correct_cfo(burst: &[Complex64], est: CfoEstimate) -> Vec<Complex64> {
    let w = est.radians_per_sample;
    if w == 0.0 {
        return burst.to_vec();
    }
    burst
        .iter()
        .enumerate()
        .map(|(k, s)| s * Complex64::from_polar(1.0, -w * (k + 1) as f64))
        .collect()
}

/// Crystal error in parts per million from a measured frequency-correction
/// factor.
pub fn ppm_from_correction(crystal_correction: f64) -> Result<f64> {
    if !(crystal_correction > 0.9 && crystal_correction < 1.1) {
        return Err(Error::InvalidArgument(format!(
            "crystal correction {crystal_correction} outside (0.9, 1.1)"
        )));
    }
    Ok(1e6 * (1.0 - crystal_correction))
}
