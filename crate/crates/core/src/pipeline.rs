//! Receive chain from a capture to detection records.

use num_complex::Complex64;

use crate::burst::{detect_bursts, Burst, DEFAULT_THRESHOLD};
use crate::error::{Error, Result};
use crate::fec::{turbo_decode, Block};
use crate::frames::{parse_frame, to_detection_record, DetectionRecord, DroneIdFrame, SourceType};
use crate::frontend::{apply_filter, correct_cfo, design_lowpass_for, estimate_cfo, CfoEstimate, FirFilter};
use crate::iq::IqBuffer;
use crate::layout::{BURST_LEN, NUM_SYMBOLS};
use crate::mapping::{descramble, qpsk_demod};
use crate::ofdm::{equalize, estimate_channel, extract_symbols};

#[derive(Clone, Debug)]
pub struct Receiver {
    pub threshold: f64,
    pub sample_rate: f64,
    filter: FirFilter,
}

impl Default for Receiver {
    fn default() -> Self {
        Self::new(DEFAULT_THRESHOLD, crate::layout::SAMPLE_RATE).expect("defaults are valid")
    }
}

/// A burst that made it through the whole chain.
#[derive(Clone, Debug)]
pub struct Detection {
    pub start_index: usize,
    pub score: f64,
    pub cfo_hz: f64,
    pub block: Block,
    pub frame: DroneIdFrame,
    pub record: DetectionRecord,
}

/// Per-burst result. Failures keep the burst position so callers can
/// report them.
#[derive(Debug)]
pub struct BurstOutcome {
    pub start_index: usize,
    pub score: f64,
    pub result: Result<Detection>,
}

impl Receiver {
    pub fn new(threshold: f64, sample_rate: f64) -> Result<Self> {
        if !(threshold > 0.0 && threshold < 1.0) {
            return Err(Error::InvalidArgument(format!("threshold {threshold} outside (0, 1)")));
        }
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample rate {sample_rate} must be positive")));
        }
        Ok(Self { threshold, sample_rate, filter: design_lowpass_for(sample_rate) })
    }

    pub fn find_bursts(&self, iq: &IqBuffer) -> Result<Vec<Burst>> {
        detect_bursts(&iq.samples, self.threshold)
    }

    /// Low-pass filter the burst in place within its capture. Samples on
    /// either side feed the filter; the output is realigned by the group
    /// delay so prefix and symbol windows keep their positions.
    pub fn condition(&self, capture: &[Complex64], start_index: usize) -> Vec<Complex64> {
        let delay = self.filter.delay();
        let margin = self.filter.taps.len();
        let zero = Complex64::new(0.0, 0.0);
        let lo = start_index as isize - margin as isize;
        let hi = start_index + BURST_LEN + delay;
        let padded: Vec<Complex64> = (lo..hi as isize)
            .map(|i| usize::try_from(i).ok().and_then(|i| capture.get(i)).copied().unwrap_or(zero))
            .collect();
        let filtered = apply_filter(&self.filter, &padded);
        filtered[margin + delay..margin + delay + BURST_LEN].to_vec()
    }

    /// Demodulate and decode one conditioned 9880-sample burst into its
    /// verified 96-byte block.
    pub fn demodulate(&self, burst: &[Complex64]) -> Result<(Block, CfoEstimate)> {
        let cfo = estimate_cfo(burst)?;
        let corrected = correct_cfo(burst, cfo);
        let grid = extract_symbols(&corrected)?;
        let ch = estimate_channel(&grid)?;
        let rows = (0..NUM_SYMBOLS)
            .map(|r| equalize(&grid, &ch, r).map(|c| qpsk_demod(&c)))
            .collect::<Result<Vec<_>>>()?;
        let payload = descramble(&rows)?;
        Ok((turbo_decode(&payload)?, cfo))
    }

    pub fn decode_burst(&self, capture: &IqBuffer, burst: &Burst) -> BurstOutcome {
        let result = (|| {
            let conditioned = self.condition(&capture.samples, burst.start_index);
            let (block, cfo) = self.demodulate(&conditioned)?;
            let frame = parse_frame(&block)?;
            let record = to_detection_record(&frame, SourceType::OcuSync);
            Ok(Detection {
                start_index: burst.start_index,
                score: burst.score,
                cfo_hz: cfo.hz(self.sample_rate),
                block,
                frame,
                record,
            })
        })();
        BurstOutcome { start_index: burst.start_index, score: burst.score, result }
    }

    /// Detect and decode every burst in a capture, in start-index order.
    pub fn process(&self, capture: &IqBuffer) -> Result<Vec<BurstOutcome>> {
        Ok(self
            .find_bursts(capture)?
            .iter()
            .map(|b| self.decode_burst(capture, b))
            .collect())
    }

    /// Successful detections only.
    pub fn detections(&self, capture: &IqBuffer) -> Result<Vec<Detection>> {
        Ok(self.process(capture)?.into_iter().filter_map(|o| o.result.ok()).collect())
    }
}
