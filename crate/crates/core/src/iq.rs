//! IQ sample files.
//!
//! Two on-disk formats are supported:
//!
//! * `.cs8`: interleaved signed 8-bit I/Q, as written by `hackrf_transfer`.
//!   Samples are kept at their raw integer amplitude, never rescaled.
//! * `.fc32`: interleaved little-endian 32-bit float I/Q.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SAMPLE_RATE;

#[derive(Clone, Debug, PartialEq)]
pub struct IqBuffer {
    pub samples: Vec<Complex64>,
    /// Hz, always positive.
    pub sample_rate: f64,
    /// Tuner center frequency in Hz, when known.
    pub center_freq: Option<f64>,
}

impl IqBuffer {
    pub fn new(samples: Vec<Complex64>) -> Self {
        Self { samples, sample_rate: SAMPLE_RATE, center_freq: None }
    }

    pub fn with_sample_rate(mut self, sample_rate: f64) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidArgument(format!("sample rate {sample_rate}")));
        }
        self.sample_rate = sample_rate;
        Ok(self)
    }

    pub fn with_center_freq(mut self, hz: Option<f64>) -> Self {
        self.center_freq = hz;
        self
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleFormat {
    Cs8,
    Fc32,
}

impl SampleFormat {
    /// Guess the format from a file extension.
    pub fn from_path(path: &Path) -> Option<Self> {
        path.extension()?.to_str()?.parse().ok()
    }
}

impl FromStr for SampleFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cs8" => Ok(Self::Cs8),
            "fc32" => Ok(Self::Fc32),
            other => Err(Error::InvalidArgument(format!("unknown sample format {other:?}"))),
        }
    }
}

impl fmt::Display for SampleFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cs8 => "cs8",
            Self::Fc32 => "fc32",
        })
    }
}

pub fn read_cs8(bytes: &[u8]) -> Result<IqBuffer> {
    if !bytes.len().is_multiple_of(2) {
        return Err(Error::MalformedFile(format!(
            "cs8 data has odd length {}",
            bytes.len()
        )));
    }
    let samples = bytes
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0] as i8 as f64, p[1] as i8 as f64))
        .collect();
    Ok(IqBuffer::new(samples))
}

/// Components are rounded to the nearest integer and saturated to the
/// `i8` range.
pub fn write_cs8(buf: &IqBuffer) -> Vec<u8> {
    fn quantize(v: f64) -> u8 {
        v.round().clamp(i8::MIN as f64, i8::MAX as f64) as i8 as u8
    }
    let mut out = Vec::with_capacity(buf.len() * 2);
    for s in &buf.samples {
        out.push(quantize(s.re));
        out.push(quantize(s.im));
    }
    out
}

pub fn read_fc32(bytes: &[u8]) -> Result<IqBuffer> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::MalformedFile(format!(
            "fc32 data length {} is not a multiple of 8",
            bytes.len()
        )));
    }
    let mut samples = Vec::with_capacity(bytes.len() / 8);
    for (k, chunk) in bytes.chunks_exact(8).enumerate() {
        let re = f32::from_le_bytes(chunk[..4].try_into().unwrap());
        let im = f32::from_le_bytes(chunk[4..].try_into().unwrap());
        if !(re.is_finite() && im.is_finite()) {
            return Err(Error::MalformedFile(format!("non-finite sample at index {k}")));
        }
        samples.push(Complex64::new(re as f64, im as f64));
    }
    Ok(IqBuffer::new(samples))
}

/// Samples are narrowed to `f32`.
pub fn write_fc32(buf: &IqBuffer) -> Vec<u8> {
    let mut out = Vec::with_capacity(buf.len() * 8);
    for s in &buf.samples {
        out.extend_from_slice(&(s.re as f32).to_le_bytes());
        out.extend_from_slice(&(s.im as f32).to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], format: SampleFormat) -> Result<IqBuffer> {
    match format {
        SampleFormat::Cs8 => read_cs8(bytes),
        SampleFormat::Fc32 => read_fc32(bytes),
    }
}

pub fn encode(buf: &IqBuffer, format: SampleFormat) -> Vec<u8> {
    match format {
        SampleFormat::Cs8 => write_cs8(buf),
        SampleFormat::Fc32 => write_fc32(buf),
    }
}

pub fn read_file(path: &Path, format: SampleFormat) -> Result<IqBuffer> {
    decode(&std::fs::read(path)?, format)
}

pub fn write_file(path: &Path, buf: &IqBuffer, format: SampleFormat) -> Result<()> {
    std::fs::write(path, encode(buf, format))?;
    Ok(())
}
