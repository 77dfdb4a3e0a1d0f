//! Codec and detection toolkit for DJI drone-ID broadcasts.
//!
//! The receive chain turns raw IQ captures into typed flight records:
//!
//! ```text
//! IqBuffer -> burst::detect_bursts -> frontend (low-pass, coarse CFO)
//!          -> ofdm (symbol grid, channel estimate, equalize)
//!          -> mapping (QPSK hard bits, gold descramble)
//!          -> fec (rate dematch, turbo decode, CRC-24)
//!          -> frames (deframe, DetectionRecord)
//! ```
//!
//! [`synth`] runs the same chain backwards and is the loopback oracle for
//! every receive-side stage. [`wifi`] handles the older Enhanced Wi-Fi
//! beacon transport.

pub mod burst;
pub mod error;
pub mod fec;
pub mod frames;
pub mod frontend;
pub mod hop;
pub mod iq;
pub mod layout;
pub mod mapping;
pub mod ofdm;
pub mod pipeline;
pub mod refsig;
pub mod synth;
pub mod wifi;

pub use error::{Error, Result};
pub use num_complex::Complex64;
