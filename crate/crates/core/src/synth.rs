//! Transmit chain: the receive chain run backwards, with optional channel
//! impairments. Used as the loopback reference for every receive stage and
//! to produce test captures.

use num_complex::Complex64;
use rand::distributions::Alphanumeric;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fec::{block_residual, Block, CodedBlock};
use crate::frames::{
    Angle, Coordinate, DroneIdFrame, FlightInfoV1, FlightInfoV2, GpsClock, Height, License, Speed,
    FLIGHT_PLAN_LEN, LICENSE_TEXT_LEN, SERIAL_LEN, UUID_LEN,
};
use crate::iq::IqBuffer;
use crate::layout::{
    BITS_PER_SYMBOL, BURST_LEN, CP_LENGTHS, FFT_SIZE, NUM_DATA_CARRIERS, PILOT_ROOTS, PILOT_ROWS,
    SAMPLE_RATE,
};
use crate::mapping::{qpsk_mod, scramble};
use crate::{ofdm, refsig};

/// Channel impairments applied to a synthesized burst. The clean burst is
/// scaled to unit mean power before `amplitude` is applied, so `amplitude`
/// is the RMS sample magnitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Impairments {
    pub cfo_hz: f64,
    /// In-band SNR over the 600 occupied carriers; `None` is noiseless.
    pub snr_db: Option<f64>,
    pub amplitude: f64,
    pub pad_samples: usize,
    /// Noise generator seed.
    pub seed: u64,
}

impl Default for Impairments {
    fn default() -> Self {
        Self { cfo_hz: 0.0, snr_db: None, amplitude: 1.0, pad_samples: 0, seed: 0 }
    }
}

impl Impairments {
    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidArgument(format!("amplitude must be positive, got {}", self.amplitude)));
        }
        if !self.cfo_hz.is_finite() || self.snr_db.is_some_and(|s| !s.is_finite()) {
            return Err(Error::InvalidArgument("impairments must be finite".into()));
        }
        Ok(())
    }

    /// Standard deviation per real dimension of the added noise, or `None`
    /// when noiseless.
    fn noise_sigma(&self) -> Option<f64> {
        let snr = 10f64.powf(self.snr_db? / 10.0);
        let in_band_fraction = NUM_DATA_CARRIERS as f64 / FFT_SIZE as f64;
        let total_power = self.amplitude * self.amplitude / (snr * in_band_fraction);
        Some((total_power / 2.0).sqrt())
    }
}

/// Noiseless, offset-free 9880-sample burst at unit mean power.
pub fn clean_burst(block: &Block) -> Result<Vec<Complex64>> {
    let coded = CodedBlock::encode(block)?;
    let plane = scramble(&coded.channel_bits)?;
    let mut burst = Vec::with_capacity(BURST_LEN);
    for (row, cp) in CP_LENGTHS.iter().enumerate() {
        let bins = match PILOT_ROWS.iter().position(|&r| r == row) {
            Some(i) => refsig::zc_carrier_buffer(PILOT_ROOTS[i]),
            None => ofdm::carriers_to_bins(&qpsk_mod(&plane[row])?),
        };
        debug_assert_eq!(plane[row].len(), BITS_PER_SYMBOL);
        let body = ofdm::synthesize(&bins)?;
        burst.extend_from_slice(&body[FFT_SIZE - cp..]);
        burst.extend_from_slice(&body);
    }
    let power = burst.iter().map(Complex64::norm_sqr).sum::<f64>() / burst.len() as f64;
    let scale = power.sqrt().recip();
    burst.iter_mut().for_each(|s| *s *= scale);
    Ok(burst)
}

fn rotate(samples: &mut [Complex64], cfo_hz: f64) {
    if cfo_hz == 0.0 {
        return;
    }
    let w = 2.0 * PI * cfo_hz / SAMPLE_RATE;
    for (k, s) in samples.iter_mut().enumerate() {
        *s *= Complex64::from_polar(1.0, w * k as f64);
    }
}

fn add_noise(samples: &mut [Complex64], sigma: f64, rng: &mut ChaCha8Rng) {
    let normal = Normal::new(0.0, sigma).expect("sigma is finite and non-negative");
    for s in samples {
        *s += Complex64::new(normal.sample(rng), normal.sample(rng));
    }
}

fn impaired_burst(block: &Block, imp: &Impairments) -> Result<Vec<Complex64>> {
    if block_residual(block) != 0 {
        return Err(Error::InvalidArgument("frame fails its CRC-24".into()));
    }
    let mut burst = clean_burst(block)?;
    burst.iter_mut().for_each(|s| *s *= imp.amplitude);
    rotate(&mut burst, imp.cfo_hz);
    Ok(burst)
}

/// One burst: `pad + 9880 + pad` samples, noise applied over the burst
/// only.
pub fn build_burst(block: &Block, imp: &Impairments) -> Result<IqBuffer> {
    imp.validate()?;
    let mut burst = impaired_burst(block, imp)?;
    if let Some(sigma) = imp.noise_sigma() {
        add_noise(&mut burst, sigma, &mut ChaCha8Rng::seed_from_u64(imp.seed));
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut samples = vec![zero; imp.pad_samples];
    samples.extend(burst);
    samples.resize(samples.len() + imp.pad_samples, zero);
    Ok(IqBuffer::new(samples))
}

/// Several bursts at the given start offsets over a common noise floor.
/// The capture ends `pad_samples` after the last burst.
pub fn build_capture(bursts: &[(Block, usize)], imp: &Impairments) -> Result<IqBuffer> {
    imp.validate()?;
    let mut order: Vec<usize> = (0..bursts.len()).collect();
    order.sort_by_key(|&i| bursts[i].1);
    for w in order.windows(2) {
        let (a, b) = (bursts[w[0]].1, bursts[w[1]].1);
        if b - a < BURST_LEN {
            return Err(Error::InvalidArgument(format!(
                "bursts at {a} and {b} overlap (need {BURST_LEN} samples apart)"
            )));
        }
    }
    let end = bursts.iter().map(|(_, o)| o + BURST_LEN).max().unwrap_or(0);
    let mut samples = vec![Complex64::new(0.0, 0.0); end + imp.pad_samples];
    for (block, offset) in bursts {
        let burst = impaired_burst(block, imp)?;
        samples[*offset..offset + BURST_LEN].copy_from_slice(&burst);
    }
    if let Some(sigma) = imp.noise_sigma() {
        add_noise(&mut samples, sigma, &mut ChaCha8Rng::seed_from_u64(imp.seed));
    }
    Ok(IqBuffer::new(samples))
}

fn random_text<R: Rng>(rng: &mut R, max_len: usize) -> String {
    let len = rng.gen_range(0..=max_len);
    rng.sample_iter(&Alphanumeric).take(len).map(char::from).collect()
}

fn random_coordinate<R: Rng>(rng: &mut R, limit: f64) -> Coordinate {
    Coordinate::from_degrees(rng.gen_range(-limit..=limit)).expect("in range")
}

/// A random, well-formed frame of any of the three packet types.
pub fn random_frame<R: Rng>(rng: &mut R) -> DroneIdFrame {
    match rng.gen_range(0..3) {
        0 => DroneIdFrame::License(License {
            serial: random_text(rng, SERIAL_LEN),
            license_text: random_text(rng, LICENSE_TEXT_LEN),
            flight_plan: random_text(rng, FLIGHT_PLAN_LEN),
        }),
        1 => DroneIdFrame::FlightInfoV1(FlightInfoV1 {
            sequence_num: rng.gen(),
            state_info: rng.gen(),
            serial: random_text(rng, SERIAL_LEN),
            drone_lon: random_coordinate(rng, 180.0),
            drone_lat: random_coordinate(rng, 90.0),
            altitude: rng.gen(),
            height: Height(rng.gen()),
            x_speed: Speed(rng.gen()),
            y_speed: Speed(rng.gen()),
            z_speed: Speed(rng.gen()),
            pitch: Angle(rng.gen()),
            roll: Angle(rng.gen()),
            yaw: Angle(rng.gen()),
            home_lon: random_coordinate(rng, 180.0),
            home_lat: random_coordinate(rng, 90.0),
            model_id: rng.gen(),
            uuid: random_text(rng, UUID_LEN),
        }),
        _ => DroneIdFrame::FlightInfoV2(FlightInfoV2 {
            sequence_num: rng.gen(),
            state_info: rng.gen(),
            serial: random_text(rng, SERIAL_LEN),
            drone_lon: random_coordinate(rng, 180.0),
            drone_lat: random_coordinate(rng, 90.0),
            altitude: rng.gen(),
            height: Height(rng.gen()),
            x_speed: Speed(rng.gen()),
            y_speed: Speed(rng.gen()),
            z_speed: Speed(rng.gen()),
            yaw: Angle(rng.gen()),
            pilot_gps_clock: GpsClock(rng.gen()),
            pilot_lat: random_coordinate(rng, 90.0),
            pilot_lon: random_coordinate(rng, 180.0),
            home_lon: random_coordinate(rng, 180.0),
            home_lat: random_coordinate(rng, 90.0),
            model_id: rng.gen(),
            uuid: random_text(rng, UUID_LEN),
        }),
    }
}

/// A random 96-byte block with a valid CRC whose content need not be a
/// parseable packet.
pub fn random_block<R: Rng>(rng: &mut R) -> Block {
    let mut content = [0u8; crate::fec::CONTENT_BYTES];
    rng.fill(&mut content[..]);
    crate::fec::seal_block(&content).expect("content has the block length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fec::seal_block;
    use crate::layout::ZC_OFFSET;

    fn block() -> Block {
        seal_block(&[0x5Au8; 93]).unwrap()
    }

    #[test]
    fn noiseless_length_and_power() {
        let imp = Impairments { pad_samples: 100, ..Default::default() };
        let buf = build_burst(&block(), &imp).unwrap();
        assert_eq!(buf.len(), 100 + BURST_LEN + 100);
        assert!(buf.samples[..100].iter().all(|s| s.norm() == 0.0));
        let p: f64 = buf.samples[100..100 + BURST_LEN].iter().map(|s| s.norm_sqr()).sum::<f64>()
            / BURST_LEN as f64;
        assert!((p - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cyclic_prefixes_repeat_symbol_tails() {
        let burst = clean_burst(&block()).unwrap();
        let mut pos = 0;
        for cp in CP_LENGTHS {
            for k in 0..cp {
                assert!((burst[pos + k] - burst[pos + k + FFT_SIZE]).norm() < 1e-12);
            }
            pos += cp + FFT_SIZE;
        }
        assert_eq!(pos, BURST_LEN);
    }

    #[test]
    fn pilot_sits_at_zc_offset() {
        let burst = clean_burst(&block()).unwrap();
        let pilot = refsig::zc_time_domain(600);
        let body = &burst[ZC_OFFSET..ZC_OFFSET + FFT_SIZE];
        let dot: Complex64 = body.iter().zip(&pilot).map(|(a, b)| a * b.conj()).sum();
        let ea: f64 = body.iter().map(|s| s.norm_sqr()).sum();
        let eb: f64 = pilot.iter().map(|s| s.norm_sqr()).sum();
        assert!((dot.norm_sqr() / (ea * eb) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_input() {
        let mut bad = block();
        bad[0] ^= 1;
        assert!(build_burst(&bad, &Impairments::default()).is_err());
        let imp = Impairments { amplitude: 0.0, ..Default::default() };
        assert!(build_burst(&block(), &imp).is_err());
        let b = block();
        assert!(build_capture(&[(b, 0), (b, 5000)], &Impairments::default()).is_err());
    }

    #[test]
    fn capture_layout() {
        let b = block();
        let imp = Impairments { pad_samples: 500, ..Default::default() };
        let cap = build_capture(&[(b, 20_000), (b, 1000)], &imp).unwrap();
        assert_eq!(cap.len(), 20_000 + BURST_LEN + 500);
        let empty = build_capture(&[], &Impairments { snr_db: Some(10.0), pad_samples: 64, ..Default::default() })
            .unwrap();
        assert_eq!(empty.len(), 64);
        assert!(empty.samples.iter().any(|s| s.norm() > 0.0));
    }

    #[test]
    fn noise_is_seeded() {
        let imp = Impairments { snr_db: Some(10.0), seed: 7, ..Default::default() };
        let a = build_burst(&block(), &imp).unwrap();
        let b = build_burst(&block(), &imp).unwrap();
        assert_eq!(a.samples, b.samples);
        let c = build_burst(&block(), &Impairments { seed: 8, ..imp }).unwrap();
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn random_frames_serialize() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let f = random_frame(&mut rng);
            let block = f.to_block().unwrap();
            assert_eq!(crate::frames::parse_frame(&block).unwrap(), f);
        }
    }
}
