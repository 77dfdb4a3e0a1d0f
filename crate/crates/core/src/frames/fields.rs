//! Raw-integer field codecs. Each newtype stores the on-air value so that
//! parse and serialize are exact inverses; the accessors convert to
//! physical units.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Latitude or longitude packed as `degrees * pi * 1e7 / 180` (i.e. units of
/// 1e-7 radian), signed 32-bit little-endian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Coordinate(pub i32);

impl Coordinate {
    const SCALE: f64 = PI * 1e7;

    pub fn degrees(self) -> f64 {
        self.0 as f64 * 180.0 / Self::SCALE
    }

    /// Nearest raw value for `degrees`.
    pub fn from_degrees(degrees: f64) -> Result<Self> {
        let raw = (degrees * Self::SCALE / 180.0).round();
        if !raw.is_finite() || raw < i32::MIN as f64 || raw > i32::MAX as f64 {
            return Err(Error::InvalidArgument(format!("coordinate {degrees} out of range")));
        }
        Ok(Self(raw as i32))
    }

    /// True when the decoded value lies within `[-limit, limit]` degrees.
    pub fn within(self, limit: f64) -> bool {
        self.degrees().abs() <= limit
    }
}

/// Velocity component in cm/s.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Speed(pub i16);

impl Speed {
    pub fn meters_per_second(self) -> f64 {
        self.0 as f64 / 100.0
    }
}

/// Height above takeoff in decimeters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Height(pub i16);

impl Height {
    pub fn meters(self) -> f64 {
        self.0 as f64 / 10.0
    }
}

/// Attitude angle in hundredths of a degree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(pub i16);

impl Angle {
    pub fn degrees(self) -> f64 {
        self.0 as f64 / 100.0
    }

    /// Heading shown to the operator: `raw/100 + 180` wrapped into
    /// `[0, 360)`. Computed in integer hundredths so results such as
    /// 254.78 come out as the nearest double.
    pub fn heading(self) -> f64 {
        (self.0 as i32 + 18_000).rem_euclid(36_000) as f64 / 100.0
    }
}

/// Pilot GPS clock in milliseconds since the Unix epoch.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GpsClock(pub u64);

impl GpsClock {
    pub fn millis(self) -> u64 {
        self.0
    }

    pub fn seconds(self) -> f64 {
        self.0 as f64 / 1000.0
    }
}

/// Reference angle-to-quantity conversion, branch for branch.
pub fn angle_to_quantity(angle: f64) -> f64 {
    if angle == 0.0 {
        0.0
    } else if angle < 0.0 {
        angle + 180.0
    } else if angle > 0.0 && angle < 180.0 {
        angle % 180.0
    } else {
        angle + 180.0
    }
}

/// Little-endian reader over a packet slice. Callers check the overall
/// packet length up front, so reads never run past the end.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub fn new(bytes: &'a [u8], pos: usize) -> Self {
        Self { bytes, pos }
    }

    pub fn take<const N: usize>(&mut self) -> [u8; N] {
        let mut out = [0u8; N];
        out.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        out
    }

    pub fn u8(&mut self) -> u8 {
        self.take::<1>()[0]
    }

    pub fn u16(&mut self) -> u16 {
        u16::from_le_bytes(self.take())
    }

    pub fn i16(&mut self) -> i16 {
        i16::from_le_bytes(self.take())
    }

    pub fn i32(&mut self) -> i32 {
        i32::from_le_bytes(self.take())
    }

    pub fn u64(&mut self) -> u64 {
        u64::from_le_bytes(self.take())
    }

    pub fn text(&mut self, width: usize) -> String {
        let s = decode_text(&self.bytes[self.pos..self.pos + width]);
        self.pos += width;
        s
    }

    pub fn bytes(&mut self, width: usize) -> &'a [u8] {
        let s = &self.bytes[self.pos..self.pos + width];
        self.pos += width;
        s
    }
}

/// Text up to the first NUL.
pub(crate) fn decode_text(field: &[u8]) -> String {
    let end = field.iter().position(|&b| b == 0).unwrap_or(field.len());
    String::from_utf8_lossy(&field[..end]).into_owned()
}

/// Little-endian writer into a fixed buffer.
pub(crate) struct Writer<'a> {
    bytes: &'a mut [u8],
    pos: usize,
}

impl<'a> Writer<'a> {
    pub fn new(bytes: &'a mut [u8], pos: usize) -> Self {
        Self { bytes, pos }
    }

    pub fn put(&mut self, data: &[u8]) {
        self.bytes[self.pos..self.pos + data.len()].copy_from_slice(data);
        self.pos += data.len();
    }

    pub fn text(&mut self, name: &str, value: &str, width: usize) -> Result<()> {
        let raw = value.as_bytes();
        if raw.len() > width || raw.contains(&0) {
            return Err(Error::InvalidArgument(format!(
                "{name} must be at most {width} bytes without NUL, got {:?}",
                value
            )));
        }
        self.put(raw);
        self.put(&vec![0; width - raw.len()]);
        Ok(())
    }
}
