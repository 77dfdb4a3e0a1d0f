//! Center frequencies the drone-ID burst hops across.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const HOP_SPACING_HZ: f64 = 15e6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Band {
    #[serde(rename = "2.4")]
    Ghz2_4,
    #[serde(rename = "5.8")]
    Ghz5_8,
}

impl FromStr for Band {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_end_matches("GHz").trim_end_matches("ghz").trim() {
            "2.4" => Ok(Self::Ghz2_4),
            "5.8" => Ok(Self::Ghz5_8),
            other => Err(Error::InvalidArgument(format!("unknown band {other:?}, expected 2.4 or 5.8"))),
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ghz2_4 => "2.4",
            Self::Ghz5_8 => "5.8",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HopPlan {
    pub band: Band,
    /// Hz, ascending.
    pub center_frequencies: Vec<f64>,
}

impl HopPlan {
    pub fn for_band(band: Band) -> Self {
        let (first_hz, count) = match band {
            Band::Ghz2_4 => (2399.5e6, 6),
            Band::Ghz5_8 => (5741.5e6, 7),
        };
        let center_frequencies = (0..count).map(|i| first_hz + HOP_SPACING_HZ * i as f64).collect();
        Self { band, center_frequencies }
    }
}
