//! DJI model table: serial-number prefixes and AeroScope model IDs.

use serde::Serialize;

pub struct ModelEntry {
    pub model: &'static str,
    pub prefixes: &'static [&'static str],
    pub aeroscope_id: u16,
}

const fn entry(model: &'static str, prefixes: &'static [&'static str], aeroscope_id: u16) -> ModelEntry {
    ModelEntry { model, prefixes, aeroscope_id }
}

/// Rows in reference-table order. A few prefixes appear under two models
/// (061, 0AX, 0HA); lookups resolve them to the first row listed.
pub const MODELS: &[ModelEntry] = &[
    entry("Inspire 1", &["041", "W21"], 1),
    entry("Phantom 3 Series", &["0JX"], 2),
    entry("Phantom 3 Series Pro", &["P76"], 3),
    entry("Phantom 3 Std", &["03Z", "P5A"], 4),
    entry("M100", &["M02"], 5),
    entry("ACEONE", &[], 6),
    entry("WKM", &[], 7),
    entry("NAZA", &["061"], 8),
    entry("A2", &["061"], 9),
    entry("A3", &["067"], 10),
    entry("Phantom 4", &["07D", "07J", "0AX", "0HA", "189"], 11),
    entry("MG1", &["05Y"], 12),
    entry("M600", &["M64"], 14),
    entry("Phantom 3 4k", &["P7A"], 15),
    entry("Mavic Pro", &["08Q", "08R"], 16),
    entry("Inspire 2", &["095", "09Y", "0A0"], 17),
    entry("Phantom 4 Pro", &["0AX"], 18),
    entry("N2", &[], 20),
    entry("Spark", &["0AS", "0BM"], 21),
    entry("M600 Pro", &["M80"], 23),
    entry("Mavic Air", &["0K1", "0K4"], 24),
    entry("M200", &["0FZ"], 25),
    entry("Phantom 4 Series", &["CE1"], 26),
    entry("Phantom 4 Adv", &["0HA"], 27),
    entry("M210", &["0N4"], 28),
    entry("M210RTK", &["17U", "1DA"], 30),
    entry("A3_AG", &[], 31),
    entry("MG2", &[], 32),
    entry("MG1A", &[], 34),
    entry("Phantom 4 RTK", &["0UY", "0V2"], 35),
    entry("Phantom 4 Pro V2.0", &["11U", "11V"], 36),
    entry("MG1P", &["0YS"], 38),
    entry("MG1P-RTK", &["0YL"], 40),
    entry("Mavic 2", &["0M6", "163"], 41),
    entry("M200 V2 Series", &["17S"], 44),
    entry("Mavic 2 Enterprise", &["276", "29Z"], 51),
    entry("Mavic Mini", &["1SC", "1SD", "1SZ", "1WG"], 53),
    entry("Mavic Air 2", &["1WN", "3N3"], 58),
    entry("P4M", &["1UD"], 59),
    entry("M300 RTK", &["1ZN"], 60),
    entry("DJI FPV", &["37Q"], 61),
    entry("Mini 2", &["3NZ", "3Q4", "5DX", "5FS"], 63),
    entry("AGRAS T10", &["IEZ"], 64),
    entry("AGRAS T30", &["35P"], 65),
    entry("Air 2S", &["3YT"], 66),
    entry("M30", &[], 67),
    entry("Mavic 3", &["F4Q", "F45"], 68),
    entry("Mavic 2 Enterprise Adv", &["298"], 69),
    entry("Mini SE", &["4AE", "4DT", "4GM"], 70),
    entry("Mini 3 Pro", &[], 73),
    entry("YUNEEC H480", &["YU1"], 240),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ModelMatch {
    pub model: &'static str,
    pub prefix: &'static str,
    pub aeroscope_id: u16,
}

/// Match the first three characters of a serial number.
pub fn model_lookup(serial: &str) -> Option<ModelMatch> {
    let prefix = serial.get(..3)?;
    MODELS.iter().find_map(|e| {
        e.prefixes.iter().find(|&&p| p == prefix).map(|&p| ModelMatch {
            model: e.model,
            prefix: p,
            aeroscope_id: e.aeroscope_id,
        })
    })
}

pub fn aeroscope_model(id: u32) -> Option<&'static str> {
    MODELS.iter().find(|e| u32::from(e.aeroscope_id) == id).map(|e| e.model)
}
