//! Drone-ID packet deframing. A decoded block is 96 bytes: a 93-byte packet
//! followed by its CRC-24. The packet starts with a type tag; byte offsets
//! for every field are listed in `FRAME_FORMAT.md` at the repository root.

mod fields;
mod models;
mod record;

pub use fields::{angle_to_quantity, Angle, Coordinate, GpsClock, Height, Speed};
pub use models::{aeroscope_model, model_lookup, ModelEntry, ModelMatch, MODELS};
pub use record::{to_detection_record, DetectionRecord, SourceType, RECORD_KEYS};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fec::{seal_block, Block, CONTENT_BYTES};
use fields::{Reader, Writer};

pub const TAG_LICENSE: u8 = 0x11;
pub const TAG_FLIGHT_V1: u16 = 0x1001;
pub const TAG_FLIGHT_V2: u16 = 0x1002;

/// Packet bytes following the two-byte type tag, as reported in detection
/// records.
pub const PACKET_LENGTH: u32 = 94;

pub const SERIAL_LEN: usize = 16;
pub const UUID_LEN: usize = 20;
pub const LICENSE_TEXT_LEN: usize = 32;
pub const FLIGHT_PLAN_LEN: usize = CONTENT_BYTES - 1 - SERIAL_LEN - LICENSE_TEXT_LEN;

/// Minimum packet lengths for each type.
pub const LICENSE_MIN_LEN: usize = 1 + SERIAL_LEN + LICENSE_TEXT_LEN + FLIGHT_PLAN_LEN;
pub const FLIGHT_V1_MIN_LEN: usize = 55 + UUID_LEN;
pub const FLIGHT_V2_MIN_LEN: usize = 68 + UUID_LEN;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct License {
    pub serial: String,
    pub license_text: String,
    pub flight_plan: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightInfoV1 {
    pub sequence_num: u16,
    pub state_info: u16,
    pub serial: String,
    pub drone_lon: Coordinate,
    pub drone_lat: Coordinate,
    pub altitude: i16,
    pub height: Height,
    pub x_speed: Speed,
    pub y_speed: Speed,
    pub z_speed: Speed,
    pub pitch: Angle,
    pub roll: Angle,
    pub yaw: Angle,
    pub home_lon: Coordinate,
    pub home_lat: Coordinate,
    pub model_id: u8,
    pub uuid: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlightInfoV2 {
    pub sequence_num: u16,
    pub state_info: u16,
    pub serial: String,
    pub drone_lon: Coordinate,
    pub drone_lat: Coordinate,
    pub altitude: i16,
    pub height: Height,
    pub x_speed: Speed,
    pub y_speed: Speed,
    pub z_speed: Speed,
    pub yaw: Angle,
    pub pilot_gps_clock: GpsClock,
    pub pilot_lat: Coordinate,
    pub pilot_lon: Coordinate,
    pub home_lon: Coordinate,
    pub home_lat: Coordinate,
    pub model_id: u8,
    pub uuid: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DroneIdFrame {
    License(License),
    FlightInfoV1(FlightInfoV1),
    FlightInfoV2(FlightInfoV2),
}

fn too_short(kind: &str, need: usize, got: usize) -> Error {
    Error::MalformedFrame(format!("{kind} packet needs {need} bytes, got {got}"))
}

/// Parse a packet (type tag first). Trailing bytes past the last field
/// are ignored.
pub fn parse_packet(packet: &[u8]) -> Result<DroneIdFrame> {
    if packet.is_empty() {
        return Err(too_short("drone-ID", 1, 0));
    }
    if packet[0] == TAG_LICENSE {
        return parse_license(packet).map(DroneIdFrame::License);
    }
    if packet.len() < 2 {
        return Err(too_short("drone-ID", 2, packet.len()));
    }
    match u16::from_le_bytes([packet[0], packet[1]]) {
        TAG_FLIGHT_V1 => parse_v1(packet).map(DroneIdFrame::FlightInfoV1),
        TAG_FLIGHT_V2 => parse_v2(packet).map(DroneIdFrame::FlightInfoV2),
        tag => Err(Error::UnsupportedPacket { tag, raw: packet.to_vec() }),
    }
}

/// Parse a 96-byte decoded block. The CRC is assumed to be verified.
pub fn parse_frame(block: &[u8]) -> Result<DroneIdFrame> {
    if block.len() < crate::fec::BLOCK_BYTES {
        return Err(too_short("decoded block", crate::fec::BLOCK_BYTES, block.len()));
    }
    parse_packet(&block[..CONTENT_BYTES])
}

fn parse_license(p: &[u8]) -> Result<License> {
    if p.len() < LICENSE_MIN_LEN {
        return Err(too_short("license", LICENSE_MIN_LEN, p.len()));
    }
    let mut r = Reader::new(p, 1);
    Ok(License {
        serial: r.text(SERIAL_LEN),
        license_text: r.text(LICENSE_TEXT_LEN),
        flight_plan: r.text(FLIGHT_PLAN_LEN),
    })
}

fn parse_v1(p: &[u8]) -> Result<FlightInfoV1> {
    if p.len() < FLIGHT_V1_MIN_LEN {
        return Err(too_short("flight info v1", FLIGHT_V1_MIN_LEN, p.len()));
    }
    let mut r = Reader::new(p, 2);
    Ok(FlightInfoV1 {
        sequence_num: r.u16(),
        state_info: r.u16(),
        serial: r.text(SERIAL_LEN),
        drone_lon: Coordinate(r.i32()),
        drone_lat: Coordinate(r.i32()),
        altitude: r.i16(),
        height: Height(r.i16()),
        x_speed: Speed(r.i16()),
        y_speed: Speed(r.i16()),
        z_speed: Speed(r.i16()),
        pitch: Angle(r.i16()),
        roll: Angle(r.i16()),
        yaw: Angle(r.i16()),
        home_lon: Coordinate(r.i32()),
        home_lat: Coordinate(r.i32()),
        model_id: r.u8(),
        uuid: r.text(UUID_LEN),
    })
}

fn parse_v2(p: &[u8]) -> Result<FlightInfoV2> {
    if p.len() < FLIGHT_V2_MIN_LEN {
        return Err(too_short("flight info v2", FLIGHT_V2_MIN_LEN, p.len()));
    }
    let mut r = Reader::new(p, 2);
    let mut frame = FlightInfoV2 {
        sequence_num: r.u16(),
        state_info: r.u16(),
        serial: r.text(SERIAL_LEN),
        drone_lon: Coordinate(r.i32()),
        drone_lat: Coordinate(r.i32()),
        altitude: r.i16(),
        height: Height(r.i16()),
        x_speed: Speed(r.i16()),
        y_speed: Speed(r.i16()),
        z_speed: Speed(r.i16()),
        yaw: Angle(r.i16()),
        pilot_gps_clock: GpsClock(r.u64()),
        pilot_lat: Coordinate(r.i32()),
        pilot_lon: Coordinate(r.i32()),
        home_lon: Coordinate(r.i32()),
        home_lat: Coordinate(r.i32()),
        model_id: r.u8(),
        uuid: String::new(),
    };
    let uuid_len = r.u8() as usize;
    if uuid_len > UUID_LEN {
        return Err(Error::MalformedFrame(format!(
            "uuid length {uuid_len} exceeds {UUID_LEN}"
        )));
    }
    frame.uuid = String::from_utf8_lossy(r.bytes(uuid_len)).into_owned();
    Ok(frame)
}

impl DroneIdFrame {
    pub fn serial(&self) -> &str {
        match self {
            Self::License(f) => &f.serial,
            Self::FlightInfoV1(f) => &f.serial,
            Self::FlightInfoV2(f) => &f.serial,
        }
    }

    /// Serialize to a 93-byte packet, zero-padded after the last field.
    pub fn to_packet(&self) -> Result<Vec<u8>> {
        let mut out = vec![0u8; CONTENT_BYTES];
        let mut w = Writer::new(&mut out, 0);
        match self {
            Self::License(f) => {
                w.put(&[TAG_LICENSE]);
                w.text("serial", &f.serial, SERIAL_LEN)?;
                w.text("license_text", &f.license_text, LICENSE_TEXT_LEN)?;
                w.text("flight_plan", &f.flight_plan, FLIGHT_PLAN_LEN)?;
            }
            Self::FlightInfoV1(f) => {
                w.put(&TAG_FLIGHT_V1.to_le_bytes());
                w.put(&f.sequence_num.to_le_bytes());
                w.put(&f.state_info.to_le_bytes());
                w.text("serial", &f.serial, SERIAL_LEN)?;
                w.put(&f.drone_lon.0.to_le_bytes());
                w.put(&f.drone_lat.0.to_le_bytes());
                w.put(&f.altitude.to_le_bytes());
                w.put(&f.height.0.to_le_bytes());
                for v in [f.x_speed, f.y_speed, f.z_speed] {
                    w.put(&v.0.to_le_bytes());
                }
                for a in [f.pitch, f.roll, f.yaw] {
                    w.put(&a.0.to_le_bytes());
                }
                w.put(&f.home_lon.0.to_le_bytes());
                w.put(&f.home_lat.0.to_le_bytes());
                w.put(&[f.model_id]);
                w.text("uuid", &f.uuid, UUID_LEN)?;
            }
            Self::FlightInfoV2(f) => {
                w.put(&TAG_FLIGHT_V2.to_le_bytes());
                w.put(&f.sequence_num.to_le_bytes());
                w.put(&f.state_info.to_le_bytes());
                w.text("serial", &f.serial, SERIAL_LEN)?;
                w.put(&f.drone_lon.0.to_le_bytes());
                w.put(&f.drone_lat.0.to_le_bytes());
                w.put(&f.altitude.to_le_bytes());
                w.put(&f.height.0.to_le_bytes());
                for v in [f.x_speed, f.y_speed, f.z_speed] {
                    w.put(&v.0.to_le_bytes());
                }
                w.put(&f.yaw.0.to_le_bytes());
                w.put(&f.pilot_gps_clock.0.to_le_bytes());
                for c in [f.pilot_lat, f.pilot_lon, f.home_lon, f.home_lat] {
                    w.put(&c.0.to_le_bytes());
                }
                w.put(&[f.model_id]);
                w.put(&[f.uuid.len().min(UUID_LEN + 1) as u8]);
                w.text("uuid", &f.uuid, UUID_LEN)?;
            }
        }
        Ok(out)
    }

    /// Serialize and append the CRC-24, giving a 96-byte block.
    pub fn to_block(&self) -> Result<Block> {
        seal_block(&self.to_packet()?)
    }

    /// Names of coordinate fields whose decoded value falls outside the
    /// valid latitude or longitude range.
    pub fn implausible_fields(&self) -> Vec<&'static str> {
        let checks: Vec<(&'static str, Coordinate, f64)> = match self {
            Self::License(_) => Vec::new(),
            Self::FlightInfoV1(f) => vec![
                ("drone_longitude", f.drone_lon, 180.0),
                ("drone_latitude", f.drone_lat, 90.0),
                ("home_longitude", f.home_lon, 180.0),
                ("home_latitude", f.home_lat, 90.0),
            ],
            Self::FlightInfoV2(f) => vec![
                ("drone_longitude", f.drone_lon, 180.0),
                ("drone_latitude", f.drone_lat, 90.0),
                ("pilot_longitude", f.pilot_lon, 180.0),
                ("pilot_latitude", f.pilot_lat, 90.0),
                ("home_longitude", f.home_lon, 180.0),
                ("home_latitude", f.home_lat, 90.0),
            ],
        };
        checks.into_iter().filter(|(_, c, lim)| !c.within(*lim)).map(|(n, _, _)| n).collect()
    }
}
