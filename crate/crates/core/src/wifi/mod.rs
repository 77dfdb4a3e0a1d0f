//! Enhanced Wi-Fi transport: drone-ID payloads carried in a vendor
//! information element of 802.11 beacon frames.

mod pcap;

pub use pcap::{read_pcap, write_pcap, CapturedFrame, LinkType};

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::frames::{parse_packet, to_detection_record, DetectionRecord, SourceType};

/// MAC header (24 bytes) plus timestamp, beacon interval and capability
/// fields (12 bytes).
pub const FIXED_LEN: usize = 36;
pub const VENDOR_IE_TAG: u8 = 0xDD;
pub const SSID_IE_TAG: u8 = 0x00;
/// Leading bytes of the drone-ID vendor element value.
pub const DRONEID_MAGIC: [u8; 6] = [0x26, 0x37, 0x12, 0x58, 0x62, 0x13];
/// Largest payload that fits after the magic in one element.
pub const MAX_PAYLOAD: usize = u8::MAX as usize - DRONEID_MAGIC.len();

const TYPE_MANAGEMENT: u8 = 0;
const SUBTYPE_BEACON: u8 = 8;

pub type MacAddr = [u8; 6];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InformationElement {
    pub tag: u8,
    pub value: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BeaconFrame {
    pub frame_control: u16,
    pub frame_type: u8,
    pub subtype: u8,
    /// Receiver address (broadcast for beacons).
    pub device: MacAddr,
    pub sender: MacAddr,
    pub bssid: MacAddr,
    pub timestamp: u64,
    pub beacon_interval: u16,
    pub capabilities: u16,
    pub elements: Vec<InformationElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WifiDroneIdPayload {
    pub payload: Vec<u8>,
}

fn mac(bytes: &[u8]) -> MacAddr {
    bytes.try_into().expect("six bytes")
}

pub fn parse_beacon(raw: &[u8]) -> Result<BeaconFrame> {
    if raw.len() < FIXED_LEN {
        return Err(Error::MalformedFrame(format!(
            "beacon needs at least {FIXED_LEN} bytes, got {}",
            raw.len()
        )));
    }
    let frame_control = u16::from_le_bytes([raw[0], raw[1]]);
    let frame_type = (raw[0] >> 2) & 0x3;
    let subtype = raw[0] >> 4;
    if frame_type != TYPE_MANAGEMENT || subtype != SUBTYPE_BEACON {
        return Err(Error::NotABeacon { frame_type, subtype });
    }
    let mut elements = Vec::new();
    let mut rest = &raw[FIXED_LEN..];
    while !rest.is_empty() {
        if rest.len() < 2 {
            return Err(Error::MalformedFrame("truncated information element header".into()));
        }
        let (tag, len) = (rest[0], rest[1] as usize);
        if rest.len() < 2 + len {
            return Err(Error::MalformedFrame(format!(
                "element {tag:#04x} declares {len} bytes, {} remain",
                rest.len() - 2
            )));
        }
        elements.push(InformationElement { tag, value: rest[2..2 + len].to_vec() });
        rest = &rest[2 + len..];
    }
    Ok(BeaconFrame {
        frame_control,
        frame_type,
        subtype,
        device: mac(&raw[4..10]),
        sender: mac(&raw[10..16]),
        bssid: mac(&raw[16..22]),
        timestamp: u64::from_le_bytes(raw[24..32].try_into().expect("eight bytes")),
        beacon_interval: u16::from_le_bytes([raw[32], raw[33]]),
        capabilities: u16::from_le_bytes([raw[34], raw[35]]),
        elements,
    })
}

impl BeaconFrame {
    pub fn ssid(&self) -> Option<String> {
        self.elements
            .iter()
            .find(|e| e.tag == SSID_IE_TAG)
            .map(|e| String::from_utf8_lossy(&e.value).into_owned())
    }
}

pub fn extract_droneid(frame: &BeaconFrame) -> Option<WifiDroneIdPayload> {
    frame.elements.iter().find_map(|e| {
        let payload = e.value.strip_prefix(&DRONEID_MAGIC[..])?;
        (e.tag == VENDOR_IE_TAG && !payload.is_empty())
            .then(|| WifiDroneIdPayload { payload: payload.to_vec() })
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Vendor {
    Dji,
    Parrot,
}

impl fmt::Display for Vendor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Dji => "DJI",
            Self::Parrot => "Parrot",
        })
    }
}

pub const DJI_OUIS: [[u8; 3]; 3] = [[0x60, 0x60, 0x1F], [0x34, 0xD2, 0x62], [0x48, 0x1C, 0xB9]];
pub const PARROT_OUIS: [[u8; 3]; 4] =
    [[0x00, 0x12, 0x1C], [0x90, 0x03, 0xB7], [0xA0, 0x14, 0x3D], [0x00, 0x26, 0x7E]];

pub fn classify_oui(addr: &MacAddr) -> Option<Vendor> {
    let oui = &addr[..3];
    if DJI_OUIS.iter().any(|o| o == oui) {
        Some(Vendor::Dji)
    } else if PARROT_OUIS.iter().any(|o| o == oui) {
        Some(Vendor::Parrot)
    } else {
        None
    }
}

pub fn classify_vendor(frame: &BeaconFrame) -> Option<Vendor> {
    classify_oui(&frame.sender)
}

/// Byte-exact beacon from `sender` with an SSID element and, when
/// `payload` is given, a drone-ID vendor element.
pub fn build_beacon(sender: MacAddr, ssid: &str, payload: Option<&[u8]>) -> Result<Vec<u8>> {
    if ssid.len() > 32 {
        return Err(Error::InvalidArgument(format!("SSID longer than 32 bytes: {ssid:?}")));
    }
    let mut out = Vec::with_capacity(FIXED_LEN + 2 + ssid.len() + 2 + 255);
    out.extend_from_slice(&[SUBTYPE_BEACON << 4 | TYPE_MANAGEMENT << 2, 0x00]);
    out.extend_from_slice(&[0x00, 0x00]);
    out.extend_from_slice(&[0xFF; 6]);
    out.extend_from_slice(&sender);
    out.extend_from_slice(&sender);
    out.extend_from_slice(&[0x00, 0x00]);
    out.extend_from_slice(&0u64.to_le_bytes());
    out.extend_from_slice(&100u16.to_le_bytes());
    out.extend_from_slice(&0x0401u16.to_le_bytes());
    out.push(SSID_IE_TAG);
    out.push(ssid.len() as u8);
    out.extend_from_slice(ssid.as_bytes());
    if let Some(payload) = payload {
        if payload.is_empty() || payload.len() > MAX_PAYLOAD {
            return Err(Error::InvalidArgument(format!(
                "drone-ID payload must be 1..={MAX_PAYLOAD} bytes, got {}",
                payload.len()
            )));
        }
        out.push(VENDOR_IE_TAG);
        out.push((payload.len() + DRONEID_MAGIC.len()) as u8);
        out.extend_from_slice(&DRONEID_MAGIC);
        out.extend_from_slice(payload);
    }
    Ok(out)
}

/// Result of examining one captured 802.11 frame.
#[derive(Debug)]
pub struct WifiObservation {
    pub sender: MacAddr,
    pub vendor: Option<Vendor>,
    pub record: Option<Result<DetectionRecord>>,
}

/// Parse a raw frame; non-beacons yield `Ok(None)`.
pub fn observe(raw: &[u8]) -> Result<Option<WifiObservation>> {
    let frame = match parse_beacon(raw) {
        Ok(f) => f,
        Err(Error::NotABeacon { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let record = extract_droneid(&frame).map(|p| {
        parse_packet(&p.payload).map(|f| to_detection_record(&f, SourceType::EnhancedWifi))
    });
    Ok(Some(WifiObservation { sender: frame.sender, vendor: classify_vendor(&frame), record }))
}
