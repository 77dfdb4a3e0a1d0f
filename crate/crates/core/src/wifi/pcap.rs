//! Classic packet-capture files carrying raw 802.11 frames, with or without
//! a radiotap header.

use std::io::{Read, Write};
use std::time::Duration;

use pcap_file::pcap::{PcapHeader, PcapPacket, PcapReader, PcapWriter};
use pcap_file::DataLink;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkType {
    Ieee80211,
    Radiotap,
}

impl LinkType {
    fn from_datalink(dl: DataLink) -> Result<Self> {
        match dl {
            DataLink::IEEE802_11 => Ok(Self::Ieee80211),
            DataLink::IEEE802_11_RADIOTAP => Ok(Self::Radiotap),
            other => Err(Error::Pcap(format!("unsupported link type {other:?}"))),
        }
    }

    fn datalink(self) -> DataLink {
        match self {
            Self::Ieee80211 => DataLink::IEEE802_11,
            Self::Radiotap => DataLink::IEEE802_11_RADIOTAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapturedFrame {
    pub timestamp: Duration,
    /// 802.11 frame with any radiotap header and FCS removed.
    pub data: Vec<u8>,
}

const RADIOTAP_TSFT: u32 = 1 << 0;
const RADIOTAP_FLAGS: u32 = 1 << 1;
const RADIOTAP_EXT: u32 = 1 << 31;
const FLAG_FCS_AT_END: u8 = 0x10;
const FCS_LEN: usize = 4;

/// Strip the radiotap header, and the trailing FCS when the header's
/// flags field says one is present.
fn strip_radiotap(packet: &[u8]) -> Result<&[u8]> {
    let bad = |why: &str| Error::Pcap(format!("radiotap: {why}"));
    if packet.len() < 8 {
        return Err(bad("header truncated"));
    }
    let len = u16::from_le_bytes([packet[2], packet[3]]) as usize;
    if len < 8 || len > packet.len() {
        return Err(bad("bad header length"));
    }
    let header = &packet[..len];
    let present = u32::from_le_bytes(header[4..8].try_into().expect("four bytes"));
    let mut pos = 8;
    let mut word = present;
    while word & RADIOTAP_EXT != 0 {
        if pos + 4 > len {
            return Err(bad("present bitmap truncated"));
        }
        word = u32::from_le_bytes(header[pos..pos + 4].try_into().expect("four bytes"));
        pos += 4;
    }
    let mut fcs = false;
    if present & RADIOTAP_FLAGS != 0 {
        if present & RADIOTAP_TSFT != 0 {
            pos = pos.next_multiple_of(8) + 8;
        }
        let flags = *header.get(pos).ok_or_else(|| bad("flags field truncated"))?;
        fcs = flags & FLAG_FCS_AT_END != 0;
    }
    let body = &packet[len..];
    if fcs {
        if body.len() < FCS_LEN {
            return Err(bad("frame shorter than its FCS"));
        }
        return Ok(&body[..body.len() - FCS_LEN]);
    }
    Ok(body)
}

pub fn read_pcap<R: Read>(reader: R) -> Result<Vec<CapturedFrame>> {
    let mut pcap = PcapReader::new(reader).map_err(|e| Error::Pcap(e.to_string()))?;
    let link = LinkType::from_datalink(pcap.header().datalink)?;
    let mut frames = Vec::new();
    while let Some(packet) = pcap.next_packet() {
        let packet = packet.map_err(|e| Error::Pcap(e.to_string()))?;
        let data = match link {
            LinkType::Ieee80211 => &packet.data[..],
            LinkType::Radiotap => strip_radiotap(&packet.data)?,
        };
        frames.push(CapturedFrame { timestamp: packet.timestamp, data: data.to_vec() });
    }
    Ok(frames)
}

/// Write frames with link type 802.11 or radiotap. For radiotap a minimal
/// 8-byte header with no fields is prepended.
pub fn write_pcap<W: Write>(writer: W, link: LinkType, frames: &[CapturedFrame]) -> Result<W> {
    let header = PcapHeader { datalink: link.datalink(), ..Default::default() };
    let mut pcap = PcapWriter::with_header(writer, header).map_err(|e| Error::Pcap(e.to_string()))?;
    for f in frames {
        let data = match link {
            LinkType::Ieee80211 => f.data.clone(),
            LinkType::Radiotap => [&[0u8, 0, 8, 0, 0, 0, 0, 0][..], &f.data].concat(),
        };
        let packet = PcapPacket::new(f.timestamp, data.len() as u32, &data);
        pcap.write_packet(&packet).map_err(|e| Error::Pcap(e.to_string()))?;
    }
    Ok(pcap.into_writer())
}
