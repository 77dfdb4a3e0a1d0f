use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed sample file: {0}")]
    MalformedFile(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: need {needed} samples, got {got}")]
    InsufficientData { needed: usize, got: usize },

    /// Turbo decoding finished without a passing CRC-24. `residual` is the
    /// CRC-24 computed over the whole decoded block (zero means valid).
    #[error("integrity failure: CRC-24 residual {residual:#08x}")]
    Integrity { residual: u32 },

    #[error("unsupported packet type {tag:#06x}")]
    UnsupportedPacket { tag: u16, raw: Vec<u8> },

    #[error("malformed frame: {0}")]
    MalformedFrame(String),

    #[error("not a beacon (type {frame_type}, subtype {subtype})")]
    NotABeacon { frame_type: u8, subtype: u8 },

    #[error("packet capture: {0}")]
    Pcap(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
