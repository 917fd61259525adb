//! Error type shared across the simulator.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    /// A flat block address (or a request range) falls outside the device.
    #[error("illegal block address: {address} (device capacity is {capacity} blocks)")]
    AddressIllegal { address: u64, capacity: u64 },

    /// A (zone, track, block) triple violates the geometry bounds.
    #[error("invalid block triple: zone {zone_id}, track {track_offset}, block {block_offset}")]
    InvalidTriple {
        zone_id: u32,
        track_offset: u32,
        block_offset: u32,
    },

    /// A zone has no unallocated physical blocks left.
    #[error("zone {zone_id} is full")]
    ZoneFull { zone_id: u32 },

    /// An internal contract was broken by the caller (e.g. double bind).
    #[error("logic error: {0}")]
    Logic(String),

    /// Invalid configuration value.
    #[error("configuration error: {0}")]
    Config(String),

    /// A trace line could not be parsed.
    #[error("trace parse error at line {line}: {message}")]
    TraceParse { line: u64, message: String },

    /// Statistic requested before any data exists (e.g. WA with zero writes).
    #[error("no data recorded yet: {0}")]
    NoData(&'static str),

    /// A checkpoint file failed version, integrity, or structure checks.
    #[error("checkpoint restore failed: {0}")]
    RestoreFailed(String),

    /// Another process holds the device lock.
    #[error("device is locked by another invocation: {0}")]
    DeviceLocked(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
