//! Interlaced track layout and pure address arithmetic.
//!
//! A device is a sequence of zones; each zone is `tracks_per_zone` physical
//! tracks alternating bottom/top, starting with a bottom track. Bottom tracks
//! are denser than top tracks (568 vs 456 blocks by default, roughly the 1.25x
//! density ratio of real interlaced media). Flat block addresses enumerate the
//! zones in order and, within a zone, the tracks in physical order.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Default block size in bytes.
pub const DEFAULT_BLOCK_SIZE: u32 = 4096;
/// Default bottom-track capacity in blocks.
pub const DEFAULT_BOTTOM_TRACK_BLOCKS: u32 = 568;
/// Default top-track capacity in blocks.
pub const DEFAULT_TOP_TRACK_BLOCKS: u32 = 456;
/// Default number of tracks per zone (alternating bottom/top).
pub const DEFAULT_TRACKS_PER_ZONE: u32 = 20;
/// Default device capacity: 128 GiB.
pub const DEFAULT_CAPACITY_BYTES: u64 = 128 * 1024 * 1024 * 1024;

/// Which of the two interlaced track kinds a physical track is.
///
/// Tracks at even offsets within a zone are bottom tracks, odd offsets are
/// top tracks. Top-track updates are in-place; bottom-track updates may
/// require a read-modify-write of the overlapping top blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TrackKind {
    Bottom,
    Top,
}

/// The (zone, track, block) address triple used by the translation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockTriple {
    pub zone_id: u32,
    pub track_offset: u32,
    pub block_offset: u32,
}

/// Static shape of the interlaced disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiskGeometry {
    pub block_size_bytes: u32,
    pub blocks_per_bottom_track: u32,
    pub blocks_per_top_track: u32,
    pub tracks_per_zone: u32,
    pub zone_count: u32,
}

impl Default for DiskGeometry {
    /// Default geometry: a 128 GiB device rounded down to whole zones.
    fn default() -> Self {
        Self::from_capacity_bytes(DEFAULT_CAPACITY_BYTES).expect("default geometry is valid")
    }
}

impl DiskGeometry {
    /// Validates and builds a geometry.
    pub fn new(
        block_size_bytes: u32,
        blocks_per_bottom_track: u32,
        blocks_per_top_track: u32,
        tracks_per_zone: u32,
        zone_count: u32,
    ) -> Result<Self> {
        let geometry = Self {
            block_size_bytes,
            blocks_per_bottom_track,
            blocks_per_top_track,
            tracks_per_zone,
            zone_count,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    /// Default track shape with an explicit zone count.
    pub fn with_zone_count(zone_count: u32) -> Result<Self> {
        Self::new(
            DEFAULT_BLOCK_SIZE,
            DEFAULT_BOTTOM_TRACK_BLOCKS,
            DEFAULT_TOP_TRACK_BLOCKS,
            DEFAULT_TRACKS_PER_ZONE,
            zone_count,
        )
    }

    /// Default track shape sized for `capacity_bytes`, rounded down to whole
    /// zones. Trailing partial-zone space is unaddressable.
    pub fn from_capacity_bytes(capacity_bytes: u64) -> Result<Self> {
        let probe = Self {
            block_size_bytes: DEFAULT_BLOCK_SIZE,
            blocks_per_bottom_track: DEFAULT_BOTTOM_TRACK_BLOCKS,
            blocks_per_top_track: DEFAULT_TOP_TRACK_BLOCKS,
            tracks_per_zone: DEFAULT_TRACKS_PER_ZONE,
            zone_count: 1,
        };
        let capacity_blocks = capacity_bytes / u64::from(DEFAULT_BLOCK_SIZE);
        let zones = capacity_blocks / probe.zone_capacity_blocks();
        let zone_count = u32::try_from(zones)
            .map_err(|_| SimError::Config(format!("capacity {capacity_bytes} B is too large")))?;
        Self::new(
            DEFAULT_BLOCK_SIZE,
            DEFAULT_BOTTOM_TRACK_BLOCKS,
            DEFAULT_TOP_TRACK_BLOCKS,
            DEFAULT_TRACKS_PER_ZONE,
            zone_count,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.block_size_bytes == 0 {
            return Err(SimError::Config("block size must be positive".into()));
        }
        if self.blocks_per_bottom_track == 0 || self.blocks_per_top_track == 0 {
            return Err(SimError::Config("track sizes must be positive".into()));
        }
        if self.blocks_per_bottom_track <= self.blocks_per_top_track {
            return Err(SimError::Config(format!(
                "bottom track ({}) must be denser than top track ({})",
                self.blocks_per_bottom_track, self.blocks_per_top_track
            )));
        }
        if self.tracks_per_zone == 0 || self.tracks_per_zone % 2 != 0 {
            return Err(SimError::Config(format!(
                "tracks per zone must be a positive even number, got {}",
                self.tracks_per_zone
            )));
        }
        if self.zone_count == 0 {
            return Err(SimError::Config(
                "device must contain at least one whole zone".into(),
            ));
        }
        Ok(())
    }

    /// Blocks in one bottom/top track pair.
    #[inline]
    pub fn track_pair_blocks(&self) -> u64 {
        u64::from(self.blocks_per_bottom_track) + u64::from(self.blocks_per_top_track)
    }

    /// Blocks per zone: `(tracks_per_zone / 2) * (bottom + top)`.
    #[inline]
    pub fn zone_capacity_blocks(&self) -> u64 {
        u64::from(self.tracks_per_zone / 2) * self.track_pair_blocks()
    }

    /// Total addressable blocks.
    #[inline]
    pub fn total_blocks(&self) -> u64 {
        u64::from(self.zone_count) * self.zone_capacity_blocks()
    }

    /// Total addressable bytes.
    #[inline]
    pub fn total_bytes(&self) -> u64 {
        self.total_blocks() * u64::from(self.block_size_bytes)
    }

    /// Total physical tracks on the device.
    #[inline]
    pub fn total_tracks(&self) -> u64 {
        u64::from(self.zone_count) * u64::from(self.tracks_per_zone)
    }

    /// Kind of the track at `track_offset` within a zone: even offsets are
    /// bottom tracks.
    pub fn track_kind(&self, track_offset: u32) -> Result<TrackKind> {
        if track_offset >= self.tracks_per_zone {
            return Err(SimError::InvalidTriple {
                zone_id: 0,
                track_offset,
                block_offset: 0,
            });
        }
        Ok(if track_offset % 2 == 0 {
            TrackKind::Bottom
        } else {
            TrackKind::Top
        })
    }

    /// Blocks on the track at `track_offset` within a zone.
    pub fn track_blocks(&self, track_offset: u32) -> Result<u32> {
        Ok(match self.track_kind(track_offset)? {
            TrackKind::Bottom => self.blocks_per_bottom_track,
            TrackKind::Top => self.blocks_per_top_track,
        })
    }

    /// Canonical in-zone offset of the first block of `track_offset`.
    pub fn track_start(&self, track_offset: u32) -> Result<u64> {
        if track_offset >= self.tracks_per_zone {
            return Err(SimError::InvalidTriple {
                zone_id: 0,
                track_offset,
                block_offset: 0,
            });
        }
        let pair = u64::from(track_offset / 2);
        let mut start = pair * self.track_pair_blocks();
        if track_offset % 2 == 1 {
            start += u64::from(self.blocks_per_bottom_track);
        }
        Ok(start)
    }

    /// Decomposes a canonical in-zone offset into (track, block).
    pub fn split_zone_offset(&self, offset: u64) -> Result<(u32, u32)> {
        if offset >= self.zone_capacity_blocks() {
            return Err(SimError::AddressIllegal {
                address: offset,
                capacity: self.zone_capacity_blocks(),
            });
        }
        let pair_blocks = self.track_pair_blocks();
        let pair = offset / pair_blocks;
        let within = offset % pair_blocks;
        let bottom = u64::from(self.blocks_per_bottom_track);
        if within < bottom {
            Ok((pair as u32 * 2, within as u32))
        } else {
            Ok((pair as u32 * 2 + 1, (within - bottom) as u32))
        }
    }

    /// Converts a flat block address into its (zone, track, block) triple.
    pub fn to_triple(&self, flat_address: u64) -> Result<BlockTriple> {
        if flat_address >= self.total_blocks() {
            return Err(SimError::AddressIllegal {
                address: flat_address,
                capacity: self.total_blocks(),
            });
        }
        let zone_capacity = self.zone_capacity_blocks();
        let zone_id = (flat_address / zone_capacity) as u32;
        let (track_offset, block_offset) = self.split_zone_offset(flat_address % zone_capacity)?;
        Ok(BlockTriple {
            zone_id,
            track_offset,
            block_offset,
        })
    }

    /// Exact inverse of [`to_triple`](Self::to_triple).
    pub fn to_flat(&self, triple: BlockTriple) -> Result<u64> {
        self.check_triple(triple)?;
        let zone_base = u64::from(triple.zone_id) * self.zone_capacity_blocks();
        Ok(zone_base + self.track_start(triple.track_offset)? + u64::from(triple.block_offset))
    }

    /// Validates a triple against the geometry bounds.
    pub fn check_triple(&self, triple: BlockTriple) -> Result<()> {
        let invalid = || SimError::InvalidTriple {
            zone_id: triple.zone_id,
            track_offset: triple.track_offset,
            block_offset: triple.block_offset,
        };
        if triple.zone_id >= self.zone_count || triple.track_offset >= self.tracks_per_zone {
            return Err(invalid());
        }
        if triple.block_offset >= self.track_blocks(triple.track_offset)? {
            return Err(invalid());
        }
        Ok(())
    }

    /// Top tracks overlapping the given bottom track: `{t-1, t+1}` clipped to
    /// the zone. Edge bottom tracks have a single top neighbor.
    pub fn top_neighbors(&self, bottom_track_offset: u32) -> Result<Vec<u32>> {
        if self.track_kind(bottom_track_offset)? != TrackKind::Bottom {
            return Err(SimError::Logic(format!(
                "track {bottom_track_offset} is a top track, it has no top neighbors"
            )));
        }
        let mut neighbors = Vec::with_capacity(2);
        if bottom_track_offset > 0 {
            neighbors.push(bottom_track_offset - 1);
        }
        if bottom_track_offset + 1 < self.tracks_per_zone {
            neighbors.push(bottom_track_offset + 1);
        }
        Ok(neighbors)
    }

    /// The single overlapped block on a neighboring top track for bottom-track
    /// block `i`: `floor(i * top / bottom)`. One block per neighbor track, so
    /// a bottom update touches at most two top blocks.
    pub fn adjacent_top_block(&self, bottom_block_offset: u32) -> u32 {
        debug_assert!(bottom_block_offset < self.blocks_per_bottom_track);
        let scaled = u64::from(bottom_block_offset) * u64::from(self.blocks_per_top_track)
            / u64::from(self.blocks_per_bottom_track);
        scaled as u32
    }

    /// Global physical track index of a triple's track.
    #[inline]
    pub fn global_track(&self, zone_id: u32, track_offset: u32) -> u64 {
        u64::from(zone_id) * u64::from(self.tracks_per_zone) + u64::from(track_offset)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn defaults() -> DiskGeometry {
        DiskGeometry::default()
    }

    #[test]
    fn default_geometry_matches_expected_shape() {
        let g = defaults();
        assert_eq!(g.block_size_bytes, 4096);
        assert_eq!(g.blocks_per_bottom_track, 568);
        assert_eq!(g.blocks_per_top_track, 456);
        assert_eq!(g.tracks_per_zone, 20);
        assert_eq!(g.zone_capacity_blocks(), 10_240);
        // 128 GiB / 4096 = 33_554_432 blocks; 33_554_432 / 10_240 = 3276 whole zones
        assert_eq!(g.zone_count, 3276);
        assert!(g.total_bytes() <= DEFAULT_CAPACITY_BYTES);
    }

    #[test]
    fn density_ratio_is_about_one_and_a_quarter() {
        let g = defaults();
        let ratio = f64::from(g.blocks_per_bottom_track) / f64::from(g.blocks_per_top_track);
        assert!((ratio - 1.246).abs() < 0.01, "ratio {ratio}");
    }

    #[test]
    fn to_triple_examples() {
        let g = defaults();
        assert_eq!(
            g.to_triple(0).unwrap(),
            BlockTriple {
                zone_id: 0,
                track_offset: 0,
                block_offset: 0
            }
        );
        // Track 0 holds blocks 0..=567, so 568 is the first block of top track 1.
        assert_eq!(
            g.to_triple(568).unwrap(),
            BlockTriple {
                zone_id: 0,
                track_offset: 1,
                block_offset: 0
            }
        );
        // Zone capacity = 10 * 568 + 10 * 456 = 10240.
        assert_eq!(
            g.to_triple(10_240).unwrap(),
            BlockTriple {
                zone_id: 1,
                track_offset: 0,
                block_offset: 0
            }
        );
    }

    #[test]
    fn to_flat_examples() {
        let g = defaults();
        let t = |zone_id, track_offset, block_offset| BlockTriple {
            zone_id,
            track_offset,
            block_offset,
        };
        assert_eq!(g.to_flat(t(0, 0, 0)).unwrap(), 0);
        assert_eq!(g.to_flat(t(0, 1, 0)).unwrap(), 568);
        assert_eq!(g.to_flat(t(1, 0, 0)).unwrap(), 10_240);
    }

    #[test]
    fn out_of_range_address_is_rejected() {
        let g = DiskGeometry::with_zone_count(2).unwrap();
        assert!(g.to_triple(g.total_blocks()).is_err());
        assert!(g.to_triple(u64::MAX).is_err());
    }

    #[test]
    fn invalid_triples_are_rejected() {
        let g = DiskGeometry::with_zone_count(2).unwrap();
        let bad = [
            BlockTriple {
                zone_id: 2,
                track_offset: 0,
                block_offset: 0,
            },
            BlockTriple {
                zone_id: 0,
                track_offset: 20,
                block_offset: 0,
            },
            // Top tracks only have 456 blocks.
            BlockTriple {
                zone_id: 0,
                track_offset: 1,
                block_offset: 456,
            },
            BlockTriple {
                zone_id: 0,
                track_offset: 0,
                block_offset: 568,
            },
        ];
        for triple in bad {
            assert!(g.to_flat(triple).is_err(), "{triple:?}");
        }
    }

    #[test]
    fn track_kind_alternates_starting_bottom() {
        let g = defaults();
        assert_eq!(g.track_kind(0).unwrap(), TrackKind::Bottom);
        assert_eq!(g.track_kind(1).unwrap(), TrackKind::Top);
        assert_eq!(g.track_kind(18).unwrap(), TrackKind::Bottom);
        assert_eq!(g.track_kind(19).unwrap(), TrackKind::Top);
        assert!(g.track_kind(20).is_err());
    }

    #[test]
    fn top_neighbors_clip_at_zone_edges() {
        let g = defaults();
        assert_eq!(g.top_neighbors(2).unwrap(), vec![1, 3]);
        assert_eq!(g.top_neighbors(0).unwrap(), vec![1]);
        assert_eq!(g.top_neighbors(18).unwrap(), vec![17, 19]);
        // Calling on a top track is a logic error.
        assert!(matches!(g.top_neighbors(1), Err(SimError::Logic(_))));
    }

    #[test]
    fn adjacent_top_block_examples() {
        let g = defaults();
        assert_eq!(g.adjacent_top_block(0), 0);
        // 284 * 456 = 129504; 129504 / 568 = 228 exactly.
        assert_eq!(g.adjacent_top_block(284), 228);
        // floor(567 * 456 / 568) = floor(455.197...) = 455.
        assert_eq!(g.adjacent_top_block(567), 455);
    }

    #[test]
    fn adjacent_top_block_is_monotone_and_surjective() {
        let g = defaults();
        let mut seen = vec![false; g.blocks_per_top_track as usize];
        let mut prev = 0;
        for i in 0..g.blocks_per_bottom_track {
            let j = g.adjacent_top_block(i);
            assert!(j >= prev, "not monotone at i={i}");
            assert!(j < g.blocks_per_top_track);
            seen[j as usize] = true;
            prev = j;
        }
        assert!(seen.iter().all(|&s| s), "not surjective onto top blocks");
    }

    #[test]
    fn zone_offsets_tile_without_gaps() {
        // Partition property: walking tracks in order covers [0, zone_capacity)
        // exactly once.
        let g = defaults();
        let mut offset = 0u64;
        for track in 0..g.tracks_per_zone {
            assert_eq!(g.track_start(track).unwrap(), offset);
            for block in 0..g.track_blocks(track).unwrap() {
                let (t, b) = g.split_zone_offset(offset).unwrap();
                assert_eq!((t, b), (track, block));
                offset += 1;
            }
        }
        assert_eq!(offset, g.zone_capacity_blocks());
    }

    #[test]
    fn roundtrip_exhaustive_on_small_geometry() {
        let g = DiskGeometry::new(4096, 568, 456, 4, 2).unwrap();
        for flat in 0..g.total_blocks() {
            let triple = g.to_triple(flat).unwrap();
            assert_eq!(g.to_flat(triple).unwrap(), flat);
        }
    }

    #[test]
    fn odd_tracks_per_zone_is_rejected() {
        assert!(DiskGeometry::new(4096, 568, 456, 7, 2).is_err());
    }

    #[test]
    fn bottom_must_be_denser_than_top() {
        assert!(DiskGeometry::new(4096, 456, 456, 20, 2).is_err());
        assert!(DiskGeometry::new(4096, 400, 456, 20, 2).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_randomized_on_defaults(flat in 0u64..33_546_240) {
            let g = defaults();
            let triple = g.to_triple(flat).unwrap();
            prop_assert_eq!(g.to_flat(triple).unwrap(), flat);
        }

        #[test]
        fn roundtrip_on_random_geometries(
            bottom in 2u32..600,
            shrink in 1u32..300,
            pairs in 1u32..12,
            zones in 1u32..6,
            sample in 0u64..u64::MAX,
        ) {
            let top = bottom.saturating_sub(shrink).max(1);
            prop_assume!(bottom > top);
            let g = DiskGeometry::new(512, bottom, top, pairs * 2, zones).unwrap();
            let flat = sample % g.total_blocks();
            let triple = g.to_triple(flat).unwrap();
            prop_assert_eq!(g.to_flat(triple).unwrap(), flat);
        }
    }
}
