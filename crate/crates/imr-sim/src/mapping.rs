//! Per-zone logical-to-physical mapping table and allocation strategies.
//!
//! Each zone maps logical block offsets (`bo`) to physical block offsets
//! (`nbo`), both canonical in-zone offsets in `[0, zone_capacity)`. A physical
//! block is *valid* iff it appears in the reverse map. New physical blocks are
//! handed out by an allocation strategy that fills every bottom track before
//! any top track, which is what keeps write amplification at 1.0 below the
//! stage boundary.

use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::geometry::DiskGeometry;

/// Order in which a zone's physical blocks are handed out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AllocationStrategy {
    /// All bottom-track blocks (ascending track, ascending block), then all
    /// top-track blocks.
    TwoStage,
    /// All bottom-track blocks; then every other top track (physical offsets
    /// 1, 5, 9, ...); then the remaining top tracks (3, 7, 11, ...).
    ThreeStage,
}

impl AllocationStrategy {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "two-stage" | "two_stage" | "2" => Ok(Self::TwoStage),
            "three-stage" | "three_stage" | "3" => Ok(Self::ThreeStage),
            other => Err(SimError::Config(format!(
                "unknown allocation strategy '{other}' (expected two-stage or three-stage)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::TwoStage => "two-stage",
            Self::ThreeStage => "three-stage",
        }
    }

    /// Physical block offset (`nbo`) at `position` in this strategy's
    /// allocation order. The order is a permutation of `[0, zone_capacity)`.
    pub fn nth(&self, geometry: &DiskGeometry, position: u64) -> Result<u64> {
        let zone_capacity = geometry.zone_capacity_blocks();
        if position >= zone_capacity {
            return Err(SimError::AddressIllegal {
                address: position,
                capacity: zone_capacity,
            });
        }
        let bottom = u64::from(geometry.blocks_per_bottom_track);
        let top = u64::from(geometry.blocks_per_top_track);
        let pair = geometry.track_pair_blocks();
        let bottom_tracks = u64::from(geometry.tracks_per_zone / 2);
        let bottom_total = bottom_tracks * bottom;

        // Stage 1 is shared: bottom tracks in physical order.
        if position < bottom_total {
            let track_pair = position / bottom;
            let block = position % bottom;
            return Ok(track_pair * pair + block);
        }

        let top_position = position - bottom_total;
        let top_index = match self {
            // Top tracks in physical order: top index k is physical track 2k+1.
            Self::TwoStage => top_position / top,
            Self::ThreeStage => {
                let stage2_tracks = bottom_tracks.div_ceil(2);
                let stage2_blocks = stage2_tracks * top;
                if top_position < stage2_blocks {
                    // Stage 2: top indices 0, 2, 4, ... (physical 1, 5, 9, ...).
                    (top_position / top) * 2
                } else {
                    // Stage 3: top indices 1, 3, 5, ... (physical 3, 7, 11, ...).
                    ((top_position - stage2_blocks) / top) * 2 + 1
                }
            }
        };
        let block = top_position % top;
        Ok(top_index * pair + bottom + block)
    }
}

/// Mapped/capacity counts for a zone or the whole device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneUtilization {
    pub mapped_blocks: u64,
    pub capacity_blocks: u64,
}

impl ZoneUtilization {
    pub fn fraction(&self) -> f64 {
        if self.capacity_blocks == 0 {
            0.0
        } else {
            self.mapped_blocks as f64 / self.capacity_blocks as f64
        }
    }
}

const UNMAPPED: u32 = u32::MAX;

/// One zone's forward/reverse maps plus its allocation cursor.
#[derive(Debug, Clone)]
struct ZoneMap {
    forward: Vec<u32>,
    reverse: Vec<u32>,
    cursor: u64,
    mapped: u64,
}

impl ZoneMap {
    fn new(capacity: usize) -> Self {
        Self {
            forward: vec![UNMAPPED; capacity],
            reverse: vec![UNMAPPED; capacity],
            cursor: 0,
            mapped: 0,
        }
    }
}

/// The device-wide mapping table: one lazily created map per zone.
#[derive(Debug, Clone)]
pub struct MappingTable {
    geometry: DiskGeometry,
    zones: Vec<Option<Box<ZoneMap>>>,
}

impl MappingTable {
    pub fn new(geometry: &DiskGeometry) -> Self {
        Self {
            geometry: geometry.clone(),
            zones: vec![None; geometry.zone_count as usize],
        }
    }

    fn check_zone(&self, zone_id: u32) -> Result<()> {
        if zone_id >= self.geometry.zone_count {
            return Err(SimError::InvalidTriple {
                zone_id,
                track_offset: 0,
                block_offset: 0,
            });
        }
        Ok(())
    }

    fn check_offset(&self, zone_id: u32, offset: u64) -> Result<()> {
        self.check_zone(zone_id)?;
        if offset >= self.geometry.zone_capacity_blocks() {
            return Err(SimError::AddressIllegal {
                address: offset,
                capacity: self.geometry.zone_capacity_blocks(),
            });
        }
        Ok(())
    }

    fn zone(&self, zone_id: u32) -> Option<&ZoneMap> {
        self.zones[zone_id as usize].as_deref()
    }

    fn zone_mut(&mut self, zone_id: u32) -> &mut ZoneMap {
        let capacity = self.geometry.zone_capacity_blocks() as usize;
        self.zones[zone_id as usize].get_or_insert_with(|| Box::new(ZoneMap::new(capacity)))
    }

    /// The physical offset mapped for `bo`, or `None` on a first write /
    /// unwritten read.
    pub fn lookup(&self, zone_id: u32, bo: u64) -> Result<Option<u64>> {
        self.check_offset(zone_id, bo)?;
        Ok(self.zone(zone_id).and_then(|z| {
            let nbo = z.forward[bo as usize];
            (nbo != UNMAPPED).then_some(u64::from(nbo))
        }))
    }

    /// Logical offset currently mapped to physical `nbo`, if any.
    pub fn reverse_lookup(&self, zone_id: u32, nbo: u64) -> Result<Option<u64>> {
        self.check_offset(zone_id, nbo)?;
        Ok(self.zone(zone_id).and_then(|z| {
            let bo = z.reverse[nbo as usize];
            (bo != UNMAPPED).then_some(u64::from(bo))
        }))
    }

    /// Whether physical block `nbo` holds mapped data.
    pub fn is_valid(&self, zone_id: u32, nbo: u64) -> Result<bool> {
        Ok(self.reverse_lookup(zone_id, nbo)?.is_some())
    }

    /// Hands out the next unallocated physical block in strategy order.
    ///
    /// The cursor skips positions that are already mapped, so switching the
    /// strategy mid-life (which resets cursors) leaves existing mappings
    /// untouched and simply re-derives the next free position.
    pub fn allocate(&mut self, zone_id: u32, strategy: AllocationStrategy) -> Result<u64> {
        self.check_zone(zone_id)?;
        let geometry = self.geometry.clone();
        let zone_capacity = geometry.zone_capacity_blocks();
        let zone = self.zone_mut(zone_id);
        if zone.mapped >= zone_capacity {
            return Err(SimError::ZoneFull { zone_id });
        }
        while zone.cursor < zone_capacity {
            let nbo = strategy.nth(&geometry, zone.cursor)?;
            zone.cursor += 1;
            if zone.reverse[nbo as usize] == UNMAPPED {
                return Ok(nbo);
            }
        }
        Err(SimError::ZoneFull { zone_id })
    }

    /// Records `bo -> nbo` in the forward map and its inverse in the reverse
    /// map. Binding an already-mapped offset on either side is a logic error.
    pub fn bind(&mut self, zone_id: u32, bo: u64, nbo: u64) -> Result<()> {
        self.check_offset(zone_id, bo)?;
        self.check_offset(zone_id, nbo)?;
        let zone = self.zone_mut(zone_id);
        if zone.forward[bo as usize] != UNMAPPED {
            return Err(SimError::Logic(format!(
                "zone {zone_id}: logical offset {bo} is already mapped"
            )));
        }
        if zone.reverse[nbo as usize] != UNMAPPED {
            return Err(SimError::Logic(format!(
                "zone {zone_id}: physical offset {nbo} is already bound"
            )));
        }
        zone.forward[bo as usize] = nbo as u32;
        zone.reverse[nbo as usize] = bo as u32;
        zone.mapped += 1;
        Ok(())
    }

    /// Resets every zone's allocation cursor; used when the allocation
    /// strategy changes so cursors re-derive against the new order.
    pub fn reset_cursors(&mut self) {
        for zone in self.zones.iter_mut().flatten() {
            zone.cursor = 0;
        }
    }

    pub fn zone_utilization(&self, zone_id: u32) -> Result<ZoneUtilization> {
        self.check_zone(zone_id)?;
        Ok(ZoneUtilization {
            mapped_blocks: self.zone(zone_id).map_or(0, |z| z.mapped),
            capacity_blocks: self.geometry.zone_capacity_blocks(),
        })
    }

    pub fn device_utilization(&self) -> ZoneUtilization {
        let mapped = self
            .zones
            .iter()
            .flatten()
            .map(|zone| zone.mapped)
            .sum::<u64>();
        ZoneUtilization {
            mapped_blocks: mapped,
            capacity_blocks: self.geometry.total_blocks(),
        }
    }

    pub fn mapped_blocks(&self) -> u64 {
        self.device_utilization().mapped_blocks
    }

    /// Iterates `(zone_id, cursor, [(bo, nbo)...])` over touched zones in
    /// zone order, entries in ascending `bo`. Used by checkpointing.
    pub fn snapshot_zones(&self) -> impl Iterator<Item = (u32, u64, Vec<(u64, u64)>)> + '_ {
        self.zones.iter().enumerate().filter_map(|(zone_id, zone)| {
            let zone = zone.as_deref()?;
            let entries = zone
                .forward
                .iter()
                .enumerate()
                .filter(|(_, &nbo)| nbo != UNMAPPED)
                .map(|(bo, &nbo)| (bo as u64, u64::from(nbo)))
                .collect();
            Some((zone_id as u32, zone.cursor, entries))
        })
    }

    /// Rebuilds a zone from checkpoint entries.
    pub fn restore_zone(&mut self, zone_id: u32, cursor: u64, entries: &[(u64, u64)]) -> Result<()> {
        self.check_zone(zone_id)?;
        for &(bo, nbo) in entries {
            self.bind(zone_id, bo, nbo)?;
        }
        self.zone_mut(zone_id).cursor = cursor;
        Ok(())
    }
}
