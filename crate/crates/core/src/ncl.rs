//! Neighbor cell list construction.
//!
//! The proposed list is assembled in three stages around the MS position:
//!
//! * `A`: every non-serving FAP heard at or above the detection floor `s_t0`.
//! * `B`: the subset of `A` heard at or above the selection threshold `s_t1`.
//! * `C`: members of `B` on the serving FAP's own channel. Overlapping cells
//!   never share a channel, so these are distant reuse cells.
//!
//! `B \ C` forms the RSSI-qualified part of the list. FAPs the serving cell
//! knows about through its neighbor table, that sit within `d_hidden` of the
//! MS but are either weak (below `s_t1`) or co-channel, are appended as hidden
//! candidates.
//!
//! The RSSI-only baselines simply keep every FAP above one threshold.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use thiserror::Error;

use crate::num::Scalar;
use crate::radio_env::Point2D;
use crate::topology::{Channel, Deployment, Fap, FapId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NclError {
    #[error("serving FAP {0} is not part of the deployment")]
    UnknownServingFap(FapId),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("selection threshold s_t1 ({s_t1} dBm) is below detection threshold s_t0 ({s_t0} dBm)")]
    SelectionBelowDetection { s_t0: f64, s_t1: f64 },
    #[error("hidden-candidate distance must be >= 0, got {0}")]
    NegativeHiddenDistance(f64),
    #[error("threshold value is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig<T> {
    /// Detection floor, dBm.
    pub s_t0: T,
    /// Selection threshold, dBm.
    pub s_t1: T,
    /// Maximum MS-to-FAP distance for hidden candidates, meters.
    pub d_hidden: T,
    pub hidden_allows_cochannel: bool,
}

impl<T: Scalar> ThresholdConfig<T> {
    pub fn new(s_t0: T, s_t1: T, d_hidden: T, hidden_allows_cochannel: bool) -> Result<Self, ThresholdError> {
        if !s_t0.is_finite() || !s_t1.is_finite() || d_hidden.is_nan() {
            return Err(ThresholdError::NonFinite);
        }
        if s_t1 < s_t0 {
            return Err(ThresholdError::SelectionBelowDetection {
                s_t0: s_t0.as_f64(),
                s_t1: s_t1.as_f64(),
            });
        }
        if d_hidden < T::zero() {
            return Err(ThresholdError::NegativeHiddenDistance(d_hidden.as_f64()));
        }
        Ok(ThresholdConfig {
            s_t0,
            s_t1,
            d_hidden,
            hidden_allows_cochannel,
        })
    }
}

impl<T: Scalar> Default for ThresholdConfig<T> {
    fn default() -> Self {
        ThresholdConfig {
            s_t0: T::lit(-90.0),
            s_t1: T::lit(-70.0),
            d_hidden: T::lit(15.0),
            hidden_allows_cochannel: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InclusionReason {
    RssiQualified,
    HiddenLocation,
}

impl InclusionReason {
    pub fn as_str(self) -> &'static str {
        match self {
            InclusionReason::RssiQualified => "rssi_qualified",
            InclusionReason::HiddenLocation => "hidden_location",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateEntry<T> {
    pub fap_id: FapId,
    pub rssi: T,
    pub channel: Channel,
    pub reason: InclusionReason,
    /// Hop count of the location record that justified a hidden entry; 0 otherwise.
    pub hops: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeighborCellList<T> {
    pub serving_fap_id: FapId,
    /// Strongest first, ties by ascending id.
    pub entries: Vec<CandidateEntry<T>>,
}

impl<T: Scalar> NeighborCellList<T> {
    /// Builds a list from unordered entries, dropping duplicates (first wins)
    /// and the serving FAP.
    pub fn from_entries(serving_fap_id: FapId, entries: impl IntoIterator<Item = CandidateEntry<T>>) -> Self {
        let mut seen = BTreeSet::new();
        let mut entries: Vec<_> = entries
            .into_iter()
            .filter(|e| e.fap_id != serving_fap_id && seen.insert(e.fap_id))
            .collect();
        entries.sort_by(|a, b| {
            b.rssi
                .partial_cmp(&a.rssi)
                .unwrap_or(Ordering::Equal)
                .then(a.fap_id.cmp(&b.fap_id))
        });
        NeighborCellList {
            serving_fap_id,
            entries,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: FapId) -> bool {
        self.entries.iter().any(|e| e.fap_id == id)
    }

    pub fn get(&self, id: FapId) -> Option<&CandidateEntry<T>> {
        self.entries.iter().find(|e| e.fap_id == id)
    }

    pub fn ids(&self) -> BTreeSet<FapId> {
        self.entries.iter().map(|e| e.fap_id).collect()
    }

    pub fn ids_with(&self, reason: InclusionReason) -> BTreeSet<FapId> {
        self.entries
            .iter()
            .filter(|e| e.reason == reason)
            .map(|e| e.fap_id)
            .collect()
    }
}

fn serving<T: Scalar>(dep: &Deployment<T>, serving_id: FapId) -> Result<&Fap<T>, NclError> {
    dep.fap(serving_id).ok_or(NclError::UnknownServingFap(serving_id))
}

fn heard_at<T: Scalar>(ms_pos: Point2D<T>, dep: &Deployment<T>, serving_id: FapId, floor: T) -> BTreeSet<FapId> {
    dep.faps
        .iter()
        .filter(|f| f.id != serving_id && dep.rssi_of(f, ms_pos) >= floor)
        .map(|f| f.id)
        .collect()
}

/// Non-serving FAPs detectable at the MS (RSSI >= `s_t0`).
pub fn set_a<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
) -> Result<BTreeSet<FapId>, NclError> {
    serving(dep, serving_id)?;
    Ok(heard_at(ms_pos, dep, serving_id, cfg.s_t0))
}

/// Non-serving FAPs at or above the selection threshold `s_t1`.
pub fn set_b<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
) -> Result<BTreeSet<FapId>, NclError> {
    serving(dep, serving_id)?;
    Ok(heard_at(ms_pos, dep, serving_id, cfg.s_t1))
}

/// Members of `b` sharing the serving FAP's channel.
pub fn set_c<T: Scalar>(b: &BTreeSet<FapId>, dep: &Deployment<T>, serving_id: FapId) -> BTreeSet<FapId> {
    let Some(serving) = dep.fap(serving_id) else {
        return BTreeSet::new();
    };
    b.iter()
        .copied()
        .filter(|&k| dep.fap(k).is_some_and(|f| f.channel == serving.channel))
        .collect()
}

/// FAPs known to the serving cell by location that the RSSI stage did not pick.
pub fn hidden_candidates<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
    already: &BTreeSet<FapId>,
) -> BTreeSet<FapId> {
    hidden_records(ms_pos, dep, serving_id, cfg, already)
        .into_iter()
        .map(|(f, _)| f.id)
        .collect()
}

fn hidden_records<'d, T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &'d Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
    already: &BTreeSet<FapId>,
) -> Vec<(&'d Fap<T>, u8)> {
    let Some(serving) = dep.fap(serving_id) else {
        return Vec::new();
    };
    serving
        .neighbor_table
        .iter()
        .filter(|r| r.fap_id != serving_id && !already.contains(&r.fap_id))
        .filter_map(|r| dep.fap(r.fap_id).map(|f| (f, r.hops)))
        .filter(|(f, _)| ms_pos.distance(&f.position) <= cfg.d_hidden)
        .filter(|(f, _)| {
            let cochannel = f.channel == serving.channel;
            let second_category = dep.rssi_of(f, ms_pos) < cfg.s_t1 || cochannel;
            second_category && (cfg.hidden_allows_cochannel || !cochannel)
        })
        .collect()
}

/// RSSI-qualified entries `B \ C` plus hidden location-based candidates.
pub fn build_ncl_proposed<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
) -> Result<NeighborCellList<T>, NclError> {
    let b = set_b(ms_pos, dep, serving_id, cfg)?;
    let c = set_c(&b, dep, serving_id);
    let qualified: BTreeSet<FapId> = b.difference(&c).copied().collect();

    let mut entries: Vec<CandidateEntry<T>> = qualified
        .iter()
        .filter_map(|&id| dep.fap(id))
        .map(|f| CandidateEntry {
            fap_id: f.id,
            rssi: dep.rssi_of(f, ms_pos),
            channel: f.channel,
            reason: InclusionReason::RssiQualified,
            hops: 0,
        })
        .collect();
    entries.extend(
        hidden_records(ms_pos, dep, serving_id, cfg, &qualified)
            .into_iter()
            .map(|(f, hops)| CandidateEntry {
                fap_id: f.id,
                rssi: dep.rssi_of(f, ms_pos),
                channel: f.channel,
                reason: InclusionReason::HiddenLocation,
                hops,
            }),
    );
    Ok(NeighborCellList::from_entries(serving_id, entries))
}

/// Every non-serving FAP at or above `threshold`, no frequency or location logic.
pub fn build_ncl_baseline<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    threshold: T,
) -> Result<NeighborCellList<T>, NclError> {
    serving(dep, serving_id)?;
    let entries = dep.faps.iter().filter(|f| f.id != serving_id).filter_map(|f| {
        let rssi = dep.rssi_of(f, ms_pos);
        (rssi >= threshold).then_some(CandidateEntry {
            fap_id: f.id,
            rssi,
            channel: f.channel,
            reason: InclusionReason::RssiQualified,
            hops: 0,
        })
    });
    Ok(NeighborCellList::from_entries(serving_id, entries))
}
