//! FAP placement, overlap-aware channel assignment and SON location exchange.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::num::Scalar;
use crate::radio_env::{rssi, FloorPlan, Point2D, PropagationParams};

/// Rejection-sampling budget per FAP.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 10_000;

pub type FapId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TopologyError {
    #[error("could not place FAP {index} after {attempts} attempts (min separation {min_separation} m)")]
    PlacementInfeasible {
        index: usize,
        attempts: usize,
        min_separation: f64,
    },
    #[error("duplicate FAP id {0}")]
    DuplicateId(FapId),
    #[error("FAP {0} lies outside the floor plan")]
    OutOfBounds(FapId),
    #[error("FAPs {0} and {1} are closer than the minimum separation")]
    TooClose(FapId, FapId),
    #[error("channel count must be >= 1")]
    NoChannels,
    #[error("FAP {id} uses channel {channel} but only {num_channels} are configured")]
    ChannelOutOfRange {
        id: FapId,
        channel: u16,
        num_channels: u16,
    },
}

/// Carrier frequency index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Channel(pub u16);

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Location knowledge one FAP holds about another.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborRecord<T> {
    pub fap_id: FapId,
    pub position: Point2D<T>,
    pub channel: Channel,
    /// 1 for direct neighbors, 2 when relayed by a direct neighbor.
    pub hops: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fap<T> {
    pub id: FapId,
    pub position: Point2D<T>,
    pub channel: Channel,
    pub tx_power: T,
    pub neighbor_table: Vec<NeighborRecord<T>>,
}

impl<T: Scalar> Fap<T> {
    pub fn new(id: FapId, position: Point2D<T>, tx_power: T) -> Self {
        Fap {
            id,
            position,
            channel: Channel(0),
            tx_power,
            neighbor_table: Vec::new(),
        }
    }

    pub fn knows(&self, id: FapId) -> Option<&NeighborRecord<T>> {
        self.neighbor_table.iter().find(|r| r.fap_id == id)
    }
}

/// A floor plan populated with FAPs.
#[derive(Debug, Clone, PartialEq)]
pub struct Deployment<T> {
    pub plan: FloorPlan<T>,
    pub faps: Vec<Fap<T>>,
    pub params: PropagationParams<T>,
    pub num_channels: u16,
    /// Set when coloring had to reuse a channel already held by a neighbor.
    pub channel_stressed: bool,
    index: BTreeMap<FapId, usize>,
}

impl<T: Scalar> Deployment<T> {
    pub fn new(
        plan: FloorPlan<T>,
        faps: Vec<Fap<T>>,
        params: PropagationParams<T>,
        num_channels: u16,
        min_separation: T,
    ) -> Result<Self, TopologyError> {
        if num_channels == 0 {
            return Err(TopologyError::NoChannels);
        }
        let mut index = BTreeMap::new();
        for (i, fap) in faps.iter().enumerate() {
            if index.insert(fap.id, i).is_some() {
                return Err(TopologyError::DuplicateId(fap.id));
            }
            if !plan.contains(&fap.position) {
                return Err(TopologyError::OutOfBounds(fap.id));
            }
            if fap.channel.0 >= num_channels {
                return Err(TopologyError::ChannelOutOfRange {
                    id: fap.id,
                    channel: fap.channel.0,
                    num_channels,
                });
            }
        }
        for (i, a) in faps.iter().enumerate() {
            for b in &faps[i + 1..] {
                if a.position.distance(&b.position) < min_separation {
                    return Err(TopologyError::TooClose(a.id, b.id));
                }
            }
        }
        Ok(Deployment {
            plan,
            faps,
            params,
            num_channels,
            channel_stressed: false,
            index,
        })
    }

    pub fn fap(&self, id: FapId) -> Option<&Fap<T>> {
        self.index.get(&id).map(|&i| &self.faps[i])
    }

    pub fn ids(&self) -> impl Iterator<Item = FapId> + '_ {
        self.faps.iter().map(|f| f.id)
    }

    /// RSSI of `fap` at `pos`, using the FAP's own transmit power.
    pub fn rssi_of(&self, fap: &Fap<T>, pos: Point2D<T>) -> T {
        rssi(
            fap.position,
            pos,
            &self.plan,
            &self.params.with_tx_power(fap.tx_power),
        )
    }

    pub fn apply_channels(&mut self, assignment: &ChannelAssignment) {
        for fap in &mut self.faps {
            if let Some(&ch) = assignment.channels.get(&fap.id) {
                fap.channel = ch;
            }
        }
        self.channel_stressed = assignment.stressed;
    }

    /// Colors the overlap graph and fills every neighbor table.
    pub fn plan_network(&mut self, s_t0: T, two_hop: bool) -> OverlapGraph {
        let graph = build_overlap_graph(self, s_t0);
        let assignment = assign_frequencies(&graph, self.num_channels);
        self.apply_channels(&assignment);
        exchange_locations(self, &graph, two_hop);
        graph
    }
}

/// Places `count` FAPs uniformly at random with a minimum pairwise spacing.
pub fn deploy<T: Scalar>(
    plan: &FloorPlan<T>,
    count: usize,
    min_separation: T,
    tx_power: T,
    rng_seed: u64,
) -> Result<Vec<Fap<T>>, TopologyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let (w, h) = (plan.width.as_f64(), plan.height.as_f64());
    let mut faps: Vec<Fap<T>> = Vec::with_capacity(count);
    for index in 0..count {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let candidate = Point2D::new(T::lit(rng.gen_range(0.0..=w)), T::lit(rng.gen_range(0.0..=h)));
            let candidate = plan.clamp(candidate);
            if faps
                .iter()
                .all(|f| f.position.distance(&candidate) >= min_separation)
            {
                faps.push(Fap::new(index, candidate, tx_power));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(TopologyError::PlacementInfeasible {
                index,
                attempts: MAX_PLACEMENT_ATTEMPTS,
                min_separation: min_separation.as_f64(),
            });
        }
    }
    Ok(faps)
}

/// Undirected overlap relation keyed by FAP id.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OverlapGraph {
    pub adjacency: BTreeMap<FapId, BTreeSet<FapId>>,
}

impl OverlapGraph {
    pub fn with_nodes(ids: impl IntoIterator<Item = FapId>) -> Self {
        OverlapGraph {
            adjacency: ids.into_iter().map(|id| (id, BTreeSet::new())).collect(),
        }
    }

    pub fn add_edge(&mut self, a: FapId, b: FapId) {
        if a == b {
            return;
        }
        self.adjacency.entry(a).or_default().insert(b);
        self.adjacency.entry(b).or_default().insert(a);
    }

    pub fn neighbors(&self, id: FapId) -> impl Iterator<Item = FapId> + '_ {
        self.adjacency.get(&id).into_iter().flatten().copied()
    }

    pub fn degree(&self, id: FapId) -> usize {
        self.adjacency.get(&id).map_or(0, BTreeSet::len)
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).max().unwrap_or(0)
    }

    pub fn contains_edge(&self, a: FapId, b: FapId) -> bool {
        self.adjacency.get(&a).is_some_and(|n| n.contains(&b))
    }

    pub fn edges(&self) -> impl Iterator<Item = (FapId, FapId)> + '_ {
        self.adjacency
            .iter()
            .flat_map(|(&a, n)| n.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }
}

/// Two FAPs overlap when either one hears the other at or above `s_t0`.
pub fn build_overlap_graph<T: Scalar>(dep: &Deployment<T>, s_t0: T) -> OverlapGraph {
    let mut graph = OverlapGraph::with_nodes(dep.ids());
    for (i, a) in dep.faps.iter().enumerate() {
        for b in &dep.faps[i + 1..] {
            if dep.rssi_of(a, b.position) >= s_t0 || dep.rssi_of(b, a.position) >= s_t0 {
                graph.add_edge(a.id, b.id);
            }
        }
    }
    graph
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChannelAssignment {
    pub channels: BTreeMap<FapId, Channel>,
    pub stressed: bool,
}

/// Greedy coloring: nodes by descending degree (ties by ascending id), each
/// takes the lowest channel free among already-colored neighbors. When none is
/// free the channel least used by those neighbors is reused and the result is
/// flagged as stressed.
pub fn assign_frequencies(graph: &OverlapGraph, num_channels: u16) -> ChannelAssignment {
    let num_channels = num_channels.max(1) as usize;
    let mut order: Vec<FapId> = graph.adjacency.keys().copied().collect();
    order.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));

    let mut result = ChannelAssignment::default();
    for id in order {
        let mut usage = vec![0usize; num_channels];
        for n in graph.neighbors(id) {
            if let Some(ch) = result.channels.get(&n) {
                usage[ch.0 as usize] += 1;
            }
        }
        let chosen = match usage.iter().position(|&u| u == 0) {
            Some(free) => free,
            None => {
                result.stressed = true;
                usage
                    .iter()
                    .enumerate()
                    .min_by_key(|&(i, &u)| (u, i))
                    .map(|(i, _)| i)
                    .unwrap_or(0)
            }
        };
        result.channels.insert(id, Channel(chosen as u16));
    }
    result
}

/// Fills each FAP's neighbor table from the overlap graph. Direct neighbors
/// are recorded at one hop; with `two_hop`, their neighbors are relayed at two.
pub fn exchange_locations<T: Scalar>(dep: &mut Deployment<T>, graph: &OverlapGraph, two_hop: bool) {
    let snapshot: BTreeMap<FapId, (Point2D<T>, Channel)> = dep
        .faps
        .iter()
        .map(|f| (f.id, (f.position, f.channel)))
        .collect();

    for fap in &mut dep.faps {
        let mut hops: BTreeMap<FapId, u8> = BTreeMap::new();
        for n in graph.neighbors(fap.id) {
            hops.insert(n, 1);
        }
        if two_hop {
            for n in graph.neighbors(fap.id) {
                for nn in graph.neighbors(n) {
                    if nn != fap.id {
                        hops.entry(nn).or_insert(2);
                    }
                }
            }
        }
        let mut table: Vec<NeighborRecord<T>> = hops
            .into_iter()
            .filter_map(|(id, h)| {
                snapshot.get(&id).map(|&(position, channel)| NeighborRecord {
                    fap_id: id,
                    position,
                    channel,
                    hops: h,
                })
            })
            .collect();
        table.sort_by_key(|r| (r.hops, r.fap_id));
        fap.neighbor_table = table;
    }
}
