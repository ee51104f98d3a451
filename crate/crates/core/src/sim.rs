//! Mobility, handover detection and per-scheme miss/list-size accounting.
//!
//! The MS follows a random-waypoint walk. Once the serving RSSI drops below
//! `serving_drop` the handover is armed and every scheme's neighbor list is
//! built at that position. The lists are held until the handover executes
//! (a FAP clears `s_t1` and beats serving by `hysteresis`) or the serving
//! signal recovers. A scheme misses when the executed target is absent from
//! the list it prepared.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ncl::{build_ncl_baseline, build_ncl_proposed, NclError, NeighborCellList, ThresholdConfig};
use crate::num::Scalar;
use crate::radio_env::{FloorPlan, Point2D, PropagationParams};
use crate::topology::{deploy, Deployment, Fap, FapId, TopologyError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Ncl(#[from] NclError),
    #[error("mobility budget of {steps} steps exhausted after {events} of {requested} events")]
    EventBudgetUnreached { steps: u64, events: u64, requested: u64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("speed must be > 0 m/s, got {0}")]
    BadSpeed(f64),
    #[error("time step must be > 0 s, got {0}")]
    BadTimeStep(f64),
    #[error("waypoint pause must be >= 0 s, got {0}")]
    BadPause(f64),
    #[error("hysteresis must be >= 0 dB, got {0}")]
    BadHysteresis(f64),
    #[error("serving drop threshold is not finite")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    BaselineT0,
    BaselineT1,
    Proposed,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::BaselineT0, Scheme::BaselineT1, Scheme::Proposed];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::BaselineT0 => "baseline-t0",
            Scheme::BaselineT1 => "baseline-t1",
            Scheme::Proposed => "proposed",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scheme '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityConfig<T> {
    /// m/s
    pub speed: T,
    /// Dwell time at each waypoint, s.
    pub waypoint_pause: T,
    pub time_step: T,
}

impl<T: Scalar> MobilityConfig<T> {
    pub fn new(speed: T, waypoint_pause: T, time_step: T) -> Result<Self, ConfigError> {
        if !(speed > T::zero()) || !speed.is_finite() {
            return Err(ConfigError::BadSpeed(speed.as_f64()));
        }
        if !(time_step > T::zero()) || !time_step.is_finite() {
            return Err(ConfigError::BadTimeStep(time_step.as_f64()));
        }
        if !(waypoint_pause >= T::zero()) || !waypoint_pause.is_finite() {
            return Err(ConfigError::BadPause(waypoint_pause.as_f64()));
        }
        Ok(MobilityConfig {
            speed,
            waypoint_pause,
            time_step,
        })
    }
}

impl<T: Scalar> Default for MobilityConfig<T> {
    fn default() -> Self {
        MobilityConfig {
            speed: T::lit(1.0),
            waypoint_pause: T::zero(),
            time_step: T::lit(0.5),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriggerConfig<T> {
    /// Serving RSSI below this arms a handover, dBm.
    pub serving_drop: T,
    /// Margin a candidate must exceed the serving RSSI by, dB.
    pub hysteresis: T,
}

impl<T: Scalar> TriggerConfig<T> {
    pub fn new(serving_drop: T, hysteresis: T) -> Result<Self, ConfigError> {
        if !serving_drop.is_finite() {
            return Err(ConfigError::NonFinite);
        }
        if !(hysteresis >= T::zero()) || !hysteresis.is_finite() {
            return Err(ConfigError::BadHysteresis(hysteresis.as_f64()));
        }
        Ok(TriggerConfig {
            serving_drop,
            hysteresis,
        })
    }
}

impl<T: Scalar> Default for TriggerConfig<T> {
    fn default() -> Self {
        TriggerConfig {
            serving_drop: T::lit(-60.0),
            hysteresis: T::lit(3.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityState<T> {
    pub position: Point2D<T>,
    pub waypoint: Point2D<T>,
    pub pause_remaining: T,
}

fn uniform_point<T: Scalar, R: Rng>(plan: &FloorPlan<T>, rng: &mut R) -> Point2D<T> {
    let x = rng.gen_range(0.0..=plan.width.as_f64());
    let y = rng.gen_range(0.0..=plan.height.as_f64());
    plan.clamp(Point2D::new(T::lit(x), T::lit(y)))
}

impl<T: Scalar> MobilityState<T> {
    pub fn random<R: Rng>(plan: &FloorPlan<T>, rng: &mut R) -> Self {
        let position = uniform_point(plan, rng);
        let waypoint = uniform_point(plan, rng);
        MobilityState {
            position,
            waypoint,
            pause_remaining: T::zero(),
        }
    }
}

/// Advances the random-waypoint walk by one time step.
pub fn step_mobility<T: Scalar, R: Rng>(
    state: MobilityState<T>,
    cfg: &MobilityConfig<T>,
    plan: &FloorPlan<T>,
    rng: &mut R,
) -> MobilityState<T> {
    let mut next = state;
    if state.pause_remaining > T::zero() {
        next.pause_remaining = state.pause_remaining - cfg.time_step;
        if next.pause_remaining <= T::zero() {
            next.pause_remaining = T::zero();
            next.waypoint = uniform_point(plan, rng);
        }
        return next;
    }

    let reach = cfg.speed * cfg.time_step;
    let remaining = state.position.distance(&state.waypoint);
    if remaining <= reach {
        next.position = state.waypoint;
        if cfg.waypoint_pause > T::zero() {
            next.pause_remaining = cfg.waypoint_pause;
        } else {
            next.waypoint = uniform_point(plan, rng);
        }
    } else {
        let moved = state.position.lerp(&state.waypoint, reach / remaining);
        next.position = plan.clamp(moved);
    }
    next
}

/// Strongest FAP at `pos`, ties by ascending id.
pub fn strongest_fap<T: Scalar>(dep: &Deployment<T>, pos: Point2D<T>) -> Option<(FapId, T)> {
    best_of(dep, pos, dep.faps.iter())
}

fn best_of<'d, T: Scalar>(
    dep: &Deployment<T>,
    pos: Point2D<T>,
    faps: impl Iterator<Item = &'d Fap<T>>,
) -> Option<(FapId, T)> {
    let mut best: Option<(FapId, T)> = None;
    for f in faps {
        let r = dep.rssi_of(f, pos);
        match best {
            Some((id, b)) if b > r || (b == r && id < f.id) => {}
            _ => best = Some((f.id, r)),
        }
    }
    best
}

/// Femto-to-femto handover target at `ms_pos`, if the handover fires.
pub fn detect_trigger<T: Scalar>(
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    trig: &TriggerConfig<T>,
    cfg: &ThresholdConfig<T>,
) -> Result<Option<FapId>, NclError> {
    let serving = dep.fap(serving_id).ok_or(NclError::UnknownServingFap(serving_id))?;
    let serving_rssi = dep.rssi_of(serving, ms_pos);
    if !(serving_rssi < trig.serving_drop) {
        return Ok(None);
    }
    let best = best_of(dep, ms_pos, dep.faps.iter().filter(|f| f.id != serving_id));
    Ok(best
        .filter(|&(_, r)| r >= cfg.s_t1 && r >= serving_rssi + trig.hysteresis)
        .map(|(id, _)| id))
}

pub fn build_list<T: Scalar>(
    scheme: Scheme,
    ms_pos: Point2D<T>,
    dep: &Deployment<T>,
    serving_id: FapId,
    cfg: &ThresholdConfig<T>,
) -> Result<NeighborCellList<T>, NclError> {
    match scheme {
        Scheme::Proposed => build_ncl_proposed(ms_pos, dep, serving_id, cfg),
        Scheme::BaselineT0 => build_ncl_baseline(ms_pos, dep, serving_id, cfg.s_t0),
        Scheme::BaselineT1 => build_ncl_baseline(ms_pos, dep, serving_id, cfg.s_t1),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HandoverEvent<T> {
    /// Where the handover executed.
    pub ms_pos: Point2D<T>,
    /// Where the handover armed and the lists were built.
    pub list_pos: Point2D<T>,
    pub serving_id: FapId,
    pub target_id: FapId,
    pub lists: BTreeMap<Scheme, NeighborCellList<T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EventOutcome {
    pub miss: bool,
    pub list_size: usize,
}

pub fn evaluate_event<T: Scalar>(event: &HandoverEvent<T>) -> BTreeMap<Scheme, EventOutcome> {
    event
        .lists
        .iter()
        .map(|(&scheme, list)| {
            let outcome = EventOutcome {
                miss: !list.contains(event.target_id),
                list_size: list.len(),
            };
            (scheme, outcome)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SchemeStats {
    pub events: u64,
    pub misses: u64,
    pub total_list_size: u64,
    pub max_list_size: u64,
}

impl SchemeStats {
    pub fn record(&mut self, outcome: EventOutcome) {
        self.events += 1;
        self.misses += u64::from(outcome.miss);
        self.total_list_size += outcome.list_size as u64;
        self.max_list_size = self.max_list_size.max(outcome.list_size as u64);
    }

    /// Zero when no events were recorded.
    pub fn miss_probability(&self) -> f64 {
        if self.events == 0 {
            0.0
        } else {
            self.misses as f64 / self.events as f64
        }
    }

    pub fn mean_list_size(&self) -> f64 {
        if self.events == 0 {
            0.0
        } else {
            self.total_list_size as f64 / self.events as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub seed: u64,
    pub requested_events: u64,
    pub steps: u64,
    pub stats: BTreeMap<Scheme, SchemeStats>,
    /// FAP channel counts could not avoid reuse between overlapping cells.
    pub channel_stressed: bool,
}

impl ScenarioResult {
    pub fn events(&self) -> u64 {
        self.stats.values().map(|s| s.events).next().unwrap_or(0)
    }

    pub fn budget_reached(&self) -> bool {
        self.events() >= self.requested_events
    }

    pub fn require_complete(&self) -> Result<(), SimError> {
        if self.budget_reached() {
            Ok(())
        } else {
            Err(SimError::EventBudgetUnreached {
                steps: self.steps,
                events: self.events(),
                requested: self.requested_events,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FapPlacement<T> {
    Random { count: usize },
    Explicit(Vec<Point2D<T>>),
}

/// Everything needed to reproduce a run apart from the seed and event budget.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig<T> {
    pub plan: FloorPlan<T>,
    pub placement: FapPlacement<T>,
    pub min_separation: T,
    /// Carries the FAP transmit power.
    pub params: PropagationParams<T>,
    pub thresholds: ThresholdConfig<T>,
    pub trigger: TriggerConfig<T>,
    pub mobility: MobilityConfig<T>,
    pub num_channels: u16,
    pub two_hop: bool,
    pub schemes: Vec<Scheme>,
    pub max_steps: u64,
}

impl<T: Scalar> SimConfig<T> {
    pub fn new(plan: FloorPlan<T>, placement: FapPlacement<T>) -> Self {
        SimConfig {
            plan,
            placement,
            min_separation: T::lit(3.0),
            params: PropagationParams::default(),
            thresholds: ThresholdConfig::default(),
            trigger: TriggerConfig::default(),
            mobility: MobilityConfig::default(),
            num_channels: 4,
            two_hop: true,
            schemes: Scheme::ALL.to_vec(),
            max_steps: 10_000_000,
        }
    }

    /// Places FAPs, assigns channels and exchanges neighbor tables.
    pub fn build_deployment(&self, seed: u64) -> Result<Deployment<T>, SimError> {
        let tx = self.params.tx_power;
        let faps = match &self.placement {
            FapPlacement::Random { count } => deploy(&self.plan, *count, self.min_separation, tx, seed)?,
            FapPlacement::Explicit(points) => points
                .iter()
                .enumerate()
                .map(|(i, &pos)| Fap::new(i, pos, tx))
                .collect(),
        };
        let mut dep = Deployment::new(
            self.plan.clone(),
            faps,
            self.params,
            self.num_channels,
            self.min_separation,
        )?;
        dep.plan_network(self.thresholds.s_t0, self.two_hop);
        Ok(dep)
    }
}

/// Stream used for mobility so it never shares draws with FAP placement.
const MOBILITY_STREAM: u64 = 1;

pub fn run_scenario<T: Scalar>(cfg: &SimConfig<T>, seed: u64, n_events: u64) -> Result<ScenarioResult, SimError> {
    run_scenario_observed(cfg, seed, n_events, |_, _, _| {})
}

/// Like [`run_scenario`], calling `observer` after every handover event.
pub fn run_scenario_observed<T, F>(
    cfg: &SimConfig<T>,
    seed: u64,
    n_events: u64,
    mut observer: F,
) -> Result<ScenarioResult, SimError>
where
    T: Scalar,
    F: FnMut(&Deployment<T>, &HandoverEvent<T>, &BTreeMap<Scheme, EventOutcome>),
{
    let dep = cfg.build_deployment(seed)?;
    let mut result = ScenarioResult {
        seed,
        requested_events: n_events,
        steps: 0,
        stats: cfg.schemes.iter().map(|&s| (s, SchemeStats::default())).collect(),
        channel_stressed: dep.channel_stressed,
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(MOBILITY_STREAM);
    let mut state = MobilityState::random(&cfg.plan, &mut rng);
    let Some((mut serving_id, _)) = strongest_fap(&dep, state.position) else {
        return Ok(result);
    };

    let mut armed: Option<(Point2D<T>, BTreeMap<Scheme, NeighborCellList<T>>)> = None;
    let mut events = 0u64;
    while events < n_events && result.steps < cfg.max_steps {
        let pos = state.position;
        let serving_rssi = dep.rssi_of(dep.fap(serving_id).expect("serving exists"), pos);
        if serving_rssi < cfg.trigger.serving_drop {
            if armed.is_none() {
                let lists = cfg
                    .schemes
                    .iter()
                    .map(|&s| Ok((s, build_list(s, pos, &dep, serving_id, &cfg.thresholds)?)))
                    .collect::<Result<_, NclError>>()?;
                armed = Some((pos, lists));
            }
            if let Some(target_id) = detect_trigger(pos, &dep, serving_id, &cfg.trigger, &cfg.thresholds)? {
                let (list_pos, lists) = armed.take().expect("armed before trigger");
                let event = HandoverEvent {
                    ms_pos: pos,
                    list_pos,
                    serving_id,
                    target_id,
                    lists,
                };
                let outcomes = evaluate_event(&event);
                for (scheme, outcome) in &outcomes {
                    if let Some(stats) = result.stats.get_mut(scheme) {
                        stats.record(*outcome);
                    }
                }
                observer(&dep, &event, &outcomes);
                events += 1;
                serving_id = target_id;
            }
        } else {
            armed = None;
        }
        state = step_mobility(state, &cfg.mobility, &cfg.plan, &mut rng);
        result.steps += 1;
    }
    Ok(result)
}
