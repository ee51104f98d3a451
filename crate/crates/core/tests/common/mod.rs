#![allow(dead_code)]

use femto_ncl::ncl::ThresholdConfig;
use femto_ncl::radio_env::{FloorPlan, Point2D, PropagationParams, WallSegment};
use femto_ncl::sim::{FapPlacement, SimConfig, TriggerConfig};
use femto_ncl::topology::{deploy, Channel, Deployment, Fap, OverlapGraph};
use rand::Rng;

pub fn p(x: f64, y: f64) -> Point2D<f64> {
    Point2D::new(x, y)
}

pub fn random_point<R: Rng>(rng: &mut R, plan: &FloorPlan<f64>) -> Point2D<f64> {
    p(rng.gen_range(0.0..=plan.width), rng.gen_range(0.0..=plan.height))
}

pub fn random_plan<R: Rng>(rng: &mut R, max_walls: usize) -> FloorPlan<f64> {
    let width = rng.gen_range(15.0..60.0);
    let height = rng.gen_range(15.0..60.0);
    let shell = FloorPlan::new(width, height, vec![]).unwrap();
    let n = rng.gen_range(0..=max_walls);
    let walls = (0..n)
        .map(|_| {
            let a = random_point(rng, &shell);
            let b = random_point(rng, &shell);
            WallSegment::new(a, b, rng.gen_range(0.0..25.0)).unwrap()
        })
        .collect();
    FloorPlan::new(width, height, walls).unwrap()
}

pub fn random_thresholds<R: Rng>(rng: &mut R) -> ThresholdConfig<f64> {
    let s_t0 = rng.gen_range(-95.0..-70.0);
    let s_t1 = s_t0 + rng.gen_range(0.0..20.0);
    ThresholdConfig::new(s_t0, s_t1, rng.gen_range(0.0..20.0), rng.gen_bool(0.5)).unwrap()
}

/// Random planned deployment: placed, colored and with neighbor tables filled.
pub fn random_deployment<R: Rng>(rng: &mut R, max_faps: usize, num_channels: Option<u16>) -> (Deployment<f64>, ThresholdConfig<f64>) {
    let plan = random_plan(rng, 12);
    let cfg = random_thresholds(rng);
    let count = rng.gen_range(2..=max_faps);
    let faps = deploy(&plan, count, 1.0, rng.gen_range(5.0..20.0), rng.gen()).unwrap();
    let params = PropagationParams::new(10.0, 37.0, rng.gen_range(2.5..4.0), 0.5).unwrap();
    let mut dep = Deployment::new(plan, faps, params, 1, 1.0).unwrap();
    let channels = num_channels.unwrap_or_else(|| rng.gen_range(1..=6));
    dep.num_channels = channels;
    dep.plan_network(cfg.s_t0, rng.gen_bool(0.8));
    (dep, cfg)
}

/// Planned deployment whose channel count is the overlap graph's max degree + 1.
pub fn properly_colored<R: Rng>(rng: &mut R, max_faps: usize) -> (Deployment<f64>, ThresholdConfig<f64>, OverlapGraph) {
    let (mut dep, cfg) = random_deployment(rng, max_faps, Some(1));
    let graph = femto_ncl::topology::build_overlap_graph(&dep, cfg.s_t0);
    dep.num_channels = graph.max_degree() as u16 + 1;
    let g = dep.plan_network(cfg.s_t0, true);
    assert_eq!(g, graph);
    (dep, cfg, graph)
}

/// Crossing oracle: samples the path densely, finds each sign change of the
/// wall's side test and checks the interpolated crossing lies on the wall.
pub fn sampled_crossings(a: Point2D<f64>, b: Point2D<f64>, plan: &FloorPlan<f64>, samples: usize) -> Vec<usize> {
    let side = |w: &WallSegment<f64>, q: Point2D<f64>| {
        (w.b.x - w.a.x) * (q.y - w.a.y) - (w.b.y - w.a.y) * (q.x - w.a.x)
    };
    let mut hits = Vec::new();
    for (idx, w) in plan.walls.iter().enumerate() {
        let mut prev: Option<(Point2D<f64>, f64)> = None;
        for k in 0..=samples {
            let t = k as f64 / samples as f64;
            let q = p(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t);
            let s = side(w, q);
            if let Some((pq, ps)) = prev {
                if (ps > 0.0 && s < 0.0) || (ps < 0.0 && s > 0.0) {
                    let f = ps / (ps - s);
                    let x = p(pq.x + (q.x - pq.x) * f, pq.y + (q.y - pq.y) * f);
                    let (dx, dy) = (w.b.x - w.a.x, w.b.y - w.a.y);
                    let along = ((x.x - w.a.x) * dx + (x.y - w.a.y) * dy) / (dx * dx + dy * dy);
                    if (-1e-9..=1.0 + 1e-9).contains(&along) {
                        hits.push(idx);
                    }
                    break;
                }
            }
            if s != 0.0 {
                prev = Some((q, s));
            }
        }
    }
    hits
}

/// Office floor: 60 x 40 m, two rows of rooms off a central corridor, 22 walls
/// of 10 to 20 dB with door gaps.
pub fn office_plan() -> FloorPlan<f64> {
    let mut walls = Vec::new();
    let mut k = 0u32;
    let mut att = || {
        k += 1;
        10.0 + f64::from((k * 7) % 11)
    };
    for i in 1..6 {
        let x = 10.0 * f64::from(i);
        walls.push(WallSegment::new(p(x, 0.0), p(x, 15.0), att()).unwrap());
        walls.push(WallSegment::new(p(x, 25.0), p(x, 40.0), att()).unwrap());
    }
    for i in 0..6 {
        let x0 = 10.0 * f64::from(i);
        walls.push(WallSegment::new(p(x0, 15.0), p(x0 + 8.0, 15.0), att()).unwrap());
        walls.push(WallSegment::new(p(x0 + 2.0, 25.0), p(x0 + 10.0, 25.0), att()).unwrap());
    }
    FloorPlan::new(60.0, 40.0, walls).unwrap()
}

pub fn office_config() -> SimConfig<f64> {
    let mut cfg = SimConfig::new(office_plan(), FapPlacement::Random { count: 50 });
    cfg.thresholds = ThresholdConfig::new(-90.0, -70.0, 15.0, true).unwrap();
    cfg.trigger = TriggerConfig::new(-60.0, 3.0).unwrap();
    cfg.num_channels = 4;
    cfg
}

pub const TWO_ROOM_WALL_X: f64 = 20.0;
pub const TWO_ROOM_DOOR_Y: f64 = 16.0;
pub const TWO_ROOM_WALL_DB: f64 = 20.0;

/// Two rooms split by a 20 dB wall along x = 20 with a doorway above y = 16.
/// Serving FAP 0, FAPs 2, 3 and 8 share the left room with the MS, FAP 1
/// sits behind the wall, FAPs 4 and 5 are far away in the right room.
pub fn two_room() -> Deployment<f64> {
    let wall = WallSegment::new(p(TWO_ROOM_WALL_X, 0.0), p(TWO_ROOM_WALL_X, TWO_ROOM_DOOR_Y), TWO_ROOM_WALL_DB).unwrap();
    let plan = FloorPlan::new(40.0, 20.0, vec![wall]).unwrap();
    let sites = [
        (0, 4.0, 8.0),
        (1, 28.0, 6.0),
        (2, 20.5, 18.5),
        (3, 12.0, 3.0),
        (8, 10.0, 15.0),
        (4, 36.0, 3.0),
        (5, 36.0, 18.0),
    ];
    let faps = sites.iter().map(|&(id, x, y)| Fap::new(id, p(x, y), 10.0)).collect();
    Deployment::new(plan, faps, PropagationParams::new(10.0, 37.0, 3.0, 0.5).unwrap(), 6, 3.0).unwrap()
}

pub fn two_room_thresholds() -> ThresholdConfig<f64> {
    ThresholdConfig::new(-80.0, -70.0, 15.0, true).unwrap()
}

/// Independent RSSI for the two-room fixture: log-distance plus the single
/// wall, crossed iff the straight path meets x = 20 below the doorway.
pub fn two_room_rssi(fap: Point2D<f64>, ms: Point2D<f64>) -> f64 {
    let d = ((fap.x - ms.x).powi(2) + (fap.y - ms.y).powi(2)).sqrt().max(0.5);
    let mut loss = 37.0 + 30.0 * d.log10();
    let (lo, hi) = if fap.x < ms.x { (fap, ms) } else { (ms, fap) };
    if lo.x < TWO_ROOM_WALL_X && hi.x > TWO_ROOM_WALL_X {
        let t = (TWO_ROOM_WALL_X - lo.x) / (hi.x - lo.x);
        let y = lo.y + (hi.y - lo.y) * t;
        if y <= TWO_ROOM_DOOR_Y {
            loss += TWO_ROOM_WALL_DB;
        }
    }
    10.0 - loss
}

pub fn channel_of(dep: &Deployment<f64>, id: usize) -> Channel {
    dep.fap(id).unwrap().channel
}
