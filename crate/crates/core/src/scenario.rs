//! Line-oriented scenario files.
//!
//! ```text
//! # comments start with '#'
//! scenario.name = two-room
//! plan.width = 40
//! plan.height = 20
//! wall = 20 0 20 20 20        # x1 y1 x2 y2 attenuation_db, repeatable
//! fap = 5 10                  # explicit FAP position, repeatable
//! deploy.count = 50           # or random placement instead of fap lines
//! thresholds.s_t1 = -70
//! ```
//!
//! Every key other than `wall` and `fap` may appear at most once. Unknown keys
//! are rejected. Omitted keys take the defaults listed in [`KEYS`].

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::ncl::ThresholdConfig;
use crate::radio_env::{FloorPlan, Point2D, PropagationParams, WallSegment};
use crate::sim::{FapPlacement, MobilityConfig, Scheme, SimConfig, TriggerConfig};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}{field}: {message}", location(*.line))]
    Validation {
        line: Option<usize>,
        field: String,
        message: String,
    },
}

fn location(line: Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

/// Every scalar key and its default, in emission order.
pub const KEYS: &[(&str, &str)] = &[
    ("scenario.name", "scenario"),
    ("scenario.schemes", "baseline-t0 baseline-t1 proposed"),
    ("plan.width", "(required)"),
    ("plan.height", "(required)"),
    ("deploy.count", "number of fap lines"),
    ("deploy.min_separation", "3"),
    ("deploy.tx_power", "10"),
    ("radio.ref_loss", "37"),
    ("radio.exponent", "3"),
    ("radio.min_distance", "0.5"),
    ("thresholds.s_t0", "-90"),
    ("thresholds.s_t1", "-70"),
    ("thresholds.d_hidden", "15"),
    ("thresholds.hidden_allows_cochannel", "true"),
    ("trigger.serving_drop", "-60"),
    ("trigger.hysteresis", "3"),
    ("mobility.speed", "1"),
    ("mobility.waypoint_pause", "0"),
    ("mobility.time_step", "0.5"),
    ("channels.count", "4"),
    ("son.two_hop", "true"),
    ("sim.max_steps", "10000000"),
];

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub sim: SimConfig<f64>,
}

struct Entry {
    line: usize,
    value: String,
}

struct Fields {
    scalars: BTreeMap<String, Entry>,
}

impl Fields {
    fn line_of(&self, key: &str) -> Option<usize> {
        self.scalars.get(key).map(|e| e.line)
    }

    fn invalid(&self, key: &str, message: impl Into<String>) -> ScenarioError {
        ScenarioError::Validation {
            line: self.line_of(key),
            field: key.to_string(),
            message: message.into(),
        }
    }

    fn parse_or<V: std::str::FromStr>(&self, key: &str, default: V) -> Result<V, ScenarioError> {
        match self.scalars.get(key) {
            None => Ok(default),
            Some(e) => e.value.parse().map_err(|_| ScenarioError::Parse {
                line: e.line,
                message: format!("{key}: cannot parse '{}'", e.value),
            }),
        }
    }

    fn float_or(&self, key: &str, default: f64) -> Result<f64, ScenarioError> {
        let v: f64 = self.parse_or(key, default)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(self.invalid(key, "value must be finite"))
        }
    }

    fn required_float(&self, key: &str) -> Result<f64, ScenarioError> {
        if !self.scalars.contains_key(key) {
            return Err(self.invalid(key, "required field is missing"));
        }
        self.float_or(key, 0.0)
    }
}

fn parse_numbers(line: usize, key: &str, value: &str, expected: usize) -> Result<Vec<f64>, ScenarioError> {
    let nums: Vec<f64> = value
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| ScenarioError::Parse {
            line,
            message: format!("{key}: expected {expected} numbers, got '{value}'"),
        })?;
    if nums.len() != expected || nums.iter().any(|v| !v.is_finite()) {
        return Err(ScenarioError::Parse {
            line,
            message: format!("{key}: expected {expected} finite numbers, got '{value}'"),
        });
    }
    Ok(nums)
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let known: Vec<&str> = KEYS.iter().map(|(k, _)| *k).collect();
    let mut fields = Fields {
        scalars: BTreeMap::new(),
    };
    let mut walls: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut faps: Vec<(usize, Vec<f64>)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ScenarioError::Parse {
                line,
                message: format!("expected 'key = value', got '{content}'"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "wall" => walls.push((line, parse_numbers(line, key, value, 5)?)),
            "fap" => faps.push((line, parse_numbers(line, key, value, 2)?)),
            k if known.contains(&k) => {
                if let Some(prev) = fields.scalars.get(k) {
                    return Err(ScenarioError::Parse {
                        line,
                        message: format!("duplicate key '{k}' (first set on line {})", prev.line),
                    });
                }
                fields.scalars.insert(
                    k.to_string(),
                    Entry {
                        line,
                        value: value.to_string(),
                    },
                );
            }
            other => {
                return Err(ScenarioError::Parse {
                    line,
                    message: format!("unknown key '{other}'"),
                })
            }
        }
    }

    let name = fields
        .scalars
        .get("scenario.name")
        .map_or("scenario".to_string(), |e| e.value.clone());
    if !valid_name(&name) {
        return Err(fields.invalid("scenario.name", "use only letters, digits, '-', '_' and '.'"));
    }

    let mut schemes = Scheme::ALL.to_vec();
    if let Some(e) = fields.scalars.get("scenario.schemes") {
        schemes = e
            .value
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<Scheme>())
            .collect::<Result<_, _>>()
            .map_err(|m| fields.invalid("scenario.schemes", m))?;
        schemes.sort();
        schemes.dedup();
        if schemes.is_empty() {
            return Err(fields.invalid("scenario.schemes", "at least one scheme is required"));
        }
    }

    let width = fields.required_float("plan.width")?;
    let height = fields.required_float("plan.height")?;
    let mut wall_segments = Vec::with_capacity(walls.len());
    for (line, w) in &walls {
        let seg = WallSegment::new(Point2D::new(w[0], w[1]), Point2D::new(w[2], w[3]), w[4]).map_err(|e| {
            ScenarioError::Validation {
                line: Some(*line),
                field: "wall".into(),
                message: e.to_string(),
            }
        })?;
        wall_segments.push(seg);
    }
    let plan = FloorPlan::new(width, height, Vec::new()).map_err(|e| fields.invalid("plan.width", e.to_string()))?;
    for (seg, (line, _)) in wall_segments.iter().zip(&walls) {
        if !plan.contains(&seg.a) || !plan.contains(&seg.b) {
            return Err(ScenarioError::Validation {
                line: Some(*line),
                field: "wall".into(),
                message: "wall endpoint lies outside the floor plan".into(),
            });
        }
    }
    let plan = FloorPlan {
        walls: wall_segments,
        ..plan
    };

    let min_separation = fields.float_or("deploy.min_separation", 3.0)?;
    if min_separation < 0.0 {
        return Err(fields.invalid("deploy.min_separation", "must be >= 0"));
    }
    let placement = if faps.is_empty() {
        if !fields.scalars.contains_key("deploy.count") {
            return Err(fields.invalid("deploy.count", "give deploy.count or at least one fap line"));
        }
        FapPlacement::Random {
            count: fields.parse_or("deploy.count", 0usize)?,
        }
    } else {
        if let Some(count) = fields.scalars.get("deploy.count") {
            let n: usize = fields.parse_or("deploy.count", 0usize)?;
            if n != faps.len() {
                return Err(ScenarioError::Validation {
                    line: Some(count.line),
                    field: "deploy.count".into(),
                    message: format!("count {n} disagrees with {} fap lines", faps.len()),
                });
            }
        }
        let points: Vec<Point2D<f64>> = faps.iter().map(|(_, v)| Point2D::new(v[0], v[1])).collect();
        for (i, (line, _)) in faps.iter().enumerate() {
            if !plan.contains(&points[i]) {
                return Err(ScenarioError::Validation {
                    line: Some(*line),
                    field: "fap".into(),
                    message: "position lies outside the floor plan".into(),
                });
            }
            if let Some(j) = (0..i).find(|&j| points[j].distance(&points[i]) < min_separation) {
                return Err(ScenarioError::Validation {
                    line: Some(*line),
                    field: "fap".into(),
                    message: format!("closer than deploy.min_separation to the fap on line {}", faps[j].0),
                });
            }
        }
        FapPlacement::Explicit(points)
    };

    let d = PropagationParams::<f64>::default();
    let params = PropagationParams::new(
        fields.float_or("deploy.tx_power", d.tx_power)?,
        fields.float_or("radio.ref_loss", d.ref_loss)?,
        fields.float_or("radio.exponent", d.exponent)?,
        fields.float_or("radio.min_distance", d.min_distance)?,
    )
    .map_err(|e| {
        let key = match e {
            crate::radio_env::GeometryError::BadMinDistance(_) => "radio.min_distance",
            _ => "radio.exponent",
        };
        fields.invalid(key, e.to_string())
    })?;

    let t = ThresholdConfig::<f64>::default();
    let thresholds = ThresholdConfig::new(
        fields.float_or("thresholds.s_t0", t.s_t0)?,
        fields.float_or("thresholds.s_t1", t.s_t1)?,
        fields.float_or("thresholds.d_hidden", t.d_hidden)?,
        fields.parse_or("thresholds.hidden_allows_cochannel", t.hidden_allows_cochannel)?,
    )
    .map_err(|e| {
        let key = match e {
            crate::ncl::ThresholdError::NegativeHiddenDistance(_) => "thresholds.d_hidden",
            _ => "thresholds.s_t1",
        };
        fields.invalid(key, e.to_string())
    })?;

    let tr = TriggerConfig::<f64>::default();
    let trigger = TriggerConfig::new(
        fields.float_or("trigger.serving_drop", tr.serving_drop)?,
        fields.float_or("trigger.hysteresis", tr.hysteresis)?,
    )
    .map_err(|e| fields.invalid("trigger.hysteresis", e.to_string()))?;

    let m = MobilityConfig::<f64>::default();
    let mobility = MobilityConfig::new(
        fields.float_or("mobility.speed", m.speed)?,
        fields.float_or("mobility.waypoint_pause", m.waypoint_pause)?,
        fields.float_or("mobility.time_step", m.time_step)?,
    )
    .map_err(|e| {
        let key = match e {
            crate::sim::ConfigError::BadSpeed(_) => "mobility.speed",
            crate::sim::ConfigError::BadPause(_) => "mobility.waypoint_pause",
            _ => "mobility.time_step",
        };
        fields.invalid(key, e.to_string())
    })?;

    let num_channels: u16 = fields.parse_or("channels.count", 4)?;
    if num_channels == 0 {
        return Err(fields.invalid("channels.count", "must be >= 1"));
    }

    let mut sim = SimConfig::new(plan, placement);
    sim.min_separation = min_separation;
    sim.params = params;
    sim.thresholds = thresholds;
    sim.trigger = trigger;
    sim.mobility = mobility;
    sim.num_channels = num_channels;
    sim.two_hop = fields.parse_or("son.two_hop", true)?;
    sim.schemes = schemes;
    sim.max_steps = fields.parse_or("sim.max_steps", sim.max_steps)?;
    Ok(Scenario { name, sim })
}

/// Writes a scenario with every field explicit. Reparsing yields an equal value.
pub fn emit_scenario(s: &Scenario) -> String {
    let c = &s.sim;
    let mut out = String::new();
    let schemes: Vec<&str> = c.schemes.iter().map(|s| s.name()).collect();
    let _ = writeln!(out, "scenario.name = {}", s.name);
    let _ = writeln!(out, "scenario.schemes = {}", schemes.join(" "));
    let _ = writeln!(out, "plan.width = {}", c.plan.width);
    let _ = writeln!(out, "plan.height = {}", c.plan.height);
    for w in &c.plan.walls {
        let _ = writeln!(out, "wall = {} {} {} {} {}", w.a.x, w.a.y, w.b.x, w.b.y, w.attenuation);
    }
    match &c.placement {
        FapPlacement::Random { count } => {
            let _ = writeln!(out, "deploy.count = {count}");
        }
        FapPlacement::Explicit(points) => {
            for p in points {
                let _ = writeln!(out, "fap = {} {}", p.x, p.y);
            }
        }
    }
    let pairs: [(&str, String); 17] = [
        ("deploy.min_separation", c.min_separation.to_string()),
        ("deploy.tx_power", c.params.tx_power.to_string()),
        ("radio.ref_loss", c.params.ref_loss.to_string()),
        ("radio.exponent", c.params.exponent.to_string()),
        ("radio.min_distance", c.params.min_distance.to_string()),
        ("thresholds.s_t0", c.thresholds.s_t0.to_string()),
        ("thresholds.s_t1", c.thresholds.s_t1.to_string()),
        ("thresholds.d_hidden", c.thresholds.d_hidden.to_string()),
        (
            "thresholds.hidden_allows_cochannel",
            c.thresholds.hidden_allows_cochannel.to_string(),
        ),
        ("trigger.serving_drop", c.trigger.serving_drop.to_string()),
        ("trigger.hysteresis", c.trigger.hysteresis.to_string()),
        ("mobility.speed", c.mobility.speed.to_string()),
        ("mobility.waypoint_pause", c.mobility.waypoint_pause.to_string()),
        ("mobility.time_step", c.mobility.time_step.to_string()),
        ("channels.count", c.num_channels.to_string()),
        ("son.two_hop", c.two_hop.to_string()),
        ("sim.max_steps", c.max_steps.to_string()),
    ];
    for (k, v) in pairs {
        let _ = writeln!(out, "{k} = {v}");
    }
    out
}
