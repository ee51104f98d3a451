//! Result rows and geometry dumps.
//!
//! CSV and JSON share one row layout; reals are printed with exactly six
//! decimals and lines end in LF.

use std::io::{self, Write};

use crate::scenario::Scenario;
use crate::sim::{ScenarioResult, Scheme};
use crate::topology::Deployment;

pub const CSV_HEADER: &str = "scenario,scheme,seed,events,misses,miss_probability,mean_list_size,max_list_size";

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub scenario: String,
    pub scheme: Scheme,
    pub seed: u64,
    pub events: u64,
    pub misses: u64,
    pub miss_probability: f64,
    pub mean_list_size: f64,
    pub max_list_size: u64,
}

/// One row per (scheme, seed), sorted by scheme name then seed.
pub fn result_rows(scenario: &str, results: &[ScenarioResult]) -> Vec<ResultRow> {
    let mut rows: Vec<ResultRow> = results
        .iter()
        .flat_map(|r| {
            r.stats.iter().map(move |(&scheme, s)| ResultRow {
                scenario: scenario.to_string(),
                scheme,
                seed: r.seed,
                events: s.events,
                misses: s.misses,
                miss_probability: s.miss_probability(),
                mean_list_size: s.mean_list_size(),
                max_list_size: s.max_list_size,
            })
        })
        .collect();
    rows.sort_by(|a, b| a.scheme.name().cmp(b.scheme.name()).then(a.seed.cmp(&b.seed)));
    rows
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{:.6},{:.6},{}",
            r.scenario, r.scheme, r.seed, r.events, r.misses, r.miss_probability, r.mean_list_size, r.max_list_size
        )?;
    }
    Ok(())
}

/// A JSON array of flat objects, one per row, in CSV column order.
pub fn write_json<W: Write>(rows: &[ResultRow], mut w: W) -> io::Result<()> {
    writeln!(w, "[")?;
    for (i, r) in rows.iter().enumerate() {
        let sep = if i + 1 < rows.len() { "," } else { "" };
        writeln!(
            w,
            "  {{\"scenario\":{},\"scheme\":\"{}\",\"seed\":{},\"events\":{},\"misses\":{},\"miss_probability\":{:.6},\"mean_list_size\":{:.6},\"max_list_size\":{}}}{sep}",
            serde_json::to_string(&r.scenario).map_err(io::Error::other)?,
            r.scheme,
            r.seed,
            r.events,
            r.misses,
            r.miss_probability,
            r.mean_list_size,
            r.max_list_size
        )?;
    }
    writeln!(w, "]")
}

/// Writes the realised geometry of one replication: bounds, walls and every
/// FAP with its assigned channel.
pub fn write_geometry<W: Write>(scenario: &Scenario, seed: u64, dep: &Deployment<f64>, mut w: W) -> io::Result<()> {
    writeln!(w, "scenario {}", scenario.name)?;
    writeln!(w, "seed {seed}")?;
    writeln!(w, "plan {} {}", dep.plan.width, dep.plan.height)?;
    writeln!(w, "channels {}", dep.num_channels)?;
    for wall in &dep.plan.walls {
        writeln!(
            w,
            "wall {} {} {} {} {}",
            wall.a.x, wall.a.y, wall.b.x, wall.b.y, wall.attenuation
        )?;
    }
    for f in &dep.faps {
        writeln!(
            w,
            "fap {} {} {} {} {}",
            f.id, f.position.x, f.position.y, f.channel, f.tx_power
        )?;
    }
    writeln!(w, "end")
}

/// FAP record read back from a geometry dump.
#[derive(Debug, Clone, PartialEq)]
pub struct DumpedFap {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub channel: u16,
    pub tx_power: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct GeometryDump {
    pub scenario: String,
    pub seed: u64,
    pub width: f64,
    pub height: f64,
    pub channels: u16,
    /// x1, y1, x2, y2, attenuation
    pub walls: Vec<[f64; 5]>,
    pub faps: Vec<DumpedFap>,
}

pub fn read_geometry(text: &str) -> Result<Vec<GeometryDump>, String> {
    fn nums<T: std::str::FromStr>(lineno: usize, toks: &[&str]) -> Result<Vec<T>, String> {
        toks.iter()
            .map(|t| t.parse::<T>().map_err(|_| format!("line {lineno}: bad number '{t}'")))
            .collect()
    }
    let mut dumps = Vec::new();
    let mut cur = GeometryDump::default();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["scenario", name] => cur.scenario = name.to_string(),
            ["seed", s] => cur.seed = nums(lineno, &[s])?[0],
            ["plan", rest @ ..] if rest.len() == 2 => {
                let v: Vec<f64> = nums(lineno, rest)?;
                (cur.width, cur.height) = (v[0], v[1]);
            }
            ["channels", c] => cur.channels = nums(lineno, &[c])?[0],
            ["wall", rest @ ..] if rest.len() == 5 => {
                let v: Vec<f64> = nums(lineno, rest)?;
                cur.walls.push([v[0], v[1], v[2], v[3], v[4]]);
            }
            ["fap", id, x, y, ch, tx] => cur.faps.push(DumpedFap {
                id: nums(lineno, &[id])?[0],
                x: nums(lineno, &[x])?[0],
                y: nums(lineno, &[y])?[0],
                channel: nums(lineno, &[ch])?[0],
                tx_power: nums(lineno, &[tx])?[0],
            }),
            ["end"] => dumps.push(std::mem::take(&mut cur)),
            _ => return Err(format!("line {lineno}: unrecognised record '{line}'")),
        }
    }
    Ok(dumps)
}
