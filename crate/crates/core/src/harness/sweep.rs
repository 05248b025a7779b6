//! Experiment sweeps over current direction, current speed and obstacle
//! density, plus the dynamic-current demonstration.
//!
//! Sweep cells run in parallel; results are collected in condition order so
//! the written files do not depend on scheduling.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ScenarioConfig, VariantSelection};
use super::export::{self, OutputFormat};
use super::{guidance_params, run_scenario, run_variant, Result, RunRecord, ScenarioOutput};
use crate::currentfield::{CurrentSpec, DynamicParams};
use crate::gridworld::{Cell, GridMap, ObstacleLayout};
use crate::guidance::plan_cbnnp;
use crate::kinematics::{SimParams, Variant};
use crate::neuroplanner::PlanStatus;
use crate::oracle::shortest_path;

pub const DIRECTIONS_2D: [f64; 5] = [0.0, 45.0, 90.0, 135.0, 180.0];
pub const SPEEDS: [f64; 10] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
/// (degrees to the X-Y plane, degrees to the X-Z plane)
pub const DIRECTIONS_3D: [(f64, f64); 9] = [
    (45.0, 0.0),
    (45.0, 45.0),
    (45.0, 90.0),
    (45.0, 135.0),
    (45.0, 180.0),
    (0.0, 45.0),
    (90.0, 45.0),
    (135.0, 45.0),
    (180.0, 45.0),
];
pub const RATIOS: [f64; 3] = [0.2, 0.4, 0.6];
/// Current speed used when only the direction varies, m/s.
pub const DIRECTION_SWEEP_SPEED: f64 = 0.05;
/// Current direction of the obstacle-density sweep, degrees.
pub const RATIO_SWEEP_DIRECTION: f64 = 135.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSettings {
    pub sim: SimParams,
    /// Seed of the first map in a seeded family.
    pub base_seed: u64,
    /// Maps per obstacle ratio.
    pub seeds: usize,
    pub layout: ObstacleLayout,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            sim: SimParams::default(),
            base_seed: 0,
            seeds: 50,
            layout: ObstacleLayout::Cells,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TableCell {
    Length(f64),
    Flags { collision: bool, fail: bool },
}

impl TableCell {
    pub fn from_record(r: &RunRecord) -> Self {
        if r.reached {
            TableCell::Length(r.traveled_length)
        } else {
            TableCell::Flags {
                collision: r.collision,
                fail: r.fail,
            }
        }
    }

    pub fn length(&self) -> Option<f64> {
        match self {
            TableCell::Length(l) => Some(*l),
            TableCell::Flags { .. } => None,
        }
    }
}

impl fmt::Display for TableCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TableCell::Length(l) => write!(f, "{l:.4}"),
            TableCell::Flags {
                collision: true,
                fail: true,
            } => f.write_str("C & F"),
            TableCell::Flags {
                collision: true,
                fail: false,
            } => f.write_str("C"),
            TableCell::Flags { .. } => f.write_str("F"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub algorithm: Variant,
    pub cells: Vec<TableCell>,
}

/// Two rows (CBNNP, BNNP) by one column per condition.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub name: String,
    pub title: String,
    /// Label of the condition axis.
    pub header: String,
    pub columns: Vec<String>,
    pub rows: Vec<TableRow>,
    /// Shortest grid path length on the sweep's map.
    pub oracle_length: f64,
    pub records: Vec<RunRecord>,
}

impl SweepTable {
    pub fn row(&self, variant: Variant) -> &TableRow {
        self.rows
            .iter()
            .find(|r| r.algorithm == variant)
            .expect("tables hold both variants")
    }

    /// Fixed-width text rendering for terminals.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.title);
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len().max(7)).collect();
        for row in &self.rows {
            for (w, c) in widths.iter_mut().zip(&row.cells) {
                *w = (*w).max(c.to_string().len());
            }
        }
        out.push_str(&format!("{:<10}", "Algorithm"));
        for (w, c) in widths.iter().zip(&self.columns) {
            out.push_str(&format!(" | {c:>w$}"));
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!("{:<10}", row.algorithm.label()));
            for (w, c) in widths.iter().zip(&row.cells) {
                out.push_str(&format!(" | {:>w$}", c.to_string()));
            }
            out.push('\n');
        }
        out
    }
}

struct Condition {
    label: String,
    current: CurrentSpec,
}

fn default_endpoints(dims: usize) -> (Cell, Cell) {
    if dims == 3 {
        (Cell::new3(2, 1, 1), Cell::new3(9, 9, 9))
    } else {
        (Cell::new2(2, 1), Cell::new2(9, 9))
    }
}

fn empty_map(dims: usize) -> GridMap {
    GridMap::empty(&vec![10; dims]).expect("10 per axis is a valid extent")
}

/// Runs both variants under every condition on the default empty map.
fn run_table(
    name: &str,
    title: &str,
    header: &str,
    dims: usize,
    conditions: Vec<Condition>,
    settings: &SweepSettings,
) -> Result<SweepTable> {
    let map = empty_map(dims);
    let (origin, destination) = default_endpoints(dims);
    let sim = &settings.sim;

    let cells: Vec<(RunRecord, RunRecord)> = conditions
        .par_iter()
        .map(|cond| -> Result<_> {
            let plan = plan_cbnnp(
                &map,
                origin,
                destination,
                &cond.current,
                &guidance_params(sim),
            )?;
            let id = format!("{name}/{}", cond.label);
            let run = |v| run_variant(&id, &map, &plan, destination, v, &cond.current, sim).0;
            Ok((run(Variant::Cbnnp), run(Variant::Bnnp)))
        })
        .collect::<Result<_>>()?;

    let rows = vec![
        TableRow {
            algorithm: Variant::Cbnnp,
            cells: cells
                .iter()
                .map(|(c, _)| TableCell::from_record(c))
                .collect(),
        },
        TableRow {
            algorithm: Variant::Bnnp,
            cells: cells
                .iter()
                .map(|(_, b)| TableCell::from_record(b))
                .collect(),
        },
    ];
    let records = cells
        .iter()
        .flat_map(|(c, b)| [c.clone(), b.clone()])
        .collect();
    Ok(SweepTable {
        name: name.into(),
        title: title.into(),
        header: header.into(),
        columns: conditions.into_iter().map(|c| c.label).collect(),
        rows,
        oracle_length: shortest_path(&map, origin, destination).length,
        records,
    })
}

fn speed_label(s: f64) -> String {
    format!("{s}")
}

/// 2D, 0.05 m/s, direction varied.
pub fn sweep_directions_2d(settings: &SweepSettings) -> Result<SweepTable> {
    let conditions = DIRECTIONS_2D
        .iter()
        .map(|&direction| Condition {
            label: format!("{direction}"),
            current: CurrentSpec::Static2d {
                speed: DIRECTION_SWEEP_SPEED,
                direction,
            },
        })
        .collect();
    run_table(
        "directions2d",
        "2D path length under currents of different directions (m)",
        "direction_deg",
        2,
        conditions,
        settings,
    )
}

/// Speed varied at a fixed direction: 0 degrees in 2D; 0 degrees to the X-Y
/// plane and 45 degrees to the X-Z plane in 3D.
pub fn sweep_speeds(dims: usize, settings: &SweepSettings) -> Result<SweepTable> {
    let current = |speed| {
        if dims == 3 {
            CurrentSpec::Static3d {
                speed,
                elevation: 0.0,
                azimuth: 45.0,
            }
        } else {
            CurrentSpec::Static2d {
                speed,
                direction: 0.0,
            }
        }
    };
    let conditions = SPEEDS
        .iter()
        .map(|&s| Condition {
            label: speed_label(s),
            current: current(s),
        })
        .collect();
    let (name, title) = if dims == 3 {
        (
            "speeds3d",
            "3D path length under currents of different speeds (m)",
        )
    } else {
        (
            "speeds2d",
            "2D path length under currents of different speeds (m)",
        )
    };
    run_table(
        name,
        title,
        "speed_m_per_s",
        dims.clamp(2, 3),
        conditions,
        settings,
    )
}

/// 3D, 0.05 m/s, the nine (X-Y, X-Z) angle pairs.
pub fn sweep_directions_3d(settings: &SweepSettings) -> Result<SweepTable> {
    let conditions = DIRECTIONS_3D
        .iter()
        .map(|&(elevation, azimuth)| Condition {
            label: format!("{elevation}/{azimuth}"),
            current: CurrentSpec::Static3d {
                speed: DIRECTION_SWEEP_SPEED,
                elevation,
                azimuth,
            },
        })
        .collect();
    run_table(
        "directions3d",
        "3D path length under currents of different directions (m)",
        "xy_deg/xz_deg",
        3,
        conditions,
        settings,
    )
}

/// One seeded map of an obstacle-density family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyRun {
    pub seed: u64,
    pub plan_status: PlanStatus,
    pub oracle_length: f64,
    pub cbnnp: RunRecord,
    pub bnnp: RunRecord,
}

/// Both variants on `settings.seeds` random 10x10 maps of the given ratio.
pub fn run_ratio_family(
    ratio: f64,
    current: &CurrentSpec,
    settings: &SweepSettings,
) -> Result<Vec<FamilyRun>> {
    let (origin, destination) = default_endpoints(2);
    let sim = &settings.sim;
    (0..settings.seeds as u64)
        .into_par_iter()
        .map(|i| {
            let seed = settings.base_seed + i;
            let map = GridMap::random(
                &[10, 10],
                ratio,
                seed,
                &[origin, destination],
                settings.layout,
            )?;
            let plan = plan_cbnnp(&map, origin, destination, current, &guidance_params(sim))?;
            let id = format!("ratio/{ratio}/{seed}");
            let run = |v| run_variant(&id, &map, &plan, destination, v, current, sim).0;
            Ok(FamilyRun {
                seed,
                plan_status: plan.path.status,
                oracle_length: shortest_path(&map, origin, destination).length,
                cbnnp: run(Variant::Cbnnp),
                bnnp: run(Variant::Bnnp),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub ratio: f64,
    pub algorithm: Variant,
    pub seeds: usize,
    pub reached: usize,
    pub collisions: usize,
    /// Runs with C and/or F set.
    pub failures: usize,
    pub failure_rate: f64,
    /// Mean traveled length over reached runs; `None` if none reached.
    pub mean_length: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    pub records: Vec<RunRecord>,
}

impl RatioTable {
    pub fn row(&self, ratio: f64, variant: Variant) -> Option<&RatioRow> {
        self.rows
            .iter()
            .find(|r| r.ratio == ratio && r.algorithm == variant)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("Seeded obstacle maps, current 0.05 m/s at 135 deg\n");
        out.push_str(
            "ratio | algorithm | seeds | reached | collisions | C/F | C/F rate | mean length\n",
        );
        for r in &self.rows {
            out.push_str(&format!(
                "{:>5} | {:>9} | {:>5} | {:>7} | {:>10} | {:>3} | {:>8.4} | {}\n",
                r.ratio,
                r.algorithm.label(),
                r.seeds,
                r.reached,
                r.collisions,
                r.failures,
                r.failure_rate,
                r.mean_length.map_or("-".into(), |l| format!("{l:.4}")),
            ));
        }
        out
    }
}

fn summarize(ratio: f64, algorithm: Variant, records: &[&RunRecord]) -> RatioRow {
    let reached: Vec<f64> = records
        .iter()
        .filter(|r| r.reached)
        .map(|r| r.traveled_length)
        .collect();
    let failures = records.iter().filter(|r| r.collision || r.fail).count();
    RatioRow {
        ratio,
        algorithm,
        seeds: records.len(),
        reached: reached.len(),
        collisions: records.iter().filter(|r| r.collision).count(),
        failures,
        failure_rate: if records.is_empty() {
            0.0
        } else {
            failures as f64 / records.len() as f64
        },
        mean_length: (!reached.is_empty())
            .then(|| reached.iter().sum::<f64>() / reached.len() as f64),
    }
}

pub fn sweep_obstacle_ratio_with(ratios: &[f64], settings: &SweepSettings) -> Result<RatioTable> {
    let current = CurrentSpec::Static2d {
        speed: DIRECTION_SWEEP_SPEED,
        direction: RATIO_SWEEP_DIRECTION,
    };
    let mut rows = Vec::new();
    let mut records = Vec::new();
    for &ratio in ratios {
        let family = run_ratio_family(ratio, &current, settings)?;
        for variant in [Variant::Cbnnp, Variant::Bnnp] {
            let recs: Vec<&RunRecord> = family
                .iter()
                .map(|f| {
                    if variant == Variant::Cbnnp {
                        &f.cbnnp
                    } else {
                        &f.bnnp
                    }
                })
                .collect();
            rows.push(summarize(ratio, variant, &recs));
        }
        records.extend(family.into_iter().flat_map(|f| [f.cbnnp, f.bnnp]));
    }
    Ok(RatioTable { rows, records })
}

pub fn sweep_obstacle_ratio(settings: &SweepSettings) -> Result<RatioTable> {
    sweep_obstacle_ratio_with(&RATIOS, settings)
}

/// Both variants on the default 2D scenario under the default oscillating
/// current.
pub fn dynamic_current_demo(settings: &SweepSettings) -> Result<ScenarioOutput> {
    let cfg = ScenarioConfig {
        name: "dynamic".into(),
        current: Some(CurrentSpec::Dynamic2d(DynamicParams::default())),
        variant: VariantSelection::Both,
        k_g: settings.sim.k_g,
        desired_speed: settings.sim.speed,
        sim: super::SimSettings {
            dt: settings.sim.dt,
            capture_radius: settings.sim.capture_radius,
            v_max: settings.sim.v_max,
            time_limit_factor: settings.sim.time_limit_factor,
            cap_saturation: settings.sim.cap_saturation,
        },
        ..ScenarioConfig::default()
    };
    run_scenario(&cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Directions2d,
    Speeds2d,
    Speeds3d,
    Directions3d,
    Ratio,
    Dynamic,
}

impl SweepKind {
    pub const ALL: [SweepKind; 6] = [
        SweepKind::Directions2d,
        SweepKind::Speeds2d,
        SweepKind::Speeds3d,
        SweepKind::Directions3d,
        SweepKind::Ratio,
        SweepKind::Dynamic,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SweepKind::Directions2d => "directions2d",
            SweepKind::Speeds2d => "speeds2d",
            SweepKind::Speeds3d => "speeds3d",
            SweepKind::Directions3d => "directions3d",
            SweepKind::Ratio => "ratio",
            SweepKind::Dynamic => "dynamic",
        }
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        SweepKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = SweepKind::ALL.iter().map(|k| k.name()).collect();
                format!("unknown sweep `{s}` (expected one of {})", names.join(", "))
            })
    }
}

/// Result of a named sweep that has been written to disk.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub summary: String,
    pub files: Vec<PathBuf>,
}

/// Runs the named sweep and writes its table and raw records into `dir`.
pub fn run_named_sweep(
    kind: SweepKind,
    settings: &SweepSettings,
    dir: &Path,
    format: OutputFormat,
    include_timing: bool,
) -> Result<SweepReport> {
    std::fs::create_dir_all(dir)?;
    let name = kind.name();
    let table_path = dir.join(format!("{name}.{}", format.extension()));
    let records_path = dir.join(format!("{name}_records.{}", format.extension()));
    match kind {
        SweepKind::Ratio => {
            let table = sweep_obstacle_ratio(settings)?;
            export::write_ratio_table(&table, &table_path, format)?;
            export::write_records(&table.records, &records_path, format, include_timing)?;
            Ok(SweepReport {
                summary: table.render(),
                files: vec![table_path, records_path],
            })
        }
        SweepKind::Dynamic => {
            let out = dynamic_current_demo(settings)?;
            let files = out.write(dir, format, include_timing)?;
            let mut summary = String::from("Dynamic current demo\n");
            for r in out.records() {
                summary.push_str(&format!(
                    "{:<6} traveled {:.4} m, max deviation {:.4} m, {}\n",
                    r.variant.label(),
                    r.traveled_length,
                    r.deviation_max,
                    if r.reached {
                        "reached".to_string()
                    } else {
                        r.flags()
                    },
                ));
            }
            Ok(SweepReport { summary, files })
        }
        _ => {
            let table = match kind {
                SweepKind::Directions2d => sweep_directions_2d(settings)?,
                SweepKind::Speeds2d => sweep_speeds(2, settings)?,
                SweepKind::Speeds3d => sweep_speeds(3, settings)?,
                _ => sweep_directions_3d(settings)?,
            };
            export::write_table(&table, &table_path, format)?;
            export::write_records(&table.records, &records_path, format, include_timing)?;
            Ok(SweepReport {
                summary: table.render(),
                files: vec![table_path, records_path],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_table_shape_and_cbnnp_row() {
        let t = sweep_directions_2d(&SweepSettings::default()).unwrap();
        assert_eq!(t.columns, ["0", "45", "90", "135", "180"]);
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.rows[0].algorithm, Variant::Cbnnp);
        for c in &t.row(Variant::Cbnnp).cells {
            assert_eq!(c.to_string(), "10.8995");
        }
        assert!(t.row(Variant::Bnnp).cells[0].length().unwrap() > 10.8995);
        assert_eq!(format!("{:.4}", t.oracle_length), "10.8995");
        assert_eq!(t.records.len(), 10);
    }

    #[test]
    fn speed_table_labels() {
        let t = sweep_speeds(2, &SweepSettings::default()).unwrap();
        assert_eq!(t.columns.len(), 10);
        assert_eq!(t.columns[0], "0.05");
        assert_eq!(t.columns[9], "0.9");
    }

    #[test]
    fn cell_rendering() {
        assert_eq!(TableCell::Length(10.899494936).to_string(), "10.8995");
        assert_eq!(
            TableCell::Flags {
                collision: true,
                fail: true
            }
            .to_string(),
            "C & F"
        );
        assert_eq!(
            TableCell::Flags {
                collision: false,
                fail: true
            }
            .to_string(),
            "F"
        );
        assert_eq!(
            TableCell::Flags {
                collision: true,
                fail: false
            }
            .to_string(),
            "C"
        );
    }

    #[test]
    fn empty_ratio_family_matches_oracle() {
        let settings = SweepSettings {
            seeds: 3,
            ..SweepSettings::default()
        };
        let t = sweep_obstacle_ratio_with(&[0.0], &settings).unwrap();
        let c = t.row(0.0, Variant::Cbnnp).unwrap();
        let b = t.row(0.0, Variant::Bnnp).unwrap();
        assert_eq!((c.reached, b.reached), (3, 3));
        for r in t.records.iter().filter(|r| r.variant == Variant::Cbnnp) {
            assert_eq!(format!("{:.4}", r.traveled_length), "10.8995");
        }
    }

    #[test]
    fn sweep_kind_names_round_trip() {
        for k in SweepKind::ALL {
            assert_eq!(k.name().parse::<SweepKind>().unwrap(), k);
        }
        assert!("tables".parse::<SweepKind>().is_err());
    }
}
