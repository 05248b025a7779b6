//! CSV and JSON writers. Tables carry 4 decimal places; raw records and
//! trajectories are written at full precision.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use super::sweep::{RatioTable, SweepTable};
use super::{Result, RunRecord};
use crate::guidance::ScheduleEntry;
use crate::kinematics::{containing_cell, Trajectory, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(format!("unknown format `{other}` (csv | json)")),
        }
    }
}

const AXES: [&str; 3] = ["x", "y", "z"];

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_writer(File::create(path)?))
}

fn write_json<T: Serialize + ?Sized>(value: &T, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn full(x: f64) -> String {
    format!("{x}")
}

#[derive(Serialize)]
struct RecordRow<'a> {
    scenario: &'a str,
    variant: Variant,
    planned_length: f64,
    traveled_length: f64,
    reached: bool,
    collision: bool,
    fail: bool,
    deviation_max: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_ms: Option<f64>,
}

/// Raw run records. Wall-clock time is left out unless `include_timing`,
/// which keeps repeated runs byte-identical.
pub fn write_records(
    records: &[RunRecord],
    path: &Path,
    format: OutputFormat,
    include_timing: bool,
) -> Result<()> {
    let rows: Vec<RecordRow> = records
        .iter()
        .map(|r| RecordRow {
            scenario: &r.scenario,
            variant: r.variant,
            planned_length: r.planned_length,
            traveled_length: r.traveled_length,
            reached: r.reached,
            collision: r.collision,
            fail: r.fail,
            deviation_max: r.deviation_max,
            wall_ms: include_timing.then_some(r.wall_ms),
        })
        .collect();
    match format {
        OutputFormat::Json => write_json(&rows, path),
        OutputFormat::Csv => {
            let mut w = csv_writer(path)?;
            let mut header = vec![
                "scenario",
                "variant",
                "planned_length",
                "traveled_length",
                "reached",
                "collision",
                "fail",
                "deviation_max",
            ];
            if include_timing {
                header.push("wall_ms");
            }
            w.write_record(&header)?;
            for r in &rows {
                let mut rec = vec![
                    r.scenario.to_string(),
                    r.variant.to_string(),
                    full(r.planned_length),
                    full(r.traveled_length),
                    r.reached.to_string(),
                    r.collision.to_string(),
                    r.fail.to_string(),
                    full(r.deviation_max),
                ];
                if let Some(ms) = r.wall_ms {
                    rec.push(full(ms));
                }
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct TableRowJson {
    algorithm: &'static str,
    cells: Vec<String>,
}

#[derive(Serialize)]
struct TableJson<'a> {
    name: &'a str,
    title: &'a str,
    header: &'a str,
    columns: &'a [String],
    rows: Vec<TableRowJson>,
}

/// Algorithms by conditions, cells as 4-decimal lengths or C/F flags.
pub fn write_table(table: &SweepTable, path: &Path, format: OutputFormat) -> Result<()> {
    let rows: Vec<TableRowJson> = table
        .rows
        .iter()
        .map(|r| TableRowJson {
            algorithm: r.algorithm.label(),
            cells: r.cells.iter().map(|c| c.to_string()).collect(),
        })
        .collect();
    match format {
        OutputFormat::Json => write_json(
            &TableJson {
                name: &table.name,
                title: &table.title,
                header: &table.header,
                columns: &table.columns,
                rows,
            },
            path,
        ),
        OutputFormat::Csv => {
            let mut w = csv_writer(path)?;
            let mut header = vec![format!("algorithm \\ {}", table.header)];
            header.extend(table.columns.iter().cloned());
            w.write_record(&header)?;
            for r in rows {
                let mut rec = vec![r.algorithm.to_string()];
                rec.extend(r.cells);
                w.write_record(&rec)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn write_ratio_table(table: &RatioTable, path: &Path, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => write_json(&table.rows, path),
        OutputFormat::Csv => {
            let mut w = csv_writer(path)?;
            w.write_record([
                "ratio",
                "algorithm",
                "seeds",
                "reached",
                "collisions",
                "failures",
                "failure_rate",
                "mean_length",
            ])?;
            for r in &table.rows {
                w.write_record([
                    format!("{:.4}", r.ratio),
                    r.algorithm.label().to_string(),
                    r.seeds.to_string(),
                    r.reached.to_string(),
                    r.collisions.to_string(),
                    r.failures.to_string(),
                    format!("{:.4}", r.failure_rate),
                    r.mean_length.map_or(String::new(), |l| format!("{l:.4}")),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// `time, x, y[, z], cell_x, cell_y[, cell_z], variant`, one row per sample.
pub fn write_trajectory_csv(traj: &Trajectory, path: &Path) -> Result<()> {
    let dims = traj.samples.first().map_or(2, |s| s.pos.dims());
    let mut w = csv_writer(path)?;
    let mut header = vec!["time".to_string()];
    header.extend(AXES[..dims].iter().map(|a| a.to_string()));
    header.extend(AXES[..dims].iter().map(|a| format!("cell_{a}")));
    header.push("variant".into());
    w.write_record(&header)?;
    let variant = traj.variant.to_string();
    for s in &traj.samples {
        let cell = containing_cell(&s.pos);
        let mut rec = vec![full(s.t)];
        rec.extend(s.pos.as_slice().iter().map(|&x| full(x)));
        rec.extend(cell.coords().iter().map(|c| c.to_string()));
        rec.push(variant.clone());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// `t, v_d_*, v_cur_*, v_plan_*`, one row per planned segment.
pub fn write_schedule_csv(schedule: &[ScheduleEntry], dims: usize, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["t".to_string()];
    for name in ["v_d", "v_cur", "v_plan"] {
        header.extend(AXES[..dims].iter().map(|a| format!("{name}_{a}")));
    }
    w.write_record(&header)?;
    for e in schedule {
        let v = &e.velocities;
        let mut rec = vec![full(e.t)];
        for vec in [v.v_d, v.v_cur, v.v_plan] {
            rec.extend(vec.as_slice().iter().map(|&x| full(x)));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{run_scenario, ScenarioConfig};
    use std::fs;

    fn records() -> Vec<RunRecord> {
        run_scenario(&ScenarioConfig::default()).unwrap().records()
    }

    #[test]
    fn empty_records_give_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        write_records(&[], &path, OutputFormat::Csv, false).unwrap();
        assert_eq!(
            fs::read_to_string(&path).unwrap(),
            "scenario,variant,planned_length,traveled_length,reached,collision,fail,deviation_max\n"
        );
        let path = dir.path().join("r.json");
        write_records(&[], &path, OutputFormat::Json, false).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap().trim(), "[]");
    }

    #[test]
    fn one_record_one_row() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let recs = records();
        write_records(&recs[..1], &path, OutputFormat::Csv, true).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].ends_with(",wall_ms"));
        assert!(lines[1].starts_with("scenario,cbnnp,"));
        // full precision in raw files
        assert!(lines[1].contains("10.899494936611"));
    }

    #[test]
    fn json_records_round_trip_values() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        let recs = records();
        write_records(&recs, &path, OutputFormat::Json, false).unwrap();
        let v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 2);
        assert_eq!(
            v[0]["traveled_length"].as_f64().unwrap(),
            recs[0].traveled_length
        );
        assert!(v[0].get("wall_ms").is_none());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("missing").join("r.csv");
        assert!(write_records(&records(), &path, OutputFormat::Csv, false).is_err());
    }

    #[test]
    fn trajectory_columns() {
        let dir = tempfile::tempdir().unwrap();
        let out = run_scenario(&ScenarioConfig::default_3d()).unwrap();
        let files = out.write(dir.path(), OutputFormat::Csv, false).unwrap();
        assert_eq!(files.len(), 4);
        let text = fs::read_to_string(dir.path().join("scenario_cbnnp_trajectory.csv")).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "time,x,y,z,cell_x,cell_y,cell_z,variant"
        );
        assert_eq!(lines.next().unwrap(), "0,2,1,1,2,1,1,cbnnp");
        assert!(text.trim_end().ends_with(",9,9,9,cbnnp"));
        let sched = fs::read_to_string(dir.path().join("scenario_schedule.csv")).unwrap();
        assert!(sched.starts_with(
            "t,v_d_x,v_d_y,v_d_z,v_cur_x,v_cur_y,v_cur_z,v_plan_x,v_plan_y,v_plan_z\n"
        ));
    }

    #[test]
    fn format_parsing() {
        assert_eq!("JSON".parse::<OutputFormat>().unwrap(), OutputFormat::Json);
        assert!("xml".parse::<OutputFormat>().is_err());
    }
}
