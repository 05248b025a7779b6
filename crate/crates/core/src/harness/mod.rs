//! Scenario runner, experiment sweeps and result export.

pub mod config;
pub mod export;
pub mod sweep;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::currentfield::CurrentSpec;
use crate::gridworld::{Cell, GridError, GridMap};
use crate::guidance::{plan_cbnnp, CompensatedPlan, GuidanceError, GuidanceParams};
use crate::kinematics::{simulate, Outcome, SimParams, Trajectory, Variant};
use crate::neuroplanner::PlanError;

pub use config::{MapSource, ScenarioConfig, SimSettings, VariantSelection};
pub use export::OutputFormat;
pub use sweep::{RatioRow, RatioTable, SweepSettings, SweepTable, TableCell, TableRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Guidance(#[from] GuidanceError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Summary of one simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub variant: Variant,
    pub planned_length: f64,
    pub traveled_length: f64,
    pub reached: bool,
    /// A collision occurred.
    pub collision: bool,
    /// The destination was not captured.
    pub fail: bool,
    pub deviation_max: f64,
    pub wall_ms: f64,
}

impl RunRecord {
    pub fn from_trajectory(
        scenario: &str,
        planned_length: f64,
        traj: &Trajectory,
        wall_ms: f64,
    ) -> Self {
        let reached = traj.outcome == Outcome::Reached;
        Self {
            scenario: scenario.to_string(),
            variant: traj.variant,
            planned_length,
            traveled_length: traj.traveled_length,
            reached,
            collision: traj.outcome == Outcome::Collision,
            fail: !reached,
            deviation_max: traj.deviation_max,
            wall_ms,
        }
    }

    /// "C", "F" or "C & F"; empty when reached.
    pub fn flags(&self) -> String {
        match (self.collision, self.fail) {
            (true, true) => "C & F".into(),
            (true, false) => "C".into(),
            (false, true) => "F".into(),
            (false, false) => String::new(),
        }
    }
}

/// Everything produced by one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioOutput {
    pub name: String,
    pub map: GridMap,
    pub plan: CompensatedPlan,
    pub runs: Vec<(RunRecord, Trajectory)>,
}

impl ScenarioOutput {
    pub fn records(&self) -> Vec<RunRecord> {
        self.runs.iter().map(|(r, _)| r.clone()).collect()
    }

    pub fn record(&self, variant: Variant) -> Option<&RunRecord> {
        self.runs
            .iter()
            .map(|(r, _)| r)
            .find(|r| r.variant == variant)
    }

    pub fn trajectory(&self, variant: Variant) -> Option<&Trajectory> {
        self.runs
            .iter()
            .map(|(_, t)| t)
            .find(|t| t.variant == variant)
    }

    /// Writes one trajectory CSV per variant, the velocity schedule and the
    /// records. Returns the written paths.
    pub fn write(
        &self,
        dir: &Path,
        format: OutputFormat,
        include_timing: bool,
    ) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        for (_, traj) in &self.runs {
            let path = dir.join(format!("{}_{}_trajectory.csv", self.name, traj.variant));
            export::write_trajectory_csv(traj, &path)?;
            written.push(path);
        }
        let path = dir.join(format!("{}_schedule.csv", self.name));
        export::write_schedule_csv(&self.plan.schedule, self.map.dims(), &path)?;
        written.push(path);
        let path = dir.join(format!("{}_records.{}", self.name, format.extension()));
        export::write_records(&self.records(), &path, format, include_timing)?;
        written.push(path);
        Ok(written)
    }
}

/// Plans once and simulates every variant of `config` on the same plan.
/// The config is validated before anything is computed.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let map = config.validate()?;
    let (origin, destination) = (config.origin(), config.destination());
    let current = config.current();
    let params = config.sim_params();
    let plan = plan_cbnnp(
        &map,
        origin,
        destination,
        &current,
        &guidance_params(&params),
    )?;
    let runs = config
        .variant
        .variants()
        .into_iter()
        .map(|variant| {
            run_variant(
                &config.name,
                &map,
                &plan,
                destination,
                variant,
                &current,
                &params,
            )
        })
        .collect();
    Ok(ScenarioOutput {
        name: config.name.clone(),
        map,
        plan,
        runs,
    })
}

/// Planner parameters matching the simulation settings.
pub fn guidance_params(p: &SimParams) -> GuidanceParams {
    GuidanceParams {
        k_g: p.k_g,
        speed: p.speed,
        v_max: p.v_max,
    }
}

pub(crate) fn run_variant(
    scenario: &str,
    map: &GridMap,
    plan: &CompensatedPlan,
    destination: Cell,
    variant: Variant,
    current: &CurrentSpec,
    params: &SimParams,
) -> (RunRecord, Trajectory) {
    let start = Instant::now();
    let traj = simulate(map, &plan.path, destination, variant, current, params);
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
    let record = RunRecord::from_trajectory(scenario, plan.path.length(), &traj, wall_ms);
    (record, traj)
}
