//! Current compensation: command the vehicle with `v_plan = v_d - v_cur` so
//! the resultant `v_plan + v_cur` is exactly the desired velocity `v_d`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::currentfield::CurrentSpec;
use crate::geometry::Vector;
use crate::gridworld::{Cell, GridMap};
use crate::neuroplanner::{plan_bnnp, PlanError, PlanPath};

#[derive(Debug, Error, PartialEq)]
pub enum GuidanceError {
    #[error("zero displacement at {0}")]
    ZeroDisplacement(Cell),
    #[error("vector arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Desired velocity for moving between two cells at `speed` m/s.
pub fn desired_velocity(from: &Cell, to: &Cell, speed: f64) -> Result<Vector, GuidanceError> {
    if from.dims() != to.dims() {
        return Err(GuidanceError::ArityMismatch(from.dims(), to.dims()));
    }
    let d = Vector::from(*to) - Vector::from(*from);
    let u = d
        .normalized()
        .ok_or(GuidanceError::ZeroDisplacement(*from))?;
    Ok(u * speed)
}

/// Commanded velocity that cancels the current.
pub fn compensate(v_d: &Vector, v_cur: &Vector) -> Result<Vector, GuidanceError> {
    if v_d.dims() != v_cur.dims() {
        return Err(GuidanceError::ArityMismatch(v_d.dims(), v_cur.dims()));
    }
    Ok(*v_d - *v_cur)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Saturated,
}

pub fn feasibility_check(v_plan: &Vector, v_max: f64) -> Feasibility {
    if v_plan.norm() <= v_max {
        Feasibility::Feasible
    } else {
        Feasibility::Saturated
    }
}

/// Scales `v` down to magnitude `v_max` if it exceeds it.
pub fn saturate(v: &Vector, v_max: f64) -> Vector {
    let n = v.norm();
    if n > v_max {
        *v * (v_max / n)
    } else {
        *v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityTriple {
    pub v_d: Vector,
    pub v_cur: Vector,
    pub v_plan: Vector,
}

impl VelocityTriple {
    pub fn new(v_d: Vector, v_cur: Vector) -> Result<Self, GuidanceError> {
        let v_plan = compensate(&v_d, &v_cur)?;
        Ok(Self { v_d, v_cur, v_plan })
    }
}

/// One segment of the compensated velocity schedule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEntry {
    /// Nominal segment start time, s.
    pub t: f64,
    pub from: Cell,
    pub to: Cell,
    pub velocities: VelocityTriple,
    pub feasibility: Feasibility,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompensatedPlan {
    pub path: PlanPath,
    pub schedule: Vec<ScheduleEntry>,
}

/// Parameters shared by the compensated planner and the simulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidanceParams {
    pub k_g: f64,
    /// Magnitude of the desired velocity, m/s.
    pub speed: f64,
    /// Actuator bound used only for the feasibility report, m/s.
    pub v_max: f64,
}

impl Default for GuidanceParams {
    fn default() -> Self {
        Self {
            k_g: 0.5,
            speed: 1.0,
            v_max: 2.0,
        }
    }
}

/// Plans the waypoint path and derives the per-segment velocity schedule.
/// The current is sampled at each segment's start waypoint and nominal start
/// time and held over the segment.
pub fn plan_cbnnp(
    map: &GridMap,
    origin: Cell,
    destination: Cell,
    current: &CurrentSpec,
    params: &GuidanceParams,
) -> Result<CompensatedPlan, GuidanceError> {
    let path = plan_bnnp(map, origin, destination, params.k_g)?;
    let mut schedule = Vec::with_capacity(path.waypoints.len().saturating_sub(1));
    let mut t = 0.0;
    for w in path.waypoints.windows(2) {
        let (from, to) = (w[0], w[1]);
        let v_d = desired_velocity(&from, &to, params.speed)?;
        let v_cur = current.sample(&Vector::from(from), t);
        let velocities = VelocityTriple::new(v_d, v_cur)?;
        schedule.push(ScheduleEntry {
            t,
            from,
            to,
            feasibility: feasibility_check(&velocities.v_plan, params.v_max),
            velocities,
        });
        t += Vector::from(to).distance(&Vector::from(from)) / params.speed;
    }
    Ok(CompensatedPlan { path, schedule })
}
