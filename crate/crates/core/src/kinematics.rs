//! Point-vehicle kinematics under current drift.
//!
//! Both vehicles fly the path as a sequence of legs. A leg is an open-loop
//! command held for the leg's nominal duration (leg length / desired speed),
//! integrated with explicit Euler; the last sub-step of a leg is shortened so
//! legs end exactly on time.
//!
//! * The compensated vehicle flies the planned waypoints, commanding
//!   `v_plan = v_d - v_cur(t)` at every integration step, so its ground
//!   velocity is exactly `v_d`.
//! * The uncompensated vehicle commands `v_d` only and drifts. It knows its
//!   position only up to the nearest cell: before every leg it replans from
//!   that cell and takes the first grid step as if it stood at the cell
//!   centre.
//!
//! The leg into the destination is aimed from the vehicle's actual position
//! at the destination centre. Arrival is declared when a leg ends within the
//! capture radius of the destination.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::currentfield::CurrentSpec;
use crate::geometry::{point_polyline_distance, Vector};
use crate::gridworld::{Cell, GridMap};
use crate::guidance::{desired_velocity, saturate};
use crate::neuroplanner::{plan_bnnp, PlanPath};

/// Points closer than this to an obstacle boundary are touching, not inside.
const CONTACT_EPS: f64 = 1e-9;
/// Leg remainders below this are treated as complete.
const TIME_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum KinematicsError {
    #[error("a path needs at least 2 points, got {0}")]
    TooFewPoints(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Neural-field planner without current compensation.
    Bnnp,
    /// Neural-field planner with current compensation.
    Cbnnp,
}

impl Variant {
    pub fn label(&self) -> &'static str {
        match self {
            Variant::Bnnp => "BNNP",
            Variant::Cbnnp => "CBNNP",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Bnnp => "bnnp",
            Variant::Cbnnp => "cbnnp",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Reached,
    Collision,
    Fail,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Reached => "reached",
            Outcome::Collision => "collision",
            Outcome::Fail => "fail",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellClass {
    Free,
    Obstacle,
    OutOfBounds,
}

/// Cell whose unit square (cube) contains `p`; cells span `[x-0.5, x+0.5)`.
pub fn containing_cell(p: &Vector) -> Cell {
    let r = |x: f64| (x + 0.5).floor() as i64;
    match *p.as_slice() {
        [x, y] => Cell::new2(r(x), r(y)),
        [x, y, z] => Cell::new3(r(x), r(y), r(z)),
        _ => unreachable!("vectors are 2D or 3D"),
    }
}

pub fn classify_cell(p: &Vector, map: &GridMap) -> CellClass {
    if !map.contains_point(p) {
        return CellClass::OutOfBounds;
    }
    if map.is_obstacle(&containing_cell(p)) {
        CellClass::Obstacle
    } else {
        CellClass::Free
    }
}

/// True when `p` is strictly inside an obstacle cell. Grazing an obstacle's
/// edge or corner (as diagonal steps between two obstacles do) is not a
/// collision.
pub fn penetrates_obstacle(p: &Vector, map: &GridMap) -> bool {
    let cell = containing_cell(p);
    map.is_obstacle(&cell)
        && p.as_slice()
            .iter()
            .zip(cell.coords())
            .all(|(&x, &c)| (x - c as f64).abs() < 0.5 - CONTACT_EPS)
}

/// Sum of Euclidean segment lengths.
pub fn path_length(points: &[Vector]) -> Result<f64, KinematicsError> {
    if points.len() < 2 {
        return Err(KinematicsError::TooFewPoints(points.len()));
    }
    Ok(points.windows(2).map(|w| w[0].distance(&w[1])).sum())
}

/// Simulation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimParams {
    /// Integration step, s.
    pub dt: f64,
    /// Arrival tolerance around the destination centre, cells.
    pub capture_radius: f64,
    /// Time budget as a multiple of planned length / desired speed.
    pub time_limit_factor: f64,
    /// Desired speed, m/s.
    pub speed: f64,
    /// Gain used when the uncompensated vehicle replans.
    pub k_g: f64,
    /// Actuator bound, m/s. Only enforced when `cap_saturation` is set.
    pub v_max: f64,
    pub cap_saturation: bool,
}

impl Default for SimParams {
    fn default() -> Self {
        Self {
            dt: 0.01,
            capture_radius: 0.25,
            time_limit_factor: 10.0,
            speed: 1.0,
            k_g: 0.5,
            v_max: 2.0,
            cap_saturation: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub pos: Vector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub variant: Variant,
    pub samples: Vec<Sample>,
    /// Commanded velocity of every integration step (one fewer than samples).
    pub commanded: Vec<Vector>,
    pub outcome: Outcome,
    pub traveled_length: f64,
    /// Largest distance from the planned polyline, m.
    pub deviation_max: f64,
    /// Integration steps whose commanded speed exceeded `v_max`.
    pub saturated_steps: usize,
}

impl Trajectory {
    pub fn final_position(&self) -> Vector {
        self.samples
            .last()
            .expect("trajectories start with a sample")
            .pos
    }

    pub fn duration(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.t)
    }
}

struct Flight<'a> {
    map: &'a GridMap,
    current: &'a CurrentSpec,
    params: &'a SimParams,
    variant: Variant,
    polyline: Vec<Vector>,
    time_limit: f64,
    pos: Vector,
    t: f64,
    samples: Vec<Sample>,
    commanded: Vec<Vector>,
    traveled: f64,
    deviation_max: f64,
    saturated_steps: usize,
}

impl Flight<'_> {
    /// Holds the desired velocity `v_d` for `duration` seconds. Returns the
    /// terminal outcome if the flight ends during the leg.
    fn fly_leg(&mut self, v_d: Vector, duration: f64) -> Option<Outcome> {
        let mut elapsed = 0.0;
        loop {
            let remaining = duration - elapsed;
            if remaining <= TIME_EPS {
                return None;
            }
            let h = remaining.min(self.params.dt);
            let v_cur = self.current.sample(&self.pos, self.t);
            let mut cmd = match self.variant {
                Variant::Bnnp => v_d,
                Variant::Cbnnp => v_d - v_cur,
            };
            if cmd.norm() > self.params.v_max {
                self.saturated_steps += 1;
                if self.params.cap_saturation {
                    cmd = saturate(&cmd, self.params.v_max);
                }
            }
            let next = self.pos + (cmd + v_cur) * h;
            self.traveled += next.distance(&self.pos);
            self.pos = next;
            self.t += h;
            elapsed += h;
            self.commanded.push(cmd);
            self.samples.push(Sample {
                t: self.t,
                pos: next,
            });
            self.deviation_max = self
                .deviation_max
                .max(point_polyline_distance(next, &self.polyline));

            if !self.map.contains_point(&next) {
                return Some(Outcome::Fail);
            }
            if penetrates_obstacle(&next, self.map) {
                return Some(Outcome::Collision);
            }
            if self.t >= self.time_limit {
                return Some(Outcome::Fail);
            }
        }
    }

    /// Leg between two cells at the desired speed.
    fn fly_step(&mut self, from: Cell, to: Cell) -> Option<Outcome> {
        let v_d =
            desired_velocity(&from, &to, self.params.speed).expect("distinct neighbour cells");
        let duration = Vector::from(to).distance(&Vector::from(from)) / self.params.speed;
        self.fly_leg(v_d, duration)
    }

    /// Leg aimed from the actual position at `target`.
    fn fly_home(&mut self, target: Cell) -> Option<Outcome> {
        let offset = Vector::from(target) - self.pos;
        let dist = offset.norm();
        match offset.normalized() {
            Some(u) => self.fly_leg(u * self.params.speed, dist / self.params.speed),
            None => None,
        }
    }

    fn captured(&self, destination: Cell) -> bool {
        self.pos.distance(&Vector::from(destination)) <= self.params.capture_radius
    }

    fn finish(self, outcome: Outcome) -> Trajectory {
        Trajectory {
            variant: self.variant,
            samples: self.samples,
            commanded: self.commanded,
            outcome,
            traveled_length: self.traveled,
            deviation_max: self.deviation_max,
            saturated_steps: self.saturated_steps,
        }
    }
}

/// Simulates one vehicle along `plan`, which was planned towards
/// `destination`. Abnormal endings are reported through the outcome.
pub fn simulate(
    map: &GridMap,
    plan: &PlanPath,
    destination: Cell,
    variant: Variant,
    current: &CurrentSpec,
    params: &SimParams,
) -> Trajectory {
    let origin = plan.waypoints[0];
    let start = Vector::from(origin);
    let polyline: Vec<Vector> = plan.waypoints.iter().map(|&c| Vector::from(c)).collect();
    let ideal_length = plan
        .length()
        .max(start.distance(&Vector::from(destination)));
    let mut flight = Flight {
        map,
        current,
        params,
        variant,
        polyline,
        time_limit: params.time_limit_factor * ideal_length / params.speed,
        pos: start,
        t: 0.0,
        samples: vec![Sample { t: 0.0, pos: start }],
        commanded: Vec::new(),
        traveled: 0.0,
        deviation_max: 0.0,
        saturated_steps: 0,
    };

    let outcome = match variant {
        Variant::Cbnnp => fly_planned(&mut flight, plan, destination),
        Variant::Bnnp => fly_replanning(&mut flight, destination),
    };
    flight.finish(outcome)
}

fn fly_planned(flight: &mut Flight<'_>, plan: &PlanPath, destination: Cell) -> Outcome {
    for w in plan.waypoints.windows(2) {
        let ended = if w[1] == destination {
            flight.fly_home(destination)
        } else {
            flight.fly_step(w[0], w[1])
        };
        if let Some(outcome) = ended {
            return outcome;
        }
    }
    if flight.captured(destination) {
        Outcome::Reached
    } else {
        Outcome::Fail
    }
}

fn fly_replanning(flight: &mut Flight<'_>, destination: Cell) -> Outcome {
    loop {
        if flight.captured(destination) {
            return Outcome::Reached;
        }
        let here = containing_cell(&flight.pos);
        let next = if here == destination {
            destination
        } else {
            match plan_bnnp(flight.map, here, destination, flight.params.k_g) {
                Ok(p) if p.waypoints.len() >= 2 => p.waypoints[1],
                _ => return Outcome::Fail,
            }
        };
        let ended = if next == destination {
            flight.fly_home(destination)
        } else {
            flight.fly_step(here, next)
        };
        if let Some(outcome) = ended {
            return outcome;
        }
    }
}
