//! Discrete-time neural field over the grid and the greedy waypoint planner
//! driven by it.
//!
//! Every cell is a neuron. From the active neuron `j`, each neighbour `i`
//! receives
//!
//! ```text
//! a_i = g(a_j + exp(-|i - D|) + I_i)
//! g(x) = -1 for x < 0, k_g * x otherwise
//! I_i = -1 (obstacle), 0 (covered), +1 (uncovered)
//! ```
//!
//! and the neighbour with the largest activity becomes the next active neuron
//! (first maximum in the fixed neighbour order wins). All activities start
//! at zero; only evaluated candidates change.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gridworld::{euclidean_distance, Cell, GridMap};

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("gain k_g = {0} outside (0, 1]")]
    InvalidGain(f64),
    #[error("endpoint {0} lies outside the map")]
    OutOfBounds(Cell),
    #[error("endpoint {0} is an obstacle")]
    Blocked(Cell),
    #[error("origin and destination coincide at {0}")]
    SameEndpoints(Cell),
    #[error("{candidate} is not a neighbour of {current}")]
    NotNeighbor { current: Cell, candidate: Cell },
    #[error("trapped at {0}: every neighbour is an obstacle")]
    Trapped(Cell),
}

pub type Result<T> = std::result::Result<T, PlanError>;

/// Piecewise-linear transfer function with a hard negative clamp.
pub fn transfer(x: f64, k_g: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        k_g * x
    }
}

/// Activity store plus covered-cell bookkeeping for one planning run.
#[derive(Debug, Clone)]
pub struct NeuralField<'m> {
    map: &'m GridMap,
    activities: Vec<f64>,
    covered: Vec<bool>,
    k_g: f64,
    destination: Cell,
}

impl<'m> NeuralField<'m> {
    pub fn new(map: &'m GridMap, destination: Cell, k_g: f64) -> Result<Self> {
        if !(k_g > 0.0 && k_g <= 1.0) {
            return Err(PlanError::InvalidGain(k_g));
        }
        check_endpoint(map, destination)?;
        Ok(Self {
            map,
            activities: vec![0.0; map.cell_count()],
            covered: vec![false; map.cell_count()],
            k_g,
            destination,
        })
    }

    pub fn k_g(&self) -> f64 {
        self.k_g
    }

    pub fn destination(&self) -> Cell {
        self.destination
    }

    fn idx(&self, cell: &Cell) -> usize {
        self.map.index(cell).expect("cell inside the field's map")
    }

    pub fn activity(&self, cell: &Cell) -> f64 {
        self.activities[self.idx(cell)]
    }

    pub fn is_covered(&self, cell: &Cell) -> bool {
        self.covered[self.idx(cell)]
    }

    pub fn cover(&mut self, cell: &Cell) {
        let i = self.idx(cell);
        self.covered[i] = true;
    }

    /// All stored activities, in map index order.
    pub fn activities(&self) -> &[f64] {
        &self.activities
    }

    /// External input of a cell: obstacle, covered or fresh.
    pub fn external_input(&self, cell: &Cell) -> f64 {
        if self.map.is_obstacle(cell) {
            -1.0
        } else if self.is_covered(cell) {
            0.0
        } else {
            1.0
        }
    }

    /// Activity that `candidate` receives from the active neuron `current`.
    /// The value is stored as the candidate's new activity.
    pub fn candidate_activity(&mut self, current: &Cell, candidate: &Cell) -> Result<f64> {
        if current.chebyshev(candidate) != 1 || !self.map.contains(candidate) {
            return Err(PlanError::NotNeighbor {
                current: *current,
                candidate: *candidate,
            });
        }
        let dist = euclidean_distance(candidate, &self.destination).expect("same arity");
        let a = transfer(
            self.activity(current) + (-dist).exp() + self.external_input(candidate),
            self.k_g,
        );
        let i = self.idx(candidate);
        self.activities[i] = a;
        Ok(a)
    }

    /// Evaluates every neighbour of `current` and returns the most active
    /// non-obstacle one.
    pub fn select_next(&mut self, current: &Cell) -> Result<(Cell, f64)> {
        let mut best: Option<(Cell, f64)> = None;
        for n in self.map.neighbors(current) {
            let a = self.candidate_activity(current, &n)?;
            if self.map.is_obstacle(&n) {
                continue;
            }
            if best.is_none_or(|(_, b)| a > b) {
                best = Some((n, a));
            }
        }
        best.ok_or(PlanError::Trapped(*current))
    }
}

fn check_endpoint(map: &GridMap, cell: Cell) -> Result<()> {
    if !map.contains(&cell) {
        return Err(PlanError::OutOfBounds(cell));
    }
    if map.is_obstacle(&cell) {
        return Err(PlanError::Blocked(cell));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanStatus {
    Reached,
    Trapped,
    StepLimit,
}

impl fmt::Display for PlanStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanStatus::Reached => "reached",
            PlanStatus::Trapped => "trapped",
            PlanStatus::StepLimit => "step_limit",
        })
    }
}

/// Waypoints produced by the planner. Consecutive waypoints are grid
/// neighbours and none is an obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanPath {
    pub waypoints: Vec<Cell>,
    pub status: PlanStatus,
}

impl PlanPath {
    pub fn is_reached(&self) -> bool {
        self.status == PlanStatus::Reached
    }

    /// Polyline length in metres.
    pub fn length(&self) -> f64 {
        cell_path_length(&self.waypoints)
    }

    /// Number of axis, face-diagonal and space-diagonal steps.
    pub fn step_profile(&self) -> [usize; 3] {
        step_profile(&self.waypoints)
    }
}

pub(crate) fn cell_path_length(cells: &[Cell]) -> f64 {
    cells
        .windows(2)
        .map(|w| euclidean_distance(&w[0], &w[1]).expect("same arity"))
        .sum()
}

/// Counts steps by how many axes they change: `[1-axis, 2-axis, 3-axis]`.
pub fn step_profile(cells: &[Cell]) -> [usize; 3] {
    let mut out = [0; 3];
    for w in cells.windows(2) {
        let k = w[0].axes_changed(&w[1]);
        if (1..=3).contains(&k) {
            out[k - 1] += 1;
        }
    }
    out
}

/// A cell entered this many times ends the run as trapped.
const MAX_ENTRIES: u32 = 3;

/// Step budget of a run: four times the sum of the extents.
pub fn step_limit(map: &GridMap) -> usize {
    4 * map.extent().iter().sum::<usize>()
}

/// Greedy neural-field planning from `origin` to `destination`.
pub fn plan_bnnp(map: &GridMap, origin: Cell, destination: Cell, k_g: f64) -> Result<PlanPath> {
    let mut field = NeuralField::new(map, destination, k_g)?;
    check_endpoint(map, origin)?;
    if origin == destination {
        return Err(PlanError::SameEndpoints(origin));
    }

    let mut entries = vec![0u32; map.cell_count()];
    let mut waypoints = vec![origin];
    let mut current = origin;
    entries[map.index(&origin).expect("checked")] = 1;
    field.cover(&origin);

    let limit = step_limit(map);
    let status = loop {
        if current == destination {
            break PlanStatus::Reached;
        }
        if waypoints.len() > limit {
            break PlanStatus::StepLimit;
        }
        let next = match field.select_next(&current) {
            Ok((next, _)) => next,
            Err(PlanError::Trapped(_)) => break PlanStatus::Trapped,
            Err(e) => return Err(e),
        };
        let count = &mut entries[map.index(&next).expect("neighbour in map")];
        *count += 1;
        if *count >= MAX_ENTRIES {
            break PlanStatus::Trapped;
        }
        field.cover(&next);
        waypoints.push(next);
        current = next;
    };
    Ok(PlanPath { waypoints, status })
}
