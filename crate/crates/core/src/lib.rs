//! Neural-field path planning on 2D/3D occupancy grids, ocean-current
//! compensation, and a kinematic simulator for comparing compensated and
//! uncompensated vehicles.

pub mod currentfield;
pub mod geometry;
pub mod gridworld;
pub mod guidance;
pub mod harness;
pub mod kinematics;
pub mod neuroplanner;
pub mod oracle;

pub use currentfield::{CurrentSpec, DynamicParams};
pub use geometry::Vector;
pub use gridworld::{Cell, GridMap, ObstacleLayout};
pub use guidance::{plan_cbnnp, CompensatedPlan, GuidanceParams, VelocityTriple};
pub use harness::{run_scenario, RunRecord, ScenarioConfig};
pub use kinematics::{simulate, Outcome, SimParams, Trajectory, Variant};
pub use neuroplanner::{plan_bnnp, PlanPath, PlanStatus};
pub use oracle::{shortest_path, OracleResult};
