//! Scenario configuration document (JSON, versioned).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::currentfield::CurrentSpec;
use crate::gridworld::{Cell, GridMap, ObstacleLayout};
use crate::kinematics::{SimParams, Variant};

pub const SCHEMA_VERSION: u32 = 1;

/// Where the scenario's map comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSource {
    Empty {
        extent: Vec<usize>,
    },
    File {
        path: PathBuf,
    },
    Random {
        extent: Vec<usize>,
        ratio: f64,
        seed: u64,
        #[serde(default)]
        layout: ObstacleLayout,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum VariantSelection {
    Bnnp,
    Cbnnp,
    #[default]
    Both,
}

impl VariantSelection {
    pub fn variants(&self) -> Vec<Variant> {
        match self {
            VariantSelection::Bnnp => vec![Variant::Bnnp],
            VariantSelection::Cbnnp => vec![Variant::Cbnnp],
            VariantSelection::Both => vec![Variant::Cbnnp, Variant::Bnnp],
        }
    }
}

impl std::str::FromStr for VariantSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bnnp" => Ok(VariantSelection::Bnnp),
            "cbnnp" => Ok(VariantSelection::Cbnnp),
            "both" => Ok(VariantSelection::Both),
            other => Err(format!("unknown variant `{other}` (bnnp | cbnnp | both)")),
        }
    }
}

/// Simulation settings as they appear in the config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub dt: f64,
    pub capture_radius: f64,
    pub v_max: f64,
    pub time_limit_factor: f64,
    pub cap_saturation: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        let p = SimParams::default();
        Self {
            dt: p.dt,
            capture_radius: p.capture_radius,
            v_max: p.v_max,
            time_limit_factor: p.time_limit_factor,
            cap_saturation: p.cap_saturation,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub version: u32,
    pub name: String,
    pub map: MapSource,
    /// Defaults to (2,1) or (2,1,1).
    pub origin: Option<Cell>,
    /// Defaults to (9,9) or (9,9,9).
    pub destination: Option<Cell>,
    pub k_g: f64,
    /// m/s
    pub desired_speed: f64,
    /// Defaults to 0.05 m/s along +X.
    pub current: Option<CurrentSpec>,
    pub variant: VariantSelection,
    pub sim: SimSettings,
    pub out_dir: Option<PathBuf>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            version: SCHEMA_VERSION,
            name: "scenario".into(),
            map: MapSource::Empty {
                extent: vec![10, 10],
            },
            origin: None,
            destination: None,
            k_g: 0.5,
            desired_speed: 1.0,
            current: None,
            variant: VariantSelection::Both,
            sim: SimSettings::default(),
            out_dir: None,
        }
    }
}

impl ScenarioConfig {
    pub fn default_3d() -> Self {
        Self {
            map: MapSource::Empty {
                extent: vec![10, 10, 10],
            },
            ..Self::default()
        }
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)?;
        let mut cfg: Self = serde_json::from_str(&text)?;
        // relative map paths are resolved against the config's directory
        if let MapSource::File { path: map_path } = &mut cfg.map {
            if map_path.is_relative() {
                if let Some(dir) = path.parent() {
                    *map_path = dir.join(&*map_path);
                }
            }
        }
        Ok(cfg)
    }

    pub fn dims(&self) -> usize {
        match &self.map {
            MapSource::Empty { extent } | MapSource::Random { extent, .. } => extent.len(),
            MapSource::File { path } => GridMap::load(path).map(|m| m.dims()).unwrap_or(2),
        }
    }

    pub fn origin(&self) -> Cell {
        self.origin.unwrap_or(if self.dims() == 3 {
            Cell::new3(2, 1, 1)
        } else {
            Cell::new2(2, 1)
        })
    }

    pub fn destination(&self) -> Cell {
        self.destination.unwrap_or(if self.dims() == 3 {
            Cell::new3(9, 9, 9)
        } else {
            Cell::new2(9, 9)
        })
    }

    pub fn current(&self) -> CurrentSpec {
        self.current.unwrap_or(if self.dims() == 3 {
            CurrentSpec::Static3d {
                speed: 0.05,
                elevation: 0.0,
                azimuth: 0.0,
            }
        } else {
            CurrentSpec::Static2d {
                speed: 0.05,
                direction: 0.0,
            }
        })
    }

    pub fn sim_params(&self) -> SimParams {
        SimParams {
            dt: self.sim.dt,
            capture_radius: self.sim.capture_radius,
            time_limit_factor: self.sim.time_limit_factor,
            speed: self.desired_speed,
            k_g: self.k_g,
            v_max: self.sim.v_max,
            cap_saturation: self.sim.cap_saturation,
        }
    }

    /// Overrides the seed of a random map source.
    pub fn set_seed(&mut self, new_seed: u64) {
        if let MapSource::Random { seed, .. } = &mut self.map {
            *seed = new_seed;
        }
    }

    pub fn build_map(&self) -> Result<GridMap, HarnessError> {
        Ok(match &self.map {
            MapSource::Empty { extent } => GridMap::empty(extent)?,
            MapSource::File { path } => GridMap::load(path)?,
            MapSource::Random {
                extent,
                ratio,
                seed,
                layout,
            } => GridMap::random(
                extent,
                *ratio,
                *seed,
                &[self.origin(), self.destination()],
                *layout,
            )?,
        })
    }

    /// Checks every field and returns the map the scenario runs on.
    pub fn validate(&self) -> Result<GridMap, HarnessError> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.version != SCHEMA_VERSION {
            return bad(format!(
                "unsupported config version {} (expected {SCHEMA_VERSION})",
                self.version
            ));
        }
        if !(self.k_g > 0.0 && self.k_g <= 1.0) {
            return bad(format!("k_g = {} outside (0, 1]", self.k_g));
        }
        if !(self.desired_speed > 0.0 && self.desired_speed.is_finite()) {
            return bad(format!(
                "desired_speed = {} must be positive",
                self.desired_speed
            ));
        }
        let s = &self.sim;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return bad(format!("sim.dt = {} must be positive", s.dt));
        }
        if !(s.capture_radius > 0.0 && s.capture_radius < 0.5) {
            return bad(format!(
                "sim.capture_radius = {} outside (0, 0.5)",
                s.capture_radius
            ));
        }
        if s.v_max.is_nan() || s.v_max <= 0.0 {
            return bad(format!("sim.v_max = {} must be positive", s.v_max));
        }
        if s.time_limit_factor.is_nan() || s.time_limit_factor < 1.0 {
            return bad(format!(
                "sim.time_limit_factor = {} must be >= 1",
                s.time_limit_factor
            ));
        }
        let current = self.current();
        current.validate().map_err(HarnessError::Config)?;

        let map = self.build_map()?;
        if current.dims() != map.dims() {
            return bad(format!(
                "current is {}D but the map is {}D",
                current.dims(),
                map.dims()
            ));
        }
        let (o, d) = (self.origin(), self.destination());
        for (role, c) in [("origin", o), ("destination", d)] {
            if c.dims() != map.dims() {
                return bad(format!("{role} {c} does not match the {}D map", map.dims()));
            }
            if !map.contains(&c) {
                return bad(format!("{role} {c} lies outside the map"));
            }
            if map.is_obstacle(&c) {
                return bad(format!("{role} {c} is an obstacle"));
            }
        }
        if o == d {
            return bad(format!("origin and destination coincide at {o}"));
        }
        Ok(map)
    }
}
