//! Ocean-current velocity as a function of position and time.
//!
//! Angles are configured in degrees, counterclockwise. In 3D the direction is
//! given as an elevation above the X-Y plane and an azimuth measured from +X
//! inside the X-Y plane (the azimuth is the rotation away from the X-Z plane):
//!
//! ```text
//! v = s * (cos(elev) cos(azim), cos(elev) sin(azim), sin(elev))
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::geometry::Vector;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CurrentSpec {
    /// Uniform, time-invariant 2D current.
    Static2d {
        /// m/s
        speed: f64,
        /// Direction in the X-Y plane, degrees from +X.
        direction: f64,
    },
    /// Uniform, time-invariant 3D current.
    Static3d {
        speed: f64,
        /// Degrees to the X-Y plane.
        elevation: f64,
        /// Degrees to the X-Z plane, measured from +X within X-Y.
        azimuth: f64,
    },
    /// Uniform 2D current whose direction and speed oscillate sinusoidally.
    Dynamic2d(DynamicParams),
}

/// `theta(t) = base_angle + angle_amplitude * sin(2 pi t / angle_period)`,
/// `speed(t) = max(0, base_speed + speed_amplitude * sin(2 pi t / speed_period))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DynamicParams {
    pub base_angle: f64,
    pub angle_amplitude: f64,
    pub angle_period: f64,
    pub base_speed: f64,
    pub speed_amplitude: f64,
    pub speed_period: f64,
}

impl Default for DynamicParams {
    fn default() -> Self {
        Self {
            base_angle: 0.0,
            angle_amplitude: 90.0,
            angle_period: 20.0,
            base_speed: 0.3,
            speed_amplitude: 0.2,
            speed_period: 15.0,
        }
    }
}

impl DynamicParams {
    pub fn angle_at(&self, t: f64) -> f64 {
        self.base_angle + self.angle_amplitude * (2.0 * PI * t / self.angle_period).sin()
    }

    pub fn speed_at(&self, t: f64) -> f64 {
        (self.base_speed + self.speed_amplitude * (2.0 * PI * t / self.speed_period).sin()).max(0.0)
    }
}

impl CurrentSpec {
    /// Still water of the given arity.
    pub fn still(dims: usize) -> Self {
        match dims {
            3 => CurrentSpec::Static3d {
                speed: 0.0,
                elevation: 0.0,
                azimuth: 0.0,
            },
            _ => CurrentSpec::Static2d {
                speed: 0.0,
                direction: 0.0,
            },
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            CurrentSpec::Static3d { .. } => 3,
            _ => 2,
        }
    }

    pub fn is_static(&self) -> bool {
        !matches!(self, CurrentSpec::Dynamic2d(_))
    }

    /// Upper bound on the current speed over all time.
    pub fn max_speed(&self) -> f64 {
        match self {
            CurrentSpec::Static2d { speed, .. } | CurrentSpec::Static3d { speed, .. } => *speed,
            CurrentSpec::Dynamic2d(p) => (p.base_speed + p.speed_amplitude.abs()).max(0.0),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let finite = |name: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("current {name} must be finite"))
            }
        };
        match self {
            CurrentSpec::Static2d { speed, direction } => {
                finite("speed", *speed)?;
                finite("direction", *direction)?;
                if *speed < 0.0 {
                    return Err(format!("current speed {speed} is negative"));
                }
            }
            CurrentSpec::Static3d {
                speed,
                elevation,
                azimuth,
            } => {
                finite("speed", *speed)?;
                finite("elevation", *elevation)?;
                finite("azimuth", *azimuth)?;
                if *speed < 0.0 {
                    return Err(format!("current speed {speed} is negative"));
                }
            }
            CurrentSpec::Dynamic2d(p) => {
                for (name, x) in [
                    ("base_angle", p.base_angle),
                    ("angle_amplitude", p.angle_amplitude),
                    ("base_speed", p.base_speed),
                    ("speed_amplitude", p.speed_amplitude),
                ] {
                    finite(name, x)?;
                }
                if !(p.angle_period > 0.0 && p.speed_period > 0.0) {
                    return Err("dynamic current periods must be positive".into());
                }
                if p.base_speed < 0.0 {
                    return Err("dynamic current base speed is negative".into());
                }
            }
        }
        Ok(())
    }

    /// Current velocity at `position` (m) and time `t` (s). All supported
    /// currents are spatially uniform.
    pub fn sample(&self, _position: &Vector, t: f64) -> Vector {
        match *self {
            CurrentSpec::Static2d { speed, direction } => {
                let th = direction.to_radians();
                Vector::new2(speed * th.cos(), speed * th.sin())
            }
            CurrentSpec::Static3d {
                speed,
                elevation,
                azimuth,
            } => {
                let (el, az) = (elevation.to_radians(), azimuth.to_radians());
                Vector::new3(
                    speed * el.cos() * az.cos(),
                    speed * el.cos() * az.sin(),
                    speed * el.sin(),
                )
            }
            CurrentSpec::Dynamic2d(p) => {
                let th = p.angle_at(t).to_radians();
                let s = p.speed_at(t);
                Vector::new2(s * th.cos(), s * th.sin())
            }
        }
    }
}
