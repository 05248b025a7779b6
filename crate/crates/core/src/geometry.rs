//! Small fixed-capacity vector type shared by the planner, the current model
//! and the simulator. Works for both 2D and 3D; the unused third component
//! of a 2D vector is always zero.

use std::fmt;
use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gridworld::Cell;

/// A 2D or 3D real vector (positions in m, velocities in m/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vector {
    dims: u8,
    v: [f64; 3],
}

impl Vector {
    pub fn new2(x: f64, y: f64) -> Self {
        Self {
            dims: 2,
            v: [x, y, 0.0],
        }
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Self {
            dims: 3,
            v: [x, y, z],
        }
    }

    /// Zero vector of the given arity (2 or 3).
    pub fn zeros(dims: usize) -> Self {
        assert!(dims == 2 || dims == 3, "vector arity must be 2 or 3");
        Self {
            dims: dims as u8,
            v: [0.0; 3],
        }
    }

    /// Builds a vector from a slice of 2 or 3 components.
    pub fn from_slice(xs: &[f64]) -> Option<Self> {
        match *xs {
            [x, y] => Some(Self::new2(x, y)),
            [x, y, z] => Some(Self::new3(x, y, z)),
            _ => None,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims as usize
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.v[..self.dims()]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (*self - *other).norm()
    }

    /// Unit vector in the same direction, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0).then(|| *self * (1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.as_slice().iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

impl From<Cell> for Vector {
    fn from(cell: Cell) -> Self {
        let c = cell.coords();
        match *c {
            [x, y] => Self::new2(x as f64, y as f64),
            [x, y, z] => Self::new3(x as f64, y as f64, z as f64),
            _ => unreachable!("cells are 2D or 3D"),
        }
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;

    fn add(self, rhs: Vector) -> Vector {
        debug_assert_eq!(self.dims, rhs.dims, "vector arity mismatch");
        Vector {
            dims: self.dims,
            v: [
                self.v[0] + rhs.v[0],
                self.v[1] + rhs.v[1],
                self.v[2] + rhs.v[2],
            ],
        }
    }
}

impl AddAssign for Vector {
    fn add_assign(&mut self, rhs: Vector) {
        *self = *self + rhs;
    }
}

impl Sub for Vector {
    type Output = Vector;

    fn sub(self, rhs: Vector) -> Vector {
        debug_assert_eq!(self.dims, rhs.dims, "vector arity mismatch");
        Vector {
            dims: self.dims,
            v: [
                self.v[0] - rhs.v[0],
                self.v[1] - rhs.v[1],
                self.v[2] - rhs.v[2],
            ],
        }
    }
}

impl Neg for Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;

    fn mul(self, k: f64) -> Vector {
        Vector {
            dims: self.dims,
            v: [self.v[0] * k, self.v[1] * k, self.v[2] * k],
        }
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.as_slice().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{x:.4}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.as_slice().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let xs = Vec::<f64>::deserialize(d)?;
        Vector::from_slice(&xs)
            .ok_or_else(|| serde::de::Error::custom("vector must have 2 or 3 components"))
    }
}

/// Shortest distance from `p` to the segment `a`-`b`.
pub fn point_segment_distance(p: Vector, a: Vector, b: Vector) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(&ab);
    if len2 == 0.0 {
        return p.distance(&a);
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    p.distance(&(a + ab * t))
}

/// Shortest distance from `p` to a polyline. A single-point polyline degrades
/// to point distance.
pub fn point_polyline_distance(p: Vector, polyline: &[Vector]) -> f64 {
    match polyline {
        [] => f64::INFINITY,
        [only] => p.distance(only),
        _ => polyline
            .windows(2)
            .map(|w| point_segment_distance(p, w[0], w[1]))
            .fold(f64::INFINITY, f64::min),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn segment_distance_projects_and_clamps() {
        let a = Vector::new2(0.0, 0.0);
        let b = Vector::new2(2.0, 0.0);
        assert_eq!(point_segment_distance(Vector::new2(1.0, 3.0), a, b), 3.0);
        assert_eq!(point_segment_distance(Vector::new2(5.0, 4.0), a, b), 5.0);
        assert_eq!(point_segment_distance(Vector::new2(-3.0, -4.0), a, b), 5.0);
    }

    #[test]
    fn polyline_distance_takes_nearest_piece() {
        let line = [
            Vector::new2(0.0, 0.0),
            Vector::new2(1.0, 1.0),
            Vector::new2(1.0, 3.0),
        ];
        assert_eq!(point_polyline_distance(Vector::new2(1.0, 2.0), &line), 0.0);
        assert!((point_polyline_distance(Vector::new2(2.0, 2.0), &line) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalized_zero_is_none() {
        assert!(Vector::zeros(3).normalized().is_none());
        let u = Vector::new3(0.0, 3.0, 4.0).normalized().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
    }
}
