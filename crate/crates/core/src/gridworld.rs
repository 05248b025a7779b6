//! Discretized 2D/3D environment: unit cells with binary obstacle occupancy.
//!
//! Cell `(x, y[, z])` is the unit square (cube) centred on those integer
//! coordinates, so a cell side is one metre and cell coordinates double as
//! waypoint positions.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::geometry::Vector;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("grid must be 2D or 3D, got {0} axes")]
    BadDims(usize),
    #[error("extent on axis {axis} must be positive")]
    ZeroExtent { axis: usize },
    #[error("cell {cell} lies outside the map extent {extent:?}")]
    OutOfRange { cell: Cell, extent: Vec<usize> },
    #[error("coordinate arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("obstacle ratio {0} outside [0, 0.9]")]
    RatioOutOfRange(f64),
    #[error("cannot place {needed} obstacles: only {available} unprotected cells remain")]
    Crowded { needed: usize, available: usize },
    #[error("map file: {0}")]
    Io(#[from] std::io::Error),
    #[error("map file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GridError>;

/// Integer grid coordinate with 2 or 3 components.
///
/// Ordering is by arity, then lexicographic by coordinate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    dims: u8,
    c: [i64; 3],
}

impl Cell {
    pub fn new2(x: i64, y: i64) -> Self {
        Self {
            dims: 2,
            c: [x, y, 0],
        }
    }

    pub fn new3(x: i64, y: i64, z: i64) -> Self {
        Self {
            dims: 3,
            c: [x, y, z],
        }
    }

    pub fn from_slice(coords: &[i64]) -> Result<Self> {
        match *coords {
            [x, y] => Ok(Self::new2(x, y)),
            [x, y, z] => Ok(Self::new3(x, y, z)),
            _ => Err(GridError::BadDims(coords.len())),
        }
    }

    pub fn dims(&self) -> usize {
        self.dims as usize
    }

    pub fn coords(&self) -> &[i64] {
        &self.c[..self.dims()]
    }

    /// Chebyshev (max-axis) distance; neighbours are exactly the cells at 1.
    pub fn chebyshev(&self, other: &Cell) -> i64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or(0)
    }

    /// Number of axes on which `self` and `other` differ. For a neighbour step
    /// this is 1 (axis move), 2 (face diagonal) or 3 (space diagonal).
    pub fn axes_changed(&self, other: &Cell) -> usize {
        self.coords()
            .iter()
            .zip(other.coords())
            .filter(|(a, b)| a != b)
            .count()
    }

    fn offset(&self, delta: &[i64]) -> Cell {
        let mut out = *self;
        for (i, d) in delta.iter().enumerate() {
            out.c[i] += d;
        }
        out
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Cell::from_slice(&v).map_err(serde::de::Error::custom)
    }
}

/// Euclidean distance between two cells in metres.
pub fn euclidean_distance(a: &Cell, b: &Cell) -> Result<f64> {
    if a.dims != b.dims {
        return Err(GridError::ArityMismatch {
            expected: a.dims(),
            found: b.dims(),
        });
    }
    Ok(a.coords()
        .iter()
        .zip(b.coords())
        .map(|(p, q)| ((p - q) as f64).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// How random obstacles are laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ObstacleLayout {
    /// Independent single cells, sampled uniformly without replacement.
    #[default]
    Cells,
    /// Axis-aligned blocks with each side drawn from `1..=max_side`.
    Blocks { max_side: usize },
}

/// Occupancy grid over unit cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridMap {
    dims: usize,
    extent: [usize; 3],
    occupied: Vec<bool>,
}

impl GridMap {
    /// Map with exactly the listed cells marked as obstacles. Duplicates are
    /// harmless.
    pub fn build(extent: &[usize], obstacles: &[Cell]) -> Result<Self> {
        let dims = extent.len();
        if dims != 2 && dims != 3 {
            return Err(GridError::BadDims(dims));
        }
        if let Some(axis) = extent.iter().position(|&e| e == 0) {
            return Err(GridError::ZeroExtent { axis });
        }
        let mut ext = [1usize; 3];
        ext[..dims].copy_from_slice(extent);
        let mut map = Self {
            dims,
            extent: ext,
            occupied: vec![false; ext.iter().product()],
        };
        for cell in obstacles {
            map.check_arity(cell)?;
            let idx = map.index(cell).ok_or_else(|| GridError::OutOfRange {
                cell: *cell,
                extent: extent.to_vec(),
            })?;
            map.occupied[idx] = true;
        }
        Ok(map)
    }

    /// Obstacle-free map.
    pub fn empty(extent: &[usize]) -> Result<Self> {
        Self::build(extent, &[])
    }

    /// Seeded random map whose obstacle count is `round(ratio * cells)`.
    ///
    /// Every protected cell and its Chebyshev-1 neighbourhood stays free.
    pub fn random(
        extent: &[usize],
        ratio: f64,
        seed: u64,
        protected: &[Cell],
        layout: ObstacleLayout,
    ) -> Result<Self> {
        if !(0.0..=0.9).contains(&ratio) || ratio.is_nan() {
            return Err(GridError::RatioOutOfRange(ratio));
        }
        let mut map = Self::empty(extent)?;
        for cell in protected {
            map.check_arity(cell)?;
            if !map.contains(cell) {
                return Err(GridError::OutOfRange {
                    cell: *cell,
                    extent: extent.to_vec(),
                });
            }
        }
        let keep_free: BTreeSet<Cell> = protected
            .iter()
            .flat_map(|c| std::iter::once(*c).chain(map.neighbors(c)))
            .collect();
        let mut candidates: Vec<Cell> = map.cells().filter(|c| !keep_free.contains(c)).collect();
        let needed = (ratio * map.cell_count() as f64).round() as usize;
        if needed > candidates.len() {
            return Err(GridError::Crowded {
                needed,
                available: candidates.len(),
            });
        }

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match layout {
            ObstacleLayout::Cells => {
                candidates.shuffle(&mut rng);
                for cell in &candidates[..needed] {
                    let idx = map.index(cell).expect("candidate in range");
                    map.occupied[idx] = true;
                }
            }
            ObstacleLayout::Blocks { max_side } => {
                let max_side = max_side.max(1);
                let mut placed = 0;
                while placed < needed {
                    let anchor = candidates[rng.gen_range(0..candidates.len())];
                    let sides: Vec<i64> = (0..map.dims)
                        .map(|_| rng.gen_range(1..=max_side) as i64)
                        .collect();
                    for cell in map.block_cells(&anchor, &sides) {
                        if placed == needed {
                            break;
                        }
                        if keep_free.contains(&cell) {
                            continue;
                        }
                        let idx = map.index(&cell).expect("block cell in range");
                        if !map.occupied[idx] {
                            map.occupied[idx] = true;
                            placed += 1;
                        }
                    }
                }
            }
        }
        Ok(map)
    }

    fn block_cells(&self, anchor: &Cell, sides: &[i64]) -> Vec<Cell> {
        let mut out = vec![*anchor];
        for (axis, &side) in sides.iter().enumerate() {
            out = out
                .into_iter()
                .flat_map(|c| {
                    (0..side).map(move |k| {
                        let mut d = [0i64; 3];
                        d[axis] = k;
                        c.offset(&d[..c.dims()])
                    })
                })
                .collect();
        }
        out.retain(|c| self.contains(c));
        out
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn extent(&self) -> &[usize] {
        &self.extent[..self.dims]
    }

    pub fn cell_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn obstacle_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Fraction of cells that are obstacles.
    pub fn obstacle_ratio(&self) -> f64 {
        self.obstacle_count() as f64 / self.cell_count() as f64
    }

    fn check_arity(&self, cell: &Cell) -> Result<()> {
        if cell.dims() != self.dims {
            return Err(GridError::ArityMismatch {
                expected: self.dims,
                found: cell.dims(),
            });
        }
        Ok(())
    }

    pub(crate) fn index(&self, cell: &Cell) -> Option<usize> {
        if cell.dims() != self.dims {
            return None;
        }
        let mut idx = 0usize;
        for (axis, &x) in cell.coords().iter().enumerate().rev() {
            if x < 0 || x as usize >= self.extent[axis] {
                return None;
            }
            idx = idx * self.extent[axis] + x as usize;
        }
        Some(idx)
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.index(cell).is_some()
    }

    /// Out-of-map cells are not obstacles; they do not exist.
    pub fn is_obstacle(&self, cell: &Cell) -> bool {
        self.index(cell).is_some_and(|i| self.occupied[i])
    }

    pub fn is_free(&self, cell: &Cell) -> bool {
        self.index(cell).is_some_and(|i| !self.occupied[i])
    }

    /// All cells in lexicographic coordinate order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        let [ex, ey, ez] = self.extent.map(|e| e as i64);
        let dims = self.dims;
        (0..ex).flat_map(move |x| {
            (0..ey).flat_map(move |y| {
                (0..ez).map(move |z| {
                    if dims == 2 {
                        Cell::new2(x, y)
                    } else {
                        Cell::new3(x, y, z)
                    }
                })
            })
        })
    }

    /// Obstacle cells in lexicographic order.
    pub fn obstacles(&self) -> Vec<Cell> {
        self.cells().filter(|c| self.is_obstacle(c)).collect()
    }

    /// In-bounds cells at Chebyshev distance 1, ordered lexicographically by
    /// offset (`-1` before `0` before `+1`, first axis most significant).
    /// Interior cells have 8 neighbours in 2D and 26 in 3D.
    pub fn neighbors(&self, cell: &Cell) -> Vec<Cell> {
        neighbor_offsets(self.dims)
            .iter()
            .map(|d| cell.offset(&d[..self.dims]))
            .filter(|c| self.contains(c))
            .collect()
    }

    /// Position bounds of the map: cell centres span `[0, extent-1]`, cells
    /// extend half a unit either side.
    pub fn contains_point(&self, p: &Vector) -> bool {
        p.as_slice()
            .iter()
            .zip(self.extent())
            .all(|(&x, &e)| x >= -0.5 && x < e as f64 - 0.5)
    }

    pub fn to_file(&self) -> MapFile {
        MapFile {
            dims: self.dims,
            extent: self.extent().to_vec(),
            obstacles: self
                .obstacles()
                .iter()
                .map(|c| c.coords().to_vec())
                .collect(),
        }
    }

    pub fn from_file(file: &MapFile) -> Result<Self> {
        if file.dims != file.extent.len() {
            return Err(GridError::ArityMismatch {
                expected: file.dims,
                found: file.extent.len(),
            });
        }
        let cells = file
            .obstacles
            .iter()
            .map(|c| {
                if c.len() != file.dims {
                    return Err(GridError::ArityMismatch {
                        expected: file.dims,
                        found: c.len(),
                    });
                }
                Cell::from_slice(c)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::build(&file.extent, &cells)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        Self::from_file(&serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(&self.to_file())?)?;
        Ok(())
    }
}

/// On-disk map document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapFile {
    pub dims: usize,
    pub extent: Vec<usize>,
    pub obstacles: Vec<Vec<i64>>,
}

fn neighbor_offsets(dims: usize) -> &'static [[i64; 3]] {
    use std::sync::OnceLock;
    static OFFSETS: OnceLock<[Vec<[i64; 3]>; 2]> = OnceLock::new();
    let tables = OFFSETS.get_or_init(|| {
        let make = |d: usize| {
            let range = |axis: usize| if axis < d { -1..=1 } else { 0..=0 };
            let mut out = Vec::new();
            for dx in range(0) {
                for dy in range(1) {
                    for dz in range(2) {
                        if (dx, dy, dz) != (0, 0, 0) {
                            out.push([dx, dy, dz]);
                        }
                    }
                }
            }
            out
        };
        [make(2), make(3)]
    });
    &tables[dims - 2]
}
