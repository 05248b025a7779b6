//! Exact shortest paths on the 8-/26-connected grid graph (edge weights
//! 1, sqrt 2, sqrt 3), used as a reference for the neural-field planner.
//!
//! Diagonal moves are allowed between any two free cells, including past an
//! obstacle sharing the corner, the same rule the planner uses.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::gridworld::{euclidean_distance, Cell, GridMap};
use crate::neuroplanner::{cell_path_length, step_profile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    /// Metres; `f64::INFINITY` when the destination is unreachable.
    pub length: f64,
    /// Empty when unreachable.
    pub path: Vec<Cell>,
}

impl OracleResult {
    pub fn is_reachable(&self) -> bool {
        self.length.is_finite()
    }

    pub fn step_profile(&self) -> [usize; 3] {
        step_profile(&self.path)
    }
}

#[derive(PartialEq)]
struct Entry {
    dist: f64,
    cell: Cell,
}

impl Eq for Entry {}

impl Ord for Entry {
    // min-heap on distance, then on cell
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.cell.cmp(&self.cell))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra from `origin` to `destination`. Endpoints must be free cells of
/// `map`; otherwise the result is unreachable. Equal-cost predecessors are
/// resolved towards the lexicographically smaller cell.
pub fn shortest_path(map: &GridMap, origin: Cell, destination: Cell) -> OracleResult {
    let unreachable = OracleResult {
        length: f64::INFINITY,
        path: Vec::new(),
    };
    if !map.is_free(&origin) || !map.is_free(&destination) {
        return unreachable;
    }
    let idx = |c: &Cell| map.index(c).expect("cell in map");
    let n = map.cell_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<Cell>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();

    dist[idx(&origin)] = 0.0;
    heap.push(Entry {
        dist: 0.0,
        cell: origin,
    });
    while let Some(Entry { dist: d, cell }) = heap.pop() {
        let i = idx(&cell);
        if done[i] {
            continue;
        }
        done[i] = true;
        if cell == destination {
            break;
        }
        for nb in map.neighbors(&cell) {
            if map.is_obstacle(&nb) {
                continue;
            }
            let j = idx(&nb);
            if done[j] {
                continue;
            }
            let cand = d + euclidean_distance(&cell, &nb).expect("same arity");
            let better = cand < dist[j] || (cand == dist[j] && pred[j].is_some_and(|p| cell < p));
            if better {
                dist[j] = cand;
                pred[j] = Some(cell);
                heap.push(Entry {
                    dist: cand,
                    cell: nb,
                });
            }
        }
    }

    if !done[idx(&destination)] {
        return unreachable;
    }
    let mut path = vec![destination];
    let mut cur = destination;
    while let Some(p) = pred[idx(&cur)] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    OracleResult {
        length: cell_path_length(&path),
        path,
    }
}
