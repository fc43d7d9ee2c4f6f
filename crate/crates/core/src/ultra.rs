//! Finite convexly ordered ultrametric spaces, and their two-way
//! translation with structures over iterated one-leaf shuffles.
//!
//! A space over the distance set `s_1 < … < s_m` corresponds to a
//! structure over the `m`-fold tower `sigma(sigma(…(1)…))`: two points
//! are related at tower level `i` exactly when their distance is at
//! most `s_i` (with `s_0 = 0` at the leaf, relating only equal
//! points). Balls are order-convex, which is what makes the threshold
//! relations convex classes; the ultrametric inequality makes them
//! equivalence relations.

use std::collections::BTreeMap;

use crate::finstruct::{FinStructure, Violation};
use crate::presentation::{NodePath, TreePresentation};
use crate::rationals::Rat;

/// Failures of space construction or translation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum UltraError {
    #[error("distance rows have the wrong shape: {detail}")]
    Shape { detail: String },
    #[error("the distance set must be strictly increasing and positive")]
    BadDistanceSet,
    #[error("distance between points {x} and {y} is not in the distance set")]
    OutsideSet { x: usize, y: usize },
    #[error("ultrametric inequality fails on points ({x}, {y}, {z})")]
    Ultrametric { x: usize, y: usize, z: usize },
    #[error("convex ordering fails on points ({x}, {y}, {z})")]
    Convexity { x: usize, y: usize, z: usize },
    #[error("structure is not over the {m}-level one-leaf shuffle tower")]
    WrongTree { m: usize },
    #[error("structure fails validation: {}", crate::coordmodel::join_violations(.violations))]
    InvalidStructure { violations: Vec<Violation> },
}

/// A finite ultrametric space whose points are ordered `0..n` and
/// whose balls are intervals of that order. Distances between distinct
/// points are drawn from the fixed set returned by
/// [`UltraSpace::distances`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UltraSpace {
    n: usize,
    distances: Vec<Rat>,
    matrix: Vec<Vec<Rat>>,
}

impl UltraSpace {
    /// Builds a space from its distance set and the upper triangle of
    /// its distance matrix: row `i` holds `d(i, i+1), …, d(i, n-1)`.
    /// All invariants are checked.
    pub fn new(distances: Vec<Rat>, n: usize, upper: Vec<Vec<Rat>>) -> Result<Self, UltraError> {
        if !distances.windows(2).all(|w| w[0] < w[1]) {
            return Err(UltraError::BadDistanceSet);
        }
        if distances.first().map_or(false, |s| !s.is_positive()) {
            return Err(UltraError::BadDistanceSet);
        }
        let expected_rows = n.saturating_sub(1);
        if upper.len() != expected_rows {
            return Err(UltraError::Shape {
                detail: format!("{} rows for {} points", upper.len(), n),
            });
        }
        for (i, row) in upper.iter().enumerate() {
            if row.len() != n - 1 - i {
                return Err(UltraError::Shape {
                    detail: format!("row {i} has {} of {} entries", row.len(), n - 1 - i),
                });
            }
        }
        let zero = Rat::from_int(0);
        let mut matrix = vec![vec![zero; n]; n];
        for (i, row) in upper.iter().enumerate() {
            for (k, v) in row.iter().enumerate() {
                let j = i + 1 + k;
                matrix[i][j] = v.clone();
                matrix[j][i] = v.clone();
            }
        }
        let space = UltraSpace {
            n,
            distances,
            matrix,
        };
        space.check_invariants()?;
        Ok(space)
    }

    fn check_invariants(&self) -> Result<(), UltraError> {
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if self.distances.binary_search(&self.matrix[x][y]).is_err() {
                    return Err(UltraError::OutsideSet { x, y });
                }
            }
        }
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                for z in (y + 1)..self.n {
                    let (xy, yz, xz) = (&self.matrix[x][y], &self.matrix[y][z], &self.matrix[x][z]);
                    if xz > xy.max(yz) {
                        return Err(UltraError::Ultrametric { x, y, z });
                    }
                    if xy > xz || yz > xz {
                        return Err(UltraError::Convexity { x, y, z });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    /// The ordered distance set `s_1 < … < s_m`.
    pub fn distances(&self) -> &[Rat] {
        &self.distances
    }

    pub fn distance(&self, x: usize, y: usize) -> &Rat {
        &self.matrix[x][y]
    }

    /// The upper triangle, row `i` holding `d(i, i+1), …, d(i, n-1)` —
    /// the file representation.
    pub fn upper_triangle(&self) -> Vec<Vec<Rat>> {
        (0..self.n.saturating_sub(1))
            .map(|i| self.matrix[i][i + 1..].to_vec())
            .collect()
    }

    /// The structure over the tower tree whose level-`i` relation
    /// holds between points at distance at most `s_i`.
    pub fn to_structure(&self) -> FinStructure {
        let m = self.distances.len();
        let mut relations: BTreeMap<NodePath, Vec<Vec<usize>>> = BTreeMap::new();
        if self.n > 0 {
            for level in 0..=m {
                let mut classes: Vec<Vec<usize>> = Vec::new();
                for x in 0..self.n {
                    let joins = match classes.last() {
                        Some(class) if level > 0 => {
                            self.matrix[class[0]][x] <= self.distances[level - 1]
                        }
                        _ => false,
                    };
                    if joins {
                        classes.last_mut().expect("class exists").push(x);
                    } else {
                        classes.push(vec![x]);
                    }
                }
                relations.insert(level_path(m, level), classes);
            }
        }
        FinStructure::new(tower_tree(m), self.n, relations)
            .expect("threshold classes are well-formed")
    }
}

/// The `m`-fold one-leaf shuffle tower: `m = 0` is the leaf, `m = 2`
/// is `sigma(sigma(1))`.
pub fn tower_tree(m: usize) -> TreePresentation {
    let mut tree = TreePresentation::Leaf;
    for _ in 0..m {
        tree = TreePresentation::shuffle(vec![tree]);
    }
    tree
}

/// The node paths of the tower from leaf to root: entry `i` is the
/// level whose relation corresponds to the threshold `s_i`.
pub fn level_paths(m: usize) -> Vec<NodePath> {
    (0..=m).map(|i| level_path(m, i)).collect()
}

fn level_path(m: usize, level: usize) -> NodePath {
    NodePath(vec![1; m - level])
}

/// Reads a space off a valid structure over the `|distances|`-level
/// tower: the distance of a pair is the threshold of the lowest level
/// relating it.
pub fn to_ultrametric(a: &FinStructure, distances: &[Rat]) -> Result<UltraSpace, UltraError> {
    let m = distances.len();
    if *a.tree() != tower_tree(m) {
        return Err(UltraError::WrongTree { m });
    }
    let violations = a.validate();
    if !violations.is_empty() {
        return Err(UltraError::InvalidStructure { violations });
    }
    let n = a.point_count();
    let levels = level_paths(m);
    let mut upper: Vec<Vec<Rat>> = Vec::with_capacity(n.saturating_sub(1));
    for x in 0..n.saturating_sub(1) {
        let mut row = Vec::with_capacity(n - 1 - x);
        for y in (x + 1)..n {
            let level = (1..=m)
                .find(|&i| a.related(&levels[i], x, y))
                .expect("the root relation joins all points of a valid structure");
            row.push(distances[level - 1].clone());
        }
        upper.push(row);
    }
    UltraSpace::new(distances.to_vec(), n, upper)
}

/// All strictly increasing, distance-preserving maps of `small` into
/// `big` — the spaces' counterpart of embedding enumeration, computed
/// without any structure translation.
pub fn enumerate_isometries(small: &UltraSpace, big: &UltraSpace) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(small.n);
    descend(small, big, &mut map, &mut out);
    out
}

fn descend(small: &UltraSpace, big: &UltraSpace, map: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let x = map.len();
    if x == small.n {
        out.push(map.clone());
        return;
    }
    let start = map.last().map_or(0, |&u| u + 1);
    let room = small.n - x - 1;
    for u in start..big.n.saturating_sub(room) {
        if (0..x).all(|i| small.distance(i, x) == big.distance(map[i], u)) {
            map.push(u);
            descend(small, big, map, out);
            map.pop();
        }
    }
}
