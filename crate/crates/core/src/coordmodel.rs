//! The coordinatized model of a tree presentation.
//!
//! Each point of the model is a finite sequence of rationals. The
//! sequence's class path — the class index of each coordinate, see
//! [`crate::rationals::class_of`] — must trace a root-to-leaf path of
//! the tree, and every coordinate under a sum node must be the literal
//! child index. Points compare lexicographically, and two points are
//! related at a node `t` exactly when both class paths pass through
//! `t` and the points agree on the first `|t|` coordinates.
//!
//! The model is virtual: it is infinite whenever the tree has a
//! shuffle node, so membership and relations are computed on demand.
//! [`CoordModel::extend_embedding`] realizes one new point of a finite
//! structure coordinate by coordinate — forced at sum nodes, copied
//! from a witness at shuffle nodes where one exists, and otherwise
//! freshly chosen inside the admissible interval — and
//! [`CoordModel::coordinatize`] iterates it from the empty embedding.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::finstruct::{FinStructure, Violation};
use crate::presentation::{NodeKind, NodePath, TreePresentation};
use crate::rationals::{fresh_in_class_avoiding, nth_prime, try_class_of, ClassIndex, Rat};

/// A model point: one rational per tree level along its leaf path.
pub type CoordPoint = Vec<Rat>;

/// Failures of coordinate-model operations.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CoordError {
    #[error("point ({point}) is not a member of the model")]
    NotAMember { point: String },
    #[error("node path <{path}> does not exist in the tree")]
    UnknownPath { path: NodePath },
    #[error("structure is over a different tree than the model")]
    TreeMismatch,
    #[error("structure fails validation: {}", crate::coordmodel::join_violations(.violations))]
    InvalidStructure { violations: Vec<Violation> },
    #[error("precondition violated: {detail}")]
    Precondition { detail: String },
    #[error("no admissible coordinate for point {point} at level {level}: bounds collide")]
    OrderCollision { point: usize, level: usize },
    #[error("coordinate assignment failed verification: {detail}")]
    VerificationFailed { detail: String },
    #[error("requested {requested} points but the model has only {available}")]
    TooManyPoints { requested: usize, available: usize },
    #[error("sampling stalled after {tries} draws with {produced} of {requested} points")]
    RetryLimit {
        tries: usize,
        produced: usize,
        requested: usize,
    },
}

pub(crate) fn join_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

fn format_point(p: &[Rat]) -> String {
    p.iter()
        .map(|r| r.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// The model of one tree presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoordModel {
    tree: TreePresentation,
}

impl CoordModel {
    pub fn new(tree: TreePresentation) -> Self {
        CoordModel { tree }
    }

    pub fn tree(&self) -> &TreePresentation {
        &self.tree
    }

    /// Whether the coordinate sequence denotes a model point.
    pub fn contains(&self, point: &[Rat]) -> bool {
        self.member_leaf_path(point).is_some()
    }

    /// The leaf path traced by a member's class sequence; `None` for
    /// non-members.
    pub fn class_path(&self, point: &[Rat]) -> Option<NodePath> {
        self.member_leaf_path(point)
    }

    fn member_leaf_path(&self, point: &[Rat]) -> Option<NodePath> {
        let mut node = &self.tree;
        let mut steps = Vec::with_capacity(point.len());
        for r in point {
            let children = node.children();
            if children.is_empty() {
                // The sequence continues past a leaf.
                return None;
            }
            let class = try_class_of(r)?;
            let child = usize::try_from(class).ok()?;
            if child == 0 || child > children.len() {
                return None;
            }
            if matches!(node, TreePresentation::Sum(_)) && *r != child as i64 {
                return None;
            }
            steps.push(child);
            node = &children[child - 1];
        }
        node.is_leaf().then(|| NodePath(steps))
    }

    /// Lexicographic comparison of two members.
    pub fn lex_compare(&self, a: &[Rat], b: &[Rat]) -> Result<Ordering, CoordError> {
        self.require_member(a)?;
        self.require_member(b)?;
        Ok(a.cmp(b))
    }

    fn require_member(&self, p: &[Rat]) -> Result<NodePath, CoordError> {
        self.member_leaf_path(p).ok_or_else(|| CoordError::NotAMember {
            point: format_point(p),
        })
    }

    /// Whether two members are related at node `t`: both class paths
    /// pass through `t` and the first `|t|` coordinates agree. With
    /// `a == b` this tests membership in the `t`-domain.
    pub fn related(&self, t: &NodePath, a: &[Rat], b: &[Rat]) -> Result<bool, CoordError> {
        self.tree
            .node_at(t)
            .map_err(|_| CoordError::UnknownPath { path: t.clone() })?;
        let pa = self.require_member(a)?;
        let pb = self.require_member(b)?;
        Ok(pa.starts_with(t) && pb.starts_with(t) && a[..t.len()] == b[..t.len()])
    }

    /// Extends a verified partial embedding by one point.
    ///
    /// `known` maps already-embedded points of `sup` to their
    /// coordinates; `x` is a point of `sup` outside it. Preconditions
    /// — the induced substructure on `known ∪ {x}` is valid and
    /// `known` is an embedding — are checked, and the extended map is
    /// re-verified before the new coordinates are returned.
    pub fn extend_embedding(
        &self,
        sup: &FinStructure,
        known: &BTreeMap<usize, CoordPoint>,
        x: usize,
    ) -> Result<CoordPoint, CoordError> {
        if *sup.tree() != self.tree {
            return Err(CoordError::TreeMismatch);
        }
        if x >= sup.point_count() {
            return Err(CoordError::Precondition {
                detail: format!("point {x} is out of range"),
            });
        }
        if known.contains_key(&x) {
            return Err(CoordError::Precondition {
                detail: format!("point {x} is already embedded"),
            });
        }
        if let Some(&y) = known.keys().find(|&&y| y >= sup.point_count()) {
            return Err(CoordError::Precondition {
                detail: format!("embedded point {y} is out of range"),
            });
        }
        let mut points: Vec<usize> = known.keys().copied().collect();
        points.push(x);
        points.sort_unstable();
        let violations = sup.induced(&points).validate();
        if !violations.is_empty() {
            return Err(CoordError::InvalidStructure { violations });
        }
        self.verify_partial(sup, known)?;
        let point = self.extend_point(sup, known, x, &[])?;
        let mut extended = known.clone();
        extended.insert(x, point.clone());
        self.verify_partial(sup, &extended)?;
        Ok(point)
    }

    /// Checks that a partial coordinate assignment is an embedding:
    /// members all, ordered like the point indices, agreeing with the
    /// structure's relations at every node.
    fn verify_partial(
        &self,
        sup: &FinStructure,
        known: &BTreeMap<usize, CoordPoint>,
    ) -> Result<(), CoordError> {
        let paths = self.tree.all_paths();
        for (&y, py) in known {
            self.require_member(py)?;
            for (&z, pz) in known.range(y..) {
                if z > y {
                    match py.cmp(pz) {
                        Ordering::Less => {}
                        _ => {
                            return Err(CoordError::VerificationFailed {
                                detail: format!(
                                    "points {y} and {z} are not in increasing coordinate order"
                                ),
                            })
                        }
                    }
                }
                for t in &paths {
                    let declared = sup.related(t, y, z);
                    let realized = self.related(t, py, pz)?;
                    if declared != realized {
                        return Err(CoordError::VerificationFailed {
                            detail: format!(
                                "pair ({y}, {z}) disagrees with its coordinates at node <{t}>"
                            ),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// The unchecked single-point extension step. Coordinates of
    /// points in `avoid` are excluded from free choices, which is how
    /// amalgamation keeps the two sides from colliding.
    pub(crate) fn extend_point(
        &self,
        sup: &FinStructure,
        known: &BTreeMap<usize, CoordPoint>,
        x: usize,
        avoid: &[CoordPoint],
    ) -> Result<CoordPoint, CoordError> {
        let stuck = |detail: String| CoordError::Precondition { detail };
        let t = sup
            .leaf_path_of(x)
            .ok_or_else(|| stuck(format!("point {x} has no unambiguous leaf path")))?;
        let mut out: CoordPoint = Vec::with_capacity(t.len());
        for i in 0..t.len() {
            let here = t.prefix(i);
            let node = self
                .tree
                .node_at(&here)
                .expect("leaf path prefixes are tree nodes");
            let child = t.0[i];
            match node.kind() {
                NodeKind::Leaf => unreachable!("leaf reached before the path ended"),
                NodeKind::Sum => out.push(Rat::from_int(child as i64)),
                NodeKind::Shuffle => {
                    let deeper = t.prefix(i + 1);
                    let witness = known
                        .iter()
                        .find(|(&y, _)| sup.related(&deeper, x, y))
                        .map(|(&y, py)| (y, py));
                    if let Some((y, py)) = witness {
                        let v = py.get(i).ok_or_else(|| {
                            stuck(format!("witness {y} has no coordinate at level {i}"))
                        })?;
                        out.push(v.clone());
                        continue;
                    }
                    let mut lower: Option<Rat> = None;
                    let mut upper: Option<Rat> = None;
                    for (&z, pz) in known {
                        if !sup.related(&here, x, z) {
                            continue;
                        }
                        let v = pz.get(i).ok_or_else(|| {
                            stuck(format!("point {z} has no coordinate at level {i}"))
                        })?;
                        if z < x {
                            if lower.as_ref().map_or(true, |l| v > l) {
                                lower = Some(v.clone());
                            }
                        } else if upper.as_ref().map_or(true, |u| v < u) {
                            upper = Some(v.clone());
                        }
                    }
                    if let (Some(l), Some(u)) = (&lower, &upper) {
                        if l >= u {
                            return Err(CoordError::OrderCollision { point: x, level: i });
                        }
                    }
                    let avoid_here: Vec<Rat> = avoid
                        .iter()
                        .filter_map(|p| p.get(i).cloned())
                        .collect();
                    out.push(fresh_in_class_avoiding(
                        child as ClassIndex,
                        lower.as_ref(),
                        upper.as_ref(),
                        &avoid_here,
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Coordinates for every point of a valid structure, in point
    /// order. Validates the input, then extends the empty embedding
    /// point by point and verifies the result.
    pub fn coordinatize(&self, a: &FinStructure) -> Result<Vec<CoordPoint>, CoordError> {
        if *a.tree() != self.tree {
            return Err(CoordError::TreeMismatch);
        }
        let violations = a.validate();
        if !violations.is_empty() {
            return Err(CoordError::InvalidStructure { violations });
        }
        self.coordinatize_raw(a)
    }

    /// Like [`CoordModel::coordinatize`] but without validating the
    /// input first. The final verification still runs, so invalid
    /// structures fail here with an error rather than succeeding —
    /// this is the "embeddable" side of the axioms-versus-embedding
    /// equivalence, usable on structures that may not satisfy the
    /// axioms.
    pub fn coordinatize_raw(&self, a: &FinStructure) -> Result<Vec<CoordPoint>, CoordError> {
        if *a.tree() != self.tree {
            return Err(CoordError::TreeMismatch);
        }
        let mut known: BTreeMap<usize, CoordPoint> = BTreeMap::new();
        for x in 0..a.point_count() {
            let point = self.extend_point(a, &known, x, &[])?;
            known.insert(x, point);
        }
        let coords: Vec<CoordPoint> = known.into_values().collect();
        self.verify_coordinates(a, &coords)?;
        Ok(coords)
    }

    /// Verifies that `coords[i]` realizes point `i` of the structure:
    /// all members, increasing lexicographically, with exactly the
    /// declared relations at every node.
    pub fn verify_coordinates(
        &self,
        a: &FinStructure,
        coords: &[CoordPoint],
    ) -> Result<(), CoordError> {
        if *a.tree() != self.tree {
            return Err(CoordError::TreeMismatch);
        }
        if coords.len() != a.point_count() {
            return Err(CoordError::VerificationFailed {
                detail: format!(
                    "{} coordinate vectors for {} points",
                    coords.len(),
                    a.point_count()
                ),
            });
        }
        let known: BTreeMap<usize, CoordPoint> = coords
            .iter()
            .enumerate()
            .map(|(i, p)| (i, p.clone()))
            .collect();
        self.verify_partial(a, &known)
    }

    /// The structure induced on a set of member points, with the
    /// points sorted into model order and duplicates removed. Returns
    /// the structure together with the sorted points.
    pub fn structure_from_coords(
        &self,
        coords: &[CoordPoint],
    ) -> Result<(FinStructure, Vec<CoordPoint>), CoordError> {
        let mut points: Vec<CoordPoint> = coords.to_vec();
        points.sort();
        points.dedup();
        let leaf_paths: Vec<NodePath> = points
            .iter()
            .map(|p| self.require_member(p))
            .collect::<Result<_, _>>()?;
        let mut relations: BTreeMap<NodePath, Vec<Vec<usize>>> = BTreeMap::new();
        for t in self.tree.all_paths() {
            let mut classes: Vec<Vec<usize>> = Vec::new();
            let mut current: Vec<usize> = Vec::new();
            for (i, p) in points.iter().enumerate() {
                if !leaf_paths[i].starts_with(&t) {
                    continue;
                }
                match current.last() {
                    Some(&j) if points[j][..t.len()] == p[..t.len()] => current.push(i),
                    Some(_) => {
                        classes.push(std::mem::take(&mut current));
                        current.push(i);
                    }
                    None => current.push(i),
                }
            }
            if !current.is_empty() {
                classes.push(current);
            }
            if !classes.is_empty() {
                relations.insert(t, classes);
            }
        }
        let structure = FinStructure::new(self.tree.clone(), points.len(), relations)
            .map_err(|e| CoordError::VerificationFailed {
                detail: format!("induced relations are malformed: {e}"),
            })?;
        Ok((structure, points))
    }

    /// Draws `n` distinct members at random and returns the induced
    /// structure with its coordinates. Deterministic per seed.
    pub fn sample_substructure(
        &self,
        n: usize,
        seed: u64,
    ) -> Result<(FinStructure, Vec<CoordPoint>), CoordError> {
        if self.tree.is_finite_order() {
            let available = self.tree.leaf_count();
            if n > available {
                return Err(CoordError::TooManyPoints {
                    requested: n,
                    available,
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut set: BTreeSet<CoordPoint> = BTreeSet::new();
        let limit = 4096 + 64 * n;
        let mut tries = 0;
        while set.len() < n {
            tries += 1;
            if tries > limit {
                return Err(CoordError::RetryLimit {
                    tries,
                    produced: set.len(),
                    requested: n,
                });
            }
            set.insert(self.random_member(&mut rng));
        }
        let points: Vec<CoordPoint> = set.into_iter().collect();
        self.structure_from_coords(&points)
    }

    fn random_member(&self, rng: &mut ChaCha8Rng) -> CoordPoint {
        let mut node = &self.tree;
        let mut out = Vec::new();
        while !node.is_leaf() {
            let child = rng.gen_range(1..=node.arity());
            out.push(match node {
                TreePresentation::Sum(_) => Rat::from_int(child as i64),
                TreePresentation::Shuffle(_) => random_in_class(child as ClassIndex, rng),
                TreePresentation::Leaf => unreachable!(),
            });
            node = &node.children()[child - 1];
        }
        out
    }
}

/// A random rational of the given class with a small denominator: a
/// fraction `a / p^e` in lowest terms where `p` is the class's prime,
/// `p^e` stays within a readable bound, and `|a| ≤ 8 p^e`.
fn random_in_class(class: ClassIndex, rng: &mut ChaCha8Rng) -> Rat {
    const DENOM_BOUND: u64 = 1 << 16;
    let p = nth_prime(class);
    let mut max_exp = 1u32;
    while p.checked_pow(max_exp + 1).map_or(false, |v| v <= DENOM_BOUND) {
        max_exp += 1;
    }
    let exp = rng.gen_range(1..=max_exp);
    let denom = p.pow(exp) as i64;
    loop {
        let numer = rng.gen_range(-(8 * denom)..=8 * denom);
        if numer % (p as i64) != 0 {
            return Rat::new(numer, denom);
        }
    }
}
