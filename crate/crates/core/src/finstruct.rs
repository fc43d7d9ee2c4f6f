//! Finite ordered structures over a tree presentation: validation,
//! isomorphism and embedding enumeration, exhaustive generation, and
//! constructive amalgamation.
//!
//! A [`FinStructure`] carries `n` points, identified with `0..n` in
//! order, and for each node path `t` of the tree a partial equivalence
//! relation `E_t` stored as a partition into classes. The axioms
//! checked by [`FinStructure::validate`] carve out exactly the finite
//! structures that embed into the coordinatized model of the tree
//! (see [`crate::coordmodel`]), which is what
//! [`amalgamate`] exploits: it embeds both sides into the model and
//! reads the amalgam off the union of the coordinate images.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coordmodel::{CoordModel, CoordPoint};
use crate::presentation::{NodeKind, NodePath, TreePresentation};

/// An order-preserving injection between structures over one tree,
/// stored as the image index of each point.
pub type Embedding = Vec<usize>;

/// Errors from structure construction and the operations over
/// structures. Construction rejects malformed data; semantic axiom
/// failures are reported by [`FinStructure::validate`] instead.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("node path <{path}> does not exist in the tree")]
    UnknownPath { path: NodePath },
    #[error("point {point} at node <{path}> is out of range for {count} points")]
    PointOutOfRange {
        path: NodePath,
        point: usize,
        count: usize,
    },
    #[error("empty class at node <{path}>")]
    EmptyClass { path: NodePath },
    #[error("point {point} occurs in more than one class at node <{path}>")]
    OverlappingClasses { path: NodePath, point: usize },
    #[error("structures are over different trees")]
    TreeMismatch,
    #[error("map is not an embedding: {detail}")]
    NotAnEmbedding { detail: String },
    #[error("{role} structure fails validation: {}", summarize(.violations))]
    InvalidStructure {
        role: &'static str,
        violations: Vec<Violation>,
    },
    #[error("enumeration exceeded the cap of {cap} structures")]
    CapExceeded { cap: usize },
    #[error("coordinate construction failed: {detail}")]
    CoordinateConstruction { detail: String },
    #[error("amalgam failed its own verification: {detail}")]
    ConstructionFailed { detail: String },
}

fn summarize(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// The axiom groups a structure can break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// Every class is an interval of points.
    Convexity,
    /// The root relation is a single class containing every point.
    RootClass,
    /// Classes at leaf nodes are singletons.
    LeafSingletons,
    /// An internal node's domain is the disjoint union of its
    /// children's domains.
    DomainPartition,
    /// Each child-node class lies inside a single class of the parent
    /// node.
    ClassNesting,
    /// Within a class of a sum node, points appear in child order and
    /// same-child points share one child class.
    SumLayout,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Axiom::Convexity => "convexity",
            Axiom::RootClass => "root-class",
            Axiom::LeafSingletons => "leaf-singletons",
            Axiom::DomainPartition => "domain-partition",
            Axiom::ClassNesting => "class-nesting",
            Axiom::SumLayout => "sum-layout",
        };
        f.write_str(name)
    }
}

/// One reported axiom failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub axiom: Axiom,
    pub path: NodePath,
    pub points: Vec<usize>,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} violation at node <{}> (points {:?}): {}",
            self.axiom, self.path, self.points, self.detail
        )
    }
}

/// A finite structure over a tree presentation.
///
/// Stored in a normal form — classes sorted internally and by least
/// member, empty relation entries dropped — so structural equality is
/// isomorphism for structures over the same tree.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FinStructure {
    tree: TreePresentation,
    n: usize,
    relations: BTreeMap<NodePath, Vec<Vec<usize>>>,
}

impl FinStructure {
    /// Builds a structure, normalizing the relation storage. Rejects
    /// malformed data (unknown paths, out-of-range points, empty or
    /// overlapping classes); axiom failures are left to
    /// [`FinStructure::validate`].
    pub fn new(
        tree: TreePresentation,
        n: usize,
        relations: BTreeMap<NodePath, Vec<Vec<usize>>>,
    ) -> Result<Self, StructureError> {
        let mut normalized = BTreeMap::new();
        for (path, classes) in relations {
            if tree.node_at(&path).is_err() {
                return Err(StructureError::UnknownPath { path });
            }
            let mut cleaned: Vec<Vec<usize>> = Vec::with_capacity(classes.len());
            let mut seen: BTreeSet<usize> = BTreeSet::new();
            for class in classes {
                if class.is_empty() {
                    return Err(StructureError::EmptyClass { path });
                }
                let mut class = class;
                class.sort_unstable();
                for &point in &class {
                    if point >= n {
                        return Err(StructureError::PointOutOfRange {
                            path,
                            point,
                            count: n,
                        });
                    }
                    if !seen.insert(point) {
                        return Err(StructureError::OverlappingClasses { path, point });
                    }
                }
                cleaned.push(class);
            }
            if !cleaned.is_empty() {
                cleaned.sort();
                normalized.insert(path, cleaned);
            }
        }
        Ok(FinStructure {
            tree,
            n,
            relations: normalized,
        })
    }

    /// The structure with no points.
    pub fn empty(tree: TreePresentation) -> Self {
        FinStructure {
            tree,
            n: 0,
            relations: BTreeMap::new(),
        }
    }

    pub fn tree(&self) -> &TreePresentation {
        &self.tree
    }

    pub fn point_count(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn relations(&self) -> &BTreeMap<NodePath, Vec<Vec<usize>>> {
        &self.relations
    }

    /// The classes of the relation at a node; empty when none are
    /// declared there.
    pub fn classes_at(&self, path: &NodePath) -> &[Vec<usize>] {
        self.relations.get(path).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Index of the class containing a point at a node, if any.
    pub fn class_index_of(&self, path: &NodePath, point: usize) -> Option<usize> {
        self.classes_at(path)
            .iter()
            .position(|class| class.binary_search(&point).is_ok())
    }

    /// Whether a point belongs to the node's domain.
    pub fn in_domain(&self, path: &NodePath, point: usize) -> bool {
        self.class_index_of(path, point).is_some()
    }

    /// Whether two points are related at a node. With `x == y` this
    /// tests domain membership.
    pub fn related(&self, path: &NodePath, x: usize, y: usize) -> bool {
        match (self.class_index_of(path, x), self.class_index_of(path, y)) {
            (Some(a), Some(b)) => a == b,
            _ => false,
        }
    }

    /// The full leaf path of a point, read off the relations by
    /// descending through the unique child domain containing it at
    /// each node. `None` when the descent is ambiguous or stuck, which
    /// only happens on invalid structures.
    pub fn leaf_path_of(&self, point: usize) -> Option<NodePath> {
        let mut path = NodePath::root();
        if !self.in_domain(&path, point) {
            return None;
        }
        loop {
            let node = self.tree.node_at(&path).ok()?;
            if node.is_leaf() {
                return Some(path);
            }
            let mut found = None;
            for i in 1..=node.arity() {
                if self.in_domain(&path.child(i), point) {
                    if found.is_some() {
                        return None;
                    }
                    found = Some(i);
                }
            }
            path = path.child(found?);
        }
    }

    /// Checks every axiom and reports each failure. An empty result
    /// means the structure belongs to the class of finite structures
    /// embeddable into the coordinatized model.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let root = NodePath::root();
        if self.n > 0 {
            let classes = self.classes_at(&root);
            let all: Vec<usize> = (0..self.n).collect();
            if classes.len() != 1 || classes[0] != all {
                out.push(Violation {
                    axiom: Axiom::RootClass,
                    path: root,
                    points: Vec::new(),
                    detail: "the root relation must be one class containing every point".into(),
                });
            }
        }
        for path in self.tree.all_paths() {
            let node = self.tree.node_at(&path).expect("enumerated path exists");
            let classes = self.classes_at(&path);
            for class in classes {
                let (first, last) = (class[0], *class.last().expect("nonempty class"));
                if last - first + 1 != class.len() {
                    out.push(Violation {
                        axiom: Axiom::Convexity,
                        path: path.clone(),
                        points: class.clone(),
                        detail: "class is not an interval of points".into(),
                    });
                }
            }
            if node.is_leaf() {
                for class in classes {
                    if class.len() > 1 {
                        out.push(Violation {
                            axiom: Axiom::LeafSingletons,
                            path: path.clone(),
                            points: class.clone(),
                            detail: "leaf classes must be singletons".into(),
                        });
                    }
                }
                continue;
            }
            let arity = node.arity();
            for class in classes {
                for &x in class {
                    let owners = (1..=arity)
                        .filter(|&i| self.in_domain(&path.child(i), x))
                        .count();
                    if owners == 0 {
                        out.push(Violation {
                            axiom: Axiom::DomainPartition,
                            path: path.clone(),
                            points: vec![x],
                            detail: "point belongs to no child domain".into(),
                        });
                    } else if owners > 1 {
                        out.push(Violation {
                            axiom: Axiom::DomainPartition,
                            path: path.clone(),
                            points: vec![x],
                            detail: "point belongs to more than one child domain".into(),
                        });
                    }
                }
            }
            for i in 1..=arity {
                let child = path.child(i);
                for class in self.classes_at(&child) {
                    let stray: Vec<usize> = class
                        .iter()
                        .copied()
                        .filter(|&x| !self.in_domain(&path, x))
                        .collect();
                    if !stray.is_empty() {
                        out.push(Violation {
                            axiom: Axiom::DomainPartition,
                            path: child.clone(),
                            points: stray,
                            detail: "class contains points outside the parent domain".into(),
                        });
                    }
                    let parents: BTreeSet<usize> = class
                        .iter()
                        .filter_map(|&x| self.class_index_of(&path, x))
                        .collect();
                    if parents.len() > 1 {
                        out.push(Violation {
                            axiom: Axiom::ClassNesting,
                            path: child.clone(),
                            points: class.clone(),
                            detail: "class spans several classes of the parent relation".into(),
                        });
                    }
                }
            }
            if node.kind() == NodeKind::Sum {
                for class in classes {
                    self.check_sum_layout(&path, arity, class, &mut out);
                }
            }
        }
        out
    }

    fn check_sum_layout(
        &self,
        path: &NodePath,
        arity: usize,
        class: &[usize],
        out: &mut Vec<Violation>,
    ) {
        // Points with an ambiguous or missing child are already
        // reported under the domain-partition axiom.
        let owner = |x: usize| {
            let mut owners = (1..=arity).filter(|&i| self.in_domain(&path.child(i), x));
            match (owners.next(), owners.next()) {
                (Some(i), None) => Some(i),
                _ => None,
            }
        };
        let placed: Vec<(usize, usize)> = class
            .iter()
            .filter_map(|&x| owner(x).map(|i| (x, i)))
            .collect();
        for pair in placed.windows(2) {
            let ((x, cx), (y, cy)) = (pair[0], pair[1]);
            if cx > cy {
                out.push(Violation {
                    axiom: Axiom::SumLayout,
                    path: path.clone(),
                    points: vec![x, y],
                    detail: "points of a later child precede points of an earlier child".into(),
                });
            }
        }
        let mut by_child: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (x, c) in placed {
            by_child.entry(c).or_default().push(x);
        }
        for (c, members) in by_child {
            let child = path.child(c);
            let ids: BTreeSet<Option<usize>> = members
                .iter()
                .map(|&x| self.class_index_of(&child, x))
                .collect();
            if ids.len() > 1 {
                out.push(Violation {
                    axiom: Axiom::SumLayout,
                    path: path.clone(),
                    points: members,
                    detail: "same-child points of one class fall into several child classes"
                        .into(),
                });
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The substructure induced on a set of points, renumbered in
    /// order.
    ///
    /// # Panics
    /// Panics on out-of-range points.
    pub fn induced(&self, points: &[usize]) -> FinStructure {
        assert!(
            points.iter().all(|&x| x < self.n),
            "induced substructure points must be in range"
        );
        let mut kept: Vec<usize> = points.to_vec();
        kept.sort_unstable();
        kept.dedup();
        let rank: BTreeMap<usize, usize> =
            kept.iter().enumerate().map(|(r, &x)| (x, r)).collect();
        let mut relations = BTreeMap::new();
        for (path, classes) in &self.relations {
            let sub: Vec<Vec<usize>> = classes
                .iter()
                .map(|class| class.iter().filter_map(|x| rank.get(x).copied()).collect())
                .filter(|class: &Vec<usize>| !class.is_empty())
                .collect();
            if !sub.is_empty() {
                relations.insert(path.clone(), sub);
            }
        }
        FinStructure {
            tree: self.tree.clone(),
            n: kept.len(),
            relations,
        }
    }
}

/// Whether two structures over one tree are isomorphic. Order rigidity
/// makes the identity renumbering the only candidate, so this is an
/// equality check on the normalized relation storage.
pub fn are_isomorphic(a: &FinStructure, b: &FinStructure) -> Result<bool, StructureError> {
    if a.tree != b.tree {
        return Err(StructureError::TreeMismatch);
    }
    Ok(a.n == b.n && a.relations == b.relations)
}

/// Checks that `map` is an embedding of `a` into `b`: strictly
/// increasing, in range, and preserving and reflecting the relation at
/// every node, domain membership included.
pub fn verify_embedding(
    a: &FinStructure,
    b: &FinStructure,
    map: &[usize],
) -> Result<(), StructureError> {
    if a.tree != b.tree {
        return Err(StructureError::TreeMismatch);
    }
    let fail = |detail: String| Err(StructureError::NotAnEmbedding { detail });
    if map.len() != a.n {
        return fail(format!("map covers {} of {} points", map.len(), a.n));
    }
    for (x, &u) in map.iter().enumerate() {
        if u >= b.n {
            return fail(format!("image {u} of point {x} is out of range"));
        }
        if x > 0 && map[x - 1] >= u {
            return fail(format!("images of points {} and {x} are not increasing", x - 1));
        }
    }
    for path in a.tree.all_paths() {
        for x in 0..a.n {
            for y in x..a.n {
                if a.related(&path, x, y) != b.related(&path, map[x], map[y]) {
                    return fail(format!(
                        "pair ({x}, {y}) disagrees with its image at node <{path}>"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// All embeddings of `a` into `b`, as increasing image vectors in
/// lexicographic order.
pub fn enumerate_embeddings(
    a: &FinStructure,
    b: &FinStructure,
) -> Result<Vec<Embedding>, StructureError> {
    if a.tree != b.tree {
        return Err(StructureError::TreeMismatch);
    }
    let paths = a.tree.all_paths();
    let profile = |s: &FinStructure, x: usize, y: usize| -> Vec<bool> {
        paths.iter().map(|p| s.related(p, x, y)).collect()
    };
    let pa: Vec<Vec<Vec<bool>>> = (0..a.n)
        .map(|x| (0..a.n).map(|y| profile(a, x, y)).collect())
        .collect();
    let pb: Vec<Vec<Vec<bool>>> = (0..b.n)
        .map(|x| (0..b.n).map(|y| profile(b, x, y)).collect())
        .collect();
    let mut out = Vec::new();
    let mut map: Vec<usize> = Vec::with_capacity(a.n);
    backtrack(a.n, b.n, &pa, &pb, &mut map, &mut out);
    Ok(out)
}

fn backtrack(
    an: usize,
    bn: usize,
    pa: &[Vec<Vec<bool>>],
    pb: &[Vec<Vec<bool>>],
    map: &mut Vec<usize>,
    out: &mut Vec<Embedding>,
) {
    let x = map.len();
    if x == an {
        out.push(map.clone());
        return;
    }
    let start = map.last().map_or(0, |&u| u + 1);
    // Leave room for the points still to be placed.
    let room = an - x - 1;
    for u in start..bn.saturating_sub(room) {
        if (0..=x).all(|i| {
            let v = if i == x { u } else { map[i] };
            pa[i][x] == pb[v][u]
        }) {
            map.push(u);
            backtrack(an, bn, pa, pb, map, out);
            map.pop();
        }
    }
}

/// All structures over the tree with `n` points. The result is sorted
/// and duplicate-free, and every member satisfies the axioms. Aborts
/// with an error once more than `cap` intermediate or final structures
/// have been produced.
pub fn enumerate_structures(
    tree: &TreePresentation,
    n: usize,
    cap: usize,
) -> Result<Vec<FinStructure>, StructureError> {
    let mut budget = cap;
    let mut out = enum_node(tree, n, cap, &mut budget)?;
    out.sort();
    out.dedup();
    Ok(out)
}

fn spend(budget: &mut usize, cap: usize) -> Result<(), StructureError> {
    if *budget == 0 {
        return Err(StructureError::CapExceeded { cap });
    }
    *budget -= 1;
    Ok(())
}

fn enum_node(
    node: &TreePresentation,
    n: usize,
    cap: usize,
    budget: &mut usize,
) -> Result<Vec<FinStructure>, StructureError> {
    let mut out = Vec::new();
    match node {
        TreePresentation::Leaf => {
            if n == 0 {
                spend(budget, cap)?;
                out.push(FinStructure::empty(node.clone()));
            } else if n == 1 {
                spend(budget, cap)?;
                let mut relations = BTreeMap::new();
                relations.insert(NodePath::root(), vec![vec![0]]);
                out.push(assemble(node, 1, relations));
            }
        }
        TreePresentation::Sum(children) => {
            for seq in enum_sum(children, n, cap, budget)? {
                spend(budget, cap)?;
                let mut relations = BTreeMap::new();
                let mut offset = 0;
                for (j, part) in seq.iter().enumerate() {
                    lift_into(&mut relations, j + 1, offset, part);
                    offset += part.n;
                }
                if n > 0 {
                    relations.insert(NodePath::root(), vec![(0..n).collect()]);
                }
                out.push(assemble(node, n, relations));
            }
        }
        TreePresentation::Shuffle(children) => {
            for blocks in enum_blocks(children, n, cap, budget)? {
                spend(budget, cap)?;
                let mut relations = BTreeMap::new();
                let mut offset = 0;
                for (child, part) in &blocks {
                    lift_into(&mut relations, *child, offset, part);
                    offset += part.n;
                }
                if n > 0 {
                    relations.insert(NodePath::root(), vec![(0..n).collect()]);
                }
                out.push(assemble(node, n, relations));
            }
        }
    }
    Ok(out)
}

/// Sequences of child structures, one per child, with sizes summing to
/// `n`.
fn enum_sum(
    children: &[TreePresentation],
    n: usize,
    cap: usize,
    budget: &mut usize,
) -> Result<Vec<Vec<FinStructure>>, StructureError> {
    let (first, rest) = children.split_first().expect("sum nodes have children");
    let mut out = Vec::new();
    if rest.is_empty() {
        for s in enum_node(first, n, cap, budget)? {
            spend(budget, cap)?;
            out.push(vec![s]);
        }
        return Ok(out);
    }
    for m in 0..=n {
        let heads = enum_node(first, m, cap, budget)?;
        if heads.is_empty() {
            continue;
        }
        let tails = enum_sum(rest, n - m, cap, budget)?;
        for head in &heads {
            for tail in &tails {
                spend(budget, cap)?;
                let mut seq = Vec::with_capacity(children.len());
                seq.push(head.clone());
                seq.extend(tail.iter().cloned());
                out.push(seq);
            }
        }
    }
    Ok(out)
}

/// Ordered lists of nonempty blocks covering `n` points, each block a
/// structure over one child. Adjacent blocks are unconstrained: the
/// dense interleaving of the model realizes every finite pattern.
fn enum_blocks(
    children: &[TreePresentation],
    n: usize,
    cap: usize,
    budget: &mut usize,
) -> Result<Vec<Vec<(usize, FinStructure)>>, StructureError> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Vec::new());
        return Ok(out);
    }
    for first_size in 1..=n {
        let mut firsts: Vec<(usize, FinStructure)> = Vec::new();
        for (idx, child) in children.iter().enumerate() {
            for s in enum_node(child, first_size, cap, budget)? {
                firsts.push((idx + 1, s));
            }
        }
        if firsts.is_empty() {
            continue;
        }
        let tails = enum_blocks(children, n - first_size, cap, budget)?;
        for first in &firsts {
            for tail in &tails {
                spend(budget, cap)?;
                let mut blocks = Vec::with_capacity(tail.len() + 1);
                blocks.push(first.clone());
                blocks.extend(tail.iter().cloned());
                out.push(blocks);
            }
        }
    }
    Ok(out)
}

fn lift_into(
    relations: &mut BTreeMap<NodePath, Vec<Vec<usize>>>,
    child: usize,
    offset: usize,
    part: &FinStructure,
) {
    for (path, classes) in &part.relations {
        let mut lifted = Vec::with_capacity(path.len() + 1);
        lifted.push(child);
        lifted.extend_from_slice(&path.0);
        let entry = relations.entry(NodePath(lifted)).or_default();
        for class in classes {
            entry.push(class.iter().map(|&x| x + offset).collect());
        }
    }
}

fn assemble(
    node: &TreePresentation,
    n: usize,
    relations: BTreeMap<NodePath, Vec<Vec<usize>>>,
) -> FinStructure {
    FinStructure::new(node.clone(), n, relations).expect("assembled structure is well-formed")
}

/// The result of amalgamating `B` and `C` over a common substructure:
/// the amalgam `D`, the two embeddings closing the square, and the
/// model coordinates of `D`'s points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Amalgam {
    pub d: FinStructure,
    pub f_prime: Embedding,
    pub g_prime: Embedding,
    pub coords: Vec<CoordPoint>,
}

/// Amalgamates `b` and `c` over `a` along the embeddings `f: a → b`
/// and `g: a → c`.
///
/// `b` is coordinatized in the model; the shared image of `a` fixes
/// coordinates for `g(a)` inside `c`, and the remaining points of `c`
/// are extended one at a time. Free coordinate choices avoid the
/// coordinates used by `b`, so unrelated points never collide: the
/// amalgam adds no relations beyond those forced by the two
/// embeddings. The result is deterministic.
pub fn amalgamate(
    a: &FinStructure,
    b: &FinStructure,
    c: &FinStructure,
    f: &Embedding,
    g: &Embedding,
) -> Result<Amalgam, StructureError> {
    for (s, role) in [(a, "base"), (b, "left"), (c, "right")] {
        let violations = s.validate();
        if !violations.is_empty() {
            return Err(StructureError::InvalidStructure { role, violations });
        }
    }
    verify_embedding(a, b, f).map_err(|e| tag_embedding("left", e))?;
    verify_embedding(a, c, g).map_err(|e| tag_embedding("right", e))?;
    let model = CoordModel::new(b.tree.clone());
    let coordinate_err = |e: crate::coordmodel::CoordError| StructureError::CoordinateConstruction {
        detail: e.to_string(),
    };
    let eb = model.coordinatize_raw(b).map_err(coordinate_err)?;
    let mut known: BTreeMap<usize, CoordPoint> = (0..a.n)
        .map(|i| (g[i], eb[f[i]].clone()))
        .collect();
    for x in 0..c.n {
        if !known.contains_key(&x) {
            let point = model
                .extend_point(c, &known, x, &eb)
                .map_err(coordinate_err)?;
            known.insert(x, point);
        }
    }
    let mut universe: Vec<CoordPoint> = eb.iter().cloned().collect();
    universe.extend(known.values().cloned());
    universe.sort();
    universe.dedup();
    let (d, coords) = model
        .structure_from_coords(&universe)
        .map_err(coordinate_err)?;
    let position = |p: &CoordPoint| {
        coords
            .binary_search(p)
            .expect("amalgam coordinate present in the union")
    };
    let f_prime: Embedding = eb.iter().map(position).collect();
    let g_prime: Embedding = (0..c.n).map(|x| position(&known[&x])).collect();
    let check = |detail: String| StructureError::ConstructionFailed { detail };
    verify_embedding(b, &d, &f_prime).map_err(|e| check(format!("left side: {e}")))?;
    verify_embedding(c, &d, &g_prime).map_err(|e| check(format!("right side: {e}")))?;
    for i in 0..a.n {
        if f_prime[f[i]] != g_prime[g[i]] {
            return Err(check(format!("square does not commute at base point {i}")));
        }
    }
    let violations = d.validate();
    if !violations.is_empty() {
        return Err(check(summarize(&violations)));
    }
    Ok(Amalgam {
        d,
        f_prime,
        g_prime,
        coords,
    })
}

fn tag_embedding(side: &str, e: StructureError) -> StructureError {
    match e {
        StructureError::NotAnEmbedding { detail } => StructureError::NotAnEmbedding {
            detail: format!("{side} map: {detail}"),
        },
        other => other,
    }
}
