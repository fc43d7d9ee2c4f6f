//! Shared helpers for the integration suites: expression fixtures,
//! seeded random trees and transformations, candidate-structure
//! generators, and an order-theoretic fact oracle computed directly by
//! structural recursion (independent of the condensation algorithm).

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use sumshuffle::finstruct::{enumerate_embeddings, enumerate_structures, FinStructure};
use sumshuffle::presentation::{NodePath, TreePresentation};

pub fn t(expr: &str) -> TreePresentation {
    expr.parse().expect("well-formed expression")
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// An `n`-point chain over `sigma(1)`.
pub fn chain(n: usize) -> FinStructure {
    let leaf: NodePath = "1".parse().expect("leaf path");
    let relations = BTreeMap::from([
        (NodePath::root(), vec![(0..n).collect::<Vec<_>>()]),
        (leaf, (0..n).map(|i| vec![i]).collect()),
    ]);
    FinStructure::new(t("sigma(1)"), n, relations).expect("chain is well-formed")
}

/// An `n`-point structure over `sigma(sigma(1))` with all points in a
/// single mid-level class.
pub fn single_class(n: usize) -> FinStructure {
    let mid: NodePath = "1".parse().expect("mid path");
    let leaf: NodePath = "1,1".parse().expect("leaf path");
    let all: Vec<usize> = (0..n).collect();
    let relations = BTreeMap::from([
        (NodePath::root(), vec![all.clone()]),
        (mid, vec![all]),
        (leaf, (0..n).map(|i| vec![i]).collect()),
    ]);
    FinStructure::new(t("sigma(sigma(1))"), n, relations).expect("single class is well-formed")
}

// ---------------------------------------------------------------------
// Random trees and order-type-preserving transformations.

/// A seeded random presentation with at most `max_nodes` nodes.
pub fn random_tree(rng: &mut ChaCha8Rng, max_nodes: usize) -> TreePresentation {
    let mut budget = max_nodes.max(1);
    gen_tree(rng, &mut budget)
}

fn gen_tree(rng: &mut ChaCha8Rng, budget: &mut usize) -> TreePresentation {
    *budget -= 1;
    if *budget == 0 {
        return TreePresentation::Leaf;
    }
    match rng.gen_range(0..5u8) {
        0 | 1 => TreePresentation::Leaf,
        kind => {
            let want = if rng.gen_ratio(1, 10) {
                1
            } else {
                rng.gen_range(2..=3)
            };
            let mut children = Vec::new();
            for _ in 0..want {
                if *budget == 0 {
                    break;
                }
                children.push(gen_tree(rng, budget));
            }
            if children.is_empty() {
                children.push(TreePresentation::Leaf);
            }
            if kind == 2 {
                TreePresentation::shuffle(children)
            } else {
                TreePresentation::sum(children)
            }
        }
    }
}

/// Splices every sum child of a sum into its parent.
pub fn flatten_sums(tree: &TreePresentation) -> TreePresentation {
    match tree {
        TreePresentation::Leaf => TreePresentation::Leaf,
        TreePresentation::Sum(cs) => {
            let mut out = Vec::new();
            for child in cs {
                match flatten_sums(child) {
                    TreePresentation::Sum(grandchildren) => out.extend(grandchildren),
                    other => out.push(other),
                }
            }
            TreePresentation::sum(out)
        }
        TreePresentation::Shuffle(cs) => {
            TreePresentation::shuffle(cs.iter().map(flatten_sums).collect())
        }
    }
}

/// Reorders the arguments of every shuffle node (seeded).
pub fn permute_shuffle_args(tree: &TreePresentation, rng: &mut ChaCha8Rng) -> TreePresentation {
    match tree {
        TreePresentation::Leaf => TreePresentation::Leaf,
        TreePresentation::Sum(cs) => {
            TreePresentation::sum(cs.iter().map(|c| permute_shuffle_args(c, rng)).collect())
        }
        TreePresentation::Shuffle(cs) => {
            let mut children: Vec<_> = cs.iter().map(|c| permute_shuffle_args(c, rng)).collect();
            children.shuffle(rng);
            TreePresentation::shuffle(children)
        }
    }
}

/// Appends a copy of one (seeded) argument to every shuffle node.
pub fn duplicate_shuffle_arg(tree: &TreePresentation, rng: &mut ChaCha8Rng) -> TreePresentation {
    match tree {
        TreePresentation::Leaf => TreePresentation::Leaf,
        TreePresentation::Sum(cs) => {
            TreePresentation::sum(cs.iter().map(|c| duplicate_shuffle_arg(c, rng)).collect())
        }
        TreePresentation::Shuffle(cs) => {
            let mut children: Vec<_> = cs.iter().map(|c| duplicate_shuffle_arg(c, rng)).collect();
            let pick = rng.gen_range(0..children.len());
            let copy = children[pick].clone();
            children.push(copy);
            TreePresentation::shuffle(children)
        }
    }
}

// ---------------------------------------------------------------------
// Order-theoretic facts, by direct structural recursion.
//
// These are computed without condensation machinery, from three
// observations about what the constructors denote: a sum concatenates
// its parts, so new adjacencies arise exactly where a part with a last
// point meets a part with a first point; a shuffle arranges copies of
// its parts densely, so it has no first or last point and no two points
// of distinct copies are adjacent; and a one-point order has endpoints
// and no adjacent pair.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderFacts {
    pub has_min: bool,
    pub has_max: bool,
    /// No two points are adjacent (no immediate successor pairs).
    pub dense: bool,
    /// Number of points when finite.
    pub size: Option<usize>,
}

pub fn order_facts(tree: &TreePresentation) -> OrderFacts {
    match tree {
        TreePresentation::Leaf => OrderFacts {
            has_min: true,
            has_max: true,
            dense: true,
            size: Some(1),
        },
        TreePresentation::Sum(cs) => {
            let parts: Vec<OrderFacts> = cs.iter().map(order_facts).collect();
            let junctions_ok = parts
                .windows(2)
                .all(|w| !(w[0].has_max && w[1].has_min));
            OrderFacts {
                has_min: parts.first().expect("sum is nonempty").has_min,
                has_max: parts.last().expect("sum is nonempty").has_max,
                dense: parts.iter().all(|p| p.dense) && junctions_ok,
                size: parts.iter().map(|p| p.size).sum(),
            }
        }
        TreePresentation::Shuffle(cs) => OrderFacts {
            has_min: false,
            has_max: false,
            dense: cs.iter().all(|c| order_facts(c).dense),
            size: None,
        },
    }
}

/// Whether the denoted order is a countable dense order without
/// endpoints — the hypotheses under which all such orders are
/// isomorphic to a single type.
pub fn dense_without_endpoints(tree: &TreePresentation) -> bool {
    let facts = order_facts(tree);
    facts.dense && !facts.has_min && !facts.has_max
}

// ---------------------------------------------------------------------
// Candidate structures for the axioms-versus-embeddability sweep.

/// All sets of pairwise disjoint, convex, nonempty classes over points
/// `0..n` (including the empty set of classes).
pub fn convex_partial_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    convex_rec(0, n, &mut current, &mut out);
    out
}

fn convex_rec(
    i: usize,
    n: usize,
    current: &mut Vec<Vec<usize>>,
    out: &mut Vec<Vec<Vec<usize>>>,
) {
    if i == n {
        out.push(current.clone());
        return;
    }
    // Point i belongs to no class…
    convex_rec(i + 1, n, current, out);
    // …or starts a class reaching up to point j.
    for j in i..n {
        current.push((i..=j).collect());
        convex_rec(j + 1, n, current, out);
        current.pop();
    }
}

/// A seeded random set of disjoint classes over `0..n`, convex or not.
pub fn random_partial_partition(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<usize>> {
    let mut slots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for point in 0..n {
        let slot = rng.gen_range(0..=n);
        if slot < n {
            slots.entry(slot).or_default().push(point);
        }
    }
    slots.into_values().collect()
}

// ---------------------------------------------------------------------
// Random amalgamation instances.

pub struct AmalgamationInstance {
    pub a: FinStructure,
    pub b: FinStructure,
    pub c: FinStructure,
    pub f: Vec<usize>,
    pub g: Vec<usize>,
}

/// Every valid structure over `tree` of size at most `max_n`.
pub fn amalgamation_pool(tree: &TreePresentation, max_n: usize) -> Vec<FinStructure> {
    (0..=max_n)
        .flat_map(|n| {
            enumerate_structures(tree, n, 1_000_000).expect("family enumerates within budget")
        })
        .collect()
}

/// Draws `B` and `C` from the pool and a shared substructure `A`
/// induced from `B`, embedding into `B` by inclusion and into `C` by a
/// random embedding. Falls back to `C = B` when the draw finds no
/// embedding, since the inclusion always exists there.
pub fn random_amalgamation_instance(
    rng: &mut ChaCha8Rng,
    pool: &[FinStructure],
) -> Option<AmalgamationInstance> {
    let b = pool.choose(rng)?.clone();
    let f: Vec<usize> = (0..b.point_count()).filter(|_| rng.gen_bool(0.6)).collect();
    let a = b.induced(&f);
    for _ in 0..30 {
        let c = pool.choose(rng)?.clone();
        let embeddings = enumerate_embeddings(&a, &c).expect("same tree");
        if let Some(g) = embeddings.choose(rng) {
            return Some(AmalgamationInstance {
                a,
                b,
                c,
                f,
                g: g.clone(),
            });
        }
    }
    let g = f.clone();
    Some(AmalgamationInstance {
        a,
        c: b.clone(),
        b,
        f,
        g,
    })
}

/// Builds the candidate with the given classes per path. The paths must
/// be the tree's, so construction cannot fail.
pub fn candidate(
    tree: &TreePresentation,
    n: usize,
    paths: &[NodePath],
    classes_per_path: &[Vec<Vec<usize>>],
) -> FinStructure {
    let relations: BTreeMap<NodePath, Vec<Vec<usize>>> = paths
        .iter()
        .cloned()
        .zip(classes_per_path.iter().cloned())
        .collect();
    FinStructure::new(tree.clone(), n, relations)
        .expect("disjoint classes over known paths construct")
}
