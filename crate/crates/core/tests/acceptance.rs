//! The acceptance gate: nine standalone checks, each printing one
//! PASS line (with its measured runtime) or failing its assertions.
//!
//! The axioms-versus-embeddability sweep is exhaustive over every
//! relation assignment with convex classes whenever that space fits a
//! fixed budget, and falls back to seeded random assignments (convex
//! and non-convex), all valid structures, and random mutations of valid
//! structures for the combinations whose assignment space is
//! astronomically large.

mod support;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sumshuffle::coordmodel::{CoordModel, CoordPoint};
use sumshuffle::finstruct::{
    amalgamate, enumerate_embeddings, enumerate_structures, verify_embedding, FinStructure,
};
use sumshuffle::rationals::{class_of, fresh_in_class, Rat};
use sumshuffle::ramsey::{check_arrow, search_witness, ArrowInstance, ArrowOutcome, SearchOutcome};
use sumshuffle::ultra::{enumerate_isometries, to_ultrametric, tower_tree, UltraSpace};
use sumshuffle::canonicalize;
use support::{
    candidate, chain, convex_partial_partitions, dense_without_endpoints,
    duplicate_shuffle_arg, flatten_sums, order_facts, permute_shuffle_args,
    random_amalgamation_instance, random_partial_partition, random_tree, rng, single_class, t,
};

const FAMILY: [&str; 6] = [
    "1",
    "s(1,1)",
    "sigma(1)",
    "sigma(sigma(1))",
    "s(sigma(1),1,sigma(1))",
    "sigma(s(1,1),1)",
];

fn report(number: u8, name: &str, start: Instant, bound: Duration) {
    let elapsed = start.elapsed();
    assert!(
        elapsed <= bound,
        "criterion {number} ({name}): runtime {elapsed:?} exceeds bound {bound:?}"
    );
    println!("criterion {number} ({name}): PASS in {elapsed:?}");
}

#[test]
fn criterion_1_canonical_collapse() {
    let start = Instant::now();
    for expr in [
        "sigma(1)",
        "s(sigma(1),sigma(1))",
        "sigma(sigma(1))",
        "sigma(s(1,sigma(1)))",
    ] {
        let canonical = canonicalize(&t(expr)).expect("canonical form");
        assert_eq!(canonical.to_string(), "sigma(1)", "collapse of {expr}");
    }
    report(1, "canonical collapse", start, Duration::from_secs(1));
}

#[test]
fn criterion_2_canonicalizer_properties() {
    let start = Instant::now();
    let mut rng = rng(0xACC3_0002);
    for case in 0..1000 {
        let tree = random_tree(&mut rng, 12);
        let reference = canonicalize(&tree)
            .unwrap_or_else(|e| panic!("case {case}: canonicalize failed on {tree}: {e}"));
        let again = canonicalize(&reference).expect("canonical form");
        assert_eq!(again, reference, "case {case}: not idempotent on {tree}");
        for (label, variant) in [
            ("sum flattening", flatten_sums(&tree)),
            ("argument permutation", permute_shuffle_args(&tree, &mut rng)),
            ("argument duplication", duplicate_shuffle_arg(&tree, &mut rng)),
        ] {
            let transformed = canonicalize(&variant).expect("canonical form");
            assert_eq!(
                transformed, reference,
                "case {case}: {label} changed the type of {tree}"
            );
        }
    }
    report(2, "canonicalizer properties", start, Duration::from_secs(30));
}

/// Confirms, without going through the extension machinery, that
/// `coords` embeds `s` into the model: members, in model order, with
/// exactly the declared relations at every node.
fn confirms_embedding(model: &CoordModel, s: &FinStructure, coords: &[CoordPoint]) -> bool {
    if coords.len() != s.point_count() {
        return false;
    }
    if !coords.iter().all(|c| model.contains(c)) {
        return false;
    }
    let ordered = coords
        .windows(2)
        .all(|w| matches!(model.lex_compare(&w[0], &w[1]), Ok(Ordering::Less)));
    if !ordered {
        return false;
    }
    s.tree().all_paths().iter().all(|path| {
        (0..coords.len()).all(|x| {
            (x..coords.len()).all(|y| {
                matches!(
                    model.related(path, &coords[x], &coords[y]),
                    Ok(m) if m == s.related(path, x, y)
                )
            })
        })
    })
}

/// The two sides of the equivalence, checked on one candidate.
fn check_candidate(model: &CoordModel, s: &FinStructure) {
    let valid = s.validate().is_empty();
    match model.coordinatize_raw(s) {
        Ok(coords) => {
            assert!(
                valid,
                "coordinatized an invalid structure: {:?} of {}",
                s.relations(),
                s.tree()
            );
            assert!(
                confirms_embedding(model, s, &coords),
                "coordinates fail independent re-verification: {:?} of {}",
                s.relations(),
                s.tree()
            );
        }
        Err(e) => {
            assert!(
                !valid,
                "valid structure failed to coordinatize ({e}): {:?} of {}",
                s.relations(),
                s.tree()
            );
        }
    }
}

#[test]
fn criterion_3_axioms_equal_embeddability() {
    let start = Instant::now();
    const EXHAUSTIVE_BUDGET: u128 = 400_000;
    let partitions_by_size: Vec<Vec<Vec<Vec<usize>>>> =
        (0..=4).map(convex_partial_partitions).collect();
    let mut checked: u64 = 0;

    for (tree_index, expr) in FAMILY.iter().enumerate() {
        let tree = t(expr);
        let paths = tree.all_paths();
        let model = CoordModel::new(tree.clone());
        for n in 0..=4usize {
            let parts = &partitions_by_size[n];
            let space: u128 = (parts.len() as u128).pow(paths.len() as u32);
            let mut rng = rng(0xACC3_0003 + (tree_index as u64) * 16 + n as u64);
            if space <= EXHAUSTIVE_BUDGET {
                let mut indices = vec![0usize; paths.len()];
                loop {
                    let classes: Vec<Vec<Vec<usize>>> =
                        indices.iter().map(|&i| parts[i].clone()).collect();
                    check_candidate(&model, &candidate(&tree, n, &paths, &classes));
                    checked += 1;
                    let mut position = 0;
                    while position < paths.len() {
                        indices[position] += 1;
                        if indices[position] < parts.len() {
                            break;
                        }
                        indices[position] = 0;
                        position += 1;
                    }
                    if position == paths.len() {
                        break;
                    }
                }
                // The exhaustive space has convex classes only; add a
                // seeded pass of unconstrained assignments.
                if n >= 2 {
                    for _ in 0..3_000 {
                        let classes: Vec<Vec<Vec<usize>>> = paths
                            .iter()
                            .map(|_| random_partial_partition(&mut rng, n))
                            .collect();
                        check_candidate(&model, &candidate(&tree, n, &paths, &classes));
                        checked += 1;
                    }
                }
            } else {
                // Positives exhaustively, negatives by seeded sampling
                // around them.
                let valids = enumerate_structures(&tree, n, 1_000_000).expect("within budget");
                for s in &valids {
                    check_candidate(&model, s);
                    checked += 1;
                }
                for _ in 0..15_000 {
                    let classes: Vec<Vec<Vec<usize>>> = paths
                        .iter()
                        .map(|_| parts[rng.gen_range(0..parts.len())].clone())
                        .collect();
                    check_candidate(&model, &candidate(&tree, n, &paths, &classes));
                    checked += 1;
                }
                for _ in 0..15_000 {
                    let classes: Vec<Vec<Vec<usize>>> = paths
                        .iter()
                        .map(|_| random_partial_partition(&mut rng, n))
                        .collect();
                    check_candidate(&model, &candidate(&tree, n, &paths, &classes));
                    checked += 1;
                }
                for s in &valids {
                    for _ in 0..100 {
                        let mut relations: BTreeMap<_, _> = s.relations().clone();
                        let path = paths[rng.gen_range(0..paths.len())].clone();
                        let replacement = random_partial_partition(&mut rng, n);
                        if replacement.is_empty() {
                            relations.remove(&path);
                        } else {
                            relations.insert(path, replacement);
                        }
                        let mutated = FinStructure::new(tree.clone(), n, relations)
                            .expect("disjoint classes construct");
                        check_candidate(&model, &mutated);
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 450_000, "sweep shrank unexpectedly: {checked}");
    report(
        3,
        "axioms equal embeddability",
        start,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_4_sampling_soundness() {
    let start = Instant::now();
    for i in 0..500u64 {
        let tree = t(FAMILY[(i % 6) as usize]);
        let bound = if tree.is_finite_order() {
            tree.leaf_count()
        } else {
            6
        };
        let n = 1 + (i as usize / 6) % bound;
        let model = CoordModel::new(tree.clone());
        let (structure, coords) = model
            .sample_substructure(n, 0xACC3_0004 + i)
            .unwrap_or_else(|e| panic!("draw {i} failed on {tree}: {e}"));
        assert!(
            structure.validate().is_empty(),
            "draw {i} on {tree} is invalid"
        );
        for x in 0..coords.len() {
            for y in (x + 1)..coords.len() {
                let (a, b) = (&coords[x], &coords[y]);
                let head = a.len().min(b.len());
                assert!(
                    a.len() == b.len() || a[..head] != b[..head],
                    "draw {i} on {tree}: coordinate {x} is a prefix of {y}"
                );
            }
        }
    }
    report(4, "sampling soundness", start, Duration::from_secs(30));
}

#[test]
fn criterion_5_amalgamation() {
    let start = Instant::now();
    let pools: Vec<Vec<FinStructure>> = FAMILY
        .iter()
        .map(|expr| support::amalgamation_pool(&t(expr), 3))
        .collect();
    let mut rng = rng(0xACC3_0005);
    for i in 0..1000usize {
        let instance = random_amalgamation_instance(&mut rng, &pools[i % 6])
            .expect("pools are nonempty");
        let amalgam = amalgamate(
            &instance.a,
            &instance.b,
            &instance.c,
            &instance.f,
            &instance.g,
        )
        .unwrap_or_else(|e| panic!("instance {i} failed: {e}"));
        assert!(amalgam.d.validate().is_empty(), "instance {i}: D invalid");
        verify_embedding(&instance.b, &amalgam.d, &amalgam.f_prime)
            .unwrap_or_else(|e| panic!("instance {i}: left leg broken: {e}"));
        verify_embedding(&instance.c, &amalgam.d, &amalgam.g_prime)
            .unwrap_or_else(|e| panic!("instance {i}: right leg broken: {e}"));
        for p in 0..instance.a.point_count() {
            assert_eq!(
                amalgam.f_prime[instance.f[p]],
                amalgam.g_prime[instance.g[p]],
                "instance {i}: square fails to commute at {p}"
            );
        }
    }
    report(5, "amalgamation", start, Duration::from_secs(60));
}

/// Re-derives, from scratch, whether `coloring` leaves no embedded copy
/// of `b` in `c` monochromatic on its copies of `a`.
fn coloring_defeats_every_copy(
    c: &FinStructure,
    b: &FinStructure,
    a: &FinStructure,
    coloring: &[u32],
) -> bool {
    let a_copies = enumerate_embeddings(a, c).expect("same tree");
    let b_copies = enumerate_embeddings(b, c).expect("same tree");
    assert_eq!(coloring.len(), a_copies.len());
    b_copies.iter().all(|b_copy| {
        let inside: Vec<u32> = a_copies
            .iter()
            .zip(coloring)
            .filter(|(a_copy, _)| a_copy.iter().all(|p| b_copy.contains(p)))
            .map(|(_, color)| *color)
            .collect();
        inside.windows(2).any(|w| w[0] != w[1])
    })
}

#[test]
fn criterion_6_desk_scale_arrows() {
    let start = Instant::now();
    let (a2, b3) = (chain(2), chain(3));

    let holds = check_arrow(
        &ArrowInstance {
            c: chain(6),
            b: b3.clone(),
            a: a2.clone(),
            colors: 2,
        },
        100,
    )
    .expect("within cap");
    assert_eq!(holds, ArrowOutcome::Holds, "6-point order should arrow");

    let fails = check_arrow(
        &ArrowInstance {
            c: chain(5),
            b: b3.clone(),
            a: a2.clone(),
            colors: 2,
        },
        100,
    )
    .expect("within cap");
    match fails {
        ArrowOutcome::Fails { coloring } => {
            assert!(
                coloring_defeats_every_copy(&chain(5), &b3, &a2, &coloring),
                "returned coloring is not actually bad"
            );
        }
        ArrowOutcome::Holds => panic!("5-point order should not arrow"),
    }

    let found = search_witness(&t("sigma(1)"), &b3, &a2, 2, 8, 100, 1_000_000)
        .expect("search runs");
    match found {
        SearchOutcome::Witness { size, structure } => {
            assert_eq!(size, 6);
            assert_eq!(structure, chain(6));
        }
        SearchOutcome::Unknown { reason } => panic!("no witness found: {reason}"),
    }

    // The two-level analogue: points sharing one mid-level class.
    let (sa, sb) = (single_class(2), single_class(3));
    let found = search_witness(&t("sigma(sigma(1))"), &sb, &sa, 2, 6, 100, 1_000_000)
        .expect("search runs");
    match found {
        SearchOutcome::Witness { size, structure } => {
            assert_eq!(size, 6);
            assert_eq!(structure, single_class(6));
        }
        SearchOutcome::Unknown { reason } => panic!("no two-level witness: {reason}"),
    }
    report(6, "desk-scale arrows", start, Duration::from_secs(60));
}

#[test]
fn criterion_7_ultrametric_equivalence() {
    let start = Instant::now();
    let tower = tower_tree(2);
    let distances = vec![Rat::from_int(1), Rat::from_int(2)];

    // Structures to spaces and back.
    let structures: Vec<FinStructure> = (0..=4)
        .flat_map(|n| enumerate_structures(&tower, n, 1_000_000).expect("within budget"))
        .collect();
    for s in &structures {
        let space = to_ultrametric(s, &distances)
            .unwrap_or_else(|e| panic!("structure fails to convert: {e}"));
        assert_eq!(&space.to_structure(), s, "round trip through a space");
    }

    // Spaces to structures and back, over every distance matrix.
    let mut space_count = 0usize;
    for n in 0..=4usize {
        let cells = n * (n - n.min(1)) / 2;
        for mask in 0..(1u32 << cells) {
            let mut upper: Vec<Vec<Rat>> = Vec::new();
            let mut bit = 0;
            for i in 0..n.saturating_sub(1) {
                let mut row = Vec::new();
                for _ in (i + 1)..n {
                    let far = mask & (1 << bit) != 0;
                    row.push(Rat::from_int(if far { 2 } else { 1 }));
                    bit += 1;
                }
                upper.push(row);
            }
            let Ok(space) = UltraSpace::new(distances.clone(), n, upper) else {
                continue;
            };
            space_count += 1;
            let back = to_ultrametric(&space.to_structure(), &distances)
                .expect("image structure converts");
            assert_eq!(back, space, "round trip through a structure");
        }
    }
    // Both round trips are identities, so the translation is a
    // bijection and the counts must line up.
    assert_eq!(space_count, structures.len());

    // Embedding counts transfer across the translation.
    for p in &structures {
        for q in &structures {
            let embeddings = enumerate_embeddings(p, q).expect("same tree");
            let isometries = enumerate_isometries(
                &to_ultrametric(p, &distances).expect("converts"),
                &to_ultrametric(q, &distances).expect("converts"),
            );
            assert_eq!(
                embeddings.len(),
                isometries.len(),
                "embedding count changed across the translation"
            );
        }
    }
    report(7, "ultrametric equivalence", start, Duration::from_secs(60));
}

#[test]
fn criterion_8_partition_sanity() {
    let start = Instant::now();
    for n in 1..=1000i64 {
        assert_eq!(class_of(&Rat::from_int(n)), n as u64);
    }
    let mut rng = rng(0xACC3_0008);
    let random_rat = |rng: &mut ChaCha8Rng| {
        Rat::new(rng.gen_range(-200..=200), rng.gen_range(1..=40))
    };
    for case in 0..1000 {
        let (lower, upper) = loop {
            let a = random_rat(&mut rng);
            let b = random_rat(&mut rng);
            match a.cmp(&b) {
                Ordering::Less => break (a, b),
                Ordering::Greater => break (b, a),
                Ordering::Equal => continue,
            }
        };
        for class in 1..=8u64 {
            let fresh = fresh_in_class(class, Some(&lower), Some(&upper));
            assert!(
                lower < fresh && fresh < upper,
                "case {case}, class {class}: {fresh} outside ({lower}, {upper})"
            );
            assert_eq!(
                class_of(&fresh),
                class,
                "case {case}: wrong class for {fresh}"
            );
        }
    }
    report(8, "partition sanity", start, Duration::from_secs(10));
}

#[test]
fn criterion_9_enumeration_counts() {
    let start = Instant::now();
    for n in 1..=5 {
        assert_eq!(
            enumerate_structures(&t("sigma(1)"), n, 1_000_000)
                .expect("within budget")
                .len(),
            1,
            "dense chains are unique at size {n}"
        );
    }
    let two_leaves = t("s(1,1)");
    for (n, expected) in [(1, 2), (2, 1), (3, 0)] {
        assert_eq!(
            enumerate_structures(&two_leaves, n, 1_000_000)
                .expect("within budget")
                .len(),
            expected,
            "two-leaf sum at size {n}"
        );
    }
    assert_eq!(
        enumerate_structures(&t("sigma(sigma(1))"), 2, 1_000_000)
            .expect("within budget")
            .len(),
        2,
        "two-level shuffle at size 2"
    );
    report(9, "enumeration counts", start, Duration::from_secs(10));
}

#[test]
fn family_watches_its_own_assumptions() {
    // The six trees cover: the one-point order, a finite sum, one
    // shuffle level, two shuffle levels, shuffles inside a sum, and a
    // sum inside a shuffle — and the oracles agree on which are dense.
    for expr in FAMILY {
        let tree = t(expr);
        let facts = order_facts(&tree);
        assert_eq!(facts.size.is_some(), tree.is_finite_order());
        assert_eq!(
            dense_without_endpoints(&tree),
            canonicalize(&tree).expect("canonical form").to_string() == "sigma(1)"
        );
    }
}
