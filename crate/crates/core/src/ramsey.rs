//! Desk-scale verification of partition arrows between finite
//! structures, and search for witnesses.
//!
//! The arrow `C → (B)^A_k` says: however the copies of `A` inside `C`
//! are colored with `k` colors, some copy of `B` inside `C` has all
//! its own `A`-copies in one color. [`check_arrow`] decides it
//! exactly, by backtracking over colorings while propagating
//! "this `B`-copy is no longer monochromatic" state; a `false` answer
//! comes with the lexicographically least bad coloring, re-verified by
//! an independent scan. [`search_witness`] looks for the smallest `C`
//! among all structures over a tree, reporting `Unknown` — never a
//! negative — when a resource cap cuts the search short.

use crate::finstruct::{enumerate_embeddings, enumerate_structures, FinStructure, StructureError};
use crate::presentation::TreePresentation;

/// Default bound on the number of `A`-copies in `C` that
/// [`check_arrow`] will color.
pub const DEFAULT_COPY_CAP: usize = 24;

/// One arrow question: does every `colors`-coloring of the `A`-copies
/// in `C` leave some `B`-copy monochromatic?
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowInstance {
    pub c: FinStructure,
    pub b: FinStructure,
    pub a: FinStructure,
    pub colors: u32,
}

/// The answer to an arrow question.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ArrowOutcome {
    Holds,
    /// A coloring of the `A`-copies (in the order enumerated by
    /// [`enumerate_embeddings`], values `1..=colors`) under which no
    /// `B`-copy is monochromatic.
    Fails { coloring: Vec<u32> },
}

/// The result of searching for a structure satisfying the arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchOutcome {
    Witness { size: usize, structure: FinStructure },
    /// The search was cut short or exhausted without an answer. Never
    /// reported as a negative: larger witnesses may exist.
    Unknown { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RamseyError {
    #[error("color count must be at least 1")]
    ZeroColors,
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("instance has {copies} copies of the small structure, above the cap of {cap}")]
    CapExceeded { copies: usize, cap: usize },
    #[error("bad coloring failed its independent verification: {detail}")]
    VerificationFailed { detail: String },
}

/// Decides the arrow exactly. `cap` bounds the number of `A`-copies
/// that may be colored (see [`DEFAULT_COPY_CAP`]).
pub fn check_arrow(inst: &ArrowInstance, cap: usize) -> Result<ArrowOutcome, RamseyError> {
    if inst.colors == 0 {
        return Err(RamseyError::ZeroColors);
    }
    let a_copies = enumerate_embeddings(&inst.a, &inst.c)?;
    let b_copies = enumerate_embeddings(&inst.b, &inst.c)?;
    if a_copies.len() > cap {
        return Err(RamseyError::CapExceeded {
            copies: a_copies.len(),
            cap,
        });
    }
    // A-copies inside each B-copy. Images are sorted, so the subset
    // test is enough: an A-copy lying inside a B-copy's image is an
    // A-copy of that substructure.
    let members: Vec<Vec<usize>> = b_copies
        .iter()
        .map(|bc| {
            a_copies
                .iter()
                .enumerate()
                .filter(|(_, ac)| ac.iter().all(|x| bc.binary_search(x).is_ok()))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    // A B-copy containing no A-copies is monochromatic under every
    // coloring.
    if members.iter().any(|m| m.is_empty()) {
        return Ok(ArrowOutcome::Holds);
    }
    let mut containers: Vec<Vec<usize>> = vec![Vec::new(); a_copies.len()];
    for (j, m) in members.iter().enumerate() {
        for &i in m {
            containers[i].push(j);
        }
    }
    let totals: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut searcher = Searcher {
        colors: inst.colors,
        containers: &containers,
        totals: &totals,
        assignment: vec![0; a_copies.len()],
        states: vec![CopyState::default(); members.len()],
    };
    if !searcher.descend(0) {
        return Ok(ArrowOutcome::Holds);
    }
    let coloring = searcher.assignment;
    if !coloring_is_bad(&coloring, &members) {
        return Err(RamseyError::VerificationFailed {
            detail: format!("{coloring:?} leaves a monochromatic copy"),
        });
    }
    Ok(ArrowOutcome::Fails { coloring })
}

/// Tracking for one B-copy during the search: the single color seen so
/// far (0 when none), how many of its A-copies are colored, and
/// whether two colors have appeared.
#[derive(Clone, Default)]
struct CopyState {
    killed: bool,
    color: u32,
    colored: usize,
}

struct Searcher<'a> {
    colors: u32,
    containers: &'a [Vec<usize>],
    totals: &'a [usize],
    assignment: Vec<u32>,
    states: Vec<CopyState>,
}

impl Searcher<'_> {
    /// Tries to complete a bad coloring from position `i`, colors in
    /// ascending order, so the first success is lexicographically
    /// least. Returns whether one was found (left in `assignment`).
    fn descend(&mut self, i: usize) -> bool {
        if i == self.assignment.len() {
            return true;
        }
        for color in 1..=self.colors {
            let mut undo: Vec<(usize, CopyState)> = Vec::new();
            let mut completes_mono = false;
            for &j in &self.containers[i] {
                let state = self.states[j].clone();
                if state.killed {
                    continue;
                }
                undo.push((j, state));
                let s = &mut self.states[j];
                if s.color != 0 && s.color != color {
                    s.killed = true;
                } else {
                    s.color = color;
                    s.colored += 1;
                    if s.colored == self.totals[j] {
                        completes_mono = true;
                        break;
                    }
                }
            }
            if !completes_mono {
                self.assignment[i] = color;
                if self.descend(i + 1) {
                    return true;
                }
                self.assignment[i] = 0;
            }
            for (j, state) in undo.into_iter().rev() {
                self.states[j] = state;
            }
        }
        false
    }
}

/// Independent check that a coloring defeats the arrow: every B-copy
/// sees at least two colors.
fn coloring_is_bad(coloring: &[u32], members: &[Vec<usize>]) -> bool {
    members.iter().all(|m| match m.split_first() {
        None => false,
        Some((&first, rest)) => rest.iter().any(|&i| coloring[i] != coloring[first]),
    })
}

/// Searches for the smallest structure over `tree` satisfying
/// `C → (B)^A_colors`, trying every structure of each size from `|B|`
/// to `size_cap` in enumeration order. Any candidate skipped for
/// resources, or running out of sizes, yields `Unknown`.
pub fn search_witness(
    tree: &TreePresentation,
    b: &FinStructure,
    a: &FinStructure,
    colors: u32,
    size_cap: usize,
    copy_cap: usize,
    enum_cap: usize,
) -> Result<SearchOutcome, RamseyError> {
    if b.tree() != tree || a.tree() != tree {
        return Err(RamseyError::Structure(StructureError::TreeMismatch));
    }
    let mut skipped = false;
    for n in b.point_count()..=size_cap {
        let candidates = match enumerate_structures(tree, n, enum_cap) {
            Ok(cs) => cs,
            Err(StructureError::CapExceeded { .. }) => {
                return Ok(SearchOutcome::Unknown {
                    reason: format!("enumeration of size-{n} structures exceeded the cap"),
                })
            }
            Err(e) => return Err(e.into()),
        };
        for candidate in candidates {
            let inst = ArrowInstance {
                c: candidate,
                b: b.clone(),
                a: a.clone(),
                colors,
            };
            match check_arrow(&inst, copy_cap) {
                Ok(ArrowOutcome::Holds) => {
                    return Ok(SearchOutcome::Witness {
                        size: n,
                        structure: inst.c,
                    })
                }
                Ok(ArrowOutcome::Fails { .. }) => {}
                Err(RamseyError::CapExceeded { .. }) => skipped = true,
                Err(e) => return Err(e),
            }
        }
    }
    let reason = if skipped {
        "some candidates were skipped for exceeding the copy cap".to_string()
    } else {
        format!("no witness with at most {size_cap} points")
    };
    Ok(SearchOutcome::Unknown { reason })
}
