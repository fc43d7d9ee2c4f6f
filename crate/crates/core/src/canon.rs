//! Canonical forms for tree presentations via symbolic condensation.
//!
//! A [`CondTerm`] is a symbolic state of the condensation process: a
//! finite sequence of components, where `Pt(l)` is a single
//! condensation class whose content is the order denoted by `l`, and
//! `Mix(S)` is a densely interleaved arrangement of copies of the
//! segment sequences in `S`. Two facts about such arrangements drive
//! everything here and are exercised by materialization oracles in the
//! integration tests:
//!
//! * no two points in distinct copies of a mixture are adjacent,
//!   because further copies occur densely between them; and
//! * a mixture region has no first or last point.
//!
//! [`finite_condense`] therefore merges only runs of adjacent `Pt`
//! components (never across a `Mix`), and [`label_condense`] collapses
//! the maximal regions that look the same between any two of their
//! points. Alternating the two reaches a single class whose label is
//! the canonical presentation.

use std::collections::BTreeSet;
use std::fmt;

use crate::presentation::TreePresentation;

/// One component of a condensation state.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// A single condensation class labeled by a presentation.
    Pt(TreePresentation),
    /// Densely interleaved copies of the given segment sequences.
    /// The set is sorted and duplicate-free.
    Mix(Vec<Vec<Component>>),
}

impl Component {
    /// Builds a mixture, sorting and deduplicating the segment set.
    pub fn mix(mut segments: Vec<Vec<Component>>) -> Component {
        assert!(!segments.is_empty(), "mixture needs at least one segment");
        segments.sort();
        segments.dedup();
        Component::Mix(segments)
    }
}

/// A condensation state: the current order as a sequence of components.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CondTerm(pub Vec<Component>);

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Component::Pt(l) => write!(f, "Pt({l})"),
            Component::Mix(segs) => {
                write!(f, "Mix{{")?;
                for (i, seg) in segs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "[")?;
                    for (j, c) in seg.iter().enumerate() {
                        if j > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{c}")?;
                    }
                    write!(f, "]")?;
                }
                write!(f, "}}")
            }
        }
    }
}

impl fmt::Display for CondTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Failure of the condensation loop. Both variants signal a bug rather
/// than an expected outcome on well-formed input.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CanonError {
    #[error("condensation stalled on {0}")]
    NoProgress(String),
    #[error("condensation exceeded its iteration bound on {0}")]
    BoundExceeded(String),
}

/// Initial condensation state of a presentation.
pub fn to_lterm(t: &TreePresentation) -> CondTerm {
    CondTerm(tree_seq(t))
}

fn tree_seq(t: &TreePresentation) -> Vec<Component> {
    match t {
        TreePresentation::Leaf => vec![Component::Pt(TreePresentation::Leaf)],
        TreePresentation::Sum(cs) => cs.iter().flat_map(tree_seq).collect(),
        TreePresentation::Shuffle(cs) => {
            vec![Component::mix(cs.iter().map(tree_seq).collect())]
        }
    }
}

/// Sum of labels with one level of splicing, so a sum never gains a sum
/// child; a single label is returned unchanged.
fn sum_of(labels: Vec<TreePresentation>) -> TreePresentation {
    let mut children = Vec::new();
    for l in labels {
        match l {
            TreePresentation::Sum(cs) => children.extend(cs),
            other => children.push(other),
        }
    }
    if children.len() == 1 {
        children.pop().unwrap()
    } else {
        TreePresentation::sum(children)
    }
}

fn shuffle_of(lambda: &BTreeSet<TreePresentation>) -> TreePresentation {
    TreePresentation::shuffle(lambda.iter().cloned().collect())
}

/// Merges every maximal run of adjacent `Pt` components into one class
/// labeled by their sum, recursing into mixture segments first. Runs
/// never extend across a `Mix`: distinct copies of a mixture are never
/// adjacent, and a mixture region has no endpoints next to a `Pt`.
pub fn finite_condense(term: &CondTerm) -> CondTerm {
    CondTerm(condense_seq(&term.0))
}

fn condense_seq(seq: &[Component]) -> Vec<Component> {
    let mut out = Vec::with_capacity(seq.len());
    let mut run: Vec<TreePresentation> = Vec::new();
    for comp in seq {
        match comp {
            Component::Pt(l) => run.push(l.clone()),
            Component::Mix(segs) => {
                flush_run(&mut out, &mut run);
                out.push(Component::mix(segs.iter().map(|s| condense_seq(s)).collect()));
            }
        }
    }
    flush_run(&mut out, &mut run);
    out
}

fn flush_run(out: &mut Vec<Component>, run: &mut Vec<TreePresentation>) {
    if !run.is_empty() {
        out.push(Component::Pt(sum_of(std::mem::take(run))));
    }
}

/// Label set of a homogeneous mixture, or `None`.
///
/// A mixture is homogeneous when between any two of its points the
/// visible label set is the full set Λ of labels occurring anywhere in
/// its segments. Two points in distinct copies see every segment type,
/// hence all of Λ; two points in the same copy see the stretch of
/// their segment between them, which realizes Λ exactly when every
/// mixture inside the segment is itself homogeneous with label set Λ.
/// One-class segments `[Pt(l)]` contribute no same-copy pairs.
/// Expects its input in finite-condensed form.
pub fn homogeneity(segments: &[Vec<Component>]) -> Option<BTreeSet<TreePresentation>> {
    let mut lambda = BTreeSet::new();
    for seg in segments {
        collect_labels(seg, &mut lambda);
    }
    if segments_saturated(segments, &lambda) {
        Some(lambda)
    } else {
        None
    }
}

fn segments_saturated(segments: &[Vec<Component>], lambda: &BTreeSet<TreePresentation>) -> bool {
    segments.iter().all(|seg| {
        if let [Component::Pt(_)] = seg[..] {
            return true;
        }
        seg.iter().all(|comp| match comp {
            // Pt labels lie in Λ by construction of the union.
            Component::Pt(_) => true,
            Component::Mix(inner) => homogeneity(inner).as_ref() == Some(lambda),
        })
    })
}

fn collect_labels(seq: &[Component], out: &mut BTreeSet<TreePresentation>) {
    for comp in seq {
        match comp {
            Component::Pt(l) => {
                out.insert(l.clone());
            }
            Component::Mix(segs) => {
                for seg in segs {
                    collect_labels(seg, out);
                }
            }
        }
    }
}

/// Collapses maximal homogeneous stretches into single classes.
///
/// A stretch is a run of mixtures homogeneous with one common label set
/// Λ, possibly interleaved with single classes whose label lies in Λ;
/// it must start and end with a mixture, since a class at either edge
/// would give the stretch an endpoint. The run becomes `Pt(sigma(Λ))`
/// with Λ sorted structurally. Non-homogeneous mixtures are descended
/// into segment by segment; classes and mixture boundaries otherwise
/// stay put.
pub fn label_condense(term: &CondTerm) -> CondTerm {
    CondTerm(label_condense_seq(&term.0))
}

fn label_condense_seq(seq: &[Component]) -> Vec<Component> {
    // First classify mixtures and rewrite the non-homogeneous ones.
    let mut processed: Vec<Component> = Vec::with_capacity(seq.len());
    let mut marks: Vec<Option<BTreeSet<TreePresentation>>> = Vec::with_capacity(seq.len());
    for comp in seq {
        match comp {
            Component::Pt(_) => {
                processed.push(comp.clone());
                marks.push(None);
            }
            Component::Mix(segs) => match homogeneity(segs) {
                Some(lambda) => {
                    processed.push(comp.clone());
                    marks.push(Some(lambda));
                }
                None => {
                    processed.push(Component::mix(
                        segs.iter().map(|s| label_condense_seq(s)).collect(),
                    ));
                    marks.push(None);
                }
            },
        }
    }
    // Then merge maximal homogeneous stretches.
    let mut out = Vec::with_capacity(processed.len());
    let mut i = 0;
    while i < processed.len() {
        match &marks[i] {
            None => {
                out.push(processed[i].clone());
                i += 1;
            }
            Some(lambda) => {
                let mut last = i;
                loop {
                    if marks.get(last + 1).map_or(false, |m| m.as_ref() == Some(lambda)) {
                        last += 1;
                        continue;
                    }
                    // A single interior class whose label lies in Λ is
                    // absorbed, provided a Λ-mixture follows it.
                    let interior_class = match processed.get(last + 1) {
                        Some(Component::Pt(l)) => lambda.contains(l),
                        _ => false,
                    };
                    if interior_class
                        && marks.get(last + 2).map_or(false, |m| m.as_ref() == Some(lambda))
                    {
                        last += 2;
                        continue;
                    }
                    break;
                }
                out.push(Component::Pt(shuffle_of(lambda)));
                i = last + 1;
            }
        }
    }
    out
}

/// Canonical presentation of the order denoted by `t`.
///
/// Alternates [`finite_condense`] and [`label_condense`] until a single
/// class remains; its label is returned. Every pass eliminates at least
/// one mixture, so the iteration bound of twice the node count is
/// generous and exceeding it signals a bug, as does a pass that changes
/// nothing.
pub fn canonicalize(t: &TreePresentation) -> Result<TreePresentation, CanonError> {
    let bound = 2 * t.node_count() + 2;
    let mut u = to_lterm(t);
    for _ in 0..bound {
        u = finite_condense(&u);
        if let [Component::Pt(l)] = &u.0[..] {
            return Ok(l.clone());
        }
        let v = label_condense(&u);
        if v == u {
            return Err(CanonError::NoProgress(u.to_string()));
        }
        u = v;
    }
    Err(CanonError::BoundExceeded(u.to_string()))
}

/// Whether two presentations denote the same order type.
pub fn same_order_type(
    a: &TreePresentation,
    b: &TreePresentation,
) -> Result<bool, CanonError> {
    Ok(canonicalize(a)? == canonicalize(b)?)
}
