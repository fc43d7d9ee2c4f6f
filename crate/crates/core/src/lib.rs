//! Linear orders presented by sum-shuffle trees.
//!
//! A tree presentation denotes a countable linear order built from two
//! constructors: finite sums `s(...)` concatenate their arguments, and
//! shuffles `sigma(...)` arrange densely interleaved copies of theirs.
//! This crate provides:
//!
//! * parsing, printing, and a total structural order on presentations
//!   ([`presentation`]);
//! * a condensation-based canonical form deciding order-type equality
//!   ([`canon`]);
//! * the partition of the rationals used to coordinatize models, with a
//!   deterministic fresh-value scan ([`rationals`]);
//! * the coordinatized model over a tree, membership and comparison of
//!   coordinate points, and constructive embedding extension
//!   ([`coordmodel`]);
//! * finite structures in the tree's signature: axiom validation,
//!   embedding enumeration, exhaustive generation, and amalgamation
//!   ([`finstruct`]);
//! * small-scale Ramsey arrow checks and witness search ([`ramsey`]);
//! * the two-way translation between structures over iterated shuffles
//!   and convexly ordered ultrametric spaces ([`ultra`]);
//! * JSON file formats for structures and ultrametric spaces ([`files`]).

pub mod canon;
pub mod coordmodel;
pub mod files;
pub mod finstruct;
pub mod presentation;
pub mod ramsey;
pub mod rationals;
pub mod ultra;

pub use canon::{canonicalize, same_order_type, CanonError, Component, CondTerm};
pub use coordmodel::{CoordError, CoordModel, CoordPoint};
pub use files::{FileError, StructureFile, UltraFile};
pub use finstruct::{
    amalgamate, are_isomorphic, enumerate_embeddings, enumerate_structures, verify_embedding,
    Amalgam, Axiom, Embedding, FinStructure, StructureError, Violation,
};
pub use presentation::{compare_structural, NodeInfo, NodeKind, NodePath, ParseError, TreePresentation};
pub use ramsey::{
    check_arrow, search_witness, ArrowInstance, ArrowOutcome, RamseyError, SearchOutcome,
    DEFAULT_COPY_CAP,
};
pub use rationals::{class_of, fresh_in_class, ClassIndex, Rat};
pub use ultra::{
    enumerate_isometries, level_paths, to_ultrametric, tower_tree, UltraError, UltraSpace,
};
