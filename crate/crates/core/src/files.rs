//! JSON file formats for finite structures and ultrametric spaces.
//!
//! Both formats are plain serde documents whose fields hold text forms
//! of the richer types: trees as expression text, node paths as
//! comma-joined child indices (empty text for the root), rationals as
//! `"a/b"` (or `"a"` when integral). Relations at omitted paths are
//! empty. Serialization goes through [`BTreeMap`], so equal inputs
//! produce byte-identical documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coordmodel::CoordPoint;
use crate::finstruct::{FinStructure, StructureError};
use crate::presentation::{NodePath, TreePresentation};
use crate::rationals::Rat;
use crate::ultra::{UltraError, UltraSpace};

/// Failures of reading or interpreting a document.
#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Tree(#[from] crate::presentation::ParseError),
    #[error(transparent)]
    Path(#[from] crate::presentation::NodePathParseError),
    #[error(transparent)]
    Rational(#[from] crate::rationals::RatParseError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Ultrametric(#[from] UltraError),
    #[error("{found} coordinate rows for {expected} points")]
    CoordCount { expected: usize, found: usize },
}

/// On-disk form of a [`FinStructure`], optionally carrying coordinates
/// for its points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructureFile {
    pub tree: String,
    pub points: usize,
    pub relations: BTreeMap<String, Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<String>>>,
}

impl StructureFile {
    /// Captures a structure, and coordinates when given.
    pub fn from_structure(s: &FinStructure, coords: Option<&[CoordPoint]>) -> StructureFile {
        StructureFile {
            tree: s.tree().to_string(),
            points: s.point_count(),
            relations: s
                .relations()
                .iter()
                .map(|(path, classes)| (path.to_string(), classes.clone()))
                .collect(),
            coords: coords.map(|rows| {
                rows.iter()
                    .map(|row| row.iter().map(Rat::to_string).collect())
                    .collect()
            }),
        }
    }

    /// Interprets the document as a structure, re-running all
    /// construction checks.
    pub fn to_structure(&self) -> Result<FinStructure, FileError> {
        let tree: TreePresentation = self.tree.parse()?;
        let mut relations: BTreeMap<NodePath, Vec<Vec<usize>>> = BTreeMap::new();
        for (path, classes) in &self.relations {
            relations.insert(path.parse()?, classes.clone());
        }
        Ok(FinStructure::new(tree, self.points, relations)?)
    }

    /// The coordinate rows, when present; checked to match the point
    /// count.
    pub fn to_coords(&self) -> Result<Option<Vec<CoordPoint>>, FileError> {
        let Some(rows) = &self.coords else {
            return Ok(None);
        };
        if rows.len() != self.points {
            return Err(FileError::CoordCount {
                expected: self.points,
                found: rows.len(),
            });
        }
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            out.push(row.iter().map(|s| s.parse()).collect::<Result<_, _>>()?);
        }
        Ok(Some(out))
    }

    pub fn from_json(text: &str) -> Result<StructureFile, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string-keyed document serializes")
    }
}

/// On-disk form of an [`UltraSpace`]: the distance set `S` and the
/// upper triangle of the matrix, row `i` holding `d(i, i+1..n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraFile {
    #[serde(rename = "S")]
    pub s: Vec<String>,
    pub points: usize,
    pub d: Vec<Vec<String>>,
}

impl UltraFile {
    pub fn from_space(space: &UltraSpace) -> UltraFile {
        UltraFile {
            s: space.distances().iter().map(Rat::to_string).collect(),
            points: space.point_count(),
            d: space
                .upper_triangle()
                .iter()
                .map(|row| row.iter().map(Rat::to_string).collect())
                .collect(),
        }
    }

    /// Interprets the document as a space, re-running all invariant
    /// checks.
    pub fn to_space(&self) -> Result<UltraSpace, FileError> {
        let distances = parse_rats(&self.s)?;
        let mut upper = Vec::with_capacity(self.d.len());
        for row in &self.d {
            upper.push(parse_rats(row)?);
        }
        Ok(UltraSpace::new(distances, self.points, upper)?)
    }

    pub fn from_json(text: &str) -> Result<UltraFile, FileError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("string-keyed document serializes")
    }
}

fn parse_rats(texts: &[String]) -> Result<Vec<Rat>, FileError> {
    texts
        .iter()
        .map(|s| s.parse().map_err(FileError::from))
        .collect()
}
