//! Tree presentations of sum-shuffle expressions.
//!
//! The concrete grammar is
//!
//! ```text
//! E ::= "1" | "s(" E ("," E)* ")" | "sigma(" E ("," E)* ")"
//! ```
//!
//! with whitespace ignored between tokens. `1` denotes the one-point
//! order, `s` concatenates its arguments, and `sigma` densely
//! interleaves copies of its arguments.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// A sum-shuffle expression. Children vectors are nonempty.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TreePresentation {
    Leaf,
    Sum(Vec<TreePresentation>),
    Shuffle(Vec<TreePresentation>),
}

impl TreePresentation {
    /// Builds a sum node. Panics on an empty child list; the parser and
    /// all internal constructions supply at least one child.
    pub fn sum(children: Vec<TreePresentation>) -> Self {
        assert!(!children.is_empty(), "sum node needs at least one child");
        TreePresentation::Sum(children)
    }

    /// Builds a shuffle node. Panics on an empty child list.
    pub fn shuffle(children: Vec<TreePresentation>) -> Self {
        assert!(!children.is_empty(), "shuffle node needs at least one child");
        TreePresentation::Shuffle(children)
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreePresentation::Leaf)
    }

    pub fn kind(&self) -> NodeKind {
        match self {
            TreePresentation::Leaf => NodeKind::Leaf,
            TreePresentation::Sum(_) => NodeKind::Sum,
            TreePresentation::Shuffle(_) => NodeKind::Shuffle,
        }
    }

    pub fn children(&self) -> &[TreePresentation] {
        match self {
            TreePresentation::Leaf => &[],
            TreePresentation::Sum(cs) | TreePresentation::Shuffle(cs) => cs,
        }
    }

    pub fn arity(&self) -> usize {
        self.children().len()
    }

    /// Total node count, counting this node.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    /// Number of leaves.
    pub fn leaf_count(&self) -> usize {
        match self {
            TreePresentation::Leaf => 1,
            _ => self.children().iter().map(|c| c.leaf_count()).sum(),
        }
    }

    /// True when the denoted order is finite, i.e. no shuffle node occurs.
    pub fn is_finite_order(&self) -> bool {
        match self {
            TreePresentation::Leaf => true,
            TreePresentation::Sum(cs) => cs.iter().all(|c| c.is_finite_order()),
            TreePresentation::Shuffle(_) => false,
        }
    }

    /// Node addressed by `path`, or an error naming the failing step.
    pub fn node_at(&self, path: &NodePath) -> Result<&TreePresentation, PathError> {
        let mut node = self;
        for (depth, &idx) in path.0.iter().enumerate() {
            let cs = node.children();
            if idx == 0 || idx > cs.len() {
                return Err(PathError {
                    path: path.clone(),
                    depth,
                });
            }
            node = &cs[idx - 1];
        }
        Ok(node)
    }

    /// Kind and arity of the node addressed by `path`.
    pub fn query_node(&self, path: &NodePath) -> Result<NodeInfo, PathError> {
        let node = self.node_at(path)?;
        let kind = match node {
            TreePresentation::Leaf => NodeKind::Leaf,
            TreePresentation::Sum(_) => NodeKind::Sum,
            TreePresentation::Shuffle(_) => NodeKind::Shuffle,
        };
        Ok(NodeInfo {
            kind,
            arity: node.arity(),
        })
    }

    /// All node paths in preorder, root first.
    pub fn all_paths(&self) -> Vec<NodePath> {
        let mut out = Vec::with_capacity(self.node_count());
        fn walk(node: &TreePresentation, prefix: &mut Vec<usize>, out: &mut Vec<NodePath>) {
            out.push(NodePath(prefix.clone()));
            for (i, c) in node.children().iter().enumerate() {
                prefix.push(i + 1);
                walk(c, prefix, out);
                prefix.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// All leaf paths in left-to-right order.
    pub fn leaf_paths(&self) -> Vec<NodePath> {
        self.all_paths()
            .into_iter()
            .filter(|p| self.node_at(p).map(|n| n.is_leaf()).unwrap_or(false))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Sum,
    Shuffle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    pub kind: NodeKind,
    pub arity: usize,
}

/// Total structural order: leaves before sums before shuffles, ties by
/// arity, then children compared left to right.
pub fn compare_structural(a: &TreePresentation, b: &TreePresentation) -> Ordering {
    fn rank(t: &TreePresentation) -> u8 {
        match t {
            TreePresentation::Leaf => 0,
            TreePresentation::Sum(_) => 1,
            TreePresentation::Shuffle(_) => 2,
        }
    }
    rank(a)
        .cmp(&rank(b))
        .then_with(|| a.arity().cmp(&b.arity()))
        .then_with(|| {
            for (ca, cb) in a.children().iter().zip(b.children()) {
                match compare_structural(ca, cb) {
                    Ordering::Equal => {}
                    other => return other,
                }
            }
            Ordering::Equal
        })
}

impl PartialOrd for TreePresentation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TreePresentation {
    fn cmp(&self, other: &Self) -> Ordering {
        compare_structural(self, other)
    }
}

impl fmt::Display for TreePresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreePresentation::Leaf => write!(f, "1"),
            TreePresentation::Sum(cs) | TreePresentation::Shuffle(cs) => {
                let head = if matches!(self, TreePresentation::Sum(_)) {
                    "s"
                } else {
                    "sigma"
                };
                write!(f, "{head}(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

impl FromStr for TreePresentation {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse(s)
    }
}

/// Syntax error, with the byte position where the input stopped making
/// sense.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at byte {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    /// Something other than `1`, `s(`, or `sigma(` where an expression
    /// must start.
    ExpectedExpression,
    /// A `(`, `)`, or `,` was missing.
    ExpectedToken(char),
    /// `s()` or `sigma()`: argument lists are nonempty.
    EmptyArguments,
    /// Input continued past a complete expression.
    TrailingInput,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::ExpectedExpression => write!(f, "expected `1`, `s(`, or `sigma(`"),
            ParseErrorKind::ExpectedToken(c) => write!(f, "expected `{c}`"),
            ParseErrorKind::EmptyArguments => write!(f, "empty argument list"),
            ParseErrorKind::TrailingInput => write!(f, "trailing input"),
        }
    }
}

/// Parses an expression, ignoring whitespace between tokens.
pub fn parse(text: &str) -> Result<TreePresentation, ParseError> {
    let mut p = Parser {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(ParseError {
            position: p.pos,
            kind: ParseErrorKind::TrailingInput,
        });
    }
    Ok(expr)
}

/// Renders with minimal whitespace; inverse of [`parse`].
pub fn render(t: &TreePresentation) -> String {
    t.to_string()
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        self.skip_ws();
        if self.pos < self.bytes.len() && self.bytes[self.pos] == c {
            self.pos += 1;
            Ok(())
        } else {
            Err(ParseError {
                position: self.pos,
                kind: ParseErrorKind::ExpectedToken(c as char),
            })
        }
    }

    fn expr(&mut self) -> Result<TreePresentation, ParseError> {
        self.skip_ws();
        let start = self.pos;
        match self.bytes.get(self.pos) {
            Some(b'1') => {
                self.pos += 1;
                Ok(TreePresentation::Leaf)
            }
            Some(b's') => {
                let mut end = self.pos;
                while end < self.bytes.len() && self.bytes[end].is_ascii_lowercase() {
                    end += 1;
                }
                let word = &self.bytes[self.pos..end];
                let shuffle = match word {
                    b"s" => false,
                    b"sigma" => true,
                    _ => {
                        return Err(ParseError {
                            position: start,
                            kind: ParseErrorKind::ExpectedExpression,
                        })
                    }
                };
                self.pos = end;
                self.expect(b'(')?;
                self.skip_ws();
                if self.bytes.get(self.pos) == Some(&b')') {
                    return Err(ParseError {
                        position: self.pos,
                        kind: ParseErrorKind::EmptyArguments,
                    });
                }
                let mut children = vec![self.expr()?];
                loop {
                    self.skip_ws();
                    match self.bytes.get(self.pos) {
                        Some(b',') => {
                            self.pos += 1;
                            children.push(self.expr()?);
                        }
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => {
                            return Err(ParseError {
                                position: self.pos,
                                kind: ParseErrorKind::ExpectedToken(')'),
                            })
                        }
                    }
                }
                Ok(if shuffle {
                    TreePresentation::Shuffle(children)
                } else {
                    TreePresentation::Sum(children)
                })
            }
            _ => Err(ParseError {
                position: start,
                kind: ParseErrorKind::ExpectedExpression,
            }),
        }
    }
}

/// Address of a node: 1-based child indices from the root. The root is
/// the empty path.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// First `depth` steps.
    pub fn prefix(&self, depth: usize) -> NodePath {
        NodePath(self.0[..depth].to_vec())
    }

    /// This path extended by 1-based child index `idx`.
    pub fn child(&self, idx: usize) -> NodePath {
        assert!(idx >= 1, "child indices are 1-based");
        let mut v = self.0.clone();
        v.push(idx);
        NodePath(v)
    }

    pub fn starts_with(&self, other: &NodePath) -> bool {
        self.0.len() >= other.0.len() && self.0[..other.0.len()] == other.0[..]
    }
}

/// `path` does not address a node: the step at `depth` is out of range.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("path {path} leaves the tree at depth {depth}")]
pub struct PathError {
    pub path: NodePath,
    pub depth: usize,
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

/// Parses the comma-joined form used in structure files; the empty
/// string is the root.
impl FromStr for NodePath {
    type Err = NodePathParseError;

    fn from_str(s: &str) -> Result<Self, NodePathParseError> {
        if s.is_empty() {
            return Ok(NodePath::root());
        }
        let mut steps = Vec::new();
        for part in s.split(',') {
            let n: usize = part
                .trim()
                .parse()
                .map_err(|_| NodePathParseError(s.to_owned()))?;
            if n == 0 {
                return Err(NodePathParseError(s.to_owned()));
            }
            steps.push(n);
        }
        Ok(NodePath(steps))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("invalid node path {0:?}: expected comma-joined positive integers")]
pub struct NodePathParseError(pub String);
