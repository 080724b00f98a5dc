//! Ordered labeled trees with source spans.
//!
//! A [`SyntaxTree`] is an immutable arena whose node ids are preorder
//! indices. Because of that numbering the strict descendants of a node
//! `n` are exactly the ids `n + 1 .. n + size(n)`, which the matcher and
//! the edit-script generator rely on for constant-time ancestry checks.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Seed of the structural hash. Changing it changes every hash value but
/// none of the equalities between them.
pub const HASH_SEED: u64 = 0xcbf2_9ce4_8422_2325;

const HASH_PRIME: u64 = 0x0000_0100_0000_01b3;

/// Half-open byte range `[start, end)` into the UTF-8 source text.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize) -> Self {
        debug_assert!(start <= end, "span start {start} after end {end}");
        SourceSpan { start, end }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }

    pub fn contains(&self, other: &SourceSpan) -> bool {
        self.start <= other.start && other.end <= self.end
    }
}

/// Identifier of a node inside one [`SyntaxTree`]: its preorder index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Owned, nested description of a tree. Used to build a [`SyntaxTree`]
/// and to carry inserted subtrees inside edit actions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub kind: String,
    pub label: String,
    /// `None` marks a synthetic node with no position in any source.
    pub span: Option<SourceSpan>,
    pub children: Vec<NodeSpec>,
}

impl NodeSpec {
    pub fn new(kind: impl Into<String>, label: impl Into<String>) -> Self {
        NodeSpec {
            kind: kind.into(),
            label: label.into(),
            span: None,
            children: Vec::new(),
        }
    }

    pub fn with_span(mut self, span: SourceSpan) -> Self {
        self.span = Some(span);
        self
    }

    pub fn with_children(mut self, children: Vec<NodeSpec>) -> Self {
        self.children = children;
        self
    }

    pub fn push(&mut self, child: NodeSpec) {
        self.children.push(child);
    }

    /// Number of nodes in this subtree.
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(NodeSpec::size).sum::<usize>()
    }
}

#[derive(Clone, Debug)]
struct NodeData {
    kind: String,
    label: String,
    span: Option<SourceSpan>,
    parent: Option<NodeId>,
    children: Vec<NodeId>,
    height: u32,
    size: u32,
    depth: u32,
    hash: u64,
}

/// Immutable ordered labeled tree over a source text.
#[derive(Clone, Debug)]
pub struct SyntaxTree {
    source: Arc<str>,
    nodes: Vec<NodeData>,
}

impl SyntaxTree {
    /// Builds a tree, assigning ids in preorder.
    pub fn from_spec(source: impl Into<Arc<str>>, root: NodeSpec) -> SyntaxTree {
        let mut nodes = Vec::with_capacity(root.size());
        // Explicit stack: generated trees can be deep enough to matter.
        let mut stack: Vec<(NodeSpec, Option<NodeId>, u32)> = vec![(root, None, 0)];
        while let Some((spec, parent, depth)) = stack.pop() {
            let id = NodeId(nodes.len() as u32);
            if let Some(p) = parent {
                let p: &mut NodeData = &mut nodes[p.index()];
                p.children.push(id);
            }
            let NodeSpec {
                kind,
                label,
                span,
                children,
            } = spec;
            nodes.push(NodeData {
                kind,
                label,
                span,
                parent,
                children: Vec::with_capacity(children.len()),
                height: 1,
                size: 1,
                depth,
                hash: 0,
            });
            for child in children.into_iter().rev() {
                stack.push((child, Some(id), depth + 1));
            }
        }
        // Reverse preorder visits every child before its parent.
        for i in (0..nodes.len()).rev() {
            let mut height = 1;
            let mut size = 1;
            let mut hash = hash_header(&nodes[i].kind, &nodes[i].label);
            for &c in &nodes[i].children {
                let child = &nodes[c.index()];
                height = height.max(child.height + 1);
                size += child.size;
                hash = hash_child(hash, child.hash);
            }
            let n = &mut nodes[i];
            n.height = height;
            n.size = size;
            n.hash = hash_finish(hash, n.children.len());
        }
        SyntaxTree {
            source: source.into(),
            nodes,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn source_arc(&self) -> Arc<str> {
        Arc::clone(&self.source)
    }

    pub fn root(&self) -> NodeId {
        NodeId(0)
    }

    /// Total number of nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, id: NodeId) -> bool {
        id.index() < self.nodes.len()
    }

    pub fn node(&self, id: NodeId) -> Node<'_> {
        assert!(
            self.contains(id),
            "node {id} not in tree of {} nodes",
            self.len()
        );
        Node { tree: self, id }
    }

    /// All ids in preorder.
    pub fn ids(&self) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn kind(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].kind
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.nodes[id.index()].label
    }

    pub fn span(&self, id: NodeId) -> Option<SourceSpan> {
        self.nodes[id.index()].span
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.nodes[id.index()].parent
    }

    pub fn children(&self, id: NodeId) -> &[NodeId] {
        &self.nodes[id.index()].children
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id.index()].children.is_empty()
    }

    /// Leaves have height 1.
    pub fn height(&self, id: NodeId) -> usize {
        self.nodes[id.index()].height as usize
    }

    /// Number of nodes in the subtree rooted at `id`, itself included.
    pub fn size(&self, id: NodeId) -> usize {
        self.nodes[id.index()].size as usize
    }

    pub fn depth(&self, id: NodeId) -> usize {
        self.nodes[id.index()].depth as usize
    }

    pub fn structural_hash(&self, id: NodeId) -> u64 {
        self.nodes[id.index()].hash
    }

    /// Strict descendants of `id` in preorder.
    pub fn descendants(
        &self,
        id: NodeId,
    ) -> impl DoubleEndedIterator<Item = NodeId> + ExactSizeIterator {
        let start = id.0 + 1;
        let end = id.0 + self.nodes[id.index()].size;
        (start..end).map(NodeId)
    }

    /// `true` if `desc` lies strictly below `anc`.
    #[inline]
    pub fn is_descendant(&self, desc: NodeId, anc: NodeId) -> bool {
        desc.0 > anc.0 && desc.0 < anc.0 + self.nodes[anc.index()].size
    }

    /// Postorder of the subtree rooted at `id`.
    pub fn postorder(&self, id: NodeId) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.size(id));
        let mut stack = vec![(id, 0usize)];
        while let Some((n, next)) = stack.pop() {
            let children = self.children(n);
            if next < children.len() {
                stack.push((n, next + 1));
                stack.push((children[next], 0));
            } else {
                out.push(n);
            }
        }
        out
    }

    /// Ancestors of `id`, nearest first.
    pub fn ancestors(&self, id: NodeId) -> Ancestors<'_> {
        Ancestors {
            tree: self,
            next: self.parent(id),
        }
    }

    /// Index of `id` among its parent's children.
    pub fn child_position(&self, id: NodeId) -> Option<usize> {
        let parent = self.parent(id)?;
        self.children(parent).iter().position(|&c| c == id)
    }

    /// Copies the subtree at `id` into an owned [`NodeSpec`].
    pub fn to_spec(&self, id: NodeId) -> NodeSpec {
        let mut spec = NodeSpec {
            kind: self.kind(id).to_owned(),
            label: self.label(id).to_owned(),
            span: self.span(id),
            children: Vec::with_capacity(self.children(id).len()),
        };
        for &c in self.children(id) {
            spec.children.push(self.to_spec(c));
        }
        spec
    }

    /// Debug dump: one node per line, four spaces of indentation per
    /// level, each line rendered as `nodeType: label [start,end]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for id in self.ids() {
            for _ in 0..self.depth(id) {
                out.push_str("    ");
            }
            out.push_str(&self.node(id).to_string());
            out.push('\n');
        }
        out
    }
}

/// Borrowed handle to one node of a tree.
#[derive(Clone, Copy)]
pub struct Node<'a> {
    tree: &'a SyntaxTree,
    id: NodeId,
}

impl<'a> Node<'a> {
    pub fn id(&self) -> NodeId {
        self.id
    }
    pub fn tree(&self) -> &'a SyntaxTree {
        self.tree
    }
    pub fn kind(&self) -> &'a str {
        self.tree.kind(self.id)
    }
    pub fn label(&self) -> &'a str {
        self.tree.label(self.id)
    }
    pub fn span(&self) -> Option<SourceSpan> {
        self.tree.span(self.id)
    }
    pub fn children(&self) -> impl Iterator<Item = Node<'a>> + 'a {
        let tree = self.tree;
        tree.children(self.id)
            .iter()
            .map(move |&id| Node { tree, id })
    }
    pub fn height(&self) -> usize {
        self.tree.height(self.id)
    }
    pub fn structural_hash(&self) -> u64 {
        self.tree.structural_hash(self.id)
    }
}

impl fmt::Display for Node<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_node(f, self.kind(), self.label(), self.span())
    }
}

impl fmt::Debug for Node<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.id, self)
    }
}

/// Renders `kind: label [start,end]`. Structural nodes with an empty label
/// render as `kind [start,end]`; synthetic spans render as `[-1,-1]`.
pub fn render_node(
    f: &mut impl fmt::Write,
    kind: &str,
    label: &str,
    span: Option<SourceSpan>,
) -> fmt::Result {
    f.write_str(kind)?;
    if !label.is_empty() {
        write!(f, ": {label}")?;
    }
    match span {
        Some(s) => write!(f, " [{},{}]", s.start, s.end),
        None => f.write_str(" [-1,-1]"),
    }
}

pub struct Ancestors<'a> {
    tree: &'a SyntaxTree,
    next: Option<NodeId>,
}

impl Iterator for Ancestors<'_> {
    type Item = NodeId;
    fn next(&mut self) -> Option<NodeId> {
        let cur = self.next?;
        self.next = self.tree.parent(cur);
        Some(cur)
    }
}

/// Height of `id`: 1 for leaves, else one more than the tallest child.
pub fn height(tree: &SyntaxTree, id: NodeId) -> usize {
    tree.height(id)
}

/// Hash of `(kind, label, ordered child hashes)`; spans and ids do not
/// contribute.
pub fn structural_hash(tree: &SyntaxTree, id: NodeId) -> u64 {
    tree.structural_hash(id)
}

/// Strict descendants of `id`, preorder.
pub fn descendants(tree: &SyntaxTree, id: NodeId) -> Vec<NodeId> {
    tree.descendants(id).collect()
}

/// Structural equality of two subtrees, possibly from different trees.
pub fn isomorphic(a_tree: &SyntaxTree, a: NodeId, b_tree: &SyntaxTree, b: NodeId) -> bool {
    let size = a_tree.size(a);
    if size != b_tree.size(b) || a_tree.structural_hash(a) != b_tree.structural_hash(b) {
        return false;
    }
    // Preorder plus arity determines an ordered tree.
    (0..size as u32).all(|off| {
        let x = NodeId(a.0 + off);
        let y = NodeId(b.0 + off);
        a_tree.kind(x) == b_tree.kind(y)
            && a_tree.label(x) == b_tree.label(y)
            && a_tree.children(x).len() == b_tree.children(y).len()
    })
}

fn hash_bytes(mut h: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(HASH_PRIME);
    }
    h
}

fn hash_header(kind: &str, label: &str) -> u64 {
    let h = hash_bytes(HASH_SEED, kind.as_bytes());
    // 0xff never occurs in UTF-8, so it separates kind from label.
    let h = hash_bytes(h, &[0xff]);
    hash_bytes(h, label.as_bytes())
}

fn hash_child(h: u64, child: u64) -> u64 {
    (h.rotate_left(23) ^ child).wrapping_mul(HASH_PRIME)
}

fn hash_finish(h: u64, arity: usize) -> u64 {
    let h = (h ^ arity as u64).wrapping_mul(HASH_PRIME);
    h ^ (h >> 29)
}
