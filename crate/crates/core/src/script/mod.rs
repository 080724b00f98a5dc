//! Edit scripts: derivation from a mapping, application, and serialization.

pub(crate) mod cost;
mod serialize;
mod work;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matcher::{MappingError, MappingStore};
use crate::tree::{render_node, NodeId, NodeSpec, SourceSpan, SyntaxTree};

pub use cost::induced_length;
pub use serialize::{serialize, Format, ParseFormatError};
pub use work::VIRTUAL_ROOT;

use work::WorkTree;

/// Node reference inside a script.
///
/// Source nodes keep their preorder id, the virtual root above the source
/// root is `source_len`, and inserted nodes are numbered upward from there
/// in the order they are created.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WorkId(pub u32);

impl WorkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<NodeId> for WorkId {
    fn from(id: NodeId) -> Self {
        WorkId(id.0)
    }
}

impl fmt::Display for WorkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "@{}", self.0)
    }
}

/// What a node looked like when an action touched it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeDesc {
    pub kind: String,
    pub label: String,
    /// `None` for inserted nodes and the virtual root.
    pub span: Option<SourceSpan>,
}

impl fmt::Display for NodeDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_node(f, &self.kind, &self.label, self.span)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Insert,
    Delete,
    Update,
    Move,
}

impl ActionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ActionKind::Insert => "insert",
            ActionKind::Delete => "delete",
            ActionKind::Update => "update",
            ActionKind::Move => "move",
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EditAction {
    /// Inserts `tree` as child `position` of `parent`. The new subtree root
    /// gets id `node`, its descendants the following ids in preorder.
    Insert {
        node: WorkId,
        tree: NodeSpec,
        parent: WorkId,
        parent_desc: NodeDesc,
        position: usize,
    },
    /// Removes `node`, which must have no children left.
    Delete { node: WorkId, subject: NodeDesc },
    Update {
        node: WorkId,
        subject: NodeDesc,
        new_label: String,
    },
    /// Detaches `node`, then inserts it as child `position` of `parent`;
    /// the position is counted after the detach.
    Move {
        node: WorkId,
        subject: NodeDesc,
        parent: WorkId,
        parent_desc: NodeDesc,
        position: usize,
    },
}

impl EditAction {
    pub fn kind(&self) -> ActionKind {
        match self {
            EditAction::Insert { .. } => ActionKind::Insert,
            EditAction::Delete { .. } => ActionKind::Delete,
            EditAction::Update { .. } => ActionKind::Update,
            EditAction::Move { .. } => ActionKind::Move,
        }
    }

    pub fn node(&self) -> WorkId {
        match self {
            EditAction::Insert { node, .. }
            | EditAction::Delete { node, .. }
            | EditAction::Update { node, .. }
            | EditAction::Move { node, .. } => *node,
        }
    }

    pub fn subject(&self) -> NodeDesc {
        match self {
            EditAction::Insert { tree, .. } => NodeDesc {
                kind: tree.kind.clone(),
                label: tree.label.clone(),
                span: None,
            },
            EditAction::Delete { subject, .. }
            | EditAction::Update { subject, .. }
            | EditAction::Move { subject, .. } => subject.clone(),
        }
    }
}

impl fmt::Display for EditAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EditAction::Insert {
                parent_desc,
                position,
                ..
            } => write!(
                f,
                "insert-node {} into {parent_desc} at {position}",
                self.subject()
            ),
            EditAction::Delete { subject, .. } => write!(f, "delete-node {subject}"),
            EditAction::Update {
                subject, new_label, ..
            } => write!(f, "update-node {subject} -> {new_label}"),
            EditAction::Move {
                subject,
                parent_desc,
                position,
                ..
            } => write!(f, "move-node {subject} into {parent_desc} at {position}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditScript {
    pub actions: Vec<EditAction>,
    pub source_id: String,
    pub dest_id: String,
    /// Node count of the source tree the ids refer to.
    pub source_len: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionCounts {
    pub inserts: usize,
    pub deletes: usize,
    pub updates: usize,
    pub moves: usize,
}

impl ActionCounts {
    pub fn total(&self) -> usize {
        self.inserts + self.deletes + self.updates + self.moves
    }
}

impl EditScript {
    pub fn empty(source_len: usize) -> Self {
        EditScript {
            actions: Vec::new(),
            source_id: String::new(),
            dest_id: String::new(),
            source_len,
        }
    }

    pub fn with_ids(mut self, source_id: impl Into<String>, dest_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self.dest_id = dest_id.into();
        self
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn counts(&self) -> ActionCounts {
        let mut c = ActionCounts::default();
        for a in &self.actions {
            match a.kind() {
                ActionKind::Insert => c.inserts += 1,
                ActionKind::Delete => c.deletes += 1,
                ActionKind::Update => c.updates += 1,
                ActionKind::Move => c.moves += 1,
            }
        }
        c
    }
}

/// Number of actions. An inserted subtree is one action; deletes remove
/// one node each.
pub fn edit_distance(script: &EditScript) -> usize {
    script.actions.len()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScriptError {
    #[error("invalid mapping: {0}")]
    InvalidMapping(#[from] MappingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("action {index}: {reason}")]
pub struct ApplyError {
    pub index: usize,
    pub reason: String,
}

/// Plays `script` against `src` and returns the resulting tree. Inserted
/// nodes carry no span.
pub fn apply_edit_script(src: &SyntaxTree, script: &EditScript) -> Result<SyntaxTree, ApplyError> {
    if script.source_len != src.len() {
        return Err(ApplyError {
            index: 0,
            reason: format!(
                "script was generated for a {}-node tree, got {} nodes",
                script.source_len,
                src.len()
            ),
        });
    }
    let mut w = WorkTree::from_source(src);
    for (i, action) in script.actions.iter().enumerate() {
        w.apply(i, action)?;
    }
    w.finish(src.len()).map_err(|reason| ApplyError {
        index: script.actions.len(),
        reason,
    })
}

/// Derives the edit script that turns `src` into `dst` under `m`.
///
/// Destination nodes are visited in preorder: an unmapped node whose
/// parent is mapped is inserted together with all of its unmapped
/// descendants, a mapped node is updated if its label differs and moved if
/// its parent does not correspond, and the children of every mapped node
/// are then put in destination order with as few moves as possible.
/// Unmapped source nodes are deleted last, one by one in source postorder.
///
/// The length always equals [`induced_length`] for the same mapping.
pub fn generate_edit_script(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    m: &MappingStore,
) -> Result<EditScript, ScriptError> {
    m.validate(src, dst)?;
    let mut g = Generator {
        src,
        dst,
        m,
        w: WorkTree::from_source(src),
        d2w: dst.ids().map(|d| m.src_of(d).map(WorkId::from)).collect(),
        inserted: vec![false; dst.len()],
        in_order: vec![false; dst.len()],
        actions: Vec::new(),
    };
    g.run();
    Ok(EditScript {
        actions: g.actions,
        source_id: String::new(),
        dest_id: String::new(),
        source_len: src.len(),
    })
}

struct Generator<'a> {
    src: &'a SyntaxTree,
    dst: &'a SyntaxTree,
    m: &'a MappingStore,
    w: WorkTree,
    d2w: Vec<Option<WorkId>>,
    inserted: Vec<bool>,
    in_order: Vec<bool>,
    actions: Vec<EditAction>,
}

impl Generator<'_> {
    fn push(&mut self, action: EditAction) {
        self.w
            .apply(self.actions.len(), &action)
            .expect("generated actions apply to the working tree");
        self.actions.push(action);
    }

    fn run(&mut self) {
        let vroot = WorkTree::virtual_root(self.src.len());
        for x in self.dst.ids() {
            if self.inserted[x.index()] {
                continue;
            }
            let parent = self.dst.parent(x).map_or(vroot, |p| {
                self.d2w[p.index()].expect("parents are placed before children")
            });
            let Some(s) = self.m.src_of(x) else {
                self.insert_bundle(x, parent);
                continue;
            };
            let wx = WorkId::from(s);
            let label = self.dst.label(x);
            if self.w.label(wx) != label {
                let subject = self.w.desc(wx);
                self.push(EditAction::Update {
                    node: wx,
                    subject,
                    new_label: label.to_owned(),
                });
            }
            if self.w.parent(wx) != Some(parent) {
                let position = self.find_pos(x, parent, Some(wx));
                self.push(EditAction::Move {
                    node: wx,
                    subject: self.w.desc(wx),
                    parent,
                    parent_desc: self.w.desc(parent),
                    position,
                });
                self.in_order[x.index()] = true;
            }
            if self.dst.parent(x).is_none() {
                self.in_order[x.index()] = true;
            }
            self.align_children(x, wx);
        }
        for s in self.src.postorder(self.src.root()) {
            if !self.m.is_src_mapped(s) {
                let node = WorkId::from(s);
                self.push(EditAction::Delete {
                    node,
                    subject: self.w.desc(node),
                });
            }
        }
    }

    fn insert_bundle(&mut self, x: NodeId, parent: WorkId) {
        let position = self.find_pos(x, parent, None);
        let node = self.w.next_id();
        let mut next = node.0;
        let tree = self.bundle(x, &mut next);
        self.push(EditAction::Insert {
            node,
            tree,
            parent,
            parent_desc: self.w.desc(parent),
            position,
        });
    }

    // Unmapped subtree under `x`, assigning working ids in preorder.
    fn bundle(&mut self, x: NodeId, next: &mut u32) -> NodeSpec {
        self.d2w[x.index()] = Some(WorkId(*next));
        self.inserted[x.index()] = true;
        self.in_order[x.index()] = true;
        *next += 1;
        let mut spec = NodeSpec::new(self.dst.kind(x), self.dst.label(x));
        for &c in self.dst.children(x) {
            if !self.m.is_dst_mapped(c) {
                spec.children.push(self.bundle(c, next));
            }
        }
        spec
    }

    // Position right after the working partner of the rightmost in-order
    // left sibling of `x`, counted after `moving` is detached.
    fn find_pos(&self, x: NodeId, parent: WorkId, moving: Option<WorkId>) -> usize {
        let Some(dp) = self.dst.parent(x) else {
            return 0;
        };
        let left = self
            .dst
            .children(dp)
            .iter()
            .take_while(|&&c| c != x)
            .filter(|&&c| self.in_order[c.index()])
            .last();
        let Some(&v) = left else { return 0 };
        let wv = self.d2w[v.index()].expect("in-order nodes are placed");
        let list = self.w.children(parent);
        let mut at = list
            .iter()
            .position(|&c| c == wv)
            .expect("in-order siblings sit under the parent");
        if let Some(mv) = moving {
            if list.iter().position(|&c| c == mv).is_some_and(|i| i < at) {
                at -= 1;
            }
        }
        at + 1
    }

    fn align_children(&mut self, x: NodeId, wx: WorkId) {
        // Partners of the working children of `wx` that are children of `x`,
        // in working order. Partner ids increase with sibling position.
        let mut keys: Vec<u32> = Vec::new();
        for &c in self.w.children(wx) {
            if c.index() >= self.src.len() {
                continue;
            }
            if let Some(d) = self.m.dst_of(NodeId(c.0)) {
                if self.dst.parent(d) == Some(x) {
                    keys.push(d.0);
                }
            }
        }
        let mut aligned = vec![false; self.dst.children(x).len()];
        for &k in &keys {
            aligned[self.dst.child_position(NodeId(k)).expect("child of x")] = true;
        }
        for i in cost::increasing_subsequence(&keys) {
            self.in_order[keys[i] as usize] = true;
        }
        let misplaced: Vec<NodeId> = self
            .dst
            .children(x)
            .iter()
            .enumerate()
            .filter(|&(i, &c)| aligned[i] && !self.in_order[c.index()])
            .map(|(_, &c)| c)
            .collect();
        for c in misplaced {
            let wc = self.d2w[c.index()].expect("mapped");
            let position = self.find_pos(c, wx, Some(wc));
            self.push(EditAction::Move {
                node: wc,
                subject: self.w.desc(wc),
                parent: wx,
                parent_desc: self.w.desc(wx),
                position,
            });
            self.in_order[c.index()] = true;
        }
    }
}
