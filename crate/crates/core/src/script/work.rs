use crate::tree::{NodeSpec, SourceSpan, SyntaxTree};

use super::{ApplyError, EditAction, NodeDesc, WorkId};

/// Mutable tree that edit actions are played against.
///
/// Ids: source nodes keep their preorder ids, the virtual root above the
/// source root takes the next id, and inserted nodes are numbered from
/// there in insertion order (preorder within each inserted subtree).
#[derive(Debug, Clone)]
pub(crate) struct WorkTree {
    kind: Vec<String>,
    label: Vec<String>,
    span: Vec<Option<SourceSpan>>,
    parent: Vec<Option<WorkId>>,
    children: Vec<Vec<WorkId>>,
    alive: Vec<bool>,
    source: std::sync::Arc<str>,
}

impl WorkTree {
    pub(crate) fn from_source(src: &SyntaxTree) -> Self {
        let n = src.len();
        let mut w = WorkTree {
            kind: Vec::with_capacity(n + 1),
            label: Vec::with_capacity(n + 1),
            span: Vec::with_capacity(n + 1),
            parent: Vec::with_capacity(n + 1),
            children: Vec::with_capacity(n + 1),
            alive: vec![true; n + 1],
            source: src.source_arc(),
        };
        let vroot = WorkId(n as u32);
        for id in src.ids() {
            w.kind.push(src.kind(id).to_owned());
            w.label.push(src.label(id).to_owned());
            w.span.push(src.span(id));
            w.parent
                .push(Some(src.parent(id).map_or(vroot, |p| WorkId(p.0))));
            w.children
                .push(src.children(id).iter().map(|c| WorkId(c.0)).collect());
        }
        w.kind.push(VIRTUAL_ROOT.to_owned());
        w.label.push(String::new());
        w.span.push(None);
        w.parent.push(None);
        w.children
            .push(if n > 0 { vec![WorkId(0)] } else { Vec::new() });
        w
    }

    pub(crate) fn virtual_root(source_len: usize) -> WorkId {
        WorkId(source_len as u32)
    }

    pub(crate) fn next_id(&self) -> WorkId {
        WorkId(self.kind.len() as u32)
    }

    pub(crate) fn is_live(&self, id: WorkId) -> bool {
        self.alive.get(id.index()).copied().unwrap_or(false)
    }

    pub(crate) fn label(&self, id: WorkId) -> &str {
        &self.label[id.index()]
    }

    pub(crate) fn parent(&self, id: WorkId) -> Option<WorkId> {
        self.parent[id.index()]
    }

    pub(crate) fn children(&self, id: WorkId) -> &[WorkId] {
        &self.children[id.index()]
    }

    pub(crate) fn desc(&self, id: WorkId) -> NodeDesc {
        NodeDesc {
            kind: self.kind[id.index()].clone(),
            label: self.label[id.index()].clone(),
            span: self.span[id.index()],
        }
    }

    fn is_ancestor_or_self(&self, anc: WorkId, mut node: WorkId) -> bool {
        loop {
            if node == anc {
                return true;
            }
            match self.parent[node.index()] {
                Some(p) => node = p,
                None => return false,
            }
        }
    }

    fn detach(&mut self, id: WorkId) {
        if let Some(p) = self.parent[id.index()].take() {
            self.children[p.index()].retain(|&c| c != id);
        }
    }

    fn add_spec(&mut self, spec: &NodeSpec, parent: Option<WorkId>) -> WorkId {
        let id = self.next_id();
        self.kind.push(spec.kind.clone());
        self.label.push(spec.label.clone());
        self.span.push(None);
        self.parent.push(parent);
        self.children.push(Vec::with_capacity(spec.children.len()));
        self.alive.push(true);
        for child in &spec.children {
            let c = self.add_spec(child, Some(id));
            self.children[id.index()].push(c);
        }
        id
    }

    /// Plays one action; `index` only labels errors.
    pub(crate) fn apply(&mut self, index: usize, action: &EditAction) -> Result<(), ApplyError> {
        let err = |reason: String| ApplyError { index, reason };
        match action {
            EditAction::Insert {
                node,
                tree,
                parent,
                position,
                ..
            } => {
                if *node != self.next_id() {
                    return Err(err(format!(
                        "inserted node id {node} but next free id is {}",
                        self.next_id()
                    )));
                }
                if !self.is_live(*parent) {
                    return Err(err(format!("insert parent {parent} does not exist")));
                }
                if *position > self.children[parent.index()].len() {
                    return Err(err(format!(
                        "insert position {position} beyond {} children",
                        self.children[parent.index()].len()
                    )));
                }
                let id = self.add_spec(tree, Some(*parent));
                self.children[parent.index()].insert(*position, id);
            }
            EditAction::Delete { node, .. } => {
                if !self.is_live(*node) || self.parent[node.index()].is_none() {
                    return Err(err(format!("cannot delete {node}")));
                }
                if !self.children[node.index()].is_empty() {
                    return Err(err(format!("cannot delete {node}: it still has children")));
                }
                self.detach(*node);
                self.alive[node.index()] = false;
            }
            EditAction::Update {
                node, new_label, ..
            } => {
                if !self.is_live(*node) || self.parent[node.index()].is_none() {
                    return Err(err(format!("cannot update {node}")));
                }
                self.label[node.index()] = new_label.clone();
            }
            EditAction::Move {
                node,
                parent,
                position,
                ..
            } => {
                if !self.is_live(*node) || self.parent[node.index()].is_none() {
                    return Err(err(format!("cannot move {node}")));
                }
                if !self.is_live(*parent) {
                    return Err(err(format!("move target {parent} does not exist")));
                }
                if self.is_ancestor_or_self(*node, *parent) {
                    return Err(err(format!("cannot move {node} below itself")));
                }
                self.detach(*node);
                if *position > self.children[parent.index()].len() {
                    return Err(err(format!(
                        "move position {position} beyond {} children",
                        self.children[parent.index()].len()
                    )));
                }
                self.children[parent.index()].insert(*position, *node);
                self.parent[node.index()] = Some(*parent);
            }
        }
        Ok(())
    }

    fn to_spec(&self, id: WorkId) -> NodeSpec {
        NodeSpec {
            kind: self.kind[id.index()].clone(),
            label: self.label[id.index()].clone(),
            span: self.span[id.index()],
            children: self.children[id.index()]
                .iter()
                .map(|&c| self.to_spec(c))
                .collect(),
        }
    }

    /// The tree under the virtual root, which must have exactly one child.
    pub(crate) fn finish(&self, source_len: usize) -> Result<SyntaxTree, String> {
        let vroot = Self::virtual_root(source_len);
        match self.children[vroot.index()].as_slice() {
            [root] => Ok(SyntaxTree::from_spec(
                self.source.clone(),
                self.to_spec(*root),
            )),
            other => Err(format!("script leaves {} root nodes", other.len())),
        }
    }
}

/// Type name rendered for the virtual root in serialized scripts.
pub const VIRTUAL_ROOT: &str = "ROOT";
