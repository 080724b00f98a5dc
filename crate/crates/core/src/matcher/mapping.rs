use thiserror::Error;

use crate::tree::{NodeId, SyntaxTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("source node {0} is already mapped")]
    SourceMapped(NodeId),
    #[error("destination node {0} is already mapped")]
    DestMapped(NodeId),
    #[error("node {0} out of range")]
    OutOfRange(NodeId),
    #[error("mapped nodes {src} and {dst} have different types `{src_kind}` and `{dst_kind}`")]
    TypeMismatch {
        src: NodeId,
        dst: NodeId,
        src_kind: String,
        dst_kind: String,
    },
    #[error("mapping sized for {expected:?} nodes used with trees of {actual:?} nodes")]
    SizeMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },
}

/// Bijective partial correspondence between the nodes of two trees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MappingStore {
    src_to_dst: Vec<Option<NodeId>>,
    dst_to_src: Vec<Option<NodeId>>,
    len: usize,
}

impl MappingStore {
    pub fn new(src_len: usize, dst_len: usize) -> Self {
        MappingStore {
            src_to_dst: vec![None; src_len],
            dst_to_src: vec![None; dst_len],
            len: 0,
        }
    }

    pub fn for_trees(src: &SyntaxTree, dst: &SyntaxTree) -> Self {
        Self::new(src.len(), dst.len())
    }

    /// Builds a store from explicit pairs, rejecting non-bijective input.
    pub fn from_pairs(
        src_len: usize,
        dst_len: usize,
        pairs: impl IntoIterator<Item = (NodeId, NodeId)>,
    ) -> Result<Self, MappingError> {
        let mut m = Self::new(src_len, dst_len);
        for (s, d) in pairs {
            m.try_link(s, d)?;
        }
        Ok(m)
    }

    pub fn try_link(&mut self, src: NodeId, dst: NodeId) -> Result<(), MappingError> {
        if src.index() >= self.src_to_dst.len() {
            return Err(MappingError::OutOfRange(src));
        }
        if dst.index() >= self.dst_to_src.len() {
            return Err(MappingError::OutOfRange(dst));
        }
        if self.src_to_dst[src.index()].is_some() {
            return Err(MappingError::SourceMapped(src));
        }
        if self.dst_to_src[dst.index()].is_some() {
            return Err(MappingError::DestMapped(dst));
        }
        self.src_to_dst[src.index()] = Some(dst);
        self.dst_to_src[dst.index()] = Some(src);
        self.len += 1;
        Ok(())
    }

    /// Links a pair both of whose nodes are known to be free.
    pub fn link(&mut self, src: NodeId, dst: NodeId) {
        if let Err(e) = self.try_link(src, dst) {
            panic!("invalid link {src} -> {dst}: {e}");
        }
    }

    /// Links two isomorphic subtrees node by node.
    pub fn link_subtrees(&mut self, src_tree: &SyntaxTree, src: NodeId, dst: NodeId) {
        for off in 0..src_tree.size(src) as u32 {
            self.link(NodeId(src.0 + off), NodeId(dst.0 + off));
        }
    }

    pub fn unlink_src(&mut self, src: NodeId) {
        if let Some(dst) = self.src_to_dst[src.index()].take() {
            self.dst_to_src[dst.index()] = None;
            self.len -= 1;
        }
    }

    #[inline]
    pub fn dst_of(&self, src: NodeId) -> Option<NodeId> {
        self.src_to_dst[src.index()]
    }

    #[inline]
    pub fn src_of(&self, dst: NodeId) -> Option<NodeId> {
        self.dst_to_src[dst.index()]
    }

    #[inline]
    pub fn is_src_mapped(&self, src: NodeId) -> bool {
        self.src_to_dst[src.index()].is_some()
    }

    #[inline]
    pub fn is_dst_mapped(&self, dst: NodeId) -> bool {
        self.dst_to_src[dst.index()].is_some()
    }

    pub fn has(&self, src: NodeId, dst: NodeId) -> bool {
        self.dst_of(src) == Some(dst)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn src_len(&self) -> usize {
        self.src_to_dst.len()
    }

    pub fn dst_len(&self) -> usize {
        self.dst_to_src.len()
    }

    /// Pairs ordered by source id.
    pub fn pairs(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.src_to_dst
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (NodeId(i as u32), d)))
    }

    /// Checks the store against the trees it claims to relate: sizes and
    /// type consistency. Bijectivity holds by construction.
    pub fn validate(&self, src: &SyntaxTree, dst: &SyntaxTree) -> Result<(), MappingError> {
        if self.src_len() != src.len() || self.dst_len() != dst.len() {
            return Err(MappingError::SizeMismatch {
                expected: (self.src_len(), self.dst_len()),
                actual: (src.len(), dst.len()),
            });
        }
        for (s, d) in self.pairs() {
            if src.kind(s) != dst.kind(d) {
                return Err(MappingError::TypeMismatch {
                    src: s,
                    dst: d,
                    src_kind: src.kind(s).to_owned(),
                    dst_kind: dst.kind(d).to_owned(),
                });
            }
        }
        Ok(())
    }
}
