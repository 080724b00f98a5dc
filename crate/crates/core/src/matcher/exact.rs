//! Branch-and-bound search for the mapping with the shortest induced edit
//! script, used on very small tree pairs.

use crate::script::cost::induced_length_raw;
use crate::tree::{NodeId, SyntaxTree};

use super::MappingStore;

/// Returns `incumbent` unless some type-consistent mapping induces a
/// strictly shorter script, in which case the first such optimum found in
/// source-preorder / destination-id order is returned.
pub(super) fn shortest_script_mapping(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    incumbent: MappingStore,
) -> MappingStore {
    let mut search = Search {
        src,
        dst,
        s2d: vec![None; src.len()],
        d2s: vec![None; dst.len()],
        best_cost: {
            let s2d: Vec<_> = src.ids().map(|s| incumbent.dst_of(s)).collect();
            let d2s: Vec<_> = dst.ids().map(|d| incumbent.src_of(d)).collect();
            induced_length_raw(src, dst, &s2d, &d2s)
        },
        best: None,
    };
    search.visit(0, 0);
    match search.best {
        None => incumbent,
        Some(s2d) => {
            let pairs = s2d
                .iter()
                .enumerate()
                .filter_map(|(i, d)| d.map(|d| (NodeId(i as u32), d)));
            MappingStore::from_pairs(src.len(), dst.len(), pairs)
                .expect("search keeps the mapping bijective")
        }
    }
}

struct Search<'a> {
    src: &'a SyntaxTree,
    dst: &'a SyntaxTree,
    s2d: Vec<Option<NodeId>>,
    d2s: Vec<Option<NodeId>>,
    best_cost: usize,
    best: Option<Vec<Option<NodeId>>>,
}

impl Search<'_> {
    // Source nodes are decided in preorder, so a node's parent is always
    // decided first. `partial` holds the contributions that are already
    // final: deletes, updates and parent-changing moves of decided nodes.
    fn visit(&mut self, next: usize, partial: usize) {
        if partial >= self.best_cost {
            return;
        }
        if next == self.src.len() {
            let cost = induced_length_raw(self.src, self.dst, &self.s2d, &self.d2s);
            if cost < self.best_cost {
                self.best_cost = cost;
                self.best = Some(self.s2d.clone());
            }
            return;
        }
        let s = NodeId(next as u32);
        let parent = self.src.parent(s);
        let expected_parent = parent.map(|p| self.s2d[p.index()]);

        for d in self.dst.ids() {
            if self.d2s[d.index()].is_some() || self.src.kind(s) != self.dst.kind(d) {
                continue;
            }
            let mut add = usize::from(self.src.label(s) != self.dst.label(d));
            let moved = match (expected_parent, self.dst.parent(d)) {
                (None, None) => false,
                (Some(p), Some(q)) => p != Some(q),
                _ => true,
            };
            add += usize::from(moved);
            self.s2d[s.index()] = Some(d);
            self.d2s[d.index()] = Some(s);
            self.visit(next + 1, partial + add);
            self.s2d[s.index()] = None;
            self.d2s[d.index()] = None;
        }

        self.visit(next + 1, partial + 1);
    }
}
