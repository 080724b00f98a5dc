use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap};

use crate::tree::{isomorphic, NodeId, SyntaxTree};

use super::{dice_similarity, MappingStore, MatcherConfig};

/// Height-ordered frontier of subtrees still to be compared.
struct HeightQueue<'a> {
    tree: &'a SyntaxTree,
    heap: BinaryHeap<(usize, Reverse<NodeId>)>,
}

impl<'a> HeightQueue<'a> {
    fn new(tree: &'a SyntaxTree) -> Self {
        let mut q = HeightQueue {
            tree,
            heap: BinaryHeap::new(),
        };
        q.push(tree.root());
        q
    }

    fn push(&mut self, id: NodeId) {
        self.heap.push((self.tree.height(id), Reverse(id)));
    }

    fn open(&mut self, id: NodeId) {
        for &c in self.tree.children(id) {
            self.push(c);
        }
    }

    fn peek_height(&self) -> usize {
        self.heap.peek().map_or(0, |&(h, _)| h)
    }

    /// Removes every node of the current maximal height, in id order.
    fn pop_level(&mut self) -> Vec<NodeId> {
        let h = self.peek_height();
        let mut out = Vec::new();
        while self.peek_height() == h && h > 0 {
            out.push(self.heap.pop().unwrap().1 .0);
        }
        out
    }
}

/// Greedy anchoring of the largest isomorphic subtrees, tallest first.
///
/// Subtrees with a unique isomorphic partner at their height are mapped
/// immediately. Ambiguous ones are collected and resolved at the end by
/// preferring the pair whose parents are most similar, then the smallest
/// source id, then the smallest destination id.
pub fn match_top_down(src: &SyntaxTree, dst: &SyntaxTree, cfg: &MatcherConfig) -> MappingStore {
    let mut mappings = MappingStore::for_trees(src, dst);
    let mut ambiguous: Vec<(NodeId, NodeId)> = Vec::new();
    let mut q1 = HeightQueue::new(src);
    let mut q2 = HeightQueue::new(dst);

    while q1.peek_height().min(q2.peek_height()) >= cfg.min_height {
        let (h1, h2) = (q1.peek_height(), q2.peek_height());
        match h1.cmp(&h2) {
            Ordering::Greater => {
                for id in q1.pop_level() {
                    q1.open(id);
                }
                continue;
            }
            Ordering::Less => {
                for id in q2.pop_level() {
                    q2.open(id);
                }
                continue;
            }
            Ordering::Equal => {}
        }
        let level1 = q1.pop_level();
        let level2 = q2.pop_level();

        // Bucket both levels by hash; collisions are split by an exact
        // isomorphism check below.
        let mut buckets: BTreeMap<u64, (Vec<NodeId>, Vec<NodeId>)> = BTreeMap::new();
        for &id in &level1 {
            buckets
                .entry(src.structural_hash(id))
                .or_default()
                .0
                .push(id);
        }
        for &id in &level2 {
            buckets
                .entry(dst.structural_hash(id))
                .or_default()
                .1
                .push(id);
        }

        let mut matched1 = vec![false; level1.len()];
        let mut matched2 = vec![false; level2.len()];
        let pos1 = |id: NodeId| level1.binary_search(&id).unwrap();
        let pos2 = |id: NodeId| level2.binary_search(&id).unwrap();

        for (_, (b1, b2)) in buckets {
            if b1.is_empty() || b2.is_empty() {
                continue;
            }
            for class in iso_classes(src, &b1, dst, &b2) {
                let (c1, c2) = class;
                if c1.len() == 1 && c2.len() == 1 {
                    mappings.link_subtrees(src, c1[0], c2[0]);
                } else {
                    for &a in &c1 {
                        for &b in &c2 {
                            ambiguous.push((a, b));
                        }
                    }
                }
                for a in c1 {
                    matched1[pos1(a)] = true;
                }
                for b in c2 {
                    matched2[pos2(b)] = true;
                }
            }
        }
        for (i, &id) in level1.iter().enumerate() {
            if !matched1[i] {
                q1.open(id);
            }
        }
        for (i, &id) in level2.iter().enumerate() {
            if !matched2[i] {
                q2.open(id);
            }
        }
    }

    resolve_ambiguous(src, dst, &mut mappings, ambiguous);
    mappings
}

// Splits same-hash buckets into classes of mutually isomorphic subtrees.
fn iso_classes(
    src: &SyntaxTree,
    b1: &[NodeId],
    dst: &SyntaxTree,
    b2: &[NodeId],
) -> Vec<(Vec<NodeId>, Vec<NodeId>)> {
    let mut classes: Vec<(NodeId, Vec<NodeId>, Vec<NodeId>)> = Vec::new();
    for &a in b1 {
        match classes
            .iter_mut()
            .find(|(rep, _, _)| isomorphic(src, *rep, src, a))
        {
            Some(c) => c.1.push(a),
            None => classes.push((a, vec![a], Vec::new())),
        }
    }
    for &b in b2 {
        if let Some(c) = classes
            .iter_mut()
            .find(|(rep, _, _)| isomorphic(src, *rep, dst, b))
        {
            c.2.push(b);
        }
    }
    classes
        .into_iter()
        .filter(|(_, c1, c2)| !c2.is_empty() && !c1.is_empty())
        .map(|(_, c1, c2)| (c1, c2))
        .collect()
}

fn resolve_ambiguous(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    mappings: &mut MappingStore,
    candidates: Vec<(NodeId, NodeId)>,
) {
    if candidates.is_empty() {
        return;
    }
    let mut scored: Vec<(f64, NodeId, NodeId)> = candidates
        .into_iter()
        .map(|(a, b)| {
            let score = match (src.parent(a), dst.parent(b)) {
                (Some(pa), Some(pb)) => dice_similarity(src, pa, dst, pb, mappings),
                _ => 0.0,
            };
            (score, a, b)
        })
        .collect();
    scored.sort_by(|x, y| {
        y.0.partial_cmp(&x.0)
            .unwrap_or(Ordering::Equal)
            .then(x.1.cmp(&y.1))
            .then(x.2.cmp(&y.2))
    });
    for (_, a, b) in scored {
        // Subtrees of ambiguous candidates were never opened, so only the
        // roots can already be taken, by a competing pair.
        if !mappings.is_src_mapped(a) && !mappings.is_dst_mapped(b) {
            mappings.link_subtrees(src, a, b);
        }
    }
}
