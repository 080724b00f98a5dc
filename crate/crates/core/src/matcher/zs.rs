//! Zhang-Shasha ordered tree edit distance between two subtrees, with the
//! optimal alignment extracted by backtracking.
//!
//! Unit insert and delete costs. Relabeling costs 0 for identical nodes,
//! 1 for equal types with different labels, and more than a delete plus an
//! insert across types, so a cross-type relabel is never part of an optimum.

use crate::tree::{NodeId, SyntaxTree};

const DEL: u32 = 1;
const INS: u32 = 1;
const CROSS_TYPE: u32 = 3;

struct Side<'a> {
    tree: &'a SyntaxTree,
    // 1-based postorder -> node id; index 0 unused.
    nodes: Vec<NodeId>,
    // 1-based postorder index of the leftmost leaf descendant.
    lld: Vec<usize>,
    keyroots: Vec<usize>,
}

impl<'a> Side<'a> {
    fn new(tree: &'a SyntaxTree, root: NodeId) -> Self {
        let post = tree.postorder(root);
        let n = post.len();
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(root);
        nodes.extend_from_slice(&post);
        // Postorder index of every node, offset by the subtree root id.
        let base = root.index();
        let mut post_index = vec![0usize; tree.size(root)];
        for (i, id) in post.iter().enumerate() {
            post_index[id.index() - base] = i + 1;
        }
        let mut lld = vec![0usize; n + 1];
        for i in 1..=n {
            let mut cur = nodes[i];
            while let Some(&first) = tree.children(cur).first() {
                cur = first;
            }
            lld[i] = post_index[cur.index() - base];
        }
        // Keyroots: nodes with no later node sharing their leftmost leaf.
        let mut seen = vec![false; n + 1];
        let mut keyroots = Vec::new();
        for i in (1..=n).rev() {
            if !seen[lld[i]] {
                seen[lld[i]] = true;
                keyroots.push(i);
            }
        }
        keyroots.sort_unstable();
        Side {
            tree,
            nodes,
            lld,
            keyroots,
        }
    }

    fn len(&self) -> usize {
        self.nodes.len() - 1
    }
}

pub(crate) struct ZhangShasha<'a> {
    src: Side<'a>,
    dst: Side<'a>,
    tree_dist: Vec<u32>,
    forest: Vec<u32>,
}

impl<'a> ZhangShasha<'a> {
    pub(crate) fn new(src: &'a SyntaxTree, a: NodeId, dst: &'a SyntaxTree, b: NodeId) -> Self {
        let src = Side::new(src, a);
        let dst = Side::new(dst, b);
        let cells = (src.len() + 1) * (dst.len() + 1);
        ZhangShasha {
            src,
            dst,
            tree_dist: vec![0; cells],
            forest: vec![0; cells],
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> usize {
        i * (self.dst.len() + 1) + j
    }

    fn rename(&self, i: usize, j: usize) -> u32 {
        let (s, d) = (self.src.nodes[i], self.dst.nodes[j]);
        let (st, dt) = (self.src.tree, self.dst.tree);
        if st.kind(s) != dt.kind(d) {
            CROSS_TYPE
        } else if st.label(s) == dt.label(d) {
            0
        } else {
            1
        }
    }

    /// Edit distance between the two subtrees.
    pub(crate) fn distance(&mut self) -> u32 {
        for ki in 0..self.src.keyroots.len() {
            for kj in 0..self.dst.keyroots.len() {
                let (i, j) = (self.src.keyroots[ki], self.dst.keyroots[kj]);
                self.forest_dist(i, j);
            }
        }
        let (n, m) = (self.src.len(), self.dst.len());
        self.tree_dist[self.at(n, m)]
    }

    fn forest_dist(&mut self, i: usize, j: usize) {
        let (li, lj) = (self.src.lld[i], self.dst.lld[j]);
        let f0 = self.at(li - 1, lj - 1);
        self.forest[f0] = 0;
        for di in li..=i {
            let (cur, prev) = (self.at(di, lj - 1), self.at(di - 1, lj - 1));
            self.forest[cur] = self.forest[prev] + DEL;
        }
        for dj in lj..=j {
            let (cur, prev) = (self.at(li - 1, dj), self.at(li - 1, dj - 1));
            self.forest[cur] = self.forest[prev] + INS;
        }
        for di in li..=i {
            for dj in lj..=j {
                let del = self.forest[self.at(di - 1, dj)] + DEL;
                let ins = self.forest[self.at(di, dj - 1)] + INS;
                let cur = self.at(di, dj);
                if self.src.lld[di] == li && self.dst.lld[dj] == lj {
                    let ren = self.forest[self.at(di - 1, dj - 1)] + self.rename(di, dj);
                    let v = del.min(ins).min(ren);
                    self.forest[cur] = v;
                    self.tree_dist[cur] = v;
                } else {
                    let (pi, pj) = (self.src.lld[di] - 1, self.dst.lld[dj] - 1);
                    let sub = self.forest[self.at(pi, pj)] + self.tree_dist[cur];
                    self.forest[cur] = del.min(ins).min(sub);
                }
            }
        }
    }

    /// Node pairs aligned by an optimal edit sequence, in no particular
    /// order. Cross-type pairs never appear.
    pub(crate) fn alignment(mut self) -> Vec<(NodeId, NodeId)> {
        self.distance();
        let mut out = Vec::new();
        let mut pending = vec![(self.src.len(), self.dst.len())];
        while let Some((i, j)) = pending.pop() {
            self.forest_dist(i, j);
            let (li, lj) = (self.src.lld[i], self.dst.lld[j]);
            let (mut row, mut col) = (i, j);
            while row >= li || col >= lj {
                let here = self.forest[self.at(row, col)];
                if row >= li && self.forest[self.at(row - 1, col)] + DEL == here {
                    row -= 1;
                } else if col >= lj && self.forest[self.at(row, col - 1)] + INS == here {
                    col -= 1;
                } else if self.src.lld[row] == li && self.dst.lld[col] == lj {
                    let (s, d) = (self.src.nodes[row], self.dst.nodes[col]);
                    if self.src.tree.kind(s) == self.dst.tree.kind(d) {
                        out.push((s, d));
                    }
                    row -= 1;
                    col -= 1;
                } else {
                    pending.push((row, col));
                    row = self.src.lld[row] - 1;
                    col = self.dst.lld[col] - 1;
                }
            }
        }
        out
    }
}
