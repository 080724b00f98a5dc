use std::collections::BTreeSet;

use crate::tree::{isomorphic, NodeId, SyntaxTree};

use super::zs::ZhangShasha;
use super::{dice_similarity, MappingStore, MatcherConfig};

/// Extends `anchors` with container pairs and the descendants recovered
/// inside them. Never removes a pair.
///
/// Source nodes are visited in postorder. An unmapped inner node is paired
/// with the unmapped same-type destination ancestor of its mapped
/// descendants' partners that has the highest dice similarity, provided it
/// reaches `min_dice`. The two roots are always paired when their types
/// agree. Every new container pair goes through recovery.
pub fn match_bottom_up(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    anchors: MappingStore,
    cfg: &MatcherConfig,
) -> MappingStore {
    let mut m = anchors;
    let src_root = src.root();
    let dst_root = dst.root();
    for s in src.postorder(src_root) {
        if s == src_root {
            break;
        }
        if m.is_src_mapped(s) || src.is_leaf(s) {
            continue;
        }
        if let Some(d) = best_candidate(src, dst, s, &m, cfg) {
            m.link(s, d);
            recover(src, dst, s, d, &mut m, cfg);
        }
    }
    if !m.is_src_mapped(src_root)
        && !m.is_dst_mapped(dst_root)
        && src.kind(src_root) == dst.kind(dst_root)
    {
        m.link(src_root, dst_root);
    }
    if m.has(src_root, dst_root) {
        recover(src, dst, src_root, dst_root, &mut m, cfg);
    }
    m
}

fn best_candidate(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    s: NodeId,
    m: &MappingStore,
    cfg: &MatcherConfig,
) -> Option<NodeId> {
    let kind = src.kind(s);
    let mut seen = BTreeSet::new();
    for desc in src.descendants(s) {
        let Some(partner) = m.dst_of(desc) else {
            continue;
        };
        for anc in dst.ancestors(partner) {
            if !seen.insert(anc) {
                // Everything above was collected through an earlier path.
                break;
            }
        }
    }
    let mut best: Option<(f64, NodeId)> = None;
    for d in seen {
        if d == dst.root() || m.is_dst_mapped(d) || dst.kind(d) != kind {
            continue;
        }
        let sim = dice_similarity(src, s, dst, d, m);
        if sim >= cfg.min_dice && best.map_or(true, |(b, _)| sim > b) {
            best = Some((sim, d));
        }
    }
    best.map(|(_, d)| d)
}

/// Maps further descendants of an already paired container.
///
/// Small pairs get an exact tree edit distance alignment; larger ones have
/// their children aligned by longest common subsequence, first on whole
/// isomorphic subtrees, then on type plus leaf-child labels, then on type
/// alone, recursing into each newly paired child.
pub(crate) fn recover(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    a: NodeId,
    b: NodeId,
    m: &mut MappingStore,
    cfg: &MatcherConfig,
) {
    if src.size(a) + dst.size(b) <= cfg.max_recovery_size {
        for (x, y) in ZhangShasha::new(src, a, dst, b).alignment() {
            if !m.is_src_mapped(x) && !m.is_dst_mapped(y) && src.kind(x) == dst.kind(y) {
                m.link(x, y);
            }
        }
    } else {
        recover_by_lcs(src, dst, a, b, m, cfg);
    }
}

fn recover_by_lcs(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    a: NodeId,
    b: NodeId,
    m: &mut MappingStore,
    cfg: &MatcherConfig,
) {
    // Whole unmapped isomorphic subtrees.
    let free1: Vec<NodeId> = src
        .children(a)
        .iter()
        .copied()
        .filter(|&c| subtree_free_src(src, c, m))
        .collect();
    let free2: Vec<NodeId> = dst
        .children(b)
        .iter()
        .copied()
        .filter(|&c| subtree_free_dst(dst, c, m))
        .collect();
    for (x, y) in lcs(&free1, &free2, |&x, &y| {
        src.structural_hash(x) == dst.structural_hash(y) && isomorphic(src, x, dst, y)
    }) {
        m.link_subtrees(src, x, y);
    }

    // Same type and same leaf children, e.g. a function keeping its name.
    let open1 = unmapped_children_src(src, a, m);
    let open2 = unmapped_children_dst(dst, b, m);
    for (x, y) in lcs(&open1, &open2, |&x, &y| {
        src.kind(x) == dst.kind(y)
            && src.label(x) == dst.label(y)
            && leaf_signature(src, x) == leaf_signature(dst, y)
    }) {
        m.link(x, y);
        recover(src, dst, x, y, m, cfg);
    }

    // Same type only.
    let open1 = unmapped_children_src(src, a, m);
    let open2 = unmapped_children_dst(dst, b, m);
    for (x, y) in lcs(&open1, &open2, |&x, &y| src.kind(x) == dst.kind(y)) {
        if src.size(x) + dst.size(y) <= cfg.max_recovery_size {
            accept_if_similar(src, dst, x, y, m, cfg);
        } else {
            m.link(x, y);
            recover_by_lcs(src, dst, x, y, m, cfg);
        }
    }
}

// Pairs two small same-type subtrees only when the exact alignment keeps
// enough of their descendants unchanged; otherwise they are better
// expressed as a delete and an insert.
fn accept_if_similar(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    x: NodeId,
    y: NodeId,
    m: &mut MappingStore,
    cfg: &MatcherConfig,
) {
    let pairs: Vec<(NodeId, NodeId)> = ZhangShasha::new(src, x, dst, y)
        .alignment()
        .into_iter()
        .filter(|&(p, q)| (p, q) != (x, y) && !m.is_src_mapped(p) && !m.is_dst_mapped(q))
        .collect();
    let total = src.size(x) - 1 + dst.size(y) - 1;
    if total > 0 {
        let unchanged = pairs
            .iter()
            .filter(|&&(p, q)| src.label(p) == dst.label(q))
            .count();
        if (2 * unchanged) as f64 / (total as f64) < cfg.min_dice {
            return;
        }
    }
    m.link(x, y);
    for (p, q) in pairs {
        m.link(p, q);
    }
}

fn leaf_signature(tree: &SyntaxTree, id: NodeId) -> Vec<&str> {
    tree.children(id)
        .iter()
        .filter(|&&c| tree.is_leaf(c))
        .map(|&c| tree.label(c))
        .collect()
}

fn subtree_free_src(tree: &SyntaxTree, id: NodeId, m: &MappingStore) -> bool {
    !m.is_src_mapped(id) && tree.descendants(id).all(|d| !m.is_src_mapped(d))
}

fn subtree_free_dst(tree: &SyntaxTree, id: NodeId, m: &MappingStore) -> bool {
    !m.is_dst_mapped(id) && tree.descendants(id).all(|d| !m.is_dst_mapped(d))
}

fn unmapped_children_src(tree: &SyntaxTree, id: NodeId, m: &MappingStore) -> Vec<NodeId> {
    tree.children(id)
        .iter()
        .copied()
        .filter(|&c| !m.is_src_mapped(c))
        .collect()
}

fn unmapped_children_dst(tree: &SyntaxTree, id: NodeId, m: &MappingStore) -> Vec<NodeId> {
    tree.children(id)
        .iter()
        .copied()
        .filter(|&c| !m.is_dst_mapped(c))
        .collect()
}

/// Longest common subsequence under `eq`, earliest pairs first.
pub(crate) fn lcs<T: Copy>(a: &[T], b: &[T], eq: impl Fn(&T, &T) -> bool) -> Vec<(T, T)> {
    let (n, k) = (a.len(), b.len());
    if n == 0 || k == 0 {
        return Vec::new();
    }
    // table[i][j]: LCS length of a[i..] and b[j..].
    let w = k + 1;
    let mut table = vec![0u32; (n + 1) * w];
    for i in (0..n).rev() {
        for j in (0..k).rev() {
            table[i * w + j] = if eq(&a[i], &b[j]) {
                table[(i + 1) * w + j + 1] + 1
            } else {
                table[(i + 1) * w + j].max(table[i * w + j + 1])
            };
        }
    }
    let mut out = Vec::with_capacity(table[0] as usize);
    let (mut i, mut j) = (0, 0);
    while i < n && j < k {
        if eq(&a[i], &b[j]) && table[i * w + j] == table[(i + 1) * w + j + 1] + 1 {
            out.push((a[i], b[j]));
            i += 1;
            j += 1;
        } else if table[(i + 1) * w + j] >= table[i * w + j + 1] {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}
