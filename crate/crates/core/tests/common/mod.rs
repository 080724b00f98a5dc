#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use soldiff_core::{generate_edit_script, MappingStore, NodeId, NodeSpec, SyntaxTree};

pub const KINDS: &[&str] = &["a", "b", "c"];
pub const LABELS: &[&str] = &["", "x", "y"];

/// Random ordered tree with exactly `n` nodes.
pub fn random_spec(rng: &mut impl Rng, n: usize, kinds: &[&str], labels: &[&str]) -> NodeSpec {
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 1..n {
        let p = rng.gen_range(0..i);
        children[p].push(i);
    }
    let nodes: Vec<(String, String)> = (0..n)
        .map(|_| {
            (
                kinds.choose(rng).unwrap().to_string(),
                labels.choose(rng).unwrap().to_string(),
            )
        })
        .collect();
    fn build(i: usize, nodes: &[(String, String)], children: &[Vec<usize>]) -> NodeSpec {
        NodeSpec::new(nodes[i].0.clone(), nodes[i].1.clone()).with_children(
            children[i]
                .iter()
                .map(|&c| build(c, nodes, children))
                .collect(),
        )
    }
    build(0, &nodes, &children)
}

pub fn random_tree(rng: &mut impl Rng, max: usize) -> SyntaxTree {
    let n = rng.gen_range(1..=max);
    SyntaxTree::from_spec("", random_spec(rng, n, KINDS, LABELS))
}

/// A copy of `spec` with a few random edits, keeping at most `max` nodes.
pub fn mutate_spec(rng: &mut impl Rng, spec: &NodeSpec, max: usize) -> NodeSpec {
    let mut out = spec.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let size = out.size();
        let target = rng.gen_range(0..size);
        let node = nth_mut(&mut out, target);
        match rng.gen_range(0..4) {
            0 => node.label = LABELS.choose(rng).unwrap().to_string(),
            1 => node.children.shuffle(rng),
            2 if size < max => {
                let at = rng.gen_range(0..=node.children.len());
                node.children.insert(
                    at,
                    NodeSpec::new(*KINDS.choose(rng).unwrap(), *LABELS.choose(rng).unwrap()),
                );
            }
            _ => {
                if !node.children.is_empty() {
                    let i = rng.gen_range(0..node.children.len());
                    let removed = node.children.remove(i);
                    // Re-attach the grandchildren to keep some structure.
                    for (k, g) in removed.children.into_iter().enumerate() {
                        node.children.insert((i + k).min(node.children.len()), g);
                    }
                }
            }
        }
    }
    out
}

fn nth_mut(spec: &mut NodeSpec, mut n: usize) -> &mut NodeSpec {
    fn go<'a>(s: &'a mut NodeSpec, n: &mut usize) -> Option<&'a mut NodeSpec> {
        if *n == 0 {
            return Some(s);
        }
        *n -= 1;
        for c in &mut s.children {
            if let Some(found) = go(c, n) {
                return Some(found);
            }
        }
        None
    }
    go(spec, &mut n).expect("index within tree")
}

/// Random pair of small trees, related half of the time.
pub fn random_pair(rng: &mut impl Rng, max: usize) -> (SyntaxTree, SyntaxTree) {
    let a = random_tree(rng, max);
    let b = if rng.gen_bool(0.5) {
        SyntaxTree::from_spec("", mutate_spec(rng, &a.to_spec(a.root()), max))
    } else {
        random_tree(rng, max)
    };
    (a, b)
}

/// Random valid (bijective, type-consistent) mapping.
pub fn random_mapping(rng: &mut impl Rng, src: &SyntaxTree, dst: &SyntaxTree) -> MappingStore {
    let mut m = MappingStore::for_trees(src, dst);
    let mut dsts: Vec<NodeId> = dst.ids().collect();
    dsts.shuffle(rng);
    for s in src.ids() {
        if rng.gen_bool(0.3) {
            continue;
        }
        if let Some(&d) = dsts
            .iter()
            .find(|&&d| !m.is_dst_mapped(d) && dst.kind(d) == src.kind(s))
        {
            m.link(s, d);
        }
    }
    m
}

/// Every bijective type-consistent partial mapping between the two trees.
pub fn all_mappings(src: &SyntaxTree, dst: &SyntaxTree, mut visit: impl FnMut(&MappingStore)) {
    fn go(
        src: &SyntaxTree,
        dst: &SyntaxTree,
        next: usize,
        m: &mut MappingStore,
        visit: &mut dyn FnMut(&MappingStore),
    ) {
        if next == src.len() {
            visit(m);
            return;
        }
        let s = NodeId(next as u32);
        go(src, dst, next + 1, m, visit);
        for d in dst.ids() {
            if !m.is_dst_mapped(d) && src.kind(s) == dst.kind(d) {
                m.link(s, d);
                go(src, dst, next + 1, m, visit);
                m.unlink_src(s);
            }
        }
    }
    let mut m = MappingStore::for_trees(src, dst);
    go(src, dst, 0, &mut m, &mut visit);
}

/// Shortest script over all mappings, measured with the real generator.
pub fn brute_force_optimum(src: &SyntaxTree, dst: &SyntaxTree) -> usize {
    let mut best = usize::MAX;
    all_mappings(src, dst, |m| {
        let len = generate_edit_script(src, dst, m)
            .expect("valid mapping")
            .len();
        best = best.min(len);
    });
    best
}
