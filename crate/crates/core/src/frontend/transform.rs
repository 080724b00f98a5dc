use crate::tree::{NodeId, NodeSpec, SyntaxTree};

use super::rules::TransformRuleSet;

/// Applies `rules` to a concrete tree, producing the tree the matcher works
/// on. Spans are kept from the input.
///
/// Ignored nodes vanish with their subtree, flattened nodes become leaves
/// labeled with the exact source text of their span, and aliased nodes take
/// their target type. The root is never removed. Rules naming types that do
/// not occur have no effect.
pub fn apply_transforms(cst: &SyntaxTree, rules: &TransformRuleSet) -> SyntaxTree {
    let root = cst.root();
    let spec = transform_node(cst, root, rules, true).expect("root is kept");
    SyntaxTree::from_spec(cst.source_arc(), spec)
}

fn transform_node(
    tree: &SyntaxTree,
    id: NodeId,
    rules: &TransformRuleSet,
    is_root: bool,
) -> Option<NodeSpec> {
    let kind = tree.kind(id);
    if !is_root && rules.is_ignored(kind) {
        return None;
    }
    let resolved = rules.resolve(kind);
    let span = tree.span(id);
    if rules.is_flattened(kind) {
        let label = match span {
            Some(s) => tree.source()[s.start..s.end].to_owned(),
            None => flat_label(tree, id),
        };
        return Some(NodeSpec {
            kind: resolved.to_owned(),
            label,
            span,
            children: Vec::new(),
        });
    }
    let children = tree
        .children(id)
        .iter()
        .filter_map(|&c| transform_node(tree, c, rules, false))
        .collect();
    Some(NodeSpec {
        kind: resolved.to_owned(),
        label: tree.label(id).to_owned(),
        span,
        children,
    })
}

// Synthetic nodes have no source; join the leaf labels instead.
fn flat_label(tree: &SyntaxTree, id: NodeId) -> String {
    if tree.is_leaf(id) {
        return tree.label(id).to_owned();
    }
    tree.descendants(id)
        .filter(|&d| tree.is_leaf(d))
        .map(|d| tree.label(d))
        .collect::<Vec<_>>()
        .join(" ")
}
