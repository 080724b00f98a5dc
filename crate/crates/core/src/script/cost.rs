use crate::matcher::MappingStore;
use crate::tree::{NodeId, SyntaxTree};

/// Length of the edit script [`generate_edit_script`] derives from `m`,
/// computed without building it.
///
/// [`generate_edit_script`]: super::generate_edit_script
pub fn induced_length(src: &SyntaxTree, dst: &SyntaxTree, m: &MappingStore) -> usize {
    let s2d: Vec<Option<NodeId>> = src.ids().map(|s| m.dst_of(s)).collect();
    let d2s: Vec<Option<NodeId>> = dst.ids().map(|d| m.src_of(d)).collect();
    induced_length_raw(src, dst, &s2d, &d2s)
}

/// Same as [`induced_length`] over plain partner tables.
///
/// Counts one delete per unmapped source node, one insert per unmapped
/// destination node whose parent is mapped (or which is the root),
/// one update per mapped pair with differing labels, one move per mapped
/// pair whose parents do not correspond, and, under every mapped parent
/// pair, one move per child outside a longest order-preserving subset.
pub(crate) fn induced_length_raw(
    src: &SyntaxTree,
    dst: &SyntaxTree,
    s2d: &[Option<NodeId>],
    d2s: &[Option<NodeId>],
) -> usize {
    let mut count = 0;
    for s in src.ids() {
        match s2d[s.index()] {
            None => count += 1,
            Some(d) => {
                if src.label(s) != dst.label(d) {
                    count += 1;
                }
                let moved = match (src.parent(s), dst.parent(d)) {
                    (None, None) => false,
                    (Some(p), Some(q)) => s2d[p.index()] != Some(q),
                    _ => true,
                };
                if moved {
                    count += 1;
                }
            }
        }
    }
    for d in dst.ids() {
        if d2s[d.index()].is_none() && dst.parent(d).map_or(true, |q| d2s[q.index()].is_some()) {
            count += 1;
        }
    }
    let mut order = Vec::new();
    for s in src.ids() {
        let Some(d) = s2d[s.index()] else { continue };
        order.clear();
        for &c in src.children(s) {
            if let Some(x) = s2d[c.index()] {
                if dst.parent(x) == Some(d) {
                    order.push(x.0);
                }
            }
        }
        if order.len() > 1 {
            count += order.len() - longest_increasing(&order);
        }
    }
    count
}

/// Length of the longest strictly increasing subsequence.
pub(crate) fn longest_increasing(seq: &[u32]) -> usize {
    let mut tails: Vec<u32> = Vec::with_capacity(seq.len());
    for &v in seq {
        match tails.binary_search(&v) {
            Ok(_) => {}
            Err(i) if i == tails.len() => tails.push(v),
            Err(i) => tails[i] = v,
        }
    }
    tails.len()
}

/// Indices of one longest strictly increasing subsequence, ascending.
pub(crate) fn increasing_subsequence(seq: &[u32]) -> Vec<usize> {
    // tails[k]: index of the smallest tail of an increasing run of length k + 1.
    let mut tails: Vec<usize> = Vec::with_capacity(seq.len());
    let mut prev: Vec<Option<usize>> = vec![None; seq.len()];
    for (i, &v) in seq.iter().enumerate() {
        let k = tails.partition_point(|&t| seq[t] < v);
        prev[i] = k.checked_sub(1).map(|j| tails[j]);
        if k == tails.len() {
            tails.push(i);
        } else {
            tails[k] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i);
        cur = prev[i];
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lis() {
        assert_eq!(longest_increasing(&[]), 0);
        assert_eq!(longest_increasing(&[3, 1, 2]), 2);
        assert_eq!(longest_increasing(&[1, 2, 3]), 3);
        assert_eq!(longest_increasing(&[3, 2, 1]), 1);
        assert_eq!(longest_increasing(&[2, 5, 3, 7, 4, 8]), 4);
    }

    #[test]
    fn lis_indices_agree_with_length() {
        for seq in [
            &[][..],
            &[3, 1, 2],
            &[1, 2, 3],
            &[3, 2, 1],
            &[2, 5, 3, 7, 4, 8],
            &[4, 4, 4],
        ] {
            let idx = increasing_subsequence(seq);
            assert_eq!(idx.len(), longest_increasing(seq));
            assert!(idx.windows(2).all(|w| w[0] < w[1] && seq[w[0]] < seq[w[1]]));
        }
    }
}
