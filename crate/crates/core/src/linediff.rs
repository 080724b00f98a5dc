//! Line-level diff baseline: a minimal Myers diff over lines and the
//! added-plus-removed distance derived from it.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineOp {
    Keep,
    Remove,
    Add,
}

/// One line of the diff. Line numbers are 1-based; `old_line` is set for
/// kept and removed lines, `new_line` for kept and added lines.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hunk {
    pub op: LineOp,
    /// The line including its terminator, if it had one.
    pub text: String,
    pub old_line: Option<usize>,
    pub new_line: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineDiffResult {
    pub added: usize,
    pub removed: usize,
    pub hunks: Vec<Hunk>,
}

impl LineDiffResult {
    /// Concatenation of kept and removed lines: the first input.
    pub fn old_text(&self) -> String {
        self.hunks
            .iter()
            .filter(|h| h.op != LineOp::Add)
            .map(|h| h.text.as_str())
            .collect()
    }

    /// Concatenation of kept and added lines: the second input.
    pub fn new_text(&self) -> String {
        self.hunks
            .iter()
            .filter(|h| h.op != LineOp::Remove)
            .map(|h| h.text.as_str())
            .collect()
    }
}

/// Splits on `\n`, keeping terminators; a final line without one still
/// counts.
pub fn split_lines(text: &str) -> Vec<&str> {
    text.split_inclusive('\n').collect()
}

/// Minimal line diff of `a` against `b`: `added + removed` is as small as
/// any line alignment allows. Lines compare byte for byte, terminator
/// included.
pub fn line_diff(a: &str, b: &str) -> LineDiffResult {
    let x = split_lines(a);
    let y = split_lines(b);
    let ops = myers(&x, &y);
    let mut out = LineDiffResult::default();
    let (mut i, mut j) = (0, 0);
    for op in ops {
        let hunk = match op {
            LineOp::Keep => {
                i += 1;
                j += 1;
                Hunk {
                    op,
                    text: x[i - 1].to_owned(),
                    old_line: Some(i),
                    new_line: Some(j),
                }
            }
            LineOp::Remove => {
                i += 1;
                out.removed += 1;
                Hunk {
                    op,
                    text: x[i - 1].to_owned(),
                    old_line: Some(i),
                    new_line: None,
                }
            }
            LineOp::Add => {
                j += 1;
                out.added += 1;
                Hunk {
                    op,
                    text: y[j - 1].to_owned(),
                    old_line: None,
                    new_line: Some(j),
                }
            }
        };
        out.hunks.push(hunk);
    }
    out
}

pub fn line_edit_distance(r: &LineDiffResult) -> usize {
    r.added + r.removed
}

// Greedy O((N + M) D) forward search, storing the frontier of every round
// for backtracking. Among equally short scripts, removals are placed
// before additions.
fn myers(a: &[&str], b: &[&str]) -> Vec<LineOp> {
    let n = a.len() as isize;
    let m = b.len() as isize;
    let max = (n + m) as usize;
    let offset = max as isize + 1;
    let mut v = vec![0isize; 2 * max + 3];
    let mut trace: Vec<Vec<isize>> = Vec::new();
    'search: for d in 0..=max as isize {
        trace.push(v.clone());
        let mut k = -d;
        while k <= d {
            let idx = (k + offset) as usize;
            let mut x = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) {
                v[idx + 1]
            } else {
                v[idx - 1] + 1
            };
            let mut y = x - k;
            while x < n && y < m && a[x as usize] == b[y as usize] {
                x += 1;
                y += 1;
            }
            v[idx] = x;
            if x >= n && y >= m {
                break 'search;
            }
            k += 2;
        }
    }

    let mut ops = Vec::with_capacity(max);
    let (mut x, mut y) = (n, m);
    for (d, v) in trace.iter().enumerate().rev() {
        let d = d as isize;
        let k = x - y;
        let idx = (k + offset) as usize;
        let prev_k = if k == -d || (k != d && v[idx - 1] < v[idx + 1]) {
            k + 1
        } else {
            k - 1
        };
        let prev_x = if d == 0 {
            0
        } else {
            v[(prev_k + offset) as usize]
        };
        let prev_y = if d == 0 { 0 } else { prev_x - prev_k };
        while x > prev_x && y > prev_y {
            ops.push(LineOp::Keep);
            x -= 1;
            y -= 1;
        }
        if d > 0 {
            if x == prev_x {
                ops.push(LineOp::Add);
            } else {
                ops.push(LineOp::Remove);
            }
        }
        x = prev_x;
        y = prev_y;
    }
    ops.reverse();
    ops
}

/// Unified diff with `context` lines around each change.
pub fn unified(r: &LineDiffResult, old_name: &str, new_name: &str, context: usize) -> String {
    let mut out = String::new();
    if r.added + r.removed == 0 {
        return out;
    }
    let _ = writeln!(out, "--- {old_name}");
    let _ = writeln!(out, "+++ {new_name}");
    let h = &r.hunks;
    let changed: Vec<usize> = (0..h.len()).filter(|&i| h[i].op != LineOp::Keep).collect();
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &c in &changed {
        let lo = c.saturating_sub(context);
        let hi = (c + context + 1).min(h.len());
        match groups.last_mut() {
            Some(g) if lo <= g.1 => g.1 = hi,
            _ => groups.push((lo, hi)),
        }
    }
    for (lo, hi) in groups {
        let slice = &h[lo..hi];
        let old_count = slice.iter().filter(|x| x.op != LineOp::Add).count();
        let new_count = slice.iter().filter(|x| x.op != LineOp::Remove).count();
        let old_start = start_line(h, lo, |x| x.old_line, old_count);
        let new_start = start_line(h, lo, |x| x.new_line, new_count);
        let _ = writeln!(
            out,
            "@@ -{old_start},{old_count} +{new_start},{new_count} @@"
        );
        for x in slice {
            let sign = match x.op {
                LineOp::Keep => ' ',
                LineOp::Remove => '-',
                LineOp::Add => '+',
            };
            out.push(sign);
            out.push_str(&x.text);
            if !x.text.ends_with('\n') {
                out.push_str("\n\\ No newline at end of file\n");
            }
        }
    }
    out
}

// First line number a range covers; for an empty range, the line before it.
fn start_line(h: &[Hunk], lo: usize, line: impl Fn(&Hunk) -> Option<usize>, count: usize) -> usize {
    let before = h[..lo].iter().rev().find_map(&line).unwrap_or(0);
    if count == 0 {
        before
    } else {
        before + 1
    }
}
