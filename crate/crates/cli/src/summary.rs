use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::report::DiffReport;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupBy {
    None,
    Category,
    MutationCount,
}

impl FromStr for GroupBy {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(GroupBy::None),
            "category" => Ok(GroupBy::Category),
            "mutationCount" => Ok(GroupBy::MutationCount),
            other => Err(format!(
                "unknown grouping {other:?} (expected none, category or mutationCount)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub max: usize,
}

impl Stats {
    pub fn of(values: &[usize]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_unstable();
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2] as f64
        } else {
            (v[n / 2 - 1] + v[n / 2]) as f64 / 2.0
        };
        Some(Stats {
            count: n,
            mean: v.iter().sum::<usize>() as f64 / n as f64,
            median,
            max: v[n - 1],
        })
    }
}

/// Statistics for one group. Both distances are taken over the group's ok
/// rows only, so the two columns describe the same pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupSummary {
    pub key: String,
    pub rows: usize,
    pub ok: usize,
    pub edit: Option<Stats>,
    pub line: Option<Stats>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    All,
    Count(u32),
    Name(String),
    Unset,
}

impl fmt::Display for Key {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Key::All => f.write_str("all"),
            Key::Count(n) => write!(f, "{n}"),
            Key::Name(s) => f.write_str(s),
            Key::Unset => f.write_str("-"),
        }
    }
}

/// Groups sorted by key: numerically for mutation counts, lexically for
/// categories, rows without a key last.
pub fn summarize(reports: &[DiffReport], by: GroupBy) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<Key, Vec<&DiffReport>> = BTreeMap::new();
    for r in reports {
        let key = match by {
            GroupBy::None => Key::All,
            GroupBy::Category => r.category.clone().map_or(Key::Unset, Key::Name),
            GroupBy::MutationCount => r.mutation_count.map_or(Key::Unset, Key::Count),
        };
        groups.entry(key).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(key, rows)| {
            let ok: Vec<&&DiffReport> = rows.iter().filter(|r| r.is_ok()).collect();
            let edit: Vec<usize> = ok.iter().filter_map(|r| r.edit_distance).collect();
            let line: Vec<usize> = ok.iter().filter_map(|r| r.line_edit_distance).collect();
            GroupSummary {
                key: key.to_string(),
                rows: rows.len(),
                ok: ok.len(),
                edit: Stats::of(&edit),
                line: Stats::of(&line),
            }
        })
        .collect()
}

pub fn render_groups(groups: &[GroupSummary]) -> String {
    let mut out = String::new();
    let width = groups.iter().map(|g| g.key.len()).max().unwrap_or(0).max(5);
    let _ = writeln!(
        out,
        "{:<width$} {:>6} {:>6} {:>10} {:>10} {:>8} {:>10} {:>10} {:>8}",
        "group",
        "rows",
        "ok",
        "edit.mean",
        "edit.med",
        "edit.max",
        "line.mean",
        "line.med",
        "line.max"
    );
    for g in groups {
        let _ = write!(out, "{:<width$} {:>6} {:>6}", g.key, g.rows, g.ok);
        for s in [g.edit, g.line] {
            match s {
                Some(s) => {
                    let _ = write!(out, " {:>10.2} {:>10.2} {:>8}", s.mean, s.median, s.max);
                }
                None => {
                    let _ = write!(out, " {:>10} {:>10} {:>8}", "-", "-", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}

/// The block printed after a corpus run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub total: usize,
    pub ok: usize,
    pub edit: Option<Stats>,
    pub line: Option<Stats>,
    pub categories: Vec<GroupSummary>,
}

impl RunSummary {
    pub fn new(reports: &[DiffReport]) -> Self {
        let all = summarize(reports, GroupBy::None);
        let (ok, edit, line) = all
            .first()
            .map_or((0, None, None), |g| (g.ok, g.edit, g.line));
        RunSummary {
            total: reports.len(),
            ok,
            edit,
            line,
            categories: summarize(reports, GroupBy::Category),
        }
    }

    /// `ok / total`; 1 for an empty run.
    pub fn success_rate(&self) -> f64 {
        if self.total == 0 {
            1.0
        } else {
            self.ok as f64 / self.total as f64
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pairs: {}", self.total)?;
        writeln!(f, "ok: {}", self.ok)?;
        writeln!(f, "failed: {}", self.total - self.ok)?;
        writeln!(f, "success rate: {:.2}%", self.success_rate() * 100.0)?;
        for (name, s) in [
            ("edit distance", self.edit),
            ("line edit distance", self.line),
        ] {
            match s {
                Some(s) => writeln!(
                    f,
                    "{name}: mean {:.2}, median {:.2}, max {}",
                    s.mean, s.median, s.max
                )?,
                None => writeln!(f, "{name}: -")?,
            }
        }
        writeln!(f, "mean edit distance by category:")?;
        for g in &self.categories {
            match g.edit {
                Some(s) => writeln!(f, "  {}: {:.2} ({} ok of {})", g.key, s.mean, g.ok, g.rows)?,
                None => writeln!(f, "  {}: - (0 ok of {})", g.key, g.rows)?,
            }
        }
        Ok(())
    }
}
