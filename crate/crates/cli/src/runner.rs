use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::panic::{self, AssertUnwindSafe};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::thread;
use std::time::Instant;

use soldiff_core::{
    apply_edit_script, diff_sources, isomorphic, line_diff, line_edit_distance, DiffError,
    Frontend, MatcherConfig, Side, SolidityParser, TransformRuleSet,
};

use crate::manifest::ManifestEntry;
use crate::report::{DiffReport, Status};

#[derive(Clone, Debug)]
pub struct CorpusOptions {
    pub jobs: usize,
    pub verify: bool,
    pub timings: bool,
    pub matcher: MatcherConfig,
    pub rules: TransformRuleSet,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            jobs: default_jobs(),
            verify: false,
            timings: false,
            matcher: MatcherConfig::default(),
            rules: soldiff_core::default_solidity_rules(),
        }
    }
}

pub fn default_jobs() -> usize {
    thread::available_parallelism().map_or(1, |n| n.get())
}

/// Diffs every entry on `opts.jobs` workers and streams the rows to `out`
/// in manifest order as they become available. Returns all rows.
pub fn run_corpus<W: io::Write>(
    entries: &[ManifestEntry],
    opts: &CorpusOptions,
    out: W,
) -> Result<Vec<DiffReport>, csv::Error> {
    let jobs = opts.jobs.clamp(1, entries.len().max(1));
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<(usize, DiffReport)>();
    let mut writer = csv::Writer::from_writer(out);
    let mut rows = Vec::with_capacity(entries.len());

    thread::scope(|s| {
        for _ in 0..jobs {
            let tx = tx.clone();
            let next = &next;
            s.spawn(move || {
                let mut frontend = new_frontend(opts);
                loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    let Some(entry) = entries.get(i) else { break };
                    let report = isolated(&mut frontend, entry, opts);
                    if tx.send((i, report)).is_err() {
                        break;
                    }
                }
            });
        }
        drop(tx);

        let mut pending = BTreeMap::new();
        for (i, report) in rx {
            pending.insert(i, report);
            while let Some(report) = pending.remove(&rows.len()) {
                writer.serialize(&report)?;
                rows.push(report);
            }
        }
        writer.flush()?;
        Ok::<_, csv::Error>(())
    })?;
    Ok(rows)
}

fn new_frontend(opts: &CorpusOptions) -> Frontend<SolidityParser> {
    Frontend::new(SolidityParser::new(), opts.rules.clone())
}

// A panicking pair becomes an internal_error row; the worker gets a fresh
// parser in case the old one was left mid-parse.
fn isolated(
    frontend: &mut Frontend<SolidityParser>,
    entry: &ManifestEntry,
    opts: &CorpusOptions,
) -> DiffReport {
    match panic::catch_unwind(AssertUnwindSafe(|| run_pair(frontend, entry, opts))) {
        Ok(report) => report,
        Err(_) => {
            *frontend = new_frontend(opts);
            DiffReport::pending(entry, &opts.matcher, Status::InternalError)
        }
    }
}

/// Diffs one manifest entry.
pub fn run_pair(
    frontend: &mut Frontend<SolidityParser>,
    entry: &ManifestEntry,
    opts: &CorpusOptions,
) -> DiffReport {
    let start = Instant::now();
    let mut report = DiffReport::pending(entry, &opts.matcher, Status::InternalError);
    let (before, after) = match (
        fs::read_to_string(&entry.before),
        fs::read_to_string(&entry.after),
    ) {
        (Ok(b), Ok(a)) => (b, a),
        _ => {
            report.status = Status::Missing;
            return report;
        }
    };
    report.line_edit_distance = Some(line_edit_distance(&line_diff(&before, &after)));
    match diff_sources(frontend, &before, &after, &opts.matcher) {
        Ok(d) => {
            let sound = !opts.verify
                || apply_edit_script(&d.before, &d.script)
                    .is_ok_and(|t| isomorphic(&t, t.root(), &d.after, d.after.root()));
            if sound {
                report.set_counts(d.script.counts());
            }
        }
        Err(DiffError::Parse {
            side: Side::Before, ..
        }) => report.status = Status::ParseErrorBefore,
        Err(DiffError::Parse {
            side: Side::After, ..
        }) => report.status = Status::ParseErrorAfter,
        Err(DiffError::Script(_)) => report.status = Status::InternalError,
    }
    if opts.timings {
        report.ms = Some((start.elapsed().as_secs_f64() * 1e6).round() / 1e3);
    }
    report
}
