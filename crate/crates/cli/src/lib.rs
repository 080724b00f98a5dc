//! Library side of the `soldiff` binary: manifest parsing, the parallel
//! corpus runner and report summaries.

pub mod manifest;
pub mod report;
pub mod runner;
pub mod summary;

pub use manifest::{read_manifest, ManifestEntry, ManifestError};
pub use report::{read_reports, write_reports, DiffReport, ReportError, Status};
pub use runner::{default_jobs, run_corpus, run_pair, CorpusOptions};
pub use summary::{render_groups, summarize, GroupBy, GroupSummary, RunSummary, Stats};

/// Environment variable naming the default transform rule file.
pub const RULES_ENV: &str = "SOLDIFF_RULES";
