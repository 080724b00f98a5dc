use std::io;

use serde::{Deserialize, Serialize};
use soldiff_core::{ActionCounts, MatcherConfig};

use crate::manifest::ManifestEntry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    ParseErrorBefore,
    ParseErrorAfter,
    /// One of the two files could not be read.
    Missing,
    /// A panic, a rejected mapping, or a failed `--verify` check.
    InternalError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::ParseErrorBefore => "parse_error_before",
            Status::ParseErrorAfter => "parse_error_after",
            Status::Missing => "missing",
            Status::InternalError => "internal_error",
        }
    }
}

/// One CSV row. Field order is the column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DiffReport {
    pub pair_id: String,
    pub status: Status,
    pub edit_distance: Option<usize>,
    pub inserts: Option<usize>,
    pub deletes: Option<usize>,
    pub updates: Option<usize>,
    pub moves: Option<usize>,
    pub line_edit_distance: Option<usize>,
    /// Wall time for the pair; only filled with `--timings` so that reports
    /// stay byte-comparable across runs.
    pub ms: Option<f64>,
    pub min_height: usize,
    pub min_dice: f64,
    pub max_recovery_size: usize,
    pub category: Option<String>,
    pub mutation_count: Option<u32>,
}

pub const COLUMNS: [&str; 14] = [
    "pairId",
    "status",
    "editDistance",
    "inserts",
    "deletes",
    "updates",
    "moves",
    "lineEditDistance",
    "ms",
    "minHeight",
    "minDice",
    "maxRecoverySize",
    "category",
    "mutationCount",
];

impl DiffReport {
    /// A report for `entry` with no outcome filled in yet.
    pub fn pending(entry: &ManifestEntry, cfg: &MatcherConfig, status: Status) -> Self {
        DiffReport {
            pair_id: entry.pair_id.clone(),
            status,
            edit_distance: None,
            inserts: None,
            deletes: None,
            updates: None,
            moves: None,
            line_edit_distance: None,
            ms: None,
            min_height: cfg.min_height,
            min_dice: cfg.min_dice,
            max_recovery_size: cfg.max_recovery_size,
            category: entry.category.clone(),
            mutation_count: entry.mutation_count,
        }
    }

    pub fn set_counts(&mut self, c: ActionCounts) {
        self.status = Status::Ok;
        self.edit_distance = Some(c.total());
        self.inserts = Some(c.inserts);
        self.deletes = Some(c.deletes);
        self.updates = Some(c.updates);
        self.moves = Some(c.moves);
    }

    pub fn is_ok(&self) -> bool {
        self.status == Status::Ok
    }

    fn check(&self) -> Result<(), String> {
        let counts = [self.inserts, self.deletes, self.updates, self.moves];
        match (self.status, self.edit_distance) {
            (Status::Ok, Some(d)) => {
                let sum: Option<usize> = counts.iter().copied().sum();
                match sum {
                    Some(s) if s == d => Ok(()),
                    _ => Err(format!("action counts do not add up to editDistance {d}")),
                }
            }
            (Status::Ok, None) => Err("ok row without editDistance".into()),
            (_, Some(_)) => Err("failed row with an editDistance".into()),
            (_, None) => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("row {row} ({id}): {message}")]
    Invalid {
        row: usize,
        id: String,
        message: String,
    },
    #[error("unexpected header {0:?}")]
    Header(Vec<String>),
}

pub fn write_reports<W: io::Write>(out: W, reports: &[DiffReport]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a report CSV, checking the header and per-row invariants.
pub fn read_reports<R: io::Read>(input: R) -> Result<Vec<DiffReport>, ReportError> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header != COLUMNS {
        return Err(ReportError::Header(header));
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<DiffReport>().enumerate() {
        let row = row?;
        row.check().map_err(|message| ReportError::Invalid {
            row: i + 1,
            id: row.pair_id.clone(),
            message,
        })?;
        out.push(row);
    }
    Ok(out)
}
