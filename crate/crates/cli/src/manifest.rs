use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

/// One pair to diff. Relative paths in the manifest file are resolved
/// against the directory holding it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestEntry {
    pub pair_id: String,
    pub before: PathBuf,
    pub after: PathBuf,
    pub category: Option<String>,
    pub mutation_count: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("manifest {path}: duplicate pairId {id:?}")]
    Duplicate { path: PathBuf, id: String },
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase")]
struct Row {
    pair_id: String,
    before: PathBuf,
    after: PathBuf,
    #[serde(default)]
    category: Option<String>,
    #[serde(default)]
    mutation_count: Option<u32>,
}

/// Reads a manifest with header `pairId,before,after[,category[,mutationCount]]`.
pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>, ManifestError> {
    let text = std::fs::read_to_string(path).map_err(|source| ManifestError::Io {
        path: path.to_owned(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new(""));
    parse_manifest(&text, base).map_err(|e| match e {
        ParseFailure::Csv(source) => ManifestError::Csv {
            path: path.to_owned(),
            source,
        },
        ParseFailure::Duplicate(id) => ManifestError::Duplicate {
            path: path.to_owned(),
            id,
        },
    })
}

enum ParseFailure {
    Csv(csv::Error),
    Duplicate(String),
}

fn parse_manifest(text: &str, base: &Path) -> Result<Vec<ManifestEntry>, ParseFailure> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in reader.deserialize::<Row>() {
        let row = row.map_err(ParseFailure::Csv)?;
        if !seen.insert(row.pair_id.clone()) {
            return Err(ParseFailure::Duplicate(row.pair_id));
        }
        out.push(ManifestEntry {
            before: base.join(&row.before),
            after: base.join(&row.after),
            pair_id: row.pair_id,
            category: row.category.filter(|c| !c.is_empty()),
            mutation_count: row.mutation_count,
        });
    }
    Ok(out)
}
