//! Structural differencing for Solidity sources.
//!
//! The pipeline parses both versions into concrete syntax trees, prunes and
//! reshapes them with a [`TransformRuleSet`], maps nodes between the two
//! trees with [`match_trees`], and derives an [`EditScript`] of inserts,
//! deletes, updates and moves from the mapping.
//!
//! ```
//! use soldiff_core::{diff_sources, serialize, Format, Frontend, MatcherConfig};
//!
//! let mut frontend = Frontend::solidity();
//! let before = "contract C { uint256 public x; }";
//! let after = "contract C { uint256 private x; }";
//! let diff = diff_sources(&mut frontend, before, after, &MatcherConfig::default()).unwrap();
//! assert_eq!(diff.script.len(), 1);
//! assert_eq!(
//!     serialize(&diff.script, Format::Xml),
//!     "<actions>\n<update-node tree=\"visibility: public [21,27]\" label=\"private\"/>\n</actions>"
//! );
//! ```

pub mod frontend;
pub mod linediff;
pub mod matcher;
pub mod script;
pub mod tree;

pub use frontend::{
    apply_transforms, default_solidity_rules, load_rules, parse_solidity, Frontend, ParseError,
    ParserAdapter, RuleFileError, SolidityParser, TransformRuleSet, GRAMMAR_VERSION,
};
pub use linediff::{line_diff, line_edit_distance, LineDiffResult, LineOp};
pub use matcher::{
    dice_similarity, match_trees, ConfigError, MappingError, MappingStore, MatcherConfig,
};
pub use script::{
    apply_edit_script, edit_distance, generate_edit_script, induced_length, serialize,
    ActionCounts, ActionKind, ApplyError, EditAction, EditScript, Format, NodeDesc, ScriptError,
    WorkId,
};
pub use tree::{isomorphic, NodeId, NodeSpec, SourceSpan, SyntaxTree};

/// Which side of a pair failed to parse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Before,
    After,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiffError {
    #[error("{side:?} version does not parse: {error}")]
    Parse { side: Side, error: ParseError },
    #[error(transparent)]
    Script(#[from] ScriptError),
}

/// Everything computed for one pair of sources.
#[derive(Debug, Clone)]
pub struct SourceDiff {
    pub before: SyntaxTree,
    pub after: SyntaxTree,
    pub mapping: MappingStore,
    pub script: EditScript,
}

/// Parses, transforms, matches and scripts one pair.
pub fn diff_sources<P: ParserAdapter>(
    frontend: &mut Frontend<P>,
    before: &str,
    after: &str,
    cfg: &MatcherConfig,
) -> Result<SourceDiff, DiffError> {
    let src = frontend.parse(before).map_err(|error| DiffError::Parse {
        side: Side::Before,
        error,
    })?;
    let dst = frontend.parse(after).map_err(|error| DiffError::Parse {
        side: Side::After,
        error,
    })?;
    let mapping = match_trees(&src, &dst, cfg);
    let script = generate_edit_script(&src, &dst, &mapping)?;
    Ok(SourceDiff {
        before: src,
        after: dst,
        mapping,
        script,
    })
}
