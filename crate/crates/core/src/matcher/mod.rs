//! Two-phase tree matching: top-down anchoring of isomorphic subtrees,
//! then bottom-up container matching with recovery of the remaining nodes.

mod bottom_up;
mod exact;
mod mapping;
mod top_down;
mod zs;

pub use bottom_up::match_bottom_up;
pub use mapping::{MappingError, MappingStore};
pub use top_down::match_top_down;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tree::{NodeId, SyntaxTree};

/// Trees whose combined node count is at most this are matched by an
/// exhaustive search for the mapping with the shortest edit script.
pub const EXACT_SEARCH_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid matcher configuration: {0}")]
pub struct ConfigError(String);

/// Matching thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatcherConfig {
    /// Smallest subtree height anchored by the top-down phase.
    pub min_height: usize,
    /// Dice similarity a container pair needs in the bottom-up phase.
    pub min_dice: f64,
    /// Largest combined subtree size aligned by exact tree edit distance
    /// during recovery.
    pub max_recovery_size: usize,
}

impl Default for MatcherConfig {
    fn default() -> Self {
        MatcherConfig {
            min_height: 2,
            min_dice: 0.5,
            max_recovery_size: 100,
        }
    }
}

impl MatcherConfig {
    pub fn new(
        min_height: usize,
        min_dice: f64,
        max_recovery_size: usize,
    ) -> Result<Self, ConfigError> {
        let cfg = MatcherConfig {
            min_height,
            min_dice,
            max_recovery_size,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.min_height < 1 {
            return Err(ConfigError("min height must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.min_dice) {
            return Err(ConfigError(format!(
                "min dice {} outside [0, 1]",
                self.min_dice
            )));
        }
        Ok(())
    }
}

/// `2 * |mapped descendant pairs| / (|desc(a)| + |desc(b)|)`, counting
/// only pairs that join a descendant of `a` with a descendant of `b`.
/// Two leaves have similarity 1.
pub fn dice_similarity(
    src: &SyntaxTree,
    a: NodeId,
    dst: &SyntaxTree,
    b: NodeId,
    m: &MappingStore,
) -> f64 {
    let total = (src.size(a) - 1) + (dst.size(b) - 1);
    if total == 0 {
        return 1.0;
    }
    let common = src
        .descendants(a)
        .filter(|&x| m.dst_of(x).is_some_and(|y| dst.is_descendant(y, b)))
        .count();
    (2 * common) as f64 / total as f64
}

/// Full matching: top-down anchors extended bottom-up. Deterministic for a
/// fixed input and configuration.
///
/// Very small tree pairs (see [`EXACT_SEARCH_LIMIT`]) are additionally
/// searched exhaustively, keeping the two-phase result unless some mapping
/// yields a strictly shorter edit script.
pub fn match_trees(src: &SyntaxTree, dst: &SyntaxTree, cfg: &MatcherConfig) -> MappingStore {
    let anchors = match_top_down(src, dst, cfg);
    debug_assert!(anchors.validate(src, dst).is_ok());
    let mapping = match_bottom_up(src, dst, anchors, cfg);
    debug_assert!(mapping.validate(src, dst).is_ok());
    if src.len() + dst.len() <= EXACT_SEARCH_LIMIT {
        exact::shortest_script_mapping(src, dst, mapping)
    } else {
        mapping
    }
}
