//! Flatten / alias / ignore rules and their text file format.
//!
//! ```text
//! # comments start with '#'
//! flatten:
//!     number_literal
//!     string_literal
//! alias:
//!     constructor_definition -> function_definition
//! ignore: [comment, ";"]
//! ```
//!
//! Each section header may be followed by entries on the following lines
//! (one per line) or by an inline `[a, b, "c"]` list. Entries may be
//! double-quoted; quoting is required inside inline lists for entries that
//! contain `,`, `[`, `]` or spaces, and anywhere for entries starting with
//! `#` or `"`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rule file line {line}: {message}")]
pub struct RuleFileError {
    /// 1-based; 0 when the error is not tied to a line (I/O).
    pub line: usize,
    pub message: String,
}

impl RuleFileError {
    fn new(line: usize, message: impl Into<String>) -> Self {
        RuleFileError {
            line,
            message: message.into(),
        }
    }
}

/// Rules turning a concrete syntax tree into a diff-optimized one.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TransformRuleSet {
    pub flatten: BTreeSet<String>,
    pub alias: BTreeMap<String, String>,
    pub ignore: BTreeSet<String>,
}

impl TransformRuleSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Checks pairwise disjointness of the three collections and the
    /// absence of alias chains.
    pub fn validate(&self) -> Result<(), String> {
        for name in &self.flatten {
            if self.ignore.contains(name) {
                return Err(format!("`{name}` is both flattened and ignored"));
            }
            if self.alias.contains_key(name) {
                return Err(format!("`{name}` is both flattened and aliased"));
            }
        }
        for name in self.alias.keys() {
            if self.ignore.contains(name) {
                return Err(format!("`{name}` is both aliased and ignored"));
            }
        }
        for (from, to) in &self.alias {
            if self.alias.contains_key(to) {
                return Err(format!(
                    "alias chain `{from}` -> `{to}` -> `{}`",
                    self.alias[to]
                ));
            }
        }
        Ok(())
    }

    /// The node type a node of `kind` ends up with.
    pub fn resolve<'a>(&'a self, kind: &'a str) -> &'a str {
        self.alias.get(kind).map_or(kind, String::as_str)
    }

    pub fn is_ignored(&self, kind: &str) -> bool {
        self.ignore.contains(kind)
            || self
                .alias
                .get(kind)
                .is_some_and(|t| self.ignore.contains(t))
    }

    pub fn is_flattened(&self, kind: &str) -> bool {
        self.flatten.contains(kind)
            || self
                .alias
                .get(kind)
                .is_some_and(|t| self.flatten.contains(t))
    }

    /// Serializes to the rule-file format. `parse` of the result yields an
    /// equal rule set.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("flatten:\n");
        for name in &self.flatten {
            let _ = writeln!(out, "    {}", quote(name));
        }
        out.push_str("alias:\n");
        for (from, to) in &self.alias {
            let _ = writeln!(out, "    {} -> {}", quote(from), quote(to));
        }
        out.push_str("ignore:\n");
        for name in &self.ignore {
            let _ = writeln!(out, "    {}", quote(name));
        }
        out
    }

    /// Parses the rule-file format.
    pub fn parse(text: &str) -> Result<Self, RuleFileError> {
        let mut rules = TransformRuleSet::default();
        let mut section: Option<Section> = None;
        // First line each name was seen on, for disjointness diagnostics.
        let mut seen: BTreeMap<String, usize> = BTreeMap::new();

        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some((head, rest)) = split_header(line) {
                section = Some(head);
                let rest = rest.trim();
                if !rest.is_empty() {
                    let inner = rest
                        .strip_prefix('[')
                        .and_then(|r| r.strip_suffix(']'))
                        .ok_or_else(|| {
                            RuleFileError::new(lineno, "expected `[...]` after section header")
                        })?;
                    for item in split_inline(inner, lineno)? {
                        rules.add(head, &item, lineno, &mut seen)?;
                    }
                }
                continue;
            }
            let head = section.ok_or_else(|| {
                RuleFileError::new(
                    lineno,
                    "entry before any `flatten:`, `alias:` or `ignore:` section",
                )
            })?;
            rules.add(head, line, lineno, &mut seen)?;
        }
        rules.validate().map_err(|msg| {
            // Point at the latest line involved in the conflict.
            let line = seen
                .iter()
                .filter(|(name, _)| msg.contains(&format!("`{name}`")))
                .map(|(_, &l)| l)
                .max()
                .unwrap_or(0);
            RuleFileError::new(line, msg)
        })?;
        Ok(rules)
    }

    fn add(
        &mut self,
        section: Section,
        entry: &str,
        line: usize,
        seen: &mut BTreeMap<String, usize>,
    ) -> Result<(), RuleFileError> {
        match section {
            Section::Flatten | Section::Ignore => {
                let name = unquote(entry.trim(), line)?;
                let set = if section == Section::Flatten {
                    &mut self.flatten
                } else {
                    &mut self.ignore
                };
                if !set.insert(name.clone()) {
                    return Err(RuleFileError::new(
                        line,
                        format!("duplicate entry `{name}`"),
                    ));
                }
                seen.entry(name).or_insert(line);
            }
            Section::Alias => {
                let (from, to) = split_alias(entry).ok_or_else(|| {
                    RuleFileError::new(line, "alias entries must look like `source -> target`")
                })?;
                let from = unquote(from, line)?;
                let to = unquote(to, line)?;
                if from == to {
                    return Err(RuleFileError::new(
                        line,
                        format!("`{from}` aliased to itself"),
                    ));
                }
                if self.alias.insert(from.clone(), to.clone()).is_some() {
                    return Err(RuleFileError::new(
                        line,
                        format!("duplicate alias for `{from}`"),
                    ));
                }
                seen.entry(from).or_insert(line);
                seen.entry(to).or_insert(line);
            }
        }
        Ok(())
    }
}

/// Reads and validates a rule file.
pub fn load_rules(path: impl AsRef<Path>) -> Result<TransformRuleSet, RuleFileError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| RuleFileError::new(0, format!("cannot read {}: {e}", path.display())))?;
    TransformRuleSet::parse(&text)
}

/// The shipped Solidity configuration.
pub fn default_solidity_rules() -> TransformRuleSet {
    let flatten = [
        "number_literal",
        "string_literal",
        "hex_string_literal",
        "unicode_string_literal",
        "boolean_literal",
        "primitive_type",
        "pragma_value",
        "solidity_version",
        "visibility",
        "state_mutability",
        "state_location",
        "yul_decimal_number",
        "yul_hex_number",
        "yul_string_literal",
        "yul_boolean",
    ];
    let alias = [
        ("constructor_definition", "function_definition"),
        ("fallback_receive_definition", "function_definition"),
        ("yul_function_call", "call_expression"),
        ("yul_assignment", "assignment_expression"),
    ];
    let ignore = ["comment", ";", ",", "{", "}", "(", ")"];
    TransformRuleSet {
        flatten: flatten.iter().map(|s| s.to_string()).collect(),
        alias: alias
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect(),
        ignore: ignore.iter().map(|s| s.to_string()).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Flatten,
    Alias,
    Ignore,
}

fn split_header(line: &str) -> Option<(Section, &str)> {
    for (name, section) in [
        ("flatten:", Section::Flatten),
        ("alias:", Section::Alias),
        ("ignore:", Section::Ignore),
    ] {
        if let Some(rest) = line.strip_prefix(name) {
            return Some((section, rest));
        }
    }
    None
}

fn split_alias(entry: &str) -> Option<(&str, &str)> {
    // A quoted source may itself contain "->".
    let search_from = entry
        .strip_prefix('"')
        .and_then(|r| r.find('"'))
        .map_or(0, |i| i + 2);
    let idx = entry[search_from..].find("->")? + search_from;
    let (from, to) = (entry[..idx].trim(), entry[idx + 2..].trim());
    (!from.is_empty() && !to.is_empty()).then_some((from, to))
}

fn split_inline(inner: &str, line: usize) -> Result<Vec<String>, RuleFileError> {
    let mut out = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let (item, tail) = if let Some(quoted) = rest.strip_prefix('"') {
            let end = quoted
                .find('"')
                .ok_or_else(|| RuleFileError::new(line, "unterminated quote"))?
                + 2;
            (&rest[..end], &rest[end..])
        } else {
            match rest.find(',') {
                Some(i) => (&rest[..i], &rest[i..]),
                None => (rest, ""),
            }
        };
        out.push(unquote(item.trim(), line)?);
        let tail = tail.trim_start();
        rest = match tail.strip_prefix(',') {
            Some(t) => t.trim_start(),
            None if tail.is_empty() => tail,
            None => return Err(RuleFileError::new(line, "expected `,` between list items")),
        };
    }
    Ok(out)
}

fn unquote(s: &str, line: usize) -> Result<String, RuleFileError> {
    if let Some(inner) = s.strip_prefix('"') {
        let inner = inner
            .strip_suffix('"')
            .ok_or_else(|| RuleFileError::new(line, "unterminated quote"))?;
        if inner.is_empty() {
            return Err(RuleFileError::new(line, "empty entry"));
        }
        return Ok(inner.to_owned());
    }
    if s.is_empty() {
        return Err(RuleFileError::new(line, "empty entry"));
    }
    Ok(s.to_owned())
}

fn quote(s: &str) -> String {
    let needs = s.starts_with('#')
        || s.starts_with('"')
        || s.contains("->")
        || s.chars()
            .any(|c| c.is_whitespace() || matches!(c, ',' | '[' | ']'));
    if needs {
        format!("\"{s}\"")
    } else {
        s.to_owned()
    }
}
