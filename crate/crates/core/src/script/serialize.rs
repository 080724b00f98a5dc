use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use super::{EditAction, EditScript};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Format {
    Xml,
    Json,
    Text,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown script format `{0}` (expected xml, json or text)")]
pub struct ParseFormatError(String);

impl FromStr for Format {
    type Err = ParseFormatError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "xml" => Ok(Format::Xml),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(ParseFormatError(other.to_owned())),
        }
    }
}

/// Renders `script`. The output has no trailing newline.
///
/// XML wraps one `<kind>-node` element per action in `<actions>`:
///
/// ```text
/// <actions>
/// <update-node tree="visibility: public [37,43]" label="private"/>
/// <insert-node tree="function_definition [-1,-1]" parent="contract_body [23,240]" at="4"/>
/// </actions>
/// ```
///
/// JSON is an array of records with the fields `kind`, `nodeType`,
/// `oldLabel`, `span` (`[-1,-1]` for inserted nodes), `newLabel` (updates
/// only), `parent` and `position` (inserts and moves only).
pub fn serialize(script: &EditScript, format: Format) -> String {
    match format {
        Format::Xml => to_xml(script),
        Format::Json => to_json(script),
        Format::Text => script
            .actions
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("\n"),
    }
}

fn to_xml(script: &EditScript) -> String {
    let mut out = String::from("<actions>\n");
    for action in &script.actions {
        let tree = escape(&action.subject().to_string());
        match action {
            EditAction::Update { new_label, .. } => {
                let _ = writeln!(
                    out,
                    "<update-node tree=\"{tree}\" label=\"{}\"/>",
                    escape(new_label)
                );
            }
            EditAction::Delete { .. } => {
                let _ = writeln!(out, "<delete-node tree=\"{tree}\"/>");
            }
            EditAction::Insert {
                parent_desc,
                position,
                ..
            } => {
                let parent = escape(&parent_desc.to_string());
                let _ = writeln!(
                    out,
                    "<insert-node tree=\"{tree}\" parent=\"{parent}\" at=\"{position}\"/>"
                );
            }
            EditAction::Move {
                parent_desc,
                position,
                ..
            } => {
                let parent = escape(&parent_desc.to_string());
                let _ = writeln!(
                    out,
                    "<move-node tree=\"{tree}\" parent=\"{parent}\" at=\"{position}\"/>"
                );
            }
        }
    }
    out.push_str("</actions>");
    out
}

// Attribute-safe escaping; whitespace control characters are written as
// character references so attribute normalization cannot alter them.
fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\r' => out.push_str("&#13;"),
            '\t' => out.push_str("&#9;"),
            c => out.push(c),
        }
    }
    out
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct Record {
    kind: &'static str,
    node_type: String,
    old_label: String,
    span: [i64; 2],
    new_label: Option<String>,
    parent: Option<String>,
    position: Option<usize>,
}

fn to_json(script: &EditScript) -> String {
    let records: Vec<Record> = script
        .actions
        .iter()
        .map(|action| {
            let subject = action.subject();
            let span = subject
                .span
                .map_or([-1, -1], |s| [s.start as i64, s.end as i64]);
            let (new_label, parent, position) = match action {
                EditAction::Update { new_label, .. } => (Some(new_label.clone()), None, None),
                EditAction::Delete { .. } => (None, None, None),
                EditAction::Insert {
                    parent_desc,
                    position,
                    ..
                }
                | EditAction::Move {
                    parent_desc,
                    position,
                    ..
                } => (None, Some(parent_desc.to_string()), Some(*position)),
            };
            Record {
                kind: action.kind().as_str(),
                node_type: subject.kind,
                old_label: subject.label,
                span,
                new_label,
                parent,
                position,
            }
        })
        .collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}
