use std::fmt;

use thiserror::Error;
use tree_sitter::{Node as TsNode, Parser};

use crate::tree::{NodeSpec, SourceSpan, SyntaxTree};

/// Identifier of the bundled Solidity grammar.
pub const GRAMMAR_VERSION: &str = "tree-sitter-solidity 1.2.13";

/// A syntax error in the input, located at the earliest offending byte.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message} (byte {position})")]
pub struct ParseError {
    /// Byte offset of the earliest error.
    pub position: usize,
    /// 1-based line of `position`.
    pub line: usize,
    /// 1-based column (in bytes) of `position`.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn at(source: &str, position: usize, message: impl Into<String>) -> Self {
        let position = position.min(source.len());
        let before = &source.as_bytes()[..position];
        let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
        let column = position
            - before
                .iter()
                .rposition(|&b| b == b'\n')
                .map_or(0, |i| i + 1)
            + 1;
        ParseError {
            position,
            line,
            column,
            message: message.into(),
        }
    }
}

/// Source text to concrete syntax tree.
///
/// Implementations own their parser state and are not shared between
/// threads; each worker constructs its own.
pub trait ParserAdapter {
    fn grammar_version(&self) -> &str;

    fn parse(&mut self, source: &str) -> Result<SyntaxTree, ParseError>;
}

/// Tree-sitter backed Solidity parser.
pub struct SolidityParser {
    parser: Parser,
}

impl SolidityParser {
    pub fn new() -> Self {
        let mut parser = Parser::new();
        parser
            .set_language(&tree_sitter_solidity::LANGUAGE.into())
            .expect("bundled Solidity grammar is ABI compatible with tree-sitter");
        SolidityParser { parser }
    }
}

impl Default for SolidityParser {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for SolidityParser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SolidityParser")
            .field("grammar", &GRAMMAR_VERSION)
            .finish()
    }
}

impl ParserAdapter for SolidityParser {
    fn grammar_version(&self) -> &str {
        GRAMMAR_VERSION
    }

    fn parse(&mut self, source: &str) -> Result<SyntaxTree, ParseError> {
        let ts = self
            .parser
            .parse(source, None)
            .ok_or_else(|| ParseError::at(source, 0, "parser produced no tree"))?;
        let root = ts.root_node();
        if root.has_error() {
            return Err(first_error(root, source));
        }
        Ok(SyntaxTree::from_spec(source, convert(root, source)))
    }
}

/// Parses `source` with a fresh [`SolidityParser`].
pub fn parse_solidity(source: &str) -> Result<SyntaxTree, ParseError> {
    SolidityParser::new().parse(source)
}

fn convert(root: TsNode<'_>, source: &str) -> NodeSpec {
    fn spec_of(node: TsNode<'_>, source: &str) -> NodeSpec {
        let span = SourceSpan::new(node.start_byte(), node.end_byte());
        let label = if node.child_count() == 0 {
            source[span.start..span.end].to_owned()
        } else {
            String::new()
        };
        NodeSpec::new(node.kind(), label).with_span(span)
    }

    // Iterative walk; contracts with long expression chains nest deeply.
    let mut cursor = root.walk();
    let mut stack: Vec<NodeSpec> = vec![spec_of(root, source)];
    if !cursor.goto_first_child() {
        return stack.pop().unwrap();
    }
    loop {
        stack.push(spec_of(cursor.node(), source));
        if cursor.goto_first_child() {
            continue;
        }
        loop {
            let mut done = stack.pop().unwrap();
            fill_gaps(&mut done, source);
            stack.last_mut().unwrap().push(done);
            if cursor.goto_next_sibling() {
                break;
            }
            if !cursor.goto_parent() || stack.len() == 1 {
                let mut root = stack.pop().unwrap();
                fill_gaps(&mut root, source);
                return root;
            }
        }
    }
}

/// Kind of the leaves covering text the grammar leaves to no token, such as
/// the contents of a string literal.
pub const FRAGMENT_KIND: &str = "string_fragment";

// Gives uncovered non-blank text inside an inner node its own leaf.
fn fill_gaps(spec: &mut NodeSpec, source: &str) {
    let Some(span) = spec.span else { return };
    if spec.children.is_empty() {
        return;
    }
    let fragment = |start: usize, end: usize| {
        (start < end && !source[start..end].trim().is_empty()).then(|| {
            NodeSpec::new(FRAGMENT_KIND, &source[start..end]).with_span(SourceSpan::new(start, end))
        })
    };
    let mut out = Vec::with_capacity(spec.children.len() + 1);
    let mut pos = span.start;
    for child in spec.children.drain(..) {
        let cs = child.span.expect("parsed nodes have spans");
        out.extend(fragment(pos, cs.start));
        pos = pos.max(cs.end);
        out.push(child);
    }
    out.extend(fragment(pos, span.end));
    spec.children = out;
}

fn first_error(root: TsNode<'_>, source: &str) -> ParseError {
    let mut best: Option<(usize, String)> = None;
    let mut stack = vec![root];
    while let Some(node) = stack.pop() {
        if !node.has_error() {
            continue;
        }
        let found = if node.is_missing() {
            Some(format!("missing `{}`", node.kind()))
        } else if node.is_error() {
            let text = &source[node.start_byte()..node.end_byte()];
            let snippet: String = text.chars().take(24).collect();
            Some(if snippet.is_empty() {
                "unexpected end of input".to_owned()
            } else {
                format!("unexpected `{}`", snippet.replace('\n', " "))
            })
        } else {
            None
        };
        if let Some(msg) = found {
            if best
                .as_ref()
                .map_or(true, |(pos, _)| node.start_byte() < *pos)
            {
                best = Some((node.start_byte(), msg));
            }
        }
        let mut c = node.walk();
        stack.extend(node.children(&mut c));
    }
    let (pos, msg) = best.unwrap_or((0, "syntax error".to_owned()));
    ParseError::at(source, pos, msg)
}
