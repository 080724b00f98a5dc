//! Solidity source to diff-optimized tree.

mod parser;
mod rules;
mod transform;

pub use parser::{
    parse_solidity, ParseError, ParserAdapter, SolidityParser, FRAGMENT_KIND, GRAMMAR_VERSION,
};
pub use rules::{default_solidity_rules, load_rules, RuleFileError, TransformRuleSet};
pub use transform::apply_transforms;

use crate::tree::SyntaxTree;

/// Parser plus rule set: the whole source-to-AST pipeline.
pub struct Frontend<P = SolidityParser> {
    parser: P,
    rules: TransformRuleSet,
}

impl Frontend<SolidityParser> {
    /// Solidity parser with the default rules.
    pub fn solidity() -> Self {
        Frontend::new(SolidityParser::new(), default_solidity_rules())
    }
}

impl<P: ParserAdapter> Frontend<P> {
    pub fn new(parser: P, rules: TransformRuleSet) -> Self {
        Frontend { parser, rules }
    }

    pub fn rules(&self) -> &TransformRuleSet {
        &self.rules
    }

    pub fn grammar_version(&self) -> &str {
        self.parser.grammar_version()
    }

    pub fn parse_concrete(&mut self, source: &str) -> Result<SyntaxTree, ParseError> {
        self.parser.parse(source)
    }

    pub fn parse(&mut self, source: &str) -> Result<SyntaxTree, ParseError> {
        let cst = self.parser.parse(source)?;
        Ok(apply_transforms(&cst, &self.rules))
    }
}
