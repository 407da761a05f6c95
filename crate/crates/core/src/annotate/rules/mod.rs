//! Pattern rules over token and annotation streams.
//!
//! A phase file holds one phase:
//!
//! ```text
//! phase StandardReferences;
//! // comments run to end of line
//! rule StandardRef priority 10:
//!   (({Word=="ISO"} | {Word=="IEC"}) ("/" {Word, orth==Upper})* {Number} ("-" {Number})?)#ref
//!   -> Reference{standard_ref=$ref, origin="rule"};
//! ```
//!
//! Left-hand sides match over content tokens (whitespace is skipped). Token
//! constraints are `{Word}`, `{Number}`, `{Punct}`, `{Token}` optionally with
//! `=="surface"`, plus `kind==`, `orth==` and `string==` tests; a bare string
//! literal matches a token surface. `{ann:Type, feature=="v"}` matches an
//! existing annotation starting at the current token and consumes the tokens
//! it covers. Groups `(...)` take `|` alternatives, the quantifiers `? * +`
//! and a binding `#name`. The right-hand side is a comma-separated list of
//! `Type{feature=value}` actions, where a value is a literal or `$binding`
//! (the bound text); `$binding:Type{...}` annotates the bound span instead
//! of the whole match.

mod engine;
mod parse;

use std::collections::BTreeSet;

use thiserror::Error;

use super::{Orth, TokenKind};

pub use engine::run_phase;
pub(crate) use engine::run_phase_on_tokens as engine_run_on_tokens;
pub use parse::parse_phase;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RuleError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate rule `{0}` in phase")]
    DuplicateRule(String),
    #[error("rule `{rule}`: right-hand side references unbound `${binding}`")]
    UnboundBinding { rule: String, binding: String },
    #[error("rule `{0}` has an empty pattern")]
    EmptyPattern(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenTest {
    Kind(TokenKind),
    Orth(Orth),
    Surface(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Pattern {
    /// All tests must hold on one token.
    Token(Vec<TokenTest>),
    /// An existing annotation of `ann_type` with the given feature values.
    Annotation {
        ann_type: String,
        features: Vec<(String, String)>,
    },
    Seq(Vec<Pattern>),
    Alt(Vec<Pattern>),
    Repeat {
        inner: Box<Pattern>,
        min: usize,
        max: Option<usize>,
    },
    Bind {
        inner: Box<Pattern>,
        name: String,
    },
}

impl Pattern {
    fn collect_bindings(&self, out: &mut BTreeSet<String>) {
        match self {
            Pattern::Token(_) | Pattern::Annotation { .. } => {}
            Pattern::Seq(items) | Pattern::Alt(items) => {
                items.iter().for_each(|p| p.collect_bindings(out))
            }
            Pattern::Repeat { inner, .. } => inner.collect_bindings(out),
            Pattern::Bind { inner, name } => {
                out.insert(name.clone());
                inner.collect_bindings(out);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeatureValue {
    Literal(String),
    Binding(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub ann_type: String,
    /// Annotate this binding's span instead of the whole match.
    pub target: Option<String>,
    pub features: Vec<(String, FeatureValue)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub priority: i64,
    pub lhs: Pattern,
    pub rhs: Vec<Action>,
}

impl Rule {
    fn validate(&self) -> Result<(), RuleError> {
        if matches!(&self.lhs, Pattern::Seq(v) | Pattern::Alt(v) if v.is_empty()) {
            return Err(RuleError::EmptyPattern(self.name.clone()));
        }
        let mut bound = BTreeSet::new();
        self.lhs.collect_bindings(&mut bound);
        for action in &self.rhs {
            let refs = action.target.iter().chain(action.features.iter().filter_map(|(_, v)| match v {
                FeatureValue::Binding(b) => Some(b),
                FeatureValue::Literal(_) => None,
            }));
            for b in refs {
                if !bound.contains(b) {
                    return Err(RuleError::UnboundBinding {
                        rule: self.name.clone(),
                        binding: b.clone(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// A named set of rules applied with longest-match control.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phase {
    name: String,
    rules: Vec<Rule>,
}

impl Phase {
    pub fn new(name: impl Into<String>, rules: Vec<Rule>) -> Result<Phase, RuleError> {
        let mut names = BTreeSet::new();
        for r in &rules {
            if !names.insert(r.name.as_str()) {
                return Err(RuleError::DuplicateRule(r.name.clone()));
            }
            r.validate()?;
        }
        Ok(Phase {
            name: name.into(),
            rules,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }
}

/// Built-in phase recognizing standard references such as `ISO 15531-44`
/// or `ISO/TS 16668`.
pub const STANDARD_REFERENCE_RULES: &str = r#"phase StandardReferences;
rule StandardRef priority 10:
  (({Word=="ISO"} | {Word=="IEC"} | {Word=="CEN"} | {Word=="EN"})
   ("/" {Word, orth==Upper})* {Number} ("-" {Number})?)#ref
  -> Reference{standard_ref=$ref};
"#;

pub fn standard_reference_phase() -> Phase {
    parse_phase(STANDARD_REFERENCE_RULES).expect("built-in rules parse")
}
