use super::{Action, FeatureValue, Pattern, Phase, Rule, RuleError, TokenTest};
use crate::annotate::{Orth, TokenKind};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Lexed {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: [&str; 16] = [
    "->", "==", ";", ":", "{", "}", "(", ")", "|", "?", "*", "+", "#", ",", "$", "=",
];

fn lex(src: &str) -> Result<Vec<Lexed>, RuleError> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.char_indices().peekable();
    let err = |line, column, message: String| RuleError::Syntax {
        line,
        column,
        message,
    };
    while let Some(&(i, c)) = chars.peek() {
        let (tl, tc) = (line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        if src[i..].starts_with("//") {
            while let Some(&(_, c)) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
            continue;
        }
        if c == '"' {
            chars.next();
            col += 1;
            let mut s = String::new();
            loop {
                match chars.next() {
                    None | Some((_, '\n')) => {
                        return Err(err(tl, tc, "unterminated string literal".into()))
                    }
                    Some((_, '"')) => {
                        col += 1;
                        break;
                    }
                    Some((_, '\\')) => {
                        col += 2;
                        match chars.next() {
                            Some((_, e @ ('"' | '\\'))) => s.push(e),
                            Some((_, 'n')) => s.push('\n'),
                            _ => return Err(err(tl, tc, "bad escape in string literal".into())),
                        }
                    }
                    Some((_, ch)) => {
                        col += 1;
                        s.push(ch);
                    }
                }
            }
            out.push(Lexed {
                tok: Tok::Str(s),
                line: tl,
                column: tc,
            });
            continue;
        }
        let negative_int = c == '-' && src[i + 1..].starts_with(|d: char| d.is_ascii_digit());
        if c.is_ascii_digit() || negative_int {
            let mut end = i + 1;
            chars.next();
            while let Some(&(j, d)) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                end = j + 1;
                chars.next();
            }
            col += end - i;
            let v = src[i..end]
                .parse::<i64>()
                .map_err(|e| err(tl, tc, format!("bad integer: {e}")))?;
            out.push(Lexed {
                tok: Tok::Int(v),
                line: tl,
                column: tc,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let mut end = i + c.len_utf8();
            chars.next();
            while let Some(&(j, d)) = chars.peek() {
                if !(d.is_alphanumeric() || d == '_' || d == '.') {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            col += src[i..end].chars().count();
            out.push(Lexed {
                tok: Tok::Ident(src[i..end].to_owned()),
                line: tl,
                column: tc,
            });
            continue;
        }
        let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) else {
            return Err(err(tl, tc, format!("unexpected character `{c}`")));
        };
        for _ in 0..sym.len() {
            chars.next();
        }
        col += sym.len();
        out.push(Lexed {
            tok: Tok::Sym(sym),
            line: tl,
            column: tc,
        });
    }
    out.push(Lexed {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> RuleError {
        let at = &self.toks[self.pos];
        RuleError::Syntax {
            line: at.line,
            column: at.column,
            message: message.into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<(), RuleError> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`, found {:?}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<String, RuleError> {
        match self.peek() {
            Tok::Ident(_) => match self.next() {
                Tok::Ident(s) => Ok(s),
                _ => unreachable!(),
            },
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), RuleError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.next();
                Ok(())
            }
            other => Err(self.error(format!("expected `{kw}`, found {other:?}"))),
        }
    }

    fn phase(&mut self) -> Result<Phase, RuleError> {
        self.keyword("phase")?;
        let name = self.ident()?;
        self.expect_sym(";")?;
        let mut rules = Vec::new();
        while *self.peek() != Tok::Eof {
            rules.push(self.rule()?);
        }
        Phase::new(name, rules)
    }

    fn rule(&mut self) -> Result<Rule, RuleError> {
        self.keyword("rule")?;
        let name = self.ident()?;
        self.keyword("priority")?;
        let priority = match self.next() {
            Tok::Int(v) => v,
            other => return Err(self.error(format!("expected priority integer, found {other:?}"))),
        };
        self.expect_sym(":")?;
        if self.is_sym("->") {
            return Err(RuleError::EmptyPattern(name));
        }
        let lhs = self.alternatives()?;
        self.expect_sym("->")?;
        let mut rhs = vec![self.action()?];
        while self.is_sym(",") {
            self.next();
            rhs.push(self.action()?);
        }
        self.expect_sym(";")?;
        Ok(Rule {
            name,
            priority,
            lhs,
            rhs,
        })
    }

    fn alternatives(&mut self) -> Result<Pattern, RuleError> {
        let mut alts = vec![self.sequence()?];
        while self.is_sym("|") {
            self.next();
            alts.push(self.sequence()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Pattern::Alt(alts)
        })
    }

    fn sequence(&mut self) -> Result<Pattern, RuleError> {
        let mut items = Vec::new();
        while !(self.is_sym("|") || self.is_sym(")") || self.is_sym("->") || *self.peek() == Tok::Eof) {
            items.push(self.item()?);
        }
        match items.len() {
            0 => Err(self.error("empty pattern")),
            1 => Ok(items.pop().unwrap()),
            _ => Ok(Pattern::Seq(items)),
        }
    }

    fn item(&mut self) -> Result<Pattern, RuleError> {
        let mut p = self.atom()?;
        let quant = match self.peek() {
            Tok::Sym("?") => Some((0, Some(1))),
            Tok::Sym("*") => Some((0, None)),
            Tok::Sym("+") => Some((1, None)),
            _ => None,
        };
        if let Some((min, max)) = quant {
            self.next();
            p = Pattern::Repeat {
                inner: Box::new(p),
                min,
                max,
            };
        }
        if self.is_sym("#") {
            self.next();
            let name = self.ident()?;
            p = Pattern::Bind {
                inner: Box::new(p),
                name,
            };
        }
        Ok(p)
    }

    fn atom(&mut self) -> Result<Pattern, RuleError> {
        match self.peek().clone() {
            Tok::Sym("(") => {
                self.next();
                let p = self.alternatives()?;
                self.expect_sym(")")?;
                Ok(p)
            }
            Tok::Sym("{") => {
                self.next();
                let p = self.constraints()?;
                self.expect_sym("}")?;
                Ok(p)
            }
            Tok::Str(s) => {
                self.next();
                Ok(Pattern::Token(vec![TokenTest::Surface(s)]))
            }
            other => Err(self.error(format!("expected pattern element, found {other:?}"))),
        }
    }

    fn value(&mut self) -> Result<String, RuleError> {
        match self.next() {
            Tok::Str(s) | Tok::Ident(s) => Ok(s),
            Tok::Int(v) => Ok(v.to_string()),
            other => Err(self.error(format!("expected value, found {other:?}"))),
        }
    }

    fn constraints(&mut self) -> Result<Pattern, RuleError> {
        let first = self.ident()?;
        if first == "ann" && self.is_sym(":") {
            self.next();
            let ann_type = self.ident()?;
            let mut features = Vec::new();
            while self.is_sym(",") {
                self.next();
                let key = self.ident()?;
                self.expect_sym("==")?;
                features.push((key, self.value()?));
            }
            return Ok(Pattern::Annotation { ann_type, features });
        }
        let mut tests = Vec::new();
        let mut key = first;
        loop {
            let kind = match key.as_str() {
                "Word" => Some(Some(TokenKind::Word)),
                "Number" => Some(Some(TokenKind::Number)),
                "Punct" => Some(Some(TokenKind::Punct)),
                "Token" => Some(None),
                _ => None,
            };
            if self.is_sym("==") {
                self.next();
                let v = self.value()?;
                match (key.as_str(), kind) {
                    (_, Some(k)) => {
                        tests.extend(k.map(TokenTest::Kind));
                        tests.push(TokenTest::Surface(v));
                    }
                    ("kind", None) => tests.push(TokenTest::Kind(parse_kind(&v).ok_or_else(|| {
                        self.error(format!("unknown token kind `{v}`"))
                    })?)),
                    ("orth", None) => tests.push(TokenTest::Orth(parse_orth(&v).ok_or_else(|| {
                        self.error(format!("unknown orth value `{v}`"))
                    })?)),
                    ("string", None) => tests.push(TokenTest::Surface(v)),
                    (other, None) => return Err(self.error(format!("unknown token attribute `{other}`"))),
                }
            } else {
                match kind {
                    Some(k) => tests.extend(k.map(TokenTest::Kind)),
                    None => return Err(self.error(format!("`{key}` needs `==` and a value"))),
                }
            }
            if !self.is_sym(",") {
                break;
            }
            self.next();
            key = self.ident()?;
        }
        Ok(Pattern::Token(tests))
    }

    fn action(&mut self) -> Result<Action, RuleError> {
        let mut target = None;
        if self.is_sym("$") {
            self.next();
            target = Some(self.ident()?);
            self.expect_sym(":")?;
        }
        let ann_type = self.ident()?;
        self.expect_sym("{")?;
        let mut features = Vec::new();
        while !self.is_sym("}") {
            let key = self.ident()?;
            self.expect_sym("=")?;
            let value = if self.is_sym("$") {
                self.next();
                FeatureValue::Binding(self.ident()?)
            } else {
                FeatureValue::Literal(self.value()?)
            };
            features.push((key, value));
            if !self.is_sym(",") {
                break;
            }
            self.next();
        }
        self.expect_sym("}")?;
        Ok(Action {
            ann_type,
            target,
            features,
        })
    }
}

fn parse_kind(s: &str) -> Option<TokenKind> {
    match s {
        "Word" => Some(TokenKind::Word),
        "Number" => Some(TokenKind::Number),
        "Punct" => Some(TokenKind::Punct),
        "Space" => Some(TokenKind::Space),
        _ => None,
    }
}

fn parse_orth(s: &str) -> Option<Orth> {
    match s {
        "Lower" => Some(Orth::Lower),
        "Upper" => Some(Orth::Upper),
        "Capitalized" => Some(Orth::Capitalized),
        "Mixed" => Some(Orth::Mixed),
        "NA" => Some(Orth::NA),
        _ => None,
    }
}

/// Parses a phase file. Binding and naming errors are reported here, before
/// any document is processed.
pub fn parse_phase(src: &str) -> Result<Phase, RuleError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0 };
    p.phase()
}
