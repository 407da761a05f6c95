use serde::{Deserialize, Serialize};

use crate::span::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TokenKind {
    Word,
    Number,
    Punct,
    Space,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orth {
    Lower,
    Upper,
    Capitalized,
    Mixed,
    NA,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub span: Span,
    pub surface: String,
    pub kind: TokenKind,
    pub orth: Orth,
}

#[derive(Clone, Copy, PartialEq)]
enum Class {
    Letter,
    Digit,
    Space,
    Other,
}

fn class_of(c: char) -> Class {
    if c.is_alphabetic() {
        Class::Letter
    } else if c.is_numeric() {
        Class::Digit
    } else if c.is_whitespace() {
        Class::Space
    } else {
        Class::Other
    }
}

pub fn orth_of(word: &str) -> Orth {
    let cased: Vec<char> = word
        .chars()
        .filter(|c| c.is_uppercase() || c.is_lowercase())
        .collect();
    if cased.is_empty() {
        return Orth::NA;
    }
    if cased.iter().all(|c| c.is_lowercase()) {
        Orth::Lower
    } else if cased.iter().all(|c| c.is_uppercase()) {
        Orth::Upper
    } else if cased[0].is_uppercase() && cased[1..].iter().all(|c| c.is_lowercase()) {
        Orth::Capitalized
    } else {
        Orth::Mixed
    }
}

/// Splits `text` into maximal letter, digit and whitespace runs; any other
/// character is a one-character punctuation token. Tokens tile the input.
pub fn tokenize(text: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((start, c)) = chars.next() {
        let class = class_of(c);
        let mut end = start + c.len_utf8();
        if class != Class::Other {
            while let Some(&(i, n)) = chars.peek() {
                if class_of(n) != class {
                    break;
                }
                end = i + n.len_utf8();
                chars.next();
            }
        }
        let surface = &text[start..end];
        let (kind, orth) = match class {
            Class::Letter => (TokenKind::Word, orth_of(surface)),
            Class::Digit => (TokenKind::Number, Orth::NA),
            Class::Space => (TokenKind::Space, Orth::NA),
            Class::Other => (TokenKind::Punct, Orth::NA),
        };
        tokens.push(Token {
            span: Span::new(start, end),
            surface: surface.to_owned(),
            kind,
            orth,
        });
    }
    tokens
}

/// Tokens with whitespace removed; matching operates on this stream.
pub fn content_tokens(text: &str) -> Vec<Token> {
    tokenize(text)
        .into_iter()
        .filter(|t| t.kind != TokenKind::Space)
        .collect()
}
