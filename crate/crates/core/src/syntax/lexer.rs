use std::fmt;

use super::{ParseError, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `'a`
    TyVar(String),
    /// `?x` or `?x.3`
    Schematic(String, u32),
    /// `?'a` or `?'a.3`
    SchemTyVar(String, u32),
    Num(u64),
    Str(String),
    /// Infix operator symbol, resolved through the syntax table.
    Op(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    ColonColon,
    Arrow,
    Not,
    All,
    Ex,
    Lambda,
    Bot,
    Top,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::TyVar(s) => write!(f, "type variable `'{s}`"),
            Tok::Schematic(s, _) => write!(f, "schematic `?{s}`"),
            Tok::SchemTyVar(s, _) => write!(f, "schematic type `?'{s}`"),
            Tok::Num(n) => write!(f, "number {n}"),
            Tok::Str(_) => f.write_str("string literal"),
            Tok::Op(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
            other => {
                let s = match other {
                    Tok::LParen => "(",
                    Tok::RParen => ")",
                    Tok::LBracket => "[",
                    Tok::RBracket => "]",
                    Tok::Comma => ",",
                    Tok::Dot => ".",
                    Tok::Colon => ":",
                    Tok::ColonColon => "::",
                    Tok::Arrow => "⇒",
                    Tok::Not => "¬",
                    Tok::All => "∀",
                    Tok::Ex => "∃",
                    Tok::Lambda => "λ",
                    Tok::Bot => "⊥",
                    Tok::Top => "⊤",
                    _ => unreachable!(),
                };
                write!(f, "`{s}`")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

const UNICODE_OPS: &str = "∧∨→↔⟶⟷≤≥∘·×";
const ASCII_OP_START: &str = "&|+-*/<>^@!#$\\";

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && !matches!(c, 'λ')
}

fn is_ident_char(c: char) -> bool {
    (c.is_alphanumeric() && !matches!(c, 'λ')) || c == '_' || c == '\''
}

/// Splits `src` into tokens. `start` is the position of the first character,
/// so text embedded in a larger file reports file positions.
pub fn tokenize(src: &str, start: Pos) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut pos = start;
    let advance = |i: &mut usize, pos: &mut Pos, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                pos.line += 1;
                pos.col = 1;
            } else {
                pos.col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut pos, 1);
            continue;
        }
        // `--` starts a comment unless it begins `-->`.
        if c == '-' && chars.get(i + 1) == Some(&'-') && chars.get(i + 2) != Some(&'>') {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut pos, 1);
            }
            continue;
        }
        let here = pos;
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        let sym2 = [("=>", Tok::Arrow), ("::", Tok::ColonColon)];
        if let Some((s, t)) = sym2.iter().find(|(s, _)| rest.starts_with(s)) {
            out.push(Token { tok: t.clone(), pos: here });
            advance(&mut i, &mut pos, s.chars().count());
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            '.' => Some(Tok::Dot),
            ':' => Some(Tok::Colon),
            '⇒' => Some(Tok::Arrow),
            '¬' | '~' => Some(Tok::Not),
            '=' => Some(Tok::Op("=".into())),
            c if UNICODE_OPS.contains(c) => Some(Tok::Op(c.to_string())),
            '∀' => Some(Tok::All),
            '∃' => Some(Tok::Ex),
            'λ' | '%' => Some(Tok::Lambda),
            '⊥' => Some(Tok::Bot),
            '⊤' => Some(Tok::Top),
            _ => None,
        };
        if let Some(t) = single {
            out.push(Token { tok: t, pos: here });
            advance(&mut i, &mut pos, 1);
            continue;
        }
        if ASCII_OP_START.contains(c) {
            let mut j = i + 1;
            while j < chars.len() && (ASCII_OP_START.contains(chars[j]) || chars[j] == '=') {
                j += 1;
            }
            out.push(Token { tok: Tok::Op(chars[i..j].iter().collect()), pos: here });
            let n = j - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            let mut s = String::new();
            while j < chars.len() && chars[j] != '"' {
                s.push(chars[j]);
                j += 1;
            }
            if j >= chars.len() {
                return Err(ParseError::new(here, "unterminated string literal"));
            }
            out.push(Token { tok: Tok::Str(s), pos: here });
            let n = j + 1 - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let text: String = chars[i..j].iter().collect();
            let n = text
                .parse()
                .map_err(|_| ParseError::new(here, format!("number {text} is too large")))?;
            out.push(Token { tok: Tok::Num(n), pos: here });
            let n = j - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        if c == '\'' || (c == '?' && chars.get(i + 1) == Some(&'\'')) {
            let schem = c == '?';
            let mut j = i + if schem { 2 } else { 1 };
            if j >= chars.len() || !is_ident_start(chars[j]) {
                return Err(ParseError::new(here, "expected a type variable name"));
            }
            let s0 = j;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                j += 1;
            }
            let name: String = chars[s0..j].iter().collect();
            let (idx, j) = if schem { lex_index(&chars, j) } else { (0, j) };
            out.push(Token {
                tok: if schem { Tok::SchemTyVar(name, idx) } else { Tok::TyVar(name) },
                pos: here,
            });
            let n = j - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        if c == '?' {
            let mut j = i + 1;
            if j >= chars.len() || !is_ident_start(chars[j]) {
                return Err(ParseError::new(here, "expected a schematic variable name after `?`"));
            }
            let s0 = j;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let name: String = chars[s0..j].iter().collect();
            let (idx, j) = lex_index(&chars, j);
            out.push(Token { tok: Tok::Schematic(name, idx), pos: here });
            let n = j - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        if is_ident_start(c) || c == '_' {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let name: String = chars[i..j].iter().collect();
            let tok = match name.as_str() {
                "ALL" => Tok::All,
                "EX" => Tok::Ex,
                _ => Tok::Ident(name),
            };
            out.push(Token { tok, pos: here });
            let n = j - i;
            advance(&mut i, &mut pos, n);
            continue;
        }
        return Err(ParseError::new(here, format!("unexpected character `{c}`")));
    }
    out.push(Token { tok: Tok::Eof, pos });
    Ok(out)
}

/// Parses an optional `.digits` suffix; a dot not followed by a digit is left alone.
fn lex_index(chars: &[char], j: usize) -> (u32, usize) {
    if chars.get(j) == Some(&'.') && chars.get(j + 1).is_some_and(|c| c.is_ascii_digit()) {
        let mut k = j + 1;
        while k < chars.len() && chars[k].is_ascii_digit() {
            k += 1;
        }
        let text: String = chars[j + 1..k].iter().collect();
        if let Ok(n) = text.parse() {
            return (n, k);
        }
    }
    (0, j)
}
