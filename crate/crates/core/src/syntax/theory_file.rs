//! Parser for `.lthy` theory files.
//!
//! ```text
//! theory Nat imports Base
//! const Zero :: ind
//! axiom ax: "…"
//! definition one: "one = Suc Zero"
//! theorem t: "…"
//!   apply (rule conjI, assumption | taut)
//! qed
//! ```

use std::collections::HashSet;
use std::fmt;

use super::lexer::{tokenize, Tok};
use super::parser::{Parser, PreType};
use super::{ParseError, Pos, SyntaxTable};

const KEYWORDS: &[&str] = &[
    "theory", "imports", "type", "const", "definition", "axiom", "theorem", "lemma", "apply", "qed",
];

/// A tactic expression from an `apply` command. Rule and theorem names are
/// resolved when the script runs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TacticExpr {
    Rule(String),
    ERule(String),
    Assumption,
    Simp(Vec<String>),
    Taut,
    Blast(Option<u32>),
    Then(Box<TacticExpr>, Box<TacticExpr>),
    OrElse(Box<TacticExpr>, Box<TacticExpr>),
    Repeat(Box<TacticExpr>),
    Try(Box<TacticExpr>),
    AllGoals(Box<TacticExpr>),
}

impl fmt::Display for TacticExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TacticExpr::Rule(r) => write!(f, "rule {r}"),
            TacticExpr::ERule(r) => write!(f, "erule {r}"),
            TacticExpr::Assumption => f.write_str("assumption"),
            TacticExpr::Simp(rs) if rs.is_empty() => f.write_str("simp"),
            TacticExpr::Simp(rs) => write!(f, "simp add: {}", rs.join(" ")),
            TacticExpr::Taut => f.write_str("taut"),
            TacticExpr::Blast(None) => f.write_str("blast"),
            TacticExpr::Blast(Some(d)) => write!(f, "blast {d}"),
            TacticExpr::Then(a, b) => write!(f, "({a}, {b})"),
            TacticExpr::OrElse(a, b) => write!(f, "({a} | {b})"),
            TacticExpr::Repeat(t) => write!(f, "repeat({t})"),
            TacticExpr::Try(t) => write!(f, "try({t})"),
            TacticExpr::AllGoals(t) => write!(f, "all_goals({t})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Type { arity: usize },
    Const { ty: PreType },
    Definition { text: String, text_pos: Pos },
    Axiom { text: String, text_pos: Pos },
    Theorem { text: String, text_pos: Pos, script: Vec<(TacticExpr, Pos)> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub pos: Pos,
    pub kind: DeclKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoryFile {
    pub name: String,
    pub imports: Vec<String>,
    pub decls: Vec<Decl>,
}

/// Position of the first character inside a string literal token.
fn inner_pos(p: Pos) -> Pos {
    Pos { line: p.line, col: p.col + 1 }
}

fn is_kw(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Ident(s) if s == kw)
}

pub fn parse_theory(text: &str) -> Result<TheoryFile, ParseError> {
    let table = SyntaxTable::default();
    let toks = tokenize(text, Pos::START)?;
    let mut p = Parser::new(toks, &table).with_stop_words(KEYWORDS);
    if !is_kw(p.peek(), "theory") {
        return Err(ParseError::new(p.pos(), "missing theory header"));
    }
    p.bump();
    let (name, _) = p.expect_ident()?;
    let mut imports = Vec::new();
    if is_kw(p.peek(), "imports") {
        p.bump();
        while matches!(p.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            imports.push(p.expect_ident()?.0);
        }
        if imports.is_empty() {
            return Err(p.unexpected("a theory name after `imports`"));
        }
    }
    let mut decls = Vec::new();
    let mut facts: HashSet<String> = HashSet::new();
    while *p.peek() != Tok::Eof {
        let pos = p.pos();
        let Tok::Ident(kw) = p.peek().clone() else {
            return Err(p.unexpected("a declaration"));
        };
        p.bump();
        let (dname, npos) = p.expect_ident()?;
        let kind = match kw.as_str() {
            "type" => match p.bump().tok {
                Tok::Num(n) => DeclKind::Type { arity: n as usize },
                _ => return Err(ParseError::new(p.pos(), "expected the arity of the type")),
            },
            "const" => {
                p.expect(&Tok::ColonColon)?;
                let ty = if let Tok::Str(s) = p.peek().clone() {
                    let spos = inner_pos(p.pos());
                    p.bump();
                    let mut q = Parser::new(tokenize(&s, spos)?, &table);
                    let ty = q.parse_type()?;
                    q.expect_eof()?;
                    ty
                } else {
                    p.parse_type()?
                };
                DeclKind::Const { ty }
            }
            "definition" | "axiom" | "theorem" | "lemma" => {
                p.expect(&Tok::Colon)?;
                let spos = inner_pos(p.pos());
                let Tok::Str(text) = p.bump().tok else {
                    return Err(ParseError::new(spos, "expected a quoted formula"));
                };
                if !facts.insert(dname.clone()) {
                    let what = if kw == "lemma" { "theorem" } else { kw.as_str() };
                    return Err(ParseError::new(npos, format!("duplicate {what} name {dname}")));
                }
                match kw.as_str() {
                    "definition" => DeclKind::Definition { text, text_pos: spos },
                    "axiom" => DeclKind::Axiom { text, text_pos: spos },
                    _ => {
                        let mut script = Vec::new();
                        while is_kw(p.peek(), "apply") {
                            p.bump();
                            let tpos = p.pos();
                            script.push((parse_tactic(&mut p)?, tpos));
                        }
                        if !is_kw(p.peek(), "qed") {
                            return Err(p.unexpected("`apply` or `qed`"));
                        }
                        p.bump();
                        DeclKind::Theorem { text, text_pos: spos, script }
                    }
                }
            }
            other => {
                return Err(ParseError::new(pos, format!("unknown declaration keyword `{other}`")));
            }
        };
        decls.push(Decl { name: dname, pos, kind });
    }
    Ok(TheoryFile { name, imports, decls })
}

/// Parses a standalone tactic expression such as `rule conjI, assumption`.
pub fn parse_tactic_expr(text: &str) -> Result<TacticExpr, ParseError> {
    let table = SyntaxTable::default();
    let mut p = Parser::new(tokenize(text, Pos::START)?, &table).with_stop_words(KEYWORDS);
    let t = parse_tactic(&mut p)?;
    p.expect_eof()?;
    Ok(t)
}

fn parse_tactic(p: &mut Parser) -> Result<TacticExpr, ParseError> {
    let mut t = parse_seq(p)?;
    while matches!(p.peek(), Tok::Op(s) if s == "|" || s == "∨") {
        p.bump();
        let r = parse_seq(p)?;
        t = TacticExpr::OrElse(Box::new(t), Box::new(r));
    }
    Ok(t)
}

fn parse_seq(p: &mut Parser) -> Result<TacticExpr, ParseError> {
    let mut t = parse_tactic_atom(p)?;
    while p.eat(&Tok::Comma) {
        let r = parse_tactic_atom(p)?;
        t = TacticExpr::Then(Box::new(t), Box::new(r));
    }
    Ok(t)
}

fn parenthesized(p: &mut Parser) -> Result<TacticExpr, ParseError> {
    p.expect(&Tok::LParen)?;
    let t = parse_tactic(p)?;
    p.expect(&Tok::RParen)?;
    Ok(t)
}

fn parse_tactic_atom(p: &mut Parser) -> Result<TacticExpr, ParseError> {
    if *p.peek() == Tok::LParen {
        return parenthesized(p);
    }
    let pos = p.pos();
    let Tok::Ident(word) = p.peek().clone() else {
        return Err(p.unexpected("a tactic"));
    };
    p.bump();
    Ok(match word.as_str() {
        "rule" => TacticExpr::Rule(p.expect_ident()?.0),
        "erule" => TacticExpr::ERule(p.expect_ident()?.0),
        "assumption" => TacticExpr::Assumption,
        "taut" => TacticExpr::Taut,
        "blast" => match p.peek() {
            Tok::Num(n) => {
                let d = u32::try_from(*n).map_err(|_| ParseError::new(p.pos(), "blast depth too large"))?;
                p.bump();
                TacticExpr::Blast(Some(d))
            }
            _ => TacticExpr::Blast(None),
        },
        "simp" => {
            let bracketed = p.eat(&Tok::LBracket);
            let mut names = Vec::new();
            if is_kw(p.peek(), "add") && *p.peek_at(1) == Tok::Colon {
                p.bump();
                p.bump();
                while matches!(p.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
                    names.push(p.expect_ident()?.0);
                }
                if names.is_empty() {
                    return Err(p.unexpected("a rule name after `add:`"));
                }
            }
            if bracketed {
                p.expect(&Tok::RBracket)?;
            }
            TacticExpr::Simp(names)
        }
        "repeat" => TacticExpr::Repeat(Box::new(parenthesized(p)?)),
        "try" => TacticExpr::Try(Box::new(parenthesized(p)?)),
        "all_goals" => TacticExpr::AllGoals(Box::new(parenthesized(p)?)),
        other => return Err(ParseError::new(pos, format!("unknown tactic `{other}`"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_needs_header() {
        let e = parse_theory("").unwrap_err();
        assert_eq!(e.msg, "missing theory header");
        let e = parse_theory("-- just a comment\n").unwrap_err();
        assert_eq!(e.msg, "missing theory header");
    }

    #[test]
    fn declarations_and_scripts() {
        let src = r#"theory T imports Base Classical
type nat 0
const z :: nat
const s :: "nat ⇒ nat"
axiom ax: "s z = z"
definition c: "c = z"
theorem t: "p → p"
  apply (rule impI, assumption)
qed
"#;
        let f = parse_theory(src).unwrap();
        assert_eq!(f.name, "T");
        assert_eq!(f.imports, vec!["Base", "Classical"]);
        assert_eq!(f.decls.len(), 6);
        let DeclKind::Theorem { script, text_pos, .. } = &f.decls[5].kind else { panic!() };
        assert_eq!(*text_pos, Pos { line: 7, col: 13 });
        assert_eq!(
            script[0].0,
            TacticExpr::Then(Box::new(TacticExpr::Rule("impI".into())), Box::new(TacticExpr::Assumption))
        );
    }

    #[test]
    fn tactic_precedence_and_combinators() {
        let src = "theory T\ntheorem t: \"p\"\n apply (repeat(rule conjI) | try(taut), simp [add: a b])\n apply blast 3\nqed";
        let f = parse_theory(src).unwrap();
        let DeclKind::Theorem { script, .. } = &f.decls[0].kind else { panic!() };
        assert_eq!(script[0].0.to_string(), "(repeat(rule conjI) | (try(taut), simp add: a b))");
        assert_eq!(script[1].0, TacticExpr::Blast(Some(3)));
    }

    #[test]
    fn duplicate_theorem_names_are_rejected() {
        let src = "theory T\ntheorem t: \"p\" qed\ntheorem t: \"q\" qed";
        let e = parse_theory(src).unwrap_err();
        assert!(e.msg.contains("duplicate theorem name t"), "{}", e.msg);
        assert_eq!(e.pos.line, 3);
    }

    #[test]
    fn syntax_errors_are_positioned() {
        let e = parse_theory("theory T\nconst c ind").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 9));
    }
}
