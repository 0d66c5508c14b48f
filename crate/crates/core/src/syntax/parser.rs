use crate::term::logic;

use super::lexer::{Tok, Token};
use super::table::{Assoc, SyntaxTable, NOT_PREC};
use super::{ParseError, ParseErrorKind, Pos};

/// A type as written, before constructor names are checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreType {
    Var(String, Pos),
    Schematic(String, u32, Pos),
    Con(String, Vec<PreType>, Pos),
}

/// A term as written, before name resolution and type inference.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreTerm {
    /// Identifier: bound variable, constant or free variable.
    Ident(String, Pos),
    Schematic(String, u32, Pos),
    /// Constant named directly by notation (`⊤`, `(∧)`).
    Const(String, Pos),
    App(Box<PreTerm>, Box<PreTerm>, Pos),
    Abs(String, Option<PreType>, Box<PreTerm>, Pos),
    Constraint(Box<PreTerm>, PreType, Pos),
}

impl PreTerm {
    pub fn pos(&self) -> Pos {
        match self {
            PreTerm::Ident(_, p)
            | PreTerm::Schematic(_, _, p)
            | PreTerm::Const(_, p)
            | PreTerm::App(_, _, p)
            | PreTerm::Abs(_, _, _, p)
            | PreTerm::Constraint(_, _, p) => *p,
        }
    }

    fn app(f: PreTerm, x: PreTerm) -> PreTerm {
        let p = f.pos();
        PreTerm::App(Box::new(f), Box::new(x), p)
    }
}

pub(crate) struct Parser<'a> {
    toks: Vec<Token>,
    idx: usize,
    table: &'a SyntaxTable,
    /// Identifiers that end a type (theory-file keywords).
    stop_words: &'a [&'a str],
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: Vec<Token>, table: &'a SyntaxTable) -> Parser<'a> {
        Parser { toks, idx: 0, table, stop_words: &[] }
    }

    pub(crate) fn with_stop_words(mut self, words: &'a [&'a str]) -> Self {
        self.stop_words = words;
        self
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.idx + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub(crate) fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    pub(crate) fn expect(&mut self, tok: &Tok) -> Result<(), ParseError> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    pub(crate) fn unexpected(&self, wanted: &str) -> ParseError {
        ParseError::new(self.pos(), format!("expected {wanted}, found {}", self.peek()))
    }

    pub(crate) fn expect_ident(&mut self) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub(crate) fn expect_eof(&self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    // ---- types ----

    pub(crate) fn parse_type(&mut self) -> Result<PreType, ParseError> {
        let dom = self.parse_btype()?;
        if self.eat(&Tok::Arrow) {
            let pos = type_pos(&dom);
            let cod = self.parse_type()?;
            return Ok(PreType::Con(crate::term::types::FUN.into(), vec![dom, cod], pos));
        }
        Ok(dom)
    }

    fn is_type_constructor_next(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if !self.stop_words.contains(&s.as_str()))
    }

    fn parse_btype(&mut self) -> Result<PreType, ParseError> {
        let mut args = self.parse_atype()?;
        loop {
            if !self.is_type_constructor_next() {
                break;
            }
            let (name, pos) = self.expect_ident()?;
            args = vec![PreType::Con(name, args, pos)];
        }
        match args.len() {
            1 => Ok(args.pop().unwrap()),
            _ => Err(self.unexpected("a type constructor after a type tuple")),
        }
    }

    /// One atomic type, or a parenthesized tuple awaiting a constructor.
    fn parse_atype(&mut self) -> Result<Vec<PreType>, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::TyVar(v) => {
                self.bump();
                Ok(vec![PreType::Var(v, pos)])
            }
            Tok::SchemTyVar(v, i) => {
                self.bump();
                Ok(vec![PreType::Schematic(v, i, pos)])
            }
            Tok::Ident(s) if !self.stop_words.contains(&s.as_str()) => {
                self.bump();
                Ok(vec![PreType::Con(s, vec![], pos)])
            }
            Tok::LParen => {
                self.bump();
                let mut items = vec![self.parse_type()?];
                while self.eat(&Tok::Comma) {
                    items.push(self.parse_type()?);
                }
                self.expect(&Tok::RParen)?;
                Ok(items)
            }
            _ => Err(self.unexpected("a type")),
        }
    }

    // ---- terms ----

    pub(crate) fn parse_term(&mut self) -> Result<PreTerm, ParseError> {
        self.parse_expr(0)
    }

    fn parse_expr(&mut self, min_bp: u32) -> Result<PreTerm, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let Tok::Op(sym) = self.peek().clone() else { break };
            let pos = self.pos();
            let Some(inf) = self.table.by_symbol(&sym) else {
                return Err(ParseError::new(pos, format!("unknown operator `{sym}`")));
            };
            let inf = inf.clone();
            let lbp = 2 * inf.prec;
            if lbp < min_bp {
                break;
            }
            self.bump();
            let rbp = if inf.assoc == Assoc::Right { lbp } else { lbp + 1 };
            let rhs = self.parse_expr(rbp)?;
            lhs = PreTerm::app(PreTerm::app(PreTerm::Const(inf.constant.clone(), pos), lhs), rhs);
            if inf.assoc == Assoc::None {
                if let Tok::Op(next) = self.peek() {
                    if self.table.by_symbol(next).is_some_and(|n| n.prec == inf.prec) {
                        return Err(ParseError::with_kind(
                            self.pos(),
                            ParseErrorKind::Ambiguity,
                            format!("ambiguous chain of non-associative `{}`; add parentheses", inf.symbol),
                        ));
                    }
                }
            }
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<PreTerm, ParseError> {
        let pos = self.pos();
        match self.peek() {
            Tok::Not => {
                self.bump();
                let arg = self.parse_expr(2 * NOT_PREC)?;
                Ok(PreTerm::app(PreTerm::Const(logic::NOT.into(), pos), arg))
            }
            Tok::All | Tok::Ex | Tok::Lambda => {
                let binder = match self.bump().tok {
                    Tok::All => Some(logic::ALL),
                    Tok::Ex => Some(logic::EX),
                    _ => None,
                };
                let vars = self.parse_binder_vars()?;
                self.expect(&Tok::Dot)?;
                let body = self.parse_expr(0)?;
                Ok(vars.into_iter().rev().fold(body, |acc, (name, ty, vpos)| {
                    let abs = PreTerm::Abs(name, ty, Box::new(acc), vpos);
                    match binder {
                        Some(b) => PreTerm::app(PreTerm::Const(b.into(), pos), abs),
                        None => abs,
                    }
                }))
            }
            _ => {
                let mut t = self.parse_atom()?;
                while self.starts_atom() {
                    let arg = self.parse_atom()?;
                    t = PreTerm::app(t, arg);
                }
                Ok(t)
            }
        }
    }

    fn parse_binder_vars(&mut self) -> Result<Vec<(String, Option<PreType>, Pos)>, ParseError> {
        let mut vars = Vec::new();
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Ident(_) => {
                    let (name, _) = self.expect_ident()?;
                    let ty = if self.eat(&Tok::ColonColon) { Some(self.parse_type()?) } else { None };
                    vars.push((name, ty, pos));
                }
                Tok::LParen => {
                    self.bump();
                    let (name, _) = self.expect_ident()?;
                    self.expect(&Tok::ColonColon)?;
                    let ty = self.parse_type()?;
                    self.expect(&Tok::RParen)?;
                    vars.push((name, Some(ty), pos));
                }
                _ => break,
            }
        }
        if vars.is_empty() {
            return Err(self.unexpected("a bound variable"));
        }
        Ok(vars)
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Tok::Ident(_) | Tok::Schematic(..) | Tok::Bot | Tok::Top | Tok::LParen)
    }

    fn parse_atom(&mut self) -> Result<PreTerm, ParseError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(PreTerm::Ident(s, pos))
            }
            Tok::Schematic(s, i) => {
                self.bump();
                Ok(PreTerm::Schematic(s, i, pos))
            }
            Tok::Bot => {
                self.bump();
                Ok(PreTerm::Const(logic::FALSE.into(), pos))
            }
            Tok::Top => {
                self.bump();
                Ok(PreTerm::Const(logic::TRUE.into(), pos))
            }
            Tok::LParen => {
                self.bump();
                if let Some(section) = self.operator_section() {
                    self.bump();
                    self.bump();
                    return Ok(PreTerm::Const(section, pos));
                }
                let t = self.parse_expr(0)?;
                let t = if self.eat(&Tok::ColonColon) {
                    let ty = self.parse_type()?;
                    PreTerm::Constraint(Box::new(t), ty, pos)
                } else {
                    t
                };
                self.expect(&Tok::RParen)?;
                Ok(t)
            }
            _ => Err(self.unexpected("a term")),
        }
    }

    /// `(∧)`, `(¬)`, `(∀)` and similar name the underlying constant.
    fn operator_section(&self) -> Option<String> {
        if *self.peek_at(1) != Tok::RParen {
            return None;
        }
        match self.peek() {
            Tok::Op(s) => self.table.by_symbol(s).map(|i| i.constant.clone()),
            Tok::Not => Some(logic::NOT.into()),
            Tok::All => Some(logic::ALL.into()),
            Tok::Ex => Some(logic::EX.into()),
            _ => None,
        }
    }
}

fn type_pos(t: &PreType) -> Pos {
    match t {
        PreType::Var(_, p) | PreType::Schematic(_, _, p) | PreType::Con(_, _, p) => *p,
    }
}

#[cfg(test)]
mod tests {
    use super::super::lexer::tokenize;
    use super::*;

    fn parse(s: &str) -> Result<PreTerm, ParseError> {
        let table = SyntaxTable::default();
        let mut p = Parser::new(tokenize(s, Pos::START)?, &table);
        let t = p.parse_term()?;
        p.expect_eof()?;
        Ok(t)
    }

    /// Strips positions into an s-expression for comparison.
    fn shape(t: &PreTerm) -> String {
        match t {
            PreTerm::Ident(s, _) | PreTerm::Const(s, _) => s.clone(),
            PreTerm::Schematic(s, i, _) => format!("?{s}.{i}"),
            PreTerm::App(f, x, _) => format!("({} {})", shape(f), shape(x)),
            PreTerm::Abs(n, _, b, _) => format!("(λ{n}. {})", shape(b)),
            PreTerm::Constraint(t, _, _) => format!("({}::_)", shape(t)),
        }
    }

    #[test]
    fn precedence_table() {
        assert_eq!(shape(&parse("p & q | r").unwrap()), "((disj ((conj p) q)) r)");
        assert_eq!(shape(&parse("a = b ∧ c").unwrap()), "((conj ((eq a) b)) c)");
        assert_eq!(shape(&parse("p → q → r").unwrap()), "((imp p) ((imp q) r))");
        assert_eq!(shape(&parse("¬p = q").unwrap()), "((eq (Not p)) q)");
        assert_eq!(shape(&parse("¬f x").unwrap()), "(Not (f x))");
        assert_eq!(shape(&parse("p ↔ q → r").unwrap()), "((iff p) ((imp q) r))");
    }

    #[test]
    fn binders_extend_right() {
        assert_eq!(shape(&parse("∀x y. P x ∧ Q y").unwrap()), "(All (λx. (All (λy. ((conj (P x)) (Q y))))))");
        assert_eq!(shape(&parse("p ∧ ∀x. q x ∨ r").unwrap()), "((conj p) (All (λx. ((disj (q x)) r))))");
    }

    #[test]
    fn sections_and_constraints() {
        assert_eq!(shape(&parse("(∧) p").unwrap()), "(conj p)");
        assert_eq!(shape(&parse("(x :: ind) = y").unwrap()), "((eq (x::_)) y)");
    }

    #[test]
    fn equality_chain_is_ambiguous() {
        let e = parse("a = b = c").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Ambiguity);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse("p ∧").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (1, 4));
        let e = parse("(p").unwrap_err();
        assert!(e.msg.contains("`)`"), "{}", e.msg);
    }
}
