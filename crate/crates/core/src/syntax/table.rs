use thiserror::Error;

use crate::term::logic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    Left,
    Right,
    None,
}

/// An infix notation `a SYM b` for a binary constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Infix {
    pub symbol: String,
    pub ascii: String,
    pub constant: String,
    /// Larger binds tighter. Prefix negation sits at 60.
    pub prec: u32,
    pub assoc: Assoc,
}

#[derive(Error, Clone, Debug, PartialEq, Eq)]
pub enum NotationError {
    #[error("symbol `{0}` is already used by another notation")]
    SymbolTaken(String),
    #[error("constant {0} already has an infix notation")]
    ConstTaken(String),
    #[error("precedence {prec} is used by `{other}` with a different associativity")]
    Conflict { prec: u32, other: String },
    #[error("`{0}` is not an operator symbol")]
    BadSymbol(String),
}

/// Notation table shared by the parser and printer. Binders (`∀ ∃ λ`) and
/// prefix negation are fixed; infix operators are table driven.
#[derive(Clone, Debug)]
pub struct SyntaxTable {
    infixes: Vec<Infix>,
}

/// Binding power of prefix negation.
pub(crate) const NOT_PREC: u32 = 60;

impl Default for SyntaxTable {
    fn default() -> Self {
        let mk = |symbol: &str, ascii: &str, constant: &str, prec, assoc| Infix {
            symbol: symbol.into(),
            ascii: ascii.into(),
            constant: constant.into(),
            prec,
            assoc,
        };
        SyntaxTable {
            infixes: vec![
                mk("=", "=", logic::EQ, 50, Assoc::None),
                mk("∧", "&", logic::CONJ, 35, Assoc::Right),
                mk("∨", "|", logic::DISJ, 30, Assoc::Right),
                mk("→", "-->", logic::IMP, 25, Assoc::Right),
                mk("↔", "<->", logic::IFF, 10, Assoc::Right),
            ],
        }
    }
}

fn is_operator_symbol(s: &str) -> bool {
    let toks = super::lexer::tokenize(s, super::Pos::START);
    matches!(toks.as_deref(), Ok([t, _]) if matches!(&t.tok, super::lexer::Tok::Op(o) if o == s))
}

impl SyntaxTable {
    pub fn infixes(&self) -> &[Infix] {
        &self.infixes
    }

    pub fn by_symbol(&self, sym: &str) -> Option<&Infix> {
        self.infixes
            .iter()
            .find(|i| i.symbol == sym || i.ascii == sym)
            .or_else(|| match sym {
                "⟶" => self.by_const(logic::IMP),
                "⟷" => self.by_const(logic::IFF),
                _ => None,
            })
    }

    pub fn by_const(&self, name: &str) -> Option<&Infix> {
        self.infixes.iter().find(|i| i.constant == name)
    }

    /// Adds an infix notation, refusing symbols already taken and
    /// precedence levels whose associativity would disagree.
    pub fn add_infix(&mut self, infix: Infix) -> Result<(), NotationError> {
        for s in [&infix.symbol, &infix.ascii] {
            if !is_operator_symbol(s) {
                return Err(NotationError::BadSymbol(s.clone()));
            }
            if self.by_symbol(s).is_some() {
                return Err(NotationError::SymbolTaken(s.clone()));
            }
        }
        if self.by_const(&infix.constant).is_some() {
            return Err(NotationError::ConstTaken(infix.constant));
        }
        if infix.prec == NOT_PREC {
            return Err(NotationError::Conflict { prec: infix.prec, other: "¬".into() });
        }
        if let Some(o) = self.infixes.iter().find(|o| o.prec == infix.prec && o.assoc != infix.assoc) {
            return Err(NotationError::Conflict { prec: infix.prec, other: o.symbol.clone() });
        }
        self.infixes.push(infix);
        Ok(())
    }
}
