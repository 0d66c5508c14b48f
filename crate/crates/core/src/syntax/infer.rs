//! Name resolution and Hindley-Milner style type inference for parsed terms.

use std::collections::{HashMap, HashSet};

use crate::kernel::theory::Theory;
use crate::term::{Term, TyVar, Type};

use super::lexer::tokenize;
use super::parser::{Parser, PreTerm, PreType};
use super::{ParseError, ParseErrorKind, Pos, SyntaxTable};

/// Inference variables are schematic type variables with this reserved
/// name, which the lexer never produces.
const INFER: &str = "_";

pub fn parse_term(thy: &Theory, text: &str) -> Result<Term, ParseError> {
    parse_term_with(thy, &SyntaxTable::default(), text, Pos::START)
}

/// Parses text that starts at `pos` inside a larger document.
pub fn parse_term_at(thy: &Theory, text: &str, pos: Pos) -> Result<Term, ParseError> {
    parse_term_with(thy, &SyntaxTable::default(), text, pos)
}

pub fn parse_term_with(thy: &Theory, table: &SyntaxTable, text: &str, pos: Pos) -> Result<Term, ParseError> {
    let mut p = Parser::new(tokenize(text, pos)?, table);
    let pre = p.parse_term()?;
    p.expect_eof()?;
    Elab::new(thy).run(&pre)
}

pub fn parse_type(thy: &Theory, text: &str) -> Result<Type, ParseError> {
    let table = SyntaxTable::default();
    let mut p = Parser::new(tokenize(text, Pos::START)?, &table);
    let pre = p.parse_type()?;
    p.expect_eof()?;
    resolve_type(thy, &pre)
}

/// Checks constructor names and arities against the theory.
pub fn resolve_type(thy: &Theory, t: &PreType) -> Result<Type, ParseError> {
    match t {
        PreType::Var(v, _) => Ok(Type::var(v.as_str())),
        PreType::Schematic(v, i, _) => Ok(Type::schematic(v.as_str(), *i)),
        PreType::Con(name, args, pos) => {
            let Some(arity) = thy.type_arity(name) else {
                return Err(ParseError::new(*pos, format!("unknown type constructor {name}")));
            };
            if arity != args.len() {
                return Err(ParseError::new(
                    *pos,
                    format!("type constructor {name} expects {arity} argument(s), got {}", args.len()),
                ));
            }
            let args = args.iter().map(|a| resolve_type(thy, a)).collect::<Result<Vec<_>, _>>()?;
            Ok(Type::con(name.as_str(), args))
        }
    }
}

enum ETerm {
    Free(String, Type),
    Schematic(String, u32, Type),
    Const(String, Type),
    Bound(u32, Type),
    App(Box<ETerm>, Box<ETerm>),
    Abs(String, Type, Box<ETerm>),
}

struct Elab<'a> {
    thy: &'a Theory,
    next: u32,
    subst: HashMap<u32, Type>,
    frees: HashMap<String, Type>,
    schematics: HashMap<(String, u32), Type>,
}

impl<'a> Elab<'a> {
    fn new(thy: &'a Theory) -> Self {
        Elab { thy, next: 0, subst: HashMap::new(), frees: HashMap::new(), schematics: HashMap::new() }
    }

    fn fresh(&mut self) -> Type {
        self.next += 1;
        Type::schematic(INFER, self.next)
    }

    fn resolve(&self, t: &Type) -> Type {
        t.map_vars(&mut |v| match v {
            TyVar::Schematic(n, i) if &**n == INFER => self.subst.get(i).map(|t| self.resolve(t)),
            _ => None,
        })
    }

    fn occurs(&self, i: u32, t: &Type) -> bool {
        match t {
            Type::Schematic(n, j) if &**n == INFER => {
                *j == i || self.subst.get(j).is_some_and(|t| self.occurs(i, t))
            }
            Type::Con(_, args) => args.iter().any(|a| self.occurs(i, a)),
            _ => false,
        }
    }

    fn unify(&mut self, a: &Type, b: &Type) -> bool {
        let a = self.shallow(a);
        let b = self.shallow(b);
        match (&a, &b) {
            (Type::Schematic(n, i), Type::Schematic(m, j)) if &**n == INFER && &**m == INFER && i == j => true,
            (Type::Schematic(n, i), other) | (other, Type::Schematic(n, i)) if &**n == INFER => {
                if self.occurs(*i, other) {
                    return false;
                }
                self.subst.insert(*i, other.clone());
                true
            }
            (Type::Con(f, xs), Type::Con(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys.iter()).all(|(x, y)| self.unify(x, y))
            }
            _ => a == b,
        }
    }

    fn shallow(&self, t: &Type) -> Type {
        let mut t = t.clone();
        while let Type::Schematic(n, i) = &t {
            match self.subst.get(i) {
                Some(u) if &**n == INFER => t = u.clone(),
                _ => break,
            }
        }
        t
    }

    /// Instantiates the type variables of a constant's declared type.
    fn instance(&mut self, ty: &Type) -> Type {
        let mut map: HashMap<TyVar, Type> = HashMap::new();
        for v in ty.tyvars() {
            let f = self.fresh();
            map.insert(v, f);
        }
        ty.subst(&map)
    }

    fn clash(&self, pos: Pos, what: &str, a: &Type, b: &Type) -> ParseError {
        ParseError::with_kind(
            pos,
            ParseErrorKind::Type,
            format!("type inference failure {what}: {} vs {}", self.resolve(a), self.resolve(b)),
        )
    }

    fn infer(&mut self, t: &PreTerm, scope: &mut Vec<(String, Type)>) -> Result<(ETerm, Type), ParseError> {
        match t {
            PreTerm::Ident(name, pos) => {
                if let Some(k) = scope.iter().rev().position(|(n, _)| n == name) {
                    let ty = scope[scope.len() - 1 - k].1.clone();
                    return Ok((ETerm::Bound(k as u32, ty.clone()), ty));
                }
                if let Some(cty) = self.thy.const_type(name).cloned() {
                    let ty = self.instance(&cty);
                    return Ok((ETerm::Const(name.clone(), ty.clone()), ty));
                }
                let _ = pos;
                let ty = match self.frees.get(name) {
                    Some(ty) => ty.clone(),
                    None => {
                        let f = self.fresh();
                        self.frees.insert(name.clone(), f.clone());
                        f
                    }
                };
                Ok((ETerm::Free(name.clone(), ty.clone()), ty))
            }
            PreTerm::Schematic(name, i, _) => {
                let key = (name.clone(), *i);
                let ty = match self.schematics.get(&key) {
                    Some(ty) => ty.clone(),
                    None => {
                        let f = self.fresh();
                        self.schematics.insert(key, f.clone());
                        f
                    }
                };
                Ok((ETerm::Schematic(name.clone(), *i, ty.clone()), ty))
            }
            PreTerm::Const(name, pos) => {
                let Some(cty) = self.thy.const_type(name).cloned() else {
                    return Err(ParseError::new(*pos, format!("constant {name} is not declared in this theory")));
                };
                let ty = self.instance(&cty);
                Ok((ETerm::Const(name.clone(), ty.clone()), ty))
            }
            PreTerm::App(f, x, _) => {
                let (ef, tf) = self.infer(f, scope)?;
                let (ex, tx) = self.infer(x, scope)?;
                let res = self.fresh();
                let want = Type::fun(tx.clone(), res.clone());
                if !self.unify(&tf, &want) {
                    let msg = match self.resolve(&tf).dest_fun() {
                        Some((dom, _)) => {
                            return Err(self.clash(x.pos(), "in application argument", dom, &tx));
                        }
                        None => "applying a non-function",
                    };
                    return Err(self.clash(f.pos(), msg, &tf, &want));
                }
                Ok((ETerm::App(Box::new(ef), Box::new(ex)), res))
            }
            PreTerm::Abs(name, ann, body, _) => {
                let ty = match ann {
                    Some(a) => resolve_type(self.thy, a)?,
                    None => self.fresh(),
                };
                scope.push((name.clone(), ty.clone()));
                let r = self.infer(body, scope);
                scope.pop();
                let (eb, tb) = r?;
                Ok((ETerm::Abs(name.clone(), ty.clone(), Box::new(eb)), Type::fun(ty, tb)))
            }
            PreTerm::Constraint(inner, ann, pos) => {
                let want = resolve_type(self.thy, ann)?;
                let (e, ty) = self.infer(inner, scope)?;
                if !self.unify(&ty, &want) {
                    return Err(self.clash(*pos, "against annotation", &ty, &want));
                }
                Ok((e, ty))
            }
        }
    }

    fn run(mut self, pre: &PreTerm) -> Result<Term, ParseError> {
        let (e, ty) = self.infer(pre, &mut Vec::new())?;
        // A term whose own type is unconstrained is read as a formula.
        if matches!(self.shallow(&ty), Type::Schematic(n, _) if &*n == INFER) {
            self.unify(&ty, &Type::bool());
        }
        // Leftover inference variables become fixed type variables 'a, 'b, …
        let mut used: HashSet<String> = HashSet::new();
        let mut leftovers: Vec<u32> = Vec::new();
        self.collect(&e, &mut used, &mut leftovers);
        let mut names = HashMap::new();
        let mut k = 0usize;
        for i in leftovers {
            let name = loop {
                let cand = tyvar_name(k);
                k += 1;
                if !used.contains(&cand) {
                    break cand;
                }
            };
            names.insert(i, Type::var(name.as_str()));
        }
        let finish = |t: &Type| -> Type {
            self.resolve(t).map_vars(&mut |v| match v {
                TyVar::Schematic(n, i) if &**n == INFER => names.get(i).cloned(),
                _ => None,
            })
        };
        build(&e, &finish).map_err(|err| ParseError::with_kind(pre.pos(), ParseErrorKind::Type, err.to_string()))
    }

    fn collect(&self, e: &ETerm, used: &mut HashSet<String>, leftovers: &mut Vec<u32>) {
        let mut visit = |t: &Type| {
            for v in self.resolve(t).tyvars() {
                match v {
                    TyVar::Schematic(n, i) if &*n == INFER => {
                        if !leftovers.contains(&i) {
                            leftovers.push(i);
                        }
                    }
                    TyVar::Fixed(n) => {
                        used.insert(n.to_string());
                    }
                    _ => {}
                }
            }
        };
        match e {
            ETerm::Free(_, t) | ETerm::Schematic(_, _, t) | ETerm::Const(_, t) | ETerm::Bound(_, t) => visit(t),
            ETerm::App(f, x) => {
                self.collect(f, used, leftovers);
                self.collect(x, used, leftovers);
            }
            ETerm::Abs(_, t, b) => {
                visit(t);
                self.collect(b, used, leftovers);
            }
        }
    }
}

fn tyvar_name(k: usize) -> String {
    let letter = (b'a' + (k % 26) as u8) as char;
    if k < 26 {
        letter.to_string()
    } else {
        format!("{letter}{}", k / 26)
    }
}

fn build(e: &ETerm, fin: &impl Fn(&Type) -> Type) -> Result<Term, crate::term::TypeError> {
    Ok(match e {
        ETerm::Free(n, t) => Term::free(n.as_str(), fin(t)),
        ETerm::Schematic(n, i, t) => Term::schematic(n.as_str(), *i, fin(t)),
        ETerm::Const(n, t) => Term::constant(n.as_str(), fin(t)),
        ETerm::Bound(i, t) => Term::bound(*i, fin(t)),
        ETerm::App(f, x) => Term::app(build(f, fin)?, build(x, fin)?)?,
        ETerm::Abs(n, t, b) => Term::abs(n.as_str(), fin(t), build(b, fin)?)?,
    })
}
