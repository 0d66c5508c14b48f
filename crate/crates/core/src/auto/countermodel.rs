//! Finite countermodels by exhaustive enumeration.
//!
//! Every base type is interpreted by the same domain `{0, …, n-1}`. All
//! non-logical constants, free variables and placeholders get tables.

use std::fmt;

use thiserror::Error;

use crate::syntax::{print_type, Mode};
use crate::term::logic::*;
use crate::term::{Term, TermKind, Type};

use super::Cancel;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ModelError {
    #[error("outside the finite fragment: {0}")]
    Fragment(String),
    #[error("cancelled")]
    Cancelled,
}

type MResult<T> = Result<T, ModelError>;

fn fragment<T>(msg: String) -> MResult<T> {
    Err(ModelError::Fragment(msg))
}

/// Configurations tried per domain size before giving up on that size.
const MAX_CONFIGS_LOG2: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Bool,
    Dom,
}

fn sort_of(ty: &Type) -> Option<Sort> {
    if ty.is_bool() {
        Some(Sort::Bool)
    } else if ty.is_fun() {
        None
    } else {
        Some(Sort::Dom)
    }
}

/// The interpretation of one symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub ty: Type,
    pub args: Vec<Sort>,
    pub result: Sort,
    /// Values indexed by the arguments in mixed radix, first argument most
    /// significant.
    pub values: Vec<u32>,
}

impl Table {
    pub fn lookup(&self, size: usize, args: &[u32]) -> u32 {
        let mut k = 0usize;
        for (s, a) in self.args.iter().zip(args) {
            k = k * width(*s, size) + *a as usize;
        }
        self.values[k]
    }
}

fn width(s: Sort, size: usize) -> usize {
    match s {
        Sort::Bool => 2,
        Sort::Dom => size,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteModel {
    pub size: usize,
    pub tables: Vec<Table>,
    /// Values for the leading universal quantifiers that falsify the formula.
    pub witnesses: Vec<(String, Sort, u32)>,
}

fn show(s: Sort, v: u32) -> String {
    match s {
        Sort::Bool => (v == 1).to_string(),
        Sort::Dom => v.to_string(),
    }
}

impl fmt::Display for FiniteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dom: Vec<String> = (0..self.size).map(|k| k.to_string()).collect();
        write!(f, "domain {{{}}}", dom.join(", "))?;
        for t in &self.tables {
            write!(f, "; {} = ", t.name)?;
            if t.args.is_empty() {
                write!(f, "{}", show(t.result, t.values[0]))?;
            } else {
                let vals: Vec<String> = t.values.iter().map(|v| show(t.result, *v)).collect();
                write!(f, "[{}]", vals.join(", "))?;
            }
        }
        for (n, s, v) in &self.witnesses {
            write!(f, "; {n} = {}", show(*s, *v))?;
        }
        Ok(())
    }
}

impl FiniteModel {
    /// Evaluates a closed-up-to-symbols formula in this model.
    pub fn eval(&self, phi: &Term) -> MResult<bool> {
        let mut symbols: Vec<Symbol> = self
            .tables
            .iter()
            .map(|t| Symbol { key: SymKey::Name(t.name.clone()), ty: t.ty.clone(), args: t.args.clone(), result: t.result })
            .collect();
        let n = compile(phi, &mut symbols, false)?;
        Ok(eval(&n, self, &mut Vec::new()) == 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum SymKey {
    Name(String),
}

struct Symbol {
    key: SymKey,
    ty: Type,
    args: Vec<Sort>,
    result: Sort,
}

enum Node {
    Sym(usize, Vec<Node>),
    Var(usize),
    Lit(bool),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Imp(Box<Node>, Box<Node>),
    Eq(Box<Node>, Box<Node>),
    All(Sort, Box<Node>),
    Ex(Sort, Box<Node>),
}

fn is_logical(c: &str) -> bool {
    matches!(c, FALSE | TRUE | NOT | CONJ | DISJ | IMP | IFF | EQ | ALL | EX)
}

fn symbol_name(t: &Term) -> Option<String> {
    match t.kind() {
        TermKind::Const(c) if !is_logical(c) => Some(c.to_string()),
        TermKind::Free(n) => Some(n.to_string()),
        TermKind::Schematic(n, 0) => Some(format!("?{n}")),
        TermKind::Schematic(n, i) => Some(format!("?{n}.{i}")),
        _ => None,
    }
}

fn compile(t: &Term, symbols: &mut Vec<Symbol>, extend: bool) -> MResult<Node> {
    let (head, args) = t.strip_comb();
    let sub = |k: usize, symbols: &mut Vec<Symbol>| compile(args[k], symbols, extend).map(Box::new);
    if let TermKind::Const(c) = head.kind() {
        let c = c.as_ref();
        if is_logical(c) {
            return match (c, args.len()) {
                (TRUE, 0) => Ok(Node::Lit(true)),
                (FALSE, 0) => Ok(Node::Lit(false)),
                (NOT, 1) => Ok(Node::Not(sub(0, symbols)?)),
                (CONJ, 2) => Ok(Node::And(sub(0, symbols)?, sub(1, symbols)?)),
                (DISJ, 2) => Ok(Node::Or(sub(0, symbols)?, sub(1, symbols)?)),
                (IMP, 2) => Ok(Node::Imp(sub(0, symbols)?, sub(1, symbols)?)),
                (IFF, 2) => Ok(Node::Eq(sub(0, symbols)?, sub(1, symbols)?)),
                (EQ, 2) => {
                    if args[0].ty().is_fun() {
                        return fragment(format!("equality at function type {}", print_type(args[0].ty(), Mode::Unicode)));
                    }
                    Ok(Node::Eq(sub(0, symbols)?, sub(1, symbols)?))
                }
                (ALL | EX, 1) => {
                    let Some((_, ty, body)) = args[0].dest_abs() else {
                        return fragment(format!("quantifier without a binder: {t}"));
                    };
                    let Some(sort) = sort_of(ty) else {
                        return fragment(format!("quantification over {}", print_type(ty, Mode::Unicode)));
                    };
                    let body = Box::new(compile(body, symbols, extend)?);
                    Ok(if c == ALL { Node::All(sort, body) } else { Node::Ex(sort, body) })
                }
                _ => fragment(format!("partially applied connective in {t}")),
            };
        }
    }
    if let TermKind::Bound(k) = head.kind() {
        if !args.is_empty() {
            return fragment(format!("bound variable of function type in {t}"));
        }
        return Ok(Node::Var(*k as usize));
    }
    let Some(name) = symbol_name(head) else {
        return fragment(format!("lambda abstraction in {t}"));
    };
    let (arg_tys, res) = head.ty().strip_fun();
    if arg_tys.len() != args.len() {
        return fragment(format!("{name} is not fully applied"));
    }
    let key = SymKey::Name(name.clone());
    let idx = match symbols.iter().position(|s| s.key == key) {
        Some(k) => {
            if &symbols[k].ty != head.ty() {
                return fragment(format!("{name} is used at two types"));
            }
            k
        }
        None if extend => {
            let mut sorts = Vec::with_capacity(arg_tys.len());
            for a in &arg_tys {
                let Some(s) = sort_of(a) else {
                    return fragment(format!("{name} takes a function argument"));
                };
                sorts.push(s);
            }
            let result = sort_of(res).expect("strip_fun leaves a non-function result");
            symbols.push(Symbol { key, ty: head.ty().clone(), args: sorts, result });
            symbols.len() - 1
        }
        None => return fragment(format!("no interpretation for {name}")),
    };
    let compiled = args.iter().map(|a| compile(a, symbols, extend)).collect::<MResult<Vec<_>>>()?;
    Ok(Node::Sym(idx, compiled))
}

fn eval(n: &Node, m: &FiniteModel, stack: &mut Vec<u32>) -> u32 {
    let b = |x: bool| x as u32;
    match n {
        Node::Sym(k, args) => {
            let vals: Vec<u32> = args.iter().map(|a| eval(a, m, stack)).collect();
            m.tables[*k].lookup(m.size, &vals)
        }
        Node::Var(k) => stack[stack.len() - 1 - k],
        Node::Lit(x) => b(*x),
        Node::Not(a) => 1 - eval(a, m, stack),
        Node::And(x, y) => b(eval(x, m, stack) == 1 && eval(y, m, stack) == 1),
        Node::Or(x, y) => b(eval(x, m, stack) == 1 || eval(y, m, stack) == 1),
        Node::Imp(x, y) => b(eval(x, m, stack) == 0 || eval(y, m, stack) == 1),
        Node::Eq(x, y) => b(eval(x, m, stack) == eval(y, m, stack)),
        Node::All(s, body) | Node::Ex(s, body) => {
            let want = matches!(n, Node::Ex(..));
            let mut out = !want;
            for v in 0..width(*s, m.size) as u32 {
                stack.push(v);
                let r = eval(body, m, stack) == 1;
                stack.pop();
                if r == want {
                    out = want;
                    break;
                }
            }
            b(out)
        }
    }
}

/// Values for the leading universal quantifiers under which `n` is false.
fn witnesses(t: &Term, n: &Node, m: &FiniteModel) -> Vec<(String, Sort, u32)> {
    let mut out = Vec::new();
    let mut stack = Vec::new();
    let (mut node, mut term) = (n, t.clone());
    while let (Node::All(s, body), Some((name, _, tbody))) = (node, dest_all(&term)) {
        let name = name.to_string();
        let tbody = tbody.clone();
        let found = (0..width(*s, m.size) as u32).find(|v| {
            stack.push(*v);
            let r = eval(body, m, &mut stack) == 0;
            stack.pop();
            r
        });
        let Some(v) = found else { break };
        stack.push(v);
        out.push((name, *s, v));
        node = body;
        term = tbody;
    }
    out
}

/// Searches domain sizes `1..=max_size` in order, and for each size all
/// interpretations in lexicographic order of their tables, for one that
/// makes `phi` false.
pub fn find_counterexample(phi: &Term, max_size: usize) -> MResult<Option<FiniteModel>> {
    find_counterexample_with(phi, max_size, None)
}

pub fn find_counterexample_with(phi: &Term, max_size: usize, cancel: Option<&Cancel>) -> MResult<Option<FiniteModel>> {
    if !phi.ty().is_bool() {
        return fragment(format!("{phi} is not a formula"));
    }
    let mut symbols = Vec::new();
    let node = compile(phi, &mut symbols, true)?;
    let mut visited = 0usize;
    for size in 1..=max_size {
        let widths: Vec<(usize, usize)> = symbols
            .iter()
            .map(|s| {
                let entries: usize = s.args.iter().map(|a| width(*a, size)).product();
                (entries, width(s.result, size))
            })
            .collect();
        let bits: f64 = widths.iter().map(|(e, w)| *e as f64 * (*w as f64).log2()).sum();
        if bits > MAX_CONFIGS_LOG2 as f64 {
            break;
        }
        let mut model = FiniteModel {
            size,
            tables: symbols
                .iter()
                .zip(&widths)
                .map(|(s, (e, _))| Table {
                    name: match &s.key {
                        SymKey::Name(n) => n.clone(),
                    },
                    ty: s.ty.clone(),
                    args: s.args.clone(),
                    result: s.result,
                    values: vec![0; *e],
                })
                .collect(),
            witnesses: vec![],
        };
        loop {
            visited += 1;
            if visited % 1000 == 0 && cancel.is_some_and(Cancel::is_cancelled) {
                return Err(ModelError::Cancelled);
            }
            if eval(&node, &model, &mut Vec::new()) == 0 {
                model.witnesses = witnesses(phi, &node, &model);
                return Ok(Some(model));
            }
            if !advance(&mut model.tables, &widths) {
                break;
            }
        }
    }
    Ok(None)
}

/// Next configuration in lexicographic order; false after the last one.
fn advance(tables: &mut [Table], widths: &[(usize, usize)]) -> bool {
    for (t, (_, w)) in tables.iter_mut().zip(widths).rev() {
        for v in t.values.iter_mut().rev() {
            *v += 1;
            if (*v as usize) < *w {
                return true;
            }
            *v = 0;
        }
    }
    false
}
