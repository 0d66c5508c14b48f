//! Unification of types and terms containing schematic variables.
//!
//! Terms are unified up to alpha and beta (not eta). Flexible subterms must
//! be higher-order patterns: a schematic applied to distinct bound
//! variables. Within that fragment unifiers are most general and unique, so
//! the sequence of unifiers has at most one element.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::kernel::Instantiation;
use crate::term::{beta_normalize, Name, Term, TermKind, TyVar, Type};

mod matching;

pub use matching::match_terms;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum UnifyError {
    #[error("type clash at {path}: {left} vs {right}")]
    TypeClash { left: Type, right: Type, path: String },
    #[error("occurs check at {path}: {var} occurs in {ty}")]
    TypeOccurs { var: String, ty: Type, path: String },
    #[error("flexible subterm {term} is not a higher-order pattern")]
    NonPattern { term: String },
}

/// Bindings for schematic type variables and schematic term variables.
///
/// The environment is kept idempotent: no bound variable occurs in any
/// binding, so applying it once is enough.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct SubstEnv {
    types: HashMap<(Name, u32), Type>,
    terms: HashMap<(Name, u32), Term>,
}

impl fmt::Debug for SubstEnv {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut items: Vec<String> = self
            .types
            .iter()
            .map(|((n, i), t)| format!("?'{n}.{i} := {t}"))
            .chain(self.terms.iter().map(|((n, i), t)| format!("?{n}.{i} := {t}")))
            .collect();
        items.sort();
        write!(f, "{{{}}}", items.join(", "))
    }
}

fn tyvar_key(v: &TyVar) -> Option<(Name, u32)> {
    match v {
        TyVar::Schematic(n, i) => Some((n.clone(), *i)),
        TyVar::Fixed(_) => None,
    }
}

impl SubstEnv {
    pub fn new() -> SubstEnv {
        SubstEnv::default()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.terms.is_empty()
    }

    pub fn term_binding(&self, name: &str, idx: u32) -> Option<&Term> {
        self.terms.get(&(Name::from(name), idx))
    }

    pub fn type_binding(&self, name: &str, idx: u32) -> Option<&Type> {
        self.types.get(&(Name::from(name), idx))
    }

    pub fn term_bindings(&self) -> impl Iterator<Item = (&(Name, u32), &Term)> {
        self.terms.iter()
    }

    pub fn type_bindings(&self) -> impl Iterator<Item = (&(Name, u32), &Type)> {
        self.types.iter()
    }

    pub fn apply_type(&self, ty: &Type) -> Type {
        if self.types.is_empty() || !ty.has_schematic() {
            return ty.clone();
        }
        ty.map_vars(&mut |v| tyvar_key(v).and_then(|k| self.types.get(&k).cloned()))
    }

    fn type_map(&self) -> HashMap<TyVar, Type> {
        self.types.iter().map(|((n, i), t)| (TyVar::Schematic(n.clone(), *i), t.clone())).collect()
    }

    /// Applies the bindings and beta-normalises.
    pub fn apply(&self, t: &Term) -> Term {
        if self.is_empty() {
            return t.clone();
        }
        let typed = if self.types.is_empty() { t.clone() } else { t.subst_types(&self.type_map()) };
        if self.terms.is_empty() {
            return typed;
        }
        let mut hit = false;
        let out = typed.map_leaves(&mut |leaf| match leaf.kind() {
            TermKind::Schematic(n, i) => {
                let r = self.terms.get(&(n.clone(), *i)).cloned();
                hit |= r.is_some();
                r
            }
            _ => None,
        });
        if hit {
            beta_normalize(&out)
        } else {
            out
        }
    }

    /// The same bindings as a kernel instantiation.
    pub fn to_instantiation(&self) -> Instantiation {
        Instantiation {
            types: self.type_map(),
            terms: self.terms.clone(),
        }
    }

    pub(crate) fn bind_type(&mut self, key: (Name, u32), ty: Type) {
        let single: HashMap<TyVar, Type> = HashMap::from([(TyVar::Schematic(key.0.clone(), key.1), ty.clone())]);
        for v in self.types.values_mut() {
            *v = v.subst(&single);
        }
        for v in self.terms.values_mut() {
            *v = v.subst_types(&single);
        }
        self.types.insert(key, ty);
    }

    pub(crate) fn bind_term(&mut self, key: (Name, u32), t: Term) {
        let single = HashMap::from([(key.clone(), t.clone())]);
        for v in self.terms.values_mut() {
            if v.has_schematic() {
                *v = beta_normalize(&v.subst_schematic(&single));
            }
        }
        self.terms.insert(key, t);
    }

    /// The largest schematic index in the bindings.
    pub(crate) fn max_index(&self) -> u32 {
        let mut m = 0;
        for ((_, i), t) in &self.terms {
            m = m.max(*i);
            m = m.max(max_index_term(t));
        }
        for ((_, i), t) in &self.types {
            m = m.max(*i).max(max_index_type(t));
        }
        m
    }
}

pub(crate) fn max_index_type(t: &Type) -> u32 {
    t.tyvars()
        .iter()
        .filter_map(|v| match v {
            TyVar::Schematic(_, i) => Some(*i),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Largest schematic index (term or type) occurring in `t`.
pub fn max_index_term(t: &Term) -> u32 {
    let mut m = 0;
    t.for_each_leaf(&mut |l| {
        if let TermKind::Schematic(_, i) = l.kind() {
            m = m.max(*i);
        }
    });
    t.for_each_type(&mut |ty| m = m.max(max_index_type(ty)));
    m
}

// ---- types ----

fn type_occurs(env: &SubstEnv, key: &(Name, u32), t: &Type) -> bool {
    match t {
        Type::Schematic(n, i) => {
            (n, i) == (&key.0, &key.1)
                || env.types.get(&(n.clone(), *i)).is_some_and(|b| type_occurs(env, key, b))
        }
        Type::Con(_, args) => args.iter().any(|a| type_occurs(env, key, a)),
        Type::Var(_) => false,
    }
}

fn unify_types_in(env: &mut SubstEnv, a: &Type, b: &Type, path: &mut Vec<usize>) -> Result<(), UnifyError> {
    let a = env.apply_type(a);
    let b = env.apply_type(b);
    if a == b {
        return Ok(());
    }
    let show_path = |p: &[usize]| {
        if p.is_empty() {
            "top".to_string()
        } else {
            p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
        }
    };
    match (&a, &b) {
        (Type::Schematic(n, i), other) | (other, Type::Schematic(n, i)) => {
            let key = (n.clone(), *i);
            if type_occurs(env, &key, other) {
                return Err(UnifyError::TypeOccurs {
                    var: format!("?'{n}"),
                    ty: other.clone(),
                    path: show_path(path),
                });
            }
            env.bind_type(key, other.clone());
            Ok(())
        }
        (Type::Con(f, xs), Type::Con(g, ys)) if f == g && xs.len() == ys.len() => {
            for (k, (x, y)) in xs.iter().zip(ys.iter()).enumerate() {
                path.push(k);
                unify_types_in(env, x, y, path)?;
                path.pop();
            }
            Ok(())
        }
        _ => Err(UnifyError::TypeClash { left: a.clone(), right: b.clone(), path: show_path(path) }),
    }
}

/// Most general unifier of two types extending `env`. Fixed type variables
/// (`'a`) are rigid; only schematic ones (`?'a`) are bound.
pub fn unify_types(a: &Type, b: &Type, env: &SubstEnv) -> Result<SubstEnv, UnifyError> {
    let mut env = env.clone();
    unify_types_in(&mut env, a, b, &mut Vec::new())?;
    Ok(env)
}

// ---- terms ----

enum Fail {
    No,
    NonPattern(String),
}

impl From<UnifyError> for Fail {
    fn from(_: UnifyError) -> Self {
        Fail::No
    }
}

struct Unifier {
    env: SubstEnv,
    next: u32,
    postponed: Vec<(Term, Term, Vec<Type>)>,
}

/// Bound-variable indices if `args` are distinct bound variables.
fn pattern_args(args: &[&Term]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(args.len());
    for a in args {
        match a.kind() {
            TermKind::Bound(i) if !out.contains(i) => out.push(*i),
            _ => return None,
        }
    }
    Some(out)
}

fn flex_head(t: &Term) -> Option<(Name, u32)> {
    match t.head().kind() {
        TermKind::Schematic(n, i) => Some((n.clone(), *i)),
        _ => None,
    }
}

/// `λz₁…zₙ. body` where `zᵢ` has type `tys[i]`.
fn lambdas(tys: &[Type], body: Term) -> Term {
    tys.iter().rev().fold(body, |acc, ty| Term::abs("x", ty.clone(), acc).expect("well-typed abstraction"))
}

/// Type of loose bound index `j` in context `ctx` (innermost binder last).
fn ctx_type(ctx: &[Type], j: u32) -> Type {
    ctx[ctx.len() - 1 - j as usize].clone()
}

impl Unifier {
    fn fresh_var(&mut self, name: &Name, ty: Type) -> Term {
        self.next += 1;
        Term::schematic(name.clone(), self.next, ty)
    }

    fn unify(&mut self, s: &Term, t: &Term, ctx: &mut Vec<Type>) -> Result<(), Fail> {
        let s = self.env.apply(s);
        let t = self.env.apply(t);
        if s == t {
            return Ok(());
        }
        unify_types_in(&mut self.env, s.ty(), t.ty(), &mut Vec::new())?;
        let s = self.env.apply(&s);
        let t = self.env.apply(&t);
        match (s.kind(), t.kind()) {
            (TermKind::Abs(_, a, b), TermKind::Abs(_, c, d)) => {
                unify_types_in(&mut self.env, a, c, &mut Vec::new())?;
                ctx.push(self.env.apply_type(a));
                let r = self.unify(b, d, ctx);
                ctx.pop();
                r
            }
            (TermKind::Abs(..), _) | (_, TermKind::Abs(..)) => Err(Fail::No),
            _ => match (flex_head(&s), flex_head(&t)) {
                (Some(_), Some(_)) => self.flex_flex(&s, &t, ctx),
                (Some(_), None) => self.flex_rigid(&s, &t, ctx),
                (None, Some(_)) => self.flex_rigid(&t, &s, ctx),
                (None, None) => self.rigid_rigid(&s, &t, ctx),
            },
        }
    }

    fn rigid_rigid(&mut self, s: &Term, t: &Term, ctx: &mut Vec<Type>) -> Result<(), Fail> {
        let (f, xs) = s.strip_comb();
        let (g, ys) = t.strip_comb();
        if xs.len() != ys.len() {
            return Err(Fail::No);
        }
        let same_head = match (f.kind(), g.kind()) {
            (TermKind::Const(a), TermKind::Const(b)) | (TermKind::Free(a), TermKind::Free(b)) => a == b,
            (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
            _ => false,
        };
        if !same_head {
            return Err(Fail::No);
        }
        unify_types_in(&mut self.env, f.ty(), g.ty(), &mut Vec::new())?;
        for (x, y) in xs.iter().zip(ys.iter()) {
            self.unify(x, y, ctx)?;
        }
        Ok(())
    }

    fn flex_rigid(&mut self, flex: &Term, rigid: &Term, ctx: &mut Vec<Type>) -> Result<(), Fail> {
        let (head, args) = flex.strip_comb();
        let Some(xs) = pattern_args(&args) else {
            self.postponed.push((flex.clone(), rigid.clone(), ctx.clone()));
            return Ok(());
        };
        let key = flex_head(flex).expect("flexible head");
        if occurs(&key, rigid) {
            return Err(Fail::No);
        }
        let body = self.abstract_pattern(rigid, &xs, 0)?;
        let tys: Vec<Type> = xs.iter().map(|j| ctx_type(ctx, *j)).collect();
        let sol = self.env.apply(&lambdas(&tys, body));
        let want = self.env.apply_type(head.ty());
        unify_types_in(&mut self.env, &want, sol.ty(), &mut Vec::new())?;
        let sol = self.env.apply(&sol);
        self.env.bind_term(key, sol);
        Ok(())
    }

    /// Rewrites `t` so that loose bound variable `xs[i]` becomes the `i`th
    /// abstracted argument, pruning flexible subterms that mention other
    /// outer bound variables. `k` counts binders entered inside `t`.
    fn abstract_pattern(&mut self, t: &Term, xs: &[u32], k: u32) -> Result<Term, Fail> {
        let n = xs.len() as u32;
        let t = self.env.apply(t);
        if t.is_closed() {
            return Ok(t);
        }
        match t.kind() {
            TermKind::Bound(i) if *i < k => Ok(t.clone()),
            TermKind::Bound(i) => match xs.iter().position(|x| *x == i - k) {
                Some(p) => Ok(Term::bound(n - 1 - p as u32 + k, t.ty().clone())),
                None => Err(Fail::No),
            },
            TermKind::Abs(name, ty, body) => {
                let b = self.abstract_pattern(body, xs, k + 1)?;
                Ok(Term::abs(name.clone(), ty.clone(), b).map_err(|_| Fail::No)?)
            }
            _ if flex_head(&t).is_some() => {
                let (head, args) = t.strip_comb();
                let allowed = |a: &Term| match a.kind() {
                    TermKind::Bound(i) => *i < k || xs.contains(&(i - k)),
                    _ => false,
                };
                if args.iter().all(|a| allowed(a)) {
                    let new_args = args
                        .iter()
                        .map(|a| self.abstract_pattern(a, xs, k))
                        .collect::<Result<Vec<_>, _>>()?;
                    return Term::app_n(head.clone(), new_args).map_err(|_| Fail::No);
                }
                let Some(ys) = pattern_args(&args) else {
                    return Err(Fail::NonPattern(t.to_string()));
                };
                // Prune the arguments that would escape.
                let key = flex_head(&t).unwrap();
                let (arg_tys, res) = {
                    let (doms, r) = head.ty().strip_fun();
                    (doms.into_iter().cloned().collect::<Vec<_>>(), r.clone())
                };
                let keep: Vec<usize> = (0..ys.len()).filter(|&p| allowed(args[p])).collect();
                let h_ty = Type::fun_n(keep.iter().map(|&p| arg_tys[p].clone()), res.clone());
                let h = self.fresh_var(&key.0, h_ty);
                let m = ys.len() as u32;
                let kept_args: Vec<Term> =
                    keep.iter().map(|&p| Term::bound(m - 1 - p as u32, arg_tys[p].clone())).collect();
                let body = Term::app_n(h, kept_args).map_err(|_| Fail::No)?;
                let sol = lambdas(&arg_tys[..ys.len()], body);
                self.env.bind_term(key, sol);
                self.abstract_pattern(&t, xs, k)
            }
            TermKind::App(f, x) => {
                let f2 = self.abstract_pattern(f, xs, k)?;
                let x2 = self.abstract_pattern(x, xs, k)?;
                Term::app(f2, x2).map_err(|_| Fail::No)
            }
            _ => Ok(t.clone()),
        }
    }

    fn flex_flex(&mut self, s: &Term, t: &Term, ctx: &mut Vec<Type>) -> Result<(), Fail> {
        let (f, xs) = s.strip_comb();
        let (g, ys) = t.strip_comb();
        let (Some(xs), Some(ys)) = (pattern_args(&xs), pattern_args(&ys)) else {
            self.postponed.push((s.clone(), t.clone(), ctx.clone()));
            return Ok(());
        };
        let fk = flex_head(s).unwrap();
        let gk = flex_head(t).unwrap();
        let tys_x: Vec<Type> = xs.iter().map(|j| ctx_type(ctx, *j)).collect();
        let res = self.env.apply_type(s.ty());
        let nx = xs.len() as u32;
        if fk == gk {
            if xs.len() != ys.len() {
                return Err(Fail::No);
            }
            let keep: Vec<usize> = (0..xs.len()).filter(|&p| xs[p] == ys[p]).collect();
            let h_ty = Type::fun_n(keep.iter().map(|&p| tys_x[p].clone()), res);
            let h = self.fresh_var(&fk.0, h_ty);
            let body = Term::app_n(h, keep.iter().map(|&p| Term::bound(nx - 1 - p as u32, tys_x[p].clone())))
                .map_err(|_| Fail::No)?;
            self.env.bind_term(fk, lambdas(&tys_x, body));
            return Ok(());
        }
        let tys_y: Vec<Type> = ys.iter().map(|j| ctx_type(ctx, *j)).collect();
        let ny = ys.len() as u32;
        let common: Vec<u32> = xs.iter().copied().filter(|x| ys.contains(x)).collect();
        let h_ty = Type::fun_n(common.iter().map(|j| ctx_type(ctx, *j)), res);
        let h = self.fresh_var(&fk.0, h_ty);
        let pos_in = |v: &[u32], j: u32| v.iter().position(|x| *x == j).unwrap() as u32;
        let body_f = Term::app_n(
            h.clone(),
            common.iter().map(|j| Term::bound(nx - 1 - pos_in(&xs, *j), ctx_type(ctx, *j))),
        )
        .map_err(|_| Fail::No)?;
        let body_g =
            Term::app_n(h, common.iter().map(|j| Term::bound(ny - 1 - pos_in(&ys, *j), ctx_type(ctx, *j))))
                .map_err(|_| Fail::No)?;
        let sol_f = lambdas(&tys_x, body_f);
        let sol_g = lambdas(&tys_y, body_g);
        let want_f = self.env.apply_type(f.ty());
        let want_g = self.env.apply_type(g.ty());
        unify_types_in(&mut self.env, &want_f, sol_f.ty(), &mut Vec::new())?;
        unify_types_in(&mut self.env, &want_g, sol_g.ty(), &mut Vec::new())?;
        let sol_f = self.env.apply(&sol_f);
        let sol_g = self.env.apply(&sol_g);
        self.env.bind_term(fk, sol_f);
        self.env.bind_term(gk, sol_g);
        Ok(())
    }

    /// Retries postponed non-pattern problems until none make progress.
    fn finish(&mut self) -> Result<(), Fail> {
        loop {
            let pending = std::mem::take(&mut self.postponed);
            if pending.is_empty() {
                return Ok(());
            }
            let before = pending.len();
            let mut stuck = None;
            for (s, t, mut ctx) in pending {
                let s2 = self.env.apply(&s);
                let t2 = self.env.apply(&t);
                if s2 == t2 {
                    continue;
                }
                let still_flex_nonpattern = |x: &Term| {
                    flex_head(x).is_some() && pattern_args(&x.strip_comb().1).is_none()
                };
                if still_flex_nonpattern(&s2) && (still_flex_nonpattern(&t2) || flex_head(&t2).is_none()) {
                    stuck.get_or_insert_with(|| s2.to_string());
                    self.postponed.push((s2, t2, ctx));
                    continue;
                }
                self.unify(&s2, &t2, &mut ctx)?;
            }
            if self.postponed.len() >= before {
                return Err(Fail::NonPattern(stuck.unwrap_or_default()));
            }
        }
    }
}

fn occurs(key: &(Name, u32), t: &Term) -> bool {
    let mut found = false;
    t.for_each_leaf(&mut |l| {
        if let TermKind::Schematic(n, i) = l.kind() {
            found |= (n, i) == (&key.0, &key.1);
        }
    });
    found
}

/// The unifiers of `t1` and `t2` extending `env`, most general first.
///
/// A clash or occurs-check failure yields an empty sequence. A flexible
/// subterm outside the pattern fragment that cannot be resolved yields
/// [`UnifyError::NonPattern`].
pub fn unify_terms(t1: &Term, t2: &Term, env: &SubstEnv) -> Result<std::option::IntoIter<SubstEnv>, UnifyError> {
    unify_terms_above(t1, t2, env, 0)
}

/// Like [`unify_terms`], with every variable the unifier invents numbered
/// above `floor` as well. Callers pass a bound on the indices in use
/// elsewhere so invented variables cannot collide with them.
pub fn unify_terms_above(
    t1: &Term,
    t2: &Term,
    env: &SubstEnv,
    floor: u32,
) -> Result<std::option::IntoIter<SubstEnv>, UnifyError> {
    let next = env.max_index().max(max_index_term(t1)).max(max_index_term(t2)).max(floor);
    let mut u = Unifier { env: env.clone(), next, postponed: Vec::new() };
    let mut ctx = Vec::new();
    let r = u.unify(t1, t2, &mut ctx).and_then(|_| u.finish());
    match r {
        Ok(()) => Ok(Some(u.env).into_iter()),
        Err(Fail::No) => Ok(None.into_iter()),
        Err(Fail::NonPattern(term)) => Err(UnifyError::NonPattern { term }),
    }
}

/// First unifier, if any.
pub fn unify(t1: &Term, t2: &Term, env: &SubstEnv) -> Result<Option<SubstEnv>, UnifyError> {
    Ok(unify_terms(t1, t2, env)?.next())
}

/// First unifier, inventing variables above `floor`.
pub fn unify_above(t1: &Term, t2: &Term, env: &SubstEnv, floor: u32) -> Result<Option<SubstEnv>, UnifyError> {
    Ok(unify_terms_above(t1, t2, env, floor)?.next())
}

#[cfg(test)]
mod tests;
