//! One-sided matching: only schematics of the pattern are bound, and
//! schematics in the target behave like constants.

use std::collections::{HashMap, HashSet};

use crate::term::{beta_normalize, Name, Term, TermKind, Type};

use super::{lambdas, pattern_args, SubstEnv};

fn match_type(env: &mut SubstEnv, pat: &Type, target: &Type) -> bool {
    match pat {
        Type::Schematic(n, i) => match env.types.get(&(n.clone(), *i)) {
            Some(b) => b == target,
            None => {
                env.types.insert((n.clone(), *i), target.clone());
                true
            }
        },
        Type::Var(_) => pat == target,
        Type::Con(f, xs) => match target {
            Type::Con(g, ys) if f == g && xs.len() == ys.len() => {
                xs.iter().zip(ys.iter()).all(|(x, y)| match_type(env, x, y))
            }
            _ => false,
        },
    }
}

/// Rewrites loose bound `xs[i]` in `t` to the `i`th abstracted argument.
fn abstract_args(t: &Term, xs: &[u32], k: u32) -> Option<Term> {
    if t.is_closed() {
        return Some(t.clone());
    }
    let n = xs.len() as u32;
    match t.kind() {
        TermKind::Bound(i) if *i < k => Some(t.clone()),
        TermKind::Bound(i) => {
            let p = xs.iter().position(|x| *x == i - k)? as u32;
            Some(Term::bound(n - 1 - p + k, t.ty().clone()))
        }
        TermKind::App(f, x) => Term::app(abstract_args(f, xs, k)?, abstract_args(x, xs, k)?).ok(),
        TermKind::Abs(name, ty, b) => Term::abs(name.clone(), ty.clone(), abstract_args(b, xs, k + 1)?).ok(),
        _ => Some(t.clone()),
    }
}

type Vars = HashSet<(Name, u32)>;

fn go(env: &mut SubstEnv, vars: &Vars, pat: &Term, target: &Term, ctx: &mut Vec<Type>) -> bool {
    let (head, args) = pat.strip_comb();
    if let TermKind::Schematic(n, i) = head.kind() {
        let key = (n.clone(), *i);
        if vars.contains(&key) {
            if let Some(b) = env.terms.get(&key).cloned() {
                let args: Vec<Term> = args.iter().map(|a| env.apply_type_term(a)).collect();
                return match Term::app_n(b, args) {
                    Ok(inst) => go(env, vars, &beta_normalize(&inst), target, ctx),
                    Err(_) => false,
                };
            }
            if let Some(xs) = pattern_args(&args) {
                if !match_type(env, pat.ty(), target.ty()) {
                    return false;
                }
                let Some(body) = abstract_args(target, &xs, 0) else {
                    return false;
                };
                let tys: Vec<Type> = xs.iter().map(|j| ctx[ctx.len() - 1 - *j as usize].clone()).collect();
                let sol = lambdas(&tys, body);
                if !match_type(env, head.ty(), sol.ty()) {
                    return false;
                }
                env.terms.insert(key, sol);
                return true;
            }
        }
    }
    match (pat.kind(), target.kind()) {
        (TermKind::Abs(_, a, b), TermKind::Abs(_, c, d)) => {
            if !match_type(env, a, c) {
                return false;
            }
            ctx.push(c.clone());
            let r = go(env, vars, b, d, ctx);
            ctx.pop();
            r
        }
        (TermKind::App(f, x), TermKind::App(g, y)) => {
            go(env, vars, f, g, ctx) && go(env, vars, x, y, ctx)
        }
        (TermKind::Const(a), TermKind::Const(b)) | (TermKind::Free(a), TermKind::Free(b)) => {
            a == b && match_type(env, pat.ty(), target.ty())
        }
        (TermKind::Schematic(a, i), TermKind::Schematic(b, j)) => {
            a == b && i == j && match_type(env, pat.ty(), target.ty())
        }
        (TermKind::Bound(i), TermKind::Bound(j)) => i == j,
        _ => false,
    }
}

impl SubstEnv {
    fn apply_type_term(&self, t: &Term) -> Term {
        if self.types.is_empty() {
            return t.clone();
        }
        let map: HashMap<_, _> = self.type_map();
        t.subst_types(&map)
    }
}

/// Extends `env` so that `pattern` instantiated by it is alpha-beta equal
/// to `target`. Flexible subterms of `pattern` must be higher-order
/// patterns; target schematics are treated as rigid.
///
/// Callers rename the pattern apart from the target first, since a
/// schematic occurring in both would be treated as flexible.
pub fn match_terms(pattern: &Term, target: &Term, env: &SubstEnv) -> Option<SubstEnv> {
    let mut env = env.clone();
    let vars: Vars = pattern
        .schematic_vars()
        .iter()
        .filter_map(|v| Some((v.name.clone(), v.index?)))
        .collect();
    go(&mut env, &vars, pattern, target, &mut Vec::new()).then_some(env)
}
