//! First-order terms over `a`, `b`, unary `f`, binary `g` and variables
//! `X0`..`X3`, with a textbook Robinson unifier to compare against.

use std::collections::HashMap;

use lcfkit::unify::SubstEnv;
use lcfkit::{Term, TermKind, Type};
use rand::Rng;

pub const VARS: usize = 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum U {
    V(usize),
    A,
    B,
    F(Box<U>),
    G(Box<U>, Box<U>),
}

pub fn gen<R: Rng>(rng: &mut R, depth: u32) -> U {
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..6) {
            0 => U::A,
            1 => U::B,
            _ => U::V(rng.gen_range(0..VARS)),
        };
    }
    if rng.gen_bool(0.4) {
        U::F(Box::new(gen(rng, depth - 1)))
    } else {
        U::G(Box::new(gen(rng, depth - 1)), Box::new(gen(rng, depth - 1)))
    }
}

fn ind() -> Type {
    Type::ind()
}

pub fn to_term(u: &U) -> Term {
    match u {
        U::V(k) => Term::schematic(format!("X{k}"), 0, ind()),
        U::A => Term::constant("a", ind()),
        U::B => Term::constant("b", ind()),
        U::F(x) => Term::app(Term::constant("f", Type::fun(ind(), ind())), to_term(x)).unwrap(),
        U::G(x, y) => {
            Term::app_n(Term::constant("g", Type::fun_n([ind(), ind()], ind())), [to_term(x), to_term(y)]).unwrap()
        }
    }
}

/// Reads a term over the same signature back, numbering the variables it
/// meets in `names` so results from both sides share one vocabulary.
pub fn from_term(t: &Term, names: &mut Vec<(String, u32)>) -> U {
    match t.kind() {
        TermKind::Schematic(n, i) => {
            let key = (n.to_string(), *i);
            let k = names.iter().position(|x| *x == key).unwrap_or_else(|| {
                names.push(key);
                names.len() - 1
            });
            U::V(k)
        }
        TermKind::Const(n) if n.as_ref() == "a" => U::A,
        TermKind::Const(n) if n.as_ref() == "b" => U::B,
        TermKind::App(h, y) => match h.kind() {
            TermKind::Const(n) if n.as_ref() == "f" => U::F(Box::new(from_term(y, names))),
            TermKind::App(g, x) if matches!(g.kind(), TermKind::Const(n) if n.as_ref() == "g") => {
                U::G(Box::new(from_term(x, names)), Box::new(from_term(y, names)))
            }
            _ => panic!("unexpected head in {t:?}"),
        },
        _ => panic!("unexpected term {t:?}"),
    }
}

type Subst = HashMap<usize, U>;

fn walk<'a>(u: &'a U, s: &'a Subst) -> &'a U {
    let mut u = u;
    while let U::V(k) = u {
        match s.get(k) {
            Some(v) => u = v,
            None => break,
        }
    }
    u
}

fn occurs(k: usize, u: &U, s: &Subst) -> bool {
    match walk(u, s) {
        U::V(j) => *j == k,
        U::A | U::B => false,
        U::F(x) => occurs(k, x, s),
        U::G(x, y) => occurs(k, x, s) || occurs(k, y, s),
    }
}

fn unify_into(x: &U, y: &U, s: &mut Subst) -> bool {
    let (x, y) = (walk(x, s).clone(), walk(y, s).clone());
    match (&x, &y) {
        (U::V(i), U::V(j)) if i == j => true,
        (U::V(i), t) | (t, U::V(i)) => {
            if occurs(*i, t, s) {
                return false;
            }
            s.insert(*i, t.clone());
            true
        }
        (U::A, U::A) | (U::B, U::B) => true,
        (U::F(a), U::F(b)) => unify_into(a, b, s),
        (U::G(a1, a2), U::G(b1, b2)) => unify_into(a1, b1, s) && unify_into(a2, b2, s),
        _ => false,
    }
}

/// Fully applies `s` to `u`.
pub fn resolve(u: &U, s: &Subst) -> U {
    match walk(u, s) {
        U::F(x) => U::F(Box::new(resolve(x, s))),
        U::G(x, y) => U::G(Box::new(resolve(x, s)), Box::new(resolve(y, s))),
        other => other.clone(),
    }
}

/// Most general unifier as the images of `X0`..`X3`, or `None`.
pub fn robinson(x: &U, y: &U) -> Option<Vec<U>> {
    let mut s = Subst::new();
    unify_into(x, y, &mut s).then(|| (0..VARS).map(|k| resolve(&U::V(k), &s)).collect())
}

/// The images of `X0`..`X3` under a library unifier.
pub fn images(env: &SubstEnv) -> Vec<U> {
    let mut names: Vec<(String, u32)> = (0..VARS).map(|k| (format!("X{k}"), 0)).collect();
    (0..VARS).map(|k| from_term(&env.apply(&to_term(&U::V(k))), &mut names)).collect()
}

/// Equal up to a bijective renaming of variables.
pub fn same_up_to_renaming(xs: &[U], ys: &[U]) -> bool {
    fn go(x: &U, y: &U, fwd: &mut HashMap<usize, usize>, back: &mut HashMap<usize, usize>) -> bool {
        match (x, y) {
            (U::V(i), U::V(j)) => *fwd.entry(*i).or_insert(*j) == *j && *back.entry(*j).or_insert(*i) == *i,
            (U::A, U::A) | (U::B, U::B) => true,
            (U::F(a), U::F(b)) => go(a, b, fwd, back),
            (U::G(a1, a2), U::G(b1, b2)) => go(a1, b1, fwd, back) && go(a2, b2, fwd, back),
            _ => false,
        }
    }
    let (mut fwd, mut back) = (HashMap::new(), HashMap::new());
    xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, &mut fwd, &mut back))
}
