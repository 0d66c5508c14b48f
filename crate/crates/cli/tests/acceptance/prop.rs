//! Propositional formulas with two reference deciders: truth tables for
//! classical validity and Dyckhoff's contraction-free sequent calculus for
//! intuitionistic provability.

use std::collections::HashMap;

use lcfkit::term::logic::{mk_conj, mk_disj, mk_false, mk_iff, mk_imp, mk_not, mk_true};
use lcfkit::{Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum F {
    Atom(u8),
    Top,
    Bot,
    Not(Box<F>),
    And(Box<F>, Box<F>),
    Or(Box<F>, Box<F>),
    Imp(Box<F>, Box<F>),
    Iff(Box<F>, Box<F>),
}

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

pub fn not(a: F) -> F {
    F::Not(Box::new(a))
}

pub fn and(a: F, b: F) -> F {
    F::And(Box::new(a), Box::new(b))
}

pub fn or(a: F, b: F) -> F {
    F::Or(Box::new(a), Box::new(b))
}

pub fn imp(a: F, b: F) -> F {
    F::Imp(Box::new(a), Box::new(b))
}

pub fn iff(a: F, b: F) -> F {
    F::Iff(Box::new(a), Box::new(b))
}

impl F {
    pub fn eval(&self, v: u32) -> bool {
        match self {
            F::Atom(k) => v >> k & 1 == 1,
            F::Top => true,
            F::Bot => false,
            F::Not(a) => !a.eval(v),
            F::And(a, b) => a.eval(v) && b.eval(v),
            F::Or(a, b) => a.eval(v) || b.eval(v),
            F::Imp(a, b) => !a.eval(v) || b.eval(v),
            F::Iff(a, b) => a.eval(v) == b.eval(v),
        }
    }

    pub fn to_term(&self) -> Term {
        let bin = |a: &F, b: &F, mk: fn(&Term, &Term) -> Result<Term, lcfkit::term::TypeError>| {
            mk(&a.to_term(), &b.to_term()).unwrap()
        };
        match self {
            F::Atom(k) => Term::free(ATOMS[*k as usize], Type::bool()),
            F::Top => mk_true(),
            F::Bot => mk_false(),
            F::Not(a) => mk_not(&a.to_term()).unwrap(),
            F::And(a, b) => bin(a, b, mk_conj),
            F::Or(a, b) => bin(a, b, mk_disj),
            F::Imp(a, b) => bin(a, b, mk_imp),
            F::Iff(a, b) => bin(a, b, mk_iff),
        }
    }
}

/// Valid under all eight assignments to p, q, r.
pub fn truth_table_valid(f: &F) -> bool {
    (0..8).all(|v| f.eval(v))
}

/// Every formula built from the three atoms and the five connectives with
/// at most `max` symbols, grouped by size.
pub fn enumerate(max: usize) -> Vec<Vec<F>> {
    let mut by_size: Vec<Vec<F>> = vec![Vec::new(); max + 1];
    if max >= 1 {
        by_size[1] = (0..ATOMS.len() as u8).map(F::Atom).collect();
    }
    for n in 2..=max {
        let mut out: Vec<F> = by_size[n - 1].iter().cloned().map(not).collect();
        for left in 1..n - 1 {
            let right = n - 1 - left;
            for a in &by_size[left] {
                for b in &by_size[right] {
                    out.push(and(a.clone(), b.clone()));
                    out.push(or(a.clone(), b.clone()));
                    out.push(imp(a.clone(), b.clone()));
                    out.push(iff(a.clone(), b.clone()));
                }
            }
        }
        by_size[n] = out;
    }
    by_size
}

/// Formulas of the implicational fragment used by the sequent calculus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum G {
    Atom(u8),
    Bot,
    And(Box<G>, Box<G>),
    Or(Box<G>, Box<G>),
    Imp(Box<G>, Box<G>),
}

fn lower(f: &F) -> G {
    let b = |x: &F| Box::new(lower(x));
    match f {
        F::Atom(k) => G::Atom(*k),
        F::Top => G::Imp(Box::new(G::Bot), Box::new(G::Bot)),
        F::Bot => G::Bot,
        F::Not(a) => G::Imp(b(a), Box::new(G::Bot)),
        F::And(x, y) => G::And(b(x), b(y)),
        F::Or(x, y) => G::Or(b(x), b(y)),
        F::Imp(x, y) => G::Imp(b(x), b(y)),
        F::Iff(x, y) => G::And(
            Box::new(G::Imp(b(x), b(y))),
            Box::new(G::Imp(b(y), b(x))),
        ),
    }
}

/// Intuitionistic provability, decided with the calculus G4ip.
pub fn intuitionistic_valid(f: &F) -> bool {
    Prover::default().prove(Vec::new(), &lower(f))
}

/// Contexts are kept sorted and free of duplicates, so equal sequents share
/// one memo entry.
type Ctx = Vec<G>;

fn without(ctx: &[G], k: usize) -> Ctx {
    let mut c = ctx.to_vec();
    c.remove(k);
    c
}

fn with(mut ctx: Ctx, extra: impl IntoIterator<Item = G>) -> Ctx {
    for g in extra {
        if let Err(at) = ctx.binary_search(&g) {
            ctx.insert(at, g);
        }
    }
    ctx
}

#[derive(Default)]
struct Prover {
    memo: HashMap<(Ctx, G), bool>,
}

impl Prover {
    fn prove(&mut self, ctx: Ctx, goal: &G) -> bool {
        let key = (ctx, goal.clone());
        if let Some(v) = self.memo.get(&key) {
            return *v;
        }
        let v = self.search(&key.0, goal);
        self.memo.insert(key, v);
        v
    }

    fn search(&mut self, ctx: &[G], goal: &G) -> bool {
        if ctx.contains(&G::Bot) || (matches!(goal, G::Atom(_)) && ctx.contains(goal)) {
            return true;
        }
        // invertible left rules
        for (k, h) in ctx.iter().enumerate() {
            let rest = || without(ctx, k);
            match h {
                G::And(a, b) => return self.prove(with(rest(), [(**a).clone(), (**b).clone()]), goal),
                G::Or(a, b) => {
                    return self.prove(with(rest(), [(**a).clone()]), goal)
                        && self.prove(with(rest(), [(**b).clone()]), goal)
                }
                G::Imp(a, b) => match &**a {
                    G::Atom(_) if ctx.contains(a) => return self.prove(with(rest(), [(**b).clone()]), goal),
                    G::Bot => return self.prove(rest(), goal),
                    G::And(c, d) => {
                        let curried = G::Imp(c.clone(), Box::new(G::Imp(d.clone(), b.clone())));
                        return self.prove(with(rest(), [curried]), goal);
                    }
                    G::Or(c, d) => {
                        let l = G::Imp(c.clone(), b.clone());
                        let r = G::Imp(d.clone(), b.clone());
                        return self.prove(with(rest(), [l, r]), goal);
                    }
                    _ => {}
                },
                _ => {}
            }
        }
        // invertible right rules
        match goal {
            G::And(a, b) => return self.prove(ctx.to_vec(), a) && self.prove(ctx.to_vec(), b),
            G::Imp(a, b) => return self.prove(with(ctx.to_vec(), [(**a).clone()]), b),
            _ => {}
        }
        // non-invertible choices
        if let G::Or(a, b) = goal {
            if self.prove(ctx.to_vec(), a) || self.prove(ctx.to_vec(), b) {
                return true;
            }
        }
        for (k, h) in ctx.iter().enumerate() {
            if let G::Imp(ab, b) = h {
                if let G::Imp(c, d) = &**ab {
                    let rest = without(ctx, k);
                    let left_ctx = with(rest.clone(), [G::Imp(d.clone(), b.clone())]);
                    let left_goal = G::Imp(c.clone(), d.clone());
                    if self.prove(left_ctx, &left_goal) && self.prove(with(rest, [(**b).clone()]), goal) {
                        return true;
                    }
                }
            }
        }
        false
    }
}

/// A random formula with at most `depth` nested connectives.
pub fn random<R: rand::Rng>(rng: &mut R, depth: u32) -> F {
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..10) {
            0 => F::Top,
            1 => F::Bot,
            _ => F::Atom(rng.gen_range(0..ATOMS.len() as u8)),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..5) {
        0 => not(random(rng, d)),
        1 => and(random(rng, d), random(rng, d)),
        2 => or(random(rng, d), random(rng, d)),
        3 => imp(random(rng, d), random(rng, d)),
        _ => iff(random(rng, d), random(rng, d)),
    }
}
