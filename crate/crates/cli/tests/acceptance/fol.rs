//! Random closed first-order formulas over two unary predicates `P`, `Q`,
//! one unary function `f` and a constant `a`, with a direct evaluator over
//! the tables of a finite model.

use lcfkit::auto::FiniteModel;
use lcfkit::term::logic::{mk_all, mk_conj, mk_disj, mk_exists, mk_imp, mk_not};
use lcfkit::{Term, Type};
use rand::Rng;

const VARS: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, Debug)]
pub enum T {
    Var(usize),
    A,
    F(Box<T>),
}

#[derive(Clone, Debug)]
pub enum Fo {
    P(T),
    Q(T),
    Not(Box<Fo>),
    And(Box<Fo>, Box<Fo>),
    Or(Box<Fo>, Box<Fo>),
    Imp(Box<Fo>, Box<Fo>),
    All(usize, Box<Fo>),
    Ex(usize, Box<Fo>),
}

fn ind() -> Type {
    Type::ind()
}

fn pred() -> Type {
    Type::fun(ind(), Type::bool())
}

fn gen_term<R: Rng>(rng: &mut R, scope: &[usize], depth: u32) -> T {
    if depth > 0 && rng.gen_bool(0.25) {
        return T::F(Box::new(gen_term(rng, scope, depth - 1)));
    }
    if !scope.is_empty() && rng.gen_bool(0.8) {
        T::Var(scope[rng.gen_range(0..scope.len())])
    } else {
        T::A
    }
}

/// A closed formula of nesting depth at most `depth`.
pub fn gen<R: Rng>(rng: &mut R, depth: u32) -> Fo {
    gen_in(rng, &mut Vec::new(), depth)
}

fn gen_in<R: Rng>(rng: &mut R, scope: &mut Vec<usize>, depth: u32) -> Fo {
    if depth == 0 || rng.gen_bool(0.2) {
        let t = gen_term(rng, scope, 1);
        return if rng.gen_bool(0.5) { Fo::P(t) } else { Fo::Q(t) };
    }
    let d = depth - 1;
    let sub = |rng: &mut R, scope: &mut Vec<usize>| Box::new(gen_in(rng, scope, d));
    match rng.gen_range(0..7) {
        0 => Fo::Not(sub(rng, scope)),
        1 => Fo::And(sub(rng, scope), sub(rng, scope)),
        2 => Fo::Or(sub(rng, scope), sub(rng, scope)),
        3 => Fo::Imp(sub(rng, scope), sub(rng, scope)),
        k => {
            let v = scope.len().min(VARS.len() - 1);
            scope.push(v);
            let body = sub(rng, scope);
            scope.pop();
            if k == 4 {
                Fo::Ex(v, body)
            } else {
                Fo::All(v, body)
            }
        }
    }
}

fn term_to_term(t: &T) -> Term {
    match t {
        T::Var(v) => Term::free(VARS[*v], ind()),
        T::A => Term::free("a", ind()),
        T::F(x) => Term::app(Term::free("f", Type::fun(ind(), ind())), term_to_term(x)).unwrap(),
    }
}

pub fn to_term(f: &Fo) -> Term {
    let bin = |a: &Fo, b: &Fo, mk: fn(&Term, &Term) -> Result<Term, lcfkit::term::TypeError>| {
        mk(&to_term(a), &to_term(b)).unwrap()
    };
    match f {
        Fo::P(t) => Term::app(Term::free("P", pred()), term_to_term(t)).unwrap(),
        Fo::Q(t) => Term::app(Term::free("Q", pred()), term_to_term(t)).unwrap(),
        Fo::Not(a) => mk_not(&to_term(a)).unwrap(),
        Fo::And(a, b) => bin(a, b, mk_conj),
        Fo::Or(a, b) => bin(a, b, mk_disj),
        Fo::Imp(a, b) => bin(a, b, mk_imp),
        Fo::All(v, b) => mk_all(VARS[*v], &ind(), &to_term(b)).unwrap(),
        Fo::Ex(v, b) => mk_exists(VARS[*v], &ind(), &to_term(b)).unwrap(),
    }
}

/// Interpretation read off the model's tables. Symbols the model does not
/// mention are irrelevant to the formula and default to 0.
struct Interp {
    size: u32,
    p: Vec<u32>,
    q: Vec<u32>,
    f: Vec<u32>,
    a: u32,
}

fn table(m: &FiniteModel, name: &str) -> Vec<u32> {
    m.tables.iter().find(|t| t.name == name).map(|t| t.values.clone()).unwrap_or_default()
}

fn eval_term(i: &Interp, env: &[u32; 3], t: &T) -> u32 {
    match t {
        T::Var(v) => env[*v],
        T::A => i.a,
        T::F(x) => i.f[eval_term(i, env, x) as usize],
    }
}

fn eval_in(i: &Interp, env: &mut [u32; 3], f: &Fo) -> bool {
    match f {
        Fo::P(t) => i.p[eval_term(i, env, t) as usize] == 1,
        Fo::Q(t) => i.q[eval_term(i, env, t) as usize] == 1,
        Fo::Not(a) => !eval_in(i, env, a),
        Fo::And(a, b) => eval_in(i, env, a) && eval_in(i, env, b),
        Fo::Or(a, b) => eval_in(i, env, a) || eval_in(i, env, b),
        Fo::Imp(a, b) => !eval_in(i, env, a) || eval_in(i, env, b),
        Fo::All(v, b) | Fo::Ex(v, b) => {
            let saved = env[*v];
            let want = matches!(f, Fo::All(..));
            let mut result = want;
            for d in 0..i.size {
                env[*v] = d;
                if eval_in(i, env, b) != want {
                    result = !want;
                    break;
                }
            }
            env[*v] = saved;
            result
        }
    }
}

/// Truth value of the closed formula `f` in `m`.
pub fn eval(m: &FiniteModel, f: &Fo) -> bool {
    let size = m.size as u32;
    let pad = |mut v: Vec<u32>| {
        v.resize(m.size, 0);
        v
    };
    let a = table(m, "a").first().copied().unwrap_or(0);
    let i = Interp { size, p: pad(table(m, "P")), q: pad(table(m, "Q")), f: pad(table(m, "f")), a };
    eval_in(&i, &mut [0; 3], f)
}
