//! Random well-typed terms over a small signature, for printer and parser
//! round trips.

use lcfkit::term::logic::*;
use lcfkit::{Term, Theory, Type};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn ind() -> Type {
    Type::ind()
}

pub fn thy() -> Theory {
    let i = ind();
    let b = Type::bool();
    Theory::primitive_base("Syn")
        .declare_const("c", &i)
        .unwrap()
        .declare_const("f", &Type::fun(i.clone(), i.clone()))
        .unwrap()
        .declare_const("g", &Type::fun_n([i.clone(), i.clone()], i.clone()))
        .unwrap()
        .declare_const("R", &Type::fun_n([i.clone(), i.clone()], b.clone()))
        .unwrap()
        .declare_const("Pc", &Type::fun(i, b))
        .unwrap()
}

/// Random well-typed terms over a small signature. Free variable names have
/// fixed types so every generated term has a concrete spelling.
struct Gen {
    rng: ChaCha8Rng,
}

impl Gen {
    fn pick<'a, T>(&mut self, xs: &'a [T]) -> &'a T {
        &xs[self.rng.gen_range(0..xs.len())]
    }

    fn binder_name(&mut self) -> &'static str {
        *self.pick(&["x", "y", "x", "z", "c"])
    }

    /// A term of type `ty`; `depth` bounds nesting.
    fn term(&mut self, ty: &Type, depth: u32, bound: &mut Vec<Type>) -> Term {
        let leaf = depth == 0 || self.rng.gen_bool(0.25);
        if let Some((dom, cod)) = ty.dest_fun() {
            if leaf || self.rng.gen_bool(0.3) {
                return self.atom(ty, bound);
            }
            let name = self.binder_name();
            bound.push(dom.clone());
            let body = self.term(cod, depth - 1, bound);
            bound.pop();
            return Term::abs(name, dom.clone(), body).unwrap();
        }
        if leaf {
            return self.atom(ty, bound);
        }
        let d = depth - 1;
        if ty.is_bool() {
            match self.rng.gen_range(0..11) {
                0 => mk_not(&self.term(ty, d, bound)).unwrap(),
                1 => mk_conj(&self.term(ty, d, bound), &self.term(ty, d, bound)).unwrap(),
                2 => mk_disj(&self.term(ty, d, bound), &self.term(ty, d, bound)).unwrap(),
                3 => mk_imp(&self.term(ty, d, bound), &self.term(ty, d, bound)).unwrap(),
                4 => mk_iff(&self.term(ty, d, bound), &self.term(ty, d, bound)).unwrap(),
                5 => {
                    let sty = self.pick(&[ind(), Type::bool(), Type::fun(ind(), ind())]).clone();
                    mk_eq(&self.term(&sty, d, bound), &self.term(&sty, d, bound)).unwrap()
                }
                6 | 7 => {
                    let q = *self.pick(&[ALL, EX]);
                    let bty = self.pick(&[ind(), Type::bool()]).clone();
                    let name = self.binder_name();
                    bound.push(bty.clone());
                    let body = self.term(ty, d, bound);
                    bound.pop();
                    mk_binder(q, &Term::abs(name, bty, body).unwrap()).unwrap()
                }
                8 => Term::app_n(Term::constant("R", Type::fun_n([ind(), ind()], Type::bool())), [
                    self.term(&ind(), d, bound),
                    self.term(&ind(), d, bound),
                ])
                .unwrap(),
                9 => {
                    let p = self.term(&Type::fun(ind(), Type::bool()), d, bound);
                    Term::app(p, self.term(&ind(), d, bound)).unwrap()
                }
                _ => {
                    // partially applied connective
                    let c = Term::constant(CONJ, Type::fun_n([Type::bool(), Type::bool()], Type::bool()));
                    let f = Term::app(c, self.term(ty, d, bound)).unwrap();
                    Term::app(f, self.term(ty, d, bound)).unwrap()
                }
            }
        } else {
            match self.rng.gen_range(0..3) {
                0 => {
                    let f = self.term(&Type::fun(ind(), ind()), d, bound);
                    Term::app(f, self.term(&ind(), d, bound)).unwrap()
                }
                1 => Term::app_n(Term::constant("g", Type::fun_n([ind(), ind()], ind())), [
                    self.term(&ind(), d, bound),
                    self.term(&ind(), d, bound),
                ])
                .unwrap(),
                _ => self.atom(ty, bound),
            }
        }
    }

    fn atom(&mut self, ty: &Type, bound: &[Type]) -> Term {
        let candidates: Vec<u32> =
            (0..bound.len()).filter(|&k| &bound[bound.len() - 1 - k] == ty).map(|k| k as u32).collect();
        if !candidates.is_empty() && self.rng.gen_bool(0.5) {
            return Term::bound(*self.pick(&candidates), ty.clone());
        }
        let b = Type::bool();
        let ip = Type::fun(ind(), Type::bool());
        let ii = Type::fun(ind(), ind());
        let options: Vec<Term> = if *ty == b {
            vec![
                Term::free("p", b.clone()),
                Term::free("q", b.clone()),
                Term::schematic("A", 0, b.clone()),
                Term::schematic("A", 2, b.clone()),
                mk_true(),
                mk_false(),
            ]
        } else if *ty == ind() {
            vec![
                Term::free("a", ind()),
                Term::free("xa", ind()),
                Term::constant("c", ind()),
                Term::schematic("t", 0, ind()),
            ]
        } else if *ty == ip {
            vec![Term::free("P", ip.clone()), Term::constant("Pc", ip.clone()), Term::schematic("P", 0, ip.clone())]
        } else if *ty == ii {
            vec![Term::constant("f", ii.clone()), Term::free("h", ii.clone())]
        } else {
            unreachable!("no atoms of type {ty}")
        };
        self.pick(&options).clone()
    }
}

pub fn random_term(seed: u64) -> Term {
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed) };
    let depth = g.rng.gen_range(1..=7);
    g.term(&Type::bool(), depth, &mut Vec::new())
}
