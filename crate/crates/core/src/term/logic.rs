//! The logical constants of the base theory and helpers to build and take
//! apart formulas.

use super::{Name, Term, TermKind, Type, TypeError};

pub const FALSE: &str = "False";
pub const TRUE: &str = "True";
pub const NOT: &str = "Not";
pub const CONJ: &str = "conj";
pub const DISJ: &str = "disj";
pub const IMP: &str = "imp";
pub const IFF: &str = "iff";
pub const EQ: &str = "eq";
pub const ALL: &str = "All";
pub const EX: &str = "Ex";

fn bool_binop() -> Type {
    Type::fun_n([Type::bool(), Type::bool()], Type::bool())
}

thread_local! {
    // The connectives are built constantly; share one copy of each.
    static CONNECTIVES: [Term; 7] = [
        Term::constant(FALSE, Type::bool()),
        Term::constant(TRUE, Type::bool()),
        Term::constant(NOT, Type::fun(Type::bool(), Type::bool())),
        Term::constant(CONJ, bool_binop()),
        Term::constant(DISJ, bool_binop()),
        Term::constant(IMP, bool_binop()),
        Term::constant(IFF, bool_binop()),
    ];
}

fn connective(k: usize) -> Term {
    CONNECTIVES.with(|c| c[k].clone())
}

pub fn eq_type(ty: &Type) -> Type {
    Type::fun_n([ty.clone(), ty.clone()], Type::bool())
}

pub fn binder_type(ty: &Type) -> Type {
    Type::fun(Type::fun(ty.clone(), Type::bool()), Type::bool())
}

pub fn mk_false() -> Term {
    connective(0)
}

pub fn mk_true() -> Term {
    connective(1)
}

pub fn mk_not(p: &Term) -> Result<Term, TypeError> {
    Term::app(connective(2), p.clone())
}

fn mk_binop(k: usize, a: &Term, b: &Term) -> Result<Term, TypeError> {
    Term::app(Term::app(connective(k), a.clone())?, b.clone())
}

pub fn mk_conj(a: &Term, b: &Term) -> Result<Term, TypeError> {
    mk_binop(3, a, b)
}

pub fn mk_disj(a: &Term, b: &Term) -> Result<Term, TypeError> {
    mk_binop(4, a, b)
}

pub fn mk_imp(a: &Term, b: &Term) -> Result<Term, TypeError> {
    mk_binop(5, a, b)
}

pub fn mk_iff(a: &Term, b: &Term) -> Result<Term, TypeError> {
    mk_binop(6, a, b)
}

pub fn mk_eq(a: &Term, b: &Term) -> Result<Term, TypeError> {
    Term::app_n(Term::constant(EQ, eq_type(a.ty())), [a.clone(), b.clone()])
}

/// `∀`/`∃` applied to an abstraction (or any predicate term).
pub fn mk_binder(name: &str, pred: &Term) -> Result<Term, TypeError> {
    let (dom, _) = pred.ty().dest_fun().ok_or_else(|| TypeError::BadApplication {
        fun_ty: binder_type(&Type::var("a")),
        arg_ty: pred.ty().clone(),
    })?;
    Term::app(Term::constant(name, binder_type(dom)), pred.clone())
}

/// `∀x. body` binding the free variable `x : ty` of `body`.
pub fn mk_all(x: &str, ty: &Type, body: &Term) -> Result<Term, TypeError> {
    mk_binder(ALL, &Term::lambda(x, ty, body))
}

pub fn mk_exists(x: &str, ty: &Type, body: &Term) -> Result<Term, TypeError> {
    mk_binder(EX, &Term::lambda(x, ty, body))
}

/// Right-nested implication `a1 → … → an → c`.
pub fn list_imp(prems: &[Term], concl: &Term) -> Result<Term, TypeError> {
    prems.iter().rev().try_fold(concl.clone(), |acc, p| mk_imp(p, &acc))
}

pub fn is_const(t: &Term, name: &str) -> bool {
    matches!(t.kind(), TermKind::Const(n) if &**n == name)
}

pub fn dest_binop<'a>(name: &str, t: &'a Term) -> Option<(&'a Term, &'a Term)> {
    let (f, b) = t.dest_app()?;
    let (c, a) = f.dest_app()?;
    is_const(c, name).then_some((a, b))
}

pub fn dest_conj(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(CONJ, t)
}

pub fn dest_disj(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(DISJ, t)
}

pub fn dest_imp(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(IMP, t)
}

pub fn dest_iff(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(IFF, t)
}

pub fn dest_eq(t: &Term) -> Option<(&Term, &Term)> {
    dest_binop(EQ, t)
}

pub fn dest_not(t: &Term) -> Option<&Term> {
    let (f, a) = t.dest_app()?;
    is_const(f, NOT).then_some(a)
}

/// For `Q (λx. body)` returns `(λx. body)`; the predicate need not be an
/// abstraction.
pub fn dest_binder<'a>(name: &str, t: &'a Term) -> Option<&'a Term> {
    let (f, a) = t.dest_app()?;
    is_const(f, name).then_some(a)
}

/// `(display name, bound type, de Bruijn body)` of `∀x. body`.
pub fn dest_all(t: &Term) -> Option<(&Name, &Type, &Term)> {
    dest_binder(ALL, t)?.dest_abs()
}

pub fn dest_exists(t: &Term) -> Option<(&Name, &Type, &Term)> {
    dest_binder(EX, t)?.dest_abs()
}

/// Splits `a1 → … → an → c` into `([a1..an], c)`.
pub fn strip_imp(t: &Term) -> (Vec<&Term>, &Term) {
    let mut prems = Vec::new();
    let mut t = t;
    while let Some((a, b)) = dest_imp(t) {
        prems.push(a);
        t = b;
    }
    (prems, t)
}

/// Names of constants treated as propositional connectives.
pub fn is_connective_name(name: &str) -> bool {
    matches!(name, FALSE | TRUE | NOT | CONJ | DISJ | IMP | IFF)
}
