//! The built-in theories `Base` (intuitionistic natural deduction) and
//! `Classical` (adds excluded middle), with their rules proved from the
//! kernel primitives.

pub mod derived;

use std::sync::OnceLock;

use crate::kernel::{KernelError, Theorem};
use crate::term::logic::*;
use crate::term::{Term, TermKind, Type};
use crate::Theory;

use derived::*;

/// Introduction rules tried by proof search, in order.
pub const INTRO_RULES: &[&str] = &["TrueI", "conjI", "impI", "notI", "iffI", "allI", "disjI1", "disjI2", "exI", "refl"];
/// Elimination rules tried by proof search, in order.
pub const ELIM_RULES: &[&str] = &["FalseE", "conjE", "disjE", "exE", "iffE", "impE", "notE", "allE"];
/// Invertible rules, which search applies without backtracking.
pub const SAFE_INTRO_RULES: &[&str] = &["TrueI", "conjI", "impI", "notI", "iffI", "allI"];
pub const SAFE_ELIM_RULES: &[&str] = &["FalseE", "conjE", "disjE", "exE", "iffE"];

type Result<T> = std::result::Result<T, KernelError>;

/// Turns every free variable of a closed-hypothesis theorem into a
/// schematic and stores it.
fn store(thy: Theory, name: &str, th: Result<Theorem>, arity: Option<usize>) -> Theory {
    let th = th.unwrap_or_else(|e| panic!("library rule {name}: {e}"));
    let th = Theorem::transfer(&th, &thy).expect("library rules live in the theory");
    let varified = varify(&th).unwrap_or_else(|e| panic!("library rule {name}: {e}"));
    thy.store_rule(name, &varified, arity).unwrap_or_else(|e| panic!("library rule {name}: {e}"))
}

/// Generalises all free variables of the conclusion to schematics.
pub fn varify(th: &Theorem) -> Result<Theorem> {
    let mut out = th.clone();
    for v in th.concl().free_vars().iter() {
        out = Theorem::generalize(&out, &v.to_term())?;
    }
    Ok(out)
}

struct Vars {
    p: Term,
    q: Term,
    r: Term,
}

fn vars() -> Vars {
    let b = Type::bool();
    Vars { p: Term::free("P", b.clone()), q: Term::free("Q", b.clone()), r: Term::free("R", b) }
}

fn imps(th: Result<Theorem>, discharge: &[&Term]) -> Result<Theorem> {
    discharge.iter().rev().try_fold(th?, |acc, h| Theorem::imp_intro(&acc, h))
}

fn a_ty() -> Type {
    Type::var("a")
}

/// `P :: 'a ⇒ bool`, `t :: 'a` and `∀x. P x` / `∃x. P x`.
fn pred_vars() -> (Term, Term, Term, Term) {
    let pred = Term::free("P", Type::fun(a_ty(), Type::bool()));
    let t = Term::free("t", a_ty());
    let x = Term::free("x", a_ty());
    let body = Term::app(pred.clone(), x).unwrap();
    let all = mk_all("x", &a_ty(), &body).unwrap();
    let ex = mk_exists("x", &a_ty(), &body).unwrap();
    (pred, t, all, ex)
}

fn build_base() -> Theory {
    let mut thy = Theory::primitive_base("Base");
    let Vars { p, q, r } = vars();
    let a = |thy: &Theory, t: &Term| Theorem::assume(thy, t).unwrap();
    let pq_and = mk_conj(&p, &q).unwrap();
    let pq_or = mk_disj(&p, &q).unwrap();
    let pq_imp = mk_imp(&p, &q).unwrap();
    let qp_imp = mk_imp(&q, &p).unwrap();
    let pq_iff = mk_iff(&p, &q).unwrap();
    let not_p = mk_not(&p).unwrap();
    let f = mk_false();

    let th = imps(Theorem::conj_intro(&a(&thy, &p), &a(&thy, &q)), &[&p, &q]);
    thy = store(thy, "conjI", th, None);
    let th = imps(Theorem::conj_elim1(&a(&thy, &pq_and)), &[&pq_and]);
    thy = store(thy, "conjunct1", th, None);
    let th = imps(Theorem::conj_elim2(&a(&thy, &pq_and)), &[&pq_and]);
    thy = store(thy, "conjunct2", th, None);
    let k = list_imp(&[p.clone(), q.clone()], &r).unwrap();
    let h = a(&thy, &pq_and);
    let th = imps(
        mp_chain(&a(&thy, &k), &[Theorem::conj_elim1(&h).unwrap(), Theorem::conj_elim2(&h).unwrap()]),
        &[&pq_and, &k],
    );
    thy = store(thy, "conjE", th, None);

    let th = imps(Theorem::disj_intro1(&a(&thy, &p), &q), &[&p]);
    thy = store(thy, "disjI1", th, None);
    let th = imps(Theorem::disj_intro2(&p, &a(&thy, &q)), &[&q]);
    thy = store(thy, "disjI2", th, None);
    let (pr, qr) = (mk_imp(&p, &r).unwrap(), mk_imp(&q, &r).unwrap());
    let th = imps(
        Theorem::disj_elim(
            &a(&thy, &pq_or),
            &Theorem::imp_elim(&a(&thy, &pr), &a(&thy, &p)).unwrap(),
            &Theorem::imp_elim(&a(&thy, &qr), &a(&thy, &q)).unwrap(),
        ),
        &[&pq_or, &pr, &qr],
    );
    thy = store(thy, "disjE", th, None);

    let th = imps(Ok(a(&thy, &pq_imp)), &[&pq_imp]);
    thy = store(thy, "impI", th.clone(), Some(1));
    let th = imps(Theorem::imp_elim(&a(&thy, &pq_imp), &a(&thy, &p)), &[&pq_imp, &p]);
    thy = store(thy, "mp", th, None);
    let th = imps(
        Theorem::imp_elim(&a(&thy, &qr), &Theorem::imp_elim(&a(&thy, &pq_imp), &a(&thy, &p)).unwrap()),
        &[&pq_imp, &p, &qr],
    );
    thy = store(thy, "impE", th, None);

    let p_false = mk_imp(&p, &f).unwrap();
    let th = imps(fold_not(&a(&thy, &p_false)), &[&p_false]);
    thy = store(thy, "notI", th, Some(1));
    let th = imps(
        Theorem::false_elim(&not_elim(&a(&thy, &not_p), &a(&thy, &p)).unwrap(), &r),
        &[&not_p, &p],
    );
    thy = store(thy, "notE", th, None);
    let th = imps(Theorem::false_elim(&a(&thy, &f), &p), &[&f]);
    thy = store(thy, "FalseE", th, None);
    let th = true_intro(&thy);
    thy = store(thy, "TrueI", th, None);

    let th = imps(fold_iff(&Theorem::conj_intro(&a(&thy, &pq_imp), &a(&thy, &qp_imp)).unwrap()), &[&pq_imp, &qp_imp]);
    thy = store(thy, "iffI", th, None);
    let c = unfold_iff(&a(&thy, &pq_iff)).unwrap();
    let k = list_imp(&[pq_imp.clone(), qp_imp.clone()], &r).unwrap();
    let th = imps(
        mp_chain(&a(&thy, &k), &[Theorem::conj_elim1(&c).unwrap(), Theorem::conj_elim2(&c).unwrap()]),
        &[&pq_iff, &k],
    );
    thy = store(thy, "iffE", th, None);
    let th = imps(Theorem::imp_elim(&Theorem::conj_elim1(&c).unwrap(), &a(&thy, &p)), &[&pq_iff, &p]);
    thy = store(thy, "iffD1", th, None);
    let th = imps(Theorem::imp_elim(&Theorem::conj_elim2(&c).unwrap(), &a(&thy, &q)), &[&pq_iff, &q]);
    thy = store(thy, "iffD2", th, None);

    let (pred, t, all, ex) = pred_vars();
    let pt = Term::app(pred.clone(), t.clone()).unwrap();
    let th = imps(Ok(a(&thy, &all)), &[&all]);
    thy = store(thy, "allI", th, Some(1));
    let th = imps(Theorem::all_elim(&a(&thy, &all), &t), &[&all]);
    thy = store(thy, "spec", th, None);
    let ptr = mk_imp(&pt, &r).unwrap();
    let th = imps(
        Theorem::imp_elim(&a(&thy, &ptr), &Theorem::all_elim(&a(&thy, &all), &t).unwrap()),
        &[&all, &ptr],
    );
    thy = store(thy, "allE", th, None);
    let lam = dest_binder(EX, &ex).unwrap().clone();
    let th = imps(Theorem::exists_intro(&lam, &t, &a(&thy, &pt)), &[&pt]);
    thy = store(thy, "exI", th, None);
    let y = Term::free("y", a_ty());
    let py = Term::app(pred.clone(), y.clone()).unwrap();
    let step = mk_all("x", &a_ty(), &mk_imp(&Term::app(pred, Term::free("x", a_ty())).unwrap(), &q).unwrap()).unwrap();
    let q_from = Theorem::imp_elim(&Theorem::all_elim(&a(&thy, &step), &y).unwrap(), &a(&thy, &py)).unwrap();
    let th = imps(Theorem::exists_elim(&a(&thy, &ex), &q_from, &y), &[&ex, &step]);
    thy = store(thy, "exE", th, None);

    let s = Term::free("s", a_ty());
    let rr = Term::free("r", a_ty());
    let th = Theorem::refl(&thy, &t);
    thy = store(thy, "refl", th, None);
    let st = mk_eq(&s, &t).unwrap();
    let th = imps(sym(&a(&thy, &st)), &[&st]);
    thy = store(thy, "sym", th, None);
    let rs = mk_eq(&rr, &s).unwrap();
    let th = imps(trans(&a(&thy, &rs), &a(&thy, &st)), &[&rs, &st]);
    thy = store(thy, "trans", th, None);
    let th = eq_true(&Theorem::refl(&thy, &t).unwrap());
    thy = store(thy, "eq_self", th, None);
    simp_laws(thy)
}

/// `⊢ lhs = rhs` from derivations of each side from the other.
fn bool_eq(
    thy: &Theory,
    lhs: &Term,
    rhs: &Term,
    fwd: impl FnOnce(Theorem) -> Result<Theorem>,
    bwd: impl FnOnce(Theorem) -> Result<Theorem>,
) -> Result<Theorem> {
    let l = Theorem::imp_intro(&fwd(Theorem::assume(thy, lhs)?)?, lhs)?;
    let r = Theorem::imp_intro(&bwd(Theorem::assume(thy, rhs)?)?, rhs)?;
    Theorem::prop_ext(&l, &r)
}

/// Propositional identities the simplifier always uses.
fn simp_laws(mut thy: Theory) -> Theory {
    let Vars { p, .. } = vars();
    let (t, f) = (mk_true(), mk_false());
    let top = |thy: &Theory| true_intro(thy);
    let laws: Vec<(&str, Term, Term)> = vec![
        ("True_conj", mk_conj(&t, &p).unwrap(), p.clone()),
        ("conj_True", mk_conj(&p, &t).unwrap(), p.clone()),
        ("False_conj", mk_conj(&f, &p).unwrap(), f.clone()),
        ("conj_False", mk_conj(&p, &f).unwrap(), f.clone()),
        ("True_disj", mk_disj(&t, &p).unwrap(), t.clone()),
        ("disj_True", mk_disj(&p, &t).unwrap(), t.clone()),
        ("False_disj", mk_disj(&f, &p).unwrap(), p.clone()),
        ("disj_False", mk_disj(&p, &f).unwrap(), p.clone()),
        ("True_imp", mk_imp(&t, &p).unwrap(), p.clone()),
        ("imp_True", mk_imp(&p, &t).unwrap(), t.clone()),
        ("False_imp", mk_imp(&f, &p).unwrap(), t.clone()),
        ("imp_refl", mk_imp(&p, &p).unwrap(), t.clone()),
        ("not_True", mk_not(&t).unwrap(), f.clone()),
        ("not_False", mk_not(&f).unwrap(), t.clone()),
        ("eq_True", mk_eq(&p, &t).unwrap(), p.clone()),
        ("True_eq", mk_eq(&t, &p).unwrap(), p.clone()),
    ];
    for (name, lhs, rhs) in laws {
        let th = {
            let thy = &thy;
            let ff = |x: &Term| -> Result<Theorem> { Theorem::false_elim(&Theorem::assume(thy, &f)?, x) };
            match name {
                "True_conj" => bool_eq(thy, &lhs, &rhs, |h| Theorem::conj_elim2(&h), |h| Theorem::conj_intro(&top(thy)?, &h)),
                "conj_True" => bool_eq(thy, &lhs, &rhs, |h| Theorem::conj_elim1(&h), |h| Theorem::conj_intro(&h, &top(thy)?)),
                "False_conj" => bool_eq(thy, &lhs, &rhs, |h| Theorem::conj_elim1(&h), |h| Theorem::false_elim(&h, &lhs)),
                "conj_False" => bool_eq(thy, &lhs, &rhs, |h| Theorem::conj_elim2(&h), |h| Theorem::false_elim(&h, &lhs)),
                "True_disj" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |h| Theorem::disj_intro1(&h, &p)),
                "disj_True" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |h| Theorem::disj_intro2(&p, &h)),
                "False_disj" => bool_eq(
                    thy,
                    &lhs,
                    &rhs,
                    |h| Theorem::disj_elim(&h, &ff(&p)?, &Theorem::assume(thy, &p)?),
                    |h| Theorem::disj_intro2(&f, &h),
                ),
                "disj_False" => bool_eq(
                    thy,
                    &lhs,
                    &rhs,
                    |h| Theorem::disj_elim(&h, &Theorem::assume(thy, &p)?, &ff(&p)?),
                    |h| Theorem::disj_intro1(&h, &f),
                ),
                "True_imp" => bool_eq(thy, &lhs, &rhs, |h| Theorem::imp_elim(&h, &top(thy)?), |h| Theorem::imp_intro(&h, &t)),
                "imp_True" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |h| Theorem::imp_intro(&h, &p)),
                "False_imp" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |_| Theorem::imp_intro(&ff(&p)?, &f)),
                "imp_refl" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |_| Theorem::imp_intro(&Theorem::assume(thy, &p)?, &p)),
                "not_True" => bool_eq(thy, &lhs, &rhs, |h| not_elim(&h, &top(thy)?), |h| Theorem::false_elim(&h, &lhs)),
                "not_False" => bool_eq(thy, &lhs, &rhs, |_| top(thy), |_| not_intro(&Theorem::assume(thy, &f)?, &f)),
                "eq_True" => bool_eq(thy, &lhs, &rhs, |h| eq_mp(&sym(&h)?, &top(thy)?), |h| eq_true(&h)),
                _ => bool_eq(thy, &lhs, &rhs, |h| eq_mp(&h, &top(thy)?), |h| sym(&eq_true(&h)?)),
            }
        };
        thy = store(thy, name, th, None);
    }
    let x = Term::free("x", a_ty());
    let all_t = mk_all("x", &a_ty(), &t).unwrap();
    let th = bool_eq(&thy, &all_t, &t, |_| top(&thy), |h| Theorem::all_intro(&h, &x));
    store(thy, "all_True", th, None)
}

/// Facts the simplifier uses in addition to the rules it is given.
pub const SIMP_LAWS: &[&str] = &[
    "eq_self",
    "True_conj",
    "conj_True",
    "False_conj",
    "conj_False",
    "True_disj",
    "disj_True",
    "False_disj",
    "disj_False",
    "True_imp",
    "imp_True",
    "False_imp",
    "imp_refl",
    "not_True",
    "not_False",
    "eq_True",
    "True_eq",
    "all_True",
];

fn build_classical() -> Theory {
    let mut thy = Theory::new("Classical", vec![base().clone()], true).expect("fresh theory");
    let Vars { p, .. } = vars();
    let a = |thy: &Theory, t: &Term| Theorem::assume(thy, t).unwrap();
    let not_p = mk_not(&p).unwrap();
    let nn_p = mk_not(&not_p).unwrap();
    let th = Theorem::excluded_middle(&thy, &p);
    thy = store(thy, "em", th, None);
    let k = mk_imp(&not_p, &mk_false()).unwrap();
    let th = imps(dne(&fold_not(&a(&thy, &k)).unwrap()), &[&k]);
    thy = store(thy, "ccontr", th, Some(1));
    let k = mk_imp(&not_p, &p).unwrap();
    let bot = not_elim(&a(&thy, &not_p), &Theorem::imp_elim(&a(&thy, &k), &a(&thy, &not_p)).unwrap()).unwrap();
    let th = imps(dne(&not_intro(&bot, &not_p).unwrap()), &[&k]);
    thy = store(thy, "classical", th, Some(1));
    let th = imps(dne(&a(&thy, &nn_p)), &[&nn_p]);
    store(thy, "notnotD", th, None)
}

/// The intuitionistic base theory.
pub fn base() -> &'static Theory {
    static BASE: OnceLock<Theory> = OnceLock::new();
    BASE.get_or_init(build_base)
}

/// `Base` plus excluded middle.
pub fn classical() -> &'static Theory {
    static CLASSICAL: OnceLock<Theory> = OnceLock::new();
    CLASSICAL.get_or_init(build_classical)
}

/// Looks up a built-in theory by name.
pub fn builtin(name: &str) -> Option<&'static Theory> {
    match name {
        "Base" => Some(base()),
        "Classical" => Some(classical()),
        _ => None,
    }
}

/// True for the atoms of propositional structure: anything whose head is
/// not one of the connectives.
pub fn is_prop_atom(t: &Term) -> bool {
    match t.head().kind() {
        TermKind::Const(c) => {
            !(matches!(c.as_ref(), CONJ | DISJ | IMP | IFF | NOT | TRUE | FALSE)
                && t.strip_comb().1.len() == expected_args(c))
        }
        _ => true,
    }
}

fn expected_args(c: &str) -> usize {
    match c {
        CONJ | DISJ | IMP | IFF => 2,
        NOT => 1,
        _ => 0,
    }
}
