//! Derived inference rules: functions from theorems to theorems that use
//! only kernel primitives.

use std::cell::RefCell;

use crate::kernel::{KernelError, Theorem};
use crate::term::logic::*;
use crate::term::{Term, Type};
use crate::Theory;

type Result<T> = std::result::Result<T, KernelError>;

fn fact(thy: &Theory, name: &str) -> Result<Theorem> {
    thy.lookup_fact(name)
        .map(|(f, _)| f.thm.clone())
        .ok_or_else(|| KernelError::Signature(format!("missing fact {name}")))
}

fn rule_err(rule: &'static str, msg: String) -> KernelError {
    KernelError::Rule { rule, msg }
}

/// `λz. body(z)` where `z` is the bound variable passed to `body`.
/// Everything else mentioned by `body` must be closed.
pub fn template(ty: &Type, body: impl FnOnce(&Term) -> std::result::Result<Term, crate::term::TypeError>) -> Result<Term> {
    let z = Term::bound(0, ty.clone());
    Ok(Term::abs("z", ty.clone(), body(&z)?)?)
}

fn dest_eq_thm(th: &Theorem) -> Result<(Term, Term)> {
    dest_eq(th.concl())
        .map(|(a, b)| (a.clone(), b.clone()))
        .ok_or_else(|| rule_err("equation", format!("not an equation: {}", th.concl())))
}

/// `⊢ s = t` gives `⊢ t = s`.
pub fn sym(th: &Theorem) -> Result<Theorem> {
    let (s, _) = dest_eq_thm(th)?;
    let refl = Theorem::refl(th.theory(), &s)?;
    let tpl = template(s.ty(), |z| mk_eq(z, &s))?;
    Theorem::subst_eq(th, &tpl, &refl)
}

/// `⊢ a = b`, `⊢ b = c` gives `⊢ a = c`.
pub fn trans(ab: &Theorem, bc: &Theorem) -> Result<Theorem> {
    let (a, _) = dest_eq_thm(ab)?;
    let tpl = template(a.ty(), |z| mk_eq(&a, z))?;
    Theorem::subst_eq(bc, &tpl, ab)
}

/// `⊢ x = y` gives `⊢ f x = f y`.
pub fn cong_arg(f: &Term, xy: &Theorem) -> Result<Theorem> {
    let (x, _) = dest_eq_thm(xy)?;
    let fx = Term::app(f.clone(), x.clone())?;
    let refl = Theorem::refl(xy.theory(), &fx)?;
    let tpl = template(x.ty(), |z| mk_eq(&fx, &Term::app(f.clone(), z.clone())?))?;
    Theorem::subst_eq(xy, &tpl, &refl)
}

/// `⊢ f = g` gives `⊢ f x = g x`.
pub fn cong_fun(fg: &Theorem, x: &Term) -> Result<Theorem> {
    let (f, _) = dest_eq_thm(fg)?;
    let fx = Term::app(f.clone(), x.clone())?;
    let refl = Theorem::refl(fg.theory(), &fx)?;
    let tpl = template(f.ty(), |h| mk_eq(&fx, &Term::app(h.clone(), x.clone())?))?;
    Theorem::subst_eq(fg, &tpl, &refl)
}

/// `⊢ p = q`, `⊢ p` gives `⊢ q`.
pub fn eq_mp(eq: &Theorem, th: &Theorem) -> Result<Theorem> {
    let tpl = template(&Type::bool(), |z| Ok(z.clone()))?;
    Theorem::subst_eq(eq, &tpl, th)
}

/// Rewrites `c args` with the definition `⊢ c = rhs`, in either direction.
fn unfold_app(def: &Theorem, args: &[&Term], th: &Theorem) -> Result<Theorem> {
    let (c, _) = dest_eq_thm(def)?;
    let args: Vec<Term> = args.iter().map(|a| (*a).clone()).collect();
    let tpl = template(c.ty(), |n| Term::app_n(n.clone(), args))?;
    Theorem::subst_eq(def, &tpl, th)
}

/// `⊢ ¬φ` gives `⊢ φ → ⊥`.
pub fn unfold_not(th: &Theorem) -> Result<Theorem> {
    let phi = dest_not(th.concl()).ok_or_else(|| rule_err("unfold_not", format!("not a negation: {}", th.concl())))?;
    unfold_app(&fact(th.theory(), "Not_def")?, &[phi], th)
}

/// `⊢ (λp. p → ⊥) = Not`, derived once per defining theory.
fn not_def_sym(thy: &Theory) -> Result<Theorem> {
    thread_local! {
        static CACHE: RefCell<Vec<(u64, Theorem)>> = const { RefCell::new(Vec::new()) };
    }
    let def = fact(thy, "Not_def")?;
    let id = def.theory().id();
    if let Some(th) = CACHE.with(|c| c.borrow().iter().find(|(k, _)| *k == id).map(|(_, t)| t.clone())) {
        return Ok(th);
    }
    let th = sym(&def)?;
    CACHE.with(|c| {
        let mut c = c.borrow_mut();
        if c.len() >= 64 {
            c.clear();
        }
        c.push((id, th.clone()));
    });
    Ok(th)
}

/// `⊢ φ → ⊥` gives `⊢ ¬φ`.
pub fn fold_not(th: &Theorem) -> Result<Theorem> {
    let (phi, f) = dest_imp(th.concl()).ok_or_else(|| rule_err("fold_not", format!("not an implication: {}", th.concl())))?;
    if !is_const(f, FALSE) {
        return Err(rule_err("fold_not", format!("not a negation: {}", th.concl())));
    }
    let phi = phi.clone();
    unfold_app(&not_def_sym(th.theory())?, &[&phi], th)
}

/// `⊢ ¬φ`, `⊢ φ` gives `⊢ ⊥`.
pub fn not_elim(neg: &Theorem, th: &Theorem) -> Result<Theorem> {
    Theorem::imp_elim(&unfold_not(neg)?, th)
}

/// `Γ ⊢ ⊥` gives `Γ ∖ {φ} ⊢ ¬φ`.
pub fn not_intro(th: &Theorem, phi: &Term) -> Result<Theorem> {
    fold_not(&Theorem::imp_intro(th, phi)?)
}

/// `⊢ ⊤`
pub fn true_intro(thy: &Theory) -> Result<Theorem> {
    let f = mk_false();
    let ff = Theorem::imp_intro(&Theorem::assume(thy, &f)?, &f)?;
    eq_mp(&sym(&fact(thy, "True_def")?)?, &ff)
}

/// `⊢ ¬¬φ` gives `⊢ φ` in a classical theory.
pub fn dne(th: &Theorem) -> Result<Theorem> {
    let nphi = dest_not(th.concl()).ok_or_else(|| rule_err("dne", format!("not a negation: {}", th.concl())))?;
    let phi = dest_not(nphi).ok_or_else(|| rule_err("dne", format!("not a double negation: {}", th.concl())))?;
    let thy = th.theory();
    let em = Theorem::excluded_middle(thy, phi)?;
    let pos = Theorem::assume(thy, phi)?;
    let neg = Theorem::false_elim(&not_elim(th, &Theorem::assume(thy, nphi)?)?, phi)?;
    Theorem::disj_elim(&em, &pos, &neg)
}

/// `⊢ φ ↔ ψ` gives `⊢ (φ → ψ) ∧ (ψ → φ)`.
pub fn unfold_iff(th: &Theorem) -> Result<Theorem> {
    let (a, b) = dest_iff(th.concl()).ok_or_else(|| rule_err("unfold_iff", format!("not an equivalence: {}", th.concl())))?;
    let (a, b) = (a.clone(), b.clone());
    unfold_app(&fact(th.theory(), "iff_def")?, &[&a, &b], th)
}

/// `⊢ (φ → ψ) ∧ (ψ → φ)` gives `⊢ φ ↔ ψ`.
pub fn fold_iff(th: &Theorem) -> Result<Theorem> {
    let (l, _) = dest_conj(th.concl()).ok_or_else(|| rule_err("fold_iff", format!("not a conjunction: {}", th.concl())))?;
    let (a, b) = dest_imp(l).ok_or_else(|| rule_err("fold_iff", format!("not an implication: {l}")))?;
    let (a, b) = (a.clone(), b.clone());
    unfold_app(&sym(&fact(th.theory(), "iff_def")?)?, &[&a, &b], th)
}

/// `⊢ φ ↔ ψ` gives `⊢ φ = ψ`.
pub fn iff_to_eq(th: &Theorem) -> Result<Theorem> {
    let c = unfold_iff(th)?;
    Theorem::prop_ext(&Theorem::conj_elim1(&c)?, &Theorem::conj_elim2(&c)?)
}

/// `⊢ φ` gives `⊢ φ = ⊤`.
pub fn eq_true(th: &Theorem) -> Result<Theorem> {
    let thy = th.theory();
    let t = mk_true();
    let to_true = Theorem::imp_intro(&true_intro(thy)?, th.concl())?;
    let from_true = Theorem::imp_intro(th, &t)?;
    Theorem::prop_ext(&to_true, &from_true)
}

/// `⊢ ¬φ` gives `⊢ φ = ⊥`.
pub fn eq_false(th: &Theorem) -> Result<Theorem> {
    let phi = dest_not(th.concl()).ok_or_else(|| rule_err("eq_false", format!("not a negation: {}", th.concl())))?.clone();
    let to_false = unfold_not(th)?;
    let f = mk_false();
    let from_false = Theorem::imp_intro(&Theorem::false_elim(&Theorem::assume(th.theory(), &f)?, &phi)?, &f)?;
    Theorem::prop_ext(&to_false, &from_false)
}

/// `⊢ φ₁ → … → φₙ → ψ` and `⊢ φᵢ` for each `i` give `⊢ ψ`.
pub fn mp_chain(th: &Theorem, args: &[Theorem]) -> Result<Theorem> {
    args.iter().try_fold(th.clone(), |acc, a| Theorem::imp_elim(&acc, a))
}
