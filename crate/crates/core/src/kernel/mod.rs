//! The trusted core.
//!
//! [`Theorem`] values can only be created by the functions in this module:
//! the fields are private and there is no public constructor. Everything
//! else in the crate (tactics, automation, theory loading) builds theorems
//! by calling these rules.

pub mod theory;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use theory::{is_instance, ConstInfo, ConstKind, Fact, FactKind, Theory};

use crate::term::logic::*;
use crate::term::{beta_normalize, Name, Term, TermKind, TyVar, Type, TypeError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("theorems from unrelated theories {left} and {right}")]
    TheoryMismatch { left: String, right: String },
    #[error("{rule}: {msg}")]
    Rule { rule: &'static str, msg: String },
    #[error("eigenvariable {var} occurs free in {hyp}")]
    Eigenvariable { var: String, hyp: String },
    #[error("excluded middle is not available in the intuitionistic theory {theory}")]
    ClassicalRule { theory: String },
    #[error("signature error: {0}")]
    Signature(String),
    #[error("bad definition: {0}")]
    Definition(String),
}

type Result<T> = std::result::Result<T, KernelError>;

fn rule_err(rule: &'static str, msg: impl Into<String>) -> KernelError {
    KernelError::Rule { rule, msg: msg.into() }
}

fn mismatch(rule: &'static str, expected: &Term, actual: &Term) -> KernelError {
    rule_err(rule, format!("expected {expected}, got {actual}"))
}

/// A sequent `hyps ⊢ concl` certified by the kernel.
///
/// Code outside the kernel cannot build one directly:
///
/// ```compile_fail
/// let thy = lcfkit::Theory::primitive_base("T");
/// let th = lcfkit::Theorem {
///     hyps: Default::default(),
///     concl: lcfkit::term::logic::mk_false(),
///     theory: thy,
/// };
/// ```
#[derive(Clone)]
pub struct Theorem {
    hyps: Arc<Vec<Term>>,
    concl: Term,
    theory: Theory,
}

impl fmt::Debug for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.hyps.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.hyps.is_empty() {
            f.write_str(" ")?;
        }
        write!(f, "⊢ {}", self.concl)
    }
}

fn union(a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = a.to_vec();
    for h in b {
        if !out.contains(h) {
            out.push(h.clone());
        }
    }
    out
}

fn without(hyps: &[Term], phi: &Term) -> Vec<Term> {
    hyps.iter().filter(|h| *h != phi).cloned().collect()
}

fn check_formula(thy: &Theory, phi: &Term) -> Result<()> {
    phi.expect_bool()?;
    thy.check_term(phi)
}

/// A simultaneous instantiation of schematic term variables (by name and
/// index) and type variables.
#[derive(Clone, Debug, Default)]
pub struct Instantiation {
    pub types: HashMap<TyVar, Type>,
    pub terms: HashMap<(Name, u32), Term>,
}

impl Instantiation {
    pub fn is_empty(&self) -> bool {
        self.types.is_empty() && self.terms.is_empty()
    }

    /// Applies the instantiation and beta-normalises. Fails if an
    /// occurrence's (type-instantiated) type differs from its replacement.
    pub fn apply(&self, t: &Term) -> Result<Term> {
        if self.is_empty() {
            return Ok(t.clone());
        }
        let typed = t.subst_types(&self.types);
        let mut err = None;
        typed.for_each_leaf(&mut |leaf| {
            if let TermKind::Schematic(n, i) = leaf.kind() {
                if let Some(r) = self.terms.get(&(n.clone(), *i)) {
                    if r.ty() != leaf.ty() && err.is_none() {
                        err = Some(TypeError::SubstMismatch {
                            var: format!("?{n}.{i}"),
                            expected: leaf.ty().clone(),
                            found: r.ty().clone(),
                        });
                    }
                }
            }
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        let out = typed.map_leaves(&mut |leaf| match leaf.kind() {
            TermKind::Schematic(n, i) => self.terms.get(&(n.clone(), *i)).cloned(),
            _ => None,
        });
        Ok(beta_normalize(&out))
    }
}

impl Theorem {
    pub(crate) fn make(hyps: Vec<Term>, concl: Term, theory: Theory) -> Theorem {
        Theorem {
            hyps: Arc::new(hyps),
            concl,
            theory,
        }
    }

    pub fn hyps(&self) -> &[Term] {
        &self.hyps
    }

    pub fn concl(&self) -> &Term {
        &self.concl
    }

    pub fn theory(&self) -> &Theory {
        &self.theory
    }

    /// `{φ} ⊢ φ`
    pub fn assume(thy: &Theory, phi: &Term) -> Result<Theorem> {
        check_formula(thy, phi)?;
        Ok(Theorem::make(vec![phi.clone()], phi.clone(), thy.clone()))
    }

    /// `Γ ⊢ φ`, `Δ ⊢ ψ` gives `Γ ∪ Δ ⊢ φ ∧ ψ`.
    pub fn conj_intro(a: &Theorem, b: &Theorem) -> Result<Theorem> {
        let thy = Theory::join(&a.theory, &b.theory)?;
        let concl = mk_conj(&a.concl, &b.concl)?;
        Ok(Theorem::make(union(&a.hyps, &b.hyps), concl, thy))
    }

    pub fn conj_elim1(a: &Theorem) -> Result<Theorem> {
        let (l, _) = dest_conj(&a.concl).ok_or_else(|| rule_err("conj_elim1", format!("not a conjunction: {}", a.concl)))?;
        Ok(Theorem::make(a.hyps.to_vec(), l.clone(), a.theory.clone()))
    }

    pub fn conj_elim2(a: &Theorem) -> Result<Theorem> {
        let (_, r) = dest_conj(&a.concl).ok_or_else(|| rule_err("conj_elim2", format!("not a conjunction: {}", a.concl)))?;
        Ok(Theorem::make(a.hyps.to_vec(), r.clone(), a.theory.clone()))
    }

    /// `Γ ⊢ φ` gives `Γ ⊢ φ ∨ ψ`.
    pub fn disj_intro1(a: &Theorem, psi: &Term) -> Result<Theorem> {
        check_formula(&a.theory, psi)?;
        Ok(Theorem::make(a.hyps.to_vec(), mk_disj(&a.concl, psi)?, a.theory.clone()))
    }

    /// `Γ ⊢ ψ` gives `Γ ⊢ φ ∨ ψ`.
    pub fn disj_intro2(phi: &Term, a: &Theorem) -> Result<Theorem> {
        check_formula(&a.theory, phi)?;
        Ok(Theorem::make(a.hyps.to_vec(), mk_disj(phi, &a.concl)?, a.theory.clone()))
    }

    /// `Γ ⊢ φ ∨ ψ`, `Δ₁ ⊢ θ`, `Δ₂ ⊢ θ` gives `Γ ∪ (Δ₁ ∖ φ) ∪ (Δ₂ ∖ ψ) ⊢ θ`.
    pub fn disj_elim(a: &Theorem, b: &Theorem, c: &Theorem) -> Result<Theorem> {
        let (phi, psi) =
            dest_disj(&a.concl).ok_or_else(|| rule_err("disj_elim", format!("not a disjunction: {}", a.concl)))?;
        if b.concl != c.concl {
            return Err(mismatch("disj_elim", &b.concl, &c.concl));
        }
        let thy = Theory::join(&Theory::join(&a.theory, &b.theory)?, &c.theory)?;
        let hyps = union(&union(&a.hyps, &without(&b.hyps, phi)), &without(&c.hyps, psi));
        Ok(Theorem::make(hyps, b.concl.clone(), thy))
    }

    /// `Γ ⊢ ψ` gives `Γ ∖ {φ} ⊢ φ → ψ`.
    pub fn imp_intro(a: &Theorem, phi: &Term) -> Result<Theorem> {
        check_formula(&a.theory, phi)?;
        let concl = mk_imp(phi, &a.concl)?;
        Ok(Theorem::make(without(&a.hyps, phi), concl, a.theory.clone()))
    }

    /// `Γ ⊢ φ → ψ`, `Δ ⊢ φ` gives `Γ ∪ Δ ⊢ ψ`.
    pub fn imp_elim(a: &Theorem, b: &Theorem) -> Result<Theorem> {
        let (phi, psi) =
            dest_imp(&a.concl).ok_or_else(|| rule_err("imp_elim", format!("not an implication: {}", a.concl)))?;
        if phi != &b.concl {
            return Err(mismatch("imp_elim", phi, &b.concl));
        }
        let thy = Theory::join(&a.theory, &b.theory)?;
        Ok(Theorem::make(union(&a.hyps, &b.hyps), psi.clone(), thy))
    }

    fn check_eigen(var: &Term, hyps: &[Term]) -> Result<(Name, Type)> {
        let (name, ty) = var
            .dest_free()
            .ok_or_else(|| rule_err("eigenvariable", format!("{var:?} is not a free variable")))?;
        if let Some(h) = hyps.iter().find(|h| h.has_free(name, ty)) {
            return Err(KernelError::Eigenvariable {
                var: name.to_string(),
                hyp: h.to_string(),
            });
        }
        Ok((name.clone(), ty.clone()))
    }

    /// `Γ ⊢ φ` gives `Γ ⊢ ∀x. φ` provided `x` is not free in `Γ`.
    pub fn all_intro(a: &Theorem, x: &Term) -> Result<Theorem> {
        let (name, ty) = Theorem::check_eigen(x, &a.hyps)?;
        a.theory.check_type(&ty)?;
        let concl = mk_all(&name, &ty, &a.concl)?;
        Ok(Theorem::make(a.hyps.to_vec(), concl, a.theory.clone()))
    }

    /// `Γ ⊢ ∀x. φ` gives `Γ ⊢ φ[t/x]`.
    pub fn all_elim(a: &Theorem, t: &Term) -> Result<Theorem> {
        let pred = dest_binder(ALL, &a.concl)
            .ok_or_else(|| rule_err("all_elim", format!("not a universal: {}", a.concl)))?;
        a.theory.check_term(t)?;
        let concl = instantiate_pred(pred, t)?;
        Ok(Theorem::make(a.hyps.to_vec(), concl, a.theory.clone()))
    }

    /// From `Γ ⊢ body witness` (up to beta) conclude `Γ ⊢ ∃x. body x`.
    pub fn exists_intro(body: &Term, witness: &Term, a: &Theorem) -> Result<Theorem> {
        let (_, bty, inner) =
            body.dest_abs().ok_or_else(|| rule_err("exists_intro", format!("not an abstraction: {body:?}")))?;
        inner.expect_bool()?;
        a.theory.check_term(body)?;
        a.theory.check_term(witness)?;
        if bty != witness.ty() {
            return Err(TypeError::BadApplication {
                fun_ty: body.ty().clone(),
                arg_ty: witness.ty().clone(),
            }
            .into());
        }
        let expected = beta_normalize(&Term::app(body.clone(), witness.clone())?);
        if expected != a.concl {
            return Err(mismatch("exists_intro", &expected, &a.concl));
        }
        let concl = mk_binder(EX, body)?;
        Ok(Theorem::make(a.hyps.to_vec(), concl, a.theory.clone()))
    }

    /// `Γ ⊢ ∃x. φ`, `Δ ⊢ θ` with eigenvariable `y` gives
    /// `Γ ∪ (Δ ∖ {φ[y/x]}) ⊢ θ`; `y` must not be free in `θ`, `∃x. φ` or the
    /// remaining hypotheses of `Δ`.
    pub fn exists_elim(a: &Theorem, b: &Theorem, y: &Term) -> Result<Theorem> {
        let pred = dest_binder(EX, &a.concl)
            .ok_or_else(|| rule_err("exists_elim", format!("not an existential: {}", a.concl)))?;
        if pred.ty().dest_fun().map(|(d, _)| d) != Some(y.ty()) {
            return Err(TypeError::BadApplication {
                fun_ty: pred.ty().clone(),
                arg_ty: y.ty().clone(),
            }
            .into());
        }
        let inst = instantiate_pred(pred, y)?;
        let rest = without(&b.hyps, &inst);
        let mut side = rest.clone();
        side.push(b.concl.clone());
        side.push(a.concl.clone());
        Theorem::check_eigen(y, &side)?;
        let thy = Theory::join(&a.theory, &b.theory)?;
        Ok(Theorem::make(union(&a.hyps, &rest), b.concl.clone(), thy))
    }

    /// `⊢ t = t`
    pub fn refl(thy: &Theory, t: &Term) -> Result<Theorem> {
        thy.check_term(t)?;
        Ok(Theorem::make(vec![], mk_eq(t, t)?, thy.clone()))
    }

    /// `⊢ (λx. b) a = b[a/x]`
    pub fn beta_conv(thy: &Theory, t: &Term) -> Result<Theorem> {
        let (f, a) = t.dest_app().ok_or_else(|| rule_err("beta_conv", format!("not a redex: {t}")))?;
        let (_, _, body) = f.dest_abs().ok_or_else(|| rule_err("beta_conv", format!("not a redex: {t}")))?;
        thy.check_term(t)?;
        let rhs = Term::instantiate_bound(body, a);
        Ok(Theorem::make(vec![], mk_eq(t, &rhs)?, thy.clone()))
    }

    /// `Γ ⊢ s = t`, `Δ ⊢ P s` gives `Γ ∪ Δ ⊢ P t` for a template `P`.
    /// Both sides are compared and produced up to beta-normalisation.
    pub fn subst_eq(e: &Theorem, template: &Term, a: &Theorem) -> Result<Theorem> {
        let (s, t) = dest_eq(&e.concl).ok_or_else(|| rule_err("subst_eq", format!("not an equation: {}", e.concl)))?;
        let (_, bty, inner) =
            template.dest_abs().ok_or_else(|| rule_err("subst_eq", format!("template is not an abstraction: {template:?}")))?;
        inner.expect_bool()?;
        if bty != s.ty() {
            return Err(TypeError::BadApplication {
                fun_ty: template.ty().clone(),
                arg_ty: s.ty().clone(),
            }
            .into());
        }
        let thy = Theory::join(&e.theory, &a.theory)?;
        thy.check_term(template)?;
        let before = beta_normalize(&Term::instantiate_bound(inner, s));
        if before != a.concl {
            return Err(mismatch("subst_eq", &before, &a.concl));
        }
        let after = beta_normalize(&Term::instantiate_bound(inner, t));
        Ok(Theorem::make(union(&e.hyps, &a.hyps), after, thy))
    }

    /// `Γ ⊢ s = t` gives `Γ ⊢ (λx. s) = (λx. t)` when `x` is not free in `Γ`.
    pub fn abs_cong(e: &Theorem, x: &Term) -> Result<Theorem> {
        let (s, t) = dest_eq(&e.concl).ok_or_else(|| rule_err("abs_cong", format!("not an equation: {}", e.concl)))?;
        let (name, ty) = Theorem::check_eigen(x, &e.hyps)?;
        e.theory.check_type(&ty)?;
        let concl = mk_eq(&Term::lambda(&name, &ty, s), &Term::lambda(&name, &ty, t))?;
        Ok(Theorem::make(e.hyps.to_vec(), concl, e.theory.clone()))
    }

    /// `Γ ⊢ φ → ψ`, `Δ ⊢ ψ → φ` gives `Γ ∪ Δ ⊢ φ = ψ`.
    pub fn prop_ext(a: &Theorem, b: &Theorem) -> Result<Theorem> {
        let (p, q) = dest_imp(&a.concl).ok_or_else(|| rule_err("prop_ext", format!("not an implication: {}", a.concl)))?;
        let (q2, p2) = dest_imp(&b.concl).ok_or_else(|| rule_err("prop_ext", format!("not an implication: {}", b.concl)))?;
        if p != p2 || q != q2 {
            return Err(mismatch("prop_ext", &mk_imp(q, p)?, &b.concl));
        }
        let thy = Theory::join(&a.theory, &b.theory)?;
        Ok(Theorem::make(union(&a.hyps, &b.hyps), mk_eq(p, q)?, thy))
    }

    /// `Γ ⊢ ⊥` gives `Γ ⊢ φ`.
    pub fn false_elim(a: &Theorem, phi: &Term) -> Result<Theorem> {
        if !is_const(&a.concl, FALSE) {
            return Err(mismatch("false_elim", &mk_false(), &a.concl));
        }
        check_formula(&a.theory, phi)?;
        Ok(Theorem::make(a.hyps.to_vec(), phi.clone(), a.theory.clone()))
    }

    /// `⊢ φ ∨ ¬φ`, only in classical theories.
    pub fn excluded_middle(thy: &Theory, phi: &Term) -> Result<Theorem> {
        if !thy.is_classical() {
            return Err(KernelError::ClassicalRule {
                theory: thy.name().to_string(),
            });
        }
        check_formula(thy, phi)?;
        Ok(Theorem::make(vec![], mk_disj(phi, &mk_not(phi)?)?, thy.clone()))
    }

    /// Instantiates schematic and type variables throughout hypotheses and
    /// conclusion, then beta-normalises.
    pub fn inst(a: &Theorem, env: &Instantiation) -> Result<Theorem> {
        if env.is_empty() {
            return Ok(a.clone());
        }
        for ty in env.types.values() {
            a.theory.check_type(ty)?;
        }
        for t in env.terms.values() {
            a.theory.check_term(t)?;
        }
        let mut hyps: Vec<Term> = Vec::with_capacity(a.hyps.len());
        for h in a.hyps.iter() {
            let h = env.apply(h)?;
            if !hyps.contains(&h) {
                hyps.push(h);
            }
        }
        let concl = env.apply(&a.concl)?;
        Ok(Theorem::make(hyps, concl, a.theory.clone()))
    }

    /// Replaces the free variable `x` in the conclusion by a fresh schematic.
    pub fn generalize(a: &Theorem, x: &Term) -> Result<Theorem> {
        let (name, ty) = Theorem::check_eigen(x, &a.hyps)?;
        let idx = a
            .concl
            .schematic_vars()
            .iter()
            .filter(|v| v.name == name)
            .filter_map(|v| v.index)
            .max()
            .map_or(0, |i| i + 1);
        let sv = Term::schematic(name.clone(), idx, ty.clone());
        let concl = a.concl.subst_free(&[(crate::term::Var::free(name, ty), sv)])?;
        Ok(Theorem::make(a.hyps.to_vec(), concl, a.theory.clone()))
    }

    /// Moves the theorem into a theory that extends its own.
    pub fn transfer(a: &Theorem, thy: &Theory) -> Result<Theorem> {
        if !thy.extends(&a.theory) {
            return Err(KernelError::TheoryMismatch {
                left: thy.name().to_string(),
                right: a.theory.name().to_string(),
            });
        }
        Ok(Theorem::make(a.hyps.to_vec(), a.concl.clone(), thy.clone()))
    }
}

/// `pred t`, reduced one step when `pred` is an abstraction.
fn instantiate_pred(pred: &Term, t: &Term) -> Result<Term> {
    match pred.dest_abs() {
        Some((_, bty, body)) => {
            if bty != t.ty() {
                return Err(TypeError::BadApplication {
                    fun_ty: pred.ty().clone(),
                    arg_ty: t.ty().clone(),
                }
                .into());
            }
            Ok(Term::instantiate_bound(body, t))
        }
        None => Ok(Term::app(pred.clone(), t.clone())?),
    }
}
