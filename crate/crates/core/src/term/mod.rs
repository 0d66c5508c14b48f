//! Terms and types of simple type theory.
//!
//! Bound variables are de Bruijn indices; the name stored on an abstraction
//! is only used for display, so structural equality is alpha-equivalence.
//! Every node caches its type, the number of loose bound variables and a
//! name-insensitive hash.

mod ops;
pub mod logic;
pub mod types;

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

pub use ops::{beta_normalize, beta_normalize_small_step, Var, VarSet};
pub use types::{TyVar, Type};

pub type Name = Arc<str>;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("cannot apply function of type {fun_ty} to argument of type {arg_ty}")]
    BadApplication { fun_ty: Type, arg_ty: Type },
    #[error("expected a formula of type bool, found {0}")]
    NotBool(Type),
    #[error("cannot replace {var} : {expected} by a term of type {found}")]
    SubstMismatch {
        var: String,
        expected: Type,
        found: Type,
    },
    #[error("bound variable {index} has type {found}, binder expects {expected}")]
    BadBound {
        index: u32,
        expected: Type,
        found: Type,
    },
}

#[derive(Clone)]
pub enum TermKind {
    Free(Name),
    Schematic(Name, u32),
    Const(Name),
    Bound(u32),
    App(Term, Term),
    Abs(Name, Type, Term),
}

struct Node {
    kind: TermKind,
    ty: Type,
    /// 1 + the largest loose bound index, 0 when closed.
    loose: u32,
    hash: u64,
}

/// An immutable, well-typed lambda term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

fn hash_of(tag: u8, f: impl FnOnce(&mut DefaultHasher)) -> u64 {
    let mut h = DefaultHasher::new();
    tag.hash(&mut h);
    f(&mut h);
    h.finish()
}

impl Term {
    fn mk(kind: TermKind, ty: Type) -> Term {
        let (loose, hash) = match &kind {
            TermKind::Free(n) => (0, hash_of(0, |h| (n, &ty).hash(h))),
            TermKind::Schematic(n, i) => (0, hash_of(1, |h| (n, i, &ty).hash(h))),
            TermKind::Const(n) => (0, hash_of(2, |h| (n, &ty).hash(h))),
            TermKind::Bound(i) => (i + 1, hash_of(3, |h| (i, &ty).hash(h))),
            TermKind::App(f, x) => (
                f.0.loose.max(x.0.loose),
                hash_of(4, |h| (f.0.hash, x.0.hash).hash(h)),
            ),
            TermKind::Abs(_, bty, body) => (
                body.0.loose.saturating_sub(1),
                hash_of(5, |h| (bty, body.0.hash).hash(h)),
            ),
        };
        Term(Arc::new(Node {
            kind,
            ty,
            loose,
            hash,
        }))
    }

    pub fn free(name: impl Into<Name>, ty: Type) -> Term {
        Term::mk(TermKind::Free(name.into()), ty)
    }

    pub fn schematic(name: impl Into<Name>, idx: u32, ty: Type) -> Term {
        Term::mk(TermKind::Schematic(name.into(), idx), ty)
    }

    pub fn constant(name: impl Into<Name>, ty: Type) -> Term {
        Term::mk(TermKind::Const(name.into()), ty)
    }

    pub fn bound(idx: u32, ty: Type) -> Term {
        Term::mk(TermKind::Bound(idx), ty)
    }

    /// Builds `f x`, checking that the types line up.
    pub fn app(f: Term, x: Term) -> Result<Term, TypeError> {
        match f.ty().dest_fun() {
            Some((dom, cod)) if dom == x.ty() => {
                let cod = cod.clone();
                Ok(Term::mk(TermKind::App(f, x), cod))
            }
            _ => Err(TypeError::BadApplication {
                fun_ty: f.ty().clone(),
                arg_ty: x.ty().clone(),
            }),
        }
    }

    pub fn app_n(f: Term, args: impl IntoIterator<Item = Term>) -> Result<Term, TypeError> {
        args.into_iter().try_fold(f, Term::app)
    }

    /// Caller guarantees the application is well-typed.
    pub(crate) fn app_unchecked(f: Term, x: Term) -> Term {
        debug_assert!(matches!(f.ty().dest_fun(), Some((d, _)) if d == x.ty()));
        let cod = f.ty().dest_fun().map(|(_, c)| c.clone()).unwrap_or_else(Type::bool);
        Term::mk(TermKind::App(f, x), cod)
    }

    /// Builds an abstraction over a body already in de Bruijn form.
    /// Loose occurrences of index 0 in `body` must have type `bty`.
    pub fn abs(name: impl Into<Name>, bty: Type, body: Term) -> Result<Term, TypeError> {
        ops::check_bound_type(&body, 0, &bty)?;
        Ok(Term::abs_unchecked(name.into(), bty, body))
    }

    pub(crate) fn abs_unchecked(name: Name, bty: Type, body: Term) -> Term {
        let ty = Type::fun(bty.clone(), body.ty().clone());
        Term::mk(TermKind::Abs(name, bty, body), ty)
    }

    /// `λname. body` abstracting every occurrence of the free variable `name : ty`.
    pub fn lambda(name: &str, ty: &Type, body: &Term) -> Term {
        let inner = ops::abstract_free(body, name, ty, 0);
        Term::abs_unchecked(name.into(), ty.clone(), inner)
    }

    pub fn kind(&self) -> &TermKind {
        &self.0.kind
    }

    pub fn ty(&self) -> &Type {
        &self.0.ty
    }

    /// `1 + max loose bound index`, or 0 if there are none.
    pub fn loose_bound(&self) -> u32 {
        self.0.loose
    }

    pub fn is_closed(&self) -> bool {
        self.0.loose == 0
    }

    pub fn ptr_eq(&self, other: &Term) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind(), TermKind::Free(_))
    }

    pub fn is_schematic(&self) -> bool {
        matches!(self.kind(), TermKind::Schematic(..))
    }

    pub fn dest_free(&self) -> Option<(&Name, &Type)> {
        match self.kind() {
            TermKind::Free(n) => Some((n, self.ty())),
            _ => None,
        }
    }

    pub fn dest_const(&self) -> Option<(&Name, &Type)> {
        match self.kind() {
            TermKind::Const(n) => Some((n, self.ty())),
            _ => None,
        }
    }

    pub fn dest_app(&self) -> Option<(&Term, &Term)> {
        match self.kind() {
            TermKind::App(f, x) => Some((f, x)),
            _ => None,
        }
    }

    pub fn dest_abs(&self) -> Option<(&Name, &Type, &Term)> {
        match self.kind() {
            TermKind::Abs(n, t, b) => Some((n, t, b)),
            _ => None,
        }
    }

    /// Head and arguments of an application spine.
    pub fn strip_comb(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let TermKind::App(f, x) = t.kind() {
            args.push(x);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head(&self) -> &Term {
        let mut t = self;
        while let TermKind::App(f, _) = t.kind() {
            t = f;
        }
        t
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self.kind() {
            TermKind::App(f, x) => 1 + f.size() + x.size(),
            TermKind::Abs(_, _, b) => 1 + b.size(),
            _ => 1,
        }
    }

    /// Opens an abstraction body by replacing bound index 0 with `arg`.
    pub fn instantiate_bound(body: &Term, arg: &Term) -> Term {
        ops::instantiate(body, arg, 0)
    }

    /// Type of the term. Terms are checked on construction, so this never fails.
    pub fn type_of(&self) -> &Type {
        self.ty()
    }

    /// Fails with a type error unless this is a formula.
    pub fn expect_bool(&self) -> Result<(), TypeError> {
        if self.ty().is_bool() {
            Ok(())
        } else {
            Err(TypeError::NotBool(self.ty().clone()))
        }
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        if self.0.hash != other.0.hash || self.0.loose != other.0.loose {
            return false;
        }
        match (self.kind(), other.kind()) {
            (TermKind::Free(a), TermKind::Free(b)) | (TermKind::Const(a), TermKind::Const(b)) => {
                a == b && self.ty() == other.ty()
            }
            (TermKind::Schematic(a, i), TermKind::Schematic(b, j)) => {
                a == b && i == j && self.ty() == other.ty()
            }
            (TermKind::Bound(i), TermKind::Bound(j)) => i == j && self.ty() == other.ty(),
            (TermKind::App(f, x), TermKind::App(g, y)) => f == g && x == y,
            (TermKind::Abs(_, s, b), TermKind::Abs(_, t, c)) => s == t && b == c,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash.hash(state);
    }
}

/// Raw structural rendering; use the syntax printer for readable output.
impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            TermKind::Free(n) => write!(f, "{n}"),
            TermKind::Schematic(n, 0) => write!(f, "?{n}"),
            TermKind::Schematic(n, i) => write!(f, "?{n}.{i}"),
            TermKind::Const(n) => write!(f, "{n}"),
            TermKind::Bound(i) => write!(f, "#{i}"),
            TermKind::App(g, x) => write!(f, "({g:?} {x:?})"),
            TermKind::Abs(n, t, b) => write!(f, "(λ{n}:{t}. {b:?})"),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = if f.alternate() {
            crate::syntax::Mode::Ascii
        } else {
            crate::syntax::Mode::Unicode
        };
        f.write_str(&crate::syntax::print_plain(self, mode))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind_pred() -> Type {
        Type::fun(Type::ind(), Type::bool())
    }

    #[test]
    fn type_of_constant_is_declared_type() {
        let t = Term::constant("TrueC", Type::bool());
        assert_eq!(t.type_of(), &Type::bool());
    }

    #[test]
    fn type_of_application_uses_codomain() {
        let f = Term::free("f", ind_pred());
        let a = Term::free("a", Type::ind());
        assert_eq!(Term::app(f, a).unwrap().type_of(), &Type::bool());
    }

    #[test]
    fn ill_typed_application_names_both_types() {
        let f = Term::free("f", ind_pred());
        let g = Term::free("g", Type::bool());
        let err = Term::app(f, g).unwrap_err();
        assert_eq!(
            err,
            TypeError::BadApplication {
                fun_ty: ind_pred(),
                arg_ty: Type::bool()
            }
        );
        let msg = err.to_string();
        assert!(msg.contains("ind ⇒ bool") && msg.contains("bool"));
    }

    #[test]
    fn alpha_equivalent_terms_are_equal() {
        let p = Term::free("p", ind_pred());
        let x = Term::free("x", Type::ind());
        let y = Term::free("y", Type::ind());
        let l1 = Term::lambda("x", &Type::ind(), &Term::app(p.clone(), x).unwrap());
        let l2 = Term::lambda("y", &Type::ind(), &Term::app(p, y).unwrap());
        assert_eq!(l1, l2);
        use std::collections::HashSet;
        let set: HashSet<Term> = [l1, l2].into_iter().collect();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn abs_rejects_badly_typed_bound_occurrence() {
        let body = Term::bound(0, Type::ind());
        assert!(Term::abs("x", Type::bool(), body.clone()).is_err());
        assert!(Term::abs("x", Type::ind(), body).is_ok());
    }
}
