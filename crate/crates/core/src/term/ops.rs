use std::collections::HashMap;

use indexmap::IndexSet;

use super::{Name, Term, TermKind, TyVar, Type, TypeError};

/// A free or schematic variable together with its type.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Var {
    pub name: Name,
    /// `Some(i)` for schematic variables, `None` for free ones.
    pub index: Option<u32>,
    pub ty: Type,
}

impl Var {
    pub fn free(name: impl Into<Name>, ty: Type) -> Var {
        Var {
            name: name.into(),
            index: None,
            ty,
        }
    }

    pub fn schematic(name: impl Into<Name>, index: u32, ty: Type) -> Var {
        Var {
            name: name.into(),
            index: Some(index),
            ty,
        }
    }

    pub fn to_term(&self) -> Term {
        match self.index {
            None => Term::free(self.name.clone(), self.ty.clone()),
            Some(i) => Term::schematic(self.name.clone(), i, self.ty.clone()),
        }
    }
}

pub type VarSet = IndexSet<Var>;

pub(crate) fn check_bound_type(t: &Term, depth: u32, ty: &Type) -> Result<(), TypeError> {
    if t.loose_bound() <= depth {
        return Ok(());
    }
    match t.kind() {
        TermKind::Bound(i) if *i == depth => {
            if t.ty() == ty {
                Ok(())
            } else {
                Err(TypeError::BadBound {
                    index: *i,
                    expected: ty.clone(),
                    found: t.ty().clone(),
                })
            }
        }
        TermKind::App(f, x) => {
            check_bound_type(f, depth, ty)?;
            check_bound_type(x, depth, ty)
        }
        TermKind::Abs(_, _, b) => check_bound_type(b, depth + 1, ty),
        _ => Ok(()),
    }
}

/// Adds `by` to every loose bound index `>= cutoff`.
pub(crate) fn shift(t: &Term, by: u32, cutoff: u32) -> Term {
    if by == 0 || t.loose_bound() <= cutoff {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => Term::bound(i + by, t.ty().clone()),
        TermKind::App(f, x) => Term::app_unchecked(shift(f, by, cutoff), shift(x, by, cutoff)),
        TermKind::Abs(n, ty, b) => Term::abs_unchecked(n.clone(), ty.clone(), shift(b, by, cutoff + 1)),
        _ => t.clone(),
    }
}

/// Substitutes `arg` (closed relative to `depth`) for bound index `depth`
/// and lowers the indices above it.
pub(crate) fn instantiate(t: &Term, arg: &Term, depth: u32) -> Term {
    if t.loose_bound() <= depth {
        return t.clone();
    }
    match t.kind() {
        TermKind::Bound(i) => {
            if *i == depth {
                shift(arg, depth, 0)
            } else {
                Term::bound(i - 1, t.ty().clone())
            }
        }
        TermKind::App(f, x) => Term::app_unchecked(instantiate(f, arg, depth), instantiate(x, arg, depth)),
        TermKind::Abs(n, ty, b) => {
            Term::abs_unchecked(n.clone(), ty.clone(), instantiate(b, arg, depth + 1))
        }
        _ => t.clone(),
    }
}

pub(crate) fn abstract_free(t: &Term, name: &str, ty: &Type, depth: u32) -> Term {
    match t.kind() {
        TermKind::Free(n) if &**n == name && t.ty() == ty => Term::bound(depth, ty.clone()),
        TermKind::App(f, x) => {
            let nf = abstract_free(f, name, ty, depth);
            let nx = abstract_free(x, name, ty, depth);
            if nf.ptr_eq(f) && nx.ptr_eq(x) {
                t.clone()
            } else {
                Term::app_unchecked(nf, nx)
            }
        }
        TermKind::Abs(n, bty, b) => {
            let nb = abstract_free(b, name, ty, depth + 1);
            if nb.ptr_eq(b) {
                t.clone()
            } else {
                Term::abs_unchecked(n.clone(), bty.clone(), nb)
            }
        }
        _ => t.clone(),
    }
}

/// Full beta normalisation (normal order). Terminates on simply-typed terms.
pub fn beta_normalize(t: &Term) -> Term {
    match t.kind() {
        TermKind::App(f, x) => {
            let nf = beta_normalize(f);
            if let TermKind::Abs(_, _, body) = nf.kind() {
                beta_normalize(&instantiate(body, x, 0))
            } else {
                let nx = beta_normalize(x);
                if nf.ptr_eq(f) && nx.ptr_eq(x) {
                    t.clone()
                } else {
                    Term::app_unchecked(nf, nx)
                }
            }
        }
        TermKind::Abs(n, ty, b) => {
            let nb = beta_normalize(b);
            if nb.ptr_eq(b) {
                t.clone()
            } else {
                Term::abs_unchecked(n.clone(), ty.clone(), nb)
            }
        }
        _ => t.clone(),
    }
}

/// One leftmost-outermost beta step, if any redex exists.
pub fn beta_normalize_small_step(t: &Term) -> Option<Term> {
    match t.kind() {
        TermKind::App(f, x) => {
            if let TermKind::Abs(_, _, body) = f.kind() {
                return Some(instantiate(body, x, 0));
            }
            if let Some(nf) = beta_normalize_small_step(f) {
                return Some(Term::app_unchecked(nf, x.clone()));
            }
            beta_normalize_small_step(x).map(|nx| Term::app_unchecked(f.clone(), nx))
        }
        TermKind::Abs(n, ty, b) => {
            beta_normalize_small_step(b).map(|nb| Term::abs_unchecked(n.clone(), ty.clone(), nb))
        }
        _ => None,
    }
}

impl Term {
    /// Rebuilds the term replacing free/schematic/constant leaves for which
    /// `f` returns a replacement. Replacements must be closed.
    pub(crate) fn map_leaves(&self, f: &mut impl FnMut(&Term) -> Option<Term>) -> Term {
        match self.kind() {
            TermKind::App(g, x) => {
                let ng = g.map_leaves(f);
                let nx = x.map_leaves(f);
                if ng.ptr_eq(g) && nx.ptr_eq(x) {
                    self.clone()
                } else {
                    Term::app_unchecked(ng, nx)
                }
            }
            TermKind::Abs(n, ty, b) => {
                let nb = b.map_leaves(f);
                if nb.ptr_eq(b) {
                    self.clone()
                } else {
                    Term::abs_unchecked(n.clone(), ty.clone(), nb)
                }
            }
            TermKind::Bound(_) => self.clone(),
            _ => match f(self) {
                Some(r) => {
                    debug_assert!(r.is_closed());
                    r
                }
                None => self.clone(),
            },
        }
    }

    /// Simultaneous capture-free substitution of free variables.
    pub fn subst_free(&self, mapping: &[(Var, Term)]) -> Result<Term, TypeError> {
        for (v, t) in mapping {
            if &v.ty != t.ty() {
                return Err(TypeError::SubstMismatch {
                    var: v.name.to_string(),
                    expected: v.ty.clone(),
                    found: t.ty().clone(),
                });
            }
        }
        if mapping.is_empty() {
            return Ok(self.clone());
        }
        Ok(self.map_leaves(&mut |leaf| match leaf.kind() {
            TermKind::Free(n) => mapping
                .iter()
                .find(|(v, _)| v.index.is_none() && &v.name == n && &v.ty == leaf.ty())
                .map(|(_, t)| t.clone()),
            _ => None,
        }))
    }

    /// Substitutes schematic variables by `(name, index)` key. No
    /// normalisation is performed.
    pub fn subst_schematic(&self, map: &HashMap<(Name, u32), Term>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        self.map_leaves(&mut |leaf| match leaf.kind() {
            TermKind::Schematic(n, i) => map.get(&(n.clone(), *i)).cloned(),
            _ => None,
        })
    }

    /// Applies a type substitution to every type annotation in the term.
    pub fn subst_types(&self, map: &HashMap<TyVar, Type>) -> Term {
        if map.is_empty() {
            return self.clone();
        }
        self.map_types(&mut |ty| ty.subst(map))
    }

    pub(crate) fn map_types(&self, f: &mut impl FnMut(&Type) -> Type) -> Term {
        match self.kind() {
            TermKind::Free(n) => Term::free(n.clone(), f(self.ty())),
            TermKind::Schematic(n, i) => Term::schematic(n.clone(), *i, f(self.ty())),
            TermKind::Const(n) => Term::constant(n.clone(), f(self.ty())),
            TermKind::Bound(i) => Term::bound(*i, f(self.ty())),
            TermKind::App(g, x) => Term::app_unchecked(g.map_types(f), x.map_types(f)),
            TermKind::Abs(n, ty, b) => Term::abs_unchecked(n.clone(), f(ty), b.map_types(f)),
        }
    }

    /// Free variables in order of first occurrence.
    pub fn free_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.for_each_leaf(&mut |leaf| {
            if let TermKind::Free(n) = leaf.kind() {
                out.insert(Var::free(n.clone(), leaf.ty().clone()));
            }
        });
        out
    }

    pub fn schematic_vars(&self) -> VarSet {
        let mut out = VarSet::new();
        self.for_each_leaf(&mut |leaf| {
            if let TermKind::Schematic(n, i) = leaf.kind() {
                out.insert(Var::schematic(n.clone(), *i, leaf.ty().clone()));
            }
        });
        out
    }

    pub fn has_free(&self, name: &str, ty: &Type) -> bool {
        let mut found = false;
        self.for_each_leaf(&mut |leaf| {
            if let TermKind::Free(n) = leaf.kind() {
                found |= &**n == name && leaf.ty() == ty;
            }
        });
        found
    }

    pub fn has_free_named(&self, name: &str) -> bool {
        let mut found = false;
        self.for_each_leaf(&mut |leaf| {
            if let TermKind::Free(n) = leaf.kind() {
                found |= &**n == name;
            }
        });
        found
    }

    pub fn has_schematic(&self) -> bool {
        let mut found = false;
        self.for_each_leaf(&mut |leaf| found |= leaf.is_schematic());
        found
    }

    /// All type variables appearing in any annotation.
    pub fn type_vars(&self) -> Vec<TyVar> {
        let mut out = Vec::new();
        self.for_each_type(&mut |ty| ty.add_tyvars(&mut out));
        out
    }

    pub(crate) fn for_each_leaf(&self, f: &mut impl FnMut(&Term)) {
        match self.kind() {
            TermKind::App(g, x) => {
                g.for_each_leaf(f);
                x.for_each_leaf(f);
            }
            TermKind::Abs(_, _, b) => b.for_each_leaf(f),
            _ => f(self),
        }
    }

    pub(crate) fn for_each_type(&self, f: &mut impl FnMut(&Type)) {
        match self.kind() {
            TermKind::App(g, x) => {
                g.for_each_type(f);
                x.for_each_type(f);
            }
            TermKind::Abs(_, ty, b) => {
                f(ty);
                b.for_each_type(f);
            }
            _ => f(self.ty()),
        }
    }

    /// Every constant occurrence as `(name, instance type)`.
    pub fn constants(&self) -> Vec<(Name, Type)> {
        let mut out: Vec<(Name, Type)> = Vec::new();
        self.for_each_leaf(&mut |leaf| {
            if let TermKind::Const(n) = leaf.kind() {
                let e = (n.clone(), leaf.ty().clone());
                if !out.contains(&e) {
                    out.push(e);
                }
            }
        });
        out
    }
}
