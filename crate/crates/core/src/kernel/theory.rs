use std::cell::RefCell;
use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use indexmap::IndexMap;

use super::{KernelError, Theorem};
use crate::term::logic::*;
use crate::term::types::{BOOL, FUN, IND};
use crate::term::{Name, Term, TermKind, TyVar, Type};

static THEORY_IDS: AtomicU64 = AtomicU64::new(1);

fn next_id() -> u64 {
    THEORY_IDS.fetch_add(1, Ordering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstKind {
    Primitive,
    Declared,
    Defined,
}

#[derive(Clone, Debug)]
pub struct ConstInfo {
    pub ty: Type,
    pub kind: ConstKind,
    /// Name of the theory that introduced the constant.
    pub origin: Name,
}

/// How a named theorem entered the theory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactKind {
    Axiom,
    Definition,
    Theorem,
}

#[derive(Clone, Debug)]
pub struct Fact {
    pub kind: FactKind,
    pub thm: Theorem,
    /// Premise count to use when the fact is read as an inference rule.
    pub rule_arity: Option<usize>,
}

pub(super) struct TheoryData {
    id: u64,
    name: Name,
    parents: Vec<Theory>,
    lineage: HashSet<u64>,
    types: IndexMap<Name, usize>,
    consts: IndexMap<Name, ConstInfo>,
    facts: IndexMap<Name, Fact>,
    classical: bool,
}

/// A named, immutable theory. Extension returns a new value whose lineage
/// contains every earlier version, so older theorems stay usable.
#[derive(Clone)]
pub struct Theory(pub(super) Arc<TheoryData>);

impl std::fmt::Debug for Theory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Theory({}#{})", self.0.name, self.0.id)
    }
}

impl Theory {
    /// The primitive signature: `bool`, `ind`, `fun`, the primitive
    /// connectives, and the definitions of `¬`, `⊤` and `↔`.
    pub fn primitive_base(name: &str) -> Theory {
        let mut types = IndexMap::new();
        types.insert(Name::from(BOOL), 0);
        types.insert(Name::from(IND), 0);
        types.insert(Name::from(FUN), 2);
        let origin: Name = name.into();
        let a = Type::var("a");
        let bin = Type::fun_n([Type::bool(), Type::bool()], Type::bool());
        let mut consts = IndexMap::new();
        for (n, ty) in [
            (FALSE, Type::bool()),
            (CONJ, bin.clone()),
            (DISJ, bin.clone()),
            (IMP, bin),
            (EQ, eq_type(&a)),
            (ALL, binder_type(&a)),
            (EX, binder_type(&a)),
        ] {
            consts.insert(
                Name::from(n),
                ConstInfo {
                    ty,
                    kind: ConstKind::Primitive,
                    origin: origin.clone(),
                },
            );
        }
        let id = next_id();
        let thy = Theory(Arc::new(TheoryData {
            id,
            name: origin,
            parents: vec![],
            lineage: HashSet::from([id]),
            types,
            consts,
            facts: IndexMap::new(),
            classical: false,
        }));

        let p = Term::free("P", Type::bool());
        let q = Term::free("Q", Type::bool());
        let bool_ty = Type::bool();
        let defs = [
            (NOT, Term::lambda("P", &bool_ty, &mk_imp(&p, &mk_false()).unwrap())),
            (TRUE, mk_imp(&mk_false(), &mk_false()).unwrap()),
            (
                IFF,
                Term::lambda(
                    "P",
                    &bool_ty,
                    &Term::lambda(
                        "Q",
                        &bool_ty,
                        &mk_conj(&mk_imp(&p, &q).unwrap(), &mk_imp(&q, &p).unwrap()).unwrap(),
                    ),
                ),
            ),
        ];
        defs.into_iter().fold(thy, |thy, (n, rhs)| {
            thy.define_const(n, &rhs).expect("base definitions are well-formed").0
        })
    }

    /// A fresh theory importing `parents`. Constants or types declared by
    /// different theories under the same name clash.
    pub fn new(name: &str, parents: Vec<Theory>, classical: bool) -> Result<Theory, KernelError> {
        let mut lineage = HashSet::new();
        let mut seen_consts: IndexMap<Name, Name> = IndexMap::new();
        let mut seen_types: IndexMap<Name, Name> = IndexMap::new();
        for p in &parents {
            lineage.extend(p.0.lineage.iter().copied());
            for (n, info) in p.all_consts() {
                if let Some(origin) = seen_consts.get(&n) {
                    if *origin != info.origin {
                        return Err(KernelError::Signature(format!(
                            "constant {n} is declared by both {origin} and {}",
                            info.origin
                        )));
                    }
                }
                seen_consts.insert(n, info.origin);
            }
            for (n, origin) in p.all_types() {
                if let Some(o) = seen_types.get(&n) {
                    if *o != origin {
                        return Err(KernelError::Signature(format!(
                            "type {n} is declared by both {o} and {origin}"
                        )));
                    }
                }
                seen_types.insert(n, origin);
            }
        }
        let id = next_id();
        lineage.insert(id);
        Ok(Theory(Arc::new(TheoryData {
            id,
            name: name.into(),
            parents,
            lineage,
            types: IndexMap::new(),
            consts: IndexMap::new(),
            facts: IndexMap::new(),
            classical,
        })))
    }

    fn all_consts(&self) -> Vec<(Name, ConstInfo)> {
        let mut out: Vec<(Name, ConstInfo)> =
            self.0.consts.iter().map(|(n, c)| (n.clone(), c.clone())).collect();
        for p in &self.0.parents {
            out.extend(p.all_consts());
        }
        out
    }

    fn all_types(&self) -> Vec<(Name, Name)> {
        let mut out: Vec<(Name, Name)> =
            self.0.types.keys().map(|n| (n.clone(), self.0.name.clone())).collect();
        for p in &self.0.parents {
            out.extend(p.all_types());
        }
        out
    }

    fn extend(&self, f: impl FnOnce(&mut TheoryData)) -> Theory {
        let id = next_id();
        let mut lineage = self.0.lineage.clone();
        lineage.insert(id);
        let mut data = TheoryData {
            id,
            name: self.0.name.clone(),
            parents: self.0.parents.clone(),
            lineage,
            types: self.0.types.clone(),
            consts: self.0.consts.clone(),
            facts: self.0.facts.clone(),
            classical: self.0.classical,
        };
        f(&mut data);
        Theory(Arc::new(data))
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn id(&self) -> u64 {
        self.0.id
    }

    pub fn parents(&self) -> &[Theory] {
        &self.0.parents
    }

    /// Classical if this theory or any ancestor enables excluded middle.
    pub fn is_classical(&self) -> bool {
        self.0.classical || self.0.parents.iter().any(Theory::is_classical)
    }

    /// True when theorems of `other` may be used in `self`.
    pub fn extends(&self, other: &Theory) -> bool {
        self.0.lineage.contains(&other.0.id)
    }

    pub fn same_lineage(&self, other: &Theory) -> bool {
        self.extends(other) || other.extends(self)
    }

    /// The more derived of two compatible theories.
    pub fn join(a: &Theory, b: &Theory) -> Result<Theory, KernelError> {
        if a.extends(b) {
            Ok(a.clone())
        } else if b.extends(a) {
            Ok(b.clone())
        } else {
            Err(KernelError::TheoryMismatch {
                left: a.name().to_string(),
                right: b.name().to_string(),
            })
        }
    }

    pub fn type_arity(&self, name: &str) -> Option<usize> {
        self.0
            .types
            .get(name)
            .copied()
            .or_else(|| self.0.parents.iter().find_map(|p| p.type_arity(name)))
    }

    pub fn const_info(&self, name: &str) -> Option<&ConstInfo> {
        self.0
            .consts
            .get(name)
            .or_else(|| self.0.parents.iter().find_map(|p| p.const_info(name)))
    }

    pub fn const_type(&self, name: &str) -> Option<&Type> {
        self.const_info(name).map(|c| &c.ty)
    }

    /// Constant names declared locally, in declaration order.
    pub fn local_consts(&self) -> impl Iterator<Item = (&Name, &ConstInfo)> {
        self.0.consts.iter()
    }

    pub fn local_types(&self) -> impl Iterator<Item = (&Name, &usize)> {
        self.0.types.iter()
    }

    pub fn local_facts(&self) -> impl Iterator<Item = (&Name, &Fact)> {
        self.0.facts.iter()
    }

    /// Looks a named fact up in this theory, then depth-first in parents.
    /// Returns the owning theory's name too.
    pub fn lookup_fact(&self, name: &str) -> Option<(&Fact, &str)> {
        if let Some(f) = self.0.facts.get(name) {
            return Some((f, &self.0.name));
        }
        self.0.parents.iter().find_map(|p| p.lookup_fact(name))
    }

    /// Every theory in the import graph that defines `name`, nearest first.
    pub fn fact_owners(&self, name: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        self.collect_owners(name, &mut out, &mut seen);
        out
    }

    fn collect_owners(&self, name: &str, out: &mut Vec<String>, seen: &mut HashSet<u64>) {
        if !seen.insert(self.0.id) {
            return;
        }
        if self.0.facts.contains_key(name) && !out.iter().any(|o| o == &*self.0.name) {
            out.push(self.0.name.to_string());
        }
        for p in &self.0.parents {
            p.collect_owners(name, out, seen);
        }
    }

    /// All visible fact names: local first, then parents, without duplicates.
    pub fn visible_fact_names(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut seen = HashSet::new();
        self.collect_fact_names(&mut out, &mut seen);
        out
    }

    fn collect_fact_names(&self, out: &mut Vec<String>, seen: &mut HashSet<u64>) {
        if !seen.insert(self.0.id) {
            return;
        }
        for n in self.0.facts.keys() {
            if !out.iter().any(|o| o == &**n) {
                out.push(n.to_string());
            }
        }
        for p in &self.0.parents {
            p.collect_fact_names(out, seen);
        }
    }

    pub fn check_type(&self, ty: &Type) -> Result<(), KernelError> {
        match ty {
            Type::Var(_) | Type::Schematic(..) => Ok(()),
            Type::Con(n, args) => {
                match self.type_arity(n) {
                    Some(k) if k == args.len() => {}
                    Some(k) => {
                        return Err(KernelError::Signature(format!(
                            "type constructor {n} expects {k} arguments, got {}",
                            args.len()
                        )))
                    }
                    None => return Err(KernelError::Signature(format!("unknown type constructor {n}"))),
                }
                args.iter().try_for_each(|a| self.check_type(a))
            }
        }
    }

    /// Checks that every constant and type constructor in `t` belongs to the
    /// signature and every constant is used at an instance of its declared type.
    pub fn check_term(&self, t: &Term) -> Result<(), KernelError> {
        // Theories are immutable and each version has its own id, so a
        // successful check stays valid. Derived rules recheck the same
        // formulas constantly.
        thread_local! {
            static CHECKED: RefCell<HashSet<(u64, Term)>> = RefCell::new(HashSet::new());
        }
        let key = (self.0.id, t.clone());
        if CHECKED.with(|c| c.borrow().contains(&key)) {
            return Ok(());
        }
        self.check_term_uncached(t)?;
        CHECKED.with(|c| {
            let mut c = c.borrow_mut();
            if c.len() >= 4096 {
                c.clear();
            }
            c.insert(key);
        });
        Ok(())
    }

    fn check_term_uncached(&self, t: &Term) -> Result<(), KernelError> {
        let mut err = Ok(());
        let mut seen_types: Vec<Type> = Vec::new();
        t.for_each_type(&mut |ty| {
            if err.is_ok() && !seen_types.contains(ty) {
                err = self.check_type(ty);
                seen_types.push(ty.clone());
            }
        });
        err?;
        let mut result = Ok(());
        t.for_each_leaf(&mut |leaf| {
            if result.is_err() {
                return;
            }
            if let TermKind::Const(n) = leaf.kind() {
                result = match self.const_type(n) {
                    None => Err(KernelError::Signature(format!("unknown constant {n}"))),
                    Some(decl) if is_instance(decl, leaf.ty()) => Ok(()),
                    Some(decl) => Err(KernelError::Signature(format!(
                        "constant {n} used at type {}, which is not an instance of {decl}",
                        leaf.ty()
                    ))),
                };
            }
        });
        result
    }

    pub(super) fn check_fact_name_free(&self, name: &str) -> Result<(), KernelError> {
        if self.0.facts.contains_key(name) {
            Err(KernelError::Signature(format!(
                "theory {} already has a fact named {name}",
                self.name()
            )))
        } else {
            Ok(())
        }
    }

    pub fn declare_type(&self, name: &str, arity: usize) -> Result<Theory, KernelError> {
        if self.type_arity(name).is_some() {
            return Err(KernelError::Signature(format!("type {name} is already declared")));
        }
        Ok(self.extend(|d| {
            d.types.insert(name.into(), arity);
        }))
    }

    pub fn declare_const(&self, name: &str, ty: &Type) -> Result<Theory, KernelError> {
        if self.const_info(name).is_some() {
            return Err(KernelError::Signature(format!("constant {name} is already declared")));
        }
        if ty.has_schematic() {
            return Err(KernelError::Signature(format!(
                "declared type of {name} may not contain schematic type variables"
            )));
        }
        self.check_type(ty)?;
        let origin = self.0.name.clone();
        Ok(self.extend(|d| {
            d.consts.insert(
                name.into(),
                ConstInfo {
                    ty: ty.clone(),
                    kind: ConstKind::Declared,
                    origin,
                },
            );
        }))
    }

    /// Enables excluded middle in the returned theory.
    pub fn set_classical(&self, classical: bool) -> Theory {
        self.extend(|d| d.classical = classical)
    }

    /// Records an axiom `⊢ φ`. Axioms are reported separately from
    /// definitional extensions.
    pub fn new_axiom(&self, name: &str, phi: &Term) -> Result<(Theory, Theorem), KernelError> {
        phi.expect_bool()?;
        self.check_term(phi)?;
        self.check_fact_name_free(name)?;
        let thm = Theorem::make(vec![], phi.clone(), self.clone());
        let thy = self.extend(|d| {
            d.facts.insert(
                name.into(),
                Fact {
                    kind: FactKind::Axiom,
                    thm: thm.clone(),
                    rule_arity: None,
                },
            );
        });
        Ok((thy, thm))
    }

    /// Introduces constant `name` with the definitional axiom
    /// `⊢ name = rhs`, stored as `name_def`.
    pub fn define_const(&self, name: &str, rhs: &Term) -> Result<(Theory, Theorem), KernelError> {
        self.define_const_named(&format!("{name}_def"), name, rhs)
    }

    pub fn define_const_named(
        &self,
        fact_name: &str,
        name: &str,
        rhs: &Term,
    ) -> Result<(Theory, Theorem), KernelError> {
        if self.const_info(name).is_some() {
            return Err(KernelError::Signature(format!("constant {name} is already declared")));
        }
        self.check_fact_name_free(fact_name)?;
        if let Some(v) = rhs.free_vars().first() {
            return Err(KernelError::Definition(format!(
                "definition of {name} has free variable {}",
                v.name
            )));
        }
        if let Some(v) = rhs.schematic_vars().first() {
            return Err(KernelError::Definition(format!(
                "definition of {name} has schematic variable ?{}",
                v.name
            )));
        }
        let ty = rhs.ty().clone();
        if ty.has_schematic() {
            return Err(KernelError::Definition(format!(
                "definition of {name} has schematic type {ty}"
            )));
        }
        let ty_vars = ty.tyvars();
        if let Some(v) = rhs.type_vars().into_iter().find(|v| !ty_vars.contains(v)) {
            return Err(KernelError::Definition(format!(
                "type variable {v} of the definition of {name} does not occur in its type {ty}"
            )));
        }
        self.check_term(rhs)?;
        let origin = self.0.name.clone();
        let with_const = self.extend(|d| {
            d.consts.insert(
                name.into(),
                ConstInfo {
                    ty: ty.clone(),
                    kind: ConstKind::Defined,
                    origin,
                },
            );
        });
        let eq = mk_eq(&Term::constant(name, ty), rhs)?;
        let thm = Theorem::make(vec![], eq, with_const.clone());
        let thy = with_const.extend(|d| {
            d.facts.insert(
                fact_name.into(),
                Fact {
                    kind: FactKind::Definition,
                    thm: thm.clone(),
                    rule_arity: None,
                },
            );
        });
        Ok((thy, thm))
    }

    /// Stores a proved theorem under `name`. Stored theorems must have no
    /// hypotheses.
    pub fn store_theorem(&self, name: &str, thm: &Theorem) -> Result<Theory, KernelError> {
        self.store_rule(name, thm, None)
    }

    /// Like [`Theory::store_theorem`], recording how many premises the
    /// theorem has when used as a rule.
    pub fn store_rule(&self, name: &str, thm: &Theorem, arity: Option<usize>) -> Result<Theory, KernelError> {
        self.check_fact_name_free(name)?;
        if !self.extends(thm.theory()) {
            return Err(KernelError::TheoryMismatch {
                left: self.name().to_string(),
                right: thm.theory().name().to_string(),
            });
        }
        if !thm.hyps().is_empty() {
            return Err(KernelError::Rule {
                rule: "store_theorem",
                msg: format!("theorem {name} still has {} hypotheses", thm.hyps().len()),
            });
        }
        Ok(self.extend(|d| {
            d.facts.insert(
                name.into(),
                Fact {
                    kind: FactKind::Theorem,
                    thm: thm.clone(),
                    rule_arity: arity,
                },
            );
        }))
    }
}

/// True if `actual` is an instance of `decl` (type variables of `decl`
/// instantiated consistently).
pub fn is_instance(decl: &Type, actual: &Type) -> bool {
    fn go(decl: &Type, actual: &Type, map: &mut Vec<(TyVar, Type)>) -> bool {
        match decl {
            Type::Var(n) => {
                let v = TyVar::Fixed(n.clone());
                match map.iter().find(|(k, _)| *k == v) {
                    Some((_, t)) => t == actual,
                    None => {
                        map.push((v, actual.clone()));
                        true
                    }
                }
            }
            Type::Schematic(..) => decl == actual,
            Type::Con(n, args) => match actual {
                Type::Con(m, brgs) if n == m && args.len() == brgs.len() => {
                    args.iter().zip(brgs.iter()).all(|(a, b)| go(a, b, map))
                }
                _ => false,
            },
        }
    }
    go(decl, actual, &mut Vec::new())
}
