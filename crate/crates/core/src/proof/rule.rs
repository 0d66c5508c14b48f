//! Inference rules read off theorems of the form `⊢ φ₁ → … → φₙ → ψ`.

use std::collections::HashMap;
use std::fmt;

use crate::kernel::{Instantiation, Theorem};
use crate::term::logic::{dest_all, dest_imp};
use crate::term::{Name, Term, TermKind, TyVar, Type};
use crate::Theory;

use super::ProofError;

/// One premise. Leading universal quantifiers become parameters of the
/// subgoal and leading implications become its local assumptions.
#[derive(Clone, Debug)]
pub struct Premise {
    pub formula: Term,
    pub n_params: usize,
    pub n_assumptions: usize,
}

#[derive(Clone)]
pub struct Rule {
    pub name: String,
    pub thm: Theorem,
    pub premises: Vec<Premise>,
    pub concl: Term,
}

impl fmt::Debug for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Rule({}: {})", self.name, self.thm.concl())
    }
}

fn shape(formula: &Term) -> Premise {
    let mut body = formula;
    let mut n_params = 0;
    while let Some((_, _, b)) = dest_all(body) {
        body = b;
        n_params += 1;
    }
    let mut n_assumptions = 0;
    while let Some((_, b)) = dest_imp(body) {
        body = b;
        n_assumptions += 1;
    }
    Premise { formula: formula.clone(), n_params, n_assumptions }
}

/// Reads `⊢ φ₁ → … → φₙ → ψ` as a rule with premises `φ₁ … φₙ`. `arity`
/// limits how many implications count as premises; by default all do.
pub fn derive_rule(name: &str, thm: &Theorem, arity: Option<usize>) -> Result<Rule, ProofError> {
    if !thm.hyps().is_empty() {
        return Err(ProofError::BadRule(format!("{name} has hypotheses")));
    }
    let mut premises = Vec::new();
    let mut concl = thm.concl();
    while arity.is_none_or(|n| premises.len() < n) {
        match dest_imp(concl) {
            Some((p, c)) => {
                premises.push(shape(p));
                concl = c;
            }
            None if arity.is_some() => {
                return Err(ProofError::BadRule(format!("{name} has fewer than {} premises", arity.unwrap())));
            }
            None => break,
        }
    }
    Ok(Rule { name: name.to_string(), thm: thm.clone(), premises, concl: concl.clone() })
}

/// The rule stored under `name` in `thy` or one of its ancestors.
pub fn lookup_rule(thy: &Theory, name: &str) -> Result<Rule, ProofError> {
    let (fact, _) = thy.lookup_fact(name).ok_or_else(|| ProofError::NotFound(name.to_string()))?;
    derive_rule(name, &fact.thm, fact.rule_arity)
}

/// Renames the schematic variables and type variables of `th` to fresh
/// indices above `*next`, so they are distinct from everything in a proof.
pub(crate) fn rename_apart(th: &Theorem, next: &mut u32) -> Result<Theorem, ProofError> {
    let mut inst = Instantiation::default();
    let mut tyvars: Vec<TyVar> = th.concl().type_vars();
    tyvars.dedup();
    for v in tyvars {
        *next += 1;
        let name = match &v {
            TyVar::Fixed(n) | TyVar::Schematic(n, _) => n.clone(),
        };
        inst.types.insert(v, Type::schematic(name, *next));
    }
    let mut seen: HashMap<(Name, u32), ()> = HashMap::new();
    let mut leaves = Vec::new();
    th.concl().for_each_leaf(&mut |l| {
        if let TermKind::Schematic(n, i) = l.kind() {
            if seen.insert((n.clone(), *i), ()).is_none() {
                leaves.push((n.clone(), *i, l.ty().subst(&inst.types)));
            }
        }
    });
    for (n, i, ty) in leaves {
        *next += 1;
        inst.terms.insert((n.clone(), i), Term::schematic(n, *next, ty));
    }
    Ok(Theorem::inst(th, &inst)?)
}

impl Rule {
    /// A copy with schematics renamed apart; see [`rename_apart`].
    pub fn rename_apart(&self, next: &mut u32) -> Result<Rule, ProofError> {
        let thm = rename_apart(&self.thm, next)?;
        let mut out = derive_rule(&self.name, &thm, Some(self.premises.len()))?;
        out.name = self.name.clone();
        Ok(out)
    }

    /// The premises that are not the major premise of an elimination.
    pub fn minor_premises(&self) -> &[Premise] {
        self.premises.get(1..).unwrap_or(&[])
    }
}
