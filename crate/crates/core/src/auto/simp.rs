//! Innermost, first-match, left-to-right rewriting with equations.

use std::collections::VecDeque;

use crate::kernel::Theorem;
use crate::library::derived::{cong_arg, cong_fun, eq_false, eq_mp, iff_to_eq, sym, trans, true_intro};
use crate::library::{base, SIMP_LAWS};
use crate::proof::{rename_apart, Goal, ProofError, ProofState, Refinement, Step, Tactic};
use crate::term::logic::{dest_eq, dest_iff, dest_not, is_const, TRUE};
use crate::term::{Term, TermKind};
use crate::unify::{match_terms, max_index_term, SubstEnv};
use crate::Theory;

use super::Cancel;

pub const DEFAULT_SIMP_CAP: usize = 10_000;

#[derive(Clone, Debug)]
struct SimpRule {
    name: String,
    eq: Theorem,
}

/// An ordered list of rewrite rules.
#[derive(Clone, Debug)]
pub struct Simpset {
    rules: Vec<SimpRule>,
    /// Rules added by the user, which come first.
    user: usize,
    pub step_cap: usize,
}

impl Default for Simpset {
    fn default() -> Self {
        Simpset::new()
    }
}

/// `⊢ φ` as an equation: `l = r` stays, `φ ↔ ψ` becomes `φ = ψ`, `¬φ`
/// becomes `φ = ⊥` and anything else `φ = ⊤`.
fn as_equation(name: &str, th: &Theorem) -> Result<Theorem, ProofError> {
    let c = th.concl();
    if dest_eq(c).is_some() {
        Ok(th.clone())
    } else if dest_iff(c).is_some() {
        Ok(iff_to_eq(th)?)
    } else if dest_not(c).is_some() {
        Ok(eq_false(th)?)
    } else if c.type_of().is_bool() {
        Ok(crate::library::derived::eq_true(th)?)
    } else {
        Err(ProofError::BadSimpRule(format!("{name} is not a formula")))
    }
}

impl Simpset {
    /// Only the built-in propositional laws such as `(t = t) = ⊤`.
    pub fn new() -> Simpset {
        let rules = SIMP_LAWS
            .iter()
            .map(|n| {
                let (fact, _) = base().lookup_fact(n).expect("simp laws are built in");
                SimpRule { name: n.to_string(), eq: fact.thm.clone() }
            })
            .collect();
        Simpset { rules, user: 0, step_cap: DEFAULT_SIMP_CAP }
    }

    /// A simpset with no rules at all.
    pub fn empty() -> Simpset {
        Simpset { rules: vec![], user: 0, step_cap: DEFAULT_SIMP_CAP }
    }

    pub fn with_cap(mut self, cap: usize) -> Simpset {
        self.step_cap = cap;
        self
    }

    pub fn rule_names(&self) -> Vec<&str> {
        self.rules.iter().map(|r| r.name.as_str()).collect()
    }

    /// Names of the rules added with [`Simpset::add`].
    pub fn user_rule_names(&self) -> Vec<&str> {
        self.rules[..self.user].iter().map(|r| r.name.as_str()).collect()
    }

    /// Adds a rule ahead of the built-in ones.
    pub fn add(&mut self, name: &str, th: &Theorem) -> Result<(), ProofError> {
        if !th.hyps().is_empty() {
            return Err(ProofError::BadSimpRule(format!("{name} has hypotheses")));
        }
        let eq = as_equation(name, th)?;
        let (lhs, rhs) = dest_eq(eq.concl()).expect("as_equation returns an equation");
        if lhs.is_schematic() {
            return Err(ProofError::BadSimpRule(format!("{name} has a lone placeholder on the left")));
        }
        let lvars = lhs.schematic_vars();
        if let Some(v) = rhs.schematic_vars().iter().find(|v| !lvars.contains(*v)) {
            return Err(ProofError::BadSimpRule(format!("{name}: ?{} occurs only on the right", v.name)));
        }
        self.rules.insert(self.user, SimpRule { name: name.to_string(), eq });
        self.user += 1;
        Ok(())
    }

    /// Adds the fact `name` from `thy`.
    pub fn add_fact(&mut self, thy: &Theory, name: &str) -> Result<(), ProofError> {
        let (fact, _) = thy.lookup_fact(name).ok_or_else(|| ProofError::NotFound(name.to_string()))?;
        let th = fact.thm.clone();
        self.add(name, &th)
    }
}

struct Rewriter<'a> {
    thy: &'a Theory,
    rules: Vec<(&'a str, Theorem, Term)>,
    steps: usize,
    cap: usize,
    recent: VecDeque<String>,
    fresh: usize,
    avoid: Vec<String>,
    cancel: Option<&'a Cancel>,
}

type Rw = Result<Option<Theorem>, ProofError>;

fn rhs_of(eq: &Theorem) -> Term {
    dest_eq(eq.concl()).expect("rewriting produces equations").1.clone()
}

fn chain(a: Option<Theorem>, b: Option<Theorem>) -> Rw {
    Ok(match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => Some(trans(&a, &b)?),
    })
}

impl<'a> Rewriter<'a> {
    fn new(thy: &'a Theory, ss: &'a Simpset, start: u32, cancel: Option<&'a Cancel>) -> Result<Self, ProofError> {
        let mut next = start;
        let mut rules = Vec::with_capacity(ss.rules.len());
        for r in &ss.rules {
            let th = rename_apart(&Theorem::transfer(&r.eq, thy)?, &mut next)?;
            let lhs = dest_eq(th.concl()).expect("simp rules are equations").0.clone();
            rules.push((r.name.as_str(), th, lhs));
        }
        Ok(Rewriter { thy, rules, steps: 0, cap: ss.step_cap, recent: VecDeque::new(), fresh: 0, avoid: vec![], cancel })
    }

    fn fired(&mut self, name: &str) -> Result<(), ProofError> {
        self.steps += 1;
        if self.recent.len() == 5 {
            self.recent.pop_front();
        }
        self.recent.push_back(name.to_string());
        if self.steps > self.cap {
            return Err(ProofError::SimpLoop { steps: self.cap, rules: self.recent.iter().cloned().collect() });
        }
        if self.steps % 1000 == 0 && self.cancel.is_some_and(Cancel::is_cancelled) {
            return Err(ProofError::Cancelled);
        }
        Ok(())
    }

    /// `⊢ t = t'` with `t'` in normal form, or `None` if nothing applies.
    fn rewrite(&mut self, t: &Term) -> Rw {
        if let Some((f, _)) = t.dest_app() {
            if f.dest_abs().is_some() {
                let beta = Theorem::beta_conv(self.thy, t)?;
                self.fired("beta")?;
                let rest = self.rewrite(&rhs_of(&beta))?;
                return chain(Some(beta), rest);
            }
        }
        let inner = self.rewrite_subterms(t)?;
        let cur = inner.as_ref().map_or_else(|| t.clone(), rhs_of);
        for k in 0..self.rules.len() {
            let Some(env) = match_terms(&self.rules[k].2, &cur, &SubstEnv::new()) else { continue };
            let step = Theorem::inst(&self.rules[k].1, &env.to_instantiation())?;
            if dest_eq(step.concl()).map(|(l, _)| l) != Some(&cur) {
                continue;
            }
            let name = self.rules[k].0;
            self.fired(name)?;
            let rest = self.rewrite(&rhs_of(&step))?;
            return chain(chain(inner, Some(step))?, rest);
        }
        Ok(inner)
    }

    fn rewrite_subterms(&mut self, t: &Term) -> Rw {
        match t.kind() {
            TermKind::App(f, x) => {
                let ef = self.rewrite(f)?;
                let ex = self.rewrite(x)?;
                Ok(match (ef, ex) {
                    (None, None) => None,
                    (Some(ef), None) => Some(cong_fun(&ef, x)?),
                    (None, Some(ex)) => Some(cong_arg(f, &ex)?),
                    (Some(ef), Some(ex)) => {
                        let left = cong_arg(f, &ex)?;
                        Some(trans(&left, &cong_fun(&ef, &rhs_of(&ex))?)?)
                    }
                })
            }
            TermKind::Abs(name, ty, body) => {
                let v = self.fresh_var(name, ty, t);
                let opened = Term::instantiate_bound(body, &v);
                match self.rewrite(&opened)? {
                    None => Ok(None),
                    Some(e) => Ok(Some(Theorem::abs_cong(&e, &v)?)),
                }
            }
            _ => Ok(None),
        }
    }

    fn fresh_var(&mut self, base: &str, ty: &crate::term::Type, t: &Term) -> Term {
        loop {
            let cand = format!("{base}_{}", self.fresh);
            self.fresh += 1;
            if !t.has_free_named(&cand) && !self.avoid.contains(&cand) {
                self.avoid.push(cand.clone());
                return Term::free(cand, ty.clone());
            }
        }
    }
}

/// `⊢ t = t'` where `t'` is the normal form of `t` under `ss`, or `None` if
/// no rule applies anywhere.
pub fn simp_conv(thy: &Theory, ss: &Simpset, t: &Term, cancel: Option<&Cancel>) -> Result<Option<Theorem>, ProofError> {
    let mut rw = Rewriter::new(thy, ss, max_index_term(t) + 1, cancel)?;
    with_deep_stack(|| rw.rewrite(t))
}

/// Rewriting recurses once per rule application, so looping rule sets
/// nest as deep as the step cap allows.
fn with_deep_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    const STACK: usize = 512 << 20;
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .stack_size(STACK)
            .spawn_scoped(s, f)
            .expect("spawn rewriting thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn simp_goal(st: &ProofState, i: usize, ss: &Simpset, cancel: Option<&Cancel>) -> Result<Option<ProofState>, ProofError> {
    let goal = st.goal(i)?.clone();
    let thy = st.theory();
    let start = goal.context.iter().map(max_index_term).fold(max_index_term(&goal.target), u32::max) + 1;
    let mut rw = Rewriter::new(thy, ss, start, cancel)?;
    rw.avoid = goal.params.iter().map(|(n, _)| n.to_string()).collect();
    let Some(eq) = with_deep_stack(|| rw.rewrite(&goal.target))? else { return Ok(None) };
    let result = rhs_of(&eq);
    let back = sym(&eq)?;
    let mut s = st.clone();
    let (step, new_goals) = if is_const(&result, TRUE) {
        (Step::Thm(eq_mp(&back, &true_intro(thy)?)?), vec![])
    } else if goal.context.contains(&result) {
        (Step::Thm(eq_mp(&back, &Theorem::assume(thy, &result)?)?), vec![])
    } else {
        let id = s.fresh_goal_id();
        let child = Goal { id, params: goal.params.clone(), context: goal.context.clone(), target: result };
        (Step::Rewrite { eq, child: id }, vec![child])
    };
    let r = Refinement { env: st.env().clone(), step, new_goals, new_vars: vec![] };
    Ok(s.commit(i, r))
}

/// Rewrites the goal with `ss`, closing it if it becomes `⊤` or an
/// assumption. Fails if no rule applies.
pub fn simp_tac(ss: Simpset) -> Tactic {
    simp_tac_with(ss, None)
}

pub fn simp_tac_with(ss: Simpset, cancel: Option<Cancel>) -> Tactic {
    let name = format!("simp [{}]", ss.user_rule_names().join(" "));
    Tactic::new(name, move |st, i| match simp_goal(st, i, &ss, cancel.as_ref()) {
        Ok(Some(s)) => Box::new(std::iter::once(Ok(s))),
        Ok(None) => Box::new(std::iter::empty()),
        Err(ProofError::NoSuchGoal(_)) => Box::new(std::iter::empty()),
        Err(e) => Box::new(std::iter::once(Err(e))),
    })
}
