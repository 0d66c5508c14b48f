//! Tactics and tacticals. A tactic maps a state and a goal index to a lazy
//! sequence of successor states; failure is the empty sequence.

use std::fmt;
use std::iter;
use std::sync::Arc;

use crate::term::logic::{dest_all, dest_imp};
use crate::term::Term;
use crate::unify::{unify_above, SubstEnv};

use super::{Goal, PremiseUse, ProofError, ProofState, Refinement, Rule, Step};

pub type States = Box<dyn Iterator<Item = Result<ProofState, ProofError>>>;

type TacticFn = dyn Fn(&ProofState, usize) -> States + Send + Sync;

pub const DEFAULT_REPEAT_CAP: usize = 1000;

#[derive(Clone)]
pub struct Tactic {
    name: Arc<str>,
    f: Arc<TacticFn>,
}

impl fmt::Debug for Tactic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tactic({})", self.name)
    }
}

impl Tactic {
    pub fn new(name: impl Into<Arc<str>>, f: impl Fn(&ProofState, usize) -> States + Send + Sync + 'static) -> Tactic {
        Tactic { name: name.into(), f: Arc::new(f) }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Successors of `state` after working on goal `goal` (0-based).
    pub fn apply(&self, state: &ProofState, goal: usize) -> States {
        (self.f)(state, goal)
    }
}

fn none() -> States {
    Box::new(iter::empty())
}

fn one(r: Result<ProofState, ProofError>) -> States {
    Box::new(iter::once(r))
}

/// Builds the subgoals for `premises` of an instantiated rule.
fn open_premises(
    st: &mut ProofState,
    goal: &Goal,
    context: &[Term],
    premises: &[super::Premise],
    env: &SubstEnv,
) -> (Vec<Goal>, Vec<PremiseUse>) {
    let mut goals = Vec::with_capacity(premises.len());
    let mut uses = Vec::with_capacity(premises.len());
    for p in premises {
        let mut body = env.apply(&p.formula);
        let mut params = Vec::with_capacity(p.n_params);
        for _ in 0..p.n_params {
            let (name, ty, inner) = dest_all(&body).expect("premise shape is stable under instantiation");
            let x = st.fresh_param(name, ty);
            let next = Term::instantiate_bound(inner, &x);
            params.push(x);
            body = next;
        }
        let mut assumptions = Vec::with_capacity(p.n_assumptions);
        for _ in 0..p.n_assumptions {
            let (a, b) = dest_imp(&body).expect("premise shape is stable under instantiation");
            assumptions.push(a.clone());
            body = b.clone();
        }
        let id = st.fresh_goal_id();
        let mut ps = goal.params.clone();
        ps.extend(params.iter().map(|x| {
            let (n, ty) = x.dest_free().unwrap();
            (n.clone(), ty.clone())
        }));
        let mut ctx = context.to_vec();
        ctx.extend(assumptions.iter().cloned());
        goals.push(Goal { id, params: ps, context: ctx, target: body });
        uses.push(PremiseUse { child: id, params, assumptions });
    }
    (goals, uses)
}

fn new_vars(r: &Rule) -> Vec<(crate::term::Name, u32)> {
    let mut out = Vec::new();
    super::schematic_keys(r.thm.concl(), &mut out);
    out
}

/// Backward resolution with `rule`: unify its conclusion with the target
/// and replace the goal by the premises.
pub fn rule_tac(rule: Rule) -> Tactic {
    Tactic::new(format!("rule {}", rule.name), move |st, i| {
        let Ok(goal) = st.goal(i).cloned() else { return none() };
        let mut s = st.clone();
        let r = match rule.rename_apart(s.next_var_mut()) {
            Ok(r) => r,
            Err(e) => return one(Err(e)),
        };
        let Ok(Some(env)) = unify_above(&r.concl, &goal.target, &s.env, s.next_var()) else { return none() };
        let (new_goals, premises) = open_premises(&mut s, &goal, &goal.context, &r.premises, &env);
        let refinement = Refinement {
            env,
            step: Step::Resolve { rule: r.thm.clone(), major: None, premises },
            new_goals,
            new_vars: new_vars(&r),
        };
        Box::new(s.commit(i, refinement).into_iter().map(Ok))
    })
}

fn erule_impl(rule: Rule, keep: bool) -> Tactic {
    let name = if keep { format!("erule_keep {}", rule.name) } else { format!("erule {}", rule.name) };
    Tactic::new(name, move |st, i| {
        let Ok(goal) = st.goal(i).cloned() else { return none() };
        if rule.premises.is_empty() {
            return none();
        }
        let mut s = st.clone();
        let r = match rule.rename_apart(s.next_var_mut()) {
            Ok(r) => r,
            Err(e) => return one(Err(e)),
        };
        let Ok(Some(env0)) = unify_above(&r.concl, &goal.target, &s.env, s.next_var()) else { return none() };
        let vars = new_vars(&r);
        let out: Vec<Result<ProofState, ProofError>> = (0..goal.context.len())
            .filter_map(|j| {
                let major = &goal.context[j];
                let env = unify_above(&r.premises[0].formula, major, &env0, s.next_var()).ok()??;
                let mut s = s.clone();
                let mut ctx = goal.context.clone();
                if !keep {
                    ctx.remove(j);
                }
                let (new_goals, premises) = open_premises(&mut s, &goal, &ctx, r.minor_premises(), &env);
                let refinement = Refinement {
                    env,
                    step: Step::Resolve { rule: r.thm.clone(), major: Some(major.clone()), premises },
                    new_goals,
                    new_vars: vars.clone(),
                };
                s.commit(i, refinement).map(Ok)
            })
            .collect();
        Box::new(out.into_iter())
    })
}

/// Elimination resolution: the rule's first premise is discharged by a
/// matching assumption, which is removed from the new subgoals.
pub fn erule_tac(rule: Rule) -> Tactic {
    erule_impl(rule, false)
}

/// Like [`erule_tac`] but keeps the assumption, for rules such as `allE`
/// whose major premise may be needed again.
pub fn erule_keep_tac(rule: Rule) -> Tactic {
    erule_impl(rule, true)
}

/// Closes the goal with any assumption unifiable with the target.
pub fn assume_tac() -> Tactic {
    Tactic::new("assumption", |st, i| {
        let Ok(goal) = st.goal(i).cloned() else { return none() };
        let st = st.clone();
        Box::new((0..goal.context.len()).filter_map(move |j| {
            let a = &goal.context[j];
            let env = unify_above(a, &goal.target, &st.env, st.next_var()).ok()??;
            let refinement = Refinement { env, step: Step::Assumption(a.clone()), new_goals: vec![], new_vars: vec![] };
            st.commit(i, refinement).map(Ok)
        }))
    })
}

/// Succeeds once without changing anything.
pub fn all_tac() -> Tactic {
    Tactic::new("all_tac", |st, _| one(Ok(st.clone())))
}

pub fn fail_tac() -> Tactic {
    Tactic::new("fail", |_, _| none())
}

/// Applies `t` to goals `i .. i + k`, last first, threading alternatives.
fn on_range(t: Tactic, st: ProofState, i: usize, k: usize) -> States {
    if k == 0 {
        return one(Ok(st));
    }
    let next = t.clone();
    Box::new(t.apply(&st, i + k - 1).flat_map(move |r| match r {
        Ok(s) => on_range(next.clone(), s, i, k - 1),
        Err(e) => one(Err(e)),
    }))
}

/// Goals that replaced goal `i` after a step from `before` goals.
fn produced(before: usize, s: &ProofState) -> usize {
    (s.goals().len() + 1).saturating_sub(before)
}

/// `t1`, then `t2` on every subgoal that `t1` produced.
pub fn then(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(format!("({}, {})", t1.name(), t2.name()), move |st, i| {
        let n0 = st.goals().len();
        let t2 = t2.clone();
        Box::new(t1.apply(st, i).flat_map(move |r| match r {
            Ok(s) => {
                let k = produced(n0, &s);
                on_range(t2.clone(), s, i, k)
            }
            Err(e) => one(Err(e)),
        }))
    })
}

/// The results of `t1`, or those of `t2` if `t1` has none.
pub fn orelse(t1: Tactic, t2: Tactic) -> Tactic {
    Tactic::new(format!("({} | {})", t1.name(), t2.name()), move |st, i| {
        let mut first = t1.apply(st, i).peekable();
        if first.peek().is_some() {
            Box::new(first)
        } else {
            t2.apply(st, i)
        }
    })
}

pub fn try_tac(t: Tactic) -> Tactic {
    let name = format!("try({})", t.name());
    let inner = orelse(t, all_tac());
    Tactic::new(name, move |st, i| inner.apply(st, i))
}

pub fn first(ts: Vec<Tactic>) -> Tactic {
    ts.into_iter().rev().fold(fail_tac(), |acc, t| orelse(t, acc))
}

/// `t` on every goal, last first; fails if it fails on any.
pub fn all_goals(t: Tactic) -> Tactic {
    Tactic::new(format!("all_goals({})", t.name()), move |st, _| {
        let n = st.goals().len();
        on_range(t.clone(), st.clone(), 0, n)
    })
}

fn repeat_from(
    t: &Tactic,
    st: ProofState,
    i: usize,
    count: &mut usize,
    cap: usize,
) -> Result<ProofState, ProofError> {
    let n0 = st.goals().len();
    match t.apply(&st, i).next() {
        None => Ok(st),
        Some(Err(e)) => Err(e),
        Some(Ok(mut s)) => {
            *count += 1;
            if *count > cap {
                return Err(ProofError::TacticLoop(cap));
            }
            let k = produced(n0, &s);
            for j in (i..i + k).rev() {
                s = repeat_from(t, s, j, count, cap)?;
            }
            Ok(s)
        }
    }
}

/// Applies `t` to the goal and then to every subgoal it produces until it
/// fails everywhere, giving up after `cap` applications.
pub fn repeat_n(t: Tactic, cap: usize) -> Tactic {
    Tactic::new(format!("repeat({})", t.name()), move |st, i| {
        let mut count = 0;
        one(repeat_from(&t, st.clone(), i, &mut count, cap))
    })
}

pub fn repeat(t: Tactic) -> Tactic {
    repeat_n(t, DEFAULT_REPEAT_CAP)
}
