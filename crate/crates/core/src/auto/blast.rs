//! Iterative-deepening backward search over the natural-deduction rules.
//!
//! Invertible rules are applied eagerly and do not count towards the
//! depth, as long as they bind no placeholder that already occurs in the
//! goal. Every other alternative costs one unit of depth.

use std::cell::Cell;
use std::iter;
use std::rc::Rc;

use crate::library::{ELIM_RULES, INTRO_RULES, SAFE_ELIM_RULES, SAFE_INTRO_RULES};
use crate::proof::{
    assume_tac, erule_keep_tac, erule_tac, lookup_rule, rule_tac, Goal, ProofError, ProofState, States, Tactic,
};
use crate::term::logic::{is_const, FALSE};
use crate::term::{Name, Term, TermKind};

use super::Cancel;

pub const DEFAULT_BLAST_DEPTH: usize = 8;

/// Elimination rules whose major premise stays available afterwards.
const KEEP_ELIM_RULES: &[&str] = &["impE", "notE", "allE"];

struct Candidate {
    tac: Tactic,
    /// Head constant of the formula the rule must meet, if any.
    head: Option<Name>,
}

struct Search {
    safe_intro: Vec<Candidate>,
    safe_elim: Vec<Candidate>,
    unsafe_intro: Vec<Candidate>,
    unsafe_elim: Vec<Candidate>,
    ccontr: Option<Tactic>,
    assume: Tactic,
    cancel: Option<Cancel>,
    nodes: Cell<usize>,
}

fn const_head(t: &Term) -> Option<Name> {
    match t.head().kind() {
        TermKind::Const(c) => Some(c.clone()),
        _ => None,
    }
}

fn fits(head: &Option<Name>, t: &Term) -> bool {
    match (head, const_head(t)) {
        (Some(h), Some(c)) => *h == c,
        (Some(_), None) => !t.head().is_free(),
        (None, _) => true,
    }
}

fn none() -> States {
    Box::new(iter::empty())
}

fn schematics(g: &Goal) -> Vec<(Name, u32)> {
    let mut out = Vec::new();
    let mut visit = |t: &Term| {
        t.for_each_leaf(&mut |l| {
            if let TermKind::Schematic(n, i) = l.kind() {
                out.push((n.clone(), *i));
            }
        })
    };
    visit(&g.target);
    g.context.iter().for_each(&mut visit);
    out
}

/// True if going from `before` to `after` left the placeholders of goal
/// `g` unbound.
fn binds_nothing(g: &Goal, before: &ProofState, after: &ProofState) -> bool {
    schematics(g).iter().all(|(n, i)| after.env().term_binding(n, *i) == before.env().term_binding(n, *i))
}

/// True if one of the `k` goals from index `i` is the original goal again,
/// with no new assumptions.
fn repeats(g: &Goal, s: &ProofState, i: usize, k: usize) -> bool {
    s.goals()[i..i + k].iter().any(|n| n.target == g.target && n.context.iter().all(|c| g.context.contains(c)))
}

impl Search {
    fn new(st: &ProofState, cancel: Option<Cancel>) -> Search {
        let thy = st.theory();
        let load = |names: &[&str], keep: bool, elim: bool| -> Vec<Candidate> {
            names
                .iter()
                .filter_map(|n| lookup_rule(thy, n).ok())
                .map(|r| {
                    let head = if elim { r.premises.first().and_then(|p| const_head(&p.formula)) } else { const_head(&r.concl) };
                    let tac = match (elim, keep) {
                        (false, _) => rule_tac(r),
                        (true, false) => erule_tac(r),
                        (true, true) => erule_keep_tac(r),
                    };
                    Candidate { tac, head }
                })
                .collect()
        };
        let unsafe_intro: Vec<&str> = INTRO_RULES.iter().copied().collect();
        let mut unsafe_elim = load(SAFE_ELIM_RULES, false, true);
        let keep: Vec<&str> = ELIM_RULES.iter().copied().filter(|n| KEEP_ELIM_RULES.contains(n)).collect();
        unsafe_elim.extend(load(&keep, true, true));
        Search {
            safe_intro: load(SAFE_INTRO_RULES, false, false),
            safe_elim: load(SAFE_ELIM_RULES, false, true),
            unsafe_intro: load(&unsafe_intro, false, false),
            unsafe_elim,
            ccontr: if thy.is_classical() { lookup_rule(thy, "ccontr").ok().map(rule_tac) } else { None },
            assume: assume_tac(),
            cancel,
            nodes: Cell::new(0),
        }
    }

    fn tick(&self) -> bool {
        let n = self.nodes.get() + 1;
        self.nodes.set(n);
        n % 1000 == 0 && self.cancel.as_ref().is_some_and(Cancel::is_cancelled)
    }
}

/// States in which the `k` goals starting at `i` are all solved.
fn solve_n(s: Rc<Search>, st: ProofState, i: usize, k: usize, depth: usize) -> States {
    if k == 0 {
        return Box::new(iter::once(Ok(st)));
    }
    let again = s.clone();
    Box::new(solve_one(s, st, i, depth).flat_map(move |r| match r {
        Ok(next) => solve_n(again.clone(), next, i, k - 1, depth),
        Err(e) => Box::new(iter::once(Err(e))),
    }))
}

/// Goals that replaced goal `i` going from `before` to `after`.
fn produced(before: &ProofState, after: &ProofState) -> usize {
    (after.goals().len() + 1).saturating_sub(before.goals().len())
}

fn first_safe(cands: &[Candidate], st: &ProofState, i: usize, g: &Goal, elim: bool) -> Option<ProofState> {
    for c in cands {
        let applicable = if elim { g.context.iter().any(|a| fits(&c.head, a)) } else { fits(&c.head, &g.target) };
        if !applicable {
            continue;
        }
        let found = c.tac.apply(st, i).filter_map(Result::ok).find(|n| binds_nothing(g, st, n));
        if found.is_some() {
            return found;
        }
    }
    None
}

/// States in which goal `i` is solved.
fn solve_one(s: Rc<Search>, st: ProofState, i: usize, depth: usize) -> States {
    if s.tick() {
        return Box::new(iter::once(Err(ProofError::Cancelled)));
    }
    let Ok(g) = st.goal(i).cloned() else { return none() };
    if g.context.contains(&g.target) {
        if let Some(Ok(n)) = s.assume.apply(&st, i).find(|r| r.as_ref().is_ok_and(|n| binds_nothing(&g, &st, n))) {
            return Box::new(iter::once(Ok(n)));
        }
    }
    if let Some(n) = first_safe(&s.safe_elim, &st, i, &g, true).or_else(|| first_safe(&s.safe_intro, &st, i, &g, false))
    {
        let k = produced(&st, &n);
        return solve_n(s, n, i, k, depth);
    }
    if depth == 0 {
        return none();
    }
    let mut alts: Vec<States> = vec![s.assume.apply(&st, i)];
    for c in &s.unsafe_intro {
        if fits(&c.head, &g.target) {
            alts.push(c.tac.apply(&st, i));
        }
    }
    for c in &s.unsafe_elim {
        if g.context.iter().any(|a| fits(&c.head, a)) {
            alts.push(c.tac.apply(&st, i));
        }
    }
    if let Some(cc) = &s.ccontr {
        if !is_const(&g.target, FALSE) && !g.target.head().is_schematic() {
            alts.push(cc.apply(&st, i));
        }
    }
    let base = st.clone();
    Box::new(alts.into_iter().flatten().flat_map(move |r| match r {
        Ok(n) => {
            let k = produced(&base, &n);
            if repeats(&g, &n, i, k) {
                return none();
            }
            solve_n(s.clone(), n, i, k, depth - 1)
        }
        Err(e) => Box::new(iter::once(Err(e))),
    }))
}

/// Proves the goal by iterative deepening up to `max_depth` unsafe steps.
/// Fails, without error, if no proof is found.
pub fn blast_tac(max_depth: usize) -> Tactic {
    blast_tac_with(max_depth, None)
}

pub fn blast_tac_with(max_depth: usize, cancel: Option<Cancel>) -> Tactic {
    Tactic::new(format!("blast {max_depth}"), move |st, i| {
        let search = Rc::new(Search::new(st, cancel.clone()));
        for d in 0..=max_depth {
            if let Some(r) = solve_one(search.clone(), st.clone(), i, d).next() {
                return Box::new(iter::once(r));
            }
        }
        none()
    })
}
