//! Classical propositional tautologies, decided by truth table and proved
//! by a signed tableau whose branching uses excluded middle.

use std::cell::{Cell, OnceCell};
use std::rc::Rc;

use crate::kernel::{KernelError, Theorem};
use crate::library::derived::{dne, fold_iff, not_elim, not_intro, true_intro, unfold_iff};
use crate::library::is_prop_atom;
use crate::proof::{ProofError, ProofState, Refinement, Step, Tactic};
use crate::term::logic::*;
use crate::term::{Term, TermKind};
use crate::Theory;

pub const TAUT_ATOM_LIMIT: usize = 20;

#[derive(Debug)]
enum Prop {
    Atom(usize),
    Const(bool),
    Not(Box<Prop>),
    And(Box<Prop>, Box<Prop>),
    Or(Box<Prop>, Box<Prop>),
    Imp(Box<Prop>, Box<Prop>),
    Iff(Box<Prop>, Box<Prop>),
}

fn connective(t: &Term) -> Option<(&str, Vec<&Term>)> {
    if is_prop_atom(t) {
        return None;
    }
    let (head, args) = t.strip_comb();
    match head.kind() {
        TermKind::Const(c) => Some((c.as_ref(), args)),
        _ => None,
    }
}

fn skeleton(t: &Term, atoms: &mut Vec<Term>) -> Prop {
    let bin = |a: &Term, b: &Term, atoms: &mut Vec<Term>| (Box::new(skeleton(a, atoms)), Box::new(skeleton(b, atoms)));
    match connective(t) {
        Some((TRUE, _)) => Prop::Const(true),
        Some((FALSE, _)) => Prop::Const(false),
        Some((NOT, a)) => Prop::Not(Box::new(skeleton(a[0], atoms))),
        Some((CONJ, a)) => {
            let (l, r) = bin(a[0], a[1], atoms);
            Prop::And(l, r)
        }
        Some((DISJ, a)) => {
            let (l, r) = bin(a[0], a[1], atoms);
            Prop::Or(l, r)
        }
        Some((IMP, a)) => {
            let (l, r) = bin(a[0], a[1], atoms);
            Prop::Imp(l, r)
        }
        Some((IFF, a)) => {
            let (l, r) = bin(a[0], a[1], atoms);
            Prop::Iff(l, r)
        }
        _ => {
            let k = atoms.iter().position(|x| x == t).unwrap_or_else(|| {
                atoms.push(t.clone());
                atoms.len() - 1
            });
            Prop::Atom(k)
        }
    }
}

fn eval(p: &Prop, v: u32) -> bool {
    match p {
        Prop::Atom(k) => v >> k & 1 == 1,
        Prop::Const(b) => *b,
        Prop::Not(a) => !eval(a, v),
        Prop::And(a, b) => eval(a, v) && eval(b, v),
        Prop::Or(a, b) => eval(a, v) || eval(b, v),
        Prop::Imp(a, b) => !eval(a, v) || eval(b, v),
        Prop::Iff(a, b) => eval(a, v) == eval(b, v),
    }
}

/// A falsifying assignment to the propositional atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct Valuation(pub Vec<(Term, bool)>);

/// The first assignment, in binary counting order over atoms numbered by
/// first occurrence, that makes every hypothesis true and `goal` false.
pub fn refute(hyps: &[Term], goal: &Term) -> Result<Option<Valuation>, ProofError> {
    let mut atoms = Vec::new();
    let hs: Vec<Prop> = hyps.iter().map(|h| skeleton(h, &mut atoms)).collect();
    let g = skeleton(goal, &mut atoms);
    if atoms.len() > TAUT_ATOM_LIMIT {
        return Err(ProofError::TautBudget { atoms: atoms.len(), limit: TAUT_ATOM_LIMIT });
    }
    for v in 0..1u32 << atoms.len() {
        if hs.iter().all(|h| eval(h, v)) && !eval(&g, v) {
            let vals = atoms.iter().enumerate().map(|(k, a)| (a.clone(), v >> k & 1 == 1)).collect();
            return Ok(Some(Valuation(vals)));
        }
    }
    Ok(None)
}

type KResult<T> = Result<T, KernelError>;

type Thunk<'a> = Box<dyn FnOnce() -> KResult<Theorem> + 'a>;

/// A theorem derived on first use. Most expansions of a closed tableau never
/// take part in the contradiction, so their derivations are skipped.
#[derive(Clone)]
struct Pf<'a>(Rc<(OnceCell<Theorem>, Cell<Option<Thunk<'a>>>)>);

impl<'a> Pf<'a> {
    fn later(f: impl FnOnce() -> KResult<Theorem> + 'a) -> Pf<'a> {
        Pf(Rc::new((OnceCell::new(), Cell::new(Some(Box::new(f))))))
    }

    fn force(&self) -> KResult<Theorem> {
        if let Some(th) = self.0 .0.get() {
            return Ok(th.clone());
        }
        let Some(f) = self.0 .1.take() else {
            return Err(KernelError::Rule { rule: "taut", msg: "derivation failed earlier".into() });
        };
        let th = f()?;
        Ok(self.0 .0.get_or_init(|| th).clone())
    }
}

/// `th` proves `fml` when `pos`, and `¬fml` otherwise.
#[derive(Clone)]
struct Signed<'a> {
    pos: bool,
    fml: Term,
    th: Pf<'a>,
}

fn sig<'a>(pos: bool, fml: &Term, th: Pf<'a>) -> Signed<'a> {
    Signed { pos, fml: fml.clone(), th }
}

fn is_branching(s: &Signed) -> bool {
    match connective(&s.fml) {
        Some((DISJ | IMP, _)) => s.pos,
        Some((CONJ, _)) => !s.pos,
        _ => false,
    }
}

struct Tableau<'a> {
    thy: &'a Theory,
}

impl<'a> Tableau<'a> {
    fn assume(&self, t: &Term) -> Pf<'a> {
        let (thy, t) = (self.thy, t.clone());
        Pf::later(move || Theorem::assume(thy, &t))
    }

    /// Derives `⊥` from the signed formulas, or `None` if a branch stays
    /// open.
    fn close(&self, mut todo: Vec<Signed<'a>>, mut seen: Vec<Signed<'a>>) -> KResult<Option<Theorem>> {
        let thy = self.thy;
        while let Some(s) = todo.pop() {
            if let Some(o) = seen.iter().find(|o| o.pos != s.pos && o.fml == s.fml) {
                let (p, n) = if s.pos { (&s.th, &o.th) } else { (&o.th, &s.th) };
                return Ok(Some(not_elim(&n.force()?, &p.force()?)?));
            }
            if seen.iter().any(|o| o.pos == s.pos && o.fml == s.fml) {
                continue;
            }
            let Some((c, args)) = connective(&s.fml) else {
                seen.push(s);
                continue;
            };
            let th = s.th.clone();
            match (c, s.pos) {
                (FALSE, true) => return Ok(Some(th.force()?)),
                (TRUE, false) => return Ok(Some(not_elim(&th.force()?, &true_intro(thy)?)?)),
                (TRUE, true) | (FALSE, false) => {}
                (NOT, true) => todo.push(sig(false, args[0], th)),
                (NOT, false) => todo.push(sig(true, args[0], Pf::later(move || dne(&th.force()?)))),
                (CONJ, true) => {
                    let th2 = th.clone();
                    todo.push(sig(true, args[0], Pf::later(move || Theorem::conj_elim1(&th.force()?))));
                    todo.push(sig(true, args[1], Pf::later(move || Theorem::conj_elim2(&th2.force()?))));
                }
                (DISJ, false) => {
                    for k in 0..2 {
                        let (a, b) = (args[0].clone(), args[1].clone());
                        let th = th.clone();
                        let pf = Pf::later(move || {
                            let intro = if k == 0 {
                                Theorem::disj_intro1(&Theorem::assume(thy, &a)?, &b)?
                            } else {
                                Theorem::disj_intro2(&a, &Theorem::assume(thy, &b)?)?
                            };
                            not_intro(&not_elim(&th.force()?, &intro)?, if k == 0 { &a } else { &b })
                        });
                        todo.push(sig(false, args[k], pf));
                    }
                }
                (IMP, false) => {
                    let (a, b) = (args[0].clone(), args[1].clone());
                    let (th2, a2, b2) = (th.clone(), a.clone(), b.clone());
                    let th_a = Pf::later(move || {
                        let na = mk_not(&a)?;
                        let from_na = Theorem::false_elim(
                            &not_elim(&Theorem::assume(thy, &na)?, &Theorem::assume(thy, &a)?)?,
                            &b,
                        )?;
                        let bot = not_elim(&th.force()?, &Theorem::imp_intro(&from_na, &a)?)?;
                        dne(&not_intro(&bot, &na)?)
                    });
                    let not_b = Pf::later(move || {
                        let imp_b = Theorem::imp_intro(&Theorem::assume(thy, &b2)?, &a2)?;
                        not_intro(&not_elim(&th2.force()?, &imp_b)?, &b2)
                    });
                    todo.push(sig(true, args[0], th_a));
                    todo.push(sig(false, args[1], not_b));
                }
                (IFF, true) => {
                    let (a, b) = (args[0], args[1]);
                    let unfolded = Pf::later(move || unfold_iff(&th.force()?));
                    let u2 = unfolded.clone();
                    todo.push(sig(true, &mk_imp(a, b)?, Pf::later(move || Theorem::conj_elim1(&unfolded.force()?))));
                    todo.push(sig(true, &mk_imp(b, a)?, Pf::later(move || Theorem::conj_elim2(&u2.force()?))));
                }
                (IFF, false) => {
                    let c = mk_conj(&mk_imp(args[0], args[1])?, &mk_imp(args[1], args[0])?)?;
                    let c2 = c.clone();
                    let pf = Pf::later(move || {
                        let bot = not_elim(&th.force()?, &fold_iff(&Theorem::assume(thy, &c2)?)?)?;
                        not_intro(&bot, &c2)
                    });
                    todo.push(sig(false, &c, pf));
                }
                _ => seen.push(s),
            }
        }
        // Prefer a split whose branches close at once.
        let closes = |pos: bool, f: &Term| {
            (pos && is_const(f, FALSE))
                || (!pos && is_const(f, TRUE))
                || seen.iter().any(|o| o.pos != pos && o.fml == *f)
        };
        let score = |s: &Signed| {
            let Some((c, a)) = connective(&s.fml) else { return 0 };
            match c {
                DISJ => closes(true, a[0]) as u8 + closes(true, a[1]) as u8,
                IMP => closes(false, a[0]) as u8 + closes(true, a[1]) as u8,
                _ => closes(false, a[1]) as u8 + closes(false, a[0]) as u8,
            }
        };
        let mut best: Option<(usize, u8)> = None;
        for (k, s) in seen.iter().enumerate() {
            if is_branching(s) && best.map_or(true, |(_, b)| score(s) > b) {
                best = Some((k, score(s)));
            }
        }
        let Some((k, _)) = best else { return Ok(None) };
        let s = seen.remove(k);
        let (c, args) = connective(&s.fml).expect("branching formulas are compound");
        let (a, b) = (args[0], args[1]);
        let na = mk_not(a)?;
        match c {
            DISJ => {
                let Some(l) = self.close(vec![sig(true, a, self.assume(a))], seen.clone())? else { return Ok(None) };
                let Some(r) = self.close(vec![sig(true, b, self.assume(b))], seen)? else { return Ok(None) };
                Ok(Some(Theorem::disj_elim(&s.th.force()?, &l, &r)?))
            }
            IMP => {
                let th_a = self.assume(a);
                let (imp, ta) = (s.th.clone(), th_a.clone());
                let th_b = Pf::later(move || Theorem::imp_elim(&imp.force()?, &ta.force()?));
                let left = vec![sig(true, a, th_a), sig(true, b, th_b)];
                let Some(l) = self.close(left, seen.clone())? else { return Ok(None) };
                let Some(r) = self.close(vec![sig(false, a, self.assume(&na))], seen)? else { return Ok(None) };
                Ok(Some(Theorem::disj_elim(&Theorem::excluded_middle(thy, a)?, &l, &r)?))
            }
            _ => {
                let th_a = self.assume(a);
                let (nab, ta, b2) = (s.th.clone(), th_a.clone(), b.clone());
                let not_b = Pf::later(move || {
                    let ab = Theorem::conj_intro(&ta.force()?, &Theorem::assume(thy, &b2)?)?;
                    not_intro(&not_elim(&nab.force()?, &ab)?, &b2)
                });
                let left = vec![sig(true, a, th_a), sig(false, b, not_b)];
                let Some(l) = self.close(left, seen.clone())? else { return Ok(None) };
                let Some(r) = self.close(vec![sig(false, a, self.assume(&na))], seen)? else { return Ok(None) };
                Ok(Some(Theorem::disj_elim(&Theorem::excluded_middle(thy, a)?, &l, &r)?))
            }
        }
    }
}

/// A kernel proof of `hyps ⊢ goal` if it is a propositional tautology.
pub fn taut_prove(thy: &Theory, hyps: &[Term], goal: &Term) -> Result<Option<Theorem>, ProofError> {
    if !thy.is_classical() {
        return Err(ProofError::ClassicalRule { tactic: "taut", theory: thy.name().to_string() });
    }
    if refute(hyps, goal)?.is_some() {
        return Ok(None);
    }
    let tab = Tableau { thy };
    let neg = mk_not(goal)?;
    let mut todo = Vec::with_capacity(hyps.len() + 1);
    for h in hyps {
        todo.push(sig(true, h, tab.assume(h)));
    }
    todo.push(sig(false, goal, tab.assume(&neg)));
    let bot = tab
        .close(todo, Vec::new())?
        .ok_or_else(|| ProofError::InternalSoundness(format!("tableau left a branch open for {goal}")))?;
    Ok(Some(dne(&not_intro(&bot, &neg)?)?))
}

/// Closes a goal that follows propositionally from its assumptions.
/// Needs a classical theory.
pub fn taut_tac() -> Tactic {
    Tactic::new("taut", |st: &ProofState, i| {
        let Ok(goal) = st.goal(i) else { return Box::new(std::iter::empty()) };
        match taut_prove(st.theory(), &goal.context, &goal.target) {
            Ok(Some(th)) => {
                let r = Refinement { env: st.env().clone(), step: Step::Thm(th), new_goals: vec![], new_vars: vec![] };
                Box::new(st.commit(i, r).into_iter().map(Ok))
            }
            Ok(None) => Box::new(std::iter::empty()),
            Err(e) => Box::new(std::iter::once(Err(e))),
        }
    })
}
