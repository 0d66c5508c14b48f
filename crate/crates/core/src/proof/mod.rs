//! Backward proof: goals, persistent proof states with shared schematic
//! placeholders, and validation by kernel replay.
//!
//! Every tactic records a step in an append-only log. [`qed`] replays the
//! log through the kernel under the final substitution, so a tactic bug can
//! make `qed` fail but cannot produce a wrong theorem.

mod rule;
mod tactic;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{Instantiation, KernelError, Theorem};
use crate::library::derived;
use crate::syntax::{print_term, variant, Mode};
use crate::term::{Name, Term, TermKind, Type, TypeError};
use crate::unify::{max_index_term, SubstEnv};
use crate::Theory;

pub(crate) use rule::rename_apart;
pub use rule::{derive_rule, lookup_rule, Premise, Rule};
pub use tactic::{
    all_goals, all_tac, assume_tac, erule_tac, erule_keep_tac, fail_tac, first, orelse, repeat, repeat_n,
    rule_tac, then, try_tac, States, Tactic, DEFAULT_REPEAT_CAP,
};

#[derive(Error, Debug, Clone)]
pub enum ProofError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("proof incomplete: {}", remaining(*.0))]
    Incomplete(usize),
    #[error("internal soundness error: {0}")]
    InternalSoundness(String),
    #[error("no earlier state to return to")]
    NoHistory,
    #[error("tactic did not terminate within {0} iterations")]
    TacticLoop(usize),
    #[error("simplifier gave up after {steps} steps; last rules: {}", rules.join(", "))]
    SimpLoop { steps: usize, rules: Vec<String> },
    #[error("{tactic} needs a classical theory; {theory} is intuitionistic")]
    ClassicalRule { tactic: &'static str, theory: String },
    #[error("taut handles at most {limit} atoms, goal has {atoms}")]
    TautBudget { atoms: usize, limit: usize },
    #[error("no goal {0}")]
    NoSuchGoal(usize),
    #[error("unknown theorem {0}")]
    NotFound(String),
    #[error("cannot use as a rule: {0}")]
    BadRule(String),
    #[error("cannot use as a rewrite rule: {0}")]
    BadSimpRule(String),
    #[error("cancelled")]
    Cancelled,
}

fn remaining(n: usize) -> String {
    if n == 1 {
        "1 goal remains".to_string()
    } else {
        format!("{n} goals remain")
    }
}

/// A subgoal: prove `target` from `context` for arbitrary values of the
/// fixed `params`.
#[derive(Clone, Debug, PartialEq)]
pub struct Goal {
    pub id: u32,
    pub params: Vec<(Name, Type)>,
    pub context: Vec<Term>,
    pub target: Term,
}

impl Goal {
    fn apply_env(&self, env: &SubstEnv) -> Goal {
        Goal {
            id: self.id,
            params: self.params.clone(),
            context: self.context.iter().map(|t| env.apply(t)).collect(),
            target: env.apply(&self.target),
        }
    }

    /// `⋀x. A₁, A₂ ⊢ φ`, or just `φ` when there are no assumptions.
    pub fn render(&self, thy: &Theory, mode: Mode) -> String {
        let mut out = String::new();
        if !self.params.is_empty() {
            let names: Vec<&str> = self.params.iter().map(|(n, _)| n.as_ref()).collect();
            out.push_str(if mode == Mode::Ascii { "!!" } else { "⋀" });
            out.push_str(&names.join(" "));
            out.push_str(". ");
        }
        if !self.context.is_empty() {
            let ctx: Vec<String> = self.context.iter().map(|t| print_term(thy, t, mode)).collect();
            out.push_str(&ctx.join(", "));
            out.push_str(if mode == Mode::Ascii { " |- " } else { " ⊢ " });
        }
        out.push_str(&print_term(thy, &self.target, mode));
        out
    }
}

#[derive(Clone)]
pub struct PremiseUse {
    pub child: u32,
    pub params: Vec<Term>,
    pub assumptions: Vec<Term>,
}

/// How a goal was reduced.
#[derive(Clone)]
pub enum Step {
    /// Backward rule application; `major` is the assumption that proved the
    /// first premise in elimination style.
    Resolve { rule: Theorem, major: Option<Term>, premises: Vec<PremiseUse> },
    Assumption(Term),
    /// Closed by a theorem whose hypotheses lie in the goal's context.
    Thm(Theorem),
    /// `eq` proves `target = child target`.
    Rewrite { eq: Theorem, child: u32 },
}

struct LogNode {
    goal: Goal,
    step: Step,
    prev: Option<Arc<LogNode>>,
}

/// A proof in progress. States are immutable; tactics return new ones.
#[derive(Clone)]
pub struct ProofState {
    thy: Theory,
    original: Term,
    goals: Arc<Vec<Goal>>,
    env: SubstEnv,
    log: Option<Arc<LogNode>>,
    parent: Option<Arc<ProofState>>,
    next_goal: u32,
    next_var: u32,
    /// Parameters a placeholder may mention: those in scope where it was
    /// introduced.
    scopes: Arc<HashMap<(Name, u32), Arc<[Name]>>>,
    /// Every parameter name handed out, plus the free variables of the
    /// original goal.
    used: Arc<HashSet<Name>>,
    params: Arc<HashSet<Name>>,
    /// Placeholders that have appeared in some goal.
    shown: Arc<BTreeSet<(Name, u32)>>,
    steps: usize,
}

impl fmt::Debug for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProofState").field("goals", &self.goals).field("env", &self.env).finish()
    }
}

fn schematic_keys(t: &Term, out: &mut Vec<(Name, u32)>) {
    t.for_each_leaf(&mut |l| {
        if let TermKind::Schematic(n, i) = l.kind() {
            let k = (n.clone(), *i);
            if !out.contains(&k) {
                out.push(k);
            }
        }
    });
}

/// Starts a backward proof of `phi`.
pub fn init_proof(thy: &Theory, phi: &Term) -> Result<ProofState, ProofError> {
    phi.expect_bool()?;
    thy.check_term(phi)?;
    let used: HashSet<Name> = phi.free_vars().iter().map(|v| v.name.clone()).collect();
    let mut keys = Vec::new();
    schematic_keys(phi, &mut keys);
    let empty: Arc<[Name]> = Arc::from(Vec::new());
    Ok(ProofState {
        thy: thy.clone(),
        original: phi.clone(),
        goals: Arc::new(vec![Goal { id: 0, params: vec![], context: vec![], target: phi.clone() }]),
        env: SubstEnv::new(),
        log: None,
        parent: None,
        next_goal: 1,
        next_var: max_index_term(phi),
        scopes: Arc::new(keys.iter().map(|k| (k.clone(), empty.clone())).collect()),
        used: Arc::new(used),
        params: Arc::new(HashSet::new()),
        shown: Arc::new(keys.into_iter().collect()),
        steps: 0,
    })
}

/// A reduction of one goal, not yet committed.
pub struct Refinement {
    pub env: SubstEnv,
    pub step: Step,
    pub new_goals: Vec<Goal>,
    /// Fresh schematics introduced by this step, scoped to the goal's params.
    pub new_vars: Vec<(Name, u32)>,
}

impl ProofState {
    pub fn theory(&self) -> &Theory {
        &self.thy
    }

    pub fn original(&self) -> &Term {
        &self.original
    }

    pub fn goals(&self) -> &[Goal] {
        &self.goals
    }

    pub fn env(&self) -> &SubstEnv {
        &self.env
    }

    pub fn is_complete(&self) -> bool {
        self.goals.is_empty()
    }

    /// Number of steps since the initial state.
    pub fn depth(&self) -> usize {
        self.steps
    }

    pub fn goal(&self, i: usize) -> Result<&Goal, ProofError> {
        self.goals.get(i).ok_or(ProofError::NoSuchGoal(i))
    }

    /// The state before the last step.
    pub fn undo(&self) -> Result<ProofState, ProofError> {
        self.parent.as_deref().cloned().ok_or(ProofError::NoHistory)
    }

    /// This state with its undo history replaced by `parent`, so that a
    /// compound tactic counts as one step.
    pub fn with_parent(mut self, parent: &ProofState) -> ProofState {
        self.parent = Some(Arc::new(parent.clone()));
        self
    }

    /// Assignments to placeholders that have appeared in goals, printed.
    pub fn placeholders(&self, mode: Mode) -> Vec<(String, String)> {
        self.shown
            .iter()
            .filter_map(|(n, i)| {
                let b = self.env.term_binding(n, *i)?;
                let name = if *i == 0 { format!("?{n}") } else { format!("?{n}.{i}") };
                Some((name, print_term(&self.thy, b, mode)))
            })
            .collect()
    }

    pub(crate) fn next_var(&self) -> u32 {
        self.next_var
    }

    pub(crate) fn next_var_mut(&mut self) -> &mut u32 {
        &mut self.next_var
    }

    pub(crate) fn fresh_goal_id(&mut self) -> u32 {
        self.next_goal += 1;
        self.next_goal - 1
    }

    /// A parameter name based on `base` that is new to this proof.
    pub(crate) fn fresh_param(&mut self, base: &str, ty: &Type) -> Term {
        let mut k = 0;
        let name = loop {
            let cand = variant(base, k);
            if !self.used.contains(cand.as_str()) && self.thy.const_info(&cand).is_none() {
                break Name::from(cand);
            }
            k += 1;
        };
        Arc::make_mut(&mut self.used).insert(name.clone());
        Arc::make_mut(&mut self.params).insert(name.clone());
        Term::free(name, ty.clone())
    }

    /// Checks that no placeholder was instantiated with a parameter that was
    /// not in scope where the placeholder arose, and records the scopes of
    /// placeholders the unifier invented.
    fn check_scopes(&mut self, env: &SubstEnv) -> bool {
        let mut invented: HashMap<(Name, u32), Vec<Name>> = HashMap::new();
        for (key, binding) in env.term_bindings() {
            let Some(allowed) = self.scopes.get(key) else { continue };
            if self.env.term_binding(&key.0, key.1) == Some(binding) {
                continue;
            }
            for v in binding.free_vars().iter() {
                if self.params.contains(&v.name) && !allowed.contains(&v.name) {
                    return false;
                }
            }
            let mut inner = Vec::new();
            schematic_keys(binding, &mut inner);
            for k in inner {
                if self.scopes.contains_key(&k) {
                    continue;
                }
                let entry = invented.entry(k).or_insert_with(|| allowed.to_vec());
                entry.retain(|n| allowed.contains(n));
            }
        }
        if !invented.is_empty() {
            let scopes = Arc::make_mut(&mut self.scopes);
            for (k, v) in invented {
                scopes.insert(k, Arc::from(v));
            }
        }
        true
    }

    /// Replaces goal `i` according to `r`. Returns `None` when the
    /// substitution would let a placeholder escape its scope.
    pub(crate) fn commit(&self, i: usize, r: Refinement) -> Option<ProofState> {
        let mut next = self.clone();
        let old = self.goals[i].clone();
        if !r.new_vars.is_empty() {
            let allowed: Arc<[Name]> = Arc::from(old.params.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>());
            let scopes = Arc::make_mut(&mut next.scopes);
            for k in &r.new_vars {
                scopes.insert(k.clone(), allowed.clone());
            }
        }
        if !next.check_scopes(&r.env) {
            return None;
        }
        let mut goals: Vec<Goal> = Vec::with_capacity(self.goals.len() + r.new_goals.len());
        let changed = r.env != self.env;
        if changed {
            // the unifier may have invented variables
            next.next_var = next.next_var.max(r.env.max_index());
        }
        for (k, g) in self.goals.iter().enumerate() {
            if k == i {
                goals.extend(r.new_goals.iter().map(|g| g.apply_env(&r.env)));
            } else if changed {
                goals.push(g.apply_env(&r.env));
            } else {
                goals.push(g.clone());
            }
        }
        let mut keys = Vec::new();
        for g in &goals[i..i + r.new_goals.len()] {
            schematic_keys(&g.target, &mut keys);
            for c in &g.context {
                schematic_keys(c, &mut keys);
            }
        }
        if keys.iter().any(|k| !next.shown.contains(k)) {
            Arc::make_mut(&mut next.shown).extend(keys);
        }
        next.goals = Arc::new(goals);
        next.env = r.env;
        next.log = Some(Arc::new(LogNode { goal: old, step: r.step, prev: self.log.clone() }));
        next.parent = Some(Arc::new(self.clone()));
        next.steps += 1;
        Some(next)
    }
}

struct Replay<'a> {
    thy: &'a Theory,
    inst: Instantiation,
    nodes: HashMap<u32, &'a LogNode>,
}

impl Replay<'_> {
    fn apply(&self, t: &Term) -> Result<Term, ProofError> {
        Ok(self.inst.apply(t)?)
    }

    fn prove(&self, id: u32) -> Result<Theorem, ProofError> {
        let node = self
            .nodes
            .get(&id)
            .ok_or_else(|| ProofError::InternalSoundness(format!("goal {id} has no recorded step")))?;
        let goal = &node.goal;
        let th = match &node.step {
            Step::Resolve { rule, major, premises } => {
                let mut acc = Theorem::inst(&Theorem::transfer(rule, self.thy)?, &self.inst)?;
                if let Some(m) = major {
                    acc = Theorem::imp_elim(&acc, &Theorem::assume(self.thy, &self.apply(m)?)?)?;
                }
                for p in premises {
                    let mut th = self.prove(p.child)?;
                    for a in p.assumptions.iter().rev() {
                        th = Theorem::imp_intro(&th, &self.apply(a)?)?;
                    }
                    for x in p.params.iter().rev() {
                        th = Theorem::all_intro(&th, &self.apply(x)?)?;
                    }
                    acc = Theorem::imp_elim(&acc, &th)?;
                }
                acc
            }
            Step::Assumption(t) => Theorem::assume(self.thy, &self.apply(t)?)?,
            Step::Thm(th) => Theorem::inst(&Theorem::transfer(th, self.thy)?, &self.inst)?,
            Step::Rewrite { eq, child } => {
                let eq = Theorem::inst(&Theorem::transfer(eq, self.thy)?, &self.inst)?;
                derived::eq_mp(&derived::sym(&eq)?, &self.prove(*child)?)?
            }
        };
        let target = self.apply(&goal.target)?;
        if th.concl() != &target {
            return Err(ProofError::InternalSoundness(format!(
                "replay of goal {id} proved {} instead of {}",
                th.concl(),
                target
            )));
        }
        let ctx: Vec<Term> = goal.context.iter().map(|c| self.apply(c)).collect::<Result<_, _>>()?;
        if let Some(h) = th.hyps().iter().find(|h| !ctx.contains(h)) {
            return Err(ProofError::InternalSoundness(format!("replay of goal {id} used hypothesis {h}")));
        }
        Ok(th)
    }
}

/// Replays a finished proof through the kernel.
pub fn qed(state: &ProofState) -> Result<Theorem, ProofError> {
    if !state.goals.is_empty() {
        return Err(ProofError::Incomplete(state.goals.len()));
    }
    let mut nodes = HashMap::new();
    let mut cur = state.log.as_deref();
    while let Some(n) = cur {
        nodes.insert(n.goal.id, n);
        cur = n.prev.as_deref();
    }
    let replay = Replay { thy: &state.thy, inst: state.env.to_instantiation(), nodes };
    let th = replay.prove(0)?;
    let expected = replay.apply(&state.original)?;
    if th.concl() != &expected || !th.hyps().is_empty() {
        return Err(ProofError::InternalSoundness(format!("replay proved {} instead of {expected}", th.concl())));
    }
    Ok(th)
}
