//! Interactive proof sessions. [`Session`] holds the command semantics;
//! [`repl`] and [`protocol`] put a text and a JSON surface on top.

pub mod protocol;
pub mod repl;

use thiserror::Error;

use crate::auto::{find_counterexample_with, Cancel, FiniteModel, ModelError};
use crate::kernel::{KernelError, Theorem};
use crate::library::{base, varify};
use crate::proof::{init_proof, lookup_rule, qed, rule_tac, Goal, ProofError, ProofState};
use crate::script::compile;
use crate::store::{lookup_theorem, report, Lookup, Report, Store, StoreError};
use crate::syntax::{parse_tactic_expr, parse_term, print_term, Mode, ParseError};
use crate::term::logic::mk_imp;
use crate::{Term, Theory};

#[derive(Error, Debug)]
pub enum SessionError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("tactic failed")]
    TacticFailed,
    #[error("tactic has no alternative {0}")]
    NoAlternative(usize),
    #[error("no proof in progress")]
    NoProof,
    #[error("no state {0}")]
    NoState(usize),
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown command {0}")]
    UnknownCommand(String),
}

impl SessionError {
    /// Short machine-readable category used in protocol error responses.
    pub fn kind(&self) -> &'static str {
        match self {
            SessionError::Parse(_) => "parse",
            SessionError::Proof(ProofError::Incomplete(_)) => "incomplete",
            SessionError::Proof(ProofError::Cancelled) | SessionError::Model(ModelError::Cancelled) => "cancelled",
            SessionError::Proof(_) => "proof",
            SessionError::Store(StoreError::Parse { .. }) => "parse",
            SessionError::Store(StoreError::UnknownTheorem(_) | StoreError::NotFound(_)) => "not_found",
            SessionError::Store(_) => "theory",
            SessionError::Kernel(_) => "kernel",
            SessionError::Model(_) => "cex",
            SessionError::TacticFailed | SessionError::NoAlternative(_) => "tactic_failed",
            SessionError::NoProof => "no_proof",
            SessionError::NoState(_) => "not_found",
            SessionError::BadRequest(_) => "bad_request",
            SessionError::UnknownCommand(_) => "unknown_command",
        }
    }
}

pub type Result<T> = std::result::Result<T, SessionError>;

/// One node of the history tree.
#[derive(Clone)]
pub struct HistoryNode {
    pub id: usize,
    pub parent: Option<usize>,
    /// The command that produced the state.
    pub label: String,
    pub state: ProofState,
}

struct Proof {
    nodes: Vec<HistoryNode>,
    current: usize,
}

/// A theory context plus at most one proof in progress.
pub struct Session {
    store: Store,
    thy: Theory,
    mode: Mode,
    proof: Option<Proof>,
    cancel: Option<Cancel>,
}

impl Session {
    /// A session working in `Base`.
    pub fn new(store: Store) -> Session {
        Session { store, thy: base().clone(), mode: Mode::Unicode, proof: None, cancel: None }
    }

    pub fn theory(&self) -> &Theory {
        &self.thy
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    /// Token consulted by the searching tactics of the next commands.
    pub fn set_cancel(&mut self, cancel: Option<Cancel>) {
        self.cancel = cancel;
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        self.store.take_warnings()
    }

    /// Makes the named theory current. Any proof in progress is dropped.
    pub fn load(&mut self, name: &str) -> Result<Report> {
        self.thy = self.store.load(name)?;
        self.proof = None;
        Ok(report(&self.thy))
    }

    /// Checks theory source text and makes it current.
    pub fn load_text(&mut self, text: &str, origin: &str) -> Result<Report> {
        self.thy = self.store.load_text(text, origin)?;
        self.proof = None;
        Ok(report(&self.thy))
    }

    pub fn goal(&mut self, formula: &str) -> Result<&ProofState> {
        let phi = parse_term(&self.thy, formula)?;
        let st = init_proof(&self.thy, &phi)?;
        let root = HistoryNode { id: 0, parent: None, label: format!("goal {formula}"), state: st };
        self.proof = Some(Proof { nodes: vec![root], current: 0 });
        self.state()
    }

    pub fn state(&self) -> Result<&ProofState> {
        let p = self.proof.as_ref().ok_or(SessionError::NoProof)?;
        Ok(&p.nodes[p.current].state)
    }

    pub fn state_id(&self) -> Option<usize> {
        self.proof.as_ref().map(|p| p.current)
    }

    /// Applies `tactic` to goal `goal` (0-based) and moves to successor
    /// number `alt` (0-based) of the result sequence.
    pub fn apply(&mut self, tactic: &str, goal: usize, alt: usize) -> Result<&ProofState> {
        let expr = parse_tactic_expr(tactic)?;
        let st = self.state()?.clone();
        st.goal(goal)?;
        let tac = compile(&self.thy, &expr, self.cancel.as_ref())?;
        let next = match tac.apply(&st, goal).nth(alt) {
            Some(r) => r?,
            None if alt == 0 => return Err(SessionError::TacticFailed),
            None => return Err(SessionError::NoAlternative(alt + 1)),
        };
        let next = next.with_parent(&st);
        let p = self.proof.as_mut().expect("state() checked the proof");
        let id = p.nodes.len();
        p.nodes.push(HistoryNode { id, parent: Some(p.current), label: format!("apply {expr}"), state: next });
        p.current = id;
        self.state()
    }

    /// Moves to the parent of the current state.
    pub fn undo(&mut self) -> Result<&ProofState> {
        let p = self.proof.as_mut().ok_or(SessionError::NoProof)?;
        p.current = p.nodes[p.current].parent.ok_or(ProofError::NoHistory)?;
        self.state()
    }

    pub fn history(&self) -> Result<&[HistoryNode]> {
        Ok(&self.proof.as_ref().ok_or(SessionError::NoProof)?.nodes)
    }

    pub fn revert(&mut self, id: usize) -> Result<&ProofState> {
        let p = self.proof.as_mut().ok_or(SessionError::NoProof)?;
        if id >= p.nodes.len() {
            return Err(SessionError::NoState(id));
        }
        p.current = id;
        self.state()
    }

    /// Replays the finished proof through the kernel. With a name, the
    /// theorem is stored in the current theory with its free variables
    /// generalised.
    pub fn qed(&mut self, name: Option<&str>) -> Result<Theorem> {
        let th = qed(self.state()?)?;
        if let Some(n) = name {
            let stored = varify(&th)?;
            self.thy = self.thy.store_theorem(n, &stored)?;
            self.store.register(self.thy.clone());
        }
        Ok(th)
    }

    pub fn thm(&self, name: &str) -> Result<Lookup> {
        Ok(lookup_theorem(&self.thy, name)?)
    }

    /// Searches for a finite model falsifying goal `goal` (0-based), read
    /// as the implication from its assumptions to its target.
    pub fn cex(&self, goal: usize, max_size: usize) -> Result<Option<FiniteModel>> {
        let g = self.state()?.goal(goal)?;
        if g.target.has_schematic() || g.context.iter().any(Term::has_schematic) {
            return Err(SessionError::BadRequest("the goal still contains placeholders".into()));
        }
        let phi = g.context.iter().rev().try_fold(g.target.clone(), |acc, a| mk_imp(a, &acc)).map_err(KernelError::from)?;
        Ok(find_counterexample_with(&phi, max_size, self.cancel.as_ref())?)
    }

    /// Visible rules that apply backward to goal `goal`: those whose
    /// conclusion unifies with its target. Rules concluding in a bare
    /// placeholder fit every goal and are left out.
    pub fn rules(&self, goal: usize) -> Result<Vec<String>> {
        let st = self.state()?;
        st.goal(goal)?;
        let mut out = Vec::new();
        for name in self.thy.visible_fact_names() {
            let Ok(rule) = lookup_rule(&self.thy, &name) else { continue };
            if rule.concl.head().is_schematic() {
                continue;
            }
            if rule_tac(rule).apply(st, goal).any(|r| r.is_ok()) {
                out.push(name);
            }
        }
        Ok(out)
    }

    /// Names of visible facts starting with `prefix`, sorted.
    pub fn theorems(&self, prefix: &str) -> Vec<String> {
        let mut names: Vec<String> =
            self.thy.visible_fact_names().into_iter().filter(|n| n.starts_with(prefix)).collect();
        names.sort();
        names
    }

    pub fn render_term(&self, t: &Term) -> String {
        print_term(&self.thy, t, self.mode)
    }

    pub fn render_goal(&self, g: &Goal) -> String {
        g.render(&self.thy, self.mode)
    }

    /// `⊢ φ`, with hypotheses before the turnstile if there are any.
    pub fn render_theorem(&self, th: &Theorem) -> String {
        let turnstile = if self.mode == Mode::Ascii { "|-" } else { "⊢" };
        let hyps: Vec<String> = th.hyps().iter().map(|h| self.render_term(h)).collect();
        let concl = self.render_term(th.concl());
        if hyps.is_empty() {
            format!("{turnstile} {concl}")
        } else {
            format!("{} {turnstile} {concl}", hyps.join(", "))
        }
    }
}

#[cfg(test)]
mod tests;
