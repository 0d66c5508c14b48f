//! Automation: a simplifier, a tautology prover, proof search and a
//! countermodel finder. The provers only produce proof steps that `qed`
//! replays through the kernel.

mod blast;
mod countermodel;
mod simp;
mod taut;

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

pub use blast::{blast_tac, blast_tac_with, DEFAULT_BLAST_DEPTH};
pub use countermodel::{find_counterexample, find_counterexample_with, FiniteModel, ModelError, Sort, Table};
pub use simp::{simp_conv, simp_tac, simp_tac_with, Simpset, DEFAULT_SIMP_CAP};
pub use taut::{refute, taut_prove, taut_tac, Valuation, TAUT_ATOM_LIMIT};

/// Cooperative cancellation flag shared between a search and its caller.
#[derive(Clone, Debug, Default)]
pub struct Cancel(Arc<AtomicBool>);

impl Cancel {
    pub fn new() -> Cancel {
        Cancel::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}
