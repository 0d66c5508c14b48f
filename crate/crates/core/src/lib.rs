//! An LCF-style theorem prover for higher-order logic.
//!
//! Theorems can only be produced by the inference rules in [`kernel`]; every
//! tactic, decision procedure and proof script is checked by replaying its
//! justification through those rules.

pub mod auto;
pub mod kernel;
pub mod library;
pub mod proof;
pub mod script;
pub mod session;
pub mod store;
pub mod syntax;
pub mod term;
pub mod unify;

pub use kernel::theory::Theory;
pub use kernel::{KernelError, Theorem};
pub use term::{Name, Term, TermKind, Type};
