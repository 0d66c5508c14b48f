//! Fixtures shared by the benchmarks.

use lcfkit::library::base;
use lcfkit::proof::{init_proof, ProofState};
use lcfkit::script::compile;
use lcfkit::store::Store;
use lcfkit::syntax::{parse_tactic_expr, parse_term};
use lcfkit::{Term, Theory};

/// Propositional tautologies of increasing difficulty for `taut`.
pub const TAUTOLOGIES: &[(&str, &str)] = &[
    ("contrapositive", "(p → q) ↔ (¬q → ¬p)"),
    ("peirce", "((p → q) → p) → p"),
    ("distribution", "p ∧ (q ∨ r) ↔ (p ∧ q) ∨ (p ∧ r)"),
    ("iff_chain", "((p ↔ q) ↔ r) ↔ (p ↔ (q ↔ r))"),
    ("five_atoms", "(p → q) ∧ (q → r) ∧ (r → s) ∧ (s → t) → (p → t)"),
];

/// First-order goals for `blast`, in the classical theory.
pub const BLAST_GOALS: &[(&str, &str)] = &[
    ("swap_quantifiers", "(∃x. ∀y. R x y) → (∀y. ∃x. R x y)"),
    ("all_imp", "(∀x. P x → Q x) → (∀x. P x) → (∀x. Q x)"),
    ("exists_or", "(∃x. P x ∨ Q x) ↔ (∃x. P x) ∨ (∃x. Q x)"),
];

/// A large formula for the parser and printer.
pub fn long_formula(width: usize) -> String {
    (0..width)
        .map(|k| format!("(∀x. P x ∧ R x c{} → (∃y. R y x ∨ ¬P y))", k % 3))
        .collect::<Vec<_>>()
        .join(" ∧ ")
}

pub fn parse(thy: &Theory, s: &str) -> Term {
    parse_term(thy, s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

/// The classical theory with a few symbols for the first-order goals.
pub fn fo_theory() -> Theory {
    let src = "theory Bench imports Classical\n\
               type i 0\n\
               const P :: \"i ⇒ bool\"\n\
               const Q :: \"i ⇒ bool\"\n\
               const R :: \"i ⇒ i ⇒ bool\"\n\
               const c0 :: i\nconst c1 :: i\nconst c2 :: i\n";
    Store::new(Vec::new()).load_text(src, "Bench.lthy").expect("bench theory")
}

/// The bundled `Nat` theory, loaded from scratch.
pub fn nat() -> Theory {
    Store::new(Vec::new()).load("Nat").expect("Nat loads")
}

/// A proof of `p ∧ q ⟶ q ∧ p` in `Base`, finished but not yet replayed.
pub fn conj_swap() -> ProofState {
    let thy = base();
    let goal = parse(thy, "p ∧ q ⟶ q ∧ p");
    let script = parse_tactic_expr("rule impI, erule conjE, rule conjI, assumption, assumption").unwrap();
    let tac = compile(thy, &script, None).unwrap();
    let st = init_proof(thy, &goal).unwrap();
    let done = tac.apply(&st, 0).next().expect("script applies").unwrap();
    assert!(done.is_complete());
    done
}
