//! Turns parsed tactic expressions into tactics.

use crate::auto::{blast_tac_with, simp_tac_with, taut_tac, Cancel, Simpset, DEFAULT_BLAST_DEPTH};
use crate::proof::{
    all_goals, assume_tac, erule_tac, lookup_rule, orelse, repeat, rule_tac, then, try_tac, ProofError, Tactic,
};
use crate::syntax::TacticExpr;
use crate::Theory;

/// Resolves rule and fact names in `thy`. `cancel` is handed to the
/// searching tactics.
pub fn compile(thy: &Theory, expr: &TacticExpr, cancel: Option<&Cancel>) -> Result<Tactic, ProofError> {
    let sub = |e: &TacticExpr| compile(thy, e, cancel);
    Ok(match expr {
        TacticExpr::Rule(name) => rule_tac(lookup_rule(thy, name)?),
        TacticExpr::ERule(name) => erule_tac(lookup_rule(thy, name)?),
        TacticExpr::Assumption => assume_tac(),
        TacticExpr::Simp(names) => {
            let mut ss = Simpset::new();
            for n in names {
                ss.add_fact(thy, n)?;
            }
            simp_tac_with(ss, cancel.cloned())
        }
        TacticExpr::Taut => taut_tac(),
        TacticExpr::Blast(depth) => {
            blast_tac_with(depth.map_or(DEFAULT_BLAST_DEPTH, |d| d as usize), cancel.cloned())
        }
        TacticExpr::Then(a, b) => then(sub(a)?, sub(b)?),
        TacticExpr::OrElse(a, b) => orelse(sub(a)?, sub(b)?),
        TacticExpr::Repeat(t) => repeat(sub(t)?),
        TacticExpr::Try(t) => try_tac(sub(t)?),
        TacticExpr::AllGoals(t) => all_goals(sub(t)?),
    })
}
