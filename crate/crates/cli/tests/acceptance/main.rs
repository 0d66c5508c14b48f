//! End-to-end acceptance checks. Each check prints one `[PASS]` or `[FAIL]`
//! line; the process exits nonzero if any check fails.

mod fol;
mod prop;
mod terms;
mod unif;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use lcfkit::auto::{blast_tac, blast_tac_with, find_counterexample, taut_prove, taut_tac, Cancel};
use lcfkit::library::{base, classical, ELIM_RULES, INTRO_RULES};
use lcfkit::proof::{assume_tac, erule_tac, init_proof, lookup_rule, qed, rule_tac, ProofError, ProofState, Tactic};
use lcfkit::script::compile;
use lcfkit::store::Store;
use lcfkit::syntax::{parse_tactic_expr, parse_term, print_term, Mode};
use lcfkit::unify::{unify, SubstEnv};
use lcfkit::{KernelError, Term, Theorem, Theory};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn here() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lcfkit"));
    c.env_remove("LCFKIT_PATH");
    c
}

fn run_with_stdin(mut cmd: Command, input: &str) -> Result<std::process::Output, String> {
    let mut child =
        cmd.stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped()).spawn().map_err(|e| e.to_string())?;
    child.stdin.take().unwrap().write_all(input.as_bytes()).map_err(|e| e.to_string())?;
    child.wait_with_output().map_err(|e| e.to_string())
}

/// Proves `phi` in `thy` with a single tactic, returning the replayed theorem.
fn prove_with(thy: &Theory, phi: &Term, tac: &Tactic) -> Result<Option<Theorem>, ProofError> {
    let st = init_proof(thy, phi)?;
    match tac.apply(&st, 0).next() {
        None => Ok(None),
        Some(r) => {
            let done = r?;
            ensure_complete(&done)?;
            Ok(Some(qed(&done)?))
        }
    }
}

fn ensure_complete(st: &ProofState) -> Result<(), ProofError> {
    if st.is_complete() {
        Ok(())
    } else {
        Err(ProofError::Incomplete(st.goals().len()))
    }
}

/// Runs `f` with a cancellation token that fires after `budget`.
fn with_budget<T>(budget: Duration, f: impl FnOnce(Cancel) -> T) -> T {
    let cancel = Cancel::new();
    let (done, wait) = mpsc::channel::<()>();
    std::thread::scope(|s| {
        let token = cancel.clone();
        s.spawn(move || {
            if wait.recv_timeout(budget).is_err() {
                token.cancel();
            }
        });
        let out = f(cancel);
        let _ = done.send(());
        out
    })
}

fn soundness_fuzz() -> Outcome {
    const SCRIPTS: usize = 100_000;
    let thy = base();
    let rule = |r: &str| lookup_rule(thy, r).map_err(|e| e.to_string());
    // Tactics that tend to make progress, and backward eliminations, which
    // leave placeholders for later steps to instantiate.
    let mut direct: Vec<Tactic> = vec![assume_tac()];
    let mut backward: Vec<Tactic> = Vec::new();
    for r in INTRO_RULES {
        direct.push(rule_tac(rule(r)?));
    }
    for r in ELIM_RULES {
        direct.push(erule_tac(rule(r)?));
        backward.push(rule_tac(rule(r)?));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let (mut proved, mut steps, mut refused) = (0usize, 0usize, 0usize);
    for n in 0..SCRIPTS {
        let phi = match rng.gen_range(0..3) {
            0 => prop::random(&mut rng, 6).to_term(),
            1 => fol::to_term(&fol::gen(&mut rng, 3)),
            // provable goals, so that more scripts reach qed
            _ => (0..50)
                .map(|_| prop::random(&mut rng, 4))
                .find(|f| prop::truth_table_valid(f) && prop::intuitionistic_valid(f))
                .unwrap_or(prop::F::Top)
                .to_term(),
        };
        let mut st = init_proof(thy, &phi).map_err(|e| format!("script {n}: {e}"))?;
        let random_steps = rng.gen_range(1..=10);
        for step in 0..random_steps + 4 {
            if st.is_complete() {
                break;
            }
            let goal = rng.gen_range(0..st.goals().len());
            let order: Vec<&Tactic> = if step >= random_steps {
                // closing phase: assumption first, then the rest in random order
                let mut rest: Vec<&Tactic> = direct[1..].iter().collect();
                rest.shuffle(&mut rng);
                std::iter::once(&direct[0]).chain(rest).take(6).collect()
            } else if rng.gen_bool(0.5) {
                let k = rng.gen_range(0..direct.len() + backward.len());
                vec![direct.get(k).unwrap_or_else(|| &backward[k - direct.len()])]
            } else {
                let mut d: Vec<&Tactic> = direct.iter().collect();
                let mut b: Vec<&Tactic> = backward.iter().collect();
                d.shuffle(&mut rng);
                b.shuffle(&mut rng);
                d.into_iter().chain(b).take(6).collect()
            };
            let mut next = None;
            for tac in order {
                let mut alts = Vec::new();
                for r in tac.apply(&st, goal).take(3) {
                    match r {
                        Ok(s) => alts.push(s),
                        Err(ProofError::InternalSoundness(m)) => return Err(format!("script {n}: {m}")),
                        Err(_) => refused += 1,
                    }
                }
                if !alts.is_empty() {
                    next = Some(alts.swap_remove(rng.gen_range(0..alts.len())));
                    break;
                }
            }
            if let Some(s) = next {
                st = s;
                steps += 1;
            }
        }
        match qed(&st) {
            Ok(th) => {
                ensure!(st.is_complete(), "script {n}: qed accepted an open state");
                ensure!(th.hyps().is_empty(), "script {n}: theorem has hypotheses");
                ensure!(*th.concl() == phi, "script {n}: proved {:?} instead of {:?}", th.concl(), phi);
                ensure!(th.theory().same_lineage(thy), "script {n}: theorem left its theory");
                proved += 1;
            }
            Err(ProofError::Incomplete(_)) => ensure!(!st.is_complete(), "script {n}: finished proof rejected"),
            Err(e) => return Err(format!("script {n}: replay failed: {e}")),
        }
    }
    Ok(format!("{SCRIPTS} scripts, {steps} steps, {proved} theorems, {refused} refusals"))
}

fn taut_vs_truth_table() -> Outcome {
    let thy = classical();
    let (mut count, mut valid) = (0usize, 0usize);
    for (size, fs) in prop::enumerate(9).iter().enumerate() {
        for f in fs {
            let phi = f.to_term();
            let expect = prop::truth_table_valid(f);
            let got = taut_prove(thy, &[], &phi).map_err(|e| format!("{phi:?}: {e}"))?;
            match got {
                Some(th) => {
                    ensure!(expect, "taut proved the non-tautology {f:?}");
                    ensure!(th.hyps().is_empty() && *th.concl() == phi, "taut proved the wrong statement for {f:?}");
                    valid += 1;
                }
                None => ensure!(!expect, "taut missed the tautology {f:?} (size {size})"),
            }
            count += 1;
        }
    }
    Ok(format!("{count} formulas, {valid} tautologies"))
}

fn intuitionistic_split() -> Outcome {
    use prop::{imp, not, or, F};
    let (p, q) = (F::Atom(0), F::Atom(1));
    let lem = or(p.clone(), not(p.clone()));
    let peirce = imp(imp(imp(p.clone(), q), p.clone()), p.clone());
    for (name, f) in [("excluded middle", &lem), ("Peirce", &peirce)] {
        let phi = f.to_term();
        ensure!(prop::truth_table_valid(f), "{name} is not classically valid?");
        ensure!(!prop::intuitionistic_valid(f), "the oracle proves {name} intuitionistically");
        for (tname, tac) in [("taut", taut_tac()), ("blast", blast_tac(8))] {
            let th = prove_with(classical(), &phi, &tac).map_err(|e| format!("{tname} on {name}: {e}"))?;
            ensure!(th.is_some_and(|t| *t.concl() == phi), "{tname} did not prove {name} classically");
        }
        let t0 = Instant::now();
        let st = init_proof(base(), &phi).map_err(|e| e.to_string())?;
        ensure!(blast_tac(10).apply(&st, 0).next().is_none(), "blast proved {name} intuitionistically");
        let taut = taut_tac().apply(&st, 0).next();
        ensure!(
            matches!(taut, Some(Err(ProofError::ClassicalRule { .. }))),
            "taut in the intuitionistic theory gave {taut:?}"
        );
        ensure!(t0.elapsed() < Duration::from_secs(10), "intuitionistic search on {name} took {:?}", t0.elapsed());
    }
    let p_term = p.to_term();
    match Theorem::excluded_middle(base(), &p_term) {
        Err(KernelError::ClassicalRule { .. }) => {}
        other => return Err(format!("excluded_middle in Base gave {other:?}")),
    }
    // Oracle sanity on known cases, then blast against the oracle on all
    // small formulas: blast must never prove something intuitionistically invalid.
    ensure!(prop::intuitionistic_valid(&not(not(lem.clone()))), "oracle rejects ¬¬(p ∨ ¬p)");
    ensure!(prop::intuitionistic_valid(&imp(p.clone(), not(not(p.clone())))), "oracle rejects p → ¬¬p");
    ensure!(!prop::intuitionistic_valid(&imp(not(not(p.clone())), p.clone())), "oracle proves ¬¬p → p");
    let (mut checked, mut blast_proved, mut ipc_valid) = (0usize, 0usize, 0usize);
    for fs in prop::enumerate(6) {
        for f in &fs {
            let ipc = prop::intuitionistic_valid(f);
            ensure!(!ipc || prop::truth_table_valid(f), "oracle proves the non-tautology {f:?}");
            let phi = f.to_term();
            let proved = prove_with(base(), &phi, &blast_tac(4)).map_err(|e| format!("{f:?}: {e}"))?;
            if proved.is_some() {
                ensure!(ipc, "blast proved {f:?}, which is not intuitionistically valid");
                blast_proved += 1;
            }
            ipc_valid += ipc as usize;
            checked += 1;
        }
    }
    Ok(format!(
        "LEM and Peirce split as expected; {checked} small formulas: {ipc_valid} intuitionistic, blast proved {blast_proved}"
    ))
}

fn nat() -> Outcome {
    let mut store = Store::new(Vec::new());
    let thy = store.load("Nat").map_err(|e| e.to_string())?;
    let goal = parse_term(&thy, "add one one = two").map_err(|e| e.to_string())?;
    let expr = parse_tactic_expr("simp add: one_def two_def add_Zero add_Suc").map_err(|e| e.to_string())?;
    let simp = compile(&thy, &expr, None).map_err(|e| e.to_string())?;
    let th = prove_with(&thy, &goal, &simp).map_err(|e| e.to_string())?;
    ensure!(th.is_some_and(|t| *t.concl() == goal && t.hyps().is_empty()), "simp did not prove add one one = two");
    let file = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/theories/Nat.lthy");
    let t0 = Instant::now();
    let out = bin().arg("check").arg(&file).output().map_err(|e| e.to_string())?;
    let took = t0.elapsed();
    ensure!(out.status.success(), "check exited with {:?}: {}", out.status, String::from_utf8_lossy(&out.stderr));
    ensure!(took < Duration::from_secs(1), "check took {took:?}");
    Ok(format!("simp proof replayed; `lcfkit check Nat.lthy` exit 0 in {} ms", took.as_millis()))
}

fn placeholder_golden() -> Outcome {
    let script = std::fs::read_to_string(here().join("golden/witness.repl")).map_err(|e| e.to_string())?;
    let expected = std::fs::read_to_string(here().join("golden/witness.transcript")).map_err(|e| e.to_string())?;
    let mut c = bin();
    c.arg("repl").arg("--path").arg(here().join("fixtures"));
    let out = run_with_stdin(c, &script)?;
    let got = String::from_utf8_lossy(&out.stdout);
    ensure!(got == expected, "transcript differs:\n{got}");
    ensure!(expected.contains("  1. psi (f one)\n"), "golden lacks the instantiated goal");
    Ok("REPL transcript matches, placeholder instantiated to f one".into())
}

fn cex_blast_complementarity() -> Outcome {
    const FORMULAS: usize = 500;
    const BUDGET: Duration = Duration::from_millis(100);
    let thy = classical();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let (mut models, mut proofs, mut neither) = (0usize, 0usize, 0usize);
    for n in 0..FORMULAS {
        let f = fol::gen(&mut rng, 4);
        let phi = fol::to_term(&f);
        let model = find_counterexample(&phi, 3).map_err(|e| format!("formula {n}: {e}"))?;
        if let Some(m) = &model {
            ensure!(m.size <= 3, "formula {n}: model of size {}", m.size);
            ensure!(!fol::eval(m, &f), "formula {n}: {m} does not falsify {f:?}");
        }
        let proof = with_budget(BUDGET, |cancel| prove_with(thy, &phi, &blast_tac_with(8, Some(cancel))));
        let proved = match proof {
            Ok(Some(th)) => {
                ensure!(*th.concl() == phi, "formula {n}: blast proved the wrong statement");
                true
            }
            Ok(None) | Err(ProofError::Cancelled) => false,
            Err(e) => return Err(format!("formula {n}: blast error {e}")),
        };
        ensure!(!(proved && model.is_some()), "formula {n}: blast proof and countermodel for {f:?}");
        match (proved, model.is_some()) {
            (true, _) => proofs += 1,
            (_, true) => models += 1,
            _ => neither += 1,
        }
    }
    Ok(format!("{FORMULAS} formulas: {proofs} proved, {models} refuted, {neither} undecided"))
}

fn parser_round_trip() -> Outcome {
    const TERMS: u64 = 10_000;
    let thy = terms::thy();
    for seed in 0..TERMS {
        let t = terms::random_term(seed);
        for mode in [Mode::Unicode, Mode::Ascii] {
            let text = print_term(&thy, &t, mode);
            let back = parse_term(&thy, &text).map_err(|e| format!("{mode:?}: {text} does not parse: {e}"))?;
            ensure!(back == t, "{mode:?}: {text} reads back as a different term");
        }
    }
    Ok(format!("{TERMS} terms in both notations"))
}

fn unification_oracle() -> Outcome {
    const PAIRS: usize = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut unified = 0usize;
    for n in 0..PAIRS {
        let x = unif::gen(&mut rng, 3);
        let y = if rng.gen_bool(0.3) {
            // an instance of x, so that more pairs unify
            instance(&x, &mut rng)
        } else {
            unif::gen(&mut rng, 3)
        };
        let expect = unif::robinson(&x, &y);
        let got = unify(&unif::to_term(&x), &unif::to_term(&y), &SubstEnv::new())
            .map_err(|e| format!("pair {n}: {e}"))?;
        match (expect, got) {
            (None, None) => {}
            (Some(mgu), Some(env)) => {
                let mine = unif::images(&env);
                ensure!(
                    unif::same_up_to_renaming(&mgu, &mine),
                    "pair {n}: {x:?} =? {y:?}: expected {mgu:?}, got {mine:?}"
                );
                let (sx, sy) = (env.apply(&unif::to_term(&x)), env.apply(&unif::to_term(&y)));
                ensure!(sx == sy, "pair {n}: unifier does not unify");
                unified += 1;
            }
            (e, g) => return Err(format!("pair {n}: {x:?} =? {y:?}: oracle {}, library {}", e.is_some(), g.is_some())),
        }
    }
    Ok(format!("{PAIRS} pairs, {unified} unifiable, all mgus agree up to renaming"))
}

fn instance<R: Rng>(u: &unif::U, rng: &mut R) -> unif::U {
    use unif::U;
    match u {
        U::V(_) if rng.gen_bool(0.5) => unif::gen(rng, 2),
        U::F(a) => U::F(Box::new(instance(a, rng))),
        U::G(a, b) => U::G(Box::new(instance(a, rng)), Box::new(instance(b, rng))),
        other => other.clone(),
    }
}

/// Replaces the value of every `"id":` field with `_`.
fn mask_ids(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(k) = rest.find("\"id\":") {
        out.push_str(&rest[..k + 5]);
        out.push('_');
        rest = rest[k + 5..].trim_start_matches(|c: char| c.is_ascii_digit() || c == '-' || c == '"' || c.is_alphanumeric());
    }
    out.push_str(rest);
    out
}

fn protocol_golden() -> Outcome {
    let requests =
        std::fs::read_to_string(here().join("golden/conj_swap.requests.jsonl")).map_err(|e| e.to_string())?;
    let expected =
        std::fs::read_to_string(here().join("golden/conj_swap.responses.jsonl")).map_err(|e| e.to_string())?;
    // Renumber the requests; the responses must still match once ids are masked.
    let renumbered: String = requests
        .lines()
        .enumerate()
        .map(|(k, l)| {
            let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
            v["id"] = serde_json::json!(1000 + k);
            format!("{v}\n")
        })
        .collect();
    let mut c = bin();
    c.arg("serve");
    let out = run_with_stdin(c, &renumbered)?;
    ensure!(out.status.success(), "serve exited with {:?}", out.status);
    let got = String::from_utf8_lossy(&out.stdout);
    ensure!(mask_ids(&got) == mask_ids(&expected), "responses differ:\n{got}");
    let apply = requests.lines().filter(|l| l.contains("\"apply\"")).count();
    ensure!(apply == 3, "golden has {apply} apply requests");
    Ok(format!("goal, {apply} applies and qed match byte for byte"))
}

fn main() {
    let checks: [(&str, fn() -> Outcome); 9] = [
        ("soundness fuzz", soundness_fuzz),
        ("taut vs truth table", taut_vs_truth_table),
        ("intuitionistic/classical split", intuitionistic_split),
        ("Nat", nat),
        ("placeholder golden", placeholder_golden),
        ("cex/blast complementarity", cex_blast_complementarity),
        ("parser round trip", parser_round_trip),
        ("unification oracle", unification_oracle),
        ("protocol golden", protocol_golden),
    ];
    let limits: [Option<u64>; 9] = [Some(120), Some(60), None, None, None, None, Some(30), None, None];
    let mut failed = 0;
    for ((name, check), limit) in checks.iter().zip(limits) {
        let t0 = Instant::now();
        let mut result = check();
        let took = t0.elapsed();
        if let (Ok(msg), Some(secs)) = (&result, limit) {
            if took > Duration::from_secs(secs) {
                result = Err(format!("{msg}, but took longer than {secs} s"));
            }
        }
        match result {
            Ok(msg) => println!("[PASS] {name}: {msg} ({:.2} s)", took.as_secs_f64()),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] {name}: {msg} ({:.2} s)", took.as_secs_f64());
            }
        }
    }
    println!("{} of {} acceptance checks passed", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
