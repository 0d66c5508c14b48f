use serde_json::Value;

use super::protocol::{respond_line, serve};
use super::repl::Repl;
use super::*;

fn repl() -> Repl {
    Repl::new(Session::new(Store::new(vec![])))
}

fn run(r: &mut Repl, line: &str) -> String {
    r.execute(line).text
}

fn rpc(s: &mut Session, line: &str) -> Value {
    serde_json::from_str(&respond_line(s, line).expect("a response")).unwrap()
}

#[test]
fn repl_conj_commutes_in_two_subgoals() {
    let mut r = repl();
    run(&mut r, r#"goal "p & q --> q & p""#);
    run(&mut r, "apply (rule impI)");
    let out = run(&mut r, "apply (rule conjI)");
    assert_eq!(out, "2 subgoals:\n  1. p ∧ q ⊢ q\n  2. p ∧ q ⊢ p");
}

#[test]
fn failed_tactic_leaves_state_unchanged() {
    let mut r = repl();
    run(&mut r, r#"goal "p --> q""#);
    let before = run(&mut r, "goals");
    assert_eq!(run(&mut r, "apply assumption"), "error: tactic failed");
    assert_eq!(run(&mut r, "goals"), before);
    assert!(run(&mut r, "apply (rule nope)").starts_with("error: unknown theorem nope"));
    assert!(run(&mut r, "apply (rule").starts_with("error: parse error at 1:"));
    assert_eq!(run(&mut r, "goals"), before);
}

#[test]
fn qed_reports_remaining_goals_then_stores() {
    let mut r = repl();
    run(&mut r, r#"goal "p ∧ q → q ∧ p""#);
    run(&mut r, "apply (rule impI)");
    run(&mut r, "apply (rule conjI)");
    assert_eq!(run(&mut r, "qed"), "error: proof incomplete: 2 goals remain");
    run(&mut r, "apply (erule conjE, assumption)");
    run(&mut r, "apply (erule conjE, assumption)");
    assert_eq!(run(&mut r, "qed swap"), "swap: ⊢ p ∧ q → q ∧ p");
    assert_eq!(run(&mut r, "thm swap"), "swap: ⊢ ?p ∧ ?q → ?q ∧ ?p");
}

#[test]
fn undo_walks_back_to_the_goal() {
    let mut r = repl();
    let first = run(&mut r, r#"goal "p --> p""#);
    run(&mut r, "apply (rule impI)");
    assert_eq!(run(&mut r, "undo"), first);
    assert_eq!(run(&mut r, "undo"), "error: no earlier state to return to");
}

#[test]
fn commands_without_a_proof_say_so() {
    let mut r = repl();
    assert_eq!(run(&mut r, "goals"), "error: no proof in progress");
    assert_eq!(run(&mut r, "frobnicate"), "error: unknown command frobnicate");
    assert!(r.execute("quit").quit);
}

#[test]
fn load_reports_and_switches_theory() {
    let mut r = repl();
    assert_eq!(run(&mut r, "load Nat"), "Nat: 2 axioms (add_Zero, add_Suc), 2 definitions, 1 theorem");
    run(&mut r, r#"goal "add one one = two""#);
    assert_eq!(run(&mut r, "apply (simp add: one_def two_def add_Zero add_Suc)"), "No subgoals.");
    assert!(run(&mut r, "qed again").starts_with("again: ⊢"));
}

#[test]
fn placeholder_becomes_visible_in_the_other_subgoal() {
    let mut s = Session::new(Store::new(vec![]));
    s.load_text(
        "theory Ph\nconst one :: ind\nconst f :: \"ind ⇒ ind\"\nconst phi :: \"ind ⇒ bool\"\n\
         const psi :: \"ind ⇒ bool\"\naxiom phi_f: \"phi (f one)\"\naxiom psi_f: \"psi (f one)\"\n",
        "Ph.lthy",
    )
    .unwrap();
    s.goal("∃x. phi x ∧ psi x").unwrap();
    s.apply("rule exI", 0, 0).unwrap();
    s.apply("rule conjI", 0, 0).unwrap();
    let st = s.apply("rule phi_f", 0, 0).unwrap();
    assert_eq!(st.goals().len(), 1);
    assert_eq!(s.render_goal(&s.state().unwrap().goals()[0]), "psi (f one)");
    s.apply("rule psi_f", 0, 0).unwrap();
    let th = s.qed(Some("ex_phi_psi")).unwrap();
    assert_eq!(s.render_theorem(&th), "⊢ ∃x. phi x ∧ psi x");
}

#[test]
fn cex_reports_models_and_their_absence() {
    let mut r = repl();
    run(&mut r, r#"goal "p --> q""#);
    assert_eq!(run(&mut r, "cex 2"), "counterexample: domain {0}; p = true; q = false");
    run(&mut r, r#"goal "p --> p""#);
    assert_eq!(run(&mut r, "cex 3"), "no counterexample up to size 3");
    assert!(run(&mut r, "cex lots").starts_with("error: expected a domain size"));
}

#[test]
fn protocol_examples() {
    let mut s = Session::new(Store::new(vec![]));
    let r = rpc(&mut s, r#"{"id":1,"cmd":"goal","args":{"formula":"p --> p"}}"#);
    assert_eq!(r["ok"], true);
    assert_eq!(r["result"]["goals"].as_array().unwrap().len(), 1);
    let r = rpc(&mut s, r#"{"id":2,"cmd":"apply","args":{"tactic":"rule impI","goal":1}}"#);
    assert_eq!(r["result"]["goals"][0]["assumptions"][0], "p");
    assert_eq!(r["result"]["goals"][0]["target"], "p");
    rpc(&mut s, r#"{"id":3,"cmd":"apply","args":{"tactic":"assumption"}}"#);
    let r = rpc(&mut s, r#"{"id":4,"cmd":"qed","args":{"name":"triv"}}"#);
    assert_eq!(r["result"]["theorem"], "⊢ p → p");
    let r = rpc(&mut s, r#"{"id":5,"cmd":"theorems","args":{"prefix":"tri"}}"#);
    assert_eq!(r["result"]["theorems"], serde_json::json!(["triv"]));
}

#[test]
fn protocol_errors_are_total() {
    let mut s = Session::new(Store::new(vec![]));
    let r = rpc(&mut s, "{not json");
    assert_eq!(r["id"], Value::Null);
    assert_eq!(r["error"]["kind"], "malformed");
    let r = rpc(&mut s, r#"[1,2]"#);
    assert_eq!(r["id"], Value::Null);
    let r = rpc(&mut s, r#"{"id":7,"cmd":"dance"}"#);
    assert_eq!((r["id"].as_i64(), r["error"]["kind"].as_str()), (Some(7), Some("unknown_command")));
    let r = rpc(&mut s, r#"{"id":8,"cmd":"goal","args":{}}"#);
    assert_eq!(r["error"]["kind"], "bad_request");
    let r = rpc(&mut s, r#"{"id":9,"cmd":"apply","args":{"tactic":"taut"}}"#);
    assert_eq!(r["error"]["kind"], "no_proof");
    let r = rpc(&mut s, r#"{"id":10,"cmd":"goal","args":{"formula":"p ∧"}}"#);
    assert_eq!(r["error"]["kind"], "parse");
    assert!(respond_line(&mut s, "   ").is_none());
}

#[test]
fn revert_restores_rendered_state_and_branches() {
    let mut s = Session::new(Store::new(vec![]));
    let root = rpc(&mut s, r#"{"id":1,"cmd":"goal","args":{"formula":"p ∧ q → q ∧ p"}}"#)["result"].clone();
    let step1 = rpc(&mut s, r#"{"id":2,"cmd":"apply","args":{"tactic":"rule impI"}}"#)["result"].clone();
    rpc(&mut s, r#"{"id":3,"cmd":"apply","args":{"tactic":"rule conjI"}}"#);
    let r = rpc(&mut s, r#"{"id":4,"cmd":"revert","args":{"state":1}}"#);
    assert_eq!(r["result"], step1);
    rpc(&mut s, r#"{"id":5,"cmd":"apply","args":{"tactic":"erule conjE"}}"#);
    let h = rpc(&mut s, r#"{"id":6,"cmd":"history"}"#)["result"].clone();
    let parents: Vec<Value> = h["states"].as_array().unwrap().iter().map(|n| n["parent"].clone()).collect();
    assert_eq!(parents, vec![Value::Null, 0.into(), 1.into(), 1.into()]);
    let r = rpc(&mut s, r#"{"id":7,"cmd":"revert","args":{"state":0}}"#);
    assert_eq!(r["result"], root);
    let r = rpc(&mut s, r#"{"id":8,"cmd":"revert","args":{"state":99}}"#);
    assert_eq!(r["error"]["kind"], "not_found");
}

#[test]
fn rules_lists_applicable_intro_rules() {
    let mut s = Session::new(Store::new(vec![]));
    s.goal("p ∧ q").unwrap();
    let rules = s.rules(0).unwrap();
    assert!(rules.contains(&"conjI".to_string()), "{rules:?}");
    assert!(!rules.contains(&"impI".to_string()));
}

#[test]
fn alternatives_select_later_successors() {
    let mut s = Session::new(Store::new(vec![]));
    s.goal("p ⟶ p ⟶ p").unwrap();
    s.apply("rule impI", 0, 0).unwrap();
    s.apply("rule impI", 0, 0).unwrap();
    s.apply("assumption", 0, 1).unwrap();
    assert!(s.state().unwrap().is_complete());
    s.undo().unwrap();
    assert!(matches!(s.apply("assumption", 0, 2), Err(SessionError::NoAlternative(3))));
}

#[test]
fn serve_answers_every_line_in_order() {
    let mut s = Session::new(Store::new(vec![]));
    let input = "{\"id\":1,\"cmd\":\"goal\",\"args\":{\"formula\":\"p --> p\"}}\n\
                 garbage\n\
                 \n\
                 {\"id\":2,\"cmd\":\"cancel\",\"args\":{\"id\":42}}\n\
                 {\"id\":3,\"cmd\":\"quit\"}\n\
                 {\"id\":4,\"cmd\":\"state\"}\n";
    let mut out = Vec::new();
    serve(input.as_bytes(), &mut out, &mut s).unwrap();
    let lines: Vec<Value> = String::from_utf8(out).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let ids: Vec<Value> = lines.iter().map(|v| v["id"].clone()).collect();
    assert!(ids.contains(&1.into()) && ids.contains(&Value::Null) && ids.contains(&2.into()) && ids.contains(&3.into()));
    assert_eq!(lines.len(), 4);
}

#[test]
fn cancel_interrupts_a_long_search() {
    use std::io::{BufReader, Read};
    use std::sync::mpsc;

    struct ChannelReader(mpsc::Receiver<Vec<u8>>, Vec<u8>);
    impl Read for ChannelReader {
        fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
            if self.1.is_empty() {
                match self.0.recv() {
                    Ok(v) => self.1 = v,
                    Err(_) => return Ok(0),
                }
            }
            let n = buf.len().min(self.1.len());
            buf[..n].copy_from_slice(&self.1[..n]);
            self.1.drain(..n);
            Ok(n)
        }
    }

    let (tx, rx) = mpsc::channel();
    let (otx, orx) = mpsc::channel::<String>();
    struct LineWriter(mpsc::Sender<String>, Vec<u8>);
    impl std::io::Write for LineWriter {
        fn write(&mut self, b: &[u8]) -> std::io::Result<usize> {
            self.1.extend_from_slice(b);
            while let Some(k) = self.1.iter().position(|&c| c == b'\n') {
                let line: Vec<u8> = self.1.drain(..=k).collect();
                let _ = self.0.send(String::from_utf8_lossy(&line).trim().to_string());
            }
            Ok(b.len())
        }
        fn flush(&mut self) -> std::io::Result<()> {
            Ok(())
        }
    }
    let server = std::thread::spawn(move || {
        let mut s = Session::new(Store::new(vec![]));
        serve(BufReader::new(ChannelReader(rx, vec![])), LineWriter(otx, vec![]), &mut s)
    });
    let send = |l: &str| tx.send(format!("{l}\n").into_bytes()).unwrap();
    send(r#"{"id":1,"cmd":"goal","args":{"formula":"(∀x. P x ∨ Q) ⟶ (∀x. P x) ∨ Q"}}"#);
    assert!(orx.recv().unwrap().contains("\"ok\":true"));
    send(r#"{"id":2,"cmd":"apply","args":{"tactic":"blast 8"}}"#);
    std::thread::sleep(std::time::Duration::from_millis(200));
    send(r#"{"id":3,"cmd":"cancel","args":{"id":2}}"#);
    let mut got = vec![orx.recv().unwrap(), orx.recv().unwrap()];
    got.sort();
    assert!(got[0].contains("\"cancelled\"") && got[0].contains("\"id\":2"), "{got:?}");
    assert!(got[1].contains("\"cancelled\":true"), "{got:?}");
    drop(tx);
    server.join().unwrap().unwrap();
}
