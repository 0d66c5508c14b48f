//! Line-delimited JSON protocol.
//!
//! Each request is one object `{"id": int, "cmd": string, "args": object}`
//! and gets exactly one response line, either
//! `{"id": …, "ok": true, "result": …}` or
//! `{"id": …, "ok": false, "error": {"kind": …, "msg": …}}`.
//! Keys are emitted in sorted order. Goal indices and alternatives are
//! 1-based.

use std::collections::HashMap;
use std::io::{self, BufRead, Write};
use std::sync::{mpsc, Mutex};
use std::thread;

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::{repl::HELP, Session, SessionError};
use crate::auto::{Cancel, FiniteModel};
use crate::proof::ProofState;

#[derive(Serialize)]
struct GoalView {
    index: usize,
    params: Vec<String>,
    assumptions: Vec<String>,
    target: String,
}

/// A request that parsed far enough to have a command.
pub struct Request {
    pub id: Value,
    pub cmd: String,
    pub args: Map<String, Value>,
}

fn error_response(id: Value, kind: &str, msg: &str) -> Value {
    json!({"id": id, "ok": false, "error": {"kind": kind, "msg": msg}})
}

fn ok_response(id: Value, result: Value) -> Value {
    json!({"id": id, "ok": true, "result": result})
}

/// Parses one line. On failure returns the error response to send.
pub fn parse_request(line: &str) -> Result<Request, Value> {
    let v: Value = serde_json::from_str(line).map_err(|e| error_response(Value::Null, "malformed", &e.to_string()))?;
    let Value::Object(mut obj) = v else {
        return Err(error_response(Value::Null, "malformed", "request must be a JSON object"));
    };
    let id = match obj.remove("id") {
        Some(Value::Number(n)) if n.is_i64() || n.is_u64() => Value::Number(n),
        _ => return Err(error_response(Value::Null, "bad_request", "request needs an integer id")),
    };
    let cmd = match obj.remove("cmd") {
        Some(Value::String(s)) => s,
        _ => return Err(error_response(id, "bad_request", "request needs a string cmd")),
    };
    let args = match obj.remove("args") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m,
        Some(_) => return Err(error_response(id, "bad_request", "args must be an object")),
    };
    Ok(Request { id, cmd, args })
}

fn bad(msg: impl Into<String>) -> SessionError {
    SessionError::BadRequest(msg.into())
}

fn str_arg<'a>(args: &'a Map<String, Value>, key: &str) -> Result<&'a str, SessionError> {
    match args.get(key) {
        Some(Value::String(s)) => Ok(s),
        Some(_) => Err(bad(format!("argument {key} must be a string"))),
        None => Err(bad(format!("missing argument {key}"))),
    }
}

fn opt_str_arg<'a>(args: &'a Map<String, Value>, key: &str) -> Result<Option<&'a str>, SessionError> {
    match args.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => str_arg(args, key).map(Some),
    }
}

fn uint_arg(args: &Map<String, Value>, key: &str, default: Option<usize>) -> Result<usize, SessionError> {
    match args.get(key) {
        None | Some(Value::Null) => default.ok_or_else(|| bad(format!("missing argument {key}"))),
        Some(v) => v
            .as_u64()
            .map(|n| n as usize)
            .ok_or_else(|| bad(format!("argument {key} must be a non-negative integer"))),
    }
}

/// A 1-based index argument, returned 0-based.
fn index_arg(args: &Map<String, Value>, key: &str) -> Result<usize, SessionError> {
    match uint_arg(args, key, Some(1))? {
        0 => Err(bad(format!("argument {key} counts from 1"))),
        n => Ok(n - 1),
    }
}

/// The `state` result: goals, placeholder assignments and the state id.
pub fn state_view(session: &Session, st: &ProofState) -> Value {
    let goals: Vec<GoalView> = st
        .goals()
        .iter()
        .enumerate()
        .map(|(k, g)| GoalView {
            index: k + 1,
            params: g.params.iter().map(|(n, _)| n.to_string()).collect(),
            assumptions: g.context.iter().map(|a| session.render_term(a)).collect(),
            target: session.render_term(&g.target),
        })
        .collect();
    let placeholders: Map<String, Value> =
        st.placeholders(session.mode()).into_iter().map(|(n, v)| (n, Value::String(v))).collect();
    json!({"goals": goals, "placeholders": placeholders, "state": session.state_id()})
}

fn model_view(m: &FiniteModel) -> Value {
    let tables: Vec<Value> =
        m.tables.iter().map(|t| json!({"name": t.name, "type": t.ty.to_string(), "values": t.values})).collect();
    let witnesses: Vec<Value> = m.witnesses.iter().map(|(n, _, v)| json!({"name": n, "value": v})).collect();
    json!({"found": true, "size": m.size, "model": m.to_string(), "tables": tables, "witnesses": witnesses})
}

fn current_state(session: &Session) -> Result<Value, SessionError> {
    Ok(state_view(session, session.state()?))
}

/// Runs a command other than `cancel`.
pub fn run_command(session: &mut Session, cmd: &str, args: &Map<String, Value>) -> Result<Value, SessionError> {
    match cmd {
        "load" => {
            let r = session.load(str_arg(args, "name")?)?;
            Ok(json!({
                "theory": r.theory,
                "axioms": r.axioms,
                "definitions": r.definitions.len(),
                "theorems": r.theorems.len(),
            }))
        }
        "goal" => {
            session.goal(str_arg(args, "formula")?)?;
            current_state(session)
        }
        "apply" => {
            let tactic = str_arg(args, "tactic")?;
            let goal = index_arg(args, "goal")?;
            let alt = index_arg(args, "alt")?;
            session.apply(tactic, goal, alt)?;
            current_state(session)
        }
        "goals" | "state" => current_state(session),
        "undo" => {
            session.undo()?;
            current_state(session)
        }
        "revert" => {
            session.revert(uint_arg(args, "state", None)?)?;
            current_state(session)
        }
        "history" => {
            let nodes: Vec<Value> = session
                .history()?
                .iter()
                .map(|n| json!({"id": n.id, "parent": n.parent, "label": n.label}))
                .collect();
            Ok(json!({"states": nodes, "current": session.state_id()}))
        }
        "qed" => {
            let name = opt_str_arg(args, "name")?;
            let th = session.qed(name)?;
            Ok(json!({"name": name, "theorem": session.render_theorem(&th)}))
        }
        "thm" => {
            let name = str_arg(args, "name")?;
            let found = session.thm(name)?;
            Ok(json!({
                "name": name,
                "theorem": session.render_theorem(&found.thm),
                "owner": found.owner,
                "warning": found.warning,
            }))
        }
        "cex" => {
            let size = uint_arg(args, "size", None)?;
            match session.cex(index_arg(args, "goal")?, size)? {
                Some(m) => Ok(model_view(&m)),
                None => Ok(json!({"found": false, "size": size})),
            }
        }
        "rules" => {
            let goal = index_arg(args, "goal")?;
            Ok(json!({"goal": goal + 1, "rules": session.rules(goal)?}))
        }
        "theorems" => {
            let prefix = opt_str_arg(args, "prefix")?.unwrap_or("");
            Ok(json!({"theorems": session.theorems(prefix)}))
        }
        "help" => {
            let mut cmds: Vec<&str> = HELP.lines().skip(1).filter_map(|l| l.split_whitespace().next()).collect();
            cmds.extend(["state", "history", "revert", "rules", "theorems", "cancel"]);
            Ok(json!({"commands": cmds}))
        }
        "quit" => Ok(json!({})),
        other => Err(SessionError::UnknownCommand(other.to_string())),
    }
}

fn respond_to(session: &mut Session, req: &Request) -> Value {
    let result = run_command(session, &req.cmd, &req.args);
    let warnings = session.take_warnings();
    match result {
        Ok(mut v) => {
            if !warnings.is_empty() {
                if let Value::Object(m) = &mut v {
                    m.insert("warnings".into(), json!(warnings));
                }
            }
            ok_response(req.id.clone(), v)
        }
        Err(e) => error_response(req.id.clone(), e.kind(), &e.to_string()),
    }
}

/// Handles one request line without concurrency, as used by tests and
/// one-shot clients. Blank lines get no response. `cancel` is accepted
/// but has nothing to interrupt.
pub fn respond_line(session: &mut Session, line: &str) -> Option<String> {
    if line.trim().is_empty() {
        return None;
    }
    let resp = match parse_request(line) {
        Err(resp) => resp,
        Ok(req) if req.cmd == "cancel" => ok_response(req.id, json!({"cancelled": false})),
        Ok(req) => respond_to(session, &req),
    };
    Some(resp.to_string())
}

enum Job {
    Run(Request, Cancel),
    Reply(Value),
}

fn id_key(id: &Value) -> String {
    id.to_string()
}

/// Serves requests from `input` until end of input or `quit`. Commands run
/// one at a time on a worker thread, so a `cancel` request can interrupt a
/// long search started by an earlier request.
pub fn serve<R: BufRead, W: Write + Send>(input: R, output: W, session: &mut Session) -> io::Result<()> {
    let out = Mutex::new(output);
    let pending: Mutex<HashMap<String, Cancel>> = Mutex::new(HashMap::new());
    let send = |v: &Value| -> io::Result<()> {
        let mut w = out.lock().unwrap_or_else(|e| e.into_inner());
        writeln!(w, "{v}")?;
        w.flush()
    };
    let (tx, rx) = mpsc::channel::<Job>();
    thread::scope(|scope| {
        let worker = scope.spawn(|| -> io::Result<()> {
            for job in rx {
                let (resp, quit) = match job {
                    Job::Reply(v) => (v, false),
                    Job::Run(req, cancel) => {
                        let resp = if cancel.is_cancelled() {
                            error_response(req.id.clone(), "cancelled", "cancelled before it started")
                        } else {
                            session.set_cancel(Some(cancel));
                            let r = respond_to(session, &req);
                            session.set_cancel(None);
                            r
                        };
                        pending.lock().unwrap_or_else(|e| e.into_inner()).remove(&id_key(&req.id));
                        (resp, req.cmd == "quit")
                    }
                };
                send(&resp)?;
                if quit {
                    break;
                }
            }
            Ok(())
        });
        for line in input.lines() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let job = match parse_request(&line) {
                Err(resp) => Job::Reply(resp),
                Ok(req) if req.cmd == "cancel" => {
                    let resp = match uint_arg(&req.args, "id", None) {
                        Ok(target) => {
                            let token = pending.lock().unwrap_or_else(|e| e.into_inner()).get(&target.to_string()).cloned();
                            if let Some(t) = &token {
                                t.cancel();
                            }
                            ok_response(req.id, json!({"cancelled": token.is_some()}))
                        }
                        Err(e) => error_response(req.id, e.kind(), &e.to_string()),
                    };
                    send(&resp)?;
                    continue;
                }
                Ok(req) => {
                    let cancel = Cancel::new();
                    pending.lock().unwrap_or_else(|e| e.into_inner()).insert(id_key(&req.id), cancel.clone());
                    Job::Run(req, cancel)
                }
            };
            if tx.send(job).is_err() {
                break;
            }
        }
        drop(tx);
        worker.join().unwrap_or_else(|_| Err(io::Error::other("session worker panicked")))
    })
}
