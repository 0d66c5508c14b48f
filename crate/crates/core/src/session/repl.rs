//! Line-oriented text interface to a [`Session`].

use std::io::{self, BufRead, Write};

use super::{Session, SessionError};
use crate::proof::ProofState;

pub const HELP: &str = "\
commands:
  load <theory>        make a theory current (name or path to a .lthy file)
  goal \"<formula>\"     start a proof
  apply <tactic>       refine the first subgoal
  goals                show the subgoals
  undo                 return to the previous state
  qed [name]           finish the proof, storing it under name
  thm <name>           show a stored theorem
  cex <max_size>       search for a finite countermodel of the first subgoal
  help                 show this text
  quit                 leave";

/// Result of one command line.
pub struct Outcome {
    pub text: String,
    pub quit: bool,
}

pub struct Repl {
    session: Session,
}

fn unquote(s: &str) -> &str {
    let s = s.trim();
    s.strip_prefix('"').and_then(|r| r.strip_suffix('"')).unwrap_or(s)
}

impl Repl {
    pub fn new(session: Session) -> Repl {
        Repl { session }
    }

    pub fn session(&self) -> &Session {
        &self.session
    }

    pub fn session_mut(&mut self) -> &mut Session {
        &mut self.session
    }

    /// Runs one command. Errors become a one-line `error:` message and
    /// leave the session unchanged.
    pub fn execute(&mut self, line: &str) -> Outcome {
        let line = line.trim();
        let (cmd, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        let quit = matches!(cmd, "quit" | "exit");
        let text = match self.dispatch(cmd, rest) {
            Ok(t) => t,
            Err(e) => format!("error: {e}"),
        };
        let warnings = self.session.take_warnings();
        let text = if warnings.is_empty() {
            text
        } else {
            let w: Vec<String> = warnings.into_iter().map(|w| format!("warning: {w}")).collect();
            format!("{}\n{text}", w.join("\n"))
        };
        Outcome { text, quit }
    }

    fn dispatch(&mut self, cmd: &str, rest: &str) -> Result<String, SessionError> {
        let s = &mut self.session;
        match cmd {
            "" => Ok(String::new()),
            "load" => Ok(s.load(rest)?.to_string()),
            "goal" => {
                s.goal(unquote(rest))?;
                self.goals()
            }
            "apply" => {
                s.apply(rest, 0, 0)?;
                self.goals()
            }
            "goals" => self.goals(),
            "undo" => {
                s.undo()?;
                self.goals()
            }
            "qed" => {
                let name = (!rest.is_empty()).then_some(rest);
                let th = s.qed(name)?;
                let shown = s.render_theorem(&th);
                Ok(match name {
                    Some(n) => format!("{n}: {shown}"),
                    None => shown,
                })
            }
            "thm" => {
                let found = s.thm(rest)?;
                let mut out = format!("{rest}: {}", s.render_theorem(&found.thm));
                if let Some(w) = found.warning {
                    out = format!("warning: {w}\n{out}");
                }
                Ok(out)
            }
            "cex" => {
                let size: usize = rest
                    .parse()
                    .map_err(|_| SessionError::BadRequest(format!("expected a domain size, got `{rest}`")))?;
                Ok(match s.cex(0, size)? {
                    Some(m) => format!("counterexample: {m}"),
                    None => format!("no counterexample up to size {size}"),
                })
            }
            "help" => Ok(HELP.to_string()),
            "quit" | "exit" => Ok(String::new()),
            other => Err(SessionError::UnknownCommand(other.to_string())),
        }
    }

    fn goals(&self) -> Result<String, SessionError> {
        Ok(render_goals(&self.session, self.session.state()?))
    }

    /// Reads commands until end of input or `quit`, writing each response.
    pub fn run<R: BufRead, W: Write>(&mut self, input: R, mut output: W, prompt: Option<&str>) -> io::Result<()> {
        let mut lines = input.lines();
        loop {
            if let Some(p) = prompt {
                write!(output, "{p}")?;
                output.flush()?;
            }
            let Some(line) = lines.next().transpose()? else { break };
            let out = self.execute(&line);
            if !out.text.is_empty() {
                writeln!(output, "{}", out.text)?;
            }
            if out.quit {
                break;
            }
        }
        Ok(())
    }
}

/// Numbered subgoals followed by the placeholder assignments made so far.
pub fn render_goals(session: &Session, st: &ProofState) -> String {
    let goals = st.goals();
    let mut out = match goals.len() {
        0 => "No subgoals.".to_string(),
        1 => "1 subgoal:".to_string(),
        n => format!("{n} subgoals:"),
    };
    for (k, g) in goals.iter().enumerate() {
        out.push_str(&format!("\n  {}. {}", k + 1, session.render_goal(g)));
    }
    for (name, value) in st.placeholders(session.mode()) {
        out.push_str(&format!("\n  {name} := {value}"));
    }
    out
}
