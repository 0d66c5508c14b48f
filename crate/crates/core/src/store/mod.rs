//! Loading `.lthy` theory files: import resolution, memoisation, checking
//! of every declaration and proof script.

use std::fmt;
use std::path::{Path, PathBuf};

use indexmap::IndexMap;
use thiserror::Error;

use crate::auto::Cancel;
use crate::kernel::{FactKind, KernelError, Theorem};
use crate::library::{builtin, varify};
use crate::proof::{init_proof, qed, ProofError};
use crate::script::compile;
use crate::syntax::{parse_term_at, parse_theory, resolve_type, Decl, DeclKind, Mode, ParseError, Pos, TheoryFile};
use crate::term::{Term, Var};
use crate::Theory;

/// Theories shipped with the library, found when no file on the search
/// path has the name.
const BUNDLED: &[(&str, &str)] = &[("Nat", include_str!("../../theories/Nat.lthy"))];

/// Environment variable with extra search directories, separated by `:`.
pub const PATH_VAR: &str = "LCFKIT_PATH";

#[derive(Error, Debug)]
pub enum StoreError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}:{err}")]
    Parse { file: String, err: ParseError },
    #[error("theory {0} not found")]
    NotFound(String),
    #[error("import cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("{file}:{pos}: theorem {theorem}: {msg}")]
    Proof {
        file: String,
        pos: Pos,
        theorem: String,
        /// The failing tactic, or `None` if the script ended with goals left.
        tactic: Option<String>,
        goals: Vec<String>,
        msg: String,
    },
    #[error("{file}:{pos}: {err}")]
    Kernel { file: String, pos: Pos, err: KernelError },
    #[error("unknown theorem {0}")]
    UnknownTheorem(String),
}

/// A theorem found by name, with the theory that stores it.
#[derive(Clone, Debug)]
pub struct Lookup {
    pub thm: Theorem,
    pub kind: FactKind,
    pub owner: String,
    /// Set when several imported theories store the name.
    pub warning: Option<String>,
}

/// Resolves `name` among the facts visible from `thy`. The nearest owner
/// wins; an ambiguity is reported through [`Lookup::warning`].
pub fn lookup_theorem(thy: &Theory, name: &str) -> Result<Lookup, StoreError> {
    let (fact, owner) = thy.lookup_fact(name).ok_or_else(|| StoreError::UnknownTheorem(name.to_string()))?;
    let owners = thy.fact_owners(name);
    let warning = (owners.len() > 1)
        .then(|| format!("{name} is stored by {}; using the one from {owner}", owners.join(" and ")));
    Ok(Lookup { thm: fact.thm.clone(), kind: fact.kind, owner: owner.to_string(), warning })
}

/// What a theory adds on top of its imports.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub theory: String,
    pub axioms: Vec<String>,
    pub definitions: Vec<String>,
    pub theorems: Vec<String>,
}

pub fn report(thy: &Theory) -> Report {
    let mut r = Report { theory: thy.name().to_string(), axioms: vec![], definitions: vec![], theorems: vec![] };
    for (name, fact) in thy.local_facts() {
        let bucket = match fact.kind {
            FactKind::Axiom => &mut r.axioms,
            FactKind::Definition => &mut r.definitions,
            FactKind::Theorem => &mut r.theorems,
        };
        bucket.push(name.to_string());
    }
    r
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("1 {word}")
    } else {
        format!("{n} {word}s")
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.theory, plural(self.axioms.len(), "axiom"))?;
        if !self.axioms.is_empty() {
            write!(f, " ({})", self.axioms.join(", "))?;
        }
        write!(
            f,
            ", {}, {}",
            plural(self.definitions.len(), "definition"),
            plural(self.theorems.len(), "theorem")
        )
    }
}

enum Source {
    File(PathBuf),
    Bundled(&'static str),
}

/// Loads theories by name or path and memoises them, so a theory imported
/// twice is checked once.
pub struct Store {
    paths: Vec<PathBuf>,
    loaded: IndexMap<String, Theory>,
    loading: Vec<String>,
    warnings: Vec<String>,
    cancel: Option<Cancel>,
}

impl Default for Store {
    fn default() -> Store {
        Store::new(Vec::new())
    }
}

impl Store {
    /// A store searching `paths` in order.
    pub fn new(paths: Vec<PathBuf>) -> Store {
        Store { paths, loaded: IndexMap::new(), loading: Vec::new(), warnings: Vec::new(), cancel: None }
    }

    /// `extra` first, then the directories in `LCFKIT_PATH`, then the
    /// working directory.
    pub fn from_env(extra: Vec<PathBuf>) -> Store {
        let mut paths = extra;
        if let Ok(v) = std::env::var(PATH_VAR) {
            paths.extend(v.split(':').filter(|s| !s.is_empty()).map(PathBuf::from));
        }
        paths.push(PathBuf::from("."));
        Store::new(paths)
    }

    /// Lets a caller interrupt proof search in scripts.
    pub fn set_cancel(&mut self, cancel: Option<Cancel>) {
        self.cancel = cancel;
    }

    pub fn paths(&self) -> &[PathBuf] {
        &self.paths
    }

    pub fn get(&self, name: &str) -> Option<&Theory> {
        self.loaded.get(name)
    }

    pub fn loaded(&self) -> impl Iterator<Item = &Theory> {
        self.loaded.values()
    }

    /// Records a theory built elsewhere, for instance one extended with
    /// interactively proved theorems.
    pub fn register(&mut self, thy: Theory) {
        self.loaded.insert(thy.name().to_string(), thy);
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    /// Loads a theory by name, or from a file when the argument ends in
    /// `.lthy` or contains a path separator.
    pub fn load(&mut self, name_or_path: &str) -> Result<Theory, StoreError> {
        if name_or_path.ends_with(".lthy") || name_or_path.contains('/') {
            return self.load_file(Path::new(name_or_path));
        }
        self.load_named(name_or_path, None)
    }

    /// Loads and checks the theory in `path`. A missing file whose stem
    /// names a bundled theory falls back to that theory.
    pub fn load_file(&mut self, path: &Path) -> Result<Theory, StoreError> {
        if !path.exists() {
            let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
            if let Some((_, text)) = BUNDLED.iter().find(|(n, _)| *n == stem) {
                return self.load_source(stem, Source::Bundled(text), None);
            }
        }
        let text = read(path)?;
        let file = parse_theory(&text).map_err(|err| StoreError::Parse { file: display(path), err })?;
        if let Some(t) = self.loaded.get(&file.name) {
            return Ok(t.clone());
        }
        self.check_file(&file, &display(path), path.parent())
    }

    /// Checks theory source text. `origin` labels error messages.
    pub fn load_text(&mut self, text: &str, origin: &str) -> Result<Theory, StoreError> {
        let file = parse_theory(text).map_err(|err| StoreError::Parse { file: origin.to_string(), err })?;
        self.check_file(&file, origin, None)
    }

    fn load_named(&mut self, name: &str, near: Option<&Path>) -> Result<Theory, StoreError> {
        if let Some(t) = self.loaded.get(name) {
            return Ok(t.clone());
        }
        if let Some(t) = builtin(name) {
            return Ok(t.clone());
        }
        let file_name = format!("{name}.lthy");
        let found = near
            .map(|d| d.join(&file_name))
            .into_iter()
            .chain(self.paths.iter().map(|d| d.join(&file_name)))
            .find(|p| p.is_file());
        let source = match found {
            Some(p) => Source::File(p),
            None => match BUNDLED.iter().find(|(n, _)| *n == name) {
                Some((_, text)) => Source::Bundled(text),
                None => return Err(StoreError::NotFound(name.to_string())),
            },
        };
        self.load_source(name, source, near)
    }

    fn load_source(&mut self, name: &str, source: Source, near: Option<&Path>) -> Result<Theory, StoreError> {
        if let Some(t) = self.loaded.get(name) {
            return Ok(t.clone());
        }
        let (text, label, dir) = match &source {
            Source::File(p) => (read(p)?, display(p), p.parent().map(Path::to_path_buf)),
            Source::Bundled(t) => (t.to_string(), format!("{name}.lthy"), near.map(Path::to_path_buf)),
        };
        let file = parse_theory(&text).map_err(|err| StoreError::Parse { file: label.clone(), err })?;
        if file.name != name {
            return Err(StoreError::Parse {
                file: label,
                err: ParseError::new(Pos::START, format!("file declares theory {}, expected {name}", file.name)),
            });
        }
        self.check_file(&file, &label, dir.as_deref())
    }

    fn check_file(&mut self, file: &TheoryFile, label: &str, dir: Option<&Path>) -> Result<Theory, StoreError> {
        if self.loading.contains(&file.name) {
            let start = self.loading.iter().position(|n| *n == file.name).unwrap_or(0);
            let mut cycle = self.loading[start..].to_vec();
            cycle.push(file.name.clone());
            return Err(StoreError::Cycle(cycle));
        }
        self.loading.push(file.name.clone());
        let result = self.check_loading(file, label, dir);
        self.loading.pop();
        let thy = result?;
        self.loaded.insert(file.name.clone(), thy.clone());
        Ok(thy)
    }

    fn check_loading(&mut self, file: &TheoryFile, label: &str, dir: Option<&Path>) -> Result<Theory, StoreError> {
        let imports = if file.imports.is_empty() { vec!["Base".to_string()] } else { file.imports.clone() };
        let mut parents = Vec::new();
        for i in &imports {
            parents.push(self.load_named(i, dir)?);
        }
        let classical = parents.iter().any(Theory::is_classical);
        let kerr = |pos: Pos| move |err: KernelError| StoreError::Kernel { file: label.to_string(), pos, err };
        let mut thy = Theory::new(&file.name, parents, classical).map_err(kerr(Pos::START))?;
        for d in &file.decls {
            thy = self.check_decl(thy, d, label)?;
        }
        for (name, _) in thy.local_facts() {
            let owners = thy.fact_owners(name);
            if owners.len() > 1 {
                self.warnings.push(format!("{}: {name} shadows the fact of the same name in {}", file.name, owners[1..].join(", ")));
            }
        }
        Ok(thy)
    }

    fn check_decl(&mut self, thy: Theory, d: &Decl, label: &str) -> Result<Theory, StoreError> {
        let parse_err = |err: ParseError| StoreError::Parse { file: label.to_string(), err };
        let kerr = |err: KernelError| StoreError::Kernel { file: label.to_string(), pos: d.pos, err };
        match &d.kind {
            DeclKind::Type { arity } => thy.declare_type(&d.name, *arity).map_err(kerr),
            DeclKind::Const { ty } => {
                let ty = resolve_type(&thy, ty).map_err(parse_err)?;
                thy.declare_const(&d.name, &ty).map_err(kerr)
            }
            DeclKind::Axiom { text, text_pos } => {
                let phi = parse_term_at(&thy, text, *text_pos).map_err(parse_err)?;
                let map: Vec<(Var, Term)> = phi
                    .free_vars()
                    .iter()
                    .map(|v| (v.clone(), Term::schematic(v.name.clone(), 0, v.ty.clone())))
                    .collect();
                let phi = phi.subst_free(&map).map_err(|e| kerr(e.into()))?;
                Ok(thy.new_axiom(&d.name, &phi).map_err(kerr)?.0)
            }
            DeclKind::Definition { text, text_pos } => {
                let eq = parse_term_at(&thy, text, *text_pos).map_err(parse_err)?;
                let (c, rhs) = definition_parts(&eq).map_err(|msg| parse_err(ParseError::new(*text_pos, msg)))?;
                Ok(thy.define_const_named(&format!("{}_def", d.name), &c, &rhs).map_err(kerr)?.0)
            }
            DeclKind::Theorem { text, text_pos, script } => {
                let phi = parse_term_at(&thy, text, *text_pos).map_err(parse_err)?;
                let proof_err = |pos: Pos, tactic: Option<String>, goals: Vec<String>, msg: String| StoreError::Proof {
                    file: label.to_string(),
                    pos,
                    theorem: d.name.clone(),
                    tactic,
                    goals,
                    msg,
                };
                let render = |st: &crate::proof::ProofState| -> Vec<String> {
                    st.goals().iter().map(|g| g.render(&thy, Mode::Unicode)).collect()
                };
                let mut st = init_proof(&thy, &phi).map_err(|e| proof_err(d.pos, None, vec![], e.to_string()))?;
                for (expr, pos) in script {
                    let fail = |msg: String| proof_err(*pos, Some(expr.to_string()), render(&st), msg);
                    if st.is_complete() {
                        return Err(fail("no goals left".to_string()));
                    }
                    let tac = compile(&thy, expr, self.cancel.as_ref()).map_err(|e| fail(e.to_string()))?;
                    st = match tac.apply(&st, 0).next() {
                        Some(Ok(next)) => next,
                        Some(Err(e)) => return Err(fail(e.to_string())),
                        None => return Err(fail("tactic failed".to_string())),
                    };
                }
                let end = script.last().map_or(d.pos, |(_, p)| *p);
                let th = qed(&st).map_err(|e| match e {
                    ProofError::Incomplete(_) => proof_err(end, None, render(&st), e.to_string()),
                    e => proof_err(end, None, vec![], e.to_string()),
                })?;
                let th = varify(&th).map_err(kerr)?;
                thy.store_theorem(&d.name, &th).map_err(kerr)
            }
        }
    }
}

/// Splits `c x₁ … xₙ = rhs` into `c` and `λx₁ … xₙ. rhs`.
fn definition_parts(eq: &Term) -> Result<(String, Term), String> {
    let (lhs, rhs) = crate::term::logic::dest_eq(eq).ok_or("a definition must be an equation")?;
    let (head, args) = lhs.strip_comb();
    let Some((c, _)) = head.dest_free() else {
        return Err(format!("the left-hand side must start with the new constant, found {head}"));
    };
    let mut seen: Vec<&Term> = Vec::new();
    for a in &args {
        if !a.is_free() || seen.contains(a) {
            return Err(format!("arguments of {c} must be distinct variables, found {a}"));
        }
        if a.dest_free().is_some_and(|(n, _)| n == c) {
            return Err(format!("{c} cannot be its own argument"));
        }
        seen.push(a);
    }
    if rhs.has_free_named(c) {
        return Err(format!("{c} cannot occur in its own definition"));
    }
    let body = args.iter().rev().fold(rhs.clone(), |acc, a| {
        let (n, ty) = a.dest_free().expect("checked above");
        Term::lambda(n, ty, &acc)
    });
    Ok((c.to_string(), body))
}

fn read(path: &Path) -> Result<String, StoreError> {
    std::fs::read_to_string(path).map_err(|source| StoreError::Io { path: display(path), source })
}

fn display(path: &Path) -> String {
    path.display().to_string()
}
