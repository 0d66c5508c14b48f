use std::collections::HashSet;

use crate::kernel::theory::Theory;
use crate::term::{logic, Name, Term, TermKind, Type};

use super::table::{Assoc, SyntaxTable, NOT_PREC};
use super::{parse_term_with, Mode, Pos};

const ATOM: u32 = 4000;
const APP: u32 = 2000;
const NOT_LEVEL: u32 = 2 * NOT_PREC;

/// Prints a type in the concrete syntax.
pub fn print_type(ty: &Type, mode: Mode) -> String {
    match mode {
        Mode::Unicode => format!("{ty}"),
        Mode::Ascii => format!("{ty:#}"),
    }
}

/// Prints without consulting a theory, so no type annotations are added.
pub fn print_plain(t: &Term, mode: Mode) -> String {
    let table = SyntaxTable::default();
    Printer::new(&table, mode, t, Annotations::default()).render(t)
}

/// Prints `t` so that parsing the text in `thy` yields an alpha-equal term,
/// adding type annotations only where inference would pick other types.
pub fn print_term(thy: &Theory, t: &Term, mode: Mode) -> String {
    print_term_with(thy, &SyntaxTable::default(), t, mode)
}

pub fn print_term_with(thy: &Theory, table: &SyntaxTable, t: &Term, mode: Mode) -> String {
    let mut ann = Annotations::default();
    loop {
        let text = Printer::new(table, mode, t, ann.clone()).render(t);
        let Ok(back) = parse_term_with(thy, table, &text, Pos::START) else {
            break;
        };
        if back == *t {
            return text;
        }
        // Variables and binders first; constants only when those are settled.
        let before = ann.len();
        collect_mismatches(t, &back, &mut ann, false);
        if ann.len() == before {
            collect_mismatches(t, &back, &mut ann, true);
        }
        if ann.len() == before {
            break;
        }
    }
    ann.everything = true;
    Printer::new(table, mode, t, ann).render(t)
}

#[derive(Clone, Default)]
struct Annotations {
    frees: HashSet<Name>,
    schematics: HashSet<(Name, u32)>,
    consts: HashSet<(Name, Type)>,
    binders: HashSet<Type>,
    everything: bool,
}

impl Annotations {
    fn len(&self) -> usize {
        self.frees.len() + self.schematics.len() + self.consts.len() + self.binders.len()
    }
}

/// Records every site where the reparsed term disagrees on a type.
fn collect_mismatches(t: &Term, back: &Term, ann: &mut Annotations, consts: bool) {
    match (t.kind(), back.kind()) {
        (TermKind::App(f, x), TermKind::App(g, y)) => {
            collect_mismatches(f, g, ann, consts);
            collect_mismatches(x, y, ann, consts);
        }
        (TermKind::Abs(_, a, b), TermKind::Abs(_, c, d)) => {
            if a != c && !consts {
                ann.binders.insert(a.clone());
            }
            collect_mismatches(b, d, ann, consts);
        }
        _ if t.ty() == back.ty() => {}
        (TermKind::Free(n), _) if !consts => {
            ann.frees.insert(n.clone());
        }
        (TermKind::Schematic(n, i), _) if !consts => {
            ann.schematics.insert((n.clone(), *i));
        }
        (TermKind::Const(n), _) if consts => {
            ann.consts.insert((n.clone(), t.ty().clone()));
        }
        _ => {}
    }
}

struct Printer<'a> {
    table: &'a SyntaxTable,
    mode: Mode,
    ann: Annotations,
    /// Names that bound variables must avoid: frees and constants of the term.
    taken: HashSet<String>,
    bound: Vec<String>,
    annotated_frees: HashSet<Name>,
    annotated_schematics: HashSet<(Name, u32)>,
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    let Some(c0) = cs.next() else { return false };
    (c0.is_alphabetic() || c0 == '_')
        && c0 != 'λ'
        && cs.all(|c| (c.is_alphanumeric() && c != 'λ') || c == '_' || c == '\'')
        && s != "ALL"
        && s != "EX"
}

/// `x`, `xa`, …, `xz`, `xaa`, …
pub fn variant(base: &str, k: usize) -> String {
    if k == 0 {
        return base.to_string();
    }
    let mut suffix = Vec::new();
    let mut k = k;
    while k > 0 {
        k -= 1;
        suffix.push((b'a' + (k % 26) as u8) as char);
        k /= 26;
    }
    let mut s = base.to_string();
    s.extend(suffix.iter().rev());
    s
}

impl<'a> Printer<'a> {
    fn new(table: &'a SyntaxTable, mode: Mode, t: &Term, ann: Annotations) -> Self {
        let mut taken = HashSet::new();
        t.for_each_leaf(&mut |l| match l.kind() {
            TermKind::Free(n) | TermKind::Const(n) => {
                taken.insert(n.to_string());
            }
            _ => {}
        });
        Printer {
            table,
            mode,
            ann,
            taken,
            bound: Vec::new(),
            annotated_frees: HashSet::new(),
            annotated_schematics: HashSet::new(),
        }
    }

    fn render(&mut self, t: &Term) -> String {
        self.term(t, 0, true)
    }

    fn ty(&self, ty: &Type) -> String {
        print_type(ty, self.mode)
    }

    fn fresh_bound(&self, hint: &str) -> String {
        let base = if valid_ident(hint) { hint } else { "x" };
        (0..)
            .map(|k| variant(base, k))
            .find(|n| !self.taken.contains(n) && !self.bound.contains(n))
            .unwrap()
    }

    fn paren(s: String, yes: bool) -> String {
        if yes {
            format!("({s})")
        } else {
            s
        }
    }

    fn sym<'s>(&self, unicode: &'s str, ascii: &'s str) -> &'s str {
        match self.mode {
            Mode::Unicode => unicode,
            Mode::Ascii => ascii,
        }
    }

    /// `min` is the binding power the context requires; `tail` says whether
    /// the text runs to the end of the enclosing group, which lets a binder
    /// body extend right without parentheses.
    fn term(&mut self, t: &Term, min: u32, tail: bool) -> String {
        if let Some(s) = self.notation(t, min, tail) {
            return s;
        }
        match t.kind() {
            TermKind::App(..) => {
                let (head, args) = t.strip_comb();
                let mut s = self.term(head, ATOM, false);
                for a in args {
                    s.push(' ');
                    s.push_str(&self.term(a, ATOM, false));
                }
                Self::paren(s, min > APP)
            }
            TermKind::Abs(..) => {
                let s = self.binder(None, t);
                Self::paren(s, min >= APP || !tail)
            }
            _ => self.leaf(t),
        }
    }

    fn leaf(&mut self, t: &Term) -> String {
        match t.kind() {
            TermKind::Bound(i) => {
                let k = self.bound.len() as i64 - 1 - *i as i64;
                if k >= 0 {
                    self.bound[k as usize].clone()
                } else {
                    format!("#{i}")
                }
            }
            TermKind::Free(n) => {
                if (self.ann.everything || self.ann.frees.contains(n)) && self.annotated_frees.insert(n.clone()) {
                    format!("({n} :: {})", self.ty(t.ty()))
                } else {
                    n.to_string()
                }
            }
            TermKind::Schematic(n, i) => {
                let text = if *i == 0 { format!("?{n}") } else { format!("?{n}.{i}") };
                let key = (n.clone(), *i);
                if (self.ann.everything || self.ann.schematics.contains(&key))
                    && self.annotated_schematics.insert(key)
                {
                    format!("({text} :: {})", self.ty(t.ty()))
                } else {
                    text
                }
            }
            TermKind::Const(n) => {
                let text = self.const_name(n);
                if self.ann.everything || self.ann.consts.contains(&(n.clone(), t.ty().clone())) {
                    format!("({text} :: {})", self.ty(t.ty()))
                } else {
                    text
                }
            }
            _ => unreachable!("leaf called on a compound term"),
        }
    }

    /// Name of a constant as an atom: operators appear as sections.
    fn const_name(&self, n: &str) -> String {
        if let Some(inf) = self.table.by_const(n) {
            return format!("({})", self.sym(&inf.symbol, &inf.ascii));
        }
        match n {
            logic::TRUE => self.sym("⊤", "True").into(),
            logic::FALSE => self.sym("⊥", "False").into(),
            logic::NOT => self.sym("(¬)", "(~)").into(),
            logic::ALL => self.sym("(∀)", "(ALL)").into(),
            logic::EX => self.sym("(∃)", "(EX)").into(),
            _ => n.to_string(),
        }
    }

    fn const_annotated(&self, c: &Term) -> bool {
        match c.kind() {
            TermKind::Const(n) => self.ann.everything || self.ann.consts.contains(&(n.clone(), c.ty().clone())),
            _ => false,
        }
    }

    /// Infix, prefix and binder forms; `None` falls back to plain application.
    fn notation(&mut self, t: &Term, min: u32, tail: bool) -> Option<String> {
        let (head, args) = t.strip_comb();
        let TermKind::Const(name) = head.kind() else { return None };
        if self.const_annotated(head) {
            return None;
        }
        match (&**name, args.as_slice()) {
            (logic::NOT, [a]) => {
                let needs = min > NOT_LEVEL;
                let s = format!("{}{}", self.sym("¬", "~"), self.term(a, NOT_LEVEL, tail || needs));
                Some(Self::paren(s, needs))
            }
            (logic::ALL | logic::EX, [pred]) if matches!(pred.kind(), TermKind::Abs(..)) => {
                let s = self.binder(Some(name.clone()), t);
                Some(Self::paren(s, min >= APP || !tail))
            }
            (_, [a, b]) => {
                let inf = self.table.by_const(name)?.clone();
                let lvl = 2 * inf.prec;
                let needs = min > lvl;
                let inner_tail = tail || needs;
                let (lmin, rmin) = match inf.assoc {
                    Assoc::Left => (lvl, lvl + 1),
                    Assoc::Right => (lvl + 1, lvl),
                    Assoc::None => (lvl + 1, lvl + 1),
                };
                let l = self.term(a, lmin, false);
                let r = self.term(b, rmin, inner_tail);
                let s = format!("{l} {} {r}", self.sym(&inf.symbol, &inf.ascii));
                Some(Self::paren(s, needs))
            }
            _ => None,
        }
    }

    /// Prints one binder; nested binders print one at a time (`∀x. ∀y. …`).
    fn binder(&mut self, quant: Option<Name>, t: &Term) -> String {
        let sym = match quant.as_deref() {
            Some(logic::ALL) => self.sym("∀", "ALL "),
            Some(logic::EX) => self.sym("∃", "EX "),
            _ => self.sym("λ", "%"),
        };
        let abs = match &quant {
            Some(q) => logic::dest_binder(q, t).expect("binder application"),
            None => t,
        };
        let (hint, ty, body) = abs.dest_abs().expect("abstraction");
        let name = self.fresh_bound(hint);
        let var = if self.ann.everything || self.ann.binders.contains(ty) {
            format!("({name} :: {})", self.ty(ty))
        } else {
            name.clone()
        };
        self.bound.push(name);
        let body = self.term(body, 0, true);
        self.bound.pop();
        format!("{sym}{var}. {body}")
    }
}
