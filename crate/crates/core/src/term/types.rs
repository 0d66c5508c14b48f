use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::Name;

/// A simple type: a type variable or an applied type constructor.
///
/// `Var` is a fixed type variable written `'a`. `Schematic` is a type
/// placeholder `?'a` that unification may bind. Function types are the
/// constructor `fun` with two arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Var(Name),
    Schematic(Name, u32),
    Con(Name, Arc<[Type]>),
}

/// Key identifying a type variable of either flavour.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum TyVar {
    Fixed(Name),
    Schematic(Name, u32),
}

pub const BOOL: &str = "bool";
pub const IND: &str = "ind";
pub const FUN: &str = "fun";

impl Type {
    pub fn con(name: impl Into<Name>, args: Vec<Type>) -> Type {
        Type::Con(name.into(), args.into())
    }

    pub fn var(name: impl Into<Name>) -> Type {
        Type::Var(name.into())
    }

    pub fn schematic(name: impl Into<Name>, idx: u32) -> Type {
        Type::Schematic(name.into(), idx)
    }

    pub fn bool() -> Type {
        thread_local! {
            static BOOL_TY: Type = Type::con(BOOL, vec![]);
        }
        BOOL_TY.with(Clone::clone)
    }

    pub fn ind() -> Type {
        Type::con(IND, vec![])
    }

    pub fn fun(dom: Type, cod: Type) -> Type {
        thread_local! {
            static FUN_NAME: Name = Name::from(FUN);
        }
        Type::Con(FUN_NAME.with(Clone::clone), Arc::new([dom, cod]))
    }

    /// `a1 ⇒ a2 ⇒ … ⇒ res`
    pub fn fun_n(args: impl IntoIterator<Item = Type>, res: Type) -> Type {
        let args: Vec<Type> = args.into_iter().collect();
        args.into_iter().rev().fold(res, |acc, a| Type::fun(a, acc))
    }

    pub fn is_bool(&self) -> bool {
        matches!(self, Type::Con(n, args) if &**n == BOOL && args.is_empty())
    }

    pub fn dest_fun(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Con(n, args) if &**n == FUN && args.len() == 2 => Some((&args[0], &args[1])),
            _ => None,
        }
    }

    pub fn is_fun(&self) -> bool {
        self.dest_fun().is_some()
    }

    /// Splits `a1 ⇒ … ⇒ an ⇒ r` into `([a1..an], r)`.
    pub fn strip_fun(&self) -> (Vec<&Type>, &Type) {
        let mut args = Vec::new();
        let mut ty = self;
        while let Some((d, c)) = ty.dest_fun() {
            args.push(d);
            ty = c;
        }
        (args, ty)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Type::Var(_) | Type::Schematic(..) => false,
            Type::Con(_, args) => args.iter().all(Type::is_ground),
        }
    }

    pub fn has_schematic(&self) -> bool {
        match self {
            Type::Var(_) => false,
            Type::Schematic(..) => true,
            Type::Con(_, args) => args.iter().any(Type::has_schematic),
        }
    }

    pub fn add_tyvars(&self, out: &mut Vec<TyVar>) {
        match self {
            Type::Var(n) => {
                let v = TyVar::Fixed(n.clone());
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            Type::Schematic(n, i) => {
                let v = TyVar::Schematic(n.clone(), *i);
                if !out.contains(&v) {
                    out.push(v);
                }
            }
            Type::Con(_, args) => args.iter().for_each(|a| a.add_tyvars(out)),
        }
    }

    pub fn tyvars(&self) -> Vec<TyVar> {
        let mut out = Vec::new();
        self.add_tyvars(&mut out);
        out
    }

    pub fn occurs(&self, v: &TyVar) -> bool {
        match (self, v) {
            (Type::Var(n), TyVar::Fixed(m)) => n == m,
            (Type::Schematic(n, i), TyVar::Schematic(m, j)) => n == m && i == j,
            (Type::Con(_, args), _) => args.iter().any(|a| a.occurs(v)),
            _ => false,
        }
    }

    /// Applies `f` to every type variable, rebuilding only changed nodes.
    pub fn map_vars(&self, f: &mut impl FnMut(&TyVar) -> Option<Type>) -> Type {
        self.try_map_vars(f).unwrap_or_else(|| self.clone())
    }

    fn try_map_vars(&self, f: &mut impl FnMut(&TyVar) -> Option<Type>) -> Option<Type> {
        match self {
            Type::Var(n) => f(&TyVar::Fixed(n.clone())),
            Type::Schematic(n, i) => f(&TyVar::Schematic(n.clone(), *i)),
            Type::Con(name, args) => {
                let mut changed: Option<Vec<Type>> = None;
                for (k, a) in args.iter().enumerate() {
                    if let Some(na) = a.try_map_vars(f) {
                        changed.get_or_insert_with(|| args[..k].to_vec()).push(na);
                    } else if let Some(c) = changed.as_mut() {
                        c.push(a.clone());
                    }
                }
                changed.map(|c| Type::Con(name.clone(), c.into()))
            }
        }
    }

    pub fn subst(&self, map: &HashMap<TyVar, Type>) -> Type {
        if map.is_empty() {
            return self.clone();
        }
        self.map_vars(&mut |v| map.get(v).cloned())
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, arrow_left: bool) -> fmt::Result {
        match self {
            Type::Var(n) => write!(f, "'{n}"),
            Type::Schematic(n, 0) => write!(f, "?'{n}"),
            Type::Schematic(n, i) => write!(f, "?'{n}.{i}"),
            Type::Con(..) if self.is_fun() => {
                let (d, c) = self.dest_fun().unwrap();
                if arrow_left {
                    f.write_str("(")?;
                }
                d.fmt_prec(f, true)?;
                f.write_str(if f.alternate() { " => " } else { " ⇒ " })?;
                c.fmt_prec(f, false)?;
                if arrow_left {
                    f.write_str(")")?;
                }
                Ok(())
            }
            Type::Con(n, args) => {
                match args.len() {
                    0 => {}
                    1 => {
                        args[0].fmt_prec(f, true)?;
                        f.write_str(" ")?;
                    }
                    _ => {
                        f.write_str("(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                f.write_str(", ")?;
                            }
                            a.fmt_prec(f, false)?;
                        }
                        f.write_str(") ")?;
                    }
                }
                f.write_str(n)
            }
        }
    }
}

/// Unicode by default; `{:#}` prints the ASCII arrow.
impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, false)
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TyVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TyVar::Fixed(n) => write!(f, "'{n}"),
            TyVar::Schematic(n, i) => write!(f, "?'{n}.{i}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arrows_associate_right_in_display() {
        let t = Type::fun(Type::fun(Type::ind(), Type::bool()), Type::fun(Type::ind(), Type::bool()));
        assert_eq!(t.to_string(), "(ind ⇒ bool) ⇒ ind ⇒ bool");
        assert_eq!(format!("{t:#}"), "(ind => bool) => ind => bool");
    }

    #[test]
    fn strip_fun_splits_curried_arguments() {
        let t = Type::fun_n([Type::ind(), Type::bool()], Type::ind());
        let (args, res) = t.strip_fun();
        assert_eq!(args.len(), 2);
        assert_eq!(res, &Type::ind());
    }

    #[test]
    fn subst_replaces_only_mapped_vars() {
        let a = Type::var("a");
        let t = Type::fun(a.clone(), Type::var("b"));
        let mut m = HashMap::new();
        m.insert(TyVar::Fixed("a".into()), Type::bool());
        assert_eq!(t.subst(&m), Type::fun(Type::bool(), Type::var("b")));
    }
}
