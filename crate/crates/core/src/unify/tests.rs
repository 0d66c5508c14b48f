use std::collections::HashMap;

use proptest::prelude::*;

use super::*;
use crate::kernel::theory::Theory;
use crate::syntax::parse_term;

fn thy() -> Theory {
    let i = Type::ind();
    Theory::primitive_base("U")
        .declare_const("zero", &i)
        .unwrap()
        .declare_const("S", &Type::fun(i.clone(), i.clone()))
        .unwrap()
        .declare_const("add", &Type::fun_n([i.clone(), i.clone()], i.clone()))
        .unwrap()
        .declare_const("f", &Type::fun(i.clone(), i))
        .unwrap()
}

fn t(s: &str) -> Term {
    parse_term(&thy(), s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn unify1(a: &Term, b: &Term) -> Option<SubstEnv> {
    unify(a, b, &SubstEnv::new()).unwrap()
}

fn assert_unifies(a: &Term, b: &Term, env: &SubstEnv) {
    assert_eq!(env.apply(a), env.apply(b), "{env:?}");
    assert_eq!(env.apply(&env.apply(a)), env.apply(a));
}

#[test]
fn type_examples() {
    let a = Type::schematic("a", 0);
    let env = unify_types(&Type::fun(a.clone(), Type::bool()), &Type::fun(Type::ind(), Type::bool()), &SubstEnv::new())
        .unwrap();
    assert_eq!(env.type_binding("a", 0), Some(&Type::ind()));

    let err = unify_types(&a, &Type::fun(a.clone(), Type::bool()), &SubstEnv::new()).unwrap_err();
    assert!(matches!(err, UnifyError::TypeOccurs { .. }), "{err}");

    let env = unify_types(&Type::bool(), &Type::bool(), &SubstEnv::new()).unwrap();
    assert!(env.is_empty());

    let err = unify_types(
        &Type::fun(Type::bool(), Type::bool()),
        &Type::fun(Type::bool(), Type::ind()),
        &SubstEnv::new(),
    )
    .unwrap_err();
    match err {
        UnifyError::TypeClash { path, .. } => assert_eq!(path, "1"),
        e => panic!("{e}"),
    }
}

#[test]
fn fixed_type_variables_are_rigid() {
    assert!(unify_types(&Type::var("a"), &Type::ind(), &SubstEnv::new()).is_err());
    assert!(unify_types(&Type::var("a"), &Type::var("a"), &SubstEnv::new()).is_ok());
}

#[test]
fn first_order_example() {
    let a = t("?φ ∧ ?ψ");
    let b = t("p ∧ (q ∨ r)");
    let env = unify1(&a, &b).unwrap();
    assert_eq!(env.term_binding("φ", 0), Some(&t("p")));
    assert_eq!(env.term_binding("ψ", 0), Some(&t("q ∨ r")));
    assert_unifies(&a, &b, &env);
}

#[test]
fn pattern_example() {
    let a = t("λx::ind. (?P x :: bool)");
    let b = t("λx::ind. p x ∧ q x");
    let env = unify1(&a, &b).unwrap();
    assert_eq!(env.term_binding("P", 0), Some(&t("λx::ind. p x ∧ q x")));
    assert_unifies(&a, &b, &env);
}

#[test]
fn pattern_under_quantifier_with_escape_fails() {
    // ?c cannot depend on x.
    assert!(unify1(&t("∀x::ind. ?c = x"), &t("∀x::ind. x = x")).is_none());
    // but ?P x can.
    let env = unify1(&t("∀x::ind. ?P x = x"), &t("∀x::ind. f x = x")).unwrap();
    assert_eq!(env.term_binding("P", 0), Some(&t("f")).map(|_| env.term_binding("P", 0).unwrap()));
    assert_eq!(env.apply(&t("?P zero")), t("f zero"));
}

#[test]
fn occurs_check() {
    assert!(unify1(&t("(?x :: ind)"), &t("f ?x")).is_none());
    assert!(unify1(&t("(?x :: ind)"), &t("(?x :: ind)")).is_some());
}

#[test]
fn flex_flex_same_head_prunes_differing_arguments() {
    let a = t("λx::ind. λy::ind. ?F x y = zero");
    let b = t("λx::ind. λy::ind. ?F y x = zero");
    let env = unify1(&a, &b).unwrap();
    assert_unifies(&a, &b, &env);
    let inst = env.apply(&t("λx::ind. λy::ind. ?F x y"));
    assert!(inst.loose_bound() == 0);
    assert_eq!(env.apply(&t("?F zero (S zero)")), env.apply(&t("?F (S zero) zero")));
}

#[test]
fn flex_flex_different_heads() {
    let a = t("λx::ind. λy::ind. ?F x y = zero");
    let b = t("λx::ind. λy::ind. ?G y = zero");
    let env = unify1(&a, &b).unwrap();
    assert_unifies(&a, &b, &env);
}

#[test]
fn pruning_inside_rigid_term() {
    // ?F x = f (?G x y): ?G must drop y.
    let a = t("λx::ind. λy::ind. (?F x :: ind)");
    let b = t("λx::ind. λy::ind. f (?G x y)");
    let env = unify1(&a, &b).unwrap();
    assert_unifies(&a, &b, &env);
}

#[test]
fn polymorphic_constants_unify_types() {
    // Parsed type variables are fixed, so build `?x = ?y` at `?'a`.
    let v = Type::schematic("a", 0);
    let a = crate::term::logic::mk_eq(&Term::schematic("x", 0, v.clone()), &Term::schematic("y", 0, v)).unwrap();
    let b = t("zero = S zero");
    let env = unify1(&a, &b).unwrap();
    assert_eq!(env.type_binding("a", 0), Some(&Type::ind()));
    assert_unifies(&a, &b, &env);
}

#[test]
fn annotated_schematics_unify() {
    let a = t("(?x :: ind) = ?y");
    let b = t("zero = S zero");
    let env = unify1(&a, &b).unwrap();
    assert_unifies(&a, &b, &env);
}

#[test]
fn non_pattern_is_reported() {
    let r = unify_terms(&t("?F zero = zero"), &t("S zero = zero"), &SubstEnv::new());
    assert!(matches!(r, Err(UnifyError::NonPattern { .. })), "{r:?}");
}

#[test]
fn non_pattern_resolved_by_later_binding() {
    // Solving ?F first makes the postponed problem rigid.
    let a = t("(?F zero = zero) ∧ (?F = S)");
    let b = t("(S zero = zero) ∧ (S = S)");
    let env = unify1(&a, &b).unwrap();
    assert_unifies(&a, &b, &env);
}

#[test]
fn clash_gives_no_unifier() {
    assert!(unify1(&t("p ∧ q"), &t("p ∨ q")).is_none());
    assert!(unify1(&t("zero"), &t("S zero")).is_none());
}

#[test]
fn unifiers_extend_the_given_environment() {
    let env0 = unify1(&t("(?x :: ind)"), &t("zero")).unwrap();
    let env = unify(&t("S ?x"), &t("S ?y"), &env0).unwrap().unwrap();
    assert_eq!(env.apply(&t("(?y :: ind)")), t("zero"));
    assert!(unify(&t("(?x :: ind)"), &t("S zero"), &env0).unwrap().is_none());
}

#[test]
fn match_examples() {
    let env = match_terms(&t("add ?m ?n"), &t("add (S zero) (S zero)"), &SubstEnv::new()).unwrap();
    assert_eq!(env.term_binding("m", 0), Some(&t("S zero")));
    assert_eq!(env.term_binding("n", 0), Some(&t("S zero")));
    assert_eq!(env.apply(&t("add ?m ?n")), t("add (S zero) (S zero)"));

    assert!(match_terms(&t("zero"), &t("S zero"), &SubstEnv::new()).is_none());
    assert!(match_terms(&t("add zero zero"), &t("add zero zero"), &SubstEnv::new()).is_some());
    assert!(match_terms(&t("∀x::ind. x = x"), &t("∀y::ind. y = y"), &SubstEnv::new()).is_some());
    assert!(match_terms(&t("add zero zero"), &t("add zero (S zero)"), &SubstEnv::new()).is_none());
}

#[test]
fn match_is_one_sided() {
    // Target schematics are rigid.
    assert!(match_terms(&t("S zero"), &t("S ?k"), &SubstEnv::new()).is_none());
    assert!(match_terms(&t("add ?m ?m"), &t("add zero (S zero)"), &SubstEnv::new()).is_none());
    let env = match_terms(&t("add ?m ?m"), &t("add ?k ?k"), &SubstEnv::new()).unwrap();
    assert_eq!(env.term_binding("m", 0), Some(&t("(?k :: ind)")));
}

#[test]
fn match_higher_order_pattern() {
    let env = match_terms(&t("∀x::ind. ?P x"), &t("∀y::ind. f y = y"), &SubstEnv::new()).unwrap();
    assert_eq!(env.apply(&t("?P zero")), t("f zero = zero"));
    assert!(match_terms(&t("∀x::ind. ?c"), &t("∀y::ind. f y = y"), &SubstEnv::new()).is_none());
}

#[test]
fn match_polymorphic_pattern_types() {
    let a = Type::schematic("a", 0);
    let pat = Term::app_n(
        Term::constant("eq", Type::fun_n([a.clone(), a.clone()], Type::bool())),
        [Term::schematic("x", 0, a.clone()), Term::schematic("x", 0, a.clone())],
    )
    .unwrap();
    let env = match_terms(&pat, &t("zero = zero"), &SubstEnv::new()).unwrap();
    assert_eq!(env.type_binding("a", 0), Some(&Type::ind()));
    assert_eq!(env.apply(&pat), t("zero = zero"));
}

#[test]
fn instantiation_agrees_with_apply() {
    let a = t("?φ ∧ ?ψ");
    let env = unify1(&a, &t("p ∧ (q ∨ r)")).unwrap();
    let inst = env.to_instantiation();
    assert_eq!(inst.terms.len(), 2);
}

// ---- first-order oracle ----

/// Independent first-order term representation.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Fo {
    Var(u32),
    Fn(&'static str, Vec<Fo>),
}

fn fo_walk(s: &HashMap<u32, Fo>, t: &Fo) -> Fo {
    match t {
        Fo::Var(v) => match s.get(v) {
            Some(b) => fo_walk(s, b),
            None => t.clone(),
        },
        Fo::Fn(f, args) => Fo::Fn(f, args.iter().map(|a| fo_walk(s, a)).collect()),
    }
}

fn fo_occurs(s: &HashMap<u32, Fo>, v: u32, t: &Fo) -> bool {
    match fo_walk(s, t) {
        Fo::Var(w) => v == w,
        Fo::Fn(_, args) => args.iter().any(|a| fo_occurs(s, v, a)),
    }
}

/// Textbook Robinson unification with a triangular substitution.
fn robinson(a: &Fo, b: &Fo, s: &mut HashMap<u32, Fo>) -> bool {
    let a = fo_walk(s, a);
    let b = fo_walk(s, b);
    match (&a, &b) {
        (Fo::Var(x), Fo::Var(y)) if x == y => true,
        (Fo::Var(x), t) | (t, Fo::Var(x)) => {
            if fo_occurs(s, *x, t) {
                return false;
            }
            s.insert(*x, t.clone());
            true
        }
        (Fo::Fn(f, xs), Fo::Fn(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| robinson(x, y, s))
        }
    }
}

fn fo_term(t: &Fo) -> Term {
    let i = Type::ind();
    match t {
        Fo::Var(v) => Term::schematic("x", *v, i),
        Fo::Fn(f, args) => {
            let ty = Type::fun_n(args.iter().map(|_| i.clone()), i.clone());
            Term::app_n(Term::constant(*f, ty), args.iter().map(fo_term)).unwrap()
        }
    }
}

fn term_fo(t: &Term) -> Fo {
    let (h, args) = t.strip_comb();
    match h.kind() {
        TermKind::Schematic(_, i) => Fo::Var(*i),
        TermKind::Const(c) => Fo::Fn(
            ["zero", "S", "add"].into_iter().find(|n| **n == **c).unwrap(),
            args.iter().map(|a| term_fo(a)).collect(),
        ),
        _ => unreachable!(),
    }
}

/// Equal up to a bijective renaming of variables.
fn variant(a: &Fo, b: &Fo, m: &mut HashMap<u32, u32>, back: &mut HashMap<u32, u32>) -> bool {
    match (a, b) {
        (Fo::Var(x), Fo::Var(y)) => *m.entry(*x).or_insert(*y) == *y && *back.entry(*y).or_insert(*x) == *x,
        (Fo::Fn(f, xs), Fo::Fn(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| variant(x, y, m, back))
        }
        _ => false,
    }
}

fn arb_fo() -> impl Strategy<Value = Fo> {
    let leaf = prop_oneof![(0u32..4).prop_map(Fo::Var), Just(Fo::Fn("zero", vec![]))];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|a| Fo::Fn("S", vec![a])),
            (inner.clone(), inner).prop_map(|(a, b)| Fo::Fn("add", vec![a, b])),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn agrees_with_robinson_oracle(a in arb_fo(), b in arb_fo()) {
        let mut s = HashMap::new();
        let oracle = robinson(&a, &b, &mut s);
        let (ta, tb) = (fo_term(&a), fo_term(&b));
        let ours = unify(&ta, &tb, &SubstEnv::new()).unwrap();
        prop_assert_eq!(oracle, ours.is_some());
        if let Some(env) = ours {
            let got = env.apply(&ta);
            prop_assert_eq!(&got, &env.apply(&tb));
            // Both are most general, so the instances are variants.
            let want = fo_walk(&s, &a);
            prop_assert!(variant(&term_fo(&got), &want, &mut HashMap::new(), &mut HashMap::new()),
                "{} vs {:?}", got, want);
        }
    }

    #[test]
    fn unifiers_equate_and_are_idempotent(a in arb_fo(), b in arb_fo()) {
        let (ta, tb) = (fo_term(&a), fo_term(&b));
        if let Some(env) = unify(&ta, &tb, &SubstEnv::new()).unwrap() {
            prop_assert_eq!(env.apply(&ta), env.apply(&tb));
            for t in [&ta, &tb] {
                let once = env.apply(t);
                prop_assert_eq!(env.apply(&once), once);
            }
            for (_, b) in env.term_bindings() {
                prop_assert_eq!(env.apply(b), b.clone());
            }
        }
    }

    #[test]
    fn matching_recovers_instances(a in arb_fo(), b in arb_fo()) {
        // Instantiate a's variables with closed pieces of b, then match back.
        let pat = fo_term(&a);
        let closed = fo_term(&fo_walk(&HashMap::new(), &b));
        let closed = crate::term::beta_normalize(&closed.subst_schematic(
            &(0..4).map(|i| ((Name::from("x"), i), fo_term(&Fo::Fn("zero", vec![])))).collect()));
        let target = pat.subst_schematic(
            &(0..4).map(|i| ((Name::from("x"), i), closed.clone())).collect());
        let env = match_terms(&pat, &target, &SubstEnv::new());
        prop_assert!(env.is_some());
        prop_assert_eq!(env.unwrap().apply(&pat), target);
    }
}

#[test]
fn invented_variables_respect_the_floor() {
    // ?F x against ?G y under two binders needs a fresh common variable.
    let a = t("λx y. ?F x");
    let b = t("λx y. ?G y");
    let env = unify_above(&a, &b, &SubstEnv::new(), 40).unwrap().unwrap();
    assert_unifies(&a, &b, &env);
    let mut invented = Vec::new();
    for (_, v) in env.term_bindings() {
        v.for_each_leaf(&mut |l| {
            if let TermKind::Schematic(_, i) = l.kind() {
                invented.push(*i);
            }
        });
    }
    assert!(!invented.is_empty() && invented.iter().all(|i| *i > 40), "{invented:?}");
}
