use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use lcfkit::auto::{blast_tac, taut_prove, DEFAULT_BLAST_DEPTH};
use lcfkit::library::classical;
use lcfkit::proof::{init_proof, qed};
use lcfkit::script::compile;
use lcfkit::syntax::{parse_tactic_expr, parse_term, print_term, Mode};
use lcfkit_bench::{conj_swap, fo_theory, long_formula, nat, parse, BLAST_GOALS, TAUTOLOGIES};

fn kernel_replay(c: &mut Criterion) {
    let done = conj_swap();
    c.bench_function("replay/conj_swap", |b| b.iter(|| qed(black_box(&done)).unwrap()));
}

fn theories(c: &mut Criterion) {
    c.bench_function("check/Nat", |b| b.iter(nat));
    let thy = nat();
    let goal = parse(&thy, "add one one = two");
    let expr = parse_tactic_expr("simp add: one_def two_def add_Zero add_Suc").unwrap();
    let simp = compile(&thy, &expr, None).unwrap();
    c.bench_function("simp/one_plus_one", |b| {
        b.iter(|| {
            let st = init_proof(&thy, &goal).unwrap();
            let done = simp.apply(&st, 0).next().unwrap().unwrap();
            qed(&done).unwrap()
        })
    });
}

fn decision_procedures(c: &mut Criterion) {
    let thy = classical();
    let mut group = c.benchmark_group("taut");
    for (name, s) in TAUTOLOGIES {
        let phi = parse(thy, s);
        group.bench_function(*name, |b| b.iter(|| taut_prove(thy, &[], black_box(&phi)).unwrap().unwrap()));
    }
    group.finish();

    let fo = fo_theory();
    let blast = blast_tac(DEFAULT_BLAST_DEPTH);
    let mut group = c.benchmark_group("blast");
    for (name, s) in BLAST_GOALS {
        let phi = parse(&fo, s);
        group.bench_function(*name, |b| {
            b.iter(|| {
                let st = init_proof(&fo, &phi).unwrap();
                let done = blast.apply(&st, 0).next().expect("blast proves the goal").unwrap();
                qed(&done).unwrap()
            })
        });
    }
    group.finish();
}

fn syntax(c: &mut Criterion) {
    let thy = fo_theory();
    let text = long_formula(40);
    let t = parse(&thy, &text);
    c.bench_function("syntax/parse", |b| b.iter(|| parse_term(&thy, black_box(&text)).unwrap()));
    c.bench_function("syntax/print_unicode", |b| b.iter(|| print_term(&thy, black_box(&t), Mode::Unicode)));
    c.bench_function("syntax/print_ascii", |b| b.iter(|| print_term(&thy, black_box(&t), Mode::Ascii)));
}

criterion_group!(benches, kernel_replay, theories, decision_procedures, syntax);
criterion_main!(benches);
