//! Whole pipeline: formula to program to cascade to program to automaton,
//! checked against the formula evaluator.

use krl_core::compile::{
    automaton_to_program, cascade_to_program, formula_to_normal_program, pltl_to_program, program_to_cascade,
    unfold_program,
};
use krl_core::equiv::{bounded_equiv, Recognizer};
use krl_core::pltl::{parse_formula, series, Formula, SinceSemantics};
use krl_core::programs::{is_normal, parse_program, simulate};
use krl_core::trace::{Trace, Variable};
use proptest::prelude::*;

fn vars(names: &[&str]) -> Vec<Variable> {
    names.iter().map(|n| Variable::new(n).unwrap()).collect()
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bot),
        prop::sample::select(vars(&["a", "b"])).prop_map(Formula::Atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::before),
            inner.clone().prop_map(Formula::once),
            inner.clone().prop_map(Formula::hist),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::since(l, r)),
        ]
    })
}

fn trace() -> impl Strategy<Value = Trace> {
    prop::collection::vec(0usize..4, 1..7).prop_map(|ls| Trace::from_letters(&vars(&["a", "b"]), &ls).unwrap())
}

proptest! {
    #[test]
    fn formula_survives_every_translation(f in formula(), tr in trace()) {
        let want = series(&f, &tr, tr.len(), SinceSemantics::Direct);

        let (p, root) = pltl_to_program(&f).unwrap();
        if let Some(col) = simulate(&p, &tr).unwrap().column(&root) {
            prop_assert_eq!(&col, &want);
        }

        let (n, nroot) = formula_to_normal_program(&f).unwrap();
        prop_assert!(is_normal(&n).normal);
        if let Some(col) = simulate(&n, &tr).unwrap().column(&nroot) {
            prop_assert_eq!(&col, &want);
        }

        if !p.is_empty() {
            let back = unfold_program(&p, &root).unwrap();
            prop_assert_eq!(series(&back, &tr, tr.len(), SinceSemantics::Direct), want.clone());

            let (c, wiring) = program_to_cascade(&p).unwrap();
            let run = c.run(&tr.letters_over(&wiring.inputs)).unwrap();
            let got: Vec<Option<bool>> = (1..=tr.len()).map(|t| wiring.value(&run, &root, t)).collect();
            prop_assert_eq!(got, want.iter().map(|&b| Some(b)).collect::<Vec<_>>());

            let (p2, _) = cascade_to_program(&c).unwrap();
            prop_assert!(p2.len() >= c.len());
        }
    }
}

#[test]
fn automaton_from_a_formula_goes_back_to_an_equivalent_program() {
    let u = vars(&["a", "b"]);
    let f = parse_formula("Y a S b").unwrap();
    let p = parse_program("y :- Y a.\nq1, q2 :- S(y, b).").unwrap();
    let (c, _) = program_to_cascade(&p).unwrap();
    let (p2, wiring) = automaton_to_program(&c.flatten().unwrap()).unwrap();
    let out = wiring.outputs[0].clone();
    // the flattened automaton outputs the last component, so q2 is its low bit
    let accept = out.last().unwrap().clone();
    let left = Recognizer::formula(f, u.clone()).unwrap();
    let right = Recognizer::program(p2, accept, u).unwrap();
    assert!(bounded_equiv(&left, &right, 5).unwrap().is_equal());
}
