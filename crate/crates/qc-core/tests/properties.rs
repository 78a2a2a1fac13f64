//! Seeded metamorphic and invariance properties tying the evaluator,
//! the renamer, and the printer together. Failures reproduce from the
//! fixed seeds.

use std::collections::BTreeMap;

use qc_core::formula::{Formula, Var};
use qc_core::gen::{random_formula, rng, GenConfig};
use qc_core::model::{
    check_valid, check_valid_sequential, evaluate, structures, Assignment, FinStructure,
    FreeVarPolicy,
};
use qc_core::parser::parse;
use qc_core::printer::print;
use rand::seq::SliceRandom;
use rand::Rng;

fn random_structure(r: &mut impl Rng, n: usize) -> FinStructure {
    FinStructure::from_index(n, r.gen_range(0..(1u64 << (n * n))))
}

fn full_assignment(r: &mut impl Rng, f: &Formula, n: usize) -> Assignment {
    f.free_vars()
        .into_iter()
        .map(|v| (v, r.gen_range(0..n)))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Independent free-variable computation: subtractive sets instead of
/// the library's bound-stack walk.
fn free_vars_oracle(f: &Formula) -> std::collections::BTreeSet<Var> {
    use std::collections::BTreeSet;
    match f {
        Formula::Member(v, w) | Formula::Equal(v, w) => {
            BTreeSet::from([v.clone(), w.clone()])
        }
        Formula::Not(g) => free_vars_oracle(g),
        Formula::And(l, r)
        | Formula::Or(l, r)
        | Formula::Implies(l, r)
        | Formula::Iff(l, r) => {
            let mut s = free_vars_oracle(l);
            s.extend(free_vars_oracle(r));
            s
        }
        Formula::Forall(v, b) | Formula::Exists(v, b) => {
            let mut s = free_vars_oracle(b);
            s.remove(v);
            s
        }
    }
}

#[test]
fn free_variables_agree_with_the_subtractive_oracle() {
    // The matrix B has exactly the five variables free.
    let b = &qc_core::catalog::get("B").unwrap().formula;
    let expected: Vec<&str> = vec!["a", "b", "x", "y", "z"];
    let oracle: Vec<String> = free_vars_oracle(b).into_iter().map(|v| v.0).collect();
    assert_eq!(oracle, expected);
    assert_eq!(b.free_vars(), free_vars_oracle(b));
    // And the two computations agree everywhere.
    let cfg = GenConfig::default();
    let mut r = rng(139);
    for _ in 0..500 {
        let f = random_formula(&mut r, &cfg);
        assert_eq!(f.free_vars(), free_vars_oracle(&f), "{f:?}");
    }
    for entry in qc_core::catalog::entries() {
        assert_eq!(entry.formula.free_vars(), free_vars_oracle(&entry.formula));
    }
}

#[test]
fn evaluation_respects_the_connectives() {
    let cfg = GenConfig {
        max_depth: 4,
        ..GenConfig::default()
    };
    let mut r = rng(101);
    for _ in 0..300 {
        let f = random_formula(&mut r, &cfg);
        let g = random_formula(&mut r, &cfg);
        let n = r.gen_range(1..=3);
        let s = random_structure(&mut r, n);
        let combined = f.clone().and(g.clone());
        let asg = full_assignment(&mut r, &combined, n);
        let fv = evaluate(&s, &asg, &f).unwrap();
        let gv = evaluate(&s, &asg, &g).unwrap();
        assert_eq!(evaluate(&s, &asg, &f.clone().not()).unwrap(), !fv);
        assert_eq!(evaluate(&s, &asg, &combined).unwrap(), fv && gv);
        assert_eq!(
            evaluate(&s, &asg, &f.clone().or(g.clone())).unwrap(),
            fv || gv
        );
        assert_eq!(
            evaluate(&s, &asg, &f.clone().implies(g.clone())).unwrap(),
            !fv || gv
        );
        assert_eq!(
            evaluate(&s, &asg, &f.clone().iff(g.clone())).unwrap(),
            fv == gv
        );
    }
}

#[test]
fn quantifiers_are_finite_conjunction_and_disjunction() {
    let cfg = GenConfig {
        max_depth: 3,
        ..GenConfig::default()
    };
    let mut r = rng(103);
    for _ in 0..200 {
        let f = random_formula(&mut r, &cfg);
        let n = r.gen_range(1..=3);
        let s = random_structure(&mut r, n);
        let v = Var::from("x");
        let closed = Formula::forall("x", f.clone());
        let asg = full_assignment(&mut r, &closed, n);
        let pointwise = |d: usize| {
            let mut point = asg.clone();
            point.0.insert(v.clone(), d);
            evaluate(&s, &point, &f).unwrap()
        };
        let all = (0..n).all(pointwise);
        let any = (0..n).any(pointwise);
        assert_eq!(evaluate(&s, &asg, &closed).unwrap(), all);
        assert_eq!(
            evaluate(&s, &asg, &Formula::exists("x", f.clone())).unwrap(),
            any
        );
    }
}

#[test]
fn evaluation_is_invariant_under_domain_permutation() {
    let cfg = GenConfig {
        max_depth: 4,
        ..GenConfig::default()
    };
    let mut r = rng(107);
    for _ in 0..200 {
        let f = random_formula(&mut r, &cfg);
        let n = r.gen_range(2..=3);
        let s = random_structure(&mut r, n);
        let asg = full_assignment(&mut r, &f, n);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let permuted_structure = s.permute(&perm);
        let permuted_asg: Assignment = asg
            .0
            .iter()
            .map(|(v, d)| (v.clone(), perm[*d]))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        assert_eq!(
            evaluate(&s, &asg, &f).unwrap(),
            evaluate(&permuted_structure, &permuted_asg, &f).unwrap(),
            "permutation {perm:?} changed the verdict of {f:?}"
        );
    }
}

#[test]
fn bijective_renaming_preserves_evaluation_and_free_variables() {
    let cfg = GenConfig::default();
    let mut r = rng(109);
    for _ in 0..200 {
        let f = random_formula(&mut r, &cfg);
        // A random permutation of the variable pool.
        let mut targets = cfg.variables.clone();
        targets.shuffle(&mut r);
        let map: BTreeMap<Var, Var> = cfg.variables.iter().cloned().zip(targets).collect();
        let renamed = f.rename(&map).unwrap();

        // Free variables map through the bijection.
        let expected_free: Vec<Var> =
            f.free_vars().into_iter().map(|v| map[&v].clone()).collect();
        let mut expected_sorted = expected_free.clone();
        expected_sorted.sort();
        assert_eq!(
            renamed.free_vars().into_iter().collect::<Vec<_>>(),
            expected_sorted
        );

        // Quantifier count is untouched.
        assert_eq!(renamed.quantifier_count(), f.quantifier_count());

        // Evaluation agrees under the transported assignment.
        let n = r.gen_range(1..=3);
        let s = random_structure(&mut r, n);
        let asg = full_assignment(&mut r, &f, n);
        let transported: Assignment = asg
            .0
            .iter()
            .map(|(v, d)| (map[v].clone(), *d))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        assert_eq!(
            evaluate(&s, &asg, &f).unwrap(),
            evaluate(&s, &transported, &renamed).unwrap(),
            "renaming changed the verdict of {f:?}"
        );
    }
}

#[test]
fn alpha_equivalent_formulas_are_equivalent_up_to_size_three() {
    let cfg = GenConfig::default();
    let mut r = rng(113);
    for _ in 0..30 {
        let f = random_formula(&mut r, &cfg);
        // Rename only bound occurrences: map every pool variable to a
        // primed partner, then map free variables back.
        let map: BTreeMap<Var, Var> = cfg
            .variables
            .iter()
            .map(|v| (v.clone(), Var(format!("{}fresh", v.0))))
            .filter(|(v, _)| !f.free_vars().contains(v))
            .collect();
        let renamed = f.rename(&map).unwrap();
        let equal = qc_core::model::check_equiv(&f, &renamed, 3).unwrap();
        assert!(equal.is_valid(), "α-variant of {f:?} not equivalent");
    }
}

#[test]
fn parallel_and_sequential_checks_agree_on_random_formulas() {
    let cfg = GenConfig {
        max_depth: 4,
        ..GenConfig::default()
    };
    let mut r = rng(127);
    for _ in 0..60 {
        let f = random_formula(&mut r, &cfg);
        let par = check_valid(&f, 2, FreeVarPolicy::CloseUniversally).unwrap();
        let seq = check_valid_sequential(&f, 2, FreeVarPolicy::CloseUniversally).unwrap();
        assert_eq!(par, seq, "verdicts diverge on {f:?}");
    }
}

#[test]
fn print_parse_is_identity_and_idempotent() {
    let cfg = GenConfig::default();
    let mut r = rng(131);
    for _ in 0..2_000 {
        let f = random_formula(&mut r, &cfg);
        let once = print(&f);
        let reparsed = parse(&once).unwrap_or_else(|e| panic!("`{once}`: {e}"));
        assert_eq!(reparsed, f, "round trip changed `{once}`");
        assert_eq!(print(&reparsed), once, "printing is not idempotent");
    }
}

#[test]
fn short_circuiting_never_changes_the_verdict() {
    // The compiled checker short-circuits; compare against the naive
    // evaluator across whole small size classes.
    let cfg = GenConfig {
        max_depth: 3,
        ..GenConfig::default()
    };
    let mut r = rng(137);
    for _ in 0..40 {
        let f = random_formula(&mut r, &cfg);
        let sentence = f
            .free_vars()
            .into_iter()
            .fold(f.clone(), |acc, v| Formula::forall(v, acc));
        let exhaustive = structures(2).unwrap().all(|s| {
            evaluate(&s, &Assignment::new(), &sentence).unwrap()
        });
        let verdict = check_valid(&sentence, 2, FreeVarPolicy::Reject).unwrap();
        assert_eq!(
            verdict.is_valid(),
            // The checker also scans size 1.
            exhaustive
                && structures(1)
                    .unwrap()
                    .all(|s| evaluate(&s, &Assignment::new(), &sentence).unwrap()),
            "checker disagrees with naive evaluation on {sentence:?}"
        );
    }
}
