//! The verification suite: every checkable claim, run in one ordered
//! pass with machine-readable reports.
//!
//! Each check pins its own size bound (3 for the five-quantifier
//! equivalences, 4 where the claim names size 4); a global override
//! rescales all of them. Three documented faults can be injected to
//! demonstrate that the suite actually discriminates: a flipped
//! quantifier in AC**, a dropped conjunct in the matrix B, and a wrong
//! patch branch in the choice-set construction.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog;
use crate::formula::Formula;
use crate::gen::{self, GenConfig};
use crate::hf::{self, HfSet, PatchStrategy};
use crate::model::{
    check_valid, evaluate, Assignment, FreeVarPolicy, ModelWitness, Verdict,
};
use crate::parser::parse;
use crate::printer::print;
use crate::schema;
use crate::transforms::{self, TraceVerdict};

/// Documented injectable faults.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Fault {
    /// The second quantifier of AC** (∃y) becomes ∀y.
    FlipQuantifierAcStarStar,
    /// The uniqueness conjunct of the matrix B is dropped inside AC**.
    DropConjunctB,
    /// The choice-set construction always pairs with ∅, ignoring the
    /// emptiness case split.
    WrongPatchBranch,
}

impl Fault {
    pub const ALL: [Fault; 3] = [
        Fault::FlipQuantifierAcStarStar,
        Fault::DropConjunctB,
        Fault::WrongPatchBranch,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Fault::FlipQuantifierAcStarStar => "ac**-flip-quantifier",
            Fault::DropConjunctB => "b-drop-conjunct",
            Fault::WrongPatchBranch => "choice-wrong-patch",
        }
    }

    pub fn from_id(s: &str) -> Option<Fault> {
        Fault::ALL.into_iter().find(|f| f.id() == s)
    }
}

#[derive(Clone, Debug)]
pub struct SuiteParams {
    /// Overrides every check's pinned size bound when set.
    pub nmax: Option<usize>,
    /// Universe stage for the hereditarily-finite sweeps and the bridge.
    pub rank: usize,
    /// Seed for the randomized round-trip battery.
    pub seed: u64,
    /// Number of random formulas in the round-trip battery.
    pub roundtrip_count: usize,
    pub fault: Option<Fault>,
    /// Wall-clock budget. Checks that would start after it is spent are
    /// reported as failed `not run` entries, flagging the report as
    /// incomplete rather than silently shortening it.
    pub budget: Option<std::time::Duration>,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            nmax: None,
            rank: 4,
            seed: gen::DEFAULT_SEED,
            roundtrip_count: 10_000,
            fault: None,
            budget: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("nmax must be at least 2")]
    BadNmax,
    #[error("rank must be 3 or 4 (the bridge needs a 2^|V_rank| domain)")]
    BadRank,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// What a failing check leaves behind. Model witnesses re-evaluate to
/// false under the reference evaluator; set-theoretic witnesses name
/// the failing set; textual witnesses carry re-checkable claims.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Witness {
    TraceStep {
        step: usize,
        rule: String,
        counterexample: ModelWitness,
    },
    Model(ModelWitness),
    HfCase {
        x_code: u64,
        x: String,
        detail: String,
    },
    Text {
        detail: String,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub citation: String,
    pub params: serde_json::Value,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub millis: u128,
}

pub fn all_passed(reports: &[CheckReport]) -> bool {
    reports.iter().all(|r| r.status == Status::Pass)
}

fn verdict_to_outcome(v: Verdict) -> Result<(), Witness> {
    match v {
        Verdict::ValidUpTo(_) => Ok(()),
        Verdict::Counterexample(cex) => Err(Witness::Model(cex.to_witness())),
    }
}

/// The AC** the suite actually checks: the catalog sentence, or a
/// deliberately corrupted variant in fault mode.
fn suite_ac_star_star(fault: Option<Fault>) -> Formula {
    let base = catalog::get("AC**").expect("catalog").formula.clone();
    match fault {
        Some(Fault::FlipQuantifierAcStarStar) => flip_nth_quantifier(&base, 1),
        Some(Fault::DropConjunctB) => {
            replace_equal(&base, &catalog::thm41_b(), &weakened_b())
        }
        _ => base,
    }
}

/// B with the uniqueness conjunct dropped.
fn weakened_b() -> Formula {
    Formula::member("z", "x").implies(
        Formula::member("b", "z")
            .implies(Formula::member("a", "z").and(Formula::member("a", "y"))),
    )
}

fn flip_nth_quantifier(f: &Formula, target: usize) -> Formula {
    fn go(f: &Formula, counter: &mut usize, target: usize) -> Formula {
        match f {
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let index = *counter;
                *counter += 1;
                let body = go(b, counter, target);
                let flip = index == target;
                match (f, flip) {
                    (Formula::Forall(..), false) => Formula::forall(v.clone(), body),
                    (Formula::Forall(..), true) => Formula::exists(v.clone(), body),
                    (_, false) => Formula::exists(v.clone(), body),
                    (_, true) => Formula::forall(v.clone(), body),
                }
            }
            Formula::Not(g) => go(g, counter, target).not(),
            Formula::And(l, r) => go(l, counter, target).and(go(r, counter, target)),
            Formula::Or(l, r) => go(l, counter, target).or(go(r, counter, target)),
            Formula::Implies(l, r) => {
                go(l, counter, target).implies(go(r, counter, target))
            }
            Formula::Iff(l, r) => go(l, counter, target).iff(go(r, counter, target)),
            atom => atom.clone(),
        }
    }
    go(f, &mut 0, target)
}

fn replace_equal(f: &Formula, old: &Formula, new: &Formula) -> Formula {
    if f == old {
        return new.clone();
    }
    match f {
        Formula::Not(g) => replace_equal(g, old, new).not(),
        Formula::And(l, r) => replace_equal(l, old, new).and(replace_equal(r, old, new)),
        Formula::Or(l, r) => replace_equal(l, old, new).or(replace_equal(r, old, new)),
        Formula::Implies(l, r) => {
            replace_equal(l, old, new).implies(replace_equal(r, old, new))
        }
        Formula::Iff(l, r) => replace_equal(l, old, new).iff(replace_equal(r, old, new)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), replace_equal(b, old, new)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), replace_equal(b, old, new)),
        atom => atom.clone(),
    }
}

struct Runner {
    reports: Vec<CheckReport>,
    started: Instant,
    budget: Option<std::time::Duration>,
}

impl Runner {
    fn run(
        &mut self,
        check: &str,
        citation: &str,
        params: serde_json::Value,
        body: impl FnOnce() -> Result<(), Witness>,
    ) {
        let over_budget = self
            .budget
            .is_some_and(|budget| self.started.elapsed() >= budget);
        let start = Instant::now();
        let outcome = if over_budget {
            Err(Witness::Text {
                detail: "not run: time budget exhausted; report is incomplete".into(),
            })
        } else {
            body()
        };
        self.reports.push(CheckReport {
            check: check.to_owned(),
            citation: citation.to_owned(),
            params,
            status: if outcome.is_ok() {
                Status::Pass
            } else {
                Status::Fail
            },
            witness: outcome.err(),
            millis: start.elapsed().as_millis(),
        });
    }
}

fn expect_eq<T: PartialEq + std::fmt::Display>(what: &str, got: T, want: T) -> Result<(), Witness> {
    if got == want {
        Ok(())
    } else {
        Err(Witness::Text {
            detail: format!("{what}: expected {want}, got {got}"),
        })
    }
}

/// Runs the whole suite and returns one report per check, in a fixed
/// order. Reruns with identical parameters produce identical reports
/// except for the wall-time fields.
pub fn verify_paper(params: &SuiteParams) -> Result<Vec<CheckReport>, SuiteError> {
    if params.nmax.is_some_and(|n| n < 2) {
        return Err(SuiteError::BadNmax);
    }
    if !(3..=4).contains(&params.rank) {
        return Err(SuiteError::BadRank);
    }
    let fault = params.fault;
    let bound = |pinned: usize| params.nmax.unwrap_or(pinned);
    let nj = |n: usize| serde_json::json!({ "nmax": n });
    let mut r = Runner {
        reports: Vec::new(),
        started: Instant::now(),
        budget: params.budget,
    };

    let ac_ss = suite_ac_star_star(fault);
    let ac_star = catalog::get("AC*").expect("catalog").formula.clone();
    let acbar_ss = catalog::get("ACbar**").expect("catalog").formula.clone();

    // Quantifier economy.
    r.run(
        "count-quantifiers-ac**",
        "AC** states choice with five quantifiers",
        serde_json::json!({}),
        || expect_eq("quantifier count of AC**", ac_ss.quantifier_count(), 5),
    );
    r.run(
        "count-quantifiers-acbar**",
        "Remark 4.3: the shortened sentence also uses five quantifiers",
        serde_json::json!({}),
        || expect_eq("quantifier count of AC̄**", acbar_ss.quantifier_count(), 5),
    );
    r.run(
        "count-quantifiers-c3",
        "Cor 2.3: the choice-set predicate needs only three quantifiers",
        serde_json::json!({}),
        || {
            expect_eq(
                "quantifier count of C3",
                catalog::get("C3").unwrap().formula.quantifier_count(),
                3,
            )
        },
    );
    {
        let n = bound(3);
        r.run(
            "prefix-pattern-c3",
            "the choice-set predicate sits in the prenex class ∀∃∀",
            nj(n),
            || {
                let c3 = catalog::get("C3").unwrap().formula.clone();
                let (prenexed, trace) =
                    transforms::prenex(&c3).map_err(|e| Witness::Text {
                        detail: e.to_string(),
                    })?;
                let pattern = prenexed.prefix_pattern().map_err(|e| Witness::Text {
                    detail: e.to_string(),
                })?;
                expect_eq("prenex prefix of C3", pattern.as_str(), "∀∃∀")?;
                match trace.verify(n).map_err(|e| Witness::Text {
                    detail: e.to_string(),
                })? {
                    TraceVerdict::ValidUpTo(_) => Ok(()),
                    TraceVerdict::StepCounterexample {
                        step,
                        rule,
                        counterexample,
                    } => Err(Witness::TraceStep {
                        step,
                        rule: rule.as_str().to_owned(),
                        counterexample: counterexample.to_witness(),
                    }),
                }
            },
        );
    }

    // Symbol economy.
    r.run(
        "token-delta-remark43",
        "Remark 4.3: the barred sentence is shorter by 16 symbols",
        serde_json::json!({}),
        || {
            let long = catalog::token_count("AC**").expect("official rendering");
            let short = catalog::token_count("ACbar**").expect("official rendering");
            expect_eq("symbol count delta AC** − AC̄**", long as i64 - short as i64, 16)
        },
    );
    r.run(
        "atom-delta-remark43",
        "Remark 4.3: three atomic formulas drop out of B",
        serde_json::json!({}),
        || {
            fn atoms(f: &Formula) -> usize {
                let mut n = 0;
                f.walk(&mut |g| {
                    if g.is_atom() {
                        n += 1;
                    }
                });
                n
            }
            let b = atoms(&catalog::get("B").unwrap().formula);
            let bbar = atoms(&catalog::get("Bbar").unwrap().formula);
            expect_eq("atom counts (B, B̄)", format!("{b},{bbar}"), "9,6".to_owned())
        },
    );

    // Catalog integrity: programmatic formulas against official text.
    r.run(
        "catalog-integrity",
        "every official rendering parses to its stored formula with the declared free variables",
        serde_json::json!({ "entries": catalog::entries().len() }),
        || {
            for entry in catalog::entries() {
                let formula = if entry.name == "AC**" {
                    ac_ss.clone()
                } else {
                    entry.formula.clone()
                };
                let parsed = parse(entry.official).map_err(|e| Witness::Text {
                    detail: format!("{}: official rendering fails to parse: {e}", entry.name),
                })?;
                if parsed != formula {
                    return Err(Witness::Text {
                        detail: format!(
                            "{}: official rendering and stored formula disagree",
                            entry.name
                        ),
                    });
                }
                let declared: Vec<String> =
                    entry.free_vars.iter().map(|s| s.to_string()).collect();
                let computed: Vec<String> = formula
                    .free_vars()
                    .into_iter()
                    .map(|v| v.name().to_owned())
                    .collect();
                if declared != computed {
                    return Err(Witness::Text {
                        detail: format!("{}: free variables {computed:?} ≠ declared {declared:?}", entry.name),
                    });
                }
            }
            Ok(())
        },
    );

    // First-order validities.
    {
        let n = bound(4);
        r.run(
            "def21-equiv-forms",
            "Def 2.1: the unique-element and (∈,=) renderings of C agree",
            nj(n),
            || {
                verdict_to_outcome(
                    crate::model::check_equiv(
                        &catalog::get("C-unique").unwrap().formula,
                        &catalog::get("C").unwrap().formula,
                        n,
                    )
                    .expect("closed check"),
                )
            },
        );
    }
    {
        let n = bound(4);
        r.run(
            "lemma22-cor23",
            "Lemma 2.2 at the Cor 2.3 slots: premise → (A ↔ B)",
            nj(n),
            || {
                let (x, y, z) = schema::cor23_slots();
                let built = schema::build_lemma22(&x, &y, &z).expect("valid slots");
                verdict_to_outcome(
                    check_valid(&built.claim(), n, FreeVarPolicy::CloseUniversally)
                        .expect("check runs"),
                )
            },
        );
    }
    {
        let n = bound(4);
        r.run(
            "lemma33",
            "Lemma 3.3: the classical hypotheses imply AC_h*",
            nj(n),
            || {
                let sentence = Formula::forall(
                    "x",
                    catalog::ach1_body()
                        .and(catalog::ach2_body())
                        .implies(catalog::ach_star_body()),
                );
                verdict_to_outcome(
                    check_valid(&sentence, n, FreeVarPolicy::Reject).expect("sentence"),
                )
            },
        );
    }
    {
        let n = bound(3);
        r.run(
            "thm34-acstar-implies-ac",
            "Thm 3.4: AC* implies AC in first-order logic alone",
            nj(n),
            || {
                let sentence = ac_star
                    .clone()
                    .implies(catalog::get("AC").unwrap().formula.clone());
                verdict_to_outcome(
                    check_valid(&sentence, n, FreeVarPolicy::Reject).expect("sentence"),
                )
            },
        );
    }
    {
        let n = bound(3);
        r.run(
            "thm41-point3",
            "Thm 4.1 point 3: the guarded blocks of AC** are mutually exclusive",
            nj(n),
            || {
                let a_block = Formula::member("y", "x").and(catalog::thm41_a());
                let b_block = Formula::not_member("y", "x").and(catalog::thm41_b());
                let sentence = a_block.and(b_block).not();
                verdict_to_outcome(
                    check_valid(&sentence, n, FreeVarPolicy::CloseUniversally)
                        .expect("check runs"),
                )
            },
        );
    }
    for chain in ["thm4.1-step1", "thm4.1-step2"] {
        let entries = catalog::list_chain(chain).expect("known chain");
        for (i, pair) in entries.windows(2).enumerate() {
            let n = bound(3);
            let check = format!("{chain}-adjacent-{}", i + 1);
            let citation = format!(
                "Thm 4.1: {} is equivalent to {}",
                pair[0].name, pair[1].name
            );
            r.run(&check, &citation, nj(n), || {
                verdict_to_outcome(
                    crate::model::check_equiv(&pair[0].formula, &pair[1].formula, n)
                        .expect("check runs"),
                )
            });
        }
    }
    {
        let n = bound(3);
        r.run(
            "thm41-equiv-acstar-acstarstar",
            "Thm 4.1: AC** is equivalent to AC*",
            nj(n),
            || {
                verdict_to_outcome(
                    crate::model::check_equiv(&ac_star, &ac_ss, n).expect("check runs"),
                )
            },
        );
    }
    {
        let n = bound(3);
        r.run(
            "thm41-pipeline",
            "Thm 4.1 proof: the recorded rewrite pipeline carries AC* to AC** exactly",
            nj(n),
            || {
                let trace = transforms::thm41_pipeline().map_err(|e| Witness::Text {
                    detail: e.to_string(),
                })?;
                match trace.verify(n).map_err(|e| Witness::Text {
                    detail: e.to_string(),
                })? {
                    TraceVerdict::ValidUpTo(_) => {}
                    TraceVerdict::StepCounterexample {
                        step,
                        rule,
                        counterexample,
                    } => {
                        return Err(Witness::TraceStep {
                            step,
                            rule: rule.as_str().to_owned(),
                            counterexample: counterexample.to_witness(),
                        })
                    }
                }
                let end = trace.final_formula().expect("nonempty trace");
                if end != &ac_ss {
                    return Err(Witness::Text {
                        detail: format!(
                            "pipeline endpoint `{}` is not the catalog sentence `{}`",
                            print(end),
                            print(&ac_ss)
                        ),
                    });
                }
                Ok(())
            },
        );
    }
    {
        let n = bound(3);
        r.run(
            "remark43-equiv-acstar-acbarstar",
            "Remark 4.3: AC* is equivalent to AC̄*",
            nj(n),
            || {
                verdict_to_outcome(
                    crate::model::check_equiv(
                        &ac_star,
                        &catalog::get("ACbar*").unwrap().formula,
                        n,
                    )
                    .expect("check runs"),
                )
            },
        );
    }
    {
        let n = bound(3);
        r.run(
            "remark43-equiv-acstarstar-acbarstarstar",
            "Remark 4.3: AC** is equivalent to AC̄**",
            nj(n),
            || {
                verdict_to_outcome(
                    crate::model::check_equiv(&ac_ss, &acbar_ss, n).expect("check runs"),
                )
            },
        );
    }

    // Hereditarily finite sweeps: x over all subsets of V_rank.
    let universe: u64 = 1 << hf::v_stage_size(params.rank);
    let rj = serde_json::json!({ "rank": params.rank, "subsets": universe });
    let hf_fail = |x: u64, detail: String| Witness::HfCase {
        x_code: x,
        x: HfSet(x).to_string(),
        detail,
    };
    r.run(
        "hf-lemma35-prop1",
        "Lemma 3.5 property 1: z_x ⊆ z for z ∈ x",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                for z in x.elements() {
                    if !hf::phi(z, x).is_subset(z) {
                        return Err(hf_fail(x.0, format!("phi({z}, x) ⊄ {z}")));
                    }
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-lemma35-prop2",
        "Lemma 3.5 property 2: z_x misses every other element of x",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                for z in x.elements() {
                    let zx = hf::phi(z, x);
                    for z2 in x.elements().filter(|w| *w != z) {
                        if !zx.intersect(z2).is_empty() {
                            return Err(hf_fail(
                                x.0,
                                format!("phi({z}, x) meets {z2}"),
                            ));
                        }
                    }
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-lemma35-prop3",
        "Lemma 3.5 property 3: images of distinct elements are disjoint",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                let images: Vec<HfSet> = x.elements().map(|z| hf::phi(z, x)).collect();
                for (i, zx) in images.iter().enumerate() {
                    for zx2 in &images[i + 1..] {
                        if !zx.intersect(*zx2).is_empty() {
                            return Err(hf_fail(x.0, "images overlap".into()));
                        }
                    }
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-lemma35-prop4-cor36",
        "Lemma 3.5 property 4 with Cor 3.6: AC_h*(x) holds iff every image is nonempty",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                let lhs = hf::sat_ach_star(x);
                let rhs = hf::sat_ach1(hf::star(x).expect("codes fit"));
                if lhs != rhs {
                    return Err(hf_fail(
                        x.0,
                        format!("AC_h*: {lhs}, AC_h,1(x*): {rhs}"),
                    ));
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-cor36-ach2",
        "Cor 3.6: the image family is always pairwise disjoint",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                if !hf::sat_ach2(hf::star(x).expect("codes fit")) {
                    return Err(hf_fail(x.0, "AC_h,2(x*) fails".into()));
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-thm37-identity-yprime",
        "Thm 3.7: y′ as separated equals y ∩ ∪x*",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                if !hf::sat_ach_star(x) {
                    continue;
                }
                let x_star = hf::star(x).expect("codes fit");
                let y = hf::least_choice_set(x_star);
                let by_definition = HfSet::from_elements(
                    y.elements()
                        .filter(|a| x.elements().any(|z| hf::phi(z, x).contains(*a))),
                )
                .expect("codes fit");
                let by_intersection = y.intersect(x_star.big_union());
                if by_definition != by_intersection {
                    return Err(hf_fail(
                        x.0,
                        format!("{by_definition} ≠ {by_intersection}"),
                    ));
                }
            }
            Ok(())
        },
    );
    r.run(
        "hf-thm37-identity-zx",
        "Thm 3.7: z_x equals z ∩ ∪x* for z ∈ x",
        rj.clone(),
        || {
            for x in (0..universe).map(HfSet) {
                if !hf::sat_ach_star(x) {
                    continue;
                }
                let big = hf::star(x).expect("codes fit").big_union();
                for z in x.elements() {
                    if hf::phi(z, x) != z.intersect(big) {
                        return Err(hf_fail(x.0, format!("z = {z}")));
                    }
                }
            }
            Ok(())
        },
    );
    {
        let strategy = if fault == Some(Fault::WrongPatchBranch) {
            PatchStrategy::AlwaysPairEmpty
        } else {
            PatchStrategy::ProofExact
        };
        r.run(
            "hf-thm37-choice-construction",
            "Thm 3.7: the construction yields a choice-set outside x whenever AC_h*(x)",
            rj.clone(),
            || {
                for x in (0..universe).map(HfSet) {
                    if !hf::sat_ach_star(x) {
                        continue;
                    }
                    if let Err(e) = hf::construct_choice_set_with(x, strategy) {
                        return Err(hf_fail(x.0, e.to_string()));
                    }
                }
                Ok(())
            },
        );
    }
    r.run(
        "hf-def31-remark",
        "Def 3.1 remark: choice-sets only see the nonempty elements",
        serde_json::json!({ "rank": 3, "pairs": 256 }),
        || {
            let stage = 1u64 << hf::v_stage_size(3);
            for x in (0..stage).map(HfSet) {
                for y in (0..stage).map(HfSet) {
                    if hf::is_choice_set(y, x)
                        != hf::is_choice_set(y, x.nonempty_elements())
                    {
                        return Err(hf_fail(x.0, format!("y = {y}")));
                    }
                }
            }
            Ok(())
        },
    );

    // Bridge: evaluate catalog formulas over the true-membership structure.
    {
        let bridge_rank = params.rank.min(hf::BRIDGE_MAX_RANK);
        let bj = serde_json::json!({ "rank": bridge_rank });
        let (structure, sets) = hf::structure_of(bridge_rank).expect("rank in range");
        let c = catalog::get("C").expect("catalog").formula.clone();
        let size = structure.size();
        r.run(
            "bridge-choice-set-agreement",
            "Def 2.1: Tarskian truth of C over true membership matches the set-level predicate",
            serde_json::json!({ "rank": bridge_rank, "pairs": size * size }),
            || {
                for i in 0..size {
                    for j in 0..size {
                        let asg = Assignment::new().bind("x", i).bind("y", j);
                        let semantic = evaluate(&structure, &asg, &c).expect("closed");
                        let direct = hf::is_choice_set(sets[j], sets[i]);
                        if semantic != direct {
                            return Err(Witness::HfCase {
                                x_code: sets[i].0,
                                x: sets[i].to_string(),
                                detail: format!(
                                    "y = {}: evaluator says {semantic}, sets say {direct}",
                                    sets[j]
                                ),
                            });
                        }
                    }
                }
                Ok(())
            },
        );
        for (name, formula) in [
            ("bridge-ac-true", catalog::get("AC").unwrap().formula.clone()),
            ("bridge-acstar-true", ac_star.clone()),
            ("bridge-acstarstar-true", ac_ss.clone()),
        ] {
            let structure = structure.clone();
            let citation = "true membership over a finite stage satisfies the choice sentences";
            r.run(name, citation, bj.clone(), move || {
                match evaluate(&structure, &Assignment::new(), &formula) {
                    Ok(true) => Ok(()),
                    Ok(false) => Err(Witness::Text {
                        detail: "sentence evaluates to false on the membership structure".into(),
                    }),
                    Err(e) => Err(Witness::Text {
                        detail: e.to_string(),
                    }),
                }
            });
        }
    }

    // Parser round-trip battery.
    r.run(
        "roundtrip-random",
        "printing then parsing is the identity on formula trees",
        serde_json::json!({ "count": params.roundtrip_count, "seed": params.seed }),
        || {
            let cfg = GenConfig::default();
            let mut rng = gen::rng(params.seed);
            for i in 0..params.roundtrip_count {
                let f = gen::random_formula(&mut rng, &cfg);
                let text = print(&f);
                match parse(&text) {
                    Ok(g) if g == f => {}
                    Ok(_) => {
                        return Err(Witness::Text {
                            detail: format!("roundtrip #{i} changed the tree: `{text}`"),
                        })
                    }
                    Err(e) => {
                        return Err(Witness::Text {
                            detail: format!("roundtrip #{i} failed to re-parse `{text}`: {e}"),
                        })
                    }
                }
            }
            Ok(())
        },
    );
    r.run(
        "roundtrip-catalog",
        "catalog formulas survive print-then-parse and official renderings re-parse",
        serde_json::json!({ "entries": catalog::entries().len() }),
        || {
            for entry in catalog::entries() {
                let text = print(&entry.formula);
                match parse(&text) {
                    Ok(g) if g == entry.formula => {}
                    _ => {
                        return Err(Witness::Text {
                            detail: format!("{}: print-then-parse changed the tree", entry.name),
                        })
                    }
                }
                match parse(entry.official) {
                    Ok(g) if g == entry.formula => {}
                    _ => {
                        return Err(Witness::Text {
                            detail: format!(
                                "{}: official rendering does not re-parse to the formula",
                                entry.name
                            ),
                        })
                    }
                }
            }
            Ok(())
        },
    );

    Ok(r.reports)
}
