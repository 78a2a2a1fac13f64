//! Named catalog of the formulas under study.
//!
//! Each entry pairs a programmatically built AST with its official text
//! rendering; the two must parse to the same tree (checked in tests and
//! by the verification suite). Official renderings keep the source
//! parenthesization so that symbol counts are pinned; display sugar is
//! expanded in the documented way: bounded quantifiers `∀v∈t(…)` /
//! `∃v∈t(…)` become `∀v(v∈t → …)` / `∃v(v∈t ∧ …)`, `z ≠ ∅` becomes
//! `∃b(b ∈ z)`, unique existence `∃!a∈y ψ` becomes
//! `∃a(a∈y ∧ ψ ∧ ∀b(b∈y ∧ ψ(b) → b = a))`, and `∉`/`≠` are negated
//! atoms.
//!
//! Names are stable identifiers for the command line; a few Unicode
//! aliases (overline spellings) are accepted on lookup.

use once_cell::sync::Lazy;
use thiserror::Error;

use crate::formula::Formula;
use crate::parser;

/// One catalog entry. `formula` and `official` encode the same tree.
#[derive(Debug)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub aliases: &'static [&'static str],
    pub formula: Formula,
    /// Official rendering; parses to `formula` exactly.
    pub official: &'static str,
    /// Declared free variables, sorted by name.
    pub free_vars: &'static [&'static str],
    /// What the formula is, in one line.
    pub citation: &'static str,
    /// Recorded discrepancies against the source display, if any.
    pub note: Option<&'static str>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown catalog name `{name}`; valid names: {valid}")]
    UnknownName { name: String, valid: String },
    #[error("unknown chain `{name}`; valid chains: thm4.1-step1, thm4.1-step2")]
    UnknownChain { name: String },
    #[error("token counts need a catalog name or a verbatim official rendering; got neither")]
    UnknownRendering,
}

fn mem(a: &str, b: &str) -> Formula {
    Formula::member(a, b)
}

fn eq(a: &str, b: &str) -> Formula {
    Formula::equal(a, b)
}

fn neq(a: &str, b: &str) -> Formula {
    Formula::not_equal(a, b)
}

fn notmem(a: &str, b: &str) -> Formula {
    Formula::not_member(a, b)
}

fn forall(s: &str, f: Formula) -> Formula {
    Formula::forall(s, f)
}

fn exists(s: &str, f: Formula) -> Formula {
    Formula::exists(s, f)
}

/// `C(y,x)`: the (∈,=)-form of "y is a choice-set for x".
pub fn c_body() -> Formula {
    forall(
        "z",
        mem("z", "x").implies(
            exists("b", mem("b", "z")).implies(exists(
                "a",
                mem("a", "z").and(mem("a", "y").and(forall(
                    "b",
                    mem("b", "z").and(mem("b", "y")).implies(eq("b", "a")),
                ))),
            )),
        ),
    )
}

/// `C(y,x)` in the unique-element form (`∃!` expanded).
fn c_unique_body() -> Formula {
    forall(
        "z",
        mem("z", "x").implies(
            exists("b", mem("b", "z")).implies(exists(
                "a",
                mem("a", "y").and(mem("a", "z").and(forall(
                    "b",
                    mem("b", "y").and(mem("b", "z")).implies(eq("b", "a")),
                ))),
            )),
        ),
    )
}

/// The quantifier-free matrix shared by B2.3, B, and the chains.
fn b23_matrix() -> Formula {
    let first = mem("b", "z").implies(mem("a", "z").and(mem("a", "y")));
    let second = mem("a", "z")
        .and(mem("a", "y"))
        .implies(mem("b", "z").and(mem("b", "y")).implies(eq("b", "a")));
    first.and(second)
}

/// Corollary 2.3's two-quantifier singleton-intersection form.
fn b23() -> Formula {
    exists("a", forall("b", b23_matrix()))
}

/// Corollary 2.3's A: "if z is non-empty, z ∩ y is a singleton".
fn a23() -> Formula {
    exists("b", mem("b", "z")).implies(exists(
        "a",
        mem("a", "z").and(mem("a", "y").and(forall(
            "b",
            mem("b", "z").and(mem("b", "y")).implies(eq("b", "a")),
        ))),
    ))
}

/// The three-quantifier choice-set formula `∀z(z ∈ x → B(x,y,z))`.
pub fn c3_body() -> Formula {
    forall("z", mem("z", "x").implies(b23()))
}

/// `AC_h,1(x)`: all elements of x are nonempty.
pub fn ach1_body() -> Formula {
    forall("z", mem("z", "x").implies(exists("a", mem("a", "z"))))
}

/// `AC_h,2(x)`: elements of x are pairwise disjoint.
pub fn ach2_body() -> Formula {
    forall(
        "z",
        mem("z", "x").implies(forall(
            "z'",
            mem("z'", "x").implies(
                neq("z", "z'").implies(forall("a", mem("a", "z").implies(notmem("a", "z'")))),
            ),
        )),
    )
}

/// `AC_h*(x)`: every element of x has a member in no other element of x.
pub fn ach_star_body() -> Formula {
    forall(
        "z",
        mem("z", "x").implies(exists(
            "a",
            mem("a", "z").and(forall(
                "z'",
                mem("z'", "x").implies(neq("z", "z'").implies(notmem("a", "z'"))),
            )),
        )),
    )
}

/// The axiom of choice in choice-set form.
fn ac() -> Formula {
    forall(
        "x",
        ach1_body().and(ach2_body()).implies(exists("y", c_body())),
    )
}

/// The strengthened variant: weaker hypothesis, conclusion `y ∉ x`.
fn ac_star() -> Formula {
    forall(
        "x",
        ach_star_body().implies(exists("y", notmem("y", "x").and(c_body()))),
    )
}

/// Matrix A of the five-quantifier sentence.
pub fn thm41_a() -> Formula {
    mem("z", "y").implies(mem("a", "x").and(neq("a", "y").and(mem("z", "a"))))
}

/// Matrix B of the five-quantifier sentence.
pub fn thm41_b() -> Formula {
    mem("z", "x").implies(b23_matrix())
}

/// The five-quantifier sentence AC**.
fn ac_star_star() -> Formula {
    forall(
        "x",
        exists(
            "y",
            forall(
                "z",
                exists(
                    "a",
                    forall(
                        "b",
                        mem("y", "x")
                            .and(thm41_a())
                            .or(notmem("y", "x").and(thm41_b())),
                    ),
                ),
            ),
        ),
    )
}

/// `C̄(y,x)`: singleton intersection demanded for every element of x.
fn cbar_body() -> Formula {
    forall(
        "z",
        mem("z", "x").implies(exists(
            "a",
            mem("a", "z").and(mem("a", "y").and(forall(
                "b",
                mem("b", "z").and(mem("b", "y")).implies(eq("b", "a")),
            ))),
        )),
    )
}

/// Shortened matrix B̄ of Remark 4.3.
fn bbar() -> Formula {
    mem("z", "x").implies(
        mem("a", "z")
            .and(mem("a", "y").and(mem("b", "z").and(mem("b", "y")).implies(eq("b", "a")))),
    )
}

fn acbar_star() -> Formula {
    forall(
        "x",
        ach_star_body().implies(exists("y", notmem("y", "x").and(cbar_body()))),
    )
}

fn acbar_star_star() -> Formula {
    forall(
        "x",
        exists(
            "y",
            forall(
                "z",
                exists(
                    "a",
                    forall(
                        "b",
                        mem("y", "x").and(thm41_a()).or(notmem("y", "x").and(bbar())),
                    ),
                ),
            ),
        ),
    )
}

/// The bounded-quantifier graph formula `φ(z, z_x)` of the separation
/// step: `z_x = {a ∈ z | a is in no other element of x}`.
fn phi_body() -> Formula {
    let no_other = |var: &str| {
        forall(
            "z*",
            mem("z*", "x").implies(neq("z", "z*").implies(notmem(var, "z*"))),
        )
    };
    let part1 = forall(
        "a",
        mem("a", "z").implies(no_other("a").implies(mem("a", "z_x"))),
    );
    let part2 = forall(
        "a",
        mem("a", "z_x").implies(mem("a", "z").and(no_other("a"))),
    );
    part1.and(part2)
}

// Chain formulas: the displayed intermediate steps of the two rewrite
// sequences that turn AC* into AC**.

fn step1_1() -> Formula {
    exists("y", notmem("y", "x").and(c_body()))
}

fn step1_2() -> Formula {
    exists("y", notmem("y", "x").and(c3_body()))
}

fn step1_3() -> Formula {
    exists(
        "y",
        notmem("y", "x").and(forall("z", exists("a", forall("b", thm41_b())))),
    )
}

fn step1_4() -> Formula {
    exists(
        "y",
        forall(
            "z",
            exists("a", forall("b", notmem("y", "x").and(thm41_b()))),
        ),
    )
}

fn step2_1() -> Formula {
    ach_star_body().not()
}

fn step2_2() -> Formula {
    exists(
        "z",
        mem("z", "x").and(forall(
            "a",
            mem("a", "z").implies(exists(
                "z'",
                mem("z'", "x").and(neq("z", "z'").and(mem("a", "z'"))),
            )),
        )),
    )
}

fn step2_3() -> Formula {
    exists(
        "z",
        mem("z", "x").and(forall(
            "a",
            exists(
                "z'",
                mem("a", "z")
                    .implies(mem("z'", "x").and(neq("z", "z'").and(mem("a", "z'")))),
            ),
        )),
    )
}

fn step2_4() -> Formula {
    exists(
        "z",
        forall(
            "a",
            exists(
                "z'",
                mem("z", "x").and(
                    mem("a", "z")
                        .implies(mem("z'", "x").and(neq("z", "z'").and(mem("a", "z'")))),
                ),
            ),
        ),
    )
}

fn step2_5() -> Formula {
    exists("y", forall("z", exists("a", mem("y", "x").and(thm41_a()))))
}

fn step2_6() -> Formula {
    exists(
        "y",
        forall(
            "z",
            exists("a", forall("b", mem("y", "x").and(thm41_a()))),
        ),
    )
}

const BRACKET_NOTE: &str =
    "source display carries unbalanced brackets; the catalog stores the well-formed reading";

static ENTRIES: Lazy<Vec<CatalogEntry>> = Lazy::new(|| {
    vec![
        CatalogEntry {
            name: "C",
            aliases: &[],
            formula: c_body(),
            official: "∀z(z ∈ x → ((∃b b ∈ z) → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a))))",
            free_vars: &["x", "y"],
            citation: "Def 2.1: choice-set predicate C(y,x), (∈,=) form",
            note: None,
        },
        CatalogEntry {
            name: "C-unique",
            aliases: &[],
            formula: c_unique_body(),
            official: "∀z(z ∈ x → ((∃b b ∈ z) → ∃a(a ∈ y ∧ a ∈ z ∧ ∀b(b ∈ y ∧ b ∈ z → b = a))))",
            free_vars: &["x", "y"],
            citation: "Def 2.1: choice-set predicate, unique-element form with ∃! expanded",
            note: Some(
                "z ≠ ∅ rendered as ∃b(b ∈ z); ∃!a ∈ y expanded with witness a and tester b",
            ),
        },
        CatalogEntry {
            name: "A2.3",
            aliases: &[],
            formula: a23(),
            official: "(∃b b ∈ z) → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a))",
            free_vars: &["y", "z"],
            citation: "Cor 2.3: form A, three-quantifier singleton intersection",
            note: None,
        },
        CatalogEntry {
            name: "B2.3",
            aliases: &[],
            formula: b23(),
            official: "∃a∀b[(b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))]",
            free_vars: &["y", "z"],
            citation: "Cor 2.3: form B, two-quantifier singleton intersection",
            note: None,
        },
        CatalogEntry {
            name: "C3",
            aliases: &[],
            formula: c3_body(),
            official: "∀z(z ∈ x → ∃a∀b[(b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))])",
            free_vars: &["x", "y"],
            citation: "Cor 2.3: C(y,x) with three quantifiers",
            note: None,
        },
        CatalogEntry {
            name: "ACh1",
            aliases: &[],
            formula: ach1_body(),
            official: "∀z(z ∈ x → ∃a a ∈ z)",
            free_vars: &["x"],
            citation: "Def 3.1: hypothesis AC_h,1(x), no empty elements",
            note: Some("z ≠ ∅ rendered as ∃a(a ∈ z)"),
        },
        CatalogEntry {
            name: "ACh2",
            aliases: &[],
            formula: ach2_body(),
            official: "∀z(z ∈ x → ∀z'(z' ∈ x → (z ≠ z' → ∀a(a ∈ z → a ∉ z'))))",
            free_vars: &["x"],
            citation: "Def 3.1: hypothesis AC_h,2(x), pairwise disjoint elements",
            note: Some("z ∩ z' = ∅ rendered as ∀a(a ∈ z → a ∉ z')"),
        },
        CatalogEntry {
            name: "AC",
            aliases: &[],
            formula: ac(),
            official: "∀x[(∀z(z ∈ x → ∃a a ∈ z)) ∧ (∀z(z ∈ x → ∀z'(z' ∈ x → (z ≠ z' → ∀a(a ∈ z → a ∉ z'))))) → ∃y∀z(z ∈ x → ((∃b b ∈ z) → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a))))]",
            free_vars: &[],
            citation: "Def 3.1: the axiom of choice in choice-set form",
            note: None,
        },
        CatalogEntry {
            name: "ACh*",
            aliases: &["ACh_star"],
            formula: ach_star_body(),
            official: "∀z(z ∈ x → ∃a(a ∈ z ∧ ∀z'(z' ∈ x → (z ≠ z' → a ∉ z'))))",
            free_vars: &["x"],
            citation: "Def 3.2: hypothesis AC_h*(x)",
            note: None,
        },
        CatalogEntry {
            name: "AC*",
            aliases: &["AC_star"],
            formula: ac_star(),
            official: "∀x((∀z(z ∈ x → ∃a(a ∈ z ∧ ∀z'(z' ∈ x → (z ≠ z' → a ∉ z'))))) → ∃y(y ∉ x ∧ ∀z(z ∈ x → ((∃b b ∈ z) → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a))))))",
            free_vars: &[],
            citation: "Def 3.2: strengthened choice statement AC*",
            note: None,
        },
        CatalogEntry {
            name: "A",
            aliases: &[],
            formula: thm41_a(),
            official: "z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a",
            free_vars: &["a", "x", "y", "z"],
            citation: "Thm 4.1: matrix A(x,y,z,a)",
            note: None,
        },
        CatalogEntry {
            name: "B",
            aliases: &[],
            formula: thm41_b(),
            official: "z ∈ x → (b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))",
            free_vars: &["a", "b", "x", "y", "z"],
            citation: "Thm 4.1: matrix B(x,y,z,a,b)",
            note: None,
        },
        CatalogEntry {
            name: "AC**",
            aliases: &["AC_star_star"],
            formula: ac_star_star(),
            official: "∀x∃y∀z∃a∀b[(y ∈ x ∧ (z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a)) ∨ (y ∉ x ∧ (z ∈ x → (b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))))]",
            free_vars: &[],
            citation: "Thm 4.1: the five-quantifier sentence AC**",
            note: None,
        },
        CatalogEntry {
            name: "Cbar",
            aliases: &["C̄"],
            formula: cbar_body(),
            official: "∀z(z ∈ x → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a)))",
            free_vars: &["x", "y"],
            citation: "Remark 4.3: C̄(y,x), singleton intersection for every element",
            note: Some(BRACKET_NOTE),
        },
        CatalogEntry {
            name: "Bbar",
            aliases: &["B̄"],
            formula: bbar(),
            official: "z ∈ x → a ∈ z ∧ a ∈ y ∧ (b ∈ z ∧ b ∈ y → b = a)",
            free_vars: &["a", "b", "x", "y", "z"],
            citation: "Remark 4.3: shortened matrix B̄(x,y,z,a,b)",
            note: None,
        },
        CatalogEntry {
            name: "ACbar*",
            aliases: &["AC̄*"],
            formula: acbar_star(),
            official: "∀x((∀z(z ∈ x → ∃a(a ∈ z ∧ ∀z'(z' ∈ x → (z ≠ z' → a ∉ z'))))) → ∃y(y ∉ x ∧ ∀z(z ∈ x → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a)))))",
            free_vars: &[],
            citation: "Remark 4.3: AC* with C replaced by C̄",
            note: None,
        },
        CatalogEntry {
            name: "ACbar**",
            aliases: &["AC̄**"],
            formula: acbar_star_star(),
            official: "∀x∃y∀z∃a∀b[(y ∈ x ∧ (z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a)) ∨ (y ∉ x ∧ (z ∈ x → a ∈ z ∧ a ∈ y ∧ (b ∈ z ∧ b ∈ y → b = a)))]",
            free_vars: &[],
            citation: "Remark 4.3: the shortened five-quantifier sentence AC̄**",
            note: None,
        },
        CatalogEntry {
            name: "phi",
            aliases: &["φ"],
            formula: phi_body(),
            official: "(∀a(a ∈ z → ((∀z*(z* ∈ x → (z ≠ z* → a ∉ z*))) → a ∈ z_x))) ∧ ∀a(a ∈ z_x → a ∈ z ∧ ∀z*(z* ∈ x → (z ≠ z* → a ∉ z*)))",
            free_vars: &["x", "z", "z_x"],
            citation: "Lemma 3.5: bounded-quantifier graph formula φ(z, z_x)",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step1.1",
            aliases: &[],
            formula: step1_1(),
            official: "∃y(y ∉ x ∧ ∀z(z ∈ x → ((∃b b ∈ z) → ∃a(a ∈ z ∧ a ∈ y ∧ ∀b(b ∈ z ∧ b ∈ y → b = a)))))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 1: the conclusion of AC*, ∃y(y ∉ x ∧ C(y,x))",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step1.2",
            aliases: &[],
            formula: step1_2(),
            official: "∃y(y ∉ x ∧ ∀z(z ∈ x → ∃a∀b[(b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))]))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 1: C(y,x) replaced by its two-quantifier form",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step1.3",
            aliases: &[],
            formula: step1_3(),
            official: "∃y(y ∉ x ∧ ∀z∃a∀b(z ∈ x → (b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 1: ∃a∀b hoisted past z ∈ x",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step1.4",
            aliases: &[],
            formula: step1_4(),
            official: "∃y∀z∃a∀b(y ∉ x ∧ (z ∈ x → (b ∈ z → a ∈ z ∧ a ∈ y) ∧ (a ∈ z ∧ a ∈ y → (b ∈ z ∧ b ∈ y → b = a))))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 1: ∀z∃a∀b hoisted past y ∉ x",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step2.1",
            aliases: &[],
            formula: step2_1(),
            official: "¬∀z[z ∈ x → ∃a(a ∈ z ∧ ∀z'[z' ∈ x → (z ≠ z' → a ∉ z')])]",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: ¬AC_h*(x) unfolded",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step2.2",
            aliases: &[],
            formula: step2_2(),
            official: "∃z[z ∈ x ∧ ∀a(a ∈ z → ∃z'[z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: negation carried through quantifiers and connectives",
            note: None,
        },
        CatalogEntry {
            name: "thm4.1-step2.3",
            aliases: &[],
            formula: step2_3(),
            official: "∃z[z ∈ x ∧ ∀a∃z'(a ∈ z → [z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: ∃z' hoisted past a ∈ z",
            note: Some(BRACKET_NOTE),
        },
        CatalogEntry {
            name: "thm4.1-step2.4",
            aliases: &[],
            formula: step2_4(),
            official: "∃z∀a∃z'[z ∈ x ∧ (a ∈ z → [z' ∈ x ∧ z ≠ z' ∧ a ∈ z'])]",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: ∀a∃z' hoisted past z ∈ x",
            note: Some(BRACKET_NOTE),
        },
        CatalogEntry {
            name: "thm4.1-step2.5",
            aliases: &[],
            formula: step2_5(),
            official: "∃y∀z∃a(y ∈ x ∧ (z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: variables z, a, z' renamed to y, z, a",
            note: Some(
                "the rename yields y ≠ a; the displayed matrix A writes a ≠ y, an equality flip",
            ),
        },
        CatalogEntry {
            name: "thm4.1-step2.6",
            aliases: &[],
            formula: step2_6(),
            official: "∃y∀z∃a∀b(y ∈ x ∧ (z ∈ y → a ∈ x ∧ a ≠ y ∧ z ∈ a))",
            free_vars: &["x"],
            citation: "Thm 4.1 step 2: vacuous ∀b appended",
            note: None,
        },
    ]
});

/// All entries in index order.
pub fn entries() -> &'static [CatalogEntry] {
    &ENTRIES
}

fn valid_names() -> String {
    ENTRIES
        .iter()
        .map(|e| e.name)
        .collect::<Vec<_>>()
        .join(", ")
}

/// Looks up an entry by canonical name or alias.
pub fn get(name: &str) -> Result<&'static CatalogEntry, CatalogError> {
    ENTRIES
        .iter()
        .find(|e| e.name == name || e.aliases.contains(&name))
        .ok_or_else(|| CatalogError::UnknownName {
            name: name.to_owned(),
            valid: valid_names(),
        })
}

/// The displayed intermediate formulas of one rewrite chain, in proof
/// order; adjacent entries are intended-equivalent.
pub fn list_chain(theorem: &str) -> Result<Vec<&'static CatalogEntry>, CatalogError> {
    let names: &[&str] = match theorem {
        "thm4.1-step1" => &[
            "thm4.1-step1.1",
            "thm4.1-step1.2",
            "thm4.1-step1.3",
            "thm4.1-step1.4",
        ],
        "thm4.1-step2" => &[
            "thm4.1-step2.1",
            "thm4.1-step2.2",
            "thm4.1-step2.3",
            "thm4.1-step2.4",
            "thm4.1-step2.5",
            "thm4.1-step2.6",
        ],
        _ => {
            return Err(CatalogError::UnknownChain {
                name: theorem.to_owned(),
            })
        }
    };
    Ok(names.iter().map(|n| get(n).unwrap()).collect())
}

/// Symbol count of an official rendering, addressed by catalog name or
/// by the verbatim rendering text. Anything else is rejected: counts
/// are pinned to the stored parenthesization, not to re-printed forms.
pub fn token_count(name_or_text: &str) -> Result<usize, CatalogError> {
    let entry = ENTRIES
        .iter()
        .find(|e| {
            e.name == name_or_text
                || e.aliases.contains(&name_or_text)
                || e.official == name_or_text.trim()
        })
        .ok_or(CatalogError::UnknownRendering)?;
    Ok(parser::symbol_count(entry.official).expect("official renderings parse"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    #[test]
    fn official_renderings_parse_to_the_stored_formulas() {
        for entry in entries() {
            let parsed = parse(entry.official).unwrap_or_else(|e| {
                panic!("official rendering of {} does not parse: {e}", entry.name)
            });
            assert_eq!(
                parsed, entry.formula,
                "official rendering of {} disagrees with the built formula",
                entry.name
            );
        }
    }

    #[test]
    fn declared_free_variables_match() {
        for entry in entries() {
            let computed: Vec<String> = entry
                .formula
                .free_vars()
                .into_iter()
                .map(|v| v.name().to_owned())
                .collect();
            let declared: Vec<String> = entry.free_vars.iter().map(|s| s.to_string()).collect();
            assert_eq!(computed, declared, "free variables of {}", entry.name);
        }
    }

    #[test]
    fn quantifier_counts() {
        assert_eq!(get("AC**").unwrap().formula.quantifier_count(), 5);
        assert_eq!(get("ACbar**").unwrap().formula.quantifier_count(), 5);
        assert_eq!(get("C3").unwrap().formula.quantifier_count(), 3);
        assert_eq!(get("B").unwrap().formula.quantifier_count(), 0);
        assert_eq!(get("Bbar").unwrap().formula.quantifier_count(), 0);
        assert_eq!(get("C").unwrap().formula.quantifier_count(), 4);
    }

    #[test]
    fn lookup_by_alias() {
        assert_eq!(get("AC̄**").unwrap().name, "ACbar**");
        assert_eq!(get("C̄").unwrap().name, "Cbar");
    }

    #[test]
    fn unknown_name_lists_valid_names() {
        let err = get("nonsense").unwrap_err();
        match err {
            CatalogError::UnknownName { valid, .. } => {
                assert!(valid.contains("AC**"));
                assert!(valid.contains("phi"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn phi_is_bounded_but_ac_is_not() {
        assert!(get("phi").unwrap().formula.is_bounded());
        assert!(!get("AC").unwrap().formula.is_bounded());
        // A single bounded ∀ for contrast.
        assert!(parse("∀z(z ∈ x → z = z)").unwrap().is_bounded());
    }

    #[test]
    fn chains_have_the_documented_shape() {
        let step1 = list_chain("thm4.1-step1").unwrap();
        assert_eq!(step1.len(), 4);
        assert_eq!(step1[0].formula, step1_1());
        assert_eq!(step1[3].formula, step1_4());
        let step2 = list_chain("thm4.1-step2").unwrap();
        assert_eq!(step2.len(), 6);
        assert_eq!(step2[0].formula, ach_star_body().not());
        assert_eq!(step2[5].formula, step2_6());
        assert!(list_chain("thm9").is_err());
    }

    #[test]
    fn symbol_count_delta_is_sixteen() {
        let long = token_count("AC**").unwrap();
        let short = token_count("ACbar**").unwrap();
        assert_eq!(long - short, 16);
    }

    #[test]
    fn atom_count_delta_is_three() {
        fn atoms(f: &Formula) -> usize {
            let mut n = 0;
            f.walk(&mut |g| {
                if g.is_atom() {
                    n += 1;
                }
            });
            n
        }
        let b = atoms(&get("B").unwrap().formula);
        let bbar = atoms(&get("Bbar").unwrap().formula);
        assert_eq!(b, 9);
        assert_eq!(bbar, 6);
        assert_eq!(b - bbar, 3);
    }

    #[test]
    fn token_count_rejects_unknown_renderings() {
        assert_eq!(
            token_count("a in z & a in y"),
            Err(CatalogError::UnknownRendering)
        );
        // Verbatim official text is accepted.
        let text = get("B").unwrap().official;
        assert_eq!(token_count(text).unwrap(), token_count("B").unwrap());
    }

    #[test]
    fn prefix_patterns() {
        assert_eq!(
            get("AC**").unwrap().formula.prefix_pattern().unwrap(),
            "∀∃∀∃∀"
        );
        assert!(get("C3").unwrap().formula.prefix_pattern().is_err());
    }
}
