//! Schema slots and the quantifier-trading equivalence of Lemma 2.2.
//!
//! Three well-formed formulas `X(t)`, `Y(t)`, `Z(r,t)` in which `a` and
//! `b` do not occur free, together with the validity of the premise
//! `∀t(Y(t) → X(t))`, make these two forms equivalent:
//!
//! ```text
//! A ≡ ∃b X(b) → ∃a (Y(a) ∧ ∀b Z(b,a))
//! B ≡ ∃a ∀b [(X(b) → Y(a)) ∧ (Y(a) → Z(b,a))]
//! ```
//!
//! A spends three quantifiers where B spends two; instantiating the
//! slots with the choice-set readings turns the four-quantifier form of
//! "z ∩ y is a singleton" into the two-quantifier B.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formula::{Formula, Var};

/// Placeholder names of Lemma 2.2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SlotName {
    X,
    Y,
    Z,
}

impl SlotName {
    pub fn arity(self) -> usize {
        match self {
            SlotName::X | SlotName::Y => 1,
            SlotName::Z => 2,
        }
    }
}

/// A formula with designated parameter variables, fillable into the
/// Lemma 2.2 schema. `X` and `Y` take one parameter (`t`), `Z` takes
/// two (`r`, `t`).
#[derive(Clone, Debug)]
pub struct SchemaSlot {
    pub name: SlotName,
    pub params: Vec<Var>,
    pub body: Formula,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SchemaError {
    #[error("slot {0:?} takes {1} parameter(s), got {2}")]
    Arity(SlotName, usize, usize),
    #[error("variable {0} occurs free in a slot body; the schema reserves a and b")]
    ReservedVariable(Var),
    #[error("slot given for {expected:?} is named {found:?}")]
    WrongSlot { expected: SlotName, found: SlotName },
}

impl SchemaSlot {
    pub fn new(
        name: SlotName,
        params: Vec<Var>,
        body: Formula,
    ) -> Result<SchemaSlot, SchemaError> {
        if params.len() != name.arity() {
            return Err(SchemaError::Arity(name, name.arity(), params.len()));
        }
        for reserved in ["a", "b"] {
            let rv = Var::from(reserved);
            if body.free_vars().contains(&rv) && !params.contains(&rv) {
                return Err(SchemaError::ReservedVariable(rv));
            }
        }
        Ok(SchemaSlot { name, params, body })
    }

    pub fn unary(name: SlotName, param: &str, body: Formula) -> Result<SchemaSlot, SchemaError> {
        SchemaSlot::new(name, vec![Var::from(param)], body)
    }

    pub fn binary(
        name: SlotName,
        first: &str,
        second: &str,
        body: Formula,
    ) -> Result<SchemaSlot, SchemaError> {
        SchemaSlot::new(name, vec![Var::from(first), Var::from(second)], body)
    }

    /// The slot body with its parameters replaced by `args`.
    pub fn instantiate(&self, args: &[&str]) -> Formula {
        assert_eq!(args.len(), self.params.len());
        let map: BTreeMap<Var, Var> = self
            .params
            .iter()
            .cloned()
            .zip(args.iter().map(|a| Var::from(*a)))
            .collect();
        self.body
            .rename(&map)
            .expect("slot parameters rename injectively: a and b are not free in slot bodies")
    }
}

/// The three formulas of Lemma 2.2 for a given slot instantiation.
#[derive(Clone, Debug)]
pub struct Lemma22 {
    /// `∀t(Y(t) → X(t))`; the equivalence of A and B assumes this holds.
    pub premise: Formula,
    /// `∃b X(b) → ∃a (Y(a) ∧ ∀b Z(b,a))`
    pub a_form: Formula,
    /// `∃a ∀b [(X(b) → Y(a)) ∧ (Y(a) → Z(b,a))]`
    pub b_form: Formula,
}

impl Lemma22 {
    /// `premise → (A ↔ B)`, the sentence whose universal closure the
    /// checker validates.
    pub fn claim(&self) -> Formula {
        self.premise
            .clone()
            .implies(self.a_form.clone().iff(self.b_form.clone()))
    }
}

/// Builds the premise and both forms from the three slots.
pub fn build_lemma22(
    x: &SchemaSlot,
    y: &SchemaSlot,
    z: &SchemaSlot,
) -> Result<Lemma22, SchemaError> {
    for (slot, expected) in [(x, SlotName::X), (y, SlotName::Y), (z, SlotName::Z)] {
        if slot.name != expected {
            return Err(SchemaError::WrongSlot {
                expected,
                found: slot.name,
            });
        }
    }
    let premise = Formula::forall(
        "t",
        y.instantiate(&["t"]).implies(x.instantiate(&["t"])),
    );
    let a_form = Formula::exists("b", x.instantiate(&["b"])).implies(Formula::exists(
        "a",
        y.instantiate(&["a"])
            .and(Formula::forall("b", z.instantiate(&["b", "a"]))),
    ));
    let b_form = Formula::exists(
        "a",
        Formula::forall(
            "b",
            x.instantiate(&["b"])
                .implies(y.instantiate(&["a"]))
                .and(y.instantiate(&["a"]).implies(z.instantiate(&["b", "a"]))),
        ),
    );
    Ok(Lemma22 {
        premise,
        a_form,
        b_form,
    })
}

/// The slot instantiation of Corollary 2.3: `X(t) ≡ t ∈ z`,
/// `Y(t) ≡ X(t) ∧ t ∈ y`, `Z(r,t) ≡ Y(r) → r = t`.
pub fn cor23_slots() -> (SchemaSlot, SchemaSlot, SchemaSlot) {
    let x = SchemaSlot::unary(SlotName::X, "t", Formula::member("t", "z")).unwrap();
    let y = SchemaSlot::unary(
        SlotName::Y,
        "t",
        Formula::member("t", "z").and(Formula::member("t", "y")),
    )
    .unwrap();
    let z = SchemaSlot::binary(
        SlotName::Z,
        "r",
        "t",
        Formula::member("r", "z")
            .and(Formula::member("r", "y"))
            .implies(Formula::equal("r", "t")),
    )
    .unwrap();
    (x, y, z)
}
