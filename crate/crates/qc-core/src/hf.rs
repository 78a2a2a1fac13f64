//! Executable set theory on hereditarily finite sets.
//!
//! Sets are carried by their canonical code: `code(s) = Σ 2^code(e)`
//! over the elements `e` of `s`. The encoding is a bijection between
//! hereditarily finite sets and the naturals, extensional equality is
//! numeric equality, and membership is a bit test: `e ∈ s` iff bit
//! `code(e)` of `code(s)` is set. Codes live in a `u64`, so member
//! codes stay below 64; stage `V_5` (65,536 sets) is the practical
//! ceiling and everything the constructions touch stays far below it.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::model::FinStructure;

/// Default rank cap for universe enumeration, overridable via the
/// `QC_MAX_RANK` environment variable.
pub const DEFAULT_MAX_RANK: usize = 5;

/// Hard ceiling for the membership-structure bridge: rank 5 would need
/// a 65,536-element domain.
pub const BRIDGE_MAX_RANK: usize = 4;

/// The configured rank cap (`QC_MAX_RANK` or the default 5).
pub fn max_rank() -> usize {
    std::env::var("QC_MAX_RANK")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_RANK)
        .min(5)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HfError {
    #[error("rank {requested} exceeds the cap {cap} (override with QC_MAX_RANK, hard limit 5)")]
    RankOverCap { requested: usize, cap: usize },
    #[error("the membership-structure bridge is capped at rank {BRIDGE_MAX_RANK}; got {0}")]
    BridgeOverCap(usize),
    #[error("element code {0} does not fit: member codes must stay below 64")]
    CodeOverflow(u64),
    #[error("AC_h*({0}) fails; the construction is only claimed under that hypothesis")]
    HypothesisNotSatisfied(HfSet),
    #[error(
        "construction postcondition failed for x = {x}: produced {result} \
         (member of x: {in_x}, choice-set: {chooses})"
    )]
    ConstructionFailed {
        x: HfSet,
        result: HfSet,
        in_x: bool,
        chooses: bool,
    },
    #[error("cannot parse hereditarily finite set: {0}")]
    Parse(String),
}

/// A hereditarily finite set, by canonical code.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HfSet(pub u64);

impl Serialize for HfSet {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("HfSet", 2)?;
        s.serialize_field("code", &self.0)?;
        s.serialize_field("set", &self.to_string())?;
        s.end()
    }
}

impl HfSet {
    pub const EMPTY: HfSet = HfSet(0);

    pub fn code(self) -> u64 {
        self.0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    /// Elements in ascending code order.
    pub fn elements(self) -> impl Iterator<Item = HfSet> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros() as u64;
            rest &= rest - 1;
            Some(HfSet(bit))
        })
    }

    pub fn contains(self, e: HfSet) -> bool {
        e.0 < 64 && (self.0 >> e.0) & 1 == 1
    }

    pub fn intersect(self, other: HfSet) -> HfSet {
        HfSet(self.0 & other.0)
    }

    pub fn union(self, other: HfSet) -> HfSet {
        HfSet(self.0 | other.0)
    }

    pub fn difference(self, other: HfSet) -> HfSet {
        HfSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: HfSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn from_elements(elements: impl IntoIterator<Item = HfSet>) -> Result<HfSet, HfError> {
        let mut code = 0u64;
        for e in elements {
            if e.0 >= 64 {
                return Err(HfError::CodeOverflow(e.0));
            }
            code |= 1 << e.0;
        }
        Ok(HfSet(code))
    }

    /// `∪s`: union of the elements. Member codes are bit positions, so
    /// the union's code is the bitwise OR of the element codes and
    /// always fits.
    pub fn big_union(self) -> HfSet {
        let mut out = 0u64;
        for e in self.elements() {
            out |= e.0;
        }
        HfSet(out)
    }

    /// Elements that are themselves nonempty (`{z ∈ s | z ≠ ∅}`; the
    /// empty set is code 0, bit 0).
    pub fn nonempty_elements(self) -> HfSet {
        HfSet(self.0 & !1)
    }

    /// Von Neumann rank: 0 for ∅, else one above the maximal element rank.
    pub fn rank(self) -> usize {
        self.elements().map(|e| e.rank() + 1).max().unwrap_or(0)
    }
}

impl fmt::Display for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elements().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for HfSet {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{self}#{}", self.0)
    }
}

impl FromStr for HfSet {
    type Err = HfError;

    /// Accepts nested braces (`{{},{{}}}`), `∅`, or a decimal code.
    fn from_str(s: &str) -> Result<HfSet, HfError> {
        fn parse_set(
            chars: &mut std::iter::Peekable<std::str::Chars>,
        ) -> Result<HfSet, HfError> {
            while chars.peek().is_some_and(|c| c.is_whitespace()) {
                chars.next();
            }
            match chars.peek() {
                Some('∅') => {
                    chars.next();
                    Ok(HfSet::EMPTY)
                }
                Some('{') => {
                    chars.next();
                    let mut elements = Vec::new();
                    loop {
                        while chars.peek().is_some_and(|c| c.is_whitespace()) {
                            chars.next();
                        }
                        match chars.peek() {
                            Some('}') => {
                                chars.next();
                                break;
                            }
                            Some(',') => {
                                chars.next();
                            }
                            Some(_) => elements.push(parse_set(chars)?),
                            None => return Err(HfError::Parse("unclosed brace".into())),
                        }
                    }
                    HfSet::from_elements(elements)
                }
                Some(c) if c.is_ascii_digit() => {
                    let mut n = String::new();
                    while chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                        n.push(chars.next().unwrap());
                    }
                    n.parse::<u64>()
                        .map(HfSet)
                        .map_err(|e| HfError::Parse(e.to_string()))
                }
                other => Err(HfError::Parse(format!(
                    "expected '{{', '∅', or digits, found {other:?}"
                ))),
            }
        }
        let mut chars = s.chars().peekable();
        let set = parse_set(&mut chars)?;
        while chars.peek().is_some_and(|c| c.is_whitespace()) {
            chars.next();
        }
        if chars.peek().is_some() {
            return Err(HfError::Parse("trailing input after set".into()));
        }
        Ok(set)
    }
}

/// Number of sets of rank below `k`: 0, 1, 2, 4, 16, 65536 for k = 0..5.
pub fn v_stage_size(k: usize) -> u64 {
    let mut size: u64 = 0;
    for _ in 0..k {
        size = 1u64 << size.min(63);
    }
    size
}

/// All hereditarily finite sets of rank below `k`, in code order. These
/// are exactly the codes `0 .. v_stage_size(k)`.
pub fn v_universe(k: usize) -> Result<Vec<HfSet>, HfError> {
    let cap = max_rank();
    if k > cap {
        return Err(HfError::RankOverCap { requested: k, cap });
    }
    Ok((0..v_stage_size(k)).map(HfSet).collect())
}

/// True iff `y` meets every nonempty element of `x` in exactly one
/// point. Empty elements of `x` impose nothing.
pub fn is_choice_set(y: HfSet, x: HfSet) -> bool {
    x.elements()
        .filter(|z| !z.is_empty())
        .all(|z| z.intersect(y).len() == 1)
}

/// All elements of `x` are nonempty.
pub fn sat_ach1(x: HfSet) -> bool {
    !x.contains(HfSet::EMPTY)
}

/// The elements of `x` are pairwise disjoint.
pub fn sat_ach2(x: HfSet) -> bool {
    let elements: Vec<HfSet> = x.elements().collect();
    for (i, z) in elements.iter().enumerate() {
        for z2 in &elements[i + 1..] {
            if !z.intersect(*z2).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Every element of `x` contains a member that lies in no other
/// element of `x`.
pub fn sat_ach_star(x: HfSet) -> bool {
    x.elements().all(|z| !phi(z, x).is_empty())
}

/// `z_x = {a ∈ z | a is in no element of x other than z}`, the image
/// formula of the separation step. Defined for any `z`, not only
/// members of `x`; the properties are claimed for `z ∈ x`.
pub fn phi(z: HfSet, x: HfSet) -> HfSet {
    let mut others = 0u64;
    for w in x.elements() {
        if w != z {
            others |= w.0;
        }
    }
    HfSet(z.0 & !others)
}

/// `x* = {z_x | z ∈ x}`, the image of `x` under [`phi`].
pub fn star(x: HfSet) -> Result<HfSet, HfError> {
    HfSet::from_elements(x.elements().map(|z| phi(z, x)))
}

/// The least-coded choice-set for `x`. Some choice-set is a submask of
/// `∪x`, whose code is below 64, so the scan is short.
pub fn least_choice_set(x: HfSet) -> HfSet {
    let bound = x.big_union().0;
    (0..=bound)
        .map(HfSet)
        .find(|y| is_choice_set(*y, x))
        .expect("the union of x meets every nonempty element of x")
}

/// Which patch the construction took when the separated choice-set
/// landed inside `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PatchBranch {
    /// `y′ ∉ x`; no patch needed.
    None,
    /// `y′ = {a}` with `a` nonempty; pair `a` with its empty subset.
    PairWithEmpty,
    /// `y′ = {a}` with `a = ∅`; pair `a` with the nonempty `y′`.
    PairWithYPrime,
}

/// Branch selection strategy; `AlwaysPairEmpty` is the documented
/// injected fault that ignores the emptiness case split.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PatchStrategy {
    ProofExact,
    AlwaysPairEmpty,
}

/// Record of one run of the choice-set construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChoiceTrace {
    /// The input `x`.
    pub input: HfSet,
    /// `x* = {z_x | z ∈ x}`.
    pub x_star: HfSet,
    /// The least-coded choice-set `y` for `x*`; deterministic surrogate
    /// for a choice principle, recorded so runs reproduce.
    pub chosen: HfSet,
    /// `y′ = y ∩ ∪x*`.
    pub y_prime: HfSet,
    pub branch: PatchBranch,
    /// The final choice-set for `x`, not a member of `x`.
    pub result: HfSet,
}

/// Runs the constructive proof that choice implies the strengthened
/// variant: build `x*`, choose for it, intersect down to `y′`, and if
/// `y′` happens to lie in `x`, pair its single element with a set
/// differing from it. Requires `AC_h*(x)`.
pub fn construct_choice_set(x: HfSet) -> Result<ChoiceTrace, HfError> {
    construct_choice_set_with(x, PatchStrategy::ProofExact)
}

pub fn construct_choice_set_with(
    x: HfSet,
    strategy: PatchStrategy,
) -> Result<ChoiceTrace, HfError> {
    if !sat_ach_star(x) {
        return Err(HfError::HypothesisNotSatisfied(x));
    }
    let x_star = star(x)?;
    let chosen = least_choice_set(x_star);
    let y_prime = chosen.intersect(x_star.big_union());
    let (branch, result) = if !x.contains(y_prime) {
        (PatchBranch::None, y_prime)
    } else {
        // y′ ∈ x forces x = {y′} and y′ = {a}; pick b ≠ a and pair.
        debug_assert_eq!(x, HfSet::from_elements([y_prime]).unwrap());
        debug_assert_eq!(y_prime.len(), 1);
        let a = y_prime.elements().next().expect("y′ is a singleton");
        let (branch, b) = match strategy {
            PatchStrategy::ProofExact if a.is_empty() => {
                (PatchBranch::PairWithYPrime, y_prime)
            }
            _ => (PatchBranch::PairWithEmpty, HfSet::EMPTY),
        };
        (branch, HfSet::from_elements([a, b])?)
    };
    let in_x = x.contains(result);
    let chooses = is_choice_set(result, x);
    if in_x || !chooses {
        return Err(HfError::ConstructionFailed {
            x,
            result,
            in_x,
            chooses,
        });
    }
    Ok(ChoiceTrace {
        input: x,
        x_star,
        chosen,
        y_prime,
        branch,
        result,
    })
}

/// The membership structure of stage `V_k`: domain element `i` is the
/// set coded `i`, and `mem(i, j)` is true membership (bit `i` of `j`).
/// The returned vector is the code-to-set index map; codes are domain
/// indices, so the map is the identity in both directions.
pub fn structure_of(k: usize) -> Result<(FinStructure, Vec<HfSet>), HfError> {
    if k == 0 || k > BRIDGE_MAX_RANK {
        return Err(HfError::BridgeOverCap(k));
    }
    let size = v_stage_size(k) as usize;
    let mut s = FinStructure::empty(size);
    for j in 0..size {
        for i in 0..size.min(64) {
            if (j >> i) & 1 == 1 {
                s.set(i, j, true);
            }
        }
    }
    Ok((s, (0..size as u64).map(HfSet).collect()))
}
