//! Abstract syntax for first-order formulas over membership and equality.
//!
//! The language has two atoms (`v in w`, `v = w`), the usual connectives,
//! and per-variable quantifiers. Formulas are immutable trees; every
//! operation here is pure.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A variable symbol. Distinct names are distinct variables; nothing is
/// interned or normalized.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub String);

impl Var {
    pub fn name(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Var {
    fn from(name: &str) -> Self {
        Var(name.to_owned())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Quantifier kind, used by the prefix-pattern and transform code.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Forall => Quantifier::Exists,
            Quantifier::Exists => Quantifier::Forall,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Quantifier::Forall => '∀',
            Quantifier::Exists => '∃',
        }
    }
}

/// A formula of the (∈,=) language.
///
/// There is no primitive for `∉` or `≠`; both are negated atoms, built by
/// [`Formula::not_member`] and [`Formula::not_equal`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    /// `v ∈ w`
    Member(Var, Var),
    /// `v = w`
    Equal(Var, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(Var, Box<Formula>),
    Exists(Var, Box<Formula>),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenameError {
    #[error("renaming is not injective on free variables: {0} and {1} both map to {2}")]
    NotInjective(Var, Var, Var),
}

impl Formula {
    pub fn member(v: impl Into<Var>, w: impl Into<Var>) -> Formula {
        Formula::Member(v.into(), w.into())
    }

    pub fn equal(v: impl Into<Var>, w: impl Into<Var>) -> Formula {
        Formula::Equal(v.into(), w.into())
    }

    /// `v ∉ w`, sugar for `¬(v ∈ w)`.
    pub fn not_member(v: impl Into<Var>, w: impl Into<Var>) -> Formula {
        Formula::member(v, w).not()
    }

    /// `v ≠ w`, sugar for `¬(v = w)`.
    pub fn not_equal(v: impl Into<Var>, w: impl Into<Var>) -> Formula {
        Formula::equal(v, w).not()
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, other: Formula) -> Formula {
        Formula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: Formula) -> Formula {
        Formula::Or(Box::new(self), Box::new(other))
    }

    pub fn implies(self, other: Formula) -> Formula {
        Formula::Implies(Box::new(self), Box::new(other))
    }

    pub fn iff(self, other: Formula) -> Formula {
        Formula::Iff(Box::new(self), Box::new(other))
    }

    pub fn forall(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<Var>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn quantified(q: Quantifier, v: impl Into<Var>, body: Formula) -> Formula {
        match q {
            Quantifier::Forall => Formula::forall(v, body),
            Quantifier::Exists => Formula::exists(v, body),
        }
    }

    pub fn is_atom(&self) -> bool {
        matches!(self, Formula::Member(..) | Formula::Equal(..))
    }

    /// The variables with at least one free occurrence, sorted by name.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut acc = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut acc);
        acc
    }

    fn collect_free(&self, bound: &mut Vec<Var>, acc: &mut BTreeSet<Var>) {
        match self {
            Formula::Member(v, w) | Formula::Equal(v, w) => {
                if !bound.contains(v) {
                    acc.insert(v.clone());
                }
                if !bound.contains(w) {
                    acc.insert(w.clone());
                }
            }
            Formula::Not(f) => f.collect_free(bound, acc),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => {
                f.collect_free(bound, acc);
                g.collect_free(bound, acc);
            }
            Formula::Forall(v, f) | Formula::Exists(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, acc);
                bound.pop();
            }
        }
    }

    /// Every variable occurring anywhere, free or bound.
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut acc = BTreeSet::new();
        self.walk(&mut |f| {
            match f {
                Formula::Member(v, w) | Formula::Equal(v, w) => {
                    acc.insert(v.clone());
                    acc.insert(w.clone());
                }
                Formula::Forall(v, _) | Formula::Exists(v, _) => {
                    acc.insert(v.clone());
                }
                _ => {}
            }
        });
        acc
    }

    /// Preorder walk over all subformulas.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        match self {
            Formula::Member(..) | Formula::Equal(..) => {}
            Formula::Not(f) | Formula::Forall(_, f) | Formula::Exists(_, f) => {
                f.walk(visit)
            }
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => {
                f.walk(visit);
                g.walk(visit);
            }
        }
    }

    /// Number of quantifier nodes in the tree. Every individual binder
    /// counts, not just alternations.
    pub fn quantifier_count(&self) -> usize {
        let mut n = 0;
        self.walk(&mut |f| {
            if matches!(f, Formula::Forall(..) | Formula::Exists(..)) {
                n += 1;
            }
        });
        n
    }

    /// Simultaneous variable renaming, applied to free and bound
    /// occurrences alike.
    ///
    /// The map must be injective on the free variables of `self`
    /// (counting unmapped variables as mapped to themselves); otherwise
    /// two distinct free variables would collapse and evaluation would
    /// not be preserved. Binders are renamed through the map as well;
    /// when doing so would capture a free occurrence, the binder gets a
    /// fresh primed name instead.
    pub fn rename(&self, map: &BTreeMap<Var, Var>) -> Result<Formula, RenameError> {
        let free = self.free_vars();
        let image = |v: &Var| map.get(v).cloned().unwrap_or_else(|| v.clone());
        let mut seen: BTreeMap<Var, Var> = BTreeMap::new();
        for v in &free {
            let img = image(v);
            if let Some(prev) = seen.get(&img) {
                return Err(RenameError::NotInjective(prev.clone(), v.clone(), img));
            }
            seen.insert(img, v.clone());
        }
        // Names that a fresh binder must avoid.
        let mut taken: BTreeSet<Var> = self.all_vars();
        taken.extend(map.values().cloned());
        Ok(self.rename_rec(map, &mut Vec::new(), &mut taken))
    }

    fn rename_rec(
        &self,
        map: &BTreeMap<Var, Var>,
        scope: &mut Vec<(Var, Var)>,
        taken: &mut BTreeSet<Var>,
    ) -> Formula {
        let resolve = |v: &Var, scope: &[(Var, Var)]| -> Var {
            for (from, to) in scope.iter().rev() {
                if from == v {
                    return to.clone();
                }
            }
            map.get(v).cloned().unwrap_or_else(|| v.clone())
        };
        match self {
            Formula::Member(v, w) => {
                Formula::Member(resolve(v, scope), resolve(w, scope))
            }
            Formula::Equal(v, w) => Formula::Equal(resolve(v, scope), resolve(w, scope)),
            Formula::Not(f) => f.rename_rec(map, scope, taken).not(),
            Formula::And(f, g) => f
                .rename_rec(map, scope, taken)
                .and(g.rename_rec(map, scope, taken)),
            Formula::Or(f, g) => f
                .rename_rec(map, scope, taken)
                .or(g.rename_rec(map, scope, taken)),
            Formula::Implies(f, g) => f
                .rename_rec(map, scope, taken)
                .implies(g.rename_rec(map, scope, taken)),
            Formula::Iff(f, g) => f
                .rename_rec(map, scope, taken)
                .iff(g.rename_rec(map, scope, taken)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let desired = map.get(v).cloned().unwrap_or_else(|| v.clone());
                // Capture: some other variable free in the body resolves
                // to the name this binder would take.
                let captures = body
                    .free_vars()
                    .iter()
                    .any(|w| w != v && resolve(w, scope) == desired);
                let new_name = if captures {
                    let fresh = fresh_var(&desired, taken);
                    taken.insert(fresh.clone());
                    fresh
                } else {
                    desired
                };
                scope.push((v.clone(), new_name.clone()));
                let new_body = body.rename_rec(map, scope, taken);
                scope.pop();
                match self {
                    Formula::Forall(..) => Formula::forall(new_name, new_body),
                    _ => Formula::exists(new_name, new_body),
                }
            }
        }
    }

    /// True iff every quantifier is bounded: `∀v(v ∈ t → …)` or
    /// `∃v(v ∈ t ∧ …)` with `t` a variable other than `v`.
    pub fn is_bounded(&self) -> bool {
        match self {
            Formula::Member(..) | Formula::Equal(..) => true,
            Formula::Not(f) => f.is_bounded(),
            Formula::And(f, g)
            | Formula::Or(f, g)
            | Formula::Implies(f, g)
            | Formula::Iff(f, g) => f.is_bounded() && g.is_bounded(),
            Formula::Forall(v, body) => match body.as_ref() {
                Formula::Implies(guard, rest) => {
                    matches!(guard.as_ref(), Formula::Member(u, t) if u == v && t != v)
                        && rest.is_bounded()
                }
                _ => false,
            },
            Formula::Exists(v, body) => match body.as_ref() {
                Formula::And(guard, rest) => {
                    matches!(guard.as_ref(), Formula::Member(u, t) if u == v && t != v)
                        && rest.is_bounded()
                }
                _ => false,
            },
        }
    }

    /// Splits a prenex formula into its quantifier prefix and matrix.
    pub fn strip_prefix(&self) -> (Vec<(Quantifier, Var)>, &Formula) {
        let mut prefix = Vec::new();
        let mut cur = self;
        loop {
            match cur {
                Formula::Forall(v, body) => {
                    prefix.push((Quantifier::Forall, v.clone()));
                    cur = body;
                }
                Formula::Exists(v, body) => {
                    prefix.push((Quantifier::Exists, v.clone()));
                    cur = body;
                }
                _ => return (prefix, cur),
            }
        }
    }

    /// True iff all quantifiers form an outermost prefix.
    pub fn is_prenex(&self) -> bool {
        let (_, matrix) = self.strip_prefix();
        matrix.quantifier_count() == 0
    }

    /// The left-to-right sequence of binder kinds of a prenex formula,
    /// e.g. `"∀∃∀"`. Rejects non-prenex input, reporting where the first
    /// offending inner quantifier sits.
    pub fn prefix_pattern(&self) -> Result<String, NotPrenex> {
        let (prefix, matrix) = self.strip_prefix();
        if let Some(path) = first_quantifier_path(matrix) {
            return Err(NotPrenex { position: path });
        }
        Ok(prefix.iter().map(|(q, _)| q.symbol()).collect())
    }
}

/// Error for [`Formula::prefix_pattern`] on non-prenex input. `position`
/// describes the path from the matrix root down to the offending
/// quantifier.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("formula is not prenex: inner quantifier at {position}")]
pub struct NotPrenex {
    pub position: String,
}

fn first_quantifier_path(f: &Formula) -> Option<String> {
    fn go(f: &Formula, path: &mut Vec<&'static str>) -> bool {
        match f {
            Formula::Member(..) | Formula::Equal(..) => false,
            Formula::Forall(..) | Formula::Exists(..) => true,
            Formula::Not(g) => {
                path.push("operand of ¬");
                if go(g, path) {
                    return true;
                }
                path.pop();
                false
            }
            Formula::And(l, r)
            | Formula::Or(l, r)
            | Formula::Implies(l, r)
            | Formula::Iff(l, r) => {
                let name = match f {
                    Formula::And(..) => ("left of ∧", "right of ∧"),
                    Formula::Or(..) => ("left of ∨", "right of ∨"),
                    Formula::Implies(..) => ("left of →", "right of →"),
                    _ => ("left of ↔", "right of ↔"),
                };
                path.push(name.0);
                if go(l, path) {
                    return true;
                }
                path.pop();
                path.push(name.1);
                if go(r, path) {
                    return true;
                }
                path.pop();
                false
            }
        }
    }
    let mut path = Vec::new();
    if go(f, &mut path) {
        Some(if path.is_empty() {
            "matrix root".to_owned()
        } else {
            path.join(", ")
        })
    } else {
        None
    }
}

/// Appends primes to `base` until the name is unused.
pub(crate) fn fresh_var(base: &Var, taken: &BTreeSet<Var>) -> Var {
    let mut name = base.0.clone();
    loop {
        name.push('\'');
        let candidate = Var(name.clone());
        if !taken.contains(&candidate) {
            return candidate;
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        // Debug shows the canonical text; the tree shape is recoverable
        // from the minimal parenthesization.
        write!(f, "{}", crate::printer::print(self))
    }
}
