//! Finite membership structures and exhaustive validity checking.
//!
//! A structure is a domain `{0, …, n−1}` with an arbitrary binary
//! relation read as membership; no set axiom is assumed. Validity up to
//! a size bound means: true in every structure of every size up to the
//! bound, under every assignment. `ValidUpTo(n)` refutes nothing beyond
//! size `n`; it is a finite check, not a proof.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Formula, Var};

/// Hard ceiling on enumerable structure size; `2^(n²)` structures stop
/// being enumerable long before this.
const ABSOLUTE_MAX_N: usize = 7;

/// Default enumeration cap, overridable by the `QC_MAX_N` environment
/// variable or an explicit cap argument.
pub const DEFAULT_MAX_N: usize = 5;

/// The configured structure-size cap (`QC_MAX_N` or the default 5).
pub fn max_structure_size() -> usize {
    std::env::var("QC_MAX_N")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_N)
        .min(ABSOLUTE_MAX_N)
}

/// A finite structure: domain `{0, …, n−1}` plus an `n×n` membership
/// matrix. `mem(i, j)` reads "`i ∈ j`".
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinStructure {
    n: usize,
    bits: Vec<u64>,
}

impl FinStructure {
    /// The empty-relation structure of the given size.
    pub fn empty(n: usize) -> Self {
        assert!(n >= 1, "domain must be nonempty");
        let words = (n * n).div_ceil(64);
        FinStructure {
            n,
            bits: vec![0; words],
        }
    }

    /// Decodes the structure at position `index` of the documented
    /// enumeration of size-`n` structures: bit `i·n + j` of the index
    /// (row-major) sets `mem(i, j)`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n * n <= 64, "index encoding requires n*n <= 64");
        let mut s = FinStructure::empty(n);
        s.bits[0] = index;
        s
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut s = FinStructure::empty(n);
        for &(i, j) in edges {
            s.set(i, j, true);
        }
        s
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn mem(&self, i: usize, j: usize) -> bool {
        let bit = i * self.n + j;
        (self.bits[bit >> 6] >> (bit & 63)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.n && j < self.n);
        let bit = i * self.n + j;
        if value {
            self.bits[bit >> 6] |= 1 << (bit & 63);
        } else {
            self.bits[bit >> 6] &= !(1 << (bit & 63));
        }
    }

    /// All membership edges `(i, j)` with `i ∈ j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if self.mem(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// The image structure under a domain permutation: membership of
    /// `(π(i), π(j))` in the result mirrors `(i, j)` here.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.n);
        let mut out = FinStructure::empty(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.mem(i, j) {
                    out.set(perm[i], perm[j], true);
                }
            }
        }
        out
    }
}

impl fmt::Debug for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter) -> fmt::Result {
        write!(f, "FinStructure(n={}, edges={:?})", self.n, self.edges())
    }
}

/// A partial map from variables to domain elements.
#[derive(Clone, Default, PartialEq, Eq, Debug)]
pub struct Assignment(pub BTreeMap<Var, usize>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn bind(mut self, v: impl Into<Var>, d: usize) -> Self {
        self.0.insert(v.into(), d);
        self
    }

    pub fn get(&self, v: &Var) -> Option<usize> {
        self.0.get(v).copied()
    }
}

impl<V: Into<Var>> FromIterator<(V, usize)> for Assignment {
    fn from_iter<I: IntoIterator<Item = (V, usize)>>(iter: I) -> Self {
        Assignment(iter.into_iter().map(|(v, d)| (v.into(), d)).collect())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable {0} has no assigned value")]
    Unassigned(Var),
}

/// Tarskian truth of `f` in `s` under `asg`. Quantifiers range over the
/// whole domain; `=` is identity of domain elements. This is the naive
/// reference semantics; the checker's compiled path is validated
/// against it.
pub fn evaluate(s: &FinStructure, asg: &Assignment, f: &Formula) -> Result<bool, EvalError> {
    fn go(
        s: &FinStructure,
        asg: &Assignment,
        scope: &mut Vec<(Var, usize)>,
        f: &Formula,
    ) -> Result<bool, EvalError> {
        let lookup = |v: &Var, scope: &[(Var, usize)]| -> Result<usize, EvalError> {
            for (name, val) in scope.iter().rev() {
                if name == v {
                    return Ok(*val);
                }
            }
            asg.get(v).ok_or_else(|| EvalError::Unassigned(v.clone()))
        };
        match f {
            Formula::Member(v, w) => Ok(s.mem(lookup(v, scope)?, lookup(w, scope)?)),
            Formula::Equal(v, w) => Ok(lookup(v, scope)? == lookup(w, scope)?),
            Formula::Not(g) => Ok(!go(s, asg, scope, g)?),
            Formula::And(l, r) => Ok(go(s, asg, scope, l)? && go(s, asg, scope, r)?),
            Formula::Or(l, r) => Ok(go(s, asg, scope, l)? || go(s, asg, scope, r)?),
            Formula::Implies(l, r) => Ok(!go(s, asg, scope, l)? || go(s, asg, scope, r)?),
            Formula::Iff(l, r) => Ok(go(s, asg, scope, l)? == go(s, asg, scope, r)?),
            Formula::Forall(v, body) => {
                for d in 0..s.size() {
                    scope.push((v.clone(), d));
                    let holds = go(s, asg, scope, body)?;
                    scope.pop();
                    if !holds {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Formula::Exists(v, body) => {
                for d in 0..s.size() {
                    scope.push((v.clone(), d));
                    let holds = go(s, asg, scope, body)?;
                    scope.pop();
                    if holds {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
    go(s, asg, &mut Vec::new(), f)
}

/// Stack-slot compiled form of a formula; variable lookups become vector
/// indexing so the exhaustive checker avoids name resolution in the
/// inner loop.
enum Code {
    Mem(u16, u16),
    Eq(u16, u16),
    Not(Box<Code>),
    And(Box<Code>, Box<Code>),
    Or(Box<Code>, Box<Code>),
    Implies(Box<Code>, Box<Code>),
    Iff(Box<Code>, Box<Code>),
    Forall(Box<Code>),
    Exists(Box<Code>),
}

fn compile(f: &Formula, slots: &mut Vec<Var>) -> Result<Code, EvalError> {
    let slot_of = |v: &Var, slots: &[Var]| -> Result<u16, EvalError> {
        slots
            .iter()
            .rposition(|s| s == v)
            .map(|i| i as u16)
            .ok_or_else(|| EvalError::Unassigned(v.clone()))
    };
    Ok(match f {
        Formula::Member(v, w) => Code::Mem(slot_of(v, slots)?, slot_of(w, slots)?),
        Formula::Equal(v, w) => Code::Eq(slot_of(v, slots)?, slot_of(w, slots)?),
        Formula::Not(g) => Code::Not(Box::new(compile(g, slots)?)),
        Formula::And(l, r) => Code::And(
            Box::new(compile(l, slots)?),
            Box::new(compile(r, slots)?),
        ),
        Formula::Or(l, r) => {
            Code::Or(Box::new(compile(l, slots)?), Box::new(compile(r, slots)?))
        }
        Formula::Implies(l, r) => Code::Implies(
            Box::new(compile(l, slots)?),
            Box::new(compile(r, slots)?),
        ),
        Formula::Iff(l, r) => Code::Iff(
            Box::new(compile(l, slots)?),
            Box::new(compile(r, slots)?),
        ),
        Formula::Forall(v, body) => {
            slots.push(v.clone());
            let code = compile(body, slots)?;
            slots.pop();
            Code::Forall(Box::new(code))
        }
        Formula::Exists(v, body) => {
            slots.push(v.clone());
            let code = compile(body, slots)?;
            slots.pop();
            Code::Exists(Box::new(code))
        }
    })
}

fn eval_code(c: &Code, s: &FinStructure, env: &mut Vec<usize>) -> bool {
    match c {
        Code::Mem(a, b) => s.mem(env[*a as usize], env[*b as usize]),
        Code::Eq(a, b) => env[*a as usize] == env[*b as usize],
        Code::Not(f) => !eval_code(f, s, env),
        Code::And(l, r) => eval_code(l, s, env) && eval_code(r, s, env),
        Code::Or(l, r) => eval_code(l, s, env) || eval_code(r, s, env),
        Code::Implies(l, r) => !eval_code(l, s, env) || eval_code(r, s, env),
        Code::Iff(l, r) => eval_code(l, s, env) == eval_code(r, s, env),
        Code::Forall(body) => {
            for d in 0..s.size() {
                env.push(d);
                let holds = eval_code(body, s, env);
                env.pop();
                if !holds {
                    return false;
                }
            }
            true
        }
        Code::Exists(body) => {
            for d in 0..s.size() {
                env.push(d);
                let holds = eval_code(body, s, env);
                env.pop();
                if holds {
                    return true;
                }
            }
            false
        }
    }
}

#[derive(Debug, Error)]
pub enum StructuresError {
    #[error("structure size must be at least 1")]
    ZeroSize,
    #[error("structure size {requested} exceeds the cap {cap} (override with QC_MAX_N or an explicit cap)")]
    OverCap { requested: usize, cap: usize },
}

/// Enumeration of all `2^(n²)` size-`n` structures, in row-major
/// bit-counter order: structure `k` has `mem(i, j)` iff bit `i·n + j` of
/// `k` is set. The order is stable and documented so counterexample
/// reports are reproducible.
#[derive(Clone, Debug)]
pub struct StructureEnum {
    n: usize,
    next: u64,
    end: u64,
}

/// All structures of size `n`, under the configured cap.
pub fn structures(n: usize) -> Result<StructureEnum, StructuresError> {
    structures_with_cap(n, max_structure_size())
}

pub fn structures_with_cap(n: usize, cap: usize) -> Result<StructureEnum, StructuresError> {
    if n == 0 {
        return Err(StructuresError::ZeroSize);
    }
    let cap = cap.min(ABSOLUTE_MAX_N);
    if n > cap {
        return Err(StructuresError::OverCap { requested: n, cap });
    }
    Ok(StructureEnum {
        n,
        next: 0,
        end: 1u64 << (n * n),
    })
}

impl StructureEnum {
    pub fn len(&self) -> u64 {
        self.end - self.next
    }

    pub fn is_empty(&self) -> bool {
        self.next >= self.end
    }

    /// Splits the remaining range into `k` contiguous chunks (the last
    /// chunks may be one shorter); chunk order preserves enumeration
    /// order.
    pub fn chunks(&self, k: usize) -> Vec<StructureEnum> {
        let k = k.max(1) as u64;
        let total = self.len();
        let base = total / k;
        let extra = total % k;
        let mut out = Vec::new();
        let mut start = self.next;
        for i in 0..k {
            let size = base + if i < extra { 1 } else { 0 };
            if size == 0 {
                continue;
            }
            out.push(StructureEnum {
                n: self.n,
                next: start,
                end: start + size,
            });
            start += size;
        }
        out
    }
}

impl Iterator for StructureEnum {
    type Item = FinStructure;

    fn next(&mut self) -> Option<FinStructure> {
        if self.next >= self.end {
            return None;
        }
        let s = FinStructure::from_index(self.n, self.next);
        self.next += 1;
        Some(s)
    }
}

/// Outcome of an exhaustive check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// No counterexample among structures of size up to the bound.
    ValidUpTo(usize),
    /// Least-size, enumeration-first falsifying structure and assignment.
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::ValidUpTo(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub structure: FinStructure,
    pub assignment: Assignment,
}

impl Counterexample {
    pub fn to_witness(&self) -> ModelWitness {
        ModelWitness {
            domain_size: self.structure.size(),
            membership: self.structure.edges(),
            assignment: self
                .assignment
                .0
                .iter()
                .map(|(v, d)| (v.name().to_owned(), *d))
                .collect(),
        }
    }
}

/// JSON form of a counterexample:
/// `{domain_size, membership: [[i,j],…], assignment: {var: element}}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModelWitness {
    pub domain_size: usize,
    pub membership: Vec<(usize, usize)>,
    pub assignment: BTreeMap<String, usize>,
}

impl ModelWitness {
    pub fn to_counterexample(&self) -> (FinStructure, Assignment) {
        (
            FinStructure::from_edges(self.domain_size, &self.membership),
            self.assignment
                .iter()
                .map(|(name, d)| (Var::from(name.as_str()), *d))
                .collect(),
        )
    }
}

/// How [`check_valid`] treats free variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeVarPolicy {
    /// Free variables are an error; the input must be a sentence.
    Reject,
    /// Free variables range over every assignment, i.e. the universal
    /// closure is checked (and a counterexample reports the assignment).
    CloseUniversally,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("formula has free variables {0:?}; pass FreeVarPolicy::CloseUniversally to close them")]
    FreeVariables(Vec<Var>),
    #[error(transparent)]
    Structures(#[from] StructuresError),
    #[error("size bound must be at least 1")]
    ZeroBound,
}

/// Exhaustively checks `f` over all structures of size `1..=nmax`.
///
/// Uses all cores when the `parallel` feature is enabled; the verdict is
/// identical to the sequential search (least size, then least structure
/// index, then least assignment in odometer order, rightmost variable
/// fastest over name-sorted free variables).
pub fn check_valid(
    f: &Formula,
    nmax: usize,
    policy: FreeVarPolicy,
) -> Result<Verdict, CheckError> {
    check_valid_inner(f, nmax, policy, cfg_parallel())
}

/// Single-threaded variant of [`check_valid`]; same verdict.
pub fn check_valid_sequential(
    f: &Formula,
    nmax: usize,
    policy: FreeVarPolicy,
) -> Result<Verdict, CheckError> {
    check_valid_inner(f, nmax, policy, false)
}

fn cfg_parallel() -> bool {
    cfg!(feature = "parallel")
}

fn check_valid_inner(
    f: &Formula,
    nmax: usize,
    policy: FreeVarPolicy,
    parallel: bool,
) -> Result<Verdict, CheckError> {
    if nmax == 0 {
        return Err(CheckError::ZeroBound);
    }
    // Validate the whole size range up front; a cap violation should
    // not surface halfway through a long scan.
    structures(nmax)?;
    let free: Vec<Var> = f.free_vars().into_iter().collect();
    if !free.is_empty() && policy == FreeVarPolicy::Reject {
        return Err(CheckError::FreeVariables(free));
    }
    let mut slots = free.clone();
    let code = compile(f, &mut slots).expect("free variables are pre-assigned slots");

    for n in 1..=nmax {
        let hit = if parallel {
            search_size_parallel(&code, free.len(), n)?
        } else {
            search_size(&code, free.len(), structures(n)?)
        };
        if let Some((structure, values)) = hit {
            let assignment: Assignment = free
                .iter()
                .cloned()
                .zip(values.iter().copied())
                .collect::<Vec<_>>()
                .into_iter()
                .collect();
            let cex = Counterexample {
                structure,
                assignment,
            };
            // Every returned counterexample must falsify the formula
            // under the reference evaluator.
            let recheck = evaluate(&cex.structure, &cex.assignment, f)
                .expect("assignment covers all free variables");
            assert!(
                !recheck,
                "counterexample self-check failed: reported witness satisfies the formula"
            );
            return Ok(Verdict::Counterexample(cex));
        }
    }
    Ok(Verdict::ValidUpTo(nmax))
}

/// Scans one size class; returns the first failing (structure,
/// assignment) in enumeration order.
fn search_size(
    code: &Code,
    free_count: usize,
    structures: StructureEnum,
) -> Option<(FinStructure, Vec<usize>)> {
    for s in structures {
        if let Some(values) = first_failing_assignment(code, free_count, &s) {
            return Some((s, values));
        }
    }
    None
}

#[cfg(feature = "parallel")]
fn search_size_parallel(
    code: &Code,
    free_count: usize,
    n: usize,
) -> Result<Option<(FinStructure, Vec<usize>)>, CheckError> {
    use rayon::prelude::*;
    let all = structures(n)?;
    // Fall back to a plain scan when the size class is small.
    if all.len() < 4096 {
        return Ok(search_size(code, free_count, all));
    }
    let jobs = rayon::current_num_threads().max(1) * 8;
    let chunks = all.chunks(jobs);
    // find_first preserves enumeration order, so the parallel verdict
    // equals the sequential one.
    Ok(chunks
        .into_par_iter()
        .find_map_first(|chunk| search_size(code, free_count, chunk)))
}

#[cfg(not(feature = "parallel"))]
fn search_size_parallel(
    code: &Code,
    free_count: usize,
    n: usize,
) -> Result<Option<(FinStructure, Vec<usize>)>, CheckError> {
    Ok(search_size(code, free_count, structures(n)?))
}

fn first_failing_assignment(
    code: &Code,
    free_count: usize,
    s: &FinStructure,
) -> Option<Vec<usize>> {
    let n = s.size();
    let mut env = vec![0usize; free_count];
    loop {
        if !eval_code(code, s, &mut env) {
            return Some(env);
        }
        // Odometer over the free-variable values, rightmost fastest.
        let mut i = free_count;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
        }
    }
}

/// Checks `f ↔ g` with the shared free variables universally closed.
pub fn check_equiv(f: &Formula, g: &Formula, nmax: usize) -> Result<Verdict, CheckError> {
    check_valid(
        &f.clone().iff(g.clone()),
        nmax,
        FreeVarPolicy::CloseUniversally,
    )
}
