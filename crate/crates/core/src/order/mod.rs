//! Explicit finite n-spherical orders.

mod axioms;
mod enumerate;
pub mod io;
mod iso;
pub mod rule;

use std::collections::{BTreeSet, HashMap, HashSet};

use itertools::Itertools;
use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

pub(crate) use axioms::for_each_tuple;
pub use axioms::{check_axioms, Axiom, AxiomOutcome, AxiomReport, Counterexample};
pub use enumerate::{enumerate_all_orders, OrderCensus};
pub use iso::{are_isomorphic, is_isomorphism};
pub use rule::{is_identification, spherical_rule};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(usize),
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown element label `{0}`")]
    UnknownLabel(String),
    #[error("tuple has length {found}, expected {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("tuple {0:?} has a repeated entry; such tuples are implied and may not be listed")]
    RepeatedEntry(Vec<String>),
    #[error("domain size {m} is smaller than arity {n}")]
    DomainTooSmall { n: usize, m: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("operation needs about {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },
}

impl OrderError {
    pub fn code(&self) -> &'static str {
        match self {
            OrderError::InvalidArity(_) => "invalid_arity",
            OrderError::DuplicateLabel(_) => "duplicate_label",
            OrderError::UnknownLabel(_) => "unknown_label",
            OrderError::TupleLength { .. } => "tuple_length",
            OrderError::RepeatedEntry(_) => "repeated_entry",
            OrderError::DomainTooSmall { .. } => "domain_too_small",
            OrderError::ArityMismatch { .. } => "arity_mismatch",
            OrderError::BudgetExceeded { .. } => "budget_exceeded",
        }
    }
}

/// An n-ary relation on the domain `0..domain_size()`.
pub trait Relation {
    fn arity(&self) -> usize;
    fn domain_size(&self) -> usize;
    /// Membership of a tuple of domain indices.
    fn holds(&self, t: &[usize]) -> bool;
}

/// A finite n-spherical order on a labeled domain.
///
/// Only all-distinct member tuples are stored, one canonical representative
/// per rotation class (least index first). Tuples with a repeated entry hold
/// by rule. For arity 2 a rotation is a swap, so pairs are stored literally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSphericalOrder {
    arity: usize,
    elements: Vec<String>,
    index: HashMap<String, usize>,
    distinct: BTreeSet<Vec<usize>>,
}

fn check_arity(n: usize) -> Result<(), OrderError> {
    if n < 2 {
        Err(OrderError::InvalidArity(n))
    } else {
        Ok(())
    }
}

fn build_index(elements: &[String]) -> Result<HashMap<String, usize>, OrderError> {
    let mut index = HashMap::with_capacity(elements.len());
    for (i, e) in elements.iter().enumerate() {
        if index.insert(e.clone(), i).is_some() {
            return Err(OrderError::DuplicateLabel(e.clone()));
        }
    }
    Ok(index)
}

/// Even permutations of `items`, in lexicographic order of positions.
fn even_arrangements(items: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    (0..items.len())
        .permutations(items.len())
        .filter(|p| !rule::is_odd_arrangement(p))
        .map(move |p| p.into_iter().map(|i| items[i]).collect())
}

impl FiniteSphericalOrder {
    /// Builds the spherical order on `labels`, using the list order as the
    /// underlying linear order.
    ///
    /// For every n-element subset, the generators are the tuples starting
    /// with the subset's least element whose remaining entries form an even
    /// permutation of the rest; the relation is their rotation closure. For
    /// fewer than `n` labels the distinct part is empty.
    pub fn derive<S: AsRef<str>>(n: usize, labels: &[S]) -> Result<Self, OrderError> {
        check_arity(n)?;
        let elements: Vec<String> = labels.iter().map(|s| s.as_ref().to_owned()).collect();
        let index = build_index(&elements)?;
        let mut distinct = BTreeSet::new();
        for subset in (0..elements.len()).combinations(n) {
            if n == 2 {
                distinct.insert(subset);
                continue;
            }
            let (head, rest) = subset.split_first().expect("n >= 3");
            for tail in even_arrangements(rest) {
                let mut t = Vec::with_capacity(n);
                t.push(*head);
                t.extend(tail);
                distinct.insert(t);
            }
        }
        Ok(FiniteSphericalOrder {
            arity: n,
            elements,
            index,
            distinct,
        })
    }

    /// `derive` on the labels `"1"`, ..., `"m"`.
    pub fn standard(n: usize, m: usize) -> Result<Self, OrderError> {
        let labels: Vec<String> = (1..=m).map(|i| i.to_string()).collect();
        Self::derive(n, &labels)
    }

    /// Builds a structure from explicitly listed all-distinct member tuples
    /// (domain indices). For arity >= 3 any rotation of a tuple may be given.
    pub fn from_index_tuples<I>(n: usize, elements: Vec<String>, tuples: I) -> Result<Self, OrderError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        check_arity(n)?;
        let index = build_index(&elements)?;
        let mut distinct = BTreeSet::new();
        for t in tuples {
            if t.len() != n {
                return Err(OrderError::TupleLength {
                    expected: n,
                    found: t.len(),
                });
            }
            if let Some(&bad) = t.iter().find(|&&i| i >= elements.len()) {
                return Err(OrderError::UnknownLabel(format!("#{bad}")));
            }
            if is_identification(&t) {
                return Err(OrderError::RepeatedEntry(
                    t.iter().map(|&i| elements[i].clone()).collect(),
                ));
            }
            distinct.insert(canonical_key(n, &t));
        }
        Ok(FiniteSphericalOrder {
            arity: n,
            elements,
            index,
            distinct,
        })
    }

    /// Same as [`from_index_tuples`](Self::from_index_tuples) with tuples of labels.
    pub fn from_labeled_tuples<S: AsRef<str>>(
        n: usize,
        elements: Vec<String>,
        tuples: &[Vec<S>],
    ) -> Result<Self, OrderError> {
        let index = build_index(&elements)?;
        let mut indexed = Vec::with_capacity(tuples.len());
        for t in tuples {
            let row = t
                .iter()
                .map(|l| {
                    index
                        .get(l.as_ref())
                        .copied()
                        .ok_or_else(|| OrderError::UnknownLabel(l.as_ref().to_owned()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            indexed.push(row);
        }
        Self::from_index_tuples(n, elements, indexed)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Stored canonical representatives, in lexicographic index order.
    pub fn representatives(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.distinct.iter().map(Vec::as_slice)
    }

    pub fn representative_count(&self) -> usize {
        self.distinct.len()
    }

    /// Membership of a tuple of element labels.
    pub fn membership<S: AsRef<str>>(&self, t: &[S]) -> Result<bool, OrderError> {
        if t.len() != self.arity {
            return Err(OrderError::TupleLength {
                expected: self.arity,
                found: t.len(),
            });
        }
        let idx = t
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| OrderError::UnknownLabel(l.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.holds(&idx))
    }

    /// Number of tuples in the full relation, identifications included.
    pub fn relation_size(&self) -> BigUint {
        let n = self.arity;
        let m = self.len();
        let rotations = if n == 2 { 1 } else { n };
        let all = BigUint::from(m).pow(n as u32);
        let distinct_total = falling_factorial(m, n);
        all - distinct_total + BigUint::from(self.distinct.len()) * BigUint::from(rotations)
    }

    /// The substructure induced on `subset` (domain indices, kept in the given order).
    pub fn restrict(&self, subset: &[usize]) -> Result<Self, OrderError> {
        let elements: Vec<String> = subset
            .iter()
            .map(|&i| {
                self.elements
                    .get(i)
                    .cloned()
                    .ok_or_else(|| OrderError::UnknownLabel(format!("#{i}")))
            })
            .collect::<Result<_, _>>()?;
        let tuples = subset
            .iter()
            .enumerate()
            .permutations(self.arity.min(subset.len()))
            .filter(|p| p.len() == self.arity)
            .filter(|p| self.holds(&p.iter().map(|(_, &g)| g).collect::<Vec<_>>()))
            .map(|p| p.iter().map(|(local, _)| *local).collect::<Vec<_>>());
        Self::from_index_tuples(self.arity, elements, tuples)
    }

    /// Image of this structure under `perm`: element `i` is renamed to
    /// position `perm[i]`; labels are taken from `labels`.
    pub fn relabel(&self, perm: &[usize], labels: Vec<String>) -> Result<Self, OrderError> {
        let tuples = self
            .all_distinct_members()
            .into_iter()
            .map(|t| t.iter().map(|&i| perm[i]).collect::<Vec<_>>());
        Self::from_index_tuples(self.arity, labels, tuples)
    }

    /// Every all-distinct member tuple (all rotations expanded).
    pub fn all_distinct_members(&self) -> Vec<Vec<usize>> {
        let n = self.arity;
        let mut out = Vec::new();
        for rep in &self.distinct {
            if n == 2 {
                out.push(rep.clone());
                continue;
            }
            for k in 0..n {
                out.push(rep[k..].iter().chain(rep[..k].iter()).copied().collect());
            }
        }
        out
    }

    /// Set of stored representatives; two structures on the same domain are
    /// equal as relations iff these coincide.
    pub fn distinct_part(&self) -> &BTreeSet<Vec<usize>> {
        &self.distinct
    }
}

impl Relation for FiniteSphericalOrder {
    fn arity(&self) -> usize {
        self.arity
    }

    fn domain_size(&self) -> usize {
        self.elements.len()
    }

    fn holds(&self, t: &[usize]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        if is_identification(t) {
            return true;
        }
        self.distinct.contains(&canonical_key(self.arity, t))
    }
}

/// Storage key of an all-distinct tuple.
pub(crate) fn canonical_key(n: usize, t: &[usize]) -> Vec<usize> {
    if n == 2 {
        t.to_vec()
    } else {
        rule::min_first_rotation(t)
    }
}

/// An arbitrary relation given by its all-distinct members; tuples with a
/// repeated entry hold by rule. Used to exercise the axiom checker on
/// structures that are not spherical orders.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExplicitRelation {
    arity: usize,
    domain_size: usize,
    members: HashSet<Vec<usize>>,
}

impl ExplicitRelation {
    pub fn new<I>(arity: usize, domain_size: usize, members: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        ExplicitRelation {
            arity,
            domain_size,
            members: members.into_iter().collect(),
        }
    }
}

impl Relation for ExplicitRelation {
    fn arity(&self) -> usize {
        self.arity
    }

    fn domain_size(&self) -> usize {
        self.domain_size
    }

    fn holds(&self, t: &[usize]) -> bool {
        is_identification(t) || self.members.contains(t)
    }
}

/// `m (m-1) ... (m-n+1)`, zero when `n > m`.
pub fn falling_factorial(m: usize, n: usize) -> BigUint {
    if n > m {
        return BigUint::zero();
    }
    (m - n + 1..=m).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

/// Closed-form size of the spherical order of arity `n` on `m` points:
/// `m^n - m!/(m-n)!/2`.
pub fn cardinality_formula(n: usize, m: usize) -> Result<BigUint, OrderError> {
    check_arity(n)?;
    if m < n {
        return Err(OrderError::DomainTooSmall { n, m });
    }
    Ok(BigUint::from(m).pow(n as u32) - falling_factorial(m, n) / BigUint::from(2u8))
}
