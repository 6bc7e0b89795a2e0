//! Complete atomic diagrams: an equality partition of a variable set plus a
//! spherical order on the classes.
//!
//! Classes are numbered by first occurrence along the sorted variable list,
//! and the class relation is stored as canonical keys of its all-distinct
//! members, so structural equality is diagram equality.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;

use super::{Formula, LogicError};
use crate::dense::{gap_representatives, Rational};
use crate::order::rule::spherical_rule;
use crate::order::{canonical_key, is_identification, FiniteSphericalOrder};

pub const DEFAULT_VARIABLE_BUDGET: usize = 7;

type Relation = BTreeSet<Vec<usize>>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Diagram {
    arity: usize,
    vars: Vec<String>,
    class_of: Vec<usize>,
    relation: Relation,
}

/// Every relabeling of `derive(n, r)` by a bijection classes -> ranks, with
/// the bijections producing it. `ranks[c]` is the rank of class `c`.
struct Labelings {
    by_relation: HashMap<Relation, Vec<Vec<usize>>>,
    ordered: Vec<Relation>,
}

fn pull_back(n: usize, reps: &[Vec<usize>], ranks: &[usize]) -> Relation {
    let mut class_at = vec![0; ranks.len()];
    for (c, &r) in ranks.iter().enumerate() {
        class_at[r] = c;
    }
    reps.iter()
        .map(|t| {
            let u: Vec<usize> = t.iter().map(|&r| class_at[r]).collect();
            canonical_key(n, &u)
        })
        .collect()
}

fn standard_reps(n: usize, r: usize) -> Vec<Vec<usize>> {
    FiniteSphericalOrder::standard(n, r.max(1))
        .expect("arity checked by callers")
        .representatives()
        .map(<[usize]>::to_vec)
        .collect()
}

type LabelingCache = Mutex<HashMap<(usize, usize), Arc<Labelings>>>;

fn labelings(n: usize, r: usize) -> Arc<Labelings> {
    static CACHE: OnceLock<LabelingCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(l) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(n, r)) {
        return Arc::clone(l);
    }
    let reps = if r == 0 { Vec::new() } else { standard_reps(n, r) };
    let mut by_relation: HashMap<Relation, Vec<Vec<usize>>> = HashMap::new();
    let mut ordered = Vec::new();
    for ranks in (0..r).permutations(r) {
        let rel = pull_back(n, &reps, &ranks);
        let entry = by_relation.entry(rel.clone()).or_default();
        if entry.is_empty() {
            ordered.push(rel);
        }
        entry.push(ranks);
    }
    let built = Arc::new(Labelings { by_relation, ordered });
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .entry((n, r))
        .or_insert(built)
        .clone()
}

/// Set partitions of `0..m` as restricted growth strings.
fn partitions(m: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, m: usize, max: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == m {
            out.push(prefix.clone());
            return;
        }
        let limit = if prefix.is_empty() { 0 } else { max + 1 };
        for c in 0..=limit {
            prefix.push(c);
            go(prefix, m, max.max(c), out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(m), m, 0, &mut out);
    out
}

impl Diagram {
    /// The diagram on no variables.
    pub fn empty(n: usize) -> Self {
        Diagram {
            arity: n,
            vars: Vec::new(),
            class_of: Vec::new(),
            relation: Relation::new(),
        }
    }

    /// Builds the canonical form from any class numbering. `relation` lists
    /// all-distinct member tuples over the given class ids.
    fn canonical(n: usize, vars: Vec<(String, usize)>, relation: &Relation) -> Self {
        let mut vars = vars;
        vars.sort();
        let mut renumber: HashMap<usize, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(vars.len());
        for (_, c) in &vars {
            let next = renumber.len();
            class_of.push(*renumber.entry(*c).or_insert(next));
        }
        let relation = relation
            .iter()
            .map(|t| {
                let u: Vec<usize> = t.iter().map(|c| renumber[c]).collect();
                canonical_key(n, &u)
            })
            .collect();
        Diagram {
            arity: n,
            vars: vars.into_iter().map(|(v, _)| v).collect(),
            class_of,
            relation,
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn class_count(&self) -> usize {
        self.class_of.iter().max().map_or(0, |&m| m + 1)
    }

    pub fn class_of(&self, var: &str) -> Option<usize> {
        self.vars
            .binary_search_by(|v| v.as_str().cmp(var))
            .ok()
            .map(|i| self.class_of[i])
    }

    /// Variables of each class, classes in canonical order.
    pub fn classes(&self) -> Vec<Vec<String>> {
        let mut out = vec![Vec::new(); self.class_count()];
        for (v, &c) in self.vars.iter().zip(&self.class_of) {
            out[c].push(v.clone());
        }
        out
    }

    /// The class relation as a finite structure labelled `x=y` style.
    pub fn class_order(&self) -> FiniteSphericalOrder {
        let labels = self.classes().iter().map(|c| c.join("=")).collect();
        FiniteSphericalOrder::from_index_tuples(self.arity, labels, self.relation.iter().cloned())
            .expect("diagram relation is well formed")
    }

    fn holds_classes(&self, t: &[usize]) -> bool {
        is_identification(t) || self.relation.contains(&canonical_key(self.arity, t))
    }

    fn class_or_err(&self, v: &str) -> Result<usize, LogicError> {
        self.class_of(v)
            .ok_or_else(|| LogicError::UnboundVariable(v.to_string()))
    }

    /// Truth of a quantifier-free formula read off the diagram.
    pub fn satisfies(&self, f: &Formula) -> Result<bool, LogicError> {
        Ok(match f {
            Formula::K(vs) => {
                if vs.len() != self.arity {
                    return Err(LogicError::Arity {
                        position: None,
                        expected: self.arity,
                        found: vs.len(),
                    });
                }
                let t = vs.iter().map(|v| self.class_or_err(v)).collect::<Result<Vec<_>, _>>()?;
                self.holds_classes(&t)
            }
            Formula::Eq(a, b) => self.class_or_err(a)? == self.class_or_err(b)?,
            Formula::Not(g) => !self.satisfies(g)?,
            Formula::And(gs) => {
                for g in gs {
                    if !self.satisfies(g)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if self.satisfies(g)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Implies(a, b) => !self.satisfies(a)? || self.satisfies(b)?,
            Formula::Exists(..) | Formula::Forall(..) => return Err(LogicError::NotQuantifierFree),
        })
    }

    /// The diagram induced on a subset of the variables.
    pub fn restrict<S: AsRef<str>>(&self, keep: &[S]) -> Result<Self, LogicError> {
        let mut vars = Vec::new();
        for v in keep {
            let v = v.as_ref();
            vars.push((v.to_string(), self.class_or_err(v)?));
        }
        let kept: BTreeSet<usize> = vars.iter().map(|(_, c)| *c).collect();
        let relation = self
            .relation
            .iter()
            .filter(|t| t.iter().all(|c| kept.contains(c)))
            .cloned()
            .collect();
        Ok(Self::canonical(self.arity, vars, &relation))
    }

    /// Orderings of the classes realizing the relation: `ranks[c]` is the
    /// position of class `c`, and the relation is `derive` pulled back.
    pub fn realizations(&self) -> Vec<Vec<usize>> {
        labelings(self.arity, self.class_count())
            .by_relation
            .get(&self.relation)
            .cloned()
            .unwrap_or_default()
    }

    /// True iff the class relation is a relabeling of `derive(n, r)`.
    pub fn is_consistent(&self) -> bool {
        !self.realizations().is_empty()
    }

    /// All consistent diagrams on `vars + [v]` restricting to `self`.
    pub fn extend(&self, v: &str) -> Result<Vec<Diagram>, LogicError> {
        if self.class_of(v).is_some() {
            return Err(LogicError::NotFresh(v.to_string()));
        }
        let n = self.arity;
        let r = self.class_count();
        let base: Vec<(String, usize)> = self.vars.iter().cloned().zip(self.class_of.iter().copied()).collect();
        let mut out: BTreeSet<Diagram> = BTreeSet::new();
        for c in 0..r {
            let mut vars = base.clone();
            vars.push((v.to_string(), c));
            out.insert(Self::canonical(n, vars, &self.relation));
        }
        let reps = standard_reps(n, r + 1);
        let mut vars = base;
        vars.push((v.to_string(), r));
        for ranks in self.realizations() {
            for pos in 0..=r {
                let mut wider: Vec<usize> = ranks.iter().map(|&k| if k >= pos { k + 1 } else { k }).collect();
                wider.push(pos);
                let rel = pull_back(n, &reps, &wider);
                out.insert(Self::canonical(n, vars.clone(), &rel));
            }
        }
        Ok(out.into_iter().collect())
    }

    /// Rationals realizing the diagram, one per class: class `c` sits at
    /// its rank in the first realization.
    pub fn realize(&self) -> Option<Vec<Rational>> {
        let ranks = self.realizations().into_iter().next()?;
        Some(ranks.iter().map(|&k| Rational::from_integer(k.into())).collect())
    }

    /// For an extension `wider` of this diagram by `v`, a rational for `v`
    /// making `values` (one per class of `self`) plus the new point induce
    /// exactly `wider`. Candidates are the gap representatives of `values`.
    pub fn extension_witness(
        &self,
        values: &[Rational],
        wider: &Diagram,
        v: &str,
    ) -> Result<Option<Rational>, LogicError> {
        let target_class = wider
            .class_of(v)
            .ok_or_else(|| LogicError::UnboundVariable(v.to_string()))?;
        let mut wide_values: Vec<Option<Rational>> = vec![None; wider.class_count()];
        for (var, &c) in self.vars.iter().zip(&self.class_of) {
            let wc = wider.class_or_err(var)?;
            wide_values[wc] = Some(values[c].clone());
        }
        let candidates = match &wide_values[target_class] {
            Some(existing) => vec![existing.clone()],
            None => gap_representatives(values),
        };
        for b in candidates {
            let mut vals = wide_values.clone();
            vals[target_class] = Some(b.clone());
            let vals: Vec<Rational> = vals.into_iter().map(|x| x.expect("every class valued")).collect();
            if induced_relation(wider.arity, &vals) == wider.relation && distinct(&vals) {
                return Ok(Some(b));
            }
        }
        Ok(None)
    }
}

fn distinct(values: &[Rational]) -> bool {
    values.iter().collect::<BTreeSet<_>>().len() == values.len()
}

/// Canonical keys of the all-distinct tuples of class indices whose values
/// satisfy the spherical rule.
fn induced_relation(n: usize, values: &[Rational]) -> Relation {
    let mut out = Relation::new();
    for t in (0..values.len()).permutations(n) {
        let vals: Vec<&Rational> = t.iter().map(|&c| &values[c]).collect();
        if spherical_rule(&vals) {
            out.insert(canonical_key(n, &t));
        }
    }
    out
}

/// All consistent diagrams on `vars`: every equality partition, with every
/// distinct relabeling of `derive(n, r)` on its `r` classes.
pub fn enumerate_diagrams<S: AsRef<str>>(n: usize, vars: &[S], budget: usize) -> Result<Vec<Diagram>, LogicError> {
    if n < 2 {
        return Err(LogicError::InvalidArity(n));
    }
    let mut names: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    names.sort();
    names.dedup();
    if names.len() > budget {
        return Err(LogicError::BudgetExceeded {
            what: "variables",
            limit: budget,
            needed: names.len(),
        });
    }
    let mut out = Vec::new();
    for rgs in partitions(names.len()) {
        let r = rgs.iter().max().map_or(0, |&m| m + 1);
        for rel in &labelings(n, r).ordered {
            out.push(Diagram {
                arity: n,
                vars: names.clone(),
                class_of: rgs.clone(),
                relation: rel.clone(),
            });
        }
    }
    Ok(out)
}

/// [`Diagram::extend`] as a free function.
pub fn extend_diagrams(d: &Diagram, v: &str) -> Result<Vec<Diagram>, LogicError> {
    d.extend(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_variable() {
        assert_eq!(enumerate_diagrams(3, &["x"], 7).unwrap().len(), 1);
        assert_eq!(Diagram::empty(3).extend("x").unwrap().len(), 1);
    }

    #[test]
    fn three_variables_of_arity_three() {
        let ds = enumerate_diagrams(3, &["x", "y", "z"], 7).unwrap();
        assert_eq!(ds.len(), 6);
        let by_classes = ds.iter().map(Diagram::class_count).counts();
        assert_eq!(by_classes[&1], 1);
        assert_eq!(by_classes[&2], 3);
        assert_eq!(by_classes[&3], 2);
    }

    #[test]
    fn partitions_are_bell_numbers() {
        let bell: Vec<usize> = (0..7).map(|m| partitions(m).len()).collect();
        assert_eq!(bell, [1, 1, 2, 5, 15, 52, 203]);
    }

    #[test]
    fn extension_of_two_classes() {
        let two = enumerate_diagrams(3, &["x", "y"], 7)
            .unwrap()
            .into_iter()
            .find(|d| d.class_count() == 2)
            .unwrap();
        let ext = two.extend("z").unwrap();
        let joins = ext.iter().filter(|d| d.class_count() == 2).count();
        let fresh = ext.iter().filter(|d| d.class_count() == 3).count();
        assert_eq!((joins, fresh), (2, 2));
        for e in &ext {
            assert_eq!(e.restrict(&["x", "y"]).unwrap(), two);
        }
    }

    #[test]
    fn extension_matches_filtered_enumeration() {
        for n in 2..=4 {
            let all_xyz = enumerate_diagrams(n, &["x", "y", "z", "w"], 7).unwrap();
            for d in enumerate_diagrams(n, &["x", "y", "z"], 7).unwrap() {
                let ext: BTreeSet<Diagram> = d.extend("w").unwrap().into_iter().collect();
                let filtered: BTreeSet<Diagram> = all_xyz
                    .iter()
                    .filter(|e| e.restrict(&["x", "y", "z"]).unwrap() == d)
                    .cloned()
                    .collect();
                assert_eq!(ext, filtered, "n={n}");
            }
        }
    }

    #[test]
    fn budget_guard() {
        let vars: Vec<String> = (0..8).map(|i| format!("v{i}")).collect();
        assert_eq!(enumerate_diagrams(3, &vars, 7).unwrap_err().code(), "budget_exceeded");
    }

    #[test]
    fn fresh_variable_required() {
        let d = Diagram::empty(3).extend("x").unwrap().remove(0);
        assert_eq!(d.extend("x").unwrap_err().code(), "not_fresh");
    }

    #[test]
    fn atoms_read_off() {
        let d = enumerate_diagrams(3, &["x", "y", "z"], 7)
            .unwrap()
            .into_iter()
            .find(|d| d.class_count() == 3 && d.satisfies(&Formula::k(&["x", "y", "z"])).unwrap())
            .unwrap();
        assert!(!d.satisfies(&Formula::k(&["y", "x", "z"])).unwrap());
        assert!(d.satisfies(&Formula::k(&["y", "z", "x"])).unwrap());
        assert!(!d.satisfies(&Formula::eq("x", "y")).unwrap());
        assert_eq!(
            d.satisfies(&Formula::eq("x", "q")).unwrap_err().code(),
            "unbound_variable"
        );
    }
}
