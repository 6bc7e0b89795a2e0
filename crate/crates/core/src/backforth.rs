//! Back-and-forth construction of an isomorphism between two enumerated
//! dense structures, one pair at a time.
//!
//! Steps alternate. With an even number of pairs, the least-index unmapped
//! source element is matched with the first target element (in enumeration
//! order) that keeps `K_n` preserved in both directions; with an odd number,
//! the roles are exchanged. After `2m` steps the first `m` elements of both
//! enumerations are covered.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use serde::Serialize;
use thiserror::Error;

use crate::dense::{format_rational, DenseOracle, Rational};
use crate::order::rule::spherical_rule;

pub const DEFAULT_SEARCH_BOUND: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BackForthError {
    #[error("arity mismatch: source has arity {source_arity}, target has arity {target_arity}")]
    ArityMismatch { source_arity: usize, target_arity: usize },
    #[error("step {step}: no partner for {element} among the first {bound} candidates")]
    SearchExhausted { step: usize, bound: usize, element: String },
}

impl BackForthError {
    pub fn code(&self) -> &'static str {
        match self {
            BackForthError::ArityMismatch { .. } => "arity_mismatch",
            BackForthError::SearchExhausted { .. } => "search_exhausted",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// New source element, partner searched in the target.
    Forth,
    /// New target element, partner searched in the source.
    Back,
}

/// One matched pair, with enumeration indices on both sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pair {
    pub step: usize,
    pub direction: Direction,
    pub source_index: usize,
    pub target_index: usize,
    pub source: Rational,
    pub target: Rational,
}

#[derive(Serialize)]
struct PairRecord<'a> {
    step: usize,
    direction: Direction,
    a_index: usize,
    b_index: usize,
    a: &'a str,
    b: &'a str,
}

impl Pair {
    /// One JSON object, used for `--trace` output.
    pub fn to_json_line(&self) -> String {
        let a = format_rational(&self.source);
        let b = format_rational(&self.target);
        serde_json::to_string(&PairRecord {
            step: self.step,
            direction: self.direction,
            a_index: self.source_index,
            b_index: self.target_index,
            a: &a,
            b: &b,
        })
        .expect("plain record")
    }
}

/// A tuple on which the map fails to preserve `K_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub source_tuple: Vec<Rational>,
    pub target_tuple: Vec<Rational>,
}

/// A finite partial isomorphism between two dense oracles.
#[derive(Debug, Clone)]
pub struct PartialIso {
    source: DenseOracle,
    target: DenseOracle,
    pairs: Vec<Pair>,
    forward: HashMap<usize, usize>,
    backward: HashMap<usize, usize>,
    source_cursor: usize,
    target_cursor: usize,
}

/// Ranks of `values` in increasing order (values are pairwise distinct).
fn ranks(values: &[&Rational]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].cmp(values[j]));
    let mut rank = vec![0; values.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    rank
}

/// Sorted view of one side of the map, to place a candidate by binary search.
struct Side<'a> {
    rank: Vec<usize>,
    sorted: Vec<&'a Rational>,
}

impl<'a> Side<'a> {
    fn new(values: Vec<&'a Rational>) -> Self {
        let rank = ranks(&values);
        let mut sorted = values.clone();
        sorted.sort();
        Side { rank, sorted }
    }

    /// Ranks of the existing values and of `x` in `values + [x]`, or `None`
    /// when `x` is already present.
    fn ranks_with(&self, x: &Rational) -> Option<(Vec<usize>, usize)> {
        let pos = match self.sorted.binary_search_by(|v| (*v).cmp(x)) {
            Ok(_) => return None,
            Err(p) => p,
        };
        let shifted = self.rank.iter().map(|&r| if r >= pos { r + 1 } else { r }).collect();
        Some((shifted, pos))
    }
}

/// Which order patterns a map may induce on an n-subset. Pattern `p` says
/// the subset element of source rank `j` has target rank `p[j]`; it is
/// allowed iff `K_n` agrees on every ordering of the subset. Built by brute
/// force over all `n! * n!` orderings.
struct PatternTable {
    n: usize,
    allowed: Vec<bool>,
}

/// Index of a permutation of `0..p.len()` in lexicographic order.
fn lehmer(p: &[usize]) -> usize {
    let mut code = 0;
    for i in 0..p.len() {
        let smaller = p[i + 1..].iter().filter(|&&x| x < p[i]).count();
        code = code * (p.len() - i) + smaller;
    }
    code
}

impl PatternTable {
    fn build(n: usize) -> Self {
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let mut allowed = vec![false; perms.len()];
        for p in &perms {
            let ok = perms.iter().all(|t| {
                let image: Vec<usize> = t.iter().map(|&r| p[r]).collect();
                spherical_rule(t) == spherical_rule(&image)
            });
            allowed[lehmer(p)] = ok;
        }
        PatternTable { n, allowed }
    }

    fn get(n: usize) -> Arc<PatternTable> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<PatternTable>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
        Arc::clone(guard.entry(n).or_insert_with(|| Arc::new(PatternTable::build(n))))
    }

    /// Whether the subset `members` (indices into the rank vectors) keeps
    /// its relation under the map. `scratch` holds at least `n` pairs.
    fn subset_ok(&self, members: &[usize], left: &[usize], right: &[usize], scratch: &mut [(usize, usize)]) -> bool {
        let s = &mut scratch[..self.n];
        for (slot, &e) in s.iter_mut().zip(members) {
            *slot = (left[e], right[e]);
        }
        s.sort_unstable();
        let mut p = [0usize; MAX_TABLE_ARITY];
        for i in 0..self.n {
            p[i] = s.iter().filter(|x| x.1 < s[i].1).count();
        }
        self.allowed[lehmer(&p[..self.n])]
    }
}

const MAX_TABLE_ARITY: usize = 7;

/// Calls `f` on every n-subset of `0..d` that contains `must` (when given),
/// in lexicographic order, until `f` returns `false`. Returns whether it
/// ran to the end.
fn for_each_subset(n: usize, d: usize, must: Option<usize>, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let pool: Vec<usize> = (0..d).filter(|&e| Some(e) != must).collect();
    let k = if must.is_some() { n - 1 } else { n };
    if k > pool.len() {
        return true;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut members = vec![0; n];
    loop {
        for (slot, &i) in members.iter_mut().zip(&idx) {
            *slot = pool[i];
        }
        if let Some(m) = must {
            members[n - 1] = m;
        }
        if !f(&members) {
            return false;
        }
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if idx[i] < pool.len() - k + i {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// First n-subset (containing `must`, if given) whose relation the map
/// changes. `left` and `right` are rank vectors of the two sides.
fn bad_subset(n: usize, left: &[usize], right: &[usize], must: Option<usize>) -> Option<Vec<usize>> {
    let mut found = None;
    if n <= MAX_TABLE_ARITY {
        let table = PatternTable::get(n);
        let mut scratch = vec![(0, 0); n];
        for_each_subset(n, left.len(), must, |s| {
            if table.subset_ok(s, left, right, &mut scratch) {
                true
            } else {
                found = Some(s.to_vec());
                false
            }
        });
    } else {
        for_each_subset(n, left.len(), must, |s| {
            let ok = s.iter().copied().permutations(n).all(|t| {
                let l: Vec<usize> = t.iter().map(|&e| left[e]).collect();
                let r: Vec<usize> = t.iter().map(|&e| right[e]).collect();
                spherical_rule(&l) == spherical_rule(&r)
            });
            if !ok {
                found = Some(s.to_vec());
            }
            ok
        });
    }
    found
}

/// An ordering of `subset` on which the two sides disagree.
fn witness_ordering(n: usize, subset: &[usize], left: &[usize], right: &[usize]) -> Vec<usize> {
    subset
        .iter()
        .copied()
        .permutations(n)
        .find(|t| {
            let l: Vec<usize> = t.iter().map(|&e| left[e]).collect();
            let r: Vec<usize> = t.iter().map(|&e| right[e]).collect();
            spherical_rule(&l) != spherical_rule(&r)
        })
        .expect("a bad subset has a disagreeing ordering")
}

impl PartialIso {
    pub fn new(source: DenseOracle, target: DenseOracle) -> Result<Self, BackForthError> {
        if source.arity() != target.arity() {
            return Err(BackForthError::ArityMismatch {
                source_arity: source.arity(),
                target_arity: target.arity(),
            });
        }
        Ok(PartialIso {
            source,
            target,
            pairs: Vec::new(),
            forward: HashMap::new(),
            backward: HashMap::new(),
            source_cursor: 0,
            target_cursor: 0,
        })
    }

    pub fn arity(&self) -> usize {
        self.source.arity()
    }

    pub fn source(&self) -> &DenseOracle {
        &self.source
    }

    pub fn target(&self) -> &DenseOracle {
        &self.target
    }

    pub fn pairs(&self) -> &[Pair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.pairs.len()
    }

    /// Image of the source element with enumeration index `i`.
    pub fn image_of(&self, i: usize) -> Option<usize> {
        self.forward.get(&i).copied()
    }

    pub fn preimage_of(&self, j: usize) -> Option<usize> {
        self.backward.get(&j).copied()
    }

    /// Adds one pair. `search_bound` caps how many enumerated candidates are
    /// examined on the searched side.
    pub fn step(&mut self, search_bound: usize) -> Result<&Pair, BackForthError> {
        let step = self.pairs.len();
        let direction = if step.is_multiple_of(2) {
            Direction::Forth
        } else {
            Direction::Back
        };
        let (fixed_oracle, search_oracle, fixed_map, search_map, cursor) = match direction {
            Direction::Forth => (
                &self.source,
                &self.target,
                &self.forward,
                &self.backward,
                &mut self.source_cursor,
            ),
            Direction::Back => (
                &self.target,
                &self.source,
                &self.backward,
                &self.forward,
                &mut self.target_cursor,
            ),
        };
        while fixed_map.contains_key(cursor) {
            *cursor += 1;
        }
        let fixed_index = *cursor;
        let fixed_value = fixed_oracle.element_at(fixed_index);

        let n = self.source.arity();
        // current pairs as (fixed side, searched side)
        let (fixed_vals, search_vals): (Vec<Rational>, Vec<Rational>) = self
            .pairs
            .iter()
            .map(|p| match direction {
                Direction::Forth => (p.source.clone(), p.target.clone()),
                Direction::Back => (p.target.clone(), p.source.clone()),
            })
            .unzip();
        let fixed_side = Side::new(fixed_vals.iter().collect());
        let search_side = Side::new(search_vals.iter().collect());
        let (mut left, fresh_left) = fixed_side
            .ranks_with(&fixed_value)
            .expect("least unmapped element is not in the domain");
        left.push(fresh_left);

        // grow the scanned prefix geometrically so cheap steps stay cheap
        let mut found = None;
        let mut start = 0;
        let mut end = search_bound.min(64);
        while found.is_none() && start < end {
            found = search_oracle.with_prefix(end, |candidates| {
                candidates[start..end].iter().enumerate().find_map(|(k, y)| {
                    let j = start + k;
                    if search_map.contains_key(&j) {
                        return None;
                    }
                    let (mut right, fresh_right) = search_side.ranks_with(y)?;
                    right.push(fresh_right);
                    bad_subset(n, &left, &right, Some(left.len() - 1))
                        .is_none()
                        .then(|| (j, y.clone()))
                })
            });
            start = end;
            end = search_bound.min(end.saturating_mul(2));
        }
        let Some((found_index, found_value)) = found else {
            return Err(BackForthError::SearchExhausted {
                step,
                bound: search_bound,
                element: format_rational(&fixed_value),
            });
        };

        let pair = match direction {
            Direction::Forth => Pair {
                step,
                direction,
                source_index: fixed_index,
                target_index: found_index,
                source: fixed_value,
                target: found_value,
            },
            Direction::Back => Pair {
                step,
                direction,
                source_index: found_index,
                target_index: fixed_index,
                source: found_value,
                target: fixed_value,
            },
        };
        self.forward.insert(pair.source_index, pair.target_index);
        self.backward.insert(pair.target_index, pair.source_index);
        self.pairs.push(pair);
        Ok(self.pairs.last().expect("just pushed"))
    }

    fn rank_vectors(&self) -> (Vec<usize>, Vec<usize>) {
        let src: Vec<&Rational> = self.pairs.iter().map(|p| &p.source).collect();
        let dst: Vec<&Rational> = self.pairs.iter().map(|p| &p.target).collect();
        (ranks(&src), ranks(&dst))
    }

    fn violation_from(&self, subset: &[usize], left: &[usize], right: &[usize]) -> Violation {
        let t = witness_ordering(self.arity(), subset, left, right);
        Violation {
            source_tuple: t.iter().map(|&e| self.pairs[e].source.clone()).collect(),
            target_tuple: t.iter().map(|&e| self.pairs[e].target.clone()).collect(),
        }
    }

    /// A tuple over the domain on which `K_n` and its image disagree.
    ///
    /// Tuples with a repeated entry hold on both sides, and the relation on
    /// distinct entries depends only on their order pattern, so this checks
    /// each n-subset against the table of preserved patterns. Equivalent to
    /// [`Self::find_violation_exhaustive`].
    pub fn find_violation(&self) -> Option<Violation> {
        let (left, right) = self.rank_vectors();
        let subset = bad_subset(self.arity(), &left, &right, None)?;
        Some(self.violation_from(&subset, &left, &right))
    }

    /// As [`Self::find_violation`], restricted to tuples that use the pair
    /// added at step `step`. If the map before that step was preserving,
    /// this decides whether it still is.
    pub fn violation_involving(&self, step: usize) -> Option<Violation> {
        let (left, right) = self.rank_vectors();
        let subset = bad_subset(self.arity(), &left, &right, Some(step))?;
        Some(self.violation_from(&subset, &left, &right))
    }

    /// Compares `K_n` on every one of the `d^n` tuples over the domain with
    /// its image; the first disagreement in lexicographic order.
    pub fn find_violation_exhaustive(&self) -> Option<Violation> {
        let n = self.arity();
        let (src_rank, dst_rank) = self.rank_vectors();
        let mut bad = None;
        let mut lt = vec![0; n];
        let mut rt = vec![0; n];
        crate::order::for_each_tuple(n, self.pairs.len(), |t| {
            for (k, &e) in t.iter().enumerate() {
                lt[k] = src_rank[e];
                rt[k] = dst_rank[e];
            }
            if spherical_rule(&lt) != spherical_rule(&rt) {
                bad = Some(Violation {
                    source_tuple: t.iter().map(|&e| self.pairs[e].source.clone()).collect(),
                    target_tuple: t.iter().map(|&e| self.pairs[e].target.clone()).collect(),
                });
                return false;
            }
            true
        });
        bad
    }

    /// True iff, with `2m` or `2m + 1` pairs, the first `m` elements of both
    /// enumerations are mapped (and `a_m` too when the count is odd).
    pub fn coverage_holds(&self) -> bool {
        let k = self.pairs.len();
        let m = k / 2;
        let src_needed = if k % 2 == 1 { m + 1 } else { m };
        (0..src_needed).all(|i| self.forward.contains_key(&i)) && (0..m).all(|j| self.backward.contains_key(&j))
    }

    /// Injectivity of the stored pairs on both sides.
    pub fn is_injective(&self) -> bool {
        self.forward.len() == self.pairs.len() && self.backward.len() == self.pairs.len()
    }
}

/// Builds a partial isomorphism by `steps` alternating steps.
pub fn run(
    source: DenseOracle,
    target: DenseOracle,
    steps: usize,
    search_bound: usize,
) -> Result<PartialIso, BackForthError> {
    run_with(source, target, steps, search_bound, |_| {})
}

/// As [`run`], calling `on_pair` after each added pair.
pub fn run_with(
    source: DenseOracle,
    target: DenseOracle,
    steps: usize,
    search_bound: usize,
    mut on_pair: impl FnMut(&Pair),
) -> Result<PartialIso, BackForthError> {
    let mut iso = PartialIso::new(source, target)?;
    for _ in 0..steps {
        let pair = iso.step(search_bound)?;
        on_pair(pair);
    }
    Ok(iso)
}

/// Orders two rationals; exposed for callers that sort pair lists.
pub fn compare(a: &Rational, b: &Rational) -> Ordering {
    a.cmp(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_step_pairs_the_first_elements() {
        let a = DenseOracle::canonical(3).unwrap();
        let b = DenseOracle::seeded(3, 5).unwrap();
        let b0 = b.element_at(0);
        let mut iso = PartialIso::new(a, b).unwrap();
        let p = iso.step(DEFAULT_SEARCH_BOUND).unwrap().clone();
        assert_eq!((p.source_index, p.target_index), (0, 0));
        assert_eq!(p.target, b0);
    }

    #[test]
    fn zero_steps_is_empty() {
        let iso = run(
            DenseOracle::canonical(3).unwrap(),
            DenseOracle::canonical(3).unwrap(),
            0,
            DEFAULT_SEARCH_BOUND,
        )
        .unwrap();
        assert!(iso.is_empty());
        assert!(iso.coverage_holds());
    }

    #[test]
    fn arity_mismatch() {
        let err = run(
            DenseOracle::canonical(2).unwrap(),
            DenseOracle::canonical(3).unwrap(),
            4,
            DEFAULT_SEARCH_BOUND,
        )
        .unwrap_err();
        assert_eq!(err.code(), "arity_mismatch");
    }

    #[test]
    fn two_steps_cover_the_first_elements() {
        let iso = run(
            DenseOracle::seeded(3, 1).unwrap(),
            DenseOracle::seeded(3, 2).unwrap(),
            2,
            DEFAULT_SEARCH_BOUND,
        )
        .unwrap();
        assert!(iso.image_of(0).is_some());
        assert!(iso.preimage_of(0).is_some());
        assert!(iso.coverage_holds());
    }

    #[test]
    fn linear_runs_are_order_preserving() {
        let iso = run(
            DenseOracle::seeded(2, 11).unwrap(),
            DenseOracle::seeded(2, 12).unwrap(),
            60,
            DEFAULT_SEARCH_BOUND,
        )
        .unwrap();
        for p in iso.pairs() {
            for q in iso.pairs() {
                assert_eq!(p.source.cmp(&q.source), p.target.cmp(&q.target));
            }
        }
    }

    #[test]
    fn tiny_bound_exhausts() {
        let mut iso = PartialIso::new(DenseOracle::canonical(2).unwrap(), DenseOracle::canonical(2).unwrap()).unwrap();
        iso.step(DEFAULT_SEARCH_BOUND).unwrap();
        // 0 -> 0; the back step for 1 needs a source element above 0 other than index 0
        let err = iso.step(1).unwrap_err();
        assert_eq!(err.code(), "search_exhausted");
    }

    #[test]
    fn trace_lines_are_json() {
        let iso = run(
            DenseOracle::canonical(3).unwrap(),
            DenseOracle::seeded(3, 3).unwrap(),
            3,
            DEFAULT_SEARCH_BOUND,
        )
        .unwrap();
        let line = iso.pairs()[0].to_json_line();
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["step"], 0);
        assert_eq!(v["direction"], "forth");
        assert_eq!(v["a"], "0/1");
    }

    fn allowed_patterns(n: usize) -> Vec<Vec<usize>> {
        let table = PatternTable::build(n);
        (0..n).permutations(n).filter(|p| table.allowed[lehmer(p)]).collect()
    }

    #[test]
    fn preserved_patterns() {
        assert_eq!(allowed_patterns(2), vec![vec![0, 1]]);
        // the cyclic shifts
        assert_eq!(allowed_patterns(3), vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        assert_eq!(
            allowed_patterns(4),
            vec![vec![0, 1, 2, 3], vec![0, 2, 3, 1], vec![0, 3, 1, 2]]
        );
        assert_eq!(allowed_patterns(5).len(), 60);
    }

    #[test]
    fn lehmer_codes_are_a_bijection() {
        let codes: Vec<usize> = (0..4).permutations(4).map(|p| lehmer(&p)).collect();
        assert_eq!(codes, (0..24).collect::<Vec<_>>());
    }

    #[test]
    fn subset_check_agrees_with_exhaustive() {
        for n in 2..=5 {
            let mut iso = run(
                DenseOracle::seeded(n, 7).unwrap(),
                DenseOracle::seeded(n, 8).unwrap(),
                12,
                DEFAULT_SEARCH_BOUND,
            )
            .unwrap();
            assert!(iso.find_violation().is_none());
            assert!(iso.find_violation_exhaustive().is_none());
            for k in 0..iso.len() {
                assert!(iso.violation_involving(k).is_none());
            }
            // swap two targets: most such maps break the relation
            let (a, b) = (2, 5);
            let ta = iso.pairs[a].target.clone();
            iso.pairs[a].target = iso.pairs[b].target.clone();
            iso.pairs[b].target = ta;
            let fast = iso.find_violation();
            let slow = iso.find_violation_exhaustive();
            assert_eq!(fast.is_some(), slow.is_some(), "n = {n}");
            if let Some(v) = fast {
                let l: Vec<usize> = ranks(&v.source_tuple.iter().collect::<Vec<_>>());
                let r: Vec<usize> = ranks(&v.target_tuple.iter().collect::<Vec<_>>());
                assert_ne!(spherical_rule(&l), spherical_rule(&r));
            }
        }
    }
}
