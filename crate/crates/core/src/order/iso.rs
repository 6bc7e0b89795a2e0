use super::{FiniteSphericalOrder, OrderError, Relation};

/// Searches for a relation-preserving bijection `a -> b`.
///
/// Elements of `a` are assigned in index order. After each assignment only
/// the all-distinct tuples that involve the newest element are compared; for
/// arity >= 3 the relation is rotation-closed, so those tuples are taken with
/// the newest element in front, one per rotation orbit.
///
/// Returns `map` with `map[i]` the image of element `i` of `a`.
pub fn are_isomorphic(a: &FiniteSphericalOrder, b: &FiniteSphericalOrder) -> Result<Option<Vec<usize>>, OrderError> {
    if a.arity() != b.arity() {
        return Err(OrderError::ArityMismatch {
            left: a.arity(),
            right: b.arity(),
        });
    }
    if a.len() != b.len() || a.representative_count() != b.representative_count() {
        return Ok(None);
    }
    let mut search = Search {
        a,
        b,
        map: Vec::with_capacity(a.len()),
        used: vec![false; b.len()],
        scratch_a: vec![0; a.arity()],
        scratch_b: vec![0; a.arity()],
    };
    Ok(if search.extend() { Some(search.map) } else { None })
}

struct Search<'a> {
    a: &'a FiniteSphericalOrder,
    b: &'a FiniteSphericalOrder,
    map: Vec<usize>,
    used: Vec<bool>,
    scratch_a: Vec<usize>,
    scratch_b: Vec<usize>,
}

impl Search<'_> {
    fn extend(&mut self) -> bool {
        let next = self.map.len();
        if next == self.a.len() {
            return true;
        }
        for cand in 0..self.b.len() {
            if self.used[cand] {
                continue;
            }
            self.map.push(cand);
            self.used[cand] = true;
            if self.consistent_with_newest() && self.extend() {
                return true;
            }
            self.used[cand] = false;
            self.map.pop();
        }
        false
    }

    /// Checks every all-distinct tuple over mapped elements containing the newest one.
    fn consistent_with_newest(&mut self) -> bool {
        let n = self.a.arity();
        let newest = self.map.len() - 1;
        if newest + 1 < n {
            return true;
        }
        let slots: Vec<usize> = if n == 2 { vec![0, 1] } else { vec![0] };
        let mut rest = Vec::with_capacity(n - 1);
        let mut in_use = vec![false; newest];
        for slot in slots {
            if !self.fill(slot, newest, &mut rest, &mut in_use) {
                return false;
            }
        }
        true
    }

    fn fill(&mut self, slot: usize, newest: usize, rest: &mut Vec<usize>, in_use: &mut [bool]) -> bool {
        let n = self.a.arity();
        if rest.len() == n - 1 {
            let mut k = 0;
            for pos in 0..n {
                let e = if pos == slot {
                    newest
                } else {
                    k += 1;
                    rest[k - 1]
                };
                self.scratch_a[pos] = e;
                self.scratch_b[pos] = self.map[e];
            }
            return self.a.holds(&self.scratch_a) == self.b.holds(&self.scratch_b);
        }
        for e in 0..newest {
            if in_use[e] {
                continue;
            }
            in_use[e] = true;
            rest.push(e);
            let ok = self.fill(slot, newest, rest, in_use);
            rest.pop();
            in_use[e] = false;
            if !ok {
                return false;
            }
        }
        true
    }
}

/// True iff `map` is a bijection preserving membership of every tuple.
pub fn is_isomorphism(a: &FiniteSphericalOrder, b: &FiniteSphericalOrder, map: &[usize]) -> bool {
    if a.arity() != b.arity() || a.len() != b.len() || map.len() != a.len() {
        return false;
    }
    let mut seen = vec![false; b.len()];
    for &x in map {
        if x >= b.len() || std::mem::replace(&mut seen[x], true) {
            return false;
        }
    }
    let mut ok = true;
    let mut image = vec![0; a.arity()];
    super::axioms::for_each_tuple(a.arity(), a.len(), |t| {
        for (slot, &e) in image.iter_mut().zip(t) {
            *slot = map[e];
        }
        ok = a.holds(t) == b.holds(&image);
        ok
    });
    ok
}
