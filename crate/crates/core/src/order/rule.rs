//! The membership rule shared by every structure in the crate.
//!
//! Only the relative linear order of a tuple's entries matters: a tuple
//! with a repeated entry always holds; for arity 2 a distinct pair holds iff
//! it is increasing; for arity >= 3 a distinct tuple is rotated so that its
//! minimum comes first and holds iff the remaining entries form an even
//! permutation of their sorted order.

/// True iff two entries of `t` coincide (the identification set `I_n`).
pub fn is_identification<T: PartialEq>(t: &[T]) -> bool {
    t.iter().enumerate().any(|(i, x)| t[i + 1..].iter().any(|y| x == y))
}

/// Parity of the permutation sorting `seq`; `true` means odd.
/// Entries are assumed pairwise distinct.
pub fn is_odd_arrangement<T: Ord>(seq: &[T]) -> bool {
    let mut odd = false;
    for (i, x) in seq.iter().enumerate() {
        for y in &seq[i + 1..] {
            if x > y {
                odd = !odd;
            }
        }
    }
    odd
}

/// Position of the least entry.
pub fn argmin<T: Ord>(t: &[T]) -> usize {
    t.iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Evaluates `K_n(t)` where `n = t.len()` on any linearly ordered carrier.
pub fn spherical_rule<T: Ord>(t: &[T]) -> bool {
    if t.len() < 2 || is_identification(t) {
        return true;
    }
    if t.len() == 2 {
        return t[0] < t[1];
    }
    let n = t.len();
    let k = argmin(t);
    // tail of the min-first rotation is t[k+1], ..., t[k+n-1] (indices mod n)
    let at = |i: usize| &t[(k + 1 + i) % n];
    let mut odd = false;
    for i in 0..n - 1 {
        for j in i + 1..n - 1 {
            if at(i) > at(j) {
                odd = !odd;
            }
        }
    }
    !odd
}

/// Rotation of a distinct tuple placing its least entry first.
pub fn min_first_rotation<T: Ord + Clone>(t: &[T]) -> Vec<T> {
    let k = argmin(t);
    t[k..].iter().chain(t[..k].iter()).cloned().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identification_detects_any_repeat() {
        assert!(is_identification(&[1, 2, 1, 3]));
        assert!(!is_identification(&[1, 2, 3, 4]));
        assert!(is_identification(&[5, 5]));
    }

    #[test]
    fn arity_two_is_linear() {
        assert!(spherical_rule(&[1, 2]));
        assert!(!spherical_rule(&[2, 1]));
        assert!(spherical_rule(&[3, 3]));
    }

    #[test]
    fn arity_three_is_circular() {
        assert!(spherical_rule(&[0, 1, 2]));
        assert!(spherical_rule(&[1, 2, 0]));
        assert!(spherical_rule(&[2, 0, 1]));
        assert!(!spherical_rule(&[1, 0, 2]));
        assert!(!spherical_rule(&[0, 2, 1]));
    }

    #[test]
    fn rotation_of_a_distinct_tuple() {
        assert_eq!(min_first_rotation(&[3, 4, 1, 2]), vec![1, 2, 3, 4]);
        assert_eq!(min_first_rotation(&[1, 4, 2, 3]), vec![1, 4, 2, 3]);
    }

    #[test]
    fn parity_of_small_arrangements() {
        assert!(!is_odd_arrangement(&[1, 2, 3]));
        assert!(is_odd_arrangement(&[2, 1, 3]));
        assert!(!is_odd_arrangement(&[2, 3, 1]));
    }
}
