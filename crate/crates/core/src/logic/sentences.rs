//! The axioms, the density condition and a few fixed sentences, as formulas.

use super::Formula;
use crate::order::Axiom;

fn xs(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

fn swapped(v: &[String], i: usize, j: usize) -> Vec<String> {
    let mut w = v.to_vec();
    w.swap(i, j);
    w
}

fn some_equal(v: &[String]) -> Formula {
    let mut eqs = Vec::new();
    for k in 0..v.len() {
        for l in k + 1..v.len() {
            eqs.push(Formula::eq(&v[k], &v[l]));
        }
    }
    Formula::Or(eqs)
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// The universal closure of one axiom, all position pairs conjoined for the
/// two swap axioms.
pub fn axiom(n: usize, which: Axiom) -> Formula {
    let x = xs(n);
    let k = Formula::k(&x);
    let body = match which {
        Axiom::Rotation => {
            let mut r = x[1..].to_vec();
            r.push(x[0].clone());
            Formula::implies(k, Formula::K(r))
        }
        Axiom::SwapExclusion => Formula::And(
            pairs(n)
                .map(|(i, j)| {
                    Formula::iff(
                        Formula::And(vec![k.clone(), Formula::K(swapped(&x, i, j))]),
                        some_equal(&x),
                    )
                })
                .collect(),
        ),
        Axiom::Slot => {
            let slots = (0..n)
                .map(|i| {
                    let mut s = x.clone();
                    s[i] = "t".to_string();
                    Formula::K(s)
                })
                .collect();
            Formula::implies(k, Formula::forall("t", Formula::Or(slots)))
        }
        Axiom::Totality => Formula::And(
            pairs(n)
                .map(|(i, j)| Formula::Or(vec![k.clone(), Formula::K(swapped(&x, i, j))]))
                .collect(),
        ),
    };
    Formula::forall_all(&x, body)
}

/// At least two elements, and every member tuple with distinct first two
/// entries has a fresh `b` with `K(a1, b, a3..)` and `K(b, a2, a3..)`.
pub fn density(n: usize) -> Formula {
    let x = xs(n);
    let mut left = x.clone();
    left[1] = "b".to_string();
    let mut right = x.clone();
    right[0] = "b".to_string();
    let mut witness: Vec<Formula> = x.iter().map(|v| Formula::not(Formula::eq("b", v))).collect();
    witness.push(Formula::K(left));
    witness.push(Formula::K(right));
    let condition = Formula::forall_all(
        &x,
        Formula::implies(
            Formula::And(vec![Formula::k(&x), Formula::not(Formula::eq(&x[0], &x[1]))]),
            Formula::exists("b", Formula::And(witness)),
        ),
    );
    let two = Formula::exists("u", Formula::exists("v", Formula::not(Formula::eq("u", "v"))));
    Formula::And(vec![two, condition])
}

/// Pairwise distinct points on which a tuple and its first transposition
/// both hold; false in any spherical order.
pub fn swap_violation(n: usize) -> Formula {
    let x = xs(n);
    let mut body: Vec<Formula> = pairs(n).map(|(i, j)| Formula::not(Formula::eq(&x[i], &x[j]))).collect();
    body.push(Formula::k(&x));
    body.push(Formula::K(swapped(&x, 0, 1)));
    Formula::exists_all(&x, Formula::And(body))
}
