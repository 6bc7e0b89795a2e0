//! Exhaustive verification of the four spherical-order axioms.
//!
//! - `nso1`: `K(x1,...,xn) -> K(x2,...,xn,x1)`
//! - `nso2`: for every `i < j`, `K(x) and K(swap_ij x)` iff some two entries coincide
//! - `nso3`: `K(x) -> forall t, OR_i K(x with t in slot i)`
//! - `nso4`: for every `i < j`, `K(x) or K(swap_ij x)`

use serde::Serialize;

use super::{OrderError, Relation};
use crate::budget::Budget;
use crate::order::rule::is_identification;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    #[serde(rename = "nso1")]
    Rotation,
    #[serde(rename = "nso2")]
    SwapExclusion,
    #[serde(rename = "nso3")]
    Slot,
    #[serde(rename = "nso4")]
    Totality,
}

impl Axiom {
    pub const ALL: [Axiom; 4] = [Axiom::Rotation, Axiom::SwapExclusion, Axiom::Slot, Axiom::Totality];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Rotation => "nso1",
            Axiom::SwapExclusion => "nso2",
            Axiom::Slot => "nso3",
            Axiom::Totality => "nso4",
        }
    }
}

/// A concrete instance on which an axiom fails (domain indices, 0-based positions).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Counterexample {
    /// `tuple` holds but its left rotation does not.
    Rotation { tuple: Vec<usize> },
    /// Membership of both `tuple` and its `(i, j)` swap disagrees with identification.
    Swap { tuple: Vec<usize>, i: usize, j: usize },
    /// `tuple` holds, yet `element` fits in none of its slots.
    Slot { tuple: Vec<usize>, element: usize },
    /// Neither `tuple` nor its `(i, j)` swap holds.
    Totality { tuple: Vec<usize>, i: usize, j: usize },
}

impl Counterexample {
    pub fn tuple(&self) -> &[usize] {
        match self {
            Counterexample::Rotation { tuple }
            | Counterexample::Swap { tuple, .. }
            | Counterexample::Slot { tuple, .. }
            | Counterexample::Totality { tuple, .. } => tuple,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomOutcome {
    pub axiom: Axiom,
    pub passed: bool,
    /// Number of instances examined.
    pub checked: u64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub arity: usize,
    pub domain_size: usize,
    pub tuples_examined: u64,
    pub outcomes: Vec<AxiomOutcome>,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn outcome(&self, axiom: Axiom) -> &AxiomOutcome {
        self.outcomes
            .iter()
            .find(|o| o.axiom == axiom)
            .expect("report covers every axiom")
    }

    pub fn failed(&self) -> impl Iterator<Item = &AxiomOutcome> + '_ {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

/// Calls `f` on every tuple in `0..m` to the `n`, in lexicographic order,
/// stopping early when `f` returns `false`.
pub(crate) fn for_each_tuple(n: usize, m: usize, mut f: impl FnMut(&[usize]) -> bool) {
    if m == 0 && n > 0 {
        return;
    }
    let mut cur = vec![0usize; n];
    loop {
        if !f(&cur) {
            return;
        }
        let mut pos = n;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < m {
                break;
            }
            cur[pos] = 0;
        }
    }
}

fn swapped(t: &[usize], i: usize, j: usize) -> Vec<usize> {
    let mut s = t.to_vec();
    s.swap(i, j);
    s
}

/// Tests all four axioms exhaustively on `rel`.
///
/// Every one of the `m^n` tuples is examined for `nso1`, `nso2`, `nso4`, and
/// every (tuple, element) pair for `nso3`. The first counterexample found for
/// each axiom (in lexicographic tuple order) is reported.
pub fn check_axioms<R: Relation + ?Sized>(rel: &R, budget: Budget) -> Result<AxiomReport, OrderError> {
    let n = rel.arity();
    let m = rel.domain_size();
    let pairs = (n * (n - 1) / 2) as u128;
    let tuples = (m as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    let needed = tuples.saturating_mul(2 + 2 * pairs + (m as u128) * (n as u128));
    if !budget.allows(needed) {
        return Err(OrderError::BudgetExceeded {
            needed,
            budget: budget.limit(),
        });
    }

    let mut outcomes: Vec<AxiomOutcome> = Axiom::ALL
        .iter()
        .map(|&axiom| AxiomOutcome {
            axiom,
            passed: true,
            checked: 0,
            counterexample: None,
        })
        .collect();
    let mut examined = 0u64;
    let mut probe = vec![0usize; n];

    for_each_tuple(n, m, |t| {
        examined += 1;
        let member = rel.holds(t);
        let ident = is_identification(t);

        let o = &mut outcomes[0];
        o.checked += 1;
        if member {
            probe[..n - 1].copy_from_slice(&t[1..]);
            probe[n - 1] = t[0];
            if !rel.holds(&probe) && o.counterexample.is_none() {
                o.passed = false;
                o.counterexample = Some(Counterexample::Rotation { tuple: t.to_vec() });
            }
        }

        for i in 0..n {
            for j in i + 1..n {
                let s = swapped(t, i, j);
                let other = rel.holds(&s);
                let o = &mut outcomes[1];
                o.checked += 1;
                if (member && other) != ident && o.counterexample.is_none() {
                    o.passed = false;
                    o.counterexample = Some(Counterexample::Swap {
                        tuple: t.to_vec(),
                        i,
                        j,
                    });
                }
                let o = &mut outcomes[3];
                o.checked += 1;
                if !(member || other) && o.counterexample.is_none() {
                    o.passed = false;
                    o.counterexample = Some(Counterexample::Totality {
                        tuple: t.to_vec(),
                        i,
                        j,
                    });
                }
            }
        }

        if member {
            for x in 0..m {
                let o = &mut outcomes[2];
                o.checked += 1;
                let fits = (0..n).any(|i| {
                    probe.copy_from_slice(t);
                    probe[i] = x;
                    rel.holds(&probe)
                });
                if !fits && o.counterexample.is_none() {
                    o.passed = false;
                    o.counterexample = Some(Counterexample::Slot {
                        tuple: t.to_vec(),
                        element: x,
                    });
                }
            }
        }
        true
    });

    Ok(AxiomReport {
        arity: n,
        domain_size: m,
        tuples_examined: examined,
        outcomes,
    })
}
