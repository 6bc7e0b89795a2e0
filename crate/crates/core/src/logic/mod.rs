//! First-order logic over `{K_n, =}`: formulas, finite model checking and a
//! decision procedure for the dense theory.
//!
//! Deciding works by recursion on complete atomic diagrams: an existential
//! is true at a diagram when its body holds at some one-variable extension.
//! That is sound exactly when every consistent extension of a realized
//! diagram is realized in the dense model, which [`Diagram::extension_witness`]
//! lets callers check.

mod diagram;
mod formula;
pub mod sentences;

use std::collections::HashMap;

use thiserror::Error;

pub use diagram::{enumerate_diagrams, extend_diagrams, Diagram, DEFAULT_VARIABLE_BUDGET};
pub use formula::{parse, Formula};

use crate::order::{FiniteSphericalOrder, OrderError, Relation};

pub const DEFAULT_QUANTIFIER_BUDGET: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("K takes {expected} arguments, found {found}{}", position.map(|p| format!(" (at {p})")).unwrap_or_default())]
    Arity {
        position: Option<usize>,
        expected: usize,
        found: usize,
    },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("variable `{0}` is already in the diagram")]
    NotFresh(String),
    #[error("formula is not quantifier free")]
    NotQuantifierFree,
    #[error("not a sentence: free variables {0:?}")]
    NotASentence(Vec<String>),
    #[error("{what} budget {limit} exceeded: {needed} needed")]
    BudgetExceeded {
        what: &'static str,
        limit: usize,
        needed: usize,
    },
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(usize),
    #[error(transparent)]
    Order(#[from] OrderError),
}

impl LogicError {
    pub fn code(&self) -> &'static str {
        match self {
            LogicError::Syntax { .. } => "syntax_error",
            LogicError::Arity { .. } => "arity_mismatch",
            LogicError::UnboundVariable(_) => "unbound_variable",
            LogicError::NotFresh(_) => "not_fresh",
            LogicError::NotQuantifierFree => "not_quantifier_free",
            LogicError::NotASentence(_) => "not_a_sentence",
            LogicError::BudgetExceeded { .. } => "budget_exceeded",
            LogicError::InvalidArity(_) => "invalid_arity",
            LogicError::Order(e) => e.code(),
        }
    }
}

/// Tarskian truth in a finite structure; quantifiers range over its domain.
/// `asg` maps variable names to element indices.
pub fn eval_finite(
    order: &FiniteSphericalOrder,
    f: &Formula,
    asg: &HashMap<String, usize>,
) -> Result<bool, LogicError> {
    f.check_arity(order.arity())?;
    let mut env: Vec<(String, usize)> = asg.iter().map(|(k, &v)| (k.clone(), v)).collect();
    eval_in(order, f, &mut env)
}

fn lookup(env: &[(String, usize)], v: &str) -> Result<usize, LogicError> {
    env.iter()
        .rev()
        .find(|(name, _)| name == v)
        .map(|&(_, e)| e)
        .ok_or_else(|| LogicError::UnboundVariable(v.to_string()))
}

fn eval_in(order: &FiniteSphericalOrder, f: &Formula, env: &mut Vec<(String, usize)>) -> Result<bool, LogicError> {
    Ok(match f {
        Formula::K(vs) => {
            let t = vs.iter().map(|v| lookup(env, v)).collect::<Result<Vec<_>, _>>()?;
            order.holds(&t)
        }
        Formula::Eq(a, b) => lookup(env, a)? == lookup(env, b)?,
        Formula::Not(g) => !eval_in(order, g, env)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_in(order, g, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_in(order, g, env)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_in(order, a, env)? || eval_in(order, b, env)?,
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let want = matches!(f, Formula::Exists(..));
            for e in 0..order.len() {
                env.push((v.clone(), e));
                let r = eval_in(order, g, env);
                env.pop();
                if r? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

/// A consistent diagram on the free variables satisfying a quantifier-free
/// formula, if any.
pub fn qf_sat(n: usize, f: &Formula) -> Result<Option<Diagram>, LogicError> {
    if !f.is_quantifier_free() {
        return Err(LogicError::NotQuantifierFree);
    }
    f.check_arity(n)?;
    let vars: Vec<String> = f.free_vars().into_iter().collect();
    for d in enumerate_diagrams(n, &vars, DEFAULT_VARIABLE_BUDGET)? {
        if d.satisfies(f)? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Truth of a sentence in the dense theory of arity `n`.
pub fn decide(n: usize, sentence: &Formula) -> Result<bool, LogicError> {
    decide_with_budget(n, sentence, DEFAULT_QUANTIFIER_BUDGET)
}

pub fn decide_with_budget(n: usize, sentence: &Formula, quantifier_budget: usize) -> Result<bool, LogicError> {
    if n < 2 {
        return Err(LogicError::InvalidArity(n));
    }
    sentence.check_arity(n)?;
    let free = sentence.free_vars();
    if !free.is_empty() {
        return Err(LogicError::NotASentence(free.into_iter().collect()));
    }
    let depth = sentence.quantifier_depth();
    if depth > quantifier_budget {
        return Err(LogicError::BudgetExceeded {
            what: "quantifier",
            limit: quantifier_budget,
            needed: depth,
        });
    }
    eval_diagram(&sentence.standardize_apart(), &Diagram::empty(n))
}

/// Evaluates a formula (free variables covered by `d`) at a diagram.
pub fn eval_diagram(f: &Formula, d: &Diagram) -> Result<bool, LogicError> {
    Ok(match f {
        Formula::K(_) | Formula::Eq(..) => d.satisfies(f)?,
        Formula::Not(g) => !eval_diagram(g, d)?,
        Formula::And(gs) => {
            for g in gs {
                if !eval_diagram(g, d)? {
                    return Ok(false);
                }
            }
            true
        }
        Formula::Or(gs) => {
            for g in gs {
                if eval_diagram(g, d)? {
                    return Ok(true);
                }
            }
            false
        }
        Formula::Implies(a, b) => !eval_diagram(a, d)? || eval_diagram(b, d)?,
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let want = matches!(f, Formula::Exists(..));
            for e in d.extend(v)? {
                if eval_diagram(g, &e)? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}
