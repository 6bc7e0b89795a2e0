use std::collections::{BTreeSet, HashSet};
use std::fmt;

use super::LogicError;

/// First-order formulas over `K_n` and equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    K(Vec<String>),
    Eq(String, String),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    pub fn k<S: AsRef<str>>(vars: &[S]) -> Self {
        Formula::K(vars.iter().map(|v| v.as_ref().to_string()).collect())
    }

    pub fn eq(a: &str, b: &str) -> Self {
        Formula::Eq(a.to_string(), b.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::And(vec![Formula::implies(a.clone(), b.clone()), Formula::implies(b, a)])
    }

    pub fn exists(v: &str, body: Formula) -> Self {
        Formula::Exists(v.to_string(), Box::new(body))
    }

    pub fn forall(v: &str, body: Formula) -> Self {
        Formula::Forall(v.to_string(), Box::new(body))
    }

    /// `forall v1 ... vk body`, outermost first.
    pub fn forall_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn exists_all<S: AsRef<str>>(vars: &[S], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::exists(v.as_ref(), acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::K(_) | Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula::Exists(..) | Formula::Forall(..) => false,
        }
    }

    /// Largest number of nested quantifiers on any branch.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::K(_) | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::quantifier_depth).max().unwrap_or(0),
            Formula::Implies(a, b) => a.quantifier_depth().max(b.quantifier_depth()),
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
        }
    }

    /// Fails unless every `K` atom has `n` arguments.
    pub fn check_arity(&self, n: usize) -> Result<(), LogicError> {
        match self {
            Formula::K(vs) if vs.len() != n => Err(LogicError::Arity {
                position: None,
                expected: n,
                found: vs.len(),
            }),
            Formula::K(_) | Formula::Eq(..) => Ok(()),
            Formula::Not(f) | Formula::Exists(_, f) | Formula::Forall(_, f) => f.check_arity(n),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().try_for_each(|f| f.check_arity(n)),
            Formula::Implies(a, b) => {
                a.check_arity(n)?;
                b.check_arity(n)
            }
        }
    }

    fn all_names(&self, out: &mut HashSet<String>) {
        match self {
            Formula::K(vs) => out.extend(vs.iter().cloned()),
            Formula::Eq(a, b) => {
                out.insert(a.clone());
                out.insert(b.clone());
            }
            Formula::Not(f) => f.all_names(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.all_names(out)),
            Formula::Implies(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                out.insert(v.clone());
                f.all_names(out);
            }
        }
    }

    /// Renames every bound variable to a fresh name, so no binder reuses a
    /// free variable or another binder's name. Free variables are kept.
    pub fn standardize_apart(&self) -> Formula {
        let mut taken = HashSet::new();
        self.all_names(&mut taken);
        let mut counter = 0usize;
        let mut fresh = move || loop {
            let name = format!("_{counter}");
            counter += 1;
            if !taken.contains(&name) {
                break name;
            }
        };
        rename(self, &mut Vec::new(), &mut fresh)
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
    let mut note = |v: &String, bound: &Vec<String>| {
        if !bound.contains(v) {
            out.insert(v.clone());
        }
    };
    match f {
        Formula::K(vs) => vs.iter().for_each(|v| note(v, bound)),
        Formula::Eq(a, b) => {
            note(a, bound);
            note(b, bound);
        }
        Formula::Not(g) => collect_free(g, bound, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_free(g, bound, out)),
        Formula::Implies(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            bound.push(v.clone());
            collect_free(g, bound, out);
            bound.pop();
        }
    }
}

fn rename(f: &Formula, scope: &mut Vec<(String, String)>, fresh: &mut impl FnMut() -> String) -> Formula {
    let look = |v: &String, scope: &Vec<(String, String)>| {
        scope
            .iter()
            .rev()
            .find(|(old, _)| old == v)
            .map(|(_, new)| new.clone())
            .unwrap_or_else(|| v.clone())
    };
    match f {
        Formula::K(vs) => Formula::K(vs.iter().map(|v| look(v, scope)).collect()),
        Formula::Eq(a, b) => Formula::Eq(look(a, scope), look(b, scope)),
        Formula::Not(g) => Formula::not(rename(g, scope, fresh)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| rename(g, scope, fresh)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| rename(g, scope, fresh)).collect()),
        Formula::Implies(a, b) => Formula::implies(rename(a, scope, fresh), rename(b, scope, fresh)),
        Formula::Exists(v, g) | Formula::Forall(v, g) => {
            let new = fresh();
            scope.push((v.clone(), new.clone()));
            let body = rename(g, scope, fresh);
            scope.pop();
            if matches!(f, Formula::Exists(..)) {
                Formula::Exists(new, Box::new(body))
            } else {
                Formula::Forall(new, Box::new(body))
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |f: &mut fmt::Formatter<'_>, head: &str, items: &[Formula]| {
            write!(f, "({head}")?;
            for item in items {
                write!(f, " {item}")?;
            }
            write!(f, ")")
        };
        match self {
            Formula::K(vs) => write!(f, "(K {})", vs.join(" ")),
            Formula::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula::Not(g) => write!(f, "(not {g})"),
            Formula::And(gs) => list(f, "and", gs),
            Formula::Or(gs) => list(f, "or", gs),
            Formula::Implies(a, b) => write!(f, "(implies {a} {b})"),
            Formula::Exists(v, g) => write!(f, "(exists {v} {g})"),
            Formula::Forall(v, g) => write!(f, "(forall {v} {g})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Token<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Token<'_>)> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' {
            out.push((i, Token::Open));
            chars.next();
        } else if c == ')' {
            out.push((i, Token::Close));
            chars.next();
        } else {
            let start = i;
            let mut end = text.len();
            while let Some(&(j, d)) = chars.peek() {
                if d.is_whitespace() || d == '(' || d == ')' {
                    end = j;
                    break;
                }
                chars.next();
            }
            out.push((start, Token::Atom(&text[start..end])));
        }
    }
    out
}

struct Parser<'a> {
    tokens: Vec<(usize, Token<'a>)>,
    pos: usize,
    end: usize,
    arity: usize,
}

impl<'a> Parser<'a> {
    fn syntax(&self, position: usize, message: impl Into<String>) -> LogicError {
        LogicError::Syntax {
            position,
            message: message.into(),
        }
    }

    fn next(&mut self) -> Result<(usize, Token<'a>), LogicError> {
        let t = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.syntax(self.end, "unexpected end of input"))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek_close(&self) -> bool {
        matches!(self.tokens.get(self.pos), Some((_, Token::Close)))
    }

    fn var(&mut self) -> Result<String, LogicError> {
        match self.next()? {
            (_, Token::Atom(a)) => Ok(a.to_string()),
            (p, _) => Err(self.syntax(p, "expected a variable")),
        }
    }

    fn close(&mut self) -> Result<(), LogicError> {
        match self.next()? {
            (_, Token::Close) => Ok(()),
            (p, _) => Err(self.syntax(p, "expected `)`")),
        }
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let open = match self.next()? {
            (p, Token::Open) => p,
            (p, _) => return Err(self.syntax(p, "expected `(`")),
        };
        let (head_pos, head) = match self.next()? {
            (p, Token::Atom(a)) => (p, a),
            (p, _) => return Err(self.syntax(p, "expected an operator")),
        };
        let f = match head {
            "K" => {
                let mut vs = Vec::new();
                while !self.peek_close() {
                    vs.push(self.var()?);
                }
                if vs.len() != self.arity {
                    return Err(LogicError::Arity {
                        position: Some(head_pos),
                        expected: self.arity,
                        found: vs.len(),
                    });
                }
                Formula::K(vs)
            }
            "=" => Formula::Eq(self.var()?, self.var()?),
            "not" => Formula::not(self.formula()?),
            "and" | "or" => {
                let mut fs = Vec::new();
                while !self.peek_close() {
                    fs.push(self.formula()?);
                }
                if head == "and" {
                    Formula::And(fs)
                } else {
                    Formula::Or(fs)
                }
            }
            "implies" => Formula::implies(self.formula()?, self.formula()?),
            "exists" => Formula::Exists(self.var()?, Box::new(self.formula()?)),
            "forall" => Formula::Forall(self.var()?, Box::new(self.formula()?)),
            other => return Err(self.syntax(head_pos, format!("unknown operator `{other}` after `(` at {open}"))),
        };
        self.close()?;
        Ok(f)
    }
}

/// Parses one s-expression formula whose `K` atoms have `n` arguments.
pub fn parse(text: &str, n: usize) -> Result<Formula, LogicError> {
    let mut p = Parser {
        tokens: tokenize(text),
        pos: 0,
        end: text.len(),
        arity: n,
    };
    let f = p.formula()?;
    if let Some(&(pos, _)) = p.tokens.get(p.pos) {
        return Err(p.syntax(pos, "trailing input"));
    }
    Ok(f)
}
