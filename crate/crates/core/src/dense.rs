//! The countable dense n-spherical order over the rationals.
//!
//! A [`DenseOracle`] is an injective enumeration of the rationals together
//! with the membership rule of [`crate::order::rule`] applied to the usual
//! order of `Q`. Any finite set of rationals therefore induces the derived
//! finite structure on its sorted elements.

use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::order::rule::spherical_rule;

pub type Rational = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DenseError {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(usize),
    #[error("tuple has length {found}, expected {expected}")]
    TupleLength { expected: usize, found: usize },
    #[error("the first two entries of the tuple coincide")]
    EqualFirstPair,
    #[error("tuple {0} is not in the relation")]
    NotAMember(String),
    #[error("no density witness for tuple {0}")]
    NoWitness(String),
    #[error("cannot parse `{0}` as a rational (expected p/q)")]
    BadRational(String),
}

impl DenseError {
    pub fn code(&self) -> &'static str {
        match self {
            DenseError::InvalidArity(_) => "invalid_arity",
            DenseError::TupleLength { .. } => "tuple_length",
            DenseError::EqualFirstPair => "equal_first_pair",
            DenseError::NotAMember(_) => "not_a_member",
            DenseError::NoWitness(_) => "no_witness",
            DenseError::BadRational(_) => "bad_rational",
        }
    }
}

/// How the carrier is enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Enumeration {
    /// `0, 1, -1, 2, -2, 1/2, -1/2, ...`: reduced fractions by increasing
    /// `|p| + q`, then increasing `q`, positive before negative.
    Canonical,
    /// The dyadic rationals, level by level, each level shuffled by the seed.
    Seeded(u64),
}

/// Reduced fractions in order of height `|p| + q`.
#[derive(Debug, Clone)]
struct HeightWalk {
    height: u64,
    denom: u64,
    pending_negative: Option<Rational>,
    started: bool,
}

impl HeightWalk {
    fn new() -> Self {
        HeightWalk {
            height: 2,
            denom: 1,
            pending_negative: None,
            started: false,
        }
    }
}

impl Iterator for HeightWalk {
    type Item = Rational;

    fn next(&mut self) -> Option<Rational> {
        if !self.started {
            self.started = true;
            return Some(Rational::zero());
        }
        if let Some(neg) = self.pending_negative.take() {
            return Some(neg);
        }
        loop {
            if self.denom >= self.height {
                self.height += 1;
                self.denom = 1;
            }
            let q = self.denom;
            let p = self.height - q;
            self.denom += 1;
            if p.gcd(&q) == 1 {
                let pos = Rational::new(BigInt::from(p), BigInt::from(q));
                self.pending_negative = Some(-pos.clone());
                return Some(pos);
            }
        }
    }
}

#[derive(Debug)]
enum Stream {
    Canonical(HeightWalk),
    Seeded(Box<DyadicLevels>),
}

impl Stream {
    fn new(e: Enumeration) -> Self {
        match e {
            Enumeration::Canonical => Stream::Canonical(HeightWalk::new()),
            Enumeration::Seeded(seed) => Stream::Seeded(Box::new(DyadicLevels::new(seed))),
        }
    }

    fn next_value(&mut self) -> Rational {
        match self {
            Stream::Canonical(walk) => walk.next().expect("infinite"),
            Stream::Seeded(levels) => levels.next_value(),
        }
    }
}

/// Dyadic rationals level by level. Level `L` holds the `k / 2^L` within
/// `reach(L)` not already seen: the two new extremes first, the rest in a
/// seeded random order. Every dyadic appears once and any prefix is close to
/// an even grid. Extremes are kept rare because under a circular
/// correspondence each new extreme must be matched inside an interior gap
/// of the other side, halving it.
#[derive(Debug)]
struct DyadicLevels {
    rng: ChaCha8Rng,
    level: u32,
    pending: Vec<Rational>,
}

fn reach(level: u32) -> i64 {
    1 + i64::from(level / 4)
}

impl DyadicLevels {
    fn new(seed: u64) -> Self {
        DyadicLevels {
            rng: ChaCha8Rng::seed_from_u64(seed),
            level: 0,
            // level 0 is -1, 0, 1; popped from the back
            pending: [-1, 1, 0]
                .into_iter()
                .map(|k| Rational::from_integer(BigInt::from(k)))
                .collect(),
        }
    }

    fn fill_next_level(&mut self) {
        self.level += 1;
        let scale = 1i64 << self.level;
        let outer = reach(self.level) * scale;
        let inner = reach(self.level - 1) * scale;
        let mut fresh: Vec<i64> = (-outer..=outer)
            .filter(|&k| (k % 2 != 0 || k.abs() > inner) && k.abs() != outer)
            .collect();
        fresh.shuffle(&mut self.rng);
        // popped from the back, so the extremes go last in the vector
        if outer > inner {
            fresh.push(-outer);
            fresh.push(outer);
        }
        self.pending = fresh
            .into_iter()
            .map(|k| Rational::new(BigInt::from(k), BigInt::from(scale)))
            .collect();
    }

    fn next_value(&mut self) -> Rational {
        loop {
            if let Some(v) = self.pending.pop() {
                return v;
            }
            self.fill_next_level();
        }
    }
}

#[derive(Debug)]
struct Prefix {
    values: Vec<Rational>,
    stream: Stream,
}

/// A countable dense n-spherical order with a fixed enumeration of its carrier.
///
/// The enumeration is produced lazily and cached; the oracle is otherwise
/// immutable and can be shared between threads.
#[derive(Debug)]
pub struct DenseOracle {
    arity: usize,
    enumeration: Enumeration,
    prefix: Mutex<Prefix>,
}

impl Clone for DenseOracle {
    fn clone(&self) -> Self {
        DenseOracle::new(self.arity, self.enumeration).expect("arity already validated")
    }
}

impl PartialEq for DenseOracle {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.enumeration == other.enumeration
    }
}

impl DenseOracle {
    pub fn new(arity: usize, enumeration: Enumeration) -> Result<Self, DenseError> {
        if arity < 2 {
            return Err(DenseError::InvalidArity(arity));
        }
        Ok(DenseOracle {
            arity,
            enumeration,
            prefix: Mutex::new(Prefix {
                values: Vec::new(),
                stream: Stream::new(enumeration),
            }),
        })
    }

    pub fn canonical(arity: usize) -> Result<Self, DenseError> {
        Self::new(arity, Enumeration::Canonical)
    }

    pub fn seeded(arity: usize, seed: u64) -> Result<Self, DenseError> {
        Self::new(arity, Enumeration::Seeded(seed))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn enumeration(&self) -> Enumeration {
        self.enumeration
    }

    /// The `i`-th element of the enumeration.
    pub fn element_at(&self, i: usize) -> Rational {
        self.with_prefix(i + 1, |p| p[i].clone())
    }

    /// Runs `f` on the first `len` enumerated elements.
    pub fn with_prefix<R>(&self, len: usize, f: impl FnOnce(&[Rational]) -> R) -> R {
        let mut guard = self.prefix.lock().unwrap_or_else(|e| e.into_inner());
        let Prefix { values, stream } = &mut *guard;
        while values.len() < len {
            values.push(stream.next_value());
        }
        f(&values[..len])
    }

    pub fn prefix(&self, len: usize) -> Vec<Rational> {
        self.with_prefix(len, <[Rational]>::to_vec)
    }

    /// `K_n(t)`. `t` must have length `n`.
    pub fn k_rel(&self, t: &[Rational]) -> bool {
        debug_assert_eq!(t.len(), self.arity);
        spherical_rule(t)
    }

    /// A rational `b` outside `r`'s tuple with `K(a1, b, a3, ..., an)` and
    /// `K(b, a2, a3, ..., an)`.
    ///
    /// Membership depends only on where `b` falls relative to the tuple's
    /// entries, so the candidates are one point per open gap: below the
    /// minimum, each midpoint between consecutive values, above the maximum.
    /// They are tried in increasing order.
    pub fn density_witness(&self, r: &WitnessRequest) -> Result<Rational, DenseError> {
        let t = &r.tuple;
        let mut probe = t.clone();
        for b in gap_representatives(t) {
            if t.contains(&b) {
                continue;
            }
            probe.clone_from(t);
            probe[1] = b.clone();
            if !spherical_rule(&probe) {
                continue;
            }
            probe.clone_from(t);
            probe[0] = b.clone();
            if spherical_rule(&probe) {
                return Ok(b);
            }
        }
        Err(DenseError::NoWitness(format_tuple(t)))
    }
}

/// A tuple `(a1, ..., an)` in `K_n` with `a1 != a2`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessRequest {
    tuple: Vec<Rational>,
}

impl WitnessRequest {
    pub fn new(oracle: &DenseOracle, tuple: Vec<Rational>) -> Result<Self, DenseError> {
        if tuple.len() != oracle.arity() {
            return Err(DenseError::TupleLength {
                expected: oracle.arity(),
                found: tuple.len(),
            });
        }
        if tuple[0] == tuple[1] {
            return Err(DenseError::EqualFirstPair);
        }
        if !oracle.k_rel(&tuple) {
            return Err(DenseError::NotAMember(format_tuple(&tuple)));
        }
        Ok(WitnessRequest { tuple })
    }

    pub fn tuple(&self) -> &[Rational] {
        &self.tuple
    }
}

/// One rational in each open gap determined by `values`: `min - 1`, the
/// midpoints of consecutive distinct values, and `max + 1`, ascending.
/// Empty input yields `[0]`.
pub fn gap_representatives(values: &[Rational]) -> Vec<Rational> {
    let mut sorted: Vec<&Rational> = values.iter().collect();
    sorted.sort();
    sorted.dedup();
    let (Some(first), Some(last)) = (sorted.first(), sorted.last()) else {
        return vec![Rational::zero()];
    };
    let one = Rational::one();
    let two = Rational::from_integer(BigInt::from(2));
    let mut out = Vec::with_capacity(sorted.len() + 1);
    out.push(*first - &one);
    for w in sorted.windows(2) {
        out.push((w[0] + w[1]) / &two);
    }
    out.push(*last + &one);
    out
}

/// Renders a rational as `p/q` (denominator always present).
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

pub fn format_tuple(t: &[Rational]) -> String {
    let parts: Vec<String> = t.iter().map(format_rational).collect();
    format!("({})", parts.join(", "))
}

/// Parses `p/q` or `p` with an optional leading `-`; `q` must be positive.
pub fn parse_rational(text: &str) -> Result<Rational, DenseError> {
    let bad = || DenseError::BadRational(text.to_owned());
    let s = text.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let valid_int = |x: &str, signed: bool| {
        let digits = if signed { x.strip_prefix('-').unwrap_or(x) } else { x };
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !valid_int(num, true) || !valid_int(den, false) {
        return Err(bad());
    }
    let p: BigInt = num.parse().map_err(|_| bad())?;
    let q: BigInt = den.parse().map_err(|_| bad())?;
    if !q.is_positive() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// A display wrapper printing `p/q`.
pub struct PQ<'a>(pub &'a Rational);

impl fmt::Display for PQ<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}
