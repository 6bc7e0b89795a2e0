//! Countable spectra of constant and unary expansions of the dense theory,
//! the Ehrenfeucht model catalog, and Rudin-Keisler Hasse diagrams as DOT.
//!
//! Nothing infinite is built here: the classification is the artifact.

use std::fmt;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, Pow};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectraError {
    #[error("arity must be at least 2, got {0}")]
    InvalidArity(usize),
    #[error("Ehrenfeucht construction needs m >= 3 (m = 1 is the unexpanded theory), got {0}")]
    InvalidM(u64),
    #[error("no factor index {k} for arity {n}; admissible: {admissible:?}")]
    InadmissibleIndex { k: u32, n: usize, admissible: Vec<u32> },
    #[error("{given} counts given, arity {n} has {max} factors")]
    TooManyCounts { given: usize, n: usize, max: usize },
    #[error("limit diagrams need k >= 2, got {0}")]
    InvalidK(u32),
    #[error("cannot parse diagram kind `{0}`")]
    BadKind(String),
}

impl SpectraError {
    pub fn code(&self) -> &'static str {
        match self {
            SpectraError::InvalidArity(_) => "invalid_arity",
            SpectraError::InvalidM(_) => "invalid_m",
            SpectraError::InadmissibleIndex { .. } | SpectraError::TooManyCounts { .. } => "inadmissible_index",
            SpectraError::InvalidK(_) => "invalid_k",
            SpectraError::BadKind(_) => "bad_kind",
        }
    }
}

/// Factor indices `k` for a given arity: `0` and `2..n` for `n >= 4`, and
/// `{0, 2}` for the linear and circular cases, whose spectra are `3^r 6^s`.
pub fn admissible_indices(n: usize) -> Vec<u32> {
    let top = n.max(3) as u32;
    std::iter::once(0).chain(2..top).collect()
}

/// `2^k + 2`: the number of countable models attached to one nonisolated
/// 1-type with `k` independent moving sequences (`k = 0` gives 3).
pub fn factor(k: u32) -> BigUint {
    if k == 0 {
        BigUint::from(3u32)
    } else {
        (BigUint::one() << k) + 2u32
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    /// The `T^m_n` construction: constants plus `m - 2` predicates.
    Ehrenfeucht { m: u64 },
    /// Counts `r_k` of nonisolated 1-types, as `(k, r_k)` pairs.
    Constants {
        counts: Vec<(u32, u64)>,
        infinitely_many_types: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionSpec {
    n: usize,
    mode: Mode,
}

impl ExpansionSpec {
    pub fn ehrenfeucht(n: usize, m: u64) -> Result<Self, SpectraError> {
        if n < 2 {
            return Err(SpectraError::InvalidArity(n));
        }
        if m != 1 && m < 3 {
            return Err(SpectraError::InvalidM(m));
        }
        Ok(ExpansionSpec {
            n,
            mode: Mode::Ehrenfeucht { m },
        })
    }

    /// Counts listed in the order of [`admissible_indices`]; missing
    /// trailing counts are zero.
    pub fn constants(n: usize, counts: &[u64], infinitely_many_types: bool) -> Result<Self, SpectraError> {
        if n < 2 {
            return Err(SpectraError::InvalidArity(n));
        }
        let idx = admissible_indices(n);
        if counts.len() > idx.len() {
            return Err(SpectraError::TooManyCounts {
                given: counts.len(),
                n,
                max: idx.len(),
            });
        }
        Self::constants_by_index(n, idx.into_iter().zip(counts.iter().copied()), infinitely_many_types)
    }

    pub fn constants_by_index(
        n: usize,
        counts: impl IntoIterator<Item = (u32, u64)>,
        infinitely_many_types: bool,
    ) -> Result<Self, SpectraError> {
        if n < 2 {
            return Err(SpectraError::InvalidArity(n));
        }
        let admissible = admissible_indices(n);
        let counts: Vec<(u32, u64)> = counts.into_iter().collect();
        if let Some(&(k, _)) = counts.iter().find(|(k, _)| !admissible.contains(k)) {
            return Err(SpectraError::InadmissibleIndex { k, n, admissible });
        }
        Ok(ExpansionSpec {
            n,
            mode: Mode::Constants {
                counts,
                infinitely_many_types,
            },
        })
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumResult {
    Finite(BigUint),
    Continuum,
}

impl fmt::Display for SpectrumResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumResult::Finite(v) => write!(f, "{v}"),
            SpectrumResult::Continuum => write!(f, "continuum"),
        }
    }
}

/// Number of countable models.
pub fn spectrum(spec: &ExpansionSpec) -> SpectrumResult {
    match &spec.mode {
        Mode::Ehrenfeucht { m } => SpectrumResult::Finite(BigUint::from(*m)),
        Mode::Constants {
            infinitely_many_types: true,
            ..
        } => SpectrumResult::Continuum,
        Mode::Constants { counts, .. } => SpectrumResult::Finite(
            counts
                .iter()
                .map(|&(k, r)| Pow::pow(factor(k), BigUint::from(r)))
                .product(),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "index", rename_all = "snake_case")]
pub enum ModelKind {
    Prime,
    PrimeOverRealization(u64),
    Saturated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelEntry {
    #[serde(flatten)]
    pub kind: ModelKind,
    pub property: String,
    pub type_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelCatalog {
    pub n: usize,
    pub m: u64,
    pub models: Vec<ModelEntry>,
}

impl ModelCatalog {
    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }
}

/// The `m` countable models of `T^m_n`: the prime model, one prime model
/// over a realization of each completion `p^i_inf`, and the saturated model.
pub fn ehrenfeucht_catalog(n: usize, m: u64) -> Result<ModelCatalog, SpectraError> {
    if n < 2 {
        return Err(SpectraError::InvalidArity(n));
    }
    if m < 3 {
        return Err(SpectraError::InvalidM(m));
    }
    let mut models = vec![ModelEntry {
        kind: ModelKind::Prime,
        property: "omits p_inf; the constants c_k have no limit".to_string(),
        type_label: "p_inf".to_string(),
    }];
    models.extend((0..m - 2).map(|i| ModelEntry {
        kind: ModelKind::PrimeOverRealization(i),
        property: format!("prime over a realization of p^{i}_inf, a limit element of the c_k lying in P_{i}"),
        type_label: format!("p^{i}_inf"),
    }));
    models.push(ModelEntry {
        kind: ModelKind::Saturated,
        property: "realizes every p^i_inf; no limit element for the c_k".to_string(),
        type_label: "p_inf".to_string(),
    });
    Ok(ModelCatalog { n, m, models })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitCount {
    pub almost_prime: u64,
    #[serde(serialize_with = "decimal")]
    pub limit: BigUint,
    #[serde(serialize_with = "decimal")]
    pub total: BigUint,
}

/// Big counts go out as decimal strings so JSON readers keep them exact.
fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Models attached to one type with `k >= 2` independent moving sequences:
/// 3 almost prime and `2^k - 1` limit models.
pub fn limit_count(k: u32) -> Result<LimitCount, SpectraError> {
    if k < 2 {
        return Err(SpectraError::InvalidK(k));
    }
    let limit = (BigUint::one() << k) - 1u32;
    let total = &limit + 3u32;
    Ok(LimitCount {
        almost_prime: 3,
        limit,
        total,
    })
}

/// A Hasse diagram shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HasseKind {
    T1,
    T2,
    Limit(u32),
    Product(Vec<HasseKind>),
}

impl HasseKind {
    /// Parses `T1`, `T2`, `limit(k)`, or a `*`-separated product of these.
    pub fn parse(text: &str) -> Result<Self, SpectraError> {
        let bad = || SpectraError::BadKind(text.to_string());
        let parts: Vec<&str> = text.split('*').map(str::trim).collect();
        if parts.len() > 1 {
            return parts
                .iter()
                .map(|p| {
                    Self::parse_one(p).map_err(|e| {
                        if matches!(e, SpectraError::InvalidK(_)) {
                            e
                        } else {
                            bad()
                        }
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(HasseKind::Product);
        }
        Self::parse_one(parts[0])
    }

    fn parse_one(text: &str) -> Result<Self, SpectraError> {
        let bad = || SpectraError::BadKind(text.to_string());
        match text {
            "T1" => Ok(HasseKind::T1),
            "T2" => Ok(HasseKind::T2),
            _ => {
                let inner = text
                    .strip_prefix("limit(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                if inner.is_empty() || !inner.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad());
                }
                let k: u32 = inner.parse().map_err(|_| bad())?;
                if k < 2 {
                    return Err(SpectraError::InvalidK(k));
                }
                Ok(HasseKind::Limit(k))
            }
        }
    }

    fn flatten(&self, out: &mut Vec<HasseKind>) {
        match self {
            HasseKind::Product(parts) => parts.iter().for_each(|p| p.flatten(out)),
            other => out.push(other.clone()),
        }
    }
}

impl fmt::Display for HasseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HasseKind::T1 => write!(f, "T1"),
            HasseKind::T2 => write!(f, "T2"),
            HasseKind::Limit(k) => write!(f, "limit({k})"),
            HasseKind::Product(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{p}")?;
                }
                Ok(())
            }
        }
    }
}

/// One chain of RK classes, bottom first, labelled by the number of limit
/// models on each class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    pub name: String,
    pub labels: Vec<BigUint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HasseDiagram {
    pub components: Vec<Chain>,
}

fn chain(kind: &HasseKind) -> Result<Chain, SpectraError> {
    let labels: Vec<BigUint> = match kind {
        HasseKind::T1 => vec![0u32.into(), 1u32.into()],
        HasseKind::T2 => vec![0u32.into(), 0u32.into(), 3u32.into()],
        HasseKind::Limit(k) => vec![0u32.into(), 0u32.into(), limit_count(*k)?.limit],
        HasseKind::Product(_) => unreachable!("flattened"),
    };
    Ok(Chain {
        name: kind.to_string(),
        labels,
    })
}

/// The diagram of a kind: one chain per factor of a product (a disjoint
/// union), each with its IL labels.
pub fn hasse(kind: &HasseKind) -> Result<HasseDiagram, SpectraError> {
    let mut parts = Vec::new();
    kind.flatten(&mut parts);
    if parts.is_empty() {
        return Err(SpectraError::BadKind(kind.to_string()));
    }
    Ok(HasseDiagram {
        components: parts.iter().map(chain).collect::<Result<_, _>>()?,
    })
}

impl HasseDiagram {
    pub fn node_count(&self) -> usize {
        self.components.iter().map(|c| c.labels.len()).sum()
    }

    /// DOT text; nodes and edges in a fixed order, bottom to top.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph hasse {\n  rankdir=BT;\n  node [shape=circle];\n");
        for (ci, c) in self.components.iter().enumerate() {
            let _ = writeln!(out, "  subgraph cluster_{ci} {{");
            let _ = writeln!(out, "    label=\"{}\";", c.name);
            for (ni, l) in c.labels.iter().enumerate() {
                let _ = writeln!(out, "    c{ci}n{ni} [label=\"{l}\"];");
            }
            for ni in 1..c.labels.len() {
                let _ = writeln!(out, "    c{ci}n{} -> c{ci}n{ni};", ni - 1);
            }
            out.push_str("  }\n");
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fin(v: u64) -> SpectrumResult {
        SpectrumResult::Finite(BigUint::from(v))
    }

    #[test]
    fn displayed_instances() {
        assert_eq!(
            spectrum(&ExpansionSpec::constants(4, &[0, 0, 1], false).unwrap()),
            fin(10)
        );
        assert_eq!(
            spectrum(&ExpansionSpec::constants(5, &[0, 0, 0, 1], false).unwrap()),
            fin(18)
        );
        assert_eq!(spectrum(&ExpansionSpec::constants(4, &[], false).unwrap()), fin(1));
        assert_eq!(spectrum(&ExpansionSpec::constants(3, &[2, 1], false).unwrap()), fin(54));
        assert_eq!(
            spectrum(&ExpansionSpec::constants(4, &[1], true).unwrap()),
            SpectrumResult::Continuum
        );
    }

    #[test]
    fn index_sets() {
        assert_eq!(admissible_indices(2), [0, 2]);
        assert_eq!(admissible_indices(3), [0, 2]);
        assert_eq!(admissible_indices(5), [0, 2, 3, 4]);
        let err = ExpansionSpec::constants_by_index(4, [(1, 1)], false).unwrap_err();
        assert_eq!(err.code(), "inadmissible_index");
        assert!(ExpansionSpec::constants_by_index(4, [(4, 1)], false).is_err());
        assert!(ExpansionSpec::constants(4, &[0, 0, 0, 1], false).is_err());
    }

    #[test]
    fn ehrenfeucht() {
        let c = ehrenfeucht_catalog(4, 3).unwrap();
        assert_eq!(c.len(), 3);
        let c5 = ehrenfeucht_catalog(4, 5).unwrap();
        let over = c5
            .models
            .iter()
            .filter(|e| matches!(e.kind, ModelKind::PrimeOverRealization(_)))
            .count();
        assert_eq!((c5.len(), over), (5, 3));
        assert_eq!(ehrenfeucht_catalog(4, 2).unwrap_err().code(), "invalid_m");
        assert_eq!(ExpansionSpec::ehrenfeucht(4, 2).unwrap_err().code(), "invalid_m");
        assert_eq!(spectrum(&ExpansionSpec::ehrenfeucht(4, 1).unwrap()), fin(1));
    }

    #[test]
    fn limit_counts() {
        let t = |k| {
            let l = limit_count(k).unwrap();
            (l.almost_prime, l.limit.to_string(), l.total.to_string())
        };
        assert_eq!(t(2), (3, "3".into(), "6".into()));
        assert_eq!(t(3), (3, "7".into(), "10".into()));
        assert_eq!(t(4), (3, "15".into(), "18".into()));
        assert_eq!(limit_count(1).unwrap_err().code(), "invalid_k");
    }

    #[test]
    fn kinds_parse_and_print() {
        for text in ["T1", "T2", "limit(3)", "T1*T2*limit(2)"] {
            assert_eq!(HasseKind::parse(text).unwrap().to_string(), text);
        }
        for text in ["", "T3", "limit()", "limit(x)", "limit(+3)", "T1**T2", "limit(3"] {
            assert_eq!(HasseKind::parse(text).unwrap_err().code(), "bad_kind", "{text}");
        }
        assert_eq!(HasseKind::parse("limit(1)").unwrap_err().code(), "invalid_k");
    }

    #[test]
    fn chain_labels() {
        let labels = |text: &str| -> Vec<String> {
            hasse(&HasseKind::parse(text).unwrap()).unwrap().components[0]
                .labels
                .iter()
                .map(|l| l.to_string())
                .collect()
        };
        assert_eq!(labels("T1"), ["0", "1"]);
        assert_eq!(labels("T2"), ["0", "0", "3"]);
        assert_eq!(labels("limit(3)"), ["0", "0", "7"]);
    }

    #[test]
    fn dot_text_is_fixed() {
        let d = hasse(&HasseKind::T1).unwrap();
        assert_eq!(
            d.to_dot(),
            "digraph hasse {\n  rankdir=BT;\n  node [shape=circle];\n  subgraph cluster_0 {\n    label=\"T1\";\n    c0n0 [label=\"0\"];\n    c0n1 [label=\"1\"];\n    c0n0 -> c0n1;\n  }\n}\n"
        );
        let p = hasse(&HasseKind::parse("T1*limit(2)").unwrap()).unwrap();
        assert_eq!(p.node_count(), 5);
        assert_eq!(p.to_dot(), p.clone().to_dot());
    }
}
