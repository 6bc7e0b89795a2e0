//! JSON structure files.
//!
//! ```json
//! {"n": 3, "elements": ["a", "b", "c"], "tuples": [["a", "b", "c"]]}
//! ```
//!
//! `tuples` lists the all-distinct member tuples. On read any rotation of a
//! tuple is accepted (arity >= 3); on write one canonical representative per
//! rotation class is emitted, least element first, in lexicographic order.
//! Tuples with a repeated entry are implied and rejected if listed.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{FiniteSphericalOrder, OrderError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StructureFile {
    pub n: usize,
    pub elements: Vec<String>,
    pub tuples: Vec<Vec<String>>,
}

#[derive(Debug, Error)]
pub enum StructureError {
    #[error("malformed structure file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Order(#[from] OrderError),
}

impl StructureError {
    pub fn code(&self) -> &'static str {
        match self {
            StructureError::Json(_) => "malformed_json",
            StructureError::Order(e) => e.code(),
        }
    }
}

impl From<&FiniteSphericalOrder> for StructureFile {
    fn from(order: &FiniteSphericalOrder) -> Self {
        let els = order.elements();
        StructureFile {
            n: order.arity(),
            elements: els.to_vec(),
            tuples: order
                .representatives()
                .map(|t| t.iter().map(|&i| els[i].clone()).collect())
                .collect(),
        }
    }
}

impl TryFrom<StructureFile> for FiniteSphericalOrder {
    type Error = OrderError;

    fn try_from(file: StructureFile) -> Result<Self, Self::Error> {
        FiniteSphericalOrder::from_labeled_tuples(file.n, file.elements, &file.tuples)
    }
}

pub fn from_json(text: &str) -> Result<FiniteSphericalOrder, StructureError> {
    let file: StructureFile = serde_json::from_str(text)?;
    Ok(FiniteSphericalOrder::try_from(file)?)
}

pub fn to_json(order: &FiniteSphericalOrder) -> String {
    serde_json::to_string(&StructureFile::from(order)).expect("structure files always serialize")
}
