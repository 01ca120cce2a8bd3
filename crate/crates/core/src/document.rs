//! The certificate record and its canonical JSON form.
//!
//! Canonical form: keys sorted, two-space indentation, LF line endings and a
//! single trailing LF. Integers above 2^53 are written as decimal strings so
//! that consumers parsing numbers as doubles stay exact; on reading, a string
//! made only of digits whose value exceeds 2^53 is turned back into a number.
//! No string field of the schema can take such a value, so the mapping is a
//! bijection on well-formed documents.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::coh_dims::HVector;
use crate::{Error, Result, Stage};

pub const SCHEMA: &str = "tame-certify/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

const SAFE_INT: u64 = 1 << 53;

/// A residue index ind_ℓ(a) (or the Fermat quotient when ℓ = p) that backs
/// one of the checked conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub a: u64,
    pub ell: u64,
    pub index: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: Stage,
    pub index: Option<usize>,
    pub bound: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    pub tool_version: String,
    pub p: u64,
    pub s: Vec<u64>,
    pub t: Vec<u64>,
    pub avoid: Vec<u64>,
    pub search_bound: u64,
    /// Places of S that can ramify in a p-extension.
    pub s_min: Vec<u64>,
    /// Marked set of the auxiliary stage: s_min ∪ T.
    pub marked: Vec<u64>,
    pub t0: Vec<u64>,
    pub kill_sets: Vec<Vec<u64>>,
    pub s0: Vec<u64>,
    /// Set when S₀ was enlarged past the union of the kill sets to reach
    /// m ≥ #marked + 2.
    pub s0_enlarged: bool,
    pub q_list: Vec<u64>,
    pub s_elements: BTreeMap<String, u64>,
    pub residue_witnesses: Vec<Witness>,
    /// Sorted S₀ ∪ q_list; coordinates of every character below.
    pub aux_columns: Vec<u64>,
    pub chi: Vec<Vec<u64>>,
    pub psi: Vec<Vec<u64>>,
    pub eta: Vec<Vec<u64>>,
    pub u_basis: Vec<Vec<u64>>,
    pub cup_row_labels: Vec<String>,
    pub cup_columns: Vec<u64>,
    pub cup_entries: Vec<Vec<u64>>,
    pub rank: usize,
    pub pattern_ok: bool,
    pub mild: bool,
    pub aux_h_vector: Option<HVector>,
    /// s_min ∪ S₀ ∪ q_list, with marked set T.
    pub final_s: Vec<u64>,
    pub final_h_vector: Option<HVector>,
    pub final_kummer_dim: usize,
    pub ramified: Vec<u64>,
    pub final_cup_rank: usize,
    pub verdict: Verdict,
    pub failure: Option<Failure>,
    pub digest: String,
}

fn widen(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(x) = n.as_u64().filter(|&x| x > SAFE_INT) {
                *v = Value::String(x.to_string());
            }
        }
        Value::Array(items) => items.iter_mut().for_each(widen),
        Value::Object(map) => map.values_mut().for_each(widen),
        _ => {}
    }
}

fn narrow(v: &mut Value) {
    match v {
        Value::String(s) => {
            let digits = !s.is_empty() && !s.starts_with('0') && s.bytes().all(|b| b.is_ascii_digit());
            if let Some(x) = digits.then(|| s.parse::<u64>().ok()).flatten().filter(|&x| x > SAFE_INT) {
                *v = Value::from(x);
            }
        }
        Value::Array(items) => items.iter_mut().for_each(narrow),
        Value::Object(map) => map.values_mut().for_each(narrow),
        _ => {}
    }
}

/// Canonical serialization (sorted keys, trailing LF).
pub fn to_canonical_json(cert: &Certificate) -> String {
    let mut value = serde_json::to_value(cert).expect("certificate is always representable");
    widen(&mut value);
    let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
    out.push('\n');
    out
}

pub fn from_json(text: &str) -> Result<Certificate> {
    let mut value: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    narrow(&mut value);
    serde_json::from_value(value).map_err(|e| Error::Malformed(e.to_string()))
}

/// SHA-256 of the canonical form with the digest field blanked, hex encoded.
pub fn compute_digest(cert: &Certificate) -> String {
    let blank = Certificate {
        digest: String::new(),
        ..cert.clone()
    };
    Sha256::digest(to_canonical_json(&blank).as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

pub fn seal(mut cert: Certificate) -> Certificate {
    cert.digest = compute_digest(&cert);
    cert
}
