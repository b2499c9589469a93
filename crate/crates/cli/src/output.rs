//! Stable machine-readable output records.

use num_integer::Integer;
use padic_roots::padic::Valuation;
use padic_roots::poly::Poly;
use padic_roots::solver::{monitor_invariants, RootRecord};
use padic_roots::{Error, Result};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub p: u64,
    pub method: String,
    pub precision: u32,
    pub root: RootOutput,
    pub trace: Vec<TraceOutput>,
    pub invariants: InvariantsOutput,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootOutput {
    pub residue: String,
    pub digits: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceOutput {
    pub n: usize,
    pub x: String,
    pub v_f: ValOutput,
    pub v_fp: u32,
    pub v_e: Option<u32>,
}

/// Valuations serialize as a plain integer when decided and as the string
/// `">=k"` when only bounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValOutput {
    Int(u32),
    AtLeast(String),
}

impl From<Valuation> for ValOutput {
    fn from(v: Valuation) -> Self {
        match v {
            Valuation::Finite(k) => ValOutput::Int(k),
            Valuation::AtLeast(k) => ValOutput::AtLeast(format!(">={k}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantsOutput {
    pub cond2: bool,
    pub cond3: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub builtin: String,
    pub runs: Vec<VerifyRun>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyRun {
    pub method: String,
    pub exact: bool,
    pub slope: Option<f64>,
    pub ratios: Vec<f64>,
    pub rho_formula: f64,
    pub pass: bool,
}

/// Assembles the solve record: fills error valuations post hoc, replays the
/// invariant monitor and truncates the root to the requested precision.
pub fn build_solve_output(
    record: &RootRecord<BigInt>,
    poly: &Poly<BigInt>,
    target_prec: u32,
) -> Result<SolveOutput> {
    let mut trace = record.trace.clone();
    trace.fill_error_valuations(&record.gamma)?;
    let report = monitor_invariants(&trace, poly)?;

    let entries = trace
        .entries
        .iter()
        .map(|e| TraceOutput {
            n: e.n,
            x: e.x.value().to_string(),
            v_f: e.v_f.into(),
            v_fp: e.v_fprime,
            v_e: e.v_e.and_then(|v| v.finite()),
        })
        .collect();

    Ok(SolveOutput {
        p: poly.context().prime_u64(),
        method: trace.method.name().to_string(),
        precision: target_prec,
        root: RootOutput {
            residue: record.gamma.truncate(target_prec)?.value().to_string(),
            digits: record.gamma.digits(target_prec)?,
        },
        trace: entries,
        invariants: InvariantsOutput {
            cond2: report.cond2_ok(),
            cond3: report.cond3_ok(),
        },
    })
}

/// Residue used for ordering roots in listings.
pub fn residue_key(record: &RootRecord<BigInt>, target_prec: u32) -> Result<BigInt> {
    let modulus = record.gamma.context().pow(target_prec);
    if record.gamma.prec() < target_prec {
        return Err(Error::InsufficientPrecision {
            needed: target_prec,
            have: record.gamma.prec(),
        });
    }
    Ok(record.gamma.value().mod_floor(&modulus))
}
