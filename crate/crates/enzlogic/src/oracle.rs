//! Brute-force Boolean references.
//!
//! Everything here is deliberately simple and independent of the chemistry:
//! circuit-level tests compare simulated equilibria and traces against these
//! functions.

use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::BooleanExpr;

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    MissingVariable(String),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::MissingVariable(v) => write!(f, "assignment misses variable {v}"),
        }
    }
}

impl std::error::Error for OracleError {}

/// Map from input variable name to Boolean value.
pub type Assignment = BTreeMap<String, bool>;

pub fn assignment(pairs: &[(&str, bool)]) -> Assignment {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Standard Boolean evaluation of an expression tree.
pub fn eval_expr(expr: &BooleanExpr, a: &Assignment) -> Result<bool, OracleError> {
    match expr {
        BooleanExpr::Var(v) => a
            .get(v)
            .copied()
            .ok_or_else(|| OracleError::MissingVariable(v.clone())),
        BooleanExpr::Not(e) => Ok(!eval_expr(e, a)?),
        BooleanExpr::And(x, y) => Ok(eval_expr(x, a)? && eval_expr(y, a)?),
        BooleanExpr::Or(x, y) => Ok(eval_expr(x, a)? || eval_expr(y, a)?),
    }
}

/// Ideal NAND map: returns `1 - x1*x2`.
pub fn nand_reference(x1: bool, x2: bool) -> bool {
    !(x1 && x2)
}

/// Latch reference recurrence `f(t) = x1(t) OR (x2(t) AND f(t-1))`, applied
/// stepwise from `initial`; one output per input pair.
pub fn latch_reference(inputs: &[(bool, bool)], initial: bool) -> Vec<bool> {
    let mut state = initial;
    inputs
        .iter()
        .map(|&(x1, x2)| {
            state = x1 || (x2 && state);
            state
        })
        .collect()
}
