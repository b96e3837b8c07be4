//! Boolean expression to netlist synthesis.
//!
//! Two styles: `Direct` maps each expression node onto one biochemical gate;
//! `NandOnly` first rewrites the expression into NAND form and then realizes
//! every NAND as an AND gate whose output species drives a NOT gate.
//! Structurally identical subexpressions are shared, so synthesis produces a
//! DAG rather than duplicating subtrees.

use std::collections::HashMap;

use super::expr::BooleanExpr;
use super::{CircuitError, GateInstance, InputSlot, Netlist, SignalSource, Wire};
use crate::gates::{GateParams, NotGateParams, TwoInputGateParams, TwoInputMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisStyle {
    Direct,
    NandOnly,
}

/// Gate parameter defaults applied to synthesized gates.
#[derive(Debug, Clone, Copy)]
pub struct GateDefaults {
    pub not: NotGateParams,
    pub or: TwoInputGateParams,
    pub and: TwoInputGateParams,
}

impl Default for GateDefaults {
    fn default() -> Self {
        Self {
            not: NotGateParams::default_params(),
            or: TwoInputGateParams::default_params(TwoInputMode::Or),
            and: TwoInputGateParams::default_params(TwoInputMode::And),
        }
    }
}

struct Builder<'a> {
    defaults: &'a GateDefaults,
    declared: &'a [String],
    gates: Vec<GateInstance>,
    wires: Vec<Wire>,
    memo: HashMap<BooleanExpr, SignalSource>,
}

impl Builder<'_> {
    fn new_gate(&mut self, params: GateParams, inputs: &[SignalSource]) -> SignalSource {
        let id = format!("g{}", self.gates.len());
        let index = self.gates.len();
        self.gates.push(GateInstance::new(&id, params));
        for (slot, source) in [InputSlot::A, InputSlot::B].iter().zip(inputs) {
            self.wires.push(Wire {
                source: source.clone(),
                dest_gate: index,
                dest_slot: *slot,
            });
        }
        SignalSource::Gate(index)
    }

    fn input(&self, name: &str) -> Result<SignalSource, CircuitError> {
        if self.declared.iter().any(|v| v == name) {
            Ok(SignalSource::Input(name.to_string()))
        } else {
            Err(CircuitError::UndeclaredVariable(name.to_string()))
        }
    }

    fn direct(&mut self, expr: &BooleanExpr) -> Result<SignalSource, CircuitError> {
        if let Some(src) = self.memo.get(expr) {
            return Ok(src.clone());
        }
        let src = match expr {
            BooleanExpr::Var(v) => self.input(v)?,
            BooleanExpr::Not(e) => {
                let inner = self.direct(e)?;
                self.new_gate(GateParams::Not(self.defaults.not), &[inner])
            }
            BooleanExpr::And(a, b) => {
                let (sa, sb) = (self.direct(a)?, self.direct(b)?);
                self.new_gate(GateParams::TwoInput(self.defaults.and), &[sa, sb])
            }
            BooleanExpr::Or(a, b) => {
                let (sa, sb) = (self.direct(a)?, self.direct(b)?);
                self.new_gate(GateParams::TwoInput(self.defaults.or), &[sa, sb])
            }
        };
        self.memo.insert(expr.clone(), src.clone());
        Ok(src)
    }

    /// Emit one NAND (an AND gate feeding a NOT gate) and return the NOT
    /// gate's output.
    fn nand(&mut self, a: SignalSource, b: SignalSource) -> SignalSource {
        let and_out = self.new_gate(GateParams::TwoInput(self.defaults.and), &[a, b]);
        self.new_gate(GateParams::Not(self.defaults.not), &[and_out])
    }

    /// NAND-form synthesis with structural sharing:
    /// NOT(x) = NAND(x, x); AND(x, y) = NOT(NAND(x, y)); OR(x, y) =
    /// NAND(NOT(x), NOT(y)).
    fn nand_only(&mut self, expr: &BooleanExpr) -> Result<SignalSource, CircuitError> {
        if let Some(src) = self.memo.get(expr) {
            return Ok(src.clone());
        }
        let src = match expr {
            BooleanExpr::Var(v) => self.input(v)?,
            BooleanExpr::Not(e) => {
                let x = self.nand_only(e)?;
                self.nand(x.clone(), x)
            }
            BooleanExpr::And(a, b) => {
                let (xa, xb) = (self.nand_only(a)?, self.nand_only(b)?);
                let n = self.nand(xa, xb);
                self.nand(n.clone(), n)
            }
            BooleanExpr::Or(a, b) => {
                let (xa, xb) = (self.nand_only(a)?, self.nand_only(b)?);
                let na = self.nand(xa.clone(), xa);
                let nb = self.nand(xb.clone(), xb);
                self.nand(na, nb)
            }
        };
        self.memo.insert(expr.clone(), src.clone());
        Ok(src)
    }
}

/// Synthesize `expr` over the declared input variables into a combinational
/// netlist with a single primary output `y`.
pub fn synthesize(
    expr: &BooleanExpr,
    declared_inputs: &[String],
    style: SynthesisStyle,
    defaults: &GateDefaults,
) -> Result<Netlist, CircuitError> {
    let mut b = Builder {
        defaults,
        declared: declared_inputs,
        gates: Vec::new(),
        wires: Vec::new(),
        memo: HashMap::new(),
    };
    let out = match style {
        SynthesisStyle::Direct => b.direct(expr)?,
        SynthesisStyle::NandOnly => b.nand_only(expr)?,
    };
    let netlist = Netlist {
        gates: b.gates,
        wires: b.wires,
        primary_inputs: declared_inputs.to_vec(),
        primary_outputs: vec![("y".to_string(), out)],
        sequential: false,
    };
    netlist.validate()?;
    Ok(netlist)
}
