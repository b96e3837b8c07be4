//! Biochemical NOT / OR / AND gates: parameter validation, equilibrium
//! solving, and the logic threshold.
//!
//! A NOT gate is one conserved pair with an input enzyme driving
//! substrate -> product and an always-present bias enzyme driving the
//! reverse conversion; its output is the substrate concentration. The
//! two-input gates share one reaction scheme (two input enzymes converting
//! substrate to product against one bias enzyme) and differ only in the rate
//! inequalities their parameters must satisfy; their output is the product
//! concentration.
//!
//! Equilibria are roots of a forward-rate = reverse-rate balance. Both
//! balances are strictly monotone in the unknown concentration, so bisection
//! on [0, 1] always converges.

use std::fmt;

/// Absolute bisection tolerance for equilibrium roots.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum GateError {
    Domain(String),
    /// Rate constraints violated; each entry names one failed inequality.
    Constraint(Vec<String>),
    /// Bisection could not bracket a root (cannot occur for valid
    /// parameters; reported rather than panicking).
    SolverFailure(String),
    /// Parameters satisfy the rate constraints but an equilibrium output
    /// landed inside [tau0, tau1], so no logic level can be assigned.
    ThresholdInfeasible {
        value: f64,
    },
}

impl fmt::Display for GateError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateError::Domain(m) => write!(f, "domain error: {m}"),
            GateError::Constraint(v) => write!(f, "constraint violations: {}", v.join("; ")),
            GateError::SolverFailure(m) => write!(f, "solver failure: {m}"),
            GateError::ThresholdInfeasible { value } => {
                write!(
                    f,
                    "threshold-infeasible parameters: equilibrium {value} is invalid"
                )
            }
        }
    }
}

impl std::error::Error for GateError {}

/// Logic thresholds: below `tau0` reads 0, above `tau1` reads 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    pub tau0: f64,
    pub tau1: f64,
}

impl ThresholdConfig {
    pub fn new(tau0: f64, tau1: f64) -> Result<Self, GateError> {
        if !(tau0.is_finite() && tau1.is_finite() && 0.0 < tau0 && tau0 < tau1 && tau1 < 1.0) {
            return Err(GateError::Domain(format!(
                "thresholds must satisfy 0 < tau0 < tau1 < 1 (got {tau0}, {tau1})"
            )));
        }
        Ok(Self { tau0, tau1 })
    }
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            tau0: 0.2,
            tau1: 0.8,
        }
    }
}

/// Logic reading of a concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogicLevel {
    Zero,
    One,
    /// Concentration inside [tau0, tau1]: no logic value can be assigned.
    Invalid,
}

impl LogicLevel {
    pub fn from_bool(b: bool) -> Self {
        if b {
            LogicLevel::One
        } else {
            LogicLevel::Zero
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            LogicLevel::Zero => Some(false),
            LogicLevel::One => Some(true),
            LogicLevel::Invalid => None,
        }
    }

    /// Input concentration for a rail level (inserted = 1, extracted = 0).
    pub fn concentration(self) -> Option<f64> {
        match self {
            LogicLevel::Zero => Some(0.0),
            LogicLevel::One => Some(1.0),
            LogicLevel::Invalid => None,
        }
    }
}

impl fmt::Display for LogicLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogicLevel::Zero => write!(f, "0"),
            LogicLevel::One => write!(f, "1"),
            LogicLevel::Invalid => write!(f, "invalid"),
        }
    }
}

/// Threshold function: x < tau0 reads 0, x > tau1 reads 1, otherwise the
/// signal is invalid.
pub fn threshold(x: f64, cfg: &ThresholdConfig) -> Result<LogicLevel, GateError> {
    if !(x.is_finite() && (0.0..=1.0).contains(&x)) {
        return Err(GateError::Domain(format!(
            "concentration {x} outside [0, 1]"
        )));
    }
    Ok(if x < cfg.tau0 {
        LogicLevel::Zero
    } else if x > cfg.tau1 {
        LogicLevel::One
    } else {
        LogicLevel::Invalid
    })
}

/// Kinetic constants of one enzyme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnzymeKinetics {
    pub k_cat: f64,
    pub k_m: f64,
}

impl EnzymeKinetics {
    pub fn new(k_cat: f64, k_m: f64) -> Self {
        Self { k_cat, k_m }
    }
}

/// The always-present enzyme driving the reverse conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasEnzyme {
    pub kinetics: EnzymeKinetics,
    /// Fixed relative concentration, > 0.
    pub concentration: f64,
}

impl BiasEnzyme {
    pub fn new(k_cat: f64, k_m: f64, concentration: f64) -> Self {
        Self {
            kinetics: EnzymeKinetics::new(k_cat, k_m),
            concentration,
        }
    }

    /// Effective maximum rate k_cat * [P].
    pub fn effective_rate(&self) -> f64 {
        self.kinetics.k_cat * self.concentration
    }

    /// Split an effective rate into (k_cat, concentration) with the
    /// concentration kept inside (0, 1].
    pub fn from_effective_rate(v: f64, k_m: f64) -> Self {
        let concentration = v.min(1.0);
        Self::new(v / concentration, k_m, concentration)
    }
}

/// NOT gate: input enzyme E1 against bias enzyme P1 on pair (S1, S1').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotGateParams {
    pub input: EnzymeKinetics,
    pub bias: BiasEnzyme,
}

impl NotGateParams {
    /// Default parameters: V_E1 = 1.0, V_P1 = 0.2, K_m = 0.1 everywhere.
    pub fn default_params() -> Self {
        Self {
            input: EnzymeKinetics::new(1.0, 0.1),
            bias: BiasEnzyme::from_effective_rate(0.2, 0.1),
        }
    }

    pub fn with_rates(v_e: f64, v_p: f64, k_m: f64) -> Self {
        Self {
            input: EnzymeKinetics::new(v_e, k_m),
            bias: BiasEnzyme::from_effective_rate(v_p, k_m),
        }
    }
}

/// Whether a two-input gate is wired as OR or AND; same chemistry, different
/// rate inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoInputMode {
    Or,
    And,
}

impl fmt::Display for TwoInputMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TwoInputMode::Or => write!(f, "or"),
            TwoInputMode::And => write!(f, "and"),
        }
    }
}

/// Two-input gate: input enzymes E2, E3 against bias enzyme P2 on (S2, S2').
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoInputGateParams {
    pub input_a: EnzymeKinetics,
    pub input_b: EnzymeKinetics,
    pub bias: BiasEnzyme,
    pub mode: TwoInputMode,
}

impl TwoInputGateParams {
    /// Default parameters. OR: V_E = 0.6 each, V_P = 0.2, K_m = 0.1.
    /// AND: V_E = 0.6 each, V_P = 0.9, K_m = 0.01 — the AND gate needs the
    /// smaller Michaelis constant for its equilibria to clear the 0.05/0.95
    /// rails on every truth-table row.
    pub fn default_params(mode: TwoInputMode) -> Self {
        match mode {
            TwoInputMode::Or => Self::with_rates(TwoInputMode::Or, 0.6, 0.6, 0.2, 0.1),
            TwoInputMode::And => Self::with_rates(TwoInputMode::And, 0.6, 0.6, 0.9, 0.01),
        }
    }

    pub fn with_rates(mode: TwoInputMode, v_e2: f64, v_e3: f64, v_p: f64, k_m: f64) -> Self {
        Self {
            input_a: EnzymeKinetics::new(v_e2, k_m),
            input_b: EnzymeKinetics::new(v_e3, k_m),
            bias: BiasEnzyme::from_effective_rate(v_p, k_m),
            mode,
        }
    }
}

/// Any gate's parameter block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateParams {
    Not(NotGateParams),
    TwoInput(TwoInputGateParams),
}

impl GateParams {
    pub fn arity(&self) -> usize {
        match self {
            GateParams::Not(_) => 1,
            GateParams::TwoInput(_) => 2,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            GateParams::Not(_) => "not",
            GateParams::TwoInput(p) => match p.mode {
                TwoInputMode::Or => "or",
                TwoInputMode::And => "and",
            },
        }
    }

    /// Ideal Boolean function of the gate.
    pub fn boolean(&self, inputs: &[bool]) -> bool {
        match self {
            GateParams::Not(_) => !inputs[0],
            GateParams::TwoInput(p) => match p.mode {
                TwoInputMode::Or => inputs[0] || inputs[1],
                TwoInputMode::And => inputs[0] && inputs[1],
            },
        }
    }
}

fn check_positive(report: &mut Vec<String>, name: &str, v: f64) {
    if !(v.is_finite() && v > 0.0) {
        report.push(format!("{name} > 0 (got {v})"));
    }
}

/// Check the mode-appropriate rate inequalities at full insertion.
///
/// Returns the list of violated inequalities; parameters are acceptable iff
/// the list is empty.
pub fn validate_gate(params: &GateParams) -> Result<(), GateError> {
    let mut report = Vec::new();
    match params {
        GateParams::Not(p) => {
            check_positive(&mut report, "k_cat(E1)", p.input.k_cat);
            check_positive(&mut report, "K_m(E1)", p.input.k_m);
            check_positive(&mut report, "k_cat(P1)", p.bias.kinetics.k_cat);
            check_positive(&mut report, "K_m(P1)", p.bias.kinetics.k_m);
            check_positive(&mut report, "[P1]", p.bias.concentration);
            let v_e1 = p.input.k_cat;
            let v_p1 = p.bias.effective_rate();
            if !(v_p1 < v_e1) {
                report.push(format!("V_P1 < V_E1 (got {v_p1} >= {v_e1})"));
            }
        }
        GateParams::TwoInput(p) => {
            check_positive(&mut report, "k_cat(E2)", p.input_a.k_cat);
            check_positive(&mut report, "K_m(E2)", p.input_a.k_m);
            check_positive(&mut report, "k_cat(E3)", p.input_b.k_cat);
            check_positive(&mut report, "K_m(E3)", p.input_b.k_m);
            check_positive(&mut report, "k_cat(P2)", p.bias.kinetics.k_cat);
            check_positive(&mut report, "K_m(P2)", p.bias.kinetics.k_m);
            check_positive(&mut report, "[P2]", p.bias.concentration);
            let v_e2 = p.input_a.k_cat;
            let v_e3 = p.input_b.k_cat;
            let v_p2 = p.bias.effective_rate();
            match p.mode {
                TwoInputMode::Or => {
                    if !(v_p2 < v_e2) {
                        report.push(format!("V_P2 < V_E2 (got {v_p2} >= {v_e2})"));
                    }
                    if !(v_p2 < v_e3) {
                        report.push(format!("V_P2 < V_E3 (got {v_p2} >= {v_e3})"));
                    }
                }
                TwoInputMode::And => {
                    if !(v_p2 > v_e2) {
                        report.push(format!("V_P2 > V_E2 (got {v_p2} <= {v_e2})"));
                    }
                    if !(v_p2 > v_e3) {
                        report.push(format!("V_P2 > V_E3 (got {v_p2} <= {v_e3})"));
                    }
                    if !(v_p2 < v_e2 + v_e3) {
                        report.push(format!("V_P2 < V_E2+V_E3 (got {v_p2} >= {})", v_e2 + v_e3));
                    }
                }
            }
        }
    }
    if report.is_empty() {
        Ok(())
    } else {
        Err(GateError::Constraint(report))
    }
}

fn check_input_level(name: &str, e: f64) -> Result<(), GateError> {
    if !(e.is_finite() && (0.0..=1.0).contains(&e)) {
        return Err(GateError::Domain(format!("{name} = {e} outside [0, 1]")));
    }
    Ok(())
}

/// Bisection for the unique root of a function that is strictly increasing
/// on [0, 1].
fn bisect_increasing(f: impl Fn(f64) -> f64) -> Result<f64, GateError> {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (flo, fhi) = (f(lo), f(hi));
    if flo > 0.0 || fhi < 0.0 {
        return Err(GateError::SolverFailure(format!(
            "root not bracketed on [0, 1]: f(0) = {flo}, f(1) = {fhi}"
        )));
    }
    while hi - lo > ROOT_TOL {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Equilibrium substrate concentration of a NOT gate at input level `e1`.
///
/// Solves `V_E1*e1*s/(K_mE1+s) = V_P1*(1-s)/(K_mP1+(1-s))`. At `e1 = 0` the
/// forward reaction is off and the bias drives the pair fully back: returns
/// exactly 1.
pub fn equilibrium_not(params: &NotGateParams, e1: f64) -> Result<f64, GateError> {
    validate_gate(&GateParams::Not(*params))?;
    equilibrium_not_unchecked(params, e1)
}

/// Same as [`equilibrium_not`] but without the rate-constraint gate.
pub fn equilibrium_not_unchecked(params: &NotGateParams, e1: f64) -> Result<f64, GateError> {
    check_input_level("e1", e1)?;
    if e1 == 0.0 {
        return Ok(1.0);
    }
    let forward = move |s: f64| params.input.k_cat * e1 * s / (params.input.k_m + s);
    let p = params.bias.effective_rate();
    let k_mp = params.bias.kinetics.k_m;
    let back = move |s: f64| p * (1.0 - s) / (k_mp + (1.0 - s));
    bisect_increasing(move |s| forward(s) - back(s))
}

/// Equilibrium product concentration of a two-input gate at input levels
/// `(e2, e3)`.
///
/// Solves `V7 + V8 = V9` in the product concentration; the left side falls
/// and the right side rises with it, so the root is unique. With both inputs
/// extracted the bias drains the product completely: returns exactly 0.
pub fn equilibrium_two_input(
    params: &TwoInputGateParams,
    e2: f64,
    e3: f64,
) -> Result<f64, GateError> {
    check_input_level("e2", e2)?;
    check_input_level("e3", e3)?;
    validate_gate(&GateParams::TwoInput(*params))?;
    equilibrium_two_input_unchecked(params, e2, e3)
}

/// Same as [`equilibrium_two_input`] but without the rate-constraint gate,
/// so deliberately violating parameter sets can still be diagnosed.
pub fn equilibrium_two_input_unchecked(
    params: &TwoInputGateParams,
    e2: f64,
    e3: f64,
) -> Result<f64, GateError> {
    check_input_level("e2", e2)?;
    check_input_level("e3", e3)?;
    if e2 == 0.0 && e3 == 0.0 {
        return Ok(0.0);
    }
    let (a, b) = (params.input_a, params.input_b);
    let p = params.bias.effective_rate();
    let k_mp = params.bias.kinetics.k_m;
    // g(sp) = V9 - (V7 + V8) is strictly increasing in the product
    // concentration sp.
    bisect_increasing(move |sp: f64| {
        let s = 1.0 - sp;
        let v7 = a.k_cat * e2 * s / (a.k_m + s);
        let v8 = b.k_cat * e3 * s / (b.k_m + s);
        let v9 = p * sp / (k_mp + sp);
        v9 - (v7 + v8)
    })
}

/// Equilibrium output concentration for any gate at rail input levels.
pub fn equilibrium_output(params: &GateParams, inputs: &[f64]) -> Result<f64, GateError> {
    check_arity(params, inputs)?;
    match params {
        GateParams::Not(p) => equilibrium_not(p, inputs[0]),
        GateParams::TwoInput(p) => equilibrium_two_input(p, inputs[0], inputs[1]),
    }
}

/// Equilibrium output without the rate-constraint gate, for diagnosing
/// deliberately violating parameter sets.
pub fn equilibrium_output_unchecked(params: &GateParams, inputs: &[f64]) -> Result<f64, GateError> {
    check_arity(params, inputs)?;
    match params {
        GateParams::Not(p) => equilibrium_not_unchecked(p, inputs[0]),
        GateParams::TwoInput(p) => equilibrium_two_input_unchecked(p, inputs[0], inputs[1]),
    }
}

fn check_arity(params: &GateParams, inputs: &[f64]) -> Result<(), GateError> {
    if inputs.len() != params.arity() {
        return Err(GateError::Domain(format!(
            "{} gate takes {} input(s), got {}",
            params.kind_name(),
            params.arity(),
            inputs.len()
        )));
    }
    Ok(())
}

/// One truth-table row: map rail inputs through the gate equilibrium and
/// threshold the result.
///
/// Fails with [`GateError::ThresholdInfeasible`] if the equilibrium lands in
/// the invalid band: the parameters then satisfy the rate constraints but
/// not the logic contract.
pub fn gate_truth_row(
    params: &GateParams,
    inputs: &[LogicLevel],
    cfg: &ThresholdConfig,
) -> Result<LogicLevel, GateError> {
    let levels: Vec<f64> = inputs
        .iter()
        .map(|l| {
            l.concentration()
                .ok_or_else(|| GateError::Domain("truth-table inputs must be 0 or 1".into()))
        })
        .collect::<Result<_, _>>()?;
    let eq = equilibrium_output(params, &levels)?;
    match threshold(eq, cfg)? {
        LogicLevel::Invalid => Err(GateError::ThresholdInfeasible { value: eq }),
        level => Ok(level),
    }
}
