//! Sequential-mapping verification on sampled traces.
//!
//! The property under test: given an error bound `kappa` and a delay `tau`,
//! whenever the output deviates from its ideal reference by more than
//! `kappa` at a sample `t`, it must be back within `kappa` at the nearest
//! grid point at or after `t + tau`. The last `tau` of a trace cannot be
//! checked (no lookahead) and is reported as "unchecked" rather than
//! silently passed.
//!
//! For the NOT gate the settle delay has closed-form bounds: with the bias
//! enzyme's effective rate `p` and Michaelis constant `K_m`,
//! `t_plus = -(K_m+1)/p * ln(kappa)` bounds the rise to the high rail, and
//! `t_minus = -ln(kappa - (1+K_m)*p)/(1+K_m)` the fall — the latter only
//! where `kappa > (1+K_m)*p`. Outside that domain the formula is undefined;
//! this implementation keeps it verbatim, flags the violation, and falls
//! back to a measured settle time. The two-input gates have no closed form
//! and always use the measured bound.

use std::collections::BTreeMap;
use std::fmt;

use crate::circuit::{elaborate, single_gate, CircuitError, InitialState, Netlist, SignalSource};
use crate::gates::{GateParams, NotGateParams, TwoInputGateParams};
use crate::kinetics::{integrate, IntegratorOptions, Schedule};

#[derive(Debug, Clone, PartialEq)]
pub enum SeqmapError {
    GridMismatch(String),
    TauTooShort { tau: f64, dt: f64 },
    NonSettling { horizon: f64 },
    Domain(String),
    Circuit(CircuitError),
}

impl fmt::Display for SeqmapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeqmapError::GridMismatch(m) => write!(f, "grid mismatch: {m}"),
            SeqmapError::TauTooShort { tau, dt } => {
                write!(f, "tau = {tau} is shorter than one sample step {dt}")
            }
            SeqmapError::NonSettling { horizon } => {
                write!(f, "output did not settle within horizon {horizon}")
            }
            SeqmapError::Domain(m) => write!(f, "domain error: {m}"),
            SeqmapError::Circuit(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SeqmapError {}

impl From<CircuitError> for SeqmapError {
    fn from(e: CircuitError) -> Self {
        SeqmapError::Circuit(e)
    }
}

/// Error bound, delay, and reference signal for one check.
#[derive(Debug, Clone)]
pub struct SeqMapSpec {
    pub kappa: f64,
    pub tau: f64,
    /// Ideal output sampled on the trace grid.
    pub reference: Vec<f64>,
}

/// One uncorrected deviation: the output was off at `t` and still off at the
/// lookahead sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub t: f64,
    pub err: f64,
    pub err_after_tau: f64,
}

/// Result of a sequential-mapping check.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub pass: bool,
    pub violations: Vec<Violation>,
    /// Samples with enough lookahead to be checked.
    pub checked: usize,
    /// Samples within `tau` of the trace end (not checkable).
    pub unchecked: usize,
    /// Checked samples that deviated by more than kappa (whether or not
    /// they recovered).
    pub deviations: usize,
}

impl Verdict {
    /// Line-based report: PASS|FAIL, counts, then one line per violation.
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(if self.pass { "PASS\n" } else { "FAIL\n" });
        out.push_str(&format!(
            "checked={} unchecked={} deviations={} violations={}\n",
            self.checked,
            self.unchecked,
            self.deviations,
            self.violations.len()
        ));
        for v in &self.violations {
            out.push_str(&format!(
                "t={:.6} err={:.6} err_after_tau={:.6}\n",
                v.t, v.err, v.err_after_tau
            ));
        }
        out
    }
}

/// Check the delayed-recovery property of one sampled output against its
/// reference.
pub fn check(times: &[f64], output: &[f64], spec: &SeqMapSpec) -> Result<Verdict, SeqmapError> {
    if times.len() != output.len() || times.len() != spec.reference.len() {
        return Err(SeqmapError::GridMismatch(format!(
            "times/output/reference lengths differ: {} / {} / {}",
            times.len(),
            output.len(),
            spec.reference.len()
        )));
    }
    if times.len() < 2 {
        return Err(SeqmapError::GridMismatch(
            "need at least two samples".into(),
        ));
    }
    if !(spec.kappa > 0.0 && spec.kappa < 1.0) {
        return Err(SeqmapError::Domain(format!(
            "kappa = {} outside (0, 1)",
            spec.kappa
        )));
    }
    let dt = times[1] - times[0];
    if spec.tau < dt {
        return Err(SeqmapError::TauTooShort { tau: spec.tau, dt });
    }
    // Nearest grid point at or after t + tau, biased conservatively up.
    let lookahead = (spec.tau / dt - 1e-9).ceil() as usize;
    let n = times.len();
    let mut verdict = Verdict {
        pass: true,
        violations: Vec::new(),
        checked: 0,
        unchecked: 0,
        deviations: 0,
    };
    for i in 0..n {
        let j = i + lookahead;
        if j >= n {
            verdict.unchecked += 1;
            continue;
        }
        verdict.checked += 1;
        let err = (output[i] - spec.reference[i]).abs();
        if err > spec.kappa {
            verdict.deviations += 1;
            let err_after = (output[j] - spec.reference[j]).abs();
            if !(err_after < spec.kappa) {
                verdict.violations.push(Violation {
                    t: times[i],
                    err,
                    err_after_tau: err_after,
                });
            }
        }
    }
    verdict.pass = verdict.violations.is_empty();
    Ok(verdict)
}

/// Closed-form NOT-gate settle bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NotGateBounds {
    /// Bound on the rise 0 -> 1 (bias-driven relaxation).
    pub t_plus: f64,
    /// Bound on the fall 1 -> 0; None when the formula's domain condition
    /// `kappa > (1 + K_m) * p` fails.
    pub t_minus: f64,
    pub t_minus_domain_violated: bool,
    /// Measured fall settle time, filled in when the formula domain fails.
    pub t_minus_empirical: Option<f64>,
    /// max of t_plus and the available fall bound.
    pub t_max: f64,
}

/// Evaluate the closed-form bounds for a NOT gate at error bound `kappa`.
///
/// `[P1]` in the formulas is the bias enzyme's effective maximum rate
/// `k_cat(P1) * [P1]`. With unequal Michaelis constants the larger one is
/// used, which only loosens the bounds. When the `t_minus` domain condition
/// fails, the fall bound is measured by simulation instead (worst-case
/// initial state, resolved to 1e-3).
pub fn not_gate_bounds(params: &NotGateParams, kappa: f64) -> Result<NotGateBounds, SeqmapError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(SeqmapError::Domain(format!(
            "kappa = {kappa} outside (0, 1)"
        )));
    }
    crate::gates::validate_gate(&GateParams::Not(*params))
        .map_err(|e| SeqmapError::Domain(e.to_string()))?;
    let k_m = params.input.k_m.max(params.bias.kinetics.k_m);
    let p = params.bias.effective_rate();
    let t_plus = -(k_m + 1.0) / p * kappa.ln();
    let domain_ok = kappa > (1.0 + k_m) * p;
    if domain_ok {
        let t_minus = -(kappa - (1.0 + k_m) * p).ln() / (1.0 + k_m);
        Ok(NotGateBounds {
            t_plus,
            t_minus,
            t_minus_domain_violated: false,
            t_minus_empirical: None,
            t_max: t_plus.max(t_minus),
        })
    } else {
        let scenario = SettleScenario {
            inputs: vec![("E1".to_string(), 1.0)],
            initial_output: 1.0,
            target: 0.0,
        };
        let netlist = single_gate(GateParams::Not(*params));
        let empirical = empirical_settle_time(
            &netlist,
            &scenario,
            kappa,
            &SettleOptions {
                horizon: 100.0 * t_plus,
                ..SettleOptions::default()
            },
        )?;
        Ok(NotGateBounds {
            t_plus,
            t_minus: f64::NAN,
            t_minus_domain_violated: true,
            t_minus_empirical: Some(empirical),
            t_max: t_plus.max(empirical),
        })
    }
}

/// A settle-time measurement: constant post-transition inputs, a worst-case
/// initial output, and the rail the output should approach.
#[derive(Debug, Clone)]
pub struct SettleScenario {
    pub inputs: Vec<(String, f64)>,
    pub initial_output: f64,
    pub target: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SettleOptions {
    pub horizon: f64,
    /// Time resolution of the reported settle instant.
    pub resolution: f64,
    pub coarse_samples: usize,
    pub integrator: IntegratorOptions,
}

impl Default for SettleOptions {
    fn default() -> Self {
        Self {
            horizon: 2000.0,
            resolution: 1e-3,
            coarse_samples: 4000,
            integrator: IntegratorOptions::default(),
        }
    }
}

/// Smallest simulated time after which the output stays within `kappa` of
/// the target rail, found to `resolution`; errors with `NonSettling` if the
/// horizon is reached first.
pub fn empirical_settle_time(
    netlist: &Netlist,
    scenario: &SettleScenario,
    kappa: f64,
    opts: &SettleOptions,
) -> Result<f64, SeqmapError> {
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(SeqmapError::Domain(format!(
            "kappa = {kappa} outside (0, 1)"
        )));
    }
    let output_gate = match netlist.primary_outputs.first() {
        Some((_, SignalSource::Gate(j))) => *j,
        _ => {
            return Err(SeqmapError::Domain(
                "settle measurement needs a gate-driven primary output".into(),
            ))
        }
    };
    let waveforms: BTreeMap<String, Schedule> = scenario
        .inputs
        .iter()
        .map(|(n, v)| {
            Schedule::constant(*v)
                .map(|s| (n.clone(), s))
                .map_err(|e| SeqmapError::Domain(e.to_string()))
        })
        .collect::<Result<_, _>>()?;
    // The stored state is the substrate concentration; two-input outputs are
    // the product, so invert for them.
    let s0 = match netlist.gates[output_gate].params {
        GateParams::Not(_) => scenario.initial_output,
        GateParams::TwoInput(_) => 1.0 - scenario.initial_output,
    };
    let init = InitialState::PerGate(
        [(netlist.gates[output_gate].id.clone(), s0)]
            .into_iter()
            .collect(),
    );
    let output_species = netlist.gates[output_gate].output_species();

    let settle_on_grid = |dt_out: f64, t_end: f64| -> Result<Option<(f64, f64)>, SeqmapError> {
        let el = elaborate(netlist, &waveforms, &init)?;
        let trace = integrate(&el.network, 0.0, t_end, dt_out, &opts.integrator)
            .map_err(|e| SeqmapError::Circuit(CircuitError::Kinetics(e)))?;
        let out = trace
            .series(&output_species)
            .ok_or_else(|| SeqmapError::Domain(format!("no series {output_species}")))?;
        let times = trace.times();
        // Last sample still outside the kappa band.
        let last_bad = out
            .iter()
            .rposition(|v| (v - scenario.target).abs() >= kappa);
        Ok(match last_bad {
            None => Some((0.0, 0.0)),
            Some(i) if i + 1 < out.len() => Some((times[i], times[i + 1])),
            Some(_) => None, // still outside at the end of the run
        })
    };

    let coarse_dt = (opts.horizon / opts.coarse_samples as f64).max(opts.resolution);
    let bracket = settle_on_grid(coarse_dt, opts.horizon)?;
    let Some((_, hi)) = bracket else {
        return Err(SeqmapError::NonSettling {
            horizon: opts.horizon,
        });
    };
    if hi == 0.0 {
        return Ok(0.0);
    }
    if coarse_dt <= opts.resolution {
        return Ok(hi);
    }
    // Refine: rerun to the bracket end at the requested resolution.
    match settle_on_grid(opts.resolution, hi + coarse_dt)? {
        Some((_, t)) => Ok(t),
        None => Ok(hi), // boundary effects; the coarse bound stands
    }
}

/// Worst-corner settle bound for a gate parameter set: the NOT gate uses the
/// closed-form `t_max` (with its measured fallback); two-input gates measure
/// all four truth-table corners from the opposite rail and take the max.
pub fn gate_settle_bound(params: &GateParams, kappa: f64) -> Result<f64, SeqmapError> {
    match params {
        GateParams::Not(p) => Ok(not_gate_bounds(p, kappa)?.t_max),
        GateParams::TwoInput(p) => two_input_settle_bound(p, kappa),
    }
}

fn two_input_settle_bound(params: &TwoInputGateParams, kappa: f64) -> Result<f64, SeqmapError> {
    let netlist = single_gate(GateParams::TwoInput(*params));
    let horizon =
        100.0 * (1.0 + params.bias.kinetics.k_m) / params.bias.effective_rate() * (-kappa.ln());
    let mut worst: f64 = 0.0;
    for (e2, e3) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
        let ideal = match params.mode {
            crate::gates::TwoInputMode::Or => e2 > 0.5 || e3 > 0.5,
            crate::gates::TwoInputMode::And => e2 > 0.5 && e3 > 0.5,
        };
        let target = if ideal { 1.0 } else { 0.0 };
        let scenario = SettleScenario {
            inputs: vec![("E2".to_string(), e2), ("E3".to_string(), e3)],
            initial_output: 1.0 - target,
            target,
        };
        let t = empirical_settle_time(
            &netlist,
            &scenario,
            kappa,
            &SettleOptions {
                horizon,
                ..SettleOptions::default()
            },
        )?;
        worst = worst.max(t);
    }
    Ok(worst)
}

/// Per-gate delay for a netlist: the worst settle bound across its distinct
/// gate parameter sets (1.0 for gate-free netlists, where any positive delay
/// is vacuous).
pub fn netlist_settle_bound(netlist: &Netlist, kappa: f64) -> Result<f64, SeqmapError> {
    let mut distinct: Vec<GateParams> = Vec::new();
    for g in &netlist.gates {
        if !distinct.contains(&g.params) {
            distinct.push(g.params);
        }
    }
    let mut worst: f64 = 0.0;
    for p in &distinct {
        worst = worst.max(gate_settle_bound(p, kappa)?);
    }
    Ok(if worst == 0.0 { 1.0 } else { worst })
}

/// Ideal Boolean output trace for a netlist under piecewise-constant input
/// waveforms, with each gate level contributing `per_gate_delay` of
/// propagation after an input edge.
///
/// Combinational netlists evaluate the input assignment `depth * delay` ago.
/// The latch applies the hold recurrence `f = x1 OR (x2 AND f_prev)` per
/// input segment, from `latch_initial`, with a two-gate-level shift (one
/// NAND layer).
pub fn reference_signal(
    netlist: &Netlist,
    waveforms: &BTreeMap<String, Schedule>,
    per_gate_delay: f64,
    times: &[f64],
    latch_initial: bool,
) -> Result<Vec<f64>, SeqmapError> {
    if per_gate_delay < 0.0 {
        return Err(SeqmapError::Domain(format!(
            "per-gate delay {per_gate_delay} must be >= 0"
        )));
    }
    for n in &netlist.primary_inputs {
        if !waveforms.contains_key(n) {
            return Err(SeqmapError::Circuit(CircuitError::MissingWaveform(
                n.clone(),
            )));
        }
    }
    if netlist.sequential {
        return latch_reference_signal(netlist, waveforms, per_gate_delay, times, latch_initial);
    }
    let depth = netlist
        .depth()
        .ok_or_else(|| SeqmapError::Domain("cyclic netlist not flagged sequential".into()))?;
    let shift = depth as f64 * per_gate_delay;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let at = t - shift;
        let assignment: BTreeMap<String, bool> = netlist
            .primary_inputs
            .iter()
            .map(|n| (n.clone(), waveforms[n].value_at(at) > 0.5))
            .collect();
        let vals = netlist.boolean_eval(&assignment)?;
        out.push(if vals[0] { 1.0 } else { 0.0 });
    }
    Ok(out)
}

fn latch_reference_signal(
    netlist: &Netlist,
    waveforms: &BTreeMap<String, Schedule>,
    per_gate_delay: f64,
    times: &[f64],
    latch_initial: bool,
) -> Result<Vec<f64>, SeqmapError> {
    // Input segment boundaries: union of all input switch times.
    let mut edges: Vec<f64> = netlist
        .primary_inputs
        .iter()
        .flat_map(|n| waveforms[n].switch_times().collect::<Vec<_>>())
        .collect();
    edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.dedup();

    let x_at = |name: &str, t: f64| waveforms[name].value_at(t) > 0.5;
    let shift = 2.0 * per_gate_delay;
    // (time from which this value holds, reference value)
    let mut levels: Vec<(f64, bool)> = Vec::new();
    let mut state = latch_initial;
    let t0 = times.first().copied().unwrap_or(0.0);
    let mut seg_starts = vec![t0];
    seg_starts.extend(edges.into_iter().filter(|&e| e > t0));
    for (k, &start) in seg_starts.iter().enumerate() {
        let x1 = x_at("X1", start);
        let x2 = x_at("X2", start);
        state = x1 || (x2 && state);
        let effective = if k == 0 { t0 } else { start + shift };
        levels.push((effective, state));
    }
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let mut v = latch_initial;
        for &(from, val) in &levels {
            if t >= from {
                v = val;
            } else {
                break;
            }
        }
        out.push(if v { 1.0 } else { 0.0 });
    }
    Ok(out)
}
