//! Command implementations behind the `enzlogic` binary.
//!
//! Exit-code contract: 0 success/pass, 1 logic or property failure, 2
//! configuration error, 3 numerical failure (integration breakdown or a
//! non-settling empirical bound). Commands write their reports to the given
//! writer so they are directly testable.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::circuit::{dump_netlist, simulate_circuit, CircuitError, Netlist, SignalSource};
use crate::config::{CircuitSpec, ScenarioConfig, SeqmapSection, TauSpec};
use crate::gates::{threshold, GateParams, LogicLevel};
use crate::kinetics::{IntegratorOptions, KineticsError, Trace};
use crate::seqmap::{
    self, empirical_settle_time, netlist_settle_bound, not_gate_bounds, SeqMapSpec, SeqmapError,
    SettleOptions, SettleScenario,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_LOGIC: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// A command failure carrying its exit code.
#[derive(Debug)]
pub struct CmdFailure {
    pub code: i32,
    pub message: String,
}

impl CmdFailure {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }
}

impl From<crate::config::ConfigError> for CmdFailure {
    fn from(e: crate::config::ConfigError) -> Self {
        CmdFailure::config(e.to_string())
    }
}

impl From<CircuitError> for CmdFailure {
    fn from(e: CircuitError) -> Self {
        match &e {
            CircuitError::Kinetics(KineticsError::Integration(_)) => {
                CmdFailure::numeric(e.to_string())
            }
            _ => CmdFailure::config(e.to_string()),
        }
    }
}

impl From<SeqmapError> for CmdFailure {
    fn from(e: SeqmapError) -> Self {
        match &e {
            SeqmapError::NonSettling { .. } => CmdFailure::numeric(e.to_string()),
            SeqmapError::Circuit(CircuitError::Kinetics(KineticsError::Integration(_))) => {
                CmdFailure::numeric(e.to_string())
            }
            _ => CmdFailure::config(e.to_string()),
        }
    }
}

pub type CmdResult = Result<i32, CmdFailure>;

fn finish(result: CmdResult, stderr: &mut dyn Write) -> i32 {
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

/// `simulate`: run the scenario and write the trace CSV to `out`.
pub fn cmd_simulate(config: &Path, out: &Path, seed: Option<u64>, stderr: &mut dyn Write) -> i32 {
    finish(run_simulate(config, out, seed), stderr)
}

fn run_simulate(config: &Path, out: &Path, seed: Option<u64>) -> CmdResult {
    let cfg = ScenarioConfig::from_file(config)?;
    let trace = simulate_scenario(&cfg, seed)?;
    let mut file = std::fs::File::create(out)
        .map_err(|e| CmdFailure::config(format!("cannot create {}: {e}", out.display())))?;
    trace
        .write_csv(&mut file)
        .map_err(|e| CmdFailure::numeric(format!("write failed: {e}")))?;
    Ok(EXIT_OK)
}

/// Simulate a parsed scenario (shared by `simulate` and `check-seqmap`).
pub fn simulate_scenario(cfg: &ScenarioConfig, seed: Option<u64>) -> Result<Trace, CmdFailure> {
    let netlist = cfg.build_netlist()?;
    let waveforms = cfg.build_waveforms(&netlist, seed)?;
    let trace = simulate_circuit(
        &netlist,
        &waveforms,
        cfg.t_end,
        cfg.dt_out,
        &cfg.initial_state(),
        &IntegratorOptions::default(),
    )?;
    Ok(trace)
}

/// `truth-table`: print one row per input assignment with the thresholded
/// equilibrium against the Boolean reference; exit 0 iff every row matches.
pub fn cmd_truth_table(config: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    finish(run_truth_table(config, stdout), stderr)
}

fn run_truth_table(config: &Path, stdout: &mut dyn Write) -> CmdResult {
    let cfg = ScenarioConfig::from_file(config)?;
    truth_table_scenario(&cfg, stdout)
}

/// Truth-table body over a parsed scenario (shared with the C bindings).
pub fn truth_table_scenario(cfg: &ScenarioConfig, stdout: &mut dyn Write) -> CmdResult {
    let netlist = cfg.build_netlist()?;
    if netlist.sequential {
        return Err(CmdFailure::config(
            "truth-table needs a single gate or combinational netlist",
        ));
    }
    let inputs = netlist.primary_inputs.clone();
    if inputs.len() > 12 {
        return Err(CmdFailure::config(format!(
            "{} inputs is too many to enumerate",
            inputs.len()
        )));
    }
    let out = |w: &mut dyn Write, s: String| {
        writeln!(w, "{s}").map_err(|e| CmdFailure::numeric(format!("write failed: {e}")))
    };
    out(
        stdout,
        format!(
            "# inputs: {}  outputs: {}",
            inputs.join(","),
            netlist
                .primary_outputs
                .iter()
                .map(|(n, _)| n.as_str())
                .collect::<Vec<_>>()
                .join(",")
        ),
    )?;
    let mut all_match = true;
    for bits in 0..(1u32 << inputs.len()) {
        let levels: BTreeMap<String, f64> = inputs
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), f64::from((bits >> i) & 1)))
            .collect();
        let bools: BTreeMap<String, bool> =
            levels.iter().map(|(k, v)| (k.clone(), *v > 0.5)).collect();
        let (_, eq_outs) = netlist.equilibrium_outputs_unchecked(&levels)?;
        let ideal = netlist.boolean_eval(&bools)?;
        let assignment = inputs
            .iter()
            .map(|n| format!("{}={}", n, if bools[n] { 1 } else { 0 }))
            .collect::<Vec<_>>()
            .join(" ");
        for (k, (eq, want)) in eq_outs.iter().zip(&ideal).enumerate() {
            let level =
                threshold(*eq, &cfg.threshold).map_err(|e| CmdFailure::numeric(e.to_string()))?;
            let matches = level == LogicLevel::from_bool(*want);
            all_match &= matches;
            out(
                stdout,
                format!(
                    "{assignment}  {}  equilibrium={eq:.9}  level={level}  oracle={}  match={}",
                    netlist.primary_outputs[k].0,
                    if *want { "1" } else { "0" },
                    if matches { "yes" } else { "NO" }
                ),
            )?;
        }
    }
    Ok(if all_match { EXIT_OK } else { EXIT_LOGIC })
}

/// Resolved check parameters: per-gate reference delay and the Definition-1
/// lookahead `tau`.
struct CheckTiming {
    per_gate_delay: f64,
    tau: f64,
}

fn resolve_timing(netlist: &Netlist, section: &SeqmapSection) -> Result<CheckTiming, SeqmapError> {
    // Gate levels the reference shifts by: combinational depth, or the
    // two-gate NAND layer of the latch (the check lookahead doubles it to
    // cover one full loop traversal).
    let depth = if netlist.sequential {
        2
    } else {
        netlist.depth().unwrap_or(0).max(1)
    };
    match section.tau {
        TauSpec::Fixed(tau) => Ok(CheckTiming {
            per_gate_delay: tau / depth as f64,
            tau,
        }),
        TauSpec::Auto => {
            let bound = netlist_settle_bound(netlist, section.kappa)?;
            let factor = if netlist.sequential { 2 } else { 1 };
            Ok(CheckTiming {
                per_gate_delay: bound,
                tau: bound * (depth * factor) as f64,
            })
        }
    }
}

/// `check-seqmap`: simulate, build the ideal reference, and run the
/// delayed-recovery check. Exit 0 on pass, 1 on fail, 3 if the auto delay
/// hits the non-settling horizon.
pub fn cmd_check_seqmap(
    config: &Path,
    seed: Option<u64>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    finish(run_check_seqmap(config, seed, stdout), stderr)
}

fn run_check_seqmap(config: &Path, seed: Option<u64>, stdout: &mut dyn Write) -> CmdResult {
    let cfg = ScenarioConfig::from_file(config)?;
    check_seqmap_scenario(&cfg, seed, stdout)
}

/// Check body over a parsed scenario (shared with the C bindings).
pub fn check_seqmap_scenario(
    cfg: &ScenarioConfig,
    seed: Option<u64>,
    stdout: &mut dyn Write,
) -> CmdResult {
    let section = cfg
        .seqmap
        .clone()
        .ok_or_else(|| CmdFailure::config("check-seqmap needs a [seqmap] section"))?;
    let netlist = cfg.build_netlist()?;
    let waveforms = cfg.build_waveforms(&netlist, seed)?;
    let timing = resolve_timing(&netlist, &section)?;
    let trace = simulate_scenario(cfg, seed)?;

    let (output_name, _) = netlist
        .primary_outputs
        .first()
        .ok_or_else(|| CmdFailure::config("netlist has no primary output"))?;
    let output = trace
        .series(output_name)
        .ok_or_else(|| CmdFailure::config(format!("no trace column {output_name}")))?;
    let reference = seqmap::reference_signal(
        &netlist,
        &waveforms,
        timing.per_gate_delay,
        trace.times(),
        section.latch_initial,
    )?;
    let spec = SeqMapSpec {
        kappa: section.kappa,
        tau: timing.tau,
        reference,
    };
    let verdict = seqmap::check(trace.times(), output, &spec)?;

    let mut print = |s: String| {
        writeln!(stdout, "{s}").map_err(|e| CmdFailure::numeric(format!("write failed: {e}")))
    };
    print(format!(
        "output={output_name} kappa={} tau={:.6} per_gate_delay={:.6}",
        section.kappa, timing.tau, timing.per_gate_delay
    ))?;
    if verdict.checked == 0 {
        print("warning: all instants unchecked (trace shorter than tau)".to_string())?;
    }
    print(verdict.report().trim_end().to_string())?;
    Ok(if verdict.pass { EXIT_OK } else { EXIT_LOGIC })
}

/// Run `check-seqmap` over several scenario files, `jobs` at a time; prints
/// each report prefixed by its path and exits with the worst code.
pub fn cmd_check_seqmap_batch(
    configs: &[PathBuf],
    seed: Option<u64>,
    jobs: usize,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let jobs = jobs.max(1);
    let mut results: Vec<(i32, Vec<u8>, Vec<u8>)> = Vec::with_capacity(configs.len());
    for chunk in configs.chunks(jobs) {
        let chunk_results: Vec<(i32, Vec<u8>, Vec<u8>)> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunk
                .iter()
                .map(|path| {
                    scope.spawn(move || {
                        let mut out = Vec::new();
                        let mut err = Vec::new();
                        let code = cmd_check_seqmap(path, seed, &mut out, &mut err);
                        (code, out, err)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        results.extend(chunk_results);
    }
    let mut worst = EXIT_OK;
    for (path, (code, out, err)) in configs.iter().zip(results) {
        let _ = writeln!(stdout, "== {} ==", path.display());
        let _ = stdout.write_all(&out);
        let _ = stderr.write_all(&err);
        worst = worst.max(code);
    }
    worst
}

/// `bounds`: closed-form NOT-gate settle bounds plus measured settle times
/// for both transitions.
pub fn cmd_bounds(config: &Path, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    finish(run_bounds(config, stdout), stderr)
}

fn run_bounds(config: &Path, stdout: &mut dyn Write) -> CmdResult {
    let cfg = ScenarioConfig::from_file(config)?;
    let CircuitSpec::Gate(GateParams::Not(params)) = &cfg.circuit else {
        return Err(CmdFailure::config(
            "bounds needs `[circuit] type = gate` with `gate = not`",
        ));
    };
    let section = cfg
        .seqmap
        .as_ref()
        .ok_or_else(|| CmdFailure::config("bounds needs a [seqmap] section with kappa"))?;
    let kappa = section.kappa;
    let bounds = not_gate_bounds(params, kappa).map_err(|e| match e {
        SeqmapError::Domain(m) => CmdFailure::config(m),
        other => CmdFailure::from(other),
    })?;

    let netlist = cfg.build_netlist()?;
    let settle = |inputs: f64, initial: f64, target: f64| -> Result<f64, CmdFailure> {
        empirical_settle_time(
            &netlist,
            &SettleScenario {
                inputs: vec![("E1".to_string(), inputs)],
                initial_output: initial,
                target,
            },
            kappa,
            &SettleOptions {
                horizon: 100.0 * bounds.t_plus,
                ..SettleOptions::default()
            },
        )
        .map_err(CmdFailure::from)
    };
    let forward = settle(0.0, 0.0, 1.0)?;
    let backward = settle(1.0, 1.0, 0.0)?;

    let mut print = |s: String| {
        writeln!(stdout, "{s}").map_err(|e| CmdFailure::numeric(format!("write failed: {e}")))
    };
    print(format!("kappa = {kappa}"))?;
    print(format!("t_plus = {:.6}", bounds.t_plus))?;
    if bounds.t_minus_domain_violated {
        print(format!(
            "t_minus = undefined: domain violated (kappa <= (1+K_m)*[P1]); empirical fallback = {:.6}",
            bounds.t_minus_empirical.unwrap_or(f64::NAN)
        ))?;
    } else {
        print(format!("t_minus = {:.6}", bounds.t_minus))?;
    }
    print(format!("t_max = {:.6}", bounds.t_max))?;
    print(format!("empirical_settle_forward = {forward:.6}"))?;
    print(format!("empirical_settle_backward = {backward:.6}"))?;
    Ok(EXIT_OK)
}

/// `synth`: synthesize the configured circuit and emit the netlist dump.
pub fn cmd_synth(
    config: &Path,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    finish(run_synth(config, out, stdout), stderr)
}

fn run_synth(config: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> CmdResult {
    let cfg = ScenarioConfig::from_file(config)?;
    if matches!(cfg.circuit, CircuitSpec::Gate(_)) {
        return Err(CmdFailure::config(
            "synth needs `type = expr`, `type = latch`, or `type = netlist`",
        ));
    }
    let netlist = cfg.build_netlist()?;
    let dump = dump_netlist(&netlist);
    match out {
        Some(path) => std::fs::write(path, dump)
            .map_err(|e| CmdFailure::config(format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(dump.as_bytes())
            .map_err(|e| CmdFailure::numeric(format!("write failed: {e}")))?,
    }
    Ok(EXIT_OK)
}

/// Sanity helper shared by tests: every conserved pair in a trace sums to 1
/// and every concentration is in [0, 1].
pub fn assert_trace_well_formed(trace: &Trace) -> Result<(), String> {
    for (s_name, p_name) in trace.pair_column_names() {
        let s = trace.series(s_name).unwrap();
        let p = trace.series(p_name).unwrap();
        for (i, (a, b)) in s.iter().zip(p).enumerate() {
            if (a + b - 1.0).abs() >= 1e-9 {
                return Err(format!(
                    "conservation violated for {s_name}/{p_name} at sample {i}: {a} + {b}"
                ));
            }
            if !(0.0..=1.0).contains(a) || !(0.0..=1.0).contains(b) {
                return Err(format!(
                    "bounds violated for {s_name}/{p_name} at sample {i}: {a}, {b}"
                ));
            }
        }
    }
    Ok(())
}

/// Primary output series of a netlist trace (first output).
pub fn primary_output_series<'t>(netlist: &Netlist, trace: &'t Trace) -> Option<&'t [f64]> {
    let (name, src) = netlist.primary_outputs.first()?;
    trace.series(name).or_else(|| match src {
        SignalSource::Gate(j) => trace.series(&netlist.gates[*j].output_species()),
        SignalSource::Input(n) => trace.series(n),
    })
}
