//! Scenario configuration files.
//!
//! A scenario is a single sectioned text file:
//!
//! ```text
//! [circuit]
//! type = gate              # gate | expr | netlist | latch
//! gate = not               # for type = gate
//! v_e = 1.0                # optional rate overrides
//! v_p = 0.2
//! km = 0.1
//! # expr = OR(a, AND(b, NOT(c)))    for type = expr, plus:
//! # style = direct | nand_only
//! # vars = a, b, c
//! # file = some.net                 for type = netlist
//!
//! [threshold]
//! tau0 = 0.2
//! tau1 = 0.8
//!
//! [inputs]
//! E1 = 0@0, 1@40, 0@80     # piecewise-constant: level@time, first at 0
//! # a = random(min_seg=35, max_seg=70)
//!
//! [simulation]
//! t_end = 160
//! dt_out = 0.25
//! seed = 1
//!
//! [init]
//! all = 0.5                # 0.5 | eq | number; per-gate: g0 = 0.1
//!
//! [seqmap]
//! kappa = 0.05
//! tau = auto               # auto | number
//! latch_initial = 0
//! ```
//!
//! `[defaults]` overrides the parameters of synthesized gates with keys like
//! `not.v_e`, `or.v_p`, `and.km`. Unknown keys are rejected with the line
//! number.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::circuit::{
    build_rs_latch, parse_expr, parse_netlist, single_gate, synthesize, BooleanExpr, GateDefaults,
    InitialState, Netlist, SynthesisStyle,
};
use crate::gates::{GateParams, NotGateParams, ThresholdConfig, TwoInputGateParams, TwoInputMode};
use crate::kinetics::{Schedule, ScheduleError};
use crate::rng::SplitMix64;

/// A located configuration diagnostic.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }

    fn general(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config error at line {l}: {}", self.message),
            None => write!(f, "config error: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone)]
pub enum CircuitSpec {
    Gate(GateParams),
    Expr {
        expr: BooleanExpr,
        style: SynthesisStyle,
        vars: Vec<String>,
    },
    Netlist(Netlist),
    Latch,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WaveformSpec {
    /// (level, from-time) pairs; the first time must be 0.
    Explicit(Vec<(f64, f64)>),
    Random {
        min_seg: f64,
        max_seg: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSpec {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct SeqmapSection {
    pub kappa: f64,
    pub tau: TauSpec,
    pub latch_initial: bool,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub circuit: CircuitSpec,
    pub defaults: GateDefaults,
    pub threshold: ThresholdConfig,
    pub inputs: Vec<(String, WaveformSpec)>,
    pub t_end: f64,
    pub dt_out: f64,
    pub seed: u64,
    pub init: InitSpec,
    pub seqmap: Option<SeqmapSection>,
}

#[derive(Debug, Clone)]
pub enum InitSpec {
    Uniform(f64),
    Equilibrium,
    PerGate(BTreeMap<String, f64>),
}

impl ScenarioConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::general(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Parse a scenario; `base_dir` anchors relative netlist file paths.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ConfigError> {
        let raw = RawConfig::parse(text)?;
        raw.resolve(base_dir)
    }

    /// Build the netlist described by the `[circuit]` section.
    pub fn build_netlist(&self) -> Result<Netlist, ConfigError> {
        match &self.circuit {
            CircuitSpec::Gate(params) => Ok(single_gate(*params)),
            CircuitSpec::Expr { expr, style, vars } => {
                synthesize(expr, vars, *style, &self.defaults)
                    .map_err(|e| ConfigError::general(e.to_string()))
            }
            CircuitSpec::Netlist(n) => Ok(n.clone()),
            CircuitSpec::Latch => Ok(build_rs_latch(self.defaults.and, self.defaults.not)),
        }
    }

    /// Materialize input waveforms; `seed` overrides the config's seed.
    pub fn build_waveforms(
        &self,
        netlist: &Netlist,
        seed: Option<u64>,
    ) -> Result<BTreeMap<String, Schedule>, ConfigError> {
        let seed = seed.unwrap_or(self.seed);
        let mut out = BTreeMap::new();
        for (name, spec) in &self.inputs {
            let sched = match spec {
                WaveformSpec::Explicit(points) => explicit_schedule(points)
                    .map_err(|e| ConfigError::general(format!("input {name}: {e}")))?,
                WaveformSpec::Random { min_seg, max_seg } => {
                    let mut rng = SplitMix64::for_label(seed, name);
                    Schedule::random(&mut rng, *min_seg, *max_seg, self.t_end)
                        .map_err(|e| ConfigError::general(format!("input {name}: {e}")))?
                }
            };
            out.insert(name.clone(), sched);
        }
        for required in &netlist.primary_inputs {
            if !out.contains_key(required) {
                return Err(ConfigError::general(format!(
                    "no waveform defined for input {required}"
                )));
            }
        }
        Ok(out)
    }

    pub fn initial_state(&self) -> InitialState {
        match &self.init {
            InitSpec::Uniform(v) => InitialState::Uniform(*v),
            InitSpec::Equilibrium => InitialState::Equilibrium,
            InitSpec::PerGate(m) => InitialState::PerGate(m.clone()),
        }
    }
}

fn explicit_schedule(points: &[(f64, f64)]) -> Result<Schedule, ScheduleError> {
    match points {
        [] => Err(ScheduleError("empty waveform".into())),
        [(level, t0), rest @ ..] => {
            if *t0 != 0.0 {
                return Err(ScheduleError(format!(
                    "first waveform point must be at time 0 (got {t0})"
                )));
            }
            Schedule::new(*level, rest.iter().map(|&(l, t)| (t, l)).collect())
        }
    }
}

/// Key/value line with its 1-based line number.
type Entry = (usize, String, String);

struct RawConfig {
    sections: Vec<(String, Vec<Entry>)>,
}

impl RawConfig {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: Vec<(String, Vec<Entry>)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(lineno, "unterminated section header"))?
                    .trim()
                    .to_ascii_lowercase();
                sections.push((name, Vec::new()));
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                ConfigError::at(lineno, format!("expected key = value, got `{line}`"))
            })?;
            let Some((_, entries)) = sections.last_mut() else {
                return Err(ConfigError::at(lineno, "key outside of any [section]"));
            };
            entries.push((lineno, k.trim().to_string(), v.trim().to_string()));
        }
        Ok(Self { sections })
    }

    fn section(&self, name: &str) -> Option<&[Entry]> {
        self.sections
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| e.as_slice())
    }

    fn resolve(&self, base_dir: &Path) -> Result<ScenarioConfig, ConfigError> {
        for (name, _) in &self.sections {
            if !matches!(
                name.as_str(),
                "circuit" | "defaults" | "threshold" | "inputs" | "simulation" | "init" | "seqmap"
            ) {
                return Err(ConfigError::general(format!("unknown section [{name}]")));
            }
        }

        let defaults = self.parse_defaults()?;
        let circuit = self.parse_circuit(base_dir, &defaults)?;
        let threshold = self.parse_threshold()?;
        let inputs = self.parse_inputs()?;
        let (t_end, dt_out, seed) = self.parse_simulation()?;
        let init = self.parse_init()?;
        let seqmap = self.parse_seqmap()?;

        Ok(ScenarioConfig {
            circuit,
            defaults,
            threshold,
            inputs,
            t_end,
            dt_out,
            seed,
            init,
            seqmap,
        })
    }

    fn parse_circuit(
        &self,
        base_dir: &Path,
        defaults: &GateDefaults,
    ) -> Result<CircuitSpec, ConfigError> {
        let entries = self
            .section("circuit")
            .ok_or_else(|| ConfigError::general("missing [circuit] section"))?;
        let find = |key: &str| entries.iter().find(|(_, k, _)| k == key);
        let (_, _, ty) = find("type").ok_or_else(|| {
            ConfigError::general("[circuit] needs `type = gate|expr|netlist|latch`")
        })?;

        let known_gate_keys = [
            "type", "gate", "v_e", "v_e2", "v_e3", "v_p", "km", "km_e", "km_e2", "km_e3", "km_p",
        ];
        match ty.as_str() {
            "gate" => {
                for (lineno, k, _) in entries {
                    if !known_gate_keys.contains(&k.as_str()) {
                        return Err(ConfigError::at(*lineno, format!("unknown key `{k}`")));
                    }
                }
                let (lineno, _, kind) = find("gate").ok_or_else(|| {
                    ConfigError::general("[circuit] type = gate needs `gate = not|or|and`")
                })?;
                let num = |key: &str| -> Result<Option<f64>, ConfigError> {
                    find(key).map(|(l, _, v)| parse_f64(*l, v)).transpose()
                };
                let km = num("km")?;
                let params = match kind.as_str() {
                    "not" => {
                        let d = defaults.not;
                        let km_e = num("km_e")?.or(km).unwrap_or(d.input.k_m);
                        let km_p = num("km_p")?.or(km).unwrap_or(d.bias.kinetics.k_m);
                        let v_e = num("v_e")?.unwrap_or(d.input.k_cat);
                        let v_p = num("v_p")?.unwrap_or(d.bias.effective_rate());
                        GateParams::Not(NotGateParams {
                            input: crate::gates::EnzymeKinetics::new(v_e, km_e),
                            bias: crate::gates::BiasEnzyme::from_effective_rate(v_p, km_p),
                        })
                    }
                    "or" | "and" => {
                        let mode = if kind == "or" {
                            TwoInputMode::Or
                        } else {
                            TwoInputMode::And
                        };
                        let d = match mode {
                            TwoInputMode::Or => defaults.or,
                            TwoInputMode::And => defaults.and,
                        };
                        let km_e2 = num("km_e2")?.or(km).unwrap_or(d.input_a.k_m);
                        let km_e3 = num("km_e3")?.or(km).unwrap_or(d.input_b.k_m);
                        let km_p = num("km_p")?.or(km).unwrap_or(d.bias.kinetics.k_m);
                        let v_e = num("v_e")?;
                        let v_e2 = num("v_e2")?.or(v_e).unwrap_or(d.input_a.k_cat);
                        let v_e3 = num("v_e3")?.or(v_e).unwrap_or(d.input_b.k_cat);
                        let v_p = num("v_p")?.unwrap_or(d.bias.effective_rate());
                        GateParams::TwoInput(TwoInputGateParams {
                            input_a: crate::gates::EnzymeKinetics::new(v_e2, km_e2),
                            input_b: crate::gates::EnzymeKinetics::new(v_e3, km_e3),
                            bias: crate::gates::BiasEnzyme::from_effective_rate(v_p, km_p),
                            mode,
                        })
                    }
                    other => {
                        return Err(ConfigError::at(
                            *lineno,
                            format!("unknown gate kind `{other}` (use not, or, and)"),
                        ))
                    }
                };
                Ok(CircuitSpec::Gate(params))
            }
            "expr" => {
                let (l_expr, _, text) = find("expr").ok_or_else(|| {
                    ConfigError::general("[circuit] type = expr needs `expr = ...`")
                })?;
                let expr = parse_expr(text).map_err(|e| ConfigError::at(*l_expr, e.to_string()))?;
                let style = match find("style").map(|(_, _, v)| v.as_str()) {
                    None | Some("direct") => SynthesisStyle::Direct,
                    Some("nand_only") => SynthesisStyle::NandOnly,
                    Some(other) => {
                        return Err(ConfigError::general(format!(
                            "unknown style `{other}` (use direct or nand_only)"
                        )))
                    }
                };
                let vars = match find("vars") {
                    Some((_, _, v)) => v
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                    None => expr.variables(),
                };
                Ok(CircuitSpec::Expr { expr, style, vars })
            }
            "netlist" => {
                let (l, _, file) = find("file").ok_or_else(|| {
                    ConfigError::general("[circuit] type = netlist needs `file = path`")
                })?;
                let path: PathBuf = base_dir.join(file);
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    ConfigError::at(*l, format!("cannot read {}: {e}", path.display()))
                })?;
                let netlist =
                    parse_netlist(&text).map_err(|e| ConfigError::at(*l, e.to_string()))?;
                Ok(CircuitSpec::Netlist(netlist))
            }
            "latch" => Ok(CircuitSpec::Latch),
            other => Err(ConfigError::general(format!(
                "unknown circuit type `{other}` (use gate, expr, netlist, latch)"
            ))),
        }
    }

    fn parse_defaults(&self) -> Result<GateDefaults, ConfigError> {
        let mut d = GateDefaults::default();
        let Some(entries) = self.section("defaults") else {
            return Ok(d);
        };
        // Collected as (v_e2, v_e3, v_p, km) per kind, then rebuilt.
        let mut not = (
            d.not.input.k_cat,
            d.not.bias.effective_rate(),
            d.not.input.k_m,
        );
        let mut or = (
            d.or.input_a.k_cat,
            d.or.input_b.k_cat,
            d.or.bias.effective_rate(),
            d.or.input_a.k_m,
        );
        let mut and = (
            d.and.input_a.k_cat,
            d.and.input_b.k_cat,
            d.and.bias.effective_rate(),
            d.and.input_a.k_m,
        );
        for (lineno, k, v) in entries {
            let val = parse_f64(*lineno, v)?;
            match k.as_str() {
                "not.v_e" => not.0 = val,
                "not.v_p" => not.1 = val,
                "not.km" => not.2 = val,
                "or.v_e" => {
                    or.0 = val;
                    or.1 = val;
                }
                "or.v_e2" => or.0 = val,
                "or.v_e3" => or.1 = val,
                "or.v_p" => or.2 = val,
                "or.km" => or.3 = val,
                "and.v_e" => {
                    and.0 = val;
                    and.1 = val;
                }
                "and.v_e2" => and.0 = val,
                "and.v_e3" => and.1 = val,
                "and.v_p" => and.2 = val,
                "and.km" => and.3 = val,
                other => return Err(ConfigError::at(*lineno, format!("unknown key `{other}`"))),
            }
        }
        d.not = NotGateParams::with_rates(not.0, not.1, not.2);
        d.or = TwoInputGateParams::with_rates(TwoInputMode::Or, or.0, or.1, or.2, or.3);
        d.and = TwoInputGateParams::with_rates(TwoInputMode::And, and.0, and.1, and.2, and.3);
        Ok(d)
    }

    fn parse_threshold(&self) -> Result<ThresholdConfig, ConfigError> {
        let Some(entries) = self.section("threshold") else {
            return Ok(ThresholdConfig::default());
        };
        let mut tau0 = 0.2;
        let mut tau1 = 0.8;
        let mut line = None;
        for (lineno, k, v) in entries {
            line = Some(*lineno);
            match k.as_str() {
                "tau0" => tau0 = parse_f64(*lineno, v)?,
                "tau1" => tau1 = parse_f64(*lineno, v)?,
                other => return Err(ConfigError::at(*lineno, format!("unknown key `{other}`"))),
            }
        }
        ThresholdConfig::new(tau0, tau1).map_err(|e| ConfigError {
            line,
            message: e.to_string(),
        })
    }

    fn parse_inputs(&self) -> Result<Vec<(String, WaveformSpec)>, ConfigError> {
        let Some(entries) = self.section("inputs") else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        for (lineno, name, v) in entries {
            let spec = parse_waveform(*lineno, v)?;
            out.push((name.clone(), spec));
        }
        Ok(out)
    }

    fn parse_simulation(&self) -> Result<(f64, f64, u64), ConfigError> {
        let mut t_end = 100.0;
        let mut dt_out = 0.25;
        let mut seed = 0u64;
        if let Some(entries) = self.section("simulation") {
            for (lineno, k, v) in entries {
                match k.as_str() {
                    "t_end" => t_end = parse_f64(*lineno, v)?,
                    "dt_out" => dt_out = parse_f64(*lineno, v)?,
                    "seed" => {
                        seed = v
                            .parse()
                            .map_err(|_| ConfigError::at(*lineno, format!("bad seed `{v}`")))?
                    }
                    other => {
                        return Err(ConfigError::at(*lineno, format!("unknown key `{other}`")))
                    }
                }
            }
        }
        if !(t_end > 0.0) {
            return Err(ConfigError::general(format!("t_end = {t_end} must be > 0")));
        }
        if !(dt_out > 0.0 && dt_out < t_end) {
            return Err(ConfigError::general(format!(
                "dt_out = {dt_out} must be in (0, t_end)"
            )));
        }
        Ok((t_end, dt_out, seed))
    }

    fn parse_init(&self) -> Result<InitSpec, ConfigError> {
        let Some(entries) = self.section("init") else {
            return Ok(InitSpec::Uniform(0.5));
        };
        let mut per_gate = BTreeMap::new();
        let mut uniform = None;
        for (lineno, k, v) in entries {
            if k == "all" {
                if v == "eq" {
                    return Ok(InitSpec::Equilibrium);
                }
                uniform = Some(parse_f64(*lineno, v)?);
            } else {
                per_gate.insert(k.clone(), parse_f64(*lineno, v)?);
            }
        }
        if let Some(u) = uniform {
            if !per_gate.is_empty() {
                return Err(ConfigError::general(
                    "[init] cannot mix `all` with per-gate entries",
                ));
            }
            return Ok(InitSpec::Uniform(u));
        }
        if per_gate.is_empty() {
            Ok(InitSpec::Uniform(0.5))
        } else {
            Ok(InitSpec::PerGate(per_gate))
        }
    }

    fn parse_seqmap(&self) -> Result<Option<SeqmapSection>, ConfigError> {
        let Some(entries) = self.section("seqmap") else {
            return Ok(None);
        };
        let mut kappa = None;
        let mut tau = TauSpec::Auto;
        let mut latch_initial = false;
        for (lineno, k, v) in entries {
            match k.as_str() {
                "kappa" => kappa = Some(parse_f64(*lineno, v)?),
                "tau" => {
                    tau = if v == "auto" {
                        TauSpec::Auto
                    } else {
                        TauSpec::Fixed(parse_f64(*lineno, v)?)
                    }
                }
                "latch_initial" => {
                    latch_initial = match v.as_str() {
                        "0" | "false" => false,
                        "1" | "true" => true,
                        other => {
                            return Err(ConfigError::at(
                                *lineno,
                                format!("bad latch_initial `{other}`"),
                            ))
                        }
                    }
                }
                other => return Err(ConfigError::at(*lineno, format!("unknown key `{other}`"))),
            }
        }
        let kappa = kappa.ok_or_else(|| ConfigError::general("[seqmap] needs `kappa = <0..1>`"))?;
        if !(kappa > 0.0 && kappa < 1.0) {
            return Err(ConfigError::general(format!(
                "kappa = {kappa} outside (0, 1)"
            )));
        }
        if let TauSpec::Fixed(t) = tau {
            if !(t > 0.0) {
                return Err(ConfigError::general(format!("tau = {t} must be > 0")));
            }
        }
        Ok(Some(SeqmapSection {
            kappa,
            tau,
            latch_initial,
        }))
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_f64(lineno: usize, v: &str) -> Result<f64, ConfigError> {
    v.trim()
        .parse()
        .map_err(|_| ConfigError::at(lineno, format!("bad number `{v}`")))
}

/// `0@0, 1@40, ...` or `random(min_seg=.., max_seg=..)`.
fn parse_waveform(lineno: usize, v: &str) -> Result<WaveformSpec, ConfigError> {
    let v = v.trim();
    if let Some(args) = v.strip_prefix("random(").and_then(|s| s.strip_suffix(')')) {
        let mut min_seg = None;
        let mut max_seg = None;
        for part in args.split(',') {
            let (k, val) = part.split_once('=').ok_or_else(|| {
                ConfigError::at(lineno, format!("bad random() argument `{part}`"))
            })?;
            let val = parse_f64(lineno, val)?;
            match k.trim() {
                "min_seg" => min_seg = Some(val),
                "max_seg" => max_seg = Some(val),
                other => {
                    return Err(ConfigError::at(
                        lineno,
                        format!("unknown random() argument `{other}`"),
                    ))
                }
            }
        }
        let (Some(min_seg), Some(max_seg)) = (min_seg, max_seg) else {
            return Err(ConfigError::at(
                lineno,
                "random() needs min_seg and max_seg",
            ));
        };
        return Ok(WaveformSpec::Random { min_seg, max_seg });
    }
    let mut points = Vec::new();
    for part in v.split(',') {
        let (level, time) = part
            .split_once('@')
            .ok_or_else(|| ConfigError::at(lineno, format!("bad waveform point `{part}`")))?;
        points.push((parse_f64(lineno, level)?, parse_f64(lineno, time)?));
    }
    if points.is_empty() {
        return Err(ConfigError::at(lineno, "empty waveform"));
    }
    Ok(WaveformSpec::Explicit(points))
}
