//! Gate netlists: construction, synthesis, elaboration into one joint
//! reaction network, and circuit-level simulation.
//!
//! A netlist wires gate outputs (the NOT gate's substrate, the two-input
//! gates' product) into downstream input-enzyme slots. Coupling is identity:
//! the destination enzyme's concentration tracks the source species exactly,
//! with no transport delay and without loading the source. Combinational
//! netlists must be acyclic; cycles are allowed only when the netlist is
//! flagged sequential (the RS latch).

mod expr;
mod synth;

pub use expr::{expression_corpus, parse_expr, BooleanExpr};
pub use synth::{synthesize, GateDefaults, SynthesisStyle};

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::gates::{self, GateError, GateParams, NotGateParams, TwoInputGateParams, TwoInputMode};
use crate::kinetics::{
    integrate, CatalyzedConversion, ConservedPair, CouplingBinding, EnzymeSignal,
    IntegratorOptions, KineticsError, ReactionNetwork, Schedule, Slot, Trace,
};

#[derive(Debug, Clone, PartialEq)]
pub enum CircuitError {
    Parse(String),
    UndeclaredVariable(String),
    Validation(String),
    MissingWaveform(String),
    Kinetics(KineticsError),
    Gate(GateError),
}

impl fmt::Display for CircuitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CircuitError::Parse(m) => write!(f, "parse error: {m}"),
            CircuitError::UndeclaredVariable(v) => write!(f, "undeclared variable {v}"),
            CircuitError::Validation(m) => write!(f, "invalid netlist: {m}"),
            CircuitError::MissingWaveform(v) => write!(f, "no waveform for input {v}"),
            CircuitError::Kinetics(e) => write!(f, "{e}"),
            CircuitError::Gate(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CircuitError {}

impl From<KineticsError> for CircuitError {
    fn from(e: KineticsError) -> Self {
        CircuitError::Kinetics(e)
    }
}

impl From<GateError> for CircuitError {
    fn from(e: GateError) -> Self {
        CircuitError::Gate(e)
    }
}

/// Where a wire's signal comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignalSource {
    /// A primary input waveform, by name.
    Input(String),
    /// The output species of a gate, by index.
    Gate(usize),
}

/// Which input-enzyme slot of the destination gate a wire drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InputSlot {
    A,
    B,
}

impl fmt::Display for InputSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputSlot::A => write!(f, "a"),
            InputSlot::B => write!(f, "b"),
        }
    }
}

/// Identity-gain coupling from a species or primary input to an enzyme slot.
#[derive(Debug, Clone, PartialEq)]
pub struct Wire {
    pub source: SignalSource,
    pub dest_gate: usize,
    pub dest_slot: InputSlot,
}

/// Species/enzyme naming for one gate instance. `None` entries fall back to
/// names derived from the gate id (`<id>.S`, `<id>.Sp`, `<id>.Ea`, ...).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct GateLabels {
    pub substrate: Option<String>,
    pub product: Option<String>,
    pub enzyme_a: Option<String>,
    pub enzyme_b: Option<String>,
    pub bias: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateInstance {
    pub id: String,
    pub params: GateParams,
    pub labels: GateLabels,
}

impl GateInstance {
    pub fn new(id: &str, params: GateParams) -> Self {
        Self {
            id: id.to_string(),
            params,
            labels: GateLabels::default(),
        }
    }

    pub fn substrate_name(&self) -> String {
        self.labels
            .substrate
            .clone()
            .unwrap_or_else(|| format!("{}.S", self.id))
    }

    pub fn product_name(&self) -> String {
        self.labels
            .product
            .clone()
            .unwrap_or_else(|| format!("{}.Sp", self.id))
    }

    pub fn enzyme_name(&self, slot: InputSlot) -> String {
        match slot {
            InputSlot::A => self
                .labels
                .enzyme_a
                .clone()
                .unwrap_or_else(|| format!("{}.Ea", self.id)),
            InputSlot::B => self
                .labels
                .enzyme_b
                .clone()
                .unwrap_or_else(|| format!("{}.Eb", self.id)),
        }
    }

    pub fn bias_name(&self) -> String {
        self.labels
            .bias
            .clone()
            .unwrap_or_else(|| format!("{}.P", self.id))
    }

    /// Name of the species carrying this gate's output.
    pub fn output_species(&self) -> String {
        match self.params {
            GateParams::Not(_) => self.substrate_name(),
            GateParams::TwoInput(_) => self.product_name(),
        }
    }

    fn slots(&self) -> &'static [InputSlot] {
        match self.params {
            GateParams::Not(_) => &[InputSlot::A],
            GateParams::TwoInput(_) => &[InputSlot::A, InputSlot::B],
        }
    }
}

/// A directed graph of gates and couplings.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub gates: Vec<GateInstance>,
    pub wires: Vec<Wire>,
    pub primary_inputs: Vec<String>,
    /// (output name, signal source); exported as extra trace columns.
    pub primary_outputs: Vec<(String, SignalSource)>,
    /// Cycles are permitted only when this is set.
    pub sequential: bool,
}

impl Netlist {
    pub fn validate(&self) -> Result<(), CircuitError> {
        let mut names = HashSet::new();
        for n in &self.primary_inputs {
            if !names.insert(n.clone()) {
                return Err(CircuitError::Validation(format!("duplicate input {n}")));
            }
        }
        for g in &self.gates {
            if !names.insert(g.id.clone()) {
                return Err(CircuitError::Validation(format!(
                    "duplicate name {} (gate ids and input names share a namespace)",
                    g.id
                )));
            }
        }
        let mut driven: HashMap<(usize, InputSlot), usize> = HashMap::new();
        for w in &self.wires {
            if w.dest_gate >= self.gates.len() {
                return Err(CircuitError::Validation(format!(
                    "wire drives missing gate #{}",
                    w.dest_gate
                )));
            }
            let dest = &self.gates[w.dest_gate];
            if !dest.slots().contains(&w.dest_slot) {
                return Err(CircuitError::Validation(format!(
                    "gate {} has no input slot {}",
                    dest.id, w.dest_slot
                )));
            }
            match &w.source {
                SignalSource::Input(n) => {
                    if !self.primary_inputs.contains(n) {
                        return Err(CircuitError::Validation(format!(
                            "wire reads undeclared input {n}"
                        )));
                    }
                }
                SignalSource::Gate(j) => {
                    if *j >= self.gates.len() {
                        return Err(CircuitError::Validation(format!(
                            "wire reads missing gate #{j}"
                        )));
                    }
                }
            }
            *driven.entry((w.dest_gate, w.dest_slot)).or_insert(0) += 1;
        }
        for (i, g) in self.gates.iter().enumerate() {
            for slot in g.slots() {
                match driven.get(&(i, *slot)).copied().unwrap_or(0) {
                    0 => {
                        return Err(CircuitError::Validation(format!(
                            "dangling input: gate {} slot {slot} has no driving wire",
                            g.id
                        )))
                    }
                    1 => {}
                    n => {
                        return Err(CircuitError::Validation(format!(
                            "gate {} slot {slot} driven by {n} wires",
                            g.id
                        )))
                    }
                }
            }
        }
        for (name, src) in &self.primary_outputs {
            match src {
                SignalSource::Gate(j) if *j >= self.gates.len() => {
                    return Err(CircuitError::Validation(format!(
                        "output {name} reads missing gate #{j}"
                    )));
                }
                SignalSource::Input(n) if !self.primary_inputs.contains(n) => {
                    return Err(CircuitError::Validation(format!(
                        "output {name} reads undeclared input {n}"
                    )));
                }
                _ => {}
            }
        }
        if self.has_cycle() && !self.sequential {
            return Err(CircuitError::Validation(
                "combinational netlist contains a cycle (flag it sequential if intended)".into(),
            ));
        }
        Ok(())
    }

    /// Gate-to-gate adjacency: edges[j] holds the gates fed by gate j.
    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut edges = vec![Vec::new(); self.gates.len()];
        for w in &self.wires {
            if let SignalSource::Gate(j) = w.source {
                edges[j].push(w.dest_gate);
            }
        }
        edges
    }

    pub fn has_cycle(&self) -> bool {
        self.topological_order().is_none()
    }

    /// Kahn topological order over gates, or None if cyclic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.gates.len();
        let edges = self.adjacency();
        let mut indegree = vec![0usize; n];
        for targets in &edges {
            for &t in targets {
                indegree[t] += 1;
            }
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(i) = queue.pop() {
            order.push(i);
            for &t in &edges[i] {
                indegree[t] -= 1;
                if indegree[t] == 0 {
                    queue.push(t);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    /// Longest gate path from the primary inputs to each gate (a gate fed
    /// only by inputs has depth 1). None for cyclic netlists.
    pub fn gate_depths(&self) -> Option<Vec<usize>> {
        let order = self.topological_order()?;
        let mut depth = vec![1usize; self.gates.len()];
        for &i in &order {
            for w in self.wires.iter().filter(|w| w.dest_gate == i) {
                if let SignalSource::Gate(j) = w.source {
                    depth[i] = depth[i].max(depth[j] + 1);
                }
            }
        }
        Some(depth)
    }

    /// Depth of the deepest primary output (0 for outputs wired straight to
    /// an input). None for cyclic netlists.
    pub fn depth(&self) -> Option<usize> {
        let depths = self.gate_depths()?;
        Some(
            self.primary_outputs
                .iter()
                .map(|(_, src)| match src {
                    SignalSource::Input(_) => 0,
                    SignalSource::Gate(j) => depths[*j],
                })
                .max()
                .unwrap_or(0),
        )
    }

    fn gate_input_sources(&self, i: usize) -> Vec<&SignalSource> {
        let mut slots: Vec<(&InputSlot, &SignalSource)> = self
            .wires
            .iter()
            .filter(|w| w.dest_gate == i)
            .map(|w| (&w.dest_slot, &w.source))
            .collect();
        slots.sort_by_key(|(s, _)| matches!(s, InputSlot::B));
        slots.into_iter().map(|(_, src)| src).collect()
    }

    /// Ideal Boolean evaluation of a combinational netlist.
    pub fn boolean_eval(&self, inputs: &BTreeMap<String, bool>) -> Result<Vec<bool>, CircuitError> {
        let order = self.topological_order().ok_or_else(|| {
            CircuitError::Validation("boolean_eval requires an acyclic netlist".into())
        })?;
        let mut gate_out = vec![false; self.gates.len()];
        let lookup = |src: &SignalSource, gate_out: &[bool]| -> Result<bool, CircuitError> {
            match src {
                SignalSource::Input(n) => inputs
                    .get(n)
                    .copied()
                    .ok_or_else(|| CircuitError::MissingWaveform(n.clone())),
                SignalSource::Gate(j) => Ok(gate_out[*j]),
            }
        };
        for &i in &order {
            let vals: Vec<bool> = self
                .gate_input_sources(i)
                .into_iter()
                .map(|s| lookup(s, &gate_out))
                .collect::<Result<_, _>>()?;
            gate_out[i] = self.gates[i].params.boolean(&vals);
        }
        self.primary_outputs
            .iter()
            .map(|(_, src)| lookup(src, &gate_out))
            .collect()
    }

    /// Chemical equilibrium of a combinational netlist: propagate gate
    /// equilibria in topological order, feeding each downstream enzyme the
    /// upstream output concentration. Returns the output-species
    /// concentration of every gate, plus the primary-output values.
    pub fn equilibrium_outputs(
        &self,
        input_levels: &BTreeMap<String, f64>,
    ) -> Result<(Vec<f64>, Vec<f64>), CircuitError> {
        self.equilibrium_outputs_impl(input_levels, true)
    }

    /// Equilibrium propagation without per-gate rate-constraint validation,
    /// so violating parameter sets can still be diagnosed row by row.
    pub fn equilibrium_outputs_unchecked(
        &self,
        input_levels: &BTreeMap<String, f64>,
    ) -> Result<(Vec<f64>, Vec<f64>), CircuitError> {
        self.equilibrium_outputs_impl(input_levels, false)
    }

    fn equilibrium_outputs_impl(
        &self,
        input_levels: &BTreeMap<String, f64>,
        checked: bool,
    ) -> Result<(Vec<f64>, Vec<f64>), CircuitError> {
        let order = self.topological_order().ok_or_else(|| {
            CircuitError::Validation("equilibrium propagation requires an acyclic netlist".into())
        })?;
        let mut gate_out = vec![0.0f64; self.gates.len()];
        let lookup = |src: &SignalSource, gate_out: &[f64]| -> Result<f64, CircuitError> {
            match src {
                SignalSource::Input(n) => input_levels
                    .get(n)
                    .copied()
                    .ok_or_else(|| CircuitError::MissingWaveform(n.clone())),
                SignalSource::Gate(j) => Ok(gate_out[*j]),
            }
        };
        for &i in &order {
            let vals: Vec<f64> = self
                .gate_input_sources(i)
                .into_iter()
                .map(|s| lookup(s, &gate_out))
                .collect::<Result<_, _>>()?;
            gate_out[i] = if checked {
                gates::equilibrium_output(&self.gates[i].params, &vals)?
            } else {
                gates::equilibrium_output_unchecked(&self.gates[i].params, &vals)?
            };
        }
        let outs = self
            .primary_outputs
            .iter()
            .map(|(_, src)| lookup(src, &gate_out))
            .collect::<Result<_, _>>()?;
        Ok((gate_out, outs))
    }
}

/// How gate pairs are initialized before integration.
#[derive(Debug, Clone)]
pub enum InitialState {
    /// Every pair starts at this substrate concentration.
    Uniform(f64),
    /// Start each gate at its equilibrium for the initial input levels
    /// (combinational netlists only).
    Equilibrium,
    /// Per-gate substrate concentrations by gate id; missing ids get 0.5.
    PerGate(BTreeMap<String, f64>),
}

impl Default for InitialState {
    fn default() -> Self {
        InitialState::Uniform(0.5)
    }
}

/// A netlist elaborated into one reaction network.
pub struct Elaborated {
    pub network: ReactionNetwork,
    /// (output name, species name or None when the output is wired straight
    /// to a primary input).
    pub outputs: Vec<(String, Option<String>)>,
}

/// Build the joint reaction network for a netlist: one conserved pair and
/// enzyme set per gate, wires installed as schedule assignments (from
/// primary inputs) or live couplings (from upstream species).
pub fn elaborate(
    netlist: &Netlist,
    waveforms: &BTreeMap<String, Schedule>,
    init: &InitialState,
) -> Result<Elaborated, CircuitError> {
    netlist.validate()?;

    let initial: Vec<f64> = match init {
        InitialState::Uniform(s0) => vec![*s0; netlist.gates.len()],
        InitialState::PerGate(map) => netlist
            .gates
            .iter()
            .map(|g| map.get(&g.id).copied().unwrap_or(0.5))
            .collect(),
        InitialState::Equilibrium => {
            let levels: BTreeMap<String, f64> = netlist
                .primary_inputs
                .iter()
                .map(|n| {
                    waveforms
                        .get(n)
                        .map(|s| (n.clone(), s.initial()))
                        .ok_or_else(|| CircuitError::MissingWaveform(n.clone()))
                })
                .collect::<Result<_, _>>()?;
            let (gate_out, _) = netlist.equilibrium_outputs(&levels)?;
            netlist
                .gates
                .iter()
                .zip(&gate_out)
                .map(|(g, &out)| match g.params {
                    // The stored state is the substrate concentration.
                    GateParams::Not(_) => out,
                    GateParams::TwoInput(_) => 1.0 - out,
                })
                .collect()
        }
    };

    let mut pairs = Vec::new();
    let mut enzymes: Vec<EnzymeSignal> = Vec::new();
    let mut conversions = Vec::new();
    let mut couplings = Vec::new();

    // Deferred couplings: (enzyme index, source gate) resolved to pair/slot
    // after all pairs exist (pair index == gate index by construction).
    for (i, g) in netlist.gates.iter().enumerate() {
        let s0 = initial.get(i).copied().unwrap_or(0.5);
        if !(0.0..=1.0).contains(&s0) {
            return Err(CircuitError::Validation(format!(
                "initial concentration {s0} for gate {} outside [0, 1]",
                g.id
            )));
        }
        pairs.push(ConservedPair::new(
            &g.substrate_name(),
            &g.product_name(),
            s0,
        )?);

        let mut add_input_enzyme = |slot: InputSlot,
                                    kinetics: &gates::EnzymeKinetics,
                                    enzymes: &mut Vec<EnzymeSignal>,
                                    couplings: &mut Vec<CouplingBinding>|
         -> Result<(), CircuitError> {
            let wire = netlist
                .wires
                .iter()
                .find(|w| w.dest_gate == i && w.dest_slot == slot)
                .expect("validated: exactly one wire per slot");
            let (schedule, coupling) = match &wire.source {
                SignalSource::Input(n) => {
                    let sched = waveforms
                        .get(n)
                        .cloned()
                        .ok_or_else(|| CircuitError::MissingWaveform(n.clone()))?;
                    (sched, None)
                }
                SignalSource::Gate(j) => {
                    let slot_kind = match netlist.gates[*j].params {
                        GateParams::Not(_) => Slot::Substrate,
                        GateParams::TwoInput(_) => Slot::Product,
                    };
                    (
                        Schedule::constant(0.0)
                            .map_err(|e| CircuitError::Validation(e.to_string()))?,
                        Some((*j, slot_kind)),
                    )
                }
            };
            let idx = enzymes.len();
            enzymes.push(
                EnzymeSignal::new(&g.enzyme_name(slot), kinetics.k_cat, kinetics.k_m, schedule)
                    .map_err(CircuitError::Kinetics)?,
            );
            if let Some((src_pair, src_slot)) = coupling {
                couplings.push(CouplingBinding {
                    enzyme: idx,
                    source_pair: src_pair,
                    source_slot: src_slot,
                });
            }
            conversions.push(CatalyzedConversion {
                pair: i,
                consumes: Slot::Substrate,
                enzyme: idx,
            });
            Ok(())
        };

        let bias = match &g.params {
            GateParams::Not(p) => {
                add_input_enzyme(InputSlot::A, &p.input, &mut enzymes, &mut couplings)?;
                &p.bias
            }
            GateParams::TwoInput(p) => {
                add_input_enzyme(InputSlot::A, &p.input_a, &mut enzymes, &mut couplings)?;
                add_input_enzyme(InputSlot::B, &p.input_b, &mut enzymes, &mut couplings)?;
                &p.bias
            }
        };
        let bias_idx = enzymes.len();
        enzymes.push(
            EnzymeSignal::new(
                &g.bias_name(),
                bias.kinetics.k_cat,
                bias.kinetics.k_m,
                Schedule::constant(bias.concentration)
                    .map_err(|e| CircuitError::Validation(e.to_string()))?,
            )
            .map_err(CircuitError::Kinetics)?,
        );
        conversions.push(CatalyzedConversion {
            pair: i,
            consumes: Slot::Product,
            enzyme: bias_idx,
        });
    }

    let network = ReactionNetwork::new(pairs, enzymes, conversions, couplings)?;
    let outputs = netlist
        .primary_outputs
        .iter()
        .map(|(name, src)| {
            let species = match src {
                SignalSource::Gate(j) => Some(netlist.gates[*j].output_species()),
                SignalSource::Input(_) => None,
            };
            (name.clone(), species)
        })
        .collect();
    Ok(Elaborated { network, outputs })
}

/// Joint ODE simulation of an elaborated netlist. The returned trace holds
/// every species and enzyme, plus one column per primary output.
pub fn simulate_circuit(
    netlist: &Netlist,
    waveforms: &BTreeMap<String, Schedule>,
    t_end: f64,
    dt_out: f64,
    init: &InitialState,
    opts: &IntegratorOptions,
) -> Result<Trace, CircuitError> {
    let elaborated = elaborate(netlist, waveforms, init)?;
    let mut trace = integrate(&elaborated.network, 0.0, t_end, dt_out, opts)?;
    for (name, species) in &elaborated.outputs {
        match species {
            Some(sp) => {
                trace.append_alias(name, sp);
            }
            None => {
                // Output wired straight to a primary input: sample its
                // waveform onto the grid.
                let (alias_name, src) = netlist
                    .primary_outputs
                    .iter()
                    .find(|(n, _)| n == name)
                    .expect("output exists");
                if let SignalSource::Input(input_name) = src {
                    let sched = waveforms
                        .get(input_name)
                        .ok_or_else(|| CircuitError::MissingWaveform(input_name.clone()))?;
                    let values: Vec<f64> =
                        trace.times().iter().map(|&t| sched.value_at(t)).collect();
                    trace.append_computed(alias_name, values);
                }
            }
        }
    }
    Ok(trace)
}

/// A one-gate netlist using the conventional species names (`S1`/`S1p`/`E1`/
/// `P1` for NOT, `S2`/`S2p`/`E2`/`E3`/`P2` for the two-input gates); primary
/// inputs are the input-enzyme names.
pub fn single_gate(params: GateParams) -> Netlist {
    let mut gate = GateInstance::new("g0", params);
    let (inputs, labels) = match params {
        GateParams::Not(_) => (
            vec!["E1".to_string()],
            GateLabels {
                substrate: Some("S1".into()),
                product: Some("S1p".into()),
                enzyme_a: Some("E1".into()),
                enzyme_b: None,
                bias: Some("P1".into()),
            },
        ),
        GateParams::TwoInput(_) => (
            vec!["E2".to_string(), "E3".to_string()],
            GateLabels {
                substrate: Some("S2".into()),
                product: Some("S2p".into()),
                enzyme_a: Some("E2".into()),
                enzyme_b: Some("E3".into()),
                bias: Some("P2".into()),
            },
        ),
    };
    gate.labels = labels;
    let mut wires = vec![Wire {
        source: SignalSource::Input(inputs[0].clone()),
        dest_gate: 0,
        dest_slot: InputSlot::A,
    }];
    if inputs.len() > 1 {
        wires.push(Wire {
            source: SignalSource::Input(inputs[1].clone()),
            dest_gate: 0,
            dest_slot: InputSlot::B,
        });
    }
    let output = gate.output_species();
    Netlist {
        gates: vec![gate],
        wires,
        primary_inputs: inputs,
        primary_outputs: vec![(output, SignalSource::Gate(0))],
        sequential: false,
    }
}

/// Cross-coupled RS latch from two NAND pairs (AND followed by NOT), four
/// biochemical gates in total. Inputs X1, X2; output Q. Each NAND's output
/// drives the other NAND's second input, so the netlist is cyclic and
/// flagged sequential.
pub fn build_rs_latch(and_params: TwoInputGateParams, not_params: NotGateParams) -> Netlist {
    let gates = vec![
        GateInstance::new("and_a", GateParams::TwoInput(and_params)),
        GateInstance::new("not_a", GateParams::Not(not_params)),
        GateInstance::new("and_b", GateParams::TwoInput(and_params)),
        GateInstance::new("not_b", GateParams::Not(not_params)),
    ];
    let wires = vec![
        Wire {
            source: SignalSource::Input("X1".into()),
            dest_gate: 0,
            dest_slot: InputSlot::A,
        },
        // Cross coupling: NAND B's output feeds NAND A's second input.
        Wire {
            source: SignalSource::Gate(3),
            dest_gate: 0,
            dest_slot: InputSlot::B,
        },
        Wire {
            source: SignalSource::Gate(0),
            dest_gate: 1,
            dest_slot: InputSlot::A,
        },
        Wire {
            source: SignalSource::Input("X2".into()),
            dest_gate: 2,
            dest_slot: InputSlot::A,
        },
        // Cross coupling: NAND A's output feeds NAND B's second input.
        Wire {
            source: SignalSource::Gate(1),
            dest_gate: 2,
            dest_slot: InputSlot::B,
        },
        Wire {
            source: SignalSource::Gate(2),
            dest_gate: 3,
            dest_slot: InputSlot::A,
        },
    ];
    Netlist {
        gates,
        wires,
        primary_inputs: vec!["X1".into(), "X2".into()],
        primary_outputs: vec![("Q".into(), SignalSource::Gate(3))],
        sequential: true,
    }
}

pub fn build_rs_latch_default() -> Netlist {
    build_rs_latch(
        TwoInputGateParams::default_params(TwoInputMode::And),
        NotGateParams::default_params(),
    )
}

/// Line-based netlist dump: INPUT/GATE/WIRE/OUTPUT lines plus a SEQUENTIAL
/// marker for latches. Parse it back with [`parse_netlist`].
pub fn dump_netlist(netlist: &Netlist) -> String {
    let mut out = String::new();
    for n in &netlist.primary_inputs {
        out.push_str(&format!("INPUT {n}\n"));
    }
    for g in &netlist.gates {
        let params = match &g.params {
            GateParams::Not(p) => format!(
                "kcat_e={:?} km_e={:?} kcat_p={:?} km_p={:?} p_conc={:?}",
                p.input.k_cat,
                p.input.k_m,
                p.bias.kinetics.k_cat,
                p.bias.kinetics.k_m,
                p.bias.concentration
            ),
            GateParams::TwoInput(p) => format!(
                "kcat_e2={:?} km_e2={:?} kcat_e3={:?} km_e3={:?} kcat_p={:?} km_p={:?} p_conc={:?}",
                p.input_a.k_cat,
                p.input_a.k_m,
                p.input_b.k_cat,
                p.input_b.k_m,
                p.bias.kinetics.k_cat,
                p.bias.kinetics.k_m,
                p.bias.concentration
            ),
        };
        out.push_str(&format!(
            "GATE {} {} {params}\n",
            g.id,
            g.params.kind_name()
        ));
    }
    for w in &netlist.wires {
        let src = match &w.source {
            SignalSource::Input(n) => n.clone(),
            SignalSource::Gate(j) => netlist.gates[*j].id.clone(),
        };
        out.push_str(&format!(
            "WIRE {src} -> {}.{}\n",
            netlist.gates[w.dest_gate].id, w.dest_slot
        ));
    }
    for (name, src) in &netlist.primary_outputs {
        let s = match src {
            SignalSource::Input(n) => n.clone(),
            SignalSource::Gate(j) => netlist.gates[*j].id.clone(),
        };
        out.push_str(&format!("OUTPUT {name} = {s}\n"));
    }
    if netlist.sequential {
        out.push_str("SEQUENTIAL\n");
    }
    out
}

/// Parse the [`dump_netlist`] format. Synthesized-style default labels are
/// used for species names, so dump/parse round-trips to a structurally equal
/// netlist.
pub fn parse_netlist(text: &str) -> Result<Netlist, CircuitError> {
    let mut inputs = Vec::new();
    let mut gates: Vec<GateInstance> = Vec::new();
    let mut gate_index: HashMap<String, usize> = HashMap::new();
    let mut wires = Vec::new();
    let mut outputs = Vec::new();
    let mut sequential = false;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CircuitError::Parse(format!("line {}: {msg}", lineno + 1));
        let mut tokens = line.split_whitespace();
        match tokens.next().unwrap() {
            "INPUT" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| err("INPUT needs a name".into()))?;
                inputs.push(name.to_string());
            }
            "GATE" => {
                let id = tokens
                    .next()
                    .ok_or_else(|| err("GATE needs an id".into()))?;
                let kind = tokens
                    .next()
                    .ok_or_else(|| err("GATE needs a kind".into()))?;
                let mut kv: HashMap<&str, f64> = HashMap::new();
                for tok in tokens {
                    let (k, v) = tok
                        .split_once('=')
                        .ok_or_else(|| err(format!("bad parameter token `{tok}`")))?;
                    let v: f64 = v
                        .parse()
                        .map_err(|_| err(format!("bad number in `{tok}`")))?;
                    kv.insert(k, v);
                }
                let get = |k: &str, default: f64| kv.get(k).copied().unwrap_or(default);
                let params = match kind {
                    "not" => {
                        let d = NotGateParams::default_params();
                        GateParams::Not(NotGateParams {
                            input: gates::EnzymeKinetics::new(
                                get("kcat_e", d.input.k_cat),
                                get("km_e", d.input.k_m),
                            ),
                            bias: gates::BiasEnzyme::new(
                                get("kcat_p", d.bias.kinetics.k_cat),
                                get("km_p", d.bias.kinetics.k_m),
                                get("p_conc", d.bias.concentration),
                            ),
                        })
                    }
                    "or" | "and" => {
                        let mode = if kind == "or" {
                            TwoInputMode::Or
                        } else {
                            TwoInputMode::And
                        };
                        let d = TwoInputGateParams::default_params(mode);
                        GateParams::TwoInput(TwoInputGateParams {
                            input_a: gates::EnzymeKinetics::new(
                                get("kcat_e2", d.input_a.k_cat),
                                get("km_e2", d.input_a.k_m),
                            ),
                            input_b: gates::EnzymeKinetics::new(
                                get("kcat_e3", d.input_b.k_cat),
                                get("km_e3", d.input_b.k_m),
                            ),
                            bias: gates::BiasEnzyme::new(
                                get("kcat_p", d.bias.kinetics.k_cat),
                                get("km_p", d.bias.kinetics.k_m),
                                get("p_conc", d.bias.concentration),
                            ),
                            mode,
                        })
                    }
                    other => return Err(err(format!("unknown gate kind `{other}`"))),
                };
                if gate_index.contains_key(id) {
                    return Err(err(format!("duplicate gate id {id}")));
                }
                gate_index.insert(id.to_string(), gates.len());
                gates.push(GateInstance::new(id, params));
            }
            "WIRE" => {
                let src = tokens
                    .next()
                    .ok_or_else(|| err("WIRE needs a source".into()))?;
                let arrow = tokens.next();
                if arrow != Some("->") {
                    return Err(err("WIRE syntax is `WIRE <src> -> <gate>.<slot>`".into()));
                }
                let dst = tokens
                    .next()
                    .ok_or_else(|| err("WIRE needs a destination".into()))?;
                let (gate_id, slot) = dst
                    .rsplit_once('.')
                    .ok_or_else(|| err(format!("bad wire destination `{dst}`")))?;
                let dest_slot = match slot {
                    "a" => InputSlot::A,
                    "b" => InputSlot::B,
                    other => return Err(err(format!("bad slot `{other}` (use a or b)"))),
                };
                let dest_gate = *gate_index
                    .get(gate_id)
                    .ok_or_else(|| err(format!("wire drives unknown gate `{gate_id}`")))?;
                let source = if let Some(&j) = gate_index.get(src) {
                    SignalSource::Gate(j)
                } else {
                    SignalSource::Input(src.to_string())
                };
                wires.push(Wire {
                    source,
                    dest_gate,
                    dest_slot,
                });
            }
            "OUTPUT" => {
                let name = tokens
                    .next()
                    .ok_or_else(|| err("OUTPUT needs a name".into()))?;
                let eq = tokens.next();
                if eq != Some("=") {
                    return Err(err("OUTPUT syntax is `OUTPUT <name> = <src>`".into()));
                }
                let src = tokens
                    .next()
                    .ok_or_else(|| err("OUTPUT needs a source".into()))?;
                let source = if let Some(&j) = gate_index.get(src) {
                    SignalSource::Gate(j)
                } else {
                    SignalSource::Input(src.to_string())
                };
                outputs.push((name.to_string(), source));
            }
            "SEQUENTIAL" => sequential = true,
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    let netlist = Netlist {
        gates,
        wires,
        primary_inputs: inputs,
        primary_outputs: outputs,
        sequential,
    };
    netlist.validate()?;
    Ok(netlist)
}
