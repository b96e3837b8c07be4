//! Enzymatic reaction networks and their concentration dynamics.
//!
//! The model is deliberately minimal: every species lives in a conserved
//! substrate/product pair whose relative concentrations sum to 1, and every
//! reaction is a single enzyme-catalyzed conversion between the two slots of
//! one pair, with Michaelis-Menten kinetics. Enzyme concentrations are either
//! scheduled (piecewise-constant insert/extract signals) or coupled to the
//! live concentration of another species, which is how gate cascades close
//! into one joint ODE system.

mod integrate;
mod schedule;
mod trace;

pub use integrate::{integrate, IntegratorOptions};
pub use schedule::{Schedule, ScheduleError};
pub use trace::Trace;

use std::collections::HashSet;
use std::fmt;

/// Errors from network construction, rate evaluation, and integration.
#[derive(Debug, Clone, PartialEq)]
pub enum KineticsError {
    /// An argument fell outside its documented domain.
    Domain(String),
    /// The network references unknown species/enzymes or repeats names.
    Network(String),
    /// The error-controlled stepper could not meet tolerance, or the state
    /// left [0, 1] by more than roundoff.
    Integration(String),
}

impl fmt::Display for KineticsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KineticsError::Domain(m) => write!(f, "domain error: {m}"),
            KineticsError::Network(m) => write!(f, "invalid network: {m}"),
            KineticsError::Integration(m) => write!(f, "integration failure: {m}"),
        }
    }
}

impl std::error::Error for KineticsError {}

/// Michaelis-Menten rate `k_cat * [E] * [S] / (K_m + [S])`.
///
/// All concentrations are relative (dimensionless, in [0, 1]); `k_cat` is per
/// unit reaction time, so the result is a rate of relative concentration per
/// unit time.
pub fn michaelis_rate(
    k_cat: f64,
    e_conc: f64,
    k_m: f64,
    s_conc: f64,
) -> Result<f64, KineticsError> {
    for (name, v) in [
        ("k_cat", k_cat),
        ("e_conc", e_conc),
        ("K_m", k_m),
        ("s_conc", s_conc),
    ] {
        if !v.is_finite() {
            return Err(KineticsError::Domain(format!("{name} = {v} is not finite")));
        }
    }
    if k_m <= 0.0 {
        return Err(KineticsError::Domain(format!("K_m = {k_m} must be > 0")));
    }
    if !(0.0..=1.0).contains(&e_conc) {
        return Err(KineticsError::Domain(format!(
            "enzyme concentration {e_conc} outside [0, 1]"
        )));
    }
    if !(0.0..=1.0).contains(&s_conc) {
        return Err(KineticsError::Domain(format!(
            "substrate concentration {s_conc} outside [0, 1]"
        )));
    }
    Ok(raw_rate(k_cat, e_conc, k_m, s_conc))
}

/// Unchecked rate kernel. The rational form extends smoothly to substrate
/// values slightly outside [0, 1] and changes sign there, so intermediate
/// Runge-Kutta stages that overshoot a rail are pulled straight back; the
/// pole at `-K_m` is far outside any roundoff-sized excursion.
#[inline]
pub(crate) fn raw_rate(k_cat: f64, e_conc: f64, k_m: f64, s_conc: f64) -> f64 {
    k_cat * e_conc * s_conc / (k_m + s_conc)
}

/// An enzyme with kinetic constants and its insertion schedule.
#[derive(Debug, Clone)]
pub struct EnzymeSignal {
    pub name: String,
    pub k_cat: f64,
    pub k_m: f64,
    pub schedule: Schedule,
}

impl EnzymeSignal {
    pub fn new(
        name: &str,
        k_cat: f64,
        k_m: f64,
        schedule: Schedule,
    ) -> Result<Self, KineticsError> {
        if !(k_cat.is_finite() && k_cat > 0.0) {
            return Err(KineticsError::Domain(format!(
                "enzyme {name}: k_cat = {k_cat} must be > 0"
            )));
        }
        if !(k_m.is_finite() && k_m > 0.0) {
            return Err(KineticsError::Domain(format!(
                "enzyme {name}: K_m = {k_m} must be > 0"
            )));
        }
        Ok(Self {
            name: name.to_string(),
            k_cat,
            k_m,
            schedule,
        })
    }

    /// Effective maximum rate `V_E(t) = k_cat * [E](t)`, always derived.
    pub fn effective_rate(&self, t: f64) -> f64 {
        self.k_cat * self.schedule.value_at(t)
    }
}

/// A substrate/product pair with fixed total concentration 1.
///
/// Only the substrate concentration `s` is stored; the product is `1 - s` by
/// construction, so conservation holds exactly.
#[derive(Debug, Clone)]
pub struct ConservedPair {
    pub substrate_name: String,
    pub product_name: String,
    /// Initial substrate concentration.
    pub s0: f64,
}

impl ConservedPair {
    pub fn new(substrate: &str, product: &str, s0: f64) -> Result<Self, KineticsError> {
        if !(s0.is_finite() && (0.0..=1.0).contains(&s0)) {
            return Err(KineticsError::Domain(format!(
                "initial concentration {s0} outside [0, 1] for pair {substrate}/{product}"
            )));
        }
        if substrate == product {
            return Err(KineticsError::Network(format!(
                "pair slots must be distinct (both named {substrate})"
            )));
        }
        Ok(Self {
            substrate_name: substrate.to_string(),
            product_name: product.to_string(),
            s0,
        })
    }
}

/// Which slot of a conserved pair a conversion consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Substrate,
    Product,
}

/// One enzyme-catalyzed conversion between the two slots of a pair.
///
/// `consumes` names the slot being eaten; the opposite slot of the same pair
/// receives the mass.
#[derive(Debug, Clone)]
pub struct CatalyzedConversion {
    pub pair: usize,
    pub consumes: Slot,
    pub enzyme: usize,
}

/// Makes a downstream enzyme's concentration track a live species
/// concentration (identity gain).
#[derive(Debug, Clone)]
pub struct CouplingBinding {
    pub enzyme: usize,
    pub source_pair: usize,
    pub source_slot: Slot,
}

/// A validated reaction network: pairs, enzymes, conversions, couplings.
#[derive(Debug, Clone)]
pub struct ReactionNetwork {
    pairs: Vec<ConservedPair>,
    enzymes: Vec<EnzymeSignal>,
    conversions: Vec<CatalyzedConversion>,
    couplings: Vec<CouplingBinding>,
    /// coupled_source[enzyme index] = Some((pair, slot)) for coupled enzymes.
    coupled_source: Vec<Option<(usize, Slot)>>,
}

impl ReactionNetwork {
    pub fn new(
        pairs: Vec<ConservedPair>,
        enzymes: Vec<EnzymeSignal>,
        conversions: Vec<CatalyzedConversion>,
        couplings: Vec<CouplingBinding>,
    ) -> Result<Self, KineticsError> {
        let mut names = HashSet::new();
        for p in &pairs {
            for n in [&p.substrate_name, &p.product_name] {
                if !names.insert(n.clone()) {
                    return Err(KineticsError::Network(format!(
                        "duplicate species name {n}"
                    )));
                }
            }
        }
        for e in &enzymes {
            if !names.insert(e.name.clone()) {
                return Err(KineticsError::Network(format!(
                    "duplicate name {} (enzymes and species share a namespace)",
                    e.name
                )));
            }
        }
        for c in &conversions {
            if c.pair >= pairs.len() {
                return Err(KineticsError::Network(format!(
                    "conversion references missing pair #{}",
                    c.pair
                )));
            }
            if c.enzyme >= enzymes.len() {
                return Err(KineticsError::Network(format!(
                    "conversion references missing enzyme #{}",
                    c.enzyme
                )));
            }
        }
        let mut coupled_source = vec![None; enzymes.len()];
        for b in &couplings {
            if b.enzyme >= enzymes.len() {
                return Err(KineticsError::Network(format!(
                    "coupling references missing enzyme #{}",
                    b.enzyme
                )));
            }
            if b.source_pair >= pairs.len() {
                return Err(KineticsError::Network(format!(
                    "coupling references missing pair #{}",
                    b.source_pair
                )));
            }
            if coupled_source[b.enzyme].is_some() {
                return Err(KineticsError::Network(format!(
                    "enzyme {} driven by more than one coupling",
                    enzymes[b.enzyme].name
                )));
            }
            coupled_source[b.enzyme] = Some((b.source_pair, b.source_slot));
        }
        Ok(Self {
            pairs,
            enzymes,
            conversions,
            couplings,
            coupled_source,
        })
    }

    pub fn pairs(&self) -> &[ConservedPair] {
        &self.pairs
    }

    pub fn enzymes(&self) -> &[EnzymeSignal] {
        &self.enzymes
    }

    pub fn conversions(&self) -> &[CatalyzedConversion] {
        &self.conversions
    }

    pub fn couplings(&self) -> &[CouplingBinding] {
        &self.couplings
    }

    pub fn initial_state(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.s0).collect()
    }

    pub fn pair_index(&self, substrate_name: &str) -> Option<usize> {
        self.pairs
            .iter()
            .position(|p| p.substrate_name == substrate_name)
    }

    /// Effective concentration of enzyme `i` at time `t` given pair state.
    pub fn enzyme_concentration(&self, i: usize, state: &[f64], t: f64) -> f64 {
        match self.coupled_source[i] {
            Some((pair, slot)) => slot_concentration(state[pair], slot),
            None => self.enzymes[i].schedule.value_at(t),
        }
    }

    /// Net substrate rate ds/dt for one pair: production minus consumption
    /// over all conversions touching it, with schedules evaluated at `t`.
    pub fn net_rate(&self, pair: usize, state: &[f64], t: f64) -> Result<f64, KineticsError> {
        if pair >= self.pairs.len() {
            return Err(KineticsError::Network(format!("no pair #{pair}")));
        }
        if state.len() != self.pairs.len() {
            return Err(KineticsError::Domain(format!(
                "state length {} does not match pair count {}",
                state.len(),
                self.pairs.len()
            )));
        }
        let mut rate = 0.0;
        for c in &self.conversions {
            if c.pair != pair {
                continue;
            }
            let enzyme = &self.enzymes[c.enzyme];
            let e = self.enzyme_concentration(c.enzyme, state, t);
            let s_conc = slot_concentration(state[pair], c.consumes);
            let v = michaelis_rate(enzyme.k_cat, e, enzyme.k_m, s_conc)?;
            match c.consumes {
                Slot::Substrate => rate -= v,
                Slot::Product => rate += v,
            }
        }
        Ok(rate)
    }

    /// Vector field with scheduled enzyme levels frozen to `levels`
    /// (one entry per enzyme; coupled enzymes ignore theirs and read the
    /// live state). Used by the integrator, which never lets a step cross a
    /// schedule switch.
    pub(crate) fn rhs_frozen(&self, state: &[f64], levels: &[f64], ds: &mut [f64]) {
        ds.fill(0.0);
        for c in &self.conversions {
            let enzyme = &self.enzymes[c.enzyme];
            let e = match self.coupled_source[c.enzyme] {
                Some((pair, slot)) => slot_concentration(state[pair], slot).clamp(0.0, 1.0),
                None => levels[c.enzyme],
            };
            let s_conc = slot_concentration(state[c.pair], c.consumes);
            let v = raw_rate(enzyme.k_cat, e, enzyme.k_m, s_conc);
            match c.consumes {
                Slot::Substrate => ds[c.pair] -= v,
                Slot::Product => ds[c.pair] += v,
            }
        }
    }

    /// All schedule switch times strictly inside (t0, t1), sorted, deduped.
    pub(crate) fn switch_times_within(&self, t0: f64, t1: f64) -> Vec<f64> {
        let mut times: Vec<f64> = self
            .enzymes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.coupled_source[*i].is_none())
            .flat_map(|(_, e)| e.schedule.switch_times_within(t0, t1).collect::<Vec<_>>())
            .collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        times
    }

    pub(crate) fn scheduled_levels_at(&self, t: f64) -> Vec<f64> {
        self.enzymes
            .iter()
            .map(|e| e.schedule.value_at(t))
            .collect()
    }
}

#[inline]
fn slot_concentration(s: f64, slot: Slot) -> f64 {
    match slot {
        Slot::Substrate => s,
        Slot::Product => 1.0 - s,
    }
}

/// The standard NOT-gate network: E1 drives S1 -> S1', P1 drives S1' -> S1.
///
/// Mostly a test and documentation helper; circuits build their networks via
/// elaboration.
pub fn not_gate_network(
    e1_kcat: f64,
    e1_km: f64,
    e1_schedule: Schedule,
    p1_kcat: f64,
    p1_km: f64,
    p1_conc: f64,
    s0: f64,
) -> Result<ReactionNetwork, KineticsError> {
    let pair = ConservedPair::new("S1", "S1p", s0)?;
    let e1 = EnzymeSignal::new("E1", e1_kcat, e1_km, e1_schedule)?;
    let p1 = EnzymeSignal::new(
        "P1",
        p1_kcat,
        p1_km,
        Schedule::constant(p1_conc).map_err(|e| KineticsError::Domain(e.to_string()))?,
    )?;
    ReactionNetwork::new(
        vec![pair],
        vec![e1, p1],
        vec![
            CatalyzedConversion {
                pair: 0,
                consumes: Slot::Substrate,
                enzyme: 0,
            },
            CatalyzedConversion {
                pair: 0,
                consumes: Slot::Product,
                enzyme: 1,
            },
        ],
        Vec::new(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn michaelis_half_velocity_at_km() {
        // [S] = K_m gives half of V_max.
        let v = michaelis_rate(1.0, 1.0, 0.1, 0.1).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn michaelis_zero_substrate() {
        for k_cat in [0.3, 1.0, 5.0] {
            let v = michaelis_rate(k_cat, 0.7, 0.2, 0.0).unwrap();
            assert_eq!(v, 0.0);
        }
    }

    #[test]
    fn michaelis_near_saturation() {
        let v = michaelis_rate(1.0, 1.0, 0.1, 0.9).unwrap();
        assert!((v - 0.9).abs() < 1e-15);
    }

    #[test]
    fn michaelis_domain_errors() {
        assert!(michaelis_rate(1.0, 1.0, 0.0, 0.5).is_err());
        assert!(michaelis_rate(1.0, 1.0, -0.1, 0.5).is_err());
        assert!(michaelis_rate(1.0, 1.5, 0.1, 0.5).is_err());
        assert!(michaelis_rate(1.0, 1.0, 0.1, 1.5).is_err());
        assert!(michaelis_rate(f64::NAN, 1.0, 0.1, 0.5).is_err());
    }

    #[test]
    fn net_rate_vanishes_with_no_drive() {
        // E1 absent and no product to convert back: both terms zero.
        let net = not_gate_network(
            1.0,
            0.1,
            Schedule::constant(0.0).unwrap(),
            1.0,
            0.1,
            0.2,
            1.0,
        )
        .unwrap();
        let r = net.net_rate(0, &[1.0], 0.0).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn net_rate_signs() {
        let net = not_gate_network(
            1.0,
            0.1,
            Schedule::constant(1.0).unwrap(),
            1.0,
            0.1,
            0.2,
            0.5,
        )
        .unwrap();
        // Forward reaction dominates at e1 = 1, V_P1 = 0.2: substrate falls.
        let r = net.net_rate(0, &[0.5], 0.0).unwrap();
        assert!(r < 0.0);
        // With E1 extracted only the back reaction runs: substrate rises.
        let net0 = not_gate_network(
            1.0,
            0.1,
            Schedule::constant(0.0).unwrap(),
            1.0,
            0.1,
            0.2,
            0.5,
        )
        .unwrap();
        let r0 = net0.net_rate(0, &[0.5], 0.0).unwrap();
        assert!(r0 > 0.0);
    }

    #[test]
    fn network_rejects_duplicate_names() {
        let pair = ConservedPair::new("S", "S'", 0.5).unwrap();
        let e = EnzymeSignal::new("S", 1.0, 0.1, Schedule::constant(0.0).unwrap()).unwrap();
        let err = ReactionNetwork::new(vec![pair], vec![e], vec![], vec![]).unwrap_err();
        assert!(matches!(err, KineticsError::Network(_)));
    }

    #[test]
    fn network_rejects_dangling_references() {
        let pair = ConservedPair::new("S", "Sp", 0.5).unwrap();
        let e = EnzymeSignal::new("E", 1.0, 0.1, Schedule::constant(0.0).unwrap()).unwrap();
        let err = ReactionNetwork::new(
            vec![pair],
            vec![e],
            vec![CatalyzedConversion {
                pair: 1,
                consumes: Slot::Substrate,
                enzyme: 0,
            }],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, KineticsError::Network(_)));
    }
}
