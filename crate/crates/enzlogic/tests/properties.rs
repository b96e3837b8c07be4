//! Property tests for the kinetics, gates, and checker invariants.

use std::collections::BTreeMap;

use proptest::prelude::*;

use enzlogic::circuit::{
    expression_corpus, simulate_circuit, single_gate, synthesize, GateDefaults, InitialState,
    SynthesisStyle,
};
use enzlogic::gates::{
    equilibrium_not, equilibrium_two_input, equilibrium_two_input_unchecked, threshold, GateParams,
    NotGateParams, ThresholdConfig, TwoInputGateParams, TwoInputMode,
};
use enzlogic::kinetics::{integrate, michaelis_rate, IntegratorOptions, Schedule};
use enzlogic::oracle;
use enzlogic::rng::SplitMix64;
use enzlogic::seqmap::{check, SeqMapSpec};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn michaelis_rate_nonnegative_and_monotone(
        k_cat in 0.01f64..10.0,
        k_m in 0.001f64..2.0,
        e1 in 0.0f64..1.0,
        e2 in 0.0f64..1.0,
        s1 in 0.0f64..1.0,
        s2 in 0.0f64..1.0,
    ) {
        let (e_lo, e_hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (s_lo, s_hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let base = michaelis_rate(k_cat, e_lo, k_m, s_lo).unwrap();
        prop_assert!(base >= 0.0);
        prop_assert!(michaelis_rate(k_cat, e_hi, k_m, s_lo).unwrap() >= base);
        prop_assert!(michaelis_rate(k_cat, e_lo, k_m, s_hi).unwrap() >= base);
    }

    #[test]
    fn schedule_lookup_is_right_continuous_and_bounded(
        initial in 0.0f64..=1.0,
        switches in proptest::collection::vec((0.1f64..100.0, 0.0f64..=1.0), 0..6),
    ) {
        let mut times: Vec<f64> = switches.iter().map(|(t, _)| *t).collect();
        times.sort_by(|a, b| a.partial_cmp(b).unwrap());
        times.dedup();
        let entries: Vec<(f64, f64)> = times
            .iter()
            .zip(switches.iter().map(|(_, l)| *l))
            .map(|(&t, l)| (t, l))
            .collect();
        let sched = Schedule::new(initial, entries.clone()).unwrap();
        for (t, level) in &entries {
            prop_assert_eq!(sched.value_at(*t), *level);
        }
        for probe in [-1.0, 0.0, 0.05, 17.3, 1e6] {
            let v = sched.value_at(probe);
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn not_relaxation_is_monotone_and_conserved(
        e1 in 0.0f64..=1.0,
        s0 in 0.0f64..=1.0,
    ) {
        let netlist = single_gate(GateParams::Not(NotGateParams::default_params()));
        let wf: BTreeMap<String, Schedule> =
            [("E1".to_string(), Schedule::constant(e1).unwrap())].into();
        let trace = simulate_circuit(
            &netlist,
            &wf,
            40.0,
            0.25,
            &InitialState::Uniform(s0),
            &IntegratorOptions::default(),
        )
        .unwrap();
        let s = trace.series("S1").unwrap();
        let sp = trace.series("S1p").unwrap();
        let increasing = s[1] >= s[0];
        for w in s.windows(2) {
            // Scalar autonomous dynamics cannot change direction.
            if increasing {
                prop_assert!(w[1] >= w[0] - 1e-12);
            } else {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }
        for (a, b) in s.iter().zip(sp) {
            prop_assert!((a + b - 1.0).abs() < 1e-9);
            prop_assert!((0.0..=1.0).contains(a));
        }
    }

    #[test]
    fn checker_reports_exactly_the_one_unrecovered_instant(
        pos in 5usize..40,
        lookahead in 2usize..8,
    ) {
        let n = 64;
        let times: Vec<f64> = (0..n).map(|i| i as f64).collect();
        let reference = vec![0.0; n];
        let mut output = vec![0.0; n];
        // Deviate at `pos` and at its lookahead target, so `pos` cannot
        // recover; the second deviation recovers on its own.
        output[pos] = 1.0;
        if pos + lookahead < n {
            output[pos + lookahead] = 1.0;
        }
        let spec = SeqMapSpec {
            kappa: 0.5,
            tau: lookahead as f64,
            reference,
        };
        let verdict = check(&times, &output, &spec).unwrap();
        if pos + lookahead < n - lookahead {
            prop_assert_eq!(verdict.violations.len(), 1);
            prop_assert_eq!(verdict.violations[0].t, pos as f64);
        }
    }

    #[test]
    fn threshold_partitions_unit_interval(x in 0.0f64..=1.0) {
        let cfg = ThresholdConfig::default();
        let level = threshold(x, &cfg).unwrap();
        let expected = if x < cfg.tau0 {
            enzlogic::gates::LogicLevel::Zero
        } else if x > cfg.tau1 {
            enzlogic::gates::LogicLevel::One
        } else {
            enzlogic::gates::LogicLevel::Invalid
        };
        prop_assert_eq!(level, expected);
    }
}

/// Spot check: every rate-rejected AND parameter set with V_P2 >= V_E2+V_E3
/// and a shared Michaelis constant really does fail the logic contract at
/// inputs (1,1) — the equilibrium stays below tau1.
#[test]
fn rejected_and_parameters_cannot_reach_high_rail() {
    let mut rng = SplitMix64::new(2024);
    let tau1 = ThresholdConfig::default().tau1;
    for _ in 0..50 {
        let v_e2 = rng.range(0.1, 1.0);
        let v_e3 = rng.range(0.1, 1.0);
        // At or above the sum: rejected by the AND rate constraints.
        let v_p = (v_e2 + v_e3) * rng.range(1.0, 1.6);
        let k_m = rng.range(0.01, 0.5);
        let params = TwoInputGateParams::with_rates(TwoInputMode::And, v_e2, v_e3, v_p, k_m);
        assert!(
            enzlogic::gates::validate_gate(&GateParams::TwoInput(params)).is_err(),
            "sampled set should be rejected"
        );
        let eq = equilibrium_two_input_unchecked(&params, 1.0, 1.0).unwrap();
        assert!(
            eq < tau1,
            "V=({v_e2},{v_e3},{v_p}), K_m={k_m}: equilibrium {eq} reached the high rail"
        );
    }
}

/// The recursive evaluator agrees with an independent bit-parallel
/// truth-table evaluator on the whole synthesis corpus.
#[test]
fn eval_expr_agrees_with_bitmask_evaluator() {
    use enzlogic::circuit::BooleanExpr;

    fn mask(expr: &BooleanExpr) -> u8 {
        match expr {
            BooleanExpr::Var(v) => match v.as_str() {
                "a" => 0b10101010,
                "b" => 0b11001100,
                "c" => 0b11110000,
                _ => panic!("corpus variable expected"),
            },
            BooleanExpr::Not(e) => !mask(e),
            BooleanExpr::And(x, y) => mask(x) & mask(y),
            BooleanExpr::Or(x, y) => mask(x) | mask(y),
        }
    }

    for expr in expression_corpus(3) {
        let m = mask(&expr);
        for bits in 0..8u8 {
            let a = oracle::assignment(&[
                ("a", bits & 1 == 1),
                ("b", bits >> 1 & 1 == 1),
                ("c", bits >> 2 & 1 == 1),
            ]);
            let recursive = oracle::eval_expr(&expr, &a).unwrap();
            let parallel = (m >> bits) & 1 == 1;
            assert_eq!(recursive, parallel, "{expr} at {bits:03b}");
        }
    }
}

/// Both synthesis styles produce netlists with identical ideal Boolean
/// behavior across the corpus.
#[test]
fn synthesis_styles_agree_on_corpus() {
    let defaults = GateDefaults::default();
    for expr in expression_corpus(3) {
        let vars = expr.variables();
        let direct = synthesize(&expr, &vars, SynthesisStyle::Direct, &defaults).unwrap();
        let nand = synthesize(&expr, &vars, SynthesisStyle::NandOnly, &defaults).unwrap();
        for bits in 0..(1u32 << vars.len()) {
            let assignment: BTreeMap<String, bool> = vars
                .iter()
                .enumerate()
                .map(|(i, v)| (v.clone(), (bits >> i) & 1 == 1))
                .collect();
            assert_eq!(
                direct.boolean_eval(&assignment).unwrap(),
                nand.boolean_eval(&assignment).unwrap(),
                "{expr} at {bits:b}"
            );
        }
    }
}

/// Integrated dynamics land on the bisection equilibria: every truth-table
/// corner of every gate type, integrated to 10x its settle bound, ends
/// within 1e-4 of the closed-form root.
#[test]
fn dynamics_agree_with_equilibrium_roots() {
    type Case = (GateParams, Vec<(&'static str, f64)>, f64);
    let cases: Vec<Case> = {
        let not = NotGateParams::default_params();
        let or = TwoInputGateParams::default_params(TwoInputMode::Or);
        let and = TwoInputGateParams::default_params(TwoInputMode::And);
        let mut v = Vec::new();
        for e1 in [0.0, 1.0] {
            v.push((
                GateParams::Not(not),
                vec![("E1", e1)],
                equilibrium_not(&not, e1).unwrap(),
            ));
        }
        for (e2, e3) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
            v.push((
                GateParams::TwoInput(or),
                vec![("E2", e2), ("E3", e3)],
                equilibrium_two_input(&or, e2, e3).unwrap(),
            ));
            v.push((
                GateParams::TwoInput(and),
                vec![("E2", e2), ("E3", e3)],
                equilibrium_two_input(&and, e2, e3).unwrap(),
            ));
        }
        v
    };
    for (params, inputs, root) in cases {
        let netlist = single_gate(params);
        let bound = enzlogic::seqmap::gate_settle_bound(&params, 0.05).unwrap();
        let wf: BTreeMap<String, Schedule> = inputs
            .iter()
            .map(|(n, v)| (n.to_string(), Schedule::constant(*v).unwrap()))
            .collect();
        let t_end = 10.0 * bound;
        let trace = simulate_circuit(
            &netlist,
            &wf,
            t_end,
            t_end / 200.0,
            &InitialState::Uniform(0.5),
            &IntegratorOptions::default(),
        )
        .unwrap();
        let out = trace.series(&netlist.gates[0].output_species()).unwrap();
        let end = *out.last().unwrap();
        assert!(
            (end - root).abs() < 1e-4,
            "{params:?} at {inputs:?}: dynamics {end} vs root {root}"
        );
    }
}

/// The equilibrium of a constant-input scenario is independent of the
/// integration tolerance at the 1e-6 level once tolerances are halved.
#[test]
fn integrator_tolerance_convergence() {
    let netlist = single_gate(GateParams::Not(NotGateParams::default_params()));
    let wf: BTreeMap<String, Schedule> =
        [("E1".to_string(), Schedule::constant(1.0).unwrap())].into();
    let base = IntegratorOptions::default();
    let halved = IntegratorOptions {
        abs_tol: base.abs_tol / 2.0,
        rel_tol: base.rel_tol / 2.0,
        ..base
    };
    let run = |opts: &IntegratorOptions| {
        let trace =
            simulate_circuit(&netlist, &wf, 30.0, 0.5, &InitialState::Uniform(1.0), opts).unwrap();
        *trace.series("S1").unwrap().last().unwrap()
    };
    assert!((run(&base) - run(&halved)).abs() < 1e-6);
}

/// Intermediate enzyme levels are accepted by the rate law and integrator.
#[test]
fn fractional_enzyme_levels_integrate() {
    assert!(michaelis_rate(1.0, 0.5, 0.1, 0.5).is_ok());
    assert!(michaelis_rate(1.0, 0.5, 0.0, 0.5).is_err());
    assert!(michaelis_rate(1.0, 1.5, 0.1, 0.5).is_err());
    assert!(integrate(
        &enzlogic::kinetics::not_gate_network(
            1.0,
            0.1,
            Schedule::constant(0.5).unwrap(),
            1.0,
            0.1,
            0.2,
            0.5
        )
        .unwrap(),
        0.0,
        1.0,
        0.5,
        &IntegratorOptions::default()
    )
    .is_ok());
}

/// The network-level net rate vanishes at the gate equilibrium roots: the
/// bisection oracle's root, substituted into the kinetics, balances the
/// conversions exactly.
#[test]
fn net_rate_vanishes_at_equilibrium_roots() {
    use enzlogic::circuit::elaborate;

    // NOT network at e1 = 1 with the default parameters.
    let not = NotGateParams::default_params();
    let root = equilibrium_not(&not, 1.0).unwrap();
    let netlist = single_gate(GateParams::Not(not));
    let wf: BTreeMap<String, Schedule> =
        [("E1".to_string(), Schedule::constant(1.0).unwrap())].into();
    let el = elaborate(&netlist, &wf, &InitialState::Uniform(0.5)).unwrap();
    let rate = el.network.net_rate(0, &[root], 0.0).unwrap();
    assert!(rate.abs() < 1e-8, "NOT net rate at root: {rate}");

    // OR network at (1, 0): the stored state is the substrate, the root is
    // the product concentration.
    let or = TwoInputGateParams::default_params(TwoInputMode::Or);
    let root = equilibrium_two_input(&or, 1.0, 0.0).unwrap();
    let netlist = single_gate(GateParams::TwoInput(or));
    let wf: BTreeMap<String, Schedule> = [
        ("E2".to_string(), Schedule::constant(1.0).unwrap()),
        ("E3".to_string(), Schedule::constant(0.0).unwrap()),
    ]
    .into();
    let el = elaborate(&netlist, &wf, &InitialState::Uniform(0.5)).unwrap();
    let rate = el.network.net_rate(0, &[1.0 - root], 0.0).unwrap();
    assert!(rate.abs() < 1e-8, "OR net rate at root: {rate}");
}

/// Topological settling: after an input step, a gate at depth d is within
/// kappa of its new equilibrium once d settle bounds have elapsed. Sampled
/// over a slice of the synthesis corpus.
#[test]
fn topological_settling_per_gate() {
    use enzlogic::seqmap::gate_settle_bound;

    let kappa = 0.05;
    let defaults = GateDefaults::default();
    let bound = [
        gate_settle_bound(&GateParams::Not(defaults.not), kappa).unwrap(),
        gate_settle_bound(&GateParams::TwoInput(defaults.or), kappa).unwrap(),
        gate_settle_bound(&GateParams::TwoInput(defaults.and), kappa).unwrap(),
    ]
    .into_iter()
    .fold(0.0f64, f64::max);

    let corpus = expression_corpus(3);
    let mut rng = SplitMix64::new(991);
    let mut checked_gates = 0;
    for expr in corpus.iter().step_by(7) {
        let vars = expr.variables();
        let netlist = synthesize(expr, &vars, SynthesisStyle::Direct, &defaults).unwrap();
        if netlist.gates.is_empty() {
            continue;
        }
        let depths = netlist.gate_depths().unwrap();
        let max_depth = *depths.iter().max().unwrap();

        // Step all inputs from one random corner to another at t_edge.
        let t_edge = 5.0;
        let t_end = t_edge + (max_depth as f64 + 1.0) * bound;
        let mut before = BTreeMap::new();
        let mut after = BTreeMap::new();
        let mut wf: BTreeMap<String, Schedule> = BTreeMap::new();
        for v in &vars {
            let a = if rng.next_bool() { 1.0 } else { 0.0 };
            let b = if rng.next_bool() { 1.0 } else { 0.0 };
            before.insert(v.clone(), a);
            after.insert(v.clone(), b);
            wf.insert(v.clone(), Schedule::new(a, vec![(t_edge, b)]).unwrap());
        }
        let (gate_eq, _) = netlist.equilibrium_outputs(&after).unwrap();
        let trace = simulate_circuit(
            &netlist,
            &wf,
            t_end,
            bound / 20.0,
            &InitialState::Equilibrium,
            &IntegratorOptions::default(),
        )
        .unwrap();
        for (i, gate) in netlist.gates.iter().enumerate() {
            let species = gate.output_species();
            let series = trace.series(&species).unwrap();
            let deadline = t_edge + depths[i] as f64 * bound;
            for (t, v) in trace.times().iter().zip(series) {
                if *t >= deadline {
                    assert!(
                        (v - gate_eq[i]).abs() < kappa,
                        "{expr}: gate {} (depth {}) at t = {t}: {v} vs eq {}",
                        gate.id,
                        depths[i],
                        gate_eq[i]
                    );
                }
            }
            checked_gates += 1;
        }
    }
    assert!(checked_gates > 20, "sampled too few gates: {checked_gates}");
}

/// The ideal reference of a synthesized NAND tracks `1 - x1*x2` on all four
/// constant-input corners.
#[test]
fn nand_reference_signal_matches_ideal_map() {
    use enzlogic::circuit::parse_expr;
    use enzlogic::seqmap::reference_signal;

    let nand = synthesize(
        &parse_expr("NOT(AND(x1,x2))").unwrap(),
        &["x1".to_string(), "x2".to_string()],
        SynthesisStyle::Direct,
        &GateDefaults::default(),
    )
    .unwrap();
    let times: Vec<f64> = (0..20).map(|i| i as f64).collect();
    for (x1, x2) in [(false, false), (false, true), (true, false), (true, true)] {
        let wf: BTreeMap<String, Schedule> = [
            (
                "x1".to_string(),
                Schedule::constant(if x1 { 1.0 } else { 0.0 }).unwrap(),
            ),
            (
                "x2".to_string(),
                Schedule::constant(if x2 { 1.0 } else { 0.0 }).unwrap(),
            ),
        ]
        .into();
        let f = reference_signal(&nand, &wf, 2.0, &times, false).unwrap();
        let ideal = if oracle::nand_reference(x1, x2) {
            1.0
        } else {
            0.0
        };
        assert!(
            f.iter().all(|&v| v == ideal),
            "NAND({x1},{x2}) reference {f:?} vs {ideal}"
        );
    }
}
