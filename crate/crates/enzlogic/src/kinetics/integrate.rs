//! Error-controlled explicit Runge-Kutta integration of a reaction network.
//!
//! Dormand-Prince 5(4) with an embedded 4th-order error estimate. The driver
//! integrates from output sample to output sample and additionally splits at
//! every enzyme schedule switch, so no step ever straddles a discontinuity of
//! the vector field; within a segment the scheduled enzyme levels are frozen
//! to their value at the segment start.

use super::trace::Trace;
use super::{KineticsError, ReactionNetwork};

/// Tolerances and guards for the adaptive stepper.
#[derive(Debug, Clone, Copy)]
pub struct IntegratorOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_steps_per_segment: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-7,
            max_steps_per_segment: 1_000_000,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Drift beyond [0, 1] up to this magnitude is clamped as roundoff; anything
/// larger is reported as solver breakdown.
const CLAMP_TOL: f64 = 1e-9;

/// Integrate `network` over [t0, t_end], sampling every `dt_out`.
pub fn integrate(
    network: &ReactionNetwork,
    t0: f64,
    t_end: f64,
    dt_out: f64,
    opts: &IntegratorOptions,
) -> Result<Trace, KineticsError> {
    if !(t_end > t0) {
        return Err(KineticsError::Domain(format!(
            "t_end = {t_end} must exceed t0 = {t0}"
        )));
    }
    if !(dt_out > 0.0) {
        return Err(KineticsError::Domain(format!(
            "dt_out = {dt_out} must be > 0"
        )));
    }

    let n_pairs = network.pairs().len();
    let n_samples = ((t_end - t0) / dt_out + 1e-9).floor() as usize;
    let sample_time = |i: usize| t0 + i as f64 * dt_out;

    let mut state = network.initial_state();
    let mut trace = Trace::for_network(network, n_samples + 1);
    trace.record(network, 0, t0, &state);

    let mut stepper = Stepper::new(n_pairs, *opts);
    for i in 1..=n_samples {
        let (a, b) = (sample_time(i - 1), sample_time(i));
        // Split the output interval at any schedule switches inside it.
        let mut cursor = a;
        let mut switches = network.switch_times_within(a, b);
        switches.push(b);
        for stop in switches {
            let levels = network.scheduled_levels_at(cursor);
            stepper.advance(network, &mut state, cursor, stop, &levels)?;
            cursor = stop;
        }
        trace.record(network, i, b, &state);
    }
    Ok(trace)
}

struct Stepper {
    opts: IntegratorOptions,
    k: Vec<Vec<f64>>,
    y_stage: Vec<f64>,
    y_new: Vec<f64>,
    h: f64,
}

impl Stepper {
    fn new(dim: usize, opts: IntegratorOptions) -> Self {
        Self {
            opts,
            k: vec![vec![0.0; dim]; 7],
            y_stage: vec![0.0; dim],
            y_new: vec![0.0; dim],
            h: 0.0,
        }
    }

    /// Advance `state` from `a` to `b` with scheduled levels frozen.
    fn advance(
        &mut self,
        network: &ReactionNetwork,
        state: &mut [f64],
        a: f64,
        b: f64,
        levels: &[f64],
    ) -> Result<(), KineticsError> {
        let span = b - a;
        if span <= 0.0 {
            return Ok(());
        }
        let mut t = a;
        if self.h <= 0.0 {
            self.h = span;
        }
        let mut steps = 0usize;
        while t < b {
            steps += 1;
            if steps > self.opts.max_steps_per_segment {
                return Err(KineticsError::Integration(format!(
                    "step limit exceeded between t = {a} and t = {b}"
                )));
            }
            let h = self.h.min(b - t);
            let err = self.try_step(network, state, h, levels);
            for y in &self.y_new {
                if !y.is_finite() {
                    return Err(KineticsError::Integration(format!(
                        "state became non-finite near t = {t}"
                    )));
                }
            }
            // Distance the proposed state pokes out of [0, 1]. The exact
            // solution never leaves the unit box (the vector field points
            // inward at the rails), so anything beyond roundoff dust means
            // the step was too long for the rail approach: retry shorter.
            let excess = self
                .y_new
                .iter()
                .fold(0.0f64, |m, &y| m.max(y - 1.0).max(-y));
            if err <= 1.0 && excess <= CLAMP_TOL {
                t += h;
                for (s, y) in state.iter_mut().zip(&self.y_new) {
                    *s = y.clamp(0.0, 1.0);
                }
                let scale = if err > 0.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    5.0
                };
                self.h = h * scale;
            } else {
                let scale = if err > 1.0 {
                    (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                } else {
                    0.5 // rail overshoot with acceptable error estimate
                };
                self.h = h * scale;
                if self.h < 1e-14 * span.max(1.0) {
                    return Err(KineticsError::Integration(format!(
                        "tolerance not met near t = {t} (step collapsed to {})",
                        self.h
                    )));
                }
            }
        }
        Ok(())
    }

    /// One trial step of size `h`; returns the scaled error norm.
    fn try_step(&mut self, network: &ReactionNetwork, y: &[f64], h: f64, levels: &[f64]) -> f64 {
        let dim = y.len();
        let (k, y_stage) = (&mut self.k, &mut self.y_stage);
        network.rhs_frozen(y, levels, &mut k[0]);
        for stage in 1..7 {
            for d in 0..dim {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(stage) {
                    acc += A[stage - 1][j] * kj[d];
                }
                y_stage[d] = y[d] + h * acc;
            }
            let (_, rest) = k.split_at_mut(stage);
            network.rhs_frozen(y_stage, levels, &mut rest[0]);
        }
        let mut err: f64 = 0.0;
        for d in 0..dim {
            let mut y5 = 0.0;
            let mut y4 = 0.0;
            for (j, kj) in k.iter().enumerate() {
                y5 += B5[j] * kj[d];
                y4 += B4[j] * kj[d];
            }
            let y5 = y[d] + h * y5;
            let y4 = y[d] + h * y4;
            self.y_new[d] = y5;
            let tol = self.opts.abs_tol + self.opts.rel_tol * y[d].abs().max(y5.abs());
            err = err.max(((y5 - y4) / tol).abs());
        }
        err
    }
}
