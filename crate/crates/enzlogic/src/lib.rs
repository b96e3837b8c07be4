//! Enzyme-driven logic gates, simulated and verified.
//!
//! This crate models logic gates built from enzyme-catalyzed conversions of
//! conserved substrate/product pairs (Michaelis-Menten kinetics), composes
//! them into netlists (combinational circuits and a cross-coupled RS latch),
//! and machine-checks that the simulated dynamics track an ideal Boolean
//! reference: whenever the output deviates from the reference by more than a
//! bound `kappa`, it must return within `kappa` after a delay `tau`.
//!
//! Module map:
//! - [`kinetics`]: reaction networks, schedules, the adaptive integrator,
//!   trace sampling and CSV export.
//! - [`gates`]: NOT / OR / AND gate parameterization, rate-constraint
//!   validation, equilibrium solving, and the logic threshold function.
//! - [`oracle`]: brute-force Boolean references (expression evaluation, the
//!   ideal NAND map, the latch recurrence).
//! - [`circuit`]: Boolean expressions, netlist synthesis (direct and
//!   NAND-only), elaboration into one joint reaction network, simulation.
//! - [`seqmap`]: the trace-level delayed-recovery check, closed-form NOT-gate
//!   settle bounds, and empirical settle-time measurement.
//! - [`config`] / [`cli`]: scenario files and the command-line surface.

// Validation guards use `!(a < b)` rather than `a >= b`: the negated form
// also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circuit;
pub mod cli;
pub mod config;
pub mod gates;
pub mod kinetics;
pub mod oracle;
pub mod rng;
pub mod seqmap;
