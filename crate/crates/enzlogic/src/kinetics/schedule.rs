//! Piecewise-constant enzyme insertion schedules.
//!
//! A schedule maps time to a relative concentration in [0, 1]. It is
//! right-continuous with finitely many switch points: the level set at a
//! switch time applies from that instant onward.

use std::fmt;

use crate::rng::SplitMix64;

/// Errors raised while constructing a schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleError(pub String);

impl fmt::Display for ScheduleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid schedule: {}", self.0)
    }
}

impl std::error::Error for ScheduleError {}

/// Right-continuous piecewise-constant function time -> [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    initial: f64,
    /// (switch time, new level), strictly increasing in time.
    switches: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn constant(level: f64) -> Result<Self, ScheduleError> {
        Self::new(level, Vec::new())
    }

    pub fn new(initial: f64, switches: Vec<(f64, f64)>) -> Result<Self, ScheduleError> {
        check_level(initial)?;
        let mut prev = f64::NEG_INFINITY;
        for &(t, level) in &switches {
            if !t.is_finite() {
                return Err(ScheduleError(format!("non-finite switch time {t}")));
            }
            if t <= prev {
                return Err(ScheduleError(format!(
                    "switch times must be strictly increasing (at t = {t})"
                )));
            }
            check_level(level)?;
            prev = t;
        }
        Ok(Self { initial, switches })
    }

    /// Random schedule with 0/1 levels and segment lengths drawn uniformly
    /// from [min_seg, max_seg), covering [0, t_end].
    pub fn random(
        rng: &mut SplitMix64,
        min_seg: f64,
        max_seg: f64,
        t_end: f64,
    ) -> Result<Self, ScheduleError> {
        if !(min_seg > 0.0 && max_seg >= min_seg) {
            return Err(ScheduleError(format!(
                "segment bounds must satisfy 0 < min <= max (got {min_seg}, {max_seg})"
            )));
        }
        let initial = if rng.next_bool() { 1.0 } else { 0.0 };
        let mut switches = Vec::new();
        let mut t = rng.range(min_seg, max_seg);
        while t < t_end {
            let level = if rng.next_bool() { 1.0 } else { 0.0 };
            switches.push((t, level));
            t += rng.range(min_seg, max_seg);
        }
        Self::new(initial, switches)
    }

    /// Level at time `t` (right-continuous lookup).
    pub fn value_at(&self, t: f64) -> f64 {
        match self
            .switches
            .partition_point(|&(st, _)| st <= t)
            .checked_sub(1)
        {
            Some(i) => self.switches[i].1,
            None => self.initial,
        }
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    /// Switch times falling strictly inside (t0, t1).
    pub fn switch_times_within(&self, t0: f64, t1: f64) -> impl Iterator<Item = f64> + '_ {
        self.switches
            .iter()
            .map(|&(t, _)| t)
            .filter(move |&t| t > t0 && t < t1)
    }

    pub fn switch_times(&self) -> impl Iterator<Item = f64> + '_ {
        self.switches.iter().map(|&(t, _)| t)
    }

    pub fn segments(&self) -> &[(f64, f64)] {
        &self.switches
    }
}

fn check_level(level: f64) -> Result<(), ScheduleError> {
    if !(level.is_finite() && (0.0..=1.0).contains(&level)) {
        return Err(ScheduleError(format!("level {level} outside [0, 1]")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_continuous_lookup() {
        let s = Schedule::new(0.0, vec![(5.0, 1.0), (9.0, 0.25)]).unwrap();
        assert_eq!(s.value_at(-1.0), 0.0);
        assert_eq!(s.value_at(4.999), 0.0);
        assert_eq!(s.value_at(5.0), 1.0); // new level applies at the switch
        assert_eq!(s.value_at(8.999), 1.0);
        assert_eq!(s.value_at(9.0), 0.25);
        assert_eq!(s.value_at(1e9), 0.25);
    }

    #[test]
    fn rejects_bad_levels_and_ordering() {
        assert!(Schedule::constant(1.5).is_err());
        assert!(Schedule::new(0.0, vec![(1.0, 0.5), (1.0, 0.7)]).is_err());
        assert!(Schedule::new(0.0, vec![(2.0, 0.5), (1.0, 0.7)]).is_err());
        assert!(Schedule::new(0.0, vec![(f64::NAN, 0.5)]).is_err());
    }

    #[test]
    fn random_schedules_respect_segment_bounds() {
        let mut rng = SplitMix64::new(3);
        let s = Schedule::random(&mut rng, 10.0, 20.0, 200.0).unwrap();
        let times: Vec<f64> = s.switch_times().collect();
        let mut prev = 0.0;
        for &t in &times {
            assert!(t - prev >= 10.0 - 1e-12);
            assert!(t - prev <= 20.0 + 1e-12);
            prev = t;
        }
    }
}
