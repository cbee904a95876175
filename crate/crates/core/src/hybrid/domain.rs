//! Hybrid time domains and simulated solution pairs.

use std::fmt;

use crate::Scalar;

/// Finite hybrid time domain `∪_j ([t_j, t_{j+1}], j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridTimeDomain<T> {
    intervals: Vec<(T, T, usize)>,
}

impl<T: Scalar> HybridTimeDomain<T> {
    /// Domain consisting of the single point `(t0, 0)`.
    pub fn starting_at(t0: T) -> Self {
        Self {
            intervals: vec![(t0, t0, 0)],
        }
    }

    pub fn intervals(&self) -> &[(T, T, usize)] {
        &self.intervals
    }

    pub fn last_jump_index(&self) -> usize {
        self.intervals.last().map(|iv| iv.2).unwrap_or(0)
    }

    pub fn end_time(&self) -> T {
        self.intervals.last().map(|iv| iv.1).unwrap_or_else(T::zero)
    }

    /// Extends the current interval to `t_end`.
    pub fn extend_to(&mut self, t_end: T) {
        if let Some(last) = self.intervals.last_mut() {
            if t_end > last.1 {
                last.1 = t_end;
            }
        }
    }

    /// Records a jump at the current end time.
    pub fn push_jump(&mut self) {
        let (_, t, j) = *self.intervals.last().expect("domain is never empty");
        self.intervals.push((t, t, j + 1));
    }

    pub fn contains(&self, t: T, j: usize, tol: T) -> bool {
        self.intervals
            .iter()
            .any(|&(a, b, k)| k == j && t >= a - tol && t <= b + tol)
    }

    /// Monotone times, shared endpoints, unit jump increments starting at 0.
    pub fn is_well_formed(&self) -> bool {
        let Some(first) = self.intervals.first() else {
            return false;
        };
        if first.2 != 0 {
            return false;
        }
        self.intervals.iter().all(|iv| iv.0 <= iv.1)
            && self
                .intervals
                .windows(2)
                .all(|w| w[1].2 == w[0].2 + 1 && w[1].0 == w[0].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Flow,
    JumpPre,
    JumpPost,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Phase::Flow => "flow",
            Phase::JumpPre => "jump_pre",
            Phase::JumpPost => "jump_post",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub t: T,
    pub j: usize,
    pub x: Vec<T>,
    /// Flow input applied from this sample on, if any.
    pub u_c: Option<Vec<T>>,
    pub v: T,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpRecord<T> {
    pub t: T,
    /// Jump counter before the jump.
    pub j: usize,
    pub x_before: Vec<T>,
    pub u_d: Vec<T>,
    pub x_after: Vec<T>,
    pub v_before: T,
    pub v_after: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedSublevel,
    MaxFlowTime,
    MaxJumps,
    Infeasible,
    LeftCUnionD,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::ReachedSublevel => "ReachedSublevel",
            Termination::MaxFlowTime => "MaxFlowTime",
            Termination::MaxJumps => "MaxJumps",
            Termination::Infeasible => "Infeasible",
            Termination::LeftCUnionD => "LeftCUnionD",
        })
    }
}

/// Hybrid arc with its input, per-sample V values and jump log.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridTrajectory<T> {
    pub domain: HybridTimeDomain<T>,
    pub samples: Vec<Sample<T>>,
    pub jump_log: Vec<JumpRecord<T>>,
    pub termination: Termination,
    /// Human-readable reason accompanying `Infeasible` terminations.
    pub detail: Option<String>,
}

impl<T: Scalar> HybridTrajectory<T> {
    pub fn final_sample(&self) -> &Sample<T> {
        self.samples.last().expect("trajectory has at least one sample")
    }

    pub fn jumps(&self) -> usize {
        self.jump_log.len()
    }

    /// Pairs of consecutive samples within the same flow interval.
    pub fn flow_pairs(&self) -> impl Iterator<Item = (&Sample<T>, &Sample<T>)> {
        self.samples
            .windows(2)
            .filter(|w| w[0].j == w[1].j)
            .map(|w| (&w[0], &w[1]))
    }

    /// Domain well-formedness and every sample inside the domain.
    pub fn is_consistent(&self) -> bool {
        self.domain.is_well_formed()
            && self
                .samples
                .iter()
                .all(|s| self.domain.contains(s.t, s.j, T::zero()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_growth_is_well_formed() {
        let mut d = HybridTimeDomain::starting_at(0.0);
        d.extend_to(0.3);
        d.push_jump();
        d.push_jump();
        d.extend_to(1.0);
        assert!(d.is_well_formed());
        assert_eq!(d.intervals(), &[(0.0, 0.3, 0), (0.3, 0.3, 1), (0.3, 1.0, 2)]);
        assert!(d.contains(0.3, 1, 0.0));
        assert!(!d.contains(0.5, 1, 0.0));
    }

    #[test]
    fn malformed_domain_detected() {
        let d = HybridTimeDomain {
            intervals: vec![(0.0, 1.0, 0), (1.0, 2.0, 2)],
        };
        assert!(!d.is_well_formed());
        let d = HybridTimeDomain {
            intervals: vec![(0.0, 1.0, 0), (0.9, 2.0, 1)],
        };
        assert!(!d.is_well_formed());
    }
}
