//! Model parameters shared by every module.

use crate::error::{domain, Result};

/// Supercriticality `theta` and village size `N`, with the per-edge
/// infection probability `(1 + theta) / (5 N)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    theta: f64,
    village_size: u32,
    p_edge: f64,
}

impl ModelParams {
    pub fn new(theta: f64, village_size: u32) -> Result<Self> {
        if theta.is_nan() || theta <= 0.0 || !theta.is_finite() {
            return domain(format!("theta must be positive and finite, got {theta}"));
        }
        if village_size == 0 {
            return domain("village size must be at least 1");
        }
        let p_edge = (1.0 + theta) / (5.0 * f64::from(village_size));
        if p_edge > 1.0 {
            return domain(format!(
                "(1 + theta) / (5 N) = {p_edge} exceeds 1 for theta = {theta}, N = {village_size}"
            ));
        }
        Ok(Self { theta, village_size, p_edge })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn village_size(&self) -> u32 {
        self.village_size
    }

    /// Probability that a given infected/susceptible pair transmits.
    pub fn p_edge(&self) -> f64 {
        self.p_edge
    }

    /// Probability that a susceptible escapes `k` infected neighbours is
    /// `(1 - p)^k`; this returns the complement.
    pub fn infection_probability(&self, infected_neighbours: u64) -> f64 {
        if infected_neighbours == 0 {
            return 0.0;
        }
        -((infected_neighbours as f64) * (-self.p_edge).ln_1p()).exp_m1()
    }
}

/// `(1 + theta) / 5`, the per-neighbour rate of the large-N limit.
pub fn branching_rate(theta: f64) -> f64 {
    (1.0 + theta) / 5.0
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        domain(format!("theta must be positive and finite, got {theta}"))
    }
}
