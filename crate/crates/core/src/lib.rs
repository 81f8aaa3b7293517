//! Supercritical spatial SIR epidemics on `Z^2 x {1, ..., N}`.
//!
//! Each site of the square lattice holds a village of `N` individuals. An
//! infected individual stays infected for one generation and meanwhile
//! infects each susceptible individual in its own or an adjacent village
//! independently with probability `(1 + theta) / (5 N)`.
//!
//! Modules:
//! - [`fixed_points`]: survival probability, cone parameter, frontier-layer
//!   constants.
//! - [`speed`]: the direction-dependent spreading speed.
//! - [`det`]: the deterministic `N -> infinity` limit.
//! - [`stoch`]: the stochastic process and Monte Carlo estimators.
//! - [`paths`]: exact lattice path counts with brute-force oracles.
//! - [`percolation`]: the percolation representation.

pub mod binomial;
pub mod det;
mod error;
pub mod field;
pub mod fixed_points;
pub mod params;
pub mod paths;
pub mod percolation;
pub mod rng;
mod roots;
pub mod speed;
pub mod stats;
pub mod stoch;

pub use det::{DetRun, DetState, InitialCondition, LayerMatrix, RInfinity};
pub use error::{Result, SirError};
pub use field::{write_pgm, CountField, Field, RealField, RecordPolicy, Window};
pub use fixed_points::EllTable;
pub use params::ModelParams;
pub use paths::PathCount;
pub use speed::ShapeCurve;
pub use stoch::{Estimate, MonteCarloReport, SimRun, SimState};
