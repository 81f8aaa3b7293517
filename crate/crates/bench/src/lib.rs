//! Shared fixtures for the benchmarks.

use spatial_sir::{InitialCondition, ModelParams};

/// The desk-scale model: `theta = 2`, villages of 200.
pub fn desk_params() -> ModelParams {
    ModelParams::new(2.0, 200).expect("valid parameters")
}

pub fn point_source() -> InitialCondition {
    InitialCondition::Point { gamma: 0.2 }
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_are_valid() {
        assert_eq!(super::desk_params().village_size(), 200);
        super::point_source().validate().unwrap();
    }
}
