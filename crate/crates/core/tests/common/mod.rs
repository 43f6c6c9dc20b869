//! Shared helpers for the integration test suites.

use pluricycle::model::{Case, ParameterSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A valid parameter set with every entry drawn from [0.1, 2.5].
pub fn random_params(case: Case, rng: &mut ChaCha8Rng) -> ParameterSet {
    let entries: Vec<(&str, f64)> = case
        .required_keys()
        .iter()
        .map(|k| (*k, rng.gen_range(0.1..2.5)))
        .collect();
    ParameterSet::new(case, entries).unwrap()
}

pub const GOLDEN_DELTAS: [(&str, f64); 8] = [
    ("fig9a", 1.08654),
    ("fig9b", 0.93886),
    ("fig10a", 1.07708),
    ("fig10b", 0.83665),
    ("fig11a", 1.05804),
    ("fig11b", 0.84615),
    ("fig12a", 1.10714),
    ("fig12b", 0.73810),
];
