#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use satport::oracle::random_problem;
use satport::PortfolioProblem;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn problem(rng: &mut StdRng, n: usize, periods: usize, k_max: f64) -> PortfolioProblem {
    random_problem(n, periods, k_max, &mut || rng.gen::<f64>())
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}
