use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::anf::Polynomial;
use crate::boolfun::BoolFun6;
use crate::cipher::{RoundMode, RoundSystem, Wiring};
use crate::fe::{build_fe, check_invariant_empirically, FeError};

const Z_95: f64 = 1.959963984540054;

/// Each function is screened with this many random states before the exact
/// FE is computed. Sparse invariants such as the degree-7 product are 1 on few
/// states, so the screen needs a few thousand to catch most non-solutions.
const SCREEN_STATES: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub trials: u64,
    pub seed: u64,
    /// Trial index and function of every hit, in trial order.
    pub hits: Vec<(u64, BoolFun6)>,
    pub frequency: f64,
    /// Wilson score interval at 95%.
    pub interval: (f64, f64),
}

/// Wilson score interval for `hits` successes out of `trials`.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = Z_95 * Z_95;
    let center = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = Z_95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / (1.0 + z2 / n);
    // the bounds are exactly 0 and 1 at the extremes; avoid rounding residue
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// The function drawn for trial `i`.
pub fn trial_function(seed: u64, i: u64) -> BoolFun6 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i);
    BoolFun6::from_truth_table(rng.gen())
}

fn is_hit(w: &Wiring, p: &Polynomial, f: &BoolFun6, screen_seed: u64) -> Result<bool, FeError> {
    // a single changed state already proves the FE non-zero
    if check_invariant_empirically(p, w, f, SCREEN_STATES, screen_seed)?.mismatches > 0 {
        return Ok(false);
    }
    Ok(build_fe(p, &RoundSystem::new(w, RoundMode::Expanded(*f)))?.is_zero)
}

/// Tries `trials` seeded random functions and records those for which `p`
/// is an exact round invariant.
pub fn search_random_functions(w: &Wiring, p: &Polynomial, trials: u64, seed: u64) -> Result<SearchReport, FeError> {
    search_with_planted(w, p, trials, seed, &[])
}

/// As [`search_random_functions`], with the functions of some trials replaced.
pub fn search_with_planted(
    w: &Wiring,
    p: &Polynomial,
    trials: u64,
    seed: u64,
    planted: &[(u64, BoolFun6)],
) -> Result<SearchReport, FeError> {
    let function = |i: u64| {
        planted
            .iter()
            .find(|(j, _)| *j == i)
            .map(|(_, f)| *f)
            .unwrap_or_else(|| trial_function(seed, i))
    };
    let results: Vec<Option<(u64, BoolFun6)>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let f = function(i);
            Ok(is_hit(w, p, &f, seed ^ i)?.then_some((i, f)))
        })
        .collect::<Result<_, FeError>>()?;
    let hits: Vec<_> = results.into_iter().flatten().collect();
    let n = hits.len() as u64;
    Ok(SearchReport {
        trials,
        seed,
        frequency: if trials == 0 { 0.0 } else { n as f64 / trials as f64 },
        interval: wilson_interval(n, trials),
        hits,
    })
}
