//! Helpers shared by the integration suites: seeded pattern generators and an
//! exhaustive path enumerator used as a ground-truth check for small cases.

#![allow(dead_code)]

use limitwalk::{CyclePattern, DiscretePmf};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One finite-support law. The floor weight is drawn from a wider band than
/// the rest so the descent mass never becomes negligible after normalization.
pub fn random_law(rng: &mut ChaCha8Rng, min_lo: i64, min_hi: i64, max_width: usize) -> DiscretePmf {
    let min = rng.random_range(min_lo..=min_hi);
    let width = rng.random_range(2..=max_width.max(2));
    let mut weights = vec![0.0; width];
    weights[0] = rng.random_range(0.3..1.0);
    for w in weights.iter_mut().skip(1) {
        *w = rng.random_range(0.0..1.0);
    }
    DiscretePmf::from_weights(min, &weights).unwrap()
}

/// Periodic pattern with positive descent depth and period mean at most
/// `mean_cap` (pass a negative cap to force drift downward). Laws are redrawn
/// until both constraints hold, so the draw count varies with the seed but the
/// result is deterministic.
pub fn random_pattern(
    rng: &mut ChaCha8Rng,
    max_laws: usize,
    min_lo: i64,
    min_hi: i64,
    max_width: usize,
    mean_cap: f64,
) -> CyclePattern {
    loop {
        let n = rng.random_range(1..=max_laws);
        let laws: Vec<DiscretePmf> = (0..n)
            .map(|_| random_law(rng, min_lo, min_hi, max_width))
            .collect();
        let depth: i64 = -laws.iter().map(DiscretePmf::min_support).sum::<i64>();
        if depth < 1 {
            continue;
        }
        let mean: f64 = laws.iter().map(DiscretePmf::mean).sum();
        if mean <= mean_cap {
            return CyclePattern::new(laws).unwrap();
        }
    }
}

/// Single-law pattern with clearly negative drift; the regime where the
/// boundary construction and the step-by-step oracles describe the same walk.
pub fn random_single_law_pattern(rng: &mut ChaCha8Rng, mean_cap: f64) -> CyclePattern {
    random_pattern(rng, 1, -4, -1, 5, mean_cap)
}

/// Exact P(S_1 <= x, ..., S_h <= x) by visiting every support combination.
/// Cost is the product of support sizes over `horizon` steps; keep both small.
/// Path masses accumulate through a compensated sum so the result is good to
/// a few ulps even over tens of thousands of paths.
pub fn enumerate_paths(pattern: &CyclePattern, x: i64, horizon: usize) -> f64 {
    struct Kahan {
        sum: f64,
        carry: f64,
    }
    impl Kahan {
        fn add(&mut self, value: f64) {
            let y = value - self.carry;
            let t = self.sum + y;
            self.carry = (t - self.sum) - y;
            self.sum = t;
        }
    }

    fn recurse(
        laws: &[DiscretePmf],
        x: i64,
        t: usize,
        horizon: usize,
        sum: i64,
        mass: f64,
        acc: &mut Kahan,
    ) {
        if t == horizon {
            acc.add(mass);
            return;
        }
        let law = &laws[t % laws.len()];
        for (i, &w) in law.weights().iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            let next = sum + law.min_support() + i as i64;
            if next > x {
                continue;
            }
            recurse(laws, x, t + 1, horizon, next, mass * w, acc);
        }
    }
    let mut acc = Kahan {
        sum: 0.0,
        carry: 0.0,
    };
    recurse(pattern.laws(), x, 0, horizon, 0, 1.0, &mut acc);
    acc.sum
}
