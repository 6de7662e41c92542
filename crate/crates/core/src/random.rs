//! Seeded random Boolean inverse monoids for the property and acceptance
//! suites: closures of a few random partial bijections on a small ground
//! set, Boolean-ified through the ample semigroup of the tight groupoid
//! when the closure itself falls short of Boolean.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::germs::{ample_semigroup_capped, tight_groupoid};
use crate::monoid::{ClosureOptions, FiniteInverseMonoid};
use crate::pbij::PartialBijection;

#[derive(Clone, Debug)]
pub struct RandomMonoidConfig {
    pub max_ground: usize,
    pub max_generators: usize,
    pub cap: usize,
}

impl Default for RandomMonoidConfig {
    fn default() -> Self {
        RandomMonoidConfig { max_ground: 5, max_generators: 3, cap: 2_000 }
    }
}

pub fn random_partial_bijection(rng: &mut ChaCha8Rng, ground: usize) -> PartialBijection {
    let mut targets: Vec<usize> = (0..ground).collect();
    let mut pairs = Vec::new();
    for src in 0..ground {
        if rng.gen_bool(0.5) {
            let k = rng.gen_range(0..targets.len());
            pairs.push((src, targets.swap_remove(k)));
        }
    }
    PartialBijection::from_pairs(ground, &pairs).expect("targets drawn without replacement")
}

/// One seeded candidate: the closure of up to `max_generators` random
/// partial bijections with identity adjoined, replaced by the ample
/// semigroup of its tight groupoid when not already Boolean. Returns None
/// when a cap is hit or the result still fails the Boolean check.
pub fn random_boolean_monoid(
    seed: u64,
    cfg: &RandomMonoidConfig,
) -> Option<FiniteInverseMonoid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ground = rng.gen_range(2..=cfg.max_ground);
    let n_gens = rng.gen_range(1..=cfg.max_generators);
    let gens: Vec<PartialBijection> =
        (0..n_gens).map(|_| random_partial_bijection(&mut rng, ground)).collect();
    let m = FiniteInverseMonoid::closure(
        &gens,
        ground,
        &ClosureOptions { adjoin_identity: true, join_closure: true, cap: cfg.cap },
    )
    .ok()?;
    if m.is_boolean() {
        return Some(m);
    }
    let g = tight_groupoid(&m).ok()?;
    let amp = ample_semigroup_capped(&g, cfg.cap).ok()?;
    amp.is_boolean().then_some(amp)
}

/// The first `count` seeds whose candidate survives, with the monoids.
/// Seeds are tried in waves so the per-seed work can run in parallel
/// without changing which seeds are selected.
pub fn boolean_monoid_suite(
    count: usize,
    cfg: &RandomMonoidConfig,
) -> Vec<(u64, FiniteInverseMonoid)> {
    let mut out = Vec::with_capacity(count);
    let mut next_seed = 0u64;
    while out.len() < count {
        let wave: Vec<u64> = (next_seed..next_seed + 32).collect();
        next_seed += 32;
        let built = crate::exec::map_collect(&wave, |&seed| {
            random_boolean_monoid(seed, cfg).map(|m| (seed, m))
        });
        for item in built.into_iter().flatten() {
            if out.len() < count {
                out.push(item);
            }
        }
    }
    out
}
