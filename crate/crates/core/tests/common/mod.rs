#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tame_core::kummer::MarkedSetup;
use tame_core::residue::is_prime;

pub fn primes_below(n: u64) -> Vec<u64> {
    (2..n).filter(|&x| is_prime(x)).collect()
}

/// Deterministic corpus of valid setups: p ∈ {3,5,7}, primes < 500,
/// |S| ≤ 4, |T| ≤ 3, S and T disjoint, p ∉ T. Half of the S-draws favour
/// places ≡ 1 mod p so that most setups carry columns.
pub fn corpus(n: usize, seed: u64) -> Vec<MarkedSetup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let primes = primes_below(500);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let p = *[3u64, 5, 7].choose(&mut rng).unwrap();
        let tame: Vec<u64> = primes.iter().copied().filter(|&l| l % p == 1 || l == p).collect();
        let pool = if rng.gen_bool(0.5) { &tame } else { &primes };
        let (s_len, t_len) = (rng.gen_range(0..=4), rng.gen_range(0..=3));
        let s: Vec<u64> = pool.choose_multiple(&mut rng, s_len).copied().collect();
        let t: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|x| *x != p && !s.contains(x))
            .collect::<Vec<_>>()
            .choose_multiple(&mut rng, t_len)
            .copied()
            .collect();
        out.push(MarkedSetup::new(p, &s, &t, &[]).expect("generator only builds valid setups"));
    }
    out
}
