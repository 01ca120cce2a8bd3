//! Elementary number theory over ℚ: primality, primitive roots, p-th power
//! residue indices, Fermat quotients and prime streams.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp != 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve primes as bases are exact below 2^64.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn check_odd_prime(p: u64) -> Result<()> {
    if p % 2 == 1 && is_prime(p) {
        Ok(())
    } else {
        Err(Error::BadModulus(p))
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Smallest positive generator of (ℤ/ℓ)^×.
pub fn primitive_root(ell: u64) -> Result<u64> {
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell == 2 {
        return Ok(1);
    }
    let factors = distinct_prime_factors(ell - 1);
    (2..ell)
        .find(|&g| factors.iter().all(|&f| pow_mod(g, (ell - 1) / f, ell) != 1))
        .ok_or_else(|| Error::Internal(format!("no primitive root modulo {ell}")))
}

/// ind_ℓ(a) ∈ 𝔽_p, normalized by the smallest primitive root modulo ℓ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ResidueIndex(u64);

impl ResidueIndex {
    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for ResidueIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn check_index_args(a: u64, ell: u64, p: u64) -> Result<()> {
    check_odd_prime(p)?;
    if !is_prime(ell) {
        return Err(Error::NotPrime(ell));
    }
    if ell % p != 1 {
        return Err(Error::NotOneModP { ell, p });
    }
    if a % ell == 0 {
        return Err(Error::NotCoprime { a, ell });
    }
    Ok(())
}

/// The d mod p with a ≡ g^d (mod ℓ), g = primitive_root(ℓ).
///
/// Only the order-p quotient matters, so this is a discrete log of
/// a^((ℓ−1)/p) in the subgroup generated by g^((ℓ−1)/p): at most p−1 steps.
pub fn index(a: u64, ell: u64, p: u64) -> Result<ResidueIndex> {
    check_index_args(a, ell, p)?;
    let e = (ell - 1) / p;
    let target = pow_mod(a, e, ell);
    let zeta = pow_mod(primitive_root(ell)?, e, ell);
    let mut acc = 1u64;
    for d in 0..p {
        if acc == target {
            return Ok(ResidueIndex(d));
        }
        acc = mul_mod(acc, zeta, ell);
    }
    Err(Error::Internal(format!(
        "{a}^{e} mod {ell} is not a p-th root of unity"
    )))
}

/// Euler-style test a^((ℓ−1)/p) ≡ 1; agrees with `index(a, ℓ, p) == 0`.
pub fn is_pth_power(a: u64, ell: u64, p: u64) -> Result<bool> {
    check_index_args(a, ell, p)?;
    Ok(pow_mod(a, (ell - 1) / p, ell) == 1)
}

/// (a^(p−1) − 1)/p mod p: the isomorphism ℤ_p^× ⊗ 𝔽_p ≅ 𝔽_p used at the place p.
pub fn fermat_quotient(a: u64, p: u64) -> Result<u64> {
    check_odd_prime(p)?;
    if a % p == 0 {
        return Err(Error::NotCoprime { a, ell: p });
    }
    let p2 = p
        .checked_mul(p)
        .ok_or_else(|| Error::Precondition(format!("{p}^2 overflows u64")))?;
    let x = pow_mod(a, p - 1, p2);
    Ok(((x + p2 - 1) % p2) / p % p)
}

/// Strictly increasing primes (optionally ≡ 1 mod p) that avoid a finite set.
#[derive(Debug, Clone)]
pub struct PrimeStream {
    next: u64,
    step: u64,
    pending_two: bool,
    avoid: BTreeSet<u64>,
}

pub fn prime_stream(p: u64, residue_one: bool, avoid: &BTreeSet<u64>) -> PrimeStream {
    let (next, step, pending_two) = if residue_one {
        // 1 + p is even, so start at 1 + 2p and keep to odd candidates.
        (1 + 2 * p, 2 * p, false)
    } else {
        (3, 2, true)
    };
    PrimeStream {
        next,
        step,
        pending_two,
        avoid: avoid.clone(),
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.pending_two {
            self.pending_two = false;
            if !self.avoid.contains(&2) {
                return Some(2);
            }
        }
        loop {
            let n = self.next;
            self.next = n.checked_add(self.step)?;
            if is_prime(n) && !self.avoid.contains(&n) {
                return Some(n);
            }
        }
    }
}
