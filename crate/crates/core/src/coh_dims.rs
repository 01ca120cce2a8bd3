//! Dimension formulas for the étale cohomology of marked arithmetic curves
//! X∖S over ℚ with coefficients in 𝔽_p, p odd.
//!
//! Base field constants: r = r₁ = 1, r₂ = 0, δ = 0 (μ_p ⊄ ℚ), hence θ = 0.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::kummer::{v_space, MarkedSetup};
use crate::Result;

pub const R: i64 = 1;
pub const R1: i64 = 1;
pub const R2: i64 = 0;
pub const DELTA: i64 = 0;

/// δ_ℓ = 1 iff μ_p ⊂ ℚ_ℓ, i.e. ℓ ≡ 1 mod p. In particular δ_p = 0.
pub fn delta_v(ell: u64, p: u64) -> u8 {
    u8::from(ell % p == 1)
}

/// dim H^i_x(X_x, T_x) for the henselian local scheme at ℓ.
pub fn local_h(i: usize, ell: u64, p: u64, marked: bool) -> usize {
    let delta = delta_v(ell, p) as usize;
    let degree = usize::from(ell == p);
    match i {
        2 => delta + degree + usize::from(marked),
        3 => delta,
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HVector {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub h3: usize,
    pub theta: u8,
    pub delta: u8,
    pub delta_flags: BTreeMap<u64, u8>,
    pub r: i64,
    pub r1: i64,
    pub r2: i64,
}

impl HVector {
    pub fn alternating_sum(&self) -> i64 {
        self.h0 as i64 - self.h1 as i64 + self.h2 as i64 - self.h3 as i64
    }

    pub fn as_array(&self) -> [usize; 4] {
        [self.h0, self.h1, self.h2, self.h3]
    }
}

pub fn h_vector(setup: &MarkedSetup) -> Result<HVector> {
    let p = setup.p();
    let dim_v = v_space(setup)?.dim() as i64;
    let delta_flags: BTreeMap<u64, u8> = setup.s().iter().map(|&l| (l, delta_v(l, p))).collect();
    let sum_delta: i64 = delta_flags.values().map(|&d| d as i64).sum();
    let wild_degree = i64::from(setup.s().contains(&p));
    // θ = 1 iff δ = 1 and S = ∅; δ = 0 over ℚ for odd p.
    let theta = i64::from(DELTA == 1 && setup.s().is_empty());
    let h1 = 1 + sum_delta - DELTA + dim_v + wild_degree - R - setup.t().len() as i64;
    let h2 = sum_delta - DELTA + dim_v + theta;
    debug_assert!(h1 >= 0 && h2 >= 0);
    Ok(HVector {
        h0: 1,
        h1: h1 as usize,
        h2: h2 as usize,
        h3: theta as usize,
        theta: theta as u8,
        delta: DELTA as u8,
        delta_flags,
        r: R,
        r1: R1,
        r2: R2,
    })
}

/// r + #T − Σ_{𝔭∈S∩S_p} [ℚ_𝔭 : ℚ_p].
pub fn euler_char(setup: &MarkedSetup) -> i64 {
    R + setup.t().len() as i64 - i64::from(setup.s().contains(&setup.p()))
}

/// dim Ш²(ℚ, S, T) = dim V_S^T by duality.
pub fn sha2_dim(setup: &MarkedSetup) -> Result<usize> {
    Ok(v_space(setup)?.dim())
}

/// The five-term excision sequence comparing (X∖S, T) with X∖S forces
/// h¹(X∖S,T) − h¹(X∖S) + #T − h²(X∖S,T) + h²(X∖S) = 0.
pub fn excision_check(setup: &MarkedSetup) -> Result<bool> {
    let marked = h_vector(setup)?;
    let unmarked = h_vector(&MarkedSetup::marked_any(setup.p(), setup.s(), &[], &[])?)?;
    let lhs = marked.h1 as i64 - unmarked.h1 as i64 + setup.t().len() as i64 - marked.h2 as i64
        + unmarked.h2 as i64;
    Ok(lhs == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(p: u64, s: &[u64], t: &[u64]) -> MarkedSetup {
        MarkedSetup::new(p, s, t, &[]).unwrap()
    }

    #[test]
    fn deltas() {
        assert_eq!(delta_v(7, 3), 1);
        assert_eq!(delta_v(3, 3), 0);
        assert_eq!(delta_v(5, 3), 0);
    }

    #[test]
    fn local_dims() {
        assert_eq!(local_h(2, 7, 3, true), 2);
        assert_eq!(local_h(2, 3, 3, false), 1);
        assert_eq!(local_h(0, 7, 3, true), 0);
        assert_eq!(local_h(1, 7, 3, true), 0);
        assert_eq!(local_h(3, 7, 3, false), 1);
        assert_eq!(local_h(4, 7, 3, true), 0);
    }

    #[test]
    fn local_euler_characteristic() {
        for ell in [2u64, 3, 5, 7, 11, 13] {
            for marked in [false, true] {
                let chi: i64 = (0..4)
                    .map(|i| (-1i64).pow(i as u32) * local_h(i, ell, 3, marked) as i64)
                    .sum();
                assert_eq!(chi, i64::from(ell == 3) + i64::from(marked));
            }
        }
    }

    #[test]
    fn h_vector_examples() {
        assert_eq!(h_vector(&setup(3, &[7], &[])).unwrap().as_array(), [1, 1, 1, 0]);
        assert_eq!(h_vector(&setup(3, &[7, 13], &[2])).unwrap().as_array(), [1, 1, 2, 0]);
        assert_eq!(h_vector(&setup(3, &[], &[])).unwrap().as_array(), [1, 0, 0, 0]);
        assert_eq!(h_vector(&setup(3, &[3], &[])).unwrap().as_array(), [1, 1, 0, 0]);
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_char(&setup(3, &[7], &[])), 1);
        assert_eq!(euler_char(&setup(3, &[3, 7], &[2])), 1);
        assert_eq!(euler_char(&setup(3, &[], &[])), 1);
    }

    #[test]
    fn sha_examples() {
        assert_eq!(sha2_dim(&setup(3, &[], &[2])).unwrap(), 1);
        assert_eq!(sha2_dim(&setup(3, &[7], &[2])).unwrap(), 0);
        assert_eq!(sha2_dim(&setup(3, &[7], &[])).unwrap(), 0);
    }

    #[test]
    fn excision_examples() {
        assert!(excision_check(&setup(3, &[7, 13], &[2])).unwrap());
        assert!(excision_check(&setup(3, &[7], &[])).unwrap());
        assert!(excision_check(&setup(5, &[11], &[2])).unwrap());
    }
}
