//! The Kummer group V_S^T(ℚ), its T-unit generators, the elements s_𝔭, and
//! the greedy search for sets of primes that kill it.
//!
//! Over ℚ with p odd, E_{ℚ,T}/p is freely generated by the primes of T, so
//! V_∅^T = 𝔽_p^T and V_S^T is the kernel of the local index map at the places
//! of S where a unit can fail to be a p-th power (ℓ ≡ 1 mod p, and ℓ = p).

use std::collections::BTreeSet;

use crate::fp_linalg::{dot, FpMatrix};
use crate::residue::{check_odd_prime, fermat_quotient, index, is_prime, prime_stream};
use crate::{Error, Result, Stage};

/// The problem instance: an odd prime p and finite sets of rational primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedSetup {
    p: u64,
    s: Vec<u64>,
    t: Vec<u64>,
    avoid: Vec<u64>,
}

fn sorted(v: &[u64]) -> Vec<u64> {
    v.iter().copied().collect::<BTreeSet<_>>().into_iter().collect()
}

impl MarkedSetup {
    /// Validates primality, pairwise disjointness and p ∉ T.
    pub fn new(p: u64, s: &[u64], t: &[u64], avoid: &[u64]) -> Result<Self> {
        if t.contains(&p) {
            return Err(Error::InvalidSetup(format!("{p} may not be marked")));
        }
        Self::marked_any(p, s, t, avoid)
    }

    /// Like [`MarkedSetup::new`] but allows p in the marked set. The auxiliary
    /// stage of the certificate marks the input ramification set, which may
    /// contain p.
    pub fn marked_any(p: u64, s: &[u64], t: &[u64], avoid: &[u64]) -> Result<Self> {
        check_odd_prime(p)?;
        let (s, t, avoid) = (sorted(s), sorted(t), sorted(avoid));
        if let Some(&n) = s.iter().chain(&t).chain(&avoid).find(|&&n| !is_prime(n)) {
            return Err(Error::NotPrime(n));
        }
        let overlap = |a: &[u64], b: &[u64]| a.iter().find(|x| b.contains(x)).copied();
        for (a, b, what) in [(&s, &t, "S and T"), (&s, &avoid, "S and avoid"), (&t, &avoid, "T and avoid")] {
            if let Some(x) = overlap(a, b) {
                return Err(Error::InvalidSetup(format!("{what} share {x}")));
            }
        }
        Ok(Self { p, s, t, avoid })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn s(&self) -> &[u64] {
        &self.s
    }

    pub fn t(&self) -> &[u64] {
        &self.t
    }

    pub fn avoid(&self) -> &[u64] {
        &self.avoid
    }

    /// Same T and avoid list, different ramification set.
    pub fn with_s(&self, s: &[u64]) -> Result<Self> {
        Self::marked_any(self.p, s, &self.t, &self.avoid)
    }
}

/// Local index of a unit `a` at the place `ell`: ind_ℓ for ℓ ≡ 1 mod p,
/// the Fermat quotient at ℓ = p, and 0 at every other place.
pub fn local_index(a: u64, ell: u64, p: u64) -> Result<u64> {
    if ell == p {
        fermat_quotient(a, p)
    } else if ell % p == 1 {
        Ok(index(a, ell, p)?.value())
    } else {
        Ok(0)
    }
}

/// Places of S at which a T-unit can fail to be a local p-th power.
pub fn constraining_places(s: &[u64], p: u64) -> Vec<u64> {
    s.iter().copied().filter(|&l| l == p || l % p == 1).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KummerSpace {
    generators: Vec<u64>,
    places: Vec<u64>,
    constraints: FpMatrix,
    basis: Vec<Vec<u64>>,
}

impl KummerSpace {
    /// Generator labels: the primes of T.
    pub fn generators(&self) -> &[u64] {
        &self.generators
    }

    /// Row labels of the constraint matrix.
    pub fn places(&self) -> &[u64] {
        &self.places
    }

    pub fn constraints(&self) -> &FpMatrix {
        &self.constraints
    }

    /// Exponent vectors (over the generators) of a basis of V_S^T.
    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn t_unit_generators(t: &[u64], p: u64) -> Result<Vec<u64>> {
    check_odd_prime(p)?;
    Ok(sorted(t))
}

/// s_𝔭 = 𝔭: valuation 1 at 𝔭 and 0 elsewhere.
pub fn s_element(place: u64, t: &[u64]) -> Result<u64> {
    if t.contains(&place) {
        return Err(Error::PlaceInT(place));
    }
    Ok(place)
}

pub fn v_space(setup: &MarkedSetup) -> Result<KummerSpace> {
    let p = setup.p();
    let generators = t_unit_generators(setup.t(), p)?;
    let places = constraining_places(setup.s(), p);
    let rows = places
        .iter()
        .map(|&v| generators.iter().map(|&t| local_index(t, v, p)).collect())
        .collect::<Result<Vec<Vec<u64>>>>()?;
    let constraints = FpMatrix::from_rows(p, generators.len(), &rows)?;
    let basis = constraints.kernel_basis();
    Ok(KummerSpace {
        generators,
        places,
        constraints,
        basis,
    })
}

/// Rank of the valuation vectors of `elements` at the primes outside T;
/// full rank means their p-th roots generate independent Kummer extensions
/// over ℚ(μ_p, E_T^{1/p}).
pub fn independent_mod_units(elements: &[u64], t: &[u64], p: u64) -> Result<bool> {
    let mut primes = BTreeSet::new();
    let factor = |mut n: u64| {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            while n % d == 0 {
                out.push(d);
                n /= d;
            }
            d += 1;
        }
        if n > 1 {
            out.push(n);
        }
        out
    };
    let factored: Vec<Vec<u64>> = elements.iter().map(|&e| factor(e)).collect();
    for f in &factored {
        primes.extend(f.iter().copied().filter(|q| !t.contains(q)));
    }
    let primes: Vec<u64> = primes.into_iter().collect();
    let rows: Vec<Vec<u64>> = factored
        .iter()
        .map(|f| {
            primes
                .iter()
                .map(|q| f.iter().filter(|&&x| x == *q).count() as u64 % p)
                .collect()
        })
        .collect();
    Ok(FpMatrix::from_rows(p, primes.len(), &rows)?.rank() == elements.len())
}

/// Greedy construction of `multiplicity` pairwise disjoint sets S⁽ⁱ⁾ of primes
/// ≡ 1 mod p with V_{S⁽ⁱ⁾}^T = 0. A prime joins the current set iff it
/// strictly lowers the kernel dimension.
pub fn vskill_search(
    t: &[u64],
    avoid: &[u64],
    p: u64,
    bound: u64,
    multiplicity: usize,
) -> Result<Vec<Vec<u64>>> {
    check_odd_prime(p)?;
    if multiplicity == 0 {
        return Err(Error::Precondition("multiplicity must be at least 1".into()));
    }
    let generators = t_unit_generators(t, p)?;
    let mut excluded: BTreeSet<u64> = t.iter().chain(avoid).copied().collect();
    let mut sets = Vec::with_capacity(multiplicity);
    for _ in 0..multiplicity {
        let mut kernel = FpMatrix::identity(p, generators.len())?.to_rows();
        let mut rows: Vec<Vec<u64>> = Vec::new();
        let mut chosen = Vec::new();
        let mut stream = prime_stream(p, true, &excluded);
        while !kernel.is_empty() {
            let ell = match stream.next() {
                Some(l) if l <= bound => l,
                _ => {
                    return Err(Error::SearchExhausted {
                        stage: Stage::KillSet,
                        index: Some(sets.len()),
                        bound,
                    })
                }
            };
            let row = generators
                .iter()
                .map(|&g| index(g, ell, p).map(|i| i.value()))
                .collect::<Result<Vec<u64>>>()?;
            if kernel.iter().any(|k| dot(k, &row, p) != 0) {
                rows.push(row);
                chosen.push(ell);
                kernel = FpMatrix::from_rows(p, generators.len(), &rows)?.kernel_basis();
            }
        }
        excluded.extend(chosen.iter().copied());
        sets.push(chosen);
    }
    Ok(sets)
}
