//! The genus group G(k_S^{T,el}|ℚ), dual to H¹_et(X∖S, T; 𝔽_p), written as
//! an explicit quotient of ⊕_v 𝔽_p.
//!
//! By class field theory over ℚ the maximal elementary abelian p-extension
//! unramified outside S is cut out by ∏_{v∈S} ℤ_v^× ⊗ 𝔽_p. Only the places
//! v ≡ 1 mod p and v = p contribute a copy of 𝔽_p (the columns); the coordinate
//! at column ℓ is the residue index at ℓ and at column p the Fermat quotient.
//! Complete splitting at t ∈ T kills the Frobenius of t, which gives one
//! relation row per t.

use serde::{Deserialize, Serialize};

use crate::fp_linalg::{axpy, dot, in_span, neg, FpMatrix};
use crate::kummer::{constraining_places, local_index, MarkedSetup};
use crate::residue::{check_odd_prime, is_prime, is_pth_power};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusGroup {
    p: u64,
    s: Vec<u64>,
    t: Vec<u64>,
    columns: Vec<u64>,
    relations: FpMatrix,
    characters: Vec<Vec<u64>>,
}

/// An element of H¹_et(X∖S, T): a functional on the column space that
/// annihilates every relation row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Character {
    pub p: u64,
    pub columns: Vec<u64>,
    pub coeffs: Vec<u64>,
}

impl Character {
    pub fn eval(&self, v: &[u64]) -> u64 {
        dot(&self.coeffs, v, self.p)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Value on the inertia generator at `place`.
    pub fn at(&self, place: u64) -> Result<u64> {
        self.columns
            .iter()
            .position(|&c| c == place)
            .map(|i| self.coeffs[i])
            .ok_or(Error::NotAColumn(place))
    }

    pub fn add(&self, other: &Character) -> Result<Character> {
        self.combine(1, other)
    }

    /// self + c·other
    pub fn combine(&self, c: u64, other: &Character) -> Result<Character> {
        if self.p != other.p || self.columns != other.columns {
            return Err(Error::GenusMismatch);
        }
        Ok(Character {
            p: self.p,
            columns: self.columns.clone(),
            coeffs: axpy(&self.coeffs, c, &other.coeffs, self.p),
        })
    }

    pub fn scale(&self, c: u64) -> Character {
        Character {
            p: self.p,
            columns: self.columns.clone(),
            coeffs: self.coeffs.iter().map(|&x| x * (c % self.p) % self.p).collect(),
        }
    }
}

/// {ℓ ∈ S : ℓ ≡ 1 mod p or ℓ = p}; the other places cannot ramify in a
/// p-extension.
pub fn min_set(s: &[u64], p: u64) -> Vec<u64> {
    let mut out = constraining_places(s, p);
    out.sort_unstable();
    out.dedup();
    out
}

pub fn genus_group(setup: &MarkedSetup) -> Result<GenusGroup> {
    GenusGroup::build(setup.p(), setup.s(), setup.t())
}

impl GenusGroup {
    pub fn build(p: u64, s: &[u64], t: &[u64]) -> Result<Self> {
        check_odd_prime(p)?;
        let mut s = s.to_vec();
        s.sort_unstable();
        s.dedup();
        let mut t = t.to_vec();
        t.sort_unstable();
        t.dedup();
        let columns = min_set(&s, p);
        let rows = t
            .iter()
            .map(|&x| columns.iter().map(|&c| local_index(x, c, p)).collect())
            .collect::<Result<Vec<Vec<u64>>>>()?;
        let relations = FpMatrix::from_rows(p, columns.len(), &rows)?;
        let characters = relations.kernel_basis();
        Ok(Self {
            p,
            s,
            t,
            columns,
            relations,
            characters,
        })
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

    pub fn columns(&self) -> &[u64] {
        &self.columns
    }

    /// Columns carrying a local H² (ℓ ≡ 1 mod p).
    pub fn tame_columns(&self) -> Vec<u64> {
        self.columns.iter().copied().filter(|&c| c % self.p == 1).collect()
    }

    pub fn relations(&self) -> &FpMatrix {
        &self.relations
    }

    pub fn ambient_dim(&self) -> usize {
        self.columns.len()
    }

    pub fn quotient_dim(&self) -> usize {
        self.ambient_dim() - self.relations.rank()
    }

    pub fn column_index(&self, place: u64) -> Result<usize> {
        self.columns
            .iter()
            .position(|&c| c == place)
            .ok_or(Error::NotAColumn(place))
    }

    pub fn unit_vector(&self, place: u64) -> Result<Vec<u64>> {
        let i = self.column_index(place)?;
        let mut e = vec![0; self.ambient_dim()];
        e[i] = 1;
        Ok(e)
    }

    /// Basis of H¹ = Hom(G, 𝔽_p).
    pub fn character_basis(&self) -> Vec<Character> {
        self.characters
            .iter()
            .map(|c| self.character_unchecked(c.clone()))
            .collect()
    }

    fn character_unchecked(&self, coeffs: Vec<u64>) -> Character {
        Character {
            p: self.p,
            columns: self.columns.clone(),
            coeffs,
        }
    }

    /// Wraps a coefficient vector, checking that it kills every relation.
    pub fn character(&self, coeffs: Vec<u64>) -> Result<Character> {
        if coeffs.len() != self.ambient_dim() {
            return Err(Error::LengthMismatch {
                expected: self.ambient_dim(),
                found: coeffs.len(),
            });
        }
        let coeffs: Vec<u64> = coeffs.into_iter().map(|c| c % self.p).collect();
        for i in 0..self.relations.rows() {
            if dot(self.relations.row(i), &coeffs, self.p) != 0 {
                return Err(Error::Precondition(format!(
                    "functional does not vanish on the Frobenius of {}",
                    self.t[i]
                )));
            }
        }
        Ok(self.character_unchecked(coeffs))
    }

    pub fn owns(&self, chi: &Character) -> bool {
        chi.p == self.p && chi.columns == self.columns
    }

    /// Coordinates of the class of an ambient vector in the quotient, taken
    /// against the character basis. Zero iff the vector lies in the span of
    /// the relations.
    pub fn class_coords(&self, v: &[u64]) -> Vec<u64> {
        self.characters.iter().map(|c| dot(c, v, self.p)).collect()
    }

    /// Whether v lies in span(relations ∪ extra).
    pub fn in_relation_span(&self, v: &[u64], extra: &[Vec<u64>]) -> Result<bool> {
        let mut gens = self.relations.to_rows();
        gens.extend_from_slice(extra);
        in_span(v, &gens, self.p)
    }

    /// Reciprocity description of Frob_ℓ for a column place ℓ:
    /// −Σ_{j≠ℓ} ind_j(ℓ)·e_j, with e_ℓ-coefficient 0. The true Frobenius is
    /// only defined modulo the inertia line at ℓ.
    pub fn reciprocity_vector(&self, place: u64) -> Result<Vec<u64>> {
        self.column_index(place)?;
        self.columns
            .iter()
            .map(|&c| {
                if c == place {
                    Ok(0)
                } else {
                    local_index(place, c, self.p).map(|x| neg(x, self.p))
                }
            })
            .collect()
    }
}

/// Image of the inertia group at a column place, as quotient coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InertiaClass {
    pub place: u64,
    pub coords: Vec<u64>,
}

impl InertiaClass {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }
}

pub fn inertia_class(g: &GenusGroup, place: u64) -> Result<InertiaClass> {
    let e = g.unit_vector(place)?;
    Ok(InertiaClass {
        place,
        coords: g.class_coords(&e),
    })
}

pub fn ramifies(g: &GenusGroup, place: u64) -> Result<bool> {
    Ok(!inertia_class(g, place)?.is_zero())
}

/// Ambient vector (index(q, ℓ))_ℓ whose class is the Frobenius of q.
pub fn frobenius_vector(g: &GenusGroup, q: u64) -> Result<Vec<u64>> {
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if g.s.contains(&q) {
        return Err(Error::PlaceInS(q));
    }
    if g.t.contains(&q) {
        return Err(Error::PlaceInT(q));
    }
    g.columns.iter().map(|&c| local_index(q, c, g.p)).collect()
}

/// χ(Frob_ℓ) for ℓ a column place at which χ is unramified.
pub fn frobenius_eval(g: &GenusGroup, chi: &Character, place: u64) -> Result<u64> {
    if !g.owns(chi) {
        return Err(Error::GenusMismatch);
    }
    if chi.at(place)? != 0 {
        return Err(Error::RamifiedCharacterEval(place));
    }
    Ok(chi.eval(&g.reciprocity_vector(place)?))
}

fn require_one_mod_p(q: u64, p: u64) -> Result<()> {
    check_odd_prime(p)?;
    if q % p != 1 {
        return Err(Error::NotOneModP { ell: q, p });
    }
    Ok(())
}

/// For q ≡ 1 mod p: q splits in ℚ(μ_p, a^{1/p}) iff a is a p-th power mod q.
pub fn splits_in_kummer(q: u64, a: u64, p: u64) -> Result<bool> {
    require_one_mod_p(q, p)?;
    is_pth_power(a, q, p)
}

/// q splits completely in ℚ(μ_p, E_T^{1/p}): every t ∈ T is a p-th power mod q.
pub fn splits_completely_in_unit_kummer(q: u64, t: &[u64], p: u64) -> Result<bool> {
    require_one_mod_p(q, p)?;
    for &x in t {
        if !is_pth_power(x, q, p)? {
            return Ok(false);
        }
    }
    Ok(true)
}
