//! Local components of cup products H¹ ⊗ H¹ → H² of a marked curve.
//!
//! When V_S^T = 0, H²_et(X∖S, T) embeds into ⊕ H²(ℚ_v) over the tame columns
//! v ≡ 1 mod p (there is no H² at v = p for odd p), each of dimension one. At
//! such v the local group is generated by an inertia element τ_v and a
//! Frobenius lift σ_v, and the cup product is the alternating form
//!
//!   (χ ∪ ψ)_v = χ(σ_v)·ψ(τ_v) − χ(τ_v)·ψ(σ_v).
//!
//! τ_v is the column vector e_v and σ_v the reciprocity vector, whose
//! e_v-coefficient is fixed to 0. Replacing σ_v by σ_v + c·e_v adds
//! c·(χ(τ_v)ψ(τ_v) − χ(τ_v)ψ(τ_v)) = 0, so the value is well defined.

use crate::classfield::{splits_completely_in_unit_kummer, Character, GenusGroup};
use crate::fp_linalg::{neg, FpMatrix};
use crate::kummer::{v_space, MarkedSetup};
use crate::residue::{is_pth_power, mul_mod};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CupMatrix {
    pub row_labels: Vec<String>,
    pub columns: Vec<u64>,
    pub matrix: FpMatrix,
}

impl CupMatrix {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }
}

fn check_pair(g: &GenusGroup, chi: &Character, psi: &Character) -> Result<()> {
    if g.owns(chi) && g.owns(psi) {
        Ok(())
    } else {
        Err(Error::GenusMismatch)
    }
}

pub fn local_component(g: &GenusGroup, chi: &Character, psi: &Character, v: u64) -> Result<u64> {
    check_pair(g, chi, psi)?;
    let p = g.p();
    if v % p != 1 {
        return Err(Error::NoLocalH2(v));
    }
    let tau = g.unit_vector(v)?;
    let sigma = g.reciprocity_vector(v)?;
    let lhs = mul_mod(chi.eval(&sigma), psi.eval(&tau), p);
    let rhs = mul_mod(chi.eval(&tau), psi.eval(&sigma), p);
    Ok((lhs + neg(rhs, p)) % p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prediction {
    Zero,
    Nonzero,
}

/// Predicted vanishing of (χ ∪ χ_q)_v, where χ_q generates H¹(X∖{q}, T) and
/// χ is unramified at q. `g` is the genus group of S ∪ {q}.
///
/// At v = q the component is nonzero iff χ(Frob_q) ≠ 0. At v ∈ S it is
/// nonzero iff χ ramifies at v and q is inert in ℚ(μ_p, E_T^{1/p}, s_v^{1/p})
/// over ℚ(μ_p, E_T^{1/p}), i.e. s_v = v is not a p-th power mod q.
pub fn komponenten_predict(g: &GenusGroup, chi: &Character, q: u64, v: u64) -> Result<Prediction> {
    let p = g.p();
    if !g.owns(chi) {
        return Err(Error::GenusMismatch);
    }
    if !splits_completely_in_unit_kummer(q, g.t(), p)? {
        return Err(Error::Precondition(format!(
            "{q} does not split completely in the unit Kummer field"
        )));
    }
    if chi.at(q)? != 0 {
        return Err(Error::Precondition(format!("character ramified at {q}")));
    }
    if v % p != 1 {
        return Err(Error::NoLocalH2(v));
    }
    let nonzero = if v == q {
        // χ(Frob_q) on the columns other than q.
        let frob: Vec<u64> = g
            .columns()
            .iter()
            .map(|&c| {
                if c == q {
                    Ok(0)
                } else {
                    crate::kummer::local_index(q, c, p)
                }
            })
            .collect::<Result<_>>()?;
        chi.eval(&frob) != 0
    } else {
        chi.at(v)? != 0 && !is_pth_power(v, q, p)?
    };
    Ok(if nonzero {
        Prediction::Nonzero
    } else {
        Prediction::Zero
    })
}

/// Cup matrix over the tame columns of `g` in column order.
pub fn cup_matrix(g: &GenusGroup, pairs: &[(Character, Character)]) -> Result<CupMatrix> {
    let columns = g.tame_columns();
    let labels = (0..pairs.len()).map(|i| format!("pair {i}")).collect();
    cup_matrix_on(g, pairs, labels, &columns)
}

/// Cup matrix over an explicit ordering of tame columns.
pub fn cup_matrix_on(
    g: &GenusGroup,
    pairs: &[(Character, Character)],
    row_labels: Vec<String>,
    columns: &[u64],
) -> Result<CupMatrix> {
    if row_labels.len() != pairs.len() {
        return Err(Error::LengthMismatch {
            expected: pairs.len(),
            found: row_labels.len(),
        });
    }
    let rows = pairs
        .iter()
        .map(|(chi, psi)| {
            columns
                .iter()
                .map(|&v| local_component(g, chi, psi, v))
                .collect()
        })
        .collect::<Result<Vec<Vec<u64>>>>()?;
    Ok(CupMatrix {
        row_labels,
        columns: columns.to_vec(),
        matrix: FpMatrix::from_rows(g.p(), columns.len(), &rows)?,
    })
}

/// With V_S^T = 0 (and δ = 0), h² equals the number of tame columns; the
/// cup product is onto iff the matrix reaches that rank.
pub fn surjectivity_certified(setup: &MarkedSetup, matrix: &CupMatrix) -> Result<bool> {
    let dim_v = v_space(setup)?.dim();
    if dim_v != 0 {
        return Err(Error::KummerNonzero(dim_v));
    }
    let h2 = crate::coh_dims::h_vector(setup)?.h2;
    Ok(matrix.columns.len() == h2 && matrix.rank() == h2)
}

/// Checks the hypotheses of the mildness criterion for H¹ = span(U) + span(V):
/// V ∪ V is trivial and U ∪ V reaches all of H².
pub fn mild_verify(u: &[Character], v: &[Character], g: &GenusGroup) -> Result<bool> {
    let p = g.p();
    for c in u.iter().chain(v) {
        if !g.owns(c) {
            return Err(Error::GenusMismatch);
        }
    }
    let rows: Vec<Vec<u64>> = u.iter().chain(v).map(|c| c.coeffs.clone()).collect();
    if FpMatrix::from_rows(p, g.ambient_dim(), &rows)?.rank() != g.quotient_dim() {
        return Err(Error::SpanningViolated);
    }
    let columns = g.tame_columns();
    if columns.is_empty() {
        return Err(Error::Precondition("H^2 vanishes".into()));
    }
    for a in v {
        for b in v {
            for &col in &columns {
                if local_component(g, a, b, col)? != 0 {
                    return Ok(false);
                }
            }
        }
    }
    let pairs: Vec<(Character, Character)> = u
        .iter()
        .flat_map(|a| v.iter().map(move |b| (a.clone(), b.clone())))
        .collect();
    let rank = cup_matrix(g, &pairs)?.rank();
    let setup = MarkedSetup::marked_any(p, g.s(), g.t(), &[])?;
    let h2 = crate::coh_dims::h_vector(&setup)?.h2;
    Ok(rank == h2)
}
