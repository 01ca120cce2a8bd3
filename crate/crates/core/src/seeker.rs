//! The constructive pipeline: an auxiliary ramification set S₀, a sequence of
//! primes q₁..q_m chosen by the splitting conditions (B_a), characters
//! χ_a, ψ_a, η_a, and the cup matrix
//!
//! ```text
//!              p_1 .. p_m      q_1 .. q_m
//!   χ_a ∪ η_a  diag ≠ 0        0
//!   ψ_a ∪ η_a  *               diag ≠ 0
//! ```
//!
//! whose rank 2m certifies that U ⊗ V → H² is onto, with V = span(η).
//!
//! The auxiliary stage works on the curve with ramification S₀ and marked set
//! T' = S_min ∪ T, so that the search primes split at the input places. The
//! final level is (S_min ∪ S₀ ∪ Q, T).

use std::collections::{BTreeMap, BTreeSet};

use crate::classfield::{frobenius_vector, min_set, ramifies, Character, GenusGroup};
use crate::coh_dims::h_vector;
use crate::cup::{cup_matrix_on, mild_verify, CupMatrix};
use crate::document::{seal, Certificate, Failure, Verdict, Witness, SCHEMA, TOOL_VERSION};
use crate::fp_linalg::{solve_functional, FpMatrix};
use crate::kummer::{local_index, s_element, v_space, vskill_search, MarkedSetup};
use crate::residue::{index, is_prime, prime_stream};
use crate::{Error, Result, Stage};

/// Class number one: no extra marked primes are needed.
pub fn find_t0(_t: &[u64], _p: u64) -> Vec<u64> {
    Vec::new()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuxiliarySet {
    pub kill_sets: Vec<Vec<u64>>,
    /// Kill-set primes in increasing order, then enlargement primes.
    pub s0: Vec<u64>,
    pub enlarged: bool,
}

/// Two disjoint sets killing V^T, merged, then grown by the next primes
/// ≡ 1 mod p until m ≥ #T + 2. Adding primes keeps V_{S₀∖{𝔭}}^T = 0 for
/// every 𝔭 since one of the two kill sets survives the removal.
pub fn build_s0(t: &[u64], avoid: &[u64], p: u64, bound: u64) -> Result<AuxiliarySet> {
    if bound == 0 {
        return Err(Error::Precondition("bound must be positive".into()));
    }
    let kill_sets = vskill_search(t, avoid, p, bound, 2)?;
    let mut s0: Vec<u64> = kill_sets.iter().flatten().copied().collect();
    s0.sort_unstable();
    let target = t.len() + 2;
    let enlarged = s0.len() < target;
    if enlarged {
        let excluded: BTreeSet<u64> = t.iter().chain(avoid).chain(&s0).copied().collect();
        let mut stream = prime_stream(p, true, &excluded);
        while s0.len() < target {
            match stream.next() {
                Some(ell) if ell <= bound => s0.push(ell),
                _ => {
                    return Err(Error::SearchExhausted {
                        stage: Stage::AuxiliarySet,
                        index: Some(s0.len()),
                        bound,
                    })
                }
            }
        }
    }
    Ok(AuxiliarySet {
        kill_sets,
        s0,
        enlarged,
    })
}

/// The data over which condition (B_a) quantifies.
#[derive(Debug, Clone)]
pub struct BaContext {
    pub p: u64,
    pub t: Vec<u64>,
    pub s0: Vec<u64>,
    pub s_elements: Vec<u64>,
    pub genus: GenusGroup,
    /// 1-based target index.
    pub a: usize,
    pub previous: Vec<u64>,
    /// Primes that may never be chosen (input S, avoid list).
    pub excluded: BTreeSet<u64>,
}

impl BaContext {
    pub fn new(p: u64, t: &[u64], s0: &[u64], excluded: &BTreeSet<u64>) -> Result<Self> {
        let s_elements = s0.iter().map(|&x| s_element(x, t)).collect::<Result<_>>()?;
        Ok(Self {
            p,
            t: t.to_vec(),
            s0: s0.to_vec(),
            s_elements,
            genus: GenusGroup::build(p, s0, t)?,
            a: 1,
            previous: Vec::new(),
            excluded: excluded.clone(),
        })
    }

    fn blocked(&self, q: u64) -> bool {
        self.excluded.contains(&q)
            || self.t.contains(&q)
            || self.s0.contains(&q)
            || self.previous.contains(&q)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaOutcome {
    pub holds: bool,
    /// Indices computed while testing, in evaluation order. Complete only
    /// when `holds`.
    pub witnesses: Vec<Witness>,
}

/// Condition (B_a) for a candidate q ≡ 1 mod p, evaluated cheapest first and
/// stopping at the first failing clause.
pub fn check_ba(q: u64, ctx: &BaContext) -> Result<BaOutcome> {
    let p = ctx.p;
    if ctx.a == 0 || ctx.a > ctx.s0.len() {
        return Err(Error::Precondition(format!("target index {} out of range", ctx.a)));
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q));
    }
    if q % p != 1 {
        return Err(Error::NotOneModP { ell: q, p });
    }
    let mut witnesses = Vec::new();
    let mut record = |a: u64, ell: u64| -> Result<u64> {
        let i = index(a, ell, p)?.value();
        witnesses.push(Witness { a, ell, index: i });
        Ok(i)
    };
    let fail = |witnesses| Ok(BaOutcome { holds: false, witnesses });
    if ctx.blocked(q) {
        return fail(Vec::new());
    }
    for &x in &ctx.t {
        if record(x, q)? != 0 {
            return fail(witnesses);
        }
    }
    for (b, &s) in ctx.s_elements.iter().enumerate() {
        let is_power = record(s, q)? == 0;
        if is_power == (b + 1 == ctx.a) {
            return fail(witnesses);
        }
    }
    for &qb in &ctx.previous {
        if record(q, qb)? != 0 || record(qb, q)? != 0 {
            return fail(witnesses);
        }
    }
    let mut frob = Vec::with_capacity(ctx.s0.len());
    for &col in ctx.genus.columns() {
        frob.push(record(q, col)?);
    }
    let inertia = ctx.genus.unit_vector(ctx.s0[ctx.a - 1])?;
    let holds = !ctx.genus.in_relation_span(&frob, &[inertia])?;
    Ok(BaOutcome { holds, witnesses })
}

/// Smallest qualifying prime for a = 1..m in turn, each a prime ≡ 1 mod p.
pub fn find_q_sequence(template: &BaContext, bound: u64) -> Result<(Vec<u64>, Vec<Witness>)> {
    let mut ctx = template.clone();
    ctx.previous.clear();
    let mut witnesses = Vec::new();
    for a in 1..=ctx.s0.len() {
        ctx.a = a;
        let mut stream = prime_stream(ctx.p, true, &BTreeSet::new());
        let q = loop {
            match stream.next() {
                Some(q) if q <= bound => {
                    let outcome = check_ba(q, &ctx)?;
                    if outcome.holds {
                        witnesses.extend(outcome.witnesses);
                        break q;
                    }
                }
                _ => {
                    return Err(Error::SearchExhausted {
                        stage: Stage::QSequence,
                        index: Some(a),
                        bound,
                    })
                }
            }
        };
        ctx.previous.push(q);
    }
    Ok((ctx.previous, witnesses))
}

/// Characters selected from the auxiliary data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Selection {
    pub chi: Vec<Character>,
    pub psi: Vec<Character>,
    pub eta: Vec<Character>,
}

fn extend_by_zero(aux: &GenusGroup, coeffs: &[u64], from: &[u64]) -> Result<Character> {
    let mut full = vec![0; aux.ambient_dim()];
    for (&c, &x) in from.iter().zip(coeffs) {
        full[aux.column_index(c)?] = x;
    }
    aux.character(full)
}

/// χ_a ramified at p_a and killing Frob_{q_a}; ψ_a with ψ_a(Frob_{q_a}) ≠ 0;
/// both unramified outside S₀. η_a is the character ramified only at q_a.
/// `small` is the genus group of (S₀, T'), `aux` that of (S₀ ∪ Q, T').
pub fn choose_chi_psi(small: &GenusGroup, aux: &GenusGroup, s0: &[u64], q_list: &[u64]) -> Result<Selection> {
    if s0.len() != q_list.len() {
        return Err(Error::LengthMismatch {
            expected: s0.len(),
            found: q_list.len(),
        });
    }
    let p = small.p();
    let relations = small.relations().to_rows();
    let dim = small.ambient_dim();
    let mut out = Selection {
        chi: Vec::new(),
        psi: Vec::new(),
        eta: Vec::new(),
    };
    for (&pa, &qa) in s0.iter().zip(q_list) {
        let frob = frobenius_vector(small, qa)?;
        let mut zero = relations.clone();
        zero.push(frob.clone());
        let chi = solve_functional(&zero, &[small.unit_vector(pa)?], dim, p)?
            .ok_or_else(|| Error::Internal(format!("Frob_{qa} lies in the inertia span of {pa}")))?;
        let psi = solve_functional(&relations, &[frob], dim, p)?
            .ok_or_else(|| Error::Internal(format!("Frob_{qa} is trivial in the genus group")))?;
        out.chi.push(extend_by_zero(aux, &chi, small.columns())?);
        out.psi.push(extend_by_zero(aux, &psi, small.columns())?);
        out.eta.push(aux.character(aux.unit_vector(qa)?)?);
    }
    Ok(out)
}

/// Labels and pairs in the order χ₁∪η₁..χ_m∪η_m, ψ₁∪η₁..ψ_m∪η_m.
pub fn shaped_pairs(sel: &Selection) -> (Vec<String>, Vec<(Character, Character)>) {
    let m = sel.eta.len();
    let mut labels = Vec::with_capacity(2 * m);
    let mut pairs = Vec::with_capacity(2 * m);
    for (name, family) in [("chi", &sel.chi), ("psi", &sel.psi)] {
        for (a, (c, e)) in family.iter().zip(&sel.eta).enumerate() {
            labels.push(format!("{name}_{} cup eta_{}", a + 1, a + 1));
            pairs.push((c.clone(), e.clone()));
        }
    }
    (labels, pairs)
}

/// Entrywise zero pattern of the shaped 2m × 2m matrix.
pub fn has_expected_shape(m: &FpMatrix, half: usize) -> bool {
    if m.rows() != 2 * half || m.cols() != 2 * half {
        return false;
    }
    (0..2 * half).all(|i| {
        (0..2 * half).all(|j| {
            let x = m.get(i, j);
            match (i < half, j < half) {
                (true, true) | (false, false) => (x != 0) == (i % half == j % half),
                (true, false) => x == 0,
                (false, true) => true,
            }
        })
    })
}

fn sorted_union(parts: &[&[u64]]) -> Vec<u64> {
    parts
        .iter()
        .flat_map(|x| x.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

fn skeleton(setup: &MarkedSetup, bound: u64) -> Certificate {
    let p = setup.p();
    let s_min = min_set(setup.s(), p);
    let marked = sorted_union(&[&s_min, setup.t()]);
    Certificate {
        schema: SCHEMA.into(),
        tool_version: TOOL_VERSION.into(),
        p,
        s: setup.s().to_vec(),
        t: setup.t().to_vec(),
        avoid: setup.avoid().to_vec(),
        search_bound: bound,
        s_min,
        marked,
        t0: find_t0(setup.t(), p),
        kill_sets: Vec::new(),
        s0: Vec::new(),
        s0_enlarged: false,
        q_list: Vec::new(),
        s_elements: BTreeMap::new(),
        residue_witnesses: Vec::new(),
        aux_columns: Vec::new(),
        chi: Vec::new(),
        psi: Vec::new(),
        eta: Vec::new(),
        u_basis: Vec::new(),
        cup_row_labels: Vec::new(),
        cup_columns: Vec::new(),
        cup_entries: Vec::new(),
        rank: 0,
        pattern_ok: false,
        mild: false,
        aux_h_vector: None,
        final_s: Vec::new(),
        final_h_vector: None,
        final_kummer_dim: 0,
        ramified: Vec::new(),
        final_cup_rank: 0,
        verdict: Verdict::Fail,
        failure: None,
        digest: String::new(),
    }
}

fn coeff_rows(chars: &[Character]) -> Vec<Vec<u64>> {
    chars.iter().map(|c| c.coeffs.clone()).collect()
}

/// Runs the whole pipeline. Search exhaustion is reported inside the
/// certificate (verdict fail with the failing stage); other errors propagate.
pub fn certify(setup: &MarkedSetup, bound: u64) -> Result<Certificate> {
    let mut cert = skeleton(setup, bound);
    match fill(setup, bound, &mut cert) {
        Ok(()) => {}
        Err(Error::SearchExhausted { stage, index, bound }) => {
            cert.failure = Some(Failure { stage, index, bound });
            cert.verdict = Verdict::Fail;
        }
        Err(e) => return Err(e),
    }
    Ok(seal(cert))
}

fn fill(setup: &MarkedSetup, bound: u64, cert: &mut Certificate) -> Result<()> {
    let p = setup.p();
    let marked = cert.marked.clone();
    let excluded: BTreeSet<u64> = sorted_union(&[setup.s(), setup.t(), setup.avoid()]).into_iter().collect();
    let avoid: Vec<u64> = excluded.iter().copied().filter(|x| !marked.contains(x)).collect();

    let aux_set = build_s0(&marked, &avoid, p, bound)?;
    cert.kill_sets = aux_set.kill_sets.clone();
    cert.s0 = aux_set.s0.clone();
    cert.s0_enlarged = aux_set.enlarged;
    let s0 = aux_set.s0;

    let template = BaContext::new(p, &marked, &s0, &excluded)?;
    cert.s_elements = s0
        .iter()
        .zip(&template.s_elements)
        .map(|(x, &e)| (x.to_string(), e))
        .collect();
    let (q_list, witnesses) = find_q_sequence(&template, bound)?;
    cert.q_list = q_list.clone();
    cert.residue_witnesses = witnesses;

    let aux_cols = sorted_union(&[&s0, &q_list]);
    let small = template.genus;
    let aux = GenusGroup::build(p, &aux_cols, &marked)?;
    let sel = choose_chi_psi(&small, &aux, &s0, &q_list)?;
    let u = small
        .character_basis()
        .iter()
        .map(|c| extend_by_zero(&aux, &c.coeffs, small.columns()))
        .collect::<Result<Vec<_>>>()?;
    let (labels, pairs) = shaped_pairs(&sel);
    let column_order: Vec<u64> = s0.iter().chain(&q_list).copied().collect();
    let cup = cup_matrix_on(&aux, &pairs, labels, &column_order)?;
    let aux_setup = MarkedSetup::marked_any(p, &aux_cols, &marked, &[])?;
    let aux_h = h_vector(&aux_setup)?;
    cert.aux_columns = aux_cols;
    cert.chi = coeff_rows(&sel.chi);
    cert.psi = coeff_rows(&sel.psi);
    cert.eta = coeff_rows(&sel.eta);
    cert.u_basis = coeff_rows(&u);
    cert.rank = cup.rank();
    cert.pattern_ok = has_expected_shape(&cup.matrix, s0.len());
    cert.mild = mild_verify(&u, &sel.eta, &aux)?;
    cert.cup_row_labels = cup.row_labels;
    cert.cup_columns = cup.columns;
    cert.cup_entries = cup.matrix.to_rows();

    let final_s = sorted_union(&[&cert.s_min, &s0, &q_list]);
    let final_setup = MarkedSetup::marked_any(p, &final_s, setup.t(), &[])?;
    let final_g = GenusGroup::build(p, &final_s, setup.t())?;
    cert.final_kummer_dim = v_space(&final_setup)?.dim();
    let mut ramified = Vec::new();
    for &x in s0.iter().chain(&q_list) {
        if ramifies(&final_g, x)? {
            ramified.push(x);
        }
    }
    ramified.sort_unstable();
    cert.ramified = ramified;
    cert.final_cup_rank = full_cup_rank(&final_g)?;
    cert.final_h_vector = Some(h_vector(&final_setup)?);
    cert.final_s = final_s;

    let m = s0.len();
    let pass = cert.final_kummer_dim == 0
        && cert.ramified.len() == 2 * m
        && cert.pattern_ok
        && cert.rank == 2 * m
        && aux_h.h2 == 2 * m
        && cert.cup_columns.len() == 2 * m
        && cert.mild;
    cert.aux_h_vector = Some(aux_h);
    cert.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
    Ok(())
}

/// Rank of the cup product over all pairs of basis characters.
pub fn full_cup_rank(g: &GenusGroup) -> Result<usize> {
    let basis = g.character_basis();
    let mut pairs = Vec::new();
    for (i, a) in basis.iter().enumerate() {
        for b in &basis[i + 1..] {
            pairs.push((a.clone(), b.clone()));
        }
    }
    let labels = (0..pairs.len()).map(|i| i.to_string()).collect();
    let m: CupMatrix = cup_matrix_on(g, &pairs, labels, &g.tame_columns())?;
    Ok(m.rank())
}

/// Independent re-check of a certificate. `Ok(false)` for any inconsistency,
/// `Err` only when the record cannot be interpreted at all.
pub fn verify(cert: &Certificate) -> Result<bool> {
    if cert.schema != SCHEMA || cert.tool_version != TOOL_VERSION {
        return Ok(false);
    }
    if cert.digest != crate::document::compute_digest(cert) {
        return Ok(false);
    }
    let setup = match MarkedSetup::new(cert.p, &cert.s, &cert.t, &cert.avoid) {
        Ok(s) => s,
        Err(_) => return Ok(false),
    };
    if setup.s() != cert.s || setup.t() != cert.t || setup.avoid() != cert.avoid {
        return Ok(false);
    }
    match cert.verdict {
        // A failed search carries no witnesses beyond the replay itself.
        Verdict::Fail => Ok(certify(&setup, cert.search_bound).map(|c| &c == cert).unwrap_or(false)),
        Verdict::Pass => Ok(check_pass(&setup, cert).unwrap_or(false)),
    }
}

fn check_pass(setup: &MarkedSetup, cert: &Certificate) -> Result<bool> {
    let p = cert.p;
    let m = cert.s0.len();
    let fresh = skeleton(setup, cert.search_bound);
    if cert.s_min != fresh.s_min || cert.marked != fresh.marked || !cert.t0.is_empty() {
        return Ok(false);
    }
    if cert.failure.is_some() || cert.q_list.len() != m || m < cert.marked.len() + 2 {
        return Ok(false);
    }
    let excluded: BTreeSet<u64> = sorted_union(&[&cert.s, &cert.t, &cert.avoid]).into_iter().collect();
    let all: Vec<u64> = cert.s0.iter().chain(&cert.q_list).copied().collect();
    let distinct: BTreeSet<u64> = all.iter().copied().collect();
    if distinct.len() != 2 * m
        || all.iter().any(|&x| !is_prime(x) || x % p != 1 || excluded.contains(&x) || cert.marked.contains(&x))
    {
        return Ok(false);
    }

    // Witnesses recompute exactly.
    for w in &cert.residue_witnesses {
        if index(w.a, w.ell, p)?.value() != w.index {
            return Ok(false);
        }
    }

    // Kill sets: disjoint, inside S₀, each killing V^{T'}.
    let mut seen = BTreeSet::new();
    for set in &cert.kill_sets {
        for &x in set {
            if !seen.insert(x) || !cert.s0.contains(&x) {
                return Ok(false);
            }
        }
        let kill = MarkedSetup::marked_any(p, set, &cert.marked, &[])?;
        if v_space(&kill)?.dim() != 0 {
            return Ok(false);
        }
    }
    if cert.kill_sets.len() != 2 || cert.s0_enlarged != (seen.len() < m) {
        return Ok(false);
    }

    // Replay the smallest-prime policy and every (B_a) clause.
    let avoid: Vec<u64> = excluded.iter().copied().filter(|x| !cert.marked.contains(x)).collect();
    let replay = build_s0(&cert.marked, &avoid, p, cert.search_bound)?;
    if replay.s0 != cert.s0 || replay.kill_sets != cert.kill_sets {
        return Ok(false);
    }
    let mut ctx = BaContext::new(p, &cert.marked, &cert.s0, &excluded)?;
    let expected_elements: BTreeMap<String, u64> =
        cert.s0.iter().zip(&ctx.s_elements).map(|(x, &e)| (x.to_string(), e)).collect();
    if expected_elements != cert.s_elements {
        return Ok(false);
    }
    let mut expected_witnesses = Vec::new();
    for (a, &q) in cert.q_list.iter().enumerate() {
        ctx.a = a + 1;
        let outcome = check_ba(q, &ctx)?;
        if !outcome.holds {
            return Ok(false);
        }
        expected_witnesses.extend(outcome.witnesses);
        ctx.previous.push(q);
    }
    if expected_witnesses != cert.residue_witnesses {
        return Ok(false);
    }
    let (q_replay, _) = find_q_sequence(&ctx, cert.search_bound)?;
    if q_replay != cert.q_list {
        return Ok(false);
    }

    // Characters.
    let aux_cols = sorted_union(&[&cert.s0, &cert.q_list]);
    if aux_cols != cert.aux_columns {
        return Ok(false);
    }
    let aux = GenusGroup::build(p, &aux_cols, &cert.marked)?;
    let wrap = |rows: &[Vec<u64>]| -> Option<Vec<Character>> {
        rows.iter()
            .map(|r| r.iter().all(|&x| x < p).then(|| aux.character(r.clone()).ok()).flatten())
            .collect()
    };
    let (Some(chi), Some(psi), Some(eta), Some(u)) =
        (wrap(&cert.chi), wrap(&cert.psi), wrap(&cert.eta), wrap(&cert.u_basis))
    else {
        return Ok(false);
    };
    if chi.len() != m || psi.len() != m || eta.len() != m {
        return Ok(false);
    }
    let small = &ctx.genus;
    for a in 0..m {
        let (pa, qa) = (cert.s0[a], cert.q_list[a]);
        let frob: Vec<u64> = aux
            .columns()
            .iter()
            .map(|&c| if cert.q_list.contains(&c) { Ok(0) } else { local_index(qa, c, p) })
            .collect::<Result<_>>()?;
        let outside_s0 = |c: &Character| cert.q_list.iter().all(|&q| c.at(q) == Ok(0));
        let ok = chi[a].at(pa)? != 0
            && outside_s0(&chi[a])
            && chi[a].eval(&frob) == 0
            && outside_s0(&psi[a])
            && psi[a].eval(&frob) != 0
            && eta[a].coeffs == aux.unit_vector(qa)?;
        if !ok {
            return Ok(false);
        }
    }
    if u.len() != small.quotient_dim() || !u.iter().all(|c| cert.q_list.iter().all(|&q| c.at(q) == Ok(0))) {
        return Ok(false);
    }
    let u_rows = FpMatrix::from_rows(p, aux.ambient_dim(), &cert.u_basis)?;
    if u_rows.rank() != u.len() {
        return Ok(false);
    }

    // Cup matrix, shape, rank, mildness.
    let sel = Selection { chi, psi, eta };
    let (labels, pairs) = shaped_pairs(&sel);
    let column_order: Vec<u64> = cert.s0.iter().chain(&cert.q_list).copied().collect();
    let cup = cup_matrix_on(&aux, &pairs, labels, &column_order)?;
    let aux_h = h_vector(&MarkedSetup::marked_any(p, &aux_cols, &cert.marked, &[])?)?;
    let rank = cup.rank();
    if cup.row_labels != cert.cup_row_labels
        || cup.columns != cert.cup_columns
        || cup.matrix.to_rows() != cert.cup_entries
        || rank != cert.rank
        || rank != 2 * m
        || aux_h.h2 != 2 * m
        || cert.aux_h_vector.as_ref() != Some(&aux_h)
        || !cert.pattern_ok
        || !has_expected_shape(&cup.matrix, m)
    {
        return Ok(false);
    }
    if !cert.mild || !mild_verify(&u, &sel.eta, &aux)? {
        return Ok(false);
    }

    // Final level.
    let final_s = sorted_union(&[&cert.s_min, &cert.s0, &cert.q_list]);
    let final_setup = MarkedSetup::marked_any(p, &final_s, &cert.t, &[])?;
    let final_g = GenusGroup::build(p, &final_s, &cert.t)?;
    let mut ramified: Vec<u64> = Vec::new();
    for &x in &all {
        if ramifies(&final_g, x)? {
            ramified.push(x);
        }
    }
    ramified.sort_unstable();
    let consistent = final_s == cert.final_s
        && v_space(&final_setup)?.dim() == 0
        && cert.final_kummer_dim == 0
        && ramified.len() == 2 * m
        && ramified == cert.ramified
        && cert.final_h_vector.as_ref() == Some(&h_vector(&final_setup)?)
        && full_cup_rank(&final_g)? == cert.final_cup_rank;
    Ok(consistent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t0_is_empty() {
        assert!(find_t0(&[2], 3).is_empty());
        assert!(find_t0(&[], 5).is_empty());
    }

    #[test]
    fn aux_sets() {
        let a = build_s0(&[2], &[3], 3, 1000).unwrap();
        assert_eq!(a.kill_sets, vec![vec![7], vec![13]]);
        assert_eq!(a.s0, vec![7, 13, 19]);
        assert!(a.enlarged);
        assert_eq!(build_s0(&[], &[3], 3, 1000).unwrap().s0, vec![7, 13]);
        assert_eq!(build_s0(&[], &[5], 5, 1000).unwrap().s0, vec![11, 31]);
        assert!(matches!(
            build_s0(&[2], &[3], 3, 10),
            Err(Error::SearchExhausted { stage: Stage::KillSet, .. })
        ));
    }

    #[test]
    fn ba_rejects_blocked() {
        let mut excluded = BTreeSet::new();
        excluded.insert(163);
        let ctx = BaContext::new(3, &[], &[7, 13], &excluded).unwrap();
        assert!(!check_ba(163, &ctx).unwrap().holds);
        assert!(check_ba(11, &ctx).is_err());
    }

    #[test]
    fn q_sequences() {
        let ctx = BaContext::new(3, &[], &[7, 13], &BTreeSet::new()).unwrap();
        assert_eq!(find_q_sequence(&ctx, 10_000).unwrap().0, vec![163, 313]);
        let ctx = BaContext::new(5, &[], &[11, 31], &BTreeSet::new()).unwrap();
        assert_eq!(find_q_sequence(&ctx, 10_000).unwrap().0, vec![331, 751]);
        assert!(matches!(
            find_q_sequence(&ctx, 400),
            Err(Error::SearchExhausted { stage: Stage::QSequence, index: Some(2), .. })
        ));
    }

    #[test]
    fn shape_predicate() {
        let ok = FpMatrix::from_rows(3, 2, &[vec![1, 0], vec![2, 2]]).unwrap();
        assert!(has_expected_shape(&ok, 1));
        let bad = FpMatrix::from_rows(3, 2, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert!(!has_expected_shape(&bad, 1));
    }

    #[test]
    fn manufactured_bad_q_is_internal_error() {
        // 13 ≡ −1 is a cube mod 7, so Frob_13 is trivial on the single column.
        let small = GenusGroup::build(3, &[7], &[]).unwrap();
        let aux = GenusGroup::build(3, &[7, 13], &[]).unwrap();
        let err = choose_chi_psi(&small, &aux, &[7], &[13]).unwrap_err();
        assert!(matches!(err, Error::Internal(_)));
    }
}
