//! Dense exact linear algebra over the prime field 𝔽_p.
//!
//! Pivoting is deterministic (first nonzero row at or below the current pivot
//! row, columns left to right) so that every derived basis is reproducible.

use crate::residue::{check_odd_prime, mul_mod, pow_mod};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[inline]
pub fn inv(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

#[inline]
pub fn neg(a: u64, p: u64) -> u64 {
    (p - a % p) % p
}

pub fn dot(a: &[u64], b: &[u64], p: u64) -> u64 {
    a.iter()
        .zip(b)
        .fold(0, |acc, (&x, &y)| (acc + mul_mod(x, y, p)) % p)
}

/// a + c·b, entrywise.
pub fn axpy(a: &[u64], c: u64, b: &[u64], p: u64) -> Vec<u64> {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x + mul_mod(c, y, p)) % p)
        .collect()
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(Self {
            p,
            rows,
            cols,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(p: u64, n: usize) -> Result<Self> {
        let mut m = Self::zeros(p, n, n)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Builds a matrix from row vectors; entries are reduced mod p.
    /// `cols` is needed to describe matrices with no rows.
    pub fn from_rows(p: u64, cols: usize, rows: &[Vec<u64>]) -> Result<Self> {
        check_odd_prime(p)?;
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch {
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend(r.iter().map(|&x| x % p));
        }
        Ok(Self {
            p,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: u64) {
        assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = value % self.p;
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self {
            p: self.p,
            rows: self.cols,
            cols: self.rows,
            data: vec![0; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.get(i, j);
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[u64]) -> Result<Vec<u64>> {
        if v.len() != self.cols {
            return Err(Error::LengthMismatch {
                expected: self.cols,
                found: v.len(),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v, self.p)).collect())
    }

    /// Reduced row echelon form together with the pivot columns.
    pub fn rref(&self) -> (FpMatrix, Vec<usize>) {
        let p = self.p;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut pivot_row = 0;
        for col in 0..m.cols {
            if pivot_row == m.rows {
                break;
            }
            let Some(found) = (pivot_row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if found != pivot_row {
                for j in 0..m.cols {
                    m.data.swap(found * m.cols + j, pivot_row * m.cols + j);
                }
            }
            let scale = inv(m.get(pivot_row, col), p);
            for j in 0..m.cols {
                let v = mul_mod(m.get(pivot_row, j), scale, p);
                m.set(pivot_row, j, v);
            }
            for r in 0..m.rows {
                let factor = m.get(r, col);
                if r == pivot_row || factor == 0 {
                    continue;
                }
                let c = neg(factor, p);
                for j in 0..m.cols {
                    let v = (m.get(r, j) + mul_mod(c, m.get(pivot_row, j), p)) % p;
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            pivot_row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right null space, one vector per free column in
    /// increasing order; each has a 1 in its free column.
    pub fn kernel_basis(&self) -> Vec<Vec<u64>> {
        let p = self.p;
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = vec![0; self.cols];
                v[free] = 1;
                for (i, &pc) in pivots.iter().enumerate() {
                    v[pc] = neg(r.get(i, free), p);
                }
                v
            })
            .collect()
    }
}

/// Whether `v` lies in the 𝔽_p-span of `gens`.
pub fn in_span(v: &[u64], gens: &[Vec<u64>], p: u64) -> Result<bool> {
    if let Some(g) = gens.iter().find(|g| g.len() != v.len()) {
        return Err(Error::LengthMismatch {
            expected: v.len(),
            found: g.len(),
        });
    }
    let base = FpMatrix::from_rows(p, v.len(), gens)?.rank();
    let mut with_v = gens.to_vec();
    with_v.push(v.to_vec());
    Ok(FpMatrix::from_rows(p, v.len(), &with_v)?.rank() == base)
}

/// Finds a functional φ on 𝔽_p^dim with φ(w) = 0 on `zero` and φ(w) ≠ 0 on
/// `nonzero`.
///
/// Candidates are φ = Σ c_i b_i over the kernel basis b_i of the zero
/// constraints, with coefficient tuples c visited in lexicographic order; the
/// first hit is returned. Returns `None` when no such φ exists.
pub fn solve_functional(
    zero: &[Vec<u64>],
    nonzero: &[Vec<u64>],
    dim: usize,
    p: u64,
) -> Result<Option<Vec<u64>>> {
    let basis = FpMatrix::from_rows(p, dim, zero)?.kernel_basis();
    for w in nonzero {
        if w.len() != dim {
            return Err(Error::LengthMismatch {
                expected: dim,
                found: w.len(),
            });
        }
    }
    // Values of each basis functional on each nonzero constraint.
    let values: Vec<Vec<u64>> = nonzero
        .iter()
        .map(|w| basis.iter().map(|b| dot(b, w, p)).collect())
        .collect();
    if values.iter().any(|vals| vals.iter().all(|&x| x == 0)) {
        return Ok(None);
    }
    let d = basis.len();
    let mut coeffs = vec![0u64; d];
    loop {
        let hit = values.iter().all(|vals| dot(vals, &coeffs, p) != 0);
        if hit {
            let phi = basis
                .iter()
                .zip(&coeffs)
                .fold(vec![0; dim], |acc, (b, &c)| axpy(&acc, c, b, p));
            return Ok(Some(phi));
        }
        // Increment the tuple, last coordinate fastest.
        let mut k = d;
        loop {
            if k == 0 {
                return Ok(None);
            }
            k -= 1;
            coeffs[k] += 1;
            if coeffs[k] < p {
                break;
            }
            coeffs[k] = 0;
        }
    }
}
