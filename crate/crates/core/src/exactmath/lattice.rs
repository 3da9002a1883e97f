use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{input, Result};

/// An integer lattice given by a basis in row-style Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
}

impl Lattice {
    /// Lattice spanned by arbitrary integer vectors of length `dim`.
    pub fn span(dim: usize, vectors: &[Vec<BigInt>]) -> Result<Lattice> {
        let (h, _) = hnf_rows(dim, vectors)?;
        Ok(h)
    }

    pub fn zero(dim: usize) -> Lattice {
        Lattice { dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Lattice {
        let basis = (0..dim).map(|i| unit(dim, i)).collect();
        Lattice { dim, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// Absolute value of the Gram determinant root for full-rank lattices.
    pub fn determinant(&self) -> Option<BigInt> {
        if self.basis.len() != self.dim {
            return None;
        }
        Some(
            self.basis
                .iter()
                .enumerate()
                .fold(BigInt::one(), |acc, (i, row)| acc * &row[pivot_col(row).unwrap_or(i)]),
        )
    }

    /// Integer coordinates of `v` in the basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest: Vec<BigInt> = v.to_vec();
        let mut coords = Vec::with_capacity(self.basis.len());
        for row in &self.basis {
            let c = pivot_col(row).expect("basis rows are nonzero");
            let (q, r) = rest[c].div_rem(&row[c]);
            if !r.is_zero() {
                return None;
            }
            for (x, b) in rest.iter_mut().zip(row) {
                *x -= &q * b;
            }
            coords.push(q);
        }
        if rest.iter().all(Zero::is_zero) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[BigInt]) -> bool {
        self.coordinates(v).is_some()
    }

    /// True when every basis vector of `other` lies in `self`.
    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }
}

pub(crate) fn unit(dim: usize, i: usize) -> Vec<BigInt> {
    (0..dim)
        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
        .collect()
}

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|x| !x.is_zero())
}

/// Row-style Hermite normal form.
///
/// Returns the lattice spanned by the input together with a unimodular
/// matrix `U` such that `U · V` stacks the basis rows on top of zero rows.
pub fn hnf(vectors: &[Vec<BigInt>]) -> Result<(Lattice, Vec<Vec<BigInt>>)> {
    let dim = vectors.first().map_or(0, Vec::len);
    hnf_rows(dim, vectors)
}

pub(crate) fn hnf_rows(dim: usize, vectors: &[Vec<BigInt>]) -> Result<(Lattice, Vec<Vec<BigInt>>)> {
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return input(format!(
            "vector of length {} in a family of dimension {dim}",
            v.len()
        ));
    }
    let n = vectors.len();
    let mut m: Vec<Vec<BigInt>> = vectors.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n).map(|i| unit(n, i)).collect();
    let mut row = 0;
    for col in 0..dim {
        if row == n {
            break;
        }
        loop {
            let best = (row..n)
                .filter(|&r| !m[r][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()));
            let Some(best) = best else { break };
            m.swap(row, best);
            u.swap(row, best);
            let mut done = true;
            for r in row + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let q = m[r][col].div_floor(&m[row][col]);
                sub_row(&mut m, r, row, &q);
                sub_row(&mut u, r, row, &q);
                if !m[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m.get(row).is_none_or(|r| r[col].is_zero()) {
            continue;
        }
        if m[row][col].is_negative() {
            negate_row(&mut m[row]);
            negate_row(&mut u[row]);
        }
        for r in 0..row {
            let q = m[r][col].div_floor(&m[row][col]);
            if !q.is_zero() {
                sub_row(&mut m, r, row, &q);
                sub_row(&mut u, r, row, &q);
            }
        }
        row += 1;
    }
    let basis = m.into_iter().take(row).collect();
    Ok((Lattice { dim, basis }, u))
}

fn sub_row(m: &mut [Vec<BigInt>], target: usize, source: usize, q: &BigInt) {
    let src = m[source].clone();
    for (x, s) in m[target].iter_mut().zip(&src) {
        *x -= q * s;
    }
}

fn negate_row(r: &mut [BigInt]) {
    for x in r {
        *x = -x.clone();
    }
}

/// Basis of `{u ∈ Z^n : Σ u_i · rows_i = 0}`.
pub fn left_kernel(dim: usize, rows: &[Vec<BigInt>]) -> Result<Vec<Vec<BigInt>>> {
    let (h, u) = hnf_rows(dim, rows)?;
    Ok(u.into_iter().skip(h.rank()).collect())
}

fn transpose(dim: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    (0..dim)
        .map(|c| rows.iter().map(|r| r[c].clone()).collect())
        .collect()
}

/// Integer points of the rational span: `(Q·L) ∩ Z^K`.
pub fn lattice_saturation(l: &Lattice) -> Lattice {
    let k = l.dim;
    if l.rank() == 0 {
        return Lattice::zero(k);
    }
    // rows y with B·y = 0 describe the orthogonal complement
    let complement = left_kernel(l.rank(), &transpose(k, &l.basis)).expect("consistent dims");
    if complement.is_empty() {
        return Lattice::full(k);
    }
    let sat = left_kernel(complement.len(), &transpose(k, &complement)).expect("consistent dims");
    Lattice::span(k, &sat).expect("consistent dims")
}

/// Greatest common divisor with Bézout coefficients for a list of integers.
pub fn gcd_with_coefficients(xs: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut g = BigInt::zero();
    let mut coeffs: Vec<BigInt> = vec![BigInt::zero(); xs.len()];
    for (i, x) in xs.iter().enumerate() {
        let e = g.extended_gcd(x);
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y;
        g = e.gcd;
    }
    if g.is_negative() {
        g = -g;
        for c in &mut coeffs {
            *c = -c.clone();
        }
    }
    (g, coeffs)
}
