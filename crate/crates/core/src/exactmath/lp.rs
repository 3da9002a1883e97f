use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::quad::denominator_lcm;
use super::Rat;
use crate::error::{input, Result};

/// Feasibility of `Σ n_i v_i = 0` with `n_i ≥ 1` where `lower[i]` holds and
/// `n_i ≥ 0` elsewhere. Returns a rational basic feasible point.
pub fn zero_combo_with_bounds(vectors: &[Vec<BigInt>], lower: &[bool]) -> Result<Option<Vec<Rat>>> {
    if vectors.is_empty() {
        return input("empty vector family");
    }
    if lower.len() != vectors.len() {
        return input("bound mask length differs from the family size");
    }
    let d = vectors[0].len();
    if vectors.iter().any(|v| v.len() != d) {
        return input("vectors of different dimensions");
    }
    let k = vectors.len();
    // substitute n = l + x with x ≥ 0, giving A x = b
    let mut b: Vec<Rat> = vec![Rat::zero(); d];
    for (v, &l) in vectors.iter().zip(lower) {
        if l {
            for (bi, vi) in b.iter_mut().zip(v) {
                *bi -= Rat::from_integer(vi.clone());
            }
        }
    }
    let x = match phase_one(vectors, &b) {
        Some(x) => x,
        None => return Ok(None),
    };
    Ok(Some(
        (0..k)
            .map(|i| if lower[i] { &x[i] + Rat::one() } else { x[i].clone() })
            .collect(),
    ))
}

/// Phase-one simplex with Bland's rule for `A x = b, x ≥ 0`, where column `j`
/// of `A` is `cols[j]`.
fn phase_one(cols: &[Vec<BigInt>], b: &[Rat]) -> Option<Vec<Rat>> {
    let d = b.len();
    let k = cols.len();
    let width = k + d + 1;
    let mut t: Vec<Vec<Rat>> = (0..d)
        .map(|r| {
            let flip = b[r].is_negative();
            let mut row: Vec<Rat> = Vec::with_capacity(width);
            for c in cols {
                let v = Rat::from_integer(c[r].clone());
                row.push(if flip { -v } else { v });
            }
            for a in 0..d {
                row.push(if a == r { Rat::one() } else { Rat::zero() });
            }
            row.push(if flip { -b[r].clone() } else { b[r].clone() });
            row
        })
        .collect();
    let mut basis: Vec<usize> = (k..k + d).collect();
    // reduced costs of the phase-one objective (sum of artificials)
    let mut cost: Vec<Rat> = vec![Rat::zero(); width];
    for j in 0..k {
        cost[j] = -t.iter().map(|row| row[j].clone()).sum::<Rat>();
    }
    cost[width - 1] = -t.iter().map(|row| row[width - 1].clone()).sum::<Rat>();
    loop {
        let entering = (0..k + d).find(|&j| cost[j].is_negative());
        let Some(e) = entering else { break };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..d {
            if t[r][e].is_positive() {
                let ratio = &t[r][width - 1] / &t[r][e];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && basis[r] < basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
        }
        let Some((r, _)) = leave else {
            // phase-one objective is bounded below by zero
            unreachable!("unbounded phase-one problem")
        };
        pivot(&mut t, &mut cost, r, e);
        basis[r] = e;
    }
    if !cost[width - 1].is_zero() {
        return None;
    }
    let mut x = vec![Rat::zero(); k];
    for (r, &j) in basis.iter().enumerate() {
        if j < k {
            x[j] = t[r][width - 1].clone();
        }
    }
    Some(x)
}

fn pivot(t: &mut [Vec<Rat>], cost: &mut [Rat], r: usize, e: usize) {
    let p = t[r][e].clone();
    for x in t[r].iter_mut() {
        *x /= &p;
    }
    let prow = t[r].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == r || row[e].is_zero() {
            continue;
        }
        let f = row[e].clone();
        for (x, pr) in row.iter_mut().zip(&prow) {
            *x -= &f * pr;
        }
    }
    let f = cost[e].clone();
    if !f.is_zero() {
        for (x, pr) in cost.iter_mut().zip(&prow) {
            *x -= &f * pr;
        }
    }
}

/// Clears denominators and divides out the common content.
pub fn to_primitive_integers(xs: &[Rat]) -> Vec<BigInt> {
    let l = denominator_lcm(xs);
    let ints: Vec<BigInt> = xs.iter().map(|x| (x * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() || g.is_one() {
        ints
    } else {
        ints.into_iter().map(|x| x / &g).collect()
    }
}

/// Strictly positive integers `n` with `Σ n_i v_i = 0`, if any exist.
pub fn strictly_positive_zero_combo(vectors: &[Vec<BigInt>]) -> Result<Option<Vec<BigInt>>> {
    let lower = vec![true; vectors.len()];
    Ok(zero_combo_with_bounds(vectors, &lower)?.map(|x| to_primitive_integers(&x)))
}

/// Nonnegative integer relation `Σ n_i v_i = 0` whose support is as large as
/// possible. The support is exactly the set of vectors lying in the lineality
/// space of the cone they generate. Returns `None` when that set is empty.
pub fn max_support_zero_combo(vectors: &[Vec<BigInt>]) -> Result<Option<Vec<BigInt>>> {
    let k = vectors.len();
    let mut total: Vec<Rat> = vec![Rat::zero(); k];
    let mut covered = vec![false; k];
    let mut excluded = vec![false; k];
    for i in 0..k {
        if covered[i] || excluded[i] {
            continue;
        }
        let mut lower = vec![false; k];
        lower[i] = true;
        match zero_combo_with_bounds(vectors, &lower)? {
            Some(x) => {
                for (j, xj) in x.iter().enumerate() {
                    if xj.is_positive() {
                        covered[j] = true;
                    }
                    total[j] += xj;
                }
            }
            None => excluded[i] = true,
        }
    }
    if covered.iter().all(|c| !c) {
        return Ok(None);
    }
    Ok(Some(to_primitive_integers(&total)))
}
