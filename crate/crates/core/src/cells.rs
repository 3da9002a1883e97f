//! The positive-scale case: eigen-coordinates over Q(√D), the vectors `d_ij`
//! and `e_k`, radicals, sign cells, lineality and certificates.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{classify, eigen_basis, sa_mul, sa_pow, ElementClass, QMat2, QVec2, SA2Element, SL2, Vec2};
use crate::caps::Caps;
use crate::error::{input, Error, Result};
use crate::exactmath::{max_support_zero_combo, QuadNum};
use crate::witness::{evaluate_word, verify_identity_certificate, PowerWord};

/// Sign pair `(σx, σy)` with entries in `{−1, 0, 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i8,
    pub y: i8,
}

impl Cell {
    pub const ORIGIN: Cell = Cell { x: 0, y: 0 };

    pub fn new(x: i8, y: i8) -> Cell {
        Cell { x: x.signum(), y: y.signum() }
    }

    pub fn of(v: &QVec2) -> Cell {
        Cell::new(v[0].signum(), v[1].signum())
    }

    pub fn all() -> impl Iterator<Item = Cell> {
        (-1..=1).flat_map(|x| (-1..=1).map(move |y| Cell { x, y }))
    }

    pub fn neg(self) -> Cell {
        Cell { x: -self.x, y: -self.y }
    }

    pub fn dim(self) -> usize {
        usize::from(self.x != 0) + usize::from(self.y != 0)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |v: i8| match v {
            1 => '+',
            -1 => '-',
            _ => '0',
        };
        write!(f, "R{}{}", s(self.x), s(self.y))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// Largest linear subspace of a cone generated by cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Lineality {
    Zero,
    Line(Axis),
    Plane,
}

impl Lineality {
    pub fn contains_cell(self, c: Cell) -> bool {
        match (self, c.dim()) {
            (_, 0) => true,
            (Lineality::Plane, _) => true,
            (Lineality::Line(Axis::X), 1) => c.y == 0,
            (Lineality::Line(Axis::Y), 1) => c.x == 0,
            _ => false,
        }
    }

    /// A nonzero spanning vector of a line.
    pub fn direction(self, d: &BigInt) -> Option<QVec2> {
        match self {
            Lineality::Line(Axis::X) => Some([QuadNum::one(d), QuadNum::zero(d)]),
            Lineality::Line(Axis::Y) => Some([QuadNum::zero(d), QuadNum::one(d)]),
            _ => None,
        }
    }
}

fn sign_sum(a: i8, b: i8) -> Vec<i8> {
    match (a, b) {
        (0, s) | (s, 0) => vec![s],
        (s, t) if s == t => vec![s],
        _ => vec![-1, 0, 1],
    }
}

/// Cells contained in the cone generated by `cells`. Cells are stable under
/// positive diagonal scaling, so the cone is a union of cells.
pub fn cone_cells(cells: &BTreeSet<Cell>) -> BTreeSet<Cell> {
    let mut c: BTreeSet<Cell> = cells.clone();
    c.insert(Cell::ORIGIN);
    loop {
        let mut added = Vec::new();
        for a in &c {
            for b in &c {
                for x in sign_sum(a.x, b.x) {
                    for y in sign_sum(a.y, b.y) {
                        let s = Cell { x, y };
                        if !c.contains(&s) {
                            added.push(s);
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            return c;
        }
        c.extend(added);
    }
}

pub fn cone_lineality(cells: &BTreeSet<Cell>) -> Lineality {
    let c = cone_cells(cells);
    let lin: Vec<Cell> = c.iter().copied().filter(|x| c.contains(&x.neg())).collect();
    if lin.len() == 9 {
        Lineality::Plane
    } else if lin.contains(&Cell::new(1, 0)) {
        Lineality::Line(Axis::X)
    } else if lin.contains(&Cell::new(0, 1)) {
        Lineality::Line(Axis::Y)
    } else {
        Lineality::Zero
    }
}

/// Affine map with diagonal matrix part, in eigen-coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagAffine {
    pub diag: [QuadNum; 2],
    pub translation: QVec2,
}

impl DiagAffine {
    pub fn mul(&self, other: &DiagAffine) -> DiagAffine {
        DiagAffine {
            diag: [&self.diag[0] * &other.diag[0], &self.diag[1] * &other.diag[1]],
            translation: [
                &self.translation[0] + &(&self.diag[0] * &other.translation[0]),
                &self.translation[1] + &(&self.diag[1] * &other.translation[1]),
            ],
        }
    }

    pub fn pow(&self, k: u64) -> DiagAffine {
        let d = self.diag[0].d();
        let mut acc = DiagAffine {
            diag: [QuadNum::one(d), QuadNum::one(d)],
            translation: [QuadNum::zero(d), QuadNum::zero(d)],
        };
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        let d = self.diag[0].d();
        self.diag.iter().all(|x| *x == QuadNum::one(d)) && self.translation.iter().all(QuadNum::is_zero)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleCaseData {
    pub generators: Vec<SA2Element>,
    pub generator: SL2,
    /// Eigenvalue `λ > 1`.
    pub lambda: QuadNum,
    pub p: QMat2,
    pub pinv: QMat2,
    pub z: Vec<i64>,
    pub n: Vec<u64>,
    /// `(a_i, b_i) = P⁻¹ a_i`.
    pub coords: Vec<QVec2>,
    /// Zero-based indices.
    pub j_plus: Vec<usize>,
    pub j_minus: Vec<usize>,
    pub j_zero: Vec<usize>,
    pub d: Vec<((usize, usize), QVec2)>,
    pub e: Vec<(usize, QVec2)>,
    pub cells: BTreeSet<Cell>,
}

impl ScaleCaseData {
    /// Generators `(A'_i, a'_i)` in eigen-coordinates.
    pub fn transformed(&self) -> Vec<DiagAffine> {
        self.z
            .iter()
            .zip(&self.coords)
            .map(|(&z, c)| DiagAffine {
                diag: [self.lambda.pow(z).expect("λ ≠ 0"), self.lambda.pow(-z).expect("λ ≠ 0")],
                translation: c.clone(),
            })
            .collect()
    }

    pub fn lineality(&self) -> Lineality {
        cone_lineality(&self.cells)
    }
}

pub fn build_scale_case(gens: &[SA2Element], generator: &SL2, z: &[BigInt]) -> Result<ScaleCaseData> {
    if classify(generator) != ElementClass::PositiveScale {
        return input(format!("{generator} is not a positive scale"));
    }
    if gens.len() != z.len() || gens.is_empty() {
        return input("one exponent per generator is required");
    }
    let mut zs = Vec::with_capacity(z.len());
    for (g, zi) in gens.iter().zip(z) {
        if generator.pow_big(zi) != g.matrix {
            return input(format!("{} is not {generator}^{zi}", g.matrix));
        }
        zs.push(zi.to_i64().ok_or_else(|| Error::Resource(format!("exponent {zi} too large")))?);
    }
    let e = eigen_basis(generator)?;
    let lambda = e.lambda.clone();
    let n: Vec<u64> = zs.iter().map(|&z| if z == 0 { 1 } else { z.unsigned_abs() }).collect();
    let coords: Vec<QVec2> = gens.iter().map(|g| e.coords(&g.translation)).collect();
    let pick = |f: fn(i64) -> bool| -> Vec<usize> { (0..zs.len()).filter(|&i| f(zs[i])).collect() };
    let j_plus = pick(|z| z > 0);
    let j_minus = pick(|z| z < 0);
    let j_zero = pick(|z| z == 0);
    if j_plus.is_empty() || j_minus.is_empty() {
        return input("exponents of both signs are required");
    }
    let one = QuadNum::one(e.d());
    let lp = |k: u64| lambda.pow(k as i64).expect("λ ≠ 0");
    let lm = |k: u64| lambda.pow(-(k as i64)).expect("λ ≠ 0");
    let mut d = Vec::new();
    for &i in &j_plus {
        for &j in &j_minus {
            let (ai, bi) = (&coords[i][0], &coords[i][1]);
            let (aj, bj) = (&coords[j][0], &coords[j][1]);
            let da = &(-ai).div(&(&one - &lp(n[i])))? + &aj.div(&(&one - &lm(n[j])))?;
            // b-row: 1 − λ^{−n_i} for i, 1 − λ^{n_j} for j
            let db = &bi.div(&(&one - &lm(n[i])))? - &bj.div(&(&one - &lp(n[j])))?;
            d.push(((i, j), [da, db]));
        }
    }
    let ek: Vec<(usize, QVec2)> = j_zero.iter().map(|&k| (k, coords[k].clone())).collect();
    let cells = d.iter().map(|(_, v)| Cell::of(v)).chain(ek.iter().map(|(_, v)| Cell::of(v))).collect();
    Ok(ScaleCaseData {
        generators: gens.to_vec(),
        generator: generator.clone(),
        lambda,
        p: e.p,
        pinv: e.pinv,
        z: zs,
        n,
        coords,
        j_plus,
        j_minus,
        j_zero,
        d,
        e: ek,
        cells,
    })
}

/// Radical `\hat{x}` of an eigen-coordinate element with `\hat{x}^{n} = x`.
pub fn radical(x: &DiagAffine, z: i64, n: u64, lambda: &QuadNum) -> Result<DiagAffine> {
    if z == 0 {
        return Ok(x.clone());
    }
    let one = QuadNum::one(lambda.d());
    let li = lambda.inv()?;
    let ln = lambda.pow(n as i64)?;
    let lni = lambda.pow(-(n as i64))?;
    let up = (&one - lambda).div(&(&one - &ln))?;
    let down = (&one - &li).div(&(&one - &lni))?;
    let (a, b) = (&x.translation[0], &x.translation[1]);
    Ok(if z > 0 {
        DiagAffine { diag: [lambda.clone(), li], translation: [a * &up, b * &down] }
    } else {
        DiagAffine { diag: [li, lambda.clone()], translation: [a * &down, b * &up] }
    })
}

pub fn scale_criterion(data: &ScaleCaseData) -> bool {
    let l = data.lineality();
    let has = |f: &dyn Fn(usize, usize) -> bool| {
        data.d.iter().any(|&((i, j), ref v)| f(i, j) && l.contains_cell(Cell::of(v)))
    };
    data.j_plus.iter().all(|&i| has(&|a, _| a == i))
        && data.j_minus.iter().all(|&j| has(&|_, b| b == j))
        && data.e.iter().all(|(_, v)| l.contains_cell(Cell::of(v)))
}

/// Largest `p = 2^ℓ` tried by [`scale_certificate`].
pub const MAX_P_LEVEL: u32 = 12;

fn letters(w: &PowerWord) -> impl Iterator<Item = usize> + '_ {
    w.factors().iter().map(|&(i, _)| i)
}

/// Full-image identity word in the positive-scale case.
pub fn scale_certificate(data: &ScaleCaseData, caps: &Caps) -> Result<PowerWord> {
    if !scale_criterion(data) {
        return input("the lineality criterion fails");
    }
    let k = data.generators.len();
    let gens = &data.generators;
    let n = &data.n;
    let mut base: Vec<(PowerWord, Vec2)> = Vec::new();
    for &kk in &data.j_zero {
        let w = PowerWord::letter(kk + 1);
        let t = evaluate_word(&w, gens)?.translation;
        base.push((w, t));
    }
    for level in 0..=caps.doublings.min(MAX_P_LEVEL) {
        let p = 1u64 << level;
        let mut pool = base.clone();
        for &i in &data.j_plus {
            for &j in &data.j_minus {
                let xi = sa_pow(&gens[i], p * n[j]);
                let xj = sa_pow(&gens[j], p * n[i]);
                let ei = (i + 1, p * n[j]);
                let ej = (j + 1, p * n[i]);
                pool.push((PowerWord::from_valid(vec![ei, ej]), sa_mul(&xi, &xj).translation));
                pool.push((PowerWord::from_valid(vec![ej, ei]), sa_mul(&xj, &xi).translation));
                for &kk in &data.j_zero {
                    for ql in (0..=caps.doublings.min(40)).step_by(4) {
                        let q = 1u64 << ql;
                        let xk = sa_pow(&gens[kk], q);
                        let ek = (kk + 1, q);
                        pool.push((
                            PowerWord::from_valid(vec![ei, ek, ej]),
                            sa_mul(&sa_mul(&xi, &xk), &xj).translation,
                        ));
                        pool.push((
                            PowerWord::from_valid(vec![ej, ek, ei]),
                            sa_mul(&sa_mul(&xj, &xk), &xi).translation,
                        ));
                    }
                }
            }
        }
        debug_assert!(pool.iter().all(|(w, _)| evaluate_word(w, gens).map(|e| e.matrix.is_identity()).unwrap_or(false)));
        if let Some(w) = combine(&pool, k, caps)? {
            return Ok(w);
        }
    }
    Err(Error::Resource("scale certificate search exhausted its doublings".into()))
}

/// Positive combination of loop words with zero total translation that
/// covers every letter.
pub(crate) fn combine(pool: &[(PowerWord, Vec2)], k: usize, caps: &Caps) -> Result<Option<PowerWord>> {
    if pool.is_empty() {
        return Ok(None);
    }
    let vectors: Vec<Vec<BigInt>> = pool.iter().map(|(_, t)| t.to_vec()).collect();
    let Some(c) = max_support_zero_combo(&vectors)? else {
        return Ok(None);
    };
    let mut covered = vec![false; k];
    for ((w, _), ci) in pool.iter().zip(&c) {
        if ci.is_positive() {
            for l in letters(w) {
                covered[l - 1] = true;
            }
        }
    }
    if !covered.iter().all(|&b| b) {
        return Ok(None);
    }
    let mut out = PowerWord::empty();
    let mut size: u128 = 0;
    for ((w, _), ci) in pool.iter().zip(&c) {
        if ci.is_zero() {
            continue;
        }
        let reps = ci.to_u64().ok_or_else(|| Error::Resource("combination coefficient too large".into()))?;
        size += u128::from(reps) * w.len() as u128;
        if size > caps.word_factors as u128 {
            return Err(Error::Resource(format!("certificate exceeds {} factors", caps.word_factors)));
        }
        out.append(&w.repeat(reps));
    }
    Ok(Some(out))
}

/// Certificate checked against the original generators.
pub fn verified_scale_certificate(data: &ScaleCaseData, caps: &Caps) -> Result<PowerWord> {
    let w = scale_certificate(data, caps)?;
    if verify_identity_certificate(&w, &data.generators) {
        Ok(w)
    } else {
        Err(Error::Degenerate(format!("scale certificate {w} failed verification")))
    }
}
