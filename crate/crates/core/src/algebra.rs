//! SL(2,Z) and SA(2,Z) elements, classification, invariant lines,
//! eigenbases over Q(√D) and closed-form powers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::exactmath::{rat_int, squarefree_core, QuadNum, Rat};

pub type Vec2 = [BigInt; 2];
pub type Mat2 = [[BigInt; 2]; 2];
pub type QVec2 = [QuadNum; 2];
pub type QMat2 = [[QuadNum; 2]; 2];

pub fn vec2(x: i64, y: i64) -> Vec2 {
    [BigInt::from(x), BigInt::from(y)]
}

pub fn zero_vec() -> Vec2 {
    [BigInt::zero(), BigInt::zero()]
}

pub(crate) fn mat_mul(x: &Mat2, y: &Mat2) -> Mat2 {
    let e = |i: usize, j: usize| &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub(crate) fn mat_vec(x: &Mat2, v: &Vec2) -> Vec2 {
    [
        &x[0][0] * &v[0] + &x[0][1] * &v[1],
        &x[1][0] * &v[0] + &x[1][1] * &v[1],
    ]
}

pub(crate) fn vec_add(x: &Vec2, y: &Vec2) -> Vec2 {
    [&x[0] + &y[0], &x[1] + &y[1]]
}

pub(crate) fn mat_identity() -> Mat2 {
    [[BigInt::one(), BigInt::zero()], [BigInt::zero(), BigInt::one()]]
}

/// A 2×2 integer matrix of determinant one.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SL2 {
    m: Mat2,
}

impl SL2 {
    pub fn new(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Result<SL2> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return input(format!("determinant {det} is not 1"));
        }
        Ok(SL2 { m: [[a, b], [c, d]] })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<SL2> {
        SL2::new(a.into(), b.into(), c.into(), d.into())
    }

    pub fn from_rows(m: Mat2) -> Result<SL2> {
        let [[a, b], [c, d]] = m;
        SL2::new(a, b, c, d)
    }

    fn unchecked(m: Mat2) -> SL2 {
        SL2 { m }
    }

    pub fn identity() -> SL2 {
        SL2::unchecked(mat_identity())
    }

    pub fn minus_identity() -> SL2 {
        SL2::identity().neg()
    }

    pub fn entries(&self) -> &Mat2 {
        &self.m
    }

    pub fn trace(&self) -> BigInt {
        &self.m[0][0] + &self.m[1][1]
    }

    pub fn is_identity(&self) -> bool {
        self.m == mat_identity()
    }

    pub fn is_minus_identity(&self) -> bool {
        self.neg().is_identity()
    }

    pub fn mul(&self, other: &SL2) -> SL2 {
        SL2::unchecked(mat_mul(&self.m, &other.m))
    }

    pub fn neg(&self) -> SL2 {
        let n = |x: &BigInt| -x.clone();
        SL2::unchecked([
            [n(&self.m[0][0]), n(&self.m[0][1])],
            [n(&self.m[1][0]), n(&self.m[1][1])],
        ])
    }

    pub fn inverse(&self) -> SL2 {
        let [[a, b], [c, d]] = &self.m;
        SL2::unchecked([[d.clone(), -b.clone()], [-c.clone(), a.clone()]])
    }

    /// `self^e`; negative exponents invert.
    pub fn pow(&self, e: i64) -> SL2 {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        base.pow_u(e.unsigned_abs())
    }

    pub fn pow_u(&self, mut k: u64) -> SL2 {
        let mut acc = SL2::identity();
        let mut sq = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&sq);
            }
            k >>= 1;
            if k > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn pow_big(&self, e: &BigInt) -> SL2 {
        let base = if e.is_negative() { self.inverse() } else { self.clone() };
        let mut k = e.abs();
        let mut acc = SL2::identity();
        let mut sq = base;
        let two = BigInt::from(2);
        while k.is_positive() {
            if k.is_odd() {
                acc = acc.mul(&sq);
            }
            k /= &two;
            if k.is_positive() {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        mat_vec(&self.m, v)
    }

    pub fn commutes_with(&self, other: &SL2) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn max_abs(&self) -> BigInt {
        self.m.iter().flatten().map(|x| x.abs()).max().expect("four entries")
    }

    pub fn is_nonnegative(&self) -> bool {
        self.m.iter().flatten().all(|x| !x.is_negative())
    }
}

impl fmt::Debug for SL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SL2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = &self.m;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

/// An element `(A, a)` of SA(2,Z), acting by `x ↦ A x + a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SA2Element {
    pub matrix: SL2,
    pub translation: Vec2,
}

impl SA2Element {
    pub fn new(matrix: SL2, translation: Vec2) -> SA2Element {
        SA2Element { matrix, translation }
    }

    pub fn identity() -> SA2Element {
        SA2Element::new(SL2::identity(), zero_vec())
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity() && self.translation.iter().all(Zero::is_zero)
    }

    pub fn inverse(&self) -> SA2Element {
        let inv = self.matrix.inverse();
        let t = inv.apply(&self.translation);
        SA2Element::new(inv, [-t[0].clone(), -t[1].clone()])
    }

    pub fn max_abs(&self) -> BigInt {
        let t = self.translation.iter().map(|x| x.abs()).max().expect("two entries");
        t.max(self.matrix.max_abs())
    }
}

impl fmt::Display for SA2Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, ({}, {}))", self.matrix, self.translation[0], self.translation[1])
    }
}

/// `(A, a)·(B, b) = (AB, A b + a)`.
pub fn sa_mul(x: &SA2Element, y: &SA2Element) -> SA2Element {
    SA2Element::new(
        x.matrix.mul(&y.matrix),
        vec_add(&x.matrix.apply(&y.translation), &x.translation),
    )
}

/// `x^m = (A^m, (I + A + … + A^{m−1}) a)`; `m = 0` gives the identity.
pub fn sa_pow(x: &SA2Element, m: u64) -> SA2Element {
    if m == 0 {
        return SA2Element::identity();
    }
    let s = geom_sum(&x.matrix, m);
    SA2Element::new(x.matrix.pow_u(m), mat_vec(&s, &x.translation))
}

/// `I + A + … + A^{m−1}` in O(log m) matrix operations.
pub fn geom_sum(a: &SL2, m: u64) -> Mat2 {
    let t = a.trace();
    let two = BigInt::from(2);
    let mb = BigInt::from(m);
    if t == two {
        // A = I + N with N² = 0
        let tri = &mb * (&mb - 1u32) / 2;
        let n = &a.m;
        return [
            [&mb + &tri * (&n[0][0] - 1u32), &tri * &n[0][1]],
            [&tri * &n[1][0], &mb + &tri * (&n[1][1] - 1u32)],
        ];
    }
    // (I − A)^{-1} = adj(I − A) / (2 − t)
    let am = a.pow_u(m).m;
    let one = BigInt::one();
    let i_minus_am: Mat2 = [
        [&one - &am[0][0], -am[0][1].clone()],
        [-am[1][0].clone(), &one - &am[1][1]],
    ];
    let adj: Mat2 = [
        [&one - &a.m[1][1], a.m[0][1].clone()],
        [a.m[1][0].clone(), &one - &a.m[0][0]],
    ];
    let det = &two - &t;
    let prod = mat_mul(&adj, &i_minus_am);
    prod.map(|row| row.map(|x| x / &det))
}

/// Conjugacy-invariant type of an SL(2,Z) matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementClass {
    Identity,
    MinusIdentity,
    Torsion(u8),
    Shear,
    TwistedInversion,
    PositiveScale,
    InvertingScale,
}

impl ElementClass {
    pub fn is_scale(self) -> bool {
        matches!(self, ElementClass::PositiveScale | ElementClass::InvertingScale)
    }

    /// Finite multiplicative order, if any.
    pub fn order(self) -> Option<u64> {
        match self {
            ElementClass::Identity => Some(1),
            ElementClass::MinusIdentity => Some(2),
            ElementClass::Torsion(k) => Some(k as u64),
            _ => None,
        }
    }

    pub fn label(self) -> String {
        match self {
            ElementClass::Identity => "identity".into(),
            ElementClass::MinusIdentity => "minus-identity".into(),
            ElementClass::Torsion(k) => format!("torsion-{k}"),
            ElementClass::Shear => "shear".into(),
            ElementClass::TwistedInversion => "twisted-inversion".into(),
            ElementClass::PositiveScale => "positive-scale".into(),
            ElementClass::InvertingScale => "inverting-scale".into(),
        }
    }
}

impl fmt::Display for ElementClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

pub fn classify(a: &SL2) -> ElementClass {
    let t = a.trace();
    let two = BigInt::from(2);
    if t.is_zero() {
        ElementClass::Torsion(4)
    } else if t.is_one() {
        ElementClass::Torsion(6)
    } else if t == BigInt::from(-1) {
        ElementClass::Torsion(3)
    } else if t == two {
        if a.is_identity() {
            ElementClass::Identity
        } else {
            ElementClass::Shear
        }
    } else if t == -two {
        if a.is_minus_identity() {
            ElementClass::MinusIdentity
        } else {
            ElementClass::TwistedInversion
        }
    } else if t.is_positive() {
        ElementClass::PositiveScale
    } else {
        ElementClass::InvertingScale
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Rational(Vec2),
    Quadratic(QVec2),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LineKind {
    /// The single invariant line of a shear or twisted inversion.
    Unique,
    Stretching,
    Compressing,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantLine {
    pub direction: Direction,
    pub kind: LineKind,
}

pub type LineSet = Vec<InvariantLine>;

/// Primitive integer vector spanning the kernel of `A − εI`, where `ε` is the
/// sign of the trace, with its first nonzero coordinate positive.
pub fn unipotent_direction(a: &SL2) -> Result<Vec2> {
    let eps = if a.trace().is_positive() { BigInt::one() } else { -BigInt::one() };
    let [[p, q], [r, s]] = &a.m;
    let row0 = [p - &eps, q.clone()];
    let row1 = [r.clone(), s - &eps];
    let row = if row0.iter().any(|x| !x.is_zero()) { row0 } else { row1 };
    if row.iter().all(Zero::is_zero) {
        return Err(Error::Degenerate(format!("{a} has no distinguished line")));
    }
    Ok(primitive([row[1].clone(), -row[0].clone()]))
}

pub(crate) fn primitive(v: Vec2) -> Vec2 {
    let g = v[0].gcd(&v[1]);
    let mut w = if g.is_zero() { v } else { [&v[0] / &g, &v[1] / &g] };
    let lead = if w[0].is_zero() { &w[1] } else { &w[0] };
    if lead.is_negative() {
        w = [-w[0].clone(), -w[1].clone()];
    }
    w
}

pub fn invariant_lines(a: &SL2) -> Result<LineSet> {
    match classify(a) {
        ElementClass::Identity | ElementClass::MinusIdentity => Err(Error::Degenerate(format!(
            "every line is invariant under {a}"
        ))),
        ElementClass::Torsion(_) => Ok(Vec::new()),
        ElementClass::Shear | ElementClass::TwistedInversion => Ok(vec![InvariantLine {
            direction: Direction::Rational(unipotent_direction(a)?),
            kind: LineKind::Unique,
        }]),
        ElementClass::PositiveScale | ElementClass::InvertingScale => {
            let e = eigen_data(a)?;
            let col = |j: usize| [e.p[0][j].clone(), e.p[1][j].clone()];
            Ok(vec![
                InvariantLine { direction: Direction::Quadratic(normalize_first(col(0))), kind: LineKind::Stretching },
                InvariantLine { direction: Direction::Quadratic(normalize_first(col(1))), kind: LineKind::Compressing },
            ])
        }
    }
}

fn normalize_first(v: QVec2) -> QVec2 {
    if v[0].is_zero() {
        let d = v[0].d().clone();
        return [QuadNum::zero(&d), QuadNum::one(&d)];
    }
    let inv = v[0].inv().expect("nonzero");
    [QuadNum::one(v[0].d()), &v[1] * &inv]
}

/// Diagonalization of a scale over `Q(√D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EigenBasis {
    /// Eigenvalue with `|λ| > 1`.
    pub lambda: QuadNum,
    /// Columns are the stretching and compressing eigenvectors; `det P = 1`.
    pub p: QMat2,
    pub pinv: QMat2,
}

impl EigenBasis {
    pub fn d(&self) -> &BigInt {
        self.lambda.d()
    }

    /// Coordinates `P⁻¹ v` in the eigenbasis.
    pub fn coords(&self, v: &Vec2) -> QVec2 {
        let d = self.d();
        qmat_vec(&self.pinv, &[QuadNum::rational(rat_int(&v[0]), d), QuadNum::rational(rat_int(&v[1]), d)])
    }

    /// `P c`, mapping eigen-coordinates back to the standard basis.
    pub fn from_coords(&self, c: &QVec2) -> QVec2 {
        qmat_vec(&self.p, c)
    }
}

pub(crate) fn qmat_vec(m: &QMat2, v: &QVec2) -> QVec2 {
    [&(&m[0][0] * &v[0]) + &(&m[0][1] * &v[1]), &(&m[1][0] * &v[0]) + &(&m[1][1] * &v[1])]
}

pub fn qmat_mul(x: &QMat2, y: &QMat2) -> QMat2 {
    let e = |i: usize, j: usize| &(&x[i][0] * &y[0][j]) + &(&x[i][1] * &y[1][j]);
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn qmat_of(a: &SL2, d: &BigInt) -> QMat2 {
    a.m.clone().map(|row| row.map(|x| QuadNum::rational(rat_int(&x), d)))
}

/// Eigenbasis of a positive scale, with `λ > 1`.
pub fn eigen_basis(a: &SL2) -> Result<EigenBasis> {
    if classify(a) != ElementClass::PositiveScale {
        return input(format!("{a} is not a positive scale"));
    }
    eigen_data(a)
}

/// Eigenbasis of any scale; `λ` is the eigenvalue of larger magnitude.
pub fn eigen_data(a: &SL2) -> Result<EigenBasis> {
    if !classify(a).is_scale() {
        return input(format!("{a} is not a scale"));
    }
    let t = a.trace();
    let disc = &t * &t - BigInt::from(4);
    let (f, d) = squarefree_core(&disc);
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let sgn = if t.is_negative() { -BigInt::one() } else { BigInt::one() };
    let lambda = QuadNum::raw(rat_int(&t) * &half, rat_int(&(f * sgn)) * &half, &d);
    let linv = lambda.conj();
    let [[a0, b0], _] = &a.m;
    let binv = Rat::new(BigInt::one(), b0.clone());
    let a_q = QuadNum::rational(rat_int(a0), &d);
    let y_v = (&lambda - &a_q).scale(&binv);
    let y_w = (&linv - &a_q).scale(&binv);
    let det = &y_w - &y_v;
    let dinv = det.inv()?;
    let one = QuadNum::one(&d);
    let p: QMat2 = [[one.clone(), dinv.clone()], [y_v.clone(), &y_w * &dinv]];
    let pinv: QMat2 = [[p[1][1].clone(), -&p[0][1]], [-&p[1][0], p[0][0].clone()]];
    Ok(EigenBasis { lambda, p, pinv })
}
