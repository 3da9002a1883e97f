use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Rat;
use crate::error::{Error, Result};

/// An element `p + q·√D` of the real quadratic field `Q(√D)`.
///
/// Every value carries its field parameter; arithmetic between values with
/// different parameters is rejected.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadNum {
    p: Rat,
    q: Rat,
    d: BigInt,
}

/// Writes `n = f²·D` with `D` squarefree and returns `(f, D)`.
pub fn squarefree_core(n: &BigInt) -> (BigInt, BigInt) {
    assert!(n.is_positive(), "squarefree core of a non-positive integer");
    let mut rest = n.clone();
    let mut f = BigInt::one();
    let mut core = BigInt::one();
    let mut p = BigInt::from(2);
    while &p * &p <= rest {
        let mut e = 0u32;
        while (&rest % &p).is_zero() {
            rest /= &p;
            e += 1;
        }
        if e > 0 {
            f *= p.pow(e / 2);
            if e % 2 == 1 {
                core *= &p;
            }
        }
        p += if p == BigInt::from(2) { 1 } else { 2 };
    }
    (f, core * rest)
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

impl QuadNum {
    /// Builds `p + q√d`; `d` must be a positive non-square.
    pub fn new(p: Rat, q: Rat, d: BigInt) -> Result<Self> {
        if !d.is_positive() || is_square(&d) {
            return Err(Error::Context(format!(
                "field parameter {d} is not a positive non-square"
            )));
        }
        Ok(QuadNum { p, q, d })
    }

    pub(crate) fn raw(p: Rat, q: Rat, d: &BigInt) -> Self {
        QuadNum { p, q, d: d.clone() }
    }

    pub fn rational(p: Rat, d: &BigInt) -> Self {
        QuadNum::raw(p, Rat::zero(), d)
    }

    pub fn from_int(n: i64, d: &BigInt) -> Self {
        QuadNum::rational(Rat::from_integer(BigInt::from(n)), d)
    }

    pub fn zero(d: &BigInt) -> Self {
        QuadNum::rational(Rat::zero(), d)
    }

    pub fn one(d: &BigInt) -> Self {
        QuadNum::rational(Rat::one(), d)
    }

    pub fn p(&self) -> &Rat {
        &self.p
    }

    pub fn q(&self) -> &Rat {
        &self.q
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadNum::raw(self.p.clone(), -self.q.clone(), &self.d)
    }

    /// Field norm `p² − q²D`.
    pub fn norm(&self) -> Rat {
        &self.p * &self.p - &self.q * &self.q * Rat::from_integer(self.d.clone())
    }

    pub fn signum(&self) -> i8 {
        qnum_sign(self)
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self
        } else {
            self.clone()
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        QuadNum::raw(&self.p * r, &self.q * r, &self.d)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_field(other)?;
        Ok(QuadNum::raw(&self.p + &other.p, &self.q + &other.q, &self.d))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        qnum_mul(self, other)
    }

    pub fn inv(&self) -> Result<Self> {
        qnum_inv(self)
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut k = e.unsigned_abs();
        let mut acc = QuadNum::one(&self.d);
        let mut sq = base;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &sq;
            }
            k >>= 1;
            if k > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// Exact comparison of real values.
    pub fn cmp_value(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }

    /// Floating-point approximation for display only.
    pub fn to_f64(&self) -> f64 {
        let p = self.p.to_f64().unwrap_or(f64::NAN);
        let q = self.q.to_f64().unwrap_or(f64::NAN);
        let d = self.d.to_f64().unwrap_or(f64::NAN);
        p + q * d.sqrt()
    }

    fn same_field(&self, other: &Self) -> Result<()> {
        if self.d == other.d {
            Ok(())
        } else {
            Err(Error::Context(format!(
                "√{} and √{} live in different fields",
                self.d, other.d
            )))
        }
    }
}

/// Product in `Q(√D)`.
pub fn qnum_mul(x: &QuadNum, y: &QuadNum) -> Result<QuadNum> {
    x.same_field(y)?;
    let d = Rat::from_integer(x.d.clone());
    Ok(QuadNum::raw(
        &x.p * &y.p + &x.q * &y.q * d,
        &x.p * &y.q + &x.q * &y.p,
        &x.d,
    ))
}

/// Multiplicative inverse via the conjugate over the norm.
pub fn qnum_inv(x: &QuadNum) -> Result<QuadNum> {
    if x.is_zero() {
        return Err(Error::DivisionByZero);
    }
    let n = x.norm();
    Ok(QuadNum::raw(&x.p / &n, -&x.q / &n, &x.d))
}

/// Exact sign of `p + q√D`.
pub fn qnum_sign(x: &QuadNum) -> i8 {
    let sp = sign_of(&x.p);
    let sq = sign_of(&x.q);
    if sq == 0 {
        return sp;
    }
    if sp == 0 || sp == sq {
        return sq;
    }
    let p2 = &x.p * &x.p;
    let q2d = &x.q * &x.q * Rat::from_integer(x.d.clone());
    match p2.cmp(&q2d) {
        Ordering::Greater => sp,
        Ordering::Less => sq,
        Ordering::Equal => 0,
    }
}

pub(crate) fn sign_of(r: &Rat) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

fn expect_same(x: &QuadNum, y: &QuadNum) {
    assert!(
        x.d == y.d,
        "mixed quadratic fields √{} and √{}",
        x.d,
        y.d
    );
}

impl Add for &QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: &QuadNum) -> QuadNum {
        expect_same(self, rhs);
        QuadNum::raw(&self.p + &rhs.p, &self.q + &rhs.q, &self.d)
    }
}

impl Sub for &QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: &QuadNum) -> QuadNum {
        expect_same(self, rhs);
        QuadNum::raw(&self.p - &rhs.p, &self.q - &rhs.q, &self.d)
    }
}

impl Mul for &QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: &QuadNum) -> QuadNum {
        expect_same(self, rhs);
        qnum_mul(self, rhs).expect("same field")
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum::raw(-self.p.clone(), -self.q.clone(), &self.d)
    }
}

impl Add for QuadNum {
    type Output = QuadNum;
    fn add(self, rhs: QuadNum) -> QuadNum {
        &self + &rhs
    }
}

impl Sub for QuadNum {
    type Output = QuadNum;
    fn sub(self, rhs: QuadNum) -> QuadNum {
        &self - &rhs
    }
}

impl Mul for QuadNum {
    type Output = QuadNum;
    fn mul(self, rhs: QuadNum) -> QuadNum {
        &self * &rhs
    }
}

impl Neg for QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        -&self
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        if self.p.is_zero() {
            return write!(f, "{}·√{}", self.q, self.d);
        }
        let sign = if self.q.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}·√{}", self.p, sign, self.q.abs(), self.d)
    }
}

/// Least common multiple of the denominators of a list of rationals.
pub fn denominator_lcm<'a>(xs: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    xs.into_iter()
        .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()))
}
