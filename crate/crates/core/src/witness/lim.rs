use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{evaluate_any, PowerWord};
use crate::algebra::{classify, eigen_data, sa_mul, unipotent_direction, ElementClass, LineKind, SA2Element, Vec2};
use crate::caps::Caps;
use crate::error::{input, Error, Result};
use crate::exactmath::{rat_int, QuadNum, Rat};

/// Output of a limit step: `(A, a) · word · (B, b) = (I, y)`, with the word
/// over the two-letter alphabet `1 = (A, a)`, `2 = (B, b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimStep {
    pub word: PowerWord,
    pub y: Vec2,
    pub m: u64,
}

fn loop_translation(x: &SA2Element, y: &SA2Element) -> Result<Vec2> {
    let p = sa_mul(x, y);
    if !p.matrix.is_identity() {
        return input("the pair does not multiply to a translation");
    }
    Ok(p.translation)
}

/// Value of `(A, a) · w · (B, b)`.
fn sandwich(x: &SA2Element, y: &SA2Element, w: &PowerWord) -> Result<Vec2> {
    let inner = evaluate_any(w, &[x.clone(), y.clone()])?;
    Ok(sa_mul(&sa_mul(x, &inner), y).translation)
}

fn odd_candidates(caps: &Caps) -> impl Iterator<Item = u64> {
    std::iter::once(1u64).chain((1..=caps.doublings.min(62)).map(|k| (1u64 << k) + 1))
}

/// `|cos θ| > t` (or `cos θ > t` when `signed`) for `cos θ = vy / √(vv·yy)`.
fn cos_exceeds(vy: &QuadNum, vv: &QuadNum, yy: &QuadNum, t: &Rat, signed: bool) -> bool {
    let t2 = QuadNum::rational(t * t, vy.d());
    let lhs = vy * vy;
    let rhs = &(&t2 * vv) * yy;
    let sq_gt = (&lhs - &rhs).signum() > 0;
    let sq_lt = (&lhs - &rhs).signum() < 0;
    if signed {
        if t.is_negative() {
            vy.signum() >= 0 || sq_lt
        } else {
            vy.signum() > 0 && sq_gt
        }
    } else if t.is_negative() {
        true
    } else if t.is_zero() {
        !vy.is_zero()
    } else {
        sq_gt
    }
}

fn qvec(v: &Vec2, d: &BigInt) -> [QuadNum; 2] {
    [QuadNum::rational(rat_int(&v[0]), d), QuadNum::rational(rat_int(&v[1]), d)]
}

fn qdot(x: &[QuadNum; 2], y: &[QuadNum; 2]) -> QuadNum {
    &(&x[0] * &y[0]) + &(&x[1] * &y[1])
}

/// Scale step: drives `y` towards the invariant line `kind` of `A` while
/// keeping it in the cone of `x = a + A b` cut by the two eigenlines.
pub fn scalelim_step(
    x: &SA2Element,
    y: &SA2Element,
    kind: LineKind,
    eps: &Rat,
    caps: &Caps,
) -> Result<LimStep> {
    if !eps.is_positive() {
        return input("ε must be positive");
    }
    if !classify(&x.matrix).is_scale() {
        return input(format!("{} is not a scale", x.matrix));
    }
    let xt = loop_translation(x, y)?;
    let e = eigen_data(&x.matrix)?;
    let cx = e.coords(&xt);
    if cx[0].is_zero() || cx[1].is_zero() {
        return input("x lies on an invariant line");
    }
    let d = e.d().clone();
    let (col, stretching) = match kind {
        LineKind::Stretching => (0, true),
        LineKind::Compressing => (1, false),
        LineKind::Unique => return input("a scale has two invariant lines"),
    };
    let v = [e.p[0][col].clone(), e.p[1][col].clone()];
    let vv = qdot(&v, &v);
    let thresh = Rat::one() - eps;
    for m in odd_candidates(caps) {
        let word = if stretching {
            PowerWord::from_valid(vec![(1, m - 1), (2, m - 1)])
        } else {
            PowerWord::from_valid(vec![(2, m), (1, m)])
        };
        let yt = sandwich(x, y, &word)?;
        let cy = e.coords(&yt);
        if cy[0].signum() != cx[0].signum() || cy[1].signum() != cx[1].signum() {
            continue;
        }
        let yq = qvec(&yt, &d);
        if cos_exceeds(&qdot(&v, &yq), &vv, &qdot(&yq, &yq), &thresh, false) {
            return Ok(LimStep { word, y: yt, m });
        }
    }
    Err(Error::Resource(format!("scale limit step exceeded {} doublings", caps.doublings)))
}

/// Shear step towards the primitive direction of the invariant line.
pub fn shearlim_step(x: &SA2Element, y: &SA2Element, eps: &Rat, caps: &Caps) -> Result<LimStep> {
    let v = unipotent_direction(&x.matrix)?;
    shearlim_step_toward(x, y, &v, eps, caps)
}

/// Shear step with `y` approaching the ray through `v`.
pub fn shearlim_step_toward(
    x: &SA2Element,
    y: &SA2Element,
    v: &Vec2,
    eps: &Rat,
    caps: &Caps,
) -> Result<LimStep> {
    if !eps.is_positive() {
        return input("ε must be positive");
    }
    if classify(&x.matrix) != ElementClass::Shear {
        return input(format!("{} is not a shear", x.matrix));
    }
    let xt = loop_translation(x, y)?;
    if !x.matrix.apply(v).eq(v) || v.iter().all(Zero::is_zero) {
        return input("v does not span the invariant line");
    }
    let w = [-v[1].clone(), v[0].clone()];
    let aw = x.matrix.apply(&w);
    let mu_num = (&aw[0] - &w[0]) * &v[0] + (&aw[1] - &w[1]) * &v[1];
    let c_num = &xt[0] * &w[0] + &xt[1] * &w[1];
    if c_num.is_zero() {
        return input("x lies on the invariant line");
    }
    let positive = (mu_num * &c_num).is_positive();
    let d = BigInt::from(2);
    let vq = qvec(v, &d);
    let vv = qdot(&vq, &vq);
    let thresh = Rat::one() - eps;
    for m in odd_candidates(caps) {
        let word = if positive {
            PowerWord::from_valid(vec![(1, m - 1), (2, m - 1)])
        } else {
            PowerWord::from_valid(vec![(2, m), (1, m)])
        };
        let yt = sandwich(x, y, &word)?;
        let side = &yt[0] * &w[0] + &yt[1] * &w[1];
        if side.signum() != c_num.signum() {
            continue;
        }
        let yq = qvec(&yt, &d);
        if cos_exceeds(&qdot(&vq, &yq), &vv, &qdot(&yq, &yq), &thresh, true) {
            return Ok(LimStep { word, y: yt, m });
        }
    }
    Err(Error::Resource(format!("shear limit step exceeded {} doublings", caps.doublings)))
}
