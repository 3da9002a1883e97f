//! The shear case: embedding into the Heisenberg group H3(Q) and a Group
//! Problem decider there.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{classify, unipotent_direction, ElementClass, SA2Element, SL2};
use crate::caps::Caps;
use crate::error::{input, Result};
use crate::exactmath::{denominator_lcm, gcd_with_coefficients, rat_int, strictly_positive_zero_combo, Rat};
use crate::oracle::product_search;
use crate::sl2group::GroupnessResult;
use crate::witness::{inverse_witnesses_from_identity, PowerWord};

/// `[[1, a, b], [0, 1, c], [0, 0, 1]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct H3Element {
    pub a: Rat,
    pub b: Rat,
    pub c: Rat,
}

impl H3Element {
    pub fn new(a: Rat, b: Rat, c: Rat) -> H3Element {
        H3Element { a, b, c }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> H3Element {
        let r = |x: i64| Rat::from_integer(BigInt::from(x));
        H3Element::new(r(a), r(b), r(c))
    }

    pub fn identity() -> H3Element {
        H3Element::from_i64(0, 0, 0)
    }

    pub fn is_identity(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero()
    }

    pub fn inverse(&self) -> H3Element {
        H3Element::new(-self.a.clone(), &self.a * &self.c - &self.b, -self.c.clone())
    }

    pub fn pow(&self, k: u64) -> H3Element {
        let kr = Rat::from_integer(BigInt::from(k));
        let tri = Rat::from_integer(BigInt::from(k) * BigInt::from(k.saturating_sub(1)) / 2u32);
        H3Element::new(&self.a * &kr, &self.b * &kr + tri * &self.a * &self.c, &self.c * &kr)
    }

    fn max_abs(&self) -> Rat {
        [self.a.abs(), self.b.abs(), self.c.abs()].into_iter().max().expect("three entries")
    }
}

impl fmt::Display for H3Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a={}, b={}, c={})", self.a, self.b, self.c)
    }
}

/// `(a, b, c)·(a', b', c') = (a + a', b + b' + a c', c + c')`.
pub fn h3_mul(x: &H3Element, y: &H3Element) -> H3Element {
    H3Element::new(&x.a + &y.a, &x.b + &y.b + &x.a * &y.c, &x.c + &y.c)
}

/// Unimodular `P` whose first column spans the invariant line of `generator`.
pub fn shear_basis(generator: &SL2) -> Result<SL2> {
    let v = unipotent_direction(generator)?;
    let (_, co) = gcd_with_coefficients(&v);
    // det [[v0, x], [v1, y]] = v0·y − v1·x = 1
    SL2::new(v[0].clone(), -co[1].clone(), v[1].clone(), co[0].clone())
}

/// Images `[[P⁻¹A_iP, P⁻¹a_i], [0, 1]]` as Heisenberg elements.
pub fn embed_shear_case(gens: &[SA2Element], generator: &SL2) -> Result<Vec<H3Element>> {
    if classify(generator) != ElementClass::Shear {
        return input(format!("{generator} is not a shear"));
    }
    let p = shear_basis(generator)?;
    let pinv = p.inverse();
    gens.iter()
        .map(|g| {
            if !g.matrix.commutes_with(generator) {
                return input(format!("{} does not commute with {generator}", g.matrix));
            }
            let c = pinv.mul(&g.matrix).mul(&p);
            let e = c.entries();
            if !(e[0][0].is_one() && e[1][1].is_one() && e[1][0].is_zero()) {
                return input(format!("{} is not a positive power of the shear", g.matrix));
            }
            let t = pinv.apply(&g.translation);
            Ok(H3Element::new(rat_int(&e[0][1]), rat_int(&t[0]), rat_int(&t[1])))
        })
        .collect()
}

/// Integer rows proportional to rational rows, with a common positive factor.
fn integer_rows(rows: &[Vec<Rat>]) -> Vec<Vec<BigInt>> {
    let l = denominator_lcm(rows.iter().flatten());
    let lr = rat_int(&l);
    rows.iter()
        .map(|r| r.iter().map(|x| (x * &lr).to_integer()).collect())
        .collect()
}

/// Group Problem for `⟨gens⟩` in H3(Q).
pub fn h3_group_problem(gens: &[H3Element], caps: &Caps) -> GroupnessResult {
    h3_decide(gens, caps).0
}

/// As [`h3_group_problem`], together with a full-image identity word on Yes.
pub fn h3_decide(gens: &[H3Element], caps: &Caps) -> (GroupnessResult, Option<PowerWord>) {
    let k = gens.len();
    if k == 0 {
        return (GroupnessResult::No("empty generator list".into()), None);
    }
    let ab: Vec<Vec<Rat>> = gens.iter().map(|g| vec![g.a.clone(), g.c.clone()]).collect();
    let combo = match strictly_positive_zero_combo(&integer_rows(&ab)) {
        Ok(c) => c,
        Err(e) => return (GroupnessResult::No(format!("feasibility failed: {e}")), None),
    };
    let Some(n) = combo else {
        return (
            GroupnessResult::No("the abelianization has no strictly positive zero combination".into()),
            None,
        );
    };
    let norm = Rat::from_integer(BigInt::from(caps.norm));
    if let Ok(found) = product_search(gens, h3_mul, H3Element::is_identity, |x| x.max_abs() <= norm, caps.depth, caps.states, true) {
        if let Some(w) = found.full_image_word {
            return yes(w, k);
        }
    }
    if !caps.h3_closed_form {
        return (GroupnessResult::Inconclusive(caps.clone()), None);
    }
    let pair = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .find(|&(i, j)| !(&gens[i].a * &gens[j].c - &gens[j].a * &gens[i].c).is_zero());
    match pair {
        None => collinear_case(gens),
        Some((i, j)) => match central_combination(gens, &n, i, j, caps) {
            Some(w) => yes(w, k),
            None => (GroupnessResult::Inconclusive(caps.clone()), None),
        },
    }
}

fn yes(w: PowerWord, k: usize) -> (GroupnessResult, Option<PowerWord>) {
    let inv: Vec<PowerWord> = inverse_witnesses_from_identity(&w, k)
        .into_iter()
        .map(|x| x.expect("full-image word covers every letter"))
        .collect();
    (GroupnessResult::Yes(inv), Some(w))
}

/// Collinear abelianization: the group is abelian and `(a, c, b − ac/2)` is an
/// injective homomorphism into Q³.
fn collinear_case(gens: &[H3Element]) -> (GroupnessResult, Option<PowerWord>) {
    let half = Rat::new(BigInt::one(), BigInt::from(2));
    let rows: Vec<Vec<Rat>> = gens
        .iter()
        .map(|g| vec![g.a.clone(), g.c.clone(), &g.b - &g.a * &g.c * &half])
        .collect();
    match strictly_positive_zero_combo(&integer_rows(&rows)) {
        Ok(Some(n)) => {
            let w = PowerWord::from_valid(
                n.iter().enumerate().map(|(i, x)| (i + 1, x.to_u64().expect("small relation"))).collect(),
            );
            yes(w, gens.len())
        }
        Ok(None) => (
            GroupnessResult::No(
                "the generated group is abelian and (a, c, b − ac/2) admits no strictly positive zero combination"
                    .into(),
            ),
            None,
        ),
        Err(e) => (GroupnessResult::No(format!("feasibility failed: {e}")), None),
    }
}

fn block_word(order: &[usize], n: &[BigInt], scale: u64) -> Option<PowerWord> {
    let mut f = Vec::with_capacity(order.len());
    for &i in order {
        f.push((i + 1, n[i].to_u64()?.checked_mul(scale)?));
    }
    Some(PowerWord::from_valid(f))
}

fn eval_h3(gens: &[H3Element], w: &PowerWord) -> H3Element {
    w.factors()
        .iter()
        .fold(H3Element::identity(), |acc, &(i, e)| h3_mul(&acc, &gens[i - 1].pow(e)))
}

/// Non-collinear abelianization: two block words with central values of
/// opposite sign, combined into an identity word.
fn central_combination(gens: &[H3Element], n: &[BigInt], i: usize, j: usize, caps: &Caps) -> Option<PowerWord> {
    let k = gens.len();
    let rest: Vec<usize> = (0..k).filter(|&x| x != i && x != j).collect();
    let mut orders = Vec::new();
    for first in [[i, j], [j, i]] {
        let mut o = first.to_vec();
        o.extend(&rest);
        let mut r = o.clone();
        r.reverse();
        orders.push((o, r));
    }
    let mut scale = 1u64;
    for _ in 0..=caps.doublings {
        for (o, r) in &orders {
            let (Some(w1), Some(w2)) = (block_word(o, n, scale), block_word(r, n, scale)) else {
                return None;
            };
            let e1 = eval_h3(gens, &w1);
            let e2 = eval_h3(gens, &w2);
            debug_assert!(e1.a.is_zero() && e1.c.is_zero());
            if e1.b.is_zero() {
                return Some(w1);
            }
            if e2.b.is_zero() {
                return Some(w2);
            }
            if e1.b.is_positive() == e2.b.is_positive() {
                continue;
            }
            // k1·b1 + k2·b2 = 0
            let ints = integer_rows(&[vec![e1.b.abs()], vec![e2.b.abs()]]);
            let (g, _) = gcd_with_coefficients(&[ints[0][0].clone(), ints[1][0].clone()]);
            let k1 = (&ints[1][0] / &g).to_u64()?;
            let k2 = (&ints[0][0] / &g).to_u64()?;
            let size = (k1.checked_add(k2)? as usize).checked_mul(k)?;
            if size > caps.word_factors {
                return None;
            }
            let w = w1.repeat(k1).concat(&w2.repeat(k2));
            return Some(w);
        }
        scale = scale.checked_mul(2)?;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products() {
        let x = H3Element::from_i64(1, 0, 1);
        assert_eq!(h3_mul(&x, &x), H3Element::from_i64(2, 1, 2));
        assert_eq!(
            h3_mul(&H3Element::from_i64(1, 1, 0), &H3Element::from_i64(-1, 0, 0)),
            H3Element::from_i64(0, 1, 0)
        );
        assert_eq!(x.pow(3), h3_mul(&h3_mul(&x, &x), &x));
        assert!(h3_mul(&x, &x.inverse()).is_identity());
    }

    #[test]
    fn decider_layers() {
        let caps = Caps::default();
        let g = [H3Element::from_i64(1, 0, 0), H3Element::from_i64(-1, 0, 0)];
        assert!(matches!(h3_group_problem(&g, &caps), GroupnessResult::Yes(_)));
        let g = [H3Element::from_i64(1, 0, 0), H3Element::from_i64(0, 0, 1)];
        assert!(matches!(h3_group_problem(&g, &caps), GroupnessResult::No(_)));
        let g = [H3Element::from_i64(1, 1, 0), H3Element::from_i64(-1, 0, 0)];
        assert!(matches!(h3_group_problem(&g, &caps), GroupnessResult::No(_)));
        let open = Caps { h3_closed_form: false, ..Caps::default() };
        assert!(matches!(h3_group_problem(&g, &open), GroupnessResult::Inconclusive(_)));
    }

    #[test]
    fn commutator_certificate() {
        // a and c directions with large translations: BFS at depth 2 cannot finish
        let g = [
            H3Element::from_i64(1, 5, 0),
            H3Element::from_i64(0, 3, 1),
            H3Element::from_i64(-1, 7, -1),
        ];
        let caps = Caps::default().with_depth(2);
        let (r, w) = h3_decide(&g, &caps);
        assert!(matches!(r, GroupnessResult::Yes(_)));
        let w = w.unwrap();
        assert!(w.is_full_image(3));
        assert!(eval_h3(&g, &w).is_identity());
    }
}
