//! Normal forms in PSL(2,Z) ≅ Z/2 * Z/3 and a saturation decider for
//! full-image words whose product is `±I`.
//!
//! With `s = S = [[0,−1],[1,0]]` and `r = R = [[0,−1],[1,1]]` we have `U = s r`.
//! A string of syllables reduces to a single syllable or to the empty word
//! exactly when it splits into two such strings, so the facts "the path
//! `p → q` reduces to x" for `x ∈ {1, s, r, r²}` are closed under one binary
//! rule. Paths run through an automaton that reads whole generators and
//! records which letters occurred.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::algebra::SL2;

/// `s`, `r` or `r²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Syllable {
    S,
    R,
    R2,
}

impl Syllable {
    fn matrix(self) -> SL2 {
        match self {
            Syllable::S => SL2::from_i64(0, -1, 1, 0),
            Syllable::R => SL2::from_i64(0, -1, 1, 1),
            Syllable::R2 => SL2::from_i64(-1, -1, 1, 0),
        }
        .expect("det 1")
    }
}

/// Product of two reduced single syllables, when it is again of length ≤ 1.
fn merge(x: Syllable, y: Syllable) -> Option<Option<Syllable>> {
    use Syllable::*;
    match (x, y) {
        (S, S) | (R, R2) | (R2, R) => Some(None),
        (R, R) => Some(Some(R2)),
        (R2, R2) => Some(Some(R)),
        _ => None,
    }
}

fn push(stack: &mut Vec<Syllable>, x: Syllable) {
    if let Some(&top) = stack.last() {
        if let Some(m) = merge(top, x) {
            stack.pop();
            if let Some(y) = m {
                stack.push(y);
            }
            return;
        }
    }
    stack.push(x);
}

/// Reduced word of the image of `m` in PSL(2,Z), or `None` beyond `limit`
/// syllables.
pub fn normal_form(m: &SL2, limit: usize) -> Option<Vec<Syllable>> {
    let [[a, b], [c, d]] = m.entries().clone();
    let (mut a, mut b, mut c, mut d) = (a, b, c, d);
    let mut out: Vec<Syllable> = Vec::new();
    let mut budget = limit.saturating_mul(2) + 8;
    fn push_u(out: &mut Vec<Syllable>, k: &BigInt, budget: &mut usize) -> Option<()> {
        let n = k.abs().to_usize()?;
        if n > *budget {
            return None;
        }
        *budget -= n;
        for _ in 0..n {
            if k.is_positive() {
                push(out, Syllable::S);
                push(out, Syllable::R);
            } else {
                push(out, Syllable::R2);
                push(out, Syllable::S);
            }
        }
        Some(())
    }
    // M = U^q S M' with M' = S⁻¹ U^{−q} M
    while !c.is_zero() {
        let q = a.div_floor(&c);
        push_u(&mut out, &q, &mut budget)?;
        push(&mut out, Syllable::S);
        let a1 = &a - &q * &c;
        let b1 = &b - &q * &d;
        let (na, nb, nc, nd) = (c.clone(), d.clone(), -a1, -b1);
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
    // ±U^{ab}
    push_u(&mut out, &(&a * &b), &mut budget)?;
    (out.len() <= limit).then_some(out)
}

/// Matrix of a syllable string.
pub fn syllable_product(w: &[Syllable]) -> SL2 {
    w.iter().fold(SL2::identity(), |acc, x| acc.mul(&x.matrix()))
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Kind {
    One,
    Syl(Syllable),
}

fn combine(x: Kind, y: Kind) -> Option<Kind> {
    match (x, y) {
        (Kind::One, k) | (k, Kind::One) => Some(k),
        (Kind::Syl(a), Kind::Syl(b)) => merge(a, b).map(|m| m.map_or(Kind::One, Kind::Syl)),
    }
}

#[derive(Clone, Copy, Debug)]
enum Why {
    Refl,
    Edge(usize),
    Split(Kind, Kind, u32),
}

struct Edge {
    label: Option<Syllable>,
    completes: Option<usize>,
}

/// Outcome of the full-image `±I` search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FullImageSearch {
    /// Letters (1-based) of a full-image word with product `±I`.
    Found(Vec<usize>),
    Absent,
    TooLarge,
}

/// Decides whether some full-image word over `mats` evaluates to `±I`.
/// `node_cap` bounds the automaton and `fact_cap` the saturation.
pub fn full_image_identity(mats: &[SL2], node_cap: usize, fact_cap: usize) -> FullImageSearch {
    let k = mats.len();
    if k == 0 || k > 20 {
        return FullImageSearch::TooLarge;
    }
    let mut forms = Vec::with_capacity(k);
    for m in mats {
        match normal_form(m, node_cap) {
            Some(f) => forms.push(f),
            None => return FullImageSearch::TooLarge,
        }
    }
    let masks = 1usize << k;
    let interior: usize = forms.iter().map(|f| f.len().saturating_sub(1)).sum();
    let n = masks.saturating_mul(1 + interior);
    if n > node_cap {
        return FullImageSearch::TooLarge;
    }
    // boundary node for mask m is m; interior node (offset + j, m) is masks·(1 + offset + j) + m
    let mut edges: Vec<Edge> = Vec::new();
    let mut out_edges: Vec<(u32, u32, usize)> = Vec::new();
    let mut offset = 0usize;
    for (i, f) in forms.iter().enumerate() {
        let bit = 1usize << i;
        for m in 0..masks {
            let target = m | bit;
            let node = |j: usize| masks * (1 + offset + j - 1) + m;
            if f.is_empty() {
                edges.push(Edge { label: None, completes: Some(i + 1) });
                out_edges.push((m as u32, target as u32, edges.len() - 1));
                continue;
            }
            let mut from = m;
            for (j, &x) in f.iter().enumerate() {
                let last = j + 1 == f.len();
                let to = if last { target } else { node(j + 1) };
                edges.push(Edge { label: Some(x), completes: last.then_some(i + 1) });
                out_edges.push((from as u32, to as u32, edges.len() - 1));
                from = to;
            }
        }
        offset += f.len().saturating_sub(1);
    }
    let mut facts: HashMap<(Kind, u32, u32), Why> = HashMap::new();
    let mut starting: Vec<Vec<(Kind, u32)>> = vec![Vec::new(); n];
    let mut ending: Vec<Vec<(Kind, u32)>> = vec![Vec::new(); n];
    let mut work: Vec<(Kind, u32, u32)> = Vec::new();
    let add = |facts: &mut HashMap<(Kind, u32, u32), Why>,
                   starting: &mut Vec<Vec<(Kind, u32)>>,
                   ending: &mut Vec<Vec<(Kind, u32)>>,
                   work: &mut Vec<(Kind, u32, u32)>,
                   f: (Kind, u32, u32),
                   why: Why| {
        if facts.contains_key(&f) {
            return;
        }
        facts.insert(f, why);
        starting[f.1 as usize].push((f.0, f.2));
        ending[f.2 as usize].push((f.0, f.1));
        work.push(f);
    };
    for p in 0..n as u32 {
        add(&mut facts, &mut starting, &mut ending, &mut work, (Kind::One, p, p), Why::Refl);
    }
    for &(p, q, e) in &out_edges {
        let kind = edges[e].label.map_or(Kind::One, Kind::Syl);
        add(&mut facts, &mut starting, &mut ending, &mut work, (kind, p, q), Why::Edge(e));
    }
    let goal = (Kind::One, 0u32, (masks - 1) as u32);
    while let Some((kind, p, q)) = work.pop() {
        if facts.contains_key(&goal) {
            break;
        }
        if facts.len() > fact_cap {
            return FullImageSearch::TooLarge;
        }
        // (kind, p, q) followed by (k2, q, r)
        let right: Vec<(Kind, u32)> = starting[q as usize].clone();
        for (k2, r) in right {
            if let Some(c) = combine(kind, k2) {
                add(&mut facts, &mut starting, &mut ending, &mut work, (c, p, r), Why::Split(kind, k2, q));
            }
        }
        // (k0, o, p) followed by (kind, p, q)
        let left: Vec<(Kind, u32)> = ending[p as usize].clone();
        for (k0, o) in left {
            if let Some(c) = combine(k0, kind) {
                add(&mut facts, &mut starting, &mut ending, &mut work, (c, o, q), Why::Split(k0, kind, p));
            }
        }
    }
    if !facts.contains_key(&goal) {
        return FullImageSearch::Absent;
    }
    let mut letters = Vec::new();
    let mut stack = vec![goal];
    while let Some(f) = stack.pop() {
        match facts[&f] {
            Why::Refl => {}
            Why::Edge(e) => letters.extend(edges[e].completes),
            Why::Split(a, b, mid) => {
                // right part first so the left part is expanded first
                stack.push((b, mid, f.2));
                stack.push((a, f.1, mid));
            }
        }
    }
    FullImageSearch::Found(letters)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(a: i64, b: i64, c: i64, d: i64) -> SL2 {
        SL2::from_i64(a, b, c, d).unwrap()
    }

    #[test]
    fn normal_forms_evaluate_back() {
        for x in [m(1, 1, 0, 1), m(2, 1, 1, 1), m(1, -2, 0, 1), m(-1, -1, 3, 2), m(3, 5, 1, 2), m(1, 0, 0, 1), m(-1, 0, 0, -1)] {
            let f = normal_form(&x, 1000).unwrap();
            let p = syllable_product(&f);
            assert!(p == x || p == x.neg(), "{x} vs {p}");
        }
        assert!(normal_form(&m(1, 0, 0, 1), 10).unwrap().is_empty());
        assert_eq!(normal_form(&m(1, 1, 0, 1), 10).unwrap(), vec![Syllable::S, Syllable::R]);
    }

    #[test]
    fn decides_small_cases() {
        assert_eq!(full_image_identity(&[m(1, 1, 0, 1)], 4096, 1 << 20), FullImageSearch::Absent);
        let r = full_image_identity(&[m(0, -1, 1, 0), m(1, 1, 0, 1)], 4096, 1 << 20);
        assert!(matches!(r, FullImageSearch::Found(_)));
        // U⁻² and an order-3 element: a group, but only through words of length 14
        let r = full_image_identity(&[m(1, -2, 0, 1), m(-1, -1, 1, 0)], 4096, 1 << 20);
        let FullImageSearch::Found(w) = r else { panic!("expected a word") };
        let p = w.iter().fold(SL2::identity(), |acc, &i| acc.mul(&[m(1, -2, 0, 1), m(-1, -1, 1, 0)][i - 1]));
        assert!(p.is_identity() || p.is_minus_identity());
        assert!(w.contains(&1) && w.contains(&2));
    }
}
