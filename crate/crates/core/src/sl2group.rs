//! Structure of the matrix-part group: finite closures, the exponent lattice
//! of commuting families, and the semigroup-is-group test.

use std::collections::{HashMap, HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{classify, ElementClass, Mat2, SL2};
use crate::caps::Caps;
use crate::error::{input, Error, Result};
use crate::exactmath::{
    gcd_with_coefficients, lattice_saturation, left_kernel, strictly_positive_zero_combo, Lattice,
};
use crate::modular::{full_image_identity, FullImageSearch};
use crate::witness::{evaluate_matrix_word, inverse_witnesses_from_identity, PowerWord};

/// Outcome of the structure analysis of `⟨A_1, …, A_K⟩`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupCase {
    NotAGroup,
    Trivial,
    ContainsTorsion,
    CyclicBy { class: ElementClass, generator: SL2, exponents: Vec<BigInt> },
    NonAbelianInfinite,
}

impl GroupCase {
    pub fn label(&self) -> &'static str {
        match self {
            GroupCase::NotAGroup => "not-a-group",
            GroupCase::Trivial => "trivial",
            GroupCase::ContainsTorsion => "torsion",
            GroupCase::CyclicBy { class: ElementClass::Shear, .. } => "shear",
            GroupCase::CyclicBy { class: ElementClass::TwistedInversion, .. } => "twisted-inversion",
            GroupCase::CyclicBy { class: ElementClass::PositiveScale, .. } => "positive-scale",
            GroupCase::CyclicBy { class: ElementClass::InvertingScale, .. } => "inverting-scale",
            GroupCase::CyclicBy { .. } => "cyclic",
            GroupCase::NonAbelianInfinite => "non-abelian",
        }
    }
}

/// Relation lattice `Λ = {n : Π A_i^{n_i} = I}` and its saturation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentLattice {
    pub lambda: Lattice,
    pub saturation: Lattice,
    pub kernel_dim: usize,
    pub torsion: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianStructure {
    pub lattice: ExponentLattice,
    /// Generator `A` when the group is infinite cyclic.
    pub generator: Option<SL2>,
    /// `A_i = A^{z_i}`.
    pub exponents: Option<Vec<BigInt>>,
    /// `Π A_i^{x_i} = A`.
    pub coefficients: Option<Vec<BigInt>>,
    /// Order of the group when finite.
    pub order: Option<u64>,
    /// Each `A_i = (−1)^{s_i} G^{m_i}` for a primitive `G`; absent for finite groups.
    pub primitive: Option<(SL2, Vec<BigInt>, Vec<bool>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupnessResult {
    /// One word per generator, each representing its inverse.
    Yes(Vec<PowerWord>),
    No(String),
    Inconclusive(Caps),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseOutcome {
    Decided(GroupCase),
    Inconclusive { caps: Caps, stage: String },
}

/// Everything the structure analysis learned, for reuse by the deciders.
#[derive(Clone, Debug)]
pub struct GroupAnalysis {
    pub outcome: CaseOutcome,
    pub groupness: GroupnessResult,
    pub closure: Option<Vec<SL2>>,
    pub structure: Option<AbelianStructure>,
    /// Strictly positive `N` with `Π A_i^{N_i} = I` in the commuting case.
    pub relation: Option<Vec<BigInt>>,
}

/// Closure under products and inverses, or `None` once it exceeds `cap`.
pub fn group_closure(matrices: &[SL2], cap: usize) -> Option<Vec<SL2>> {
    let mut gens: Vec<SL2> = Vec::new();
    for m in matrices {
        for g in [m.clone(), m.inverse()] {
            if !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    let mut seen: HashSet<SL2> = HashSet::new();
    let mut order: Vec<SL2> = Vec::new();
    let mut queue: VecDeque<SL2> = VecDeque::new();
    for g in &gens {
        if seen.insert(g.clone()) {
            order.push(g.clone());
            queue.push_back(g.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in &gens {
            let y = x.mul(g);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return None;
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    if order.len() > cap {
        return None;
    }
    Some(order)
}

fn all_commute(ms: &[SL2]) -> bool {
    ms.iter().enumerate().all(|(i, a)| ms[i + 1..].iter().all(|b| a.commutes_with(b)))
}

fn sign_bit(b: bool) -> BigInt {
    if b {
        BigInt::one()
    } else {
        BigInt::zero()
    }
}

/// `(I + N)` for the primitive nilpotent `N` with `±B = I + gN`, `g > 0`.
fn parabolic_root(b: &SL2) -> (SL2, BigInt) {
    let eps = if b.trace().is_positive() { BigInt::one() } else { -BigInt::one() };
    let e = b.entries();
    let m: Mat2 = [
        [&e[0][0] * &eps - 1, &e[0][1] * &eps],
        [&e[1][0] * &eps, &e[1][1] * &eps - 1],
    ];
    let g = m.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
    let n = m.map(|row| row.map(|x| x / &g));
    let root = SL2::new(&n[0][0] + 1, n[0][1].clone(), n[1][0].clone(), &n[1][1] + 1).expect("unipotent");
    (root, g)
}

/// Fundamental positive scale of the centralizer of a hyperbolic `B`.
fn hyperbolic_root(b: &SL2) -> SL2 {
    let e = b.entries();
    let a0 = &e[0][0];
    let g = e[0][1].gcd(&e[1][0]).gcd(&(&e[1][1] - a0));
    // B = a0·I + g·N0 with N0 primitive
    let n0: Mat2 = [
        [BigInt::zero(), &e[0][1] / &g],
        [&e[1][0] / &g, (&e[1][1] - a0) / &g],
    ];
    let tau = &n0[0][0] + &n0[1][1];
    let delta = &n0[0][0] * &n0[1][1] - &n0[0][1] * &n0[1][0];
    let disc0 = &tau * &tau - BigInt::from(4) * &delta;
    let tb = b.trace().abs();
    let limit = tb.sqrt() + 2;
    let mut t = BigInt::from(3);
    while t <= limit && t < tb {
        let num: BigInt = &t * &t - BigInt::from(4);
        if (&num % &disc0).is_zero() {
            let v2 = &num / &disc0;
            let v = v2.sqrt();
            if &v * &v == v2 {
                let twice_u = &t - &v * &tau;
                if twice_u.is_even() {
                    let u = twice_u / 2;
                    let cand = SL2::new(
                        &u + &v * &n0[0][0],
                        &v * &n0[0][1],
                        &v * &n0[1][0],
                        &u + &v * &n0[1][1],
                    )
                    .expect("unit of the order has norm one");
                    match power_exponent(&cand, b) {
                        Some((m, _)) if m.is_negative() => return cand.inverse(),
                        Some(_) => return cand,
                        None => {}
                    }
                }
            }
        }
        t += 1;
    }
    if b.trace().is_positive() {
        b.clone()
    } else {
        b.neg()
    }
}

/// `(m, s)` with `B = (−1)^s G^m` for a positive scale or unipotent `G`.
fn power_exponent(g: &SL2, b: &SL2) -> Option<(BigInt, bool)> {
    if b.is_identity() {
        return Some((BigInt::zero(), false));
    }
    if b.is_minus_identity() {
        return Some((BigInt::zero(), true));
    }
    let tg = g.trace();
    if tg == BigInt::from(2) {
        // G = I + N: ±B − I = mN
        let eps = b.trace().is_negative();
        let bb = if eps { b.neg() } else { b.clone() };
        let n = g.entries();
        let be = bb.entries();
        let pairs = [
            (&be[0][0] - 1, &n[0][0] - 1),
            (be[0][1].clone(), n[0][1].clone()),
            (be[1][0].clone(), n[1][0].clone()),
            (&be[1][1] - 1, &n[1][1] - 1),
        ];
        let (num, den) = pairs.iter().find(|(_, d)| !d.is_zero())?;
        if !(num % den).is_zero() {
            return None;
        }
        let m = num / den;
        return (g.pow_big(&m) == bb).then_some((m, eps));
    }
    let target = b.trace().abs();
    // Lucas sequence V_k(t): V_0 = 2, V_1 = t
    let (mut prev, mut cur) = (BigInt::from(2), tg.clone());
    let mut k = BigInt::one();
    while cur < target {
        let next = &tg * &cur - &prev;
        prev = cur;
        cur = next;
        k += 1;
    }
    if cur != target {
        return None;
    }
    for m in [k.clone(), -k] {
        let p = g.pow_big(&m);
        if p == *b {
            return Some((m, false));
        }
        if p.neg() == *b {
            return Some((m, true));
        }
    }
    None
}

/// Exponent lattice and cyclic generator of a commuting family.
pub fn abelian_structure(matrices: &[SL2]) -> Result<AbelianStructure> {
    if matrices.is_empty() {
        return input("empty generator list");
    }
    if !all_commute(matrices) {
        return input("generators do not commute");
    }
    let k = matrices.len();
    let special = matrices.iter().find(|m| !m.is_identity() && !m.is_minus_identity());
    let finite_group = match special {
        None => true,
        Some(b) => classify(b).order().is_some(),
    };
    if finite_group {
        return finite_structure(matrices);
    }
    let b = special.expect("infinite group has a non-central element");
    let root = if classify(b).is_scale() { hyperbolic_root(b) } else { parabolic_root(b).0 };
    let mut ms = Vec::with_capacity(k);
    let mut ss = Vec::with_capacity(k);
    for a in matrices {
        let (m, s) = power_exponent(&root, a)
            .ok_or_else(|| Error::Degenerate(format!("{a} is not a power of {root}")))?;
        ms.push(m);
        ss.push(s);
    }
    // n ∈ Λ iff Σ n_i m_i = 0 and Σ n_i s_i is even
    let mut rows: Vec<Vec<BigInt>> = ms.iter().zip(&ss).map(|(m, &s)| vec![m.clone(), sign_bit(s)]).collect();
    rows.push(vec![BigInt::zero(), BigInt::from(2)]);
    let kernel = left_kernel(2, &rows)?;
    let projected: Vec<Vec<BigInt>> = kernel.into_iter().map(|mut v| {
        v.truncate(k);
        v
    }).collect();
    let lambda = Lattice::span(k, &projected)?;
    let saturation = lattice_saturation(&lambda);
    let torsion = saturation != lambda;
    let lattice = ExponentLattice { kernel_dim: lambda.rank(), lambda, saturation, torsion };
    let (g, x) = gcd_with_coefficients(&ms);
    let mut generator = None;
    let mut exponents = None;
    let mut coefficients = None;
    if !torsion && !g.is_zero() {
        let gen = matrices
            .iter()
            .zip(&x)
            .fold(SL2::identity(), |acc, (a, xi)| acc.mul(&a.pow_big(xi)));
        let z: Vec<BigInt> = ms.iter().map(|m| m / &g).collect();
        if matrices.iter().zip(&z).all(|(a, zi)| gen.pow_big(zi) == *a) {
            generator = Some(gen);
            exponents = Some(z);
            coefficients = Some(x);
        } else {
            return Err(Error::Degenerate("cyclic generator failed verification".into()));
        }
    }
    Ok(AbelianStructure {
        lattice,
        generator,
        exponents,
        coefficients,
        order: None,
        primitive: Some((root, ms, ss)),
    })
}

fn finite_structure(matrices: &[SL2]) -> Result<AbelianStructure> {
    let k = matrices.len();
    let closure = group_closure(matrices, 24).ok_or_else(|| Error::Degenerate("finite family with large closure".into()))?;
    let n = closure.len() as u64;
    let cyc = closure
        .iter()
        .find(|g| (1..n).all(|j| !g.pow_u(j).is_identity()))
        .ok_or_else(|| Error::Degenerate("commuting finite group is not cyclic".into()))?
        .clone();
    let mut rows = Vec::with_capacity(k + 1);
    for a in matrices {
        let e = (0..n).find(|&j| cyc.pow_u(j) == *a).expect("element of a cyclic group");
        rows.push(vec![BigInt::from(e)]);
    }
    rows.push(vec![BigInt::from(n)]);
    let kernel = left_kernel(1, &rows)?;
    let projected: Vec<Vec<BigInt>> = kernel.into_iter().map(|mut v| {
        v.truncate(k);
        v
    }).collect();
    let lambda = Lattice::span(k, &projected)?;
    let saturation = lattice_saturation(&lambda);
    let torsion = saturation != lambda;
    Ok(AbelianStructure {
        lattice: ExponentLattice { kernel_dim: lambda.rank(), lambda, saturation, torsion },
        generator: None,
        exponents: None,
        coefficients: None,
        order: Some(n),
        primitive: None,
    })
}

/// Positive relation `N` (parity doubled) with `Π A_i^{N_i} = I`, if any.
pub fn positive_relation(s: &AbelianStructure, k: usize) -> Result<Option<Vec<BigInt>>> {
    match &s.primitive {
        Some((_, ms, _)) => {
            let rows: Vec<Vec<BigInt>> = ms.iter().map(|m| vec![m.clone()]).collect();
            Ok(strictly_positive_zero_combo(&rows)?.map(|n| n.into_iter().map(|x| x * 2).collect()))
        }
        None => {
            let order = BigInt::from(s.order.unwrap_or(1));
            Ok(Some(vec![order; k]))
        }
    }
}

/// A basis change in GL(2,Z) after which every generator is ± a nonnegative
/// matrix; inside that monoid no nonempty product equals `±I` unless each
/// factor does.
fn cone_certificate(matrices: &[SL2], bound: i64) -> Option<Mat2> {
    if matrices.iter().all(|m| m.is_identity() || m.is_minus_identity()) {
        return None;
    }
    let range = -bound..=bound;
    for p in range.clone() {
        for q in range.clone() {
            for r in range.clone() {
                for s in range.clone() {
                    let det = p * s - q * r;
                    if det != 1 && det != -1 {
                        continue;
                    }
                    let m = [[BigInt::from(p), BigInt::from(q)], [BigInt::from(r), BigInt::from(s)]];
                    let minv = [
                        [BigInt::from(s * det), BigInt::from(-q * det)],
                        [BigInt::from(-r * det), BigInt::from(p * det)],
                    ];
                    let ok = matrices.iter().all(|a| {
                        let c = crate::algebra::mat_mul(&crate::algebra::mat_mul(&m, a.entries()), &minv);
                        let flat: Vec<&BigInt> = c.iter().flatten().collect();
                        flat.iter().all(|x| !x.is_negative()) || flat.iter().all(|x| !x.is_positive())
                    });
                    if ok {
                        return Some(m);
                    }
                }
            }
        }
    }
    None
}

/// Norm bound of the depth-unbounded search pass.
pub const SMALL_NORM: u64 = 256;

/// Automaton size accepted by the free-product layer.
pub const GRAMMAR_NODES: usize = 4096;

/// Breadth-first search over matrix products for inverse witnesses.
fn bfs_pass(matrices: &[SL2], norm: u64, depth: usize, states: usize) -> Option<Vec<PowerWord>> {
    let k = matrices.len();
    let targets: Vec<SL2> = matrices.iter().map(SL2::inverse).collect();
    let mut found: Vec<Option<PowerWord>> = vec![None; k];
    let norm = BigInt::from(norm);
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut index: HashMap<SL2, usize> = HashMap::new();
    let mut frontier: Vec<(usize, SL2)> = Vec::new();
    let word_of = |nodes: &Vec<(usize, usize)>, mut id: usize| {
        let mut letters = Vec::new();
        loop {
            let (parent, letter) = nodes[id];
            letters.push(letter);
            if parent == usize::MAX {
                break;
            }
            id = parent;
        }
        letters.reverse();
        PowerWord::from_valid(letters.into_iter().map(|l| (l, 1)).collect())
    };
    let record = |found: &mut Vec<Option<PowerWord>>, m: &SL2, w: &PowerWord| {
        for (i, t) in targets.iter().enumerate() {
            if found[i].is_none() && m == t {
                found[i] = Some(w.clone());
            }
        }
        if m.is_identity() {
            for (i, inv) in inverse_witnesses_from_identity(w, k).into_iter().enumerate() {
                if found[i].is_none() {
                    found[i] = inv;
                }
            }
        }
    };
    for (i, m) in matrices.iter().enumerate() {
        if index.contains_key(m) {
            continue;
        }
        nodes.push((usize::MAX, i + 1));
        let id = nodes.len() - 1;
        index.insert(m.clone(), id);
        let w = word_of(&nodes, id);
        record(&mut found, m, &w);
        frontier.push((id, m.clone()));
    }
    for _ in 1..depth {
        if found.iter().all(Option::is_some) || frontier.is_empty() {
            break;
        }
        let mut next = Vec::new();
        for (id, m) in &frontier {
            for (i, g) in matrices.iter().enumerate() {
                let p = m.mul(g);
                if p.max_abs() > norm || index.contains_key(&p) {
                    continue;
                }
                if nodes.len() >= states {
                    return None;
                }
                nodes.push((*id, i + 1));
                let nid = nodes.len() - 1;
                index.insert(p.clone(), nid);
                let w = word_of(&nodes, nid);
                record(&mut found, &p, &w);
                next.push((nid, p));
            }
        }
        frontier = next;
    }
    found.into_iter().collect()
}

/// Whether the semigroup generated by the matrices is a group.
pub fn semigroup_is_group(matrices: &[SL2], caps: &Caps) -> GroupnessResult {
    groupness(matrices, caps).0
}

fn groupness(matrices: &[SL2], caps: &Caps) -> (GroupnessResult, Option<Vec<SL2>>, Option<AbelianStructure>, Option<Vec<BigInt>>) {
    let k = matrices.len();
    if k == 0 {
        return (GroupnessResult::No("empty generator list".into()), None, None, None);
    }
    if let Some(closure) = group_closure(matrices, caps.closure) {
        let ws = matrices
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let ord = classify(m).order().expect("finite closure consists of torsion");
                PowerWord::power(i + 1, if ord == 1 { 1 } else { ord - 1 })
            })
            .collect();
        let structure = if all_commute(matrices) { abelian_structure(matrices).ok() } else { None };
        let relation = structure.as_ref().and_then(|s| positive_relation(s, k).ok().flatten());
        return (GroupnessResult::Yes(ws), Some(closure), structure, relation);
    }
    if all_commute(matrices) {
        let s = match abelian_structure(matrices) {
            Ok(s) => s,
            Err(e) => return (GroupnessResult::No(format!("structure analysis failed: {e}")), None, None, None),
        };
        let rel = match positive_relation(&s, k) {
            Ok(r) => r,
            Err(e) => return (GroupnessResult::No(format!("feasibility failed: {e}")), None, Some(s), None),
        };
        return match rel {
            None => (
                GroupnessResult::No("no strictly positive exponent relation: the identity has no full-image word".into()),
                None,
                Some(s),
                None,
            ),
            Some(n) => {
                let ws = (0..k)
                    .map(|i| {
                        let factors = (0..k)
                            .map(|j| {
                                let e = n[j].to_u64().expect("small relation") - u64::from(i == j);
                                (j + 1, e)
                            })
                            .filter(|&(_, e)| e > 0)
                            .collect();
                        PowerWord::from_valid(factors)
                    })
                    .collect();
                (GroupnessResult::Yes(ws), None, Some(s), Some(n))
            }
        };
    }
    if let Some([[p, q], [r, s]]) = cone_certificate(matrices, caps.cone_basis) {
        return (
            GroupnessResult::No(format!(
                "after conjugation by [[{p},{q}],[{r},{s}]] every generator is ± a nonnegative matrix, and the nonnegative monoid is free"
            )),
            None,
            None,
            None,
        );
    }
    if caps.depth == 0 {
        return (GroupnessResult::Inconclusive(caps.clone()), None, None, None);
    }
    if let Some(ws) = bfs_pass(matrices, caps.norm, caps.depth, caps.states) {
        return (GroupnessResult::Yes(ws), None, None, None);
    }
    match full_image_identity(matrices, GRAMMAR_NODES, caps.states) {
        FullImageSearch::Found(letters) => {
            let w = PowerWord::from_valid(letters.into_iter().map(|l| (l, 1)).collect());
            let w = match evaluate_matrix_word(&w, matrices) {
                Ok(m) if m.is_identity() => w,
                Ok(m) if m.is_minus_identity() => w.repeat(2),
                _ => return (GroupnessResult::Inconclusive(caps.clone()), None, None, None),
            };
            let ws: Option<Vec<PowerWord>> = inverse_witnesses_from_identity(&w, k).into_iter().collect();
            match ws {
                Some(ws) => (GroupnessResult::Yes(ws), None, None, None),
                None => (GroupnessResult::Inconclusive(caps.clone()), None, None, None),
            }
        }
        FullImageSearch::Absent => (
            GroupnessResult::No("no full-image word reduces to ±I in PSL(2,Z) ≅ Z/2 * Z/3".into()),
            None,
            None,
            None,
        ),
        FullImageSearch::TooLarge => match bfs_pass(matrices, caps.norm.min(SMALL_NORM), usize::MAX, caps.states) {
            Some(ws) => (GroupnessResult::Yes(ws), None, None, None),
            None => (GroupnessResult::Inconclusive(caps.clone()), None, None, None),
        },
    }
}

/// Case split of the matrix-part group.
pub fn analyze_group(matrices: &[SL2], caps: &Caps) -> CaseOutcome {
    analyze_group_detailed(matrices, caps).outcome
}

pub fn analyze_group_detailed(matrices: &[SL2], caps: &Caps) -> GroupAnalysis {
    let (groupness, closure, structure, relation) = groupness(matrices, caps);
    let outcome = match &groupness {
        GroupnessResult::No(_) => CaseOutcome::Decided(GroupCase::NotAGroup),
        GroupnessResult::Inconclusive(c) => CaseOutcome::Inconclusive { caps: c.clone(), stage: "matrix-group".into() },
        GroupnessResult::Yes(_) => {
            if matrices.iter().all(SL2::is_identity) {
                CaseOutcome::Decided(GroupCase::Trivial)
            } else if closure.is_some() {
                CaseOutcome::Decided(GroupCase::ContainsTorsion)
            } else if let Some(s) = &structure {
                match (&s.generator, &s.exponents) {
                    (Some(g), Some(z)) if !s.lattice.torsion => CaseOutcome::Decided(GroupCase::CyclicBy {
                        class: classify(g),
                        generator: g.clone(),
                        exponents: z.clone(),
                    }),
                    _ => CaseOutcome::Decided(GroupCase::ContainsTorsion),
                }
            } else {
                CaseOutcome::Decided(GroupCase::NonAbelianInfinite)
            }
        }
    };
    GroupAnalysis { outcome, groupness, closure, structure, relation }
}
