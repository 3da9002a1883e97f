use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use super::{evaluate_any, evaluate_matrix_word, full_image_word, verify_identity_certificate, PowerWord};
use crate::algebra::{classify, sa_mul, SA2Element, SL2, Vec2};
use crate::caps::Caps;
use crate::exactmath::{to_primitive_integers, zero_combo_with_bounds};
use crate::oracle::product_search;

/// Matrix words of length at most this are scanned for torsion.
const TORSION_SCAN: usize = 4;

/// Best-effort identity certificate for a group that is not virtually
/// abelian. `inverse_witnesses[i]` must represent `A_{i+1}⁻¹` at matrix level.
pub fn free_case_certificate(gens: &[SA2Element], inverse_witnesses: &[PowerWord], caps: &Caps) -> Option<PowerWord> {
    let k = gens.len();
    if caps.depth == 0 || k == 0 || inverse_witnesses.len() != k {
        return None;
    }
    let mats: Vec<SL2> = gens.iter().map(|g| g.matrix.clone()).collect();
    let accept = |w: PowerWord| verify_identity_certificate(&w, gens).then_some(w);
    if let Some(w) = torsion_shortcut(gens, &mats, inverse_witnesses).and_then(accept) {
        return Some(w);
    }
    if let Some(w) = loop_pool(gens, inverse_witnesses, caps).and_then(accept) {
        return Some(w);
    }
    let norm = BigInt::from(caps.norm);
    let found = product_search(
        gens,
        sa_mul,
        SA2Element::is_identity,
        |x: &SA2Element| x.max_abs() <= norm,
        caps.depth.min(8),
        caps.states,
        true,
    )
    .ok()?;
    found.full_image_word.and_then(accept)
}

/// Short matrix words with a nontrivial torsion value, made full-image and
/// raised to their order.
fn torsion_shortcut(gens: &[SA2Element], mats: &[SL2], inv: &[PowerWord]) -> Option<PowerWord> {
    let k = mats.len();
    let mut frontier: Vec<PowerWord> = (1..=k).map(PowerWord::letter).collect();
    let mut seen: HashMap<SL2, ()> = HashMap::new();
    for _ in 0..TORSION_SCAN {
        let mut next = Vec::new();
        for w in &frontier {
            let m = evaluate_matrix_word(w, mats).ok()?;
            if seen.insert(m.clone(), ()).is_some() {
                continue;
            }
            if let Some(ord) = classify(&m).order().filter(|&o| o > 1) {
                let fw = full_image_word(w, inv);
                let x = evaluate_any(&fw, gens).ok()?;
                debug_assert_eq!(x.matrix, m);
                return Some(fw.repeat(ord));
            }
            for i in 1..=k {
                let mut u = w.clone();
                u.push(i, 1);
                next.push(u);
            }
        }
        frontier = next;
    }
    None
}

/// Pure-translation loops `g_i w_i`, `w_i g_i` and their conjugates by single
/// letters, combined by a linear program that keeps a full-image loop.
fn loop_pool(gens: &[SA2Element], inv: &[PowerWord], caps: &Caps) -> Option<PowerWord> {
    let k = gens.len();
    let mut pool: Vec<PowerWord> = Vec::new();
    let full = full_image_word(&PowerWord::empty(), inv);
    pool.push(full);
    let mut basic = Vec::new();
    for i in 0..k {
        let g = PowerWord::letter(i + 1);
        basic.push(g.concat(&inv[i]));
        basic.push(inv[i].concat(&g));
    }
    for l in &basic {
        pool.push(l.clone());
        for j in 0..k {
            let g = PowerWord::letter(j + 1);
            pool.push(g.concat(l).concat(&inv[j]));
            pool.push(inv[j].concat(l).concat(&g));
        }
    }
    let mut vectors: Vec<Vec<BigInt>> = Vec::with_capacity(pool.len());
    for w in &pool {
        let x = evaluate_any(w, gens).ok()?;
        if !x.matrix.is_identity() {
            return None;
        }
        let t: Vec2 = x.translation;
        vectors.push(t.to_vec());
    }
    let mut lower = vec![false; pool.len()];
    lower[0] = true;
    let sol = zero_combo_with_bounds(&vectors, &lower).ok()??;
    let c = to_primitive_integers(&sol);
    let mut out = PowerWord::empty();
    let mut size = 0u128;
    for (w, ci) in pool.iter().zip(&c) {
        if !ci.is_positive() {
            continue;
        }
        let reps = ci.to_u64()?;
        size += u128::from(reps) * w.len() as u128;
        if size > caps.word_factors as u128 {
            return None;
        }
        out.append(&w.repeat(reps));
    }
    Some(out)
}
