//! Compressed witness words, their evaluation, certificate checks and the
//! constructive geometric steps used to assemble identity certificates.

mod free;
mod lim;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{sa_mul, sa_pow, SA2Element, SL2};
use crate::error::{input, Result};

pub use free::free_case_certificate;
pub use lim::{scalelim_step, shearlim_step, shearlim_step_toward, LimStep};

/// A word stored as `(generator, exponent)` factors; generators are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PowerWord {
    factors: Vec<(usize, u64)>,
}

impl PowerWord {
    /// Validates indices (≥ 1) and exponents (≥ 1); adjacent equal letters merge.
    pub fn new(factors: Vec<(usize, u64)>) -> Result<PowerWord> {
        if let Some(&(i, e)) = factors.iter().find(|&&(i, e)| i == 0 || e == 0) {
            return input(format!("invalid factor ({i}, {e})"));
        }
        Ok(PowerWord::from_valid(factors))
    }

    pub(crate) fn from_valid(factors: Vec<(usize, u64)>) -> PowerWord {
        let mut w = PowerWord::empty();
        for (i, e) in factors {
            w.push(i, e);
        }
        w
    }

    pub fn empty() -> PowerWord {
        PowerWord { factors: Vec::new() }
    }

    pub fn letter(i: usize) -> PowerWord {
        PowerWord::power(i, 1)
    }

    pub fn power(i: usize, e: u64) -> PowerWord {
        PowerWord::from_valid(vec![(i, e)])
    }

    pub fn factors(&self) -> &[(usize, u64)] {
        &self.factors
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of stored factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    /// Length of the expanded word.
    pub fn total_length(&self) -> u128 {
        self.factors.iter().map(|&(_, e)| e as u128).sum()
    }

    pub fn max_index(&self) -> usize {
        self.factors.iter().map(|&(i, _)| i).max().unwrap_or(0)
    }

    pub fn push(&mut self, i: usize, e: u64) {
        if e == 0 {
            return;
        }
        match self.factors.last_mut() {
            Some((j, f)) if *j == i => *f += e,
            _ => self.factors.push((i, e)),
        }
    }

    pub fn append(&mut self, other: &PowerWord) {
        for &(i, e) in &other.factors {
            self.push(i, e);
        }
    }

    pub fn concat(&self, other: &PowerWord) -> PowerWord {
        let mut w = self.clone();
        w.append(other);
        w
    }

    /// `self` repeated `k` times.
    pub fn repeat(&self, k: u64) -> PowerWord {
        if self.factors.len() == 1 {
            let (i, e) = self.factors[0];
            return PowerWord::power(i, e * k);
        }
        let mut w = PowerWord::empty();
        for _ in 0..k {
            w.append(self);
        }
        w
    }

    /// True when every generator `1..=k` occurs.
    pub fn is_full_image(&self, k: usize) -> bool {
        let mut seen = vec![false; k];
        for &(i, _) in &self.factors {
            if i <= k {
                seen[i - 1] = true;
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Renames letters through `map[i − 1]`.
    pub fn relabel(&self, map: &[usize]) -> PowerWord {
        PowerWord::from_valid(self.factors.iter().map(|&(i, e)| (map[i - 1], e)).collect())
    }

    /// Splits at the `pos`-th factor: `(prefix, factor, suffix)`.
    fn split(&self, pos: usize) -> (PowerWord, (usize, u64), PowerWord) {
        (
            PowerWord { factors: self.factors[..pos].to_vec() },
            self.factors[pos],
            PowerWord { factors: self.factors[pos + 1..].to_vec() },
        )
    }
}

impl fmt::Display for PowerWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("ε");
        }
        for (i, e) in &self.factors {
            write!(f, "({i}^{e})")?;
        }
        Ok(())
    }
}

/// Evaluates `w` over `gens` without expanding exponents.
pub fn evaluate_word(w: &PowerWord, gens: &[SA2Element]) -> Result<SA2Element> {
    if w.is_empty() {
        return input("words must be nonempty");
    }
    evaluate_any(w, gens)
}

/// Like [`evaluate_word`], with the empty word evaluating to the identity.
pub(crate) fn evaluate_any(w: &PowerWord, gens: &[SA2Element]) -> Result<SA2Element> {
    let mut acc = SA2Element::identity();
    for &(i, e) in &w.factors {
        let Some(g) = i.checked_sub(1).and_then(|j| gens.get(j)) else {
            return input(format!("generator index {i} out of range 1..={}", gens.len()));
        };
        acc = sa_mul(&acc, &sa_pow(g, e));
    }
    Ok(acc)
}

/// Matrix part of a word over SL(2,Z) generators.
pub fn evaluate_matrix_word(w: &PowerWord, mats: &[SL2]) -> Result<SL2> {
    let mut acc = SL2::identity();
    for &(i, e) in &w.factors {
        let Some(m) = i.checked_sub(1).and_then(|j| mats.get(j)) else {
            return input(format!("generator index {i} out of range 1..={}", mats.len()));
        };
        acc = acc.mul(&m.pow_u(e));
    }
    Ok(acc)
}

/// True iff `w` is full-image and evaluates to `(I, 0)`.
pub fn verify_identity_certificate(w: &PowerWord, gens: &[SA2Element]) -> bool {
    w.is_full_image(gens.len()) && matches!(evaluate_word(w, gens), Ok(e) if e.is_identity())
}

/// `target · g_1 w_1 · g_2 w_2 ⋯ g_K w_K` where `w_i` represents `g_i⁻¹`.
pub fn full_image_word(target: &PowerWord, inverse_witnesses: &[PowerWord]) -> PowerWord {
    let mut w = target.clone();
    for (i, wi) in inverse_witnesses.iter().enumerate() {
        w.push(i + 1, 1);
        w.append(wi);
    }
    w
}

/// Inverse witnesses for every letter occurring in an identity word, by
/// cyclic rotation: `u g^e v = 1` gives `g⁻¹ = g^{e−1} v u`.
pub fn inverse_witnesses_from_identity(w: &PowerWord, k: usize) -> Vec<Option<PowerWord>> {
    let mut out: Vec<Option<PowerWord>> = vec![None; k];
    for pos in 0..w.len() {
        let (u, (i, e), v) = w.split(pos);
        if i > k || out[i - 1].is_some() {
            continue;
        }
        let mut inv = PowerWord::power(i, e - 1);
        inv.append(&v);
        inv.append(&u);
        if inv.is_empty() {
            // the letter itself is the identity
            inv = PowerWord::letter(i);
        }
        out[i - 1] = Some(inv);
    }
    out
}

/// Full-image identity word from any identity word and inverse witnesses.
pub fn identity_full_image(identity: &PowerWord, k: usize) -> Option<PowerWord> {
    let inv = inverse_witnesses_from_identity(identity, k);
    let all: Option<Vec<PowerWord>> = inv.into_iter().collect();
    all.map(|ws| full_image_word(identity, &ws))
}
