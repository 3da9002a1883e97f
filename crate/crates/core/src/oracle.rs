//! Brute-force semigroup enumeration, seeded random instances and the
//! cross-validation harness.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{sa_mul, SA2Element, SL2};
use crate::caps::Caps;
use crate::error::{input, Error, Result};
use crate::pipeline::{decide_group_problem, Decision, Instance};
use crate::witness::{verify_identity_certificate, PowerWord};

pub(crate) struct SearchOutcome {
    pub identity_word: Option<PowerWord>,
    pub full_image_word: Option<PowerWord>,
    pub elements_visited: usize,
    pub depth_reached: usize,
}

/// Breadth-first search over `(element, letter mask)` states. Products are
/// extended on the right; states failing `within` are pruned.
pub(crate) fn product_search<T, M, I, W>(
    gens: &[T],
    mul: M,
    is_identity: I,
    within: W,
    depth: usize,
    states: usize,
    stop_on_full: bool,
) -> Result<SearchOutcome>
where
    T: Clone + Eq + Hash,
    M: Fn(&T, &T) -> T,
    I: Fn(&T) -> bool,
    W: Fn(&T) -> bool,
{
    let k = gens.len();
    if k == 0 {
        return input("empty generator list");
    }
    if k > 64 {
        return input("at most 64 generators are supported");
    }
    let full: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut out = SearchOutcome { identity_word: None, full_image_word: None, elements_visited: 0, depth_reached: 0 };
    let mut nodes: Vec<(usize, usize)> = Vec::new();
    let mut seen: HashSet<(T, u64)> = HashSet::new();
    let mut elements: HashSet<T> = HashSet::new();
    let mut frontier: Vec<(usize, T, u64)> = Vec::new();

    let word_of = |nodes: &[(usize, usize)], mut id: usize| {
        let mut letters = Vec::new();
        loop {
            let (parent, letter) = nodes[id];
            letters.push((letter, 1));
            if parent == usize::MAX {
                break;
            }
            id = parent;
        }
        letters.reverse();
        PowerWord::from_valid(letters)
    };

    for level in 1..=depth {
        let mut next = Vec::new();
        let candidates: Vec<(usize, T, u64)> = if level == 1 {
            gens.iter().enumerate().map(|(i, g)| (usize::MAX, g.clone(), 1u64 << i)).collect()
        } else {
            let mut c = Vec::new();
            for (id, x, mask) in &frontier {
                for (i, g) in gens.iter().enumerate() {
                    c.push((*id, mul(x, g), mask | (1u64 << i)));
                }
            }
            c
        };
        for (idx, (parent, x, mask)) in candidates.into_iter().enumerate() {
            if !within(&x) {
                continue;
            }
            let key = (x, mask);
            if seen.contains(&key) {
                continue;
            }
            if seen.len() >= states {
                return Err(Error::Resource(format!("search exceeded {states} states")));
            }
            let (x, mask) = key;
            let letter = if level == 1 { idx + 1 } else { idx % k + 1 };
            nodes.push((parent, letter));
            let id = nodes.len() - 1;
            seen.insert((x.clone(), mask));
            if !elements.contains(&x) {
                elements.insert(x.clone());
            }
            out.depth_reached = level;
            if is_identity(&x) {
                if out.identity_word.is_none() {
                    out.identity_word = Some(word_of(&nodes, id));
                }
                if mask == full && out.full_image_word.is_none() {
                    out.full_image_word = Some(word_of(&nodes, id));
                    if stop_on_full {
                        out.elements_visited = elements.len();
                        return Ok(out);
                    }
                }
            }
            next.push((id, x, mask));
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    out.elements_visited = elements.len();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub identity_found: bool,
    pub full_image_identity_found: bool,
    pub elements_visited: usize,
    pub depth_reached: usize,
    pub caps: Caps,
    /// Shortest full-image identity word found, else the shortest identity word.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<PowerWord>,
}

/// Semigroup enumeration with the given depth and norm caps.
pub fn bfs_semigroup(gens: &[SA2Element], depth: usize, norm: u64) -> Result<OracleReport> {
    bfs_semigroup_with(gens, &Caps { depth, norm, ..Caps::default() })
}

pub fn bfs_semigroup_with(gens: &[SA2Element], caps: &Caps) -> Result<OracleReport> {
    let norm = BigInt::from(caps.norm);
    let s = product_search(
        gens,
        sa_mul,
        SA2Element::is_identity,
        |x: &SA2Element| x.max_abs() <= norm,
        caps.depth,
        caps.states,
        false,
    )?;
    Ok(OracleReport {
        identity_found: s.identity_word.is_some(),
        full_image_identity_found: s.full_image_word.is_some(),
        elements_visited: s.elements_visited,
        depth_reached: s.depth_reached,
        caps: caps.clone(),
        witness: s.full_image_word.or(s.identity_word),
    })
}

/// Steering for [`random_instance`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassMix {
    Trivial,
    Torsion,
    TwistedInversion,
    Shear,
    InvertingScale,
    PositiveScale,
    NonAbelian,
    Any,
}

impl ClassMix {
    pub const ALL: [ClassMix; 8] = [
        ClassMix::Trivial,
        ClassMix::Torsion,
        ClassMix::TwistedInversion,
        ClassMix::Shear,
        ClassMix::InvertingScale,
        ClassMix::PositiveScale,
        ClassMix::NonAbelian,
        ClassMix::Any,
    ];

    pub fn label(self) -> &'static str {
        match self {
            ClassMix::Trivial => "trivial",
            ClassMix::Torsion => "torsion",
            ClassMix::TwistedInversion => "twisted-inversion",
            ClassMix::Shear => "shear",
            ClassMix::InvertingScale => "inverting-scale",
            ClassMix::PositiveScale => "positive-scale",
            ClassMix::NonAbelian => "non-abelian",
            ClassMix::Any => "any",
        }
    }
}

impl fmt::Display for ClassMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for ClassMix {
    type Err = Error;

    fn from_str(s: &str) -> Result<ClassMix> {
        ClassMix::ALL
            .into_iter()
            .find(|m| m.label() == s)
            .ok_or_else(|| Error::Input(format!("unknown class mix {s:?}")))
    }
}

/// At most this many elementary factors per random matrix.
pub const MAX_FACTORS: usize = 4;

fn elementary() -> [SL2; 5] {
    let m = |a, b, c, d| SL2::from_i64(a, b, c, d).expect("det 1");
    [m(1, 1, 0, 1), m(1, -1, 0, 1), m(1, 0, 1, 1), m(1, 0, -1, 1), m(0, -1, 1, 0)]
}

/// Product of at most `len` random elementary matrices.
pub fn random_sl2<R: Rng>(rng: &mut R, len: usize) -> SL2 {
    let e = elementary();
    let n = rng.gen_range(0..=len);
    (0..n).fold(SL2::identity(), |acc, _| acc.mul(e.choose(rng).expect("nonempty")))
}

fn conjugate(a: &SL2, p: &SL2) -> SL2 {
    p.mul(a).mul(&p.inverse())
}

fn cyclic_exponents<R: Rng>(rng: &mut R, k: usize, range: i64) -> Vec<i64> {
    let mut z: Vec<i64> = (0..k)
        .map(|_| {
            let v = rng.gen_range(1..=range);
            if rng.gen_bool(0.5) { v } else { -v }
        })
        .collect();
    if k >= 2 && rng.gen_bool(0.5) && z[0].signum() == z[k - 1].signum() {
        z[k - 1] = -z[k - 1];
    }
    z
}

/// Deterministic random instance for a fixed seed. Matrix parts are built from
/// at most [`MAX_FACTORS`] elementary factors; translations lie in
/// `[−bound, bound]²`.
pub fn random_instance(k: usize, bound: i64, mix: ClassMix, seed: u64) -> Instance {
    let k = k.max(1);
    let bound = bound.abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mix = if mix == ClassMix::Any {
        *ClassMix::ALL[..7].choose(&mut rng).expect("nonempty")
    } else {
        mix
    };
    let m = |a, b, c, d| SL2::from_i64(a, b, c, d).expect("det 1");
    let h = m(2, 1, 1, 1);
    let powers = |rng: &mut ChaCha8Rng, g: SL2, range: i64| -> Vec<SL2> {
        let p = random_sl2(rng, 2);
        let g = conjugate(&g, &p);
        cyclic_exponents(rng, k, range).into_iter().map(|z| g.pow(z)).collect()
    };
    let mats: Vec<SL2> = match mix {
        ClassMix::Trivial => vec![SL2::identity(); k],
        ClassMix::Torsion => {
            let t = [m(0, -1, 1, 0), m(0, -1, 1, 1), m(-1, -1, 1, 0), SL2::minus_identity()]
                .choose(&mut rng)
                .expect("nonempty")
                .clone();
            powers(&mut rng, t, 3)
        }
        ClassMix::TwistedInversion => powers(&mut rng, m(-1, 1, 0, -1), 2),
        ClassMix::Shear => powers(&mut rng, m(1, 1, 0, 1), 2),
        ClassMix::InvertingScale => powers(&mut rng, h.neg(), 1),
        ClassMix::PositiveScale => powers(&mut rng, h, 1),
        ClassMix::NonAbelian | ClassMix::Any => (0..k).map(|_| random_sl2(&mut rng, MAX_FACTORS)).collect(),
    };
    let generators = mats
        .into_iter()
        .map(|a| {
            let t = [BigInt::from(rng.gen_range(-bound..=bound)), BigInt::from(rng.gen_range(-bound..=bound))];
            SA2Element::new(a, t)
        })
        .collect();
    Instance::new(generators).expect("k ≥ 1")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossReport {
    pub decision: Decision,
    pub oracle: Option<OracleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle_error: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contradiction: Option<String>,
}

impl CrossReport {
    pub fn is_contradiction(&self) -> bool {
        self.contradiction.is_some()
    }
}

pub fn cross_validate(inst: &Instance, caps: &Caps) -> CrossReport {
    cross_validate_with(inst, caps, caps)
}

/// Cross-validation with separate caps for the decider and the oracle.
pub fn cross_validate_with(inst: &Instance, caps: &Caps, oracle_caps: &Caps) -> CrossReport {
    let decision = decide_group_problem(inst, caps);
    let (oracle, oracle_error) = match bfs_semigroup_with(inst.generators(), oracle_caps) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let contradiction = match &decision {
        Decision::NotGroup { .. } => match &oracle {
            Some(r) if r.full_image_identity_found => Some(format!(
                "decided not a group, but the oracle found the full-image identity word {}",
                r.witness.as_ref().map(ToString::to_string).unwrap_or_default()
            )),
            _ => None,
        },
        Decision::IsGroup { certificate: Some(w), .. } => {
            if verify_identity_certificate(w, inst.generators()) {
                None
            } else {
                Some(format!("certificate {w} does not verify"))
            }
        }
        Decision::IsGroup { certificate: None, case } if case != "non-abelian" => {
            Some(format!("no certificate emitted in the {case} case"))
        }
        _ => None,
    };
    CrossReport { decision, oracle, oracle_error, contradiction }
}

/// Aggregate over many cross-validations.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSummary {
    pub instances: usize,
    pub is_group: usize,
    pub not_group: usize,
    pub inconclusive: usize,
    pub certificates: usize,
    pub contradictions: usize,
    pub by_case: HashMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
}

impl CorpusSummary {
    pub fn record(&mut self, name: &str, r: &CrossReport) {
        self.instances += 1;
        match &r.decision {
            Decision::IsGroup { certificate, case } => {
                self.is_group += 1;
                self.certificates += usize::from(certificate.is_some());
                *self.by_case.entry(case.clone()).or_default() += 1;
            }
            Decision::NotGroup { case, .. } => {
                self.not_group += 1;
                *self.by_case.entry(case.clone()).or_default() += 1;
            }
            Decision::Inconclusive { stage, .. } => {
                self.inconclusive += 1;
                *self.by_case.entry(format!("inconclusive:{stage}")).or_default() += 1;
            }
        }
        if let Some(c) = &r.contradiction {
            self.contradictions += 1;
            self.failures.push(format!("{name}: {c}"));
        }
    }
}

/// Seeded corpus of `count` random instances, cycling through the class mixes.
pub fn seeded_corpus(seed: u64, count: usize) -> Vec<(String, Instance)> {
    (0..count)
        .map(|i| {
            let mix = ClassMix::ALL[i % ClassMix::ALL.len()];
            let k = 1 + (i / ClassMix::ALL.len()) % 3;
            let s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64);
            (format!("seed{seed}-{i}-{mix}-k{k}"), random_instance(k, 2, mix, s))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{classify, vec2, ElementClass};

    fn el(a: i64, b: i64, c: i64, d: i64, x: i64, y: i64) -> SA2Element {
        SA2Element::new(SL2::from_i64(a, b, c, d).unwrap(), vec2(x, y))
    }

    #[test]
    fn enumeration_examples() {
        let r = bfs_semigroup(&[el(1, 1, 0, 1, 0, 0)], 3, 1_000_000).unwrap();
        assert!(!r.identity_found);
        assert_eq!(r.elements_visited, 3);
        let r = bfs_semigroup(&[el(0, -1, 1, 0, 0, 0)], 4, 1_000_000).unwrap();
        assert!(r.full_image_identity_found);
        let r = bfs_semigroup(&[el(1, 0, 0, 1, 1, 0), el(1, 0, 0, 1, -1, 0)], 2, 1_000_000).unwrap();
        assert!(r.full_image_identity_found);
        assert!(bfs_semigroup(&[], 2, 10).is_err());
    }

    #[test]
    fn random_instances() {
        for mix in ClassMix::ALL {
            assert_eq!(random_instance(3, 2, mix, 7), random_instance(3, 2, mix, 7));
        }
        let t = random_instance(3, 2, ClassMix::Trivial, 1);
        assert!(t.generators().iter().all(|g| g.matrix.is_identity()));
        for seed in 0..20 {
            let p = random_instance(3, 2, ClassMix::PositiveScale, seed);
            assert!(p
                .generators()
                .iter()
                .all(|g| classify(&g.matrix) == ElementClass::PositiveScale));
        }
        assert_eq!("twisted-inversion".parse::<ClassMix>().unwrap(), ClassMix::TwistedInversion);
    }
}
