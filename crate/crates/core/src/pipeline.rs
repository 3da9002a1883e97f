//! Top-level deciders for the Group Problem and the Identity Problem.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{classify, sa_pow, ElementClass, SA2Element, SL2, Vec2};
use crate::caps::Caps;
use crate::cells::{build_scale_case, combine, scale_criterion, verified_scale_certificate};
use crate::error::{input, Error, Result};
use crate::exactmath::strictly_positive_zero_combo;
use crate::heisenberg::{embed_shear_case, h3_decide};
use crate::sl2group::{analyze_group_detailed, CaseOutcome, GroupAnalysis, GroupCase, GroupnessResult};
use crate::witness::{evaluate_word, free_case_certificate, full_image_word, verify_identity_certificate, PowerWord};

/// A nonempty list of generators `(A_i, a_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Instance {
    generators: Vec<SA2Element>,
}

impl Instance {
    pub fn new(generators: Vec<SA2Element>) -> Result<Instance> {
        if generators.is_empty() {
            return input("an instance needs at least one generator");
        }
        Ok(Instance { generators })
    }

    pub fn generators(&self) -> &[SA2Element] {
        &self.generators
    }

    pub fn matrices(&self) -> Vec<SL2> {
        self.generators.iter().map(|g| g.matrix.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Sub-instance on the given zero-based indices.
    pub fn subset(&self, idx: &[usize]) -> Result<Instance> {
        Instance::new(idx.iter().map(|&i| self.generators[i].clone()).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "decision", rename_all = "kebab-case")]
pub enum Decision {
    IsGroup {
        certificate: Option<PowerWord>,
        case: String,
    },
    NotGroup {
        reason: String,
        case: String,
    },
    Inconclusive {
        caps: Caps,
        stage: String,
    },
}

impl Decision {
    pub fn is_group(&self) -> bool {
        matches!(self, Decision::IsGroup { .. })
    }

    pub fn certificate(&self) -> Option<&PowerWord> {
        match self {
            Decision::IsGroup { certificate, .. } => certificate.as_ref(),
            _ => None,
        }
    }

    /// Case label, or the stage of an inconclusive run.
    pub fn label(&self) -> &str {
        match self {
            Decision::IsGroup { case, .. } | Decision::NotGroup { case, .. } => case,
            Decision::Inconclusive { stage, .. } => stage,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Decision::IsGroup { .. } => 0,
            Decision::NotGroup { .. } => 1,
            Decision::Inconclusive { .. } => 2,
        }
    }
}

fn inconclusive(caps: &Caps, stage: impl Into<String>) -> Decision {
    Decision::Inconclusive { caps: caps.clone(), stage: stage.into() }
}

pub fn decide_group_problem(inst: &Instance, caps: &Caps) -> Decision {
    let analysis = analyze_group_detailed(&inst.matrices(), caps);
    decide_with_analysis(inst, &analysis, caps)
}

/// Dispatch on a precomputed analysis of the matrix parts.
pub fn decide_with_analysis(inst: &Instance, analysis: &GroupAnalysis, caps: &Caps) -> Decision {
    let d = dispatch(inst, analysis, caps);
    match d {
        Decision::IsGroup { certificate: Some(ref w), ref case } if !verify_identity_certificate(w, inst.generators()) => {
            inconclusive(caps, format!("{case}: certificate verification"))
        }
        d => d,
    }
}

fn dispatch(inst: &Instance, analysis: &GroupAnalysis, caps: &Caps) -> Decision {
    let gens = inst.generators();
    let case = match &analysis.outcome {
        CaseOutcome::Inconclusive { caps, stage } => {
            return Decision::Inconclusive { caps: caps.clone(), stage: stage.clone() };
        }
        CaseOutcome::Decided(c) => c,
    };
    let label = case.label().to_string();
    let witnesses = match &analysis.groupness {
        GroupnessResult::Yes(ws) => ws.clone(),
        GroupnessResult::No(r) => return Decision::NotGroup { reason: r.clone(), case: label },
        GroupnessResult::Inconclusive(c) => return inconclusive(c, "matrix-group"),
    };
    let stage_err = |stage: &str, e: Error| inconclusive(caps, format!("{stage}: {e}"));
    match case {
        GroupCase::NotAGroup => Decision::NotGroup { reason: "the matrix semigroup is not a group".into(), case: label },
        GroupCase::Trivial => case_trivial(gens).unwrap_or_else(|e| stage_err("trivial", e)),
        GroupCase::ContainsTorsion => match torsion_certificate(gens, analysis, &witnesses) {
            Ok(w) => Decision::IsGroup { certificate: Some(w), case: label },
            Err(e) => stage_err("torsion-certificate", e),
        },
        GroupCase::NonAbelianInfinite => {
            Decision::IsGroup { certificate: free_case_certificate(gens, &witnesses, caps), case: label }
        }
        GroupCase::CyclicBy { class, generator, exponents } => match class {
            ElementClass::TwistedInversion | ElementClass::InvertingScale => {
                let words = analysis.structure.as_ref().and_then(|s| s.coefficients.as_ref()).and_then(|x| {
                    let n = analysis.relation.as_ref()?;
                    let neg: Vec<BigInt> = x.iter().map(|v| -v).collect();
                    Some((exponent_word(x, n)?, exponent_word(&neg, n)?))
                });
                let Some((wa, wb)) = words else {
                    return inconclusive(caps, "cyclic-words");
                };
                let r = if *class == ElementClass::TwistedInversion {
                    case_twisted_inversion_certificate(gens, &wa, &wb)
                } else {
                    case_inverting_scale_certificate(gens, &wa, &wb, caps)
                };
                match r {
                    Ok(w) => Decision::IsGroup { certificate: Some(w), case: label },
                    Err(e) => stage_err(&label, e),
                }
            }
            ElementClass::Shear => match embed_shear_case(gens, generator) {
                Ok(h) => match h3_decide(&h, caps) {
                    (GroupnessResult::Yes(_), w) => Decision::IsGroup { certificate: w, case: label },
                    (GroupnessResult::No(r), _) => Decision::NotGroup { reason: r, case: label },
                    (GroupnessResult::Inconclusive(c), _) => inconclusive(&c, "heisenberg"),
                },
                Err(e) => stage_err("heisenberg", e),
            },
            ElementClass::PositiveScale => match build_scale_case(gens, generator, exponents) {
                Ok(data) => {
                    if !scale_criterion(&data) {
                        return Decision::NotGroup {
                            reason: format!(
                                "the lineality space {:?} of the cell cone misses a required cell",
                                data.lineality()
                            ),
                            case: label,
                        };
                    }
                    match verified_scale_certificate(&data, caps) {
                        Ok(w) => Decision::IsGroup { certificate: Some(w), case: label },
                        Err(e) => stage_err("scale-certificate", e),
                    }
                }
                Err(e) => stage_err("positive-scale", e),
            },
            _ => inconclusive(caps, "dispatch"),
        },
    }
}

/// `Π (i, x_i + c N_i)` with the least `c ≥ 0` making every exponent positive.
pub fn exponent_word(x: &[BigInt], relation: &[BigInt]) -> Option<PowerWord> {
    if x.len() != relation.len() || relation.iter().any(|n| !n.is_positive()) {
        return None;
    }
    let one = BigInt::one();
    let mut c = BigInt::zero();
    for (xi, ni) in x.iter().zip(relation) {
        // need xi + c·ni ≥ 1
        let need = (&one - xi).div_ceil(ni);
        if need > c {
            c = need;
        }
    }
    let f: Option<Vec<(usize, u64)>> = x
        .iter()
        .zip(relation)
        .enumerate()
        .map(|(i, (xi, ni))| Some((i + 1, (xi + &c * ni).to_u64()?)))
        .collect();
    Some(PowerWord::from_valid(f?))
}

/// Trivial case: every matrix part is `I`.
pub fn case_trivial(gens: &[SA2Element]) -> Result<Decision> {
    if gens.is_empty() {
        return input("empty generator list");
    }
    if gens.iter().any(|g| !g.matrix.is_identity()) {
        return input("the trivial case needs identity matrix parts");
    }
    let vectors: Vec<Vec<BigInt>> = gens.iter().map(|g| g.translation.to_vec()).collect();
    Ok(match strictly_positive_zero_combo(&vectors)? {
        Some(n) => {
            let f: Option<Vec<(usize, u64)>> =
                n.iter().enumerate().map(|(i, x)| Some((i + 1, x.to_u64()?))).collect();
            let f = f.ok_or_else(|| Error::Resource("relation too large".into()))?;
            Decision::IsGroup { certificate: Some(PowerWord::from_valid(f)), case: "trivial".into() }
        }
        None => Decision::NotGroup {
            reason: "the translations admit no strictly positive zero combination".into(),
            case: "trivial".into(),
        },
    })
}

/// `word^m` for a full-image word evaluating to `(T, t)` with `T` of order `m`.
pub fn case_torsion_certificate(gens: &[SA2Element], word: &PowerWord, m: u64) -> Result<PowerWord> {
    if ![2, 3, 4, 6].contains(&m) {
        return input(format!("torsion order {m} is not one of 2, 3, 4, 6"));
    }
    if !word.is_full_image(gens.len()) {
        return input("the torsion word is not full-image");
    }
    let x = evaluate_word(word, gens)?;
    if classify(&x.matrix).order() != Some(m) {
        return input(format!("{} does not have order {m}", x.matrix));
    }
    Ok(word.repeat(m))
}

fn torsion_certificate(gens: &[SA2Element], analysis: &GroupAnalysis, witnesses: &[PowerWord]) -> Result<PowerWord> {
    if analysis.closure.is_some() {
        let i = gens
            .iter()
            .position(|g| !g.matrix.is_identity())
            .ok_or_else(|| Error::Degenerate("no torsion generator".into()))?;
        let w = full_image_word(&PowerWord::letter(i + 1), witnesses);
        let m = classify(&gens[i].matrix).order().expect("finite group element");
        return case_torsion_certificate(gens, &w, m);
    }
    let s = analysis.structure.as_ref().ok_or_else(|| Error::Degenerate("missing abelian structure".into()))?;
    let n = analysis.relation.as_ref().ok_or_else(|| Error::Degenerate("missing positive relation".into()))?;
    let x = s
        .lattice
        .saturation
        .basis()
        .iter()
        .find(|v| !s.lattice.lambda.contains(v))
        .ok_or_else(|| Error::Degenerate("saturation equals the relation lattice".into()))?;
    let w = exponent_word(x, n).ok_or_else(|| Error::Resource("exponent word too large".into()))?;
    case_torsion_certificate(gens, &w, 2)
}

fn check_pair(gens: &[SA2Element], wa: &PowerWord, wb: &PowerWord, class: ElementClass) -> Result<(SA2Element, SA2Element)> {
    let a = evaluate_word(wa, gens)?;
    let b = evaluate_word(wb, gens)?;
    if classify(&a.matrix) != class {
        return input(format!("{} is not a {}", a.matrix, class.label()));
    }
    if b.matrix != a.matrix.inverse() {
        return input("the second word does not represent the inverse matrix");
    }
    if !wa.concat(wb).is_full_image(gens.len()) {
        return input("the words are not jointly full-image");
    }
    Ok((a, b))
}

/// `wA² wB³ wA² wB`, using `(A + I)² = 0`.
pub fn case_twisted_inversion_certificate(gens: &[SA2Element], wa: &PowerWord, wb: &PowerWord) -> Result<PowerWord> {
    check_pair(gens, wa, wb, ElementClass::TwistedInversion)?;
    Ok(wa.repeat(2).concat(&wb.repeat(3)).concat(&wa.repeat(2)).concat(wb))
}

/// Identity word from `(A, a)` and `(A⁻¹, b)` with `A` an inverting scale,
/// through the loops `v_m = wA^m wB^m` and `w_m = wB^m wA^m`.
pub fn case_inverting_scale_certificate(
    gens: &[SA2Element],
    wa: &PowerWord,
    wb: &PowerWord,
    caps: &Caps,
) -> Result<PowerWord> {
    let (a, b) = check_pair(gens, wa, wb, ElementClass::InvertingScale)?;
    let direct = wa.concat(wb);
    if evaluate_word(&direct, gens)?.is_identity() {
        return Ok(direct);
    }
    let k = gens.len();
    let mut m = 1u64;
    for _ in 0..=caps.doublings {
        let mut pool: Vec<(PowerWord, Vec2)> = Vec::new();
        for mm in [m, m + 1] {
            let (am, bm) = (sa_pow(&a, mm), sa_pow(&b, mm));
            let v = crate::algebra::sa_mul(&am, &bm);
            let w = crate::algebra::sa_mul(&bm, &am);
            debug_assert!(v.matrix.is_identity() && w.matrix.is_identity());
            pool.push((wa.repeat(mm).concat(&wb.repeat(mm)), v.translation));
            pool.push((wb.repeat(mm).concat(&wa.repeat(mm)), w.translation));
        }
        if let Some((w, _)) = pool.iter().find(|(_, t)| t.iter().all(Zero::is_zero)) {
            return Ok(w.clone());
        }
        if let Some(w) = combine(&pool, k, caps)? {
            return Ok(w);
        }
        m = m.checked_mul(2).ok_or_else(|| Error::Resource("loop exponent overflow".into()))?;
    }
    Err(Error::Resource(format!("inverting-scale search exceeded {} doublings", caps.doublings)))
}

/// Outcome of the Identity Problem.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "identity", rename_all = "kebab-case")]
pub enum IdentityDecision {
    /// `subset` (1-based) generates a group; the certificate uses the
    /// instance's own indices.
    Present {
        subset: Vec<usize>,
        certificate: Option<PowerWord>,
        case: String,
    },
    Absent {
        subsets_checked: usize,
    },
    Inconclusive {
        caps: Caps,
        stage: String,
        subset: Vec<usize>,
    },
}

impl IdentityDecision {
    pub fn exit_code(&self) -> i32 {
        match self {
            IdentityDecision::Present { .. } => 0,
            IdentityDecision::Absent { .. } => 1,
            IdentityDecision::Inconclusive { .. } => 2,
        }
    }

    pub fn is_present(&self) -> bool {
        matches!(self, IdentityDecision::Present { .. })
    }
}

fn subsets_of_size(k: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, k: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..k {
            cur.push(i);
            go(i + 1, k, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, k, r, &mut Vec::with_capacity(r), &mut out);
    out
}

/// Some nonempty subset generates a group iff the identity is in the semigroup.
pub fn decide_identity_problem(inst: &Instance, caps: &Caps) -> Result<IdentityDecision> {
    let k = inst.len();
    if k > caps.subsets {
        return Err(Error::Resource(format!("{k} generators exceed the subset cap {}", caps.subsets)));
    }
    let mut memo: HashMap<Vec<SL2>, GroupAnalysis> = HashMap::new();
    let mut first_inconclusive: Option<(Caps, String, Vec<usize>)> = None;
    let mut checked = 0usize;
    for r in 1..=k {
        for idx in subsets_of_size(k, r) {
            checked += 1;
            let sub = inst.subset(&idx)?;
            let mats = sub.matrices();
            let analysis = memo.entry(mats.clone()).or_insert_with(|| analyze_group_detailed(&mats, caps));
            let one_based: Vec<usize> = idx.iter().map(|i| i + 1).collect();
            match decide_with_analysis(&sub, analysis, caps) {
                Decision::IsGroup { certificate, case } => {
                    return Ok(IdentityDecision::Present {
                        certificate: certificate.map(|w| w.relabel(&one_based)),
                        subset: one_based,
                        case,
                    });
                }
                Decision::NotGroup { .. } => {}
                Decision::Inconclusive { caps, stage } => {
                    if first_inconclusive.is_none() {
                        first_inconclusive = Some((caps, stage, one_based));
                    }
                }
            }
        }
    }
    Ok(match first_inconclusive {
        Some((caps, stage, subset)) => IdentityDecision::Inconclusive { caps, stage, subset },
        None => IdentityDecision::Absent { subsets_checked: checked },
    })
}
