//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sa2_core::algebra::{classify, eigen_data, sa_mul, sa_pow, vec2, ElementClass, LineKind, SA2Element, Vec2, SL2};
use sa2_core::cells::{build_scale_case, radical, scale_certificate, scale_criterion};
use sa2_core::exactmath::{rat, QuadNum, Rat};
use sa2_core::oracle::{bfs_semigroup, cross_validate_with, random_sl2, seeded_corpus, CorpusSummary, CrossReport};
use sa2_core::pipeline::{Decision, Instance};
use sa2_core::sl2group::abelian_structure;
use sa2_core::witness::{evaluate_word, scalelim_step, shearlim_step, verify_identity_certificate, PowerWord};
use sa2_core::Caps;

const SEED: u64 = 2024;
const RANDOM_INSTANCES: usize = 320;
const MIN_CURATED: usize = 40;
const ORACLE_DEPTH: usize = 8;
const TIME_BUDGET: Duration = Duration::from_secs(300);
const TWISTED_TRIALS: usize = 100;
const TORSION_TRANSLATIONS: usize = 25;
const LIM_INPUTS: usize = 50;
const ABELIAN_INSTANCES: usize = 30;
const RADICAL_INSTANCES: usize = 50;
const TORSION_SCAN: usize = 4;

fn eps() -> Rat {
    rat(1, 20)
}

fn m(a: i64, b: i64, c: i64, d: i64) -> SL2 {
    SL2::from_i64(a, b, c, d).expect("det 1")
}

fn sa(a: &SL2, x: i64, y: i64) -> SA2Element {
    SA2Element::new(a.clone(), vec2(x, y))
}

fn inst(gens: Vec<SA2Element>) -> Instance {
    Instance::new(gens).expect("nonempty")
}

fn conj(a: &SL2, p: &SL2) -> SL2 {
    p.mul(a).mul(&p.inverse())
}

fn h() -> SL2 {
    m(2, 1, 1, 1)
}

fn u() -> SL2 {
    m(1, 1, 0, 1)
}

fn s() -> SL2 {
    m(0, -1, 1, 0)
}

fn twist() -> SL2 {
    m(-1, 1, 0, -1)
}

fn translation(rng: &mut ChaCha8Rng, bound: i64) -> Vec2 {
    vec2(rng.gen_range(-bound..=bound), rng.gen_range(-bound..=bound))
}

/// Hand-picked instances; every case label and the non-abelian branch occur.
fn curated() -> Vec<(String, Instance)> {
    let (h, u, s, t) = (h(), u(), s(), twist());
    let i = SL2::identity();
    let hi = h.inverse();
    let c = m(1, 0, 1, 1);
    let r6 = m(1, 1, -1, 0);
    let r3 = m(0, -1, 1, -1);
    let mh = h.neg();
    let hc = conj(&h, &c);
    let uc = conj(&u, &m(2, 1, 1, 1));
    let tc = conj(&t, &c);
    let list: Vec<(&str, Vec<SA2Element>)> = vec![
        ("trivial-pair", vec![sa(&i, 1, 0), sa(&i, -1, 0)]),
        ("trivial-basis", vec![sa(&i, 1, 0), sa(&i, 0, 1)]),
        ("trivial-123", vec![sa(&i, 2, 3), sa(&i, -1, 0), sa(&i, 0, -1)]),
        ("trivial-halfplane", vec![sa(&i, 1, 1), sa(&i, -1, 1), sa(&i, 0, 1)]),
        ("trivial-zero", vec![sa(&i, 0, 0)]),
        ("trivial-triangle", vec![sa(&i, 1, 0), sa(&i, 0, 1), sa(&i, -1, -1)]),
        ("torsion-s", vec![sa(&s, 1, 0)]),
        ("torsion-minus-i", vec![sa(&SL2::minus_identity(), 3, -4)]),
        ("torsion-order6", vec![sa(&r6, 2, 1)]),
        ("torsion-order3-pair", vec![sa(&r3, 1, 1), sa(&r3.inverse(), 0, 2)]),
        ("torsion-abelian-sign", vec![sa(&h, 1, 0), sa(&hi.neg(), 0, 1)]),
        ("torsion-with-shear", vec![sa(&s, 0, 1), sa(&u, 1, 0), sa(&u.inverse(), 0, 0)]),
        ("twisted-basic", vec![sa(&t, 1, 0), sa(&t.inverse(), 0, 0)]),
        ("twisted-zero", vec![sa(&t, 0, 0), sa(&t.inverse(), 0, 0)]),
        ("twisted-conjugated", vec![sa(&tc, 3, -2), sa(&tc.inverse(), 7, 1)]),
        ("twisted-big", vec![sa(&t, 5, 7), sa(&t.inverse(), 2, 3)]),
        ("twisted-one-sided", vec![sa(&t, 1, 1)]),
        ("twisted-cubes", vec![sa(&t.pow(3), 0, 1), sa(&t.inverse(), 1, 0)]),
        ("shear-inverse-pair", vec![sa(&u, 0, 1), sa(&u.inverse(), 0, -1)]),
        ("shear-heisenberg-no", vec![sa(&u, 1, 0), sa(&u.inverse(), 0, 0)]),
        ("shear-central-yes", vec![sa(&u, 0, 0), sa(&u.inverse(), 0, 0)]),
        ("shear-one-sided", vec![sa(&u, 0, 1), sa(&u.pow(2), 1, 1)]),
        ("shear-conjugated", vec![sa(&uc, 1, 2), sa(&uc.inverse(), -1, 0), sa(&uc.pow(2), 0, 0)]),
        ("shear-offset", vec![sa(&u, 0, 1), sa(&u.inverse(), 1, -1)]),
        ("inverting-zero", vec![sa(&mh, 0, 0), sa(&mh.inverse(), 0, 0)]),
        ("inverting-a", vec![sa(&mh, 1, 0), sa(&mh.inverse(), 0, 0)]),
        ("inverting-ab", vec![sa(&mh, 1, 1), sa(&mh.inverse(), -1, 2)]),
        ("inverting-conjugated", vec![sa(&conj(&mh, &c), 2, -1), sa(&conj(&mh, &c).inverse(), 0, 3)]),
        ("inverting-one-sided", vec![sa(&mh, 1, 0)]),
        ("scale-inverse-pair", vec![sa(&h, 1, 0), sa(&hi, -1, 1)]),
        ("scale-one-sided", vec![sa(&h, 1, 0), sa(&hi, 0, 0)]),
        ("scale-squares", vec![sa(&h.pow(2), 0, 1), sa(&hi, 2, 0)]),
        ("scale-conjugated", vec![sa(&hc, 1, 1), sa(&hc.inverse(), 0, 0), sa(&hc.inverse(), -1, -1)]),
        ("scale-triple", vec![sa(&h, 0, 1), sa(&hi, 0, 0), sa(&h, 0, -1)]),
        ("scale-positive-only", vec![sa(&h, 1, 1), sa(&h.pow(2), 0, 0)]),
        ("nonabelian-free", vec![sa(&h, 1, 0), sa(&hi, 0, 0), sa(&c.mul(&s), 0, 1), sa(&c.mul(&s).inverse(), 0, 0)]),
        ("nonabelian-su", vec![sa(&s, 0, 0), sa(&u, 1, 0), sa(&u.inverse(), 0, 1)]),
        ("nonabelian-shears", vec![sa(&u, 1, 0), sa(&u.inverse(), 0, 0), sa(&c, 0, 1), sa(&c.inverse(), 0, 0)]),
        ("nonabelian-semigroup", vec![sa(&u, 0, 0), sa(&c, 0, 0)]),
        ("nonabelian-scales", vec![sa(&h, 0, 0), sa(&hi, 1, 0), sa(&hc, 0, 0), sa(&hc.inverse(), 0, 1)]),
        ("matrix-not-group", vec![sa(&u, 0, 0)]),
        ("matrix-not-group-hu", vec![sa(&h, 0, 0), sa(&u, 0, 0)]),
    ];
    list.into_iter().map(|(n, g)| (format!("curated-{n}"), inst(g))).collect()
}

fn report(ok: bool, n: usize, what: &str, detail: String) -> bool {
    println!("{} {n}: {what} ({detail})", if ok { "PASS" } else { "FAIL" });
    ok
}

struct CorpusRun {
    random: CorpusSummary,
    curated: CorpusSummary,
    curated_labels: BTreeSet<String>,
    reports: Vec<(String, Vec<SA2Element>, CrossReport)>,
    elapsed: Duration,
}

fn run_corpus() -> CorpusRun {
    let caps = Caps::default();
    let oracle = Caps::default().with_depth(ORACLE_DEPTH);
    let start = Instant::now();
    let mut random = CorpusSummary::default();
    let mut curated_sum = CorpusSummary::default();
    let mut labels = BTreeSet::new();
    let mut reports = Vec::new();
    for (name, i) in seeded_corpus(SEED, RANDOM_INSTANCES) {
        let r = cross_validate_with(&i, &caps, &oracle);
        random.record(&name, &r);
        reports.push((name, i.generators().to_vec(), r));
    }
    for (name, i) in curated() {
        let r = cross_validate_with(&i, &caps, &oracle);
        curated_sum.record(&name, &r);
        if !matches!(r.decision, Decision::Inconclusive { .. }) {
            labels.insert(r.decision.label().to_string());
        }
        reports.push((name, i.generators().to_vec(), r));
    }
    CorpusRun { random, curated: curated_sum, curated_labels: labels, reports, elapsed: start.elapsed() }
}

fn criterion_1(run: &CorpusRun) -> bool {
    let needed = ["trivial", "torsion", "twisted-inversion", "shear", "inverting-scale", "positive-scale", "non-abelian"];
    let missing: Vec<&str> = needed.iter().copied().filter(|l| !run.curated_labels.contains(*l)).collect();
    let contradictions = run.random.contradictions + run.curated.contradictions;
    for f in run.random.failures.iter().chain(&run.curated.failures) {
        println!("  contradiction: {f}");
    }
    let ok = run.random.instances >= 300
        && run.curated.instances >= MIN_CURATED
        && missing.is_empty()
        && contradictions == 0
        && run.elapsed <= TIME_BUDGET;
    report(
        ok,
        1,
        "oracle agreement",
        format!(
            "{} random + {} curated, {} contradictions, missing cases {:?}, {:.1}s",
            run.random.instances,
            run.curated.instances,
            contradictions,
            missing,
            run.elapsed.as_secs_f64()
        ),
    )
}

fn criterion_2(run: &CorpusRun) -> bool {
    let mut emitted = 0;
    let mut bad = 0;
    for (name, gens, r) in &run.reports {
        if let Some(w) = r.decision.certificate() {
            emitted += 1;
            if !verify_identity_certificate(w, gens) {
                bad += 1;
                println!("  unverified: {name}");
            }
        }
    }
    report(bad == 0 && emitted > 0, 2, "certificates verify", format!("{emitted} emitted, {bad} failed"))
}

fn criterion_3() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let mut bad = 0;
    for _ in 0..TWISTED_TRIALS {
        let p = random_sl2(&mut rng, 4);
        let t = conj(&twist(), &p);
        assert_eq!(classify(&t), ElementClass::TwistedInversion);
        let a = SA2Element::new(t.clone(), translation(&mut rng, 20));
        let b = SA2Element::new(t.inverse(), translation(&mut rng, 20));
        let x = [sa_pow(&a, 2), sa_pow(&b, 3), sa_pow(&a, 2), b.clone()].iter().fold(SA2Element::identity(), |acc, g| sa_mul(&acc, g));
        let w = PowerWord::new(vec![(1, 2), (2, 3), (1, 2), (2, 1)]).expect("valid word");
        let y = evaluate_word(&w, &[a, b]).expect("in range");
        bad += usize::from(!x.is_identity() || x != y);
    }
    report(bad == 0, 3, "twisted-inversion word", format!("{TWISTED_TRIALS} instances, {bad} failed"))
}

fn criterion_4() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let seeds = [(2u64, SL2::minus_identity()), (3, m(0, -1, 1, -1)), (4, s()), (6, m(1, 1, -1, 0))];
    let mut bad = 0;
    let mut total = 0;
    for (order, t) in seeds {
        let p = random_sl2(&mut rng, 3);
        let t = conj(&t, &p);
        for _ in 0..TORSION_TRANSLATIONS {
            total += 1;
            let x = SA2Element::new(t.clone(), translation(&mut rng, 50));
            let proper = (1..order).all(|j| !sa_pow(&x, j).matrix.is_identity());
            bad += usize::from(!sa_pow(&x, order).is_identity() || !proper);
        }
    }
    report(bad == 0, 4, "torsion powers", format!("{total} elements, {bad} failed"))
}

fn qvec(v: &Vec2, d: &BigInt) -> [QuadNum; 2] {
    [QuadNum::rational(Rat::from_integer(v[0].clone()), d), QuadNum::rational(Rat::from_integer(v[1].clone()), d)]
}

fn qdot(x: &[QuadNum; 2], y: &[QuadNum; 2]) -> QuadNum {
    &(&x[0] * &y[0]) + &(&x[1] * &y[1])
}

/// (v·y)² > (1−ε)² |v|² |y|², exactly.
fn cos_squared_holds(v: &[QuadNum; 2], y: &[QuadNum; 2]) -> bool {
    let one = Rat::one();
    let t = (&one - eps()) * (&one - eps());
    let t = QuadNum::rational(t, v[0].d());
    let vy = qdot(v, y);
    (&(&vy * &vy) - &(&(&t * &qdot(v, v)) * &qdot(y, y))).signum() > 0
}

fn criterion_5() -> bool {
    let caps = Caps::default();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let (mut scale_ok, mut shear_ok) = (0, 0);
    let mut scale_n = 0;
    while scale_n < LIM_INPUTS {
        let p = random_sl2(&mut rng, 3);
        let a = conj(&h().pow(rng.gen_range(1..=2)), &p);
        let x = SA2Element::new(a.clone(), translation(&mut rng, 5));
        let y = SA2Element::new(a.inverse(), translation(&mut rng, 5));
        let xt = sa_mul(&x, &y).translation;
        let e = eigen_data(&a).expect("scale");
        let cx = e.coords(&xt);
        if cx[0].is_zero() || cx[1].is_zero() {
            continue;
        }
        scale_n += 1;
        let kind = if scale_n % 2 == 0 { LineKind::Stretching } else { LineKind::Compressing };
        let col = usize::from(kind == LineKind::Compressing);
        let Ok(step) = scalelim_step(&x, &y, kind, &eps(), &caps) else { continue };
        let full = sa_mul(&sa_mul(&x, &evaluate_word(&step.word, &[x.clone(), y.clone()]).unwrap_or_else(|_| SA2Element::identity())), &y);
        let cy = e.coords(&step.y);
        let v = [e.p[0][col].clone(), e.p[1][col].clone()];
        let ok = full.matrix.is_identity()
            && full.translation == step.y
            && cy[0].signum() == cx[0].signum()
            && cy[1].signum() == cx[1].signum()
            && cos_squared_holds(&v, &qvec(&step.y, e.d()));
        scale_ok += usize::from(ok);
    }
    let mut shear_n = 0;
    let two = BigInt::from(2);
    while shear_n < LIM_INPUTS {
        let p = random_sl2(&mut rng, 3);
        let k = if rng.gen_bool(0.5) { 1 } else { -2 };
        let a = conj(&u().pow(k), &p);
        let v0 = p.apply(&vec2(1, 0));
        let w0 = [-v0[1].clone(), v0[0].clone()];
        let x = SA2Element::new(a.clone(), translation(&mut rng, 5));
        let y = SA2Element::new(a.inverse(), translation(&mut rng, 5));
        let xt = sa_mul(&x, &y).translation;
        let xw = &xt[0] * &w0[0] + &xt[1] * &w0[1];
        if xw.is_zero() {
            continue;
        }
        shear_n += 1;
        let Ok(step) = shearlim_step(&x, &y, &eps(), &caps) else { continue };
        let inner = evaluate_word(&step.word, &[x.clone(), y.clone()]).unwrap_or_else(|_| SA2Element::identity());
        let full = sa_mul(&sa_mul(&x, &inner), &y);
        let vy = &v0[0] * &step.y[0] + &v0[1] * &step.y[1];
        // the step's ray is whichever of ±v the output points along
        let v = if vy.is_negative() { [-v0[0].clone(), -v0[1].clone()] } else { v0.clone() };
        let w = [-v[1].clone(), v[0].clone()];
        let side_x = &xt[0] * &w[0] + &xt[1] * &w[1];
        let side_y = &step.y[0] * &w[0] + &step.y[1] * &w[1];
        let ok = full.matrix.is_identity()
            && full.translation == step.y
            && side_x.signum() == side_y.signum()
            && !vy.is_zero()
            && cos_squared_holds(&qvec(&v, &two), &qvec(&step.y, &two));
        shear_ok += usize::from(ok);
    }
    report(
        scale_ok == LIM_INPUTS && shear_ok == LIM_INPUTS,
        5,
        "scalelim/shearlim at ε = 1/20",
        format!("scale {scale_ok}/{LIM_INPUTS}, shear {shear_ok}/{LIM_INPUTS}"),
    )
}

fn scale_data(gens: &[SA2Element]) -> Option<sa2_core::cells::ScaleCaseData> {
    let mats: Vec<SL2> = gens.iter().map(|g| g.matrix.clone()).collect();
    let st = abelian_structure(&mats).ok()?;
    let (g, z) = (st.generator?, st.exponents?);
    (classify(&g) == ElementClass::PositiveScale).then_some(())?;
    build_scale_case(gens, &g, &z).ok()
}

fn criterion_6() -> bool {
    let hh = h();
    let c = m(1, 0, 1, 1);
    let roots = [hh.clone(), conj(&hh, &c), conj(&hh, &s()), conj(&hh, &u()), m(3, 1, 2, 1)];
    let mut groups = Vec::new();
    let mut non_groups = Vec::new();
    for (i, g) in roots.iter().enumerate() {
        let i = i as i64;
        let x = sa(&g.pow(1 + i % 2), i, 1 - i);
        let y = sa(g, 1, i - 2);
        groups.push(vec![x.clone(), x.inverse()]);
        groups.push(vec![x.clone(), x.inverse(), y.clone(), y.inverse()]);
        non_groups.push(vec![sa(g, 1 + i, -i), sa(&g.inverse(), 0, 0)]);
        non_groups.push(vec![sa(&g.pow(2), 0, 0), sa(&g.inverse(), i - 1, 2), sa(&g.inverse(), i - 1, 2)]);
    }
    let oracle = Caps::default().with_depth(ORACLE_DEPTH);
    let mut agree = 0;
    let mut certified = 0;
    let (mut n_groups, mut n_non) = (0, 0);
    for (expect, gens) in groups.iter().map(|g| (true, g)).chain(non_groups.iter().map(|g| (false, g))) {
        let Some(data) = scale_data(gens) else { continue };
        let crit = scale_criterion(&data);
        let bfs = bfs_semigroup(gens, oracle.depth, oracle.norm).map(|r| r.full_image_identity_found).unwrap_or(false);
        if crit == expect {
            if expect {
                n_groups += 1;
            } else {
                n_non += 1;
            }
        }
        agree += usize::from(crit == bfs);
        if crit {
            certified += usize::from(scale_certificate(&data, &Caps::default()).is_ok_and(|w| verify_identity_certificate(&w, gens)));
        }
    }
    let total = groups.len() + non_groups.len();
    report(
        agree == total && n_groups == groups.len() && n_non == non_groups.len() && certified == n_groups,
        6,
        "positive-scale criterion",
        format!("{n_groups} groups, {n_non} non-groups, {agree}/{total} agree, {certified} certificates verified"),
    )
}

/// A nontrivial finite-order element among products of length ≤ 4 over the
/// generators and their inverses.
fn direct_torsion(mats: &[SL2]) -> bool {
    let mut letters = mats.to_vec();
    letters.extend(mats.iter().map(SL2::inverse));
    let mut frontier = vec![SL2::identity()];
    for _ in 0..TORSION_SCAN {
        let mut next = Vec::new();
        for x in &frontier {
            for l in &letters {
                let y = x.mul(l);
                if !y.is_identity() && classify(&y).order().is_some() {
                    return true;
                }
                next.push(y);
            }
        }
        frontier = next;
    }
    false
}

fn criterion_7() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let roots = [h(), u(), h().neg(), twist(), m(3, 1, 2, 1)];
    let (mut ok, mut flagged) = (0, 0);
    for n in 0..ABELIAN_INSTANCES {
        let p = random_sl2(&mut rng, 3);
        let g = conj(&roots[n % roots.len()], &p);
        let k = rng.gen_range(2..=3);
        let mats: Vec<SL2> = (0..k)
            .map(|_| {
                let z = rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 };
                let a = g.pow(z);
                if rng.gen_bool(0.3) { a.neg() } else { a }
            })
            .collect();
        let Ok(st) = abelian_structure(&mats) else { continue };
        let torsion = st.lattice.torsion;
        flagged += usize::from(torsion);
        let flag_ok = torsion == direct_torsion(&mats);
        let powers_ok = match (&st.generator, &st.exponents) {
            (Some(a), Some(z)) => mats.iter().zip(z).all(|(ai, zi)| &a.pow_big(zi) == ai),
            _ => torsion,
        };
        ok += usize::from(flag_ok && powers_ok);
    }
    report(
        ok == ABELIAN_INSTANCES,
        7,
        "abelian torsion flag",
        format!("{ok}/{ABELIAN_INSTANCES} agree, {flagged} with torsion"),
    )
}

fn criterion_8() -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let (mut done, mut ok) = (0, 0);
    while done < RADICAL_INSTANCES {
        let p = random_sl2(&mut rng, 3);
        let g = conj(&h(), &p);
        let k = rng.gen_range(2..=3);
        let gens: Vec<SA2Element> = (0..k)
            .map(|_| {
                let z: i64 = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                SA2Element::new(g.pow(z), translation(&mut rng, 4))
            })
            .collect();
        let Some(data) = scale_data(&gens) else { continue };
        done += 1;
        let fine = data.transformed().iter().enumerate().all(|(i, x)| {
            radical(x, data.z[i], data.n[i], &data.lambda).is_ok_and(|r| &r.pow(data.n[i]) == x)
        });
        ok += usize::from(fine);
    }
    report(ok == RADICAL_INSTANCES, 8, "radical identity", format!("{ok}/{RADICAL_INSTANCES} instances"))
}

fn criterion_9(run: &CorpusRun) -> bool {
    let inconclusive: Vec<&str> = run
        .reports
        .iter()
        .filter(|(_, _, r)| matches!(r.decision, Decision::Inconclusive { .. }))
        .map(|(n, _, _)| n.as_str())
        .collect();
    for n in &inconclusive {
        println!("  inconclusive: {n}");
    }
    report(inconclusive.is_empty(), 9, "no inconclusive at default caps", format!("{} of {}", inconclusive.len(), run.reports.len()))
}

fn main() -> ExitCode {
    let run = run_corpus();
    let results = [
        criterion_1(&run),
        criterion_2(&run),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(&run),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
