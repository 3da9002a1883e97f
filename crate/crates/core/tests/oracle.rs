use num_bigint::BigInt;
use proptest::prelude::*;
use sa2_core::algebra::{sa_mul, vec2, SA2Element, SL2};
use sa2_core::oracle::{bfs_semigroup, random_instance, seeded_corpus, ClassMix};
use sa2_core::witness::{evaluate_word, verify_identity_certificate};

fn m(a: i64, b: i64, c: i64, d: i64) -> SL2 {
    SL2::from_i64(a, b, c, d).unwrap()
}

/// Every word of length ≤ depth whose prefixes stay within the norm:
/// (some word is the identity, some full-image word is the identity).
fn words(gens: &[SA2Element], depth: usize, norm: u64) -> (bool, bool) {
    let k = gens.len();
    let cap = BigInt::from(norm);
    let mut found = (false, false);
    let mut stack: Vec<(SA2Element, u32, usize)> = Vec::new();
    for (i, g) in gens.iter().enumerate() {
        if g.max_abs() <= cap {
            stack.push((g.clone(), 1 << i, 1));
        }
    }
    while let Some((x, mask, len)) = stack.pop() {
        if x.is_identity() {
            found.0 = true;
            found.1 |= mask == (1 << k) - 1;
        }
        if len == depth {
            continue;
        }
        for (i, g) in gens.iter().enumerate() {
            let y = sa_mul(&x, g);
            if y.max_abs() <= cap {
                stack.push((y, mask | (1 << i), len + 1));
            }
        }
    }
    found
}

fn element() -> impl Strategy<Value = SA2Element> {
    let mats = vec![m(1, 0, 0, 1), m(0, -1, 1, 0), m(0, 1, -1, 0), m(1, 1, 0, 1), m(1, -1, 0, 1), m(-1, 0, 0, -1), m(0, -1, 1, 1)];
    (prop::sample::select(mats), -2i64..=2, -2i64..=2).prop_map(|(a, x, y)| SA2Element::new(a, vec2(x, y)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn search_is_exhaustive(gens in prop::collection::vec(element(), 1..=2), depth in 1usize..=6, norm in 2u64..=6) {
        let r = bfs_semigroup(&gens, depth, norm).unwrap();
        let (any, full) = words(&gens, depth, norm);
        prop_assert_eq!(r.identity_found, any);
        prop_assert_eq!(r.full_image_identity_found, full);
        if let Some(w) = &r.witness {
            prop_assert!(evaluate_word(w, &gens).unwrap().is_identity());
            prop_assert!(w.total_length() <= depth as u128);
            if full {
                prop_assert!(verify_identity_certificate(w, &gens));
            }
        }
    }

    #[test]
    fn monotone_in_caps(gens in prop::collection::vec(element(), 1..=3), depth in 1usize..=5, norm in 2u64..=5) {
        let small = bfs_semigroup(&gens, depth, norm).unwrap();
        let deeper = bfs_semigroup(&gens, depth + 1, norm).unwrap();
        let wider = bfs_semigroup(&gens, depth, norm + 3).unwrap();
        for big in [&deeper, &wider] {
            prop_assert!(!small.identity_found || big.identity_found);
            prop_assert!(!small.full_image_identity_found || big.full_image_identity_found);
            prop_assert!(small.elements_visited <= big.elements_visited);
        }
    }

    #[test]
    fn instances_are_reproducible(seed in any::<u64>(), k in 1usize..=3, i in 0usize..8) {
        let mix = ClassMix::ALL[i];
        let a = random_instance(k, 2, mix, seed);
        let b = random_instance(k, 2, mix, seed);
        prop_assert_eq!(a.generators(), b.generators());
        prop_assert_eq!(a.len(), k);
        prop_assert!(a.generators().iter().all(|g| g.translation.iter().all(|t| t.magnitude() <= &2u32.into())));
    }
}

#[test]
fn corpus_shape() {
    let c = seeded_corpus(7, 48);
    assert_eq!(c.len(), 48);
    for (i, (name, inst)) in c.iter().enumerate() {
        assert!(name.contains(ClassMix::ALL[i % 8].label()), "{name}");
        assert_eq!(inst.len(), 1 + (i / 8) % 3);
    }
    let trivial = &c[0].1;
    assert!(trivial.matrices().iter().all(SL2::is_identity));
    assert_eq!(seeded_corpus(7, 48), c);
}
