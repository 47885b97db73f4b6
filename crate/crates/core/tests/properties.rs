mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use subsquares::base::{idempotent_square, ls_one_big, ls_uniform};
use subsquares::circulant::build_circulant_outline;
use subsquares::compose::{add_on_frequency, add_on_outline};
use subsquares::engine::t_is_admissible;
use subsquares::io::{outline_from_json, outline_to_json, ConstructionJson};
use subsquares::oracle::{find_realization_bruteforce, OracleOutcome, DEFAULT_BUDGET};
use subsquares::{construct_main, exists, lift, reduce, select_t, verify_realization, Existence, Partition};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lifting_inverts_reduction(seed in any::<u64>(), n in 1usize..=14) {
        let mut r = rng(seed);
        let sq = random_latin(n, &mut r);
        let (p, q, s) = (random_partition(n, &mut r), random_partition(n, &mut r), random_partition(n, &mut r));
        let o = reduce(&sq, &p, &q, &s).unwrap();
        prop_assert!(o.validate().is_valid());
        let back = lift(&o).unwrap();
        prop_assert_eq!(reduce(&back, &p, &q, &s).unwrap(), o);
    }

    #[test]
    fn three_equal_largest_parts_always_construct(seed in any::<u64>(), h in 1usize..=6, len in 0usize..=6) {
        let mut r = rng(seed);
        let mut parts = vec![h; 3];
        for _ in 0..len {
            parts.push(rand::Rng::gen_range(&mut r, 1..=h));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let p = Partition::new(parts).unwrap();
        let (sq, cert, trace) = construct_main(&p).unwrap();
        verify_realization(&sq, &p, Some(&cert)).unwrap();
        prop_assert_eq!(&cert, &subsquares::SubsquareCertificate::normal_form(&p));
        let (again, _, trace2) = construct_main(&p).unwrap();
        prop_assert_eq!(again, sq);
        prop_assert_eq!(serde_json::to_string(&trace).unwrap(), serde_json::to_string(&trace2).unwrap());
    }

    #[test]
    fn selected_t_satisfies_every_inequality(seed in any::<u64>()) {
        let (h1, h4, hk, rsum) = random_hypothesis(20, &mut rng(seed));
        let t = select_t(h1, h4, hk, rsum).unwrap();
        prop_assert!(t_is_admissible(h1, h4, hk, rsum, t));
        // h1 itself whenever it is admissible
        prop_assert!(t == h1 || !t_is_admissible(h1, h4, hk, rsum, h1));
    }

    #[test]
    fn circulant_outlines_have_both_properties(seed in any::<u64>()) {
        let p = random_circulant_partition(&mut rng(seed));
        let (o, triples) = build_circulant_outline(&p).unwrap();
        prop_assert!(o.validate().is_valid());
        prop_assert_eq!(audit_circulant(&o, &p, &triples), Ok(()));
    }

    #[test]
    fn add_on_arrays_match_their_frequencies(seed in any::<u64>(), m in 3usize..=7, hm in 1usize..=5) {
        let mut r = rng(seed);
        let hm1 = rand::Rng::gen_range(&mut r, 1..=hm);
        let mut tail = vec![hm1];
        let cap = (m - 1) * (hm + hm1);
        let mut sum = hm1;
        while sum < cap && rand::Rng::gen_bool(&mut r, 0.8) {
            let x = rand::Rng::gen_range(&mut r, 1..=hm1);
            if sum + x > cap {
                break;
            }
            tail.push(x);
            sum += x;
        }
        tail.sort_unstable_by(|a, b| b.cmp(a));
        let a = add_on_outline(m, hm, &tail).unwrap();
        prop_assert!(a.corresponds_to(&add_on_frequency(m, hm, &tail)));
    }

    #[test]
    fn outline_json_round_trips(seed in any::<u64>(), n in 1usize..=10) {
        let mut r = rng(seed);
        let sq = random_latin(n, &mut r);
        let (p, q, s) = (random_partition(n, &mut r), random_partition(n, &mut r), random_partition(n, &mut r));
        let o = reduce(&sq, &p, &q, &s).unwrap();
        prop_assert_eq!(outline_from_json(&outline_to_json(&o)).unwrap(), o);
    }
}

#[test]
fn idempotent_squares_up_to_200() {
    for n in (1..=200).filter(|&n| n != 2) {
        let sq = idempotent_square(n).unwrap();
        assert!(subsquares::is_latin(&sq.to_rows()).unwrap(), "order {n}");
        assert!((0..n).all(|i| sq.get(i, i) == i), "order {n}");
    }
}

#[test]
fn one_big_agrees_with_the_oracle() {
    for m in 1..=9usize {
        for s in 0..=(9 - m).min(m) {
            let mut parts = if s > 0 { vec![s] } else { vec![] };
            parts.extend(vec![1; m]);
            let p = Partition::new(parts).unwrap();
            let built = ls_one_big(s, m);
            let oracle = find_realization_bruteforce(&p, DEFAULT_BUDGET).unwrap();
            match (&built, &oracle) {
                (Ok((sq, cert)), OracleOutcome::Found(_)) => {
                    verify_realization(sq, &p, Some(cert)).unwrap();
                }
                (Err(_), OracleOutcome::None) => {}
                other => panic!("(s={s}, m={m}): {other:?}"),
            }
        }
    }
}

#[test]
fn uniform_squares_verify() {
    for a in 1..=4 {
        for k in (1..=7).filter(|&k| k != 2) {
            let p = Partition::new(vec![a; k]).unwrap();
            let (sq, cert) = ls_uniform(a, k).unwrap();
            verify_realization(&sq, &p, Some(&cert)).unwrap();
            assert!(matches!(exists(&p), Existence::Yes(_)));
        }
    }
}

#[test]
fn construction_json_round_trips() {
    let p = Partition::new(vec![4, 4, 4, 3, 2, 2, 1]).unwrap();
    let (sq, cert, trace) = construct_main(&p).unwrap();
    let j = ConstructionJson::new(&sq, p.parts(), &cert, Some(trace)).unwrap();
    let text = j.to_json();
    let back = ConstructionJson::from_json(&text).unwrap();
    assert_eq!(back.to_json(), text);
}
