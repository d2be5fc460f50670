use bsgkit::exact::{fmt_rational, int, parse_rational, rational};
use bsgkit::extraction::{measured_k, octopus_extract};
use bsgkit::octopus::{leg_count, octopus_count_exact, octopus_count_relaxed, Disjointness};
use bsgkit::oracle::brute_force_best_subsets;
use bsgkit::sumset::{iterated_sumset, sumset};
use bsgkit::{gen_instance, ElemSet, Family, GenConfig, GroupSpec, Instance, Settings};
use num_bigint::BigUint;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        Just(Family::Complete),
        (2i64..=8).prop_map(|k| Family::RandomDensity { k: rational(k, 2) }),
        (1i64..=4).prop_map(|a| Family::Planted {
            ap_fraction: rational(a, 4),
            target_c: int(2),
        }),
        (0i64..=20).prop_map(|d| Family::Dense { delta: rational(d, 100) }),
    ]
}

fn config() -> impl Strategy<Value = GenConfig> {
    (2usize..=3, 2usize..=6, any::<u64>(), family(), prop::bool::ANY).prop_map(|(r, n, seed, family, cyclic)| {
        let group = if cyclic { GroupSpec::cyclic(17).unwrap() } else { GroupSpec::integers() };
        GenConfig::uniform(r, n, group, seed, family)
    })
}

fn first_support(inst: &Instance, pick: &[usize]) -> Vec<usize> {
    inst.part_sizes().iter().zip(pick).map(|(&n, &p)| p % n).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generation_is_deterministic(cfg in config()) {
        let a = gen_instance(&cfg).unwrap();
        let b = gen_instance(&cfg).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert_eq!(Instance::from_json(&a.to_json()).unwrap().to_json(), a.to_json());
    }

    #[test]
    fn generator_guarantees(cfg in config()) {
        let inst = gen_instance(&cfg).unwrap();
        let volume: usize = cfg.sizes.iter().product();
        match &cfg.family {
            Family::RandomDensity { k } => prop_assert!(measured_k(&inst).unwrap() <= *k),
            Family::Dense { delta } => {
                let need = ((int(1) - delta) * int(volume)).ceil().to_integer();
                prop_assert_eq!(inst.hypergraph().edge_count(), usize::try_from(need).unwrap());
            }
            _ => {}
        }
    }

    #[test]
    fn counts_are_ordered(cfg in config(), pick in prop::collection::vec(0usize..8, 3)) {
        let inst = gen_instance(&cfg).unwrap();
        let h = inst.hypergraph();
        let s = first_support(&inst, &pick);
        let relaxed = octopus_count_relaxed(h, &s).unwrap();
        let named = octopus_count_exact(h, &s, Disjointness::NamedOnly, u64::MAX).unwrap();
        let full = octopus_count_exact(h, &s, Disjointness::Full, u64::MAX).unwrap();
        prop_assert!(full <= named && named <= relaxed);
    }

    #[test]
    fn leg_counts_are_symmetric_codegrees(cfg in config(), v in 0usize..8, w in 0usize..8, part in 0usize..3) {
        let inst = gen_instance(&cfg).unwrap();
        let h = inst.hypergraph();
        let part = part % h.r();
        let n = h.part_sizes()[part];
        let (v, w) = (v % n, w % n);
        prop_assume!(v != w);
        let forward = leg_count(h, part, v, w).unwrap();
        prop_assert_eq!(forward, leg_count(h, part, w, v).unwrap());
        let flat = h.flatten_bipartite(part).unwrap();
        prop_assert_eq!(forward as usize, flat.codegree(v, w).unwrap());
    }

    #[test]
    fn pipeline_never_beats_brute_force(cfg in config()) {
        let inst = gen_instance(&cfg).unwrap();
        let k = measured_k(&inst).unwrap();
        let res = octopus_extract(&inst, &k, &Settings::default()).unwrap();
        let floors: Vec<usize> = res.subsets.iter().map(Vec::len).collect();
        let parts: Vec<ElemSet> = res.subsets.iter().enumerate().map(|(i, s)| inst.parts()[i].select(s).unwrap()).collect();
        let got = iterated_sumset(&parts).unwrap().len();
        let best = brute_force_best_subsets(&inst, &floors).unwrap().unwrap();
        prop_assert!(best.sumset_size <= got);
    }

    #[test]
    fn sumsets_in_z_grow(a in prop::collection::btree_set(-30i64..30, 1..10), b in prop::collection::btree_set(-30i64..30, 1..10)) {
        let g = GroupSpec::integers();
        let (a, b) = (ElemSet::from_ints(&g, a), ElemSet::from_ints(&g, b));
        let ab = sumset(&a, &b).unwrap();
        prop_assert_eq!(&ab, &sumset(&b, &a).unwrap());
        prop_assert!(ab.len() + 1 >= a.len() + b.len());
        prop_assert!(BigUint::from(ab.len()) <= BigUint::from(a.len() * b.len()));
    }

    #[test]
    fn rationals_round_trip(p in -10_000i64..10_000, q in 1i64..10_000) {
        let x = rational(p, q);
        prop_assert_eq!(parse_rational(&fmt_rational(&x)).unwrap(), x);
    }
}
