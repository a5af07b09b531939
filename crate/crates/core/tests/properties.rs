mod common;

use common::*;
use fungal::grid::{run_cycles, run_steps, step};
use fungal::lattice::{affected_neighbors, combine, make_bridge, plus, Block, BridgeKind, Polarity};
use fungal::{Configuration, Rule};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn small_config() -> impl Strategy<Value = Configuration> {
    prop::collection::vec(((-4i64..4, -4i64..4), 0u8..=5), 0..30).prop_map(Configuration::from_cells)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn grains_conserved(seed: u64, steps in 1usize..40, w in 1usize..=12, h in 1usize..=12) {
        let mut r = rng(seed);
        let z = random_word(&mut r, 12);
        let c = random_config(&mut r, w, h);
        prop_assert_eq!(check_conservation(&c, &z, steps), Ok(()));
    }

    #[test]
    fn vpp_preserved(seed: u64, steps in 1usize..40, w in 1usize..=12, h in 1usize..=12) {
        let mut r = rng(seed);
        let z = random_word(&mut r, 12);
        let c = random_vpp_config(&mut r, w, h);
        prop_assert!(c.has_vpp());
        prop_assert_eq!(check_vpp(&c, &z, steps), Ok(()));
    }

    #[test]
    fn influence_is_local(seed: u64, steps in 1usize..40, w in 1usize..=8, h in 1usize..=8) {
        let mut r = rng(seed);
        let z = random_word(&mut r, 12);
        let c = random_config(&mut r, w, h);
        prop_assert_eq!(check_locality(&c, &z, steps), Ok(()));
    }

    #[test]
    fn sparse_matches_dense(seed: u64) {
        let mut r = rng(seed);
        let z = random_word(&mut r, 12);
        let c = random_config(&mut r, 10, 10);
        prop_assert_eq!(check_dense(&c, &z, 60), Ok(()));
    }

    #[test]
    fn deterministic(seed: u64) {
        let mut r = rng(seed);
        let z = random_word(&mut r, 12);
        let c = random_config(&mut r, 9, 9);
        prop_assert_eq!(run_steps(&c, &z, 50), run_steps(&c.clone(), &z, 50));
    }

    #[test]
    fn bridge_survives_junk(seed: u64) {
        let mut r = rng(seed);
        let z = random_scheme(&mut r, 12);
        let (c, target) = junk_bridge(&mut r, &z, false);
        prop_assert_eq!(check_junk_bridge(&c, target, &z), Ok(()));
    }

    #[test]
    fn bridge_survives_flanking_junk(seed: u64) {
        let mut r = rng(seed);
        let z = random_scheme(&mut r, 12);
        let (c, target) = junk_bridge(&mut r, &z, true);
        prop_assert_eq!(check_junk_bridge(&c, target, &z), Ok(()));
    }

    #[test]
    fn chained_bridges_two_cycles(seed: u64, da in prop::sample::select(vec![-1i64, 1]), db1 in prop::sample::select(vec![-1i64, 1]), db2 in prop::sample::select(vec![-1i64, 1])) {
        let mut r = rng(seed);
        let z = random_scheme(&mut r, 12);
        let pol = if r.gen_bool(0.5) { Polarity::Pos } else { Polarity::Neg };
        let (b1, b2) = (Block::new(0, 0), Block::new(da, db1));
        let b3 = b2.offset(da, db2);
        let t1 = make_bridge(b1, b2, pol, BridgeKind::Source, &z).unwrap();
        let t2 = make_bridge(b2, b3, pol, BridgeKind::Plain, &z).unwrap();
        let c = combine(&t1.overlay, &t2.overlay);
        let after = run_cycles(&c, &z, 2);
        prop_assert_eq!(after.get(b3.source(pol, &z)), 4);
    }

    #[test]
    fn sink_absorbs(seed: u64) {
        let mut r = rng(seed);
        let z = random_scheme(&mut r, 12);
        let pol = if r.gen_bool(0.5) { Polarity::Pos } else { Polarity::Neg };
        let to = Block::new(if r.gen_bool(0.5) { 1 } else { -1 }, if r.gen_bool(0.5) { 1 } else { -1 });
        let l = r.gen_range(1..=z.k());
        let t = make_bridge(Block::new(0, 0), to, pol, BridgeKind::SinkAt(l), &z).unwrap();
        let n = affected_neighbors(&t, &z);
        let mut c = Configuration::new();
        for &p in &n {
            c.set(p, r.gen_range(0..=2));
        }
        for (p, g) in t.overlay.iter() {
            c.set(p, g);
        }
        c.set(t.path.cells[0], 4);
        let after = run_cycles(&c, &z, 1);
        prop_assert_eq!(after.get(t.path.cells[l]), 3);
        for p in &n {
            prop_assert!(after.get(*p) < 4, "signal left at {:?}", p);
        }
    }

    #[test]
    fn plus_idempotent_commutative(a in 0u8..=5, b in 0u8..=5) {
        prop_assert_eq!(plus(a, a), a);
        prop_assert_eq!(plus(a, b), plus(b, a));
    }

    #[test]
    fn plus_associative(a in 0u8..=5, b in 0u8..=5, c in 0u8..=5) {
        prop_assert_eq!(plus(plus(a, b), c), plus(a, plus(b, c)));
    }

    #[test]
    fn combine_algebra(x in small_config(), y in small_config(), w in small_config()) {
        prop_assert_eq!(combine(&x, &y), combine(&y, &x));
        prop_assert_eq!(combine(&combine(&x, &y), &w), combine(&x, &combine(&y, &w)));
        prop_assert_eq!(combine(&x, &Configuration::new()), x.clone());
        prop_assert_eq!(combine(&x, &x), x);
    }
}

/// Every centre value with every combination of its four axis neighbours.
#[test]
fn state_closure_exhaustive() {
    for code in 0..6u32.pow(5) {
        let mut v = [0u8; 5];
        let mut x = code;
        for g in v.iter_mut() {
            *g = (x % 6) as u8;
            x /= 6;
        }
        let c = Configuration::from_cells([((0, 0), v[0]), ((-1, 0), v[1]), ((1, 0), v[2]), ((0, -1), v[3]), ((0, 1), v[4])]);
        for r in [Rule::H, Rule::V] {
            let after = step(&c, r);
            assert!(after.iter().all(|(_, g)| g <= 5), "{v:?} under {r:?}");
        }
    }
}
