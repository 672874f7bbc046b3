use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fcl::envs::build_game;
use fcl::fcl::{egalitarian_schedule, retaliation_count, RetaliationCount};
use fcl::game::{check_symmetry, JointAction, JointSpace, PlayerPermutation, StationaryProfile};

fn perm(n: usize) -> impl Strategy<Value = PlayerPermutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| PlayerPermutation::new(v).unwrap())
}

proptest! {
    #[test]
    fn joint_index_roundtrip(sizes in prop::collection::vec(1usize..5, 1..5), seed in any::<u64>()) {
        let space = JointSpace::new(&sizes);
        let idx = (seed % space.len() as u64) as usize;
        let a = space.decode(idx);
        prop_assert_eq!(space.encode(a.as_slice()), idx);
        for p in 0..sizes.len() {
            prop_assert_eq!(space.component(idx, p), a[p]);
            let team = space.team_index(idx, p);
            prop_assert_eq!(space.join(p, a[p], team), idx);
        }
    }

    #[test]
    fn permutation_laws(p in perm(5), q in perm(5)) {
        prop_assert!(p.compose(&p.inverse()).is_identity());
        let pq = p.compose(&q);
        for i in 0..5 {
            prop_assert_eq!(pq.apply(i), p.apply(q.apply(i)));
        }
        prop_assert!(p.pow(p.order() as u64).is_identity());
    }

    #[test]
    fn retaliation_count_makes_defection_unprofitable(
        vr in -10.0f64..10.0, gap in 1e-3f64..10.0, excess in 0.0f64..50.0, bonus in 0u32..3
    ) {
        let vc = vr + gap;
        let vd = vc + excess;
        match retaliation_count(vd, vc, vr, bonus).unwrap() {
            RetaliationCount::Finite(k) => {
                // Defect once and then suffer k punished stages versus cooperating throughout.
                let kf = k as f64;
                prop_assert!(vd + kf * vr <= (kf + 1.0) * vc + 1e-6);
                if k > u64::from(bonus) {
                    let k1 = (k - 1 - u64::from(bonus)) as f64;
                    prop_assert!(vd + k1 * vr > (k1 + 1.0) * vc - 1e-6);
                }
            }
            RetaliationCount::Unbounded => prop_assert!(false, "gap {gap} is finite"),
        }
    }

    #[test]
    fn schedule_rotates_roles_evenly(n in 2usize..6, t0 in 0u64..1000) {
        let sigma = PlayerPermutation::new((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        let coop = JointAction((0..n).collect());
        let mut seen = vec![vec![0usize; n]; n];
        for t in t0..t0 + n as u64 {
            let a = egalitarian_schedule(&sigma, t, &coop);
            for i in 0..n {
                seen[i][a[i]] += 1;
            }
        }
        prop_assert!(seen.iter().flatten().all(|&c| c == 1));
    }

    #[test]
    fn perturbed_reward_breaks_symmetry(seed in any::<u64>(), delta in 0.5f64..5.0) {
        let game = build_game("ipd").unwrap().with_perturbed_reward(0, 1, 0, delta).unwrap();
        let swap = PlayerPermutation::new(vec![1, 0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        // A profile that plays the perturbed joint action with positive probability.
        let profile = StationaryProfile::random(&game, &mut rng);
        let r = check_symmetry(&game, &swap, &profile, game.max_stage_steps()).unwrap();
        prop_assert!(!r.passed);
    }
}
