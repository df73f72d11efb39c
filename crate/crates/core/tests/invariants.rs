use std::sync::OnceLock;

use proptest::prelude::*;
use sturm::enumerate::enumerate_sturm;
use sturm::families::{three_nose_is_meander, three_nose_permutation};
use sturm::kernel::{analyze, arcs_from_permutation, permutation_from_arcs};
use sturm::transforms::{
    kappa, klein_orbit, rho, suspend, suspension_commutes_with_kappa, suspension_inversion_identity,
};
use sturm::MeanderPermutation;

fn sturm_up_to_9() -> &'static [MeanderPermutation] {
    static ALL: OnceLock<Vec<MeanderPermutation>> = OnceLock::new();
    ALL.get_or_init(|| [1, 3, 5, 7, 9].iter().flat_map(|&n| enumerate_sturm(n).unwrap()).collect())
}

fn any_sturm() -> impl Strategy<Value = MeanderPermutation> {
    (0..sturm_up_to_9().len()).prop_map(|i| sturm_up_to_9()[i].clone())
}

fn any_dissipative() -> impl Strategy<Value = MeanderPermutation> {
    (1usize..8)
        .prop_flat_map(|k| Just((2..=2 * k).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|mid| {
            let n = mid.len() + 2;
            let mut v = vec![1];
            v.extend(mid);
            v.push(n);
            MeanderPermutation::new(v).unwrap()
        })
}

proptest! {
    #[test]
    fn equivalences_are_involutions(sigma in any_sturm()) {
        prop_assert_eq!(kappa(&kappa(&sigma)), sigma.clone());
        prop_assert_eq!(rho(&rho(&sigma)), sigma.clone());
        prop_assert_eq!(kappa(&rho(&sigma)), rho(&kappa(&sigma)));
        let orbit = klein_orbit(&sigma);
        prop_assert!(orbit.members.iter().all(|(_, m)| analyze(m).unwrap().is_morse()));
    }

    #[test]
    fn suspension_compatibilities(sigma in any_sturm()) {
        prop_assert!(suspension_commutes_with_kappa(&sigma).unwrap());
        prop_assert!(suspension_inversion_identity(&sigma).unwrap());
        let s = suspend(&sigma).unwrap();
        prop_assert_eq!(s.len(), sigma.len() + 2);
        prop_assert!(analyze(&s).unwrap().is_morse());
    }

    #[test]
    fn text_round_trip(sigma in any_dissipative()) {
        let text = sigma.to_string();
        prop_assert_eq!(MeanderPermutation::parse(&text).unwrap(), sigma.clone());
        prop_assert_eq!(text.parse::<MeanderPermutation>().unwrap(), sigma);
    }

    #[test]
    fn arcs_round_trip(sigma in any_dissipative()) {
        let d = arcs_from_permutation(&sigma).unwrap();
        prop_assert_eq!(d.terminals(), vec![1, sigma.len()]);
        prop_assert_eq!(permutation_from_arcs(&d).unwrap(), sigma);
    }

    #[test]
    fn three_nose_parity(p in 2usize..30, q in 1usize..10) {
        prop_assume!(three_nose_is_meander(p, q).unwrap());
        let sigma = three_nose_permutation(p, q).unwrap();
        let a = analyze(&sigma).unwrap();
        for pos in 1..=sigma.len() {
            prop_assert_eq!((a.morse_axis(pos) as i64 + sigma.at(pos) as i64).rem_euclid(2), 1);
        }
        let hist = a.morse_histogram();
        prop_assert_eq!(hist.values().sum::<usize>(), sigma.len());
    }
}
