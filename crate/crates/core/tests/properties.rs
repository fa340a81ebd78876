use pauli_dilate::channel::{completeness_defect, BlochVector};
use pauli_dilate::matcore::{
    c, hermitian_eigen, kron, mat_exp_hermitian, partial_trace_env, partial_trace_sys,
    random_density, random_hermitian, ONE,
};
use pauli_dilate::pauli::{all_strings, pauli_commutant};
use pauli_dilate::{CMat, PauliChannel, PauliLiouvillian, PauliString};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn int_matrix(n: usize) -> impl Strategy<Value = CMat> {
    prop::collection::vec((-4i32..=4, -4i32..=4), n * n).prop_map(move |v| {
        CMat::from_vec(n, n, v.into_iter().map(|(a, b)| c(a as f64, b as f64)).collect())
    })
}

fn probabilities() -> impl Strategy<Value = [f64; 4]> {
    prop::array::uniform4(0.0f64..1.0).prop_filter_map("nonzero", |w| {
        let s: f64 = w.iter().sum();
        (s > 1e-3).then(|| w.map(|x| x / s))
    })
}

fn pauli_string(n: usize) -> impl Strategy<Value = PauliString> {
    prop::collection::vec(prop::sample::select(vec!['I', 'X', 'Y', 'Z']), n)
        .prop_map(|v| v.into_iter().collect::<String>().parse().unwrap())
}

fn dist(a: &CMat, b: &CMat) -> f64 {
    (a - b).frob_norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kron_is_associative(a in int_matrix(2), b in int_matrix(2), d in int_matrix(2)) {
        let left = kron(&kron(&a, &b), &d);
        let right = kron(&a, &kron(&b, &d));
        prop_assert_eq!(left, right);
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rs = random_density(2, &mut rng);
        let re = random_density(4, &mut rng);
        let joint = kron(&rs, &re);
        prop_assert!(dist(&partial_trace_env(&joint, 2, 4).unwrap(), &rs) < 1e-12);
        prop_assert!(dist(&partial_trace_sys(&joint, 2, 4).unwrap(), &re) < 1e-12);
    }

    #[test]
    fn exponential_group_law(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(8, &mut rng);
        let lhs = mat_exp_hermitian(&h, s + t).unwrap();
        let rhs = mat_exp_hermitian(&h, s).unwrap().matmul(&mat_exp_hermitian(&h, t).unwrap());
        prop_assert!(dist(&lhs, &rhs) < 1e-9);
        prop_assert!(lhs.unitarity_defect() < 1e-9);
    }

    #[test]
    fn commutation_matches_matrices(a in pauli_string(3), b in pauli_string(3)) {
        let ma = a.to_matrix();
        let mb = b.to_matrix();
        let commute = ma.commutator(&mb).frob_norm() < 1e-12;
        prop_assert_eq!(a.commutes(&b).unwrap(), commute);
        let prod = a.multiply(&b).unwrap().to_matrix();
        prop_assert!(dist(&prod, &ma.matmul(&mb)) < 1e-12);
    }

    #[test]
    fn commutant_matches_brute_force(
        n in 1usize..=3,
        picks in prop::collection::vec(any::<prop::sample::Index>(), 0..4),
    ) {
        let all = all_strings(n);
        let gens: Vec<PauliString> = picks.iter().map(|i| i.get(&all).clone()).collect();
        let got = pauli_commutant(&gens, n).unwrap();
        let brute: Vec<&PauliString> = all
            .iter()
            .filter(|s| {
                let m = s.to_matrix();
                gens.iter().all(|g| m.commutator(&g.to_matrix()).frob_norm() < 1e-12)
            })
            .collect();
        prop_assert_eq!(got.len(), brute.len());
        for s in brute {
            prop_assert!(got.contains(s));
        }
    }

    #[test]
    fn pauli_channels_are_cptp(p in probabilities(), seed in any::<u64>()) {
        let ch = PauliChannel::new(p).unwrap();
        prop_assert!(completeness_defect(&ch.kraus_ops()) < 1e-12);
        let choi = ch.choi();
        prop_assert!(choi.hermiticity_defect() < 1e-12);
        prop_assert!(hermitian_eigen(&choi).unwrap().values[0] > -1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let out = ch.apply(&random_density(2, &mut rng)).unwrap();
        prop_assert!((out.trace() - ONE).norm() < 1e-12);
        prop_assert!(hermitian_eigen(&out).unwrap().values[0] > -1e-12);
    }

    #[test]
    fn bloch_vectors_scale(p in probabilities(), r in prop::array::uniform3(-0.57f64..0.57)) {
        let ch = PauliChannel::new(p).unwrap();
        let lambda = ch.bloch_scaling();
        let out = BlochVector::from_density(&ch.apply(&BlochVector(r).to_density()).unwrap());
        for i in 0..3 {
            prop_assert!((out.0[i] - lambda[i] * r[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn semigroup_property(
        gamma in prop::array::uniform3(0.0f64..1.0),
        s in 0.0f64..3.0,
        t in 0.0f64..3.0,
    ) {
        let lv = PauliLiouvillian::new(gamma).unwrap();
        let joint = lv.semigroup_channel(s + t).unwrap();
        let split = lv.semigroup_channel(s).unwrap().then(&lv.semigroup_channel(t).unwrap());
        prop_assert!(joint.distance(&split) < 1e-12);
    }
}
