use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qcap::capacity::{
    maximize_coherent_information, multi_copy_ic, nonconvexity_two_shot, repetition_brute_force_oracle,
    repetition_coherent_information, OptimizerOptions,
};
use qcap::channels::{
    apply, choi, complementary, compose, isometric_extension, kraus_from_choi, tensor, validate_cptp, DensityMatrix,
    KrausChannel,
};
use qcap::entropics::{
    coherent_information, coherent_information_purified, holevo_information, von_neumann_entropy, Ensemble,
};
use qcap::numerics::{eigh, eigvalsh, kron, partial_trace, ComplexMatrix, C64};
use qcap::switch::{control_state, quantum_switch};
use qcap::zoo::{
    completely_depolarizing, depolarizing, erasure_50_two_qubit, flagged_mix, is_ppt, pauli_channel, random_channel,
};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn completeness(ch: &KrausChannel) -> f64 {
    let mut sum = ComplexMatrix::zeros(ch.dim_in(), ch.dim_in());
    for a in ch.kraus() {
        sum = &sum + &a.dagger().matmul(a);
    }
    sum.distance(&ComplexMatrix::identity(ch.dim_in()))
}

/// Largest action difference over the matrix units `|i><j|`.
fn action_gap(a: &KrausChannel, b: &KrausChannel) -> f64 {
    let d = a.dim_in();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let e = ComplexMatrix::unit(d, d, i, j);
            worst = worst.max(a.apply_matrix(&e).distance(&b.apply_matrix(&e)));
        }
    }
    worst
}

fn remix(ch: &KrausChannel, r: &mut ChaCha8Rng) -> KrausChannel {
    let k = ch.kraus().len();
    let v = ComplexMatrix::random_unitary(k, r);
    let ops = (0..k)
        .map(|i| {
            let mut acc = ComplexMatrix::zeros(ch.dim_out(), ch.dim_in());
            for (j, a) in ch.kraus().iter().enumerate() {
                acc.add_scaled(a, v[(i, j)]);
            }
            acc
        })
        .collect();
    validate_cptp(ops, ch.dim_in(), ch.dim_out()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_trace_factorizes(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut r = rng(seed);
        let a = ComplexMatrix::random_ginibre(da, da, &mut r);
        let b = ComplexMatrix::random_ginibre(db, db, &mut r);
        let lhs = kron(&a, &b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn partial_trace_is_linear(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, alpha in -2.0f64..2.0, beta in -2.0f64..2.0) {
        let mut r = rng(seed);
        let n = da * db;
        let m1 = ComplexMatrix::random_ginibre(n, n, &mut r);
        let m2 = ComplexMatrix::random_ginibre(n, n, &mut r);
        let mut comb = m1.scale_real(alpha);
        comb.add_scaled(&m2, C64::new(beta, 0.0));
        for keep in [[0usize], [1]] {
            let lhs = partial_trace(&comb, &[da, db], &keep).unwrap();
            let mut rhs = partial_trace(&m1, &[da, db], &keep).unwrap().scale_real(alpha);
            rhs.add_scaled(&partial_trace(&m2, &[da, db], &keep).unwrap(), C64::new(beta, 0.0));
            prop_assert!(lhs.distance(&rhs) < 1e-12 * (1.0 + rhs.frobenius_norm()));
        }
    }

    #[test]
    fn partial_trace_of_product(seed in any::<u64>(), da in 1usize..5, db in 1usize..5) {
        let mut r = rng(seed);
        let rho = DensityMatrix::random(da, &mut r);
        let sigma = DensityMatrix::random(db, &mut r);
        let pt = partial_trace(&kron(rho.matrix(), sigma.matrix()), &[da, db], &[0]).unwrap();
        prop_assert!(pt.distance(rho.matrix()) < 1e-12);
    }

    #[test]
    fn eigh_reconstructs(seed in any::<u64>(), n in 1usize..65) {
        let mut r = rng(seed);
        let h = ComplexMatrix::random_hermitian(n, &mut r);
        let e = eigh(&h).unwrap();
        let rebuilt = e.vectors.matmul(&ComplexMatrix::from_real_diag(&e.values)).matmul(&e.vectors.dagger());
        prop_assert!(rebuilt.distance(&h) <= 1e-9 * h.frobenius_norm());
    }

    #[test]
    fn constructors_stay_cptp(seed in any::<u64>(), d1 in 2usize..4, d2 in 2usize..4, k1 in 2usize..4, k2 in 2usize..4) {
        let mut r = rng(seed);
        let n = random_channel(d1, d2, k1, &mut r);
        let m = random_channel(d2, d1, k2, &mut r);
        for ch in [compose(&m, &n).unwrap(), tensor(&n, &m), complementary(&n), kraus_from_choi(&choi(&n)).unwrap()] {
            prop_assert!(completeness(&ch) <= 1e-9);
        }
    }

    #[test]
    fn stinespring_consistency(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, k in 2usize..4) {
        let mut r = rng(seed);
        let ch = random_channel(din, dout, k, &mut r);
        let rho = DensityMatrix::random(din, &mut r);
        let v = isometric_extension(&ch);
        let joint = v.matmul(rho.matrix()).matmul(&v.dagger());
        let b = partial_trace(&joint, &[dout, k], &[0]).unwrap();
        let e = partial_trace(&joint, &[dout, k], &[1]).unwrap();
        prop_assert!(b.distance(apply(&ch, &rho).unwrap().matrix()) < 1e-10);
        prop_assert!(e.distance(apply(&complementary(&ch), &rho).unwrap().matrix()) < 1e-10);
    }

    #[test]
    fn choi_round_trip(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, k in 2usize..5) {
        let mut r = rng(seed);
        let ch = random_channel(din, dout, k, &mut r);
        let back = kraus_from_choi(&choi(&ch)).unwrap();
        prop_assert!(action_gap(&ch, &back) < 1e-9);
        prop_assert!(back.kraus().len() <= din * dout);
    }

    #[test]
    fn apply_preserves_trace_and_positivity(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, k in 2usize..4) {
        let mut r = rng(seed);
        let ch = random_channel(din, dout, k, &mut r);
        let rho = DensityMatrix::random(din, &mut r);
        let out = ch.apply_matrix(rho.matrix());
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(eigvalsh(&out).unwrap()[0] >= -1e-10);
    }

    #[test]
    fn depolarizing_is_a_pauli_channel(q in 0.0f64..=1.0) {
        let a = depolarizing(q).unwrap();
        let b = pauli_channel(1.0 - q, q / 3.0, q / 3.0, q / 3.0).unwrap();
        prop_assert!(action_gap(&a, &b) < 1e-12);
    }

    #[test]
    fn ppt_on_identity_and_constant(d in 2usize..5) {
        prop_assert!(!is_ppt(&KrausChannel::identity(d)).0);
        prop_assert!(is_ppt(&completely_depolarizing(d).unwrap()).0);
    }

    #[test]
    fn flagged_mix_decomposes(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let a = random_channel(2, 2, 2, &mut r);
        let b = random_channel(2, 3, 2, &mut r);
        let mix = flagged_mix(p, &a, &b).unwrap();
        prop_assert!(completeness(&mix) <= 1e-9);
        let rho = DensityMatrix::random(2, &mut r);
        let out = mix.apply_matrix(rho.matrix());
        // project the flag onto each value
        for (w, ch, flag) in [(p, &a, 0usize), (1.0 - p, &b, 1usize)] {
            let proj = kron(&ComplexMatrix::identity(3), &ComplexMatrix::unit(2, 2, flag, flag));
            let block = partial_trace(&proj.matmul(&out).matmul(&proj), &[3, 2], &[0]).unwrap();
            let expect = ch.apply_matrix(rho.matrix()).embed(3, 3).scale_real(w);
            prop_assert!(block.distance(&expect) < 1e-12);
        }
    }

    #[test]
    fn erasure_half_has_no_coherent_information(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = DensityMatrix::random(4, &mut r);
        prop_assert!(coherent_information(&rho, &erasure_50_two_qubit()).unwrap().abs() < 1e-9);
    }

    #[test]
    fn entropy_range_and_unitary_invariance(seed in any::<u64>(), d in 1usize..7) {
        let mut r = rng(seed);
        let rho = DensityMatrix::random(d, &mut r);
        let s = von_neumann_entropy(&rho);
        prop_assert!(s >= -1e-12 && s <= (d as f64).log2() + 1e-9);
        let u = ComplexMatrix::random_unitary(d, &mut r);
        let rotated = DensityMatrix::new(u.matmul(rho.matrix()).matmul(&u.dagger())).unwrap();
        prop_assert!((von_neumann_entropy(&rotated) - s).abs() < 1e-9);
    }

    #[test]
    fn holevo_within_bounds(seed in any::<u64>(), m in 1usize..5) {
        let mut r = rng(seed);
        let ch = random_channel(2, 3, 2, &mut r);
        let raw: Vec<f64> = (0..m).map(|_| r.gen_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let probs = raw.iter().map(|x| x / total).collect();
        let states = (0..m).map(|_| DensityMatrix::random(2, &mut r)).collect();
        let chi = holevo_information(&Ensemble::new(probs, states).unwrap(), &ch).unwrap();
        prop_assert!(chi >= -1e-9 && chi <= 3f64.log2() + 1e-9);
    }

    #[test]
    fn holevo_merging_duplicates(seed in any::<u64>(), w in 0.05f64..0.45) {
        let mut r = rng(seed);
        let ch = random_channel(2, 2, 2, &mut r);
        let a = DensityMatrix::random(2, &mut r);
        let b = DensityMatrix::random(2, &mut r);
        let split = Ensemble::new(vec![w, w, 1.0 - 2.0 * w], vec![a.clone(), a.clone(), b.clone()]).unwrap();
        let merged = Ensemble::new(vec![2.0 * w, 1.0 - 2.0 * w], vec![a, b]).unwrap();
        let x = holevo_information(&split, &ch).unwrap();
        let y = holevo_information(&merged, &ch).unwrap();
        prop_assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn coherent_information_two_routes(seed in any::<u64>(), din in 2usize..4, dout in 2usize..4, k in 2usize..4) {
        let mut r = rng(seed);
        let ch = random_channel(din, dout, k, &mut r);
        let rho = DensityMatrix::random(din, &mut r);
        let a = coherent_information(&rho, &ch).unwrap();
        let b = coherent_information_purified(&rho, &ch).unwrap();
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn data_processing(seed in any::<u64>(), d in 2usize..4, k1 in 2usize..4, k2 in 2usize..4) {
        let mut r = rng(seed);
        let n = random_channel(d, d, k1, &mut r);
        let m = random_channel(d, d, k2, &mut r);
        let rho = DensityMatrix::random(d, &mut r);
        let before = coherent_information(&rho, &n).unwrap();
        let after = coherent_information(&rho, &compose(&m, &n).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn repetition_routes_agree(q in 0.0f64..=0.3) {
        let a = repetition_coherent_information(q).unwrap().total;
        let b = repetition_brute_force_oracle(q).unwrap();
        prop_assert!((a - b).abs() < 1e-10);
    }

    #[test]
    fn two_shot_expansion(seed in any::<u64>(), p in 0.0f64..=1.0) {
        let mut r = rng(seed);
        let rho = DensityMatrix::random(16, &mut r);
        let t = nonconvexity_two_shot(p, &rho).unwrap();
        prop_assert!((t.direct - t.expansion).abs() < 1e-9);
    }

    #[test]
    fn switch_representation_independent(seed in any::<u64>(), p in 0.0f64..=1.0, k1 in 1usize..4, k2 in 1usize..4) {
        let mut r = rng(seed);
        let n = random_channel(2, 2, k1, &mut r);
        let m = random_channel(2, 2, k2, &mut r);
        let ctrl = control_state(p).unwrap();
        let a = quantum_switch(&n, &m, &ctrl).unwrap();
        let b = quantum_switch(&remix(&n, &mut r), &remix(&m, &mut r), &ctrl).unwrap();
        prop_assert!(completeness(&a.base) <= 1e-9);
        prop_assert!(action_gap(&a.base, &b.base) < 1e-10);
    }

    #[test]
    fn switch_control_selects_order(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = random_channel(2, 2, 2, &mut r);
        let m = random_channel(2, 2, 3, &mut r);
        let rho = DensityMatrix::random(2, &mut r);
        for (p, seq) in [(1.0, compose(&n, &m).unwrap()), (0.0, compose(&m, &n).unwrap())] {
            let sw = quantum_switch(&n, &m, &control_state(p).unwrap()).unwrap();
            let out = apply(&sw.base, &rho).unwrap();
            let sys = partial_trace(out.matrix(), &[2, 2], &[0]).unwrap();
            prop_assert!(sys.distance(&seq.apply_matrix(rho.matrix())) < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn estimates_are_feasible_evaluations(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(2, 2, 2, &mut r);
        let opts = OptimizerOptions { restarts: 4, seed, ..Default::default() };
        let est = maximize_coherent_information(&ch, &opts).unwrap();
        let again = coherent_information(est.state().unwrap(), &ch).unwrap();
        prop_assert!((again - est.value).abs() < 1e-9);
    }

    #[test]
    fn more_restarts_never_hurt(seed in any::<u64>(), k in 1usize..4) {
        let mut r = rng(seed);
        let ch = random_channel(2, 2, 2, &mut r);
        let base = OptimizerOptions { restarts: k, seed, ..Default::default() };
        let doubled = OptimizerOptions { restarts: 2 * k, ..base };
        let a = maximize_coherent_information(&ch, &base).unwrap().value;
        let b = maximize_coherent_information(&ch, &doubled).unwrap().value;
        prop_assert!(b >= a - 1e-9);
    }

    #[test]
    fn two_copies_at_least_one(seed in any::<u64>()) {
        let mut r = rng(seed);
        let ch = random_channel(2, 2, 2, &mut r);
        let opts = OptimizerOptions { restarts: 4, seed, ..Default::default() };
        let one = multi_copy_ic(&ch, 1, &opts).unwrap().value;
        let two = multi_copy_ic(&ch, 2, &opts).unwrap().value;
        prop_assert!(two >= one - 1e-6);
    }
}
