use lcu_stateprep::amplification::{
    amplified_probability, base_success_probability, build_good_reflection,
    build_initial_reflection, build_state_prep, layout_for, success_constraints,
};
use lcu_stateprep::encoding::{build_oracle, dequantize, quantize};
use lcu_stateprep::qasm::{export_qasm2, parse_qasm2, with_lowering_ancillas};
use lcu_stateprep::simulator::{self, postselect};
#[cfg(feature = "parallel")]
use lcu_stateprep::simulator::{Backend, Simulator};
use lcu_stateprep::{
    build_pipeline, Algorithm, AmplitudeSpec, Circuit, Gate, PipelineConfig, Register,
    RegisterLayout, Rounds, StateVector,
};
use num_complex::Complex64;
use proptest::prelude::*;

fn spec_strategy(
    max_addr: usize,
    bits: std::ops::RangeInclusive<usize>,
) -> impl Strategy<Value = AmplitudeSpec> {
    (0..=max_addr, bits).prop_flat_map(|(a, n)| {
        prop::collection::vec(0.0f64..1.0, 1 << a)
            .prop_filter("needs a nonzero word", move |v| {
                v.iter().any(|&x| x * (1u64 << n) as f64 >= 1.0)
            })
            .prop_map(move |v| AmplitudeSpec::new(v, n).unwrap())
    })
}

fn algorithm_strategy() -> impl Strategy<Value = Algorithm> {
    prop_oneof![Just(Algorithm::Standard), Just(Algorithm::Modified)]
}

/// Random circuit over every gate kind on `q` qubits.
fn circuit_strategy(q: usize, len: usize) -> impl Strategy<Value = Circuit> {
    let gate = (
        0..9u8,
        prop::collection::vec(0..q, 4),
        -3.0f64..3.0,
        any::<[bool; 3]>(),
    );
    prop::collection::vec(gate, 0..len).prop_map(move |specs| {
        let layout = RegisterLayout::custom(0, q, 0, 0, 0);
        let mut c = Circuit::new(layout);
        for (kind, mut qs, angle, pat) in specs {
            qs.sort_unstable();
            qs.dedup();
            let g = match (kind, qs.as_slice()) {
                (0, [a, ..]) => Gate::x(*a),
                (1, [a, ..]) => Gate::h(*a),
                (2, [a, ..]) => Gate::ry(angle, *a).unwrap(),
                (3, [a, b, ..]) => Gate::cx(*a, *b).unwrap(),
                (4, [a, b, ..]) => Gate::cz(*b, *a).unwrap(),
                (5, [a, b, ..]) => Gate::ch(*a, *b).unwrap(),
                (6, [a, b, t, ..]) => Gate::ccx(*a, *t, *b).unwrap(),
                (7, [a, b, t, ..]) => Gate::mcx(&[(*a, pat[0]), (*b, pat[1])], *t).unwrap(),
                (8, [a, b, t, ..]) => Gate::mcz(&[(*t, pat[0]), (*a, pat[2])], *b).unwrap(),
                (_, [a, ..]) => Gate::h(*a),
                _ => continue,
            };
            c.push(g).unwrap();
        }
        c
    })
}

fn random_state(q: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1 << q).prop_filter_map(
        "zero vector",
        |v| {
            let amps: Vec<Complex64> = v
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect();
            let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            (norm > 1e-3).then(|| {
                StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap()
            })
        },
    )
}

fn max_distance(a: &StateVector, b: &StateVector) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_undoes_circuit(c in circuit_strategy(4, 24), s in random_state(4)) {
        let mut both = c.clone();
        both.extend(&c.inverse()).unwrap();
        let out = simulator::apply(&both, s.clone()).unwrap();
        prop_assert!(max_distance(&out, &s) < 1e-10);
    }

    #[test]
    fn simulation_preserves_norm_and_is_linear(
        c in circuit_strategy(4, 20),
        a in random_state(4),
        b in random_state(4),
        alpha in -1.0f64..1.0,
    ) {
        let ua = simulator::apply(&c, a.clone()).unwrap();
        let ub = simulator::apply(&c, b.clone()).unwrap();
        prop_assert!((ua.norm_sqr() - 1.0).abs() < 1e-10);
        let mix: Vec<Complex64> = a.amplitudes().iter().zip(b.amplitudes()).map(|(x, y)| x + y * alpha).collect();
        let umix = simulator::apply(&c, StateVector::from_amplitudes(mix).unwrap()).unwrap();
        let want: Vec<Complex64> = ua.amplitudes().iter().zip(ub.amplitudes()).map(|(x, y)| x + y * alpha).collect();
        let err = umix.amplitudes().iter().zip(&want).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-10);
    }

    #[test]
    fn counts_add_over_concatenation(a in circuit_strategy(5, 20), b in circuit_strategy(5, 20)) {
        let mut joined = a.clone();
        joined.extend(&b).unwrap();
        prop_assert_eq!(joined.count(), a.count() + b.count());
    }

    #[test]
    fn quantize_is_monotone(x in 0.0f64..1.0, y in 0.0f64..1.0, n in 1usize..20) {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        let (wl, wh) = (quantize(lo, n).unwrap(), quantize(hi, n).unwrap());
        prop_assert!(wl.bits() <= wh.bits());
        let back = dequantize(wl);
        prop_assert!(back <= lo && lo < back + (-(n as f64)).exp2());
    }

    #[test]
    fn oracle_is_self_inverse(spec in spec_strategy(3, 1..=4), s in random_state(1)) {
        let layout = RegisterLayout::custom(spec.address_qubits(), spec.bits(), 0, 0, 0);
        let oracle = build_oracle(&spec, &layout).unwrap();
        let mut twice = oracle.clone();
        twice.extend(&oracle).unwrap();
        // random data on the first qubit tensored with a basis state elsewhere
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << layout.total()];
        amps[0] = s.amplitude(0);
        amps[1] = s.amplitude(1);
        let state = StateVector::from_amplitudes(amps).unwrap();
        let out = simulator::apply(&twice, state.clone()).unwrap();
        prop_assert!(max_distance(&out, &state) < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn amplitude_law_holds(spec in spec_strategy(3, 2..=4), algorithm in algorithm_strategy()) {
        let layout = layout_for(&spec, algorithm, false).unwrap();
        let state = simulator::run(&build_state_prep(&spec, &layout, algorithm, false).unwrap()).unwrap();
        let p = postselect(&state, &success_constraints(&layout)).unwrap().probability;
        let p0 = base_success_probability(&spec, algorithm).unwrap();
        prop_assert!((p - p0).abs() < 1e-10);
    }

    #[test]
    fn amplification_follows_rotation_law(
        spec in spec_strategy(2, 2..=4),
        algorithm in algorithm_strategy(),
        rounds in 0usize..3,
    ) {
        let config = PipelineConfig::new(spec.clone(), algorithm).rounds(Rounds::Explicit(rounds));
        let pipeline = build_pipeline(&config).unwrap();
        let state = pipeline.simulate().unwrap();
        let p = postselect(&state, &success_constraints(pipeline.layout())).unwrap().probability;
        let p0 = base_success_probability(&spec, algorithm).unwrap();
        prop_assert!((p - amplified_probability(p0, rounds)).abs() < 1e-9);
    }

    #[test]
    fn success_branch_is_target_with_data_reset(spec in spec_strategy(2, 2..=4), algorithm in algorithm_strategy()) {
        let config = PipelineConfig::new(spec.clone(), algorithm).rounds(Rounds::Explicit(1));
        let pipeline = build_pipeline(&config).unwrap();
        let layout = *pipeline.layout();
        let state = pipeline.simulate().unwrap();
        let target = spec.target_state();
        for (j, t) in target.iter().enumerate() {
            let on = layout.basis_index(&[(Register::Address, j as u64), (Register::Flag, 1)]);
            let p = postselect(&state, &success_constraints(&layout)).unwrap().probability;
            prop_assert!((state.amplitude(on).norm() - t * p.sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn algorithms_agree_on_success_state(spec in spec_strategy(2, 2..=4)) {
        let mut branches = Vec::new();
        for algorithm in [Algorithm::Standard, Algorithm::Modified] {
            let layout = layout_for(&spec, algorithm, false).unwrap();
            let state = simulator::run(&build_state_prep(&spec, &layout, algorithm, false).unwrap()).unwrap();
            let d = spec.len() as u64;
            let amps: Vec<f64> = (0..d)
                .map(|j| {
                    let word = spec.words()[j as usize].bits();
                    state.amplitude(layout.basis_index(&[
                        (Register::Address, j),
                        (Register::Data, word),
                        (Register::Flag, 1),
                    ])).re
                })
                .collect();
            let norm = amps.iter().map(|a| a * a).sum::<f64>().sqrt();
            branches.push(amps.into_iter().map(|a| a / norm).collect::<Vec<_>>());
        }
        for (a, b) in branches[0].iter().zip(&branches[1]) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn reflections_are_involutions(spec in spec_strategy(2, 2..=3), algorithm in algorithm_strategy(), s in random_state(1)) {
        let layout = layout_for(&spec, algorithm, false).unwrap();
        let prep = build_state_prep(&spec, &layout, algorithm, false).unwrap();
        let mut start = simulator::run(&prep).unwrap().amplitudes().to_vec();
        // perturb so the input is not an eigenvector
        start[0] += s.amplitude(0);
        start[1] += s.amplitude(1);
        let norm = start.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state = StateVector::from_amplitudes(start.iter().map(|a| a / norm).collect()).unwrap();
        for r in [build_good_reflection(&layout).unwrap(), build_initial_reflection(&prep).unwrap()] {
            let mut twice = r.clone();
            twice.extend(&r).unwrap();
            let out = simulator::apply(&twice, state.clone()).unwrap();
            prop_assert!(max_distance(&out, &state) < 1e-10);
        }
    }

    #[test]
    fn qasm_round_trip(c in circuit_strategy(5, 30), s in random_state(5)) {
        let back = parse_qasm2(&export_qasm2(&with_lowering_ancillas(&c).unwrap()).unwrap()).unwrap();
        let a = simulator::apply(&c, s.clone()).unwrap();
        let b = simulator::apply(&back, s).unwrap();
        prop_assert!(max_distance(&a, &b) < 1e-10);
    }
}

#[cfg(feature = "parallel")]
proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn backends_are_bit_identical(c in circuit_strategy(13, 60), seed in any::<u64>()) {
        let mut amps = Vec::with_capacity(1 << 13);
        let mut x = seed | 1;
        for _ in 0..1 << 13 {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            amps.push(Complex64::new((x % 1000) as f64 - 500.0, ((x >> 20) % 1000) as f64 - 500.0));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let state = StateVector::from_amplitudes(amps.iter().map(|a| a / norm).collect()).unwrap();
        let mut seq = state.clone();
        let mut par = state;
        Simulator::new(Backend::Sequential).apply(&c, &mut seq).unwrap();
        Simulator::new(Backend::Parallel).apply(&c, &mut par).unwrap();
        prop_assert_eq!(seq.amplitudes(), par.amplitudes());
    }
}
