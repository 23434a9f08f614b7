use proptest::prelude::*;
use qphe::circuit::{build_mzi, gates};
use qphe::cli::parse_duration;
use qphe::control::{fidelity_gate, local_z_invariant_fidelity, simulate_sequence, PulseSegment, PulseSequence};
use qphe::nmr::{detect, SpinSystem};
use qphe::pigeonhole::projector_same;
use qphe::qstate::{apply, expectation, max_abs_diff, measure_distribution, CMatrix, DensityMatrix, StateVector, C64};
use qphe::BitString;

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1 << n)
        .prop_filter("non-zero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| StateVector::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()).unwrap().normalize().unwrap())
}

fn pair(n: usize) -> impl Strategy<Value = (usize, usize)> {
    (0..n, 1..n).prop_map(move |(i, d)| (i, (i + d) % n)).prop_map(|(a, b)| (a.min(b), a.max(b)))
}

fn deviation(entries: Vec<(f64, f64)>) -> DensityMatrix {
    let m = CMatrix::from_fn(16, 16, |r, c| C64::new(entries[r * 16 + c].0, entries[r * 16 + c].1));
    let mut h = &m + m.adjoint();
    let tr = h.trace() / 16.0;
    for k in 0..16 {
        h[(k, k)] -= tr;
    }
    DensityMatrix::deviation(h).unwrap()
}

fn segment() -> impl Strategy<Value = PulseSegment> {
    prop_oneof![
        (0.0..1e-3f64).prop_map(|duration| PulseSegment::Delay { duration }),
        (prop::collection::vec(0.0..std::f64::consts::PI, 4), 0.0..6.3f64)
            .prop_map(|(angles, phase)| PulseSegment::HardPulse { duration: 0.0, angles, phase }),
        (1e-6..2e-5f64, prop::collection::vec(-3e4..3e4f64, 4), prop::collection::vec(-3e4..3e4f64, 4))
            .prop_map(|(duration, ux, uy)| PulseSegment::RfSlice { duration, ux, uy }),
    ]
}

fn sequence() -> impl Strategy<Value = PulseSequence> {
    prop::collection::vec(segment(), 0..6).prop_map(|segs| {
        let mut seq = PulseSequence::new(SpinSystem::default_four_spin());
        for s in segs {
            seq.push(s).unwrap();
        }
        seq
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn projector_expectation_is_squared_norm(psi in state(4), (i, j) in pair(4)) {
        let p = projector_same(i, j, 4).unwrap();
        let projected = p.matrix() * psi.amplitudes();
        prop_assert!((expectation(&p, &psi).unwrap() - projected.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn disjoint_gates_commute(psi in state(3), q in 0..3usize) {
        let (a, b) = (q, (q + 1) % 3);
        let c = (q + 2) % 3;
        let hs = apply(&gates::h(), &[a], &apply(&gates::cnot(), &[b, c], &psi).unwrap()).unwrap();
        let sh = apply(&gates::cnot(), &[b, c], &apply(&gates::h(), &[a], &psi).unwrap()).unwrap();
        prop_assert!((hs.fidelity(&sh).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probes_do_not_disturb_basis_inputs(n in 2..=5usize, b in any::<usize>(), seed in any::<u64>()) {
        let (i, j) = { let i = (seed as usize) % n; let j = (i + 1 + (seed as usize / n) % (n - 1)) % n; (i.min(j), i.max(j)) };
        let input = StateVector::basis(n + 1, (b % (1 << n)) << 1);
        let qubits: Vec<usize> = (0..n).collect();
        let bare = build_mzi(n, None).unwrap().padded(n + 1).unwrap().run(&input).unwrap();
        let probed = build_mzi(n, Some((i, j))).unwrap().run(&input).unwrap();
        let diff = measure_distribution(&probed, &qubits).unwrap().max_abs_diff(&measure_distribution(&bare, &qubits).unwrap());
        prop_assert!(diff < 1e-12);
    }

    #[test]
    fn detection_is_linear(e1 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256),
                           e2 in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 256),
                           a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let sys = SpinSystem::default_four_spin();
        let (r1, r2) = (deviation(e1), deviation(e2));
        let mix = DensityMatrix::deviation(r1.matrix().scale(a) + r2.matrix().scale(b)).unwrap();
        let (s1, s2, sm) = (detect(&r1, &sys).unwrap(), detect(&r2, &sys).unwrap(), detect(&mix, &sys).unwrap());
        for k in 0..sm.lines.len() {
            prop_assert!((sm.lines[k].amplitude - a * s1.lines[k].amplitude - b * s2.lines[k].amplitude).abs() < 1e-9);
        }
    }

    #[test]
    fn delays_add(t1 in 0.0..2e-3f64, t2 in 0.0..2e-3f64) {
        let sys = SpinSystem::default_four_spin();
        let split = PulseSequence::new(sys.clone())
            .with(PulseSegment::Delay { duration: t1 }).unwrap()
            .with(PulseSegment::Delay { duration: t2 }).unwrap();
        let joined = PulseSequence::new(sys).with(PulseSegment::Delay { duration: t1 + t2 }).unwrap();
        prop_assert!(max_abs_diff(simulate_sequence(&split).matrix(), simulate_sequence(&joined).matrix()) < 1e-10);
    }

    #[test]
    fn local_z_fidelity_dominates(seq in sequence()) {
        let u = simulate_sequence(&seq);
        let target = qphe::cli::target_gate("cnot1", seq.system()).unwrap();
        let plain = fidelity_gate(&target, &u).unwrap();
        let corrected = local_z_invariant_fidelity(&target, &u).unwrap().fidelity;
        prop_assert!(corrected >= plain - 1e-12 && corrected <= 1.0 + 1e-12);
    }

    #[test]
    fn sequence_text_round_trips(seq in sequence()) {
        let back = PulseSequence::from_text(&seq.to_text(), seq.system().clone()).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn bit_strings_round_trip(len in 1..12usize, v in any::<usize>()) {
        let b = BitString::new(len, v % (1 << len)).unwrap();
        prop_assert_eq!(b.to_string().parse::<BitString>().unwrap(), b);
    }

    #[test]
    fn microsecond_durations(us in 0u32..100_000) {
        let text = format!("{}u", us);
        prop_assert!((parse_duration(&text).unwrap() - us as f64 * 1e-6).abs() < 1e-15);
    }
}
