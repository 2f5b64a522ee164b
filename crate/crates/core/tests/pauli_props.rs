mod common;

use common::*;
use fcqem::linalg::CMatrix;
use fcqem::pauli::{group_tpb, qubitwise_commutes, Basis};
use fcqem::{BitString, PauliString, PauliSum, Tpb};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn multiply_matches_kron_up_to_three_qubits() {
    for n in 1..=3 {
        let all = all_strings(n);
        for a in &all {
            let ma = kron_string(a);
            for b in &all {
                let ab = a.multiply(b).unwrap();
                let want = ma.matmul(&kron_string(b));
                assert!(kron_string(&ab).max_abs_diff(&want) < 1e-15, "{a} * {b}");
            }
        }
    }
}

#[test]
fn multiply_is_associative_with_phases() {
    let mut r = rng(11);
    for _ in 0..500 {
        let n = r.random_range(1..=4usize);
        let (a, b, c) = (random_string(&mut r, n), random_string(&mut r, n), random_string(&mut r, n));
        let left = a.multiply(&b).unwrap().multiply(&c).unwrap();
        let right = a.multiply(&b.multiply(&c).unwrap()).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn sum_square_matches_dense() {
    let mut r = rng(12);
    for _ in 0..40 {
        let n = r.random_range(1..=4);
        let terms = r.random_range(1..=20);
        let h = random_sum(&mut r, n, terms);
        let sq = h.sum_multiply(&h).unwrap();
        let d = kron_sum(&h);
        assert!(kron_sum(&sq).max_abs_diff(&d.matmul(&d)) < 1e-12);
        assert!(h.to_dense().max_abs_diff(&d) < 1e-12);
    }
}

/// Per-qubit rotation taking the basis axis to Z, built by hand.
fn axis_rotation(b: Basis) -> CMatrix {
    let s = 0.5f64.sqrt();
    let h = CMatrix::from_rows(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]);
    match b {
        Basis::Z => CMatrix::identity(2),
        Basis::X => h,
        Basis::Y => {
            let sdg = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -1.0)]]);
            h.matmul(&sdg)
        }
    }
}

#[test]
fn outcome_eigenvalue_matches_rotated_operator() {
    for n in 1..=3 {
        for p in all_strings(n) {
            let axes: Vec<Basis> = (0..n)
                .map(|q| match p.letter(q).as_char() {
                    'X' => Basis::X,
                    'Y' => Basis::Y,
                    _ => Basis::Z,
                })
                .collect();
            let mut u = CMatrix::identity(1);
            for &b in &axes {
                u = u.kron(&axis_rotation(b));
            }
            let rotated = u.matmul(&kron_string(&p)).matmul(&u.dagger());
            for k in 0..(1u64 << n) {
                let o = BitString::from_index(k, n);
                let want = rotated[(k as usize, k as usize)];
                assert!(want.im.abs() < 1e-12);
                assert_eq!(p.outcome_eigenvalue(&o).unwrap() as f64, want.re.round(), "{p} {o}");
                assert!((want.re.abs() - 1.0).abs() < 1e-12);
            }
        }
    }
}

fn arb_sum() -> impl Strategy<Value = PauliSum> {
    (1usize..=6, proptest::collection::vec(("[IXYZ]{6}", -2.0f64..2.0), 1..25)).prop_map(|(n, raw)| {
        let terms = raw
            .into_iter()
            .map(|(s, w)| (s[..n].parse::<PauliString>().unwrap(), w));
        PauliSum::from_terms(n, terms).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, rng_seed: proptest::test_runner::RngSeed::Fixed(13), ..ProptestConfig::default() })]

    #[test]
    fn grouping_covers_and_is_compatible(h in arb_sum()) {
        let groups = group_tpb(&h).unwrap();
        let mut seen: Vec<PauliString> = Vec::new();
        for (b, strings) in &groups {
            for s in strings {
                prop_assert!(b.hosts(s), "{} not hosted by {}", s, b);
                prop_assert!(qubitwise_commutes(&b.as_pauli(), s).unwrap());
                seen.push(s.clone());
            }
        }
        seen.sort();
        let mut want: Vec<PauliString> = h.terms().map(|(p, _)| p.clone()).collect();
        want.sort();
        prop_assert_eq!(seen, want);
    }

    #[test]
    fn sums_stay_pruned_and_unique(h in arb_sum()) {
        let sq = h.sum_multiply(&h).unwrap();
        let mut keys: Vec<&PauliString> = sq.terms().map(|(p, _)| p).collect();
        let before = keys.len();
        keys.dedup();
        prop_assert_eq!(before, keys.len());
        for (p, w) in sq.terms() {
            prop_assert!(w.abs() >= fcqem::pauli::PRUNE_TOLERANCE);
            prop_assert_eq!(p.num_qubits(), h.num_qubits());
        }
    }

    #[test]
    fn identity_letter_is_compatible_with_any_axis(axes in "[XYZ]{1,8}") {
        let b: Tpb = axes.parse().unwrap();
        prop_assert!(b.hosts(&PauliString::identity(b.num_qubits())));
    }
}
