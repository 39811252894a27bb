use nalgebra::DMatrix;
use proptest::prelude::*;

use robust_ahp::aggregate::{aggregate_panel, aij, aip, individual_priorities, weighted_geometric_mean};
use robust_ahp::attack::bribe_matrix;
use robust_ahp::derive::{evm_priorities, gmm_priorities, EvmOptions};
use robust_ahp::inconsistency::{koczkodaj_k, saaty_ci};
use robust_ahp::io::{load_panel, save_panel};
use robust_ahp::metrics::{kendall_tau_distance, kendall_tau_normalized, manhattan, Metric};
use robust_ahp::robust::{
    aid_weights, apdd_weights, mix_weights, preferential_distances, ApddReference, CredibilityScale2,
    CredibilityScale3, Line,
};
use robust_ahp::{ExpertPanel, ExpertWeights, PcMatrix, PriorityVector};

const LN9: f64 = 2.1972245773362196;

fn pc_matrix(n: usize) -> impl Strategy<Value = PcMatrix> {
    prop::collection::vec(-LN9..LN9, n * (n - 1) / 2).prop_map(move |logs| {
        let upper: Vec<f64> = logs.into_iter().map(f64::exp).collect();
        PcMatrix::from_upper_triangle(n, &upper).unwrap()
    })
}

fn any_matrix() -> impl Strategy<Value = PcMatrix> {
    (3usize..=7).prop_flat_map(pc_matrix)
}

fn priority_vector(n: usize) -> impl Strategy<Value = PriorityVector> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|v| PriorityVector::from_unnormalized(v).unwrap())
}

fn panel_with_weights() -> impl Strategy<Value = (ExpertPanel, ExpertWeights)> {
    (3usize..=7, 2usize..=8).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(pc_matrix(n), k),
            prop::collection::vec(0.05f64..1.0, k),
        )
            .prop_map(|(ms, r)| {
                (
                    ExpertPanel::new(ms).unwrap(),
                    ExpertWeights::from_unnormalized(r).unwrap(),
                )
            })
    })
}

fn panel() -> impl Strategy<Value = ExpertPanel> {
    (3usize..=6, 3usize..=10)
        .prop_flat_map(|(n, k)| prop::collection::vec(pc_matrix(n), k))
        .prop_map(|ms| ExpertPanel::new(ms).unwrap())
}

/// Perron root from a general eigen-solver.
fn oracle_lambda(c: &PcMatrix) -> f64 {
    let n = c.n();
    let m = DMatrix::from_fn(n, n, |i, j| c.get(i, j));
    m.complex_eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Inversions between two rankings, counted from sorted orders.
fn oracle_kendall(u: &[f64], v: &[f64]) -> usize {
    let n = u.len();
    let mut pairs = 0;
    for i in 0..n {
        for j in 0..n {
            if i < j && ((u[i] < u[j]) != (v[i] < v[j]) || (u[i] == u[j]) != (v[i] == v[j])) {
                pairs += 1;
            }
        }
    }
    pairs
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn aij_and_aip_commute_under_gmm((panel, r) in panel_with_weights()) {
        let via_aij = gmm_priorities(&aij(&panel, &r).unwrap());
        let via_aip = aip(&individual_priorities(&panel), &r).unwrap();
        for (a, b) in via_aij.as_slice().iter().zip(via_aip.as_slice()) {
            prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn consistent_round_trip(w in (3usize..=8).prop_flat_map(priority_vector)) {
        let c = PcMatrix::consistent(&w).unwrap();
        let g = gmm_priorities(&c);
        let e = evm_priorities(&c, EvmOptions::default()).unwrap();
        for i in 0..w.len() {
            prop_assert!((g[i] - w[i]).abs() < 1e-10);
            prop_assert!((e.priorities[i] - w[i]).abs() < 1e-10);
        }
        prop_assert!((e.lambda_max - w.len() as f64).abs() < 1e-9);
        prop_assert!(saaty_ci(&c).unwrap().abs() < 1e-10);
        prop_assert!(koczkodaj_k(&c).unwrap() < 1e-12);
    }

    #[test]
    fn ci_is_non_negative_and_lambda_matches_oracle(c in any_matrix()) {
        let n = c.n() as f64;
        let e = evm_priorities(&c, EvmOptions::default()).unwrap();
        prop_assert!(e.lambda_max >= n - 1e-9);
        let lambda = oracle_lambda(&c);
        prop_assert!((e.lambda_max - lambda).abs() < 1e-8 * lambda, "{} vs {lambda}", e.lambda_max);
        let ci = saaty_ci(&c).unwrap();
        prop_assert!(ci >= 0.0);
        prop_assert!((ci - ((lambda - n) / (n - 1.0)).max(0.0)).abs() < 1e-8);
        // principal eigenvector check: C w = lambda w
        let w = e.priorities.as_slice();
        for i in 0..c.n() {
            let cw: f64 = c.row(i).iter().zip(w).map(|(a, b)| a * b).sum();
            prop_assert!((cw - e.lambda_max * w[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn koczkodaj_in_unit_interval(c in any_matrix()) {
        let k = koczkodaj_k(&c).unwrap();
        prop_assert!((0.0..1.0).contains(&k));
    }

    #[test]
    fn reciprocity_is_exact(c in any_matrix()) {
        for i in 0..c.n() {
            prop_assert_eq!(c.get(i, i), 1.0);
            for j in 0..c.n() {
                prop_assert!((c.get(i, j) * c.get(j, i) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn kendall_bounds(u in prop::collection::vec(0.0f64..1.0, 2..9), seed in any::<u64>()) {
        let n = u.len();
        let mut v = u.clone();
        // deterministic shuffle
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            v.swap(i, (s >> 33) as usize % (i + 1));
        }
        let d = kendall_tau_distance(&u, &v).unwrap();
        prop_assert!(d <= n * (n - 1) / 2);
        prop_assert_eq!(d, oracle_kendall(&u, &v));
        prop_assert_eq!(d, kendall_tau_distance(&v, &u).unwrap());
        prop_assert_eq!(kendall_tau_distance(&u, &u).unwrap(), 0);
        let norm = kendall_tau_normalized(&u, &v).unwrap();
        prop_assert!((0.0..=1.0).contains(&norm));
    }

    #[test]
    fn reverse_order_is_maximal(u in prop::collection::btree_set(0u32..1000, 2..9)) {
        let u: Vec<f64> = u.into_iter().map(f64::from).collect();
        let rev: Vec<f64> = u.iter().map(|x| -x).collect();
        let n = u.len();
        prop_assert_eq!(kendall_tau_distance(&u, &rev).unwrap(), n * (n - 1) / 2);
        prop_assert_eq!(kendall_tau_normalized(&u, &rev).unwrap(), 1.0);
    }

    #[test]
    fn apdd_weights_decrease_with_distance(panel in panel()) {
        let r = apdd_weights(&panel, CredibilityScale2::default(), Metric::Manhattan).unwrap();
        let d = preferential_distances(&panel, Metric::Manhattan, ApddReference::Raw).unwrap().values;
        for i in 0..d.len() {
            for j in 0..d.len() {
                if d[i] < d[j] {
                    prop_assert!(r[i] >= r[j], "d {} < {} but r {} < {}", d[i], d[j], r[i], r[j]);
                }
            }
        }
        let max = r.as_slice().iter().cloned().fold(0.0, f64::max);
        let min = r.as_slice().iter().cloned().fold(1.0, f64::min);
        prop_assert!(max / min <= 5.0 + 1e-9);
    }

    #[test]
    fn aid_weights_stay_within_scale(panel in panel()) {
        let scale = CredibilityScale3::default();
        let r = aid_weights(&panel, scale).unwrap();
        let max = r.as_slice().iter().cloned().fold(0.0, f64::max);
        let min = r.as_slice().iter().cloned().fold(1.0, f64::min);
        prop_assert!(min > 0.0);
        prop_assert!(max / min <= scale.h() / scale.l() + 1e-9);
    }

    #[test]
    fn mx_lies_between_apdd_and_aid(panel in panel(), beta in 0.0f64..=1.0) {
        let a = apdd_weights(&panel, CredibilityScale2::default(), Metric::Manhattan).unwrap();
        let b = aid_weights(&panel, CredibilityScale3::default()).unwrap();
        let m = mix_weights(&a, &b, beta).unwrap();
        for i in 0..m.len() {
            let (lo, hi) = (a[i].min(b[i]), a[i].max(b[i]));
            prop_assert!(m[i] >= lo - 1e-15 && m[i] <= hi + 1e-15);
        }
        prop_assert!((m.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn raw_group_scores_sum_to_at_most_one((panel, r) in panel_with_weights()) {
        let raw = weighted_geometric_mean(&individual_priorities(&panel), &r).unwrap();
        prop_assert!(raw.iter().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn expert_order_does_not_matter((panel, r) in panel_with_weights()) {
        let k = panel.k();
        let rev_panel = ExpertPanel::new(panel.matrices().iter().rev().cloned().collect()).unwrap();
        let rev_r = ExpertWeights::new(r.as_slice().iter().rev().cloned().collect()).unwrap();
        let a = aggregate_panel(&panel, &r).unwrap();
        let b = aggregate_panel(&rev_panel, &rev_r).unwrap();
        prop_assert!(manhattan(a.priorities.as_slice(), b.priorities.as_slice()).unwrap() < 1e-12 * k as f64);
    }

    #[test]
    fn relabelling_alternatives_permutes_the_aggregate((panel, r) in panel_with_weights(), rot in 1usize..7) {
        let n = panel.n();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let permuted = ExpertPanel::new(panel.iter().map(|c| c.permuted(&perm).unwrap()).collect()).unwrap();
        let a = aggregate_panel(&panel, &r).unwrap();
        let b = aggregate_panel(&permuted, &r).unwrap();
        for (new, &old) in perm.iter().enumerate() {
            prop_assert!((b.priorities[new] - a.priorities[old]).abs() < 1e-12);
        }
    }

    #[test]
    fn line_is_exact_at_anchors(x0 in -1.0f64..1.0, dx in 1e-6f64..1.0, y0 in 0.0f64..10.0, y1 in 0.0f64..10.0) {
        let x1 = x0 + dx;
        let line = Line::through((x0, y0), (x1, y1)).unwrap();
        prop_assert_eq!(line.eval(x0), y0);
        prop_assert_eq!(line.eval(x1), y1);
    }

    #[test]
    fn bribed_matrices_are_valid(c in any_matrix(), a in 0usize..3, b in 0usize..3) {
        prop_assume!(a != b);
        let m = bribe_matrix(&c, a, b, 9.0).unwrap();
        prop_assert!(m.reciprocity_error() < 1e-15);
        prop_assert_eq!(gmm_priorities(&m).winner(), a);
        prop_assert_eq!(&bribe_matrix(&m, a, b, 9.0).unwrap(), &m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn panel_files_round_trip(panel in panel()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("panel.json");
        save_panel(&path, &panel, None).unwrap();
        let back = load_panel(&path).unwrap();
        prop_assert_eq!(back.ids.len(), panel.k());
        for (a, b) in panel.iter().zip(back.panel.iter()) {
            for i in 0..a.n() {
                for j in 0..a.n() {
                    prop_assert!((a.get(i, j) - b.get(i, j)).abs() <= 1e-12 * a.get(i, j));
                }
            }
        }
    }
}
