use proptest::prelude::*;
use voi_core::ahp::{
    consistency, principal_eigenvector, principal_eigenvector_from, ComparisonMatrix,
    DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};

const SAATY: [f64; 17] = [
    1.0 / 9.0,
    1.0 / 8.0,
    1.0 / 7.0,
    1.0 / 6.0,
    1.0 / 5.0,
    1.0 / 4.0,
    1.0 / 3.0,
    1.0 / 2.0,
    1.0,
    2.0,
    3.0,
    4.0,
    5.0,
    6.0,
    7.0,
    8.0,
    9.0,
];

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("c{i}")).collect()
}

fn saaty_matrix(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = ComparisonMatrix> {
    n.prop_flat_map(|n| {
        prop::collection::vec(prop::sample::select(SAATY.to_vec()), n * (n - 1) / 2).prop_map(
            move |upper| ComparisonMatrix::from_upper_triangle(&labels(n), &upper).unwrap(),
        )
    })
}

fn solve(m: &ComparisonMatrix) -> voi_core::ahp::EigenSolution {
    principal_eigenvector(m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap()
}

/// For a reciprocal 3x3 matrix with `r = m01 * m12 / m02`, the characteristic
/// polynomial in `mu = lambda - 1` is `mu^3 - 3 mu - (r + 1/r)`, whose real
/// root is `r^(1/3) + r^(-1/3)`. The eigenvector spans the null space of
/// `M - lambda I`, i.e. the cross product of two of its rows.
fn cubic_oracle(m: &ComparisonMatrix) -> (f64, [f64; 3]) {
    let r = m.get(0, 1) * m.get(1, 2) / m.get(0, 2);
    let lambda = 1.0 + r.cbrt() + r.cbrt().recip();
    let row = |i: usize| -> [f64; 3] {
        let mut v = [m.get(i, 0), m.get(i, 1), m.get(i, 2)];
        v[i] -= lambda;
        v
    };
    let (a, b) = (row(0), row(1));
    let mut v = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let s: f64 = v.iter().sum();
    for x in &mut v {
        *x /= s;
    }
    (lambda, v)
}

#[test]
fn cubic_oracle_on_reference_matrices() {
    let tpq = ["timeliness", "proximity", "quality"];
    let safety = ComparisonMatrix::from_upper_triangle(&tpq, &[1.0 / 7.0, 1.0, 5.0]).unwrap();
    let (lambda, w) = cubic_oracle(&safety);
    assert!((lambda - 3.0126).abs() < 1e-4);
    for (got, want) in w.iter().zip([0.119389, 0.747053, 0.133559]) {
        assert!((got - want).abs() < 1e-6, "{got} vs {want}");
    }
    let sol = solve(&safety);
    for (got, want) in sol.weights.iter().zip(w) {
        assert!((got - want).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn built_matrices_are_reciprocal(m in saaty_matrix(3..=10)) {
        let n = m.size();
        for j in 0..n {
            prop_assert_eq!(m.get(j, j), 1.0);
            for k in 0..n {
                prop_assert!((m.get(j, k) * m.get(k, j) - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_at_least_n_and_weights_positive(m in saaty_matrix(3..=10)) {
        let n = m.size() as f64;
        let sol = solve(&m);
        prop_assert!(sol.lambda_max >= n - 1e-9, "lambda {} < n {}", sol.lambda_max, n);
        prop_assert!(sol.weights.iter().all(|&w| w > 0.0));
        prop_assert!((sol.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let report = consistency(&sol).unwrap();
        prop_assert!(report.consistency_ratio >= -1e-9);
    }

    #[test]
    fn consistent_matrices_have_lambda_n(w in prop::collection::vec(1.0f64..3.0, 3..=10)) {
        let n = w.len();
        let rows: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|k| w[j] / w[k]).collect()).collect();
        let m = ComparisonMatrix::from_entries(&labels(n), &rows).unwrap();
        let sol = solve(&m);
        prop_assert!((sol.lambda_max - n as f64).abs() < 1e-9);
        let total: f64 = w.iter().sum();
        for (got, x) in sol.weights.iter().zip(&w) {
            prop_assert!((got - x / total).abs() < 1e-9);
        }
    }

    #[test]
    fn inconsistent_matrices_exceed_n(m in saaty_matrix(3..=6)) {
        let sol = solve(&m);
        let n = m.size();
        let consistent = (0..n).all(|j| (0..n).all(|k| {
            (m.get(j, k) - sol.weights[j] / sol.weights[k]).abs() < 1e-6
        }));
        if !consistent {
            prop_assert!(sol.lambda_max > n as f64 + 1e-9);
        }
    }

    #[test]
    fn permutation_invariance(
        (m, perm) in saaty_matrix(3..=8).prop_flat_map(|m| {
            let idx: Vec<usize> = (0..m.size()).collect();
            (Just(m), Just(idx).prop_shuffle())
        })
    ) {
        let order: Vec<String> = perm.iter().map(|&i| m.labels()[i].clone()).collect();
        let permuted = m.reordered(&order).unwrap();
        let a = solve(&m);
        let b = solve(&permuted);
        prop_assert!((a.lambda_max - b.lambda_max).abs() < 1e-9);
        for label in m.labels() {
            let (x, y) = (a.weight(label).unwrap(), b.weight(label).unwrap());
            prop_assert!((x - y).abs() < 1e-8, "{}: {} vs {}", label, x, y);
        }
    }

    #[test]
    fn start_scale_invariance(
        (m, start) in saaty_matrix(3..=8).prop_flat_map(|m| {
            let n = m.size();
            (Just(m), prop::collection::vec(0.01f64..10.0, n))
        }),
        scale in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = start.iter().map(|x| x * scale).collect();
        let a = principal_eigenvector_from(&m, &start, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let b = principal_eigenvector_from(&m, &scaled, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        for (x, y) in a.weights.iter().zip(&b.weights) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn power_iteration_matches_cubic_oracle(m in saaty_matrix(3..=3)) {
        let (lambda, w) = cubic_oracle(&m);
        let sol = solve(&m);
        prop_assert!((sol.lambda_max - lambda).abs() < 1e-8);
        for (got, want) in sol.weights.iter().zip(w) {
            prop_assert!((got - want).abs() < 1e-8, "{} vs {}", got, want);
        }
    }
}
