//! Pairwise comparison matrices and priority weights.
//!
//! A comparison matrix holds Saaty-scale scores: entry `(j, k)` says how much
//! more important attribute `j` is than attribute `k`. Priority weights are the
//! unit-sum principal eigenvector, and the consistency ratio tells whether the
//! scores are coherent enough for those weights to be trusted.

use serde::Serialize;
use thiserror::Error;

/// Smallest score on the Saaty comparison scale.
pub const SAATY_MIN: f64 = 1.0 / 9.0;
/// Largest score on the Saaty comparison scale.
pub const SAATY_MAX: f64 = 9.0;

/// Matrices with a consistency ratio below this are acceptable.
pub const CONSISTENCY_THRESHOLD: f64 = 0.1;

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;

// Lower-triangle entries supplied in a full matrix must be reciprocal to this
// relative accuracy (enough for scores typed with four decimals).
const INPUT_RECIPROCITY_TOL: f64 = 1e-3;
const SCALE_SLACK: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AhpError {
    #[error("a comparison matrix needs at least 2 attributes, got {0}")]
    TooFewAttributes(usize),
    #[error("duplicate attribute label `{0}`")]
    DuplicateLabel(String),
    #[error("{labels} labels need {expected} upper-triangle scores, got {got}")]
    UpperTriangleLength {
        labels: usize,
        expected: usize,
        got: usize,
    },
    #[error("matrix must be {n}x{n}: row {row} has {len} entries")]
    NotSquare { n: usize, row: usize, len: usize },
    #[error("score {value} for ({row}, {col}) is outside the Saaty scale [1/9, 9]")]
    OutOfScale {
        row: String,
        col: String,
        value: f64,
    },
    #[error("diagonal entry ({label}, {label}) must be 1, got {value}")]
    DiagonalNotUnit { label: String, value: f64 },
    #[error("entries ({row}, {col}) = {upper} and ({col}, {row}) = {lower} are not reciprocal")]
    NotReciprocal {
        row: String,
        col: String,
        upper: f64,
        lower: f64,
    },
    #[error("unknown attribute label `{0}`")]
    UnknownLabel(String),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("start vector must have {expected} strictly positive entries")]
    InvalidStartVector { expected: usize },
    #[error("power iteration did not converge in {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
    #[error("no random consistency index for n = {0} (supported: 3..=10)")]
    UnsupportedSize(usize),
}

/// A positive reciprocal matrix of pairwise attribute scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<f64>>,
}

fn in_scale(value: f64) -> bool {
    (SAATY_MIN * (1.0 - SCALE_SLACK)..=SAATY_MAX * (1.0 + SCALE_SLACK)).contains(&value)
}

fn check_labels(labels: &[String]) -> Result<(), AhpError> {
    if labels.len() < 2 {
        return Err(AhpError::TooFewAttributes(labels.len()));
    }
    for (i, label) in labels.iter().enumerate() {
        if labels[..i].contains(label) {
            return Err(AhpError::DuplicateLabel(label.clone()));
        }
    }
    Ok(())
}

impl ComparisonMatrix {
    /// Builds a matrix from the strict upper triangle, given row by row:
    /// `(0,1), (0,2), .., (0,n-1), (1,2), ..`. The diagonal is set to 1 and
    /// the lower triangle to the reciprocals.
    pub fn from_upper_triangle<S: AsRef<str>>(
        labels: &[S],
        upper: &[f64],
    ) -> Result<Self, AhpError> {
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        check_labels(&labels)?;
        let n = labels.len();
        let expected = n * (n - 1) / 2;
        if upper.len() != expected {
            return Err(AhpError::UpperTriangleLength {
                labels: n,
                expected,
                got: upper.len(),
            });
        }

        let mut entries = vec![vec![1.0; n]; n];
        let mut scores = upper.iter();
        for j in 0..n {
            for k in (j + 1)..n {
                let value = *scores.next().expect("length checked above");
                if !in_scale(value) {
                    return Err(AhpError::OutOfScale {
                        row: labels[j].clone(),
                        col: labels[k].clone(),
                        value,
                    });
                }
                entries[j][k] = value;
                entries[k][j] = 1.0 / value;
            }
        }
        Ok(Self { labels, entries })
    }

    /// Builds a matrix from a full square table. The diagonal and the lower
    /// triangle are validated, then the lower triangle is regenerated from the
    /// upper one so the stored matrix is exactly reciprocal.
    pub fn from_entries<S: AsRef<str>>(
        labels: &[S],
        entries: &[Vec<f64>],
    ) -> Result<Self, AhpError> {
        let labels: Vec<String> = labels.iter().map(|l| l.as_ref().to_owned()).collect();
        check_labels(&labels)?;
        let n = labels.len();
        if entries.len() != n {
            return Err(AhpError::NotSquare {
                n,
                row: entries.len().min(n),
                len: entries.len(),
            });
        }
        for (row, values) in entries.iter().enumerate() {
            if values.len() != n {
                return Err(AhpError::NotSquare {
                    n,
                    row,
                    len: values.len(),
                });
            }
        }

        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            let diag = entries[j][j];
            if (diag - 1.0).abs() > SCALE_SLACK {
                return Err(AhpError::DiagonalNotUnit {
                    label: labels[j].clone(),
                    value: diag,
                });
            }
            for k in (j + 1)..n {
                let (hi, lo) = (entries[j][k], entries[k][j]);
                for (r, c, v) in [(j, k, hi), (k, j, lo)] {
                    if !in_scale(v) {
                        return Err(AhpError::OutOfScale {
                            row: labels[r].clone(),
                            col: labels[c].clone(),
                            value: v,
                        });
                    }
                }
                if (hi * lo - 1.0).abs() > INPUT_RECIPROCITY_TOL {
                    return Err(AhpError::NotReciprocal {
                        row: labels[j].clone(),
                        col: labels[k].clone(),
                        upper: hi,
                        lower: lo,
                    });
                }
                upper.push(hi);
            }
        }
        Self::from_upper_triangle(&labels, &upper)
    }

    /// The n x n matrix with every score equal to 1.
    pub fn uniform<S: AsRef<str>>(labels: &[S]) -> Result<Self, AhpError> {
        let n = labels.len();
        Self::from_upper_triangle(labels, &vec![1.0; n * n.saturating_sub(1) / 2])
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row][col]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Strict upper triangle in the order accepted by [`Self::from_upper_triangle`].
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.size();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for j in 0..n {
            for k in (j + 1)..n {
                out.push(self.entries[j][k]);
            }
        }
        out
    }

    /// Returns the same judgments with rows and columns permuted to `order`.
    pub fn reordered<S: AsRef<str>>(&self, order: &[S]) -> Result<Self, AhpError> {
        if order.len() != self.size() {
            return Err(AhpError::NotSquare {
                n: self.size(),
                row: 0,
                len: order.len(),
            });
        }
        let idx = order
            .iter()
            .map(|l| {
                self.index_of(l.as_ref())
                    .ok_or_else(|| AhpError::UnknownLabel(l.as_ref().to_owned()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let labels: Vec<String> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        check_labels(&labels)?;
        let entries = idx
            .iter()
            .map(|&r| idx.iter().map(|&c| self.entries[r][c]).collect())
            .collect();
        Ok(Self { labels, entries })
    }

    fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .iter()
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Dominant eigenpair of a comparison matrix.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenSolution {
    pub labels: Vec<String>,
    pub lambda_max: f64,
    /// Unit-sum principal eigenvector, in label order.
    pub weights: Vec<f64>,
    pub iterations: usize,
    /// Final `max |Mw - lambda w|`.
    pub residual: f64,
}

impl EigenSolution {
    pub fn weight(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.weights[i])
    }
}

/// Power iteration from the uniform start vector.
pub fn principal_eigenvector(
    m: &ComparisonMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<EigenSolution, AhpError> {
    let n = m.size();
    principal_eigenvector_from(m, &vec![1.0 / n as f64; n], tol, max_iter)
}

/// Power iteration from an arbitrary strictly positive start vector.
///
/// Each step multiplies by the matrix and renormalizes to unit sum. The
/// eigenvalue is the Rayleigh quotient of the current iterate; iteration stops
/// once `max |Mw - lambda w| <= tol * lambda`.
pub fn principal_eigenvector_from(
    m: &ComparisonMatrix,
    start: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<EigenSolution, AhpError> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(AhpError::InvalidTolerance(tol));
    }
    let n = m.size();
    if start.len() != n || start.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(AhpError::InvalidStartVector { expected: n });
    }

    let total: f64 = start.iter().sum();
    let mut w: Vec<f64> = start.iter().map(|x| x / total).collect();
    let mut residual = f64::INFINITY;

    for iteration in 1..=max_iter {
        let mw = m.apply(&w);
        let lambda = dot(&w, &mw) / dot(&w, &w);
        residual = mw
            .iter()
            .zip(&w)
            .map(|(y, x)| (y - lambda * x).abs())
            .fold(0.0, f64::max);
        if residual <= tol * lambda {
            return Ok(EigenSolution {
                labels: m.labels.clone(),
                lambda_max: lambda,
                weights: w,
                iterations: iteration,
                residual,
            });
        }
        let sum: f64 = mw.iter().sum();
        w = mw.into_iter().map(|y| y / sum).collect();
    }

    Err(AhpError::IterationLimit {
        iterations: max_iter,
        residual,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Saaty's random consistency index for matrices of size `n`.
pub fn random_index(n: usize) -> Option<f64> {
    match n {
        3 => Some(0.58),
        4 => Some(0.90),
        5 => Some(1.12),
        6 => Some(1.24),
        7 => Some(1.32),
        8 => Some(1.41),
        9 => Some(1.45),
        10 => Some(1.49),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub consistency_index: f64,
    pub random_index: f64,
    pub consistency_ratio: f64,
    pub acceptable: bool,
}

/// Consistency index and ratio of an eigen solution. Inconsistent matrices are
/// reported through `acceptable = false`, not rejected.
pub fn consistency(sol: &EigenSolution) -> Result<ConsistencyReport, AhpError> {
    let n = sol.weights.len();
    let random_index = random_index(n).ok_or(AhpError::UnsupportedSize(n))?;
    let consistency_index = (sol.lambda_max - n as f64) / (n as f64 - 1.0);
    let consistency_ratio = consistency_index / random_index;
    Ok(ConsistencyReport {
        consistency_index,
        random_index,
        consistency_ratio,
        acceptable: consistency_ratio < CONSISTENCY_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TPQ: [&str; 3] = ["timeliness", "proximity", "quality"];

    fn safety() -> ComparisonMatrix {
        ComparisonMatrix::from_upper_triangle(&TPQ, &[1.0 / 7.0, 1.0, 5.0]).unwrap()
    }

    fn traffic() -> ComparisonMatrix {
        ComparisonMatrix::from_upper_triangle(&TPQ, &[9.0, 3.0, 1.0 / 7.0]).unwrap()
    }

    #[test]
    fn upper_triangle_fills_reciprocals() {
        let m = safety();
        assert_eq!(m.get(1, 0), 7.0);
        assert_eq!(m.get(2, 1), 0.2);
        assert_eq!(m.get(2, 0), 1.0);
        for j in 0..3 {
            assert_eq!(m.get(j, j), 1.0);
        }
        let t = traffic();
        assert_eq!(t.get(1, 0), 1.0 / 9.0);
        assert_eq!(t.get(2, 1), 7.0);
        assert!((t.get(2, 0) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn all_ones_upper_gives_all_ones() {
        let m = ComparisonMatrix::from_upper_triangle(&TPQ, &[1.0; 3]).unwrap();
        assert!(m.entries().iter().flatten().all(|&x| x == 1.0));
        assert_eq!(m, ComparisonMatrix::uniform(&TPQ).unwrap());
    }

    #[test]
    fn rejects_score_outside_scale() {
        let err = ComparisonMatrix::from_upper_triangle(&TPQ, &[1.0, 15.0, 1.0]).unwrap_err();
        assert_eq!(
            err,
            AhpError::OutOfScale {
                row: "timeliness".into(),
                col: "quality".into(),
                value: 15.0
            }
        );
        assert!(ComparisonMatrix::from_upper_triangle(&TPQ, &[0.1, 1.0, 1.0]).is_err());
        assert!(ComparisonMatrix::from_upper_triangle(&TPQ, &[-1.0, 1.0, 1.0]).is_err());
        assert!(ComparisonMatrix::from_upper_triangle(&TPQ, &[f64::NAN, 1.0, 1.0]).is_err());
        // both ends of the scale are allowed
        assert!(ComparisonMatrix::from_upper_triangle(&TPQ, &[1.0 / 9.0, 9.0, 1.0]).is_ok());
    }

    #[test]
    fn rejects_bad_sizes() {
        assert_eq!(
            ComparisonMatrix::from_upper_triangle(&["a"], &[]).unwrap_err(),
            AhpError::TooFewAttributes(1)
        );
        assert!(matches!(
            ComparisonMatrix::from_upper_triangle(&TPQ, &[1.0, 1.0]),
            Err(AhpError::UpperTriangleLength {
                expected: 3,
                got: 2,
                ..
            })
        ));
        assert!(matches!(
            ComparisonMatrix::from_upper_triangle(&["a", "a"], &[1.0]),
            Err(AhpError::DuplicateLabel(_))
        ));
    }

    #[test]
    fn full_entries_are_validated_and_canonicalized() {
        let rows = vec![
            vec![1.0, 0.142857, 1.0],
            vec![7.0, 1.0, 5.0],
            vec![1.0, 0.2, 1.0],
        ];
        let m = ComparisonMatrix::from_entries(&TPQ, &rows).unwrap();
        // lower triangle rebuilt from the upper one
        assert!((m.get(1, 0) * m.get(0, 1) - 1.0).abs() < 1e-12);
        assert_eq!(m.get(0, 1), 0.142857);

        let mut bad = rows.clone();
        bad[1][1] = 2.0;
        assert!(matches!(
            ComparisonMatrix::from_entries(&TPQ, &bad),
            Err(AhpError::DiagonalNotUnit { .. })
        ));

        let mut bad = rows.clone();
        bad[1][0] = 3.0;
        assert!(matches!(
            ComparisonMatrix::from_entries(&TPQ, &bad),
            Err(AhpError::NotReciprocal { .. })
        ));

        let mut bad = rows.clone();
        bad[2][0] = 15.0;
        assert!(matches!(
            ComparisonMatrix::from_entries(&TPQ, &bad),
            Err(AhpError::OutOfScale { ref row, ref col, .. }) if row == "quality" && col == "timeliness"
        ));

        let ragged = vec![vec![1.0, 1.0], vec![1.0, 1.0, 1.0], vec![1.0, 1.0, 1.0]];
        assert!(matches!(
            ComparisonMatrix::from_entries(&TPQ, &ragged),
            Err(AhpError::NotSquare { row: 0, .. })
        ));
    }

    #[test]
    fn safety_weights_match_table() {
        let sol = principal_eigenvector(&safety(), DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let expected = [0.1194, 0.7471, 0.1336];
        for (w, e) in sol.weights.iter().zip(expected) {
            assert!((w - e).abs() < 1e-4, "{w} vs {e}");
        }
        assert!((sol.lambda_max - 3.0126).abs() < 1e-4);
        assert_eq!(sol.weight("proximity"), Some(sol.weights[1]));
    }

    #[test]
    fn traffic_weights_match_table() {
        let sol = principal_eigenvector(&traffic(), DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let expected = [0.6554, 0.0549, 0.2897];
        for (w, e) in sol.weights.iter().zip(expected) {
            assert!((w - e).abs() < 1e-4, "{w} vs {e}");
        }
    }

    #[test]
    fn uniform_matrix_has_lambda_n() {
        let sol = principal_eigenvector(
            &ComparisonMatrix::uniform(&TPQ).unwrap(),
            DEFAULT_TOLERANCE,
            DEFAULT_MAX_ITER,
        )
        .unwrap();
        assert!((sol.lambda_max - 3.0).abs() < 1e-12);
        for w in &sol.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
        let report = consistency(&sol).unwrap();
        assert!(report.consistency_index.abs() < 1e-12);
        assert!(report.consistency_ratio.abs() < 1e-12);
        assert!(report.acceptable);
    }

    #[test]
    fn consistency_of_table_matrices() {
        let s = principal_eigenvector(&safety(), DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let r = consistency(&s).unwrap();
        assert_eq!(r.random_index, 0.58);
        assert!((r.consistency_index - 0.0063).abs() < 1e-4);
        assert!((r.consistency_ratio - 0.0109).abs() < 1e-3);
        assert!(r.acceptable);
        assert!((r.consistency_index - (s.lambda_max - 3.0) / 2.0).abs() < 1e-12);

        let t = principal_eigenvector(&traffic(), DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let r = consistency(&t).unwrap();
        assert!((t.lambda_max - 3.0803).abs() < 1e-3);
        assert!((r.consistency_ratio - 0.069).abs() < 2e-3);
        assert!(r.acceptable);
    }

    #[test]
    fn inconsistent_matrix_is_reported_not_rejected() {
        // a > b, b > c, c > a: strongly intransitive
        let m = ComparisonMatrix::from_upper_triangle(&["a", "b", "c"], &[9.0, 1.0 / 9.0, 9.0])
            .unwrap();
        let sol = principal_eigenvector(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        let r = consistency(&sol).unwrap();
        assert!(!r.acceptable);
        assert!(r.consistency_ratio >= CONSISTENCY_THRESHOLD);
    }

    #[test]
    fn unsupported_sizes() {
        let m = ComparisonMatrix::from_upper_triangle(&["a", "b"], &[3.0]).unwrap();
        let sol = principal_eigenvector(&m, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!((sol.lambda_max - 2.0).abs() < 1e-10);
        assert_eq!(consistency(&sol).unwrap_err(), AhpError::UnsupportedSize(2));
        assert_eq!(random_index(11), None);
    }

    #[test]
    fn iteration_limit_reports_residual() {
        let err = principal_eigenvector(&traffic(), 1e-30, 3).unwrap_err();
        match err {
            AhpError::IterationLimit {
                iterations,
                residual,
            } => {
                assert_eq!(iterations, 3);
                assert!(residual > 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_tolerance_and_start() {
        assert!(matches!(
            principal_eigenvector(&safety(), 0.0, 10),
            Err(AhpError::InvalidTolerance(_))
        ));
        assert!(matches!(
            principal_eigenvector_from(&safety(), &[1.0, 0.0, 1.0], 1e-10, 10),
            Err(AhpError::InvalidStartVector { expected: 3 })
        ));
    }

    #[test]
    fn reorder_keeps_judgments() {
        let m = safety();
        let r = m
            .reordered(&["quality", "timeliness", "proximity"])
            .unwrap();
        assert_eq!(r.get(0, 2), m.get(2, 1));
        assert_eq!(r.labels()[1], "timeliness");
        assert!(matches!(
            m.reordered(&["x", "y", "z"]),
            Err(AhpError::UnknownLabel(_))
        ));
        assert_eq!(
            ComparisonMatrix::from_upper_triangle(m.labels(), &m.upper_triangle()).unwrap(),
            m
        );
    }
}
