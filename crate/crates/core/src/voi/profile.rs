//! Application profiles: attribute weights for one target application.

use serde::{Deserialize, Serialize};

use crate::ahp::{self, ComparisonMatrix};

use super::{Attribute, AttributeScores, VoiError};

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Weights indexed by attribute rather than by position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsSpec", into = "WeightsSpec")]
pub struct AttributeWeights {
    timeliness: f64,
    proximity: f64,
    quality: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsSpec {
    pub timeliness: f64,
    pub proximity: f64,
    pub quality: f64,
}

impl AttributeWeights {
    pub fn new(timeliness: f64, proximity: f64, quality: f64) -> Result<Self, VoiError> {
        let w = [timeliness, proximity, quality];
        if w.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(VoiError::InvalidWeights(format!(
                "weights must be non-negative and finite, got {w:?}"
            )));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(VoiError::InvalidWeights(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self {
            timeliness,
            proximity,
            quality,
        })
    }

    /// Weights in `[timeliness, proximity, quality]` order.
    pub fn from_slice(w: &[f64]) -> Result<Self, VoiError> {
        match *w {
            [t, p, q] => Self::new(t, p, q),
            _ => Err(VoiError::Shape {
                expected: Attribute::ALL.len(),
                got: w.len(),
            }),
        }
    }

    pub fn get(&self, attribute: Attribute) -> f64 {
        match attribute {
            Attribute::Timeliness => self.timeliness,
            Attribute::Proximity => self.proximity,
            Attribute::Quality => self.quality,
        }
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.timeliness, self.proximity, self.quality]
    }

    /// Weighted sum of the attribute scores.
    pub fn aggregate(&self, scores: &AttributeScores) -> f64 {
        Attribute::ALL
            .iter()
            .map(|&a| self.get(a) * scores.get(a))
            .sum()
    }
}

impl TryFrom<WeightsSpec> for AttributeWeights {
    type Error = VoiError;

    fn try_from(s: WeightsSpec) -> Result<Self, Self::Error> {
        AttributeWeights::new(s.timeliness, s.proximity, s.quality)
    }
}

impl From<AttributeWeights> for WeightsSpec {
    fn from(w: AttributeWeights) -> Self {
        Self {
            timeliness: w.timeliness,
            proximity: w.proximity,
            quality: w.quality,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApplicationProfile {
    pub name: String,
    pub weights: AttributeWeights,
}

// Principal eigenvectors of the two built-in matrices, frozen at full double
// precision so figure reproduction does not depend on iteration details.
const SAFETY_WEIGHTS: [f64; 3] = [
    0.119_388_534_603_474_87,
    0.747_052_831_924_315_6,
    0.133_558_633_472_209_54,
];
const TRAFFIC_WEIGHTS: [f64; 3] = [
    0.655_355_490_660_131_2,
    0.054_900_399_468_127_44,
    0.289_744_109_871_741_3,
];

impl ApplicationProfile {
    pub fn new(name: impl Into<String>, weights: AttributeWeights) -> Self {
        Self {
            name: name.into(),
            weights,
        }
    }

    /// Advanced safety: proximity dominates.
    pub fn safety() -> Self {
        Self::new(
            "safety",
            AttributeWeights::from_slice(&SAFETY_WEIGHTS).expect("unit-sum constants"),
        )
    }

    /// Traffic management: timeliness dominates.
    pub fn traffic() -> Self {
        Self::new(
            "traffic",
            AttributeWeights::from_slice(&TRAFFIC_WEIGHTS).expect("unit-sum constants"),
        )
    }

    /// Comparison matrix behind [`Self::safety`].
    pub fn safety_matrix() -> ComparisonMatrix {
        ComparisonMatrix::from_upper_triangle(&Attribute::LABELS, &[1.0 / 7.0, 1.0, 5.0])
            .expect("valid built-in matrix")
    }

    /// Comparison matrix behind [`Self::traffic`].
    pub fn traffic_matrix() -> ComparisonMatrix {
        ComparisonMatrix::from_upper_triangle(&Attribute::LABELS, &[9.0, 3.0, 1.0 / 7.0])
            .expect("valid built-in matrix")
    }

    /// Derives the weights from a comparison matrix over the three attributes.
    /// Labels are matched by name, so the matrix may list them in any order.
    pub fn from_matrix(
        name: impl Into<String>,
        matrix: &ComparisonMatrix,
    ) -> Result<Self, VoiError> {
        if matrix.size() != Attribute::ALL.len() {
            return Err(VoiError::Shape {
                expected: Attribute::ALL.len(),
                got: matrix.size(),
            });
        }
        let mut order = Vec::with_capacity(3);
        for attribute in Attribute::ALL {
            let label = matrix
                .labels()
                .iter()
                .find(|l| Attribute::parse(l) == Some(attribute))
                .ok_or_else(|| {
                    VoiError::InvalidWeights(format!("matrix has no `{}` row", attribute.name()))
                })?;
            order.push(label.clone());
        }
        let canonical = matrix.reordered(&order)?;
        let sol =
            ahp::principal_eigenvector(&canonical, ahp::DEFAULT_TOLERANCE, ahp::DEFAULT_MAX_ITER)?;
        Ok(Self::new(name, AttributeWeights::from_slice(&sol.weights)?))
    }
}
