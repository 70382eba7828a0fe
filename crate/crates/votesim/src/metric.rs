//! Euclidean distance and the two voter utility functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Position;

/// Lower clamp on distances, so coincident voter/candidate pairs keep the
/// inverse-distance utility (and unit vectors) finite.
pub const DEFAULT_EPSILON: f64 = 1e-6;

/// Default repulsion threshold: half the evaluation-score range.
pub const DEFAULT_ALPHA: f64 = 50.0;

/// The two utility shapes a voter can score candidates with.
///
/// Both are decreasing in distance; `Repulsive` turns negative once the
/// candidate is farther than `alpha`, which pushes voters away and models
/// abstention when every candidate is that far.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UtilityFunction {
    InverseDistance { epsilon: f64 },
    Repulsive { alpha: f64 },
}

impl UtilityFunction {
    pub fn inverse_distance() -> Self {
        Self::InverseDistance {
            epsilon: DEFAULT_EPSILON,
        }
    }

    pub fn repulsive(alpha: f64) -> Self {
        Self::Repulsive { alpha }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::InverseDistance { epsilon } => {
                if !(epsilon > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "epsilon must be positive, got {epsilon}"
                    )));
                }
            }
            Self::Repulsive { alpha } => {
                if !(alpha > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "alpha must be positive, got {alpha}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Utility of candidate `c` for a voter at `v`.
    pub fn evaluate(&self, v: &Position, c: &Position) -> Result<f64> {
        match *self {
            Self::InverseDistance { epsilon } => utility_inverse(v, c, epsilon),
            Self::Repulsive { alpha } => utility_repulsive(v, c, alpha),
        }
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &Position, b: &Position) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let sum: f64 = a
        .coords()
        .iter()
        .zip(b.coords())
        .map(|(x, y)| (x - y) * (x - y))
        .sum();
    Ok(sum.sqrt())
}

/// Utility inversely proportional to distance, with the distance clamped
/// from below by `epsilon` so coincident points stay finite.
pub fn utility_inverse(v: &Position, c: &Position, epsilon: f64) -> Result<f64> {
    let d = distance(v, c)?;
    Ok(1.0 / d.max(epsilon))
}

/// Utility `(alpha - dist) / (1 + dist)^2`: positive within `alpha` of the
/// candidate, zero at exactly `alpha`, negative (repulsive) beyond.
pub fn utility_repulsive(v: &Position, c: &Position, alpha: f64) -> Result<f64> {
    let d = distance(v, c)?;
    Ok((alpha - d) / ((1.0 + d) * (1.0 + d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pos(coords: &[f64]) -> Position {
        Position(coords.to_vec())
    }

    fn zeros(d: usize) -> Position {
        Position(vec![0.0; d])
    }

    #[test]
    fn distance_identity() {
        assert_eq!(distance(&zeros(11), &zeros(11)).unwrap(), 0.0);
    }

    #[test]
    fn distance_3_4_5() {
        let mut a = vec![0.0; 11];
        a[0] = 3.0;
        a[1] = 4.0;
        assert_eq!(distance(&pos(&a), &zeros(11)).unwrap(), 5.0);
    }

    #[test]
    fn distance_dimension_mismatch() {
        let err = distance(&zeros(3), &zeros(5)).unwrap_err();
        match err {
            Error::DimensionMismatch { left, right } => {
                assert_eq!((left, right), (3, 5));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn inverse_utility_point_checks() {
        let v = zeros(2);
        let at_1 = pos(&[1.0, 0.0]);
        let at_2 = pos(&[2.0, 0.0]);
        assert_eq!(utility_inverse(&v, &at_1, 1e-6).unwrap(), 1.0);
        assert_eq!(utility_inverse(&v, &at_2, 1e-6).unwrap(), 0.5);
        // coincident points hit the epsilon clamp
        assert_eq!(utility_inverse(&v, &zeros(2), 1e-6).unwrap(), 1e6);
    }

    #[test]
    fn repulsive_utility_point_checks() {
        let alpha = 50.0;
        let v = zeros(2);
        assert_eq!(utility_repulsive(&v, &zeros(2), alpha).unwrap(), alpha);
        let at_alpha = pos(&[alpha, 0.0]);
        assert_eq!(utility_repulsive(&v, &at_alpha, alpha).unwrap(), 0.0);
        let at_100 = pos(&[100.0, 0.0]);
        let expected = -50.0 / 10201.0;
        let got = utility_repulsive(&v, &at_100, alpha).unwrap();
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn repulsive_decreasing_on_grid() {
        // numeric check over dist in [0, 3*alpha], step alpha/100
        let alpha = 50.0;
        let v = zeros(1);
        let mut prev = f64::INFINITY;
        for i in 0..=300 {
            let d = i as f64 * alpha / 100.0;
            let u = utility_repulsive(&v, &pos(&[d]), alpha).unwrap();
            assert!(u < prev, "not decreasing at dist {d}");
            prev = u;
        }
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0f64..100.0
    }

    fn point(d: usize) -> impl Strategy<Value = Position> {
        proptest::collection::vec(coord(), d).prop_map(Position)
    }

    proptest! {
        #[test]
        fn distance_matches_naive_loop(a in point(11), b in point(11)) {
            let mut sum = 0.0;
            for i in 0..11 {
                let diff = a.0[i] - b.0[i];
                sum += diff * diff;
            }
            let expected = sum.sqrt();
            let got = distance(&a, &b).unwrap();
            let tol = 1e-12 * expected.max(1.0);
            prop_assert!((got - expected).abs() <= tol);
        }

        #[test]
        fn triangle_inequality(a in point(5), b in point(5), c in point(5)) {
            let ab = distance(&a, &b).unwrap();
            let bc = distance(&b, &c).unwrap();
            let ac = distance(&a, &c).unwrap();
            prop_assert!(ac <= ab + bc + 1e-9);
        }

        #[test]
        fn inverse_utility_monotone(v in point(4), c1 in point(4), c2 in point(4)) {
            let eps = 1e-6;
            let d1 = distance(&v, &c1).unwrap();
            let d2 = distance(&v, &c2).unwrap();
            prop_assume!(d1 >= eps && d2 >= eps && d1 < d2);
            let u1 = utility_inverse(&v, &c1, eps).unwrap();
            let u2 = utility_inverse(&v, &c2, eps).unwrap();
            prop_assert!(u1 > u2);
        }

        #[test]
        fn repulsive_sign_matches_alpha_gap(v in point(3), c in point(3), alpha in 1.0f64..100.0) {
            let d = distance(&v, &c).unwrap();
            prop_assume!(d != alpha);
            let u = utility_repulsive(&v, &c, alpha).unwrap();
            prop_assert_eq!(u > 0.0, d < alpha);
        }
    }
}
