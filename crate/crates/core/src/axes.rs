//! How the axes of two hyperbolic isometries sit relative to each other,
//! read off from the translation lengths of `g₁`, `g₂`, `g₁g₂` and `g₁g₂⁻¹`.
//!
//! The forward rules are:
//!
//! * disjoint axes at distance `d > 0`: `l(g₁g₂) = l₁ + l₂ + 2d`;
//! * axes meeting with the same orientation: `l(g₁g₂) = l₁ + l₂`;
//! * axes meeting with opposite orientations along a path of length `Δ`:
//!   `l₁ + l₂ − 2Δ` when `Δ < min(l₁, l₂)`, and at most `|l₁ − l₂|` otherwise.
//!
//! Replacing `g₂` by `g₂⁻¹` reverses its orientation, so the two products
//! between them pin down the configuration except when `Δ ≥ min(l₁, l₂)`.

use serde::{Deserialize, Serialize};

use crate::error::{ArborError, Result};
use crate::isometry::Isometry;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum AxisRelation {
    /// Axes are disjoint, `d` edges apart.
    Disjoint { d: u64 },
    /// Axes share exactly one vertex.
    TouchPoint,
    /// Axes share a path of length `delta < min(l₁, l₂)`.
    Overlap {
        delta: u64,
        /// Whether `g₁` and `g₂` translate the shared path the same way.
        #[serde(rename = "sameOrientation")]
        same_orientation: bool,
    },
    /// Axes share a path of length at least `delta_lower_bound = min(l₁, l₂)`.
    LargeOverlap {
        #[serde(rename = "deltaLowerBound")]
        delta_lower_bound: u64,
    },
}

impl AxisRelation {
    /// Classifies from raw lengths. `prod` is `l(g₁g₂)`, `prod_inv` is `l(g₁g₂⁻¹)`.
    pub fn from_lengths(l1: u64, l2: u64, prod: u64, prod_inv: u64) -> Result<Self> {
        let inconsistent = ArborError::InconsistentLengths {
            l1,
            l2,
            prod,
            prod_inv,
        };
        if l1 == 0 || l2 == 0 {
            return Err(inconsistent);
        }
        let sum = l1 + l2;
        let diff = l1.abs_diff(l2);
        let (s, big) = (prod.min(prod_inv), prod.max(prod_inv));
        if s > sum {
            if prod != prod_inv || !(s - sum).is_multiple_of(2) {
                return Err(inconsistent);
            }
            return Ok(AxisRelation::Disjoint { d: (s - sum) / 2 });
        }
        if big != sum {
            return Err(inconsistent);
        }
        if s == sum {
            return Ok(AxisRelation::TouchPoint);
        }
        if s > diff {
            if !(sum - s).is_multiple_of(2) {
                return Err(inconsistent);
            }
            return Ok(AxisRelation::Overlap {
                delta: (sum - s) / 2,
                same_orientation: prod == big,
            });
        }
        Ok(AxisRelation::LargeOverlap {
            delta_lower_bound: l1.min(l2),
        })
    }

    /// The overlap length when the lengths determine it.
    pub fn exact_overlap(&self) -> Option<u64> {
        match *self {
            AxisRelation::Disjoint { .. } => None,
            AxisRelation::TouchPoint => Some(0),
            AxisRelation::Overlap { delta, .. } => Some(delta),
            AxisRelation::LargeOverlap { .. } => None,
        }
    }
}

fn require_hyperbolic(g: &Isometry) -> Result<()> {
    if g.is_hyperbolic() {
        Ok(())
    } else {
        Err(ArborError::NotHyperbolic)
    }
}

pub fn classify_pair(g1: &Isometry, g2: &Isometry) -> Result<AxisRelation> {
    require_hyperbolic(g1)?;
    require_hyperbolic(g2)?;
    g1.same_prime(g2)?;
    AxisRelation::from_lengths(
        g1.translation_length(),
        g2.translation_length(),
        g1.product_length(g2),
        g1.product_inverse_length(g2),
    )
}

/// Whether the pair alone satisfies the two-element ping-pong criterion:
/// axes disjoint or sharing a path shorter than both translation lengths.
pub fn pair_pingpong(g1: &Isometry, g2: &Isometry) -> Result<bool> {
    Ok(!matches!(
        classify_pair(g1, g2)?,
        AxisRelation::LargeOverlap { .. }
    ))
}

/// Predicted distance from the terminal vertex `q` of the shared path of the
/// axes to a vertex fixed by the elliptic product `g₁g₂`: `|l₁ − l₂| / 2`.
pub fn elliptic_product_prediction(g1: &Isometry, g2: &Isometry) -> Result<u64> {
    require_hyperbolic(g1)?;
    require_hyperbolic(g2)?;
    g1.same_prime(g2)?;
    let prod = g1.product_length(g2);
    if prod != 0 {
        return Err(ArborError::NotElliptic(prod));
    }
    Ok(g1.translation_length().abs_diff(g2.translation_length()) / 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{Mat2, Prime, Rational};

    fn iso(e: [&str; 4], p: u64) -> Isometry {
        let [a, b, c, d] = e.map(|s| s.parse::<Rational>().unwrap());
        Isometry::new(Mat2::new(a, b, c, d), Prime::new(p).unwrap()).unwrap()
    }

    #[test]
    fn decision_table() {
        assert_eq!(
            AxisRelation::from_lengths(2, 2, 8, 8),
            Ok(AxisRelation::Disjoint { d: 2 })
        );
        assert_eq!(AxisRelation::from_lengths(4, 2, 6, 6), Ok(AxisRelation::TouchPoint));
        assert_eq!(
            AxisRelation::from_lengths(4, 6, 10, 8),
            Ok(AxisRelation::Overlap {
                delta: 1,
                same_orientation: true
            })
        );
        assert_eq!(
            AxisRelation::from_lengths(4, 6, 4, 10),
            Ok(AxisRelation::Overlap {
                delta: 3,
                same_orientation: false
            })
        );
        assert_eq!(
            AxisRelation::from_lengths(4, 6, 2, 10),
            Ok(AxisRelation::LargeOverlap {
                delta_lower_bound: 4
            })
        );
        assert!(AxisRelation::from_lengths(2, 2, 8, 10).is_err());
        assert!(AxisRelation::from_lengths(2, 2, 2, 2).is_err());
        assert!(AxisRelation::from_lengths(0, 2, 2, 2).is_err());
    }

    #[test]
    fn identical_axes_are_a_large_overlap() {
        let g = iso(["5", "0", "0", "1/5"], 5);
        assert_eq!(
            classify_pair(&g, &g),
            Ok(AxisRelation::LargeOverlap {
                delta_lower_bound: 2
            })
        );
        assert_eq!(pair_pingpong(&g, &g), Ok(false));
    }

    #[test]
    fn example_pairs() {
        let g1 = iso(["129/49", "-178/49", "6/49", "31/147"], 7);
        let g5 = iso(["7", "7", "-3/7", "-2/7"], 7);
        // l(g5 g1) = 6 = l1 + l2 - 2·0 ... the four lengths give a one-edge overlap
        let rel = classify_pair(&g1, &g5).unwrap();
        assert_eq!(
            rel,
            AxisRelation::Overlap {
                delta: 1,
                same_orientation: false
            }
        );
        assert_eq!(pair_pingpong(&g1, &g5), Ok(true));
        assert_eq!(classify_pair(&g5, &g1).unwrap().exact_overlap(), Some(1));
    }

    #[test]
    fn serializes_as_tagged_union() {
        let rel = AxisRelation::Overlap {
            delta: 1,
            same_orientation: false,
        };
        assert_eq!(
            serde_json::to_string(&rel).unwrap(),
            r#"{"kind":"overlap","delta":1,"sameOrientation":false}"#
        );
        assert_eq!(
            serde_json::to_string(&AxisRelation::Disjoint { d: 3 }).unwrap(),
            r#"{"kind":"disjoint","d":3}"#
        );
    }

    #[test]
    fn elliptic_prediction() {
        let g = iso(["5", "0", "0", "1/5"], 5);
        assert_eq!(elliptic_product_prediction(&g, &g.inverse()), Ok(0));
        assert_eq!(elliptic_product_prediction(&g, &g), Err(ArborError::NotElliptic(4)));
    }
}
