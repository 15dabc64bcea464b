//! Bounded proper scoring rules and the transforms between equivalent rules.

mod rule;
mod transform;
mod truth;

pub use rule::{Family, OutcomeDomain, ScoreBounds, ScoringRule};
pub use transform::{
    are_equivalent, canonical_form, golden_section_min, normalize, truthful_expected_score, EQUIVALENCE_GRID,
    GOLDEN_TOLERANCE,
};
pub use truth::{expected_score, JointAtom, TrueDistribution, MAX_ENUMERATED_EVENTS};

/// Convenience alias for [`ScoringRule::score`].
pub fn score(rule: &ScoringRule, y: f64, x: f64) -> crate::Result<f64> {
    rule.score(y, x)
}
