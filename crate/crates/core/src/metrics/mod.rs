//! Agreement scores between two partitions of the same points.
//!
//! Pair counts are exact integers carried in `i128`; conversion to `f64`
//! happens once, at the final division. Entropy sums run over cells sorted by
//! their counts, so relabeling either partition leaves every score
//! bit-identical.

mod contingency;
mod entropy;
mod pairs;

pub use contingency::{contingency, ContingencyTable};
pub use entropy::{completeness, homogeneity, nmi, v_measure};
pub use pairs::{ari, fowlkes_mallows, fowlkes_mallows_detail, pairwise_ari, PairScore, PairwiseAri};

/// All five external scores of `pred` against `truth`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExternalScores {
    pub ari: f64,
    pub fowlkes_mallows: f64,
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

pub fn external_scores(
    pred: &crate::Partition,
    truth: &crate::Partition,
) -> crate::Result<ExternalScores> {
    Ok(ExternalScores {
        ari: ari(pred, truth)?,
        fowlkes_mallows: fowlkes_mallows(pred, truth)?,
        homogeneity: homogeneity(pred, truth)?,
        completeness: completeness(pred, truth)?,
        v_measure: v_measure(pred, truth)?,
    })
}
