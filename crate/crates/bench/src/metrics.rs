//! Skeleton confusion counts and structural Hamming distance.

use lwfcg::{MixedGraph, VertexId};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graphs have {0} and {1} vertices")]
pub struct VertexMismatch(pub usize, pub usize);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SkeletonScore {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tpr: f64,
    pub fpr: f64,
    pub tdr: f64,
    /// False when nothing was learned, so TDR is a convention rather than a
    /// ratio.
    pub tdr_defined: bool,
    pub acc: f64,
}

fn ratio(num: usize, den: usize, empty: f64) -> f64 {
    if den == 0 {
        empty
    } else {
        num as f64 / den as f64
    }
}

/// Compares adjacencies only. With no true edges TPR is 1; with no true
/// gaps FPR is 0; with nothing learned TDR is 1 if the truth is edgeless
/// and 0 otherwise.
pub fn score_skeleton(learned: &MixedGraph, truth: &MixedGraph) -> Result<SkeletonScore, VertexMismatch> {
    if learned.p() != truth.p() {
        return Err(VertexMismatch(learned.p(), truth.p()));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0, 0, 0, 0);
    for u in 0..truth.p() {
        for v in (u + 1)..truth.p() {
            let (a, b) = (VertexId(u), VertexId(v));
            match (learned.is_adjacent(a, b), truth.is_adjacent(a, b)) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, false) => tn += 1,
                (false, true) => fn_ += 1,
            }
        }
    }
    let truth_edges = tp + fn_;
    let tdr_defined = tp + fp > 0;
    Ok(SkeletonScore {
        tp,
        fp,
        tn,
        fn_,
        tpr: ratio(tp, truth_edges, 1.0),
        fpr: ratio(fp, fp + tn, 0.0),
        tdr: ratio(tp, tp + fp, if truth_edges == 0 { 1.0 } else { 0.0 }),
        tdr_defined,
        acc: ratio(tp + tn, tp + fp + tn + fn_, 1.0),
    })
}

/// Number of vertex pairs whose edge marks differ: a missing or extra edge,
/// or a shared edge with a different orientation, each cost one.
pub fn shd(a: &MixedGraph, b: &MixedGraph) -> Result<usize, VertexMismatch> {
    if a.p() != b.p() {
        return Err(VertexMismatch(a.p(), b.p()));
    }
    let mut d = 0;
    for u in 0..a.p() {
        for v in (u + 1)..a.p() {
            let (x, y) = (VertexId(u), VertexId(v));
            if a.mark(x, y) != b.mark(x, y) {
                d += 1;
            }
        }
    }
    Ok(d)
}
