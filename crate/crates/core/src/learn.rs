//! End-to-end pattern learning: skeleton phase followed by an orientation
//! rule.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::ci::{CiError, CiOracle};
use crate::complex::{extract_pattern, label_ambiguity, recover_complex_arrows, AmbiguityPolicy, Pattern};
use crate::graph::{MixedGraph, VertexId};
use crate::skeleton::{learn_skeleton, SkeletonMode, SkeletonOptions, SkeletonResult, VariableOrdering};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("invalid variable ordering: {0}")]
    InvalidOrdering(String),
    #[error("query {u} vs {v} given {set:?} failed: {source}")]
    Oracle {
        u: VertexId,
        v: VertexId,
        set: Vec<usize>,
        #[source]
        source: CiError,
    },
    #[error("no separating set recorded for nonadjacent pair ({0}, {1})")]
    MissingSepset(VertexId, VertexId),
    #[error("no separating set found for nonadjacent pair ({0}, {1})")]
    EmptyFamily(VertexId, VertexId),
    #[error("invalid orientation policy: {0}")]
    InvalidPolicy(String),
    #[error("cannot parse variant {0:?}")]
    InvalidVariant(String),
}

impl LearnError {
    pub(crate) fn oracle(u: VertexId, v: VertexId, set: &[VertexId], source: CiError) -> Self {
        LearnError::Oracle {
            u,
            v,
            set: set.iter().map(|x| x.0).collect(),
            source,
        }
    }
}

/// Orientation step applied after the skeleton.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum OrientationRule {
    Plain,
    Ambiguity(AmbiguityPolicy),
}

/// Skeleton mode plus orientation rule. Text form is
/// `<original|stable>-<plain|conservative|majority:A:B>`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Variant {
    pub mode: SkeletonMode,
    pub rule: OrientationRule,
}

impl Variant {
    pub fn new(mode: SkeletonMode, rule: OrientationRule) -> Self {
        Variant { mode, rule }
    }

    pub fn plain(mode: SkeletonMode) -> Self {
        Variant::new(mode, OrientationRule::Plain)
    }

    pub fn conservative(mode: SkeletonMode) -> Self {
        Variant::new(mode, OrientationRule::Ambiguity(AmbiguityPolicy::Conservative))
    }

    pub fn majority(mode: SkeletonMode, alpha_pct: f64, beta_pct: f64) -> Result<Self, LearnError> {
        Ok(Variant::new(
            mode,
            OrientationRule::Ambiguity(AmbiguityPolicy::majority(alpha_pct, beta_pct)?),
        ))
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mode = match self.mode {
            SkeletonMode::Original => "original",
            SkeletonMode::Stable => "stable",
        };
        match self.rule {
            OrientationRule::Plain => write!(f, "{mode}-plain"),
            OrientationRule::Ambiguity(p) => write!(f, "{mode}-{p}"),
        }
    }
}

impl FromStr for Variant {
    type Err = LearnError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LearnError::InvalidVariant(s.to_string());
        let (mode, rule) = s.split_once('-').ok_or_else(bad)?;
        let mode = match mode {
            "original" => SkeletonMode::Original,
            "stable" => SkeletonMode::Stable,
            _ => return Err(bad()),
        };
        let mut parts = rule.split(':');
        match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some("plain"), None, ..) => Ok(Variant::plain(mode)),
            (Some("conservative"), None, ..) => Ok(Variant::conservative(mode)),
            (Some("majority"), Some(a), Some(b), None) => {
                let a: f64 = a.parse().map_err(|_| bad())?;
                let b: f64 = b.parse().map_err(|_| bad())?;
                Variant::majority(mode, a, b)
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct LearnOutput {
    pub skeleton: SkeletonResult,
    /// Skeleton with recovered arrows, before pattern extraction.
    pub oriented: MixedGraph,
    pub pattern: Pattern,
    /// Queries over the whole run, skeleton included.
    pub ci_queries: u64,
}

#[derive(Copy, Clone, Debug, Default)]
pub struct LearnOptions {
    pub trace: bool,
    pub parallel: bool,
}

pub fn learn_pattern<O: CiOracle + ?Sized>(
    oracle: &O,
    order: &VariableOrdering,
    variant: Variant,
    opts: LearnOptions,
) -> Result<LearnOutput, LearnError> {
    let start = oracle.test_count();
    let sk_opts = SkeletonOptions {
        mode: variant.mode,
        trace: opts.trace,
        parallel: opts.parallel,
    };
    let skeleton = learn_skeleton(oracle, order, &sk_opts)?;
    let (oriented, pattern) = match variant.rule {
        OrientationRule::Plain => {
            let oriented = recover_complex_arrows(&skeleton, oracle)?;
            let pattern = extract_pattern(&oriented);
            (oriented, pattern)
        }
        OrientationRule::Ambiguity(policy) => {
            let out = label_ambiguity(&skeleton, oracle, policy)?;
            (out.oriented, out.pattern)
        }
    };
    Ok(LearnOutput {
        skeleton,
        oriented,
        pattern,
        ci_queries: oracle.test_count() - start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variant_round_trip() {
        for s in ["original-plain", "stable-conservative", "stable-majority:30:60", "original-majority:0:100"] {
            let v: Variant = s.parse().unwrap();
            assert_eq!(v.to_string(), s);
        }
        for s in ["stable", "pc-plain", "stable-majority:60:30", "stable-majority:1", "stable-plain:1"] {
            assert!(s.parse::<Variant>().is_err(), "{s}");
        }
    }
}
