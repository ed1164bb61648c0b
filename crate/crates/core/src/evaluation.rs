//! Ranking of scored rules and recall/precision by rank.
//!
//! Ties in score are frequent (MLE gives every `1/1` pair the same value),
//! so the ranking uses a total order: score descending, then joint count
//! `x` descending, then `(item_b, item_a)` ascending.

use std::cmp::Ordering;
use std::io::Write;

use crate::error::{Error, Result};
use crate::mining::{CandidateRule, PairCounts};
use crate::synth::HierarchicalRelation;

fn rank_order(l: &CandidateRule, r: &CandidateRule) -> Ordering {
    r.score
        .total_cmp(&l.score)
        .then_with(|| r.counts.x().cmp(&l.counts.x()))
        .then_with(|| l.item_b.cmp(&r.item_b))
        .then_with(|| l.item_a.cmp(&r.item_a))
}

pub fn rank_rules(mut rules: Vec<CandidateRule>) -> Vec<CandidateRule> {
    rules.sort_by(rank_order);
    rules
}

/// Recall denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorMode {
    /// Every pair of the relation.
    RelationSize,
    /// Relation pairs that co-occur at least once in the data; the others
    /// cannot be found by any ranking.
    #[default]
    ObservedRightKinds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecallPoint {
    pub rank: usize,
    pub hits: usize,
    pub recall: f64,
    pub precision: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecallCurve {
    pub points: Vec<RecallPoint>,
    pub denominator: usize,
    pub label: String,
}

impl RecallCurve {
    pub fn final_recall(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.recall)
    }

    /// Extends the curve to `len` ranks as if no further rules were output:
    /// hits and recall stay at their final values while precision decays.
    pub fn padded_to(&self, len: usize) -> RecallCurve {
        let mut out = self.clone();
        let hits = self.points.last().map_or(0, |p| p.hits);
        let recall = self.final_recall();
        for rank in self.points.len() + 1..=len {
            out.points.push(RecallPoint {
                rank,
                hits,
                recall,
                precision: hits as f64 / rank as f64,
            });
        }
        out
    }
}

/// Relation pairs co-occurring at least once.
pub fn observed_right_kinds(r: &HierarchicalRelation, counts: &PairCounts) -> usize {
    r.pairs()
        .iter()
        .filter(|p| counts.joint(&p.parent, &p.child) > 0)
        .count()
}

/// Walks the ranked list, counting a hit whenever the rule's pair belongs to
/// `r` in either orientation.
pub fn recall_curve(
    ranked: &[CandidateRule],
    r: &HierarchicalRelation,
    mode: DenominatorMode,
    counts: &PairCounts,
    label: impl Into<String>,
) -> RecallCurve {
    let denominator = match mode {
        DenominatorMode::RelationSize => r.len(),
        DenominatorMode::ObservedRightKinds => observed_right_kinds(r, counts),
    };
    let mut hits = 0;
    let points = ranked
        .iter()
        .enumerate()
        .map(|(i, rule)| {
            if r.contains_unordered(&rule.item_a, &rule.item_b) {
                hits += 1;
            }
            let rank = i + 1;
            RecallPoint {
                rank,
                hits,
                recall: if denominator == 0 {
                    0.0
                } else {
                    hits as f64 / denominator as f64
                },
                precision: hits as f64 / rank as f64,
            }
        })
        .collect();
    RecallCurve {
        points,
        denominator,
        label: label.into(),
    }
}

/// Mean recall over ranks `1..=max_rank`.
pub fn curve_auc(c: &RecallCurve, max_rank: usize) -> Result<f64> {
    if max_rank == 0 || max_rank > c.points.len() {
        return Err(Error::Range {
            requested: max_rank,
            available: c.points.len(),
        });
    }
    let sum: f64 = c.points[..max_rank].iter().map(|p| p.recall).sum();
    Ok(sum / max_rank as f64)
}

pub const CURVE_CSV_HEADER: &str = "rank,hits,recall,precision";

pub fn write_curve_csv<W: Write>(c: &RecallCurve, mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CURVE_CSV_HEADER}")?;
    for p in &c.points {
        writeln!(out, "{},{},{},{}", p.rank, p.hits, p.recall, p.precision)?;
    }
    Ok(())
}

/// One line of the summary table.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSummary {
    pub label: String,
    /// `None` when the curve is shorter than the requested rank.
    pub auc: Option<f64>,
    pub final_recall: f64,
}

impl CurveSummary {
    pub fn of(c: &RecallCurve, k: usize) -> Self {
        CurveSummary {
            label: c.label.clone(),
            auc: curve_auc(c, k).ok(),
            final_recall: c.final_recall(),
        }
    }
}

/// `label,auc@k,final_recall`; curves shorter than `k` report `NA`.
pub fn write_summary_csv<W: Write>(
    rows: &[CurveSummary],
    k: usize,
    mut out: W,
) -> std::io::Result<()> {
    writeln!(out, "label,auc@{k},final_recall")?;
    for row in rows {
        let auc = row.auc.map_or_else(|| "NA".to_string(), |v| v.to_string());
        writeln!(out, "{},{},{}", row.label, auc, row.final_recall)?;
    }
    Ok(())
}
