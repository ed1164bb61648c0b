//! Pair counting and rule scoring over a transaction dataset.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::Result;
use crate::estimators::{EstimatorConfig, FrequencyPair};
use crate::synth::{HierarchicalRelation, TransactionDataset};

/// Per-item and per-pair transaction counts. Pair keys are stored with the
/// lexicographically smaller item first.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PairCounts {
    marginals: BTreeMap<String, u64>,
    joints: BTreeMap<(String, String), u64>,
}

fn ordered<'a>(u: &'a str, v: &'a str) -> (&'a str, &'a str) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

impl PairCounts {
    /// Number of transactions containing `item`.
    pub fn marginal(&self, item: &str) -> u64 {
        self.marginals.get(item).copied().unwrap_or(0)
    }

    /// Number of transactions containing both items.
    pub fn joint(&self, u: &str, v: &str) -> u64 {
        let (a, b) = ordered(u, v);
        self.joints
            .get(&(a.to_string(), b.to_string()))
            .copied()
            .unwrap_or(0)
    }

    pub fn marginals(&self) -> impl Iterator<Item = (&str, u64)> {
        self.marginals.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Co-occurring pairs `(u, v, joint)` with `u < v`.
    pub fn joints(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.joints
            .iter()
            .map(|((u, v), &c)| (u.as_str(), v.as_str(), c))
    }

    pub fn pair_kinds(&self) -> usize {
        self.joints.len()
    }

    /// Adds another shard's counts.
    pub fn merge(&mut self, other: PairCounts) {
        for (k, v) in other.marginals {
            *self.marginals.entry(k).or_default() += v;
        }
        for (k, v) in other.joints {
            *self.joints.entry(k).or_default() += v;
        }
    }
}

pub fn count_pairs(d: &TransactionDataset) -> PairCounts {
    let mut counts = PairCounts::default();
    for t in &d.transactions {
        let items: Vec<&String> = t.iter().collect();
        for (i, &u) in items.iter().enumerate() {
            *counts.marginals.entry(u.clone()).or_default() += 1;
            for &v in &items[i + 1..] {
                // BTreeSet iteration is sorted, so (u, v) is already ordered.
                *counts.joints.entry((u.clone(), v.clone())).or_default() += 1;
            }
        }
    }
    counts
}

/// Which conditional probabilities are scored for a co-occurring pair.
#[derive(Debug, Clone, Copy)]
pub enum Direction<'a> {
    /// One rule per pair, scored in whichever conditioning direction gives
    /// the larger estimate.
    MaxBoth,
    /// Only `P(parent | child)` for parent/child pairs, with item types taken
    /// from the relation. Same-type pairs are skipped.
    TypedChildCondition(&'a HierarchicalRelation),
}

/// A scored rule `item_b -> item_a`, i.e. an estimate of `P(item_a | item_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRule {
    /// Consequent.
    pub item_a: String,
    /// Conditioning item.
    pub item_b: String,
    /// `n` = marginal count of `item_b`, `x` = joint count.
    pub counts: FrequencyPair,
    pub score: f64,
}

fn score_direction(
    counts: &PairCounts,
    estimator: &EstimatorConfig,
    consequent: &str,
    condition: &str,
    joint: u64,
) -> Result<Option<CandidateRule>> {
    let f = FrequencyPair::new(counts.marginal(condition), joint)?;
    Ok(estimator.estimate(f)?.map(|score| CandidateRule {
        item_a: consequent.to_string(),
        item_b: condition.to_string(),
        counts: f,
        score,
    }))
}

/// Scores every co-occurring pair. Pairs removed by minimum support on the
/// conditioning item's count are dropped.
pub fn score_rules(
    counts: &PairCounts,
    estimator: &EstimatorConfig,
    direction: Direction<'_>,
) -> Result<Vec<CandidateRule>> {
    let mut rules = Vec::new();
    for (u, v, joint) in counts.joints() {
        let rule = match direction {
            Direction::TypedChildCondition(r) => {
                let (parent, child) = if r.is_parent(u) && r.is_child(v) {
                    (u, v)
                } else if r.is_parent(v) && r.is_child(u) {
                    (v, u)
                } else {
                    continue;
                };
                score_direction(counts, estimator, parent, child, joint)?
            }
            Direction::MaxBoth => {
                // u < v, so on ties the rule conditioned on u wins.
                let given_u = score_direction(counts, estimator, v, u, joint)?;
                let given_v = score_direction(counts, estimator, u, v, joint)?;
                match (given_u, given_v) {
                    (Some(a), Some(b)) => Some(if b.score > a.score { b } else { a }),
                    (a, b) => a.or(b),
                }
            }
        };
        rules.extend(rule);
    }
    Ok(rules)
}

pub const RULES_CSV_HEADER: &str = "item_b,item_a,n,x,score";

pub fn write_rules_csv<W: Write>(rules: &[CandidateRule], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{RULES_CSV_HEADER}")?;
    for r in rules {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.item_b,
            r.item_a,
            r.counts.n(),
            r.counts.x(),
            r.score
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate_dataset, synthesize_relation, Transaction};
    use crate::table::format_5dp;

    fn tx(items: &[&str]) -> Transaction {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn example_transactions() -> TransactionDataset {
        TransactionDataset::from_transactions(vec![
            tx(&["C5", "C1", "S2", "S1"]),
            tx(&["C3", "C4", "S1", "S2"]),
        ])
    }

    #[test]
    fn counts_on_example() {
        let c = count_pairs(&example_transactions());
        assert_eq!(c.marginal("S1"), 2);
        assert_eq!(c.marginal("C1"), 1);
        assert_eq!(c.joint("S1", "C1"), 1);
        assert_eq!(c.joint("C1", "S1"), 1);
        assert_eq!(c.joint("S1", "S2"), 2);
        assert_eq!(c.joint("C1", "C3"), 0);

        let c = count_pairs(&TransactionDataset::from_transactions(vec![tx(&[
            "A", "B",
        ])]));
        assert_eq!(
            (c.marginal("A"), c.marginal("B"), c.joint("A", "B")),
            (1, 1, 1)
        );
    }

    #[test]
    fn counts_match_brute_force() {
        let r = synthesize_relation(10, 3, 0.2, 1).unwrap();
        let d = generate_dataset(&r, 100, 2, 2).unwrap();
        let c = count_pairs(&d);
        let items: Vec<String> = c.marginals().map(|(k, _)| k.to_string()).collect();
        for u in &items {
            let m = d.transactions.iter().filter(|t| t.contains(u)).count() as u64;
            assert_eq!(c.marginal(u), m);
            for v in &items {
                if u == v {
                    continue;
                }
                let j = d
                    .transactions
                    .iter()
                    .filter(|t| t.contains(u) && t.contains(v))
                    .count() as u64;
                assert_eq!(c.joint(u, v), j);
                assert!(j <= c.marginal(u).min(c.marginal(v)));
            }
        }
    }

    #[test]
    fn merge_is_shard_sum() {
        let r = synthesize_relation(5, 2, 0.0, 1).unwrap();
        let d = generate_dataset(&r, 60, 2, 9).unwrap();
        let (first, second) = d.transactions.split_at(25);
        let mut merged = count_pairs(&TransactionDataset::from_transactions(first.to_vec()));
        merged.merge(count_pairs(&TransactionDataset::from_transactions(
            second.to_vec(),
        )));
        assert_eq!(merged, count_pairs(&d));
    }

    fn single_pair_counts() -> (PairCounts, HierarchicalRelation) {
        let r = HierarchicalRelation::new([crate::synth::RelationPair::new("S1", "C1")]).unwrap();
        let d = TransactionDataset::from_transactions(vec![tx(&["S1", "C1"]), tx(&["S1", "X"])]);
        (count_pairs(&d), r)
    }

    #[test]
    fn typed_scoring() {
        let (c, r) = single_pair_counts();
        let lb: EstimatorConfig = "lb:alpha=0.99".parse().unwrap();
        let rules = score_rules(&c, &lb, Direction::TypedChildCondition(&r)).unwrap();
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].item_a, "S1");
        assert_eq!(rules[0].item_b, "C1");
        assert_eq!(rules[0].counts, FrequencyPair::new(1, 1).unwrap());
        assert_eq!(format_5dp(rules[0].score), "0.10000");

        let mle: EstimatorConfig = "mle:minsup=2".parse().unwrap();
        assert!(score_rules(&c, &mle, Direction::TypedChildCondition(&r))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn laplace_at_four_one() {
        let d = TransactionDataset::from_transactions(vec![
            tx(&["S1", "C1"]),
            tx(&["C1", "S2"]),
            tx(&["C1", "S2"]),
            tx(&["C1", "S3"]),
        ]);
        let r = HierarchicalRelation::new([
            crate::synth::RelationPair::new("S1", "C1"),
            crate::synth::RelationPair::new("S2", "C2"),
            crate::synth::RelationPair::new("S3", "C3"),
        ])
        .unwrap();
        let laplace: EstimatorConfig = "laplace".parse().unwrap();
        let rules = score_rules(
            &count_pairs(&d),
            &laplace,
            Direction::TypedChildCondition(&r),
        )
        .unwrap();
        let s1 = rules.iter().find(|r| r.item_a == "S1").unwrap();
        assert_eq!(s1.counts, FrequencyPair::new(4, 1).unwrap());
        assert_eq!(format_5dp(s1.score), "0.33333");
    }

    #[test]
    fn max_both_picks_larger_direction() {
        let (c, _) = single_pair_counts();
        let mle: EstimatorConfig = "mle".parse().unwrap();
        let rules = score_rules(&c, &mle, Direction::MaxBoth).unwrap();
        assert_eq!(rules.len(), 2);
        // P(S1 | C1) = 1 beats P(C1 | S1) = 1/2
        let r = rules.iter().find(|r| r.item_b == "C1").unwrap();
        assert_eq!((r.item_a.as_str(), r.score), ("S1", 1.0));
        // P(S1 | X) = 1 beats P(X | S1) = 1/2
        let r = rules
            .iter()
            .find(|r| r.item_a == "S1" && r.item_b == "X")
            .unwrap();
        assert_eq!(r.score, 1.0);
    }

    #[test]
    fn max_both_falls_back_when_one_direction_filtered() {
        let (c, _) = single_pair_counts();
        let mle: EstimatorConfig = "mle:minsup=2".parse().unwrap();
        let rules = score_rules(&c, &mle, Direction::MaxBoth).unwrap();
        // only S1 (n = 2) survives as a conditioning item
        assert_eq!(rules.len(), 2);
        assert!(rules.iter().all(|r| r.item_b == "S1" && r.score == 0.5));
    }

    #[test]
    fn mle_rules_are_exact_ratios() {
        let r = synthesize_relation(20, 4, 0.1, 3).unwrap();
        let d = generate_dataset(&r, 300, 2, 4).unwrap();
        let c = count_pairs(&d);
        let mle: EstimatorConfig = "mle".parse().unwrap();
        for direction in [Direction::MaxBoth, Direction::TypedChildCondition(&r)] {
            for rule in score_rules(&c, &mle, direction).unwrap() {
                assert!(rule.counts.x() >= 1);
                assert_eq!(rule.score, rule.counts.x() as f64 / rule.counts.n() as f64);
            }
        }
    }

    #[test]
    fn rules_csv() {
        let (c, r) = single_pair_counts();
        let mle: EstimatorConfig = "mle".parse().unwrap();
        let rules = score_rules(&c, &mle, Direction::TypedChildCondition(&r)).unwrap();
        let mut buf = Vec::new();
        write_rules_csv(&rules, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "item_b,item_a,n,x,score\nC1,S1,1,1,1\n"
        );
    }
}
