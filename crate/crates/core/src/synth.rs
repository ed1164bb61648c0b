//! Synthetic benchmark data.
//!
//! A [`HierarchicalRelation`] holds ground-truth parent/child pairs (think
//! state/city). Each generated transaction is the union of a fixed number of
//! pairs drawn uniformly, with replacement, from the relation. Recovering
//! the relation from the mixed transactions is the ranking task the
//! estimators are evaluated on.

use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// One ground-truth `(parent, child)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelationPair {
    pub parent: String,
    pub child: String,
}

impl RelationPair {
    pub fn new(parent: impl Into<String>, child: impl Into<String>) -> Self {
        RelationPair {
            parent: parent.into(),
            child: child.into(),
        }
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || name.chars().any(char::is_whitespace) {
        return Err(Error::InvalidRelation(format!(
            "item names must be nonempty and contain no whitespace, got {name:?}"
        )));
    }
    Ok(())
}

/// Set of parent/child pairs. Parent and child names never overlap; a child
/// may belong to several parents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HierarchicalRelation {
    pairs: Vec<RelationPair>,
    parents: BTreeSet<String>,
    children: BTreeSet<String>,
}

impl HierarchicalRelation {
    /// Builds a relation, rejecting duplicate pairs and names used both as a
    /// parent and as a child.
    pub fn new(pairs: impl IntoIterator<Item = RelationPair>) -> Result<Self> {
        let mut set = BTreeSet::new();
        for pair in pairs {
            check_name(&pair.parent)?;
            check_name(&pair.child)?;
            if let Some(dup) = set.replace(pair) {
                return Err(Error::InvalidRelation(format!(
                    "duplicate pair ({}, {})",
                    dup.parent, dup.child
                )));
            }
        }
        let parents: BTreeSet<String> = set.iter().map(|p| p.parent.clone()).collect();
        let children: BTreeSet<String> = set.iter().map(|p| p.child.clone()).collect();
        if let Some(both) = parents.intersection(&children).next() {
            return Err(Error::InvalidRelation(format!(
                "{both:?} appears both as a parent and as a child"
            )));
        }
        Ok(HierarchicalRelation {
            pairs: set.into_iter().collect(),
            parents,
            children,
        })
    }

    /// Pairs in ascending `(parent, child)` order.
    pub fn pairs(&self) -> &[RelationPair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, parent: &str, child: &str) -> bool {
        self.pairs
            .binary_search_by(|p| (p.parent.as_str(), p.child.as_str()).cmp(&(parent, child)))
            .is_ok()
    }

    /// Membership ignoring which side is the parent.
    pub fn contains_unordered(&self, u: &str, v: &str) -> bool {
        self.contains(u, v) || self.contains(v, u)
    }

    pub fn is_parent(&self, name: &str) -> bool {
        self.parents.contains(name)
    }

    pub fn is_child(&self, name: &str) -> bool {
        self.children.contains(name)
    }

    /// Parses `parent<TAB>child` lines. Blank lines are skipped.
    pub fn parse_tsv(text: &str, origin: &Path) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: origin.to_path_buf(),
                line: i + 1,
                message,
            };
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(parent), Some(child), None) => {
                    pairs.push(RelationPair::new(parent, child));
                }
                _ => return Err(parse_err("expected `parent<TAB>child`".into())),
            }
        }
        HierarchicalRelation::new(pairs).map_err(|e| match e {
            Error::InvalidRelation(msg) => Error::Parse {
                path: origin.to_path_buf(),
                line: 0,
                message: msg,
            },
            other => other,
        })
    }

    pub fn read_tsv(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_tsv(&text, path)
    }

    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for p in &self.pairs {
            writeln!(out, "{}\t{}", p.parent, p.child)?;
        }
        Ok(())
    }
}

pub type Transaction = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransactionDataset {
    pub transactions: Vec<Transaction>,
    /// Seed the dataset was generated from; `None` when read from a file.
    pub seed: Option<u64>,
    /// The relation pairs drawn for each transaction, in draw order. Empty
    /// when read from a file.
    pub draws: Vec<Vec<RelationPair>>,
}

impl TransactionDataset {
    pub fn from_transactions(transactions: Vec<Transaction>) -> Self {
        TransactionDataset {
            transactions,
            seed: None,
            draws: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// One transaction per line, items space-separated in lexicographic order.
    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for t in &self.transactions {
            let line: Vec<&str> = t.iter().map(String::as_str).collect();
            writeln!(out, "{}", line.join(" "))?;
        }
        Ok(())
    }

    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut transactions = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let items: Transaction = line.split_whitespace().map(str::to_string).collect();
            if items.is_empty() {
                return Err(Error::Parse {
                    path: origin.to_path_buf(),
                    line: i + 1,
                    message: "empty transaction".into(),
                });
            }
            transactions.push(items);
        }
        Ok(Self::from_transactions(transactions))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }
}

/// Builds `transaction_count` transactions, each the union of
/// `pairs_per_transaction` pairs drawn uniformly with replacement from `r`.
pub fn generate_dataset(
    r: &HierarchicalRelation,
    transaction_count: usize,
    pairs_per_transaction: usize,
    seed: u64,
) -> Result<TransactionDataset> {
    if r.is_empty() {
        return Err(Error::EmptyRelation);
    }
    if transaction_count == 0 || pairs_per_transaction == 0 {
        return Err(Error::Domain(
            "transaction count and pairs per transaction must be positive".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut transactions = Vec::with_capacity(transaction_count);
    let mut draws = Vec::with_capacity(transaction_count);
    for _ in 0..transaction_count {
        let mut items = Transaction::new();
        let mut drawn = Vec::with_capacity(pairs_per_transaction);
        for _ in 0..pairs_per_transaction {
            let pair = &r.pairs[rng.random_range(0..r.len())];
            items.insert(pair.parent.clone());
            items.insert(pair.child.clone());
            drawn.push(pair.clone());
        }
        transactions.push(items);
        draws.push(drawn);
    }
    Ok(TransactionDataset {
        transactions,
        seed: Some(seed),
        draws,
    })
}

/// Generates parents `P0..` each owning `children_per_parent` fresh children
/// `C0..`. A `shared_child_fraction` of the children (rounded to the nearest
/// count) is additionally attached to one other randomly chosen parent.
pub fn synthesize_relation(
    parent_count: usize,
    children_per_parent: usize,
    shared_child_fraction: f64,
    seed: u64,
) -> Result<HierarchicalRelation> {
    if parent_count == 0 || children_per_parent == 0 {
        return Err(Error::Domain(
            "parent count and children per parent must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&shared_child_fraction) {
        return Err(Error::Domain(format!(
            "shared child fraction {shared_child_fraction} outside [0, 1]"
        )));
    }
    let child_count = parent_count * children_per_parent;
    let mut pairs: Vec<RelationPair> = (0..child_count)
        .map(|c| RelationPair::new(format!("P{}", c / children_per_parent), format!("C{c}")))
        .collect();

    if parent_count >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shared = (shared_child_fraction * child_count as f64).round() as usize;
        let mut chosen = index::sample(&mut rng, child_count, shared).into_vec();
        chosen.sort_unstable();
        for c in chosen {
            let own = c / children_per_parent;
            let mut other = rng.random_range(0..parent_count - 1);
            if other >= own {
                other += 1;
            }
            pairs.push(RelationPair::new(format!("P{other}"), format!("C{c}")));
        }
    }
    HierarchicalRelation::new(pairs)
}

/// Dataset summary: transaction count plus kinds and occurrences of
/// candidate pairs and of right pairs (candidates present in the relation).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DatasetStats {
    pub transaction_count: usize,
    pub candidate_pair_kinds: usize,
    pub candidate_pair_occurrences: usize,
    pub right_pair_kinds: usize,
    pub right_pair_occurrences: usize,
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "transactions={}", self.transaction_count)?;
        writeln!(f, "candidate_pair_kinds={}", self.candidate_pair_kinds)?;
        writeln!(
            f,
            "candidate_pair_occurrences={}",
            self.candidate_pair_occurrences
        )?;
        writeln!(f, "right_pair_kinds={}", self.right_pair_kinds)?;
        writeln!(f, "right_pair_occurrences={}", self.right_pair_occurrences)
    }
}

/// Candidate pairs are all unordered item pairs co-occurring in a
/// transaction, counted once per transaction.
pub fn compute_stats(d: &TransactionDataset, r: &HierarchicalRelation) -> DatasetStats {
    let mut kinds: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut right_kinds: BTreeSet<(&str, &str)> = BTreeSet::new();
    let mut stats = DatasetStats {
        transaction_count: d.len(),
        ..DatasetStats::default()
    };
    for t in &d.transactions {
        let items: Vec<&str> = t.iter().map(String::as_str).collect();
        for (i, &u) in items.iter().enumerate() {
            for &v in &items[i + 1..] {
                stats.candidate_pair_occurrences += 1;
                kinds.insert((u, v));
                if r.contains_unordered(u, v) {
                    stats.right_pair_occurrences += 1;
                    right_kinds.insert((u, v));
                }
            }
        }
    }
    stats.candidate_pair_kinds = kinds.len();
    stats.right_pair_kinds = right_kinds.len();
    stats
}
