//! Functional classification trees grown on FPC scores.

use alloc::boxed::Box;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::Predictor;

/// Splits whose impurity decrease does not exceed this are rejected as
/// round-off.
pub const MIN_DECREASE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    #[default]
    Gini,
    Entropy,
}

/// Node impurity from per-class counts: Gini `1 − Σ p²` or Shannon entropy in bits.
pub fn impurity(counts: &[u32], criterion: Criterion) -> Result<f64> {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(Error::EmptyNode);
    }
    Ok(impurity_unchecked(counts, total as f64, criterion))
}

fn impurity_unchecked(counts: &[u32], total: f64, criterion: Criterion) -> f64 {
    match criterion {
        Criterion::Gini => {
            1.0 - counts
                .iter()
                .map(|&c| {
                    let p = f64::from(c) / total;
                    p * p
                })
                .sum::<f64>()
        }
        Criterion::Entropy => -counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = f64::from(c) / total;
                p * math::log2(p)
            })
            .sum::<f64>(),
    }
}

/// Route left when `row[fpc] <= threshold`. `fpc` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRule {
    pub fpc: usize,
    pub threshold: f64,
}

impl SplitRule {
    #[inline]
    pub fn goes_left(&self, row: &[f64]) -> bool {
        row[self.fpc] <= self.threshold
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub rule: SplitRule,
    /// Parent impurity minus the size-weighted child impurities.
    pub decrease: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TreeNode {
    Leaf {
        counts: [u32; 2],
    },
    Split {
        rule: SplitRule,
        counts: [u32; 2],
        impurity: f64,
        decrease: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

/// Growth parameters shared by single trees and forest members.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// Candidate FPCs drawn at every split.
    pub mtry: usize,
    pub criterion: Criterion,
    /// Nodes with at most this many observations become leaves.
    pub min_node_size: usize,
    pub max_depth: Option<usize>,
}

impl TreeParams {
    /// Exhaustive single tree: every feature is a candidate at every split.
    pub fn exhaustive(n_features: usize) -> Self {
        Self {
            mtry: n_features,
            criterion: Criterion::Gini,
            min_node_size: 1,
            max_depth: None,
        }
    }
}

fn class_counts(labels: &[u8], sample: &[usize]) -> [u32; 2] {
    let mut c = [0u32; 2];
    for &i in sample {
        c[usize::from(labels[i])] += 1;
    }
    c
}

/// Best binary partition of `sample` over the `candidates` columns.
///
/// Thresholds are midpoints between consecutive distinct sorted values.
/// Ties in decrease go to the lowest FPC index, then the lowest threshold.
/// Returns `None` when nothing beats [`MIN_DECREASE`].
pub fn best_split(
    scores: &Matrix,
    labels: &[u8],
    sample: &[usize],
    candidates: &[usize],
    criterion: Criterion,
) -> Option<SplitCandidate> {
    let n = sample.len();
    if n < 2 {
        return None;
    }
    let parent_counts = class_counts(labels, sample);
    if parent_counts[0] == 0 || parent_counts[1] == 0 {
        return None;
    }
    let total = n as f64;
    let parent = impurity_unchecked(&parent_counts, total, criterion);

    let mut features = candidates.to_vec();
    features.sort_unstable();
    features.dedup();

    let mut best: Option<SplitCandidate> = None;
    let mut pairs: Vec<(f64, u8)> = Vec::with_capacity(n);
    for &fpc in &features {
        pairs.clear();
        pairs.extend(sample.iter().map(|&i| (scores.get(i, fpc), labels[i])));
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = [0u32; 2];
        for p in 0..n - 1 {
            left[usize::from(pairs[p].1)] += 1;
            let (lo, hi) = (pairs[p].0, pairs[p + 1].0);
            if !(lo < hi) {
                continue;
            }
            let right = [parent_counts[0] - left[0], parent_counts[1] - left[1]];
            let n_left = (p + 1) as f64;
            let n_right = total - n_left;
            let decrease = parent
                - (n_left / total) * impurity_unchecked(&left, n_left, criterion)
                - (n_right / total) * impurity_unchecked(&right, n_right, criterion);
            if best.is_none_or(|b| decrease > b.decrease) {
                let mut threshold = 0.5 * (lo + hi);
                if threshold >= hi {
                    threshold = lo;
                }
                best = Some(SplitCandidate {
                    rule: SplitRule { fpc, threshold },
                    decrease,
                });
            }
        }
    }
    best.filter(|b| b.decrease > MIN_DECREASE)
}

/// Grows a tree on every row of `scores`.
pub fn grow_tree<R: Rng + ?Sized>(
    scores: &Matrix,
    labels: &[u8],
    params: &TreeParams,
    rng: &mut R,
) -> Result<TreeNode> {
    let sample: Vec<usize> = (0..scores.rows()).collect();
    grow_tree_on(scores, labels, &sample, params, rng, None)
}

/// Grows a tree on `sample` (row indices, duplicates allowed).
///
/// At every node eligible for splitting a fresh set of `mtry` candidate
/// columns is drawn without replacement. When `trace` is given, each drawn
/// candidate set is appended to it in growth order.
pub fn grow_tree_on<R: Rng + ?Sized>(
    scores: &Matrix,
    labels: &[u8],
    sample: &[usize],
    params: &TreeParams,
    rng: &mut R,
    mut trace: Option<&mut Vec<Vec<usize>>>,
) -> Result<TreeNode> {
    let k = scores.cols();
    if sample.is_empty() {
        return Err(Error::EmptyData);
    }
    if labels.len() != scores.rows() {
        return Err(Error::DimensionMismatch {
            expected: scores.rows(),
            found: labels.len(),
        });
    }
    if params.mtry == 0 || params.mtry > k {
        return Err(Error::InvalidConfig("mtry must lie in 1..=K"));
    }
    if labels.iter().any(|&y| y > 1) {
        return Err(Error::InvalidDataset("labels must be 0 or 1"));
    }
    let mut features: Vec<usize> = (0..k).collect();
    let mut grower = Grower {
        scores,
        labels,
        params,
        features: &mut features,
    };
    Ok(grower.grow(sample.to_vec(), 0, rng, &mut trace))
}

struct Grower<'a> {
    scores: &'a Matrix,
    labels: &'a [u8],
    params: &'a TreeParams,
    features: &'a mut Vec<usize>,
}

impl Grower<'_> {
    fn grow<R: Rng + ?Sized>(
        &mut self,
        sample: Vec<usize>,
        depth: usize,
        rng: &mut R,
        trace: &mut Option<&mut Vec<Vec<usize>>>,
    ) -> TreeNode {
        let counts = class_counts(self.labels, &sample);
        let pure = counts[0] == 0 || counts[1] == 0;
        let too_small = sample.len() <= self.params.min_node_size;
        let too_deep = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || too_small || too_deep {
            return TreeNode::Leaf { counts };
        }

        let candidates = self.draw_candidates(rng);
        if let Some(t) = trace.as_deref_mut() {
            t.push(candidates.clone());
        }
        let Some(split) = best_split(
            self.scores,
            self.labels,
            &sample,
            &candidates,
            self.params.criterion,
        ) else {
            return TreeNode::Leaf { counts };
        };

        let (left, right): (Vec<usize>, Vec<usize>) = sample
            .iter()
            .partition(|&&i| split.rule.goes_left(self.scores.row(i)));
        let node_impurity =
            impurity_unchecked(&counts, sample.len() as f64, self.params.criterion);
        let left = self.grow(left, depth + 1, rng, trace);
        let right = self.grow(right, depth + 1, rng, trace);
        TreeNode::Split {
            rule: split.rule,
            counts,
            impurity: node_impurity,
            decrease: split.decrease,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Partial Fisher-Yates over the feature list; result sorted ascending.
    fn draw_candidates<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Vec<usize> {
        let k = self.features.len();
        let m = self.params.mtry;
        self.features.sort_unstable();
        for i in 0..m {
            let j = rng.random_range(i..k);
            self.features.swap(i, j);
        }
        let mut out = self.features[..m].to_vec();
        out.sort_unstable();
        out
    }
}

/// One internal node as seen by importance bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRecord {
    pub fpc: usize,
    pub decrease: f64,
    /// Observations reaching the node divided by those at the root.
    pub node_fraction: f64,
}

impl TreeNode {
    pub fn counts(&self) -> [u32; 2] {
        match self {
            TreeNode::Leaf { counts } | TreeNode::Split { counts, .. } => *counts,
        }
    }

    pub fn n_samples(&self) -> u32 {
        let c = self.counts();
        c[0] + c[1]
    }

    /// Majority class of this node's counts, ties to class 0.
    pub fn majority(&self) -> u8 {
        let c = self.counts();
        u8::from(c[1] > c[0])
    }

    pub fn class_fraction(&self) -> f64 {
        let c = self.counts();
        f64::from(c[1]) / f64::from(c[0] + c[1])
    }

    pub fn leaf_for(&self, row: &[f64]) -> &TreeNode {
        let mut node = self;
        while let TreeNode::Split {
            rule, left, right, ..
        } = node
        {
            node = if rule.goes_left(row) { left } else { right };
        }
        node
    }

    pub fn predict(&self, row: &[f64]) -> u8 {
        self.leaf_for(row).majority()
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    /// Every internal node, preorder.
    pub fn splits(&self) -> Vec<SplitRecord> {
        let mut out = Vec::new();
        let root = f64::from(self.n_samples());
        self.collect_splits(root, &mut out);
        out
    }

    fn collect_splits(&self, root: f64, out: &mut Vec<SplitRecord>) {
        if let TreeNode::Split {
            rule,
            decrease,
            left,
            right,
            ..
        } = self
        {
            out.push(SplitRecord {
                fpc: rule.fpc,
                decrease: *decrease,
                node_fraction: f64::from(self.n_samples()) / root,
            });
            left.collect_splits(root, out);
            right.collect_splits(root, out);
        }
    }

    /// Weakest-link cost-complexity pruning.
    ///
    /// With `R(t) = (n_t / n_root) · impurity(t)`, every internal node has
    /// link strength `g(t) = (R(t) − R(T_t)) / (|leaves(T_t)| − 1)`. The
    /// weakest links are collapsed into leaves for as long as the smallest
    /// `g` is below `alpha`. `alpha = 0` leaves the tree unchanged and
    /// `alpha = ∞` reduces it to its root.
    pub fn prune(&self, alpha: f64, criterion: Criterion) -> TreeNode {
        let mut tree = self.clone();
        let root = f64::from(tree.n_samples());
        while let Some(weakest) = tree.weakest_link(root, criterion) {
            if !(weakest < alpha) {
                break;
            }
            tree.collapse_links(root, criterion, weakest);
        }
        tree
    }

    /// `(R(T_t), leaf count)` of this subtree.
    fn subtree_risk(&self, root: f64, criterion: Criterion) -> (f64, usize) {
        match self {
            TreeNode::Leaf { counts } => (node_risk(counts, root, criterion), 1),
            TreeNode::Split { left, right, .. } => {
                let (rl, nl) = left.subtree_risk(root, criterion);
                let (rr, nr) = right.subtree_risk(root, criterion);
                (rl + rr, nl + nr)
            }
        }
    }

    fn link_strength(&self, root: f64, criterion: Criterion) -> Option<f64> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { counts, .. } => {
                let (subtree, leaves) = self.subtree_risk(root, criterion);
                let own = node_risk(counts, root, criterion);
                Some((own - subtree) / (leaves - 1) as f64)
            }
        }
    }

    fn weakest_link(&self, root: f64, criterion: Criterion) -> Option<f64> {
        match self {
            TreeNode::Leaf { .. } => None,
            TreeNode::Split { left, right, .. } => {
                let mut best = self.link_strength(root, criterion);
                for child in [left, right] {
                    if let Some(g) = child.weakest_link(root, criterion) {
                        best = Some(best.map_or(g, |b: f64| b.min(g)));
                    }
                }
                best
            }
        }
    }

    fn collapse_links(&mut self, root: f64, criterion: Criterion, weakest: f64) {
        let g = self.link_strength(root, criterion);
        if let Some(g) = g {
            if g <= weakest {
                *self = TreeNode::Leaf {
                    counts: self.counts(),
                };
                return;
            }
        }
        if let TreeNode::Split { left, right, .. } = self {
            left.collapse_links(root, criterion, weakest);
            right.collapse_links(root, criterion, weakest);
        }
    }
}

fn node_risk(counts: &[u32; 2], root: f64, criterion: Criterion) -> f64 {
    let n = f64::from(counts[0] + counts[1]);
    (n / root) * impurity_unchecked(counts, n, criterion)
}

/// A single tree used directly as a predictor; probability is the class-1
/// fraction of the leaf reached.
impl Predictor for TreeNode {
    fn n_features(&self) -> usize {
        self.splits().iter().map(|s| s.fpc + 1).max().unwrap_or(0)
    }

    fn predict_proba(&self, row: &[f64]) -> f64 {
        self.leaf_for(row).class_fraction()
    }

    fn predict_label(&self, row: &[f64]) -> u8 {
        self.predict(row)
    }
}
