//! Functional random forest: bootstrap-aggregated classification trees with
//! per-split FPC subsampling.

use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::math;
use crate::rng;
use crate::tree::{grow_tree_on, Criterion, TreeNode, TreeParams};
use crate::Predictor;

/// How [`FunctionalRandomForest::predict_proba`] aggregates trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbabilityMode {
    /// Fraction of trees voting for class 1.
    #[default]
    VoteFraction,
    /// Mean class-1 fraction of the leaves reached.
    LeafFraction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_trees: usize,
    /// Candidates per split; `None` means `floor(√K)` (at least 1).
    pub mtry: Option<usize>,
    pub criterion: Criterion,
    pub min_node_size: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub seed: u64,
    #[serde(default)]
    pub probability: ProbabilityMode,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_trees: 500,
            mtry: None,
            criterion: Criterion::Gini,
            min_node_size: 1,
            max_depth: None,
            bootstrap: true,
            seed: 0,
            probability: ProbabilityMode::VoteFraction,
        }
    }
}

/// The `m ≈ √K` heuristic, rounded down.
pub fn default_mtry(n_features: usize) -> usize {
    (math::floor(math::sqrt(n_features as f64)) as usize).max(1)
}

impl ForestConfig {
    pub fn resolved_mtry(&self, n_features: usize) -> usize {
        self.mtry.unwrap_or_else(|| default_mtry(n_features))
    }

    fn tree_params(&self, n_features: usize) -> TreeParams {
        TreeParams {
            mtry: self.resolved_mtry(n_features),
            criterion: self.criterion,
            min_node_size: self.min_node_size,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalRandomForest {
    config: ForestConfig,
    n_features: usize,
    n_train: usize,
    trees: Vec<TreeNode>,
    /// Bootstrap row indices per tree; absent without bootstrap.
    in_bag: Option<Vec<Vec<u32>>>,
}

/// One grown forest member together with the rows it was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct GrownTree {
    pub tree: TreeNode,
    pub in_bag: Option<Vec<u32>>,
}

/// Validated training inputs from which members can be grown one at a time,
/// in any order and on any thread. Member `i` only depends on
/// `(data, config, i)`.
#[derive(Debug, Clone)]
pub struct ForestPlan<'a> {
    scores: &'a Matrix,
    labels: &'a [u8],
    config: ForestConfig,
    params: TreeParams,
}

impl<'a> ForestPlan<'a> {
    pub fn new(scores: &'a Matrix, labels: &'a [u8], config: &ForestConfig) -> Result<Self> {
        let n = scores.rows();
        let k = scores.cols();
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: labels.len(),
            });
        }
        if n < 2 {
            return Err(Error::EmptyData);
        }
        if labels.iter().any(|&y| y > 1) {
            return Err(Error::InvalidDataset("labels must be 0 or 1"));
        }
        if labels.iter().all(|&y| y == labels[0]) {
            return Err(Error::SingleClassData);
        }
        if config.n_trees == 0 {
            return Err(Error::InvalidConfig("the forest needs at least one tree"));
        }
        let mtry = config.resolved_mtry(k);
        if mtry == 0 || mtry > k {
            return Err(Error::InvalidConfig("mtry must lie in 1..=K"));
        }
        if config.min_node_size == 0 {
            return Err(Error::InvalidConfig("min_node_size must be at least 1"));
        }
        Ok(Self {
            scores,
            labels,
            config: config.clone(),
            params: config.tree_params(k),
        })
    }

    pub fn n_trees(&self) -> usize {
        self.config.n_trees
    }

    pub fn grow(&self, index: usize) -> Result<GrownTree> {
        let n = self.scores.rows();
        let mut stream = rng::stream(self.config.seed, rng::TREE_DOMAIN, index as u64);
        let (sample, in_bag): (Vec<usize>, _) = if self.config.bootstrap {
            let bag: Vec<u32> = (0..n).map(|_| stream.random_range(0..n as u32)).collect();
            (bag.iter().map(|&i| i as usize).collect(), Some(bag))
        } else {
            ((0..n).collect(), None)
        };
        let tree = grow_tree_on(self.scores, self.labels, &sample, &self.params, &mut stream, None)?;
        Ok(GrownTree { tree, in_bag })
    }

    /// Members must be given in index order.
    pub fn assemble(self, members: Vec<GrownTree>) -> Result<FunctionalRandomForest> {
        if members.len() != self.config.n_trees {
            return Err(Error::DimensionMismatch {
                expected: self.config.n_trees,
                found: members.len(),
            });
        }
        let mut trees = Vec::with_capacity(members.len());
        let mut bags = Vec::with_capacity(members.len());
        for m in members {
            trees.push(m.tree);
            if let Some(b) = m.in_bag {
                bags.push(b);
            }
        }
        let in_bag = self.config.bootstrap.then_some(bags);
        Ok(FunctionalRandomForest {
            config: self.config,
            n_features: self.scores.cols(),
            n_train: self.scores.rows(),
            trees,
            in_bag,
        })
    }
}

/// Grows every member sequentially.
pub fn fit_forest(
    scores: &Matrix,
    labels: &[u8],
    config: &ForestConfig,
) -> Result<FunctionalRandomForest> {
    let plan = ForestPlan::new(scores, labels, config)?;
    let members = (0..plan.n_trees())
        .map(|i| plan.grow(i))
        .collect::<Result<Vec<_>>>()?;
    plan.assemble(members)
}

/// Out-of-bag evaluation of a bootstrapped forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OobReport {
    /// Misclassification rate among observations with at least one OOB vote.
    pub oob_error_rate: f64,
    /// Class-1 vote fraction from OOB trees; `None` when no tree left the
    /// observation out.
    pub vote_fractions: Vec<Option<f64>>,
    pub coverage: f64,
}

impl FunctionalRandomForest {
    pub fn config(&self) -> &ForestConfig {
        &self.config
    }

    pub fn trees(&self) -> &[TreeNode] {
        &self.trees
    }

    pub fn n_train(&self) -> usize {
        self.n_train
    }

    pub fn in_bag(&self) -> Option<&[Vec<u32>]> {
        self.in_bag.as_deref()
    }

    /// Number of trees voting for class 1.
    pub fn votes(&self, row: &[f64]) -> usize {
        self.trees.iter().filter(|t| t.predict(row) == 1).count()
    }

    /// Mode of per-tree labels; an even split goes to class 0.
    pub fn predict_label(&self, row: &[f64]) -> u8 {
        let ones = self.votes(row);
        u8::from(ones > self.trees.len() - ones)
    }

    pub fn predict_proba(&self, row: &[f64]) -> f64 {
        match self.config.probability {
            ProbabilityMode::VoteFraction => self.votes(row) as f64 / self.trees.len() as f64,
            ProbabilityMode::LeafFraction => {
                let mut acc = 0.0;
                for t in &self.trees {
                    acc += t.leaf_for(row).class_fraction();
                }
                acc / self.trees.len() as f64
            }
        }
    }

    /// `mask[t][i]` is true when row `i` is in tree `t`'s bootstrap sample.
    fn in_bag_masks(&self) -> Result<Vec<Vec<bool>>> {
        let bags = self.in_bag.as_ref().ok_or(Error::NoBootstrapInfo)?;
        Ok(bags
            .iter()
            .map(|bag| {
                let mut mask = vec![false; self.n_train];
                for &i in bag {
                    mask[i as usize] = true;
                }
                mask
            })
            .collect())
    }

    /// Predicts each training row with the trees that did not see it.
    ///
    /// `scores` must have the training rows in training order (a permuted
    /// column is fine: membership is by row position).
    pub fn oob_evaluate(&self, scores: &Matrix, labels: &[u8]) -> Result<OobReport> {
        let masks = self.in_bag_masks()?;
        self.oob_with_masks(&masks, scores, labels)
    }

    pub(crate) fn oob_with_masks(
        &self,
        masks: &[Vec<bool>],
        scores: &Matrix,
        labels: &[u8],
    ) -> Result<OobReport> {
        if scores.rows() != self.n_train || labels.len() != self.n_train {
            return Err(Error::DimensionMismatch {
                expected: self.n_train,
                found: scores.rows().min(labels.len()),
            });
        }
        let mut errors = 0usize;
        let mut covered = 0usize;
        let mut vote_fractions = Vec::with_capacity(self.n_train);
        for i in 0..self.n_train {
            let row = scores.row(i);
            let mut total = 0usize;
            let mut ones = 0usize;
            for (tree, mask) in self.trees.iter().zip(masks) {
                if !mask[i] {
                    total += 1;
                    ones += usize::from(tree.predict(row));
                }
            }
            if total == 0 {
                vote_fractions.push(None);
                continue;
            }
            covered += 1;
            let label = u8::from(ones > total - ones);
            errors += usize::from(label != labels[i]);
            vote_fractions.push(Some(ones as f64 / total as f64));
        }
        Ok(OobReport {
            oob_error_rate: if covered == 0 {
                0.0
            } else {
                errors as f64 / covered as f64
            },
            vote_fractions,
            coverage: covered as f64 / self.n_train as f64,
        })
    }

    /// OOB masks, exposed for repeated evaluations (permutation importance).
    pub fn oob_masks(&self) -> Result<Vec<Vec<bool>>> {
        self.in_bag_masks()
    }
}

impl Predictor for FunctionalRandomForest {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba(&self, row: &[f64]) -> f64 {
        FunctionalRandomForest::predict_proba(self, row)
    }

    fn predict_label(&self, row: &[f64]) -> u8 {
        FunctionalRandomForest::predict_label(self, row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::grow_tree;

    fn toy_data(n: usize, seed: u64) -> (Matrix, Vec<u8>) {
        let mut r = rng::stream(seed, 99, 0);
        let rows: Vec<[f64; 4]> = (0..n)
            .map(|_| {
                [
                    r.random::<f64>() - 0.5,
                    r.random::<f64>() - 0.5,
                    r.random::<f64>() - 0.5,
                    r.random::<f64>() - 0.5,
                ]
            })
            .collect();
        let labels = rows
            .iter()
            .map(|x| u8::from(x[0] + 0.5 * x[1] > 0.05 * (x[3] * 17.0).sin()))
            .collect();
        (Matrix::from_rows(&rows).unwrap(), labels)
    }

    #[test]
    fn default_mtry_heuristic() {
        assert_eq!(default_mtry(15), 3);
        assert_eq!(default_mtry(16), 4);
        assert_eq!(default_mtry(1), 1);
        assert_eq!(ForestConfig::default().resolved_mtry(15), 3);
    }

    #[test]
    fn single_unbagged_tree_matches_grow_tree() {
        let (scores, labels) = toy_data(80, 1);
        let config = ForestConfig {
            n_trees: 1,
            mtry: Some(4),
            bootstrap: false,
            seed: 42,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&scores, &labels, &config).unwrap();
        let mut stream = rng::stream(42, rng::TREE_DOMAIN, 0);
        let tree = grow_tree(&scores, &labels, &TreeParams::exhaustive(4), &mut stream).unwrap();
        assert_eq!(forest.trees()[0], tree);
        let (test, _) = toy_data(50, 2);
        for row in test.row_iter() {
            assert_eq!(forest.predict_label(row), tree.predict(row));
        }
    }

    #[test]
    fn rejects_single_class() {
        let (scores, _) = toy_data(10, 1);
        assert_eq!(
            fit_forest(&scores, &[1; 10], &ForestConfig::default()).unwrap_err(),
            Error::SingleClassData
        );
    }

    #[test]
    fn seeds_control_bootstrap() {
        let (scores, labels) = toy_data(60, 3);
        let config = ForestConfig {
            n_trees: 20,
            seed: 7,
            ..ForestConfig::default()
        };
        let a = fit_forest(&scores, &labels, &config).unwrap();
        let b = fit_forest(&scores, &labels, &config).unwrap();
        assert_eq!(a, b);
        let c = fit_forest(&scores, &labels, &ForestConfig { seed: 8, ..config }).unwrap();
        assert_ne!(a.in_bag(), c.in_bag());
    }

    #[test]
    fn members_can_be_grown_out_of_order() {
        let (scores, labels) = toy_data(60, 4);
        let config = ForestConfig {
            n_trees: 12,
            seed: 3,
            ..ForestConfig::default()
        };
        let plan = ForestPlan::new(&scores, &labels, &config).unwrap();
        let mut members: Vec<(usize, GrownTree)> =
            (0..12).rev().map(|i| (i, plan.grow(i).unwrap())).collect();
        members.sort_by_key(|(i, _)| *i);
        let forest = plan
            .assemble(members.into_iter().map(|(_, m)| m).collect())
            .unwrap();
        assert_eq!(forest, fit_forest(&scores, &labels, &config).unwrap());
    }

    #[test]
    fn vote_aggregation_and_ties() {
        let leaf = |c: u8| TreeNode::Leaf {
            counts: if c == 1 { [0, 1] } else { [1, 0] },
        };
        let forest = |votes: &[u8]| FunctionalRandomForest {
            config: ForestConfig {
                n_trees: votes.len(),
                ..ForestConfig::default()
            },
            n_features: 1,
            n_train: 1,
            trees: votes.iter().map(|&v| leaf(v)).collect(),
            in_bag: None,
        };
        assert_eq!(forest(&[1, 1, 0]).predict_label(&[0.0]), 1);
        assert_eq!(forest(&[0, 1]).predict_label(&[0.0]), 0);
        assert_eq!(forest(&[0, 1]).predict_proba(&[0.0]), 0.5);
        assert_eq!(forest(&[1]).predict_label(&[0.0]), 1);
        assert_eq!(forest(&[1, 1, 0, 0, 1]).predict_proba(&[0.0]), 0.6);
        assert_eq!(forest(&[0, 0, 0]).predict_proba(&[0.0]), 0.0);
    }

    #[test]
    fn label_agrees_with_probability() {
        let (scores, labels) = toy_data(80, 5);
        let config = ForestConfig {
            n_trees: 25,
            seed: 1,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&scores, &labels, &config).unwrap();
        let (test, _) = toy_data(100, 6);
        for row in test.row_iter() {
            let p = forest.predict_proba(row);
            let argmax = u8::from(p > 1.0 - p);
            assert_eq!(argmax, forest.predict_label(row));
        }
    }

    #[test]
    fn oob_coverage_and_bounds() {
        let (scores, labels) = toy_data(60, 7);
        let config = ForestConfig {
            n_trees: 200,
            seed: 11,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&scores, &labels, &config).unwrap();
        let report = forest.oob_evaluate(&scores, &labels).unwrap();
        assert!(report.coverage > 0.99);
        assert!((0.0..=1.0).contains(&report.oob_error_rate));
        assert_eq!(report, forest.oob_evaluate(&scores, &labels).unwrap());

        let unbagged = fit_forest(
            &scores,
            &labels,
            &ForestConfig {
                bootstrap: false,
                n_trees: 3,
                ..config
            },
        )
        .unwrap();
        assert_eq!(
            unbagged.oob_evaluate(&scores, &labels).unwrap_err(),
            Error::NoBootstrapInfo
        );
    }

    #[test]
    fn leaf_fraction_mode_averages_leaves() {
        let (scores, labels) = toy_data(40, 8);
        let config = ForestConfig {
            n_trees: 5,
            max_depth: Some(1),
            probability: ProbabilityMode::LeafFraction,
            seed: 2,
            ..ForestConfig::default()
        };
        let forest = fit_forest(&scores, &labels, &config).unwrap();
        let row = scores.row(0);
        let manual: f64 = forest
            .trees()
            .iter()
            .map(|t| t.leaf_for(row).class_fraction())
            .sum::<f64>()
            / 5.0;
        assert!((forest.predict_proba(row) - manual).abs() < 1e-15);
    }
}
