//! The end-to-end workflow: load, smooth, decompose, train, explain, export.

use std::fs;
use std::path::{Path, PathBuf};

use frfx_core::explain::{
    anova_fpc, bubble_data, compute_fpcph, compute_fpdp, importance_table, mdg_importance,
    permutation_importance, permutation_importance_oob, reconstruction_bands, scores_by_class,
    AnovaRow, BubblePlotData, ClassConditionalScores, ExternalMetric, HeatmapGrid, ImportanceTable,
    InternalMetric, MdgWeighting, PdpCurve, PdpScale, PermutationImportance, ReconstructionBands,
};
use frfx_core::tree::{grow_tree, TreeParams};
use frfx_core::{
    build_basis, fit_fpca, rng, smooth, ForestConfig, FpcaModel, FunctionalRandomForest, Matrix,
    Predictor, SmoothedCurves, TreeNode,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{io_at, IoError, Result};
use crate::export;
use crate::model_io::{self, ModelFile, SmoothingConfig};
use crate::parallel;
use crate::svg::{self, PlotData, PlotSpec};
use crate::ucr::{load_ucr_with, LabelMap, UcrData};

/// Which rows permutation importance is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceOn {
    /// Out-of-bag predictions on the training rows.
    #[default]
    Oob,
    Test,
}

/// Which scores feed ANOVA and the class-conditional distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoresFrom {
    #[default]
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplainConfig {
    /// FPDP grid size `G`.
    pub grid: usize,
    /// Heatmap grid size `M_grid`.
    pub heatmap_grid: usize,
    pub repeats: usize,
    pub n_windows: usize,
    pub scale: PdpScale,
    pub mdg_weighting: MdgWeighting,
    pub importance_on: ImportanceOn,
    pub external_on: ScoresFrom,
    pub internal_metric: InternalMetric,
    pub external_metric: ExternalMetric,
    /// Cost-complexity parameter for the illustrative single tree.
    pub prune_alpha: f64,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        Self {
            grid: 50,
            heatmap_grid: 50,
            repeats: 10,
            n_windows: 4,
            scale: PdpScale::Probability,
            mdg_weighting: MdgWeighting::NodeFraction,
            importance_on: ImportanceOn::Oob,
            external_on: ScoresFrom::Train,
            internal_metric: InternalMetric::Mdg,
            external_metric: ExternalMetric::EtaSquared,
            prune_alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub train: PathBuf,
    pub test: Option<PathBuf>,
    pub out: PathBuf,
    pub positive_label: Option<f64>,
    pub smoothing: SmoothingConfig,
    pub n_components: usize,
    pub forest: ForestConfig,
    pub explain: ExplainConfig,
}

impl RunConfig {
    pub fn new(train: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        Self {
            train: train.into(),
            test: None,
            out: out.into(),
            positive_label: None,
            smoothing: SmoothingConfig::default(),
            n_components: 15,
            forest: ForestConfig::default(),
            explain: ExplainConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(IoError::InvalidSpec(msg.to_owned()));
        if !(self.smoothing.penalty >= 0.0 && self.smoothing.penalty.is_finite()) {
            return bad("--penalty must be a finite nonnegative number");
        }
        if self.n_components == 0 {
            return bad("--k must be at least 1");
        }
        if self.forest.n_trees == 0 {
            return bad("--trees must be at least 1");
        }
        if self.forest.mtry.is_some_and(|m| m == 0 || m > self.n_components) {
            return bad("--mtry must lie in 1..=k");
        }
        if self.explain.grid < 2 || self.explain.heatmap_grid < 2 {
            return bad("--grid and --heatmap-grid must be at least 2");
        }
        if self.explain.repeats == 0 {
            return bad("--repeats must be at least 1");
        }
        if self.explain.n_windows < 2 {
            return bad("--windows must be at least 2");
        }
        if !(self.explain.prune_alpha >= 0.0) {
            return bad("--prune-alpha must be nonnegative");
        }
        let needs_test = self.explain.importance_on == ImportanceOn::Test
            || self.explain.external_on == ScoresFrom::Test;
        if needs_test && self.test.is_none() {
            return bad("test-set importance or external scores need --test");
        }
        Ok(())
    }
}

pub struct Fitted {
    pub train: UcrData,
    pub test: Option<UcrData>,
    pub smoothed: SmoothedCurves,
    pub fpca: FpcaModel,
    pub test_scores: Option<Matrix>,
    pub forest: FunctionalRandomForest,
}

impl Fitted {
    pub fn train_labels(&self) -> &[u8] {
        self.train.dataset.labels().expect("training data is labelled")
    }

    pub fn model_file(&self, smoothing: SmoothingConfig) -> ModelFile {
        ModelFile::new(
            smoothing,
            self.train.labels,
            self.train_labels().to_vec(),
            self.fpca.clone(),
            self.forest.clone(),
        )
    }
}

pub fn fit(config: &RunConfig) -> Result<Fitted> {
    config.validate()?;
    let train = load_ucr_with(&config.train, None, config.positive_label)?;
    let test = config
        .test
        .as_ref()
        .map(|p| load_ucr_with(p, Some(&train.labels), None))
        .transpose()?;
    let s = config.smoothing;
    let basis = build_basis(train.dataset.grid(), s.n_basis, s.order)?;
    let smoothed = smooth(&train.dataset, &basis, s.penalty)?;
    let fpca = fit_fpca(&smoothed, config.n_components)?;
    let test_scores = match &test {
        Some(t) => {
            let sm = smooth(&t.dataset, &basis, s.penalty)?;
            Some(fpca.project(&sm)?)
        }
        None => None,
    };
    let labels = train.dataset.labels().expect("training data is labelled");
    let forest = parallel::with_pool(|| parallel::fit_forest_parallel(&fpca.scores, labels, &config.forest))??;
    Ok(Fitted {
        train,
        test,
        smoothed,
        fpca,
        test_scores,
        forest,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifacts {
    pub fpdp: Vec<PdpCurve>,
    pub heatmap: HeatmapGrid,
    pub bands: Vec<ReconstructionBands>,
    pub anova: Vec<AnovaRow>,
    pub permutation: PermutationImportance,
    pub mdg: Vec<f64>,
    pub importance: ImportanceTable,
    pub violin: ClassConditionalScores,
    pub bubble: BubblePlotData,
    pub tree: TreeNode,
}

pub fn fpdp_all(
    model: &FunctionalRandomForest,
    scores: &Matrix,
    grid: usize,
    scale: PdpScale,
) -> Result<Vec<PdpCurve>> {
    parallel::with_pool(|| {
        (0..scores.cols())
            .into_par_iter()
            .map(|k| compute_fpdp(model, scores, k, grid, scale))
            .collect::<Result<Vec<_>, _>>()
    })?
    .map_err(IoError::from)
}

/// Single exhaustive-split tree on all training rows, pruned.
pub fn illustrative_tree(scores: &Matrix, labels: &[u8], forest: &ForestConfig, alpha: f64) -> Result<TreeNode> {
    let params = TreeParams {
        criterion: forest.criterion,
        ..TreeParams::exhaustive(scores.cols())
    };
    let mut stream = rng::stream(forest.seed, rng::TREE_DOMAIN, u64::MAX);
    let tree = grow_tree(scores, labels, &params, &mut stream)?;
    Ok(tree.prune(alpha, forest.criterion))
}

/// Everything the explainability stage reads.
#[derive(Clone, Copy)]
pub struct Inputs<'a> {
    pub fpca: &'a FpcaModel,
    pub forest: &'a FunctionalRandomForest,
    pub train_labels: &'a [u8],
    pub test: Option<(&'a Matrix, &'a [u8])>,
    pub labels: LabelMap,
}

impl Fitted {
    pub fn inputs(&self) -> Inputs<'_> {
        Inputs {
            fpca: &self.fpca,
            forest: &self.forest,
            train_labels: self.train_labels(),
            test: self.test_scores.as_ref().zip(self.test.as_ref()).map(|(s, t)| {
                (s, t.dataset.labels().expect("test data is labelled"))
            }),
            labels: self.train.labels,
        }
    }
}

impl<'a> Inputs<'a> {
    pub fn from_model(model: &'a ModelFile, test: Option<(&'a Matrix, &'a [u8])>) -> Self {
        Self {
            fpca: &model.fpca,
            forest: &model.forest,
            train_labels: &model.train_labels,
            test,
            labels: model.labels,
        }
    }

    fn train_scores(&self) -> &'a Matrix {
        &self.fpca.scores
    }

    fn test_pair(&self) -> Result<(&'a Matrix, &'a [u8])> {
        self.test
            .ok_or_else(|| IoError::InvalidSpec("this artifact needs --test data".into()))
    }

    fn external_pair(&self, e: &ExplainConfig) -> Result<(&'a Matrix, &'a [u8])> {
        match e.external_on {
            ScoresFrom::Train => Ok((self.train_scores(), self.train_labels)),
            ScoresFrom::Test => self.test_pair(),
        }
    }

    pub fn fpdp(&self, e: &ExplainConfig) -> Result<Vec<PdpCurve>> {
        fpdp_all(self.forest, self.train_scores(), e.grid, e.scale)
    }

    pub fn heatmap(&self, e: &ExplainConfig) -> Result<HeatmapGrid> {
        let all: Vec<usize> = (0..self.fpca.n_components()).collect();
        Ok(compute_fpcph(self.forest, self.train_scores(), &all, e.heatmap_grid)?)
    }

    pub fn bands(&self, e: &ExplainConfig) -> Result<Vec<ReconstructionBands>> {
        (0..self.fpca.n_components())
            .map(|c| Ok(reconstruction_bands(self.fpca, self.train_scores(), c, e.n_windows)?))
            .collect()
    }

    pub fn anova(&self, e: &ExplainConfig) -> Result<Vec<AnovaRow>> {
        let (s, l) = self.external_pair(e)?;
        Ok(anova_fpc(s, l)?)
    }

    pub fn violin(&self, e: &ExplainConfig) -> Result<ClassConditionalScores> {
        let (s, l) = self.external_pair(e)?;
        Ok(scores_by_class(s, l)?)
    }

    pub fn permutation(&self, e: &ExplainConfig, seed: u64) -> Result<PermutationImportance> {
        Ok(match e.importance_on {
            ImportanceOn::Oob => permutation_importance_oob(
                self.forest,
                self.train_scores(),
                self.train_labels,
                e.repeats,
                seed,
            )?,
            ImportanceOn::Test => {
                let (s, l) = self.test_pair()?;
                permutation_importance(self.forest, s, l, e.repeats, seed)?
            }
        })
    }

    pub fn importance(
        &self,
        e: &ExplainConfig,
        anova: &[AnovaRow],
        permutation: &PermutationImportance,
    ) -> Result<(Vec<f64>, ImportanceTable)> {
        let mdg = mdg_importance(self.forest, e.mdg_weighting);
        let explained = self.fpca.explained_variance()?;
        let table = importance_table(&mdg, &permutation.importances, anova, &explained)?;
        Ok((mdg, table))
    }

    pub fn tree(&self, e: &ExplainConfig) -> Result<TreeNode> {
        illustrative_tree(self.train_scores(), self.train_labels, self.forest.config(), e.prune_alpha)
    }

    pub fn all(&self, e: &ExplainConfig) -> Result<Artifacts> {
        let seed = self.forest.config().seed;
        let anova = self.anova(e)?;
        let permutation = self.permutation(e, seed)?;
        let (mdg, importance) = self.importance(e, &anova, &permutation)?;
        let bubble = bubble_data(&importance, e.internal_metric, e.external_metric)?;
        Ok(Artifacts {
            fpdp: self.fpdp(e)?,
            heatmap: self.heatmap(e)?,
            bands: self.bands(e)?,
            violin: self.violin(e)?,
            tree: self.tree(e)?,
            anova,
            permutation,
            mdg,
            importance,
            bubble,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub n_train: usize,
    pub n_test: Option<usize>,
    pub series_length: usize,
    pub n_components: usize,
    pub n_trees: usize,
    pub mtry: usize,
    pub labels: LabelMap,
    pub explained_variance: Vec<f64>,
    pub test_accuracy: Option<f64>,
    pub oob_error_rate: Option<f64>,
    pub oob_coverage: Option<f64>,
    pub tree_root_fpc: Option<usize>,
    pub tree_root_threshold: Option<f64>,
    pub tree_leaves: usize,
}

pub struct Predictions {
    pub probabilities: Vec<f64>,
    pub labels: Vec<u8>,
}

pub fn predict_rows<P: Predictor + ?Sized>(model: &P, scores: &Matrix) -> Predictions {
    let probabilities = scores.row_iter().map(|r| model.predict_proba(r)).collect();
    let labels = scores.row_iter().map(|r| model.predict_label(r)).collect();
    Predictions { probabilities, labels }
}

pub fn accuracy(predicted: &[u8], truth: &[u8]) -> f64 {
    let hits = predicted.iter().zip(truth).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

fn metrics(fitted: &Fitted, config: &RunConfig, art: &Artifacts, preds: Option<&Predictions>) -> Result<Metrics> {
    let oob = fitted.forest.oob_evaluate(&fitted.fpca.scores, fitted.train_labels()).ok();
    let root = match &art.tree {
        TreeNode::Split { rule, .. } => Some(*rule),
        TreeNode::Leaf { .. } => None,
    };
    Ok(Metrics {
        n_train: fitted.train.dataset.len(),
        n_test: fitted.test.as_ref().map(|t| t.dataset.len()),
        series_length: fitted.train.dataset.grid().len(),
        n_components: fitted.fpca.n_components(),
        n_trees: config.forest.n_trees,
        mtry: config.forest.resolved_mtry(fitted.fpca.n_components()),
        labels: fitted.train.labels,
        explained_variance: fitted.fpca.explained_variance()?,
        test_accuracy: match (preds, &fitted.test) {
            (Some(p), Some(t)) => Some(accuracy(&p.labels, t.dataset.labels().expect("labelled"))),
            _ => None,
        },
        oob_error_rate: oob.as_ref().map(|o| o.oob_error_rate),
        oob_coverage: oob.as_ref().map(|o| o.coverage),
        tree_root_fpc: root.map(|r| r.fpc + 1),
        tree_root_threshold: root.map(|r| r.threshold),
        tree_leaves: art.tree.n_leaves(),
    })
}

fn fpc_name(k: usize) -> String {
    format!("FPC{}", k + 1)
}

pub fn figures(inputs: &Inputs<'_>, art: &Artifacts) -> Vec<(&'static str, PlotSpec)> {
    use svg::{BandPanel, BandStrip, BarPanel, BubbleMark, HeatColumn, LinePanel, ViolinGroup, ViolinPanel};
    let fpca = inputs.fpca;
    let t = fpca.grid.points().to_vec();
    let map = inputs.labels;
    let k = fpca.n_components();

    let eigen = PlotSpec::new(
        "Eigenfunctions",
        PlotData::LineGrid {
            panels: (0..k)
                .map(|c| LinePanel {
                    title: fpc_name(c),
                    x: t.clone(),
                    y: fpca.eigenfunctions.row(c).to_vec(),
                })
                .collect(),
            y_range: None,
        },
    )
    .labels("t", "ξ(t)");

    let prob_scale = art.fpdp.first().is_some_and(|c| c.scale == PdpScale::Probability);
    let fpdp = PlotSpec::new(
        "Functional partial dependence",
        PlotData::LineGrid {
            panels: art
                .fpdp
                .iter()
                .map(|c| LinePanel {
                    title: fpc_name(c.fpc),
                    x: c.score_grid.clone(),
                    y: c.values.clone(),
                })
                .collect(),
            y_range: prob_scale.then_some([0.0, 1.0]),
        },
    )
    .labels("score", if prob_scale { "P(class 1)" } else { "logit P(class 1)" });

    let heatmap = PlotSpec::new(
        "FPC probability heatmap",
        PlotData::Heatmap {
            columns: art
                .heatmap
                .fpcs
                .iter()
                .enumerate()
                .map(|(c, &f)| HeatColumn {
                    label: fpc_name(f),
                    scores: art.heatmap.score_grids[c].clone(),
                    probabilities: art.heatmap.probabilities[c].clone(),
                })
                .collect(),
        },
    )
    .labels("FPC", "score (column range)");

    let bands = PlotSpec::new(
        "Reconstruction bands by score window",
        PlotData::Band {
            panels: art
                .bands
                .iter()
                .map(|b| BandPanel {
                    title: fpc_name(b.fpc),
                    t: t.clone(),
                    mean: b.mean_curve.clone(),
                    strips: b
                        .windows
                        .iter()
                        .enumerate()
                        .map(|(i, w)| BandStrip {
                            label: format!("window {}", i + 1),
                            lower: w.lower.clone(),
                            upper: w.upper.clone(),
                        })
                        .collect(),
                })
                .collect(),
        },
    )
    .labels("t", "x(t)");

    let class_name = |y: u8| format!("class {y} ({})", map.decode(y));
    let violin = PlotSpec::new(
        "Class-conditional FPC scores",
        PlotData::Violin {
            panels: art
                .violin
                .distributions
                .iter()
                .zip(&art.anova)
                .enumerate()
                .map(|(c, (pair, a))| ViolinPanel {
                    title: format!("{} p={:.3}", fpc_name(c), a.p_value),
                    groups: pair
                        .iter()
                        .map(|d| ViolinGroup {
                            label: class_name(d.class),
                            grid: d.density_grid.clone(),
                            density: d.density.clone(),
                            quartiles: d.quartiles,
                        })
                        .collect(),
                })
                .collect(),
        },
    );

    let rows = &art.importance.rows;
    let labels: Vec<String> = rows.iter().map(|r| format!("{}", r.fpc + 1)).collect();
    let finite_f = {
        let f: Vec<f64> = rows.iter().map(|r| r.f_statistic).collect();
        let cap = f.iter().cloned().filter(|v| v.is_finite()).fold(0.0, f64::max);
        f.into_iter().map(|v| if v.is_finite() { v } else { cap }).collect()
    };
    let bar = |title: &str, values: Vec<f64>| BarPanel {
        title: title.to_owned(),
        labels: labels.clone(),
        values,
    };
    let importance = PlotSpec::new(
        "FPC importance",
        PlotData::Bar {
            panels: vec![
                bar("Mean decrease in impurity", rows.iter().map(|r| r.mdg).collect()),
                bar("Permutation importance", rows.iter().map(|r| r.permutation_importance).collect()),
                bar("Eta squared", rows.iter().map(|r| r.eta_squared).collect()),
                bar("F statistic", finite_f),
            ],
        },
    )
    .labels("FPC", "");

    let finite_or = |v: f64, fallback: f64| if v.is_finite() { v } else { fallback };
    let ext_cap = art
        .bubble
        .points
        .iter()
        .map(|p| p.external)
        .filter(|v| v.is_finite())
        .fold(0.0, f64::max);
    let bubble = PlotSpec::new(
        "Internal vs external importance (size: explained variance)",
        PlotData::Bubble {
            points: art
                .bubble
                .points
                .iter()
                .map(|p| BubbleMark {
                    label: fpc_name(p.fpc),
                    x: finite_or(p.external, ext_cap),
                    y: p.internal,
                    size: p.size,
                })
                .collect(),
            median_x: finite_or(art.bubble.median_external, ext_cap),
            median_y: art.bubble.median_internal,
        },
    )
    .labels(
        match art.bubble.external_metric {
            ExternalMetric::EtaSquared => "eta squared",
            ExternalMetric::FStatistic => "F statistic",
        },
        match art.bubble.internal_metric {
            InternalMetric::Mdg => "mean decrease in impurity",
            InternalMetric::Permutation => "permutation importance",
        },
    );

    vec![
        ("eigenfunctions.svg", eigen),
        ("fpdp.svg", fpdp),
        ("heatmap.svg", heatmap),
        ("bands.svg", bands),
        ("violin.svg", violin),
        ("importance.svg", importance),
        ("bubble.svg", bubble),
    ]
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(io_at(&path))?;
    Ok(path)
}

#[derive(Debug)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub metrics: Metrics,
}

/// Runs everything and writes artifacts into `config.out`.
pub fn run(config: &RunConfig) -> Result<RunSummary> {
    let fitted = fit(config)?;
    let inputs = fitted.inputs();
    let art = inputs.all(&config.explain)?;
    let preds = fitted.test_scores.as_ref().map(|s| predict_rows(&fitted.forest, s));
    let metrics = metrics(&fitted, config, &art, preds.as_ref())?;

    let dir = &config.out;
    fs::create_dir_all(dir).map_err(io_at(dir))?;
    let mut files = Vec::new();
    let mut put = |name: &str, text: String| -> Result<()> {
        files.push(write(dir, name, &text)?);
        Ok(())
    };
    put("model.json", model_io::to_json(&fitted.model_file(config.smoothing))?)?;
    // the output directory is left out so that runs into different
    // directories write identical files
    let mut recorded = serde_json::to_value(config)?;
    if let Some(obj) = recorded.as_object_mut() {
        obj.remove("out");
    }
    put("config.json", export::json(&recorded)?)?;
    put("metrics.json", export::json(&metrics)?)?;
    put("eigenvalues.csv", export::eigenvalues_csv(&fitted.fpca)?)?;
    put("eigenfunctions.csv", export::eigenfunctions_csv(&fitted.fpca)?)?;
    put("scores_train.csv", export::scores_csv(&fitted.fpca.scores, Some(fitted.train_labels()))?)?;
    if let (Some(s), Some(t), Some(p)) = (&fitted.test_scores, &fitted.test, &preds) {
        let truth = t.dataset.labels();
        put("scores_test.csv", export::scores_csv(s, truth)?)?;
        put("predictions.csv", export::predictions_csv(&p.probabilities, &p.labels, truth)?)?;
    }
    put("fpdp.csv", export::pdp_long_csv(&art.fpdp)?)?;
    put("fpdp.json", export::json(&art.fpdp)?)?;
    put("heatmap.csv", export::heatmap_csv(&art.heatmap)?)?;
    put("heatmap.json", export::json(&art.heatmap)?)?;
    put("bands.csv", export::bands_csv(&art.bands, &fitted.fpca.grid)?)?;
    put("bands.json", export::json(&art.bands)?)?;
    put("anova.csv", export::anova_csv(&art.anova)?)?;
    put("permutation.csv", export::permutation_csv(&art.permutation)?)?;
    put("importance.csv", export::importance_csv(&art.importance)?)?;
    put("importance.json", export::json(&art.importance)?)?;
    put("violin_summary.csv", export::violin_summary_csv(&art.violin)?)?;
    put("violin_density.csv", export::violin_density_csv(&art.violin)?)?;
    put("violin.json", export::json(&art.violin)?)?;
    put("bubble.csv", export::bubble_csv(&art.bubble)?)?;
    put("bubble.json", export::json(&art.bubble)?)?;
    put("tree.json", export::json(&art.tree)?)?;
    for (name, spec) in figures(&inputs, &art) {
        put(name, svg::render(&spec)?)?;
    }
    Ok(RunSummary { files, metrics })
}
