use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use frfx::export;
use frfx::model_io::{load_model, save_model, SmoothingConfig};
use frfx::pipeline::{self, ExplainConfig, ImportanceOn, Inputs, RunConfig, ScoresFrom};
use frfx::svg::{self, PlotSpec};
use frfx::ucr::{load_ucr_with, UcrData};
use frfx_core::explain::{bubble_data, ExternalMetric, InternalMetric, MdgWeighting, PdpScale};
use frfx_core::{build_basis, fit_fpca, smooth, Criterion, ForestConfig, Matrix};

#[derive(Parser)]
#[command(name = "frfx", version, about = "Functional random forests on FPC scores, with explainability artifacts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit B-spline smooths and write coefficients and fitted values.
    Smooth {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        smoothing: SmoothArgs,
    },
    /// Functional PCA of the smoothed training curves.
    Fpca {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        smoothing: SmoothArgs,
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        positive_label: Option<f64>,
    },
    /// Train a forest and save the model file.
    Train {
        #[arg(long)]
        train: PathBuf,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        smoothing: SmoothArgs,
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[command(flatten)]
        forest: ForestArgs,
        #[arg(long, allow_negative_numbers = true)]
        positive_label: Option<f64>,
    },
    /// Predict class probabilities for a UCR file.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// CSV file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute one explainability artifact from a saved model.
    Explain {
        #[arg(value_enum)]
        artifact: Artifact,
        #[arg(long)]
        model: PathBuf,
        /// Labelled evaluation data, for test-set importance or external scores.
        #[arg(long)]
        test: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        explain: ExplainArgs,
    },
    /// Full workflow: load, smooth, FPCA, forest, every artifact and figure.
    Pipeline {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        smoothing: SmoothArgs,
        #[arg(long, default_value_t = 15)]
        k: usize,
        #[command(flatten)]
        forest: ForestArgs,
        #[command(flatten)]
        explain: ExplainArgs,
        #[arg(long, allow_negative_numbers = true)]
        positive_label: Option<f64>,
    },
    /// Render a JSON plot spec to SVG.
    Render {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Artifact {
    Pdp,
    Heatmap,
    Importance,
    Violin,
    Bubble,
    Bands,
}

#[derive(Args)]
struct SmoothArgs {
    #[arg(long, default_value_t = 20)]
    n_basis: usize,
    #[arg(long, default_value_t = 4)]
    order: usize,
    #[arg(long, default_value_t = 0.0)]
    penalty: f64,
}

impl SmoothArgs {
    fn config(&self) -> SmoothingConfig {
        SmoothingConfig {
            n_basis: self.n_basis,
            order: self.order,
            penalty: self.penalty,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CriterionArg {
    Gini,
    Entropy,
}

#[derive(Args)]
struct ForestArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    trees: usize,
    /// Candidates per split; defaults to floor(sqrt(k)).
    #[arg(long)]
    mtry: Option<usize>,
    #[arg(long, value_enum, default_value_t = CriterionArg::Gini)]
    criterion: CriterionArg,
    #[arg(long, default_value_t = 1)]
    min_node_size: usize,
    #[arg(long)]
    max_depth: Option<usize>,
}

impl ForestArgs {
    fn config(&self) -> ForestConfig {
        ForestConfig {
            n_trees: self.trees,
            mtry: self.mtry,
            criterion: match self.criterion {
                CriterionArg::Gini => Criterion::Gini,
                CriterionArg::Entropy => Criterion::Entropy,
            },
            min_node_size: self.min_node_size,
            max_depth: self.max_depth,
            seed: self.seed,
            ..ForestConfig::default()
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ScaleArg {
    Prob,
    Logit,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnArg {
    Oob,
    Test,
}

#[derive(Clone, Copy, ValueEnum)]
enum FromArg {
    Train,
    Test,
}

#[derive(Clone, Copy, ValueEnum)]
enum InternalArg {
    Mdg,
    Permutation,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExternalArg {
    EtaSquared,
    FStatistic,
}

#[derive(Args)]
struct ExplainArgs {
    /// FPDP grid points.
    #[arg(long, default_value_t = 50)]
    grid: usize,
    #[arg(long, default_value_t = 50)]
    heatmap_grid: usize,
    /// Permutation repeats.
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Score windows per reconstruction band.
    #[arg(long, default_value_t = 4)]
    windows: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Prob)]
    scale: ScaleArg,
    /// Use raw split decreases instead of node-fraction weighting for MDG.
    #[arg(long)]
    unweighted_mdg: bool,
    #[arg(long, value_enum, default_value_t = OnArg::Oob)]
    importance_on: OnArg,
    /// Scores used for ANOVA and violins.
    #[arg(long, value_enum, default_value_t = FromArg::Train)]
    external_on: FromArg,
    #[arg(long, value_enum, default_value_t = InternalArg::Mdg)]
    internal_metric: InternalArg,
    #[arg(long, value_enum, default_value_t = ExternalArg::EtaSquared)]
    external_metric: ExternalArg,
    #[arg(long, default_value_t = 0.01)]
    prune_alpha: f64,
}

impl ExplainArgs {
    fn config(&self) -> ExplainConfig {
        ExplainConfig {
            grid: self.grid,
            heatmap_grid: self.heatmap_grid,
            repeats: self.repeats,
            n_windows: self.windows,
            scale: match self.scale {
                ScaleArg::Prob => PdpScale::Probability,
                ScaleArg::Logit => PdpScale::Logit,
            },
            mdg_weighting: if self.unweighted_mdg {
                MdgWeighting::Unweighted
            } else {
                MdgWeighting::NodeFraction
            },
            importance_on: match self.importance_on {
                OnArg::Oob => ImportanceOn::Oob,
                OnArg::Test => ImportanceOn::Test,
            },
            external_on: match self.external_on {
                FromArg::Train => ScoresFrom::Train,
                FromArg::Test => ScoresFrom::Test,
            },
            internal_metric: match self.internal_metric {
                InternalArg::Mdg => InternalMetric::Mdg,
                InternalArg::Permutation => InternalMetric::Permutation,
            },
            external_metric: match self.external_metric {
                ExternalArg::EtaSquared => ExternalMetric::EtaSquared,
                ExternalArg::FStatistic => ExternalMetric::FStatistic,
            },
            prune_alpha: self.prune_alpha,
        }
    }
}

fn write(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn smoothed_scores(data: &UcrData, s: SmoothingConfig, k: usize) -> anyhow::Result<frfx_core::FpcaModel> {
    let basis = build_basis(data.dataset.grid(), s.n_basis, s.order)?;
    let smoothed = smooth(&data.dataset, &basis, s.penalty)?;
    Ok(fit_fpca(&smoothed, k)?)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Smooth { train, out, smoothing } => {
            let data = load_ucr_with(&train, None, None)?;
            let s = smoothing.config();
            let basis = build_basis(data.dataset.grid(), s.n_basis, s.order)?;
            let sm = smooth(&data.dataset, &basis, s.penalty)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            let coef = sm.coefficients();
            let header: Vec<String> = (1..=coef.cols()).map(|i| format!("c{i}")).collect();
            write(&out.join("coefficients.csv"), &matrix_csv(&header, coef)?)?;
            let fitted = sm.evaluate();
            let header: Vec<String> = data.dataset.grid().points().iter().map(|t| t.to_string()).collect();
            write(&out.join("smoothed.csv"), &matrix_csv(&header, &fitted)?)?;
            println!("smoothed {} curves with {} basis functions", sm.len(), coef.cols());
        }
        Command::Fpca { train, out, smoothing, k, positive_label } => {
            let data = load_ucr_with(&train, None, positive_label)?;
            let model = smoothed_scores(&data, smoothing.config(), k)?;
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            write(&out.join("eigenvalues.csv"), &export::eigenvalues_csv(&model)?)?;
            write(&out.join("eigenfunctions.csv"), &export::eigenfunctions_csv(&model)?)?;
            write(&out.join("scores_train.csv"), &export::scores_csv(&model.scores, data.dataset.labels())?)?;
            write(&out.join("fpca.json"), &export::json(&model)?)?;
            let ev = model.explained_variance()?;
            println!("FPC1 explains {:.4} of the variance", ev[0]);
        }
        Command::Train { train, out, smoothing, k, forest, positive_label } => {
            let mut config = RunConfig::new(train, PathBuf::new());
            config.smoothing = smoothing.config();
            config.n_components = k;
            config.forest = forest.config();
            config.positive_label = positive_label;
            let fitted = pipeline::fit(&config)?;
            if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            save_model(&fitted.model_file(config.smoothing), &out)?;
            println!("trained {} trees, model written to {}", config.forest.n_trees, out.display());
        }
        Command::Predict { model, test, out } => {
            let model = load_model(&model)?;
            let data = load_ucr_with(&test, Some(&model.labels), None)?;
            let scores = model.scores_for(&data.dataset)?;
            let p = pipeline::predict_rows(&model.forest, &scores);
            write(&out, &export::predictions_csv(&p.probabilities, &p.labels, data.dataset.labels())?)?;
            if let Some(truth) = data.dataset.labels() {
                println!("accuracy {:.4}", pipeline::accuracy(&p.labels, truth));
            }
        }
        Command::Explain { artifact, model, test, out, explain } => {
            let model = load_model(&model)?;
            let e = explain.config();
            let test_data: Option<(Matrix, Vec<u8>)> = match &test {
                Some(path) => {
                    let data = load_ucr_with(path, Some(&model.labels), None)?;
                    let scores = model.scores_for(&data.dataset)?;
                    Some((scores, data.dataset.labels().expect("loader labels rows").to_vec()))
                }
                None => None,
            };
            let inputs = Inputs::from_model(&model, test_data.as_ref().map(|(s, l)| (s, l.as_slice())));
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            explain_one(artifact, &inputs, &e, &out)?;
        }
        Command::Pipeline { train, test, out, smoothing, k, forest, explain, positive_label } => {
            let mut config = RunConfig::new(train, out);
            config.test = test;
            config.smoothing = smoothing.config();
            config.n_components = k;
            config.forest = forest.config();
            config.explain = explain.config();
            config.positive_label = positive_label;
            let summary = pipeline::run(&config)?;
            match summary.metrics.test_accuracy {
                Some(a) => println!("wrote {} files; test accuracy {a:.4}", summary.files.len()),
                None => println!("wrote {} files", summary.files.len()),
            }
        }
        Command::Render { spec, out } => {
            let text = fs::read_to_string(&spec).with_context(|| format!("reading {}", spec.display()))?;
            let spec: PlotSpec = serde_json::from_str(&text).context("parsing plot spec")?;
            svg::render_svg(&spec, &out)?;
        }
    }
    Ok(())
}

fn matrix_csv(header: &[String], m: &Matrix) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in m.row_iter() {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn explain_one(artifact: Artifact, inputs: &Inputs<'_>, e: &ExplainConfig, out: &Path) -> anyhow::Result<()> {
    let seed = inputs.forest.config().seed;
    match artifact {
        Artifact::Pdp => {
            let curves = inputs.fpdp(e)?;
            write(&out.join("fpdp.csv"), &export::pdp_long_csv(&curves)?)?;
            write(&out.join("fpdp.json"), &export::json(&curves)?)?;
        }
        Artifact::Heatmap => {
            let hm = inputs.heatmap(e)?;
            write(&out.join("heatmap.csv"), &export::heatmap_csv(&hm)?)?;
            write(&out.join("heatmap.json"), &export::json(&hm)?)?;
        }
        Artifact::Bands => {
            let bands = inputs.bands(e)?;
            write(&out.join("bands.csv"), &export::bands_csv(&bands, &inputs.fpca.grid)?)?;
            write(&out.join("bands.json"), &export::json(&bands)?)?;
        }
        Artifact::Violin => {
            let v = inputs.violin(e)?;
            write(&out.join("violin_summary.csv"), &export::violin_summary_csv(&v)?)?;
            write(&out.join("violin_density.csv"), &export::violin_density_csv(&v)?)?;
            write(&out.join("violin.json"), &export::json(&v)?)?;
        }
        Artifact::Importance | Artifact::Bubble => {
            let anova = inputs.anova(e)?;
            let pi = inputs.permutation(e, seed)?;
            let (_, table) = inputs.importance(e, &anova, &pi)?;
            if matches!(artifact, Artifact::Importance) {
                write(&out.join("anova.csv"), &export::anova_csv(&anova)?)?;
                write(&out.join("permutation.csv"), &export::permutation_csv(&pi)?)?;
                write(&out.join("importance.csv"), &export::importance_csv(&table)?)?;
                write(&out.join("importance.json"), &export::json(&table)?)?;
            } else {
                let b = bubble_data(&table, e.internal_metric, e.external_metric)?;
                write(&out.join("bubble.csv"), &export::bubble_csv(&b)?)?;
                write(&out.join("bubble.json"), &export::json(&b)?)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = format!("{e:#}").replace('\n', " ");
            eprintln!("frfx: error: {msg}");
            ExitCode::FAILURE
        }
    }
}
