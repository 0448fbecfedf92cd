//! `setcast`: ingest raw quotes, train and apply classifiers, and run
//! stratified cross-validation experiments.

mod error;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use setcast::dataset::{self, load_raw_series, load_samples, read_feature_table, Dataset, Direction, FeatureTable};
use setcast::evaluation::{compare, cross_validate_folds};
use setcast::naive_bayes::{self, DensityEstimator, NaiveBayesConfig, PriorMode, Smoothing};
use setcast::report::{render_comparison_machine, render_comparison_text, render_machine, render_text};
use setcast::svm::{self, train_smo};
use setcast::{ClassDistribution, KernelSpec, NaiveBayesLearner, NaiveBayesModel, SvmLearner, SvmModel, TrainerConfig};

use crate::error::CliError;

const DATA_DIR_VAR: &str = "SETCAST_DATA_DIR";
const FIXTURE_NAME: &str = "appendix_b.csv";

#[derive(Parser)]
#[command(
    name = "setcast",
    version,
    about = "Daily SET direction experiments with naive Bayes and SVM"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a raw daily price series into a labeled percent-change table.
    Ingest {
        /// Raw series CSV (DATE,NK,HS,SET_CLOSE,SET_OPEN,USDTHB,SP500,GOLD).
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Train a model on a labeled table and write the model file.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Apply a model file to a feature table and write predictions as CSV.
    Predict {
        #[arg(long)]
        model_file: PathBuf,
        /// Feature table; the label column is optional.
        #[arg(long)]
        data: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Stratified k-fold cross-validation of one model.
    Cv {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        cv: CvArgs,
        #[command(flatten)]
        format: FormatArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Naive Bayes against SVM on identical folds.
    Compare {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        nb: NaiveBayesArgs,
        #[command(flatten)]
        svm: SvmArgs,
        #[command(flatten)]
        cv: CvArgs,
        #[command(flatten)]
        format: FormatArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Labeled table. Defaults to appendix_b.csv in $SETCAST_DATA_DIR, else data/.
    #[arg(long)]
    data: Option<PathBuf>,
}

impl DataArgs {
    fn path(&self) -> PathBuf {
        self.data.clone().unwrap_or_else(|| {
            let dir = std::env::var_os(DATA_DIR_VAR).map_or_else(|| PathBuf::from("data"), PathBuf::from);
            dir.join(FIXTURE_NAME)
        })
    }

    fn load(&self) -> Result<Dataset, CliError> {
        let data = load_samples(self.path())?;
        data.require_all_classes()?;
        Ok(data)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    Nb,
    Svm,
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelKind {
    Linear,
    Poly,
    Rbf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args)]
struct NaiveBayesArgs {
    #[arg(long, default_value = "frequency")]
    priors: PriorMode,
    /// Zero-count handling for categorical attributes.
    #[arg(long, default_value = "add-one")]
    smoothing: Smoothing,
    #[arg(long, default_value = "precision-rounded")]
    estimator: DensityEstimator,
}

impl NaiveBayesArgs {
    fn config(&self) -> NaiveBayesConfig {
        NaiveBayesConfig {
            priors: self.priors,
            smoothing: self.smoothing,
            estimator: self.estimator,
        }
    }
}

#[derive(Args)]
struct SvmArgs {
    #[arg(long, value_enum, default_value = "linear")]
    kernel: KernelKind,
    /// Polynomial kernel exponent.
    #[arg(long, default_value_t = 2)]
    degree: u32,
    /// RBF kernel width.
    #[arg(long, default_value_t = 1.0)]
    delta_sq: f64,
    /// Box constraint C.
    #[arg(long, default_value_t = 1.0)]
    cost: f64,
    /// Z-score features with training statistics before fitting.
    #[arg(long)]
    standardize: bool,
}

impl SvmArgs {
    fn learner(&self) -> Result<SvmLearner, CliError> {
        let kernel = match self.kernel {
            KernelKind::Linear => KernelSpec::Linear,
            KernelKind::Poly => KernelSpec::Polynomial { degree: self.degree },
            KernelKind::Rbf => KernelSpec::Rbf {
                delta_sq: self.delta_sq,
            },
        };
        kernel.validate()?;
        let config = TrainerConfig {
            cost: self.cost,
            standardize: self.standardize,
            ..TrainerConfig::default()
        };
        config.validate()?;
        Ok(SvmLearner { kernel, config })
    }
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long, value_enum, default_value = "nb")]
    model: ModelKind,
    #[command(flatten)]
    nb: NaiveBayesArgs,
    #[command(flatten)]
    svm: SvmArgs,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads for fold-level parallelism.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct FormatArgs {
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Args)]
struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl OutputArgs {
    fn emit(&self, content: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => fs::write(path, content).map_err(|e| CliError::io(path.display().to_string(), e)),
            None => io::stdout()
                .write_all(content.as_bytes())
                .map_err(|e| CliError::io("<stdout>", e)),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("setcast: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest { data, output } => ingest(&data, &output),
        Command::Train { data, model, output } => train(&data, &model, &output),
        Command::Predict {
            model_file,
            data,
            output,
        } => predict(&model_file, &data, &output),
        Command::Cv {
            data,
            model,
            cv,
            format,
            output,
        } => cross_validation(&data, &model, &cv, format.format, &output),
        Command::Compare {
            data,
            nb,
            svm,
            cv,
            format,
            output,
        } => comparison(&data, &nb, &svm, &cv, format.format, &output),
    }
}

fn ingest(raw: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let table = dataset::build_training_table(&load_raw_series(raw)?)?;
    let mut buf = Vec::new();
    dataset::write_samples(&table, &mut buf)?;
    output.emit(&String::from_utf8(buf).expect("CSV output is UTF-8"))
}

fn train(data: &DataArgs, model: &ModelArgs, output: &OutputArgs) -> Result<(), CliError> {
    let data = data.load()?;
    let text = match model.model {
        ModelKind::Nb => naive_bayes::train_continuous(&data, &model.nb.config())?.to_text(),
        ModelKind::Svm => {
            let learner = model.svm.learner()?;
            let fit = train_smo(&data, learner.kernel, &learner.config)?;
            if !fit.model.converged {
                eprintln!(
                    "setcast: warning: SMO stopped after {} passes with KKT violations",
                    fit.passes
                );
            }
            fit.model.to_text()
        }
    };
    output.emit(&text)
}

enum LoadedModel {
    NaiveBayes(NaiveBayesModel),
    Svm(SvmModel),
}

fn load_model(path: &Path) -> Result<LoadedModel, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    if text.lines().any(|l| l.trim() == "format = setcast-svm/1") {
        Ok(LoadedModel::Svm(SvmModel::from_text(&text)?))
    } else {
        Ok(LoadedModel::NaiveBayes(NaiveBayesModel::from_text(&text)?))
    }
}

fn read_table(path: &Path) -> Result<Option<FeatureTable>, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path.display().to_string(), e))?;
    if bytes.iter().all(u8::is_ascii_whitespace) {
        return Ok(None);
    }
    Ok(Some(read_feature_table(bytes.as_slice())?))
}

fn predict(model_file: &Path, data: &Path, output: &OutputArgs) -> Result<(), CliError> {
    let model = load_model(model_file)?;
    let table = match read_table(data)? {
        Some(table) if !table.rows.is_empty() => table,
        _ => return output.emit(""),
    };
    if let LoadedModel::NaiveBayes(m) = &model {
        if m.feature_names() != table.feature_names.as_slice() {
            return Err(CliError::Usage(format!(
                "sample columns {:?} do not match model attributes {:?}",
                table.feature_names,
                m.feature_names()
            )));
        }
    }
    let mut out = String::from(if table.labels.is_some() {
        "index,predicted,p_up,p_down,actual\n"
    } else {
        "index,predicted,p_up,p_down\n"
    });
    for (i, row) in table.rows.iter().enumerate() {
        let dist: ClassDistribution = match &model {
            LoadedModel::NaiveBayes(m) => m.predict_distribution(row)?,
            LoadedModel::Svm(m) => svm::hard_distribution(m, row)?,
        };
        let predicted = match &model {
            LoadedModel::Svm(m) => svm::classify(m, row)?,
            LoadedModel::NaiveBayes(_) => dist.argmax(),
        };
        out.push_str(&format!(
            "{i},{predicted},{},{}",
            dist.get(Direction::Up),
            dist.get(Direction::Down)
        ));
        if let Some(labels) = &table.labels {
            out.push_str(&format!(",{}", labels[i]));
        }
        out.push('\n');
    }
    output.emit(&out)
}

fn cross_validation(
    data: &DataArgs,
    model: &ModelArgs,
    cv: &CvArgs,
    format: Format,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let data = data.load()?;
    let folds = dataset::stratified_folds(&data, cv.folds, cv.seed)?;
    let mut cross = match model.model {
        ModelKind::Nb => {
            let learner = NaiveBayesLearner {
                config: model.nb.config(),
            };
            cross_validate_folds(&learner, &data, &folds, cv.jobs)?
        }
        ModelKind::Svm => cross_validate_folds(&model.svm.learner()?, &data, &folds, cv.jobs)?,
    };
    cross.report.seed = Some(cv.seed);
    output.emit(&match format {
        Format::Text => render_text(&cross.report),
        Format::Machine => render_machine(&cross.report),
    })
}

fn comparison(
    data: &DataArgs,
    nb: &NaiveBayesArgs,
    svm: &SvmArgs,
    cv: &CvArgs,
    format: Format,
    output: &OutputArgs,
) -> Result<(), CliError> {
    let data = data.load()?;
    let nb = NaiveBayesLearner { config: nb.config() };
    let report = compare(&nb, &svm.learner()?, &data, cv.folds, cv.seed, cv.jobs)?;
    output.emit(&match format {
        Format::Text => render_comparison_text(&report),
        Format::Machine => render_comparison_machine(&report),
    })
}
