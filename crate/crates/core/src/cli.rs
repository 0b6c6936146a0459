//! Command-line front end. Reports are JSON lines.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::detector::{
    classify, evaluate, fit_logistic_1d, fit_threshold_at_fpr, fit_threshold_eer, DetectorModel, Label,
    ScoredSample,
};
use crate::error::{Error, Result};
use crate::estimators::{Method, PhdParams, DEFAULT_MLE_NEIGHBORS};
use crate::io::{read_embeddings, read_manifest, read_scores, EstimateRecord, Estimator, ManifestRecord, EMB1_MAGIC};
use crate::synth::{run_benchmark, BenchmarkParams, ManifoldSpec};

#[derive(Debug, Parser)]
#[command(name = "phdim", version, about = "Intrinsic dimension of point clouds and artificial-text detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate the intrinsic dimension of EMB1 clouds.
    Estimate {
        /// An EMB1 file or a JSON-lines manifest of them.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Calibrate a detector from human and generated scores.
    Fit {
        /// Human scores: one number or `estimate` record per line.
        #[arg(long)]
        human: PathBuf,
        #[arg(long)]
        generated: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FitMode::Fpr)]
        mode: FitMode,
        #[arg(long, default_value_t = 0.01)]
        target_fpr: f64,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Score EMB1 clouds and label them with a detector.
    Detect {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Evaluate a detector on a labelled manifest.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        manifest: PathBuf,
        /// FPR levels for detection accuracy; repeatable.
        #[arg(long = "fpr", default_values_t = vec![0.01])]
        fprs: Vec<f64>,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
    /// Compare estimators on synthetic manifolds of known dimension.
    SynthBench {
        /// JSON-lines file of manifold specs.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 20)]
        repeats: usize,
        #[arg(long, value_delimiter = ',', default_values_t = vec![MethodArg::Phd, MethodArg::Mle])]
        estimators: Vec<MethodArg>,
        #[command(flatten)]
        estimator: EstimatorArgs,
        #[arg(long, default_value = "-")]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    Fpr,
    Eer,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Phd,
    Mle,
}

impl std::fmt::Display for MethodArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodArg::Phd => "phd",
            MethodArg::Mle => "mle",
        })
    }
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Phd => Method::Phd,
            MethodArg::Mle => Method::Mle,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Phd)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 8)]
    pub k_grid: usize,
    #[arg(long, default_value_t = 7)]
    pub j_samples: usize,
    #[arg(long, default_value_t = 3)]
    pub rounds: usize,
    #[arg(long, default_value_t = 40)]
    pub min_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample from lexicographically sorted points (order-independent PHD).
    #[arg(long)]
    pub canonical_order: bool,
    /// Neighbour count for the MLE estimator.
    #[arg(long, default_value_t = DEFAULT_MLE_NEIGHBORS)]
    pub mle_k: usize,
}

impl EstimatorArgs {
    pub fn phd_params(&self) -> PhdParams {
        PhdParams {
            alpha: self.alpha,
            k_grid: self.k_grid,
            j_samples: self.j_samples,
            rounds: self.rounds,
            min_subsample: self.min_points,
            seed: self.seed,
            canonical_order: self.canonical_order,
        }
    }

    pub fn estimator(&self) -> Estimator {
        match self.method {
            MethodArg::Phd => Estimator::Phd(self.phd_params()),
            MethodArg::Mle => Estimator::Mle { k_neighbors: self.mle_k },
        }
    }
}

/// Outcome of a command: whether any hard I/O or format failure occurred.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub io_failures: usize,
}

pub fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Estimate { input, estimator, out } => cmd_estimate(&input, &estimator.estimator(), &out),
        Command::Fit {
            human,
            generated,
            mode,
            target_fpr,
            out,
        } => cmd_fit(&human, generated.as_deref(), mode, target_fpr, &out),
        Command::Detect {
            model,
            input,
            estimator,
            out,
        } => cmd_detect(&model, &input, &estimator.estimator(), &out),
        Command::Eval {
            model,
            manifest,
            fprs,
            estimator,
            out,
        } => cmd_eval(&model, &manifest, &fprs, &estimator.estimator(), &out),
        Command::SynthBench {
            spec,
            repeats,
            estimators,
            estimator,
            out,
        } => {
            let methods: Vec<Method> = estimators.into_iter().map(Method::from).collect();
            let params = BenchmarkParams {
                phd: estimator.phd_params(),
                mle_neighbors: estimator.mle_k,
            };
            cmd_synth_bench(&spec, repeats, &methods, &params, &out)
        }
    }
}

fn open_out(path: &Path) -> Result<Box<dyn Write>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let f = File::create(path).map_err(|e| Error::io(path, e))?;
        Ok(Box::new(BufWriter::new(f)))
    }
}

fn write_lines<T: Serialize>(path: &Path, items: &[T]) -> Result<()> {
    let mut w = open_out(path)?;
    for item in items {
        let line = serde_json::to_string(item).expect("report records serialize");
        writeln!(w, "{line}").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn is_emb1(path: &Path) -> Result<bool> {
    let mut head = [0u8; 4];
    let mut f = File::open(path).map_err(|e| Error::io(path, e))?;
    let n = f.read(&mut head).map_err(|e| Error::io(path, e))?;
    Ok(n == 4 && &head == EMB1_MAGIC)
}

/// The inputs of `estimate`/`detect`: a single EMB1 file or a manifest.
fn input_records(input: &Path) -> Result<Vec<ManifestRecord>> {
    if is_emb1(input)? {
        Ok(vec![ManifestRecord {
            path: input.to_path_buf(),
            label: None,
            language: None,
            generator: None,
            domain: None,
        }])
    } else {
        read_manifest(input)
    }
}

/// Estimates every manifest entry in parallel, in input order. Returns the
/// records and the number of entries that failed to load.
fn estimate_all(records: &[ManifestRecord], estimator: &Estimator) -> (Vec<EstimateRecord>, usize) {
    let out: Vec<(EstimateRecord, bool)> = records
        .par_iter()
        .map(|rec| {
            let id = rec.path.to_string_lossy().into_owned();
            let (outcome, load_failed) = match read_embeddings(&rec.path) {
                Ok(cloud) => (estimator.estimate(&cloud), false),
                Err(e) => (Err(e), true),
            };
            let mut r = EstimateRecord::new(id, estimator, outcome);
            r.label = rec.label;
            r.meta = rec.meta();
            (r, load_failed)
        })
        .collect();
    let failures = out.iter().filter(|(_, f)| *f).count();
    (out.into_iter().map(|(r, _)| r).collect(), failures)
}

pub fn cmd_estimate(input: &Path, estimator: &Estimator, out: &Path) -> Result<Outcome> {
    let records = input_records(input)?;
    let (results, io_failures) = estimate_all(&records, estimator);
    write_lines(out, &results)?;
    Ok(Outcome { io_failures })
}

pub fn cmd_fit(human: &Path, generated: Option<&Path>, mode: FitMode, target_fpr: f64, out: &Path) -> Result<Outcome> {
    let human_scores = read_scores(human)?;
    let generated_scores = generated.map(read_scores).transpose()?;
    let need_generated = || {
        generated_scores
            .as_ref()
            .ok_or_else(|| Error::Param("--generated is required for this mode".into()))
    };
    let model = match mode {
        FitMode::Fpr => fit_threshold_at_fpr(&human_scores.scores, target_fpr)?,
        FitMode::Eer => fit_threshold_eer(&human_scores.scores, &need_generated()?.scores)?.0,
        FitMode::Logistic => {
            let gen = need_generated()?;
            let samples: Vec<ScoredSample> = human_scores
                .scores
                .iter()
                .enumerate()
                .map(|(i, &s)| ScoredSample::new(format!("human:{i}"), s, Label::Human))
                .chain(
                    gen.scores
                        .iter()
                        .enumerate()
                        .map(|(i, &s)| ScoredSample::new(format!("generated:{i}"), s, Label::Generated)),
                )
                .collect();
            fit_logistic_1d(&samples)?
        }
    };
    let training_set = match generated {
        Some(g) => format!("human={} generated={}", human.display(), g.display()),
        None => format!("human={}", human.display()),
    };
    let model = model.with_training_set(training_set);
    let mut w = open_out(out)?;
    let doc = serde_json::to_string_pretty(&model).expect("model serializes");
    writeln!(w, "{doc}").map_err(|e| Error::io(out, e))?;
    w.flush().map_err(|e| Error::io(out, e))?;
    Ok(Outcome { io_failures: 0 })
}

pub fn read_model(path: &Path) -> Result<DetectorModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: DetectorModel = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        reason: e.to_string(),
    })?;
    model.validate()?;
    Ok(model)
}

#[derive(Debug, Serialize)]
struct Verdict<'a> {
    id: &'a str,
    score: Option<f64>,
    verdict: Option<Label>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<Label>,
}

pub fn cmd_detect(model: &Path, input: &Path, estimator: &Estimator, out: &Path) -> Result<Outcome> {
    let model = read_model(model)?;
    let records = input_records(input)?;
    let (results, io_failures) = estimate_all(&records, estimator);
    let verdicts: Vec<Verdict> = results
        .iter()
        .map(|r| Verdict {
            id: &r.id,
            score: r.value,
            verdict: r.value.map(|v| classify(&model, v)),
            error: r.error.as_deref(),
            label: r.label,
        })
        .collect();
    write_lines(out, &verdicts)?;
    Ok(Outcome { io_failures })
}

pub fn cmd_eval(model: &Path, manifest: &Path, fprs: &[f64], estimator: &Estimator, out: &Path) -> Result<Outcome> {
    let model = read_model(model)?;
    let records = read_manifest(manifest)?;
    if let Some(r) = records.iter().find(|r| r.label.is_none()) {
        return Err(Error::Data(format!("manifest entry {} has no label", r.path.display())));
    }
    let (results, io_failures) = estimate_all(&records, estimator);
    let samples: Vec<ScoredSample> = results
        .into_iter()
        .map(|r| ScoredSample {
            id: r.id,
            score: r.value.unwrap_or(f64::NAN),
            label: r.label.expect("checked above"),
            meta: r.meta,
        })
        .collect();
    let report = evaluate(&model, &samples, fprs)?;
    write_lines(out, &[report])?;
    Ok(Outcome { io_failures })
}

pub fn read_specs(path: &Path) -> Result<Vec<ManifoldSpec>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                reason: e.to_string(),
            })
        })
        .collect()
}

pub fn cmd_synth_bench(
    spec: &Path,
    repeats: usize,
    methods: &[Method],
    params: &BenchmarkParams,
    out: &Path,
) -> Result<Outcome> {
    let specs = read_specs(spec)?;
    let report = run_benchmark(&specs, methods, repeats, params)?;
    write_lines(out, &report.cells)?;
    Ok(Outcome { io_failures: 0 })
}
