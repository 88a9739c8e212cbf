use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use spamlab::corpus::{
    load_csv, load_eml_dir, load_mbox_file, parse_eml, stratified_split, to_example, write_csv, Corpus,
    LabeledExample, MboxSkip,
};
use spamlab::eval::{compare, confusion, reference_mlp_row, ComparisonRow, ComparisonTable, ConfusionMatrix};
use spamlab::manifest::SplitManifest;
use spamlab::modelio::{load_model, save_model, ModelIoError};
use spamlab::pipeline::{Classifier, FeaturePipeline, ModelKind, TrainedModel};
use spamlab::preprocess::{LemmaRules, Preprocessor, StopwordList};
use spamlab::synth::{generate as synth_generate, SynthConfig};
use spamlab::Label;

use crate::config::{parse_models, DatasetFormat, PipelineConfig};
use crate::error::{CliError, CliResult};
use crate::{EvaluateArgs, TrainArgs};

/// Kind, serialized model and final MLP epoch loss.
type Fitted = (ModelKind, Vec<u8>, Option<f64>);

pub const MANIFEST_FILE: &str = "split.manifest";
pub const REPORT_FILE: &str = "report.txt";

fn model_file_name(kind: ModelKind) -> String {
    format!("{}.model", kind.as_str())
}

fn warn_skipped(source: &Path, skipped: &[MboxSkip]) {
    for s in skipped {
        eprintln!("warning: {} message {}: skipped ({})", source.display(), s.index, s.error);
    }
}

fn print_counts(examples: &[LabeledExample]) {
    let spam = examples.iter().filter(|e| e.label == Label::Spam).count();
    println!("spam\t{spam}");
    println!("ham\t{}", examples.len() - spam);
    println!("total\t{}", examples.len());
}

/// Load a dataset in any supported format. An mbox dataset is a directory
/// holding `spam.mbox` and `ham.mbox`.
pub fn load_dataset(path: &Path, format: DatasetFormat) -> CliResult<Corpus> {
    let stage = "load";
    match format {
        DatasetFormat::Csv => load_csv(path).map_err(|e| CliError::data(stage, e)),
        DatasetFormat::EmlDir => load_eml_dir(path).map_err(|e| CliError::data(stage, e)),
        DatasetFormat::Mbox => {
            let mut examples = Vec::new();
            for label in Label::ALL {
                let file = path.join(format!("{}.mbox", label.as_str()));
                let (ex, skipped) = load_mbox_file(&file, label).map_err(|e| CliError::data(stage, e))?;
                warn_skipped(&file, &skipped);
                examples.extend(ex);
            }
            Ok(Corpus::new(examples))
        }
    }
}

fn write_dataset(path: &Path, examples: &[LabeledExample]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::io("write", dir, e))?;
    }
    let file = fs::File::create(path).map_err(|e| CliError::io("write", path, e))?;
    write_csv(std::io::BufWriter::new(file), examples)
        .map_err(|e| CliError::data("write", format!("{}: {e}", path.display())))
}

pub fn ingest(source: &Path, format: DatasetFormat, label: Option<Label>, output: &Path) -> CliResult<()> {
    let examples = match (format, label) {
        (DatasetFormat::Mbox, Some(label)) => {
            let (ex, skipped) =
                load_mbox_file(source, label).map_err(|e| CliError::data("ingest", e))?;
            warn_skipped(source, &skipped);
            ex
        }
        (DatasetFormat::Mbox, None) if source.is_file() => {
            return Err(CliError::Usage("a single mbox file needs --label spam|ham".into()));
        }
        (_, Some(_)) => {
            return Err(CliError::Usage("--label only applies to a single mbox file".into()));
        }
        _ => load_dataset(source, format)?.into_examples(),
    };
    write_dataset(output, &examples)?;
    print_counts(&examples);
    Ok(())
}

pub fn generate(output: &Path, per_class: usize, signal: f64, seed: u64) -> CliResult<()> {
    let config = SynthConfig {
        per_class,
        signal,
        seed,
    };
    let corpus = synth_generate(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    write_dataset(output, corpus.examples())?;
    print_counts(corpus.examples());
    Ok(())
}

/// Config file (if any) with command-line overrides applied.
pub fn train_config(args: &TrainArgs) -> CliResult<PipelineConfig> {
    let mut c = match &args.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    if let Some(d) = &args.dataset {
        c.dataset = Some(d.clone());
    }
    if let Some(f) = args.format {
        c.format = f;
    }
    if !args.models.is_empty() {
        c.models = parse_models(&args.models)?;
    }
    if let Some(s) = args.seed {
        c.split.seed = s;
        c.settings.mlp.seed = s;
    }
    if let Some(f) = args.fraction {
        c.split.train_fraction = f;
    }
    if let Some(m) = args.min_df {
        c.features.min_df = m;
    }
    if let Some(m) = args.max_vocab {
        c.features.max_size = (m > 0).then_some(m);
    }
    if let Some(r) = &args.representation {
        c.features.representation = r.parse().map_err(CliError::Usage)?;
    }
    if let Some(s) = &args.stopwords {
        c.stopwords = Some(s.clone());
    }
    if let Some(o) = &args.output_dir {
        c.output_dir = o.clone();
    }
    Ok(c)
}

fn preprocessor(c: &PipelineConfig) -> CliResult<Preprocessor> {
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| CliError::io("preprocess", p, e));
    let stopwords = match &c.stopwords {
        Some(p) => StopwordList::parse(&read(p)?)
            .map_err(|e| CliError::data("preprocess", format!("{}: {e}", p.display())))?,
        None => StopwordList::default(),
    };
    let rules = match &c.lemma_rules {
        Some(p) => LemmaRules::parse(&read(p)?)
            .map_err(|e| CliError::data("preprocess", format!("{}: {e}", p.display())))?,
        None => LemmaRules::default(),
    };
    Ok(Preprocessor::new(c.preprocess, stopwords, rules))
}

pub fn train(c: &PipelineConfig) -> CliResult<()> {
    let dataset_path = c
        .dataset
        .as_deref()
        .ok_or_else(|| CliError::Usage("no dataset given (--dataset or [dataset] path)".into()))?;
    let pre = preprocessor(c)?;
    let dataset = load_dataset(dataset_path, c.format)?;
    println!(
        "dataset\t{} examples (spam {}, ham {})",
        dataset.len(),
        dataset.count(Label::Spam),
        dataset.count(Label::Ham)
    );

    if dataset.is_empty() {
        return Err(CliError::data("split", "EmptyData: the dataset has no examples"));
    }
    let split = stratified_split(&dataset, &c.split).map_err(|e| CliError::data("split", e))?;
    println!(
        "split\ttrain {} (spam {}, ham {}), test {} (spam {}, ham {})",
        split.train.len(),
        split.train.count(Label::Spam),
        split.train.count(Label::Ham),
        split.test.len(),
        split.test.count(Label::Spam),
        split.test.count(Label::Ham)
    );
    let manifest = SplitManifest::from_split(&dataset, &c.split, &split);
    let manifest_text = manifest.render().map_err(|e| CliError::data("split", e))?;

    let (pipeline, vectors) =
        FeaturePipeline::fit(&split.train, pre, &c.features).map_err(|e| CliError::data("features", e))?;
    println!("vocabulary\t{} terms", pipeline.vocabulary().len());

    // Models share only immutable inputs, so they fit in parallel.
    let fitted: Vec<CliResult<Fitted>> = std::thread::scope(|scope| {
        let handles: Vec<_> = c
            .models
            .iter()
            .map(|&kind| {
                let pipeline = pipeline.clone();
                let vectors = &vectors;
                scope.spawn(move || {
                    let (model, summary) = TrainedModel::fit(kind, pipeline, vectors, &c.settings)
                        .map_err(|e| CliError::data("fit", format!("{kind}: {e}")))?;
                    let bytes = save_model(&model).map_err(|e| CliError::Internal(e.to_string()))?;
                    let last_loss = summary.mlp.and_then(|r| r.epoch_losses.last().copied());
                    Ok((kind, bytes, last_loss))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(CliError::Internal("training thread panicked".into()))))
            .collect()
    });

    let out = &c.output_dir;
    fs::create_dir_all(out).map_err(|e| CliError::io("write", out, e))?;
    for result in fitted {
        let (kind, bytes, last_loss) = result?;
        let path = out.join(model_file_name(kind));
        fs::write(&path, &bytes).map_err(|e| CliError::io("write", &path, e))?;
        match last_loss {
            Some(l) => println!("{kind}\t{} ({} bytes, final epoch loss {l:.6})", path.display(), bytes.len()),
            None => println!("{kind}\t{} ({} bytes)", path.display(), bytes.len()),
        }
    }
    let manifest_path = out.join(MANIFEST_FILE);
    fs::write(&manifest_path, manifest_text).map_err(|e| CliError::io("write", &manifest_path, e))?;
    println!("manifest\t{}", manifest_path.display());
    Ok(())
}

fn read_model(path: &Path) -> CliResult<TrainedModel> {
    let bytes = fs::read(path).map_err(|e| CliError::io("load-model", path, e))?;
    load_model(&bytes).map_err(|e| match e {
        ModelIoError::VersionMismatch { .. } | ModelIoError::CorruptPayload(_) | ModelIoError::Unsupported(_) => {
            CliError::data("load-model", format!("{}: {e}", path.display()))
        }
        other => CliError::Internal(format!("{}: {other}", path.display())),
    })
}

/// Files as given; directories expand to their `*.model` files in name order.
fn expand_model_paths(paths: &[PathBuf]) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| CliError::io("load-model", p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.is_file() && f.extension().is_some_and(|x| x == "model"))
                .collect();
            found.sort();
            if found.is_empty() {
                return Err(CliError::Usage(format!("{}: no .model files", p.display())));
            }
            out.extend(found);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn render_confusion(name: &str, cm: &ConfusionMatrix) -> String {
    format!(
        "{name}: confusion matrix (positive = {})\n\
         {:>12}{:>12}{:>12}\n\
         {:>12}{:>12}{:>12}\n\
         {:>12}{:>12}{:>12}\n",
        cm.positive_label,
        "",
        "pred spam",
        "pred ham",
        "true spam",
        cm.tp,
        cm.fn_,
        "true ham",
        cm.fp,
        cm.tn,
    )
}

pub fn evaluate(args: &EvaluateArgs) -> CliResult<()> {
    let config = args.config.as_deref().map(PipelineConfig::load).transpose()?;
    let dataset_path = args
        .dataset
        .clone()
        .or_else(|| config.as_ref().and_then(|c| c.dataset.clone()))
        .ok_or_else(|| CliError::Usage("no dataset given (--dataset or --config)".into()))?;
    let format = args
        .format
        .or(config.as_ref().map(|c| c.format))
        .unwrap_or(DatasetFormat::Csv);
    let model_args = if args.models.is_empty() {
        match &config {
            Some(c) => vec![c.output_dir.clone()],
            None => return Err(CliError::Usage("no model files given".into())),
        }
    } else {
        args.models.clone()
    };
    let manifest_path = args
        .manifest
        .clone()
        .or_else(|| config.as_ref().map(|c| c.output_dir.join(MANIFEST_FILE)))
        .ok_or_else(|| CliError::Usage("no manifest given (--manifest or --config)".into()))?;

    let model_paths = expand_model_paths(&model_args)?;
    let models = model_paths
        .iter()
        .map(|p| read_model(p))
        .collect::<CliResult<Vec<_>>>()?;

    let dataset = load_dataset(&dataset_path, format)?;
    let manifest_text =
        fs::read_to_string(&manifest_path).map_err(|e| CliError::io("manifest", &manifest_path, e))?;
    let manifest = SplitManifest::parse(&manifest_text)
        .map_err(|e| CliError::data("manifest", format!("{}: {e}", manifest_path.display())))?;
    let split = manifest
        .resolve(&dataset)
        .map_err(|e| CliError::data("manifest", format!("ManifestMismatch: {e}")))?;
    let test = split.test.examples();
    let truths: Vec<Label> = test.iter().map(|e| e.label).collect();

    let mut rows = Vec::new();
    for (path, model) in model_paths.iter().zip(&models) {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| model.kind().to_string());
        let predictions = test
            .iter()
            .map(|e| model.classify(&e.text).map(|p| p.label))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::data("classify", format!("{}: {e}", path.display())))?;
        let cm = confusion(&predictions, &truths, Label::Spam).map_err(|e| CliError::Internal(e.to_string()))?;
        print!("{}", render_confusion(&name, &cm));
        println!();
        rows.push(ComparisonRow::measured(name, cm).map_err(|e| CliError::data("evaluate", e))?);
    }
    let table = compare(rows).map_err(|e| CliError::Usage(e.to_string()))?;
    print!("{}", table.render_text());

    let report_path = args.report.clone().unwrap_or_else(|| {
        manifest_path
            .parent()
            .unwrap_or(Path::new(""))
            .join(REPORT_FILE)
    });
    fs::write(&report_path, table.render_machine()).map_err(|e| CliError::io("write", &report_path, e))?;
    println!("report\t{}", report_path.display());
    Ok(())
}

pub fn classify(model_file: &Path, input: Option<&Path>, eml: bool) -> CliResult<()> {
    let model = read_model(model_file)?;
    let bytes = match input.filter(|p| *p != Path::new("-")) {
        Some(p) => fs::read(p).map_err(|e| CliError::io("input", p, e))?,
        None => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| CliError::io("input", Path::new("<stdin>"), e))?;
            buf
        }
    };
    let text = if eml {
        let email = parse_eml(&bytes).map_err(|e| CliError::data("input", e))?;
        to_example(&email, Label::Ham).text
    } else {
        String::from_utf8(bytes).map_err(|e| CliError::data("input", format!("input is not UTF-8: {e}")))?
    };
    if model.pipeline.vectorize(&text).is_empty() {
        eprintln!("warning: input has no in-vocabulary terms; the prediction reflects the model's default");
    }
    let prediction = model
        .classify(&text)
        .map_err(|e| CliError::data("classify", e))?;
    println!("{}\t{}", prediction.label, prediction.score);
    Ok(())
}

pub fn report(report: Option<&Path>, with_reference: bool, tree: Option<&Path>) -> CliResult<()> {
    if report.is_none() && tree.is_none() {
        return Err(CliError::Usage("give a report file, --tree MODEL, or both".into()));
    }
    let mut out = std::io::stdout().lock();
    if let Some(p) = report {
        let text = fs::read_to_string(p).map_err(|e| CliError::io("report", p, e))?;
        let table = ComparisonTable::parse_machine(&text)
            .map_err(|e| CliError::data("report", format!("{}: {e}", p.display())))?;
        let table = if with_reference {
            let mut rows = table.rows().to_vec();
            rows.push(reference_mlp_row());
            compare(rows).map_err(|e| CliError::data("report", e))?
        } else {
            table
        };
        let _ = write!(out, "{}", table.render_text());
    }
    if let Some(p) = tree {
        let model = read_model(p)?;
        let Classifier::C45(t) = &model.classifier else {
            return Err(CliError::Usage(format!(
                "{}: --tree needs a c45 model, found {}",
                p.display(),
                model.kind()
            )));
        };
        if report.is_some() {
            let _ = writeln!(out);
        }
        let _ = write!(out, "{}", t.render(Some(model.pipeline.vocabulary())));
    }
    Ok(())
}
