//! Pipeline configuration: a TOML file with one section per stage.
//!
//! Every key is optional; missing keys take the library defaults. Relative
//! paths are resolved against the directory holding the config file.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use spamlab::c45::C45Config;
use spamlab::corpus::SplitSpec;
use spamlab::features::Representation;
use spamlab::mlp::Activation;
use spamlab::pipeline::{FeatureSettings, MlpSettings, ModelKind, ModelSettings};
use spamlab::preprocess::PreprocessConfig;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DatasetFormat {
    /// `label,text` CSV.
    Csv,
    /// Directory with `spam/` and `ham/` subdirectories of `.eml` files.
    EmlDir,
    /// Directory holding `spam.mbox` and `ham.mbox`.
    Mbox,
}

impl DatasetFormat {
    fn parse(s: &str) -> CliResult<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "eml-dir" => Ok(Self::EmlDir),
            "mbox" => Ok(Self::Mbox),
            other => Err(CliError::Usage(format!(
                "unknown dataset format {other:?} (csv|eml-dir|mbox)"
            ))),
        }
    }
}

/// Everything `train` needs, after defaults and overrides are applied.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub dataset: Option<PathBuf>,
    pub format: DatasetFormat,
    pub preprocess: PreprocessConfig,
    pub stopwords: Option<PathBuf>,
    pub lemma_rules: Option<PathBuf>,
    pub features: FeatureSettings,
    pub split: SplitSpec,
    pub models: Vec<ModelKind>,
    pub settings: ModelSettings,
    pub output_dir: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            format: DatasetFormat::Csv,
            preprocess: PreprocessConfig::default(),
            stopwords: None,
            lemma_rules: None,
            features: FeatureSettings::default(),
            split: SplitSpec::default(),
            models: ModelKind::ALL.to_vec(),
            settings: ModelSettings::default(),
            output_dir: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawConfig {
    dataset: RawDataset,
    preprocess: RawPreprocess,
    features: RawFeatures,
    split: RawSplit,
    models: RawModels,
    nb: RawNb,
    c45: RawC45,
    mlp: RawMlp,
    output: RawOutput,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawDataset {
    path: Option<PathBuf>,
    format: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawPreprocess {
    lowercase: Option<bool>,
    remove_stopwords: Option<bool>,
    remove_numbers: Option<bool>,
    remove_punct: Option<bool>,
    use_lemmas: Option<bool>,
    stopwords: Option<PathBuf>,
    lemma_rules: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawFeatures {
    min_df: Option<u32>,
    /// 0 means unlimited.
    max_size: Option<usize>,
    representation: Option<String>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawSplit {
    fraction: Option<f64>,
    seed: Option<u64>,
    stratified: Option<bool>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawModels {
    select: Option<Vec<String>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawNb {
    alpha: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawC45 {
    min_samples_leaf: Option<usize>,
    /// 0 means unlimited.
    max_depth: Option<usize>,
    prune: Option<bool>,
    confidence: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawMlp {
    hidden: Option<Vec<usize>>,
    activation: Option<String>,
    learning_rate: Option<f64>,
    epochs: Option<usize>,
    batch_size: Option<usize>,
    seed: Option<u64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct RawOutput {
    dir: Option<PathBuf>,
}

pub fn parse_models(names: &[String]) -> CliResult<Vec<ModelKind>> {
    let mut kinds = Vec::new();
    for n in names {
        let k: ModelKind = n.parse().map_err(CliError::Usage)?;
        if !kinds.contains(&k) {
            kinds.push(k);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Usage("at least one model must be selected".into()));
    }
    Ok(kinds)
}

impl PipelineConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&text, base).map_err(|e| match e {
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Parse config text; relative paths are joined onto `base`.
    pub fn parse(text: &str, base: &Path) -> CliResult<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
        let mut c = Self::default();
        let rel = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

        c.dataset = raw.dataset.path.map(rel);
        if let Some(f) = raw.dataset.format {
            c.format = DatasetFormat::parse(&f)?;
        }

        let p = raw.preprocess;
        let pc = &mut c.preprocess;
        pc.lowercase = p.lowercase.unwrap_or(pc.lowercase);
        pc.remove_stopwords = p.remove_stopwords.unwrap_or(pc.remove_stopwords);
        pc.remove_numbers = p.remove_numbers.unwrap_or(pc.remove_numbers);
        pc.remove_punct = p.remove_punct.unwrap_or(pc.remove_punct);
        pc.use_lemmas = p.use_lemmas.unwrap_or(pc.use_lemmas);
        c.stopwords = p.stopwords.map(rel);
        c.lemma_rules = p.lemma_rules.map(rel);

        if let Some(v) = raw.features.min_df {
            c.features.min_df = v;
        }
        if let Some(v) = raw.features.max_size {
            c.features.max_size = (v > 0).then_some(v);
        }
        if let Some(r) = raw.features.representation {
            c.features.representation = r.parse::<Representation>().map_err(CliError::Usage)?;
        }

        c.split.train_fraction = raw.split.fraction.unwrap_or(c.split.train_fraction);
        c.split.seed = raw.split.seed.unwrap_or(c.split.seed);
        c.split.stratified = raw.split.stratified.unwrap_or(c.split.stratified);

        if let Some(names) = raw.models.select {
            c.models = parse_models(&names)?;
        }

        c.settings.nb_alpha = raw.nb.alpha.unwrap_or(c.settings.nb_alpha);
        let t: &mut C45Config = &mut c.settings.c45;
        t.min_samples_leaf = raw.c45.min_samples_leaf.unwrap_or(t.min_samples_leaf);
        if let Some(d) = raw.c45.max_depth {
            t.max_depth = (d > 0).then_some(d);
        }
        t.prune = raw.c45.prune.unwrap_or(t.prune);
        t.confidence = raw.c45.confidence.unwrap_or(t.confidence);

        let m: &mut MlpSettings = &mut c.settings.mlp;
        if let Some(h) = raw.mlp.hidden {
            m.hidden_dims = h;
        }
        if let Some(a) = raw.mlp.activation {
            m.activation = a.parse::<Activation>().map_err(|e| CliError::Usage(e.to_string()))?;
        }
        m.learning_rate = raw.mlp.learning_rate.unwrap_or(m.learning_rate);
        m.epochs = raw.mlp.epochs.unwrap_or(m.epochs);
        m.batch_size = raw.mlp.batch_size.unwrap_or(m.batch_size);
        m.seed = raw.mlp.seed.unwrap_or(m.seed);

        if let Some(d) = raw.output.dir {
            c.output_dir = rel(d);
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_default() {
        assert_eq!(PipelineConfig::parse("", Path::new("")).unwrap(), PipelineConfig::default());
    }

    #[test]
    fn sections_and_relative_paths() {
        let text = r#"
            [dataset]
            path = "data/x.csv"
            format = "eml-dir"
            [preprocess]
            use_lemmas = false
            [features]
            max_size = 0
            representation = "binary"
            [split]
            seed = 9
            [models]
            select = ["mlp", "nb", "mlp"]
            [c45]
            max_depth = 4
            [mlp]
            hidden = [16, 8]
            activation = "relu"
            [output]
            dir = "/abs/out"
        "#;
        let c = PipelineConfig::parse(text, Path::new("/cfg")).unwrap();
        assert_eq!(c.dataset.as_deref(), Some(Path::new("/cfg/data/x.csv")));
        assert_eq!(c.format, DatasetFormat::EmlDir);
        assert!(!c.preprocess.use_lemmas && c.preprocess.lowercase);
        assert_eq!(c.features.max_size, None);
        assert_eq!(c.features.representation, Representation::Binary);
        assert_eq!(c.split.seed, 9);
        assert_eq!(c.models, [ModelKind::Mlp, ModelKind::Nb]);
        assert_eq!(c.settings.c45.max_depth, Some(4));
        assert_eq!(c.settings.mlp.hidden_dims, [16, 8]);
        assert_eq!(c.settings.mlp.activation, Activation::Relu);
        assert_eq!(c.output_dir, Path::new("/abs/out"));
    }

    #[test]
    fn bad_configs_are_usage_errors() {
        for text in [
            "[dataset]\nformat = \"xml\"",
            "[models]\nselect = []",
            "[models]\nselect = [\"svm\"]",
            "[nb]\nbeta = 1.0",
            "[features]\nrepresentation = \"tfidf\"",
            "not toml at all",
        ] {
            let err = PipelineConfig::parse(text, Path::new("")).unwrap_err();
            assert!(matches!(err, CliError::Usage(_)), "{text}: {err}");
        }
    }
}
