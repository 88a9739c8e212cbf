//! Text-to-prediction plumbing shared by training, evaluation and
//! classification: a preprocessor plus a vocabulary frozen on the train
//! side, and one of the three classifiers on top.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::c45::{C45Config, C45Tree, TreeError};
use crate::corpus::{Corpus, CorpusRole};
use crate::features::{vectorize, FeatureError, FeatureVector, LabeledVector, Representation, Vocabulary};
use crate::label::Label;
use crate::mlp::{Activation, MlpConfig, MlpError, MlpModel, TrainReport};
use crate::nb::{NbError, NbModel};
use crate::preprocess::Preprocessor;

#[derive(Debug, Error, PartialEq)]
pub enum PipelineError {
    #[error("vocabulary must be built from a training corpus, not a test split")]
    TestSideVocabulary,
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("naive Bayes: {0}")]
    Nb(#[from] NbError),
    #[error("C4.5: {0}")]
    Tree(#[from] TreeError),
    #[error("MLP: {0}")]
    Mlp(#[from] MlpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureSettings {
    pub min_df: u32,
    pub max_size: Option<usize>,
    pub representation: Representation,
}

impl Default for FeatureSettings {
    fn default() -> Self {
        Self {
            min_df: 2,
            max_size: Some(10_000),
            representation: Representation::Count,
        }
    }
}

/// Preprocessor, vocabulary and representation: everything needed to turn
/// raw text into the vectors a model was trained on.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturePipeline {
    pub(crate) preprocessor: Preprocessor,
    pub(crate) vocabulary: Vocabulary,
    pub(crate) representation: Representation,
}

impl FeaturePipeline {
    /// Build the vocabulary from `train` and return the pipeline along with
    /// the train side's vectors (in corpus order).
    pub fn fit(
        train: &Corpus,
        preprocessor: Preprocessor,
        settings: &FeatureSettings,
    ) -> Result<(Self, Vec<LabeledVector>), PipelineError> {
        if train.role() == CorpusRole::Test {
            return Err(PipelineError::TestSideVocabulary);
        }
        let docs: Vec<Vec<String>> = train.examples().iter().map(|e| preprocessor.terms(&e.text)).collect();
        let vocabulary = Vocabulary::build(&docs, settings.min_df, settings.max_size)?;
        let vectors = docs
            .iter()
            .zip(train.examples())
            .map(|(terms, e)| LabeledVector {
                vector: vectorize(terms, &vocabulary, settings.representation),
                label: e.label,
            })
            .collect();
        Ok((
            Self {
                preprocessor,
                vocabulary,
                representation: settings.representation,
            },
            vectors,
        ))
    }

    pub fn from_parts(preprocessor: Preprocessor, vocabulary: Vocabulary, representation: Representation) -> Self {
        Self {
            preprocessor,
            vocabulary,
            representation,
        }
    }

    pub fn preprocessor(&self) -> &Preprocessor {
        &self.preprocessor
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn vectorize(&self, text: &str) -> FeatureVector {
        vectorize(&self.preprocessor.terms(text), &self.vocabulary, self.representation)
    }

    pub fn vectorize_corpus(&self, corpus: &Corpus) -> Vec<LabeledVector> {
        corpus
            .examples()
            .iter()
            .map(|e| LabeledVector {
                vector: self.vectorize(&e.text),
                label: e.label,
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Nb,
    C45,
    Mlp,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Nb, ModelKind::C45, ModelKind::Mlp];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Nb => "nb",
            ModelKind::C45 => "c45",
            ModelKind::Mlp => "mlp",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nb" => Ok(ModelKind::Nb),
            "c45" => Ok(ModelKind::C45),
            "mlp" => Ok(ModelKind::Mlp),
            other => Err(format!("unknown model {other:?} (nb|c45|mlp)")),
        }
    }
}

/// MLP hyperparameters apart from the input width, which comes from the
/// vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpSettings {
    pub hidden_dims: Vec<usize>,
    pub activation: Activation,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpSettings {
    fn default() -> Self {
        let c = MlpConfig::new(1);
        Self {
            hidden_dims: c.hidden_dims,
            activation: c.hidden_activation,
            learning_rate: c.learning_rate,
            epochs: c.epochs,
            batch_size: c.batch_size,
            seed: c.seed,
        }
    }
}

impl MlpSettings {
    pub fn config(&self, input_dim: usize) -> MlpConfig {
        MlpConfig {
            input_dim,
            hidden_dims: self.hidden_dims.clone(),
            hidden_activation: self.activation,
            learning_rate: self.learning_rate,
            epochs: self.epochs,
            batch_size: self.batch_size,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelSettings {
    pub nb_alpha: f64,
    pub c45: C45Config,
    pub mlp: MlpSettings,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            nb_alpha: 1.0,
            c45: C45Config::default(),
            mlp: MlpSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Classifier {
    Nb(NbModel),
    C45(C45Tree),
    Mlp(MlpModel),
}

impl Classifier {
    pub fn kind(&self) -> ModelKind {
        match self {
            Classifier::Nb(_) => ModelKind::Nb,
            Classifier::C45(_) => ModelKind::C45,
            Classifier::Mlp(_) => ModelKind::Mlp,
        }
    }
}

/// What a model reports alongside its label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Score {
    /// Naive Bayes posterior P(spam | x).
    Posterior(f64),
    /// Training examples of each class at the C4.5 leaf.
    LeafCounts { spam: usize, ham: usize },
    /// MLP output, read as P(spam | x).
    Probability(f64),
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Posterior(p) => write!(f, "posterior(spam)={p:.6}"),
            Score::LeafCounts { spam, ham } => write!(f, "leaf spam={spam} ham={ham}"),
            Score::Probability(p) => write!(f, "p(spam)={p:.6}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    pub score: Score,
}

/// A classifier bundled with the exact pipeline it was trained through.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub pipeline: FeaturePipeline,
    pub classifier: Classifier,
}

/// Extra output from fitting; only the MLP has any.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FitSummary {
    pub mlp: Option<TrainReport>,
}

impl TrainedModel {
    /// Fit one classifier on vectors produced by `pipeline`.
    pub fn fit(
        kind: ModelKind,
        pipeline: FeaturePipeline,
        train: &[LabeledVector],
        settings: &ModelSettings,
    ) -> Result<(Self, FitSummary), PipelineError> {
        let v = pipeline.vocabulary.len();
        let mut summary = FitSummary::default();
        let classifier = match kind {
            ModelKind::Nb => Classifier::Nb(NbModel::fit(train, v, settings.nb_alpha)?),
            ModelKind::C45 => Classifier::C45(C45Tree::build(train, settings.c45)?),
            ModelKind::Mlp => {
                let (m, report) = MlpModel::train(train, settings.mlp.config(v))?;
                summary.mlp = Some(report);
                Classifier::Mlp(m)
            }
        };
        Ok((Self { pipeline, classifier }, summary))
    }

    pub fn kind(&self) -> ModelKind {
        self.classifier.kind()
    }

    pub fn predict_vector(&self, vector: &FeatureVector) -> Result<Prediction, PipelineError> {
        Ok(match &self.classifier {
            Classifier::Nb(m) => {
                let post = m.posterior(vector)?;
                let spam = m.class_order().iter().position(|&l| l == Label::Spam);
                Prediction {
                    label: m.predict(vector)?,
                    score: Score::Posterior(spam.map_or(0.0, |i| post[i])),
                }
            }
            Classifier::C45(t) => {
                let c = t.leaf_counts(vector);
                Prediction {
                    label: t.predict(vector),
                    score: Score::LeafCounts {
                        spam: c.0[Label::Spam.index()],
                        ham: c.0[Label::Ham.index()],
                    },
                }
            }
            Classifier::Mlp(m) => {
                let p = m.forward_sparse(vector)?;
                Prediction {
                    label: if p >= 0.5 { Label::Spam } else { Label::Ham },
                    score: Score::Probability(p),
                }
            }
        })
    }

    pub fn classify(&self, text: &str) -> Result<Prediction, PipelineError> {
        self.predict_vector(&self.pipeline.vectorize(text))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{stratified_split, LabeledExample, SplitSpec};

    fn corpus() -> Corpus {
        let spam = ["win free money now", "free prize claim now", "cheap pills win money", "claim your free prize"];
        let ham = ["meeting agenda for monday", "lunch on monday with team", "project agenda review", "team meeting notes"];
        let mut ex = Vec::new();
        for (i, t) in spam.iter().enumerate() {
            ex.push(LabeledExample { id: format!("s{i}"), text: t.to_string(), label: Label::Spam });
        }
        for (i, t) in ham.iter().enumerate() {
            ex.push(LabeledExample { id: format!("h{i}"), text: t.to_string(), label: Label::Ham });
        }
        Corpus::new(ex)
    }

    #[test]
    fn test_side_cannot_build_vocabulary() {
        let split = stratified_split(&corpus(), &SplitSpec { train_fraction: 0.5, ..SplitSpec::default() }).unwrap();
        let err = FeaturePipeline::fit(&split.test, Preprocessor::default(), &FeatureSettings::default());
        assert_eq!(err.unwrap_err(), PipelineError::TestSideVocabulary);
        assert!(FeaturePipeline::fit(&split.train, Preprocessor::default(), &FeatureSettings::default()).is_ok());
    }

    #[test]
    fn every_kind_fits_and_classifies() {
        let (pipe, vectors) = FeaturePipeline::fit(&corpus(), Preprocessor::default(), &FeatureSettings::default()).unwrap();
        assert!(pipe.vocabulary().index_of("free").is_some());
        let settings = ModelSettings {
            mlp: MlpSettings { hidden_dims: vec![4], epochs: 200, learning_rate: 0.5, batch_size: 2, ..MlpSettings::default() },
            ..ModelSettings::default()
        };
        for kind in ModelKind::ALL {
            let (m, summary) = TrainedModel::fit(kind, pipe.clone(), &vectors, &settings).unwrap();
            assert_eq!(m.kind(), kind);
            assert_eq!(summary.mlp.is_some(), kind == ModelKind::Mlp);
            assert_eq!(m.classify("free money prize").unwrap().label, Label::Spam, "{kind}");
            assert_eq!(m.classify("monday team agenda").unwrap().label, Label::Ham, "{kind}");
        }
    }

    #[test]
    fn empty_text_gets_prior_prediction() {
        let (pipe, vectors) = FeaturePipeline::fit(&corpus(), Preprocessor::default(), &FeatureSettings::default()).unwrap();
        let (m, _) = TrainedModel::fit(ModelKind::Nb, pipe, &vectors, &ModelSettings::default()).unwrap();
        let p = m.classify("").unwrap();
        // Balanced priors tie; the first class in order wins.
        assert_eq!(p.label, Label::Spam);
        assert_eq!(p.score, Score::Posterior(0.5));
    }

    #[test]
    fn kind_parses() {
        assert_eq!("C45".parse::<ModelKind>().unwrap(), ModelKind::C45);
        assert!("svm".parse::<ModelKind>().is_err());
    }
}
