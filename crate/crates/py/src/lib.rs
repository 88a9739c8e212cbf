//! Python bindings: preprocessing, EML parsing, corpus generation and
//! splitting, model training/classification/persistence, and metrics.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use spamlab::c45::C45Config;
use spamlab::corpus::{self, Corpus, LabeledExample, SplitSpec};
use spamlab::eval;
use spamlab::features::Representation;
use spamlab::mlp::Activation;
use spamlab::modelio;
use spamlab::pipeline::{
    Classifier, FeaturePipeline, FeatureSettings, MlpSettings, ModelKind, ModelSettings, Score, TrainedModel,
};
use spamlab::preprocess::{PreprocessConfig, Preprocessor as CorePreprocessor, StopwordList};
use spamlab::synth::{self, SynthConfig};
use spamlab::Label;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_label(s: &str) -> PyResult<Label> {
    s.parse::<Label>().map_err(value_err)
}

fn corpus_from(texts: Vec<String>, labels: &[String]) -> PyResult<Corpus> {
    if texts.len() != labels.len() {
        return Err(PyValueError::new_err(format!(
            "{} texts but {} labels",
            texts.len(),
            labels.len()
        )));
    }
    let examples = texts
        .into_iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (text, l))| {
            Ok(LabeledExample {
                id: i.to_string(),
                text,
                label: parse_label(l)?,
            })
        })
        .collect::<PyResult<Vec<_>>>()?;
    Ok(Corpus::new(examples))
}

/// Text to terms with configurable filtering.
#[pyclass(name = "Preprocessor", module = "spamlab_py", frozen)]
struct PyPreprocessor {
    inner: CorePreprocessor,
}

#[pymethods]
impl PyPreprocessor {
    #[new]
    #[pyo3(signature = (lowercase=true, remove_stopwords=true, remove_numbers=true, remove_punct=true, use_lemmas=true, stopwords=None))]
    fn new(
        lowercase: bool,
        remove_stopwords: bool,
        remove_numbers: bool,
        remove_punct: bool,
        use_lemmas: bool,
        stopwords: Option<Vec<String>>,
    ) -> Self {
        let config = PreprocessConfig {
            lowercase,
            remove_stopwords,
            remove_numbers,
            remove_punct,
            use_lemmas,
        };
        let list = stopwords.map(StopwordList::from_words).unwrap_or_default();
        Self {
            inner: CorePreprocessor::new(config, list, Default::default()),
        }
    }

    fn terms(&self, text: &str) -> Vec<String> {
        self.inner.terms(text)
    }

    /// `(surface, lemma, is_stop, is_numeric, is_punct)` per token.
    fn analyze(&self, text: &str) -> Vec<(String, String, bool, bool, bool)> {
        self.inner
            .analyze(text)
            .tokens
            .into_iter()
            .map(|t| (t.surface, t.lemma, t.is_stop, t.is_numeric, t.is_punct))
            .collect()
    }
}

/// A trained classifier together with its preprocessing and vocabulary.
#[pyclass(name = "Model", module = "spamlab_py", frozen)]
struct PyModel {
    inner: TrainedModel,
}

#[pymethods]
impl PyModel {
    /// Fit one model (`"nb"`, `"c45"` or `"mlp"`) on every given example.
    #[staticmethod]
    #[pyo3(signature = (kind, texts, labels, *, min_df=2, max_size=Some(10000), representation="count", alpha=1.0, hidden=vec![64], activation="sigmoid", learning_rate=0.05, epochs=30, batch_size=32, seed=42, prune=true))]
    #[allow(clippy::too_many_arguments)]
    fn train(
        py: Python<'_>,
        kind: &str,
        texts: Vec<String>,
        labels: Vec<String>,
        min_df: u32,
        max_size: Option<usize>,
        representation: &str,
        alpha: f64,
        hidden: Vec<usize>,
        activation: &str,
        learning_rate: f64,
        epochs: usize,
        batch_size: usize,
        seed: u64,
        prune: bool,
    ) -> PyResult<Self> {
        let kind: ModelKind = kind.parse().map_err(value_err)?;
        let corpus = corpus_from(texts, &labels)?;
        let features = FeatureSettings {
            min_df,
            max_size,
            representation: representation.parse::<Representation>().map_err(value_err)?,
        };
        let settings = ModelSettings {
            nb_alpha: alpha,
            c45: C45Config {
                prune,
                ..C45Config::default()
            },
            mlp: MlpSettings {
                hidden_dims: hidden,
                activation: activation.parse::<Activation>().map_err(value_err)?,
                learning_rate,
                epochs,
                batch_size,
                seed,
            },
        };
        py.detach(|| {
            let (pipeline, vectors) =
                FeaturePipeline::fit(&corpus, CorePreprocessor::default(), &features).map_err(value_err)?;
            let (inner, _) = TrainedModel::fit(kind, pipeline, &vectors, &settings).map_err(value_err)?;
            Ok(Self { inner })
        })
    }

    #[staticmethod]
    fn load(data: &[u8]) -> PyResult<Self> {
        modelio::load_model(data).map(|inner| Self { inner }).map_err(value_err)
    }

    #[staticmethod]
    fn load_file(path: std::path::PathBuf) -> PyResult<Self> {
        let bytes = std::fs::read(&path).map_err(|e| PyIOError::new_err(format!("{}: {e}", path.display())))?;
        Self::load(&bytes)
    }

    fn save<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyBytes>> {
        let bytes = modelio::save_model(&self.inner).map_err(value_err)?;
        Ok(PyBytes::new(py, &bytes))
    }

    fn save_file(&self, path: std::path::PathBuf) -> PyResult<()> {
        modelio::write_model_file(&path, &self.inner).map_err(|e| PyIOError::new_err(e.to_string()))
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    fn vocabulary(&self) -> Vec<String> {
        self.inner.pipeline.vocabulary().terms().to_vec()
    }

    /// `(label, score)`; the score dict holds `posterior`, `probability`, or
    /// the leaf's `spam`/`ham` counts.
    fn classify<'py>(&self, py: Python<'py>, text: &str) -> PyResult<(&'static str, Bound<'py, PyDict>)> {
        let p = self.inner.classify(text).map_err(value_err)?;
        let score = PyDict::new(py);
        match p.score {
            Score::Posterior(v) => score.set_item("posterior", v)?,
            Score::Probability(v) => score.set_item("probability", v)?,
            Score::LeafCounts { spam, ham } => {
                score.set_item("spam", spam)?;
                score.set_item("ham", ham)?;
            }
        }
        Ok((p.label.as_str(), score))
    }

    fn predict(&self, texts: Vec<String>) -> PyResult<Vec<&'static str>> {
        texts
            .iter()
            .map(|t| self.inner.classify(t).map(|p| p.label.as_str()).map_err(value_err))
            .collect()
    }

    /// Indented listing of a C4.5 tree.
    fn render_tree(&self) -> PyResult<String> {
        match &self.inner.classifier {
            Classifier::C45(t) => Ok(t.render(Some(self.inner.pipeline.vocabulary()))),
            _ => Err(PyValueError::new_err(format!("{} model has no tree", self.kind()))),
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(kind={:?}, vocabulary={} terms)",
            self.kind(),
            self.inner.pipeline.vocabulary().len()
        )
    }
}

/// `(subject, body)` of an RFC 5322 message.
#[pyfunction]
fn parse_eml(data: &[u8]) -> PyResult<(String, String)> {
    let email = corpus::parse_eml(data).map_err(value_err)?;
    Ok((email.subject, email.body))
}

/// `(label, text)` rows of a CSV dataset.
#[pyfunction]
fn load_csv(path: std::path::PathBuf) -> PyResult<Vec<(&'static str, String)>> {
    let c = corpus::load_csv(&path).map_err(value_err)?;
    Ok(c.into_examples().into_iter().map(|e| (e.label.as_str(), e.text)).collect())
}

/// `(label, text)` rows of a synthetic corpus, alternating spam and ham.
#[pyfunction]
#[pyo3(signature = (per_class=750, signal=0.4, seed=42))]
fn generate_corpus(per_class: usize, signal: f64, seed: u64) -> PyResult<Vec<(&'static str, String)>> {
    let c = synth::generate(&SynthConfig {
        per_class,
        signal,
        seed,
    })
    .map_err(value_err)?;
    Ok(c.into_examples().into_iter().map(|e| (e.label.as_str(), e.text)).collect())
}

/// Train and test indices of a stratified split of `labels`.
#[pyfunction]
#[pyo3(signature = (labels, train_fraction=0.75, seed=42, stratified=true))]
fn split_indices(labels: Vec<String>, train_fraction: f64, seed: u64, stratified: bool) -> PyResult<(Vec<usize>, Vec<usize>)> {
    let texts = vec![String::new(); labels.len()];
    let c = corpus_from(texts, &labels)?;
    let spec = SplitSpec {
        train_fraction,
        seed,
        stratified,
    };
    let split = corpus::stratified_split(&c, &spec).map_err(value_err)?;
    let ids = |c: &Corpus| c.examples().iter().map(|e| e.id.parse().expect("numeric id")).collect();
    Ok((ids(&split.train), ids(&split.test)))
}

/// Confusion counts and metrics with `positive` as the positive class.
#[pyfunction]
#[pyo3(signature = (predictions, truths, positive="spam"))]
fn metrics<'py>(
    py: Python<'py>,
    predictions: Vec<String>,
    truths: Vec<String>,
    positive: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let p = predictions.iter().map(|s| parse_label(s)).collect::<PyResult<Vec<_>>>()?;
    let t = truths.iter().map(|s| parse_label(s)).collect::<PyResult<Vec<_>>>()?;
    let cm = eval::confusion(&p, &t, parse_label(positive)?).map_err(value_err)?;
    let m = eval::metrics(&cm).map_err(value_err)?;
    let d = PyDict::new(py);
    d.set_item("tp", cm.tp)?;
    d.set_item("fp", cm.fp)?;
    d.set_item("tn", cm.tn)?;
    d.set_item("fn", cm.fn_)?;
    d.set_item("accuracy", m.accuracy)?;
    d.set_item("precision", m.precision)?;
    d.set_item("recall", m.recall)?;
    d.set_item("f1", m.f1)?;
    let z = m.zero_division;
    let flagged: Vec<&str> = [("precision", z.precision), ("recall", z.recall), ("f1", z.f1)]
        .into_iter()
        .filter_map(|(n, f)| f.then_some(n))
        .collect();
    d.set_item("zero_division", flagged)?;
    Ok(d)
}

#[pymodule]
fn spamlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPreprocessor>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(parse_eml, m)?)?;
    m.add_function(wrap_pyfunction!(load_csv, m)?)?;
    m.add_function(wrap_pyfunction!(generate_corpus, m)?)?;
    m.add_function(wrap_pyfunction!(split_indices, m)?)?;
    m.add_function(wrap_pyfunction!(metrics, m)?)?;
    m.add("FORMAT_VERSION", modelio::FORMAT_VERSION)?;
    Ok(())
}
