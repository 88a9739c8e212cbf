//! Versioned binary model files.
//!
//! ```text
//! offset  size  field
//! 0       4     magic b"SPMK"
//! 4       4     format_version, u32 little-endian (currently 1)
//! 8       1     kind tag: 0 = nb, 1 = c45, 2 = mlp
//! 9       8     payload length P, u64 little-endian
//! 17      P     payload
//! 17+P    4     CRC-32 (IEEE) of bytes [0, 17+P), u32 little-endian
//! ```
//!
//! The payload is the feature pipeline followed by the classifier; the
//! exact field order is in `docs/formats.md`. Floats are stored as their
//! IEEE-754 bit patterns, so a loaded model predicts bit-identically.

use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::c45::{C45Config, C45Tree, ClassCounts, SplitCandidate, TreeNode};
use crate::features::{Representation, Vocabulary};
use crate::label::Label;
use crate::mlp::{Activation, MlpConfig, MlpModel};
use crate::nb::NbModel;
use crate::pipeline::{Classifier, FeaturePipeline, ModelKind, TrainedModel};
use crate::preprocess::{LemmaRules, PreprocessConfig, Preprocessor, StopwordList};

pub const MAGIC: [u8; 4] = *b"SPMK";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 17;
const TRAILER_LEN: usize = 4;
/// Deepest tree a file may hold; bounds recursion while decoding.
pub const MAX_TREE_DEPTH: usize = 2048;

#[derive(Debug, Error)]
pub enum ModelIoError {
    #[error("model file has format version {found}; this build reads version {supported}")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("corrupt model file: {0}")]
    CorruptPayload(String),
    #[error("model cannot be saved: {0}")]
    Unsupported(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn corrupt(msg: impl Into<String>) -> ModelIoError {
    ModelIoError::CorruptPayload(msg.into())
}

pub fn kind_tag(kind: ModelKind) -> u8 {
    match kind {
        ModelKind::Nb => 0,
        ModelKind::C45 => 1,
        ModelKind::Mlp => 2,
    }
}

fn kind_from_tag(tag: u8) -> Option<ModelKind> {
    ModelKind::ALL.into_iter().find(|&k| kind_tag(k) == tag)
}

pub fn save_model(model: &TrainedModel) -> Result<Vec<u8>, ModelIoError> {
    let mut w = Writer::default();
    write_pipeline(&mut w, &model.pipeline);
    match &model.classifier {
        Classifier::Nb(m) => write_nb(&mut w, m),
        Classifier::C45(t) => {
            if t.root().depth() > MAX_TREE_DEPTH {
                return Err(ModelIoError::Unsupported(format!(
                    "tree depth {} exceeds {MAX_TREE_DEPTH}",
                    t.root().depth()
                )));
            }
            write_c45(&mut w, t)
        }
        Classifier::Mlp(m) => write_mlp(&mut w, m),
    }
    let payload = w.buf;
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + TRAILER_LEN);
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.push(kind_tag(model.kind()));
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

/// Checks, in order: magic, version, length, checksum, kind tag, payload.
pub fn load_model(bytes: &[u8]) -> Result<TrainedModel, ModelIoError> {
    if bytes.len() < 8 || bytes[..4] != MAGIC {
        return Err(corrupt("missing SPMK magic"));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(ModelIoError::VersionMismatch {
            found: version,
            supported: FORMAT_VERSION,
        });
    }
    if bytes.len() < HEADER_LEN + TRAILER_LEN {
        return Err(corrupt("truncated header"));
    }
    let payload_len = u64::from_le_bytes(bytes[9..17].try_into().expect("8 bytes"));
    let expected = (HEADER_LEN as u64)
        .checked_add(payload_len)
        .and_then(|n| n.checked_add(TRAILER_LEN as u64));
    if expected != Some(bytes.len() as u64) {
        return Err(corrupt(format!(
            "file is {} bytes but header declares a {payload_len}-byte payload",
            bytes.len()
        )));
    }
    let body_end = bytes.len() - TRAILER_LEN;
    let stored = u32::from_le_bytes(bytes[body_end..].try_into().expect("4 bytes"));
    if crc32fast::hash(&bytes[..body_end]) != stored {
        return Err(corrupt("checksum mismatch"));
    }
    let kind = kind_from_tag(bytes[8]).ok_or_else(|| corrupt(format!("unknown kind tag {}", bytes[8])))?;

    let mut r = Reader {
        buf: &bytes[HEADER_LEN..body_end],
        pos: 0,
    };
    let pipeline = read_pipeline(&mut r)?;
    let classifier = match kind {
        ModelKind::Nb => Classifier::Nb(read_nb(&mut r, pipeline.vocabulary.len())?),
        ModelKind::C45 => Classifier::C45(read_c45(&mut r)?),
        ModelKind::Mlp => Classifier::Mlp(read_mlp(&mut r, pipeline.vocabulary.len())?),
    };
    if r.pos != r.buf.len() {
        return Err(corrupt(format!("{} trailing payload bytes", r.buf.len() - r.pos)));
    }
    Ok(TrainedModel { pipeline, classifier })
}

pub fn write_model_file(path: &Path, model: &TrainedModel) -> Result<(), ModelIoError> {
    let bytes = save_model(model)?;
    fs::write(path, bytes).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_model_file(path: &Path) -> Result<TrainedModel, ModelIoError> {
    let bytes = fs::read(path).map_err(|source| ModelIoError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    load_model(&bytes)
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u8(&mut self, v: u8) {
        self.buf.push(v);
    }
    fn bool(&mut self, v: bool) {
        self.u8(v as u8);
    }
    fn u32(&mut self, v: u32) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }
    fn usize(&mut self, v: usize) {
        self.u64(v as u64);
    }
    fn f64(&mut self, v: f64) {
        self.u64(v.to_bits());
    }
    fn opt_usize(&mut self, v: Option<usize>) {
        match v {
            Some(n) => {
                self.u8(1);
                self.usize(n);
            }
            None => self.u8(0),
        }
    }
    fn str(&mut self, s: &str) {
        self.usize(s.len());
        self.buf.extend_from_slice(s.as_bytes());
    }
    fn label(&mut self, l: Label) {
        self.u8(l.index() as u8);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], ModelIoError> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| corrupt("payload ends early"))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }
    fn u8(&mut self) -> Result<u8, ModelIoError> {
        Ok(self.take(1)?[0])
    }
    fn bool(&mut self) -> Result<bool, ModelIoError> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            b => Err(corrupt(format!("bad boolean byte {b}"))),
        }
    }
    fn u32(&mut self) -> Result<u32, ModelIoError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
    fn u64(&mut self) -> Result<u64, ModelIoError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
    fn usize(&mut self) -> Result<usize, ModelIoError> {
        usize::try_from(self.u64()?).map_err(|_| corrupt("length overflows usize"))
    }
    /// A count of items each at least `item_size` bytes; rejects counts
    /// the remaining payload cannot hold.
    fn count(&mut self, item_size: usize) -> Result<usize, ModelIoError> {
        let n = self.usize()?;
        if n.saturating_mul(item_size.max(1)) > self.buf.len() - self.pos {
            return Err(corrupt(format!("count {n} exceeds remaining payload")));
        }
        Ok(n)
    }
    fn f64(&mut self) -> Result<f64, ModelIoError> {
        Ok(f64::from_bits(self.u64()?))
    }
    fn f64s(&mut self, n: usize) -> Result<Vec<f64>, ModelIoError> {
        if n.saturating_mul(8) > self.buf.len() - self.pos {
            return Err(corrupt("payload ends early"));
        }
        (0..n).map(|_| self.f64()).collect()
    }
    fn opt_usize(&mut self) -> Result<Option<usize>, ModelIoError> {
        Ok(if self.bool()? { Some(self.usize()?) } else { None })
    }
    fn str(&mut self) -> Result<String, ModelIoError> {
        let n = self.count(1)?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| corrupt("string is not UTF-8"))
    }
    fn label(&mut self) -> Result<Label, ModelIoError> {
        let b = self.u8()?;
        Label::from_index(b as usize).ok_or_else(|| corrupt(format!("bad label byte {b}")))
    }
}

fn repr_tag(r: Representation) -> u8 {
    match r {
        Representation::Count => 0,
        Representation::Binary => 1,
        Representation::TermFrequency => 2,
    }
}

fn write_pipeline(w: &mut Writer, p: &FeaturePipeline) {
    let c = &p.preprocessor.config;
    for flag in [c.lowercase, c.remove_stopwords, c.remove_numbers, c.remove_punct, c.use_lemmas] {
        w.bool(flag);
    }
    w.str(&p.preprocessor.stopwords.to_text());
    w.str(&p.preprocessor.rules.to_text());
    w.u8(repr_tag(p.representation));
    let v = &p.vocabulary;
    w.u32(v.min_df());
    w.opt_usize(v.max_size());
    w.usize(v.len());
    for (t, &df) in v.terms().iter().zip(v.doc_frequency()) {
        w.str(t);
        w.u32(df);
    }
}

fn read_pipeline(r: &mut Reader) -> Result<FeaturePipeline, ModelIoError> {
    let config = PreprocessConfig {
        lowercase: r.bool()?,
        remove_stopwords: r.bool()?,
        remove_numbers: r.bool()?,
        remove_punct: r.bool()?,
        use_lemmas: r.bool()?,
    };
    let stopwords = StopwordList::parse(&r.str()?).map_err(|e| corrupt(format!("stopwords: {e}")))?;
    let rules = LemmaRules::parse(&r.str()?).map_err(|e| corrupt(format!("lemma rules: {e}")))?;
    let representation = match r.u8()? {
        0 => Representation::Count,
        1 => Representation::Binary,
        2 => Representation::TermFrequency,
        b => return Err(corrupt(format!("bad representation tag {b}"))),
    };
    let min_df = r.u32()?;
    let max_size = r.opt_usize()?;
    let n = r.count(12)?;
    let mut terms = Vec::with_capacity(n);
    let mut dfs = Vec::with_capacity(n);
    for _ in 0..n {
        terms.push(r.str()?);
        dfs.push(r.u32()?);
    }
    if terms.is_empty() || terms.windows(2).any(|w| w[0] >= w[1]) {
        return Err(corrupt("vocabulary terms must be non-empty, sorted and unique"));
    }
    Ok(FeaturePipeline::from_parts(
        Preprocessor::new(config, stopwords, rules),
        Vocabulary::from_parts(terms, dfs, min_df, max_size),
        representation,
    ))
}

fn write_nb(w: &mut Writer, m: &NbModel) {
    w.f64(m.alpha);
    w.usize(m.class_order.len());
    for &l in &m.class_order {
        w.label(l);
    }
    for &p in &m.log_priors {
        w.f64(p);
    }
    for row in &m.log_likelihoods {
        for &v in row {
            w.f64(v);
        }
    }
}

fn read_nb(r: &mut Reader, vocab_size: usize) -> Result<NbModel, ModelIoError> {
    let alpha = r.f64()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(corrupt(format!("bad alpha {alpha}")));
    }
    let k = r.count(1)?;
    if k == 0 || k > Label::ALL.len() {
        return Err(corrupt(format!("bad class count {k}")));
    }
    let class_order = (0..k).map(|_| r.label()).collect::<Result<Vec<_>, _>>()?;
    let log_priors = r.f64s(k)?;
    let log_likelihoods = (0..k).map(|_| r.f64s(vocab_size)).collect::<Result<Vec<_>, _>>()?;
    Ok(NbModel {
        class_order,
        log_priors,
        log_likelihoods,
        alpha,
        vocab_size,
    })
}

fn write_c45(w: &mut Writer, t: &C45Tree) {
    let c = &t.config;
    w.usize(c.min_samples_leaf);
    w.opt_usize(c.max_depth);
    w.bool(c.prune);
    w.f64(c.confidence);
    write_node(w, &t.root);
}

fn write_counts(w: &mut Writer, c: &ClassCounts) {
    w.usize(c.0.len());
    for &n in &c.0 {
        w.usize(n);
    }
}

fn write_node(w: &mut Writer, node: &TreeNode) {
    match node {
        TreeNode::Leaf { label, counts } => {
            w.u8(0);
            w.label(*label);
            write_counts(w, counts);
        }
        TreeNode::Internal {
            split,
            counts,
            left,
            right,
        } => {
            w.u8(1);
            w.u32(split.feature_index);
            w.f64(split.threshold);
            write_counts(w, counts);
            write_node(w, left);
            write_node(w, right);
        }
    }
}

fn read_c45(r: &mut Reader) -> Result<C45Tree, ModelIoError> {
    let config = C45Config {
        min_samples_leaf: r.usize()?,
        max_depth: r.opt_usize()?,
        prune: r.bool()?,
        confidence: r.f64()?,
    };
    let root = read_node(r, 0)?;
    Ok(C45Tree { root, config })
}

fn read_counts(r: &mut Reader) -> Result<ClassCounts, ModelIoError> {
    let n = r.count(8)?;
    if n != Label::ALL.len() {
        return Err(corrupt(format!("class count vector of length {n}")));
    }
    Ok(ClassCounts::new((0..n).map(|_| r.usize()).collect::<Result<_, _>>()?))
}

fn read_node(r: &mut Reader, depth: usize) -> Result<TreeNode, ModelIoError> {
    if depth > MAX_TREE_DEPTH {
        return Err(corrupt("tree too deep"));
    }
    match r.u8()? {
        0 => Ok(TreeNode::Leaf {
            label: r.label()?,
            counts: read_counts(r)?,
        }),
        1 => {
            let split = SplitCandidate {
                feature_index: r.u32()?,
                threshold: r.f64()?,
            };
            let counts = read_counts(r)?;
            let left = Box::new(read_node(r, depth + 1)?);
            let right = Box::new(read_node(r, depth + 1)?);
            Ok(TreeNode::Internal {
                split,
                counts,
                left,
                right,
            })
        }
        b => Err(corrupt(format!("bad tree node tag {b}"))),
    }
}

fn write_mlp(w: &mut Writer, m: &MlpModel) {
    let c = &m.config;
    w.usize(c.input_dim);
    w.usize(c.hidden_dims.len());
    for &h in &c.hidden_dims {
        w.usize(h);
    }
    w.u8(match c.hidden_activation {
        Activation::Sigmoid => 0,
        Activation::Relu => 1,
    });
    w.f64(c.learning_rate);
    w.usize(c.epochs);
    w.usize(c.batch_size);
    w.u64(c.seed);
    for (wl, bl) in m.weights.iter().zip(&m.biases) {
        for &v in wl.iter().chain(bl) {
            w.f64(v);
        }
    }
}

fn read_mlp(r: &mut Reader, vocab_size: usize) -> Result<MlpModel, ModelIoError> {
    let input_dim = r.usize()?;
    if input_dim != vocab_size {
        return Err(corrupt(format!("MLP input width {input_dim} != vocabulary size {vocab_size}")));
    }
    let n_hidden = r.count(8)?;
    let hidden_dims = (0..n_hidden).map(|_| r.usize()).collect::<Result<Vec<_>, _>>()?;
    let hidden_activation = match r.u8()? {
        0 => Activation::Sigmoid,
        1 => Activation::Relu,
        b => return Err(corrupt(format!("bad activation tag {b}"))),
    };
    let config = MlpConfig {
        input_dim,
        hidden_dims,
        hidden_activation,
        learning_rate: r.f64()?,
        epochs: r.usize()?,
        batch_size: r.usize()?,
        seed: r.u64()?,
    };
    let dims = config.layer_dims();
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for d in dims.windows(2) {
        let n = d[0].checked_mul(d[1]).ok_or_else(|| corrupt("layer too large"))?;
        weights.push(r.f64s(n)?);
        biases.push(r.f64s(d[1])?);
    }
    MlpModel::from_parameters(config, weights, biases).map_err(|e| corrupt(e.to_string()))
}
