//! C4.5 decision tree over numeric (bag-of-words) features.
//!
//! Splits are binary threshold tests `value <= threshold` chosen by gain
//! ratio. Thresholds are midpoints between consecutive distinct values seen
//! at a node; absent sparse entries count as 0. After growth the tree is
//! optionally pruned by pessimistic subtree replacement.

use std::fmt::Write as _;

use thiserror::Error;

use crate::features::{FeatureVector, LabeledVector, Vocabulary};
use crate::label::Label;

/// Gain ratios closer than this are treated as equal; the lower feature
/// index (then lower threshold) wins.
pub const TIE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum TreeError {
    #[error("cannot build a tree from no examples")]
    EmptyData,
    #[error("child counts do not sum to the parent counts")]
    PartitionMismatch,
    #[error("invalid tree configuration: {0}")]
    BadConfig(String),
}

/// Per-class example counts, indexed by [`Label::index`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassCounts(pub Vec<usize>);

impl ClassCounts {
    pub fn new(counts: Vec<usize>) -> Self {
        Self(counts)
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    fn tally<'a>(labels: impl Iterator<Item = &'a Label>) -> Self {
        let mut c = vec![0; Label::ALL.len()];
        for l in labels {
            c[l.index()] += 1;
        }
        Self(c)
    }

    /// Majority class; ties resolve to the earlier label.
    pub fn majority(&self) -> Label {
        let mut best = 0;
        for (i, &n) in self.0.iter().enumerate() {
            if n > self.0[best] {
                best = i;
            }
        }
        Label::from_index(best).unwrap_or(Label::ALL[0])
    }

    pub fn is_pure(&self) -> bool {
        self.0.iter().filter(|&&n| n > 0).count() <= 1
    }

    fn minus(&self, other: &ClassCounts) -> ClassCounts {
        ClassCounts(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

/// Shannon entropy in bits; empty counts give 0.
pub fn entropy(counts: &ClassCounts) -> f64 {
    let n = counts.total();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    counts
        .0
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

pub fn info_gain(parent: &ClassCounts, children: &[ClassCounts]) -> Result<f64, TreeError> {
    check_partition(parent, children)?;
    let n = parent.total() as f64;
    if n == 0.0 {
        return Ok(0.0);
    }
    let weighted: f64 = children
        .iter()
        .map(|c| c.total() as f64 / n * entropy(c))
        .sum();
    Ok(entropy(parent) - weighted)
}

fn check_partition(parent: &ClassCounts, children: &[ClassCounts]) -> Result<(), TreeError> {
    for (k, &p) in parent.0.iter().enumerate() {
        let s: usize = children.iter().map(|c| c.0.get(k).copied().unwrap_or(0)).sum();
        if s != p {
            return Err(TreeError::PartitionMismatch);
        }
    }
    if children.iter().any(|c| c.0.len() > parent.0.len() && c.0[parent.0.len()..].iter().any(|&x| x > 0)) {
        return Err(TreeError::PartitionMismatch);
    }
    Ok(())
}

/// Entropy of the partition sizes themselves, in bits.
pub fn split_info(sizes: &[usize]) -> f64 {
    entropy(&ClassCounts(sizes.to_vec()))
}

/// Information gain divided by split information, or `None` when the split
/// information is zero (a one-sided split, never eligible).
pub fn gain_ratio(parent: &ClassCounts, children: &[ClassCounts]) -> Result<Option<f64>, TreeError> {
    let gain = info_gain(parent, children)?;
    let sizes: Vec<usize> = children.iter().map(ClassCounts::total).collect();
    let si = split_info(&sizes);
    Ok(if si > 0.0 { Some(gain / si) } else { None })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature_index: u32,
    pub threshold: f64,
}

/// A chosen split with its scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSplit {
    pub split: SplitCandidate,
    pub gain: f64,
    pub gain_ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C45Config {
    pub min_samples_leaf: usize,
    pub max_depth: Option<usize>,
    pub prune: bool,
    /// Confidence level for the pessimistic error bound, in (0, 0.5].
    pub confidence: f64,
}

impl Default for C45Config {
    fn default() -> Self {
        Self {
            min_samples_leaf: 2,
            max_depth: None,
            prune: true,
            confidence: 0.25,
        }
    }
}

impl C45Config {
    fn validate(&self) -> Result<(), TreeError> {
        if self.min_samples_leaf < 1 {
            return Err(TreeError::BadConfig("min_samples_leaf must be >= 1".into()));
        }
        if !(self.confidence > 0.0 && self.confidence <= 0.5) {
            return Err(TreeError::BadConfig(format!(
                "confidence {} outside (0, 0.5]",
                self.confidence
            )));
        }
        Ok(())
    }
}

/// Best gain-ratio split among candidates with positive gain and at least
/// `min_samples_leaf` examples on each side.
pub fn best_split(data: &[LabeledVector], min_samples_leaf: usize) -> Option<ScoredSplit> {
    let refs: Vec<&LabeledVector> = data.iter().collect();
    best_split_refs(&refs, min_samples_leaf)
}

fn best_split_refs(data: &[&LabeledVector], min_samples_leaf: usize) -> Option<ScoredSplit> {
    if data.len() < 2 {
        return None;
    }
    let parent = ClassCounts::tally(data.iter().map(|d| &d.label));
    let n = data.len();

    // Every non-zero entry at this node, grouped by feature then value.
    let mut entries: Vec<(u32, f64, Label)> = data
        .iter()
        .flat_map(|d| d.vector.entries().iter().map(move |&(i, v)| (i, v, d.label)))
        .collect();
    entries.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));

    let mut best: Option<ScoredSplit> = None;
    let mut start = 0;
    while start < entries.len() {
        let feature = entries[start].0;
        let end = start + entries[start..].iter().take_while(|e| e.0 == feature).count();
        let group = &entries[start..end];
        start = end;

        let nonzero = ClassCounts::tally(group.iter().map(|e| &e.2));
        let zeros = parent.minus(&nonzero);
        // Walk distinct values in ascending order; `left` holds everything
        // <= the current value.
        let mut left = zeros.clone();
        let mut prev_value = if zeros.total() > 0 { Some(0.0) } else { None };
        let mut j = 0;
        while j < group.len() {
            let value = group[j].1;
            if let Some(prev) = prev_value {
                consider(&mut best, &parent, &left, n, min_samples_leaf, feature, (prev + value) / 2.0);
            }
            while j < group.len() && group[j].1 == value {
                left.0[group[j].2.index()] += 1;
                j += 1;
            }
            prev_value = Some(value);
        }
    }
    best
}

fn consider(
    best: &mut Option<ScoredSplit>,
    parent: &ClassCounts,
    left: &ClassCounts,
    n: usize,
    min_leaf: usize,
    feature: u32,
    threshold: f64,
) {
    let nl = left.total();
    if nl < min_leaf || n - nl < min_leaf {
        return;
    }
    let right = parent.minus(left);
    let children = [left.clone(), right];
    let gain = info_gain(parent, &children).expect("partition by construction");
    if gain <= TIE_EPSILON {
        return;
    }
    let Some(ratio) = gain_ratio(parent, &children).expect("partition by construction") else {
        return;
    };
    // Candidates arrive in (feature, threshold) order, so only a strictly
    // better ratio displaces the incumbent.
    if best.is_none_or(|b| ratio > b.gain_ratio + TIE_EPSILON) {
        *best = Some(ScoredSplit {
            split: SplitCandidate {
                feature_index: feature,
                threshold,
            },
            gain,
            gain_ratio: ratio,
        });
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        label: Label,
        counts: ClassCounts,
    },
    Internal {
        split: SplitCandidate,
        counts: ClassCounts,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn leaf(counts: ClassCounts) -> Self {
        TreeNode::Leaf {
            label: counts.majority(),
            counts,
        }
    }

    pub fn counts(&self) -> &ClassCounts {
        match self {
            TreeNode::Leaf { counts, .. } | TreeNode::Internal { counts, .. } => counts,
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Internal { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Internal { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// The leaf a vector routes to.
    pub fn route(&self, vector: &FeatureVector) -> &TreeNode {
        let mut node = self;
        while let TreeNode::Internal { split, left, right, .. } = node {
            node = if vector.get(split.feature_index) <= split.threshold {
                left
            } else {
                right
            };
        }
        node
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct C45Tree {
    pub(crate) root: TreeNode,
    pub(crate) config: C45Config,
}

impl C45Tree {
    pub fn build(data: &[LabeledVector], config: C45Config) -> Result<Self, TreeError> {
        config.validate()?;
        if data.is_empty() {
            return Err(TreeError::EmptyData);
        }
        let refs: Vec<&LabeledVector> = data.iter().collect();
        let mut root = grow(&refs, 0, &config);
        if config.prune {
            root = prune(root, config.confidence).0;
        }
        Ok(Self { root, config })
    }

    pub fn root(&self) -> &TreeNode {
        &self.root
    }

    pub fn config(&self) -> &C45Config {
        &self.config
    }

    pub fn predict(&self, vector: &FeatureVector) -> Label {
        match self.root.route(vector) {
            TreeNode::Leaf { label, .. } => *label,
            TreeNode::Internal { .. } => unreachable!("route ends at a leaf"),
        }
    }

    /// Class counts of the leaf the vector lands in.
    pub fn leaf_counts(&self, vector: &FeatureVector) -> &ClassCounts {
        self.root.route(vector).counts()
    }

    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }

    /// Indented listing of the tree. Feature names come from `vocab` when
    /// given.
    pub fn render(&self, vocab: Option<&Vocabulary>) -> String {
        let mut out = String::new();
        render_node(&self.root, vocab, 0, &mut out);
        out
    }
}

fn grow(data: &[&LabeledVector], depth: usize, config: &C45Config) -> TreeNode {
    let counts = ClassCounts::tally(data.iter().map(|d| &d.label));
    if counts.is_pure()
        || data.len() < 2 * config.min_samples_leaf
        || config.max_depth.is_some_and(|d| depth >= d)
    {
        return TreeNode::leaf(counts);
    }
    let Some(best) = best_split_refs(data, config.min_samples_leaf) else {
        return TreeNode::leaf(counts);
    };
    let split = best.split;
    let (left, right): (Vec<&LabeledVector>, Vec<&LabeledVector>) = data
        .iter()
        .partition(|d| d.vector.get(split.feature_index) <= split.threshold);
    TreeNode::Internal {
        split,
        counts,
        left: Box::new(grow(&left, depth + 1, config)),
        right: Box::new(grow(&right, depth + 1, config)),
    }
}

/// Bottom-up subtree replacement. Returns the node and its estimated error
/// count.
fn prune(node: TreeNode, confidence: f64) -> (TreeNode, f64) {
    match node {
        TreeNode::Leaf { ref counts, .. } => {
            let est = leaf_error_estimate(counts, confidence);
            (node, est)
        }
        TreeNode::Internal {
            split,
            counts,
            left,
            right,
        } => {
            let (left, le) = prune(*left, confidence);
            let (right, re) = prune(*right, confidence);
            let as_leaf = leaf_error_estimate(&counts, confidence);
            if as_leaf <= le + re {
                (TreeNode::leaf(counts), as_leaf)
            } else {
                let node = TreeNode::Internal {
                    split,
                    counts,
                    left: Box::new(left),
                    right: Box::new(right),
                };
                (node, le + re)
            }
        }
    }
}

/// `N * U_cf(E, N)` for a leaf holding `counts`, with E the examples outside
/// the majority class.
pub fn leaf_error_estimate(counts: &ClassCounts, confidence: f64) -> f64 {
    let n = counts.total();
    let errors = n - counts.0.iter().copied().max().unwrap_or(0);
    n as f64 * binomial_upper_bound(errors, n, confidence)
}

/// Upper confidence limit on a binomial error rate: the `p` at which
/// observing at most `errors` failures in `n` trials has probability
/// `confidence`.
pub fn binomial_upper_bound(errors: usize, n: usize, confidence: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if errors >= n {
        return 1.0;
    }
    if errors == 0 {
        return 1.0 - confidence.powf(1.0 / n as f64);
    }
    let (mut lo, mut hi) = (errors as f64 / n as f64, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binomial_cdf(errors, n, mid) > confidence {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// `P(X <= k)` for `X ~ Binomial(n, p)`, summed in log space.
fn binomial_cdf(k: usize, n: usize, p: f64) -> f64 {
    if p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return if k >= n { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_term = n as f64 * lq;
    let mut terms = Vec::with_capacity(k + 1);
    terms.push(log_term);
    for i in 0..k {
        log_term += ((n - i) as f64).ln() - ((i + 1) as f64).ln() + lp - lq;
        terms.push(log_term);
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln())
        .exp()
        .min(1.0)
}

fn render_node(node: &TreeNode, vocab: Option<&Vocabulary>, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    let counts = node
        .counts()
        .0
        .iter()
        .enumerate()
        .map(|(i, n)| format!("{}={n}", Label::from_index(i).map_or("?", Label::as_str)))
        .collect::<Vec<_>>()
        .join(", ");
    match node {
        TreeNode::Leaf { label, .. } => {
            let _ = writeln!(out, "{pad}leaf {label} ({counts})");
        }
        TreeNode::Internal { split, left, right, .. } => {
            let name = vocab
                .and_then(|v| v.term(split.feature_index))
                .map(|t| format!(" {t:?}"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{pad}f{}{name} <= {} ({counts})",
                split.feature_index, split.threshold
            );
            render_node(left, vocab, depth + 1, out);
            let _ = writeln!(out, "{pad}f{}{name} > {}", split.feature_index, split.threshold);
            render_node(right, vocab, depth + 1, out);
        }
    }
}
