//! Confusion matrices, the four headline metrics, and comparison tables.
//!
//! Spam is the positive class unless a caller says otherwise. Every metric
//! is one division of two integer counts, so values are exactly
//! reproducible from the matrix. A 0/0 metric evaluates to 0 and sets the
//! matching flag in [`ZeroDivision`].

use std::fmt::Write as _;

use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("{predictions} predictions but {truths} truths")]
    LengthMismatch { predictions: usize, truths: usize },
    #[error("nothing to evaluate")]
    EmptyEvaluation,
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("model name {0:?} appears more than once")]
    DuplicateName(String),
    #[error("model name {0:?} must be non-empty and free of whitespace and '='")]
    BadName(String),
    #[error("report line {line}: {message}")]
    BadReport { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
    pub positive_label: Label,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }

    /// The same predictions scored with the other class as positive.
    pub fn with_positive(&self, positive_label: Label) -> Self {
        if positive_label == self.positive_label {
            return *self;
        }
        Self {
            tp: self.tn,
            fp: self.fn_,
            tn: self.tp,
            fn_: self.fp,
            positive_label,
        }
    }
}

/// Tally predictions against truths.
pub fn confusion(
    predictions: &[Label],
    truths: &[Label],
    positive_label: Label,
) -> Result<ConfusionMatrix, EvalError> {
    if predictions.len() != truths.len() {
        return Err(EvalError::LengthMismatch {
            predictions: predictions.len(),
            truths: truths.len(),
        });
    }
    if predictions.is_empty() {
        return Err(EvalError::EmptyEvaluation);
    }
    let mut cm = ConfusionMatrix {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
        positive_label,
    };
    for (&p, &t) in predictions.iter().zip(truths) {
        match (p == positive_label, t == positive_label) {
            (true, true) => cm.tp += 1,
            (true, false) => cm.fp += 1,
            (false, true) => cm.fn_ += 1,
            (false, false) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Metrics that hit a 0/0 guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct ZeroDivision {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl ZeroDivision {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub zero_division: ZeroDivision,
}

fn ratio(num: u64, den: u64) -> (f64, bool) {
    if den == 0 {
        (0.0, true)
    } else {
        (num as f64 / den as f64, false)
    }
}

/// Accuracy, precision, recall and F1 from a matrix.
///
/// F1 is computed as `2tp / (2tp + fp + fn)`, which equals `2PR / (P + R)`
/// whenever `P + R > 0`; it is 0/0 exactly when `tp == 0`.
pub fn metrics(cm: &ConfusionMatrix) -> Result<MetricsReport, EvalError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvalError::EmptyMatrix);
    }
    let (accuracy, _) = ratio(cm.tp + cm.tn, total);
    let (precision, zp) = ratio(cm.tp, cm.tp + cm.fp);
    let (recall, zr) = ratio(cm.tp, cm.tp + cm.fn_);
    let (f1, zf) = if cm.tp == 0 {
        (0.0, true)
    } else {
        ratio(2 * cm.tp, 2 * cm.tp + cm.fp + cm.fn_)
    };
    Ok(MetricsReport {
        accuracy,
        precision,
        recall,
        f1,
        zero_division: ZeroDivision {
            precision: zp,
            recall: zr,
            f1: zf,
        },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub name: String,
    pub metrics: MetricsReport,
    /// Absent for rows quoted from elsewhere rather than measured.
    pub confusion: Option<ConfusionMatrix>,
}

impl ComparisonRow {
    pub fn measured(name: impl Into<String>, cm: ConfusionMatrix) -> Result<Self, EvalError> {
        Ok(Self {
            name: name.into(),
            metrics: metrics(&cm)?,
            confusion: Some(cm),
        })
    }
}

/// Rows sorted by descending accuracy, then name.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    rows: Vec<ComparisonRow>,
}

fn check_name(name: &str) -> Result<(), EvalError> {
    if name.is_empty() || name.contains(|c: char| c.is_whitespace() || c == '=') {
        return Err(EvalError::BadName(name.to_string()));
    }
    Ok(())
}

pub fn compare(mut rows: Vec<ComparisonRow>) -> Result<ComparisonTable, EvalError> {
    let mut seen = std::collections::HashSet::new();
    for r in &rows {
        check_name(&r.name)?;
        if !seen.insert(r.name.as_str()) {
            return Err(EvalError::DuplicateName(r.name.clone()));
        }
    }
    rows.sort_by(|a, b| {
        b.metrics
            .accuracy
            .total_cmp(&a.metrics.accuracy)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(ComparisonTable { rows })
}

pub const REPORT_HEADER: &str = "# spamlab-report v1";

impl ComparisonTable {
    pub fn rows(&self) -> &[ComparisonRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Fixed-width table, metrics to 4 decimal places, counts as `-` when
    /// unknown.
    pub fn render_text(&self) -> String {
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<width$}  {:>8}  {:>9}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}  {:>6}",
            "model", "accuracy", "precision", "recall", "f1", "tp", "fp", "tn", "fn"
        );
        for r in &self.rows {
            let m = &r.metrics;
            let counts = match &r.confusion {
                Some(c) => [c.tp, c.fp, c.tn, c.fn_].map(|v| v.to_string()),
                None => std::array::from_fn(|_| "-".to_string()),
            };
            let _ = writeln!(
                out,
                "{:<width$}  {:>8.4}  {:>9.4}  {:>6.4}  {:>6.4}  {:>6}  {:>6}  {:>6}  {:>6}",
                r.name, m.accuracy, m.precision, m.recall, m.f1, counts[0], counts[1], counts[2], counts[3]
            );
        }
        out
    }

    /// Header line then one tab-separated `key=value` record per row. Floats
    /// use the shortest decimal that parses back to the same bits.
    pub fn render_machine(&self) -> String {
        let mut out = String::new();
        out.push_str(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let m = &r.metrics;
            let _ = write!(
                out,
                "model={}\taccuracy={}\tprecision={}\trecall={}\tf1={}",
                r.name, m.accuracy, m.precision, m.recall, m.f1
            );
            match &r.confusion {
                Some(c) => {
                    let _ = write!(out, "\ttp={}\tfp={}\ttn={}\tfn={}", c.tp, c.fp, c.tn, c.fn_);
                }
                None => out.push_str("\ttp=-\tfp=-\ttn=-\tfn=-"),
            }
            out.push('\n');
        }
        out
    }

    /// Inverse of [`render_machine`](Self::render_machine). Zero-division
    /// flags are recomputed from counts when present.
    pub fn parse_machine(text: &str) -> Result<Self, EvalError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h == REPORT_HEADER => {}
            _ => {
                return Err(EvalError::BadReport {
                    line: 1,
                    message: format!("expected header {REPORT_HEADER:?}"),
                })
            }
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            if line.is_empty() {
                continue;
            }
            rows.push(parse_record(line).map_err(|message| EvalError::BadReport { line: i + 1, message })?);
        }
        compare(rows)
    }
}

const KEYS: [&str; 9] = ["model", "accuracy", "precision", "recall", "f1", "tp", "fp", "tn", "fn"];

fn parse_record(line: &str) -> Result<ComparisonRow, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != KEYS.len() {
        return Err(format!("expected {} fields, found {}", KEYS.len(), fields.len()));
    }
    let mut values = [""; 9];
    for (k, (field, slot)) in KEYS.iter().zip(fields.iter().zip(values.iter_mut())) {
        *slot = field
            .strip_prefix(k)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| format!("expected key {k:?} in {field:?}"))?;
    }
    let float = |i: usize| -> Result<f64, String> {
        let v: f64 = values[i].parse().map_err(|_| format!("bad {}: {:?}", KEYS[i], values[i]))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(format!("{} out of [0,1]: {v}", KEYS[i]));
        }
        Ok(v)
    };
    let mut metrics = MetricsReport {
        accuracy: float(1)?,
        precision: float(2)?,
        recall: float(3)?,
        f1: float(4)?,
        zero_division: ZeroDivision::default(),
    };
    let confusion = if values[5..].iter().all(|v| *v == "-") {
        None
    } else {
        let mut c = [0u64; 4];
        for (slot, i) in c.iter_mut().zip(5..9) {
            *slot = values[i].parse().map_err(|_| format!("bad {}: {:?}", KEYS[i], values[i]))?;
        }
        let cm = ConfusionMatrix {
            tp: c[0],
            fp: c[1],
            tn: c[2],
            fn_: c[3],
            positive_label: Label::Spam,
        };
        metrics.zero_division = self::metrics(&cm).map_err(|e| e.to_string())?.zero_division;
        Some(cm)
    };
    Ok(ComparisonRow {
        name: values[0].to_string(),
        metrics,
        confusion,
    })
}

/// Headline figures reported for the MLP on the original private corpus.
/// Quoted as a fixture row; never recomputed.
pub fn reference_mlp_row() -> ComparisonRow {
    ComparisonRow {
        name: "reference-mlp".to_string(),
        metrics: MetricsReport {
            accuracy: 0.96,
            precision: 0.97,
            recall: 0.94,
            f1: 0.96,
            zero_division: ZeroDivision::default(),
        },
        confusion: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Ham as N, Spam as P};

    #[test]
    fn confusion_examples() {
        let cm = confusion(&[P, P, N, N], &[P, P, N, N], P).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (2, 0, 2, 0));
        let cm = confusion(&[P, P, P, P], &[P, P, N, N], P).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (2, 2, 0, 0));
        let cm = confusion(&[P, P, N, N, P], &[P, N, P, N, P], P).unwrap();
        assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (2, 1, 1, 1));
    }

    #[test]
    fn confusion_errors() {
        assert_eq!(
            confusion(&[P], &[P, N], P),
            Err(EvalError::LengthMismatch { predictions: 1, truths: 2 })
        );
        assert_eq!(confusion(&[], &[], P), Err(EvalError::EmptyEvaluation));
    }

    fn cm(tp: u64, fp: u64, tn: u64, fn_: u64) -> ConfusionMatrix {
        ConfusionMatrix { tp, fp, tn, fn_, positive_label: P }
    }

    #[test]
    fn metric_examples() {
        let m = metrics(&cm(2, 0, 2, 0)).unwrap();
        assert_eq!((m.accuracy, m.precision, m.recall, m.f1), (1.0, 1.0, 1.0, 1.0));
        assert!(!m.zero_division.any());

        let m = metrics(&cm(3, 1, 4, 2)).unwrap();
        assert_eq!(m.accuracy, 0.7);
        assert_eq!(m.precision, 0.75);
        assert_eq!(m.recall, 0.6);
        assert!((m.f1 - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1 - 2.0 * 0.75 * 0.6 / 1.35).abs() < 1e-12);

        let m = metrics(&cm(0, 0, 3, 2)).unwrap();
        assert_eq!(m.precision, 0.0);
        assert!(m.zero_division.precision && m.zero_division.f1 && !m.zero_division.recall);

        assert_eq!(metrics(&cm(0, 0, 0, 0)), Err(EvalError::EmptyMatrix));
    }

    #[test]
    fn swapping_positive_class() {
        let a = confusion(&[P, P, N, N, P], &[P, N, P, N, P], P).unwrap();
        let b = confusion(&[P, P, N, N, P], &[P, N, P, N, P], N).unwrap();
        assert_eq!(a.with_positive(N), b);
        assert_eq!(metrics(&a).unwrap().accuracy, metrics(&b).unwrap().accuracy);
    }

    #[test]
    fn compare_orders_and_rejects_duplicates() {
        let rows = vec![
            ComparisonRow::measured("c45", cm(3, 1, 4, 2)).unwrap(),
            ComparisonRow::measured("nb", cm(5, 0, 5, 0)).unwrap(),
            ComparisonRow::measured("mlp", cm(4, 1, 4, 1)).unwrap(),
            ComparisonRow::measured("aaa", cm(4, 1, 4, 1)).unwrap(),
        ];
        let t = compare(rows.clone()).unwrap();
        let names: Vec<_> = t.rows().iter().map(|r| r.name.as_str()).collect();
        assert_eq!(names, ["nb", "aaa", "mlp", "c45"]);

        let mut dup = rows;
        dup.push(ComparisonRow::measured("nb", cm(1, 0, 0, 0)).unwrap());
        assert_eq!(compare(dup), Err(EvalError::DuplicateName("nb".into())));
        let bad = vec![ComparisonRow::measured("two words", cm(1, 0, 0, 0)).unwrap()];
        assert!(matches!(compare(bad), Err(EvalError::BadName(_))));
    }

    #[test]
    fn machine_report_round_trips() {
        let t = compare(vec![
            ComparisonRow::measured("nb", cm(3, 1, 4, 2)).unwrap(),
            ComparisonRow::measured("c45", cm(0, 0, 3, 2)).unwrap(),
            reference_mlp_row(),
        ])
        .unwrap();
        let text = t.render_machine();
        assert!(text.starts_with("# spamlab-report v1\nmodel=reference-mlp\taccuracy=0.96\t"));
        assert!(text.contains("model=nb\taccuracy=0.7\tprecision=0.75\trecall=0.6\tf1=0.6666666666666666\ttp=3\tfp=1\ttn=4\tfn=2\n"));
        assert_eq!(ComparisonTable::parse_machine(&text).unwrap(), t);
    }

    #[test]
    fn machine_report_rejects_garbage() {
        assert!(ComparisonTable::parse_machine("model=nb").is_err());
        let bad = format!("{REPORT_HEADER}\nmodel=nb\taccuracy=2\tprecision=0\trecall=0\tf1=0\ttp=1\tfp=0\ttn=0\tfn=0\n");
        assert!(matches!(
            ComparisonTable::parse_machine(&bad),
            Err(EvalError::BadReport { line: 2, .. })
        ));
    }

    #[test]
    fn text_report_has_four_decimals() {
        let t = compare(vec![reference_mlp_row()]).unwrap();
        let text = t.render_text();
        let line = text.lines().nth(1).unwrap();
        assert!(line.contains("0.9600") && line.contains("0.9700") && line.contains("0.9400"));
        assert!(line.trim_end().ends_with('-'));
    }
}
