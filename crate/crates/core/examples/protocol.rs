//! Generate a synthetic corpus, split 75/25, fit all three models with
//! default settings and print the comparison table.
//!
//! cargo run --release -p spamlab-core --example protocol -- [signal] [seed]

use std::time::Instant;

use spamlab::corpus::{stratified_split, SplitSpec};
use spamlab::eval::{compare, confusion, ComparisonRow};
use spamlab::pipeline::{FeaturePipeline, FeatureSettings, ModelKind, ModelSettings, TrainedModel};
use spamlab::preprocess::Preprocessor;
use spamlab::synth::{generate, SynthConfig};
use spamlab::Label;

fn main() {
    let mut args = std::env::args().skip(1);
    let signal = args.next().map_or(SynthConfig::default().signal, |s| s.parse().expect("signal"));
    let seed = args.next().map_or(42, |s| s.parse().expect("seed"));
    let start = Instant::now();
    let corpus = generate(&SynthConfig { signal, seed, ..SynthConfig::default() }).expect("generate");
    let split = stratified_split(&corpus, &SplitSpec::default()).expect("split");
    let (pipe, train) = FeaturePipeline::fit(&split.train, Preprocessor::default(), &FeatureSettings::default()).expect("features");
    let test = pipe.vectorize_corpus(&split.test);
    let truths: Vec<Label> = test.iter().map(|v| v.label).collect();
    let mut rows = Vec::new();
    for kind in ModelKind::ALL {
        let t = Instant::now();
        let (m, _) = TrainedModel::fit(kind, pipe.clone(), &train, &ModelSettings::default()).expect("fit");
        let preds: Vec<Label> = test.iter().map(|v| m.predict_vector(&v.vector).expect("predict").label).collect();
        let cm = confusion(&preds, &truths, Label::Spam).expect("confusion");
        rows.push(ComparisonRow::measured(kind.as_str(), cm).expect("metrics"));
        eprintln!("{kind}: {:?}", t.elapsed());
    }
    println!(
        "train={} test={} vocab={}",
        split.train.len(),
        split.test.len(),
        pipe.vocabulary().len()
    );
    print!("{}", compare(rows).expect("compare").render_text());
    eprintln!("total {:?}", start.elapsed());
}
