use spamlab::corpus::{stratified_split, SplitSpec};
use spamlab::features::{FeatureVector, Representation};
use spamlab::modelio::{load_model, save_model};
use spamlab::pipeline::{FeaturePipeline, FeatureSettings, MlpSettings, ModelKind, ModelSettings, Score, TrainedModel};
use spamlab::preprocess::{PreprocessConfig, Preprocessor};
use spamlab::rng::SplitMix64;
use spamlab::synth::{generate, SynthConfig};

fn score_bits(s: Score) -> (u8, u64, u64) {
    match s {
        Score::Posterior(p) => (0, p.to_bits(), 0),
        Score::LeafCounts { spam, ham } => (1, spam as u64, ham as u64),
        Score::Probability(p) => (2, p.to_bits(), 0),
    }
}

fn random_vectors(n: usize, dim: usize, seed: u64) -> Vec<FeatureVector> {
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| {
            let k = rng.below(12);
            FeatureVector::from_pairs(
                (0..k).map(|_| (rng.below(dim) as u32, (1 + rng.below(4)) as f64)),
                Representation::Count,
            )
        })
        .collect()
}

fn trained(kind: ModelKind, config: PreprocessConfig) -> (TrainedModel, spamlab::corpus::Corpus) {
    let corpus = generate(&SynthConfig { per_class: 60, ..SynthConfig::default() }).unwrap();
    let split = stratified_split(&corpus, &SplitSpec::default()).unwrap();
    let pre = Preprocessor { config, ..Preprocessor::default() };
    let (pipe, vectors) = FeaturePipeline::fit(&split.train, pre, &FeatureSettings::default()).unwrap();
    let settings = ModelSettings {
        mlp: MlpSettings { hidden_dims: vec![8], epochs: 5, ..MlpSettings::default() },
        ..ModelSettings::default()
    };
    (TrainedModel::fit(kind, pipe, &vectors, &settings).unwrap().0, split.train)
}

#[test]
fn predictions_survive_round_trip_bit_for_bit() {
    for kind in ModelKind::ALL {
        let (model, _) = trained(kind, PreprocessConfig::default());
        let loaded = load_model(&save_model(&model).unwrap()).unwrap();
        let dim = model.pipeline.vocabulary().len();
        for v in random_vectors(100, dim, 99) {
            let a = model.predict_vector(&v).unwrap();
            let b = loaded.predict_vector(&v).unwrap();
            assert_eq!(a.label, b.label, "{kind}");
            assert_eq!(score_bits(a.score), score_bits(b.score), "{kind}");
        }
    }
}

#[test]
fn loaded_model_reproduces_training_pipeline() {
    let flags = PreprocessConfig { remove_numbers: false, use_lemmas: false, ..PreprocessConfig::default() };
    for kind in ModelKind::ALL {
        let (model, train) = trained(kind, flags);
        let loaded = load_model(&save_model(&model).unwrap()).unwrap();
        assert_eq!(loaded.pipeline.preprocessor().config, flags);
        assert_eq!(loaded.pipeline.vocabulary(), model.pipeline.vocabulary());
        for ex in train.examples() {
            assert_eq!(loaded.pipeline.vectorize(&ex.text), model.pipeline.vectorize(&ex.text));
            assert_eq!(loaded.classify(&ex.text).unwrap(), model.classify(&ex.text).unwrap());
        }
    }
}

#[test]
fn saving_is_deterministic() {
    for kind in ModelKind::ALL {
        let (a, _) = trained(kind, PreprocessConfig::default());
        let (b, _) = trained(kind, PreprocessConfig::default());
        assert_eq!(save_model(&a).unwrap(), save_model(&b).unwrap(), "{kind}");
    }
}
