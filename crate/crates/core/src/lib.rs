//! Spam/ham email classification: corpus parsing, text preprocessing,
//! bag-of-words features, three classifiers (multinomial naive Bayes,
//! C4.5 decision tree, multilayer perceptron), evaluation, and versioned
//! model files.

pub mod c45;
pub mod corpus;
pub mod eval;
pub mod features;
pub mod label;
pub mod manifest;
pub mod mlp;
pub mod modelio;
pub mod nb;
pub mod pipeline;
pub mod preprocess;
pub mod rng;
pub mod synth;

pub use label::Label;
