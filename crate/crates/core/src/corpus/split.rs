use crate::label::Label;
use crate::rng::SplitMix64;

use super::{Corpus, CorpusError, CorpusRole, LabeledExample};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            train_fraction: 0.75,
            seed: 42,
            stratified: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSplit {
    pub train: Corpus,
    pub test: Corpus,
}

/// Deterministic train/test partition.
///
/// The train side holds `floor(train_fraction * N)` examples. When
/// stratified, that total is apportioned across classes by largest
/// remainder: each class first receives `floor(train_fraction * n_c)`, and the
/// leftover slots go to the classes with the largest fractional parts (ties
/// in [`Label::ALL`] order). Every class then lands within one example of
/// its exact proportional share, and a balanced 1500-example corpus splits
/// 1125/375.
///
/// Membership is chosen by shuffling each class's indices (in corpus order)
/// with one [`SplitMix64`] stream seeded by `spec.seed`, spam first, and
/// taking the leading quota. Unstratified splits shuffle all indices at
/// once. Both sides keep the original corpus order.
///
/// A stratified split in which some present class would have an empty train
/// or test side is degenerate, as is any split with an empty side overall.
pub fn stratified_split(corpus: &Corpus, spec: &SplitSpec) -> Result<CorpusSplit, CorpusError> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(CorpusError::BadFraction(f));
    }
    let total_train = (f * corpus.len() as f64).floor() as usize;

    let groups: Vec<Vec<usize>> = if spec.stratified {
        for label in Label::ALL {
            let n = corpus.count(label);
            if n == 1 {
                return Err(CorpusError::TooFewExamples(label));
            }
        }
        Label::ALL
            .iter()
            .map(|&label| {
                (0..corpus.len())
                    .filter(|&i| corpus.examples()[i].label == label)
                    .collect()
            })
            .collect()
    } else {
        vec![(0..corpus.len()).collect()]
    };
    let sizes: Vec<usize> = groups.iter().map(Vec::len).collect();
    let quotas = if spec.stratified {
        apportion(&sizes, f, total_train)
    } else {
        vec![total_train]
    };

    let degenerate = || CorpusError::DegenerateSplit {
        train: total_train,
        test: corpus.len() - total_train,
    };
    if total_train == 0 || total_train == corpus.len() {
        return Err(degenerate());
    }
    if spec.stratified && sizes.iter().zip(&quotas).any(|(&n, &q)| n > 0 && (q == 0 || q == n)) {
        return Err(degenerate());
    }

    let mut rng = SplitMix64::new(spec.seed);
    let mut in_train = vec![false; corpus.len()];
    for (mut group, quota) in groups.into_iter().zip(quotas) {
        rng.shuffle(&mut group);
        for &i in &group[..quota] {
            in_train[i] = true;
        }
    }

    let (mut train, mut test): (Vec<LabeledExample>, Vec<LabeledExample>) = (Vec::new(), Vec::new());
    for (ex, &t) in corpus.examples().iter().zip(&in_train) {
        if t {
            train.push(ex.clone());
        } else {
            test.push(ex.clone());
        }
    }
    Ok(CorpusSplit {
        train: Corpus::with_role(train, CorpusRole::Train),
        test: Corpus::with_role(test, CorpusRole::Test),
    })
}

/// Largest-remainder apportionment of `total` slots over groups of the given
/// sizes at rate `fraction`.
fn apportion(sizes: &[usize], fraction: f64, total: usize) -> Vec<usize> {
    let exact: Vec<f64> = sizes.iter().map(|&n| fraction * n as f64).collect();
    let mut quotas: Vec<usize> = exact.iter().map(|q| q.floor() as usize).collect();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // Stable sort keeps class order among equal remainders.
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).expect("finite")
    });
    let mut left = total.saturating_sub(quotas.iter().sum());
    for &g in order.iter().cycle().take(sizes.len() * 2) {
        if left == 0 {
            break;
        }
        if quotas[g] < sizes[g] {
            quotas[g] += 1;
            left -= 1;
        }
    }
    quotas
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn corpus(spam: usize, ham: usize) -> Corpus {
        let mut v = Vec::new();
        for i in 0..spam + ham {
            v.push(LabeledExample {
                id: i.to_string(),
                text: format!("doc {i}"),
                label: if i < spam { Label::Spam } else { Label::Ham },
            });
        }
        Corpus::new(v)
    }

    #[test]
    fn balanced_1500_gives_1125_375() {
        let s = stratified_split(&corpus(750, 750), &SplitSpec::default()).unwrap();
        assert_eq!(s.train.len(), 1125);
        assert_eq!(s.test.len(), 375);
        // 562.5 per class: the leftover slot goes to spam (first in order).
        assert_eq!(s.train.count(Label::Spam), 563);
        assert_eq!(s.train.count(Label::Ham), 562);
        assert_eq!(s.train.role(), CorpusRole::Train);
        assert_eq!(s.test.role(), CorpusRole::Test);
    }

    #[test]
    fn eight_examples_half_split() {
        let spec = SplitSpec {
            train_fraction: 0.5,
            ..SplitSpec::default()
        };
        let s = stratified_split(&corpus(4, 4), &spec).unwrap();
        for label in Label::ALL {
            assert_eq!(s.train.count(label), 2);
            assert_eq!(s.test.count(label), 2);
        }
    }

    #[test]
    fn near_one_fraction_on_four_is_degenerate() {
        let spec = SplitSpec {
            train_fraction: 0.999,
            ..SplitSpec::default()
        };
        // Three train slots over 2+2 examples leave spam with no test example.
        assert!(matches!(
            stratified_split(&corpus(2, 2), &spec),
            Err(CorpusError::DegenerateSplit { .. })
        ));
    }

    #[test]
    fn tiny_fraction_empties_train() {
        let spec = SplitSpec {
            train_fraction: 0.01,
            stratified: false,
            ..SplitSpec::default()
        };
        assert!(matches!(
            stratified_split(&corpus(3, 3), &spec),
            Err(CorpusError::DegenerateSplit { train: 0, test: 6 })
        ));
    }

    #[test]
    fn rejects_bad_fraction_and_singleton_class() {
        for f in [0.0, 1.0, -0.5, f64::NAN] {
            let spec = SplitSpec {
                train_fraction: f,
                ..SplitSpec::default()
            };
            assert!(matches!(
                stratified_split(&corpus(4, 4), &spec),
                Err(CorpusError::BadFraction(_))
            ));
        }
        assert!(matches!(
            stratified_split(&corpus(1, 4), &SplitSpec::default()),
            Err(CorpusError::TooFewExamples(Label::Spam))
        ));
    }

    proptest! {
        #[test]
        fn partition_determinism_and_stratification(
            spam in 2usize..40,
            ham in 2usize..40,
            fraction in 0.05f64..0.95,
            seed in any::<u64>(),
        ) {
            let c = corpus(spam, ham);
            let spec = SplitSpec { train_fraction: fraction, seed, stratified: true };
            let Ok(s) = stratified_split(&c, &spec) else { return Ok(()); };

            let train_ids: HashSet<_> = s.train.examples().iter().map(|e| e.id.clone()).collect();
            let test_ids: HashSet<_> = s.test.examples().iter().map(|e| e.id.clone()).collect();
            prop_assert!(train_ids.is_disjoint(&test_ids));
            prop_assert_eq!(train_ids.len() + test_ids.len(), c.len());
            prop_assert_eq!(s.train.len(), (fraction * c.len() as f64).floor() as usize);

            for label in Label::ALL {
                let n = c.count(label) as f64;
                let got = s.train.count(label) as f64 / n;
                prop_assert!((got - fraction).abs() < 1.0 / n);
            }

            let again = stratified_split(&c, &spec).unwrap();
            prop_assert_eq!(again, s);
        }
    }
}
