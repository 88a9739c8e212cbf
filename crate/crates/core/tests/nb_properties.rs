use proptest::prelude::*;
use spamlab::features::{FeatureVector, LabeledVector, Representation};
use spamlab::nb::NbModel;
use spamlab::Label;

fn corpus() -> impl Strategy<Value = (usize, Vec<LabeledVector>)> {
    (1usize..=6).prop_flat_map(|v| {
        let doc = (proptest::collection::vec(0u8..4, v), any::<bool>()).prop_map(|(counts, spam)| LabeledVector {
            vector: FeatureVector::from_pairs(
                counts.iter().enumerate().map(|(i, &c)| (i as u32, f64::from(c))),
                Representation::Count,
            ),
            label: if spam { Label::Spam } else { Label::Ham },
        });
        (Just(v), proptest::collection::vec(doc, 2..12))
    })
}

fn query(v: usize) -> impl Strategy<Value = FeatureVector> {
    proptest::collection::vec(0u32..50, v).prop_map(|c| {
        FeatureVector::from_pairs(
            c.iter().enumerate().map(|(i, &x)| (i as u32, f64::from(x))),
            Representation::Count,
        )
    })
}

fn both_classes(data: &[LabeledVector]) -> bool {
    Label::ALL.iter().all(|l| data.iter().any(|d| d.label == *l))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn posterior_sums_to_one(
        (v, data, x) in corpus().prop_flat_map(|(v, data)| (Just(v), Just(data), query(v))),
        alpha in 0.01f64..5.0,
    ) {
        prop_assume!(both_classes(&data));
        let m = NbModel::fit(&data, v, alpha).unwrap();
        let post = m.posterior(&x).unwrap();
        prop_assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(post.iter().all(|p| (0.0..=1.0).contains(p)));
    }

    #[test]
    fn smoothed_likelihoods_are_finite(((v, data), alpha) in (corpus(), 1e-6f64..5.0)) {
        prop_assume!(both_classes(&data));
        let m = NbModel::fit(&data, v, alpha).unwrap();
        for c in 0..m.class_order().len() {
            for t in 0..v as u32 {
                let l = m.log_likelihood(c, t);
                prop_assert!(l.is_finite() && l <= 0.0);
            }
        }
    }

    #[test]
    fn prediction_ignores_constant_shift((v, data) in corpus(), shift in -1e3f64..1e3) {
        prop_assume!(both_classes(&data));
        let m = NbModel::fit(&data, v, 1.0).unwrap();
        for d in &data {
            let scores = m.log_joint(&d.vector).unwrap();
            let shifted: Vec<f64> = scores.iter().map(|s| s + shift).collect();
            let scale = scores.iter().fold(shift.abs(), |m, s| m.max(s.abs()));
            let gap = (scores[0] - scores[1]).abs();
            if gap == 0.0 {
                prop_assert_eq!(shifted[0], shifted[1]);
            } else if gap > 64.0 * f64::EPSILON * scale {
                // First maximum wins, as in the model.
                let best = (0..shifted.len()).fold(0, |b, i| if shifted[i] > shifted[b] { i } else { b });
                prop_assert_eq!(m.predict(&d.vector).unwrap(), m.class_order()[best]);
            }
        }
    }
}
