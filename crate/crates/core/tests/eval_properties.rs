use proptest::prelude::*;
use spamlab::eval::{confusion, metrics, ConfusionMatrix};
use spamlab::Label;

fn labels(n: usize) -> impl Strategy<Value = Vec<Label>> {
    proptest::collection::vec(prop_oneof![Just(Label::Spam), Just(Label::Ham)], n)
}

fn pairs() -> impl Strategy<Value = (Vec<Label>, Vec<Label>)> {
    (1usize..=10).prop_flat_map(|n| (labels(n), labels(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn recount_oracle((pred, truth) in pairs(), spam_positive in any::<bool>()) {
        let pos = if spam_positive { Label::Spam } else { Label::Ham };
        let cm = confusion(&pred, &truth, pos).unwrap();
        let count = |p: bool, t: bool| pred.iter().zip(&truth).filter(|(a, b)| (**a == pos) == p && (**b == pos) == t).count() as u64;
        let (tp, fp, fn_, tn) = (count(true, true), count(true, false), count(false, true), count(false, false));
        prop_assert_eq!((cm.tp, cm.fp, cm.tn, cm.fn_), (tp, fp, tn, fn_));

        let m = metrics(&cm).unwrap();
        let n = pred.len() as u64;
        prop_assert_eq!(m.accuracy, (tp + tn) as f64 / n as f64);
        if tp + fp > 0 {
            prop_assert_eq!(m.precision, tp as f64 / (tp + fp) as f64);
        } else {
            prop_assert!(m.precision == 0.0 && m.zero_division.precision);
        }
        if tp + fn_ > 0 {
            prop_assert_eq!(m.recall, tp as f64 / (tp + fn_) as f64);
        } else {
            prop_assert!(m.recall == 0.0 && m.zero_division.recall);
        }
        if tp > 0 {
            prop_assert_eq!(m.f1, (2 * tp) as f64 / (2 * tp + fp + fn_) as f64);
            let (p, r) = (m.precision, m.recall);
            prop_assert!((m.f1 - 2.0 * p * r / (p + r)).abs() < 1e-12);
        } else {
            prop_assert!(m.f1 == 0.0 && m.zero_division.f1);
        }
    }

    #[test]
    fn swapping_positive_class_permutes_cells((pred, truth) in pairs()) {
        let a = confusion(&pred, &truth, Label::Spam).unwrap();
        let b = confusion(&pred, &truth, Label::Ham).unwrap();
        prop_assert_eq!((b.tp, b.fp, b.tn, b.fn_), (a.tn, a.fn_, a.tp, a.fp));
        prop_assert_eq!(metrics(&a).unwrap().accuracy, metrics(&b).unwrap().accuracy);
    }

    #[test]
    fn metrics_stay_in_unit_interval(tp in 0u64..1000, fp in 0u64..1000, tn in 0u64..1000, fn_ in 0u64..1000) {
        prop_assume!(tp + fp + tn + fn_ > 0);
        let m = metrics(&ConfusionMatrix { tp, fp, tn, fn_, positive_label: Label::Spam }).unwrap();
        for v in [m.accuracy, m.precision, m.recall, m.f1] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
    }
}
