use proptest::prelude::*;
use scale_bench::eval::{classification_metrics_with_labels, confusion, scale_error_report, spearman};

/// Average rank by counting: 1 + #smaller + (#equal - 1) / 2.
fn brute_ranks(xs: &[f64]) -> Vec<f64> {
    xs.iter()
        .map(|&x| {
            let less = xs.iter().filter(|&&y| y < x).count() as f64;
            let eq = xs.iter().filter(|&&y| y == x).count() as f64;
            1.0 + less + (eq - 1.0) / 2.0
        })
        .collect()
}

fn brute_spearman(xs: &[f64], ys: &[f64]) -> f64 {
    let (rx, ry) = (brute_ranks(xs), brute_ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx.sqrt() * vy.sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn spearman_matches_brute_force(pairs in prop::collection::vec((0u8..12, 0u8..12), 2..80)) {
        let xs: Vec<f64> = pairs.iter().map(|p| p.0 as f64 / 4.0).collect();
        let ys: Vec<f64> = pairs.iter().map(|p| p.1 as f64 - 3.0).collect();
        match spearman(&xs, &ys) {
            Ok(r) => prop_assert!((r - brute_spearman(&xs, &ys)).abs() <= 1e-12),
            Err(_) => prop_assert!(xs.iter().all(|&x| x == xs[0]) || ys.iter().all(|&y| y == ys[0])),
        }
    }

    #[test]
    fn confusion_and_direct_metrics_agree(pairs in prop::collection::vec((0usize..5, 0usize..5), 1..300)) {
        let labels: Vec<String> = ["Right", "Left", "Other", "X", "Y"].iter().map(|s| s.to_string()).collect();
        let gold: Vec<&str> = pairs.iter().map(|p| labels[p.0].as_str()).collect();
        let pred: Vec<&str> = pairs.iter().map(|p| labels[p.1].as_str()).collect();
        let direct = classification_metrics_with_labels(&gold, &pred, &labels).unwrap();
        let cm = confusion(&gold, &pred, &labels).unwrap();
        prop_assert_eq!(cm.trace() as f64 / cm.total() as f64, direct.accuracy);
        prop_assert_eq!(cm.weighted_f1().unwrap(), direct.weighted_f1);
    }

    #[test]
    fn error_report_identity_fixed_point(xs in prop::collection::vec(-1.0f64..=1.0, 2..50)) {
        prop_assume!(xs.iter().any(|&x| x != xs[0]));
        let r = scale_error_report(&xs, &xs, 0.01).unwrap();
        prop_assert_eq!(r.spearman_r, Some(1.0));
        prop_assert_eq!(r.mae, 0.0);
        prop_assert_eq!(r.sign_flips.ul + r.sign_flips.lr, 0);
        prop_assert_eq!(r.dispersion_ratio, Some(1.0));
    }
}
