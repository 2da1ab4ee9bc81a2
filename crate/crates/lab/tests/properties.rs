use proptest::prelude::*;

use randset_core::random_sets::BrownianLevelSampler;
use randset_lab::config::ExperimentConfig;
use randset_lab::parallel::Pool;
use randset_lab::report::ReportRow;

const LINES: &[&str] = &["experiment = equiv", "seed = 11", "t = 2", "cells = 16", "a = 0.5", "family = bessel"];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn digest_ignores_line_order(order in Just((0..LINES.len()).collect::<Vec<_>>()).prop_shuffle(), workers in 1usize..9) {
        let shuffled: Vec<&str> = order.iter().map(|&i| LINES[i]).collect();
        let a = ExperimentConfig::parse(&LINES.join("\n")).unwrap();
        let mut b = ExperimentConfig::parse(&shuffled.join("\n")).unwrap();
        b.set("workers", &workers.to_string()).unwrap();
        prop_assert_eq!(a.digest(), b.digest());
        prop_assert_eq!(a.canonical(), b.canonical());
    }

    #[test]
    fn laws_do_not_depend_on_worker_count(seed in any::<u64>(), count in 1u64..3000, workers in 2usize..5) {
        let s = BrownianLevelSampler::new(1.0, 0.5, 0.05, 0.5).unwrap();
        let one = Pool::new(1).unwrap().sampler_law(&s, 8, count, seed).unwrap();
        let many = Pool::new(workers).unwrap().sampler_law(&s, 8, count, seed).unwrap();
        prop_assert_eq!(one, many);
    }

    #[test]
    fn rows_round_trip(value in any::<f64>().prop_filter("finite", |v| v.is_finite()), lo in proptest::option::of(-1e3f64..1e3)) {
        let r = ReportRow {
            experiment: "e".into(),
            params: "0123456789abcdef".into(),
            statistic: "s".into(),
            value,
            ci_lo: lo,
            ci_hi: None,
            verdict: "info".into(),
        };
        prop_assert_eq!(ReportRow::from_csv(&r.csv()).unwrap(), r);
    }
}
