use ordstat::apps::{combined_paths, simulate_outputs, MsGsc, MsGscConfig, OutageConvention};
use ordstat::distributions::{Distribution, Exponential};
use ordstat::mc_oracle::map_sorted;
use proptest::prelude::*;

const N: usize = 1_000_000;

fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

#[test]
fn second_stage_probability_matches_simulation() {
    let cfg = MsGscConfig::new(3, 1.0, 1.0).unwrap();
    let ms = MsGsc::exact(cfg).unwrap();
    let analytic = ms.stage_probability(2, 2.0).unwrap();
    let exp = Exponential::new(1.0).unwrap();
    let hits = map_sorted(&exp, 3, N, 21, |s| {
        s[0] < 1.0 && s[0] + s[1] >= 1.0 && s[0] + s[1] < 2.0
    });
    let p = hits.iter().filter(|&&h| h).count() as f64 / N as f64;
    assert!((p - analytic).abs() <= 3.0 * binomial_sigma(p, N), "{p} vs {analytic}");
}

#[test]
fn output_cdf_matches_simulation() {
    let cfg = MsGscConfig::new(4, 1.5, 1.0).unwrap();
    let ms = MsGsc::exact(cfg).unwrap();
    let exp = Exponential::new(1.0).unwrap();
    let out = simulate_outputs(&cfg, &exp, N, 22);
    for x in [1.5, 2.0, 3.0, 5.0] {
        let p = out.iter().filter(|&&v| v < x).count() as f64 / N as f64;
        let a = ms.output_cdf(x).unwrap();
        assert!((p - a).abs() <= 3.0 * binomial_sigma(p, N), "x = {x}: {p} vs {a}");
    }
}

#[test]
fn outage_convention_matches_simulation() {
    let cfg = MsGscConfig::new(3, 2.0, 1.0).unwrap().with_convention(OutageConvention::Outage);
    let ms = MsGsc::exact(cfg).unwrap();
    let exp = Exponential::new(1.0).unwrap();
    let out = simulate_outputs(&cfg, &exp, 200_000, 23);
    for x in [0.5, 2.5, 4.0] {
        let p = out.iter().filter(|&&v| v < x).count() as f64 / out.len() as f64;
        let a = ms.output_cdf(x).unwrap();
        assert!((p - a).abs() <= 3.0 * binomial_sigma(p, out.len()), "x = {x}: {p} vs {a}");
    }
}

#[test]
fn vanishing_threshold_gives_best_path() {
    for l in 2..=4 {
        let ms = MsGsc::exact(MsGscConfig::new(l, 1e-9, 1.3).unwrap()).unwrap();
        let exp = Exponential::new(1.3).unwrap();
        for x in [0.2, 1.0, 2.5, 6.0] {
            let best = exp.cdf(x).powi(l as i32);
            assert!((ms.output_cdf(x).unwrap() - best).abs() < 1e-4);
        }
    }
}

#[test]
fn cdf_is_monotone_and_bounded() {
    let ms = MsGsc::exact(MsGscConfig::new(4, 2.0, 1.0).unwrap()).unwrap();
    let mut prev = 0.0;
    for i in 1..=50 {
        let v = ms.output_cdf(0.25 * i as f64).unwrap();
        assert!((0.0..=1.0).contains(&v));
        assert!(v >= prev - 1e-12);
        prev = v;
    }
    assert!((ms.output_cdf(60.0).unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn cdf_is_continuous_in_threshold() {
    let x = 4.0;
    let values: Vec<f64> = (0..=40)
        .map(|i| {
            let gt = 0.5 + 0.05 * i as f64;
            MsGsc::exact(MsGscConfig::new(3, gt, 1.0).unwrap()).unwrap().output_cdf(x).unwrap()
        })
        .collect();
    for w in values.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.02, "{w:?}");
    }
}

proptest! {
    #[test]
    fn higher_threshold_never_combines_fewer(
        mut g in prop::collection::vec(0.0f64..5.0, 1..6),
        t1 in 0.01f64..10.0,
        dt in 0.0f64..5.0,
    ) {
        g.sort_by(|a, b| b.total_cmp(a));
        let n = |t: f64| combined_paths(&g, t).unwrap_or(g.len() + 1);
        prop_assert!(n(t1 + dt) >= n(t1));
    }
}
