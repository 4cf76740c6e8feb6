//! Acceptance criteria 1 to 9 at full scale. Each test writes one
//! `criterion N: PASS|FAIL` line to stderr, bypassing output capture.

use ordstat::apps::{simulate_outputs, MsGsc, MsGscConfig};
use ordstat::distributions::{Distribution, Exponential, HalfNormal};
use ordstat::exact_exp::ExactExp;
use ordstat::generic_joint::GenericJoint;
use ordstat::mc_oracle::SampleSpec;
use ordstat::partition::{Theorem, TheoremShape};
use ordstat::verify::{self, CheckResult, Suite, VerifyConfig};
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

fn report(criterion: u32, title: &str, passed: bool, started: Instant, detail: &str) {
    let verdict = if passed { "PASS" } else { "FAIL" };
    let line = format!(
        "criterion {criterion}: {verdict}  {title} ({:.1} s) {detail}\n",
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stderr().write_all(line.as_bytes());
}

fn failures(checks: &[CheckResult]) -> Vec<String> {
    checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{}: observed {:e}, tolerance {:e}, {}", c.name, c.observed, c.tolerance, c.detail))
        .collect()
}

fn conclude(criterion: u32, title: &str, started: Instant, checks: &[CheckResult]) {
    let bad = failures(checks);
    let worst = checks.iter().filter(|c| c.tolerance > 0.0).map(|c| c.observed / c.tolerance).fold(0.0, f64::max);
    report(
        criterion,
        title,
        bad.is_empty(),
        started,
        &format!("[{} checks, worst observed/tolerance {worst:.2e}]", checks.len()),
    );
    assert!(bad.is_empty(), "{bad:#?}");
}

fn label(s: &TheoremShape) -> String {
    match s.m {
        Some(m) => format!("{} K={} Ks={} m={m}", s.theorem, s.k, s.ks),
        None => format!("{} K={} Ks={}", s.theorem, s.k, s.ks),
    }
}

#[test]
fn criterion_1_kernel_relations() {
    let t = Instant::now();
    let checks = verify::kernel_relations(100, 1);
    assert_eq!(checks.len(), 6);
    conclude(1, "kernel relations, 100 tuples per distribution, 1e-9", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 10.0);
}

#[test]
fn criterion_2_integral_identities() {
    let t = Instant::now();
    let checks = verify::integral_identities(4, 50, 2);
    assert_eq!(checks.len(), 12);
    conclude(2, "closed-form nests vs nested quadrature, depths 1-4, 50 configs, 1e-7", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 120.0);
}

#[test]
fn criterion_3_ordering_interchange() {
    let t = Instant::now();
    let checks = verify::ordering_interchange(10, 3);
    conclude(3, "integration orders agree pairwise, 10 configs, 1e-7", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 60.0);
}

#[test]
fn criterion_4_exact_self_consistency() {
    let t = Instant::now();
    let mut checks = verify::normalization(&verify::all_shapes(6), 1 << 18);
    checks.extend(verify::order_statistic_marginals(6));
    conclude(4, "every exact density integrates to one, K <= 6; marginals K <= 6", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 300.0);
}

#[test]
fn criterion_5_cross_path_equivalence() {
    let t = Instant::now();
    let checks = verify::exact_vs_numeric(5, 20, 5);
    assert_eq!(checks.len(), 6);
    conclude(5, "numerical inversion vs closed forms, 20 points per theorem, K <= 5, 1e-5", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 600.0);
}

#[test]
fn criterion_6_monte_carlo_agreement() {
    const N: usize = 1_000_000;
    let t = Instant::now();
    let e = ExactExp::new(1.0).unwrap();
    let dist: Arc<dyn Distribution> = Arc::new(Exponential::new(1.0).unwrap());
    let mut checks = Vec::new();
    for (i, shape) in verify::all_shapes(5).iter().enumerate() {
        let density = e.density(shape).unwrap();
        let partition = shape.partition().unwrap();
        let seeds: Vec<u64> = if density.dim() == 1 { (0..5).map(|s| 600 + 10 * i as u64 + s).collect() } else { vec![600 + 10 * i as u64] };
        let results: Vec<CheckResult> = seeds
            .iter()
            .map(|&s| verify::mc_check(&density, &SampleSpec::new(dist.clone(), partition.clone(), N, s).unwrap(), &label(shape)).unwrap())
            .collect();
        let passes = results.iter().filter(|r| r.passed).count();
        let needed = if density.dim() == 1 { 4 } else { 1 };
        let worst = results.iter().max_by(|a, b| a.observed.total_cmp(&b.observed)).unwrap();
        checks.push(CheckResult {
            name: worst.name.clone(),
            passed: passes >= needed,
            observed: worst.observed,
            tolerance: worst.tolerance,
            detail: format!("{passes} of {} seeds pass; {}", results.len(), worst.detail),
        });
    }
    let hn: Arc<dyn Distribution> = Arc::new(HalfNormal::new(1.0).unwrap());
    let shape = TheoremShape::new(Theorem::T5, 3, 2, Some(1)).unwrap();
    let generic = GenericJoint::new(hn.clone()).unwrap().density(&shape).unwrap();
    let spec = SampleSpec::new(hn, shape.partition().unwrap(), N, 699).unwrap();
    checks.push(verify::mc_check(&generic, &spec, "half-normal T5 K=3 Ks=2 m=1 (numeric)").unwrap());
    conclude(6, "simulation agreement, K <= 5, n = 1e6", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 600.0);
}

#[test]
fn criterion_7_msgsc() {
    const N: usize = 1_000_000;
    let t = Instant::now();
    let exp = Exponential::new(1.0).unwrap();
    let mut checks = Vec::new();
    for l in [2, 3, 4] {
        for ratio in [0.5, 1.0, 2.0] {
            let cfg = MsGscConfig::new(l, ratio, 1.0).unwrap();
            let ms = MsGsc::exact(cfg).unwrap();
            let mut out = simulate_outputs(&cfg, &exp, N, 700 + 10 * l as u64 + (4.0 * ratio) as u64);
            out.sort_unstable_by(f64::total_cmp);
            let mut worst: f64 = 0.0;
            for q in [0.05, 0.25, 0.5, 0.75, 0.95] {
                let x = out[(q * N as f64) as usize];
                let p = out.partition_point(|&o| o < x) as f64 / N as f64;
                let sigma = (p * (1.0 - p) / N as f64).sqrt();
                worst = worst.max((ms.output_cdf(x).unwrap() - p).abs() / sigma);
            }
            checks.push(CheckResult {
                name: format!("L={l} threshold/mean={ratio}"),
                passed: worst <= 3.0,
                observed: worst,
                tolerance: 3.0,
                detail: "largest |analytic - simulated| / sigma at 5 quantiles".into(),
            });
        }
    }
    for l in [2, 3, 4] {
        let ms = MsGsc::exact(MsGscConfig::new(l, 1e-9, 1.0).unwrap()).unwrap();
        let worst = [0.1, 0.5, 1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x| (ms.output_cdf(x).unwrap() - exp.cdf(x).powi(l as i32)).abs())
            .fold(0.0, f64::max);
        checks.push(CheckResult {
            name: format!("L={l} vanishing threshold"),
            passed: worst <= 1e-4,
            observed: worst,
            tolerance: 1e-4,
            detail: "distance to the best-path cdf".into(),
        });
    }
    conclude(7, "MS-GSC output cdf vs simulation, n = 1e6; vanishing threshold", t, &checks);
    assert!(t.elapsed().as_secs_f64() < 600.0);
}

#[test]
fn criterion_8_determinism() {
    let t = Instant::now();
    let cfg = VerifyConfig { seed: 42, ..VerifyConfig::default() };
    let a = verify::run(&cfg, &Suite::ALL).to_json();
    let b = verify::run(&cfg, &Suite::ALL).to_json();
    let passed = a == b;
    report(8, "two seed-42 verify runs give byte-identical reports", passed, t, &format!("[{} bytes]", a.len()));
    assert!(passed);
}

#[test]
fn criterion_9_stability_guard() {
    let t = Instant::now();
    let mut checks = Vec::new();
    for m in 1..=20 {
        let (min, max) = verify::stability_guard(20, m, 1000).unwrap();
        checks.push(CheckResult {
            name: format!("K=20 m={m}"),
            passed: max > 0.0 && min >= -1e-9 * max,
            observed: (-min / max).max(0.0),
            tolerance: 1e-9,
            detail: format!("min {min:e}, max {max:e}"),
        });
    }
    conclude(9, "K = 20 one-vs-rest density is nonnegative on 1e3-point grids", t, &checks);
}
