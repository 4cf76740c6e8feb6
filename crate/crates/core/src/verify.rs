//! Verification suites that check the closed forms, the numeric path and
//! the Monte Carlo oracle against each other, with a deterministic JSON
//! report.

use crate::density::JointDensity;
use crate::distributions::{kernel_c, kernel_e, kernel_mu, Distribution, Exponential, HalfNormal, C64};
use crate::error::{Error, Result};
use crate::exact_exp::{BestKsOneVsRest, ExactExp};
use crate::generic_joint::GenericJoint;
use crate::kernels::{brute_force, closed_form, reorder_check, NestedIntegralSpec, LISTED_ORDERINGS};
use crate::mc_oracle::{
    compare_bins, corner_cdf_check, default_corners, ks_distance, sample_partial_sums, BinSpec, CdfTable,
    EmpiricalDensity, SampleSpec, KS_THRESHOLD,
};
use crate::partition::{Case, Partition, Theorem, TheoremShape};
use crate::qmc;
use crate::quadrature::{try_integrate, try_integrate_to_infinity, QuadConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

pub const REPORT_SCHEMA: &str = "ordstat-verify/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Kernels,
    Identities,
    ExactVsNumeric,
    ExactVsMc,
    Normalization,
}

impl Suite {
    pub const ALL: [Suite; 5] =
        [Suite::Kernels, Suite::Identities, Suite::ExactVsNumeric, Suite::ExactVsMc, Suite::Normalization];
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Kernels => "kernels",
            Suite::Identities => "identities",
            Suite::ExactVsNumeric => "exact-vs-numeric",
            Suite::ExactVsMc => "exact-vs-mc",
            Suite::Normalization => "normalization",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.to_string() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::Parse(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Deepest nest for the integral identities (1..=4).
    pub depth: usize,
    pub max_k: usize,
    pub mc_samples: usize,
    /// Random configurations per check.
    pub configs: usize,
    pub qmc_points: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: 42, depth: 4, max_k: 4, mc_samples: 100_000, configs: 20, qmc_points: 1 << 18 }
    }
}

/// One named comparison. `observed` is the worst error seen, compared with
/// `tolerance` in the direction the check describes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub observed: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: impl Into<String>, observed: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: observed <= tolerance, observed, tolerance, detail: detail.into() }
    }

    fn at_least(name: impl Into<String>, observed: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed: observed >= tolerance, observed, tolerance, detail: detail.into() }
    }

    fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self { name: name.into(), passed: false, observed: f64::NAN, tolerance: f64::NAN, detail: err.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub version: &'static str,
    pub config: VerifyConfig,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for s in &self.suites {
            let ok = s.checks.iter().filter(|c| c.passed).count();
            out += &format!("{:<17} {:>4}/{:<4} {}\n", s.suite, ok, s.checks.len(), if s.passed { "pass" } else { "FAIL" });
            for c in s.checks.iter().filter(|c| !c.passed) {
                out += &format!("  failed: {} (observed {:e}, tolerance {:e}) {}\n", c.name, c.observed, c.tolerance, c.detail);
            }
        }
        out += if self.passed { "all suites passed\n" } else { "verification FAILED\n" };
        out
    }
}

pub fn run(cfg: &VerifyConfig, suites: &[Suite]) -> Report {
    let suites: Vec<SuiteReport> = suites
        .iter()
        .map(|&suite| {
            let checks = match suite {
                Suite::Kernels => kernel_relations(cfg.configs * 5, cfg.seed),
                Suite::Identities => {
                    let mut c = integral_identities(cfg.depth, cfg.configs, cfg.seed);
                    c.extend(ordering_interchange(cfg.configs.min(10), cfg.seed));
                    c
                }
                Suite::ExactVsNumeric => exact_vs_numeric(cfg.max_k, cfg.configs, cfg.seed),
                Suite::ExactVsMc => exact_vs_mc(&all_shapes(cfg.max_k), cfg.mc_samples, cfg.seed, cfg.qmc_points),
                Suite::Normalization => {
                    let mut c = normalization(&all_shapes(cfg.max_k), cfg.qmc_points);
                    c.extend(order_statistic_marginals(cfg.max_k));
                    c
                }
            };
            SuiteReport { suite, passed: checks.iter().all(|c| c.passed), checks }
        })
        .collect();
    Report {
        schema: REPORT_SCHEMA,
        version: env!("CARGO_PKG_VERSION"),
        config: *cfg,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

fn suite_rng(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt);
    rng
}

fn rel_err(a: C64, b: C64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(1e-300)
}

fn random_dist(rng: &mut ChaCha8Rng, which: usize) -> Arc<dyn Distribution> {
    let p = rng.random_range(0.5..2.0);
    if which == 0 {
        Arc::new(Exponential::new(p).expect("positive mean"))
    } else {
        Arc::new(HalfNormal::new(p).expect("positive scale"))
    }
}

fn random_lambda(rng: &mut ChaCha8Rng, dist: &dyn Distribution) -> C64 {
    let top = if dist.abscissa().is_finite() { 0.9 * dist.abscissa() } else { 1.5 };
    C64::new(rng.random_range(-3.0..top), rng.random_range(-4.0..4.0))
}

/// The three relations between `c`, `e` and `mu` at random arguments.
pub fn kernel_relations(n: usize, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (which, label) in [(0, "exponential"), (1, "half-normal")] {
        let mut rng = suite_rng(seed, 100 + which as u64);
        let cases: Vec<_> = (0..n)
            .map(|_| {
                let d = random_dist(&mut rng, which);
                let l = random_lambda(&mut rng, d.as_ref());
                let top = 4.0 * d.mean();
                let a: f64 = rng.random_range(0.0..top);
                let b: f64 = rng.random_range(0.0..top);
                (d, l, a.min(b), a.max(b))
            })
            .collect();
        let errs: Result<Vec<[f64; 3]>> = cases
            .par_iter()
            .map(|(d, l, a, b)| {
                let d = d.as_ref();
                let (ca, cb) = (kernel_c(d, *a, *l)?, kernel_c(d, *b, *l)?);
                let (ea, eb, e0) = (kernel_e(d, *a, *l)?, kernel_e(d, *b, *l)?, kernel_e(d, 0.0, *l)?);
                let mu = kernel_mu(d, *a, *b, *l)?;
                let s1 = ca.norm().max(ea.norm()).max(e0.norm());
                let s2 = mu.norm().max(ca.norm()).max(cb.norm());
                let s3 = mu.norm().max(ea.norm()).max(eb.norm());
                Ok([rel_err(ca + ea, e0, s1), rel_err(mu, cb - ca, s2), rel_err(mu, ea - eb, s3)])
            })
            .collect();
        match errs {
            Ok(errs) => {
                for (i, rel) in ["c + e = mgf", "mu = c(b) - c(a)", "mu = e(a) - e(b)"].iter().enumerate() {
                    let worst = errs.iter().map(|e| e[i]).fold(0.0, f64::max);
                    out.push(CheckResult::at_most(format!("{rel} ({label})"), worst, 1e-9, format!("{n} random tuples")));
                }
            }
            Err(e) => out.push(CheckResult::failed(format!("kernel relations ({label})"), &e)),
        }
    }
    out
}

/// Closed-form nested integrals against literal nested quadrature.
pub fn integral_identities(max_depth: usize, n: usize, seed: u64) -> Vec<CheckResult> {
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 400 };
    let mut out = Vec::new();
    for (dir, label) in [(0, "descending"), (1, "ascending"), (2, "interval")] {
        for depth in 1..=max_depth.min(4) {
            let mut rng = suite_rng(seed, 200 + 10 * dir as u64 + depth as u64);
            let cases: Vec<_> = (0..n)
                .map(|_| {
                    let which = rng.random_range(0..2);
                    let d = random_dist(&mut rng, which);
                    let top = if d.abscissa().is_finite() { 0.8 * d.abscissa() } else { 1.0 };
                    let l = C64::new(rng.random_range(-2.0..top), rng.random_range(-2.0..2.0));
                    let a: f64 = rng.random_range(0.0..2.0 * d.mean());
                    let b: f64 = a + rng.random_range(0.1..2.0 * d.mean());
                    let spec = match dir {
                        0 => NestedIntegralSpec::descending(depth, b, l),
                        1 => NestedIntegralSpec::ascending(depth, a, l),
                        _ => NestedIntegralSpec::interval(depth, a, b, l),
                    };
                    (d, spec)
                })
                .collect();
            let errs: Result<Vec<f64>> = cases
                .par_iter()
                .map(|(d, spec)| {
                    let exact = closed_form(d.as_ref(), spec)?;
                    let brute = brute_force(d.as_ref(), spec, &cfg)?;
                    Ok(rel_err(exact, brute, exact.norm().max(brute.norm())))
                })
                .collect();
            let name = format!("{label} nest depth {depth}");
            out.push(match errs {
                Ok(e) => CheckResult::at_most(name, e.into_iter().fold(0.0, f64::max), 1e-7, format!("{n} random configurations")),
                Err(e) => CheckResult::failed(name, &e),
            });
        }
    }
    out
}

/// All listed integration orders of a depth-4 chain agree pairwise.
pub fn ordering_interchange(n: usize, seed: u64) -> Vec<CheckResult> {
    let cfg = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-11, max_intervals: 400 };
    let mut rng = suite_rng(seed, 300);
    let cases: Vec<_> = (0..n)
        .map(|_| {
            let which = rng.random_range(0..2);
            let d = random_dist(&mut rng, which);
            let lo: f64 = rng.random_range(0.0..d.mean());
            let hi = lo + rng.random_range(0.2..3.0 * d.mean());
            let top = if d.abscissa().is_finite() { 0.8 * d.abscissa() } else { 1.0 };
            let l = [0; 4].map(|_| rng.random_range(-1.5..top));
            (d, lo, hi, l)
        })
        .collect();
    let errs: Result<Vec<f64>> = cases
        .par_iter()
        .map(|(d, lo, hi, l)| {
            let v: Vec<f64> = LISTED_ORDERINGS
                .iter()
                .map(|o| reorder_check(d.as_ref(), *o, (*lo, *hi), *l, &cfg))
                .collect::<Result<_>>()?;
            let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let spread = v.iter().fold(f64::MIN, |m, &x| m.max(x)) - v.iter().fold(f64::MAX, |m, &x| m.min(x));
            Ok(spread / scale.max(1e-300))
        })
        .collect();
    let name = "integration orders agree";
    vec![match errs {
        Ok(e) => CheckResult::at_most(name, e.into_iter().fold(0.0, f64::max), 1e-7, format!("{n} random chains")),
        Err(e) => CheckResult::failed(name, &e),
    }]
}

/// Every supported shape with `K <= max_k`.
pub fn all_shapes(max_k: usize) -> Vec<TheoremShape> {
    let mut out = Vec::new();
    let mut push = |t, k, ks, m| {
        if let Ok(s) = TheoremShape::new(t, k, ks, m) {
            out.push(s);
        }
    };
    for k in 1..=max_k {
        push(Theorem::T1, k, k, None);
        for m in 1..=k {
            push(Theorem::T2, k, k, Some(m));
            push(Theorem::T3, k, k, Some(m));
        }
        for ks in 1..k {
            push(Theorem::T4, k, ks, None);
        }
        for ks in 2..k {
            for m in 1..=ks {
                push(Theorem::T5, k, ks, Some(m));
                push(Theorem::T6, k, ks, Some(m));
            }
        }
    }
    out
}

fn shape_label(s: &TheoremShape) -> String {
    match s.m {
        Some(m) => format!("{} K={} Ks={} m={m}", s.theorem, s.k, s.ks),
        None => format!("{} K={} Ks={}", s.theorem, s.k, s.ks),
    }
}

/// A random shape of `theorem` with `K <= max_k`.
fn random_shape(rng: &mut ChaCha8Rng, theorem: Theorem, max_k: usize) -> TheoremShape {
    let shapes: Vec<TheoremShape> = all_shapes(max_k).into_iter().filter(|s| s.theorem == theorem && s.k >= 2).collect();
    shapes[rng.random_range(0..shapes.len())]
}

/// Generic numerical-inversion path against the closed forms at random
/// points drawn from the distribution of each shape.
pub fn exact_vs_numeric(max_k: usize, points: usize, seed: u64) -> Vec<CheckResult> {
    let theorems = [Theorem::T1, Theorem::T2, Theorem::T3, Theorem::T4, Theorem::T5, Theorem::T6];
    theorems
        .iter()
        .enumerate()
        .map(|(ti, &t)| {
            let mut rng = suite_rng(seed, 400 + ti as u64);
            let cases: Vec<(TheoremShape, f64, u64)> = (0..points)
                .map(|_| (random_shape(&mut rng, t, max_k), rng.random_range(0.5..2.0), rng.random()))
                .collect();
            let errs: Result<Vec<(f64, String)>> = cases
                .par_iter()
                .map(|(shape, g, s)| {
                    let dist: Arc<dyn Distribution> = Arc::new(Exponential::new(*g)?);
                    let spec = SampleSpec::new(dist.clone(), shape.partition()?, 1, *s)?;
                    let z = sample_partial_sums(&spec).data;
                    let exact = ExactExp::new(*g)?.density(shape)?.evaluate(&z)?;
                    let numeric = GenericJoint::new(dist)?.density(shape)?.evaluate(&z)?;
                    let e = (exact - numeric).abs() / exact.abs().max(1e-300);
                    Ok((e, format!("{} at {z:?}", shape_label(shape))))
                })
                .collect();
            let name = format!("{t} numeric vs exact");
            match errs {
                Ok(e) => {
                    let (worst, at) = e.into_iter().fold((0.0, String::new()), |a, b| if b.0 > a.0 { b } else { a });
                    CheckResult::at_most(name, worst, 1e-5, format!("{points} random points, worst {at}"))
                }
                Err(e) => CheckResult::failed(name, &e),
            }
        })
        .collect()
}

/// Partition matching the fine coordinates of a one-vs-rest shape.
pub fn fine_partition(b: &BestKsOneVsRest) -> Result<Partition> {
    let (k, ks, m) = (b.k, b.ks, b.m);
    let groups = match b.case {
        Case::A => vec![vec![1], (2..ks).collect(), vec![ks]],
        Case::B => vec![(1..m).collect(), vec![m], (m + 1..ks).collect(), vec![ks]],
        Case::C => vec![(1..ks - 1).collect(), vec![ks - 1], vec![ks]],
        Case::D => vec![vec![ks], (1..ks).collect()],
    };
    Partition::new(k, ks, groups)
}

fn quantile(mut v: Vec<f64>, p: f64) -> f64 {
    v.sort_unstable_by(f64::total_cmp);
    v[((v.len() - 1) as f64 * p) as usize]
}

/// KS test for one-dimensional shapes, histogram comparison for
/// two-dimensional ones.
pub fn mc_check(density: &JointDensity, spec: &SampleSpec, label: &str) -> Result<CheckResult> {
    let s = sample_partial_sums(spec);
    match density.dim() {
        1 => {
            let upper = quantile(s.data.clone(), 1.0) * 1.05;
            let cdf = CdfTable::from_density(density, upper, 4000)?;
            let d = ks_distance(&s.data, |x| cdf.eval(x)) * (s.len() as f64).sqrt();
            Ok(CheckResult::at_most(format!("{label} KS"), d, KS_THRESHOLD, format!("KS*sqrt(n), n = {}", s.len())))
        }
        2 => {
            let axes: Vec<(f64, f64, usize)> = (0..2).map(|d| (0.0, quantile(s.column(d), 0.995), 20)).collect();
            let h = EmpiricalDensity::from_samples(&s, BinSpec::uniform(&axes)?)?;
            let c = compare_bins(&h, density)?;
            Ok(CheckResult::at_least(
                format!("{label} histogram"),
                c.fraction(),
                0.95,
                format!("{} of {} occupied bins within 3 sigma, n = {}", c.within, c.occupied, s.len()),
            ))
        }
        _ => {
            let corners = default_corners(&s);
            let checks = corner_cdf_check(&s, density, &corners, 1 << 18, 1e-3)?;
            let failed = checks.iter().filter(|c| !c.passed).count();
            let worst = checks.iter().map(|c| (c.analytic - c.empirical).abs()).fold(0.0, f64::max);
            Ok(CheckResult {
                name: format!("{label} corner cdf"),
                passed: failed == 0,
                observed: worst,
                tolerance: 1e-3,
                detail: format!("{failed} of 8 corners outside 3 sigma + QMC tolerance, n = {}", s.len()),
            })
        }
    }
}

/// Exact densities against simulation for every shape, including the fine
/// three- and four-dimensional densities behind T5.
pub fn exact_vs_mc(shapes: &[TheoremShape], n: usize, seed: u64, _qmc_points: u64) -> Vec<CheckResult> {
    let e = ExactExp::new(1.0).expect("unit mean");
    let dist: Arc<dyn Distribution> = Arc::new(Exponential::new(1.0).expect("unit mean"));
    let mut out = Vec::new();
    for (i, shape) in shapes.iter().enumerate() {
        let label = shape_label(shape);
        let run = || -> Result<Vec<CheckResult>> {
            let mut v = Vec::new();
            let spec = SampleSpec::new(dist.clone(), shape.partition()?, n, seed.wrapping_add(i as u64))?;
            v.push(mc_check(&e.density(shape)?, &spec, &label)?);
            if shape.theorem == Theorem::T5 {
                let b = e.jpdf_one_vs_rest_best_ks(shape.k, shape.ks, shape.m.expect("T5 has m"))?;
                if b.fine.dim() > 2 {
                    let spec = SampleSpec::new(dist.clone(), fine_partition(&b)?, n, seed.wrapping_add(i as u64))?;
                    v.push(mc_check(&b.fine, &spec, &format!("{label} fine case {}", b.case))?);
                }
            }
            Ok(v)
        };
        match run() {
            Ok(v) => out.extend(v),
            Err(err) => out.push(CheckResult::failed(label, &err)),
        }
    }
    out
}

/// `y` positions where the support of a 2-D density changes at fixed `x`,
/// found on lines `y = a x` with `a` in `[0, amax]`.
fn support_breaks(d: &JointDensity, x: f64, amax: f64) -> Vec<f64> {
    let steps = 256;
    let inside = |a: f64| d.in_support(&[x, a * x]);
    let mut out = Vec::new();
    let mut prev = inside(0.0);
    for i in 1..=steps {
        let a1 = amax * i as f64 / steps as f64;
        let cur = inside(a1);
        if cur != prev {
            let (mut lo, mut hi) = (amax * (i - 1) as f64 / steps as f64, a1);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if inside(mid) == prev {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push(0.5 * (lo + hi) * x);
        }
        prev = cur;
    }
    out
}

/// Total mass of a density of dimension 1 or 2 by (iterated) quadrature.
pub fn total_mass(d: &JointDensity, scale: f64) -> Result<f64> {
    let knots: Vec<f64> = (0..12).map(|j| scale * 2f64.powi(j)).collect();
    let outer = QuadConfig { abs_tol: 1e-11, rel_tol: 1e-10, max_intervals: 2000 };
    match d.dim() {
        1 => Ok(try_integrate_to_infinity(|x| d.evaluate(&[x]), 0.0, &knots, &outer)?.value),
        2 => {
            let amax = (d.meta.k + 1) as f64;
            let inner = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 1000 };
            Ok(try_integrate_to_infinity(
                |x| {
                    if x == 0.0 {
                        return Ok(0.0);
                    }
                    let breaks = support_breaks(d, x, amax);
                    let mut acc = 0.0;
                    let mut lo = 0.0;
                    let mut edges = breaks.clone();
                    edges.push(f64::INFINITY);
                    for hi in edges {
                        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + x + scale };
                        if d.in_support(&[x, mid]) {
                            acc += if hi.is_finite() {
                                try_integrate(|y| d.evaluate(&[x, y]), lo, hi, &[], &inner)?.value
                            } else {
                                try_integrate_to_infinity(|y| d.evaluate(&[x, y]), lo, &knots, &inner)?.value
                            };
                        }
                        lo = hi;
                    }
                    Ok(acc)
                },
                0.0,
                &knots,
                &outer,
            )?
            .value)
        }
        n => Err(Error::invalid(format!("iterated quadrature covers dims 1 and 2, got {n}"))),
    }
}

/// Mass of a three- or four-dimensional fine density by a Halton rule in
/// coordinates that map a product domain onto its support cone.
pub fn fine_mass(b: &BestKsOneVsRest, n: u64) -> Result<f64> {
    use qmc::Axis::{Exp, Unit};
    let (ks, m) = (b.ks as f64, b.m as f64);
    let f = &b.fine;
    match b.case {
        Case::A => {
            let na = ks - 2.0;
            qmc::product_integral(
                |p| {
                    let (t, u, v) = (p[0], p[1], p[2]);
                    Ok(na * u * f.evaluate(&[t + u, na * (t + v * u), t])?)
                },
                &[Exp(0.5), Exp(1.0), Unit],
                n,
            )
        }
        Case::C => {
            let nc = ks - 2.0;
            qmc::product_integral(
                |p| {
                    let (t, u, w) = (p[0], p[1], p[2]);
                    f.evaluate(&[nc * (t + u) + w, t + u, t])
                },
                &[Exp(0.5), Exp(1.0), Exp(1.0)],
                n,
            )
        }
        Case::B => {
            let nb = ks - m - 1.0;
            qmc::product_integral(
                |p| {
                    let (t, u, v, w) = (p[0], p[1], p[2], p[3]);
                    Ok(nb * u * f.evaluate(&[(m - 1.0) * (t + u) + w, t + u, nb * (t + v * u), t])?)
                },
                &[Exp(0.5), Exp(1.0), Unit, Exp(1.0)],
                n,
            )
        }
        Case::D => Err(Error::invalid("case d fine densities are two-dimensional")),
    }
}

/// Every shape integrates to one; fine densities of dimension 3 and 4 are
/// integrated with a Halton rule.
pub fn normalization(shapes: &[TheoremShape], qmc_points: u64) -> Vec<CheckResult> {
    let e = ExactExp::new(1.0).expect("unit mean");
    shapes
        .par_iter()
        .flat_map_iter(|shape| {
            let label = shape_label(shape);
            let run = || -> Result<Vec<CheckResult>> {
                let mut v = Vec::new();
                let mass = total_mass(&e.density(shape)?, 1.0)?;
                v.push(CheckResult::at_most(format!("{label} mass"), (mass - 1.0).abs(), 1e-6, format!("mass {mass}")));
                if shape.theorem == Theorem::T5 {
                    let b = e.jpdf_one_vs_rest_best_ks(shape.k, shape.ks, shape.m.expect("T5 has m"))?;
                    if b.fine.dim() > 2 {
                        let mass = fine_mass(&b, qmc_points)?;
                        v.push(CheckResult::at_most(
                            format!("{label} fine case {} mass", b.case),
                            (mass - 1.0).abs(),
                            1e-3,
                            format!("QMC mass {mass}"),
                        ));
                    }
                }
                Ok(v)
            };
            match run() {
                Ok(v) => v,
                Err(err) => vec![CheckResult::failed(label, &err)],
            }
        })
        .collect()
}

/// The marginal of `g_m` taken from the all-`K` one-vs-rest density
/// against the order-statistic density of the `m`-th largest.
pub fn order_statistic_marginals(max_k: usize) -> Vec<CheckResult> {
    let e = ExactExp::new(1.0).expect("unit mean");
    let inner = QuadConfig { abs_tol: 1e-14, rel_tol: 1e-12, max_intervals: 1000 };
    (1..=max_k.max(2))
        .flat_map(|k| (1..=k).map(move |m| (k, m)))
        .filter(|&(k, _)| k >= 2)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(k, m)| {
            let name = format!("T2 K={k} m={m} marginal");
            let run = || -> Result<f64> {
                let d = e.jpdf_one_vs_rest_all_k(k, m)?;
                let mut worst: f64 = 0.0;
                for x in [0.05, 0.3, 0.8, 1.5, 3.0] {
                    let breaks = support_breaks(&d, x, k as f64 + 1.0);
                    let mut acc = 0.0;
                    let mut lo = 0.0;
                    let mut edges = breaks;
                    edges.push(f64::INFINITY);
                    for hi in edges {
                        let mid = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
                        if d.in_support(&[x, mid]) {
                            acc += if hi.is_finite() {
                                try_integrate(|y| d.evaluate(&[x, y]), lo, hi, &[], &inner)?.value
                            } else {
                                try_integrate_to_infinity(|y| d.evaluate(&[x, y]), lo, &[], &inner)?.value
                            };
                        }
                        lo = hi;
                    }
                    let f = 1.0 - (-x).exp();
                    let want = crate::numeric::factorial_ratio(&[k as u32], &[m as u32 - 1, (k - m) as u32])
                        * (-x).exp()
                        * f.powi((k - m) as i32)
                        * (1.0 - f).powi(m as i32 - 1);
                    worst = worst.max((acc - want).abs() / want);
                }
                Ok(worst)
            };
            match run() {
                Ok(w) => CheckResult::at_most(name, w, 1e-7, "relative error at 5 points"),
                Err(err) => CheckResult::failed(name, &err),
            }
        })
        .collect()
}

/// Smallest and largest values of the all-`K` one-vs-rest density on a
/// grid of about `points` points inside its support.
pub fn stability_guard(k: usize, m: usize, points: usize) -> Result<(f64, f64)> {
    let e = ExactExp::new(1.0)?.with_config(crate::exact_exp::ExactConfig { max_k: k.max(30), ..Default::default() });
    let d = e.jpdf_one_vs_rest_all_k(k, m)?;
    let side = (points as f64).sqrt().ceil() as usize;
    let a0 = (m - 1) as f64;
    let a1 = if m == 1 { (k - 1) as f64 } else { a0 + k as f64 };
    let vals: Vec<f64> = (0..side * side)
        .into_par_iter()
        .map(|i| {
            let x = 0.02 + 4.0 * (i / side) as f64 / side as f64;
            let a = a0 + (a1 - a0) * ((i % side) as f64 + 0.5) / side as f64;
            d.evaluate(&[x, a * x])
        })
        .collect::<Result<_>>()?;
    let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let max = vals.iter().copied().fold(0.0, f64::max);
    Ok((min, max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("bogus".parse::<Suite>().is_err());
    }

    #[test]
    fn shapes_enumeration() {
        let s = all_shapes(3);
        assert!(s.iter().all(|s| s.k <= 3));
        assert!(s.iter().any(|s| s.theorem == Theorem::T5 && s.ks == 2 && s.m == Some(1)));
    }
}
