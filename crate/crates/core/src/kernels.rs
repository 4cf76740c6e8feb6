//! Nested integrals over ordered regions and their kernel closed forms.
//!
//! Three families of nested integrals reduce to powers of a single kernel:
//!
//! * descending from an upper bound `u`: `c(u, l)^d / d!`
//! * ascending from a lower bound `w` to infinity: `e(w, l)^d / d!`
//! * confined to an interval `[w, u]`: `mu(w, u, l)^d / d!`
//!
//! The brute-force evaluators integrate the nest literally and exist as
//! independent oracles for the closed forms.

use crate::distributions::{Distribution, C64};
use crate::error::{Error, Result};
use crate::numeric::factorial;
use crate::quadrature::{try_integrate_range, QuadConfig};
use std::sync::OnceLock;

/// Deepest nest the brute-force evaluators will attempt.
pub const MAX_BRUTE_DEPTH: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestedDirection {
    /// `u >= x_1 >= x_2 >= ... >= x_d >= 0`
    Descending,
    /// `w <= x_1 <= x_2 <= ... <= x_d < inf`
    Ascending,
    /// `w <= x_1 <= ... <= x_d <= u`
    Interval,
}

/// A nested integral of `prod_i p(x_i) e^{l x_i}` over an ordered region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedIntegralSpec {
    pub depth: usize,
    pub direction: NestedDirection,
    /// `(lower, upper)`; the lower bound is ignored for `Descending`
    /// and the upper bound for `Ascending`.
    pub bounds: (f64, f64),
    pub lambda: C64,
}

impl NestedIntegralSpec {
    pub fn descending(depth: usize, upper: f64, lambda: C64) -> Self {
        Self { depth, direction: NestedDirection::Descending, bounds: (0.0, upper), lambda }
    }

    pub fn ascending(depth: usize, lower: f64, lambda: C64) -> Self {
        Self { depth, direction: NestedDirection::Ascending, bounds: (lower, f64::INFINITY), lambda }
    }

    pub fn interval(depth: usize, lower: f64, upper: f64, lambda: C64) -> Self {
        Self { depth, direction: NestedDirection::Interval, bounds: (lower, upper), lambda }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.bounds;
        let ok = match self.direction {
            NestedDirection::Descending => hi >= 0.0,
            NestedDirection::Ascending => lo >= 0.0,
            NestedDirection::Interval => lo >= 0.0 && hi >= lo,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain(format!("bounds ({lo}, {hi}) are not ordered non-negative limits")))
        }
    }
}

/// Closed form of a nested integral as a kernel power over `d!`.
pub fn closed_form(dist: &dyn Distribution, spec: &NestedIntegralSpec) -> Result<C64> {
    spec.validate()?;
    let (lo, hi) = spec.bounds;
    let k = match spec.direction {
        NestedDirection::Descending => dist.kernel_c(hi, spec.lambda)?,
        NestedDirection::Ascending => dist.kernel_e(lo, spec.lambda)?,
        NestedDirection::Interval => dist.kernel_mu(lo, hi, spec.lambda)?,
    };
    Ok(k.powu(spec.depth as u32) / factorial(spec.depth as u32))
}

/// Nested quadrature of the same integral. Every level is integrated on a
/// shared composite Gauss–Legendre grid: the inner integral is known at the
/// grid nodes as a cumulative integral of the level below, so a nest of
/// depth `d` costs `d` passes over the grid. The grid is refined by halving
/// every panel until two successive results agree within `cfg`.
pub fn brute_force(dist: &dyn Distribution, spec: &NestedIntegralSpec, cfg: &QuadConfig) -> Result<C64> {
    spec.validate()?;
    if spec.depth > MAX_BRUTE_DEPTH {
        return Err(Error::CostGuard { depth: spec.depth, max: MAX_BRUTE_DEPTH });
    }
    if spec.direction != NestedDirection::Descending && spec.lambda.re >= dist.abscissa() {
        return Err(Error::Divergent { re: spec.lambda.re, abscissa: dist.abscissa() });
    }
    if spec.depth == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let (lo, hi) = spec.bounds;
    let weight = |x: f64| {
        let p = dist.pdf(x);
        if p == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            (spec.lambda * x).exp() * p
        }
    };
    let (a, b, from_left) = match spec.direction {
        NestedDirection::Descending => (0.0, hi, true),
        NestedDirection::Ascending => (lo, ascending_cutoff(dist, lo, spec.lambda.re, spec.depth), false),
        NestedDirection::Interval => (lo, hi, false),
    };
    if b <= a {
        return Ok(C64::new(0.0, 0.0));
    }
    let knots = dist.breakpoints();
    let mut prev = nested_on_grid(spec.depth, a, b, from_left, &weight, &knots, 4);
    let mut per = 8;
    while per <= 4096 {
        let cur = nested_on_grid(spec.depth, a, b, from_left, &weight, &knots, per);
        let err = (cur - prev).norm();
        if err <= cfg.abs_tol.max(cfg.rel_tol * cur.norm()) {
            return Ok(cur);
        }
        prev = cur;
        per *= 2;
    }
    Err(Error::Quadrature { a, b, estimate: prev.re, error: f64::NAN })
}

const PANEL_NODES: usize = 20;

/// Gauss–Legendre nodes and weights on `[-1, 1]` with the cumulative
/// integration matrix `cum[j][i] = int_{-1}^{t_j} l_i`, where `l_i` is the
/// Lagrange basis polynomial of node `i`.
struct SpectralRule {
    nodes: [f64; PANEL_NODES],
    weights: [f64; PANEL_NODES],
    cum: [[f64; PANEL_NODES]; PANEL_NODES],
}

/// Legendre polynomials `P_0..=P_n` at `x`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for k in 1..n {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p.truncate(n + 1);
    p
}

fn spectral_rule() -> &'static SpectralRule {
    static RULE: OnceLock<SpectralRule> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = PANEL_NODES;
        let mut nodes = [0.0; PANEL_NODES];
        let mut weights = [0.0; PANEL_NODES];
        for i in 0..n {
            let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(n, x);
                let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
                let dx = p[n] / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(n, x);
            let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        let mut cum = [[0.0; PANEL_NODES]; PANEL_NODES];
        let pn: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        for j in 0..n {
            let t = nodes[j];
            let pt = &pn[j];
            let q: Vec<f64> = (0..n)
                .map(|m| if m == 0 { t + 1.0 } else { (pt[m + 1] - pt[m - 1]) / (2 * m + 1) as f64 })
                .collect();
            for i in 0..n {
                cum[j][i] = weights[i] * (0..n).map(|m| (2 * m + 1) as f64 / 2.0 * pn[i][m] * q[m]).sum::<f64>();
            }
        }
        SpectralRule { nodes, weights, cum }
    })
}

/// The nested integral on `[a, b]` with `per` panels between consecutive
/// breakpoints. `from_left` nests toward `a` (descending chains).
fn nested_on_grid(
    depth: usize,
    a: f64,
    b: f64,
    from_left: bool,
    w: &dyn Fn(f64) -> C64,
    knots: &[f64],
    per: usize,
) -> C64 {
    let rule = spectral_rule();
    let mut cuts: Vec<f64> = knots.iter().copied().filter(|&k| k > a && k < b).collect();
    cuts.sort_by(f64::total_cmp);
    let mut segs = vec![a];
    segs.extend(cuts);
    segs.push(b);
    let mut panels = Vec::new();
    for s in segs.windows(2) {
        for i in 0..per {
            let l = s[0] + (s[1] - s[0]) * i as f64 / per as f64;
            let r = if i + 1 == per { s[1] } else { s[0] + (s[1] - s[0]) * (i + 1) as f64 / per as f64 };
            panels.push((l, r));
        }
    }
    let g: Vec<[C64; PANEL_NODES]> = panels
        .iter()
        .map(|&(l, r)| {
            let (c, h) = (0.5 * (l + r), 0.5 * (r - l));
            std::array::from_fn(|i| w(c + h * rule.nodes[i]) * h)
        })
        .collect();
    let zero = C64::new(0.0, 0.0);
    let mut inner: Vec<[C64; PANEL_NODES]> = vec![[C64::new(1.0, 0.0); PANEL_NODES]; panels.len()];
    for level in 1..=depth {
        let h: Vec<[C64; PANEL_NODES]> =
            g.iter().zip(&inner).map(|(gp, ip)| std::array::from_fn(|i| gp[i] * ip[i])).collect();
        let full: Vec<C64> =
            h.iter().map(|hp| hp.iter().zip(&rule.weights).map(|(v, &wt)| v * wt).sum()).collect();
        if level == depth {
            return full.iter().sum();
        }
        let local = |p: usize, j: usize| -> C64 { h[p].iter().zip(&rule.cum[j]).map(|(v, &c)| v * c).sum() };
        let mut next = vec![[zero; PANEL_NODES]; panels.len()];
        let mut running = zero;
        if from_left {
            for p in 0..panels.len() {
                for j in 0..PANEL_NODES {
                    next[p][j] = running + local(p, j);
                }
                running += full[p];
            }
        } else {
            for p in (0..panels.len()).rev() {
                for j in 0..PANEL_NODES {
                    next[p][j] = running + full[p] - local(p, j);
                }
                running += full[p];
            }
        }
        inner = next;
    }
    zero
}

/// A point past which `p(x) e^{l x}` times a depth-dependent polynomial
/// allowance is below `1e-18` of its largest value on `[lower, inf)`.
fn ascending_cutoff(dist: &dyn Distribution, lower: f64, lambda_re: f64, depth: usize) -> f64 {
    let up = dist.upper_support();
    if up.is_finite() {
        return up.max(lower);
    }
    let w = |x: f64| {
        let p = dist.pdf(x);
        if p == 0.0 {
            0.0
        } else {
            p * (lambda_re * x).exp()
        }
    };
    let mut step = dist.mean().max(1e-300);
    let mut peak = w(lower);
    let mut x = lower;
    loop {
        x += step;
        let v = w(x);
        peak = peak.max(v);
        let allowance = (1.0 + (x - lower) / dist.mean()).powi(depth as i32);
        if v * allowance <= 1e-18 * peak || !x.is_finite() {
            return x;
        }
        step *= 1.25;
    }
}

/// Bounded-support densities have their last breakpoint as the right end.
fn finite_upper(upper: f64, knots: &[f64]) -> f64 {
    match knots.iter().copied().fold(None, |m: Option<f64>, k| Some(m.map_or(k, |m| m.max(k)))) {
        Some(end) if upper > end && !upper.is_finite() => end,
        _ => upper,
    }
}

/// The integration orders written out for the chain
/// `upper >= x_1 >= x_2 >= x_3 >= x_4 >= lower`, each listed outermost
/// variable first (0-based). The first entry is the natural nesting.
pub const LISTED_ORDERINGS: [[usize; 4]; 6] =
    [[0, 1, 2, 3], [3, 2, 1, 0], [1, 2, 3, 0], [2, 0, 3, 1], [0, 3, 2, 1], [3, 0, 2, 1]];

/// Integrate `prod_i p(x_i) e^{l_i x_i}` over the chain
/// `bounds.1 >= x_1 >= x_2 >= x_3 >= x_4 >= bounds.0` in the given order
/// (outermost variable first). Every limit is the tightest bound available
/// from the variables that are still outside.
pub fn reorder_check(
    dist: &dyn Distribution,
    order: [usize; 4],
    bounds: (f64, f64),
    lambdas: [f64; 4],
    cfg: &QuadConfig,
) -> Result<f64> {
    let mut seen = [false; 4];
    for &v in &order {
        if v >= 4 || seen[v] {
            return Err(Error::UnsupportedOrdering(format!("{order:?} is not a permutation of 0..4")));
        }
        seen[v] = true;
    }
    let (lo, hi) = bounds;
    if !(lo >= 0.0 && hi >= lo) {
        return Err(Error::domain(format!("bounds ({lo}, {hi}) are not ordered")));
    }
    if hi == f64::INFINITY && lambdas.iter().any(|&l| l >= dist.abscissa()) {
        return Err(Error::Divergent { re: lambdas.iter().copied().fold(f64::MIN, f64::max), abscissa: dist.abscissa() });
    }
    let hi = finite_upper(hi, &dist.breakpoints());
    let mut fixed = [None; 4];
    chain_level(dist, &order, 0, &mut fixed, lo, hi, &lambdas, cfg)
}

#[allow(clippy::too_many_arguments)]
fn chain_level(
    dist: &dyn Distribution,
    order: &[usize; 4],
    level: usize,
    fixed: &mut [Option<f64>; 4],
    lo: f64,
    hi: f64,
    lambdas: &[f64; 4],
    cfg: &QuadConfig,
) -> Result<f64> {
    if level == 4 {
        return Ok(1.0);
    }
    let v = order[level];
    let upper = (0..v).rev().find_map(|i| fixed[i]).unwrap_or(hi);
    let lower = (v + 1..4).find_map(|i| fixed[i]).unwrap_or(lo);
    if upper <= lower {
        return Ok(0.0);
    }
    let lam = lambdas[v];
    let knots = dist.breakpoints();
    let est = try_integrate_range(
        |x| {
            let mut inner_fixed = *fixed;
            inner_fixed[v] = Some(x);
            let inner = chain_level(dist, order, level + 1, &mut inner_fixed, lo, hi, lambdas, cfg)?;
            let p = dist.pdf(x);
            Ok(if p == 0.0 { 0.0 } else { p * (lam * x).exp() * inner })
        },
        lower,
        upper,
        &knots,
        cfg,
    )?;
    Ok(est.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Exponential, HalfNormal, Uniform};

    fn cfg() -> QuadConfig {
        QuadConfig::new(1e-12, 1e-10)
    }

    #[test]
    fn depth_two_descending_matches_square() {
        let d = Exponential::new(1.0).unwrap();
        let spec = NestedIntegralSpec::descending(2, 1.5, C64::new(0.3, 0.0));
        let cf = closed_form(&d, &spec).unwrap();
        let bf = brute_force(&d, &spec, &cfg()).unwrap();
        assert!((cf - bf).norm() < 1e-9 * cf.norm());
        // c(1.5, 0.3) = (1 - e^{-0.7*1.5}) / 0.7
        let c = (1.0 - (-1.05f64).exp()) / 0.7;
        assert!((cf.re - c * c / 2.0).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_match_brute_force() {
        let dists: Vec<Box<dyn Distribution>> = vec![
            Box::new(Exponential::new(0.7).unwrap()),
            Box::new(HalfNormal::new(1.2).unwrap()),
            Box::new(Uniform::new(2.0).unwrap()),
        ];
        for d in &dists {
            for depth in 1..=3 {
                let lam = C64::new(-0.4, 0.8);
                for spec in [
                    NestedIntegralSpec::descending(depth, 1.1, lam),
                    NestedIntegralSpec::ascending(depth, 0.6, lam),
                    NestedIntegralSpec::interval(depth, 0.3, 1.7, lam),
                ] {
                    let cf = closed_form(d.as_ref(), &spec).unwrap();
                    let bf = brute_force(d.as_ref(), &spec, &cfg()).unwrap();
                    assert!((cf - bf).norm() <= 1e-8 * cf.norm().max(1e-12), "{} {spec:?}: {cf} vs {bf}", d.name());
                }
            }
        }
    }

    #[test]
    fn cost_guard() {
        let d = Exponential::new(1.0).unwrap();
        let spec = NestedIntegralSpec::descending(5, 1.0, C64::new(0.0, 0.0));
        assert!(matches!(brute_force(&d, &spec, &cfg()), Err(Error::CostGuard { .. })));
        assert!(closed_form(&d, &spec).is_ok());
    }

    #[test]
    fn unit_exponential_chain_is_one_over_24() {
        let d = Exponential::new(1.0).unwrap();
        for order in LISTED_ORDERINGS {
            let v = reorder_check(&d, order, (0.0, f64::INFINITY), [0.0; 4], &QuadConfig::new(1e-11, 1e-9)).unwrap();
            assert!((v - 1.0 / 24.0).abs() < 1e-9, "{order:?}: {v}");
        }
        assert!(matches!(
            reorder_check(&d, [0, 0, 1, 2], (0.0, 1.0), [0.0; 4], &cfg()),
            Err(Error::UnsupportedOrdering(_))
        ));
    }
}
