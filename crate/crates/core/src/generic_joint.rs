//! Joint densities for an arbitrary [`Distribution`] through one-variable
//! numerical Laplace inversion.
//!
//! Powers of the kernels `c`, `e` and `mu` are expanded into shifted
//! products of the tail transforms `G_z(-s) = E[e^{-s(X - z)}; X > z]`:
//!
//! * `c(z)^n  = sum_j (-1)^j C(n, j) e^{-j z s} G_0^{n-j} G_z^j`
//! * `e(z)^n  = e^{-n z s} G_z^n`
//! * `mu(a, b)^n = sum_j (-1)^j C(n, j) e^{-((n-j) a + j b) s} G_a^{n-j} G_b^j`
//!
//! Each product is inverted on its own with the delay removed, so the
//! Euler-summed series never sees an oscillating `e^{-bs}` factor. A single
//! power of `G_z` inverts in closed form to `p(z + t)`.

use crate::density::{DensityMeta, EvalPath, JointDensity};
use crate::distributions::{Distribution, C64};
use crate::error::{Error, Result};
use crate::exact_exp::DEFAULT_MAX_K;
use crate::ilt::{invert_with, IltConfig, TransformFn};
use crate::numeric::{binomial, factorial_ratio, CompensatedSum};
use crate::partition::{Case, Theorem, TheoremShape};
use crate::quadrature::{try_integrate, QuadConfig};
use crate::reduction::{self, one_vs_rest_support, ReductionConfig, ReductionOrder};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericConfig {
    pub ilt: IltConfig,
    /// Tolerances of the single outer integral of T3 and T4.
    pub outer: QuadConfig,
    pub reduction: ReductionConfig,
    pub max_k: usize,
}

impl Default for GenericConfig {
    fn default() -> Self {
        Self {
            ilt: IltConfig::with_digits(10),
            outer: QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 2000 },
            reduction: ReductionConfig {
                outer: QuadConfig { abs_tol: 1e-10, rel_tol: 1e-8, max_intervals: 2000 },
                inner: QuadConfig { abs_tol: 1e-11, rel_tol: 1e-9, max_intervals: 1000 },
            },
            max_k: DEFAULT_MAX_K,
        }
    }
}

/// One shifted product `coeff * e^{-shift s} * prod G_{z_i}^{p_i}`.
#[derive(Debug, Clone, PartialEq)]
struct ShiftTerm {
    coeff: f64,
    shift: f64,
    factors: Vec<(f64, u32)>,
}

fn c_pow(z: f64, n: u32) -> Vec<ShiftTerm> {
    (0..=n)
        .map(|j| ShiftTerm {
            coeff: if j % 2 == 1 { -binomial(n, j) } else { binomial(n, j) },
            shift: j as f64 * z,
            factors: vec![(0.0, n - j), (z, j)],
        })
        .collect()
}

fn mu_pow(a: f64, b: f64, n: u32) -> Vec<ShiftTerm> {
    (0..=n)
        .map(|j| ShiftTerm {
            coeff: if j % 2 == 1 { -binomial(n, j) } else { binomial(n, j) },
            shift: (n - j) as f64 * a + j as f64 * b,
            factors: vec![(a, n - j), (b, j)],
        })
        .collect()
}

/// `(c(z)^nc e(z)^ne)` expanded.
fn c_pow_e_pow(z: f64, nc: u32, ne: u32) -> Vec<ShiftTerm> {
    c_pow(z, nc)
        .into_iter()
        .map(|mut t| {
            t.shift += ne as f64 * z;
            t.factors[1].1 += ne;
            t
        })
        .collect()
}

/// All ways of writing `n` as an ordered sum of `parts` non-negative integers.
fn compositions(n: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if n == 0 { vec![Vec::new()] } else { Vec::new() };
    }
    if parts == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in compositions(n - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

fn multinomial(n: u32, split: &[u32]) -> f64 {
    factorial_ratio(&[n], split)
}

/// Generic-distribution evaluator for the six shapes.
#[derive(Debug, Clone)]
pub struct GenericJoint {
    dist: Arc<dyn Distribution>,
    pub config: GenericConfig,
}

impl GenericJoint {
    pub fn new(dist: Arc<dyn Distribution>) -> Result<Self> {
        crate::distributions::validate(dist.as_ref())?;
        Ok(Self { dist, config: GenericConfig::default() })
    }

    pub fn with_config(mut self, config: GenericConfig) -> Self {
        self.config = config;
        self
    }

    pub fn distribution(&self) -> &Arc<dyn Distribution> {
        &self.dist
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.config.max_k {
            return Err(Error::invalid(format!("K = {k} outside 1..={}", self.config.max_k)));
        }
        Ok(())
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            self.dist.pdf(x)
        }
    }

    /// Inverse transform of `prod G_{z_i}(-s)^{p_i}` at `t`.
    fn invert_product(&self, factors: &[(f64, u32)], t: f64) -> Result<f64> {
        let factors: Vec<(f64, u32)> = factors.iter().copied().filter(|f| f.1 > 0).collect();
        let total: u32 = factors.iter().map(|f| f.1).sum();
        if t < 0.0 || total == 0 {
            return Ok(0.0);
        }
        if total == 1 {
            return Ok(self.pdf(factors[0].0 + t));
        }
        let upper = self.dist.upper_support();
        if upper.is_finite() {
            let reach: f64 = factors.iter().map(|&(z, p)| p as f64 * (upper - z)).sum();
            if t > reach {
                return Ok(0.0);
            }
        }
        if let Some(v) = self.invert_split(&factors, t)? {
            return Ok(v);
        }
        let dist = self.dist.clone();
        let fs = factors.clone();
        let f = move |s: C64| -> Result<C64> {
            let mut acc = C64::new(1.0, 0.0);
            for &(z, p) in &fs {
                acc *= dist.kernel_e_shifted(z, -s)?.powu(p);
            }
            Ok(acc)
        };
        let mean = self.dist.mean();
        let abscissa = -self.dist.abscissa();
        let tf = TransformFn::from_fn(f, abscissa, total as f64 * mean);
        Ok(invert_with(&tf, t, &self.config.ilt)?.value)
    }

    /// Inversion through [`Distribution::tail_split`], one delay at a time.
    fn invert_split(&self, factors: &[(f64, u32)], t: f64) -> Result<Option<f64>> {
        let mean = self.dist.mean();
        let probe = C64::new(1.0 / mean, 1.0 / mean);
        let mut delays = Vec::with_capacity(factors.len());
        for &(z, _) in factors {
            match self.dist.tail_split(z, -probe) {
                Some(parts) => delays.push(parts.iter().map(|p| p.0).collect::<Vec<f64>>()),
                None => return Ok(None),
            }
        }
        // Every way of distributing each factor's power over its parts.
        let mut combos: Vec<(f64, f64, Vec<Vec<u32>>)> = vec![(1.0, 0.0, Vec::new())];
        for (fi, &(_, p)) in factors.iter().enumerate() {
            let mut next = Vec::new();
            for (coef, delay, counts) in &combos {
                for split in compositions(p, delays[fi].len()) {
                    let mult = multinomial(p, &split);
                    let d: f64 = split.iter().zip(&delays[fi]).map(|(&c, &dl)| c as f64 * dl).sum();
                    let mut c = counts.clone();
                    c.push(split);
                    next.push((coef * mult, delay + d, c));
                }
            }
            combos = next;
        }
        let scale = factors.iter().map(|f| f.1).sum::<u32>() as f64 * mean;
        let mut groups: Vec<(f64, Vec<(f64, Vec<Vec<u32>>)>)> = Vec::new();
        for (coef, delay, counts) in combos {
            match groups.iter_mut().find(|g| (g.0 - delay).abs() <= 1e-12 * scale) {
                Some(g) => g.1.push((coef, counts)),
                None => groups.push((delay, vec![(coef, counts)])),
            }
        }
        let mut acc = CompensatedSum::new();
        for (delay, members) in groups {
            if t - delay <= 0.0 {
                continue;
            }
            let dist = self.dist.clone();
            let fs: Vec<f64> = factors.iter().map(|f| f.0).collect();
            let f = move |s: C64| -> Result<C64> {
                let parts: Vec<Vec<C64>> = fs
                    .iter()
                    .map(|&z| dist.tail_split(z, -s).unwrap_or_default().into_iter().map(|p| p.1).collect())
                    .collect();
                let mut total = C64::new(0.0, 0.0);
                for (coef, counts) in &members {
                    let mut prod = C64::new(*coef, 0.0);
                    for (fi, split) in counts.iter().enumerate() {
                        for (pi, &c) in split.iter().enumerate() {
                            if c > 0 {
                                prod *= parts[fi][pi].powu(c);
                            }
                        }
                    }
                    total += prod;
                }
                Ok(total)
            };
            let tf = TransformFn::from_fn(f, self.dist.tail_split_abscissa(), scale);
            acc.add(invert_with(&tf, t - delay, &self.config.ilt)?.value);
        }
        Ok(Some(acc.total()))
    }

    fn invert_terms(&self, terms: &[ShiftTerm], t: f64) -> Result<f64> {
        let mut acc = CompensatedSum::new();
        for term in terms {
            if term.coeff != 0.0 && t >= term.shift {
                acc.add(term.coeff * self.invert_product(&term.factors, t - term.shift)?);
            }
        }
        Ok(acc.total())
    }

    /// Density of the sum of all `K` variables.
    pub fn t1_pdf(&self, k: usize, z: f64) -> Result<f64> {
        self.check_k(k)?;
        if z < 0.0 {
            return Ok(0.0);
        }
        self.invert_product(&[(0.0, k as u32)], z)
    }

    /// Joint density of `(g_m, sum of the other K - 1)`.
    pub fn t2_jpdf(&self, k: usize, m: usize, z1: f64, z2: f64) -> Result<f64> {
        self.check_k(k)?;
        if k < 2 || m == 0 || m > k {
            return Err(Error::invalid(format!("need K >= 2 and 1 <= m <= K (K = {k}, m = {m})")));
        }
        if z1 < 0.0 || z2 < 0.0 {
            return Ok(0.0);
        }
        let inside = if m == 1 { z2 <= (k - 1) as f64 * z1 } else { z2 >= (m - 1) as f64 * z1 };
        if !inside {
            return Ok(0.0);
        }
        let p = self.pdf(z1);
        if p == 0.0 {
            return Ok(0.0);
        }
        let pre = factorial_ratio(&[k as u32], &[(k - m) as u32, (m - 1) as u32]);
        let terms = c_pow_e_pow(z1, (k - m) as u32, (m - 1) as u32);
        Ok(pre * p * self.invert_terms(&terms, z2)?)
    }

    /// Joint density of `(sum of the best m, sum of the other K - m)`.
    pub fn t3_jpdf(&self, k: usize, m: usize, z1: f64, z2: f64) -> Result<f64> {
        self.check_k(k)?;
        if m == 0 || m >= k {
            return Err(Error::invalid(format!("need 1 <= m < K (K = {k}, m = {m})")));
        }
        if m == 1 {
            return self.t2_jpdf(k, 1, z1, z2);
        }
        if z1 < 0.0 || z2 < 0.0 || ((k - m) as f64 * z1) < m as f64 * z2 {
            return Ok(0.0);
        }
        let n = k - m;
        let pre = factorial_ratio(&[k as u32], &[n as u32, (m - 1) as u32]);
        let lo = z2 / n as f64;
        let hi = z1 / m as f64;
        let mut knots: Vec<f64> = (1..n).map(|j| z2 / j as f64).collect();
        knots.extend(self.dist.breakpoints());
        let est = try_integrate(
            |g| {
                let p = self.pdf(g);
                if p == 0.0 {
                    return Ok(0.0);
                }
                let head = self.invert_product(&[(g, (m - 1) as u32)], z1 - m as f64 * g)?;
                if head == 0.0 {
                    return Ok(0.0);
                }
                Ok(p * head * self.invert_terms(&c_pow(g, n as u32), z2)?)
            },
            lo,
            hi,
            &knots,
            &self.config.outer,
        )?;
        Ok(pre * est.value)
    }

    /// Density of the sum of the best `Ks` out of `K`.
    pub fn t4_pdf(&self, k: usize, ks: usize, x: f64) -> Result<f64> {
        self.check_k(k)?;
        if ks == 0 || ks > k {
            return Err(Error::invalid(format!("need 1 <= Ks <= K (K = {k}, Ks = {ks})")));
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        if ks == k {
            return self.t1_pdf(k, x);
        }
        let rest = (k - ks) as i32;
        if ks == 1 {
            return Ok(k as f64 * self.pdf(x) * self.dist.cdf(x).powi(rest));
        }
        let pre = factorial_ratio(&[k as u32], &[(k - ks) as u32, (ks - 1) as u32]);
        let est = try_integrate(
            |z| {
                let p = self.pdf(z);
                if p == 0.0 {
                    return Ok(0.0);
                }
                let w = p * self.dist.cdf(z).powi(rest);
                Ok(w * self.invert_product(&[(z, (ks - 1) as u32)], x - ks as f64 * z)?)
            },
            0.0,
            x / ks as f64,
            &self.dist.breakpoints(),
            &self.config.outer,
        )?;
        Ok(pre * est.value)
    }

    /// Fine joint density of the one-vs-rest best-`Ks` shape, in the
    /// coordinates documented in [`crate::reduction`].
    pub fn fine_density(&self, case: Case, k: usize, ks: usize, m: usize, z: &[f64]) -> Result<f64> {
        if z.iter().any(|&v| v < 0.0) {
            return Ok(0.0);
        }
        let rest = (k - ks) as i32;
        let big_f = factorial_ratio(&[k as u32], &[(k - ks) as u32]);
        let cdfw = |v: f64| self.dist.cdf(v).powi(rest);
        match case {
            Case::D => {
                let pre = big_f / factorial_ratio(&[(ks - 1) as u32], &[]);
                let p = self.pdf(z[0]);
                if p == 0.0 {
                    return Ok(0.0);
                }
                let inner = self.invert_product(&[(z[0], (ks - 1) as u32)], z[1] - (ks - 1) as f64 * z[0])?;
                Ok(pre * p * cdfw(z[0]) * inner)
            }
            Case::A => {
                if ks < 3 {
                    return Err(Error::UnsupportedShape(format!("case a needs Ks >= 3 (Ks = {ks})")));
                }
                if z[0] < z[2] {
                    return Ok(0.0);
                }
                let w = self.pdf(z[0]) * self.pdf(z[2]);
                if w == 0.0 {
                    return Ok(0.0);
                }
                let pre = big_f / factorial_ratio(&[(ks - 2) as u32], &[]);
                let inner = self.invert_terms(&mu_pow(z[2], z[0], (ks - 2) as u32), z[1])?;
                Ok(pre * w * cdfw(z[2]) * inner)
            }
            Case::C => {
                if ks < 3 {
                    return Err(Error::UnsupportedShape(format!("case c needs Ks >= 3 (Ks = {ks})")));
                }
                if z[1] < z[2] {
                    return Ok(0.0);
                }
                let w = self.pdf(z[1]) * self.pdf(z[2]);
                if w == 0.0 {
                    return Ok(0.0);
                }
                let pre = big_f / factorial_ratio(&[(ks - 2) as u32], &[]);
                let inner = self.invert_product(&[(z[1], (ks - 2) as u32)], z[0] - (ks - 2) as f64 * z[1])?;
                Ok(pre * w * cdfw(z[2]) * inner)
            }
            Case::B => {
                if z[1] < z[3] {
                    return Ok(0.0);
                }
                let w = self.pdf(z[1]) * self.pdf(z[3]);
                if w == 0.0 {
                    return Ok(0.0);
                }
                let nb = ks - m - 1;
                let pre = big_f / factorial_ratio(&[(m - 1) as u32, nb as u32], &[]);
                let head = self.invert_product(&[(z[1], (m - 1) as u32)], z[0] - (m - 1) as f64 * z[1])?;
                if head == 0.0 {
                    return Ok(0.0);
                }
                let mid = self.invert_terms(&mu_pow(z[3], z[1], nb as u32), z[2])?;
                Ok(pre * w * cdfw(z[3]) * head * mid)
            }
        }
    }

    fn one_vs_rest_case(k: usize, ks: usize, m: usize) -> Result<(Case, bool)> {
        if ks < 2 || ks > k || m == 0 || m > ks {
            return Err(Error::invalid(format!("need 1 <= m <= Ks <= K and Ks >= 2 (K = {k}, Ks = {ks}, m = {m})")));
        }
        if ks == 2 && m == 1 {
            return Ok((Case::D, true));
        }
        Ok((Case::of(m, ks)?, false))
    }

    /// Joint density of `(g_m, sum of the other best Ks - 1)`.
    pub fn t5_jpdf(&self, k: usize, ks: usize, m: usize, x: f64, y: f64) -> Result<f64> {
        self.t5_with_order(k, ks, m, x, y, ReductionOrder::default())
    }

    pub fn t5_with_order(&self, k: usize, ks: usize, m: usize, x: f64, y: f64, order: ReductionOrder) -> Result<f64> {
        self.check_k(k)?;
        let (case, reflected) = Self::one_vs_rest_case(k, ks, m)?;
        if x < 0.0 || y < 0.0 || !one_vs_rest_support(case, ks, m, reflected, x, y) {
            return Ok(0.0);
        }
        if reflected {
            let pre = factorial_ratio(&[k as u32], &[(k - 2) as u32]);
            return Ok(pre * self.pdf(x) * self.pdf(y) * self.dist.cdf(y).powi((k - 2) as i32));
        }
        let fine = |z: &[f64]| self.fine_density(case, k, ks, m, z);
        reduction::one_vs_rest(&fine, case, ks, m, x, y, order, &self.config.reduction)
    }

    /// Joint density of `(sum of the best m, sum of ranks m+1..Ks)`.
    pub fn t6_jpdf(&self, k: usize, ks: usize, m: usize, x: f64, y: f64) -> Result<f64> {
        self.t6_with_order(k, ks, m, x, y, ReductionOrder::default())
    }

    pub fn t6_with_order(&self, k: usize, ks: usize, m: usize, x: f64, y: f64, order: ReductionOrder) -> Result<f64> {
        self.check_k(k)?;
        if m == 0 || m >= ks || ks > k {
            return Err(Error::invalid(format!("need 1 <= m < Ks <= K (K = {k}, Ks = {ks}, m = {m})")));
        }
        if m == 1 {
            return self.t5_with_order(k, ks, 1, x, y, order);
        }
        if x < 0.0 || y < 0.0 || ((ks - m) as f64 * x) < m as f64 * y {
            return Ok(0.0);
        }
        let case = if m == ks - 1 { Case::C } else { Case::B };
        let fine = |z: &[f64]| self.fine_density(case, k, ks, m, z);
        reduction::head_vs_tail(&fine, ks, m, x, y, order, &self.config.reduction)
    }

    fn meta(&self, shape: &TheoremShape, grouping: &str) -> DensityMeta {
        DensityMeta {
            k: shape.k,
            ks: shape.ks,
            m: shape.m,
            theorem: Some(shape.theorem),
            case: shape.case(),
            grouping: grouping.into(),
            path: EvalPath::Numeric,
            distribution: self.dist.name(),
        }
    }

    /// The density for a supported shape, in the shape's natural coordinates.
    pub fn density(&self, shape: &TheoremShape) -> Result<JointDensity> {
        let me = self.clone();
        let (k, ks) = (shape.k, shape.ks);
        let need_m = || shape.m.ok_or_else(|| Error::invalid(format!("{} needs m", shape.theorem)));
        let all = Arc::new(|_: &[f64]| true);
        let d = match shape.theorem {
            Theorem::T1 => {
                self.check_k(k)?;
                JointDensity::new(1, Arc::new(move |z: &[f64]| me.t1_pdf(k, z[0])), all, self.meta(shape, "(sum of all K)"))
            }
            Theorem::T4 => {
                self.check_k(k)?;
                JointDensity::new(1, Arc::new(move |z: &[f64]| me.t4_pdf(k, ks, z[0])), all, self.meta(shape, "(sum of the best Ks)"))
            }
            Theorem::T2 => {
                let m = need_m()?;
                JointDensity::new(
                    2,
                    Arc::new(move |z: &[f64]| me.t2_jpdf(k, m, z[0], z[1])),
                    Arc::new(move |z: &[f64]| {
                        if m == 1 { z[1] <= (k - 1) as f64 * z[0] } else { z[1] >= (m - 1) as f64 * z[0] }
                    }),
                    self.meta(shape, "(g_m, sum of the other K-1)"),
                )
            }
            Theorem::T3 | Theorem::T6 => {
                let m = need_m()?;
                let theorem = shape.theorem;
                let f: Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync> = if theorem == Theorem::T3 {
                    Arc::new(move |z: &[f64]| me.t3_jpdf(k, m, z[0], z[1]))
                } else {
                    Arc::new(move |z: &[f64]| me.t6_jpdf(k, ks, m, z[0], z[1]))
                };
                JointDensity::new(
                    2,
                    f,
                    Arc::new(move |z: &[f64]| (ks - m) as f64 * z[0] >= m as f64 * z[1]),
                    self.meta(shape, "(sum of the best m, sum of ranks m+1..Ks)"),
                )
            }
            Theorem::T5 => {
                let m = need_m()?;
                let (case, reflected) = Self::one_vs_rest_case(k, ks, m)?;
                JointDensity::new(
                    2,
                    Arc::new(move |z: &[f64]| me.t5_jpdf(k, ks, m, z[0], z[1])),
                    Arc::new(move |z: &[f64]| one_vs_rest_support(case, ks, m, reflected, z[0], z[1])),
                    self.meta(shape, "(g_m, sum of the other best Ks-1)"),
                )
            }
        };
        if shape.swapped {
            d.swapped()
        } else {
            Ok(d)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{Exponential, HalfNormal, Uniform};
    use crate::exact_exp::ExactExp;

    fn exp1() -> GenericJoint {
        GenericJoint::new(Arc::new(Exponential::new(1.0).unwrap())).unwrap()
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-9)
    }

    #[test]
    fn sum_of_all() {
        let g = exp1();
        assert!(close(g.t1_pdf(3, 2.0).unwrap(), 2.0 * (-2.0f64).exp(), 1e-7));
        let h = GenericJoint::new(Arc::new(HalfNormal::new(1.3).unwrap())).unwrap();
        assert!((h.t1_pdf(1, 0.7).unwrap() - h.dist.pdf(0.7)).abs() < 1e-8);
        let u = GenericJoint::new(Arc::new(Uniform::unit())).unwrap();
        let v = u.t1_pdf(2, 1.0).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{v}");
    }

    #[test]
    fn two_variable_brute_force() {
        let h = GenericJoint::new(Arc::new(HalfNormal::new(1.0).unwrap())).unwrap();
        let v = h.t2_jpdf(2, 1, 1.1, 0.4).unwrap();
        let want = 2.0 * h.dist.pdf(1.1) * h.dist.pdf(0.4);
        assert!(close(v, want, 1e-8), "{v} vs {want}");
        assert_eq!(h.t2_jpdf(2, 1, 0.4, 1.1).unwrap(), 0.0);
    }

    #[test]
    fn matches_exact_path() {
        let g = exp1();
        let e = ExactExp::new(1.0).unwrap();
        let pts = [(1.3, 0.8), (0.6, 1.9), (2.2, 1.0)];
        for &(x, y) in &pts {
            for m in 1..=4 {
                let a = g.t2_jpdf(4, m, x, y).unwrap();
                let b = e.jpdf_one_vs_rest_all_k(4, m).unwrap().evaluate(&[x, y]).unwrap();
                assert!(close(a, b, 1e-6), "T2 m={m} ({x},{y}): {a} vs {b}");
            }
            for m in 1..4 {
                let (x, y) = (x + y, 0.5 * y);
                let a = g.t3_jpdf(4, m, x, y).unwrap();
                let b = e.jpdf_headsum_vs_tailsum_all_k(4, m).unwrap().evaluate(&[x, y]).unwrap();
                assert!(close(a, b, 1e-6), "T3 m={m} ({x},{y}): {a} vs {b}");
            }
        }
        for &x in &[0.5, 1.7, 4.0] {
            let a = g.t4_pdf(5, 3, x).unwrap();
            let b = e.pdf_gsc_sum(5, 3).unwrap().evaluate(&[x]).unwrap();
            assert!(close(a, b, 1e-6), "T4 {x}: {a} vs {b}");
        }
    }

    #[test]
    fn best_ks_shapes_match_exact_path() {
        let g = exp1();
        let e = ExactExp::new(1.0).unwrap();
        for &(k, ks, m) in &[(5, 4, 2), (4, 3, 1), (4, 3, 2), (4, 3, 3), (3, 2, 1), (5, 5, 3)] {
            let b = e.jpdf_one_vs_rest_best_ks(k, ks, m).unwrap();
            for &(x, y) in &[(0.7, 1.3), (1.2, 1.9)] {
                let p = g.t5_jpdf(k, ks, m, x, y).unwrap();
                let q = b.reduce_to_2d(x, y).unwrap();
                assert!(close(p, q, 1e-6), "T5 {k},{ks},{m} ({x},{y}): {p} vs {q}");
            }
        }
        for &(k, ks, m) in &[(5, 4, 2), (4, 3, 2)] {
            for &(x, y) in &[(2.0, 0.7), (3.1, 1.0)] {
                let p = g.t6_jpdf(k, ks, m, x, y).unwrap();
                let q = e.jpdf_headsum_vs_tailsum_best_ks(k, ks, m, x, y).unwrap();
                assert!(close(p, q, 1e-6), "T6 {k},{ks},{m} ({x},{y}): {p} vs {q}");
            }
        }
    }
}
