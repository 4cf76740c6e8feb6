//! Closed-form densities for i.i.d. exponential variables with mean `gamma_bar`.
//!
//! Every formula is homogeneous in `z / gamma_bar`, so evaluation happens in
//! unit-rate coordinates and the result is rescaled by `gamma_bar^-d`.
//! Alternating binomial sums go through [`ExactSum`], and combinatorial
//! prefactors are formed exactly before a single rounding.

use crate::density::{DensityMeta, EvalPath, JointDensity};
use crate::error::{Error, Result};
use crate::numeric::{binomial_big, factorial_ratio, ExactSum, ExactTerm};
use crate::partition::{Case, Theorem, TheoremShape};
use crate::quadrature::{try_integrate, QuadConfig};
use crate::reduction::{self, one_vs_rest_support, ReductionConfig, ReductionOrder};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::sync::Arc;

pub const DEFAULT_MAX_K: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    pub max_k: usize,
    /// Tolerances for residual one-dimensional integrals.
    pub residual: QuadConfig,
    pub reduction: ReductionConfig,
}

impl Default for ExactConfig {
    fn default() -> Self {
        Self {
            max_k: DEFAULT_MAX_K,
            residual: QuadConfig { abs_tol: 1e-12, rel_tol: 1e-11, max_intervals: 2000 },
            reduction: ReductionConfig::default(),
        }
    }
}

/// Exponential model with mean `gamma_bar`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactExp {
    gamma_bar: f64,
    pub config: ExactConfig,
}

type UnitFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

fn one_minus_exp(u: f64) -> f64 {
    -(-u).exp_m1()
}

/// `t^p * U(t)` with `0^0 = 1`.
fn tpow(t: f64, p: usize) -> f64 {
    if t < 0.0 {
        0.0
    } else {
        t.powi(p as i32)
    }
}

fn alternating(nvars: usize, n: usize, power: u32, form: impl Fn(usize) -> Vec<i64>) -> ExactSum {
    let terms = (0..=n)
        .map(|j| {
            let c = BigInt::from(binomial_big(n as u32, j as u32));
            let c = if j % 2 == 1 { -c } else { c };
            ExactTerm { coeff: BigRational::from_integer(c), form: form(j), power }
        })
        .collect();
    ExactSum::new(nvars, terms)
}

fn u32s(v: &[usize]) -> Vec<u32> {
    v.iter().map(|&x| x as u32).collect()
}

fn prefactor(numer: &[usize], denom: &[usize]) -> f64 {
    factorial_ratio(&u32s(numer), &u32s(denom))
}

/// Unit-rate fine density for the best-`Ks` one-vs-rest shape.
fn fine_unit(case: Case, k: usize, ks: usize, m: usize) -> UnitFn {
    let rest = k - ks;
    match case {
        Case::D => {
            let pre = prefactor(&[k], &[rest, ks - 1, ks - 2]);
            Arc::new(move |z: &[f64]| {
                let t = z[1] - (ks - 1) as f64 * z[0];
                if t < 0.0 {
                    return Ok(0.0);
                }
                Ok(pre * (-(z[0] + z[1])).exp() * one_minus_exp(z[0]).powi(rest as i32) * tpow(t, ks - 2))
            })
        }
        Case::A => {
            let n = ks - 2;
            let pre = prefactor(&[k], &[rest, ks - 2, ks - 3]);
            let sum = alternating(3, n, (n - 1) as u32, |j| vec![-(j as i64), 1, -((n - j) as i64)]);
            Arc::new(move |z: &[f64]| {
                if z[0] < z[2] {
                    return Ok(0.0);
                }
                let poly = sum.eval(z);
                if poly == 0.0 {
                    return Ok(0.0);
                }
                Ok(pre * (-(z[0] + z[1] + z[2])).exp() * one_minus_exp(z[2]).powi(rest as i32) * poly)
            })
        }
        Case::C => {
            let n = ks - 2;
            let pre = prefactor(&[k], &[rest, ks - 2, ks - 3]);
            Arc::new(move |z: &[f64]| {
                if z[1] < z[2] {
                    return Ok(0.0);
                }
                let t = z[0] - n as f64 * z[1];
                if t < 0.0 {
                    return Ok(0.0);
                }
                Ok(pre * (-(z[0] + z[1] + z[2])).exp() * one_minus_exp(z[2]).powi(rest as i32) * tpow(t, n - 1))
            })
        }
        Case::B => {
            let nb = ks - m - 1;
            let pre = prefactor(&[k], &[rest, m - 1, m - 2, nb, nb - 1]);
            let sum = alternating(3, nb, (nb - 1) as u32, |j| vec![-(j as i64), 1, -((nb - j) as i64)]);
            Arc::new(move |z: &[f64]| {
                if z[1] < z[3] {
                    return Ok(0.0);
                }
                let head = z[0] - (m - 1) as f64 * z[1];
                if head < 0.0 {
                    return Ok(0.0);
                }
                let mid = sum.eval(&z[1..4]);
                if mid == 0.0 {
                    return Ok(0.0);
                }
                let e = (-(z[0] + z[1] + z[2] + z[3])).exp();
                Ok(pre * e * one_minus_exp(z[3]).powi(rest as i32) * tpow(head, m - 2) * mid)
            })
        }
    }
}

/// Fine density for the best-`Ks` one-vs-rest shape together with its
/// reduction to the requested two coordinates.
#[derive(Debug, Clone)]
pub struct BestKsOneVsRest {
    pub case: Case,
    pub k: usize,
    pub ks: usize,
    pub m: usize,
    /// True for `Ks = 2, m = 1`, where the requested coordinates are the
    /// fine ones in reverse order.
    pub reflected: bool,
    pub fine: JointDensity,
    reduction: ReductionConfig,
}

impl BestKsOneVsRest {
    pub fn reduce_to_2d(&self, x: f64, y: f64) -> Result<f64> {
        self.reduce_with_order(x, y, ReductionOrder::default())
    }

    pub fn reduce_with_order(&self, x: f64, y: f64, order: ReductionOrder) -> Result<f64> {
        if self.reflected {
            return self.fine.evaluate(&[y, x]);
        }
        let fine = |z: &[f64]| self.fine.evaluate(z);
        reduction::one_vs_rest(&fine, self.case, self.ks, self.m, x, y, order, &self.reduction)
    }

    /// The reduced two-dimensional density.
    pub fn density(&self) -> JointDensity {
        let me = self.clone();
        let (ks, m, case, reflected) = (self.ks, self.m, self.case, self.reflected);
        let mut meta = self.fine.meta.clone();
        meta.grouping = "(g_m, sum of the other best Ks-1)".into();
        JointDensity::new(
            2,
            Arc::new(move |z: &[f64]| me.reduce_to_2d(z[0], z[1])),
            Arc::new(move |z: &[f64]| one_vs_rest_support(case, ks, m, reflected, z[0], z[1])),
            meta,
        )
    }
}

impl ExactExp {
    pub fn new(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::invalid(format!("mean must be positive, got {gamma_bar}")));
        }
        Ok(Self { gamma_bar, config: ExactConfig::default() })
    }

    pub fn with_config(mut self, config: ExactConfig) -> Self {
        self.config = config;
        self
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if k > self.config.max_k {
            return Err(Error::invalid(format!("K = {k} exceeds the configured limit {}", self.config.max_k)));
        }
        Ok(())
    }

    fn meta(&self, k: usize, ks: usize, m: Option<usize>, theorem: Theorem, case: Option<Case>, grouping: &str) -> DensityMeta {
        DensityMeta {
            k,
            ks,
            m,
            theorem: Some(theorem),
            case,
            grouping: grouping.into(),
            path: EvalPath::Exact,
            distribution: format!("exp:{}", self.gamma_bar),
        }
    }

    /// Wrap a unit-rate density of dimension `dim` into one at this mean.
    fn scaled(&self, dim: usize, f: UnitFn, support: Arc<dyn Fn(&[f64]) -> bool + Send + Sync>, meta: DensityMeta) -> JointDensity {
        let g = self.gamma_bar;
        let norm = g.powi(-(dim as i32));
        JointDensity::new(
            dim,
            Arc::new(move |z: &[f64]| {
                let u: Vec<f64> = z.iter().map(|v| v / g).collect();
                Ok(f(&u)? * norm)
            }),
            support,
            meta,
        )
    }

    /// Density of the sum of all `K` variables (Erlang).
    pub fn pdf_sum_all(&self, k: usize) -> Result<JointDensity> {
        self.check_k(k)?;
        let pre = prefactor(&[], &[k - 1]);
        let f: UnitFn = Arc::new(move |z: &[f64]| Ok(pre * tpow(z[0], k - 1) * (-z[0]).exp()));
        Ok(self.scaled(1, f, Arc::new(|_| true), self.meta(k, k, None, Theorem::T1, None, "(sum of all K)")))
    }

    /// Joint density of `(g_m, sum of the other K - 1)`.
    pub fn jpdf_one_vs_rest_all_k(&self, k: usize, m: usize) -> Result<JointDensity> {
        self.check_k(k)?;
        if k < 2 || m == 0 || m > k {
            return Err(Error::invalid(format!("need K >= 2 and 1 <= m <= K (K = {k}, m = {m})")));
        }
        let pre = prefactor(&[k], &[k - m, m - 1, k - 2]);
        let sum = alternating(2, k - m, (k - 2) as u32, |j| vec![-((m + j - 1) as i64), 1]);
        let f: UnitFn = Arc::new(move |z: &[f64]| {
            let poly = sum.eval(z);
            if poly == 0.0 {
                return Ok(0.0);
            }
            Ok(pre * (-(z[0] + z[1])).exp() * poly)
        });
        let support: Arc<dyn Fn(&[f64]) -> bool + Send + Sync> = if m == 1 {
            Arc::new(move |z: &[f64]| z[1] <= (k - 1) as f64 * z[0])
        } else {
            Arc::new(move |z: &[f64]| z[1] >= (m - 1) as f64 * z[0])
        };
        let meta = self.meta(k, k, Some(m), Theorem::T2, None, "(g_m, sum of the other K-1)");
        Ok(self.scaled(2, f, support, meta))
    }

    /// Joint density of `(sum of the best m, sum of the other K - m)`.
    pub fn jpdf_headsum_vs_tailsum_all_k(&self, k: usize, m: usize) -> Result<JointDensity> {
        self.check_k(k)?;
        if m == 0 || m >= k {
            return Err(Error::invalid(format!("need 1 <= m < K (K = {k}, m = {m})")));
        }
        if m == 1 {
            let mut d = self.jpdf_one_vs_rest_all_k(k, 1)?;
            d.meta.theorem = Some(Theorem::T3);
            d.meta.grouping = "(sum of the best m, sum of the other K-m)".into();
            return Ok(d);
        }
        let n = k - m;
        let pre = prefactor(&[k], &[n, n - 1, m - 1, m - 2]);
        let sum = alternating(2, n, (n - 1) as u32, |j| vec![1, -(j as i64)]);
        let cfg = self.config.residual;
        let f: UnitFn = Arc::new(move |z: &[f64]| {
            let (z1, z2) = (z[0], z[1]);
            let lo = z2 / n as f64;
            let hi = z1 / m as f64;
            if !(hi > lo) {
                return Ok(0.0);
            }
            let knots: Vec<f64> = (1..n).map(|j| z2 / j as f64).collect();
            let inner = try_integrate(
                |g| Ok(tpow(z1 - m as f64 * g, m - 2) * sum.eval(&[z2, g])),
                lo,
                hi,
                &knots,
                &cfg,
            )?;
            Ok(pre * (-(z1 + z2)).exp() * inner.value)
        });
        let support = Arc::new(move |z: &[f64]| (k - m) as f64 * z[0] >= m as f64 * z[1]);
        let meta = self.meta(k, k, Some(m), Theorem::T3, None, "(sum of the best m, sum of the other K-m)");
        Ok(self.scaled(2, f, support, meta))
    }

    /// Density of the sum of the best `Ks` out of `K`.
    pub fn pdf_gsc_sum(&self, k: usize, ks: usize) -> Result<JointDensity> {
        self.check_k(k)?;
        if ks == 0 || ks > k {
            return Err(Error::invalid(format!("need 1 <= Ks <= K (K = {k}, Ks = {ks})")));
        }
        let meta = self.meta(k, ks, None, Theorem::T4, None, "(sum of the best Ks)");
        if ks == 1 {
            let f: UnitFn = Arc::new(move |z: &[f64]| {
                Ok(k as f64 * (-z[0]).exp() * one_minus_exp(z[0]).powi((k - 1) as i32))
            });
            return Ok(self.scaled(1, f, Arc::new(|_| true), meta));
        }
        let rest = k - ks;
        let pre = prefactor(&[k], &[rest, ks - 1, ks - 2]);
        let cfg = self.config.residual;
        let f: UnitFn = Arc::new(move |z: &[f64]| {
            let x = z[0];
            let hi = x / ks as f64;
            if !(hi > 0.0) {
                return Ok(0.0);
            }
            let inner = try_integrate(
                |g| Ok(one_minus_exp(g).powi(rest as i32) * tpow(x - ks as f64 * g, ks - 2)),
                0.0,
                hi,
                &[],
                &cfg,
            )?;
            Ok(pre * (-x).exp() * inner.value)
        });
        Ok(self.scaled(1, f, Arc::new(|_| true), meta))
    }

    /// Fine density and reduction for `(g_m, sum of the other best Ks - 1)`.
    pub fn jpdf_one_vs_rest_best_ks(&self, k: usize, ks: usize, m: usize) -> Result<BestKsOneVsRest> {
        self.check_k(k)?;
        if ks < 2 || ks > k || m == 0 || m > ks {
            return Err(Error::invalid(format!("need 1 <= m <= Ks <= K and Ks >= 2 (K = {k}, Ks = {ks}, m = {m})")));
        }
        let reflected = ks == 2 && m == 1;
        let case = if reflected { Case::D } else { Case::of(m, ks)? };
        let fine_case = case;
        let (dim, grouping, support): (usize, &str, Arc<dyn Fn(&[f64]) -> bool + Send + Sync>) = match fine_case {
            Case::A => (3, "(g_1, g_2+..+g_{Ks-1}, g_Ks)", Arc::new(move |z: &[f64]| {
                z[0] >= z[2] && z[1] >= (ks - 2) as f64 * z[2] && z[1] <= (ks - 2) as f64 * z[0]
            })),
            Case::B => (4, "(g_1+..+g_{m-1}, g_m, g_{m+1}+..+g_{Ks-1}, g_Ks)", Arc::new(move |z: &[f64]| {
                let nb = (ks - m - 1) as f64;
                z[1] >= z[3] && z[0] >= (m - 1) as f64 * z[1] && z[2] >= nb * z[3] && z[2] <= nb * z[1]
            })),
            Case::C => (3, "(g_1+..+g_{Ks-2}, g_{Ks-1}, g_Ks)", Arc::new(move |z: &[f64]| {
                z[1] >= z[2] && z[0] >= (ks - 2) as f64 * z[1]
            })),
            Case::D => (2, "(g_Ks, g_1+..+g_{Ks-1})", Arc::new(move |z: &[f64]| z[1] >= (ks - 1) as f64 * z[0])),
        };
        let meta = self.meta(k, ks, Some(m), Theorem::T5, Some(case), grouping);
        let fine = self.scaled(dim, fine_unit(fine_case, k, ks, m), support, meta);
        Ok(BestKsOneVsRest { case, k, ks, m, reflected, fine, reduction: self.config.reduction })
    }

    /// Density of `(sum of the best m, sum of ranks m+1..Ks)` at `(x, y)`.
    pub fn jpdf_headsum_vs_tailsum_best_ks(&self, k: usize, ks: usize, m: usize, x: f64, y: f64) -> Result<f64> {
        self.headsum_tailsum_with_order(k, ks, m, x, y, ReductionOrder::default())
    }

    pub fn headsum_tailsum_with_order(
        &self,
        k: usize,
        ks: usize,
        m: usize,
        x: f64,
        y: f64,
        order: ReductionOrder,
    ) -> Result<f64> {
        self.check_k(k)?;
        if m == 0 || m >= ks || ks > k {
            return Err(Error::invalid(format!("need 1 <= m < Ks <= K (K = {k}, Ks = {ks}, m = {m})")));
        }
        if m == 1 {
            return self.jpdf_one_vs_rest_best_ks(k, ks, 1)?.reduce_with_order(x, y, order);
        }
        if !(x >= 0.0 && y >= 0.0) || (ks - m) as f64 * x < m as f64 * y {
            return Ok(0.0);
        }
        let case = if m == ks - 1 { Case::C } else { Case::B };
        let f = fine_unit(case, k, ks, m);
        let g = self.gamma_bar;
        let fine = |z: &[f64]| f(z);
        let v = reduction::head_vs_tail(&fine, ks, m, x / g, y / g, order, &self.config.reduction)?;
        Ok(v / (g * g))
    }

    /// Two-dimensional density of `(sum of the best m, sum of ranks m+1..Ks)`.
    pub fn headsum_tailsum_density(&self, k: usize, ks: usize, m: usize) -> Result<JointDensity> {
        self.check_k(k)?;
        if m == 0 || m >= ks || ks > k {
            return Err(Error::invalid(format!("need 1 <= m < Ks <= K (K = {k}, Ks = {ks}, m = {m})")));
        }
        let me = *self;
        let meta = self.meta(k, ks, Some(m), Theorem::T6, None, "(sum of the best m, sum of ranks m+1..Ks)");
        Ok(JointDensity::new(
            2,
            Arc::new(move |z: &[f64]| me.jpdf_headsum_vs_tailsum_best_ks(k, ks, m, z[0], z[1])),
            Arc::new(move |z: &[f64]| (ks - m) as f64 * z[0] >= m as f64 * z[1]),
            meta,
        ))
    }

    /// The density for a supported shape, in the shape's natural coordinates.
    pub fn density(&self, shape: &TheoremShape) -> Result<JointDensity> {
        let (k, ks) = (shape.k, shape.ks);
        let m = || shape.m.ok_or_else(|| Error::invalid(format!("{} needs m", shape.theorem)));
        let d = match shape.theorem {
            Theorem::T1 => self.pdf_sum_all(k)?,
            Theorem::T2 => self.jpdf_one_vs_rest_all_k(k, m()?)?,
            Theorem::T3 => self.jpdf_headsum_vs_tailsum_all_k(k, m()?)?,
            Theorem::T4 => self.pdf_gsc_sum(k, ks)?,
            Theorem::T5 => {
                let b = self.jpdf_one_vs_rest_best_ks(k, ks, m()?)?;
                if b.case == Case::D && !b.reflected {
                    let mut d = b.fine.clone();
                    d.meta.grouping = "(g_m, sum of the other best Ks-1)".into();
                    d
                } else {
                    b.density()
                }
            }
            Theorem::T6 => self.headsum_tailsum_density(k, ks, m()?)?,
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
    use crate::quadrature::try_integrate_to_infinity;

    fn unit() -> ExactExp {
        ExactExp::new(1.0).unwrap()
    }

    #[test]
    fn erlang_values() {
        let e = unit();
        assert!((e.pdf_sum_all(1).unwrap().evaluate(&[0.0]).unwrap() - 1.0).abs() < 1e-15);
        let v = e.pdf_sum_all(3).unwrap().evaluate(&[2.0]).unwrap();
        assert!((v - 2.0 * (-2.0f64).exp()).abs() < 1e-15);
        let e2 = ExactExp::new(2.0).unwrap();
        assert!((e2.pdf_sum_all(1).unwrap().evaluate(&[0.0]).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn two_variable_joint() {
        let d = unit().jpdf_one_vs_rest_all_k(2, 1).unwrap();
        let v = d.evaluate(&[1.0, 0.5]).unwrap();
        assert!((v - 2.0 * (-1.5f64).exp()).abs() < 1e-14);
        assert_eq!(d.evaluate(&[0.5, 1.0]).unwrap(), 0.0);
        let t3 = unit().jpdf_headsum_vs_tailsum_all_k(2, 1).unwrap();
        assert!((t3.evaluate(&[1.0, 0.5]).unwrap() - v).abs() < 1e-14);
    }

    #[test]
    fn best_one_of_three() {
        let v = unit().pdf_gsc_sum(3, 1).unwrap().evaluate(&[1.0]).unwrap();
        let e = (-1.0f64).exp();
        assert!((v - 3.0 * e * (1.0 - e).powi(2)).abs() < 1e-14);
        assert!((v - 0.440_987_7).abs() < 1e-6);
    }

    #[test]
    fn all_selected_matches_erlang() {
        let e = unit();
        for k in 2..6 {
            let a = e.pdf_gsc_sum(k, k).unwrap();
            let b = e.pdf_sum_all(k).unwrap();
            for &x in &[0.3, 1.0, 2.5, 7.0] {
                let (va, vb) = (a.evaluate(&[x]).unwrap(), b.evaluate(&[x]).unwrap());
                assert!((va - vb).abs() <= 1e-10 * vb.max(1e-3), "k={k} x={x}: {va} vs {vb}");
            }
        }
    }

    fn textbook_marginal(k: usize, m: usize, x: f64) -> f64 {
        let f = 1.0 - (-x).exp();
        prefactor(&[k], &[m - 1, k - m]) * (-x).exp() * f.powi((k - m) as i32) * (1.0 - f).powi((m - 1) as i32)
    }

    #[test]
    fn one_vs_rest_marginal() {
        let e = unit();
        let cfg = QuadConfig::new(1e-13, 1e-12);
        for k in 2..=6 {
            for m in 1..=k {
                let d = e.jpdf_one_vs_rest_all_k(k, m).unwrap();
                for &x in &[0.2, 0.9, 2.0] {
                    let v = try_integrate_to_infinity(|y| d.evaluate(&[x, y]), 0.0, &[(m - 1) as f64 * x, (k - 1) as f64 * x], &cfg)
                        .unwrap()
                        .value;
                    let t = textbook_marginal(k, m, x);
                    assert!((v - t).abs() < 1e-7, "k={k} m={m} x={x}: {v} vs {t}");
                }
            }
        }
    }

    #[test]
    fn one_vs_rest_at_k20_is_nonnegative() {
        let d = unit().jpdf_one_vs_rest_all_k(20, 1).unwrap();
        let mut worst: f64 = 0.0;
        for i in 1..=40 {
            for j in 0..=25 {
                let x = 0.1 * i as f64;
                let y = 19.0 * x * j as f64 / 25.0;
                worst = worst.min(d.evaluate(&[x, y]).unwrap());
            }
        }
        assert!(worst >= 0.0, "{worst}");
    }

    #[test]
    fn reduction_orders_agree() {
        let e = unit();
        let shapes = [(5, 4, 2), (6, 5, 2), (6, 5, 3), (5, 4, 1), (4, 3, 1), (5, 4, 3), (4, 3, 2), (6, 6, 3)];
        for &(k, ks, m) in &shapes {
            let b = e.jpdf_one_vs_rest_best_ks(k, ks, m).unwrap();
            for &(x, y) in &[(0.7, 1.3), (1.2, 2.9), (0.4, 0.5), (2.0, 2.2)] {
                let p = b.reduce_with_order(x, y, ReductionOrder::OuterLast).unwrap();
                let q = b.reduce_with_order(x, y, ReductionOrder::OuterOther).unwrap();
                assert!((p - q).abs() <= 1e-8 * p.abs().max(1e-6), "T5 {k},{ks},{m} at ({x},{y}): {p} vs {q}");
            }
        }
        for &(k, ks, m) in &[(5, 5, 2), (6, 5, 2), (6, 6, 3), (5, 4, 3), (4, 4, 2)] {
            for &(x, y) in &[(2.0, 0.7), (3.1, 1.0), (1.5, 1.2)] {
                let p = e.headsum_tailsum_with_order(k, ks, m, x, y, ReductionOrder::OuterLast).unwrap();
                let q = e.headsum_tailsum_with_order(k, ks, m, x, y, ReductionOrder::OuterOther).unwrap();
                assert!((p - q).abs() <= 1e-8 * p.abs().max(1e-6), "T6 {k},{ks},{m} at ({x},{y}): {p} vs {q}");
            }
        }
    }

    #[test]
    fn all_selected_reductions_match_all_k_forms() {
        let e = unit();
        for k in 3..=5 {
            for m in 1..=k {
                let t5 = e.jpdf_one_vs_rest_best_ks(k, k, m).unwrap();
                let t2 = e.jpdf_one_vs_rest_all_k(k, m).unwrap();
                for &(x, y) in &[(0.6, 1.4), (1.1, 2.5), (0.3, 0.4), (0.9, 0.5)] {
                    let (a, b) = (t5.reduce_to_2d(x, y).unwrap(), t2.evaluate(&[x, y]).unwrap());
                    assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-6), "T5/T2 {k},{m} at ({x},{y}): {a} vs {b}");
                }
            }
            for m in 1..k {
                let t3 = e.jpdf_headsum_vs_tailsum_all_k(k, m).unwrap();
                for &(x, y) in &[(2.0, 0.7), (3.0, 1.1), (1.4, 1.0)] {
                    let a = e.jpdf_headsum_vs_tailsum_best_ks(k, k, m, x, y).unwrap();
                    let b = t3.evaluate(&[x, y]).unwrap();
                    assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-6), "T6/T3 {k},{m} at ({x},{y}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn gsc_sum_normalizes() {
        let e = unit();
        let cfg = QuadConfig::new(1e-12, 1e-11);
        for &(k, ks) in &[(3, 1), (5, 3), (6, 2), (4, 4)] {
            let d = e.pdf_gsc_sum(k, ks).unwrap();
            let total = try_integrate_to_infinity(|x| d.evaluate(&[x]), 0.0, &[], &cfg).unwrap().value;
            assert!((total - 1.0).abs() < 1e-8, "{k},{ks}: {total}");
        }
    }

    #[test]
    fn fine_density_support_edges() {
        let b = unit().jpdf_one_vs_rest_best_ks(4, 4, 4).unwrap();
        assert_eq!(b.fine.evaluate(&[1.0, 2.9]).unwrap(), 0.0);
        assert!(b.fine.evaluate(&[1.0, 3.1]).unwrap() > 0.0);
        let refl = unit().jpdf_one_vs_rest_best_ks(3, 2, 1).unwrap();
        assert!(refl.reflected);
        let v = refl.reduce_to_2d(1.0, 0.5).unwrap();
        let e = |t: f64| (-t).exp();
        assert!((v - 6.0 * e(1.0) * e(0.5) * (1.0 - e(0.5))).abs() < 1e-14);
        assert_eq!(refl.reduce_to_2d(0.5, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn scale_equivariance() {
        let (e1, e3) = (unit(), ExactExp::new(3.0).unwrap());
        let a = e1.jpdf_headsum_vs_tailsum_all_k(5, 2).unwrap();
        let b = e3.jpdf_headsum_vs_tailsum_all_k(5, 2).unwrap();
        let (p, q) = (a.evaluate(&[2.0, 1.0]).unwrap(), b.evaluate(&[6.0, 3.0]).unwrap() * 9.0);
        assert!((p - q).abs() <= 1e-10 * p);
    }
}
