//! Minimum-selection generalized selection combining (MS-GSC).
//!
//! Out of `L` diversity paths the receiver combines the fewest strongest
//! paths whose summed SNR reaches the threshold `gamma_t`. With
//! `S_m = g_{1:L} + .. + g_{m:L}`, stage `m` is the event
//! `S_{m-1} < gamma_t <= S_m`; on it the output is `S_m`. When even `S_L`
//! stays below the threshold the output is either `S_L` or an outage,
//! depending on [`OutageConvention`].

use crate::density::JointDensity;
use crate::distributions::{Distribution, Exponential};
use crate::error::{Error, Result};
use crate::exact_exp::ExactExp;
use crate::generic_joint::GenericJoint;
use crate::mc_oracle::map_sorted;
use crate::partition::{Theorem, TheoremShape};
use crate::quadrature::{try_integrate, QuadConfig};
use serde::Serialize;
use std::sync::Arc;

/// What the combiner reports when all `L` paths together stay below the
/// threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutageConvention {
    /// The output is the sum of all `L` paths.
    #[default]
    FullSum,
    /// The output is declared zero.
    Outage,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MsGscConfig {
    pub l: usize,
    pub gamma_t: f64,
    pub gamma_bar: f64,
    pub convention: OutageConvention,
}

impl MsGscConfig {
    pub fn new(l: usize, gamma_t: f64, gamma_bar: f64) -> Result<Self> {
        if l == 0 {
            return Err(Error::invalid("L must be at least 1"));
        }
        if !(gamma_t > 0.0 && gamma_t.is_finite()) {
            return Err(Error::invalid(format!("threshold must be positive, got {gamma_t}")));
        }
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::invalid(format!("average SNR must be positive, got {gamma_bar}")));
        }
        Ok(Self { l, gamma_t, gamma_bar, convention: OutageConvention::FullSum })
    }

    pub fn with_convention(mut self, convention: OutageConvention) -> Self {
        self.convention = convention;
        self
    }
}

/// Analytic MS-GSC statistics.
#[derive(Debug, Clone)]
pub struct MsGsc {
    cfg: MsGscConfig,
    dist: Arc<dyn Distribution>,
    /// Density of `(g_{m:L}, S_{m-1})` for `m = 2..=L`.
    stages: Vec<JointDensity>,
    total: JointDensity,
    quad: QuadConfig,
}

impl MsGsc {
    /// Exponential paths with mean `cfg.gamma_bar`, closed-form densities.
    pub fn exact(cfg: MsGscConfig) -> Result<Self> {
        let e = ExactExp::new(cfg.gamma_bar)?;
        let stages = (2..=cfg.l)
            .map(|m| Ok(e.jpdf_one_vs_rest_best_ks(cfg.l, m, m)?.fine))
            .collect::<Result<_>>()?;
        let total = e.pdf_sum_all(cfg.l)?;
        let dist: Arc<dyn Distribution> = Arc::new(Exponential::new(cfg.gamma_bar)?);
        Ok(Self { cfg, dist, stages, total, quad: Self::default_quad() })
    }

    /// Paths drawn from `dist`, densities by numerical inversion.
    /// `cfg.gamma_bar` is ignored.
    pub fn generic(cfg: MsGscConfig, dist: Arc<dyn Distribution>) -> Result<Self> {
        let g = GenericJoint::new(dist.clone())?;
        let stages = (2..=cfg.l)
            .map(|m| g.density(&TheoremShape::new(Theorem::T5, cfg.l, m, Some(m))?))
            .collect::<Result<_>>()?;
        let total = g.density(&TheoremShape::new(Theorem::T1, cfg.l, cfg.l, None)?)?;
        Ok(Self { cfg, dist, stages, total, quad: Self::default_quad() })
    }

    fn default_quad() -> QuadConfig {
        QuadConfig { abs_tol: 1e-11, rel_tol: 1e-9, max_intervals: 2000 }
    }

    pub fn config(&self) -> &MsGscConfig {
        &self.cfg
    }

    /// `P(S_L < x)`.
    pub fn full_sum_cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        Ok(try_integrate(|t| self.total.evaluate(&[t]), 0.0, x, &[], &self.quad)?.value)
    }

    /// `P(S_{m-1} < gamma_t <= S_m < x)`.
    pub fn stage_probability(&self, m: usize, x: f64) -> Result<f64> {
        let l = self.cfg.l;
        let gt = self.cfg.gamma_t;
        if m == 0 || m > l {
            return Err(Error::invalid(format!("stage {m} outside 1..={l}")));
        }
        if !(x > gt) {
            return Ok(0.0);
        }
        if m == 1 {
            let (fx, ft) = (self.dist.cdf(x), self.dist.cdf(gt));
            return Ok(fx.powi(l as i32) - ft.powi(l as i32));
        }
        let d = &self.stages[m - 2];
        let mh = (m - 1) as f64;
        let lo = mh * gt / m as f64;
        let knot = mh * x / m as f64;
        let inner_cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 1000 };
        let v = try_integrate(
            |h| {
                let g_lo = (gt - h).max(0.0);
                let g_hi = (x - h).min(h / mh);
                if !(g_hi > g_lo) {
                    return Ok(0.0);
                }
                Ok(try_integrate(|g| d.evaluate(&[g, h]), g_lo, g_hi, &[], &inner_cfg)?.value)
            },
            lo,
            gt,
            &[knot],
            &self.quad,
        )?;
        Ok(v.value)
    }

    /// Probability that the combiner reports an outage, `P(S_L < gamma_t)`.
    pub fn below_threshold_probability(&self) -> Result<f64> {
        self.full_sum_cdf(self.cfg.gamma_t)
    }

    /// `P(output < x)`.
    pub fn output_cdf(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Ok(0.0);
        }
        let gt = self.cfg.gamma_t;
        let residual = match self.cfg.convention {
            OutageConvention::FullSum => self.full_sum_cdf(x.min(gt))?,
            OutageConvention::Outage => self.full_sum_cdf(gt)?,
        };
        if x <= gt {
            return Ok(residual);
        }
        let mut acc = residual;
        for m in 1..=self.cfg.l {
            acc += self.stage_probability(m, x)?;
        }
        Ok(acc.clamp(0.0, 1.0))
    }
}

/// Number of paths the rule combines for a draw sorted largest first, or
/// `None` when all of them together stay below `gamma_t`. Reaching the
/// threshold exactly counts as stopping.
pub fn combined_paths(sorted: &[f64], gamma_t: f64) -> Option<usize> {
    let mut s = 0.0;
    for (i, &g) in sorted.iter().enumerate() {
        s += g;
        if s >= gamma_t {
            return Some(i + 1);
        }
    }
    None
}

/// Combiner output for one sorted draw.
pub fn combiner_output(sorted: &[f64], gamma_t: f64, convention: OutageConvention) -> f64 {
    match combined_paths(sorted, gamma_t) {
        Some(m) => sorted[..m].iter().sum(),
        None => match convention {
            OutageConvention::FullSum => sorted.iter().sum(),
            OutageConvention::Outage => 0.0,
        },
    }
}

/// Simulated combiner outputs for `n` independent draws of `L` paths.
pub fn simulate_outputs(cfg: &MsGscConfig, dist: &dyn Distribution, n: usize, seed: u64) -> Vec<f64> {
    map_sorted(dist, cfg.l, n, seed, |s| combiner_output(s, cfg.gamma_t, cfg.convention))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_rule() {
        assert_eq!(combined_paths(&[2.0, 1.0, 0.5], 1.5), Some(1));
        assert_eq!(combined_paths(&[1.0, 0.5, 0.2], 1.5), Some(2));
        assert_eq!(combined_paths(&[0.5, 0.4, 0.2], 1.5), None);
        assert_eq!(combiner_output(&[0.5, 0.4, 0.2], 1.5, OutageConvention::Outage), 0.0);
    }

    #[test]
    fn total_probability_is_one() {
        for l in 2..=4 {
            let ms = MsGsc::exact(MsGscConfig::new(l, 1.2, 1.0).unwrap()).unwrap();
            let mut total = ms.below_threshold_probability().unwrap();
            for m in 1..=l {
                total += ms.stage_probability(m, 80.0).unwrap();
            }
            assert!((total - 1.0).abs() < 1e-8, "L = {l}: {total}");
        }
    }

    #[test]
    fn empty_event_below_threshold() {
        let ms = MsGsc::exact(MsGscConfig::new(3, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(ms.stage_probability(2, 1.0).unwrap(), 0.0);
        assert_eq!(ms.stage_probability(2, 0.5).unwrap(), 0.0);
    }
}
