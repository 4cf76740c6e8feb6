//! Numerical inverse Laplace transform on a vertical Bromwich line with
//! Euler summation of the alternating tail.

use crate::distributions::C64;
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{LN_10, PI};
use std::sync::Arc;

/// Extra digits of contour damping tried before giving up on aliasing.
const MAX_EXTRA_DIGITS: u32 = 4;

pub type SFn = Arc<dyn Fn(C64) -> Result<C64> + Send + Sync>;

/// A Laplace transform `e^{-delay s} F(s)` with `F` analytic for
/// `Re s > abscissa`.
#[derive(Clone)]
pub struct TransformFn {
    pub f: SFn,
    pub abscissa: f64,
    /// Typical time scale of the original function.
    pub scale_hint: f64,
    /// Pure delay factored out of `f`; the inverse is evaluated at `t - delay`.
    pub delay: f64,
}

impl std::fmt::Debug for TransformFn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformFn")
            .field("abscissa", &self.abscissa)
            .field("scale_hint", &self.scale_hint)
            .field("delay", &self.delay)
            .finish()
    }
}

impl TransformFn {
    pub fn new(f: SFn, abscissa: f64, scale_hint: f64) -> Self {
        Self { f, abscissa, scale_hint, delay: 0.0 }
    }

    pub fn from_fn<F>(f: F, abscissa: f64, scale_hint: f64) -> Self
    where
        F: Fn(C64) -> Result<C64> + Send + Sync + 'static,
    {
        Self::new(Arc::new(f), abscissa, scale_hint)
    }

    pub fn with_delay(mut self, delay: f64) -> Self {
        self.delay = delay;
        self
    }

    pub fn eval(&self, s: C64) -> Result<C64> {
        let v = (self.f)(s)?;
        Ok(if self.delay == 0.0 { v } else { v * (-s * self.delay).exp() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IltConfig {
    pub target_digits: u32,
    /// Number of partial sums averaged by the Euler transform.
    pub euler_terms: usize,
    pub initial_terms: usize,
    pub max_terms: usize,
    /// Absolute error accepted regardless of the relative target. `None`
    /// derives a floor from the magnitude of the transform on the contour.
    pub abs_floor: Option<f64>,
    /// Lowest contour abscissa allowed, in units of `1 / scale_hint`.
    pub min_abscissa: f64,
}

impl Default for IltConfig {
    fn default() -> Self {
        Self {
            target_digits: 8,
            euler_terms: 11,
            initial_terms: 16,
            max_terms: 4096,
            abs_floor: None,
            min_abscissa: -4.0,
        }
    }
}

impl IltConfig {
    pub fn with_digits(target_digits: u32) -> Self {
        Self { target_digits, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IltEstimate {
    pub value: f64,
    pub error: f64,
    /// Set when `t` was too close to the origin and the limit 0 was returned.
    pub near_origin: bool,
    pub terms: usize,
}

struct Series {
    x: f64,
    h: f64,
    values: Vec<f64>,
    magnitude: f64,
}

impl Series {
    fn extend(&mut self, tf: &TransformFn, upto: usize) -> Result<()> {
        while self.values.len() <= upto {
            let k = self.values.len();
            let v = tf.eval(C64::new(self.x, k as f64 * self.h))?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::domain(format!("transform not finite at s = {} + {}i", self.x, k as f64 * self.h)));
            }
            self.magnitude += v.re.abs();
            self.values.push(if k == 0 { 0.5 * v.re } else if k % 2 == 1 { -v.re } else { v.re });
        }
        Ok(())
    }

    /// Euler average of the partial sums `s_n .. s_{n+m}`.
    fn euler(&self, n: usize, m: usize) -> f64 {
        let mut partial = 0.0;
        for v in &self.values[..n] {
            partial += v;
        }
        let mut acc = 0.0;
        let mut w = 1.0;
        let scale = 0.5f64.powi(m as i32);
        for j in 0..=m {
            partial += self.values[n + j];
            acc += w * partial;
            w = w * (m - j) as f64 / (j + 1) as f64;
        }
        acc * scale
    }
}

/// Invert `tf` at `t` with the given number of target digits.
pub fn invert_numeric(tf: &TransformFn, t: f64, target_digits: u32) -> Result<IltEstimate> {
    invert_with(tf, t, &IltConfig::with_digits(target_digits))
}

pub fn invert_with(tf: &TransformFn, t: f64, cfg: &IltConfig) -> Result<IltEstimate> {
    if !(4..=12).contains(&cfg.target_digits) {
        return Err(Error::invalid(format!("target digits must be in 4..=12, got {}", cfg.target_digits)));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("inversion point must be positive, got {t}")));
    }
    let scale = tf.scale_hint.max(f64::MIN_POSITIVE);
    let tau = t - tf.delay;
    if tau <= 0.0 {
        return Ok(IltEstimate { value: 0.0, error: 0.0, near_origin: false, terms: 0 });
    }
    if tau < 1e-6 * scale {
        return Ok(IltEstimate { value: 0.0, error: 0.0, near_origin: true, terms: 0 });
    }
    let inner = TransformFn { delay: 0.0, ..tf.clone() };
    let sigma0 = if tf.abscissa.is_finite() { tf.abscissa } else { f64::NEG_INFINITY };
    let sigma0 = sigma0.max(cfg.min_abscissa / scale);
    let target = 10f64.powi(-(cfg.target_digits as i32));
    let mut a = (cfg.target_digits as f64 * LN_10).max(1.0);
    let mut lo = summed_series(&inner, t, tau, sigma0, a, cfg)?;
    let mut terms = lo.terms;
    for extra in 1..=MAX_EXTRA_DIGITS {
        a += LN_10;
        let hi = summed_series(&inner, t, tau, sigma0, a, cfg)?;
        terms += hi.terms;
        // Each extra digit of damping shrinks the aliasing error tenfold, so
        // the change between passes bounds the aliasing left in `hi`.
        let aliasing = (lo.value - hi.value).abs() / 9.0;
        let error = hi.truncation + hi.roundoff + aliasing;
        let tol = (target * hi.value.abs()).max(hi.floor);
        if hi.truncation + aliasing <= tol {
            return Ok(IltEstimate { value: hi.value, error, near_origin: false, terms });
        }
        if extra == MAX_EXTRA_DIGITS {
            let achieved = if hi.value != 0.0 { -(error / hi.value.abs()).log10() } else { 0.0 };
            return Err(Error::IltNonConvergence { t, value: hi.value, error, achieved_digits: achieved.max(0.0) });
        }
        lo = hi;
    }
    unreachable!("the last pass always returns")
}

struct Pass {
    value: f64,
    truncation: f64,
    roundoff: f64,
    floor: f64,
    terms: usize,
}

/// Euler-summed Bromwich series with damping `a`, grown until the partial
/// sums settle.
fn summed_series(inner: &TransformFn, t: f64, tau: f64, sigma0: f64, a: f64, cfg: &IltConfig) -> Result<Pass> {
    let digits = cfg.target_digits as f64;
    let x = sigma0 + a / (2.0 * tau);
    let prefactor = (sigma0 * tau + 0.5 * a).exp() / tau;
    let mut series = Series { x, h: PI / tau, values: Vec::new(), magnitude: 0.0 };
    let m = cfg.euler_terms;
    let mut n = cfg.initial_terms.max(2);
    series.extend(inner, n + m)?;
    let mut prev = series.euler(n / 2, m);
    loop {
        let cur = series.euler(n, m);
        let value = prefactor * cur;
        let truncation = prefactor * (cur - prev).abs();
        let roundoff = prefactor * series.magnitude * f64::EPSILON * 4.0;
        let floor = cfg
            .abs_floor
            .unwrap_or_else(|| 1e-3 * 10f64.powf(-digits) * prefactor * series.values[0].abs());
        let tol = (10f64.powf(-digits) * value.abs()).max(floor);
        if truncation <= tol {
            return Ok(Pass { value, truncation, roundoff, floor, terms: n + m });
        }
        if 2 * n > cfg.max_terms {
            let error = truncation + roundoff;
            let achieved = if value != 0.0 { -(error / value.abs()).log10() } else { 0.0 };
            return Err(Error::IltNonConvergence { t, value, error, achieved_digits: achieved.max(0.0) });
        }
        prev = cur;
        n *= 2;
        series.extend(inner, n + m)?;
    }
}

/// Spot-check analyticity of `tf.f` to the right of its abscissa through
/// the Cauchy-Riemann equations at three pseudo-random points.
pub fn check_analytic(tf: &TransformFn, seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = tf.scale_hint.max(f64::MIN_POSITIVE);
    let base = if tf.abscissa.is_finite() { tf.abscissa } else { 0.0 };
    for _ in 0..3 {
        let s = C64::new(base + rng.random_range(0.5..2.0) / scale, rng.random_range(-3.0..3.0) / scale);
        let h = 1e-4 * (1.0 / scale).max(s.norm());
        let dx = ((tf.f)(s + h)? - (tf.f)(s - h)?) / (2.0 * h);
        let ih = C64::new(0.0, h);
        let dy = ((tf.f)(s + ih)? - (tf.f)(s - ih)?) / (C64::new(0.0, 2.0 * h));
        let mag = dx.norm().max(dy.norm()).max((tf.f)(s)?.norm() * scale);
        if (dx - dy).norm() > 1e-4 * mag.max(1e-300) {
            return Err(Error::domain(format!(
                "transform fails the Cauchy-Riemann check at s = {} + {}i",
                s.re, s.im
            )));
        }
    }
    Ok(())
}
