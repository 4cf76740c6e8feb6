//! Non-negative base distributions and their MGF kernels.
//!
//! Every distribution exposes the three truncated moment-generating
//! integrals
//!
//! * `c(g, l) = int_0^g p(x) e^{l x} dx`
//! * `e(g, l) = int_g^inf p(x) e^{l x} dx`
//! * `mu(a, b, l) = int_a^b p(x) e^{l x} dx`
//!
//! together with the shift-free tail `G_z(l) = int_z^inf p(x) e^{l (x - z)} dx`,
//! so that `e(z, l) = e^{l z} G_z(l)`. The default implementations integrate
//! numerically; [`Exponential`] and [`Uniform`] override them with closed
//! forms.

use crate::error::{Error, Result};
use crate::special::faddeeva;
use crate::quadrature::{integrate, integrate_to_infinity, QuadConfig};
use num_complex::Complex64;
use rand::RngCore;
use rand_distr::{Distribution as _, StandardNormal};
use std::fmt::Debug;
use std::sync::Arc;

pub type C64 = Complex64;

/// Tolerances used by the numeric kernel defaults.
pub const KERNEL_QUAD: QuadConfig = QuadConfig { abs_tol: 1e-12, rel_tol: 1e-10, max_intervals: 4000 };

pub trait Distribution: Debug + Send + Sync {
    fn name(&self) -> String;
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;

    /// Survival function `1 - cdf(x)`; override when it can be computed
    /// without cancellation.
    fn sf(&self, x: f64) -> f64 {
        1.0 - self.cdf(x)
    }

    fn mean(&self) -> f64;

    /// Supremum of the real parts of `l` for which `E[e^{l X}]` converges.
    fn abscissa(&self) -> f64;

    /// Right end of the support.
    fn upper_support(&self) -> f64 {
        f64::INFINITY
    }

    /// Points where the density is discontinuous or not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    fn sample(&self, rng: &mut dyn RngCore) -> f64;

    /// A point beyond which the remaining mass is below `1e-18`.
    fn tail_point(&self) -> f64 {
        let up = self.upper_support();
        if up.is_finite() {
            return up;
        }
        let mut hi = self.mean().max(1e-300);
        while self.sf(hi) > 1e-18 && hi < 1e300 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.sf(mid) > 1e-18 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }

    fn kernel_c(&self, gamma: f64, lambda: C64) -> Result<C64> {
        if gamma == f64::INFINITY {
            return self.mgf(lambda);
        }
        numeric_segment(self, 0.0, gamma, lambda, 0.0)
    }

    fn kernel_e(&self, gamma: f64, lambda: C64) -> Result<C64> {
        check_abscissa(self, lambda)?;
        Ok((lambda * gamma).exp() * self.kernel_e_shifted(gamma, lambda)?)
    }

    fn kernel_mu(&self, a: f64, b: f64, lambda: C64) -> Result<C64> {
        if b == f64::INFINITY {
            return self.kernel_e(a, lambda);
        }
        numeric_segment(self, a, b, lambda, 0.0)
    }

    /// `G_z(l) = int_z^inf p(x) e^{l (x - z)} dx`.
    fn kernel_e_shifted(&self, z: f64, lambda: C64) -> Result<C64> {
        check_abscissa(self, lambda)?;
        numeric_tail(self, z, lambda)
    }

    fn mgf(&self, lambda: C64) -> Result<C64> {
        self.kernel_e_shifted(0.0, lambda)
    }

    /// Optional split `G_z(l) = sum_i e^{l d_i} V_i(l)` into parts without
    /// pure delays, returned as `(d_i, V_i(l))`. The delays must not depend
    /// on `l`.
    fn tail_split(&self, _z: f64, _lambda: C64) -> Option<Vec<(f64, C64)>> {
        None
    }

    /// Rightmost singularity of the split parts in the variable `s = -l`.
    fn tail_split_abscissa(&self) -> f64 {
        f64::NEG_INFINITY
    }
}

fn check_abscissa<D: Distribution + ?Sized>(d: &D, lambda: C64) -> Result<()> {
    let a = d.abscissa();
    if lambda.re < a || (a == f64::INFINITY && lambda.re.is_finite()) {
        Ok(())
    } else {
        Err(Error::Divergent { re: lambda.re, abscissa: a })
    }
}

/// `int_a^b p(x) e^{l (x - origin)} dx` by adaptive quadrature.
fn numeric_segment<D: Distribution + ?Sized>(d: &D, a: f64, b: f64, lambda: C64, origin: f64) -> Result<C64> {
    if !(a >= 0.0) || b < a {
        return Err(Error::domain(format!("kernel range [{a}, {b}] is not an ordered non-negative interval")));
    }
    let b = b.min(d.upper_support());
    if b <= a {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut knots = d.breakpoints();
    knots.extend(oscillation_knots(a, b, lambda));
    let est = integrate(|x| weighted(d, x, lambda, origin), a, b, &knots, &KERNEL_QUAD)?;
    Ok(est.value)
}

fn numeric_tail<D: Distribution + ?Sized>(d: &D, z: f64, lambda: C64) -> Result<C64> {
    if !(z >= 0.0) {
        return Err(Error::domain(format!("kernel threshold {z} must be non-negative")));
    }
    if z >= d.upper_support() {
        return Ok(C64::new(0.0, 0.0));
    }
    if lambda.re <= 0.0 || d.upper_support().is_finite() {
        let end = d.tail_point().max(z);
        return numeric_segment(d, z, end, lambda, z);
    }
    let mut knots = d.breakpoints();
    knots.retain(|&k| k > z);
    let est = integrate_to_infinity(|x| weighted(d, x, lambda, z), z, &knots, &KERNEL_QUAD)?;
    Ok(est.value)
}

fn weighted<D: Distribution + ?Sized>(d: &D, x: f64, lambda: C64, origin: f64) -> C64 {
    let p = d.pdf(x);
    if p == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        (lambda * (x - origin)).exp() * p
    }
}

/// Pre-split a highly oscillatory range into chunks of a few periods.
fn oscillation_knots(a: f64, b: f64, lambda: C64) -> Vec<f64> {
    let w = lambda.im.abs();
    if w == 0.0 {
        return Vec::new();
    }
    let period = 2.0 * std::f64::consts::PI / w;
    let pieces = ((b - a) / (4.0 * period)).floor();
    if pieces < 2.0 {
        return Vec::new();
    }
    let n = pieces.min(20_000.0) as usize;
    (1..n).map(|i| a + (b - a) * i as f64 / n as f64).collect()
}

/// `(1 - e^{-w}) / w`, accurate near zero.
pub(crate) fn one_minus_exp_over(w: C64) -> C64 {
    if w.norm() < 0.25 {
        let mut term = C64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..30 {
            term = term * (-w) / (k as f64 + 1.0);
            sum += term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        sum
    } else {
        (C64::new(1.0, 0.0) - (-w).exp()) / w
    }
}

/// Exponential distribution with mean `gamma_bar`, the law of the SNR of a
/// Rayleigh-faded branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    gamma_bar: f64,
}

impl Exponential {
    pub fn new(gamma_bar: f64) -> Result<Self> {
        if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
            return Err(Error::invalid(format!("exponential mean must be positive, got {gamma_bar}")));
        }
        Ok(Self { gamma_bar })
    }

    pub fn gamma_bar(&self) -> f64 {
        self.gamma_bar
    }

    fn rate(&self) -> f64 {
        1.0 / self.gamma_bar
    }
}

impl Distribution for Exponential {
    fn name(&self) -> String {
        format!("exp:{}", self.gamma_bar)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            (-x / self.gamma_bar).exp() / self.gamma_bar
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            -(-x / self.gamma_bar).exp_m1()
        }
    }
    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (-x / self.gamma_bar).exp()
        }
    }
    fn mean(&self) -> f64 {
        self.gamma_bar
    }
    fn abscissa(&self) -> f64 {
        self.rate()
    }
    fn tail_point(&self) -> f64 {
        self.gamma_bar * 18.0 * std::f64::consts::LN_10
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        // 53-bit uniform on (0, 1]
        let u = ((rng.next_u64() >> 11) as f64 + 1.0) * (1.0 / (1u64 << 53) as f64);
        -self.gamma_bar * u.ln()
    }

    fn kernel_c(&self, gamma: f64, lambda: C64) -> Result<C64> {
        if !(gamma >= 0.0) {
            return Err(Error::domain(format!("kernel threshold {gamma} must be non-negative")));
        }
        let w = self.rate() - lambda;
        if gamma == f64::INFINITY {
            check_abscissa(self, lambda)?;
            return Ok(self.rate() / w);
        }
        Ok(self.rate() * gamma * one_minus_exp_over(w * gamma))
    }

    fn kernel_e_shifted(&self, z: f64, lambda: C64) -> Result<C64> {
        if !(z >= 0.0) {
            return Err(Error::domain(format!("kernel threshold {z} must be non-negative")));
        }
        check_abscissa(self, lambda)?;
        let w = self.rate() - lambda;
        Ok((-z * self.rate()).exp() * self.rate() / w)
    }

    fn kernel_mu(&self, a: f64, b: f64, lambda: C64) -> Result<C64> {
        if !(a >= 0.0) || b < a {
            return Err(Error::domain(format!("kernel range [{a}, {b}] is not ordered")));
        }
        if b == f64::INFINITY {
            return self.kernel_e(a, lambda);
        }
        let w = self.rate() - lambda;
        Ok((-w * a).exp() * self.rate() * (b - a) * one_minus_exp_over(w * (b - a)))
    }
}

/// Half-normal distribution `|N(0, sigma^2)|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfNormal {
    sigma: f64,
}

impl HalfNormal {
    pub fn new(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::invalid(format!("half-normal scale must be positive, got {sigma}")));
        }
        Ok(Self { sigma })
    }
}

impl Distribution for HalfNormal {
    fn name(&self) -> String {
        format!("halfnormal:{}", self.sigma)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let u = x / self.sigma;
        (2.0 / std::f64::consts::PI).sqrt() / self.sigma * (-0.5 * u * u).exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else {
            libm::erf(x / (self.sigma * std::f64::consts::SQRT_2))
        }
    }
    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            libm::erfc(x / (self.sigma * std::f64::consts::SQRT_2))
        }
    }
    fn mean(&self) -> f64 {
        self.sigma * (2.0 / std::f64::consts::PI).sqrt()
    }
    fn abscissa(&self) -> f64 {
        f64::INFINITY
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        self.sigma * z.abs()
    }
    fn kernel_e_shifted(&self, z: f64, lambda: C64) -> Result<C64> {
        if !(z >= 0.0) {
            return Err(Error::domain(format!("kernel threshold {z} must be non-negative")));
        }
        let s = self.sigma;
        let u = (C64::new(z, 0.0) - lambda * (s * s)) / (s * std::f64::consts::SQRT_2);
        Ok((-0.5 * (z / s).powi(2)).exp() * faddeeva(C64::i() * u))
    }
}

/// Uniform distribution on `[0, width]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    width: f64,
}

impl Uniform {
    pub fn new(width: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::invalid(format!("uniform width must be positive, got {width}")));
        }
        Ok(Self { width })
    }

    pub fn unit() -> Self {
        Self { width: 1.0 }
    }
}

impl Distribution for Uniform {
    fn name(&self) -> String {
        format!("uniform:{}", self.width)
    }
    fn pdf(&self, x: f64) -> f64 {
        if (0.0..=self.width).contains(&x) {
            1.0 / self.width
        } else {
            0.0
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        (x / self.width).clamp(0.0, 1.0)
    }
    fn mean(&self) -> f64 {
        0.5 * self.width
    }
    fn abscissa(&self) -> f64 {
        f64::INFINITY
    }
    fn upper_support(&self) -> f64 {
        self.width
    }
    fn breakpoints(&self) -> Vec<f64> {
        vec![self.width]
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        self.width * u
    }

    fn kernel_c(&self, gamma: f64, lambda: C64) -> Result<C64> {
        if !(gamma >= 0.0) {
            return Err(Error::domain(format!("kernel threshold {gamma} must be non-negative")));
        }
        let g = gamma.min(self.width);
        // (e^{l g} - 1) / (l w) = e^{l g} g (1 - e^{-l g}) / (l g) / w
        Ok((lambda * g).exp() * g * one_minus_exp_over(lambda * g) / self.width)
    }

    fn kernel_e_shifted(&self, z: f64, lambda: C64) -> Result<C64> {
        if !(z >= 0.0) {
            return Err(Error::domain(format!("kernel threshold {z} must be non-negative")));
        }
        if z >= self.width {
            return Ok(C64::new(0.0, 0.0));
        }
        let len = self.width - z;
        Ok((lambda * len).exp() * len * one_minus_exp_over(lambda * len) / self.width)
    }

    fn tail_split(&self, z: f64, lambda: C64) -> Option<Vec<(f64, C64)>> {
        if z >= self.width {
            return Some(Vec::new());
        }
        let v = 1.0 / (lambda * self.width);
        Some(vec![(0.0, -v), (self.width - z, v)])
    }

    fn tail_split_abscissa(&self) -> f64 {
        0.0
    }

    fn kernel_mu(&self, a: f64, b: f64, lambda: C64) -> Result<C64> {
        if !(a >= 0.0) || b < a {
            return Err(Error::domain(format!("kernel range [{a}, {b}] is not ordered")));
        }
        Ok(self.kernel_c(b, lambda)? - self.kernel_c(a, lambda)?)
    }
}

/// Wraps a distribution and hides its closed-form kernels, so every kernel
/// goes through numerical quadrature.
#[derive(Debug, Clone)]
pub struct Numeric<D>(pub D);

impl<D: Distribution> Distribution for Numeric<D> {
    fn name(&self) -> String {
        format!("numeric({})", self.0.name())
    }
    fn pdf(&self, x: f64) -> f64 {
        self.0.pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.0.cdf(x)
    }
    fn sf(&self, x: f64) -> f64 {
        self.0.sf(x)
    }
    fn mean(&self) -> f64 {
        self.0.mean()
    }
    fn abscissa(&self) -> f64 {
        self.0.abscissa()
    }
    fn upper_support(&self) -> f64 {
        self.0.upper_support()
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
    fn tail_point(&self) -> f64 {
        self.0.tail_point()
    }
    fn sample(&self, rng: &mut dyn RngCore) -> f64 {
        self.0.sample(rng)
    }
}

pub fn kernel_c(dist: &dyn Distribution, gamma: f64, lambda: C64) -> Result<C64> {
    dist.kernel_c(gamma, lambda)
}

pub fn kernel_e(dist: &dyn Distribution, gamma: f64, lambda: C64) -> Result<C64> {
    if !(gamma >= 0.0) {
        return Err(Error::domain(format!("kernel threshold {gamma} must be non-negative")));
    }
    dist.kernel_e(gamma, lambda)
}

pub fn kernel_mu(dist: &dyn Distribution, a: f64, b: f64, lambda: C64) -> Result<C64> {
    if !(a >= 0.0) || b < a {
        return Err(Error::domain(format!("kernel range [{a}, {b}] is not ordered")));
    }
    dist.kernel_mu(a, b, lambda)
}

/// Parse `exp:1`, `halfnormal:2`, `uniform` or `uniform:3`.
pub fn parse_distribution(spec: &str) -> Result<Arc<dyn Distribution>> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k.trim(), Some(a.trim())),
        None => (spec.trim(), None),
    };
    let param = |default: Option<f64>| -> Result<f64> {
        match arg {
            Some(a) => a.parse::<f64>().map_err(|_| Error::Parse(format!("bad distribution parameter `{a}`"))),
            None => default.ok_or_else(|| Error::Parse(format!("distribution `{kind}` needs a parameter"))),
        }
    };
    let map_err = |e: Error| match e {
        Error::InvalidParameter(m) => Error::Parse(m),
        other => other,
    };
    match kind.to_ascii_lowercase().as_str() {
        "exp" | "exponential" => Ok(Arc::new(Exponential::new(param(Some(1.0))?).map_err(map_err)?)),
        "halfnormal" | "half-normal" => Ok(Arc::new(HalfNormal::new(param(Some(1.0))?).map_err(map_err)?)),
        "uniform" => Ok(Arc::new(Uniform::new(param(Some(1.0))?).map_err(map_err)?)),
        other => Err(Error::Parse(format!("unknown distribution `{other}`"))),
    }
}

/// Basic sanity checks: the cdf is non-decreasing, tends to one, and agrees
/// with the integrated density at a few probes.
pub fn validate(dist: &dyn Distribution) -> Result<()> {
    let top = dist.tail_point();
    let mut prev = 0.0;
    for i in 0..=64 {
        let x = top * i as f64 / 64.0;
        let c = dist.cdf(x);
        if !(0.0..=1.0).contains(&c) || c + 1e-15 < prev {
            return Err(Error::domain(format!("{}: cdf not monotone in [0, 1] at {x}", dist.name())));
        }
        prev = c;
    }
    if (dist.cdf(top) - 1.0).abs() > 1e-12 {
        return Err(Error::domain(format!("{}: cdf does not reach one", dist.name())));
    }
    let cfg = QuadConfig::new(1e-13, 1e-11);
    for frac in [0.05, 0.2, 0.5] {
        let x = top * frac;
        let est = integrate(|t| dist.pdf(t), 0.0, x, &dist.breakpoints(), &cfg)?;
        if (est.value - dist.cdf(x)).abs() > 1e-9 {
            return Err(Error::domain(format!("{}: integrated pdf disagrees with cdf at {x}", dist.name())));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exponential_closed_forms() {
        let d = Exponential::new(2.0).unwrap();
        // e(1, -0.5) = e^{-(0.5+0.5)}/(2 * (0.5 + 0.5)) = e^{-1}/2
        let e = d.kernel_e(1.0, c(-0.5, 0.0)).unwrap();
        assert!((e.re - (-1.0f64).exp() / 2.0).abs() < 1e-15);
        // c(inf, l) = 1/(1 - 2 l)
        let m = d.kernel_c(f64::INFINITY, c(0.2, 0.0)).unwrap();
        assert!((m.re - 1.0 / 0.6).abs() < 1e-14);
        // c at the pole l = 1/g: gamma / g
        let cp = d.kernel_c(3.0, c(0.5, 0.0)).unwrap();
        assert!((cp.re - 1.5).abs() < 1e-14);
    }

    #[test]
    fn divergence_is_reported() {
        let d = Exponential::new(1.0).unwrap();
        assert!(matches!(kernel_c(&d, f64::INFINITY, c(1.0, 0.0)), Err(Error::Divergent { .. })));
        assert!(matches!(kernel_e(&d, 0.3, c(1.5, 2.0)), Err(Error::Divergent { .. })));
        assert!(kernel_c(&d, 4.0, c(1.5, 0.0)).is_ok());
        assert!(matches!(kernel_mu(&d, 2.0, 1.0, c(0.0, 0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn numeric_matches_closed_form() {
        let exact = Exponential::new(1.3).unwrap();
        let num = Numeric(exact);
        for &(g, l) in &[(0.7, c(-0.4, 0.0)), (2.5, c(-1.0, 7.0)), (0.0, c(0.3, -2.0)), (5.0, c(0.5, 0.1))] {
            let a = exact.kernel_c(g, l).unwrap();
            let b = num.kernel_c(g, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "c {g} {l}");
            let a = exact.kernel_e(g, l).unwrap();
            let b = num.kernel_e(g, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "e {g} {l}");
            let a = exact.kernel_mu(g, g + 1.1, l).unwrap();
            let b = num.kernel_mu(g, g + 1.1, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "mu {g} {l}");
        }
        let u = Uniform::new(1.5).unwrap();
        let nu = Numeric(u);
        for &(g, l) in &[(0.7, c(-0.4, 0.0)), (2.5, c(1.0, 7.0)), (0.0, c(0.3, -2.0)), (1.2, c(0.0, 0.0))] {
            let a = u.kernel_c(g, l).unwrap();
            let b = nu.kernel_c(g, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "uniform c {g} {l}");
            let a = u.kernel_e(g, l).unwrap();
            let b = nu.kernel_e(g, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "uniform e {g} {l}");
        }
    }

    #[test]
    fn half_normal_mgf() {
        // E[e^{l X}] = 2 e^{l^2 s^2 / 2} Phi(l s)
        let d = HalfNormal::new(0.8).unwrap();
        for &l in &[-2.0, -0.3, 0.0, 0.9] {
            let s = 0.8;
            let phi = 0.5 * libm::erfc(-l * s / std::f64::consts::SQRT_2);
            let exact = 2.0 * (0.5 * l * l * s * s).exp() * phi;
            let m = d.mgf(c(l, 0.0)).unwrap();
            assert!((m.re - exact).abs() < 1e-10, "{l}: {} vs {exact}", m.re);
        }
    }

    #[test]
    fn half_normal_tail_transform_matches_quadrature() {
        let d = HalfNormal::new(1.2).unwrap();
        let num = Numeric(d);
        for &(z, l) in &[(0.0, c(-0.7, 0.0)), (0.4, c(-1.0, 3.0)), (1.5, c(0.6, -2.0)), (2.0, c(2.5, 0.4))] {
            let a = d.kernel_e_shifted(z, l).unwrap();
            let b = num.kernel_e_shifted(z, l).unwrap();
            assert!((a - b).norm() < 1e-10 * (1.0 + a.norm()), "{z} {l}: {a} vs {b}");
        }
    }

    #[test]
    fn parse_and_validate() {
        for s in ["exp:1", "exp:0.25", "halfnormal:2", "uniform", "uniform:3"] {
            let d = parse_distribution(s).unwrap();
            validate(d.as_ref()).unwrap();
        }
        assert!(parse_distribution("exp:-1").is_err());
        assert!(parse_distribution("gamma:2").is_err());
    }
}
