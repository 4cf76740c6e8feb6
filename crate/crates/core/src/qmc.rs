//! Deterministic quasi-Monte Carlo integration with the Halton sequence.

use crate::error::{Error, Result};
use rayon::prelude::*;

const PRIMES: [u64; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

/// The `i`-th Halton point in `dim` dimensions (`i >= 1`).
pub fn halton(i: u64, dim: usize) -> Vec<f64> {
    PRIMES[..dim].iter().map(|&b| radical_inverse(i, b)).collect()
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > PRIMES.len() {
        return Err(Error::invalid(format!("QMC supports 1..={} dimensions, got {dim}", PRIMES.len())));
    }
    Ok(())
}

fn sum_points<F>(n: u64, dim: usize, f: F) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    const BLOCK: u64 = 4096;
    let blocks = n.div_ceil(BLOCK);
    let partial: Result<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut acc = 0.0;
            for i in b * BLOCK + 1..=((b + 1) * BLOCK).min(n) {
                acc += f(&halton(i, dim))?;
            }
            Ok(acc)
        })
        .collect();
    Ok(partial?.iter().sum::<f64>() / n as f64)
}

/// Integral of `f` over the box `[lo, hi]`.
pub fn box_integral<F>(f: F, lo: &[f64], hi: &[f64], n: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let dim = lo.len();
    check_dim(dim)?;
    let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let mean = sum_points(n, dim, |u| {
        let x: Vec<f64> = u.iter().enumerate().map(|(d, &v)| lo[d] + v * (hi[d] - lo[d])).collect();
        f(&x)
    })?;
    Ok(mean * vol)
}

/// How a unit Halton coordinate is mapped onto an integration axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// `[0, inf)`, sampled from an exponential law with this mean.
    Exp(f64),
    /// `[0, 1]`.
    Unit,
}

/// Integral of `f` over the product of `axes`.
pub fn product_integral<F>(f: F, axes: &[Axis], n: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    check_dim(axes.len())?;
    sum_points(n, axes.len(), |u| {
        let mut w = 1.0;
        let x: Vec<f64> = u
            .iter()
            .zip(axes)
            .map(|(&v, a)| match *a {
                Axis::Exp(t) => {
                    w *= t / (1.0 - v);
                    -t * (-v).ln_1p()
                }
                Axis::Unit => v,
            })
            .collect();
        let v = f(&x)?;
        Ok(if v == 0.0 { 0.0 } else { v * w })
    })
}

/// Integral of `f` over the non-negative orthant, sampling coordinate `d`
/// from an exponential law with mean `theta[d]`.
pub fn orthant_integral<F>(f: F, theta: &[f64], n: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let axes: Vec<Axis> = theta.iter().map(|&t| Axis::Exp(t)).collect();
    product_integral(f, &axes, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse_digits() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(6, 2), 0.375);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_smooth_functions() {
        let v = box_integral(|x| Ok(x[0] * x[1] * x[2]), &[0.0; 3], &[1.0, 2.0, 3.0], 1 << 16).unwrap();
        assert!((v - 4.5).abs() < 1e-3, "{v}");
        let g = orthant_integral(|x| Ok((-(x[0] + 2.0 * x[1] + x[2] + x[3])).exp()), &[1.0, 0.5, 1.0, 1.0], 1 << 16).unwrap();
        assert!((g - 0.5).abs() < 1e-3, "{g}");
    }
}
