//! Finite integrations that collapse a fine joint density (3 or 4
//! coordinates) to the requested two-dimensional density.
//!
//! Fine coordinate conventions, shared by the exact and numeric paths:
//!
//! | case | coordinates |
//! |------|-------------|
//! | a    | `(g_1, g_2 + .. + g_{Ks-1}, g_Ks)` |
//! | b    | `(g_1 + .. + g_{m-1}, g_m, g_{m+1} + .. + g_{Ks-1}, g_Ks)` |
//! | c    | `(g_1 + .. + g_{Ks-2}, g_{Ks-1}, g_Ks)` |
//! | d    | `(g_Ks, g_1 + .. + g_{Ks-1})` |

use crate::error::{Error, Result};
use crate::partition::Case;
use crate::quadrature::{try_integrate, QuadConfig};

/// A fine joint density.
pub type Fine<'a> = &'a (dyn Fn(&[f64]) -> Result<f64> + Sync);

/// Which variable the outer integral runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReductionOrder {
    /// Outer integral over `g_Ks`.
    #[default]
    OuterLast,
    /// Outer integral over the other eliminated coordinate.
    OuterOther,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig {
    pub outer: QuadConfig,
    pub inner: QuadConfig,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            outer: QuadConfig { abs_tol: 1e-11, rel_tol: 1e-10, max_intervals: 2000 },
            inner: QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 1000 },
        }
    }
}

fn quad<F: FnMut(f64) -> Result<f64>>(f: F, lo: f64, hi: f64, knots: &[f64], cfg: &QuadConfig) -> Result<f64> {
    if !(hi > lo) {
        return Ok(0.0);
    }
    Ok(try_integrate(f, lo, hi, knots, cfg)?.value)
}

/// Support of the one-vs-rest density at `(x, y)`. `reflected` marks the
/// `Ks = 2, m = 1` shape.
pub fn one_vs_rest_support(case: Case, ks: usize, m: usize, reflected: bool, x: f64, y: f64) -> bool {
    if reflected {
        return y <= x;
    }
    match case {
        Case::A => y <= (ks - 1) as f64 * x,
        Case::B => y >= (m - 1) as f64 * x,
        Case::C => y >= (ks - 2) as f64 * x,
        Case::D => y >= (ks - 1) as f64 * x,
    }
}

/// Density of `(g_m, sum of the other best Ks - 1)` at `(x, y)` from the
/// fine density of `case`.
pub fn one_vs_rest(
    fine: Fine<'_>,
    case: Case,
    ks: usize,
    m: usize,
    x: f64,
    y: f64,
    order: ReductionOrder,
    cfg: &ReductionConfig,
) -> Result<f64> {
    if x < 0.0 || y < 0.0 {
        return Ok(0.0);
    }
    match case {
        Case::D => fine(&[x, y]),
        Case::A => {
            let na = (ks - 2) as f64;
            let lo = (y - na * x).max(0.0);
            let hi = x.min(y / (na + 1.0));
            let knots: Vec<f64> = (0..ks - 2)
                .map(|j| (y - j as f64 * x) / (ks - 1 - j) as f64)
                .collect();
            match order {
                ReductionOrder::OuterLast => quad(|z3| fine(&[x, y - z3, z3]), lo, hi, &knots, &cfg.outer),
                ReductionOrder::OuterOther => {
                    let knots: Vec<f64> = knots.iter().map(|k| y - k).collect();
                    quad(|z2| fine(&[x, z2, y - z2]), y - hi, y - lo, &knots, &cfg.outer)
                }
            }
        }
        Case::C => {
            let nc = (ks - 2) as f64;
            let hi = x.min(y - nc * x);
            match order {
                ReductionOrder::OuterLast => quad(|z3| fine(&[y - z3, x, z3]), 0.0, hi, &[], &cfg.outer),
                ReductionOrder::OuterOther => quad(|z1| fine(&[z1, x, y - z1]), y - hi, y, &[], &cfg.outer),
            }
        }
        Case::B => one_vs_rest_b(fine, ks, m, x, y, order, cfg),
    }
}

fn one_vs_rest_b(
    fine: Fine<'_>,
    ks: usize,
    m: usize,
    x: f64,
    y: f64,
    order: ReductionOrder,
    cfg: &ReductionConfig,
) -> Result<f64> {
    let nb = ks - m - 1;
    let nbf = nb as f64;
    let mh = (m - 1) as f64;
    let free = y - mh * x;
    if free < 0.0 {
        return Ok(0.0);
    }
    match order {
        ReductionOrder::OuterLast => {
            let hi = x.min(free / (nbf + 1.0));
            let mut outer_knots = vec![y - (mh + nbf) * x];
            for j in 0..=nb {
                outer_knots.push((y - (mh + j as f64) * x) / (nbf - j as f64 + 1.0));
            }
            quad(
                |z4| {
                    let lo3 = nbf * z4;
                    let hi3 = (nbf * x).min(y - z4 - mh * x);
                    let knots: Vec<f64> = (0..=nb).map(|j| (nbf - j as f64) * z4 + j as f64 * x).collect();
                    quad(|z3| fine(&[y - z3 - z4, x, z3, z4]), lo3, hi3, &knots, &cfg.inner)
                },
                0.0,
                hi,
                &outer_knots,
                &cfg.outer,
            )
        }
        ReductionOrder::OuterOther => {
            let hi = (nbf * x).min(free);
            let mut outer_knots = vec![y - m as f64 * x, nbf * free / (nbf + 1.0)];
            for j in 0..nb {
                let jf = j as f64;
                outer_knots.push(jf * x);
                outer_knots.push(((nbf - jf) * free + jf * x) / (nbf - jf + 1.0));
            }
            quad(
                |z3| {
                    let hi4 = x.min(z3 / nbf).min(y - z3 - mh * x);
                    let knots: Vec<f64> = (0..nb).map(|j| (z3 - j as f64 * x) / (nb - j) as f64).collect();
                    quad(|z4| fine(&[y - z3 - z4, x, z3, z4]), 0.0, hi4, &knots, &cfg.inner)
                },
                0.0,
                hi,
                &outer_knots,
                &cfg.outer,
            )
        }
    }
}

/// Density of `(g_1 + .. + g_m, g_{m+1} + .. + g_Ks)` at `(x, y)` for
/// `2 <= m <= Ks - 1`, from the fine density of case b (`m < Ks - 1`) or
/// case c (`m = Ks - 1`). The case `m = 1` is the one-vs-rest density.
pub fn head_vs_tail(
    fine: Fine<'_>,
    ks: usize,
    m: usize,
    x: f64,
    y: f64,
    order: ReductionOrder,
    cfg: &ReductionConfig,
) -> Result<f64> {
    if m < 2 || m >= ks {
        return Err(Error::invalid(format!("head length {m} needs 2 <= m < Ks = {ks}")));
    }
    if x < 0.0 || y < 0.0 {
        return Ok(0.0);
    }
    let mf = m as f64;
    if m == ks - 1 {
        let hi = x / (ks - 1) as f64;
        return match order {
            ReductionOrder::OuterLast => quad(|z2| fine(&[x - z2, z2, y]), y, hi, &[], &cfg.outer),
            ReductionOrder::OuterOther => quad(|z1| fine(&[z1, x - z1, y]), x - hi, x - y, &[], &cfg.outer),
        };
    }
    let nb = ks - m - 1;
    let nbf = nb as f64;
    let top = x / mf;
    match order {
        ReductionOrder::OuterLast => {
            let hi = y / (nbf + 1.0);
            let mut outer_knots = vec![y - nbf * top];
            for j in 1..=nb {
                let jf = j as f64;
                outer_knots.push((y - jf * top) / (nbf - jf + 1.0));
                let den = nbf * (nbf - jf + 1.0) - jf;
                if den > 0.0 {
                    outer_knots.push(y * (nbf - jf) / den);
                }
            }
            quad(
                |z4| {
                    let lo2 = (y - z4) / nbf;
                    let knots: Vec<f64> = (1..=nb)
                        .map(|j| (y - (nbf - j as f64 + 1.0) * z4) / j as f64)
                        .collect();
                    quad(|z2| fine(&[x - z2, z2, y - z4, z4]), lo2, top, &knots, &cfg.inner)
                },
                0.0,
                hi,
                &outer_knots,
                &cfg.outer,
            )
        }
        ReductionOrder::OuterOther => {
            let lo = y / (nbf + 1.0);
            let mut outer_knots = vec![y / nbf];
            for j in 1..=nb {
                let jf = j as f64;
                outer_knots.push(y / jf);
                let den = nbf * (nbf - jf + 1.0) - jf;
                if den > 0.0 {
                    outer_knots.push(y * (nbf - jf) / den);
                }
            }
            quad(
                |z2| {
                    let lo4 = (y - nbf * z2).max(0.0);
                    let hi4 = z2.min(y / (nbf + 1.0));
                    let knots: Vec<f64> = (0..=nb)
                        .map(|j| (y - j as f64 * z2) / (nbf - j as f64 + 1.0))
                        .collect();
                    quad(|z4| fine(&[x - z2, z2, y - z4, z4]), lo4, hi4, &knots, &cfg.inner)
                },
                lo,
                top,
                &outer_knots,
                &cfg.outer,
            )
        }
    }
}
