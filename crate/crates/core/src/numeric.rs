//! Summation and exact-arithmetic helpers.
//!
//! The alternating binomial sums that appear in the closed-form densities
//! cancel heavily once the order grows. [`ExactSum`] evaluates such sums in
//! floating point first and, when the a-posteriori error bound is too large,
//! repeats the computation exactly on the dyadic rationals that the `f64`
//! inputs represent, rounding only once at the end.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum after sorting by ascending magnitude, with compensation.
pub fn sorted_sum(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut acc = CompensatedSum::new();
    for &v in values.iter() {
        acc.add(v);
    }
    acc.total()
}

pub fn factorial_big(n: u32) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * BigUint::from(k))
}

pub fn binomial_big(n: u32, k: u32) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> f64 {
    binomial_big(n, k).to_f64().unwrap_or(f64::INFINITY)
}

pub fn factorial(n: u32) -> f64 {
    factorial_big(n).to_f64().unwrap_or(f64::INFINITY)
}

/// Exact ratio of factorial products, rounded once.
///
/// `numer` and `denom` list the arguments of the factorials in the numerator
/// and denominator respectively.
pub fn factorial_ratio(numer: &[u32], denom: &[u32]) -> f64 {
    let n = numer.iter().fold(BigUint::one(), |acc, &k| acc * factorial_big(k));
    let d = denom.iter().fold(BigUint::one(), |acc, &k| acc * factorial_big(k));
    BigRational::new(BigInt::from(n), BigInt::from(d))
        .to_f64()
        .unwrap_or(f64::INFINITY)
}

/// `x * 2^e` without intermediate overflow or underflow of the scale factor.
pub fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let big = 2f64.powi(1000);
    let small = 2f64.powi(-1000);
    while e > 1000 {
        x *= big;
        e -= 1000;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -1000 {
        x *= small;
        e += 1000;
        if x == 0.0 {
            return x;
        }
    }
    x * 2f64.powi(e as i32)
}

/// Split a finite `f64` into an integer mantissa and a binary exponent.
pub fn decompose(x: f64) -> (BigInt, i64) {
    if x == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 0 { Sign::Plus } else { Sign::Minus };
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & 0x000f_ffff_ffff_ffff;
    let (mant, exp) = if exp_bits == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp_bits - 1075)
    };
    (BigInt::from_biguint(sign, BigUint::from(mant)), exp)
}

/// Round `num / den * 2^e` to the nearest double.
pub fn ratio_to_f64(num: &BigInt, den: &BigInt, e: i64) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let n = num.magnitude();
    let d = den.magnitude();
    // scale so that the integer quotient carries at least 66 significant bits
    let k = 66 + d.bits() as i64 - n.bits() as i64;
    let (q, r) = if k >= 0 { (n << k as usize).div_rem(d) } else { (n >> (-k) as usize).div_rem(d) };
    let sticky_lost = k < 0 && (n.trailing_zeros().unwrap_or(0) as i64) < -k;
    let mut q = q;
    if !r.is_zero() || sticky_lost {
        q |= BigUint::one();
    }
    let v = q.to_f64().unwrap_or(f64::INFINITY);
    let v = ldexp(v, e - k);
    if negative {
        -v
    } else {
        v
    }
}

/// One term `coeff * (form . vars)^power * U(form . vars)` of an [`ExactSum`].
#[derive(Debug, Clone)]
pub struct ExactTerm {
    pub coeff: BigRational,
    pub form: Vec<i64>,
    pub power: u32,
}

/// A sum of truncated powers of integer linear forms with rational
/// coefficients, evaluated with a cancellation-aware strategy.
///
/// The unit step uses the convention `U(0) = 1`.
#[derive(Debug, Clone)]
pub struct ExactSum {
    nvars: usize,
    numer: Vec<BigInt>,
    numer_f: Vec<f64>,
    denom: BigInt,
    denom_f: f64,
    terms: Vec<ExactTerm>,
    rel_target: f64,
}

impl ExactSum {
    pub fn new(nvars: usize, terms: Vec<ExactTerm>) -> Self {
        let denom = terms
            .iter()
            .fold(BigInt::one(), |acc, t| acc.lcm(t.coeff.denom()));
        let numer: Vec<BigInt> = terms
            .iter()
            .map(|t| t.coeff.numer() * (&denom / t.coeff.denom()))
            .collect();
        let numer_f = numer.iter().map(|n| n.to_f64().unwrap_or(f64::NAN)).collect();
        let denom_f = denom.to_f64().unwrap_or(f64::INFINITY);
        assert!(terms.iter().all(|t| t.form.len() == nvars));
        Self { nvars, numer, numer_f, denom, denom_f, terms, rel_target: 1e-13 }
    }

    /// Relative accuracy below which the floating-point result is accepted.
    pub fn with_rel_target(mut self, rel: f64) -> Self {
        self.rel_target = rel;
        self
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, vars: &[f64]) -> f64 {
        assert_eq!(vars.len(), self.nvars);
        match self.eval_float(vars) {
            Some(v) => v,
            None => self.eval_exact(vars),
        }
    }

    /// Floating-point evaluation; `None` when the error bound is too large
    /// or a step decision is ambiguous.
    fn eval_float(&self, vars: &[f64]) -> Option<f64> {
        let eps = f64::EPSILON;
        let mut vals = Vec::with_capacity(self.terms.len());
        let mut bound = 0.0;
        for (t, &c) in self.terms.iter().zip(&self.numer_f) {
            let mut x = 0.0;
            let mut mag = 0.0;
            for (&a, &v) in t.form.iter().zip(vars) {
                if a != 0 {
                    let p = a as f64 * v;
                    x += p;
                    mag += p.abs();
                }
            }
            let xerr = (self.nvars as f64 + 1.0) * eps * mag;
            if x.abs() <= xerr {
                if xerr == 0.0 && x == 0.0 {
                    if t.power == 0 {
                        vals.push(c);
                    }
                    continue;
                }
                return None;
            }
            if x < 0.0 {
                continue;
            }
            let v = c * x.powi(t.power as i32);
            let p = t.power as f64;
            bound += v.abs() * (p * xerr / x + (p + 2.0) * eps);
            vals.push(v);
        }
        let s = sorted_sum(&mut vals);
        let total: f64 = vals.iter().map(|v| v.abs()).sum();
        bound += 2.0 * eps * total;
        if !s.is_finite() {
            return None;
        }
        if bound <= self.rel_target * s.abs() || (total == 0.0) {
            Some(s / self.denom_f)
        } else {
            None
        }
    }

    fn eval_exact(&self, vars: &[f64]) -> f64 {
        let parts: Vec<(BigInt, i64)> = vars.iter().map(|&v| decompose(v)).collect();
        let e0 = parts
            .iter()
            .filter(|(m, _)| !m.is_zero())
            .map(|&(_, e)| e)
            .min()
            .unwrap_or(0)
            .min(0);
        let ints: Vec<BigInt> = parts
            .iter()
            .map(|(m, e)| if m.is_zero() { BigInt::zero() } else { m << ((e - e0) as usize) })
            .collect();
        let pmax = self.terms.iter().map(|t| t.power).max().unwrap_or(0);
        let mut acc = BigInt::zero();
        for (t, c) in self.terms.iter().zip(&self.numer) {
            let mut x = BigInt::zero();
            for (&a, n) in t.form.iter().zip(&ints) {
                if a != 0 {
                    x += n * BigInt::from(a);
                }
            }
            if x.is_negative() {
                continue;
            }
            let shift = ((pmax - t.power) as i64) * (-e0);
            let mut term = c * num_traits::pow::pow(x, t.power as usize);
            if shift > 0 {
                term <<= shift as usize;
            }
            acc += term;
        }
        ratio_to_f64(&acc, &self.denom, (pmax as i64) * e0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    #[test]
    fn factorial_ratio_is_exact() {
        assert_eq!(factorial_ratio(&[10], &[7, 3]), 120.0);
        assert_eq!(factorial_ratio(&[0], &[0]), 1.0);
        assert_eq!(binomial(30, 15), 155_117_520.0);
        assert_eq!(binomial(3, 5), 0.0);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut v = vec![1.0, 1e100, 1.0, -1e100];
        assert_eq!(sorted_sum(&mut v), 2.0);
    }

    #[test]
    fn decompose_round_trips() {
        for &x in &[1.0, -3.75, 1e-310, 6.02e23, 0.1] {
            let (m, e) = decompose(x);
            assert_eq!(ratio_to_f64(&m, &BigInt::one(), e), x);
        }
    }

    // Irwin-Hall style finite difference: sum_j (-1)^j C(n,j) (r - j)_+^{n-1}
    // equals (n-1)! times the density of a sum of n uniforms.
    fn irwin_hall(n: u32) -> ExactSum {
        let terms = (0..=n)
            .map(|j| ExactTerm {
                coeff: int(if j % 2 == 0 { 1 } else { -1 }) * BigRational::from_integer(BigInt::from(binomial_big(n, j))),
                form: vec![1, -(j as i64)],
                power: n - 1,
            })
            .collect();
        ExactSum::new(2, terms)
    }

    #[test]
    fn irwin_hall_values() {
        let s = irwin_hall(2);
        // triangle density: r on [0,1], 2-r on [1,2]
        assert!((s.eval(&[0.5, 1.0]) - 0.5).abs() < 1e-15);
        assert!((s.eval(&[1.5, 1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(s.eval(&[2.5, 1.0]), 0.0);
        let s3 = irwin_hall(3);
        // (n-1)! f(1.5) with f(1.5) = 3/4
        assert!((s3.eval(&[1.5, 1.0]) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn heavy_cancellation_stays_nonnegative() {
        let s = irwin_hall(20);
        for i in 0..=400 {
            let r = 20.0 * i as f64 / 400.0;
            let v = s.eval(&[r, 1.0]);
            assert!(v >= 0.0, "r = {r}: {v}");
        }
        // near the upper edge the value is (20-r)^19 exactly
        let r = 19.9;
        let v = s.eval(&[r, 1.0]);
        let expect = (20.0f64 - r).powi(19);
        assert!(((v - expect) / expect).abs() < 1e-9, "{v} vs {expect}");
    }
}
