//! Sums of shifted pole terms `A e^{-b s} / (s + a)^n` and their exact
//! inversion to truncated polynomial-exponential pieces.
//!
//! For exponential variables every power of `c`, `e` or `mu` expands into
//! such terms with a single pole `a = 1/gamma_bar`, and the amplitude of a
//! term always carries the factor `a^n e^{-a b}`. Terms therefore store that
//! factor implicitly and keep the remaining coefficient as an exact rational
//! times a floating scale; products multiply the rationals exactly and the
//! implicit factors combine on their own.

use crate::error::{Error, Result};
use crate::numeric::{factorial_big, ratio_to_f64, CompensatedSum, ExactSum, ExactTerm};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap_or_else(BigRational::zero)
}

fn r64(r: &BigRational) -> f64 {
    ratio_to_f64(r.numer(), r.denom(), 0)
}

fn binomial_signed(m: u32, j: u32) -> BigRational {
    let c = BigInt::from(crate::numeric::binomial_big(m, j));
    BigRational::from_integer(if j % 2 == 0 { c } else { -c })
}

/// `coeff * scale * a^n e^{-a b} * e^{-b s} / (s + a)^n`
#[derive(Debug, Clone, PartialEq)]
pub struct LaplaceTerm {
    coeff: BigRational,
    scale: f64,
    pub shift: f64,
    pub pole: f64,
    pub order: u32,
}

impl LaplaceTerm {
    /// A term with amplitude `amplitude`, i.e. `amplitude e^{-b s}/(s+a)^n`.
    pub fn new(amplitude: f64, shift: f64, pole: f64, order: u32) -> Result<Self> {
        if !(shift >= 0.0 && shift.is_finite()) {
            return Err(Error::invalid(format!("shift must be finite and non-negative, got {shift}")));
        }
        if !(pole > 0.0 && pole.is_finite()) {
            return Err(Error::invalid(format!("pole must be positive, got {pole}")));
        }
        let implicit = pole.powi(order as i32) * (-pole * shift).exp();
        Ok(Self { coeff: BigRational::one(), scale: amplitude / implicit, shift, pole, order })
    }

    /// The amplitude `A` in `A e^{-b s}/(s+a)^n`.
    pub fn amplitude(&self) -> f64 {
        r64(&self.coeff)
            * self.scale
            * self.pole.powi(self.order as i32)
            * (-self.pole * self.shift).exp()
    }

    pub fn exact_coefficient(&self) -> &BigRational {
        &self.coeff
    }

    fn eval(&self, s: Complex64) -> Complex64 {
        let w = s + self.pole;
        let c = r64(&self.coeff) * self.scale;
        (-(w * self.shift)).exp() * (Complex64::new(self.pole, 0.0) / w).powu(self.order) * c
    }
}

/// A sum of [`LaplaceTerm`]s sharing one pole, kept canonical: identical
/// `(shift, order)` pairs are merged and zero terms dropped.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LaplaceTermSum {
    terms: Vec<LaplaceTerm>,
}

impl LaplaceTermSum {
    pub fn from_terms(terms: Vec<LaplaceTerm>) -> Result<Self> {
        if let Some(first) = terms.first() {
            for t in &terms[1..] {
                if !same_pole(first.pole, t.pole) {
                    return Err(Error::MixedPoles(first.pole, t.pole));
                }
            }
        }
        Ok(Self::canonical(terms))
    }

    /// The multiplicative identity `1`, as an order-zero term.
    pub fn one(pole: f64) -> Self {
        Self { terms: vec![LaplaceTerm { coeff: BigRational::one(), scale: 1.0, shift: 0.0, pole, order: 0 }] }
    }

    pub fn terms(&self) -> &[LaplaceTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn pole(&self) -> Option<f64> {
        self.terms.first().map(|t| t.pole)
    }

    fn canonical(mut terms: Vec<LaplaceTerm>) -> Self {
        terms.sort_by(|a, b| a.shift.total_cmp(&b.shift).then(a.order.cmp(&b.order)));
        let mut out: Vec<LaplaceTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = out.last_mut() {
                if last.shift.to_bits() == t.shift.to_bits() && last.order == t.order {
                    if last.scale.to_bits() == t.scale.to_bits() {
                        last.coeff += t.coeff;
                    } else {
                        let merged = r64(&last.coeff) * last.scale
                            + r64(&t.coeff) * t.scale;
                        last.coeff = BigRational::one();
                        last.scale = merged;
                    }
                    continue;
                }
            }
            out.push(t);
        }
        out.retain(|t| !t.coeff.is_zero() && t.scale != 0.0);
        Self { terms: out }
    }

    /// Exact product; fails when the poles differ.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        if let (Some(a), Some(b)) = (self.pole(), other.pole()) {
            if !same_pole(a, b) {
                return Err(Error::MixedPoles(a, b));
            }
        }
        let mut terms = Vec::with_capacity(self.len() * other.len());
        for x in &self.terms {
            for y in &other.terms {
                terms.push(LaplaceTerm {
                    coeff: &x.coeff * &y.coeff,
                    scale: x.scale * y.scale,
                    shift: x.shift + y.shift,
                    pole: x.pole,
                    order: x.order + y.order,
                });
            }
        }
        Ok(Self::canonical(terms))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self::from_terms(terms)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for t in &mut out.terms {
            t.scale *= factor;
        }
        Self::canonical(out.terms)
    }

    /// Evaluate the transform at a complex point right of the pole.
    pub fn eval(&self, s: Complex64) -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for t in &self.terms {
            let v = t.eval(s);
            re.add(v.re);
            im.add(v.im);
        }
        Complex64::new(re.total(), im.total())
    }

    /// Exact inverse: `e^{-b s}/(s+a)^n -> (t-b)^{n-1} e^{-a (t-b)} U(t-b) / (n-1)!`.
    pub fn invert(&self) -> Result<PiecewisePoly> {
        let mut out = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            if t.order == 0 {
                return Err(Error::domain("an order-zero term inverts to an impulse"));
            }
            let fact = BigRational::from_integer(BigInt::from(factorial_big(t.order - 1)));
            out.push(PolyTerm {
                coeff: &t.coeff / fact,
                scale: t.scale * t.pole.powi(t.order as i32),
                threshold: t.shift,
                power: t.order - 1,
                decay: t.pole,
            });
        }
        Ok(PiecewisePoly::new(out))
    }
}

fn same_pole(a: f64, b: f64) -> bool {
    (a - b).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs())
}

/// `(e(z_a, -s))^m` for an exponential with mean `gamma_bar`.
pub fn exp_kernel_e_pow(gamma_bar: f64, z_a: f64, m: u32) -> Result<LaplaceTermSum> {
    check_args(gamma_bar, &[z_a])?;
    let pole = 1.0 / gamma_bar;
    LaplaceTermSum::from_terms(vec![LaplaceTerm {
        coeff: BigRational::one(),
        scale: 1.0,
        shift: m as f64 * z_a,
        pole,
        order: m,
    }])
    .map(|s| if m == 0 { LaplaceTermSum::one(pole) } else { s })
}

/// `(c(z_a, -s))^m` for an exponential with mean `gamma_bar`.
pub fn exp_kernel_c_pow(gamma_bar: f64, z_a: f64, m: u32) -> Result<LaplaceTermSum> {
    check_args(gamma_bar, &[z_a])?;
    let pole = 1.0 / gamma_bar;
    if m == 0 {
        return Ok(LaplaceTermSum::one(pole));
    }
    let terms = (0..=m)
        .map(|j| LaplaceTerm { coeff: binomial_signed(m, j), scale: 1.0, shift: j as f64 * z_a, pole, order: m })
        .collect();
    LaplaceTermSum::from_terms(terms)
}

/// `(mu(z_a, z_b, -s))^m` for an exponential with mean `gamma_bar`, `z_a <= z_b`.
pub fn exp_kernel_mu_pow(gamma_bar: f64, z_a: f64, z_b: f64, m: u32) -> Result<LaplaceTermSum> {
    check_args(gamma_bar, &[z_a, z_b])?;
    if z_b < z_a {
        return Err(Error::domain(format!("mu needs z_a <= z_b, got {z_a} > {z_b}")));
    }
    let pole = 1.0 / gamma_bar;
    if m == 0 {
        return Ok(LaplaceTermSum::one(pole));
    }
    let terms = (0..=m)
        .map(|j| LaplaceTerm {
            coeff: binomial_signed(m, j),
            scale: 1.0,
            shift: (m - j) as f64 * z_a + j as f64 * z_b,
            pole,
            order: m,
        })
        .collect();
    LaplaceTermSum::from_terms(terms)
}

fn check_args(gamma_bar: f64, zs: &[f64]) -> Result<()> {
    if !(gamma_bar > 0.0 && gamma_bar.is_finite()) {
        return Err(Error::invalid(format!("gamma_bar must be positive, got {gamma_bar}")));
    }
    for &z in zs {
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::domain(format!("threshold {z} must be finite and non-negative")));
        }
    }
    Ok(())
}

/// One piece `C (z - t)^p e^{-d z} U(z - t)`, with `C` stored as an exact
/// rational times a floating scale.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm {
    coeff: BigRational,
    scale: f64,
    pub threshold: f64,
    pub power: u32,
    pub decay: f64,
}

impl PolyTerm {
    pub fn new(coeff: f64, threshold: f64, power: u32, decay: f64) -> Self {
        Self { coeff: rational_from_f64(coeff), scale: 1.0, threshold, power, decay }
    }

    pub fn coeff(&self) -> f64 {
        r64(&self.coeff) * self.scale
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermRepr {
    coeff: f64,
    threshold: f64,
    power: u32,
    decay: f64,
}

#[derive(Debug, Clone)]
struct PolyGroup {
    decay: f64,
    scale: f64,
    thresholds: Vec<f64>,
    sum: ExactSum,
}

/// A finite sum of truncated polynomial-exponential pieces; evaluation is
/// right-continuous at every threshold.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    terms: Vec<PolyTerm>,
    groups: Vec<PolyGroup>,
}

impl PartialEq for PiecewisePoly {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl PiecewisePoly {
    pub fn new(terms: Vec<PolyTerm>) -> Self {
        let mut groups: Vec<(f64, f64, Vec<&PolyTerm>)> = Vec::new();
        for t in &terms {
            match groups.iter_mut().find(|(d, s, _)| d.to_bits() == t.decay.to_bits() && s.to_bits() == t.scale.to_bits()) {
                Some(g) => g.2.push(t),
                None => groups.push((t.decay, t.scale, vec![t])),
            }
        }
        let groups = groups
            .into_iter()
            .map(|(decay, scale, ts)| {
                let n = ts.len();
                let exact = ts
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let mut form = vec![0i64; n + 1];
                        form[0] = 1;
                        form[i + 1] = -1;
                        ExactTerm { coeff: t.coeff.clone(), form, power: t.power }
                    })
                    .collect();
                PolyGroup { decay, scale, thresholds: ts.iter().map(|t| t.threshold).collect(), sum: ExactSum::new(n + 1, exact) }
            })
            .collect();
        Self { terms, groups }
    }

    pub fn terms(&self) -> &[PolyTerm] {
        &self.terms
    }

    pub fn eval(&self, z: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        let mut vars = Vec::new();
        for g in &self.groups {
            vars.clear();
            vars.push(z);
            vars.extend_from_slice(&g.thresholds);
            let v = g.sum.eval(&vars);
            if v != 0.0 {
                acc.add(v * g.scale * (-g.decay * z).exp());
            }
        }
        acc.total()
    }
}

impl Serialize for PiecewisePoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr: Vec<PolyTermRepr> = self
            .terms
            .iter()
            .map(|t| PolyTermRepr { coeff: t.coeff(), threshold: t.threshold, power: t.power, decay: t.decay })
            .collect();
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewisePoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = Vec::<PolyTermRepr>::deserialize(deserializer)?;
        Ok(PiecewisePoly::new(
            repr.into_iter().map(|r| PolyTerm::new(r.coeff, r.threshold, r.power, r.decay)).collect(),
        ))
    }
}
