//! Monte Carlo ground truth: sample, sort in decreasing order, form group
//! sums, and compare empirical histograms and cdfs with analytic densities.
//!
//! Draws are generated in fixed-size chunks. Chunk `i` uses a ChaCha8
//! generator keyed by the seed on stream `i`, so the output does not depend
//! on the number of worker threads.

use crate::density::{JointDensity, Table};
use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::qmc;
use crate::quadrature::{try_integrate, QuadConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

/// Draws per generator stream.
pub const CHUNK: usize = 1 << 14;

/// Calibrated 3-sigma threshold for `KS * sqrt(n)`.
pub const KS_THRESHOLD: f64 = 1.95;

#[derive(Debug, Clone)]
pub struct SampleSpec {
    pub dist: Arc<dyn Distribution>,
    pub partition: Partition,
    pub n_samples: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn new(dist: Arc<dyn Distribution>, partition: Partition, n_samples: usize, seed: u64) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::invalid("n_samples must be positive"));
        }
        Ok(Self { dist, partition, n_samples, seed })
    }

    pub fn k(&self) -> usize {
        self.partition.k
    }

    pub fn ks(&self) -> usize {
        self.partition.ks
    }

    pub fn dim(&self) -> usize {
        self.partition.dimension()
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Apply `f` to `n` sorted draws of `k` samples each (largest first).
/// Results come back in draw order.
pub fn map_sorted<T, F>(dist: &dyn Distribution, k: usize, n: usize, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[f64]) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut buf = vec![0.0; k];
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                for v in buf.iter_mut() {
                    *v = dist.sample(&mut rng);
                }
                buf.sort_unstable_by(|a, b| b.total_cmp(a));
                out.push(f(&buf));
            }
            out
        })
        .collect();
    parts.into_iter().flatten().collect()
}

/// Row-major group sums, one row of `dim` values per draw.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub dim: usize,
    pub data: Vec<f64>,
}

impl SampleSet {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn column(&self, d: usize) -> Vec<f64> {
        self.rows().map(|r| r[d]).collect()
    }

    pub fn mean(&self, d: usize) -> f64 {
        self.rows().map(|r| r[d]).sum::<f64>() / self.len() as f64
    }
}

/// Sum the ranks of each group of `partition` over one sorted draw.
pub fn group_sums(sorted: &[f64], partition: &Partition) -> Vec<f64> {
    partition
        .groups
        .iter()
        .map(|g| g.iter().fold(0.0, |acc, &r| acc + sorted[r - 1]))
        .collect()
}

pub fn sample_partial_sums(spec: &SampleSpec) -> SampleSet {
    let p = &spec.partition;
    let rows = map_sorted(spec.dist.as_ref(), p.k, spec.n_samples, spec.seed, |s| group_sums(s, p));
    SampleSet { dim: p.dimension(), data: rows.into_iter().flatten().collect() }
}

/// Per-axis bin edges, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct BinSpec {
    pub edges: Vec<Vec<f64>>,
}

impl BinSpec {
    pub fn uniform(axes: &[(f64, f64, usize)]) -> Result<Self> {
        let edges = axes
            .iter()
            .map(|&(lo, hi, n)| {
                if n == 0 || !(hi > lo) {
                    return Err(Error::invalid(format!("bad bin axis ({lo}, {hi}, {n})")));
                }
                Ok((0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self { edges })
    }

    pub fn dim(&self) -> usize {
        self.edges.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinEstimate {
    pub density: f64,
    pub std_error: f64,
    /// No draws fell in the bin; `std_error` is then the one-count bound.
    pub empty: bool,
}

/// Histogram of a one- or two-dimensional sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDensity {
    pub dim: usize,
    pub bins: Vec<Vec<f64>>,
    /// Row-major counts, last axis fastest.
    pub counts: Vec<u64>,
    /// Draws outside every bin.
    pub outside: u64,
    pub n: u64,
}

fn locate(edges: &[f64], v: f64) -> Option<usize> {
    if !(v >= edges[0] && v < edges[edges.len() - 1]) {
        return None;
    }
    Some(edges.partition_point(|&e| e <= v) - 1)
}

impl EmpiricalDensity {
    pub fn from_samples(samples: &SampleSet, bins: BinSpec) -> Result<Self> {
        let dim = samples.dim;
        if dim > 2 || bins.dim() != dim {
            return Err(Error::invalid(format!(
                "histograms need matching dimension 1 or 2, got sample dim {dim} and bin dim {}",
                bins.dim()
            )));
        }
        let shape: Vec<usize> = bins.edges.iter().map(|e| e.len() - 1).collect();
        let mut counts = vec![0u64; shape.iter().product()];
        let mut outside = 0;
        'rows: for r in samples.rows() {
            let mut idx = 0;
            for d in 0..dim {
                match locate(&bins.edges[d], r[d]) {
                    Some(i) => idx = idx * shape[d] + i,
                    None => {
                        outside += 1;
                        continue 'rows;
                    }
                }
            }
            counts[idx] += 1;
        }
        Ok(Self { dim, bins: bins.edges, counts, outside, n: samples.len() as u64 })
    }

    pub fn shape(&self) -> Vec<usize> {
        self.bins.iter().map(|e| e.len() - 1).collect()
    }

    /// Per-axis bin index of flat index `flat`.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let shape = self.shape();
        let mut idx = vec![0; self.dim];
        for d in (0..self.dim).rev() {
            idx[d] = flat % shape[d];
            flat /= shape[d];
        }
        idx
    }

    /// Lower and upper corners of bin `flat`.
    pub fn bin_box(&self, flat: usize) -> (Vec<f64>, Vec<f64>) {
        let idx = self.unravel(flat);
        let lo = idx.iter().enumerate().map(|(d, &i)| self.bins[d][i]).collect();
        let hi = idx.iter().enumerate().map(|(d, &i)| self.bins[d][i + 1]).collect();
        (lo, hi)
    }

    pub fn bin_volume(&self, flat: usize) -> f64 {
        let (lo, hi) = self.bin_box(flat);
        lo.iter().zip(&hi).map(|(a, b)| b - a).product()
    }

    pub fn estimate(&self, flat: usize) -> BinEstimate {
        let scale = self.n as f64 * self.bin_volume(flat);
        let c = self.counts[flat];
        BinEstimate {
            density: c as f64 / scale,
            std_error: (c.max(1) as f64).sqrt() / scale,
            empty: c == 0,
        }
    }

    /// Bin centres with density and standard error columns.
    pub fn to_table(&self) -> Table {
        let names = ["x", "y"];
        let mut columns: Vec<String> = names[..self.dim].iter().map(|s| s.to_string()).collect();
        columns.push("value".into());
        columns.push("std_error".into());
        let rows = (0..self.counts.len())
            .map(|i| {
                let (lo, hi) = self.bin_box(i);
                let mut row: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                let e = self.estimate(i);
                row.push(e.density);
                row.push(e.std_error);
                row
            })
            .collect();
        Table { columns, rows }
    }
}

pub fn empirical_density(spec: &SampleSpec, bins: BinSpec) -> Result<EmpiricalDensity> {
    EmpiricalDensity::from_samples(&sample_partial_sums(spec), bins)
}

/// Kolmogorov–Smirnov distance between the sample and `cdf`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut s = samples.to_vec();
    s.par_sort_unstable_by(f64::total_cmp);
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    d
}

/// Cumulative distribution obtained by integrating a one-dimensional
/// density on a fixed grid, interpolated with cubic Hermite segments.
#[derive(Debug, Clone)]
pub struct CdfTable {
    knots: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    pub fn from_density(density: &JointDensity, upper: f64, intervals: usize) -> Result<Self> {
        if density.dim() != 1 {
            return Err(Error::invalid("a cdf table needs a one-dimensional density"));
        }
        if !(upper > 0.0) || intervals == 0 {
            return Err(Error::invalid("cdf table needs a positive range and interval count"));
        }
        let knots: Vec<f64> = (0..=intervals).map(|i| upper * i as f64 / intervals as f64).collect();
        let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-11, max_intervals: 200 };
        let masses: Vec<f64> = knots
            .par_windows(2)
            .map(|w| Ok(try_integrate(|x| density.evaluate(&[x]), w[0], w[1], &[], &cfg)?.value))
            .collect::<Result<_>>()?;
        let mut values = Vec::with_capacity(knots.len());
        let mut acc = 0.0;
        values.push(0.0);
        for m in masses {
            acc += m;
            values.push(acc);
        }
        let h = upper / intervals as f64;
        let slopes = knots
            .par_iter()
            .map(|&x| {
                let side = if x > 0.0 { x - 1e-9 * h } else { x + 1e-9 * h };
                density.evaluate(&[side])
            })
            .collect::<Result<_>>()?;
        Ok(Self { knots, values, slopes })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.knots.len();
        if x <= 0.0 {
            return 0.0;
        }
        if x >= self.knots[n - 1] {
            return self.values[n - 1];
        }
        let i = (self.knots.partition_point(|&k| k <= x) - 1).min(n - 2);
        let (x0, x1) = (self.knots[i], self.knots[i + 1]);
        let h = x1 - x0;
        let t = (x - x0) / h;
        let (t2, t3) = (t * t, t * t * t);
        let f = (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.values[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1];
        f.clamp(self.values[i], self.values[i + 1])
    }

    /// Total mass captured on the grid.
    pub fn total(&self) -> f64 {
        *self.values.last().expect("non-empty table")
    }
}

const GL5: [(f64, f64); 5] = [
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.0, 0.568_888_888_888_888_9),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Probability mass of a one- or two-dimensional density over a box.
/// Boxes cut by the support boundary are subdivided.
pub fn box_mass(density: &JointDensity, lo: &[f64], hi: &[f64]) -> Result<f64> {
    match density.dim() {
        1 => {
            let cfg = QuadConfig { abs_tol: 1e-13, rel_tol: 1e-10, max_intervals: 200 };
            Ok(try_integrate(|x| density.evaluate(&[x]), lo[0], hi[0], &[], &cfg)?.value)
        }
        2 => box_mass_2d(density, lo, hi, 0),
        d => Err(Error::invalid(format!("box mass is available for dims 1 and 2, got {d}"))),
    }
}

fn box_mass_2d(density: &JointDensity, lo: &[f64], hi: &[f64], depth: usize) -> Result<f64> {
    let cx = 0.5 * (lo[0] + hi[0]);
    let cy = 0.5 * (lo[1] + hi[1]);
    let hx = 0.5 * (hi[0] - lo[0]);
    let hy = 0.5 * (hi[1] - lo[1]);
    let mut inside = 0;
    let mut points = Vec::with_capacity(25);
    for &(u, wu) in &GL5 {
        for &(v, wv) in &GL5 {
            let z = [cx + hx * u, cy + hy * v];
            if density.in_support(&z) {
                inside += 1;
            }
            points.push((z, wu * wv));
        }
    }
    let corners = [[lo[0], lo[1]], [lo[0], hi[1]], [hi[0], lo[1]], [hi[0], hi[1]]];
    let corner_in = corners.iter().filter(|z| density.in_support(*z)).count();
    let uniform = (inside == 0 && corner_in == 0) || (inside == 25 && corner_in == 4);
    if !uniform && depth < 4 {
        let mut acc = 0.0;
        for (a, b) in [(lo[0], cx), (cx, hi[0])] {
            for (c, d) in [(lo[1], cy), (cy, hi[1])] {
                acc += box_mass_2d(density, &[a, c], &[b, d], depth + 1)?;
            }
        }
        return Ok(acc);
    }
    if inside == 0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for (z, w) in points {
        acc += w * density.evaluate(&z)?;
    }
    Ok(acc * hx * hy)
}

/// Outcome of comparing histogram counts with analytic bin masses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinComparison {
    /// Bins with at least one draw or an expected count of at least one.
    pub occupied: usize,
    /// Occupied bins with `|observed - expected| <= 3 sqrt(expected)`.
    pub within: usize,
    /// Largest `|observed - expected| / sqrt(expected)` seen.
    pub worst_score: f64,
}

impl BinComparison {
    pub fn fraction(&self) -> f64 {
        if self.occupied == 0 {
            1.0
        } else {
            self.within as f64 / self.occupied as f64
        }
    }
}

pub fn compare_bins(emp: &EmpiricalDensity, density: &JointDensity) -> Result<BinComparison> {
    if density.dim() != emp.dim {
        return Err(Error::invalid("density and histogram dimensions differ"));
    }
    let n = emp.n as f64;
    let scores: Vec<Option<f64>> = (0..emp.counts.len())
        .into_par_iter()
        .map(|i| {
            let (lo, hi) = emp.bin_box(i);
            let expected = n * box_mass(density, &lo, &hi)?;
            let observed = emp.counts[i] as f64;
            if observed == 0.0 && expected < 1.0 {
                return Ok(None);
            }
            let score = if expected > 0.0 { (observed - expected).abs() / expected.sqrt() } else { f64::INFINITY };
            Ok(Some(score))
        })
        .collect::<Result<_>>()?;
    let mut out = BinComparison { occupied: 0, within: 0, worst_score: 0.0 };
    for s in scores.into_iter().flatten() {
        out.occupied += 1;
        if s <= 3.0 {
            out.within += 1;
        }
        out.worst_score = out.worst_score.max(s);
    }
    Ok(out)
}

/// One corner-cdf comparison `P(Z <= corner)` for a density of dim 3 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct CornerCheck {
    pub corner: Vec<f64>,
    pub analytic: f64,
    pub empirical: f64,
    /// Binomial standard error of the empirical value.
    pub sigma: f64,
    pub passed: bool,
}

/// Quantile levels defining the eight fixed corners.
const CORNER_LEVELS: [f64; 2] = [0.4, 0.8];

/// Eight corners built from per-axis empirical quantiles.
pub fn default_corners(samples: &SampleSet) -> Vec<Vec<f64>> {
    let quantiles: Vec<[f64; 2]> = (0..samples.dim)
        .map(|d| {
            let mut col = samples.column(d);
            col.sort_unstable_by(f64::total_cmp);
            let q = |p: f64| col[((col.len() - 1) as f64 * p) as usize];
            [q(CORNER_LEVELS[0]), q(CORNER_LEVELS[1])]
        })
        .collect();
    (0..8usize)
        .map(|j| {
            (0..samples.dim)
                .map(|d| {
                    let bit = if d < 3 { (j >> d) & 1 } else { (j ^ (j >> 1) ^ (j >> 2)) & 1 };
                    quantiles[d][bit]
                })
                .collect()
        })
        .collect()
}

/// Compare empirical and analytic cdfs at `corners`; the analytic value is
/// a Halton integral with `qmc_points` nodes, and `qmc_tol` is added to the
/// 3-sigma band.
pub fn corner_cdf_check(
    samples: &SampleSet,
    density: &JointDensity,
    corners: &[Vec<f64>],
    qmc_points: u64,
    qmc_tol: f64,
) -> Result<Vec<CornerCheck>> {
    if density.dim() != samples.dim {
        return Err(Error::invalid("density and sample dimensions differ"));
    }
    let n = samples.len() as f64;
    corners
        .iter()
        .map(|c| {
            let lo = vec![0.0; c.len()];
            let analytic = qmc::box_integral(|z| density.evaluate(z), &lo, c, qmc_points)?;
            let hits = samples.rows().filter(|r| r.iter().zip(c).all(|(v, b)| v <= b)).count();
            let empirical = hits as f64 / n;
            let sigma = (empirical * (1.0 - empirical) / n).sqrt();
            let passed = (analytic - empirical).abs() <= 3.0 * sigma + qmc_tol;
            Ok(CornerCheck { corner: c.clone(), analytic, empirical, sigma, passed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::Exponential;
    use crate::exact_exp::ExactExp;

    fn exp1() -> Arc<dyn Distribution> {
        Arc::new(Exponential::new(1.0).unwrap())
    }

    #[test]
    fn deterministic_and_sorted() {
        let p = Partition::new(4, 3, vec![vec![1], vec![2, 3]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 50_000, 9).unwrap();
        let a = sample_partial_sums(&spec);
        let b = sample_partial_sums(&spec);
        assert_eq!(a, b);
        let sorted = map_sorted(exp1().as_ref(), 4, 40_000, 9, |s| s.windows(2).all(|w| w[0] >= w[1]));
        assert!(sorted.into_iter().all(|ok| ok));
    }

    #[test]
    fn single_rank_is_raw_distribution() {
        let p = Partition::new(1, 1, vec![vec![1]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 200_000, 3).unwrap();
        let s = sample_partial_sums(&spec);
        let d = ks_distance(&s.data, |x| 1.0 - (-x).exp());
        assert!(d * (s.len() as f64).sqrt() < KS_THRESHOLD);
    }

    #[test]
    fn first_bin_of_exponential() {
        let p = Partition::new(1, 1, vec![vec![1]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 1_000_000, 1).unwrap();
        let h = empirical_density(&spec, BinSpec::uniform(&[(0.0, 5.0, 50)]).unwrap()).unwrap();
        let e = h.estimate(0);
        assert!((e.density - 0.951_625_819_640_404_3).abs() <= 3.0 * e.std_error);
        assert_eq!(h.counts.iter().sum::<u64>() + h.outside, h.n);
    }

    #[test]
    fn ordered_pair_vanishes_above_diagonal() {
        let p = Partition::new(2, 2, vec![vec![1], vec![2]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 100_000, 5).unwrap();
        let h = empirical_density(&spec, BinSpec::uniform(&[(0.0, 4.0, 20), (0.0, 4.0, 20)]).unwrap()).unwrap();
        for i in 0..h.counts.len() {
            let idx = h.unravel(i);
            if idx[1] > idx[0] {
                assert_eq!(h.counts[i], 0);
            }
        }
    }

    #[test]
    fn total_sum_mean_ignores_sorting() {
        let p = Partition::new(3, 3, vec![vec![1, 2, 3]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 200_000, 8).unwrap();
        let s = sample_partial_sums(&spec);
        let sd = 3f64.sqrt() / (s.len() as f64).sqrt();
        assert!((s.mean(0) - 3.0).abs() < 3.0 * sd);
    }

    #[test]
    fn wrong_scale_is_detected() {
        let p = Partition::new(3, 3, vec![vec![1, 2, 3]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 100_000, 2).unwrap();
        let s = sample_partial_sums(&spec);
        let sqrt_n = (s.len() as f64).sqrt();
        let right = CdfTable::from_density(&ExactExp::new(1.0).unwrap().pdf_sum_all(3).unwrap(), 40.0, 4000).unwrap();
        let wrong = CdfTable::from_density(&ExactExp::new(1.1).unwrap().pdf_sum_all(3).unwrap(), 40.0, 4000).unwrap();
        assert!(ks_distance(&s.data, |x| right.eval(x)) * sqrt_n < KS_THRESHOLD);
        assert!(ks_distance(&s.data, |x| wrong.eval(x)) * sqrt_n > 5.0 * KS_THRESHOLD);
    }

    #[test]
    fn head_tail_histogram_matches() {
        let p = Partition::new(4, 4, vec![vec![1, 2], vec![3, 4]]).unwrap();
        let spec = SampleSpec::new(exp1(), p, 400_000, 4).unwrap();
        let h = empirical_density(&spec, BinSpec::uniform(&[(0.0, 8.0, 20), (0.0, 3.0, 15)]).unwrap()).unwrap();
        let d = ExactExp::new(1.0).unwrap().jpdf_headsum_vs_tailsum_all_k(4, 2).unwrap();
        let cmp = compare_bins(&h, &d).unwrap();
        assert!(cmp.fraction() >= 0.95, "{cmp:?}");
    }
}
