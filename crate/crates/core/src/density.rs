//! The [`JointDensity`] value returned by both evaluation paths, and grid
//! tabulation to CSV.

use crate::error::{Error, Result};
use crate::partition::{Case, Theorem};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

pub type DensityFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
pub type SupportFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalPath {
    Exact,
    Numeric,
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalPath::Exact => "exact",
            EvalPath::Numeric => "numeric",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMeta {
    pub k: usize,
    pub ks: usize,
    pub m: Option<usize>,
    pub theorem: Option<Theorem>,
    pub case: Option<Case>,
    /// Human-readable description of the coordinates.
    pub grouping: String,
    pub path: EvalPath,
    pub distribution: String,
}

/// A probability density on the non-negative orthant of dimension `dim`.
#[derive(Clone)]
pub struct JointDensity {
    dim: usize,
    f: DensityFn,
    support: SupportFn,
    pub meta: DensityMeta,
}

impl fmt::Debug for JointDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointDensity").field("dim", &self.dim).field("meta", &self.meta).finish()
    }
}

impl JointDensity {
    pub fn new(dim: usize, f: DensityFn, support: SupportFn, meta: DensityMeta) -> Self {
        Self { dim, f, support, meta }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn in_support(&self, z: &[f64]) -> bool {
        z.len() == self.dim && z.iter().all(|&v| v >= 0.0 && v.is_finite()) && (self.support)(z)
    }

    /// Density value; zero outside the support.
    pub fn evaluate(&self, z: &[f64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::invalid(format!("expected {} coordinates, got {}", self.dim, z.len())));
        }
        if !self.in_support(z) {
            return Ok(0.0);
        }
        (self.f)(z)
    }

    /// A density in the swapped coordinates `(z_2, z_1)` (2-D only).
    pub fn swapped(&self) -> Result<Self> {
        if self.dim != 2 {
            return Err(Error::invalid("only two-dimensional densities can be swapped"));
        }
        let f = self.f.clone();
        let s = self.support.clone();
        let mut meta = self.meta.clone();
        meta.grouping = format!("swapped({})", meta.grouping);
        Ok(Self {
            dim: 2,
            f: Arc::new(move |z: &[f64]| f(&[z[1], z[0]])),
            support: Arc::new(move |z: &[f64]| s(&[z[1], z[0]])),
            meta,
        })
    }
}

/// Evenly spaced axis `start, ..., end` with `count >= 2` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn new(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 points, got {count}")));
        }
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::invalid(format!("grid range [{start}, {end}] is empty")));
        }
        Ok(Self { start, end, count })
    }

    /// Parse `start:end:count`.
    pub fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::Parse(format!("grid axis must be start:end:count, got `{text}`")));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}` in grid")));
        let count = parts[2].parse::<usize>().map_err(|_| Error::Parse(format!("bad count `{}` in grid", parts[2])))?;
        Self::new(num(parts[0])?, num(parts[1])?, count).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.end
        } else {
            self.start + (self.end - self.start) * i as f64 / (self.count - 1) as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }
}

/// Rows of `(coordinates..., value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Evaluate a function on the tensor grid spanned by `axes`, in row-major
/// order (last axis fastest), in parallel.
pub fn tabulate<F>(f: F, axes: &[GridAxis], names: &[&str]) -> Result<Table>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let total: usize = axes.iter().map(|a| a.count).product();
    let rows: Result<Vec<Vec<f64>>> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let mut z = vec![0.0; axes.len()];
            for (d, a) in axes.iter().enumerate().rev() {
                z[d] = a.point(idx % a.count);
                idx /= a.count;
            }
            let v = f(&z)?;
            z.push(v);
            Ok(z)
        })
        .collect();
    let mut columns: Vec<String> = names.iter().map(|s| s.to_string()).collect();
    columns.push("value".into());
    Ok(Table { columns, rows: rows? })
}

/// Format with 17 significant digits.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.16e}")
    }
}

impl Table {
    /// Write CSV with `#`-prefixed metadata lines first.
    pub fn write_csv<W: Write>(&self, mut w: W, metadata: &[(String, String)]) -> std::io::Result<()> {
        for (k, v) in metadata {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_value(v)).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    /// Read back a table written by [`Table::write_csv`].
    pub fn read_csv(text: &str) -> Result<(Table, Vec<(String, String)>)> {
        let mut meta = Vec::new();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let mut header = None;
        for line in lines.by_ref() {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let (k, v) = rest.split_once(':').unwrap_or((rest, ""));
                meta.push((k.trim().to_string(), v.trim().to_string()));
            } else {
                header = Some(line);
                break;
            }
        }
        let header = header.ok_or_else(|| Error::Parse("missing CSV header".into()))?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for line in lines {
            let row: Result<Vec<f64>> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad CSV number `{c}`"))))
                .collect();
            let row = row?;
            if row.len() != columns.len() {
                return Err(Error::Parse("ragged CSV row".into()));
            }
            rows.push(row);
        }
        Ok((Table { columns, rows }, meta))
    }
}
