//! Groupings of ranks and their reduction to supported density shapes.
//!
//! A [`Partition`] asks for the joint density of sums over groups of the
//! best `Ks` order statistics out of `K`. Normalising it splits every group
//! into contiguous runs and, when `Ks < K`, isolates rank `Ks`; the fine
//! density over those runs is what the closed forms deliver, and the
//! reduction plan lists which fine groups must be summed back together.

use crate::error::{Error, Result};
use serde::Serialize;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    pub k: usize,
    pub ks: usize,
    /// Requested groups of 1-based ranks, in output-coordinate order.
    pub groups: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RankRange {
    pub first: usize,
    pub last: usize,
}

impl RankRange {
    pub fn len(&self) -> usize {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl fmt::Display for RankRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.first == self.last {
            write!(f, "[{}]", self.first)
        } else {
            write!(f, "[{}-{}]", self.first, self.last)
        }
    }
}

/// Fine groups `sources` are summed to form requested group `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Merge {
    pub target: usize,
    pub sources: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NormalizedPartition {
    pub k: usize,
    pub ks: usize,
    pub fine_groups: Vec<RankRange>,
    pub reduction_plan: Vec<Merge>,
    pub separated_last: bool,
}

impl NormalizedPartition {
    pub fn dimension(&self) -> usize {
        self.fine_groups.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Theorem {
    /// Sum of all `K` ordered variables.
    T1,
    /// `g_{m:K}` against the sum of the other `K - 1`.
    T2,
    /// Sum of the best `m` against the sum of the remaining `K - m`.
    T3,
    /// Sum of the best `Ks` out of `K`.
    T4,
    /// `g_{m:K}` against the sum of the other best `Ks - 1`.
    T5,
    /// Sum of the best `m` against the sum of ranks `m+1..Ks`.
    T6,
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Theorem::T1 => "T1",
            Theorem::T2 => "T2",
            Theorem::T3 => "T3",
            Theorem::T4 => "T4",
            Theorem::T5 => "T5",
            Theorem::T6 => "T6",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "T1" | "1" => Ok(Theorem::T1),
            "T2" | "2" => Ok(Theorem::T2),
            "T3" | "3" => Ok(Theorem::T3),
            "T4" | "4" => Ok(Theorem::T4),
            "T5" | "5" => Ok(Theorem::T5),
            "T6" | "6" => Ok(Theorem::T6),
            other => Err(Error::Parse(format!("unknown theorem `{other}`"))),
        }
    }
}

impl Theorem {
    pub fn dimension(&self) -> usize {
        match self {
            Theorem::T1 | Theorem::T4 => 1,
            _ => 2,
        }
    }
}

/// Position of the separated variable in the one-vs-rest best-`Ks` shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Case {
    /// `m = 1`
    A,
    /// `1 < m < Ks - 1`
    B,
    /// `m = Ks - 1`
    C,
    /// `m = Ks`
    D,
}

impl Case {
    /// The case that applies to `m` when `Ks >= 3` (or `m = Ks`).
    pub fn of(m: usize, ks: usize) -> Result<Case> {
        if m == 0 || m > ks {
            return Err(Error::invalid(format!("m = {m} outside 1..={ks}")));
        }
        Ok(if m == ks {
            Case::D
        } else if m == 1 {
            Case::A
        } else if m == ks - 1 {
            Case::C
        } else {
            Case::B
        })
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Case::A => "a",
            Case::B => "b",
            Case::C => "c",
            Case::D => "d",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Case {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" => Ok(Case::A),
            "b" => Ok(Case::B),
            "c" => Ok(Case::C),
            "d" => Ok(Case::D),
            other => Err(Error::Parse(format!("unknown case `{other}`"))),
        }
    }
}

/// A supported density shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TheoremShape {
    pub theorem: Theorem,
    pub k: usize,
    pub ks: usize,
    /// The separated rank (T2, T5) or head length (T3, T6).
    pub m: Option<usize>,
    /// True when the requested groups list the coordinates in the reverse
    /// of the shape's natural `(x, y)` order.
    pub swapped: bool,
}

impl TheoremShape {
    pub fn new(theorem: Theorem, k: usize, ks: usize, m: Option<usize>) -> Result<Self> {
        let shape = Self { theorem, k, ks, m, swapped: false };
        shape.partition().map(|_| shape)
    }

    /// The partition this shape describes, coordinates in natural order.
    pub fn partition(&self) -> Result<Partition> {
        let (k, ks) = (self.k, self.ks);
        let need_m = || self.m.ok_or_else(|| Error::invalid(format!("{} needs m", self.theorem)));
        let groups = match self.theorem {
            Theorem::T1 => {
                if ks != k {
                    return Err(Error::invalid("T1 uses all K variables"));
                }
                vec![(1..=k).collect()]
            }
            Theorem::T4 => {
                if ks > k {
                    return Err(Error::invalid("Ks must not exceed K"));
                }
                vec![(1..=ks).collect()]
            }
            Theorem::T2 | Theorem::T5 => {
                let m = need_m()?;
                if self.theorem == Theorem::T2 && ks != k {
                    return Err(Error::invalid("T2 uses all K variables"));
                }
                if m == 0 || m > ks || ks < 2 {
                    return Err(Error::invalid(format!("need 1 <= m <= Ks and Ks >= 2 (m = {m}, Ks = {ks})")));
                }
                vec![vec![m], (1..=ks).filter(|&r| r != m).collect()]
            }
            Theorem::T3 | Theorem::T6 => {
                let m = need_m()?;
                if self.theorem == Theorem::T3 && ks != k {
                    return Err(Error::invalid("T3 uses all K variables"));
                }
                if m == 0 || m >= ks {
                    return Err(Error::invalid(format!("need 1 <= m < Ks (m = {m}, Ks = {ks})")));
                }
                vec![(1..=m).collect(), (m + 1..=ks).collect()]
            }
        };
        Partition::new(k, ks, groups)
    }

    /// Case label for the one-vs-rest best-`Ks` shape.
    pub fn case(&self) -> Option<Case> {
        match (self.theorem, self.m) {
            (Theorem::T5, Some(m)) => Case::of(m, self.ks).ok(),
            _ => None,
        }
    }
}

impl Partition {
    pub fn new(k: usize, ks: usize, groups: Vec<Vec<usize>>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("K must be at least 1"));
        }
        if ks == 0 || ks > k {
            return Err(Error::invalid(format!("Ks = {ks} must lie in 1..={k}")));
        }
        if groups.is_empty() {
            return Err(Error::invalid("at least one group is required"));
        }
        let mut seen = vec![false; ks + 1];
        for g in &groups {
            if g.is_empty() {
                return Err(Error::invalid("empty group"));
            }
            for &r in g {
                if r == 0 || r > ks {
                    return Err(Error::invalid(format!("rank {r} outside 1..={ks}")));
                }
                if seen[r] {
                    return Err(Error::invalid(format!("rank {r} appears twice")));
                }
                seen[r] = true;
            }
        }
        if let Some(r) = (1..=ks).find(|&r| !seen[r]) {
            return Err(Error::invalid(format!("rank {r} is not assigned to any group")));
        }
        let groups = groups
            .into_iter()
            .map(|mut g| {
                g.sort_unstable();
                g
            })
            .collect();
        Ok(Self { k, ks, groups })
    }

    /// Parse `K=10;Ks=8;groups=[1-3][4-6][7-8]`; a group may also be a
    /// comma list such as `[1,2,5,6]`. `Ks` defaults to `K`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut k = None;
        let mut ks = None;
        let mut groups = None;
        for field in text.split(';').map(str::trim).filter(|f| !f.is_empty()) {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{field}`")))?;
            let key = key.trim();
            let value = value.trim();
            match key {
                "K" | "k" => k = Some(parse_count(value)?),
                "Ks" | "ks" | "KS" => ks = Some(parse_count(value)?),
                "groups" => groups = Some(parse_groups(value)?),
                other => return Err(Error::Parse(format!("unknown key `{other}`"))),
            }
        }
        let k = k.ok_or_else(|| Error::Parse("missing K".into()))?;
        let groups = groups.ok_or_else(|| Error::Parse("missing groups".into()))?;
        Partition::new(k, ks.unwrap_or(k), groups).map_err(|e| match e {
            Error::InvalidParameter(m) => Error::Parse(m),
            other => other,
        })
    }

    pub fn dimension(&self) -> usize {
        self.groups.len()
    }

    pub fn normalize(&self) -> NormalizedPartition {
        let mut fine: Vec<(RankRange, usize)> = Vec::new();
        for (gi, g) in self.groups.iter().enumerate() {
            let mut start = g[0];
            let mut prev = g[0];
            for &r in &g[1..] {
                if r != prev + 1 {
                    fine.push((RankRange { first: start, last: prev }, gi));
                    start = r;
                }
                prev = r;
            }
            fine.push((RankRange { first: start, last: prev }, gi));
        }
        let separated_last = self.ks < self.k;
        if separated_last {
            let pos = fine.iter().position(|(r, _)| r.last == self.ks).expect("rank Ks is covered");
            let (r, gi) = fine[pos];
            if r.first < r.last {
                fine[pos] = (RankRange { first: r.first, last: r.last - 1 }, gi);
                fine.insert(pos + 1, (RankRange { first: self.ks, last: self.ks }, gi));
            }
        }
        fine.sort_by_key(|(r, _)| r.first);
        let mut plan = Vec::new();
        for gi in 0..self.groups.len() {
            let sources: Vec<usize> = fine.iter().enumerate().filter(|(_, (_, g))| *g == gi).map(|(i, _)| i).collect();
            if sources.len() > 1 {
                plan.push(Merge { target: gi, sources });
            }
        }
        NormalizedPartition {
            k: self.k,
            ks: self.ks,
            fine_groups: fine.into_iter().map(|(r, _)| r).collect(),
            reduction_plan: plan,
            separated_last,
        }
    }

    /// Map the partition to a supported shape or explain why it is not one.
    pub fn classify(&self) -> Result<TheoremShape> {
        let (k, ks) = (self.k, self.ks);
        let is_range = |g: &Vec<usize>, a: usize, b: usize| g.len() == b + 1 - a && g.first() == Some(&a) && g.last() == Some(&b);
        let full = ks == k;
        if self.groups.len() == 1 {
            let theorem = if full { Theorem::T1 } else { Theorem::T4 };
            return Ok(TheoremShape { theorem, k, ks, m: None, swapped: false });
        }
        if self.groups.len() == 2 {
            for (first, swapped) in [(0, false), (1, true)] {
                let a = &self.groups[first];
                if a.len() == 1 {
                    let theorem = if full { Theorem::T2 } else { Theorem::T5 };
                    return Ok(TheoremShape { theorem, k, ks, m: Some(a[0]), swapped });
                }
            }
            for (first, second, swapped) in [(0, 1, false), (1, 0, true)] {
                let (a, b) = (&self.groups[first], &self.groups[second]);
                let m = a.len();
                if is_range(a, 1, m) && is_range(b, m + 1, ks) {
                    let theorem = if full { Theorem::T3 } else { Theorem::T6 };
                    return Ok(TheoremShape { theorem, k, ks, m: Some(m), swapped });
                }
            }
            return Err(Error::UnsupportedShape(format!(
                "groups {} are neither one-vs-rest nor head/tail; the nearest supported shape is {} (best m against ranks m+1..Ks)",
                self.groups_text(),
                if full { "T3" } else { "T6" }
            )));
        }
        Err(Error::UnsupportedShape(format!(
            "{} groups requested ({}); at most two groups are supported, the nearest shape is {} (two contiguous groups)",
            self.groups.len(),
            self.groups_text(),
            if full { "T3" } else { "T6" }
        )))
    }

    pub fn groups_text(&self) -> String {
        self.groups
            .iter()
            .map(|g| format!("[{}]", g.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")))
            .collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K={};Ks={};groups={}", self.k, self.ks, self.groups_text())
    }
}

fn parse_count(v: &str) -> Result<usize> {
    v.parse::<usize>().map_err(|_| Error::Parse(format!("expected a positive integer, got `{v}`")))
}

fn parse_groups(text: &str) -> Result<Vec<Vec<usize>>> {
    let mut groups = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        rest = rest.trim_start_matches(|c: char| c == ',' || c.is_whitespace());
        if rest.is_empty() {
            break;
        }
        if !rest.starts_with('[') {
            return Err(Error::Parse(format!("expected `[` in groups, found `{rest}`")));
        }
        let close = rest.find(']').ok_or_else(|| Error::Parse("unterminated group".into()))?;
        let body = &rest[1..close];
        let mut g = Vec::new();
        for item in body.split(',').map(str::trim) {
            if item.is_empty() {
                return Err(Error::Parse("empty item in group".into()));
            }
            if let Some((a, b)) = item.split_once('-') {
                let a = parse_count(a.trim())?;
                let b = parse_count(b.trim())?;
                if b < a {
                    return Err(Error::Parse(format!("descending range {a}-{b}")));
                }
                g.extend(a..=b);
            } else {
                g.push(parse_count(item)?);
            }
        }
        groups.push(g);
        rest = &rest[close + 1..];
    }
    if groups.is_empty() {
        return Err(Error::Parse("no groups given".into()));
    }
    Ok(groups)
}
