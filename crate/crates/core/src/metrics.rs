//! Defect measurement, coloring verification and theoretical bounds.
//!
//! All logarithms are natural.

use std::collections::BTreeMap;
use std::fmt;

use crate::coloring::Coloring;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Per-vertex defects of a coloring with summary statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectReport {
    /// `per_vertex[v]` counts neighbors of `v` sharing its color.
    pub per_vertex: Vec<usize>,
    pub average: f64,
    pub maximum: usize,
    /// Defect value to number of vertices with that defect.
    pub histogram: BTreeMap<usize, usize>,
}

impl DefectReport {
    fn from_per_vertex(per_vertex: Vec<usize>) -> Self {
        let n = per_vertex.len();
        let total: usize = per_vertex.iter().sum();
        let mut histogram = BTreeMap::new();
        for &d in &per_vertex {
            *histogram.entry(d).or_insert(0) += 1;
        }
        DefectReport {
            average: if n == 0 { 0.0 } else { total as f64 / n as f64 },
            maximum: per_vertex.iter().copied().max().unwrap_or(0),
            per_vertex,
            histogram,
        }
    }

    /// Number of monochromatic edges.
    pub fn monochromatic_edges(&self) -> usize {
        self.per_vertex.iter().sum::<usize>() / 2
    }
}

pub fn defect_profile(g: &Graph, c: &Coloring) -> Result<DefectReport> {
    if c.len() != g.n() {
        return Err(Error::param(format!(
            "coloring has {} entries but the graph has {} vertices",
            c.len(),
            g.n()
        )));
    }
    let colors = c.colors();
    let per_vertex = (0..g.n())
        .map(|v| g.neighbors(v).iter().filter(|&&u| colors[u] == colors[v]).count())
        .collect();
    Ok(DefectReport::from_per_vertex(per_vertex))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Length { expected: usize, found: usize },
    ColorOutOfRange { vertex: usize, color: usize, palette: usize },
    EmptyPalette,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Length { expected, found } => {
                write!(f, "coloring has {found} entries, graph has {expected} vertices")
            }
            Violation::ColorOutOfRange { vertex, color, palette } => {
                write!(f, "vertex {vertex} has color {color} outside palette 0..{palette}")
            }
            Violation::EmptyPalette => f.write_str("palette is empty"),
        }
    }
}

/// Reports at most this many violations.
pub const MAX_VIOLATIONS: usize = 32;

/// Checks that `c` is a well-formed coloring of `g` and recomputes its
/// defect report from scratch.
pub fn verify_coloring(g: &Graph, c: &Coloring) -> std::result::Result<DefectReport, Vec<Violation>> {
    let mut violations = Vec::new();
    if c.palette() == 0 {
        violations.push(Violation::EmptyPalette);
    }
    if c.len() != g.n() {
        violations.push(Violation::Length {
            expected: g.n(),
            found: c.len(),
        });
    }
    violations.extend(
        c.colors()
            .iter()
            .enumerate()
            .filter(|&(_, &color)| color >= c.palette())
            .map(|(vertex, &color)| Violation::ColorOutOfRange {
                vertex,
                color,
                palette: c.palette(),
            })
            .take(MAX_VIOLATIONS),
    );
    violations.truncate(MAX_VIOLATIONS);
    if violations.is_empty() {
        defect_profile(g, c).map_err(|_| unreachable!("length checked above"))
    } else {
        Err(violations)
    }
}

fn check_domain(name: &str, value: f64, min: f64) -> Result<()> {
    if value.is_finite() && value >= min {
        Ok(())
    } else {
        Err(Error::param(format!("{name} must be a finite value >= {min}, got {value}")))
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::param(format!("epsilon must be positive and finite, got {eps}")))
    }
}

/// High-probability defect bound for sequential resampling with palette `c`:
/// `delta / c + (2 / eps) (ln c + 2 ln n)`.
///
/// Excludes the back-neighbor term; under a degeneracy-`d` ordering the
/// bound on the full coloring is this value plus `d`.
pub fn alg1_bound(n: f64, delta: f64, eps: f64, c: f64) -> Result<f64> {
    check_domain("n", n, 2.0)?;
    check_domain("delta", delta, 2.0)?;
    check_domain("palette", c, 2.0)?;
    check_eps(eps)?;
    Ok(delta / c + (2.0 / eps) * (c.ln() + 2.0 * n.ln()))
}

/// Defect threshold for controlled resampling before scaling:
/// `ln n + (ln D + sqrt((ln D)^2 + 8 ln D ln n)) / 2 + ln D / eps`.
pub fn threshold_value(n: f64, delta_hat: f64, eps: f64) -> Result<f64> {
    check_domain("n", n, 2.0)?;
    check_domain("delta", delta_hat, 2.0)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::param(format!("epsilon must be positive, got {eps}")));
    }
    let ln_n = n.ln();
    let ln_d = delta_hat.ln();
    Ok(ln_n + chernoff_margin(ln_n, ln_d) + ln_d / eps)
}

fn chernoff_margin(ln_n: f64, ln_d: f64) -> f64 {
    (ln_d + (ln_d * ln_d + 8.0 * ln_d * ln_n).sqrt()) / 2.0
}

/// High-probability maximum-defect bound for controlled resampling:
///
/// ```text
/// max( ln n + (ln D + sqrt((ln D)^2 + 8 ln D ln n)) / 2 + ln D / eps + 2 ln n / eps,
///      (1 + 4 / eps) ln n + (4 / eps) ln D )
///   + 6 ln n / ln ln n
/// ```
///
/// Requires `ln ln n > 0`, i.e. `n > e`.
pub fn alg2_bound(n: f64, delta: f64, eps: f64) -> Result<f64> {
    check_domain("n", n, 2.0)?;
    check_domain("delta", delta, 2.0)?;
    check_eps(eps)?;
    let ln_n = n.ln();
    let ln_ln_n = ln_n.ln();
    if ln_ln_n <= 0.0 {
        return Err(Error::param(format!("ln ln n must be positive, got n = {n}")));
    }
    let ln_d = delta.ln();
    let thresholded = ln_n + chernoff_margin(ln_n, ln_d) + ln_d / eps + 2.0 * ln_n / eps;
    let resampled = (1.0 + 4.0 / eps) * ln_n + (4.0 / eps) * ln_d;
    Ok(thresholded.max(resampled) + 6.0 * ln_n / ln_ln_n)
}

/// Both bounds for one parameter set.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub n: f64,
    pub delta: f64,
    pub eps: f64,
    pub palette: f64,
    pub degeneracy: Option<usize>,
    pub alg1_bound: f64,
    /// `None` when `n <= e`, where the bound is undefined.
    pub alg2_bound: Option<f64>,
}

impl BoundReport {
    pub fn new(n: f64, delta: f64, eps: f64, palette: f64, degeneracy: Option<usize>) -> Result<Self> {
        let alg1 = alg1_bound(n, delta, eps, palette)?;
        let alg2 = if n.ln().ln() > 0.0 {
            Some(alg2_bound(n, delta, eps)?)
        } else {
            None
        };
        Ok(BoundReport {
            n,
            delta,
            eps,
            palette,
            degeneracy,
            alg1_bound: alg1,
            alg2_bound: alg2,
        })
    }

    /// Sequential bound plus the degeneracy term, when known.
    pub fn alg1_with_degeneracy(&self) -> Option<f64> {
        self.degeneracy.map(|d| self.alg1_bound + d as f64)
    }
}

impl fmt::Display for BoundReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "n = {}, max degree = {}, epsilon = {}, palette = {}",
            self.n, self.delta, self.eps, self.palette
        )?;
        writeln!(f, "unctr bound (excluding back-neighbors): {:.4}", self.alg1_bound)?;
        if let (Some(d), Some(total)) = (self.degeneracy, self.alg1_with_degeneracy()) {
            writeln!(f, "unctr bound with degeneracy d = {d}: {total:.4}")?;
        }
        match self.alg2_bound {
            Some(b) => writeln!(f, "control bound: {b:.4}"),
            None => writeln!(f, "control bound: undefined for n <= e"),
        }
    }
}
