//! The private coloring mechanisms and their baselines.

mod control;
mod file;
mod unctr;

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::mech::{self, PrivacyBudget, RandomSource};

pub use self::control::{color_control, control_threshold, controlled_resample, ControlOutcome};
pub use self::file::{read_coloring, write_coloring, ColoringFile, ColoringHeader};
pub use self::unctr::{color_unctr, resample_sequential, unctr_order, UnctrOutcome};

/// Labels for the independent random streams used by one mechanism run. The
/// harness derives the same streams so its shared cells reproduce the
/// standalone mechanisms.
pub mod streams {
    pub const NOISY_DELTA: u64 = 1;
    pub const INITIAL: u64 = 2;
    pub const SEQUENTIAL: u64 = 3;
    pub const CONTROL: u64 = 4;
}

/// Assignment of a color in `0..palette` to every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    colors: Vec<usize>,
    palette: usize,
}

impl Coloring {
    /// Checked constructor: every color must be below `palette`.
    pub fn new(colors: Vec<usize>, palette: usize) -> Result<Self> {
        if let Some((v, &c)) = colors.iter().enumerate().find(|(_, &c)| c >= palette) {
            return Err(Error::param(format!(
                "vertex {v} has color {c} outside palette of size {palette}"
            )));
        }
        Ok(Coloring { colors, palette })
    }

    /// Unchecked constructor, for feeding arbitrary data to
    /// [`verify_coloring`](crate::metrics::verify_coloring).
    pub fn from_raw(colors: Vec<usize>, palette: usize) -> Self {
        Coloring { colors, palette }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> usize {
        self.colors[v]
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    pub fn into_colors(self) -> Vec<usize> {
        self.colors
    }
}

/// Order in which the sequential mechanism visits vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum OrderingMode {
    /// Vertex ids ascending.
    #[default]
    Input,
    /// Minimum-degree peeling order, i.e. the reverse of the degeneracy
    /// ordering. Each vertex then has at most `d` neighbors processed after it.
    ReverseDegeneracy,
}

impl fmt::Display for OrderingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrderingMode::Input => "input",
            OrderingMode::ReverseDegeneracy => "reverse-degeneracy",
        })
    }
}

impl FromStr for OrderingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "input" => Ok(OrderingMode::Input),
            "reverse-degeneracy" => Ok(OrderingMode::ReverseDegeneracy),
            other => Err(Error::param(format!(
                "unknown ordering `{other}` (expected `input` or `reverse-degeneracy`)"
            ))),
        }
    }
}

/// Parameters for one invocation of a private mechanism.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlgoParams {
    pub epsilon: PrivacyBudget,
    /// Multiplier on the controlled-resampling threshold. Must be positive;
    /// `+inf` disables recoloring.
    pub threshold_scale: f64,
    pub ordering: OrderingMode,
    /// Replaces the mechanism's default exponent factor (1/2 sequential,
    /// 1 controlled) when set.
    pub exponent_factor: Option<f64>,
    pub seed: u64,
}

impl AlgoParams {
    pub fn new(epsilon: PrivacyBudget, seed: u64) -> Self {
        AlgoParams {
            epsilon,
            threshold_scale: 1.0,
            ordering: OrderingMode::Input,
            exponent_factor: None,
            seed,
        }
    }

    pub fn with_threshold_scale(mut self, scale: f64) -> Self {
        self.threshold_scale = scale;
        self
    }

    pub fn with_ordering(mut self, ordering: OrderingMode) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_exponent_factor(mut self, factor: f64) -> Self {
        self.exponent_factor = Some(factor);
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.threshold_scale.is_nan() || self.threshold_scale <= 0.0 {
            return Err(Error::param(format!(
                "threshold scale must be positive, got {}",
                self.threshold_scale
            )));
        }
        Ok(())
    }

    pub(crate) fn spec(&self, default: mech::MechanismSpec) -> Result<mech::MechanismSpec> {
        match self.exponent_factor {
            Some(f) => mech::MechanismSpec::new(default.sensitivity, f),
            None => Ok(default),
        }
    }
}

/// Privately sized palette: the noisy maximum degree and the palette derived
/// from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrivatePalette {
    pub noisy_delta: f64,
    pub size: usize,
}

impl PrivatePalette {
    pub fn draw(g: &Graph, eps: PrivacyBudget, src: RandomSource) -> Self {
        let noisy_delta = mech::noisy_max_degree(g, eps, &mut src.rng());
        PrivatePalette {
            noisy_delta,
            size: mech::palette_size(noisy_delta, g.n()),
        }
    }
}

/// Number of neighbors of `v` colored `k`.
pub fn score(g: &Graph, c: &Coloring, v: usize, k: usize) -> Result<usize> {
    if v >= g.n() || c.len() != g.n() {
        return Err(Error::param(format!("vertex {v} is outside the colored graph")));
    }
    if k >= c.palette() {
        return Err(Error::param(format!("color {k} is outside palette {}", c.palette())));
    }
    Ok(g.neighbors(v).iter().filter(|&&u| c.color(u) == k).count())
}

/// Fills `counts` (resized to `palette`) with the per-color neighbor counts of
/// `v`, i.e. `counts[k] = score(v, k)`.
pub(crate) fn neighbor_color_counts(
    g: &Graph,
    colors: &[usize],
    v: usize,
    palette: usize,
    counts: &mut Vec<usize>,
) {
    counts.clear();
    counts.resize(palette, 0);
    for &u in g.neighbors(v) {
        counts[colors[u]] += 1;
    }
}

/// Independent uniform color in `0..palette` for every vertex.
pub fn random_coloring<R: Rng + ?Sized>(g: &Graph, palette: usize, rng: &mut R) -> Result<Coloring> {
    if palette == 0 {
        return Err(Error::param("palette must contain at least one color"));
    }
    let colors = (0..g.n()).map(|_| rng.gen_range(0..palette)).collect();
    Ok(Coloring { colors, palette })
}

/// Non-private baseline: one pass in id order, each vertex taking the color
/// least used among its already-colored neighbors (lowest index on ties).
pub fn greedy_coloring(g: &Graph, palette: usize) -> Result<Coloring> {
    if palette == 0 {
        return Err(Error::param("palette must contain at least one color"));
    }
    let mut colors: Vec<Option<usize>> = vec![None; g.n()];
    let mut counts = vec![0usize; palette];
    for v in 0..g.n() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &u in g.neighbors(v) {
            if let Some(cu) = colors[u] {
                counts[cu] += 1;
            }
        }
        let best = counts
            .iter()
            .enumerate()
            .min_by_key(|&(k, &count)| (count, k))
            .map(|(k, _)| k)
            .unwrap_or(0);
        colors[v] = Some(best);
    }
    Ok(Coloring {
        colors: colors.into_iter().map(|c| c.unwrap_or(0)).collect(),
        palette,
    })
}

/// Experimental stand-in for the CRSV baseline: the uniform random coloring
/// over the private palette that the other mechanisms start from.
pub fn crsv_baseline<R: Rng + ?Sized>(g: &Graph, palette: usize, rng: &mut R) -> Result<Coloring> {
    random_coloring(g, palette, rng)
}
