use rayon::prelude::*;

use super::{neighbor_color_counts, random_coloring, streams, AlgoParams, Coloring, PrivatePalette};
use crate::error::Result;
use crate::graph::Graph;
use crate::mech::{exp_mech_sample, laplace_sample, MechanismSpec, PrivacyBudget, RandomSource};
use crate::metrics::threshold_value;

/// Result of the controlled resampling mechanism.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlOutcome {
    pub coloring: Coloring,
    /// Vertices whose noisy defect exceeded the threshold, ascending.
    pub recolored: Vec<usize>,
    pub threshold_used: f64,
    pub noisy_delta: f64,
}

/// Noisy-defect threshold for a run: the base threshold evaluated at the
/// privatized degree `max(noisy_delta, 2)` and `max(n, 2)`, times `scale`.
pub fn control_threshold(n: usize, noisy_delta: f64, eps: PrivacyBudget, scale: f64) -> f64 {
    let delta_hat = if noisy_delta.is_nan() { 2.0 } else { noisy_delta.max(2.0) };
    let base = threshold_value(n.max(2) as f64, delta_hat, eps.epsilon())
        .expect("clamped inputs are in the threshold's domain");
    base * scale
}

/// Thresholded resampling against a fixed initial coloring.
///
/// Every vertex `v` adds `Lap(1/epsilon)` to its defect under `initial`; if
/// the result exceeds `threshold` a replacement color is drawn with the
/// exponential mechanism, scored against `initial`. Replacements are applied
/// together at the end. Vertex `v` uses stream `v` of `src`, so the result
/// does not depend on the order or parallelism of the per-vertex work.
pub fn controlled_resample(
    g: &Graph,
    initial: &Coloring,
    eps: PrivacyBudget,
    threshold: f64,
    spec: MechanismSpec,
    src: RandomSource,
) -> Result<(Coloring, Vec<usize>)> {
    let replacements = (0..g.n())
        .into_par_iter()
        .map_init(Vec::new, |counts, v| control_vertex(g, initial, v, eps, threshold, spec, src, counts))
        .collect::<Result<Vec<Option<usize>>>>()?;
    let mut coloring = initial.clone();
    let mut recolored = Vec::new();
    for (v, replacement) in replacements.into_iter().enumerate() {
        if let Some(c) = replacement {
            coloring.colors[v] = c;
            recolored.push(v);
        }
    }
    Ok((coloring, recolored))
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn control_vertex(
    g: &Graph,
    initial: &Coloring,
    v: usize,
    eps: PrivacyBudget,
    threshold: f64,
    spec: MechanismSpec,
    src: RandomSource,
    counts: &mut Vec<usize>,
) -> Result<Option<usize>> {
    let mut rng = src.with_stream(v as u64).rng();
    neighbor_color_counts(g, initial.colors(), v, initial.palette(), counts);
    let defect = counts[initial.color(v)] as f64;
    let noisy = defect + laplace_sample(1.0 / eps.epsilon(), &mut rng)?;
    if noisy > threshold {
        Ok(Some(exp_mech_sample(counts, eps, spec, &mut rng)?))
    } else {
        Ok(None)
    }
}

/// Private coloring by controlled resampling.
///
/// Draws the noisy maximum degree and palette, colors uniformly at random,
/// then recolors only the vertices whose noisy defect exceeds the scaled
/// threshold, with weights `exp(-epsilon * score)`.
pub fn color_control(g: &Graph, params: &AlgoParams) -> Result<ControlOutcome> {
    params.validate()?;
    let spec = params.spec(MechanismSpec::FULL)?;
    let src = RandomSource::new(params.seed);
    let palette = PrivatePalette::draw(g, params.epsilon, src.derive(streams::NOISY_DELTA));
    let initial = random_coloring(g, palette.size, &mut src.derive(streams::INITIAL).rng())?;
    let threshold = control_threshold(g.n(), palette.noisy_delta, params.epsilon, params.threshold_scale);
    let (coloring, recolored) = controlled_resample(
        g,
        &initial,
        params.epsilon,
        threshold,
        spec,
        src.derive(streams::CONTROL),
    )?;
    Ok(ControlOutcome {
        coloring,
        recolored,
        threshold_used: threshold,
        noisy_delta: palette.noisy_delta,
    })
}
