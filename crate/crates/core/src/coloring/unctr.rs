use rand::Rng;

use super::{neighbor_color_counts, random_coloring, streams, AlgoParams, Coloring, OrderingMode, PrivatePalette};
use crate::error::Result;
use crate::graph::{degeneracy_ordering, Graph};
use crate::mech::{exp_mech_sample, MechanismSpec, PrivacyBudget, RandomSource};

/// Result of the sequential resampling mechanism.
#[derive(Clone, Debug, PartialEq)]
pub struct UnctrOutcome {
    pub coloring: Coloring,
    pub noisy_delta: f64,
    pub palette: usize,
}

/// Visiting order for the sequential mechanism.
pub fn unctr_order(g: &Graph, mode: OrderingMode) -> Vec<usize> {
    match mode {
        OrderingMode::Input => (0..g.n()).collect(),
        OrderingMode::ReverseDegeneracy => {
            let mut order = degeneracy_ordering(g).order;
            order.reverse();
            order
        }
    }
}

/// One sequential pass: each vertex in `order` redraws its color with the
/// exponential mechanism, scored against the current coloring (earlier
/// redraws are visible to later vertices).
pub fn resample_sequential<R: Rng + ?Sized>(
    g: &Graph,
    mut coloring: Coloring,
    order: &[usize],
    eps: PrivacyBudget,
    spec: MechanismSpec,
    rng: &mut R,
) -> Result<Coloring> {
    let palette = coloring.palette;
    let mut counts = Vec::with_capacity(palette);
    for &v in order {
        neighbor_color_counts(g, &coloring.colors, v, palette, &mut counts);
        coloring.colors[v] = exp_mech_sample(&counts, eps, spec, rng)?;
    }
    Ok(coloring)
}

/// Private coloring by exponential-mechanism resampling.
///
/// Draws the noisy maximum degree and palette, colors uniformly at random,
/// then resamples every vertex once in `params.ordering` with weights
/// `exp(-epsilon * score / 2)`.
pub fn color_unctr(g: &Graph, params: &AlgoParams) -> Result<UnctrOutcome> {
    params.validate()?;
    let spec = params.spec(MechanismSpec::HALF)?;
    let src = RandomSource::new(params.seed);
    let palette = PrivatePalette::draw(g, params.epsilon, src.derive(streams::NOISY_DELTA));
    let initial = random_coloring(g, palette.size, &mut src.derive(streams::INITIAL).rng())?;
    let order = unctr_order(g, params.ordering);
    let coloring = resample_sequential(
        g,
        initial,
        &order,
        params.epsilon,
        spec,
        &mut src.derive(streams::SEQUENTIAL).rng(),
    )?;
    Ok(UnctrOutcome {
        coloring,
        noisy_delta: palette.noisy_delta,
        palette: palette.size,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::star;
    use crate::graph::gen_erdos_renyi;
    use crate::metrics::defect_profile;

    fn budget(e: f64) -> PrivacyBudget {
        PrivacyBudget::new(e).unwrap()
    }

    #[test]
    fn edgeless_graph_has_no_defects() {
        let g = Graph::empty(40);
        let out = color_unctr(&g, &AlgoParams::new(budget(1.0), 3)).unwrap();
        assert_eq!(out.coloring.len(), 40);
        assert!(out.palette >= 2);
        let report = defect_profile(&g, &out.coloring).unwrap();
        assert_eq!(report.maximum, 0);
    }

    #[test]
    fn edgeless_resample_is_uniform() {
        let g = Graph::empty(20_000);
        let init = Coloring::new(vec![0; 20_000], 4).unwrap();
        let order: Vec<usize> = (0..20_000).collect();
        let out = resample_sequential(&g, init, &order, budget(3.0), MechanismSpec::HALF, &mut RandomSource::new(1).rng())
            .unwrap();
        let sigma = (20_000.0f64 * 0.25 * 0.75).sqrt();
        for k in 0..4 {
            let count = out.colors().iter().filter(|&&c| c == k).count() as f64;
            assert!((count - 5_000.0).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn k2_high_epsilon_separates_endpoints() {
        // With palette 2 and eps = 50, the second vertex sees scores differing
        // by one and picks the free color with probability 1/(1+e^-25).
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let order = [0, 1];
        let runs = 10_000;
        let mut distinct = 0;
        for seed in 0..runs {
            let mut rng = RandomSource::new(seed).rng();
            let init = random_coloring(&g, 2, &mut rng).unwrap();
            let out = resample_sequential(&g, init, &order, budget(50.0), MechanismSpec::HALF, &mut rng).unwrap();
            if out.color(0) != out.color(1) {
                distinct += 1;
            }
        }
        assert!(distinct as f64 / runs as f64 > 0.99);
    }

    #[test]
    fn last_vertex_is_clean_at_high_epsilon() {
        let g = gen_erdos_renyi(60, 0.1, 8).unwrap();
        let palette = g.max_degree() + 1;
        let order = unctr_order(&g, OrderingMode::Input);
        let last = *order.last().unwrap();
        for seed in 0..50 {
            let mut rng = RandomSource::new(seed).rng();
            let init = random_coloring(&g, palette, &mut rng).unwrap();
            let out = resample_sequential(&g, init, &order, budget(200.0), MechanismSpec::HALF, &mut rng).unwrap();
            assert_eq!(defect_profile(&g, &out).unwrap().per_vertex[last], 0);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let g = gen_erdos_renyi(100, 0.08, 2).unwrap();
        let params = AlgoParams::new(budget(1.0), 77).with_ordering(OrderingMode::ReverseDegeneracy);
        assert_eq!(color_unctr(&g, &params).unwrap(), color_unctr(&g, &params).unwrap());
    }

    #[test]
    fn reverse_degeneracy_order_visits_peeling_sequence() {
        let order = unctr_order(&star(3), OrderingMode::ReverseDegeneracy);
        assert_eq!(order, vec![1, 2, 0, 3]);
        assert_eq!(unctr_order(&star(3), OrderingMode::Input), vec![0, 1, 2, 3]);
    }

    #[test]
    fn exponent_override_is_validated() {
        let g = Graph::empty(3);
        let params = AlgoParams::new(budget(1.0), 0).with_exponent_factor(-1.0);
        assert!(color_unctr(&g, &params).is_err());
        let params = AlgoParams::new(budget(1.0), 0).with_threshold_scale(0.0);
        assert!(color_unctr(&g, &params).is_err());
    }
}
