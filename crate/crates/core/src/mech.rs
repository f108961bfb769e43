//! Differential-privacy primitives: seeded randomness, Laplace noise, the
//! exponential-mechanism sampler and private palette sizing.

use rand::distributions::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Pure-DP privacy parameter. Always positive and finite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct PrivacyBudget(f64);

impl PrivacyBudget {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon.is_finite() && epsilon > 0.0 {
            Ok(PrivacyBudget(epsilon))
        } else {
            Err(Error::param(format!("epsilon must be positive and finite, got {epsilon}")))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.0
    }
}

/// Scaling of an exponential-mechanism draw: options are weighted by
/// `exp(-epsilon * exponent_factor * score / sensitivity)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MechanismSpec {
    pub sensitivity: f64,
    pub exponent_factor: f64,
}

impl MechanismSpec {
    /// Factor 1/2, the sequential-resampling mechanism's weighting.
    pub const HALF: MechanismSpec = MechanismSpec {
        sensitivity: 1.0,
        exponent_factor: 0.5,
    };
    /// Factor 1, the controlled-resampling mechanism's weighting.
    pub const FULL: MechanismSpec = MechanismSpec {
        sensitivity: 1.0,
        exponent_factor: 1.0,
    };

    pub fn new(sensitivity: f64, exponent_factor: f64) -> Result<Self> {
        if !(sensitivity.is_finite() && sensitivity > 0.0) {
            return Err(Error::param(format!("sensitivity must be positive, got {sensitivity}")));
        }
        if !(exponent_factor.is_finite() && exponent_factor > 0.0) {
            return Err(Error::param(format!(
                "exponent factor must be positive, got {exponent_factor}"
            )));
        }
        Ok(MechanismSpec {
            sensitivity,
            exponent_factor,
        })
    }

    fn rate(self, eps: PrivacyBudget) -> f64 {
        eps.epsilon() * self.exponent_factor / self.sensitivity
    }
}

/// Deterministic randomness handle: a 64-bit seed plus a stream id.
///
/// Identical `(seed, stream)` pairs always produce bit-identical sequences.
/// Independent logical tasks take distinct streams (for example one per
/// vertex) or a [`derive`](RandomSource::derive)d seed per phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, stream: 0 }
    }

    pub fn with_stream(self, stream: u64) -> Self {
        RandomSource { stream, ..self }
    }

    /// A source with an independent seed, labelled by `label`.
    pub fn derive(self, label: u64) -> Self {
        RandomSource {
            seed: splitmix64(self.seed ^ splitmix64(label.wrapping_add(self.stream.rotate_left(32)))),
            stream: 0,
        }
    }

    pub fn rng(self) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// One draw from the zero-mean Laplace distribution with the given scale, by
/// inverting the CDF at a uniform point of the open interval (-1/2, 1/2).
pub fn laplace_sample<R: Rng + ?Sized>(scale: f64, rng: &mut R) -> Result<f64> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::param(format!("Laplace scale must be positive, got {scale}")));
    }
    let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
    Ok(-scale * u.signum() * (1.0 - 2.0 * u.abs()).ln())
}

/// Maximum degree plus `Lap(1/epsilon)`. Adding or removing one edge moves
/// the maximum degree by at most one, so this is `epsilon`-DP.
pub fn noisy_max_degree<R: Rng + ?Sized>(g: &Graph, eps: PrivacyBudget, rng: &mut R) -> f64 {
    let noise = laplace_sample(1.0 / eps.epsilon(), rng).expect("positive finite scale");
    g.max_degree() as f64 + noise
}

/// Palette size `max(2, floor(noisy_delta / ln n))`.
///
/// Graphs with fewer than two vertices get the minimum palette of 2.
pub fn palette_size(noisy_delta: f64, n: usize) -> usize {
    const MIN_PALETTE: usize = 2;
    if n < 2 {
        return MIN_PALETTE;
    }
    let raw = (noisy_delta / (n as f64).ln()).floor();
    if raw.is_nan() || raw < MIN_PALETTE as f64 {
        MIN_PALETTE
    } else {
        // `as` saturates for absurdly large draws.
        raw as usize
    }
}

/// Selection probabilities of the exponential mechanism over `scores`
/// (lower scores are favoured).
pub fn exp_mech_probabilities(
    scores: &[usize],
    eps: PrivacyBudget,
    spec: MechanismSpec,
) -> Result<Vec<f64>> {
    let min = *scores
        .iter()
        .min()
        .ok_or_else(|| Error::param("exponential mechanism needs at least one option"))?;
    let rate = spec.rate(eps);
    let weights: Vec<f64> = scores
        .iter()
        .map(|&s| (-rate * (s - min) as f64).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// Samples an index `k` with probability proportional to
/// `exp(-epsilon * factor * scores[k] / sensitivity)`.
///
/// Scores are shifted by their minimum before exponentiation so the largest
/// weight is exactly 1.
pub fn exp_mech_sample<R: Rng + ?Sized>(
    scores: &[usize],
    eps: PrivacyBudget,
    spec: MechanismSpec,
    rng: &mut R,
) -> Result<usize> {
    let min = *scores
        .iter()
        .min()
        .ok_or_else(|| Error::param("exponential mechanism needs at least one option"))?;
    let rate = spec.rate(eps);
    let weight = |s: usize| (-rate * (s - min) as f64).exp();
    let total: f64 = scores.iter().map(|&s| weight(s)).sum();
    let mut target = rng.gen::<f64>() * total;
    let mut last_positive = 0;
    for (k, &s) in scores.iter().enumerate() {
        let w = weight(s);
        if w > 0.0 {
            if target < w {
                return Ok(k);
            }
            last_positive = k;
        }
        target -= w;
    }
    // Rounding left a sliver of mass past the end.
    Ok(last_positive)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget(e: f64) -> PrivacyBudget {
        PrivacyBudget::new(e).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(PrivacyBudget::new(0.0).is_err());
        assert!(PrivacyBudget::new(-1.0).is_err());
        assert!(PrivacyBudget::new(f64::INFINITY).is_err());
        assert!(PrivacyBudget::new(f64::NAN).is_err());
        assert_eq!(budget(0.5).epsilon(), 0.5);
    }

    #[test]
    fn spec_validation() {
        assert!(MechanismSpec::new(0.0, 1.0).is_err());
        assert!(MechanismSpec::new(1.0, -1.0).is_err());
        assert!(MechanismSpec::new(1.0, 3.0).is_ok());
    }

    #[test]
    fn random_source_is_reproducible() {
        let src = RandomSource::new(99).with_stream(4);
        let a: Vec<u64> = (0..8).map({
            let mut r = src.rng();
            move |_| r.gen()
        }).collect();
        let b: Vec<u64> = (0..8).map({
            let mut r = src.rng();
            move |_| r.gen()
        }).collect();
        assert_eq!(a, b);
        let other: u64 = src.with_stream(5).rng().gen();
        assert_ne!(a[0], other);
        assert_ne!(src.derive(1), src.derive(2));
        assert_eq!(src.derive(1), src.derive(1));
    }

    #[test]
    fn laplace_rejects_bad_scale() {
        let mut rng = RandomSource::new(0).rng();
        assert!(laplace_sample(0.0, &mut rng).is_err());
        assert!(laplace_sample(-2.0, &mut rng).is_err());
        assert!(laplace_sample(f64::NAN, &mut rng).is_err());
    }

    #[test]
    fn laplace_is_deterministic() {
        let src = RandomSource::new(3).with_stream(8);
        let a = laplace_sample(1.0, &mut src.rng()).unwrap();
        let b = laplace_sample(1.0, &mut src.rng()).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn laplace_median_and_variance() {
        let mut rng = RandomSource::new(17).rng();
        let mut xs: Vec<f64> = (0..1_000_000)
            .map(|_| laplace_sample(1.0, &mut rng).unwrap())
            .collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64;
        assert!((var - 2.0).abs() < 0.1, "variance {var}");
        xs.sort_by(f64::total_cmp);
        let median = xs[xs.len() / 2];
        assert!(median.abs() < 0.01, "median {median}");
    }

    #[test]
    fn noisy_max_degree_on_edgeless_graph_is_centred() {
        let g = Graph::empty(10);
        let mut rng = RandomSource::new(5).rng();
        let trials = 20_000;
        let mean = (0..trials)
            .map(|_| noisy_max_degree(&g, budget(1.0), &mut rng))
            .sum::<f64>()
            / trials as f64;
        // sd of the mean is sqrt(2) / sqrt(trials) ~ 0.01
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn noisy_max_degree_is_deterministic() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let src = RandomSource::new(12);
        let a = noisy_max_degree(&g, budget(2.0), &mut src.rng());
        let b = noisy_max_degree(&g, budget(2.0), &mut src.rng());
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn palette_examples() {
        // ln 7126 = 8.8715..., 720 / 8.8715 = 81.16
        assert_eq!(palette_size(720.0, 7126), 81);
        assert_eq!(palette_size(-5.0, 100), 2);
        assert_eq!(palette_size(0.0, 10), 2);
        assert_eq!(palette_size(50.0, 1), 2);
        assert_eq!(palette_size(50.0, 0), 2);
        assert_eq!(palette_size(f64::MAX, 10), usize::MAX);
    }

    #[test]
    fn singleton_palette() {
        let mut rng = RandomSource::new(1).rng();
        for _ in 0..100 {
            assert_eq!(exp_mech_sample(&[3], budget(1.0), MechanismSpec::HALF, &mut rng).unwrap(), 0);
        }
    }

    #[test]
    fn empty_scores_rejected() {
        let mut rng = RandomSource::new(1).rng();
        assert!(exp_mech_sample(&[], budget(1.0), MechanismSpec::HALF, &mut rng).is_err());
        assert!(exp_mech_probabilities(&[], budget(1.0), MechanismSpec::HALF).is_err());
    }

    fn frequencies(scores: &[usize], eps: f64, spec: MechanismSpec, draws: usize, seed: u64) -> Vec<f64> {
        let mut rng = RandomSource::new(seed).rng();
        let mut counts = vec![0usize; scores.len()];
        for _ in 0..draws {
            counts[exp_mech_sample(scores, budget(eps), spec, &mut rng).unwrap()] += 1;
        }
        counts.into_iter().map(|c| c as f64 / draws as f64).collect()
    }

    #[test]
    fn uniform_scores_give_uniform_choice() {
        let draws = 100_000;
        let sigma = (1.0 / 3.0 * 2.0 / 3.0 / draws as f64).sqrt();
        for f in frequencies(&[0, 0, 0], 1.3, MechanismSpec::HALF, draws, 2) {
            assert!((f - 1.0 / 3.0).abs() < 3.0 * sigma, "frequency {f}");
        }
    }

    #[test]
    fn two_option_softmax() {
        let draws = 100_000;
        let p0 = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((p0 - 0.8808).abs() < 1e-4);
        let sigma = (p0 * (1.0 - p0) / draws as f64).sqrt();
        let f = frequencies(&[0, 2], 2.0, MechanismSpec::HALF, draws, 3);
        assert!((f[0] - p0).abs() < 3.0 * sigma, "frequency {}", f[0]);
        let probs = exp_mech_probabilities(&[0, 2], budget(2.0), MechanismSpec::HALF).unwrap();
        assert!((probs[0] - p0).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let a = exp_mech_probabilities(&[1, 4, 2], budget(0.7), MechanismSpec::FULL).unwrap();
        let b = exp_mech_probabilities(&[101, 104, 102], budget(0.7), MechanismSpec::FULL).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
        }
        let draws = 100_000;
        let fa = frequencies(&[1, 4, 2], 0.7, MechanismSpec::FULL, draws, 8);
        let fb = frequencies(&[101, 104, 102], 0.7, MechanismSpec::FULL, draws, 9);
        for ((x, y), p) in fa.iter().zip(&fb).zip(&a) {
            let sigma = (2.0 * p * (1.0 - p) / draws as f64).sqrt();
            assert!((x - y).abs() < 4.0 * sigma);
        }
    }

    #[test]
    fn large_epsilon_concentrates_on_argmin() {
        let f = frequencies(&[0, 10], 50.0, MechanismSpec::HALF, 100_000, 4);
        assert!(f[1] < 1e-4);
    }

    #[test]
    fn huge_scores_do_not_overflow() {
        let probs =
            exp_mech_probabilities(&[1_000_000, 1_000_001], budget(1.0), MechanismSpec::FULL).unwrap();
        assert!(probs.iter().all(|p| p.is_finite()));
        let mut rng = RandomSource::new(0).rng();
        let k = exp_mech_sample(&[5_000_000, 5_000_000, 9], budget(100.0), MechanismSpec::FULL, &mut rng)
            .unwrap();
        assert_eq!(k, 2);
    }
}
