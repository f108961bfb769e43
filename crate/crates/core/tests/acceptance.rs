//! Acceptance suite. Each criterion prints one `PASS`/`FAIL` line to stderr
//! (bypassing the test harness's capture) and then asserts. Criteria run one
//! at a time so their wall-clock limits are measured without contention.

use std::collections::HashSet;
use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use dpcolor::audit::{
    audit_graphs, audit_mechanism, make_neighbor_pair, AuditConfig, EdgeRevealingOracle, MechanismId, Projection,
};
use dpcolor::coloring::{color_control, color_unctr, random_coloring};
use dpcolor::graph::{degeneracy_ordering, gen_erdos_renyi};
use dpcolor::harness::{mean_std, run_dataset, run_grid, Algorithm, ExperimentConfig, TrialRecord};
use dpcolor::mech::{exp_mech_sample, laplace_sample};
use dpcolor::metrics::{alg1_bound, alg2_bound, defect_profile};
use dpcolor::{AlgoParams, Graph, MechanismSpec, OrderingMode, PrivacyBudget, RandomSource};
use rand::Rng;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(name: &str, limit: Option<Duration>, body: impl FnOnce() -> Result<String, String>) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let mut outcome = body();
    let elapsed = start.elapsed();
    if let (Ok(detail), Some(limit)) = (&outcome, limit) {
        if elapsed > limit {
            outcome = Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}"));
        }
    }
    let line = match &outcome {
        Ok(detail) => format!("PASS {name}: {detail} [{elapsed:.2?}]"),
        Err(detail) => format!("FAIL {name}: {detail} [{elapsed:.2?}]"),
    };
    let _ = writeln!(std::io::stderr(), "{line}");
    if let Err(detail) = outcome {
        panic!("{name}: {detail}");
    }
}

fn eps(e: f64) -> PrivacyBudget {
    PrivacyBudget::new(e).unwrap()
}

fn check(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Standard error of a difference of two independent sample means.
fn pooled_se(a: &[f64], b: &[f64]) -> f64 {
    let (_, sa) = mean_std(a);
    let (_, sb) = mean_std(b);
    (sa * sa / a.len() as f64 + sb * sb / b.len() as f64).sqrt()
}

fn er_expected_degree(n: usize, degree: f64, seed: u64) -> Graph {
    gen_erdos_renyi(n, degree / (n - 1) as f64, seed).unwrap()
}

// Oracles written directly from the bound formulas.

fn alg1_oracle(n: f64, delta: f64, e: f64, c: f64) -> f64 {
    delta / c + (2.0 / e) * (c.ln() + 2.0 * n.ln())
}

fn alg2_oracle(n: f64, delta: f64, e: f64) -> f64 {
    let (ln_n, ln_d) = (n.ln(), delta.ln());
    let first = ln_n + (ln_d + (ln_d * ln_d + 8.0 * ln_d * ln_n).sqrt()) / 2.0 + ln_d / e + 2.0 * ln_n / e;
    let second = (1.0 + 4.0 / e) * ln_n + (4.0 / e) * ln_d;
    first.max(second) + 6.0 * ln_n / ln_n.ln()
}

#[test]
fn verifier_exactness() {
    criterion("verifier exactness", Some(Duration::from_secs(5)), || {
        let mut rng = RandomSource::new(2024).rng();
        for instance in 0..200 {
            let n = rng.gen_range(1..=200usize);
            let p: f64 = rng.gen_range(0.0..0.3);
            let mut edges = HashSet::new();
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen_bool(p) {
                        edges.insert((u, v));
                    }
                }
            }
            let g = Graph::from_edges(n, edges.iter().copied()).unwrap();
            let palette = rng.gen_range(2..=8);
            let c = random_coloring(&g, palette, &mut rng).unwrap();
            let mut expected = vec![0usize; n];
            for &(u, v) in &edges {
                if c.color(u) == c.color(v) {
                    expected[u] += 1;
                    expected[v] += 1;
                }
            }
            let report = defect_profile(&g, &c).unwrap();
            if report.per_vertex != expected {
                return Err(format!("instance {instance} (n = {n}) differs from the edge scan"));
            }
        }
        Ok("200/200 instances match the edge-scan oracle".into())
    });
}

#[test]
fn exponential_mechanism_distribution() {
    criterion("exponential mechanism distribution", Some(Duration::from_secs(2)), || {
        let draws = 100_000;
        let mut rng = RandomSource::new(7).rng();
        let mut zeros = 0usize;
        for _ in 0..draws {
            if exp_mech_sample(&[0, 2], eps(2.0), MechanismSpec::HALF, &mut rng).unwrap() == 0 {
                zeros += 1;
            }
        }
        let p = 1.0 / (1.0 + (-2.0f64).exp());
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        let observed = zeros as f64 / draws as f64;
        check(
            (observed - p).abs() <= 3.0 * sigma,
            format!("P(0) = {observed:.5}, expected {p:.5} +- {:.5}", 3.0 * sigma),
        )
    });
}

#[test]
fn laplace_tails() {
    criterion("laplace tails", Some(Duration::from_secs(5)), || {
        let draws = 1_000_000;
        let mut rng = RandomSource::new(11).rng();
        let mut beyond = [0usize; 3];
        for _ in 0..draws {
            let x = laplace_sample(1.0, &mut rng).unwrap().abs();
            for (t, count) in beyond.iter_mut().enumerate() {
                if x > (t + 1) as f64 {
                    *count += 1;
                }
            }
        }
        let mut details = Vec::new();
        let mut ok = true;
        for (t, &count) in beyond.iter().enumerate() {
            let t = (t + 1) as f64;
            let p = (-t).exp();
            let se = (p * (1.0 - p) / draws as f64).sqrt();
            let observed = count as f64 / draws as f64;
            ok &= (observed - p).abs() <= 3.0 * se;
            details.push(format!("t={t}: {observed:.5} vs {p:.5}"));
        }
        check(ok, details.join(", "))
    });
}

#[test]
fn privacy_audit() {
    criterion("privacy audit", Some(Duration::from_secs(60)), || {
        let e = 0.5;
        let pair = make_neighbor_pair(4, &[(0, 1), (2, 3)], (1, 2)).unwrap();
        let mut cfg = AuditConfig::new(3, eps(e), 200_000);
        cfg.seed = 31;

        let unctr = audit_mechanism(&MechanismId::Unctr, &pair, &cfg).unwrap();

        // Identical graphs: any gap is sampling noise. The endpoint projection
        // keeps per-outcome counts large enough for the 0.05 tolerance.
        let mut same_cfg = cfg.clone();
        same_cfg.projection = Projection::EndpointColors;
        same_cfg.seed = 32;
        let same = audit_graphs(&MechanismId::Unctr, pair.base(), pair.base(), (1, 2), &same_cfg).unwrap();

        let leaky = audit_mechanism(&EdgeRevealingOracle { edge: (1, 2) }, &pair, &cfg).unwrap();

        let detail = format!(
            "unctr eps_hat = {:.4} (<= {:.2}), identical-graph = {:.4} (<= 0.05), leaky oracle = {:.4} (> 2)",
            unctr.eps_hat,
            2.0 * e + 0.15,
            same.eps_hat,
            leaky.eps_hat
        );
        check(
            !unctr.insufficient_data
                && unctr.eps_hat <= 2.0 * e + 0.15
                && !same.insufficient_data
                && same.eps_hat <= 0.05
                && leaky.eps_hat > 2.0,
            detail,
        )
    });
}

#[test]
fn unctr_bound_check() {
    criterion("unctr bound check", Some(Duration::from_secs(180)), || {
        let (n, e) = (4096, 4.0);
        let g = er_expected_degree(n, 200.0, 1);
        let delta = g.max_degree() as f64;
        let d = degeneracy_ordering(&g).d as f64;
        let mut within = 0;
        let mut slack = f64::INFINITY;
        for trial in 0..30 {
            let params = AlgoParams::new(eps(e), 1000 + trial).with_ordering(OrderingMode::ReverseDegeneracy);
            let out = color_unctr(&g, &params).unwrap();
            let c = out.palette as f64;
            let bound = alg1_bound(n as f64, delta, e, c).unwrap();
            let oracle = alg1_oracle(n as f64, delta, e, c);
            if (bound - oracle).abs() > 1e-9 * oracle {
                return Err(format!("alg1_bound {bound} disagrees with the formula {oracle}"));
            }
            let max = defect_profile(&g, &out.coloring).unwrap().maximum as f64;
            slack = slack.min(bound + d - max);
            if max <= bound + d {
                within += 1;
            }
        }
        check(
            within >= 29,
            format!("{within}/30 trials within alg1 + d (Delta = {delta}, d = {d}, smallest slack {slack:.2})"),
        )
    });
}

#[test]
fn control_bound_check() {
    criterion("control bound check", Some(Duration::from_secs(180)), || {
        let (n, e) = (4096, 4.0);
        let g = er_expected_degree(n, 200.0, 1);
        let delta = g.max_degree() as f64;
        let bound = alg2_bound(n as f64, delta, e).unwrap();
        let oracle = alg2_oracle(n as f64, delta, e);
        if (bound - oracle).abs() > 1e-9 * oracle {
            return Err(format!("alg2_bound {bound} disagrees with the formula {oracle}"));
        }
        let mut within = 0;
        let mut fractions = Vec::new();
        let mut worst = 0usize;
        for trial in 0..30 {
            let params = AlgoParams::new(eps(e), 2000 + trial).with_threshold_scale(1.0);
            let out = color_control(&g, &params).unwrap();
            let max = defect_profile(&g, &out.coloring).unwrap().maximum;
            worst = worst.max(max);
            if max as f64 <= bound {
                within += 1;
            }
            fractions.push(out.recolored.len() as f64 / n as f64);
        }
        let mean_fraction = mean_std(&fractions).0;
        check(
            within >= 29 && mean_fraction <= 4.0 / delta,
            format!(
                "{within}/30 trials within {bound:.2} (worst {worst}); mean recolored fraction {mean_fraction:.5} <= {:.5}",
                4.0 / delta
            ),
        )
    });
}

fn er_2000_config(epsilons: Vec<f64>, algorithms: Vec<Algorithm>) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.datasets.push("er:n=2000,p=0.05002501250625313,seed=5,name=er2000".parse().unwrap());
    cfg.epsilons = epsilons;
    cfg.algorithms = algorithms;
    cfg.trials = 30;
    cfg.seed = 17;
    cfg.timing = false;
    cfg
}

fn avg_defects(records: &[TrialRecord], alg: Algorithm, e: f64) -> Vec<f64> {
    records
        .iter()
        .filter(|r| r.algorithm == alg && r.epsilon == e)
        .map(|r| r.avg_defect)
        .collect()
}

#[test]
fn experimental_ordering() {
    criterion("experimental ordering", Some(Duration::from_secs(120)), || {
        let cfg = er_2000_config(vec![16.0], vec![Algorithm::Greedy, Algorithm::Unctr, Algorithm::Crsv]);
        let spec = &cfg.datasets[0];
        let g = spec.load().unwrap();
        let records = run_dataset(&cfg, spec, &g).unwrap();
        let greedy = avg_defects(&records, Algorithm::Greedy, 16.0);
        let unctr = avg_defects(&records, Algorithm::Unctr, 16.0);
        let crsv = avg_defects(&records, Algorithm::Crsv, 16.0);
        let (mg, mu, mc) = (mean_std(&greedy).0, mean_std(&unctr).0, mean_std(&crsv).0);
        let (se_gu, se_uc) = (pooled_se(&greedy, &unctr), pooled_se(&unctr, &crsv));
        check(
            greedy.len() == 30 && mu - mg > se_gu && mc - mu > se_uc,
            format!("greedy {mg:.4} < unctr {mu:.4} < crsv {mc:.4} (gaps {:.4} > {se_gu:.4}, {:.4} > {se_uc:.4})", mu - mg, mc - mu),
        )
    });
}

#[test]
fn epsilon_trend() {
    criterion("epsilon trend", Some(Duration::from_secs(300)), || {
        let grid: Vec<f64> = (-2..=4).map(|k| 2f64.powi(k)).collect();
        let cfg = er_2000_config(grid.clone(), vec![Algorithm::Unctr]);
        let spec = &cfg.datasets[0];
        let g = spec.load().unwrap();
        let records = run_dataset(&cfg, spec, &g).unwrap();
        let series: Vec<Vec<f64>> = grid.iter().map(|&e| avg_defects(&records, Algorithm::Unctr, e)).collect();
        let means: Vec<f64> = series.iter().map(|s| mean_std(s).0).collect();
        let ok = series
            .windows(2)
            .zip(means.windows(2))
            .all(|(s, m)| m[1] <= m[0] + pooled_se(&s[0], &s[1]));
        check(
            ok,
            format!(
                "means over eps grid: {}",
                means.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>().join(" >= ")
            ),
        )
    });
}

#[test]
fn determinism() {
    criterion("determinism", None, || {
        let mut cfg = ExperimentConfig::default();
        cfg.datasets.push("er:n=400,p=0.03,seed=2".parse().unwrap());
        cfg.datasets.push("ba:n=400,m=4,seed=3".parse().unwrap());
        cfg.timing = false;
        cfg.seed = 99;
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            let mut buf = Vec::new();
            pool.install(|| run_grid(&cfg, &mut buf, true)).unwrap();
            buf
        };
        let (a, b, c) = (run(1), run(1), run(4));
        let rows = a.iter().filter(|&&b| b == b'\n').count() - 1;
        check(
            a == b && a == c && rows == 2 * 4 * 7 * 30,
            format!("{rows} rows, byte-identical across reruns and thread counts"),
        )
    });
}
