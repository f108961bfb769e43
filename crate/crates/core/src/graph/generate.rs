use rand::Rng;

use super::Graph;
use crate::error::{Error, Result};
use crate::mech::RandomSource;

/// Erdős–Rényi `G(n, p)`: every unordered pair is an edge independently with
/// probability `p`.
///
/// Uses geometric skipping over the pair sequence, so the cost is linear in
/// `n + m` rather than in the number of pairs.
pub fn gen_erdos_renyi(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} is outside [0, 1]")));
    }
    let mut edges = Vec::new();
    if p == 1.0 {
        edges.extend((0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))));
    } else if p > 0.0 {
        let mut rng = RandomSource::new(seed).rng();
        let log_q = (1.0 - p).ln();
        // Pairs are enumerated as (v, w) with w < v, row by row.
        let mut v: usize = 1;
        let mut w: i64 = -1;
        while v < n {
            let r: f64 = rng.gen();
            let skip = ((1.0 - r).ln() / log_q).floor();
            w += 1 + skip.min(i64::MAX as f64 / 2.0) as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

/// Barabási–Albert preferential attachment.
///
/// The seed set is `m_attach` isolated vertices. Vertex `m_attach` connects to
/// all of them; every later vertex picks `m_attach` distinct existing targets
/// with probability proportional to their current degree.
pub fn gen_barabasi_albert(n: usize, m_attach: usize, seed: u64) -> Result<Graph> {
    if m_attach == 0 || m_attach >= n {
        return Err(Error::param(format!(
            "attachment count {m_attach} must satisfy 1 <= m < n = {n}"
        )));
    }
    let mut rng = RandomSource::new(seed).rng();
    let mut edges = Vec::with_capacity((n - m_attach) * m_attach);
    // Each vertex appears once per incident edge end.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (n - m_attach) * m_attach);
    let mut targets: Vec<usize> = (0..m_attach).collect();
    for source in m_attach..n {
        for &t in &targets {
            edges.push((source, t));
            endpoints.push(source);
            endpoints.push(t);
        }
        targets.clear();
        while targets.len() < m_attach {
            let candidate = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&candidate) {
                targets.push(candidate);
            }
        }
    }
    Graph::from_edges(n, edges)
}
