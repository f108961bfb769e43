use std::collections::BTreeSet;

use super::Graph;

/// A vertex ordering together with its inductivity: every vertex has at most
/// `d` neighbors earlier in `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexOrdering {
    pub order: Vec<usize>,
    pub d: usize,
}

impl VertexOrdering {
    /// Largest number of earlier neighbors any vertex has in `order`.
    pub fn back_degree(g: &Graph, order: &[usize]) -> usize {
        let mut position = vec![usize::MAX; g.n()];
        for (i, &v) in order.iter().enumerate() {
            position[v] = i;
        }
        order
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&u| position[u] < position[v])
                    .count()
            })
            .max()
            .unwrap_or(0)
    }
}

/// Degeneracy ordering by minimum-degree peeling, ties broken by lowest id.
///
/// The returned `order` is the reverse of the peeling sequence, so each vertex
/// has at most `d` earlier neighbors, where `d` is the graph's degeneracy.
/// Iterating `order` backwards visits vertices in peeling order.
pub fn degeneracy_ordering(g: &Graph) -> VertexOrdering {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|v| (degree[v], v)).collect();
    let mut peeled = Vec::with_capacity(n);
    let mut d = 0;
    while let Some((deg, v)) = queue.pop_first() {
        d = d.max(deg);
        removed[v] = true;
        peeled.push(v);
        for &u in g.neighbors(v) {
            if !removed[u] {
                queue.remove(&(degree[u], u));
                degree[u] -= 1;
                queue.insert((degree[u], u));
            }
        }
    }
    peeled.reverse();
    VertexOrdering { order: peeled, d }
}
