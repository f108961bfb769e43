//! Undirected simple graphs with dense vertex ids.

mod generate;
mod io;
mod ordering;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use self::generate::{gen_barabasi_albert, gen_erdos_renyi};
pub use self::io::{dump_edge_list, load_edge_list, parse_edge_list};
pub use self::ordering::{degeneracy_ordering, VertexOrdering};

/// Immutable undirected simple graph stored in compressed sparse row form.
///
/// Vertex ids are `0..n`. Every adjacency list is sorted and the structure is
/// symmetric: `u` is a neighbor of `v` exactly when `v` is a neighbor of `u`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl Graph {
    /// Builds a graph on `n` vertices. Self-loops are dropped and duplicate
    /// edges are merged regardless of orientation.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                continue;
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self::from_sorted_adjacency(adjacency))
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            neighbors: Vec::new(),
        }
    }

    fn from_sorted_adjacency(adjacency: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(adjacency.len() + 1);
        offsets.push(0);
        let total = adjacency.iter().map(Vec::len).sum();
        let mut neighbors = Vec::with_capacity(total);
        for list in adjacency {
            neighbors.extend(list);
            offsets.push(neighbors.len());
        }
        Graph { offsets, neighbors }
    }

    /// Number of vertices.
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of undirected edges.
    pub fn m(&self) -> usize {
        self.neighbors.len() / 2
    }

    /// Sorted neighbor ids of `v`. Panics if `v >= n`.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.neighbors[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n() && v < self.n() && self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Maximum degree, 0 for empty or edgeless graphs.
    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Edges as `(u, v)` pairs with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .copied()
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Checks the structural invariants: sorted duplicate-free lists, no
    /// self-loops, in-range ids and symmetry.
    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.offsets[0] != 0 || *self.offsets.last().unwrap() != self.neighbors.len() {
            return Err(Error::param("offset table does not span the neighbor array"));
        }
        if !self.neighbors.len().is_multiple_of(2) {
            return Err(Error::param("odd total adjacency length"));
        }
        for v in 0..n {
            let list = self.neighbors(v);
            for (i, &u) in list.iter().enumerate() {
                if u >= n {
                    return Err(Error::param(format!("vertex {v} lists out-of-range neighbor {u}")));
                }
                if u == v {
                    return Err(Error::param(format!("self-loop at {v}")));
                }
                if i > 0 && list[i - 1] >= u {
                    return Err(Error::param(format!("adjacency of {v} is not strictly sorted")));
                }
                if self.neighbors(u).binary_search(&v).is_err() {
                    return Err(Error::param(format!("edge ({v}, {u}) is not symmetric")));
                }
            }
        }
        Ok(())
    }
}

/// Mapping between the ids found in a source file and dense vertex ids.
///
/// Dense ids are assigned in order of first appearance.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IdRemap {
    to_dense: HashMap<u64, usize>,
    to_original: Vec<u64>,
}

impl IdRemap {
    pub fn new() -> Self {
        Self::default()
    }

    /// The identity remap over `0..n`.
    pub fn identity(n: usize) -> Self {
        let mut remap = Self::new();
        for id in 0..n as u64 {
            remap.intern(id);
        }
        remap
    }

    /// Returns the dense id for `original`, allocating the next one if unseen.
    pub fn intern(&mut self, original: u64) -> usize {
        let next = self.to_original.len();
        *self.to_dense.entry(original).or_insert_with(|| {
            self.to_original.push(original);
            next
        })
    }

    pub fn dense(&self, original: u64) -> Option<usize> {
        self.to_dense.get(&original).copied()
    }

    pub fn original(&self, dense: usize) -> Option<u64> {
        self.to_original.get(dense).copied()
    }

    pub fn len(&self) -> usize {
        self.to_original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_original.is_empty()
    }

    /// Original ids indexed by dense id.
    pub fn originals(&self) -> &[u64] {
        &self.to_original
    }
}
