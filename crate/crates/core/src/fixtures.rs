//! Small named complexes used by tests, examples and the CLI.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{CliqueComplex, VertexWeightedGraph};

fn all_pairs(n: usize) -> Vec<[usize; 2]> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| [u, v])).collect()
}

pub fn complete_graph(n: usize) -> VertexWeightedGraph {
    VertexWeightedGraph::new(n, &all_pairs(n), None).expect("valid graph")
}

pub fn cycle_graph(n: usize) -> VertexWeightedGraph {
    let edges: Vec<[usize; 2]> = (0..n).map(|v| [v, (v + 1) % n]).collect();
    VertexWeightedGraph::new(n, &edges, None).expect("valid graph")
}

/// Clique complex of `K_n`, truncated at `k_max` (capped at `n-1`).
pub fn complete(n: usize, k_max: usize) -> CliqueComplex {
    CliqueComplex::build(complete_graph(n), k_max.min(n - 1)).expect("valid complex")
}

pub fn cycle(n: usize, k_max: usize) -> CliqueComplex {
    CliqueComplex::build(cycle_graph(n), k_max.min(n - 1)).expect("valid complex")
}

/// Boundary of the tetrahedron: `K_4` without its 3-simplex.
pub fn tetrahedron_boundary() -> CliqueComplex {
    complete(4, 2)
}

/// `C_n` plus the chord `{0, 2}`.
pub fn cycle_with_chord(n: usize, k_max: usize) -> CliqueComplex {
    let mut edges: Vec<[usize; 2]> = (0..n).map(|v| [v, (v + 1) % n]).collect();
    edges.push([0, 2]);
    let g = VertexWeightedGraph::new(n, &edges, None).expect("valid graph");
    CliqueComplex::build(g, k_max.min(n - 1)).expect("valid complex")
}

/// Disjoint union, with the vertices of `b` shifted past those of `a`.
pub fn disjoint_union(a: &VertexWeightedGraph, b: &VertexWeightedGraph) -> VertexWeightedGraph {
    let shift = a.n();
    let mut edges = a.edges();
    edges.extend(b.edges().iter().map(|[u, v]| [u + shift, v + shift]));
    let weights = a.weights().iter().chain(b.weights()).copied().collect();
    VertexWeightedGraph::new(shift + b.n(), &edges, Some(weights)).expect("valid graph")
}

/// Same graph with new vertex weights.
pub fn reweighted(g: &VertexWeightedGraph, weights: Vec<f64>) -> VertexWeightedGraph {
    VertexWeightedGraph::new(g.n(), &g.edges(), Some(weights)).expect("valid weights")
}

/// Erdős–Rényi graph with uniform weights in `weight_range`.
pub fn random_graph(seed: u64, n: usize, edge_prob: f64, weight_range: (f64, f64)) -> VertexWeightedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges: Vec<[usize; 2]> = all_pairs(n).into_iter().filter(|_| rng.random_bool(edge_prob)).collect();
    let weights = (0..n).map(|_| rng.random_range(weight_range.0..=weight_range.1)).collect();
    VertexWeightedGraph::new(n, &edges, Some(weights)).expect("valid graph")
}

/// Graph whose edges are selected by the low bits of `mask`, pairs in
/// lexicographic order.
pub fn graph_from_mask(n: usize, mask: u64, weights: Option<Vec<f64>>) -> VertexWeightedGraph {
    let edges: Vec<[usize; 2]> =
        all_pairs(n).into_iter().enumerate().filter(|(i, _)| mask >> (i % 64) & 1 == 1).map(|(_, e)| e).collect();
    VertexWeightedGraph::new(n, &edges, weights).expect("valid graph")
}
