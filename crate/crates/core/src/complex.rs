//! Vertex-weighted clique complexes and oriented-simplex bookkeeping.
//!
//! Vertices are 0-indexed. A vertex set is stored as a bit mask whose bit `v`
//! is vertex `v`; when printed as a bit string, vertex 0 is the leftmost
//! character (`[v0,v2,v3]` over five vertices prints as `10110`). Position
//! arguments that the circuit constructions call "the i-th 0" or "the i-th 1"
//! are returned here as plain 0-based vertex indices.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported vertex count (one bit per vertex in a `u64`).
pub const MAX_VERTICES: usize = 64;

/// A set of vertices, one bit per vertex.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VertexSet(pub u64);

impl VertexSet {
    pub const EMPTY: VertexSet = VertexSet(0);

    pub fn from_vertices(vertices: &[usize]) -> Self {
        let mut bits = 0u64;
        for &v in vertices {
            bits |= 1 << v;
        }
        VertexSet(bits)
    }

    pub fn singleton(v: usize) -> Self {
        VertexSet(1 << v)
    }

    pub fn contains(self, v: usize) -> bool {
        v < MAX_VERTICES && self.0 >> v & 1 == 1
    }

    pub fn with(self, v: usize) -> Self {
        VertexSet(self.0 | 1 << v)
    }

    pub fn without(self, v: usize) -> Self {
        VertexSet(self.0 & !(1 << v))
    }

    /// Flip membership of `v` (the X gate on qubit `v`).
    pub fn toggled(self, v: usize) -> Self {
        VertexSet(self.0 ^ 1 << v)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Members in ascending order.
    pub fn vertices(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// Number of members strictly smaller than `v`.
    pub fn count_below(self, v: usize) -> usize {
        let mask = if v >= MAX_VERTICES { u64::MAX } else { (1u64 << v) - 1 };
        (self.0 & mask).count_ones() as usize
    }

    /// Number of members strictly between `a` and `b` (in either order).
    pub fn count_between(self, a: usize, b: usize) -> usize {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if hi == lo {
            return 0;
        }
        self.count_below(hi) - self.count_below(lo + 1)
    }

    pub fn intersection(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & other.0)
    }

    pub fn union(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 | other.0)
    }

    pub fn difference(self, other: VertexSet) -> VertexSet {
        VertexSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: VertexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// The `n`-character bit string, vertex 0 first.
    pub fn bitstring(self, n: usize) -> String {
        (0..n).map(|v| if self.contains(v) { '1' } else { '0' }).collect()
    }

    pub fn parse_bitstring(s: &str) -> Result<Self> {
        let mut set = VertexSet::EMPTY;
        for (v, c) in s.chars().enumerate() {
            match c {
                '1' => set = set.with(v),
                '0' => {}
                _ => return Err(Error::InvalidArgument(format!("bad bit string {s:?}"))),
            }
        }
        Ok(set)
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Lexicographic comparison of the ascending vertex lists.
fn lex_cmp(a: VertexSet, b: VertexSet) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

/// On-disk graph description.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Simple undirected graph with a positive weight on every vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexWeightedGraph {
    n: usize,
    neighbors: Vec<VertexSet>,
    weights: Vec<f64>,
}

impl VertexWeightedGraph {
    pub fn new(n: usize, edges: &[[usize; 2]], weights: Option<Vec<f64>>) -> Result<Self> {
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::InvalidGraph(format!("vertex count {n} not in 1..={MAX_VERTICES}")));
        }
        let mut neighbors = vec![VertexSet::EMPTY; n];
        for &[u, v] in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("edge [{u},{v}] out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self loop at {u}")));
            }
            neighbors[u] = neighbors[u].with(v);
            neighbors[v] = neighbors[v].with(u);
        }
        let weights = weights.unwrap_or_else(|| vec![1.0; n]);
        Self::check_weights(n, &weights)?;
        Ok(Self { n, neighbors, weights })
    }

    /// Build from a dense boolean adjacency matrix.
    pub fn from_adjacency(adjacency: &[Vec<bool>], weights: Option<Vec<f64>>) -> Result<Self> {
        let n = adjacency.len();
        let mut edges = Vec::new();
        for (u, row) in adjacency.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGraph("adjacency matrix is not square".into()));
            }
            if row[u] {
                return Err(Error::InvalidGraph(format!("self loop at {u}")));
            }
            for v in 0..n {
                if row[v] != adjacency[v][u] {
                    return Err(Error::InvalidGraph(format!("adjacency not symmetric at ({u},{v})")));
                }
                if row[v] && u < v {
                    edges.push([u, v]);
                }
            }
        }
        Self::new(n, &edges, weights)
    }

    fn check_weights(n: usize, weights: &[f64]) -> Result<()> {
        if weights.len() != n {
            return Err(Error::InvalidGraph(format!("{} weights for {n} vertices", weights.len())));
        }
        if let Some((v, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidGraph(format!("weight of vertex {v} is {w}, must be positive")));
        }
        Ok(())
    }

    pub fn from_file(file: &GraphFile) -> Result<Self> {
        Self::new(file.n, &file.edges, file.weights.clone())
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(json)?;
        Self::from_file(&file)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_file(&self) -> GraphFile {
        let all_unit = self.weights.iter().all(|&w| w == 1.0);
        GraphFile {
            n: self.n,
            edges: self.edges(),
            weights: if all_unit { None } else { Some(self.weights.clone()) },
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.neighbors[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> VertexSet {
        self.neighbors[v]
    }

    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut edges = Vec::new();
        for u in 0..self.n {
            for v in self.neighbors[u].iter().filter(|&v| v > u) {
                edges.push([u, v]);
            }
        }
        edges
    }

    /// Pairwise clique check over the members of `set`.
    pub fn is_clique(&self, set: VertexSet) -> bool {
        let members = set.vertices();
        for (a, &u) in members.iter().enumerate() {
            for &v in &members[a + 1..] {
                if !self.is_adjacent(u, v) {
                    return false;
                }
            }
        }
        true
    }

    /// Every edge of `self` is an edge of `other` (same vertex count).
    pub fn is_subgraph_of(&self, other: &VertexWeightedGraph) -> bool {
        self.n == other.n
            && (0..self.n).all(|v| self.neighbors[v].is_subset(other.neighbors[v]))
    }
}

/// Clique complex of a vertex-weighted graph, enumerated up to `k_max`.
///
/// Simplices above `k_max` are treated as absent, so a complete graph on four
/// vertices with `k_max = 2` is the hollow tetrahedron.
#[derive(Clone, Debug)]
pub struct CliqueComplex {
    graph: VertexWeightedGraph,
    k_max: usize,
    bases: Vec<Vec<VertexSet>>,
    index: Vec<HashMap<VertexSet, usize>>,
}

impl CliqueComplex {
    pub fn build(graph: VertexWeightedGraph, k_max: usize) -> Result<Self> {
        let n = graph.n();
        if k_max > n - 1 {
            return Err(Error::DimensionOutOfRange { k: k_max, min: 0, max: n - 1 });
        }
        let mut bases: Vec<Vec<VertexSet>> = vec![(0..n).map(VertexSet::singleton).collect()];
        for k in 1..=k_max {
            let mut level = Vec::new();
            for &face in &bases[k - 1] {
                let top = face.iter().last().expect("non-empty simplex");
                for v in top + 1..n {
                    if face.iter().all(|u| graph.is_adjacent(u, v)) {
                        level.push(face.with(v));
                    }
                }
            }
            // extension by larger vertices preserves lexicographic order
            debug_assert!(level.windows(2).all(|w| lex_cmp(w[0], w[1]).is_lt()));
            bases.push(level);
        }
        let index = bases
            .iter()
            .map(|b| b.iter().enumerate().map(|(i, &s)| (s, i)).collect())
            .collect();
        Ok(Self { graph, k_max, bases, index })
    }

    pub fn graph(&self) -> &VertexWeightedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    /// `n_k`, zero above `k_max`.
    pub fn count(&self, k: usize) -> usize {
        self.bases.get(k).map_or(0, Vec::len)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.bases.iter().map(Vec::len).collect()
    }

    /// Positively oriented `k`-simplices in lexicographic order.
    pub fn basis(&self, k: usize) -> &[VertexSet] {
        self.bases.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, simplex: VertexSet) -> Option<usize> {
        let k = simplex.len().checked_sub(1)?;
        self.index.get(k)?.get(&simplex).copied()
    }

    pub fn contains(&self, simplex: VertexSet) -> bool {
        !simplex.is_empty()
            && simplex.len() - 1 <= self.k_max
            && simplex.0 >> self.n() == 0
            && self.graph.is_clique(simplex)
    }

    /// The membership bit `f(x)`: 0 when `x` is a simplex, 1 otherwise.
    pub fn membership(&self, x: VertexSet) -> u8 {
        u8::from(!self.contains(x))
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.graph.weight(v)
    }

    /// `w(σ)`, the product of vertex weights.
    pub fn simplex_weight(&self, simplex: VertexSet) -> f64 {
        simplex.iter().map(|v| self.weight(v)).product()
    }

    /// Vertices `u` such that `σ ∪ {u}` is a simplex.
    pub fn up_vertices(&self, simplex: VertexSet) -> Vec<usize> {
        (0..self.n())
            .filter(|&u| !simplex.contains(u) && self.contains(simplex.with(u)))
            .collect()
    }

    /// Number of cofaces of `σ`.
    pub fn degree(&self, simplex: VertexSet) -> usize {
        self.up_vertices(simplex).len()
    }

    pub fn check_dimension(&self, k: usize, min: usize, max: usize) -> Result<()> {
        if k < min || k > max {
            Err(Error::DimensionOutOfRange { k, min, max })
        } else {
            Ok(())
        }
    }

    /// Every simplex of `self` up to `k` lies in `other`, with equal weights.
    pub fn is_subcomplex_of(&self, other: &CliqueComplex, k: usize) -> bool {
        self.n() == other.n()
            && self.graph.weights() == other.graph.weights()
            && (0..=k.min(self.k_max)).all(|d| self.basis(d).iter().all(|&s| other.contains(s)))
    }
}

/// An oriented simplex: the vertex set plus an orientation relative to the
/// ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OrientedSimplex {
    pub vertices: VertexSet,
    pub negative: bool,
}

impl OrientedSimplex {
    pub fn positive(vertices: VertexSet) -> Self {
        Self { vertices, negative: false }
    }

    /// Orientation of an explicit vertex ordering: negative iff the sorting
    /// permutation is odd.
    pub fn from_sequence(sequence: &[usize]) -> Result<Self> {
        let set = VertexSet::from_vertices(sequence);
        if set.len() != sequence.len() || sequence.is_empty() {
            return Err(Error::InvalidArgument(format!("{sequence:?} is not a list of distinct vertices")));
        }
        let inversions = sequence
            .iter()
            .enumerate()
            .map(|(i, a)| sequence[i + 1..].iter().filter(|b| *b < a).count())
            .sum::<usize>();
        Ok(Self { vertices: set, negative: inversions % 2 == 1 })
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn opposite(self) -> Self {
        Self { negative: !self.negative, ..self }
    }

    /// A vertex ordering with this orientation.
    pub fn sequence(&self) -> Vec<usize> {
        let mut seq = self.vertices.vertices();
        if self.negative && seq.len() >= 2 {
            seq.swap(0, 1);
        }
        seq
    }

    /// Orientation induced on the face obtained by removing `v`.
    pub fn face(&self, v: usize) -> OrientedSimplex {
        let flip = self.vertices.count_below(v) % 2 == 1;
        OrientedSimplex { vertices: self.vertices.without(v), negative: self.negative ^ flip }
    }

    /// Orientation of the coface `σ ∪ {u}` whose boundary contains `σ` with a
    /// plus sign.
    pub fn coface(&self, u: usize) -> OrientedSimplex {
        let flip = self.vertices.count_below(u) % 2 == 1;
        OrientedSimplex { vertices: self.vertices.with(u), negative: self.negative ^ flip }
    }
}

impl fmt::Display for OrientedSimplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let seq: Vec<String> = self.sequence().iter().map(|v| v.to_string()).collect();
        write!(f, "[{}]", seq.join(","))
    }
}

/// A state of the walk: an oriented simplex or the absorbing state Θ.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum WalkState {
    Simplex(OrientedSimplex),
    Absorbing,
}

/// Computational-basis label `|x, s, θ⟩` of a walk register.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct OrientedSimplexLabel {
    pub x: VertexSet,
    pub s: bool,
    pub theta: bool,
}

impl OrientedSimplexLabel {
    /// `|0ⁿ,0,0⟩`, the blank register.
    pub const ZERO: Self = Self { x: VertexSet::EMPTY, s: false, theta: false };
    /// `|0ⁿ,0,1⟩`.
    pub const ABSORBING: Self = Self { x: VertexSet::EMPTY, s: false, theta: true };

    pub fn simplex(simplex: OrientedSimplex) -> Self {
        Self { x: simplex.vertices, s: simplex.negative, theta: false }
    }

    pub fn is_absorbing(&self) -> bool {
        *self == Self::ABSORBING
    }

    /// Label with the orientation bit flipped.
    pub fn flipped(self) -> Self {
        Self { s: !self.s, ..self }
    }

    /// Whether this is a well-formed element of `S_k`.
    pub fn is_valid(&self, k: usize) -> bool {
        if self.theta {
            self.x.is_empty() && !self.s
        } else {
            self.x.len() == k + 1
        }
    }

    pub fn render(&self, n: usize) -> String {
        format!("({}, {}, {})", self.x.bitstring(n), u8::from(self.s), u8::from(self.theta))
    }
}

pub fn encode_label(complex: &CliqueComplex, state: &WalkState) -> Result<OrientedSimplexLabel> {
    match state {
        WalkState::Absorbing => Ok(OrientedSimplexLabel::ABSORBING),
        WalkState::Simplex(s) => {
            if !complex.contains(s.vertices) {
                return Err(Error::NotASimplex(s.vertices.bitstring(complex.n())));
            }
            Ok(OrientedSimplexLabel::simplex(*s))
        }
    }
}

pub fn decode_label(complex: &CliqueComplex, label: OrientedSimplexLabel, k: usize) -> Result<WalkState> {
    if !label.is_valid(k) {
        return Err(Error::InvalidArgument(format!("{} is not a label of S_{k}", label.render(complex.n()))));
    }
    if label.theta {
        return Ok(WalkState::Absorbing);
    }
    if !complex.contains(label.x) {
        return Err(Error::NotASimplex(label.x.bitstring(complex.n())));
    }
    Ok(WalkState::Simplex(OrientedSimplex { vertices: label.x, negative: label.s }))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Relation {
    Similar,
    Dissimilar,
    None,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct AdjacencyVerdict {
    pub up: Relation,
    pub down: Relation,
}

/// Up- and down-adjacency of two oriented `k`-simplices, with orientation
/// similarity read off the induced orientations of the shared coface/face.
pub fn adjacency(complex: &CliqueComplex, a: &OrientedSimplex, b: &OrientedSimplex) -> AdjacencyVerdict {
    let none = AdjacencyVerdict { up: Relation::None, down: Relation::None };
    if a.vertices == b.vertices || a.vertices.len() != b.vertices.len() {
        return none;
    }
    let k = a.dimension();
    let common = a.vertices.intersection(b.vertices);
    if common.len() != k {
        return none;
    }
    let only_a = a.vertices.difference(common).iter().next().expect("one vertex");
    let only_b = b.vertices.difference(common).iter().next().expect("one vertex");
    let relate = |same: bool| if same { Relation::Similar } else { Relation::Dissimilar };

    let down = if k == 0 {
        Relation::None
    } else {
        relate(a.face(only_a).negative == b.face(only_b).negative)
    };
    let coface = a.vertices.union(b.vertices);
    let up = if complex.contains(coface) {
        relate(a.coface(only_b).negative == b.coface(only_a).negative)
    } else {
        Relation::None
    };
    AdjacencyVerdict { up, down }
}

/// Orientation flip when exchanging `v_out ∈ x` for `v_in ∉ x` through the
/// common face: the parity of members strictly between the two vertices.
pub fn relative_down_orientation(x: VertexSet, v_out: usize, v_in: usize) -> Result<bool> {
    if v_out == v_in {
        return Err(Error::InvalidArgument("v_out and v_in coincide".into()));
    }
    if !x.contains(v_out) || x.contains(v_in) {
        return Err(Error::InvalidArgument(format!(
            "need vertex {v_out} in and {v_in} out of {x}"
        )));
    }
    Ok(x.count_between(v_out, v_in) % 2 == 1)
}

/// Per-simplex positions, neighbors and weight products used by the walk
/// circuits.
#[derive(Clone, Debug)]
pub struct LocalIndices {
    /// Vertices not in σ, ascending (`n-k-1` of them).
    pub zero_positions: Vec<usize>,
    /// Vertices of σ, ascending (`k+1` of them).
    pub one_positions: Vec<usize>,
    /// `x↑(i)`: σ with its i-th absent vertex added.
    pub cofaces: Vec<VertexSet>,
    /// `x↓(i)`: σ with its i-th vertex removed.
    pub faces: Vec<VertexSet>,
    /// `w↑↓(i,j) = w(i-th zero) · w(j-th vertex of x↑(i))`.
    pub updown_weights: Vec<Vec<f64>>,
    /// `w↓↑(i,j) = w(i-th vertex) · w(j-th absent vertex of x↓(i))`.
    pub downup_weights: Vec<Vec<f64>>,
}

pub fn coface_and_face_indices(complex: &CliqueComplex, simplex: VertexSet) -> LocalIndices {
    let n = complex.n();
    let w = |v: usize| complex.weight(v);
    let zero_positions: Vec<usize> = (0..n).filter(|&v| !simplex.contains(v)).collect();
    let one_positions = simplex.vertices();
    let cofaces: Vec<VertexSet> = zero_positions.iter().map(|&u| simplex.toggled(u)).collect();
    let faces: Vec<VertexSet> = one_positions.iter().map(|&v| simplex.toggled(v)).collect();
    let updown_weights = zero_positions
        .iter()
        .zip(&cofaces)
        .map(|(&u, c)| c.iter().map(|v| w(u) * w(v)).collect())
        .collect();
    let downup_weights = one_positions
        .iter()
        .zip(&faces)
        .map(|(&v, f)| (0..n).filter(|&u| !f.contains(u)).map(|u| w(v) * w(u)).collect())
        .collect();
    LocalIndices { zero_positions, one_positions, cofaces, faces, updown_weights, downup_weights }
}
