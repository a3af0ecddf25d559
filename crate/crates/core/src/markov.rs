//! Classical walks on oriented simplices with an absorbing state.
//!
//! States of `S_k` are indexed as: positively oriented simplices `0..n_k` in
//! basis order, then their negatives `n_k..2n_k`, then `Θ` at `2n_k`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{adjacency, CliqueComplex, OrientedSimplex, OrientedSimplexLabel, Relation, VertexSet};
use crate::error::{Error, Result};

/// Tolerance for stochasticity checks.
pub const STOCHASTIC_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WalkKind {
    Up,
    Down,
    Harmonic,
}

impl WalkKind {
    pub const ALL: [WalkKind; 3] = [WalkKind::Up, WalkKind::Down, WalkKind::Harmonic];
}

impl fmt::Display for WalkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WalkKind::Up => "up",
            WalkKind::Down => "down",
            WalkKind::Harmonic => "harmonic",
        })
    }
}

impl FromStr for WalkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "up" => Ok(WalkKind::Up),
            "down" => Ok(WalkKind::Down),
            "harmonic" => Ok(WalkKind::Harmonic),
            _ => Err(Error::InvalidArgument(format!("unknown walk kind {s:?}"))),
        }
    }
}

/// The two literature walks used for the expectation-process comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum AppendixKind {
    /// Lazy up walk moving to neighbours oriented like `σ̄`.
    UpPs17,
    /// Lazy down walk with an absorbing state.
    DownM16,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ChainKind {
    Walk(WalkKind),
    Appendix(AppendixKind),
}

/// Index bookkeeping for `S_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateSpace {
    pub n_k: usize,
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        2 * self.n_k + 1
    }

    pub fn theta(&self) -> usize {
        2 * self.n_k
    }

    pub fn index(&self, basis_index: usize, negative: bool) -> usize {
        basis_index + if negative { self.n_k } else { 0 }
    }

    /// `σ ↦ σ̄`, fixing `Θ`.
    pub fn flip(&self, state: usize) -> usize {
        match state {
            s if s < self.n_k => s + self.n_k,
            s if s < 2 * self.n_k => s - self.n_k,
            s => s,
        }
    }

    pub fn label(&self, complex: &CliqueComplex, k: usize, state: usize) -> OrientedSimplexLabel {
        if state == self.theta() {
            OrientedSimplexLabel::ABSORBING
        } else {
            let x = complex.basis(k)[state % self.n_k];
            OrientedSimplexLabel { x, s: state >= self.n_k, theta: false }
        }
    }

    pub fn state_of(&self, complex: &CliqueComplex, label: OrientedSimplexLabel) -> Option<usize> {
        if label.is_absorbing() {
            return Some(self.theta());
        }
        let i = complex.index_of(label.x)?;
        (i < self.n_k && !label.theta).then(|| self.index(i, label.s))
    }
}

/// Row-stochastic matrix on `S_k`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub kind: ChainKind,
    pub k: usize,
    pub space: StateSpace,
    pub entries: DMatrix<f64>,
    /// `K` for the Laplacian walks, `1` for the appendix walks.
    pub normalization: f64,
    /// Absorbing probability of each positively oriented simplex.
    pub eta: Vec<f64>,
}

impl TransitionMatrix {
    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Restriction to `X±_k` (drops the `Θ` row and column).
    pub fn simplex_block(&self) -> DMatrix<f64> {
        let m = 2 * self.space.n_k;
        self.entries.view((0, 0), (m, m)).into_owned()
    }

    /// Nonzero entries of one row.
    pub fn row_entries(&self, row: usize) -> Vec<(usize, f64)> {
        (0..self.dim()).filter(|&c| self.entries[(row, c)] != 0.0).map(|c| (c, self.entries[(row, c)])).collect()
    }

    fn finish(kind: ChainKind, k: usize, space: StateSpace, mut entries: DMatrix<f64>, normalization: f64) -> Result<Self> {
        let theta = space.theta();
        let mut eta = vec![0.0; space.n_k];
        for row in 0..2 * space.n_k {
            let mass: f64 = entries.row(row).iter().sum();
            let rest = 1.0 - mass;
            if rest < -STOCHASTIC_TOL {
                return Err(Error::NegativeProbability { row, value: rest });
            }
            entries[(row, theta)] = rest.max(0.0);
            if row < space.n_k {
                eta[row] = rest.max(0.0);
            }
        }
        entries[(theta, theta)] = 1.0;
        Ok(Self { kind, k, space, entries, normalization, eta })
    }
}

fn check_walk_dimension(complex: &CliqueComplex, k: usize) -> Result<()> {
    complex.check_dimension(k, 1, complex.k_max())?;
    if complex.count(k) == 0 {
        return Err(Error::EmptyDimension { k });
    }
    Ok(())
}

/// `K^up`, `K^down` or the harmonic `K`: the largest per-simplex weight sum
/// bounding that row's Laplacian mass.
pub fn normalization_constant(complex: &CliqueComplex, k: usize, kind: WalkKind) -> Result<f64> {
    check_walk_dimension(complex, k)?;
    let n = complex.n();
    let w = |v: usize| complex.weight(v);
    let total_sq: f64 = (0..n).map(|v| w(v).powi(2)).sum();
    let per_simplex = |sigma: VertexSet| -> f64 {
        let zeros = (0..n).filter(|&u| !sigma.contains(u));
        match kind {
            WalkKind::Up => zeros.map(|u| sigma.with(u).iter().map(|v| w(u) * w(v)).sum::<f64>()).sum(),
            WalkKind::Down => sigma
                .iter()
                .map(|v| (0..n).filter(|&u| !sigma.without(v).contains(u)).map(|u| w(v) * w(u)).sum::<f64>())
                .sum(),
            WalkKind::Harmonic => total_sq + zeros.map(|u| sigma.iter().map(|v| w(u) * w(v)).sum::<f64>()).sum::<f64>(),
        }
    };
    Ok(complex.basis(k).iter().map(|&s| per_simplex(s)).fold(0.0, f64::max))
}

/// Transition matrix of the up, down or harmonic walk, built by enumerating
/// neighbours. Lateral moves carry `w(u)w(v)/K` towards the orientation that
/// makes the pair similar; the diagonal carries the Laplacian's diagonal over
/// `K`; the remainder is absorbed.
pub fn transition_matrix(complex: &CliqueComplex, k: usize, kind: WalkKind) -> Result<TransitionMatrix> {
    let big_k = normalization_constant(complex, k, kind)?;
    let space = StateSpace { n_k: complex.count(k) };
    let mut entries = DMatrix::zeros(space.dim(), space.dim());
    let w = |v: usize| complex.weight(v);
    for (a, &sigma) in complex.basis(k).iter().enumerate() {
        let up_mass: f64 = complex.up_vertices(sigma).iter().map(|&u| w(u).powi(2)).sum();
        let down_mass: f64 = sigma.iter().map(|v| w(v).powi(2)).sum();
        let stay = match kind {
            WalkKind::Up => up_mass,
            WalkKind::Down => down_mass,
            WalkKind::Harmonic => up_mass + down_mass,
        } / big_k;
        for neg in [false, true] {
            entries[(space.index(a, neg), space.index(a, neg))] = stay;
        }
        for v in sigma.iter() {
            for u in (0..complex.n()).filter(|&u| !sigma.contains(u)) {
                let other = sigma.without(v).with(u);
                let Some(b) = complex.index_of(other) else { continue };
                let verdict = adjacency(complex, &OrientedSimplex::positive(sigma), &OrientedSimplex::positive(other));
                let relation = match kind {
                    WalkKind::Up => verdict.up,
                    WalkKind::Down => verdict.down,
                    WalkKind::Harmonic if verdict.up == Relation::None => verdict.down,
                    WalkKind::Harmonic => Relation::None,
                };
                let flip = match relation {
                    Relation::Similar => false,
                    Relation::Dissimilar => true,
                    Relation::None => continue,
                };
                let p = w(u) * w(v) / big_k;
                for neg in [false, true] {
                    entries[(space.index(a, neg), space.index(b, neg ^ flip))] = p;
                }
            }
        }
    }
    TransitionMatrix::finish(ChainKind::Walk(kind), k, space, entries, big_k)
}

/// Largest `(k-1)`-degree: the most `k`-simplices sharing one face.
pub fn max_face_degree(complex: &CliqueComplex, k: usize) -> usize {
    if k == 0 {
        return 0;
    }
    complex.basis(k - 1).iter().map(|&f| complex.degree(f)).max().unwrap_or(0)
}

/// The literature walks used for the expectation-process comparison. Vertex
/// weights are ignored.
///
/// `UpPs17`: stay with probability `p`, otherwise move uniformly to one of
/// the `(k+1)·deg(σ)` simplices `σ'` with `σ' ∼↑ σ̄`.
///
/// `DownM16`: stay with probability `p`, move to each `σ'` with `σ' ∼↓ σ̄`
/// with probability `(1-p)/((M-1)(k+1))`, absorb the rest.
pub fn appendix_walk_matrix(complex: &CliqueComplex, k: usize, kind: AppendixKind, p: f64) -> Result<TransitionMatrix> {
    check_walk_dimension(complex, k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("laziness {p} not in [0,1]")));
    }
    let space = StateSpace { n_k: complex.count(k) };
    let mut entries = DMatrix::zeros(space.dim(), space.dim());
    let big_m = max_face_degree(complex, k);
    for (a, &sigma) in complex.basis(k).iter().enumerate() {
        let deg = complex.degree(sigma);
        let lateral = match kind {
            AppendixKind::UpPs17 => {
                if deg == 0 {
                    return Err(Error::DegreeZero(sigma.bitstring(complex.n())));
                }
                (1.0 - p) / ((k + 1) * deg) as f64
            }
            AppendixKind::DownM16 if big_m > 1 => (1.0 - p) / ((big_m - 1) * (k + 1)) as f64,
            AppendixKind::DownM16 => 0.0,
        };
        for neg in [false, true] {
            entries[(space.index(a, neg), space.index(a, neg))] = p;
        }
        for v in sigma.iter() {
            for u in (0..complex.n()).filter(|&u| !sigma.contains(u)) {
                let other = sigma.without(v).with(u);
                let Some(b) = complex.index_of(other) else { continue };
                let verdict = adjacency(complex, &OrientedSimplex::positive(sigma), &OrientedSimplex::positive(other));
                let relation = match kind {
                    AppendixKind::UpPs17 => verdict.up,
                    AppendixKind::DownM16 => verdict.down,
                };
                // σ' ∼ σ̄ means σ' is dissimilar to σ
                let flip = match relation {
                    Relation::Similar => true,
                    Relation::Dissimilar => false,
                    Relation::None => continue,
                };
                for neg in [false, true] {
                    entries[(space.index(a, neg), space.index(b, neg ^ flip))] = lateral;
                }
            }
        }
    }
    TransitionMatrix::finish(ChainKind::Appendix(kind), k, space, entries, 1.0)
}

fn check_distribution(start: &DVector<f64>, dim: usize) -> Result<()> {
    if start.len() != dim {
        return Err(Error::InvalidArgument(format!("distribution has length {}, expected {dim}", start.len())));
    }
    if let Some((row, &value)) = start.iter().enumerate().find(|(_, x)| **x < 0.0) {
        return Err(Error::NegativeProbability { row, value });
    }
    let total = start.sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    Ok(())
}

/// Distributions `start·Pᵗ` for `t = 0..=steps`.
pub fn evolve_trajectory(chain: &TransitionMatrix, start: &DVector<f64>, steps: usize) -> Result<Vec<DVector<f64>>> {
    check_distribution(start, chain.dim())?;
    let pt = chain.entries.transpose();
    let mut out = Vec::with_capacity(steps + 1);
    let mut current = start.clone();
    out.push(current.clone());
    for _ in 0..steps {
        current = &pt * current;
        out.push(current.clone());
    }
    Ok(out)
}

pub fn evolve_distribution(chain: &TransitionMatrix, start: &DVector<f64>, steps: usize) -> Result<DVector<f64>> {
    Ok(evolve_trajectory(chain, start, steps)?.pop().expect("non-empty trajectory"))
}

/// Empirical distribution after `steps` over `trials` seeded trajectories.
pub fn evolve_monte_carlo(
    chain: &TransitionMatrix,
    start: &DVector<f64>,
    steps: usize,
    trials: usize,
    seed: u64,
) -> Result<DVector<f64>> {
    check_distribution(start, chain.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = WeightedIndex::new(start.iter().copied()).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let rows: Vec<WeightedIndex<f64>> = (0..chain.dim())
        .map(|r| WeightedIndex::new(chain.entries.row(r).iter().copied()).expect("stochastic row"))
        .collect();
    let mut counts = DVector::zeros(chain.dim());
    for _ in 0..trials {
        let mut state = initial.sample(&mut rng);
        for _ in 0..steps {
            state = rows[state].sample(&mut rng);
        }
        counts[state] += 1.0;
    }
    Ok(counts / trials as f64)
}

/// The Table-2 style normalization factor per step: `(k+1)/(pk+1)` for the
/// up walk and `(M-1)/(p(M-2)+1)` for the down walk.
pub fn table2_scaling(kind: AppendixKind, k: usize, p: f64, max_face_degree: usize) -> f64 {
    match kind {
        AppendixKind::UpPs17 => (k + 1) as f64 / (p * k as f64 + 1.0),
        AppendixKind::DownM16 => {
            let m = max_face_degree as f64;
            (m - 1.0) / (p * (m - 2.0) + 1.0)
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExpectationTrace {
    pub p: f64,
    pub scaling: f64,
    /// `E_t` on the positive basis of `C_k`.
    pub raw: Vec<DVector<f64>>,
    /// `scalingᵗ · E_t`.
    pub normalized: Vec<DVector<f64>>,
}

/// `E_t(σ) = p_t(σ) − p_t(σ̄)` from the exact distributions.
pub fn expectation_process(
    chain: &TransitionMatrix,
    start: OrientedSimplex,
    complex: &CliqueComplex,
    steps: usize,
    p: f64,
    scaling: f64,
) -> Result<ExpectationTrace> {
    let label = OrientedSimplexLabel::simplex(start);
    let s0 = chain
        .space
        .state_of(complex, label)
        .ok_or_else(|| Error::NotASimplex(start.vertices.bitstring(complex.n())))?;
    let mut delta = DVector::zeros(chain.dim());
    delta[s0] = 1.0;
    let n_k = chain.space.n_k;
    let raw: Vec<DVector<f64>> = evolve_trajectory(chain, &delta, steps)?
        .iter()
        .map(|d| DVector::from_fn(n_k, |i, _| d[i] - d[i + n_k]))
        .collect();
    let normalized = raw.iter().enumerate().map(|(t, e)| e * scaling.powi(t as i32)).collect();
    Ok(ExpectationTrace { p, scaling, raw, normalized })
}
