//! Boundary operators, weighted Hodge Laplacians and exact spectral oracles.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::complex::{adjacency, CliqueComplex, OrientedSimplex, Relation};
use crate::error::{Error, Result};
use crate::linalg::{self, ZERO_TOL};
use crate::markov::WalkKind;

/// Tolerance for the operator-product versus entrywise Laplacian check.
pub const LAPLACIAN_AGREEMENT_TOL: f64 = 1e-12;

/// Weighted boundary `∂_k : C_k → C_{k-1}`.
#[derive(Clone, Debug)]
pub struct BoundaryMatrix {
    pub k: usize,
    pub entries: DMatrix<f64>,
}

/// Columns indexed by the `k`-basis, rows by the `(k-1)`-basis. Defined for
/// every `k ≤ k_max + 1`; the extremes are empty matrices.
pub fn boundary_matrix(complex: &CliqueComplex, k: usize) -> BoundaryMatrix {
    let rows = if k == 0 { 0 } else { complex.count(k - 1) };
    let cols = complex.count(k);
    let mut entries = DMatrix::zeros(rows, cols);
    if k > 0 {
        for (c, &sigma) in complex.basis(k).iter().enumerate() {
            for (j, v) in sigma.iter().enumerate() {
                let r = complex.index_of(sigma.without(v)).expect("faces are enumerated");
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                entries[(r, c)] = sign * complex.weight(v);
            }
        }
    }
    BoundaryMatrix { k, entries }
}

/// Conjugate a boundary by orientation flips: `row_flips` re-orients the
/// `(k-1)`-basis and `col_flips` the `k`-basis.
pub fn reoriented(boundary: &BoundaryMatrix, row_flips: &[bool], col_flips: &[bool]) -> BoundaryMatrix {
    let sign = |f: bool| if f { -1.0 } else { 1.0 };
    let entries =
        DMatrix::from_fn(boundary.entries.nrows(), boundary.entries.ncols(), |r, c| {
            boundary.entries[(r, c)] * sign(row_flips[r]) * sign(col_flips[c])
        });
    BoundaryMatrix { k: boundary.k, entries }
}

#[derive(Clone, Debug)]
pub struct LaplacianTriple {
    pub k: usize,
    pub up: DMatrix<f64>,
    pub down: DMatrix<f64>,
    pub full: DMatrix<f64>,
}

impl LaplacianTriple {
    /// The Laplacian encoded by a walk of the given kind.
    pub fn for_kind(&self, kind: WalkKind) -> &DMatrix<f64> {
        match kind {
            WalkKind::Up => &self.up,
            WalkKind::Down => &self.down,
            WalkKind::Harmonic => &self.full,
        }
    }
}

fn laplacians_from_boundaries(lower: &BoundaryMatrix, upper: &BoundaryMatrix) -> (DMatrix<f64>, DMatrix<f64>) {
    let up = &upper.entries * upper.entries.transpose();
    let down = lower.entries.transpose() * &lower.entries;
    (up, down)
}

/// Entrywise up and down Laplacians from adjacency and weights alone.
pub fn combinatorial_laplacians(complex: &CliqueComplex, k: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let nk = complex.count(k);
    let mut up = DMatrix::zeros(nk, nk);
    let mut down = DMatrix::zeros(nk, nk);
    let w = |v: usize| complex.weight(v);
    for (a, &sigma) in complex.basis(k).iter().enumerate() {
        let cofaces = complex.up_vertices(sigma);
        up[(a, a)] = cofaces.iter().map(|&u| w(u).powi(2)).sum();
        if k > 0 {
            down[(a, a)] = sigma.iter().map(|v| w(v).powi(2)).sum();
        }
        for v in sigma.iter() {
            for u in (0..complex.n()).filter(|&u| !sigma.contains(u)) {
                let other = sigma.without(v).with(u);
                let Some(b) = complex.index_of(other) else { continue };
                let verdict = adjacency(complex, &OrientedSimplex::positive(sigma), &OrientedSimplex::positive(other));
                let value = |rel: Relation| match rel {
                    Relation::Similar => w(u) * w(v),
                    Relation::Dissimilar => -w(u) * w(v),
                    Relation::None => 0.0,
                };
                up[(a, b)] = value(verdict.up);
                down[(a, b)] = value(verdict.down);
            }
        }
    }
    (up, down)
}

/// Up, down and full Laplacians in dimension `k`. Both constructions are
/// computed and must agree.
pub fn laplacians(complex: &CliqueComplex, k: usize) -> Result<LaplacianTriple> {
    complex.check_dimension(k, 0, complex.k_max())?;
    let (up, down) = laplacians_from_boundaries(&boundary_matrix(complex, k), &boundary_matrix(complex, k + 1));
    let (cup, cdown) = combinatorial_laplacians(complex, k);
    let gap = linalg::max_abs(&(&up - &cup)).max(linalg::max_abs(&(&down - &cdown)));
    if gap > LAPLACIAN_AGREEMENT_TOL {
        return Err(Error::LaplacianMismatch(gap));
    }
    let full = &up + &down;
    Ok(LaplacianTriple { k, up, down, full })
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    pub lambda_min_nonzero: f64,
    pub kernel_dim: usize,
}

pub fn spectral_summary(m: &DMatrix<f64>, zero_tol: f64) -> Result<SpectralSummary> {
    let (values, _) = linalg::sym_eigen(m);
    let eigenvalues: Vec<f64> = values.iter().copied().collect();
    let kernel_dim = eigenvalues.iter().filter(|&&x| x <= zero_tol).count();
    let lambda_min_nonzero =
        eigenvalues.iter().copied().find(|&x| x > zero_tol).ok_or(Error::NoNonzeroEigenvalue)?;
    Ok(SpectralSummary { eigenvalues, lambda_min_nonzero, kernel_dim })
}

/// The five subspaces of `C_k` that projectors are synthesized for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SubspaceTarget {
    /// `Z^k = ker Δ^up`.
    Cocycles,
    /// `B_k = Im Δ^up`.
    Boundaries,
    /// `Z_k = ker Δ^down`.
    Cycles,
    /// `B^k = Im Δ^down`.
    Coboundaries,
    /// `H_k = ker Δ`.
    Harmonic,
}

impl SubspaceTarget {
    pub const ALL: [SubspaceTarget; 5] = [
        SubspaceTarget::Cocycles,
        SubspaceTarget::Boundaries,
        SubspaceTarget::Cycles,
        SubspaceTarget::Coboundaries,
        SubspaceTarget::Harmonic,
    ];

    /// Walk whose Laplacian defines the subspace.
    pub fn walk_kind(self) -> WalkKind {
        match self {
            SubspaceTarget::Cocycles | SubspaceTarget::Boundaries => WalkKind::Up,
            SubspaceTarget::Cycles | SubspaceTarget::Coboundaries => WalkKind::Down,
            SubspaceTarget::Harmonic => WalkKind::Harmonic,
        }
    }

    /// Kernel targets keep the low end of the spectrum, image targets drop it.
    pub fn is_kernel(self) -> bool {
        matches!(self, SubspaceTarget::Cocycles | SubspaceTarget::Cycles | SubspaceTarget::Harmonic)
    }

    pub fn cli_name(self) -> &'static str {
        match self {
            SubspaceTarget::Cocycles => "zck",
            SubspaceTarget::Boundaries => "bk",
            SubspaceTarget::Cycles => "zk",
            SubspaceTarget::Coboundaries => "bck",
            SubspaceTarget::Harmonic => "hk",
        }
    }
}

impl fmt::Display for SubspaceTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for SubspaceTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SubspaceTarget::ALL
            .into_iter()
            .find(|t| t.cli_name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown target {s:?} (expected zk, bk, zck, bck or hk)")))
    }
}

/// Exact orthogonal projector onto a target subspace.
pub fn exact_projector(lap: &LaplacianTriple, target: SubspaceTarget) -> DMatrix<f64> {
    let m = lap.for_kind(target.walk_kind());
    if target.is_kernel() {
        linalg::kernel_projector(m, ZERO_TOL)
    } else {
        linalg::range_projector(m, ZERO_TOL)
    }
}

/// `Proj(B_k)`, `Proj(H_k)`, `Proj(B^k)`.
#[derive(Clone, Debug)]
pub struct HodgeProjectors {
    pub boundaries: DMatrix<f64>,
    pub harmonic: DMatrix<f64>,
    pub coboundaries: DMatrix<f64>,
}

pub fn hodge_projectors_exact(lap: &LaplacianTriple) -> HodgeProjectors {
    HodgeProjectors {
        boundaries: exact_projector(lap, SubspaceTarget::Boundaries),
        harmonic: exact_projector(lap, SubspaceTarget::Harmonic),
        coboundaries: exact_projector(lap, SubspaceTarget::Coboundaries),
    }
}

/// `β_k` as the nullity of `Δ_k`, cross-checked against
/// `dim ker ∂_k − rank ∂_{k+1}`.
pub fn betti_exact(complex: &CliqueComplex, k: usize) -> Result<usize> {
    let lap = laplacians(complex, k)?;
    let (values, _) = linalg::sym_eigen(&lap.full);
    let nullity = values.iter().filter(|&&x| x <= ZERO_TOL).count();
    let lower = boundary_matrix(complex, k);
    let upper = boundary_matrix(complex, k + 1);
    let rank_formula = complex.count(k) - linalg::rank(&lower.entries, ZERO_TOL) - linalg::rank(&upper.entries, ZERO_TOL);
    if nullity != rank_formula {
        return Err(Error::BettiMismatch { nullity, rank_formula });
    }
    Ok(nullity)
}

/// Check that `small ⊆ large` as weighted complexes through dimension `k+1`.
pub fn check_nested(small: &CliqueComplex, large: &CliqueComplex, k: usize) -> Result<()> {
    if small.n() != large.n() {
        return Err(Error::NotNested(format!("vertex counts {} and {} differ", small.n(), large.n())));
    }
    if small.graph().weights() != large.graph().weights() {
        return Err(Error::NotNested("vertex weights differ".into()));
    }
    if !small.graph().is_subgraph_of(large.graph()) {
        return Err(Error::NotNested("edge set is not a subset".into()));
    }
    if !small.is_subcomplex_of(large, k + 1) {
        return Err(Error::NotNested(format!("some simplex of dimension ≤ {} is missing", k + 1)));
    }
    Ok(())
}

/// Zero-padding inclusion `C_k(small) → C_k(large)` as an `n_k(large) × n_k(small)` matrix.
pub fn embedding(small: &CliqueComplex, large: &CliqueComplex, k: usize) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(large.count(k), small.count(k));
    for (c, &s) in small.basis(k).iter().enumerate() {
        let r = large.index_of(s).expect("nested complexes");
        e[(r, c)] = 1.0;
    }
    e
}

/// `dim ker Δ^{i,down} − dim(ker Δ^{i,down} ∩ Im Δ^{j,up})`, with the
/// intersection computed from the null space of the stacked bases.
pub fn persistent_betti_exact(small: &CliqueComplex, large: &CliqueComplex, k: usize) -> Result<usize> {
    check_nested(small, large, k)?;
    let lap_i = laplacians(small, k)?;
    let lap_j = laplacians(large, k)?;
    let cycles = embedding(small, large, k) * linalg::eigen_basis(&lap_i.down, |x| x <= ZERO_TOL);
    let boundaries = linalg::eigen_basis(&lap_j.up, |x| x > ZERO_TOL);
    let intersection = intersection_dim(&cycles, &boundaries);
    Ok(cycles.ncols() - intersection)
}

/// Dimension of the intersection of two column spaces given by orthonormal
/// bases: the nullity of `[A | −B]`.
pub fn intersection_dim(a: &DMatrix<f64>, b: &DMatrix<f64>) -> usize {
    let mut stacked = DMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    stacked.columns_mut(0, a.ncols()).copy_from(a);
    stacked.columns_mut(a.ncols(), b.ncols()).copy_from(&(-b));
    stacked.ncols() - linalg::rank(&stacked, 1e-8)
}

/// Parse `[a,b,c]` or `a,b,c` into a vertex sequence.
pub fn parse_simplex(text: &str) -> Result<Vec<usize>> {
    let inner = text.trim().trim_start_matches('[').trim_end_matches(']');
    inner
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| Error::InvalidArgument(format!("bad simplex {text:?}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use proptest::prelude::*;

    fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
        a.shape() == b.shape() && linalg::max_abs(&(a - b)) <= tol
    }

    #[test]
    fn k3_boundary() {
        let k3 = fixtures::complete(3, 2);
        let d2 = boundary_matrix(&k3, 2);
        // basis [01],[02],[12]: ∂[012] = [12] − [02] + [01]
        assert_eq!(d2.entries.column(0).iter().copied().collect::<Vec<_>>(), vec![1.0, -1.0, 1.0]);
        let d1 = boundary_matrix(&k3, 1);
        assert!(linalg::max_abs(&(&d1.entries * &d2.entries)) == 0.0);
    }

    #[test]
    fn weighted_down_diagonal() {
        let g = fixtures::reweighted(&fixtures::complete_graph(3), vec![2.0, 1.0, 1.0]);
        let x = CliqueComplex::build(g, 2).unwrap();
        let lap = laplacians(&x, 1).unwrap();
        assert_eq!(lap.down[(0, 0)], 5.0);
    }

    #[test]
    fn laplacian_examples() {
        let k3 = laplacians(&fixtures::complete(3, 2), 1).unwrap();
        assert!(close(&k3.full, &(DMatrix::identity(3, 3) * 3.0), 1e-12));
        let c4 = laplacians(&fixtures::cycle(4, 2), 1).unwrap();
        let s = spectral_summary(&c4.full, ZERO_TOL).unwrap();
        let expected = [0.0, 2.0, 2.0, 4.0];
        assert!(s.eigenvalues.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-9));
        assert_eq!(s.kernel_dim, 1);
        assert!((s.lambda_min_nonzero - 2.0).abs() < 1e-9);
        let s = spectral_summary(&k3.full, ZERO_TOL).unwrap();
        assert_eq!(s.kernel_dim, 0);
        assert!((s.lambda_min_nonzero - 3.0).abs() < 1e-9);
        assert!(matches!(spectral_summary(&DMatrix::zeros(2, 2), ZERO_TOL), Err(Error::NoNonzeroEigenvalue)));
    }

    #[test]
    fn c4_harmonic_projector() {
        let lap = laplacians(&fixtures::cycle(4, 2), 1).unwrap();
        let h = hodge_projectors_exact(&lap);
        // basis [01],[03],[12],[23]; the cycle is +[01]+[12]+[23]−[03]
        let z = nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]) / 2.0;
        assert!(close(&h.harmonic, &(&z * z.transpose()), 1e-10));
        let sum = &h.boundaries + &h.harmonic + &h.coboundaries;
        assert!(close(&sum, &DMatrix::identity(4, 4), 1e-10));
        let k3 = hodge_projectors_exact(&laplacians(&fixtures::complete(3, 2), 1).unwrap());
        assert!(linalg::max_abs(&k3.harmonic) < 1e-10);
    }

    #[test]
    fn betti_examples() {
        assert_eq!(betti_exact(&fixtures::cycle(4, 2), 1).unwrap(), 1);
        assert_eq!(betti_exact(&fixtures::complete(3, 2), 1).unwrap(), 0);
        let two_edges = crate::VertexWeightedGraph::new(4, &[[0, 1], [2, 3]], None).unwrap();
        assert_eq!(betti_exact(&CliqueComplex::build(two_edges, 1).unwrap(), 0).unwrap(), 2);
        assert_eq!(betti_exact(&fixtures::tetrahedron_boundary(), 2).unwrap(), 1);
        assert_eq!(betti_exact(&fixtures::tetrahedron_boundary(), 1).unwrap(), 0);
    }

    #[test]
    fn persistent_examples() {
        let c4 = fixtures::cycle(4, 2);
        let k4 = fixtures::complete(4, 2);
        assert_eq!(persistent_betti_exact(&c4, &k4, 1).unwrap(), 0);
        assert_eq!(persistent_betti_exact(&c4, &c4, 1).unwrap(), 1);
        let c5 = fixtures::cycle(5, 2);
        let chord = fixtures::cycle_with_chord(5, 2);
        assert_eq!(persistent_betti_exact(&c5, &chord, 1).unwrap(), 1);
        assert!(matches!(persistent_betti_exact(&k4, &c4, 1), Err(Error::NotNested(_))));
    }

    #[test]
    fn target_names_round_trip() {
        for t in SubspaceTarget::ALL {
            assert_eq!(t.cli_name().parse::<SubspaceTarget>().unwrap(), t);
        }
        assert!("nope".parse::<SubspaceTarget>().is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn boundary_squares_to_zero(n in 3usize..8, p in 0.2f64..0.9, seed in any::<u64>()) {
            let g = fixtures::random_graph(seed, n, p, (0.1, 1.0));
            let x = CliqueComplex::build(g, (n - 1).min(4)).unwrap();
            for k in 1..=x.k_max() {
                let prod = &boundary_matrix(&x, k).entries * &boundary_matrix(&x, k + 1).entries;
                prop_assert!(linalg::max_abs(&prod) <= 1e-12);
            }
            for k in 0..=x.k_max() {
                let lap = laplacians(&x, k).unwrap();
                let (vals, _) = linalg::sym_eigen(&lap.full);
                prop_assert!(vals.iter().all(|&v| v > -1e-9));
                prop_assert_eq!(betti_exact(&x, k).unwrap(), vals.iter().filter(|&&v| v <= ZERO_TOL).count());
            }
        }

        #[test]
        fn spectrum_independent_of_orientation(seed in any::<u64>(), flips in any::<u64>()) {
            let x = CliqueComplex::build(fixtures::random_graph(seed, 6, 0.7, (0.1, 1.0)), 3).unwrap();
            let k = 1;
            let lower = boundary_matrix(&x, k);
            let upper = boundary_matrix(&x, k + 1);
            let fk: Vec<bool> = (0..x.count(k)).map(|i| flips >> (i % 64) & 1 == 1).collect();
            let fkm: Vec<bool> = (0..x.count(k - 1)).map(|i| flips >> ((i + 17) % 64) & 1 == 1).collect();
            let fkp: Vec<bool> = (0..x.count(k + 1)).map(|i| flips >> ((i + 33) % 64) & 1 == 1).collect();
            let (up, down) = laplacians_from_boundaries(&lower, &upper);
            let (rup, rdown) = laplacians_from_boundaries(&reoriented(&lower, &fkm, &fk), &reoriented(&upper, &fk, &fkp));
            let (a, _) = linalg::sym_eigen(&(up + down));
            let (b, _) = linalg::sym_eigen(&(rup + rdown));
            prop_assert!(a.iter().zip(b.iter()).all(|(p, q)| (p - q).abs() <= 1e-9));
        }
    }
}
