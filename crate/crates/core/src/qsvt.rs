//! Rectangle polynomials, matrix functions of encoded blocks, and the
//! projectors and measurements built from them.
//!
//! Singular value transformation is carried out at the matrix-function
//! level: the polynomial is applied to the encoded Hermitian block, and its
//! degree stands in for the number of walk-unitary applications.

use nalgebra::{DMatrix, DVector};
use rustdct::DctPlanner;
use serde::Serialize;
use statrs::function::erf::{erf, erfc_inv};

use crate::complex::CliqueComplex;
use crate::error::{Error, Result};
use crate::hodge::{exact_projector, laplacians, spectral_summary, SubspaceTarget};
use crate::linalg::{self, ZERO_TOL};
use crate::quantum::{laplacian_encoding, walk_unitary, Tier};

/// Empirical constant `C` in `degree ≤ C·ln(1/ε)/δ` for the construction
/// below, measured over `δ ∈ [0.02, 0.5]`, `ε ∈ [1e-8, 1e-2]`.
pub const RECTANGLE_DEGREE_CONSTANT: f64 = 2.0;

/// Number of points in the certification grid on `[-1, 1]`.
pub const CHECK_GRID: usize = 10_000;

/// Largest Chebyshev sampling used while fitting a rectangle.
const MAX_NODES: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    /// Close to 1 near the origin, close to 0 away from it.
    Pass,
    /// Close to 0 near the origin, close to 1 away from it.
    Stop,
}

/// Even polynomial in the Chebyshev basis, `P(x) = Σ c_j T_j(x)`; odd
/// coefficients are zero.
#[derive(Clone, Debug, Serialize)]
pub struct RectanglePolynomial {
    pub coefficients: Vec<f64>,
    pub degree: usize,
    pub t: f64,
    pub delta: f64,
    pub eps: f64,
    pub band: Band,
}

/// Chebyshev coefficients of `f` from its values at the `nodes` Chebyshev
/// points, by a DCT-II.
fn chebyshev_coefficients(f: impl Fn(f64) -> f64, nodes: usize) -> Vec<f64> {
    let mut values: Vec<f64> =
        (0..nodes).map(|i| f((std::f64::consts::PI * (i as f64 + 0.5) / nodes as f64).cos())).collect();
    DctPlanner::new().plan_dct2(nodes).process_dct2(&mut values);
    let scale = 2.0 / nodes as f64;
    values.iter_mut().for_each(|v| *v *= scale);
    values[0] /= 2.0;
    values
}

impl RectanglePolynomial {
    /// Band-pass: `P ≥ 1−ε` on `[−t+δ, t−δ]`, `P ≤ ε` for `|x| ≥ t+δ`,
    /// `0 ≤ P ≤ 1` on `[−1, 1]`. Band-stop is `1 − P`.
    ///
    /// The polynomial is a truncated Chebyshev expansion of the smoothed
    /// window `½[erf(κ(x+t)) − erf(κ(x−t))]`, shifted and rescaled by the
    /// ℓ¹ norm `τ` of the discarded tail so that it stays inside `[0, 1]`.
    pub fn new(t: f64, delta: f64, eps: f64, band: Band) -> Result<Self> {
        if !(delta > 0.0 && delta < t && t + delta <= 1.0 + 1e-12) {
            return Err(Error::InfeasiblePolynomial(format!("need 0 < δ < t and t+δ ≤ 1, got t={t}, δ={delta}")));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::InfeasiblePolynomial(format!("ε = {eps} not in (0, 1/2)")));
        }
        let kappa = erfc_inv(eps / 4.0) / delta;
        let window = |x: f64| 0.5 * (erf(kappa * (x + t)) - erf(kappa * (x - t)));
        let tail_budget = eps / 8.0;
        // start from enough nodes to resolve the window, several times the degree bound
        let expected = RECTANGLE_DEGREE_CONSTANT * (1.0 / eps).ln() / delta;
        let mut nodes = ((4.0 * expected) as usize).max(256).next_power_of_two();
        let (coefficients, tau) = loop {
            let mut c = chebyshev_coefficients(window, nodes);
            for (j, cj) in c.iter_mut().enumerate() {
                if j % 2 == 1 {
                    *cj = 0.0;
                }
            }
            // suffix[j] = Σ_{i ≥ j} |c_i|
            let mut suffix = vec![0.0; c.len() + 1];
            for j in (0..c.len()).rev() {
                suffix[j] = suffix[j + 1] + c[j].abs();
            }
            let d = (0..c.len()).step_by(2).find(|&d| suffix[d + 1] <= tail_budget);
            // accept once the cut sits well inside the resolved range, so aliasing is negligible
            if let Some(d) = d.filter(|&d| 2 * d <= nodes) {
                let tail = suffix[d + 1];
                c.truncate(d + 1);
                break (c, tail);
            }
            if nodes >= MAX_NODES {
                return Err(Error::InfeasiblePolynomial(format!("expansion did not converge for t={t}, δ={delta}, ε={eps}")));
            }
            nodes *= 2;
        };
        // P'' = (P + τ)/(1 + 2τ) maps [f−τ, f+τ] into [0, 1]
        let mut coefficients: Vec<f64> = coefficients.iter().map(|c| c / (1.0 + 2.0 * tau)).collect();
        coefficients[0] += tau / (1.0 + 2.0 * tau);
        if band == Band::Stop {
            for c in &mut coefficients {
                *c = -*c;
            }
            coefficients[0] += 1.0;
        }
        let degree = coefficients.len() - 1;
        let poly = Self { coefficients, degree, t, delta, eps, band };
        poly.certify()?;
        Ok(poly)
    }

    /// The constant polynomial (degree 0).
    pub fn constant(value: f64, band: Band) -> Self {
        Self { coefficients: vec![value], degree: 0, t: 0.0, delta: 0.0, eps: 0.0, band }
    }

    /// Odd coefficients are zero, so `P(x) = Σ c_{2j} T_j(2x² − 1)`.
    pub fn eval(&self, x: f64) -> f64 {
        let y = 2.0 * x * x - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coefficients.iter().step_by(2).skip(1).rev() {
            let b0 = c + 2.0 * y * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coefficients[0] + y * b1 - b2
    }

    fn target(&self, x: f64) -> Option<(f64, f64)> {
        let inner = x.abs() <= self.t - self.delta;
        let outer = x.abs() >= self.t + self.delta;
        let (lo_in, hi_in, lo_out, hi_out) = match self.band {
            Band::Pass => (1.0 - self.eps, 1.0, 0.0, self.eps),
            Band::Stop => (0.0, self.eps, 1.0 - self.eps, 1.0),
        };
        if inner {
            Some((lo_in, hi_in))
        } else if outer {
            Some((lo_out, hi_out))
        } else {
            None
        }
    }

    /// Grid check of the band bounds and `|P| ≤ 1` on a uniform
    /// grid over `[-1, 1]` and a second one over the band edges.
    pub fn certify(&self) -> Result<()> {
        let slack = 1e-12;
        let reach = (self.t + 2.0 * self.delta).min(1.0);
        let uniform = (0..=CHECK_GRID).map(|i| -1.0 + 2.0 * i as f64 / CHECK_GRID as f64);
        let band = (0..=CHECK_GRID).map(|i| reach * i as f64 / CHECK_GRID as f64);
        for x in uniform.chain(band) {
            let p = self.eval(x);
            if p.abs() > 1.0 + slack {
                return Err(Error::CertificationFailed(format!("|P({x})| = {} > 1", p.abs())));
            }
            if let Some((lo, hi)) = self.target(x) {
                if p < lo - slack || p > hi + slack {
                    return Err(Error::CertificationFailed(format!("P({x}) = {p} outside [{lo}, {hi}]")));
                }
            }
        }
        Ok(())
    }

    /// `C` such that `degree = C·ln(1/ε)/δ`.
    pub fn degree_constant(&self) -> f64 {
        self.degree as f64 * self.delta / (1.0 / self.eps).ln()
    }
}

/// `P(A)` for symmetric `A` with `‖A‖ ≤ 1`, by Clenshaw's recurrence. Only
/// the even coefficients are used: `T_{2j}(A) = T_j(2A² − I)`.
pub fn apply_polynomial(a: &DMatrix<f64>, poly: &RectanglePolynomial) -> DMatrix<f64> {
    let n = a.nrows();
    let id = DMatrix::<f64>::identity(n, n);
    let even: Vec<f64> = poly.coefficients.iter().step_by(2).copied().collect();
    let y = a * a * 2.0 - &id;
    let (mut b1, mut b2) = (DMatrix::zeros(n, n), DMatrix::zeros(n, n));
    for &c in even.iter().skip(1).rev() {
        let b0 = &id * c + (&y * &b1) * 2.0 - &b2;
        b2 = b1;
        b1 = b0;
    }
    &id * even[0] + &y * b1 - b2
}

/// Same as [`apply_polynomial`] but through the eigenbasis; used to
/// cross-check the recurrence.
pub fn apply_polynomial_eigen(a: &DMatrix<f64>, poly: &RectanglePolynomial) -> DMatrix<f64> {
    linalg::sym_apply(a, |x| poly.eval(x))
}

/// Apply a polynomial to the block of a block encoding.
pub fn apply_polynomial_to_block(block: &crate::quantum::BlockEncodedOperator, poly: &RectanglePolynomial) -> DMatrix<f64> {
    apply_polynomial(&block.block, poly)
}

/// A synthesized approximate projector.
#[derive(Clone, Debug)]
pub struct ProjectorEncoding {
    pub target: Option<SubspaceTarget>,
    pub block: DMatrix<f64>,
    pub err: f64,
    pub degree_used: usize,
    /// Applications of the walk unitary (or of the input encodings).
    pub walk_uses: usize,
    /// Normalization `K` of the walk used.
    pub normalization: f64,
    /// Smallest nonzero eigenvalue of the relevant Laplacian (`0` if none).
    pub lambda: f64,
}

impl ProjectorEncoding {
    /// Wrap an exact projector (degree 0, error 0).
    pub fn exact(block: DMatrix<f64>) -> Self {
        Self { target: None, block, err: 0.0, degree_used: 0, walk_uses: 0, normalization: 1.0, lambda: 0.0 }
    }

    pub fn dim(&self) -> usize {
        self.block.nrows()
    }

    /// `‖Π̃² − Π̃‖`.
    pub fn idempotency_error(&self) -> f64 {
        linalg::spectral_norm(&(&self.block * &self.block - &self.block))
    }
}

/// Knobs for [`projector_encoding`].
#[derive(Clone, Copy, Debug)]
pub struct ProjectorOptions {
    pub tier: Tier,
    pub prep_err: f64,
    /// Return the trivial projector when the Laplacian is zero instead of
    /// failing.
    pub allow_zero_laplacian: bool,
}

impl Default for ProjectorOptions {
    fn default() -> Self {
        Self { tier: Tier::Oracle, prep_err: 0.0, allow_zero_laplacian: false }
    }
}

/// Projector onto a target subspace of `C_k` by a rectangle polynomial of
/// the encoded `Δ/(√2K)` with `t = λ̃/2`, `δ = λ̃/4`.
pub fn projector_encoding(
    complex: &CliqueComplex,
    k: usize,
    target: SubspaceTarget,
    eps: f64,
    options: ProjectorOptions,
) -> Result<ProjectorEncoding> {
    let kind = target.walk_kind();
    let lap = laplacians(complex, k)?;
    let walk = walk_unitary(complex, k, kind, options.tier, options.prep_err)?;
    let encoding = laplacian_encoding(complex, &walk)?;
    let band = if target.is_kernel() { Band::Pass } else { Band::Stop };
    let lambda = match spectral_summary(lap.for_kind(kind), ZERO_TOL) {
        Ok(s) => s.lambda_min_nonzero,
        Err(Error::NoNonzeroEigenvalue) if options.allow_zero_laplacian => {
            // every vector is in the kernel
            let value = if target.is_kernel() { 1.0 } else { 0.0 };
            let n = complex.count(k);
            return Ok(ProjectorEncoding {
                target: Some(target),
                block: DMatrix::identity(n, n) * value,
                err: 0.0,
                degree_used: 0,
                walk_uses: 0,
                normalization: walk.normalization,
                lambda: 0.0,
            });
        }
        Err(Error::NoNonzeroEigenvalue) => {
            return Err(Error::ZeroLaplacian(match kind {
                crate::markov::WalkKind::Up => "up",
                crate::markov::WalkKind::Down => "down",
                crate::markov::WalkKind::Harmonic => "full",
            }))
        }
        Err(e) => return Err(e),
    };
    let scaled = lambda / encoding.scale;
    let poly = RectanglePolynomial::new(scaled / 2.0, scaled / 4.0, eps, band)?;
    let block = apply_polynomial(&encoding.block, &poly);
    Ok(ProjectorEncoding {
        target: Some(target),
        block,
        err: eps,
        degree_used: poly.degree,
        walk_uses: poly.degree,
        normalization: walk.normalization,
        lambda,
    })
}

/// Exact projector for the same target, for comparisons.
pub fn exact_target_projector(complex: &CliqueComplex, k: usize, target: SubspaceTarget) -> Result<DMatrix<f64>> {
    Ok(exact_projector(&laplacians(complex, k)?, target))
}

/// Degree bound `C·K·ln(1/ε)/λ` implied by the rectangle constant.
pub fn projector_degree_bound(normalization: f64, lambda: f64, eps: f64) -> f64 {
    4.0 * std::f64::consts::SQRT_2 * RECTANGLE_DEGREE_CONSTANT * normalization * (1.0 / eps).ln() / lambda
}

/// Projector onto the intersection of the two subspaces, from the singular
/// values of `Π̃_A·Π̃_B`: a band-stop rectangle keeps singular values above
/// `1 − g/4` and removes those below `1 − 3g/4`. Singular values in
/// `(1 − g, 1 − g/4)` violate the gap promise.
pub fn intersection_projector(a: &ProjectorEncoding, b: &ProjectorEncoding, gap: f64, eps: f64) -> Result<ProjectorEncoding> {
    if a.dim() != b.dim() {
        return Err(Error::InvalidArgument(format!("projectors act on spaces of dimension {} and {}", a.dim(), b.dim())));
    }
    if !(gap > 0.0 && gap < 1.0) {
        return Err(Error::InvalidArgument(format!("gap {gap} not in (0, 1)")));
    }
    let product = &a.block * &b.block;
    let n = product.nrows();
    let poly = RectanglePolynomial::new(1.0 - gap / 2.0, gap / 4.0, eps, Band::Stop)?;
    let (lo, hi) = (1.0 - gap, 1.0 - gap / 4.0);
    let block = if n == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let svd = product.svd(false, true);
        let v_t = svd.v_t.expect("requested V");
        let mut out = DMatrix::zeros(n, n);
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > lo && s < hi {
                return Err(Error::GapViolation { value: s, lo, hi });
            }
            let row = v_t.row(i).transpose();
            out += &row * row.transpose() * poly.eval(s);
        }
        out
    };
    Ok(ProjectorEncoding {
        target: None,
        block,
        err: eps + a.err + b.err,
        degree_used: poly.degree,
        walk_uses: poly.degree * (a.walk_uses + b.walk_uses),
        normalization: 1.0,
        lambda: gap,
    })
}

/// Outcome statistics of the block measurement on a density matrix.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub p1: f64,
    pub p0: f64,
    unnormalized1: DMatrix<f64>,
    unnormalized0: DMatrix<f64>,
}

impl Measurement {
    fn post(state: &DMatrix<f64>, p: f64) -> Result<DMatrix<f64>> {
        if p <= 1e-14 {
            return Err(Error::ZeroProbability);
        }
        Ok(state / p)
    }

    /// `Π̃ρΠ̃ / p1`.
    pub fn post1(&self) -> Result<DMatrix<f64>> {
        Self::post(&self.unnormalized1, self.p1)
    }

    /// `(I−Π̃)ρ(I−Π̃) / p0`.
    pub fn post0(&self) -> Result<DMatrix<f64>> {
        Self::post(&self.unnormalized0, self.p0)
    }
}

fn check_state(rho: &DMatrix<f64>, dim: usize) -> Result<()> {
    if rho.shape() != (dim, dim) {
        return Err(Error::InvalidArgument(format!("state has shape {:?}, expected {dim}×{dim}", rho.shape())));
    }
    let tr = rho.trace();
    if (tr - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(tr));
    }
    Ok(())
}

/// Flag whether `ρ` lies in the image of `Π̃`.
pub fn block_measurement(projector: &DMatrix<f64>, rho: &DMatrix<f64>) -> Result<Measurement> {
    let n = projector.nrows();
    check_state(rho, n)?;
    let complement = DMatrix::identity(n, n) - projector;
    let unnormalized1 = projector * rho * projector.transpose();
    let unnormalized0 = &complement * rho * complement.transpose();
    let p1 = unnormalized1.trace();
    Ok(Measurement { p1, p0: 1.0 - p1, unnormalized1, unnormalized0 })
}

pub fn pure_state(psi: &DVector<f64>) -> Result<DMatrix<f64>> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(norm));
    }
    Ok(psi * psi.transpose())
}

/// Output of the coherent flag channel `ρ ↦ KρK†`, `K = |1⟩Π̃ + |0⟩(I−Π̃)`,
/// as a `2n × 2n` matrix with the flag as the leading qubit.
pub fn measurement_channel(projector: &DMatrix<f64>, rho: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = projector.nrows();
    check_state(rho, n)?;
    let mut kraus = DMatrix::zeros(2 * n, n);
    kraus.view_mut((0, 0), (n, n)).copy_from(&(DMatrix::identity(n, n) - projector));
    kraus.view_mut((n, 0), (n, n)).copy_from(projector);
    Ok(&kraus * rho * kraus.transpose())
}

/// Trace distance `½‖A − B‖₁` of symmetric matrices.
pub fn trace_distance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let (values, _) = linalg::sym_eigen(&(a - b));
    0.5 * values.iter().map(|x| x.abs()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn band_pass_examples() {
        let p = RectanglePolynomial::new(0.3, 0.1, 1e-6, Band::Pass).unwrap();
        assert!(p.eval(0.0) >= 1.0 - 1e-6);
        assert!(p.eval(1.0) <= 1e-6 && p.eval(-1.0) <= 1e-6);
        assert_eq!(p.degree % 2, 0);
        assert!(p.coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0));
        let s = RectanglePolynomial::new(0.3, 0.1, 1e-6, Band::Stop).unwrap();
        assert!(s.eval(0.0) <= 1e-6 && s.eval(0.9) >= 1.0 - 1e-6);
    }

    #[test]
    fn infeasible_parameters() {
        assert!(RectanglePolynomial::new(0.1, 0.2, 1e-3, Band::Pass).is_err());
        assert!(RectanglePolynomial::new(0.9, 0.2, 1e-3, Band::Pass).is_err());
        assert!(RectanglePolynomial::new(0.3, 0.1, 0.7, Band::Pass).is_err());
    }

    #[test]
    fn clenshaw_matches_eigen() {
        let a = DMatrix::from_row_slice(3, 3, &[0.2, 0.1, 0.0, 0.1, 0.0, -0.05, 0.0, -0.05, 0.4]);
        let p = RectanglePolynomial::new(0.2, 0.1, 1e-4, Band::Pass).unwrap();
        assert!(linalg::max_abs(&(apply_polynomial(&a, &p) - apply_polynomial_eigen(&a, &p))) < 1e-9);
        let t2 = RectanglePolynomial { coefficients: vec![0.0, 0.0, 1.0], ..RectanglePolynomial::constant(0.0, Band::Pass) };
        assert!(linalg::max_abs(&(apply_polynomial(&a, &t2) - (&a * &a * 2.0 - DMatrix::identity(3, 3)))) < 1e-15);
        assert!((t2.eval(0.3) - (2.0 * 0.09 - 1.0)).abs() < 1e-15);
        let one = RectanglePolynomial::constant(1.0, Band::Pass);
        assert_eq!(apply_polynomial(&a, &one), DMatrix::identity(3, 3));
    }

    #[test]
    fn k3_band_pass_kills_everything() {
        let k3 = fixtures::complete(3, 2);
        let a = DMatrix::identity(3, 3) * (3.0 / (5.0 * 2f64.sqrt()));
        let lt = 3.0 / (5.0 * 2f64.sqrt());
        let p = RectanglePolynomial::new(lt / 2.0, lt / 4.0, 1e-6, Band::Pass).unwrap();
        assert!(linalg::max_abs(&apply_polynomial(&a, &p)) <= 1e-6);
        let h = projector_encoding(&k3, 1, SubspaceTarget::Harmonic, 1e-6, ProjectorOptions::default()).unwrap();
        assert!(linalg::spectral_norm(&h.block) <= 1e-6);
    }

    #[test]
    fn c4_projectors() {
        let c4 = fixtures::cycle(4, 2);
        for target in [SubspaceTarget::Cycles, SubspaceTarget::Harmonic, SubspaceTarget::Coboundaries] {
            let p = projector_encoding(&c4, 1, target, 1e-6, ProjectorOptions::default()).unwrap();
            let exact = exact_target_projector(&c4, 1, target).unwrap();
            assert!(linalg::spectral_norm(&(&p.block - &exact)) <= 1e-6, "{target}");
            assert!(p.idempotency_error() <= 3e-6);
            assert!((p.degree_used as f64) <= projector_degree_bound(p.normalization, p.lambda, 1e-6));
        }
        assert!(matches!(
            projector_encoding(&c4, 1, SubspaceTarget::Cocycles, 1e-6, ProjectorOptions::default()),
            Err(Error::ZeroLaplacian("up"))
        ));
        let lenient = ProjectorOptions { allow_zero_laplacian: true, ..Default::default() };
        let z = projector_encoding(&c4, 1, SubspaceTarget::Cocycles, 1e-6, lenient).unwrap();
        assert_eq!(z.block, DMatrix::identity(4, 4));
    }

    #[test]
    fn intersections() {
        let opts = ProjectorOptions { allow_zero_laplacian: true, ..Default::default() };
        for (x, harmonic_rank) in [(fixtures::cycle(4, 2), 1.0), (fixtures::complete(3, 2), 0.0)] {
            let z = projector_encoding(&x, 1, SubspaceTarget::Cycles, 1e-6, opts).unwrap();
            let zc = projector_encoding(&x, 1, SubspaceTarget::Cocycles, 1e-6, opts).unwrap();
            let h = intersection_projector(&z, &zc, 0.25, 1e-6).unwrap();
            let exact = exact_target_projector(&x, 1, SubspaceTarget::Harmonic).unwrap();
            assert!(linalg::spectral_norm(&(&h.block - &exact)) <= 1e-5);
            assert!((h.block.trace() - harmonic_rank).abs() < 1e-5);
        }
        let exact = exact_target_projector(&fixtures::cycle(4, 2), 1, SubspaceTarget::Cycles).unwrap();
        let a = ProjectorEncoding::exact(exact.clone());
        let same = intersection_projector(&a, &a, 0.25, 1e-9).unwrap();
        assert!(linalg::max_abs(&(same.block - exact)) < 1e-8);
    }

    #[test]
    fn gap_violation_is_reported() {
        // two lines at 30 degrees: singular value cos 30° ≈ 0.866 sits in the band for g = 0.25
        let u = DVector::from_vec(vec![1.0, 0.0]);
        let v = DVector::from_vec(vec![3f64.sqrt() / 2.0, 0.5]);
        let a = ProjectorEncoding::exact(&u * u.transpose());
        let b = ProjectorEncoding::exact(&v * v.transpose());
        assert!(matches!(intersection_projector(&a, &b, 0.25, 1e-6), Err(Error::GapViolation { .. })));
    }

    #[test]
    fn measurement_examples() {
        let c4 = fixtures::cycle(4, 2);
        let exact = exact_target_projector(&c4, 1, SubspaceTarget::Harmonic).unwrap();
        let uniform = DMatrix::identity(4, 4) / 4.0;
        let m = block_measurement(&exact, &uniform).unwrap();
        assert!((m.p1 - 0.25).abs() < 1e-12);
        let z = DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]) / 2.0;
        let m = block_measurement(&exact, &pure_state(&z).unwrap()).unwrap();
        assert!((m.p1 - 1.0).abs() < 1e-12);
        assert!(m.post0().is_err());
        let zero = block_measurement(&DMatrix::zeros(4, 4), &uniform).unwrap();
        assert_eq!(zero.p1, 0.0);
        assert!(matches!(zero.post1(), Err(Error::ZeroProbability)));
        assert!(block_measurement(&exact, &(uniform * 2.0)).is_err());
    }

    #[test]
    fn channel_close_to_ideal() {
        let c4 = fixtures::cycle(4, 2);
        let eps = 1e-3;
        let approx = projector_encoding(&c4, 1, SubspaceTarget::Harmonic, eps, ProjectorOptions::default()).unwrap();
        let exact = exact_target_projector(&c4, 1, SubspaceTarget::Harmonic).unwrap();
        for i in 0..4 {
            let mut e = DVector::zeros(4);
            e[i] = 1.0;
            let rho = pure_state(&e).unwrap();
            let ideal = measurement_channel(&exact, &rho).unwrap();
            let got = measurement_channel(&approx.block, &rho).unwrap();
            assert!(trace_distance(&ideal, &got) <= 4.0 * eps);
        }
    }
}
