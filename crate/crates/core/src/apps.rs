//! Betti and persistent Betti estimation, the promise-homology verifier, and
//! the simplex sampler they rely on.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{CliqueComplex, OrientedSimplex, VertexWeightedGraph};
use crate::error::{Error, Result};
use crate::hodge::{betti_exact, check_nested, embedding, persistent_betti_exact, SubspaceTarget};
use crate::markov::WalkKind;
use crate::qsvt::{
    apply_polynomial, block_measurement, intersection_projector, projector_encoding, pure_state, Band, ProjectorEncoding,
    ProjectorOptions, RectanglePolynomial,
};
use crate::quantum::{laplacian_encoding, walk_unitary, Tier};

/// Failure probability the default sample count is sized for.
pub const DEFAULT_FAILURE_PROBABILITY: f64 = 0.05;

/// Samples from the positively oriented `k`-simplices, uniformly or with a
/// perturbation at a prescribed total variation distance.
#[derive(Clone, Debug)]
pub struct SimplexSampler {
    k: usize,
    simplices: Vec<crate::complex::VertexSet>,
    probabilities: Vec<f64>,
    index: WeightedIndex<f64>,
}

impl SimplexSampler {
    /// The perturbed law moves `δ` of mass onto the first simplex, taken
    /// evenly from the rest, so its distance from uniform is exactly `δ`.
    pub fn new(complex: &CliqueComplex, k: usize, tvd: f64) -> Result<Self> {
        complex.check_dimension(k, 0, complex.k_max())?;
        let simplices = complex.basis(k).to_vec();
        let n = simplices.len();
        if n == 0 {
            return Err(Error::EmptyDimension { k });
        }
        let uniform = 1.0 / n as f64;
        let max_tvd = 1.0 - uniform;
        if !(0.0..=max_tvd).contains(&tvd) {
            return Err(Error::InvalidArgument(format!("sampler distance {tvd} outside [0, {max_tvd}]")));
        }
        let mut probabilities = vec![uniform; n];
        if tvd > 0.0 {
            probabilities[0] += tvd;
            for p in &mut probabilities[1..] {
                *p = (*p - tvd / (n - 1) as f64).max(0.0);
            }
        }
        let index = WeightedIndex::new(&probabilities).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Ok(Self { k, simplices, probabilities, index })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    /// Distance of the sampling law from uniform.
    pub fn tvd_from_uniform(&self) -> f64 {
        let u = 1.0 / self.probabilities.len() as f64;
        0.5 * self.probabilities.iter().map(|p| (p - u).abs()).sum::<f64>()
    }

    /// Index into the complex's `k`-basis.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> OrientedSimplex {
        OrientedSimplex::positive(self.simplices[self.sample_index(rng)])
    }
}

/// One draw from [`SimplexSampler`].
pub fn uniform_simplex_sampler(complex: &CliqueComplex, k: usize, tvd: f64, seed: u64) -> Result<OrientedSimplex> {
    let sampler = SimplexSampler::new(complex, k, tvd)?;
    Ok(sampler.sample(&mut ChaCha8Rng::seed_from_u64(seed)))
}

/// `⌈ln(2/p)/(2ε²)⌉` samples give additive error `ε` with probability
/// `1 − p` by two-sided Hoeffding.
pub fn hoeffding_samples(eps: f64, failure: f64) -> usize {
    ((2.0 / failure).ln() / (2.0 * eps * eps)).ceil() as usize
}

pub fn hoeffding_confidence(samples: usize, eps: f64) -> f64 {
    (1.0 - 2.0 * (-2.0 * samples as f64 * eps * eps).exp()).max(0.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub value: f64,
    pub epsilon: f64,
    pub samples_used: usize,
    pub confidence: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct EstimateOptions {
    /// Additive error the sample count is sized for.
    pub epsilon: f64,
    pub sampler_tvd: f64,
    /// Accuracy of the synthesized projectors.
    pub projector_eps: f64,
    pub tier: Tier,
    pub seed: u64,
    /// Also compute the exact value for reference.
    pub with_truth: bool,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self { epsilon: 0.1, sampler_tvd: 0.0, projector_eps: 1e-3, tier: Tier::Oracle, seed: 0, with_truth: true }
    }
}

impl EstimateOptions {
    fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!("epsilon {} not in (0, 1)", self.epsilon)));
        }
        if !(self.projector_eps > 0.0 && self.projector_eps < 1.0) {
            return Err(Error::InvalidArgument(format!("projector epsilon {} not in (0, 1)", self.projector_eps)));
        }
        Ok(())
    }

    fn samples(&self) -> usize {
        hoeffding_samples(self.epsilon, DEFAULT_FAILURE_PROBABILITY).max((1.0 / (self.epsilon * self.epsilon)).ceil() as usize)
    }
}

/// Sample-then-project: draw a simplex, block-measure `|σ⟩⟨σ|` against the
/// projector (acting on a space that contains the sampled basis through
/// `positions`), and count the 1 outcomes.
fn sample_and_project<R: Rng>(
    sampler: &SimplexSampler,
    projector: &DMatrix<f64>,
    positions: &[usize],
    samples: usize,
    rng: &mut R,
) -> Result<usize> {
    let dim = projector.nrows();
    // p1 for every basis state, computed once through the block measurement
    let p1: Vec<f64> = positions
        .iter()
        .map(|&pos| {
            let mut e = DVector::zeros(dim);
            e[pos] = 1.0;
            Ok(block_measurement(projector, &pure_state(&e)?)?.p1.clamp(0.0, 1.0))
        })
        .collect::<Result<_>>()?;
    let mut ones = 0;
    for _ in 0..samples {
        let i = sampler.sample_index(rng);
        if rng.random::<f64>() < p1[i] {
            ones += 1;
        }
    }
    Ok(ones)
}

/// Estimate `β_k/n_k` with the harmonic projector.
pub fn estimate_normalized_betti(complex: &CliqueComplex, k: usize, options: &EstimateOptions) -> Result<EstimateReport> {
    options.validate()?;
    let sampler = SimplexSampler::new(complex, k, options.sampler_tvd)?;
    let projector = projector_encoding(
        complex,
        k,
        SubspaceTarget::Harmonic,
        options.projector_eps,
        ProjectorOptions { tier: options.tier, prep_err: 0.0, allow_zero_laplacian: false },
    )?;
    let n_k = complex.count(k);
    let samples = options.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let positions: Vec<usize> = (0..n_k).collect();
    let ones = sample_and_project(&sampler, &projector.block, &positions, samples, &mut rng)?;
    let truth = if options.with_truth { Some(betti_exact(complex, k)? as f64 / n_k as f64) } else { None };
    Ok(EstimateReport {
        value: ones as f64 / samples as f64,
        epsilon: options.epsilon,
        samples_used: samples,
        confidence: hoeffding_confidence(samples, options.epsilon),
        truth,
    })
}

/// Estimate `β^{i,j}_k / n_k(Xi)` as the difference of two sampled
/// dimensions: cycles of `Xi`, and cycles of `Xi` that are boundaries in `Xj`.
/// Each term carries its own `ε`, so the reported budget is `2ε`.
pub fn estimate_normalized_persistent_betti(
    small: &CliqueComplex,
    large: &CliqueComplex,
    k: usize,
    gap: f64,
    options: &EstimateOptions,
) -> Result<EstimateReport> {
    options.validate()?;
    check_nested(small, large, k)?;
    let projector_options = ProjectorOptions { tier: options.tier, prep_err: 0.0, allow_zero_laplacian: true };
    let cycles = projector_encoding(small, k, SubspaceTarget::Cycles, options.projector_eps, projector_options)?;
    let boundaries = projector_encoding(large, k, SubspaceTarget::Boundaries, options.projector_eps, projector_options)?;
    let e = embedding(small, large, k);
    let padded = ProjectorEncoding { block: &e * &cycles.block * e.transpose(), ..cycles.clone() };
    let both = intersection_projector(&padded, &boundaries, gap, options.projector_eps)?;

    let sampler = SimplexSampler::new(small, k, options.sampler_tvd)?;
    let samples = options.samples();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let own: Vec<usize> = (0..small.count(k)).collect();
    let inside: Vec<usize> =
        small.basis(k).iter().map(|&s| large.index_of(s).expect("nested complexes")).collect();
    let first = sample_and_project(&sampler, &cycles.block, &own, samples, &mut rng)?;
    let second = sample_and_project(&sampler, &both.block, &inside, samples, &mut rng)?;
    let value = ((first as f64 - second as f64) / samples as f64).clamp(0.0, 1.0);
    let truth = if options.with_truth {
        Some(persistent_betti_exact(small, large, k)? as f64 / small.count(k) as f64)
    } else {
        None
    };
    Ok(EstimateReport {
        value,
        epsilon: 2.0 * options.epsilon,
        samples_used: 2 * samples,
        // union bound over the two estimates
        confidence: (2.0 * hoeffding_confidence(samples, options.epsilon) - 1.0).max(0.0),
        truth,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Decision {
    Yes,
    No,
}

#[derive(Clone, Debug, Serialize)]
pub struct Instance {
    pub graph: crate::complex::GraphFile,
    pub k: usize,
    pub gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifierTranscript {
    pub instance: Instance,
    pub witness: Vec<f64>,
    pub decision: Decision,
    pub p1: f64,
    /// Degree of the threshold polynomial.
    pub degree: usize,
}

/// Single-message verifier: threshold the harmonic walk's encoded Laplacian
/// at `g/2` (placement from `g` alone), block-measure the witness and answer
/// YES on outcome 1. The outcome is drawn from `seed`.
pub fn verify_promise_homology(
    graph: &VertexWeightedGraph,
    k: usize,
    gap: f64,
    witness: &DVector<f64>,
    eps: f64,
    seed: u64,
) -> Result<VerifierTranscript> {
    let n = graph.n();
    let floor = (n as f64).powi(-3);
    if let Some(w) = graph.weights().iter().find(|&&w| !(floor..=1.0).contains(&w)) {
        return Err(Error::PromiseViolation(format!("vertex weight {w} outside [n^-3, 1] = [{floor:e}, 1]")));
    }
    if gap.is_nan() || gap <= 0.0 {
        return Err(Error::InvalidArgument(format!("gap {gap} must be positive")));
    }
    if k + 1 >= n {
        return Err(Error::DimensionOutOfRange { k, min: 0, max: n.saturating_sub(2) });
    }
    let complex = CliqueComplex::build(graph.clone(), k + 1)?;
    let n_k = complex.count(k);
    if n_k == 0 {
        return Err(Error::EmptyDimension { k });
    }
    if witness.len() != n_k {
        return Err(Error::InvalidArgument(format!("witness has {} entries, C_{k} has dimension {n_k}", witness.len())));
    }
    let rho = pure_state(witness)?;

    let walk = walk_unitary(&complex, k, WalkKind::Harmonic, Tier::Oracle, 0.0)?;
    let encoding = laplacian_encoding(&complex, &walk)?;
    let scaled = gap / encoding.scale;
    if scaled / 2.0 + scaled / 4.0 >= 1.0 {
        return Err(Error::InvalidArgument(format!("gap {gap} exceeds the encoded spectrum")));
    }
    let poly = RectanglePolynomial::new(scaled / 2.0, scaled / 4.0, eps, Band::Pass)?;
    let projector = apply_polynomial(&encoding.block, &poly);
    let p1 = block_measurement(&projector, &rho)?.p1.clamp(0.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decision = if rng.random::<f64>() < p1 { Decision::Yes } else { Decision::No };
    Ok(VerifierTranscript {
        instance: Instance { graph: graph.to_file(), k, gap },
        witness: witness.iter().copied().collect(),
        decision,
        p1,
        degree: poly.degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::VertexSet;
    use crate::fixtures;
    use proptest::prelude::*;

    fn c4_harmonic_witness() -> (VertexWeightedGraph, DVector<f64>) {
        let c4 = fixtures::cycle(4, 2);
        let mut w = DVector::zeros(4);
        for (edge, sign) in [([0, 1], 1.0), ([1, 2], 1.0), ([2, 3], 1.0), ([0, 3], -1.0)] {
            w[c4.index_of(VertexSet::from_vertices(&edge)).unwrap()] = sign * 0.5;
        }
        (c4.graph().clone(), w)
    }

    #[test]
    fn sampler_is_uniform_without_noise() {
        let c4 = fixtures::cycle(4, 2);
        let s = SimplexSampler::new(&c4, 1, 0.0).unwrap();
        assert!(s.probabilities().iter().all(|&p| (p - 0.25).abs() < 1e-15));
        let mut counts = [0usize; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40_000 {
            counts[s.sample_index(&mut rng)] += 1;
        }
        assert!(counts.iter().all(|&c| (c as f64 / 40_000.0 - 0.25).abs() < 0.01), "{counts:?}");
    }

    #[test]
    fn sampler_perturbation_has_requested_distance() {
        let c4 = fixtures::cycle(4, 2);
        let s = SimplexSampler::new(&c4, 1, 0.1).unwrap();
        assert!((s.tvd_from_uniform() - 0.1).abs() < 1e-12);
        let mut counts = [0usize; 4];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let draws = 100_000;
        for _ in 0..draws {
            counts[s.sample_index(&mut rng)] += 1;
        }
        let empirical = 0.5 * counts.iter().map(|&c| (c as f64 / draws as f64 - 0.25).abs()).sum::<f64>();
        assert!((empirical - 0.1).abs() < 0.01, "{empirical}");
    }

    #[test]
    fn sampler_rejects_empty_dimension() {
        let c4 = fixtures::cycle(4, 2);
        assert!(matches!(SimplexSampler::new(&c4, 2, 0.0), Err(Error::EmptyDimension { k: 2 })));
        assert!(uniform_simplex_sampler(&c4, 2, 0.0, 0).is_err());
    }

    #[test]
    fn sample_is_a_positive_simplex_of_the_complex() {
        let k4 = fixtures::complete(4, 3);
        for seed in 0..20 {
            let s = uniform_simplex_sampler(&k4, 1, 0.0, seed).unwrap();
            assert!(!s.negative);
            assert!(k4.contains(s.vertices));
            assert_eq!(s.vertices.len(), 2);
        }
    }

    #[test]
    fn hoeffding_sizing() {
        assert_eq!(hoeffding_samples(0.1, 0.05), 185);
        assert!(hoeffding_confidence(185, 0.1) >= 0.95);
    }

    #[test]
    fn betti_of_c4() {
        let c4 = fixtures::cycle(4, 2);
        let r = estimate_normalized_betti(&c4, 1, &EstimateOptions { epsilon: 0.05, ..Default::default() }).unwrap();
        assert_eq!(r.truth, Some(0.25));
        assert!((r.value - 0.25).abs() <= 0.05, "{}", r.value);
        assert!(r.confidence >= 0.95);
        assert!(r.samples_used >= 400);
    }

    #[test]
    fn betti_of_triangle_is_zero() {
        let k3 = fixtures::complete(3, 2);
        let r = estimate_normalized_betti(&k3, 1, &EstimateOptions::default()).unwrap();
        assert!(r.value <= 0.05, "{}", r.value);
    }

    #[test]
    fn betti_of_disjoint_union() {
        let g = fixtures::disjoint_union(&fixtures::cycle_graph(4), &fixtures::complete_graph(3));
        let x = CliqueComplex::build(g, 2).unwrap();
        let r = estimate_normalized_betti(&x, 1, &EstimateOptions { epsilon: 0.05, seed: 4, ..Default::default() }).unwrap();
        assert!((r.truth.unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert!((r.value - 1.0 / 7.0).abs() <= 0.05, "{}", r.value);
    }

    #[test]
    fn persistent_pairs() {
        let opts = EstimateOptions { epsilon: 0.05, ..Default::default() };
        let c4 = fixtures::cycle(4, 2);
        let k4 = fixtures::complete(4, 2);
        let r = estimate_normalized_persistent_betti(&c4, &k4, 1, 0.25, &opts).unwrap();
        assert_eq!(r.truth, Some(0.0));
        assert!(r.value <= r.epsilon);

        let r = estimate_normalized_persistent_betti(&c4, &c4, 1, 0.25, &opts).unwrap();
        assert_eq!(r.truth, Some(0.25));
        assert!((r.value - 0.25).abs() <= r.epsilon);

        let c5 = fixtures::cycle(5, 2);
        let chord = fixtures::cycle_with_chord(5, 2);
        let r = estimate_normalized_persistent_betti(&c5, &chord, 1, 0.25, &opts).unwrap();
        assert!((r.truth.unwrap() - 0.2).abs() < 1e-12);
        assert!((r.value - 0.2).abs() <= r.epsilon, "{}", r.value);
    }

    #[test]
    fn persistent_rejects_non_nested() {
        let k4 = fixtures::complete(4, 2);
        let c4 = fixtures::cycle(4, 2);
        let err = estimate_normalized_persistent_betti(&k4, &c4, 1, 0.25, &EstimateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NotNested(_)));
    }

    #[test]
    fn persistent_surfaces_gap_violation() {
        // the C5 cycle meets the chord triangle's boundary at cosine 2/√15 ≈ 0.516
        let c5 = fixtures::cycle(5, 2);
        let chord = fixtures::cycle_with_chord(5, 2);
        let err = estimate_normalized_persistent_betti(&c5, &chord, 1, 0.6, &EstimateOptions::default()).unwrap_err();
        assert!(matches!(err, Error::GapViolation { .. }), "{err:?}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn verifier_completeness() {
        let (g, w) = c4_harmonic_witness();
        let t = verify_promise_homology(&g, 1, 1.0, &w, 1e-6, 0).unwrap();
        assert!(t.p1 >= 1.0 - 1e-6, "{}", t.p1);
        assert_eq!(t.decision, Decision::Yes);
    }

    #[test]
    fn verifier_rejects_orthogonal_witness() {
        let (g, _) = c4_harmonic_witness();
        let c4 = fixtures::cycle(4, 2);
        // a coboundary is orthogonal to the harmonic cycle
        let mut w = DVector::zeros(4);
        w[c4.index_of(VertexSet::from_vertices(&[0, 1])).unwrap()] = 1.0 / 2f64.sqrt();
        w[c4.index_of(VertexSet::from_vertices(&[0, 3])).unwrap()] = 1.0 / 2f64.sqrt();
        let t = verify_promise_homology(&g, 1, 1.0, &w, 1e-6, 0).unwrap();
        assert!(t.p1 <= 1e-6, "{}", t.p1);
        assert_eq!(t.decision, Decision::No);
    }

    #[test]
    fn verifier_checks_inputs() {
        let (g, w) = c4_harmonic_witness();
        assert!(matches!(verify_promise_homology(&g, 1, 1.0, &(&w * 2.0), 1e-6, 0), Err(Error::NotNormalized(_))));
        let light = fixtures::reweighted(&g, vec![1.0, 1.0, 1.0, 1e-3]);
        let err = verify_promise_homology(&light, 1, 1.0, &w, 1e-6, 0).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    proptest! {
        #[test]
        fn triangle_soundness(v in proptest::collection::vec(-1.0f64..1.0, 3)) {
            let v = DVector::from_vec(v);
            prop_assume!(v.norm() > 1e-3);
            let w = &v / v.norm();
            let g = fixtures::complete_graph(3);
            let t = verify_promise_homology(&g, 1, 3.0, &w, 1e-6, 1).unwrap();
            prop_assert!(t.p1 <= 1e-6);
            prop_assert_eq!(t.decision, Decision::No);
        }

        #[test]
        fn perturbed_sampler_distance(tvd in 0.0f64..0.75) {
            let c4 = fixtures::cycle(4, 2);
            let s = SimplexSampler::new(&c4, 1, tvd).unwrap();
            prop_assert!((s.tvd_from_uniform() - tvd).abs() < 1e-12);
            prop_assert!((s.probabilities().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}
