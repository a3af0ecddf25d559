//! Acceptance report: one PASS/FAIL line per criterion and a summary. The
//! exit status stays zero so the rest of the test suite still runs; read the
//! lines, not the status.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use simplex_walk::apps::{self, Decision, EstimateOptions};
use simplex_walk::fixtures;
use simplex_walk::hodge::{self, boundary_matrix, combinatorial_laplacians, reoriented, SubspaceTarget};
use simplex_walk::linalg::{self, max_abs};
use simplex_walk::markov::{self, AppendixKind, WalkKind};
use simplex_walk::qsvt::{self, Band, ProjectorOptions, RectanglePolynomial};
use simplex_walk::quantum::{self, Tier};
use simplex_walk::{CliqueComplex, OrientedSimplex, VertexSet};

type Criterion = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn named_fixtures() -> Vec<(&'static str, CliqueComplex)> {
    vec![
        ("K3", fixtures::complete(3, 2)),
        ("C4", fixtures::cycle(4, 2)),
        ("C5", fixtures::cycle(5, 2)),
        ("C5+chord", fixtures::cycle_with_chord(5, 2)),
        ("tetrahedron", fixtures::tetrahedron_boundary()),
        ("K4", fixtures::complete(4, 3)),
        ("K5", fixtures::complete(5, 3)),
        (
            "C4+K3",
            CliqueComplex::build(fixtures::disjoint_union(&fixtures::cycle_graph(4), &fixtures::complete_graph(3)), 2).unwrap(),
        ),
    ]
}

fn criterion_1() -> Outcome {
    let mut worst_lap: f64 = 0.0;
    let mut worst_dd: f64 = 0.0;
    let mut worst_spec: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for trial in 0..50u64 {
        let n = rng.random_range(3..=8);
        let g = fixtures::random_graph(100 + trial, n, 0.6, (0.1, 1.0));
        let x = CliqueComplex::build(g, (n - 1).min(4)).unwrap();
        for k in 0..=x.k_max() {
            let lower = boundary_matrix(&x, k);
            let upper = boundary_matrix(&x, k + 1);
            let up = &upper.entries * upper.entries.transpose();
            let down = lower.entries.transpose() * &lower.entries;
            let (cup, cdown) = combinatorial_laplacians(&x, k);
            worst_lap = worst_lap.max(max_abs(&(&up - &cup))).max(max_abs(&(&down - &cdown)));
            if k >= 1 && lower.entries.nrows() > 0 && upper.entries.ncols() > 0 {
                worst_dd = worst_dd.max(max_abs(&(&lower.entries * &upper.entries)));
            }

            let flips = |len: usize, rng: &mut ChaCha8Rng| (0..len).map(|_| rng.random_bool(0.5)).collect::<Vec<_>>();
            let below = flips(x.count(k.saturating_sub(1)), &mut rng);
            let here = flips(x.count(k), &mut rng);
            let above = flips(if k < x.k_max() { x.count(k + 1) } else { 0 }, &mut rng);
            let lower_f = if k == 0 { lower.clone() } else { reoriented(&lower, &below, &here) };
            let upper_f = reoriented(&upper, &here, &above);
            let full = &up + &down;
            let full_f = &upper_f.entries * upper_f.entries.transpose() + lower_f.entries.transpose() * &lower_f.entries;
            let (a, _) = linalg::sym_eigen(&full);
            let (b, _) = linalg::sym_eigen(&full_f);
            worst_spec = worst_spec.max((a - b).amax());
        }
    }
    outcome(
        worst_lap <= 1e-12 && worst_dd <= 1e-12 && worst_spec <= 1e-9,
        format!("laplacian gap {worst_lap:.1e}, |dd| {worst_dd:.1e}, flip spectrum gap {worst_spec:.1e}"),
    )
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_dense: f64 = 0.0;
    let mut checked = 0;
    for (_, x) in named_fixtures() {
        for k in 0..x.k_max() {
            if x.count(k) == 0 {
                continue;
            }
            let lap = hodge::laplacians(&x, k).unwrap();
            for kind in WalkKind::ALL {
                let Ok(walk) = quantum::walk_unitary(&x, k, kind, Tier::Oracle, 0.0) else { continue };
                let enc = quantum::laplacian_encoding(&x, &walk).unwrap();
                let target = lap.for_kind(kind) / (std::f64::consts::SQRT_2 * walk.normalization);
                worst = worst.max(max_abs(&(&enc.block - &target)));
                if let Some(dense) = enc.dense_block() {
                    worst_dense = worst_dense.max(max_abs(&(dense - &target)));
                }
                checked += 1;
            }
        }
    }
    let k3 = fixtures::complete(3, 2);
    let h = quantum::laplacian_encoding(&k3, &quantum::walk_unitary(&k3, 1, WalkKind::Harmonic, Tier::Oracle, 0.0).unwrap()).unwrap();
    let k3_err = max_abs(&(&h.block - DMatrix::identity(3, 3) * (3.0 / (5.0 * std::f64::consts::SQRT_2))));
    outcome(
        worst <= 1e-10 && worst_dense <= 1e-10 && k3_err <= 1e-10 && checked > 0,
        format!("{checked} encodings, block error {worst:.1e}, dense HZ error {worst_dense:.1e}, K3 3/(5√2)·I error {k3_err:.1e}"),
    )
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    (m * sxy - sx * sy) / (m * sxx - sx * sx)
}

fn criterion_3() -> Outcome {
    let mut complexes = Vec::new();
    for n in 3..=7 {
        let top = (n - 1).min(4);
        complexes.push(fixtures::complete(n, top));
        if n >= 4 {
            complexes.push(fixtures::cycle_with_chord(n, top));
        }
        complexes.push(CliqueComplex::build(fixtures::random_graph(n as u64, n, 0.7, (0.1, 1.0)), top).unwrap());
    }
    let mut exact: f64 = 0.0;
    let mut noisy_ratio: f64 = 0.0;
    let mut cases = 0;
    for x in &complexes {
        for k in 0..=3.min(x.k_max() - 1) {
            if x.count(k) == 0 {
                continue;
            }
            for kind in WalkKind::ALL {
                let Ok(chain) = markov::transition_matrix(x, k, kind) else { continue };
                let target = chain.simplex_block();
                let walk = quantum::walk_unitary(x, k, kind, Tier::Circuit, 0.0).unwrap();
                exact = exact.max(max_abs(&(walk.block() - &target)));
                for delta in [1e-3, 1e-6] {
                    let noisy = quantum::walk_unitary(x, k, kind, Tier::Circuit, delta).unwrap();
                    noisy_ratio = noisy_ratio.max(max_abs(&(noisy.block() - &target)) / delta);
                }
                cases += 1;
            }
        }
    }
    let mut fits = Vec::new();
    for kind in WalkKind::ALL {
        for eps in [1e-3, 1e-6] {
            let pts: Vec<(f64, f64)> = (4..=10)
                .map(|n| ((n as f64).ln(), (quantum::operation_count(kind, n, 1, eps).total() as f64).ln()))
                .collect();
            fits.push((kind, eps, slope(&pts)));
        }
    }
    let fits_ok = fits.iter().all(|f| (f.2 - 2.0).abs() <= 0.3);
    let fit_text: Vec<String> = fits.iter().map(|(k, e, s)| format!("{k}@{e:.0e}={s:.2}")).collect();
    outcome(
        exact <= 1e-10 && noisy_ratio <= 10.0 && fits_ok && cases > 0,
        format!(
            "{cases} walks, exact error {exact:.1e}, noisy error/δ {noisy_ratio:.2}, exponent fits (k=1) {}",
            fit_text.join(" ")
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut worst_c: f64 = 0.0;
    let mut failures = Vec::new();
    let mut cases = 0;
    for t in [0.1, 0.25, 0.5, 0.75] {
        for delta in [0.02, 0.05, 0.1] {
            if t - delta <= 0.0 || t + delta >= 1.0 {
                continue;
            }
            for eps in [1e-2, 1e-4, 1e-6, 1e-8] {
                for band in [Band::Pass, Band::Stop] {
                    cases += 1;
                    match RectanglePolynomial::new(t, delta, eps, band).and_then(|p| p.certify().map(|_| p)) {
                        Ok(p) => worst_c = worst_c.max(p.degree_constant()),
                        Err(e) => failures.push(format!("t={t} δ={delta} ε={eps:e}: {e}")),
                    }
                }
            }
        }
    }
    let c = qsvt::RECTANGLE_DEGREE_CONSTANT;
    outcome(
        failures.is_empty() && worst_c <= c,
        format!("{cases} polynomials certified on {} points, max degree·δ/ln(1/ε) = {worst_c:.2} (C = {c}), failures: {failures:?}", qsvt::CHECK_GRID),
    )
}

fn criterion_5() -> Outcome {
    let cases = [
        ("C4", fixtures::cycle(4, 2), 1),
        ("K3", fixtures::complete(3, 2), 1),
        ("tetrahedron", fixtures::tetrahedron_boundary(), 1),
        ("tetrahedron", fixtures::tetrahedron_boundary(), 2),
    ];
    let options = ProjectorOptions { allow_zero_laplacian: true, ..Default::default() };
    let mut worst_ratio: f64 = 0.0;
    let mut degree_ok = true;
    let mut count = 0;
    for (_, x, k) in &cases {
        for target in SubspaceTarget::ALL {
            for eps in [1e-3, 1e-6] {
                let p = qsvt::projector_encoding(x, *k, target, eps, options).unwrap();
                let exact = qsvt::exact_target_projector(x, *k, target).unwrap();
                worst_ratio = worst_ratio.max(linalg::spectral_norm(&(&p.block - &exact)) / eps);
                if p.degree_used > 0 {
                    degree_ok &= (p.degree_used as f64) <= qsvt::projector_degree_bound(p.normalization, p.lambda, eps);
                }
                count += 1;
            }
        }
    }
    outcome(
        worst_ratio <= 1.0 && degree_ok,
        format!("{count} projectors, max ‖Π̃ − Π‖/ε = {worst_ratio:.3}, degree within C·K·ln(1/ε)/λ: {degree_ok}"),
    )
}

fn criterion_6() -> Outcome {
    let c4 = fixtures::cycle(4, 2);
    let runs = 200;
    let hits = (0..runs)
        .filter(|&seed| {
            let opts = EstimateOptions { epsilon: 0.1, seed, with_truth: false, ..Default::default() };
            let r = apps::estimate_normalized_betti(&c4, 1, &opts).unwrap();
            (r.value - 0.25).abs() <= 0.1
        })
        .count();
    let k3 = fixtures::complete(3, 2);
    let k3_value = apps::estimate_normalized_betti(&k3, 1, &EstimateOptions { epsilon: 0.05, ..Default::default() }).unwrap().value;
    let union = CliqueComplex::build(fixtures::disjoint_union(&fixtures::cycle_graph(4), &fixtures::complete_graph(3)), 2).unwrap();
    let mut worst_shift: f64 = 0.0;
    for x in [&c4, &union] {
        for seed in 0..10 {
            let base = EstimateOptions { epsilon: 0.1, seed, ..Default::default() };
            let a = apps::estimate_normalized_betti(x, 1, &base).unwrap().value;
            let b = apps::estimate_normalized_betti(x, 1, &EstimateOptions { sampler_tvd: 0.1, ..base }).unwrap().value;
            worst_shift = worst_shift.max((a - b).abs());
        }
    }
    let rate = hits as f64 / runs as f64;
    outcome(
        rate >= 0.95 && k3_value <= 0.05 && worst_shift <= 0.2,
        format!("C4 hit rate {rate:.3}, K3 estimate {k3_value:.4}, max shift from δ_sampler=0.1: {worst_shift:.3}"),
    )
}

fn criterion_7() -> Outcome {
    let c4 = fixtures::cycle(4, 2);
    let k4 = fixtures::complete(4, 2);
    let c5 = fixtures::cycle(5, 2);
    let chord = fixtures::cycle_with_chord(5, 2);
    let union = CliqueComplex::build(fixtures::disjoint_union(&fixtures::cycle_graph(4), &fixtures::complete_graph(3)), 2).unwrap();
    let pairs = [
        ("(C4,K4)", &c4, &k4, 0.0),
        ("(C5,C5+chord)", &c5, &chord, 0.2),
        ("(C4,C4)", &c4, &c4, 0.25),
        ("(C5,C5)", &c5, &c5, 0.2),
        ("(K4,K4)", &k4, &k4, 0.0),
        ("(C4+K3,C4+K3)", &union, &union, 1.0 / 7.0),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, small, large, expected) in pairs {
        let opts = EstimateOptions { epsilon: 0.05, seed: 11, ..Default::default() };
        match apps::estimate_normalized_persistent_betti(small, large, 1, 0.25, &opts) {
            Ok(r) => {
                let truth = r.truth.unwrap();
                let ok = (truth - expected).abs() < 1e-12 && (r.value - truth).abs() <= r.epsilon;
                pass &= ok;
                parts.push(format!("{name} {:.3} vs {truth:.3}", r.value));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("{name} error {e}"));
            }
        }
    }
    outcome(pass, parts.join(", "))
}

fn criterion_8() -> Outcome {
    let c4 = fixtures::cycle(4, 2);
    let mut w = DVector::zeros(4);
    for (edge, sign) in [([0, 1], 1.0), ([1, 2], 1.0), ([2, 3], 1.0), ([0, 3], -1.0)] {
        w[c4.index_of(VertexSet::from_vertices(&edge)).unwrap()] = sign * 0.5;
    }
    let yes = apps::verify_promise_homology(c4.graph(), 1, 1.0, &w, 1e-6, 0).unwrap();
    let k3 = fixtures::complete_graph(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_no: f64 = 0.0;
    let mut no_decisions = 0;
    for seed in 0..100 {
        let v = DVector::from_fn(3, |_, _| rng.random_range(-1.0..1.0));
        let v = &v / v.norm();
        let t = apps::verify_promise_homology(&k3, 1, 3.0, &v, 1e-6, seed).unwrap();
        worst_no = worst_no.max(t.p1);
        no_decisions += usize::from(t.decision == Decision::No);
    }
    outcome(
        yes.p1 >= 1.0 - 1e-6 && yes.decision == Decision::Yes && worst_no <= 1e-6,
        format!("C4 YES p1 = {:.9}, K3 NO max p1 = {worst_no:.1e} ({no_decisions}/100 rejected)", yes.p1),
    )
}

fn criterion_9() -> Outcome {
    let mut parts = Vec::new();
    let mut pass = true;
    for (name, x) in [("K3", fixtures::complete(3, 2)), ("tetrahedron", fixtures::tetrahedron_boundary())] {
        let k = 1;
        let lap = hodge::laplacians(&x, k).unwrap();
        let n_k = x.count(k);
        let mut worst: f64 = 0.0;
        for p in [0.0, 0.25, 0.5] {
            let chain = markov::appendix_walk_matrix(&x, k, AppendixKind::UpPs17, p).unwrap();
            let scaling = markov::table2_scaling(AppendixKind::UpPs17, k, p, 0);
            let start = OrientedSimplex::positive(x.basis(k)[0]);
            let trace = markov::expectation_process(&chain, start, &x, 20, p, scaling).unwrap();
            let update = DMatrix::identity(n_k, n_k) - &lap.up * ((1.0 - p) / (p * k as f64 + 1.0));
            for t in 0..20 {
                worst = worst.max((&update * &trace.normalized[t] - &trace.normalized[t + 1]).amax());
            }
        }
        pass &= worst <= 1e-10;
        parts.push(format!("{name} max residual {worst:.2e}"));
    }
    outcome(pass, parts.join(", "))
}

fn main() {
    let criteria: [(&str, Criterion); 9] = [
        ("Laplacian consistency", criterion_1),
        ("encoding identities", criterion_2),
        ("circuit-tier fidelity", criterion_3),
        ("rectangle polynomial", criterion_4),
        ("projector synthesis", criterion_5),
        ("Betti estimation", criterion_6),
        ("persistent Betti", criterion_7),
        ("verifier", criterion_8),
        ("expectation process update", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        let status = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed.push((i + 1).to_string());
        }
        println!("criterion {} {status} {name} ({:.1}s): {}", i + 1, start.elapsed().as_secs_f64(), result.detail);
    }
    if failed.is_empty() {
        println!("acceptance: 9 of 9 criteria passed");
    } else {
        println!("acceptance: {} of 9 criteria passed; FAILED: {}", 9 - failed.len(), failed.join(", "));
    }
}
