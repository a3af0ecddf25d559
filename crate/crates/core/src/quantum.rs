//! Walk unitaries and the HZ-interference Laplacian encodings.
//!
//! A walk unitary is stored by its action on the input states
//! `|σ⟩|0…0⟩|anc=0⟩`, one sparse column per state of `S_k`. Every column is a
//! superposition of computational basis states of the form
//! `|system⟩|aux⟩|anc_i⟩|anc_j⟩|tag⟩`. The SWAP sandwich `U†·SWAP·U` is then
//! evaluated exactly on input states without ever forming the full register
//! space. For small instances a dense unitary is also built on the closure of
//! the reachable basis states under SWAP and the orientation flip, completed
//! by an orthonormal complement.

use std::collections::{BTreeSet, HashMap};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{CliqueComplex, OrientedSimplexLabel, VertexSet};
use crate::error::Result;
use crate::hodge::laplacians;
use crate::linalg;
use crate::markov::{normalization_constant, transition_matrix, StateSpace, TransitionMatrix, WalkKind};

/// Largest closure dimension for which a dense unitary is materialized.
pub const DENSE_LIMIT: usize = 1200;

/// Tag value of the slack branch that completes a column to unit norm.
const SLACK_TAG: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CircuitBasis {
    pub system: OrientedSimplexLabel,
    pub aux: OrientedSimplexLabel,
    /// Index registers hold `vertex + 1`; `0` is the blank value.
    pub anc_i: u8,
    pub anc_j: u8,
    pub tag: u8,
}

impl CircuitBasis {
    pub fn input(system: OrientedSimplexLabel) -> Self {
        Self { system, aux: OrientedSimplexLabel::ZERO, anc_i: 0, anc_j: 0, tag: 0 }
    }

    /// SWAP exchanges the two walk registers and the two index registers.
    pub fn swapped(self) -> Self {
        Self { system: self.aux, aux: self.system, anc_i: self.anc_j, anc_j: self.anc_i, tag: self.tag }
    }

    /// Flip of the system orientation bit (the qubit HZ acts on).
    pub fn flipped(self) -> Self {
        Self { system: self.system.flipped(), ..self }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    Oracle,
    Circuit,
}

impl std::str::FromStr for Tier {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Tier::Oracle),
            "circuit" => Ok(Tier::Circuit),
            _ => Err(crate::Error::InvalidArgument(format!("unknown tier {s:?}"))),
        }
    }
}

/// The unitary's action on each input state, as sparse columns.
#[derive(Clone, Debug)]
pub struct Isometry {
    pub inputs: Vec<OrientedSimplexLabel>,
    pub columns: Vec<Vec<(CircuitBasis, f64)>>,
}

impl Isometry {
    /// `⟨in_a|U†·SWAP·U|in_b⟩` for all input pairs.
    pub fn sandwich(&self) -> DMatrix<f64> {
        let index: HashMap<OrientedSimplexLabel, usize> =
            self.inputs.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        let maps: Vec<HashMap<CircuitBasis, f64>> =
            self.columns.iter().map(|c| c.iter().copied().collect()).collect();
        let m = self.inputs.len();
        let mut w = DMatrix::zeros(m, m);
        for (b, column) in self.columns.iter().enumerate() {
            for &(basis, amp) in column {
                let swapped = basis.swapped();
                if let Some(&a) = index.get(&swapped.system) {
                    if let Some(&other) = maps[a].get(&swapped) {
                        w[(a, b)] += other * amp;
                    }
                }
            }
        }
        w
    }

    /// Largest deviation of a column norm from one.
    pub fn column_norm_error(&self) -> f64 {
        self.columns
            .iter()
            .map(|c| (c.iter().map(|(_, a)| a * a).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Dense form on the closure of reachable states, or `None` when the
    /// closure exceeds `limit`.
    pub fn dense(&self, limit: usize) -> Option<DenseDilation> {
        let mut closure: BTreeSet<CircuitBasis> = BTreeSet::new();
        let mut frontier: Vec<CircuitBasis> = self.inputs.iter().map(|&l| CircuitBasis::input(l)).collect();
        frontier.extend(self.columns.iter().flatten().map(|(b, _)| *b));
        while let Some(b) = frontier.pop() {
            if closure.insert(b) {
                if closure.len() > limit {
                    return None;
                }
                frontier.push(b.swapped());
                frontier.push(b.flipped());
            }
        }
        let basis: Vec<CircuitBasis> = closure.into_iter().collect();
        let position: HashMap<CircuitBasis, usize> = basis.iter().enumerate().map(|(i, &b)| (b, i)).collect();
        let d = basis.len();
        let m = self.inputs.len();
        let mut known = DMatrix::zeros(d, m);
        for (c, column) in self.columns.iter().enumerate() {
            for &(b, amp) in column {
                known[(position[&b], c)] += amp;
            }
        }
        // Householder QR of the known columns; the trailing columns of the full
        // Q span the orthogonal complement.
        let qr = known.clone().qr();
        let mut q_full = DMatrix::identity(d, d);
        qr.q_tr_mul(&mut q_full);
        let q_full = q_full.transpose();
        let input_positions: Vec<usize> = self.inputs.iter().map(|&l| position[&CircuitBasis::input(l)]).collect();
        let mut unitary = DMatrix::zeros(d, d);
        for (c, &p) in input_positions.iter().enumerate() {
            unitary.set_column(p, &known.column(c));
        }
        let is_input: BTreeSet<usize> = input_positions.iter().copied().collect();
        let free = (0..d).filter(|p| !is_input.contains(p));
        for (offset, p) in free.enumerate() {
            unitary.set_column(p, &q_full.column(m + offset));
        }
        let swap = DMatrix::from_fn(d, d, |r, c| f64::from(u8::from(position[&basis[c].swapped()] == r)));
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut hz = DMatrix::zeros(d, d);
        for (c, b) in basis.iter().enumerate() {
            // HZ|0⟩ = (|0⟩+|1⟩)/√2, HZ|1⟩ = (−|0⟩+|1⟩)/√2 on the system orientation bit
            hz[(c, c)] = h;
            hz[(position[&b.flipped()], c)] = if b.system.s { -h } else { h };
        }
        let sandwich = unitary.transpose() * swap * &unitary;
        let interfered = &hz * &sandwich;
        Some(DenseDilation { basis, input_positions, unitary, sandwich, interfered })
    }
}

/// Dense unitaries on the closure of reachable basis states.
#[derive(Clone, Debug)]
pub struct DenseDilation {
    pub basis: Vec<CircuitBasis>,
    /// Position of each input state in `basis`.
    pub input_positions: Vec<usize>,
    /// The completed walk unitary `U`.
    pub unitary: DMatrix<f64>,
    /// `U†·SWAP·U`.
    pub sandwich: DMatrix<f64>,
    /// `(HZ ⊗ I)·U†·SWAP·U`.
    pub interfered: DMatrix<f64>,
}

/// Witness of an operator `A` with `A ≈ scale · (Π⊗⟨0|) U (Π⊗|0⟩)`.
#[derive(Clone, Debug)]
pub struct BlockEncodedOperator {
    /// Dense `U` on the reachable subspace, when small enough to form.
    pub unitary: Option<DMatrix<f64>>,
    /// Positions of the domain states `|σ⟩|0⟩` in `unitary`.
    pub domain: Vec<usize>,
    /// The encoded block, computed exactly on input states.
    pub block: DMatrix<f64>,
    pub scale: f64,
    pub ancilla_qubits: usize,
    pub err: f64,
}

impl BlockEncodedOperator {
    /// The block read off the dense unitary (when present).
    pub fn dense_block(&self) -> Option<DMatrix<f64>> {
        let u = self.unitary.as_ref()?;
        let d = self.domain.len();
        Some(DMatrix::from_fn(d, d, |r, c| u[(self.domain[r], self.domain[c])]))
    }

    pub fn unitarity_error(&self) -> Option<f64> {
        let u = self.unitary.as_ref()?;
        let n = u.nrows();
        Some(linalg::max_abs(&(u.transpose() * u - DMatrix::identity(n, n))))
    }

    /// `‖A − scale·block‖` in spectral norm.
    pub fn encoding_error(&self, target: &DMatrix<f64>) -> f64 {
        linalg::spectral_norm(&(target - &self.block * self.scale))
    }
}

/// Primitive-operation tally for one application of a walk circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OperationCount {
    /// Bit scans locating the i-th 0 or 1 of a register.
    pub position_scans: u64,
    /// Controlled reads of vertex weights while computing rotation angles.
    pub weight_lookups: u64,
    /// Single-qubit rotations of the amplitude preparation, at `t` bits each.
    pub rotations: u64,
    /// CNOTs copying the system register.
    pub copies: u64,
    /// Controlled bit flips `x ↦ x ⊕ e_u`.
    pub controlled_flips: u64,
    /// CNOTs accumulating orientation parities.
    pub parity: u64,
    /// Vertex-pair adjacency checks of the membership oracle.
    pub membership_pairs: u64,
    /// Gates undoing ancilla work.
    pub uncompute: u64,
}

impl OperationCount {
    pub fn total(&self) -> u64 {
        self.position_scans
            + self.weight_lookups
            + self.rotations
            + self.copies
            + self.controlled_flips
            + self.parity
            + self.membership_pairs
            + self.uncompute
    }
}

fn ceil_log2(x: f64) -> u64 {
    x.log2().ceil().max(1.0) as u64
}

/// Gate-count model of the three circuits on `n` vertices in dimension `k`
/// at amplitude precision `eps`.
pub fn operation_count(kind: WalkKind, n: usize, k: usize, eps: f64) -> OperationCount {
    let (n64, k64) = (n as u64, k as u64);
    let m = ceil_log2(n as f64 + 1.0);
    let t = ceil_log2(1.0 / eps) + ceil_log2(n as f64);
    let zeros = n64 - k64 - 1;
    let ones = k64 + 1;
    let pairs = n64 * (n64 - 1) / 2;
    let (first, second, branches, membership_checks) = match kind {
        // i ranges over zeros, j over the k+2 vertices of the coface
        WalkKind::Up => (zeros, k64 + 2, zeros * (k64 + 2), 1),
        // i ranges over ones, j over the n-k zeros of the face
        WalkKind::Down => (ones, n64 - k64, ones * (n64 - k64), 1),
        // adjacency pairs plus the two degree branches; two membership calls
        WalkKind::Harmonic => (ones, zeros, ones * zeros + zeros + ones, 2),
    };
    let mut c = OperationCount {
        position_scans: first * n64 + first * second * n64,
        weight_lookups: 2 * branches * n64,
        rotations: (branches + first + 1) * t,
        copies: n64 + 2,
        controlled_flips: 2 * n64,
        parity: 2 * n64 * m,
        membership_pairs: membership_checks * pairs,
        uncompute: 0,
    };
    c.uncompute = c.position_scans + c.weight_lookups + c.parity + c.membership_pairs;
    c
}

/// A walk unitary together with its exact SWAP-sandwich block.
#[derive(Clone, Debug)]
pub struct WalkUnitary {
    pub kind: WalkKind,
    pub tier: Tier,
    pub k: usize,
    pub space: StateSpace,
    pub normalization: f64,
    pub prep_err: f64,
    pub isometry: Isometry,
    /// `U†·SWAP·U` on the input states (including `Θ`).
    pub sandwich: DMatrix<f64>,
    pub cost: Option<OperationCount>,
    pub ancilla_qubits: usize,
}

impl WalkUnitary {
    #[allow(clippy::too_many_arguments)]
    fn new(
        kind: WalkKind,
        tier: Tier,
        k: usize,
        space: StateSpace,
        normalization: f64,
        prep_err: f64,
        isometry: Isometry,
        cost: Option<OperationCount>,
        ancilla_qubits: usize,
    ) -> Self {
        let sandwich = isometry.sandwich();
        Self { kind, tier, k, space, normalization, prep_err, isometry, sandwich, cost, ancilla_qubits }
    }

    /// The `X±_k` block of the sandwich, which approximates `Π± P Π±`.
    pub fn block(&self) -> DMatrix<f64> {
        let m = 2 * self.space.n_k;
        self.sandwich.view((0, 0), (m, m)).into_owned()
    }

    pub fn dense(&self) -> Option<DenseDilation> {
        self.isometry.dense(DENSE_LIMIT)
    }

    /// `U†·SWAP·U` as a block encoding of `Π± P Π±` (scale 1).
    pub fn transition_encoding(&self) -> BlockEncodedOperator {
        let dense = self.dense();
        let m = 2 * self.space.n_k;
        BlockEncodedOperator {
            domain: dense.as_ref().map_or_else(Vec::new, |d| d.input_positions[..m].to_vec()),
            unitary: dense.map(|d| d.sandwich),
            block: self.block(),
            scale: 1.0,
            ancilla_qubits: self.ancilla_qubits,
            err: 0.0,
        }
    }
}

fn input_labels(complex: &CliqueComplex, space: StateSpace, k: usize) -> Vec<OrientedSimplexLabel> {
    (0..space.dim()).map(|s| space.label(complex, k, s)).collect()
}

/// Szegedy dilation `|σ⟩|0⟩ ↦ Σ_σ' √P_σσ' |σ⟩|σ'⟩`.
pub fn szegedy_dilation(complex: &CliqueComplex, chain: &TransitionMatrix) -> WalkUnitary {
    let space = chain.space;
    let inputs = input_labels(complex, space, chain.k);
    let columns = (0..space.dim())
        .map(|a| {
            let system = inputs[a];
            chain
                .row_entries(a)
                .into_iter()
                .map(|(b, p)| (CircuitBasis { aux: inputs[b], ..CircuitBasis::input(system) }, p.sqrt()))
                .collect()
        })
        .collect();
    let kind = match chain.kind {
        crate::markov::ChainKind::Walk(kind) => kind,
        crate::markov::ChainKind::Appendix(_) => WalkKind::Up,
    };
    let isometry = Isometry { inputs, columns };
    WalkUnitary::new(kind, Tier::Oracle, chain.k, space, chain.normalization, 0.0, isometry, None, complex.n() + 2)
}

/// Oracle-tier walk unitary for one of the three walks.
pub fn oracle_walk(complex: &CliqueComplex, k: usize, kind: WalkKind) -> Result<WalkUnitary> {
    Ok(szegedy_dilation(complex, &transition_matrix(complex, k, kind)?))
}

/// `P(i, σ)`: parity of the members of `x` before position `u`.
fn prefix_parity(x: VertexSet, u: usize) -> bool {
    x.count_below(u) % 2 == 1
}

fn index_register(v: usize) -> u8 {
    u8::try_from(v + 1).expect("vertex index fits the index register")
}

/// Accumulates the branches of one column, then applies the amplitude
/// preparation error and the slack completion.
struct ColumnBuilder<'a> {
    system: OrientedSimplexLabel,
    branches: Vec<(CircuitBasis, f64)>,
    rng: &'a mut ChaCha8Rng,
}

impl ColumnBuilder<'_> {
    fn push(&mut self, aux: OrientedSimplexLabel, anc_i: usize, anc_j: usize, tag: u8, amp: f64) {
        let basis = CircuitBasis { system: self.system, aux, anc_i: index_register(anc_i), anc_j: index_register(anc_j), tag };
        self.branches.push((basis, amp));
    }

    fn finish(mut self, prep_err: f64) -> Vec<(CircuitBasis, f64)> {
        if prep_err > 0.0 {
            for (_, amp) in &mut self.branches {
                *amp *= 1.0 + prep_err * self.rng.random_range(-1.0..=1.0);
            }
        }
        let mass: f64 = self.branches.iter().map(|(_, a)| a * a).sum();
        if mass > 1.0 {
            let norm = mass.sqrt();
            for (_, amp) in &mut self.branches {
                *amp /= norm;
            }
        } else if mass < 1.0 {
            let slack = CircuitBasis { aux: OrientedSimplexLabel::ABSORBING, tag: SLACK_TAG, ..CircuitBasis::input(self.system) };
            self.branches.push((slack, (1.0 - mass).sqrt()));
        }
        self.branches
    }
}

fn circuit_walk(
    complex: &CliqueComplex,
    k: usize,
    kind: WalkKind,
    prep_err: f64,
    column: impl Fn(&mut ColumnBuilder<'_>, VertexSet, bool, f64),
) -> Result<WalkUnitary> {
    let big_k = normalization_constant(complex, k, kind)?;
    let space = StateSpace { n_k: complex.count(k) };
    let inputs = input_labels(complex, space, k);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151_ca1e);
    let mut columns = Vec::with_capacity(inputs.len());
    for &system in &inputs {
        if system.is_absorbing() {
            let theta = CircuitBasis { aux: OrientedSimplexLabel::ABSORBING, ..CircuitBasis::input(system) };
            columns.push(vec![(theta, 1.0)]);
            continue;
        }
        let mut builder = ColumnBuilder { system, branches: Vec::new(), rng: &mut rng };
        column(&mut builder, system.x, system.s, big_k);
        columns.push(builder.finish(prep_err));
    }
    let isometry = Isometry { inputs, columns };
    let n = complex.n();
    let m = ceil_log2(n as f64 + 1.0) as usize;
    let eps = if prep_err > 0.0 { prep_err } else { f64::EPSILON };
    let cost = operation_count(kind, n, k, eps);
    Ok(WalkUnitary::new(kind, Tier::Circuit, k, space, big_k, prep_err, isometry, Some(cost), n + 2 + 2 * m + 2))
}

fn target(complex: &CliqueComplex, x: VertexSet, s: bool) -> OrientedSimplexLabel {
    if complex.membership(x) == 0 {
        OrientedSimplexLabel { x, s, theta: false }
    } else {
        OrientedSimplexLabel::ABSORBING
    }
}

/// Up walk by going up to a coface and back down: pick the i-th absent
/// vertex `u`, flip it in, pick the j-th vertex `v` of the coface, flip it
/// out. The orientation picks up `P(i,σ)` on the way up and `j mod 2` on the
/// way down; a non-member coface sends the branch to `Θ`.
pub fn build_updown_circuit(complex: &CliqueComplex, k: usize, prep_err: f64) -> Result<WalkUnitary> {
    circuit_walk(complex, k, WalkKind::Up, prep_err, |col, x, s, big_k| {
        let w = |v: usize| complex.weight(v);
        for u in (0..complex.n()).filter(|&u| !x.contains(u)) {
            let up = x.toggled(u);
            let s_up = s ^ prefix_parity(x, u);
            let member = complex.membership(up) == 0;
            for (j, v) in up.iter().enumerate() {
                let aux = if member { target(complex, up.toggled(v), s_up ^ (j % 2 == 1)) } else { OrientedSimplexLabel::ABSORBING };
                col.push(aux, u, v, 0, (w(u) * w(v) / big_k).sqrt());
            }
        }
    })
}

/// Down walk by going down to a face and back up: drop the i-th vertex `v`
/// (orientation picks up `i mod 2`), add the j-th absent vertex `u` of the
/// face (orientation picks up `P(j, face)`), then test membership of the
/// result.
pub fn build_downup_circuit(complex: &CliqueComplex, k: usize, prep_err: f64) -> Result<WalkUnitary> {
    circuit_walk(complex, k, WalkKind::Down, prep_err, |col, x, s, big_k| {
        let w = |v: usize| complex.weight(v);
        for (i, v) in x.iter().enumerate() {
            let face = x.toggled(v);
            let s_face = s ^ (i % 2 == 1);
            for u in (0..complex.n()).filter(|&u| !face.contains(u)) {
                let aux = target(complex, face.toggled(u), s_face ^ prefix_parity(face, u));
                col.push(aux, v, u, 0, (w(v) * w(u) / big_k).sqrt());
            }
        }
    })
}

/// Harmonic walk as three branches: lateral moves through a common face that
/// are accepted only when the pair has no common coface (tag 0), and the two
/// diagonal contributions from the up degree (tag 1) and down degree (tag 2).
pub fn build_harmonic_circuit(complex: &CliqueComplex, k: usize, prep_err: f64) -> Result<WalkUnitary> {
    circuit_walk(complex, k, WalkKind::Harmonic, prep_err, |col, x, s, big_k| {
        let w = |v: usize| complex.weight(v);
        let here = OrientedSimplexLabel { x, s, theta: false };
        let f = |y: VertexSet| complex.membership(y);
        for (i, v) in x.iter().enumerate() {
            for u in (0..complex.n()).filter(|&u| !x.contains(u)) {
                let face = x.toggled(v);
                let moved = face.toggled(u);
                let s_moved = s ^ (i % 2 == 1) ^ prefix_parity(face, u);
                // flag is 0 exactly when the move lands in X and the pair has no coface
                let flag = f(moved) ^ f(x.toggled(u)) ^ 1;
                let aux = if flag == 0 { OrientedSimplexLabel { x: moved, s: s_moved, theta: false } } else { OrientedSimplexLabel::ABSORBING };
                col.push(aux, v, u, 0, (w(u) * w(v) / big_k).sqrt());
            }
        }
        for u in (0..complex.n()).filter(|&u| !x.contains(u)) {
            let aux = if f(x.toggled(u)) == 0 { here } else { OrientedSimplexLabel::ABSORBING };
            col.push(aux, u, u, 1, w(u) / big_k.sqrt());
        }
        for v in x.iter() {
            col.push(here, v, v, 2, w(v) / big_k.sqrt());
        }
    })
}

/// Circuit-tier walk unitary of the given kind.
pub fn circuit_walk_of_kind(complex: &CliqueComplex, k: usize, kind: WalkKind, prep_err: f64) -> Result<WalkUnitary> {
    match kind {
        WalkKind::Up => build_updown_circuit(complex, k, prep_err),
        WalkKind::Down => build_downup_circuit(complex, k, prep_err),
        WalkKind::Harmonic => build_harmonic_circuit(complex, k, prep_err),
    }
}

pub fn walk_unitary(complex: &CliqueComplex, k: usize, kind: WalkKind, tier: Tier, prep_err: f64) -> Result<WalkUnitary> {
    match tier {
        Tier::Oracle => oracle_walk(complex, k, kind),
        Tier::Circuit => circuit_walk_of_kind(complex, k, kind, prep_err),
    }
}

/// HZ on the system orientation bit, read on positively oriented inputs:
/// the block is `(W_{y+,x+} − W_{y−,x+})/√2`, which is `Δ/(√2K)`.
pub fn laplacian_encoding(complex: &CliqueComplex, walk: &WalkUnitary) -> Result<BlockEncodedOperator> {
    let n_k = walk.space.n_k;
    let w = &walk.sandwich;
    let block = DMatrix::from_fn(n_k, n_k, |y, x| (w[(y, x)] - w[(y + n_k, x)]) * std::f64::consts::FRAC_1_SQRT_2);
    let scale = std::f64::consts::SQRT_2 * walk.normalization;
    let dense = walk.dense();
    let lap = laplacians(complex, walk.k)?;
    let target = lap.for_kind(walk.kind);
    let mut encoding = BlockEncodedOperator {
        domain: dense.as_ref().map_or_else(Vec::new, |d| d.input_positions[..n_k].to_vec()),
        unitary: dense.map(|d| d.interfered),
        block,
        scale,
        ancilla_qubits: walk.ancilla_qubits,
        err: 0.0,
    };
    encoding.err = encoding.encoding_error(target);
    Ok(encoding)
}
