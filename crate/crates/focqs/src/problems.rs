//! Benchmark instance generators and the exact brute-force solver.
//!
//! Two families: all-to-all Ising spin glasses with couplings uniform on
//! [-1, 1], and weighted maximum-independent-set instances on connected
//! Erdos-Renyi graphs encoded with penalty terms. Generation is a pure
//! function of (n, seed, params): the seed keys a ChaCha8 stream cipher
//! generator, with stream 0 used for couplings/edges and stream 1 for
//! node weights, so draws are portable across platforms and runs.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::pauli::{transverse_field_mixer, Axis, PauliSum, PauliTerm, TermRecord};

pub const MIN_QUBITS: usize = 2;
pub const MAX_QUBITS: usize = 24;
pub const DEFAULT_PENALTY_WEIGHT: f64 = 2.0;
pub const FORMAT_VERSION: u32 = 1;
const CONNECTIVITY_RESAMPLE_CAP: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Ising,
    Mis,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Ising => write!(f, "ising"),
            ProblemKind::Mis => write!(f, "mis"),
        }
    }
}

/// Kind-specific generation record, kept alongside the operators so
/// instance files are self-describing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceParams {
    Ising {
        couplings: Vec<(usize, usize, f64)>,
    },
    Mis {
        edges: Vec<(usize, usize)>,
        weights: Vec<f64>,
        lambda: f64,
    },
}

/// A generated problem: diagonal cost operator, transverse-field mixer,
/// and the metadata needed to regenerate it.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    pub n: usize,
    pub seed: u64,
    pub params: InstanceParams,
    pub cost: PauliSum,
    pub mixer: PauliSum,
}

impl ProblemInstance {
    /// Short label used in provenance headers.
    pub fn label(&self) -> String {
        format!("{}-n{}-seed{}", self.kind, self.n, self.seed)
    }
}

fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in [0, 1) from the top 53 bits of the next word.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Random all-to-all Ising spin glass: C = sum_{i<j} J_ij Z_i Z_j with
/// each J_ij uniform on [-1, 1]. Deterministic for fixed (n, seed).
pub fn gen_ising(n: usize, seed: u64) -> Result<ProblemInstance> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::RegisterSize(n, MIN_QUBITS, MAX_QUBITS));
    }
    let mut rng = substream(seed, 0);
    let mut couplings = Vec::with_capacity(n * (n - 1) / 2);
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 2.0 * unit_f64(&mut rng) - 1.0;
            couplings.push((i, j, v));
            terms.push(PauliTerm::new(
                Complex64::new(v, 0.0),
                &[(i, Axis::Z), (j, Axis::Z)],
            )?);
        }
    }
    Ok(ProblemInstance {
        kind: ProblemKind::Ising,
        n,
        seed,
        params: InstanceParams::Ising { couplings },
        cost: PauliSum::from_terms(n, terms)?,
        mixer: transverse_field_mixer(n),
    })
}

fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut components = n;
    for &(a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

fn sample_connected_edges(n: usize, edge_probability: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(usize, usize)>> {
    for _ in 0..CONNECTIVITY_RESAMPLE_CAP {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if unit_f64(rng) < edge_probability {
                    edges.push((i, j));
                }
            }
        }
        if is_connected(n, &edges) {
            return Ok(edges);
        }
    }
    Err(Error::DisconnectedGraph(CONNECTIVITY_RESAMPLE_CAP))
}

/// Weighted maximum-independent-set instance on a connected Erdos-Renyi
/// graph with edge probability 1.2 ln(n)/n, node weights uniform on
/// [0, 2], and the penalty encoding
/// C = -sum_i (r_i/2)(Z_i + I) + lambda * sum_edges (1/4)(Z_i + I)(Z_j + I).
///
/// A node is selected when its qubit sits in the Z = +1 eigenstate. On
/// failure to find a connected graph the whole edge set is redrawn, which
/// preserves the conditional Erdos-Renyi distribution.
pub fn gen_mis(n: usize, seed: u64, lambda: f64) -> Result<ProblemInstance> {
    if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
        return Err(Error::RegisterSize(n, MIN_QUBITS, MAX_QUBITS));
    }
    if lambda <= 0.0 {
        return Err(Error::InvalidArgument(
            "penalty weight lambda must be positive".into(),
        ));
    }
    let p = 1.2 * (n as f64).ln() / n as f64;
    let mut edge_rng = substream(seed, 0);
    let edges = sample_connected_edges(n, p, &mut edge_rng)?;

    let mut weight_rng = substream(seed, 1);
    let weights: Vec<f64> = (0..n).map(|_| 2.0 * unit_f64(&mut weight_rng)).collect();

    let cost = mis_cost(n, &edges, &weights, lambda)?;
    Ok(ProblemInstance {
        kind: ProblemKind::Mis,
        n,
        seed,
        params: InstanceParams::Mis {
            edges,
            weights,
            lambda,
        },
        cost,
        mixer: transverse_field_mixer(n),
    })
}

fn mis_cost(n: usize, edges: &[(usize, usize)], weights: &[f64], lambda: f64) -> Result<PauliSum> {
    let mut terms = Vec::new();
    for (i, &r) in weights.iter().enumerate() {
        // -(r/2)(Z_i + I)
        terms.push(PauliTerm::new(Complex64::new(-r / 2.0, 0.0), &[(i, Axis::Z)])?);
        terms.push(PauliTerm::identity(Complex64::new(-r / 2.0, 0.0)));
    }
    for &(i, j) in edges {
        // (lambda/4)(Z_i + I)(Z_j + I)
        let q = lambda / 4.0;
        terms.push(PauliTerm::new(
            Complex64::new(q, 0.0),
            &[(i, Axis::Z), (j, Axis::Z)],
        )?);
        terms.push(PauliTerm::new(Complex64::new(q, 0.0), &[(i, Axis::Z)])?);
        terms.push(PauliTerm::new(Complex64::new(q, 0.0), &[(j, Axis::Z)])?);
        terms.push(PauliTerm::identity(Complex64::new(q, 0.0)));
    }
    PauliSum::from_terms(n, terms)
}

/// Exact ground state of a diagonal cost operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundSolution {
    pub energy: f64,
    /// Spin pattern as a set indicator: bit i is 1 iff qubit i sits at
    /// Z = +1 in the minimizing configuration (for MIS, "node i is in the
    /// set"). Note Z = +1 corresponds to basis-index bit 0.
    pub bitstring: u64,
}

impl GroundSolution {
    /// Render most-significant qubit first.
    pub fn bitstring_string(&self, n: usize) -> String {
        (0..n)
            .rev()
            .map(|q| if self.bitstring >> q & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Brute-force scan of all 2^n diagonal entries. Ties are broken toward
/// the lexicographically smallest reported bitstring.
pub fn exact_ground_energy(inst: &ProblemInstance) -> Result<GroundSolution> {
    ground_of_diagonal_cost(&inst.cost)
}

pub fn ground_of_diagonal_cost(cost: &PauliSum) -> Result<GroundSolution> {
    if !cost.is_diagonal() {
        return Err(Error::NotDiagonal);
    }
    let n = cost.n();
    if n > MAX_QUBITS {
        return Err(Error::RegisterSize(n, MIN_QUBITS, MAX_QUBITS));
    }
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let entries: Vec<(u64, f64)> = cost
        .terms()
        .iter()
        .map(|t| (t.z_mask(), t.coefficient.re))
        .collect();
    let mut best_energy = f64::INFINITY;
    let mut best_bits = 0u64;
    for k in 0..(1u64 << n) {
        let mut e = 0.0;
        for &(zm, c) in &entries {
            if (k & zm).count_ones() & 1 == 0 {
                e += c;
            } else {
                e -= c;
            }
        }
        // Reported bitstring flips the basis index: bit 1 <=> Z = +1.
        let bits = !k & mask;
        if e < best_energy || (e == best_energy && bits < best_bits) {
            best_energy = e;
            best_bits = bits;
        }
    }
    Ok(GroundSolution {
        energy: best_energy,
        bitstring: best_bits,
    })
}

/// Achieved energy divided by the true ground energy; 1 means solved
/// exactly. Errors when the ground energy is zero (degenerate instance).
pub fn approximation_ratio(achieved: f64, ground: f64) -> Result<f64> {
    if ground == 0.0 {
        return Err(Error::ZeroGroundEnergy);
    }
    Ok(achieved / ground)
}

// ---------------------------------------------------------------------------
// Instance files
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct InstanceFile {
    format_version: u32,
    kind: ProblemKind,
    n: usize,
    seed: u64,
    params: InstanceParams,
    cost: Vec<TermRecord>,
    mixer: Vec<TermRecord>,
}

pub fn instance_to_json(inst: &ProblemInstance) -> Result<String> {
    let file = InstanceFile {
        format_version: FORMAT_VERSION,
        kind: inst.kind,
        n: inst.n,
        seed: inst.seed,
        params: inst.params.clone(),
        cost: inst.cost.to_records(),
        mixer: inst.mixer.to_records(),
    };
    let mut s = serde_json::to_string_pretty(&file)?;
    s.push('\n');
    Ok(s)
}

pub fn instance_from_json(text: &str) -> Result<ProblemInstance> {
    let file: InstanceFile = serde_json::from_str(text)?;
    if file.format_version != FORMAT_VERSION {
        return Err(Error::Format(format!(
            "unsupported instance format_version {}",
            file.format_version
        )));
    }
    let inst = ProblemInstance {
        kind: file.kind,
        n: file.n,
        seed: file.seed,
        params: file.params,
        cost: PauliSum::from_records(file.n, &file.cost)?,
        mixer: PauliSum::from_records(file.n, &file.mixer)?,
    };
    let kind_matches = matches!(
        (&inst.kind, &inst.params),
        (ProblemKind::Ising, InstanceParams::Ising { .. })
            | (ProblemKind::Mis, InstanceParams::Mis { .. })
    );
    if !kind_matches {
        return Err(Error::Format("instance kind does not match params".into()));
    }
    if inst.mixer != transverse_field_mixer(inst.n) {
        return Err(Error::Format(
            "mixer is not the uniform transverse field".into(),
        ));
    }
    Ok(inst)
}

pub fn write_instance(path: &Path, inst: &ProblemInstance) -> Result<()> {
    std::fs::write(path, instance_to_json(inst)?)?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<ProblemInstance> {
    instance_from_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ising_has_all_pairs_with_bounded_couplings() {
        let inst = gen_ising(10, 42).unwrap();
        assert_eq!(inst.cost.len(), 45);
        match &inst.params {
            InstanceParams::Ising { couplings } => {
                assert_eq!(couplings.len(), 45);
                for &(_, _, j) in couplings {
                    assert!(j.abs() <= 1.0);
                }
            }
            _ => panic!("wrong params kind"),
        }
    }

    #[test]
    fn ising_generation_is_deterministic() {
        let a = gen_ising(10, 7).unwrap();
        let b = gen_ising(10, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(instance_to_json(&a).unwrap(), instance_to_json(&b).unwrap());
        assert_ne!(a, gen_ising(10, 8).unwrap());
    }

    #[test]
    fn ising_rejects_tiny_registers() {
        assert!(gen_ising(1, 0).is_err());
    }

    #[test]
    fn mis_diagonal_matches_set_accounting() {
        // Diagonal entry = -(sum of selected weights) + lambda * violated edges,
        // where "selected" means basis-index bit 0 (Z = +1).
        let inst = gen_mis(6, 3, 2.0).unwrap();
        let (edges, weights, lambda) = match &inst.params {
            InstanceParams::Mis {
                edges,
                weights,
                lambda,
            } => (edges.clone(), weights.clone(), *lambda),
            _ => panic!("wrong params kind"),
        };
        let diag = inst.cost.diagonal().unwrap();
        for (k, &entry) in diag.iter().enumerate() {
            let selected: Vec<usize> = (0..6).filter(|q| k >> q & 1 == 0).collect();
            let reward: f64 = selected.iter().map(|&q| weights[q]).sum();
            let violations = edges
                .iter()
                .filter(|&&(a, b)| selected.contains(&a) && selected.contains(&b))
                .count();
            let expect = -reward + lambda * violations as f64;
            assert!(
                (entry - expect).abs() < 1e-10,
                "entry {k}: {entry} vs {expect}"
            );
        }
        // Empty set (all spins at Z = -1, i.e. basis index all-ones): energy 0.
        assert!(diag[(1 << 6) - 1].abs() < 1e-12);
    }

    #[test]
    fn mis_graph_is_connected_and_deterministic() {
        for seed in 0..5 {
            let inst = gen_mis(8, seed, 2.0).unwrap();
            match &inst.params {
                InstanceParams::Mis { edges, weights, .. } => {
                    assert!(is_connected(8, edges));
                    assert!(weights.iter().all(|&r| (0.0..=2.0).contains(&r)));
                }
                _ => panic!("wrong params kind"),
            }
            assert_eq!(inst, gen_mis(8, seed, 2.0).unwrap());
        }
    }

    #[test]
    fn mis_rejects_nonpositive_lambda() {
        assert!(gen_mis(6, 0, 0.0).is_err());
    }

    #[test]
    fn connectivity_resampling_cap_is_enforced() {
        let mut rng = substream(0, 0);
        // Edge probability zero can never produce a connected graph.
        assert!(matches!(
            sample_connected_edges(4, 0.0, &mut rng),
            Err(Error::DisconnectedGraph(_))
        ));
    }

    #[test]
    fn two_qubit_ising_ground_matches_hand_result() {
        // J_01 = 1: anti-aligned spins, energy -1, reported bitstring "01".
        let term = PauliTerm::new(Complex64::new(1.0, 0.0), &[(0, Axis::Z), (1, Axis::Z)]).unwrap();
        let cost = PauliSum::from_terms(2, vec![term]).unwrap();
        let g = ground_of_diagonal_cost(&cost).unwrap();
        assert!((g.energy + 1.0).abs() < 1e-15);
        assert_eq!(g.bitstring, 0b01);
        assert_eq!(g.bitstring_string(2), "01");
    }

    #[test]
    fn single_node_mis_takes_the_node() {
        let cost = mis_cost(2, &[], &[1.5, 0.0], 2.0).unwrap();
        let g = ground_of_diagonal_cost(&cost).unwrap();
        assert!((g.energy + 1.5).abs() < 1e-12);
        assert!(g.bitstring & 1 == 1, "node 0 must be selected");
    }

    #[test]
    fn ground_energy_matches_dense_diagonal_minimum() {
        for seed in 0..6 {
            let inst = gen_ising(4, seed).unwrap();
            let g = exact_ground_energy(&inst).unwrap();
            let dense = inst.cost.to_dense().unwrap();
            let min_eig = (0..16)
                .map(|k| dense.get(k, k).re)
                .fold(f64::INFINITY, f64::min);
            assert!((g.energy - min_eig).abs() < 1e-12);

            let inst = gen_mis(4, seed, 2.0).unwrap();
            let g = exact_ground_energy(&inst).unwrap();
            let dense = inst.cost.to_dense().unwrap();
            let min_eig = (0..16)
                .map(|k| dense.get(k, k).re)
                .fold(f64::INFINITY, f64::min);
            assert!((g.energy - min_eig).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_solver_rejects_non_diagonal_cost() {
        let cost = transverse_field_mixer(3);
        assert!(matches!(
            ground_of_diagonal_cost(&cost),
            Err(Error::NotDiagonal)
        ));
    }

    #[test]
    fn ising_ground_energy_is_never_positive() {
        for seed in 0..10 {
            let inst = gen_ising(6, seed).unwrap();
            assert!(exact_ground_energy(&inst).unwrap().energy <= 0.0);
        }
    }

    #[test]
    fn mis_argmin_is_an_independent_set_when_penalty_dominates() {
        for seed in 0..10 {
            let inst = gen_mis(7, seed, 2.0).unwrap();
            let (edges, weights) = match &inst.params {
                InstanceParams::Mis { edges, weights, .. } => (edges.clone(), weights.clone()),
                _ => unreachable!(),
            };
            let max_w = weights.iter().cloned().fold(0.0, f64::max);
            if 2.0 <= max_w {
                continue; // penalty does not strictly dominate; skip
            }
            let g = exact_ground_energy(&inst).unwrap();
            for (a, b) in edges {
                let both = (g.bitstring >> a & 1 == 1) && (g.bitstring >> b & 1 == 1);
                assert!(!both, "edge ({a},{b}) inside reported set");
            }
        }
    }

    #[test]
    fn approximation_ratio_arithmetic() {
        assert!((approximation_ratio(-2.0, -2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(approximation_ratio(0.0, -2.0).unwrap().abs() < 1e-15);
        assert!((approximation_ratio(-1.5, -2.0).unwrap() - 0.75).abs() < 1e-15);
        assert!(matches!(
            approximation_ratio(-1.0, 0.0),
            Err(Error::ZeroGroundEnergy)
        ));
    }

    #[test]
    fn instance_file_round_trip_is_bit_exact() {
        for seed in [0, 1] {
            let inst = gen_ising(6, seed).unwrap();
            let text = instance_to_json(&inst).unwrap();
            let back = instance_from_json(&text).unwrap();
            assert_eq!(inst, back);
            assert_eq!(text, instance_to_json(&back).unwrap());

            let inst = gen_mis(6, seed, 2.0).unwrap();
            let text = instance_to_json(&inst).unwrap();
            let back = instance_from_json(&text).unwrap();
            assert_eq!(inst, back);
            assert_eq!(text, instance_to_json(&back).unwrap());
        }
    }

    #[test]
    fn instance_file_rejects_mismatched_kind() {
        let inst = gen_ising(4, 0).unwrap();
        let text = instance_to_json(&inst).unwrap().replace("\"ising\"", "\"mis\"");
        assert!(instance_from_json(&text).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(16))]

            #[test]
            fn serialized_coefficients_round_trip_bitwise(seed in 0u64..500, n in 2usize..7) {
                let inst = gen_ising(n, seed).unwrap();
                let back = instance_from_json(&instance_to_json(&inst).unwrap()).unwrap();
                for (a, b) in inst.cost.terms().iter().zip(back.cost.terms()) {
                    prop_assert_eq!(a.coefficient.re.to_bits(), b.coefficient.re.to_bits());
                    prop_assert_eq!(a.coefficient.im.to_bits(), b.coefficient.im.to_bits());
                }
            }
        }
    }
}
