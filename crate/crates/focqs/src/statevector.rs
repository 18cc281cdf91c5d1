//! Dense statevector simulation of the layered control circuit.
//!
//! One layer applies e^{-i dt (u B + C)} with B the transverse-field
//! mixer and C a diagonal cost operator. Both Trotter factors are exact
//! primitives: the diagonal phase multiplies amplitudes pointwise and the
//! mixer factor is n independent single-qubit rotations. A dense matrix
//! exponential is available as the oracle path for small registers.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::pauli::{transverse_field_mixer, PauliSum};

pub const MIN_QUBITS: usize = 1;
pub const MAX_QUBITS: usize = 24;
/// The dense-exponential scheme is an oracle path; cap its memory use.
pub const MAX_DENSE_EXP_QUBITS: usize = 10;
/// Imaginary residue above this in a raw expectation value signals a
/// non-Hermitian observable.
pub const HERMITICITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    FirstOrderTrotter,
    SecondOrderTrotter,
    DenseExponential,
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::FirstOrderTrotter => "first-order-trotter",
            SchemeKind::SecondOrderTrotter => "second-order-trotter",
            SchemeKind::DenseExponential => "dense-exponential",
        };
        write!(f, "{s}")
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "first-order-trotter" => Ok(SchemeKind::FirstOrderTrotter),
            "second-order-trotter" => Ok(SchemeKind::SecondOrderTrotter),
            "dense-exponential" => Ok(SchemeKind::DenseExponential),
            other => Err(Error::InvalidScheme(other.to_string())),
        }
    }
}

/// How one circuit layer is realized numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvolutionScheme {
    pub kind: SchemeKind,
    pub substeps: usize,
}

impl Default for EvolutionScheme {
    fn default() -> Self {
        Self {
            kind: SchemeKind::FirstOrderTrotter,
            substeps: 1,
        }
    }
}

impl EvolutionScheme {
    pub fn first_order(substeps: usize) -> Self {
        Self {
            kind: SchemeKind::FirstOrderTrotter,
            substeps,
        }
    }

    pub fn second_order(substeps: usize) -> Self {
        Self {
            kind: SchemeKind::SecondOrderTrotter,
            substeps,
        }
    }

    pub fn dense_exponential() -> Self {
        Self {
            kind: SchemeKind::DenseExponential,
            substeps: 1,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.substeps == 0 {
            return Err(Error::InvalidScheme("substeps must be >= 1".into()));
        }
        if self.kind == SchemeKind::DenseExponential && n > MAX_DENSE_EXP_QUBITS {
            return Err(Error::DenseTooLarge {
                n,
                max: MAX_DENSE_EXP_QUBITS,
            });
        }
        Ok(())
    }
}

/// 2^n complex amplitudes; the simulated quantum register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

/// Unit phase factor e^{-i theta c}.
#[inline]
pub(crate) fn phase_factor(c: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, -theta * c)
}

impl StateVector {
    /// The ground state of the transverse-field mixer: the uniform
    /// superposition with all amplitudes 2^{-n/2}.
    pub fn mixer_ground(n: usize) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
            return Err(Error::RegisterSize(n, MIN_QUBITS, MAX_QUBITS));
        }
        let dim = 1usize << n;
        let a = (dim as f64).sqrt().recip();
        Ok(Self {
            n,
            amps: vec![Complex64::new(a, 0.0); dim],
        })
    }

    pub fn basis_state(n: usize, index: usize) -> Result<Self> {
        if !(MIN_QUBITS..=MAX_QUBITS).contains(&n) {
            return Err(Error::RegisterSize(n, MIN_QUBITS, MAX_QUBITS));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1usize << n {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                1usize << n,
                amps.len()
            )));
        }
        Ok(Self { n, amps })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<a|b>|^2; states are compared phase-insensitively.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiply amplitude k by e^{-i theta c_k} for precomputed diagonal
    /// entries c_k. Exact (unitary, no approximation).
    pub fn apply_phase_with_diagonal(&mut self, diagonal: &[f64], theta: f64) {
        debug_assert_eq!(diagonal.len(), self.amps.len());
        for (a, &c) in self.amps.iter_mut().zip(diagonal) {
            *a *= phase_factor(c, theta);
        }
    }

    pub(crate) fn apply_phase_table(&mut self, table: &[Complex64]) {
        debug_assert_eq!(table.len(), self.amps.len());
        for (a, &p) in self.amps.iter_mut().zip(table) {
            *a *= p;
        }
    }

    /// Apply e^{-i theta C} for a diagonal operator C.
    pub fn apply_diagonal_phase(&mut self, cost: &PauliSum, theta: f64) -> Result<()> {
        if cost.n() != self.n {
            return Err(Error::SizeMismatch(cost.n(), self.n));
        }
        let diag = cost.diagonal()?;
        self.apply_phase_with_diagonal(&diag, theta);
        Ok(())
    }

    /// Apply e^{-i theta B} for the transverse-field mixer B = -sum X_i,
    /// i.e. cos(theta) I + i sin(theta) X on each qubit. Exact.
    pub fn apply_transverse_rotation(&mut self, theta: f64) {
        let c = theta.cos();
        let is = Complex64::new(0.0, theta.sin());
        for q in 0..self.n {
            let bit = 1usize << q;
            let stride = bit << 1;
            let mut base = 0;
            while base < self.amps.len() {
                for k in base..base + bit {
                    let a = self.amps[k];
                    let b = self.amps[k | bit];
                    self.amps[k] = c * a + is * b;
                    self.amps[k | bit] = is * a + c * b;
                }
                base += stride;
            }
        }
    }

    /// One control layer e^{-i dt (u B + C)} under the given scheme.
    pub fn apply_layer(
        &mut self,
        u: f64,
        dt: f64,
        cost: &PauliSum,
        scheme: EvolutionScheme,
    ) -> Result<()> {
        self.apply_layer_weighted(u, 1.0, dt, cost, scheme)
    }

    /// e^{-i dt (mixer_weight B + cost_weight C)}. The bounded control
    /// family uses mixer_weight = u, cost_weight = 1 - u.
    pub fn apply_layer_weighted(
        &mut self,
        mixer_weight: f64,
        cost_weight: f64,
        dt: f64,
        cost: &PauliSum,
        scheme: EvolutionScheme,
    ) -> Result<()> {
        if dt <= 0.0 {
            return Err(Error::InvalidArgument("dt must be positive".into()));
        }
        if cost.n() != self.n {
            return Err(Error::SizeMismatch(cost.n(), self.n));
        }
        scheme.validate(self.n)?;
        match scheme.kind {
            SchemeKind::FirstOrderTrotter => {
                // e^{-i dt u B} e^{-i dt C} per substep, mixer outermost.
                // With this order the measured feedback signal is exactly
                // the circuit's gradient with respect to the layer's own
                // control, which keeps the retroactive updates aligned
                // with the finite-difference oracle.
                let diag = cost.diagonal()?;
                let m = scheme.substeps as f64;
                for _ in 0..scheme.substeps {
                    self.apply_phase_with_diagonal(&diag, cost_weight * dt / m);
                    self.apply_transverse_rotation(mixer_weight * dt / m);
                }
            }
            SchemeKind::SecondOrderTrotter => {
                // Strang split with the mixer halves outermost.
                let diag = cost.diagonal()?;
                let m = scheme.substeps as f64;
                for _ in 0..scheme.substeps {
                    self.apply_transverse_rotation(mixer_weight * dt / (2.0 * m));
                    self.apply_phase_with_diagonal(&diag, cost_weight * dt / m);
                    self.apply_transverse_rotation(mixer_weight * dt / (2.0 * m));
                }
            }
            SchemeKind::DenseExponential => {
                let mixer = transverse_field_mixer(self.n);
                let h = cost
                    .scale(Complex64::new(cost_weight, 0.0))
                    .add(&mixer.scale(Complex64::new(mixer_weight, 0.0)))?;
                self.apply_dense_exponential(&h, dt)?;
            }
        }
        Ok(())
    }

    /// Exact action of e^{-i dt H} via the dense matrix exponential.
    pub fn apply_dense_exponential(&mut self, hamiltonian: &PauliSum, dt: f64) -> Result<()> {
        if self.n > MAX_DENSE_EXP_QUBITS {
            return Err(Error::DenseTooLarge {
                n: self.n,
                max: MAX_DENSE_EXP_QUBITS,
            });
        }
        let h = hamiltonian.to_dense()?;
        let e = h.scale(Complex64::new(0.0, -dt)).expm();
        self.amps = e.matvec(&self.amps);
        Ok(())
    }

    /// <state|A|state> for a Hermitian observable. The imaginary residue
    /// of the raw value is discarded when below `HERMITICITY_TOLERANCE`
    /// and reported as an error otherwise.
    pub fn expectation(&self, observable: &PauliSum) -> Result<f64> {
        if observable.n() != self.n {
            return Err(Error::SizeMismatch(observable.n(), self.n));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for t in observable.terms() {
            let xm = t.x_mask() as usize;
            let zm = t.z_mask() as usize;
            let y_phase = [
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 1.0),
                Complex64::new(-1.0, 0.0),
                Complex64::new(0.0, -1.0),
            ][(t.y_count() % 4) as usize];
            let mut tval = Complex64::new(0.0, 0.0);
            for (k, amp) in self.amps.iter().enumerate() {
                let v = if (k & zm).count_ones() & 1 == 0 {
                    *amp
                } else {
                    -*amp
                };
                tval += self.amps[k ^ xm].conj() * v;
            }
            acc += t.coefficient * y_phase * tval;
        }
        if acc.im.abs() > HERMITICITY_TOLERANCE {
            return Err(Error::NonHermitian(acc.im));
        }
        Ok(acc.re)
    }
}
