//! Weighted sums of Pauli strings with exact product and commutator algebra.
//!
//! Register convention used everywhere in this crate: qubit `i` addresses
//! bit `i` of a basis-state index, so qubit 0 is the least-significant bit.
//! `Z` acts as `diag(1, -1)` on each qubit, i.e. basis bit 0 carries
//! eigenvalue +1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};

/// Largest register for which a dense matrix realization is allowed.
pub const MAX_DENSE_QUBITS: usize = 12;
/// Merged coefficients with magnitude below this are dropped.
pub const DEFAULT_PRUNE_THRESHOLD: f64 = 1e-12;

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

// Phase exponent of i in the single-qubit product a*b, with operators
// encoded as x_bit + 2*z_bit: I=0, X=1, Z=2, Y=3.
const PHASE_TABLE: [[u8; 4]; 4] = [
    [0, 0, 0, 0], // I*
    [0, 0, 3, 1], // X*: X*Z = -iY, X*Y = iZ
    [0, 1, 0, 3], // Z*: Z*X = iY,  Z*Y = -iX
    [0, 3, 1, 0], // Y*: Y*X = -iZ, Y*Z = iX
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A single weighted Pauli string.
///
/// Axes are stored as X/Z bit masks with Y = both bits set; the empty
/// string is a multiple of the identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    x_mask: u64,
    z_mask: u64,
}

impl PauliTerm {
    /// Build a term from explicit (qubit, axis) sites. Qubit indices must
    /// be unique within a term.
    pub fn new(coefficient: Complex64, sites: &[(usize, Axis)]) -> Result<Self> {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(q, axis) in sites {
            if q >= 64 {
                return Err(Error::QubitIndex { index: q, n: 64 });
            }
            let bit = 1u64 << q;
            if (x | z) & bit != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            match axis {
                Axis::X => x |= bit,
                Axis::Y => {
                    x |= bit;
                    z |= bit;
                }
                Axis::Z => z |= bit,
            }
        }
        Ok(Self {
            coefficient,
            x_mask: x,
            z_mask: z,
        })
    }

    pub fn identity(coefficient: Complex64) -> Self {
        Self {
            coefficient,
            x_mask: 0,
            z_mask: 0,
        }
    }

    /// Bit set where the string acts as X or Y.
    #[inline]
    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    /// Bit set where the string acts as Z or Y.
    #[inline]
    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    #[inline]
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// Sites in ascending qubit order.
    pub fn sites(&self) -> Vec<(usize, Axis)> {
        let mut out = Vec::new();
        let mut support = self.x_mask | self.z_mask;
        while support != 0 {
            let q = support.trailing_zeros() as usize;
            let bit = 1u64 << q;
            let axis = match ((self.x_mask & bit) != 0, (self.z_mask & bit) != 0) {
                (true, false) => Axis::X,
                (true, true) => Axis::Y,
                (false, true) => Axis::Z,
                (false, false) => unreachable!(),
            };
            out.push((q, axis));
            support ^= bit;
        }
        out
    }

    pub fn highest_qubit(&self) -> Option<usize> {
        let support = self.x_mask | self.z_mask;
        if support == 0 {
            None
        } else {
            Some(63 - support.leading_zeros() as usize)
        }
    }

    fn key(&self) -> (u64, u64) {
        (self.x_mask, self.z_mask)
    }
}

/// Operator product a*b of two Pauli strings, with the accumulated phase
/// folded into the coefficient.
pub fn multiply_terms(a: &PauliTerm, b: &PauliTerm) -> PauliTerm {
    let mut support = a.x_mask | a.z_mask | b.x_mask | b.z_mask;
    let mut phase: u32 = 0;
    while support != 0 {
        let bit = support & support.wrapping_neg();
        let ca = (((a.x_mask & bit) != 0) as usize) | ((((a.z_mask & bit) != 0) as usize) << 1);
        let cb = (((b.x_mask & bit) != 0) as usize) | ((((b.z_mask & bit) != 0) as usize) << 1);
        phase += PHASE_TABLE[ca][cb] as u32;
        support ^= bit;
    }
    PauliTerm {
        coefficient: a.coefficient * b.coefficient * I_POWERS[(phase % 4) as usize],
        x_mask: a.x_mask ^ b.x_mask,
        z_mask: a.z_mask ^ b.z_mask,
    }
}

/// A merged, pruned sum of Pauli strings on a fixed register.
///
/// Terms are kept in a canonical order (sorted by masks) with duplicates
/// merged by coefficient addition, so structural equality is meaningful
/// and serialization is deterministic. Values are immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    pub fn empty(n: usize) -> Self {
        Self { n, terms: Vec::new() }
    }

    pub fn from_terms(n: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if let Some(h) = t.highest_qubit() {
                if h >= n {
                    return Err(Error::QubitIndex { index: h, n });
                }
            }
        }
        Ok(Self::merged(n, terms, DEFAULT_PRUNE_THRESHOLD))
    }

    fn merged(n: usize, mut terms: Vec<PauliTerm>, prune: f64) -> Self {
        terms.sort_by_key(PauliTerm::key);
        let mut out: Vec<PauliTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match out.last_mut() {
                Some(last) if last.key() == t.key() => last.coefficient += t.coefficient,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coefficient.norm() >= prune);
        Self { n, terms: out }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Re-merge with an explicit prune threshold.
    pub fn pruned(&self, threshold: f64) -> Self {
        Self::merged(self.n, self.terms.clone(), threshold)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|t| PauliTerm {
                coefficient: t.coefficient * factor,
                ..*t
            })
            .collect();
        Self::merged(self.n, terms, DEFAULT_PRUNE_THRESHOLD)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(Self::merged(self.n, terms, DEFAULT_PRUNE_THRESHOLD))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// Operator product of two sums.
    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(multiply_terms(a, b));
            }
        }
        Ok(Self::merged(self.n, terms, DEFAULT_PRUNE_THRESHOLD))
    }

    /// True iff every term contains only Z axes (or is identity).
    pub fn is_diagonal(&self) -> bool {
        self.terms.iter().all(|t| t.x_mask == 0)
    }

    pub fn has_real_coefficients(&self, tolerance: f64) -> bool {
        self.terms.iter().all(|t| t.coefficient.im.abs() <= tolerance)
    }

    /// The 2^n real diagonal entries of a diagonal sum.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal);
        }
        for t in &self.terms {
            if t.coefficient.im.abs() > 1e-9 {
                return Err(Error::NonHermitian(t.coefficient.im));
            }
        }
        let dim = 1usize << self.n;
        let mut diag = vec![0.0; dim];
        for t in &self.terms {
            let zm = t.z_mask as usize;
            let c = t.coefficient.re;
            for (k, d) in diag.iter_mut().enumerate() {
                if (k & zm).count_ones() & 1 == 0 {
                    *d += c;
                } else {
                    *d -= c;
                }
            }
        }
        Ok(diag)
    }

    /// Dense matrix realization; qubit 0 addresses the least-significant
    /// bit of the basis-state index.
    pub fn to_dense(&self) -> Result<DenseMatrix> {
        if self.n > MAX_DENSE_QUBITS {
            return Err(Error::DenseTooLarge {
                n: self.n,
                max: MAX_DENSE_QUBITS,
            });
        }
        let dim = 1usize << self.n;
        let mut m = DenseMatrix::zeros(dim);
        for t in &self.terms {
            let xm = t.x_mask as usize;
            let zm = t.z_mask as usize;
            let phase = t.coefficient * I_POWERS[(t.y_count() % 4) as usize];
            for k in 0..dim {
                let sign = if (k & zm).count_ones() & 1 == 0 { 1.0 } else { -1.0 };
                m.add_to(k ^ xm, k, phase * sign);
            }
        }
        Ok(m)
    }
}

/// Commutator AB - BA as a merged, pruned sum. Anti-Hermitian when both
/// inputs are Hermitian, so `i * commutator(A, B)` is an observable.
pub fn commutator(a: &PauliSum, b: &PauliSum) -> Result<PauliSum> {
    a.product(b)?.sub(&b.product(a)?)
}

/// The uniform transverse field -sum_i X_i, the canonical mixer whose
/// ground state is the uniform superposition.
pub fn transverse_field_mixer(n: usize) -> PauliSum {
    let terms = (0..n)
        .map(|q| PauliTerm::new(Complex64::new(-1.0, 0.0), &[(q, Axis::X)]).expect("valid site"))
        .collect();
    PauliSum::from_terms(n, terms).expect("indices in range")
}

/// Serialized form of one term inside instance files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermRecord {
    pub coefficient_real: f64,
    pub coefficient_imag: f64,
    pub string: Vec<(usize, Axis)>,
}

impl PauliSum {
    pub fn to_records(&self) -> Vec<TermRecord> {
        self.terms
            .iter()
            .map(|t| TermRecord {
                coefficient_real: t.coefficient.re,
                coefficient_imag: t.coefficient.im,
                string: t.sites(),
            })
            .collect()
    }

    pub fn from_records(n: usize, records: &[TermRecord]) -> Result<Self> {
        let mut terms = Vec::with_capacity(records.len());
        for r in records {
            terms.push(PauliTerm::new(
                Complex64::new(r.coefficient_real, r.coefficient_imag),
                &r.string,
            )?);
        }
        Self::from_terms(n, terms)
    }
}
