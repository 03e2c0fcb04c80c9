//! Pure states, the NOT and conjugate target maps, and Gram matrices.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{gram_of, inner, Matrix};
use crate::scalar::Real;

/// Which antiunitary-looking map a machine should emulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetMap {
    /// Qubit orthogonal complement `α|0⟩ + β|1⟩ ↦ α*|1⟩ − β*|0⟩`.
    Not,
    /// Componentwise complex conjugation in the computational basis.
    Conjugate,
}

impl fmt::Display for TargetMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetMap::Not => "not",
            TargetMap::Conjugate => "conjugate",
        })
    }
}

/// Normalized pure state of a `d`-level system, `d >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket<T> {
    amps: Vec<Complex<T>>,
}

impl<T: Real> Ket<T> {
    /// Validates dimension, finiteness and normalization (within the
    /// scalar's norm tolerance), then rescales to unit norm.
    pub fn new(amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() < 2 {
            return Err(Error::InvalidInput(format!(
                "state dimension must be at least 2, got {}",
                amps.len()
            )));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n2 = amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if (n2 - T::one()).abs() > T::lit(T::NORM_TOL) {
            return Err(Error::NotNormalized(n2.as_f64()));
        }
        Ok(Self::rescaled(amps, n2))
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(amps: Vec<Complex<T>>) -> Result<Self> {
        let n2 = amps.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        if n2 <= T::zero() || !n2.is_finite() {
            return Err(Error::NotNormalized(n2.as_f64()));
        }
        Self::new(Self::rescaled(amps, n2).amps)
    }

    fn rescaled(mut amps: Vec<Complex<T>>, n2: T) -> Self {
        let s = n2.sqrt();
        if s != T::one() {
            amps.iter_mut().for_each(|z| *z = *z / s);
        }
        Self { amps }
    }

    /// Computational basis state `|k⟩`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::InvalidInput(format!(
                "basis index {k} out of range for dim {dim}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); dim];
        amps[k] = Complex::new(T::one(), T::zero());
        Self::new(amps)
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn into_amps(self) -> Vec<Complex<T>> {
        self.amps
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Complex<T> {
        inner(&self.amps, &other.amps)
    }

    /// Phase-insensitive fidelity `|⟨self|other⟩|`.
    pub fn fidelity(&self, other: &Self) -> T {
        self.overlap(other).norm()
    }

    /// `(α, β) ↦ (−β*, α*)`; defined for qubits only.
    pub fn orthogonal_complement(&self) -> Result<Self> {
        if self.dim() != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: self.dim(),
            });
        }
        let (a, b) = (self.amps[0], self.amps[1]);
        Ok(Self {
            amps: vec![-b.conj(), a.conj()],
        })
    }

    pub fn conjugate(&self) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn target_state(&self, target: TargetMap) -> Result<Self> {
        match target {
            TargetMap::Not => self.orthogonal_complement(),
            TargetMap::Conjugate => Ok(self.conjugate()),
        }
    }

    /// Multiplies by a global phase `e^{iφ}`.
    pub fn with_phase(&self, phi: T) -> Self {
        let p = Complex::from_polar(T::one(), phi);
        Self {
            amps: self.amps.iter().map(|&z| z * p).collect(),
        }
    }
}

/// Ordered, nonempty list of equal-dimension states together with a target map.
#[derive(Debug, Clone, PartialEq)]
pub struct KetSet<T> {
    states: Vec<Ket<T>>,
    target: TargetMap,
}

impl<T: Real> KetSet<T> {
    pub fn new(states: Vec<Ket<T>>, target: TargetMap) -> Result<Self> {
        let dim = states.first().ok_or(Error::EmptySet)?.dim();
        if let Some(bad) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.dim(),
            });
        }
        if target == TargetMap::Not && dim != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: dim,
            });
        }
        Ok(Self { states, target })
    }

    pub fn states(&self) -> &[Ket<T>] {
        &self.states
    }

    pub fn target(&self) -> TargetMap {
        self.target
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn gram(&self) -> Gram<T> {
        let vecs: Vec<Vec<Complex<T>>> = self.states.iter().map(|s| s.amps.clone()).collect();
        Gram {
            matrix: gram_of(&vecs),
        }
    }

    /// Images of every member under the target map.
    pub fn target_states(&self) -> Vec<Ket<T>> {
        self.states
            .iter()
            .map(|s| {
                s.target_state(self.target)
                    .expect("dimension checked at construction")
            })
            .collect()
    }
}

/// Gram matrix `G_ij = ⟨Ψ_i|Ψ_j⟩` of a state set.
#[derive(Debug, Clone, PartialEq)]
pub struct Gram<T> {
    matrix: Matrix<T>,
}

impl<T: Real> Gram<T> {
    /// Wraps a matrix after checking it is Hermitian with unit diagonal.
    pub fn from_matrix(matrix: Matrix<T>) -> Result<Self> {
        matrix.ensure_square()?;
        let dev = matrix.hermitian_deviation();
        if dev > T::lit(T::SYMMETRY_TOL) {
            return Err(Error::NotHermitian(dev.as_f64()));
        }
        for i in 0..matrix.rows() {
            let d = matrix[(i, i)];
            if (d - Complex::new(T::one(), T::zero())).norm() > T::lit(T::NORM_TOL) {
                return Err(Error::InvalidInput(format!(
                    "Gram diagonal entry {i} is {d}, expected 1"
                )));
            }
        }
        Ok(Self { matrix })
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[(i, j)]
    }

    /// `t_ij = |G_ij|`.
    pub fn magnitude(&self, i: usize, j: usize) -> T {
        self.matrix[(i, j)].norm()
    }

    /// `θ_ij = arg G_ij ∈ [0, 2π)`, taken as 0 for vanishing entries.
    pub fn phase(&self, i: usize, j: usize) -> T {
        let z = self.matrix[(i, j)];
        if z.norm() <= T::epsilon() {
            return T::zero();
        }
        let two_pi = T::TAU();
        let mut a = z.im.atan2(z.re);
        if a < T::zero() {
            a = a + two_pi;
        }
        if a >= two_pi {
            a = T::zero();
        }
        a
    }

    /// Entrywise conjugate, the Gram matrix of the target images.
    pub fn conj(&self) -> Matrix<T> {
        self.matrix.conj()
    }

    /// `max_ij |Im G_ij|`.
    pub fn max_imag(&self) -> (T, usize, usize) {
        let mut best = (T::zero(), 0, 0);
        for i in 0..self.n() {
            for j in 0..self.n() {
                let im = self.matrix[(i, j)].im.abs();
                if im > best.0 {
                    best = (im, i, j);
                }
            }
        }
        best
    }

    /// Smallest off-diagonal magnitude with its position (`None` when `n = 1`).
    pub fn min_overlap(&self) -> Option<(T, usize, usize)> {
        let mut best: Option<(T, usize, usize)> = None;
        for i in 0..self.n() {
            for j in i + 1..self.n() {
                let t = self.magnitude(i, j);
                if best.is_none_or(|b| t < b.0) {
                    best = Some((t, i, j));
                }
            }
        }
        best
    }
}
