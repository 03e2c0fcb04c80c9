//! Realizability criteria for NOT / conjugate maps on a finite state set.
//!
//! Three questions are answered here:
//!
//! * can a plain unitary on the system map every member to its target
//!   ([`check_perfect_unitary`])? Only if the Gram matrix is real;
//! * can a unitary on system ⊗ probe do it deterministically
//!   ([`check_perfect_with_probe`])? For pairwise non-orthogonal states this
//!   reduces to the phases `θ_ij = arg⟨Ψ_i|Ψ_j⟩` satisfying
//!   `θ_lj − θ_li ≡ θ_ij (mod π)` for all triples;
//! * does a probabilistic machine with efficiencies `Γ` and a given probe
//!   Gram exist ([`check_probabilistic`])? Iff
//!   `G − √Γ (conj(G) ⊙ P) √Γ` is positive semidefinite.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, kron, min_eigenvalue, unitary_completion};
use crate::states::Ket;
use crate::{CMatrix, QuditState, StateSet, C64};

/// Largest `|Im G_ij|` still treated as a real Gram matrix.
pub const IMAG_TOL: f64 = 1e-9;
/// Tolerance on `|sin(θ_lj − θ_li − θ_ij)|` for the phase congruence test.
pub const PHASE_TOL: f64 = 1e-8;
/// Default eigenvalue tolerance of the PSD efficiency test.
pub const DEFAULT_PSD_TOL: f64 = 1e-9;
/// Overlap magnitudes at or below this are treated as zero.
pub const ZERO_OVERLAP_TOL: f64 = 1e-12;
/// Parallelism tolerance of the dependent-triple solver.
pub const PARALLEL_TOL: f64 = 1e-8;

/// Probe description: overlaps `⟨P^(i)|P^(j)⟩` of the probe states attached
/// to each branch.
#[derive(Debug, Clone, PartialEq)]
pub enum ProbeSpec {
    /// Probe states `e^{iφ_i}|P^(1)⟩`, so `P_ij = e^{i(φ_j − φ_i)}`.
    PhaseVector(Vec<f64>),
    /// Arbitrary probe Gram matrix (Hermitian, unit diagonal, PSD).
    FullGram(CMatrix),
}

impl ProbeSpec {
    pub fn zero_phases(n: usize) -> Self {
        ProbeSpec::PhaseVector(vec![0.0; n])
    }

    pub fn phases(&self) -> Option<&[f64]> {
        match self {
            ProbeSpec::PhaseVector(p) => Some(p),
            ProbeSpec::FullGram(_) => None,
        }
    }

    /// Probe Gram matrix for `n` branches, validated.
    pub fn gram(&self, n: usize) -> Result<CMatrix> {
        match self {
            ProbeSpec::PhaseVector(phi) => {
                if phi.len() != n {
                    return Err(Error::InvalidProbeGram(format!(
                        "expected {n} phases, got {}",
                        phi.len()
                    )));
                }
                if phi.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidProbeGram("non-finite phase".into()));
                }
                Ok(phase_gram(phi))
            }
            ProbeSpec::FullGram(p) => {
                if p.rows() != n || p.cols() != n {
                    return Err(Error::InvalidProbeGram(format!(
                        "expected {n}x{n}, got {}x{}",
                        p.rows(),
                        p.cols()
                    )));
                }
                let dev = p.hermitian_deviation();
                if dev > 1e-10 {
                    return Err(Error::InvalidProbeGram(format!("not Hermitian ({dev:e})")));
                }
                if let Some(i) = (0..n).find(|&i| (p[(i, i)] - C64::new(1.0, 0.0)).norm() > 1e-10) {
                    return Err(Error::InvalidProbeGram(format!(
                        "diagonal entry {i} is not 1"
                    )));
                }
                let lmin = min_eigenvalue(p)?;
                if lmin < -DEFAULT_PSD_TOL {
                    return Err(Error::InvalidProbeGram(format!(
                        "not positive semidefinite (min eigenvalue {lmin:e})"
                    )));
                }
                Ok(p.clone())
            }
        }
    }
}

/// `P_ij = e^{i(φ_j − φ_i)}`.
pub fn phase_gram(phi: &[f64]) -> CMatrix {
    CMatrix::from_fn(phi.len(), phi.len(), |i, j| {
        C64::from_polar(1.0, phi[j] - phi[i])
    })
}

/// Diagonal efficiency matrix `Γ = diag(γ_1..γ_n)`, every `γ_i ∈ (0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyMatrix {
    gammas: Vec<f64>,
}

impl EfficiencyMatrix {
    pub fn new(gammas: Vec<f64>) -> Result<Self> {
        if let Some(&g) = gammas.iter().find(|&&g| !(g > 0.0 && g <= 1.0)) {
            return Err(Error::InvalidEfficiency(g));
        }
        Ok(Self { gammas })
    }

    pub fn uniform(n: usize, gamma: f64) -> Result<Self> {
        Self::new(vec![gamma; n])
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn len(&self) -> usize {
        self.gammas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gammas.is_empty()
    }

    pub fn sqrt(&self) -> Vec<f64> {
        self.gammas.iter().map(|g| g.sqrt()).collect()
    }

    pub fn mean(&self) -> f64 {
        self.gammas.iter().sum::<f64>() / self.gammas.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityVerdict {
    pub feasible: bool,
    pub witness: Option<ProbeSpec>,
    pub violation: Option<Violation>,
}

impl FeasibilityVerdict {
    fn feasible(witness: Option<ProbeSpec>) -> Self {
        Self {
            feasible: true,
            witness,
            violation: None,
        }
    }

    fn infeasible(indices: Vec<usize>, residual: f64) -> Self {
        Self {
            feasible: false,
            witness: None,
            violation: Some(Violation { indices, residual }),
        }
    }
}

/// A plain unitary maps every member onto its target iff all overlaps are real.
pub fn check_perfect_unitary(ss: &StateSet) -> FeasibilityVerdict {
    let (im, i, j) = ss.gram().max_imag();
    if im <= IMAG_TOL {
        FeasibilityVerdict::feasible(None)
    } else {
        FeasibilityVerdict::infeasible(vec![i, j], im)
    }
}

/// Unitary on the system alone with `U Ψ_i = target(Ψ_i)`.
///
/// Fails with [`Error::GramMismatch`] when the Gram matrix is not real.
pub fn build_perfect_unitary(ss: &StateSet) -> Result<CMatrix> {
    let inputs: Vec<Vec<C64>> = ss.states().iter().map(|s| s.amps().to_vec()).collect();
    let outputs: Vec<Vec<C64>> = ss.target_states().into_iter().map(Ket::into_amps).collect();
    unitary_completion(&inputs, &outputs)
}

/// Deterministic realizability with a probe, for pairwise non-orthogonal sets.
///
/// Returns [`Error::ZeroOverlap`] when two members are orthogonal: the
/// criterion does not cover that case. On success the witness probe phases
/// are `φ_j = 2θ_1j mod 2π`.
pub fn check_perfect_with_probe(ss: &StateSet) -> Result<FeasibilityVerdict> {
    let g = ss.gram();
    let n = g.n();
    if let Some((t, i, j)) = g.min_overlap() {
        if t <= ZERO_OVERLAP_TOL {
            return Err(Error::ZeroOverlap { i, j });
        }
    }
    let mut worst: Option<(f64, [usize; 3])> = None;
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let r = (g.phase(l, j) - g.phase(l, i) - g.phase(i, j)).sin().abs();
                if r > PHASE_TOL && worst.is_none_or(|w| r > w.0) {
                    worst = Some((r, [i, j, l]));
                }
            }
        }
    }
    if let Some((r, idx)) = worst {
        return Ok(FeasibilityVerdict::infeasible(idx.to_vec(), r));
    }
    let tau = std::f64::consts::TAU;
    let phases = (0..n)
        .map(|j| (2.0 * g.phase(0, j)).rem_euclid(tau) + 0.0)
        .collect();
    Ok(FeasibilityVerdict::feasible(Some(ProbeSpec::PhaseVector(
        phases,
    ))))
}

/// Joint unitary on system ⊗ probe (probe dimension 2) realizing
/// `U(Ψ_i ⊗ P_0) = e^{iφ_i} target(Ψ_i) ⊗ P_0`.
///
/// All branch probe states are proportional, so they share the probe basis
/// vector `P_0`; the second probe level only provides room for completion.
pub fn build_probe_unitary(ss: &StateSet, probe: &ProbeSpec) -> Result<CMatrix> {
    let phases = probe
        .phases()
        .ok_or_else(|| Error::InvalidProbe("probe unitary needs a phase vector".into()))?;
    if phases.len() != ss.len() {
        return Err(Error::InvalidProbe(format!(
            "expected {} phases, got {}",
            ss.len(),
            phases.len()
        )));
    }
    let p0 = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    let inputs: Vec<Vec<C64>> = ss.states().iter().map(|s| kron(s.amps(), &p0)).collect();
    let outputs: Vec<Vec<C64>> = ss
        .target_states()
        .iter()
        .zip(phases)
        .map(|(t, &phi)| kron(t.with_phase(phi).amps(), &p0))
        .collect();
    unitary_completion(&inputs, &outputs)
}

/// `M = G − √Γ (conj(G) ⊙ P) √Γ`, the matrix whose positivity decides
/// probabilistic realizability.
pub fn residual_matrix(
    ss: &StateSet,
    gammas: &EfficiencyMatrix,
    probe: &ProbeSpec,
) -> Result<CMatrix> {
    let n = ss.len();
    if gammas.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: gammas.len(),
        });
    }
    let g = ss.gram();
    let p = probe.gram(n)?;
    let sg = gammas.sqrt();
    let target_part = g.conj().hadamard(&p).scale_rows_cols(&sg, &sg);
    Ok(g.matrix() - &target_part)
}

/// Probabilistic realizability for the given efficiencies and probe.
pub fn check_probabilistic(
    ss: &StateSet,
    gammas: &EfficiencyMatrix,
    probe: &ProbeSpec,
    psd_tol: f64,
) -> Result<FeasibilityVerdict> {
    let m = residual_matrix(ss, gammas, probe)?;
    let lmin = herm_eig(&m)?.min();
    if lmin >= -psd_tol {
        Ok(FeasibilityVerdict::feasible(Some(probe.clone())))
    } else {
        Ok(FeasibilityVerdict::infeasible(Vec::new(), lmin))
    }
}

/// Solution of the dependent-triple condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleSolution {
    /// Expansion `Ψ_3 = α Ψ_1 + β Ψ_2`.
    pub alpha: C64,
    pub beta: C64,
    pub gamma3: f64,
    pub chi: f64,
}

/// Whether a machine acting on `s1` (efficiency `γ1`, phase 0) and `s2`
/// (efficiency `γ2`, phase `φ`) automatically handles `s3 = α s1 + β s2`.
///
/// By linearity the success branch for `s3` is
/// `v = α√γ1 s1⊥ + β e^{iφ}√γ2 s2⊥`; it works iff `v = √γ3 e^{iχ} s3⊥`.
/// Returns `None` when `v` is not parallel to `s3⊥` or `‖v‖ ∉ (0, 1]`.
pub fn dependent_triple_solve(
    s1: &QuditState,
    s2: &QuditState,
    s3: &QuditState,
    gamma1: f64,
    gamma2: f64,
    phi: f64,
) -> Result<Option<TripleSolution>> {
    for s in [s1, s2, s3] {
        if s.dim() != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: s.dim(),
            });
        }
    }
    EfficiencyMatrix::new(vec![gamma1, gamma2])?;
    let (a, b, c) = (s1.amps(), s2.amps(), s3.amps());
    let det = a[0] * b[1] - b[0] * a[1];
    if det.norm() <= 1e-9 {
        return Err(Error::LinearlyDependentPair);
    }
    let alpha = (c[0] * b[1] - b[0] * c[1]) / det;
    let beta = (a[0] * c[1] - c[0] * a[1]) / det;

    let p1 = s1.orthogonal_complement()?;
    let p2 = s2.orthogonal_complement()?;
    let p3 = s3.orthogonal_complement()?;
    let w1 = alpha * gamma1.sqrt();
    let w2 = beta * C64::from_polar(gamma2.sqrt(), phi);
    let v: Vec<C64> = p1
        .amps()
        .iter()
        .zip(p2.amps())
        .map(|(&x, &y)| w1 * x + w2 * y)
        .collect();
    let lambda = p3
        .amps()
        .iter()
        .zip(&v)
        .fold(Complex::new(0.0, 0.0), |acc, (w, &x)| acc + w.conj() * x);
    let residual = v
        .iter()
        .zip(p3.amps())
        .map(|(&x, &w)| (x - lambda * w).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > PARALLEL_TOL {
        return Ok(None);
    }
    let gamma3 = v.iter().map(|z| z.norm_sqr()).sum::<f64>();
    if gamma3 > 1.0 + 1e-12 || gamma3 <= 0.0 {
        return Ok(None);
    }
    Ok(Some(TripleSolution {
        alpha,
        beta,
        gamma3: gamma3.min(1.0),
        chi: lambda.arg(),
    }))
}
