//! Explicit probabilistic NOT / conjugate machines.
//!
//! A machine is a unitary `U` on system ⊗ probe (probe levels
//! `P_0..P_n`) such that for every member state
//!
//! ```text
//! U(Ψ_i ⊗ P_0) = √γ_i e^{iφ_i} target(Ψ_i) ⊗ P_0 + Σ_j R_ij Φ ⊗ P_j
//! ```
//!
//! Measuring the probe and keeping outcome `P_0` leaves the system in
//! `target(Ψ_i)` with probability `γ_i`. The failure branches use a single
//! fill state `Φ = |0⟩` on orthonormal probe levels, so their Gram
//! contribution is `conj(R) R^T`; choosing `R = conj(C)` with `C` the
//! Hermitian square root of `M = G − √Γ X √Γ` makes the outputs reproduce the
//! input Gram matrix, after which [`unitary_completion`] supplies `U`.

use crate::error::{Error, Result};
use crate::feasibility::{
    build_probe_unitary, check_probabilistic, residual_matrix, EfficiencyMatrix, ProbeSpec,
    IMAG_TOL,
};
use crate::linalg::{gram_of, herm_eig, kron, psd_sqrt_with_tol, unitary_completion};
use crate::{CMatrix, QuditState, StateSet, TargetMap, C64};

/// Safety factor keeping `M` strictly positive definite in the default path.
pub const EPSILON_SAFETY: f64 = 0.999;
/// Maximum tolerated deviation between the assembled and the input Gram matrix.
pub const ASSEMBLY_GRAM_TOL: f64 = 1e-8;
/// Gram eigenvalues at or below this mark a linearly dependent set.
pub const RANK_TOL: f64 = 1e-9;

/// Joint unitary plus postselected probe measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Machine {
    pub system_dim: usize,
    pub probe_dim: usize,
    pub target: TargetMap,
    /// Acts on `system ⊗ probe`, index `s * probe_dim + p`.
    pub unitary: CMatrix,
    pub gammas: Vec<f64>,
    pub branch_phases: Vec<f64>,
    pub fill_states: Vec<QuditState>,
}

impl Machine {
    /// Checks shape consistency only; a non-unitary matrix is accepted so that
    /// corrupted machines can still be simulated and flagged.
    pub fn new(
        system_dim: usize,
        probe_dim: usize,
        target: TargetMap,
        unitary: CMatrix,
        gammas: Vec<f64>,
        branch_phases: Vec<f64>,
    ) -> Result<Self> {
        let total = system_dim * probe_dim;
        if system_dim < 2 || probe_dim < 1 {
            return Err(Error::InvalidInput(format!(
                "invalid machine dimensions {system_dim} x {probe_dim}"
            )));
        }
        if unitary.rows() != total || unitary.cols() != total {
            return Err(Error::DimensionMismatch {
                expected: total,
                found: unitary.rows().max(unitary.cols()),
            });
        }
        if gammas.len() != branch_phases.len() {
            return Err(Error::DimensionMismatch {
                expected: gammas.len(),
                found: branch_phases.len(),
            });
        }
        if target == TargetMap::Not && system_dim != 2 {
            return Err(Error::WrongDimension {
                expected: 2,
                found: system_dim,
            });
        }
        Ok(Self {
            system_dim,
            probe_dim,
            target,
            unitary,
            gammas,
            branch_phases,
            fill_states: Vec::new(),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.system_dim * self.probe_dim
    }

    /// `|s⟩ ⊗ |P_0⟩`.
    pub fn embed(&self, s: &QuditState) -> Vec<C64> {
        let mut p0 = vec![C64::new(0.0, 0.0); self.probe_dim];
        p0[0] = C64::new(1.0, 0.0);
        kron(s.amps(), &p0)
    }

    /// System amplitudes of the `P_0` probe block of a joint vector.
    pub fn success_block(&self, v: &[C64]) -> Vec<C64> {
        (0..self.system_dim)
            .map(|k| v[k * self.probe_dim])
            .collect()
    }

    /// `I_sys ⊗ |P_0⟩⟨P_0|`.
    pub fn success_projector(&self) -> CMatrix {
        let p = self.probe_dim;
        CMatrix::from_fn(self.total_dim(), self.total_dim(), |i, j| {
            if i == j && i % p == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    pub fn unitarity_deviation(&self) -> f64 {
        self.unitary.unitarity_deviation()
    }
}

/// Quantities from the default construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisReport {
    /// Common efficiency `ε` assigned to every state.
    pub epsilon: f64,
    /// `λ_min(G)`.
    pub c: f64,
    /// `λ_max(X)` with `X = conj(G)` at zero branch phases.
    pub d_max: f64,
    /// Hermitian square root of the residual matrix `M`.
    pub c_matrix: CMatrix,
    /// Max-abs deviation between the assembled output Gram and `G`.
    pub residual: f64,
}

/// Builds a machine with equal efficiencies `ε` for a linearly independent set.
///
/// Branch phases are zero, so `X = conj(G)` shares the spectrum of `G` and
/// `ε = min(0.999 λ_min/λ_max, 1)` keeps `G − εX` positive definite. A real
/// Gram matrix admits a perfect machine, which is built with `γ = 1`
/// regardless of rank.
pub fn synthesize(ss: &StateSet) -> Result<(Machine, SynthesisReport)> {
    let n = ss.len();
    let g = ss.gram();
    let spectrum = herm_eig(g.matrix())?;
    let c = spectrum.min();
    let d_max = herm_eig(&g.conj())?.max();

    let epsilon = if g.max_imag().0 <= IMAG_TOL {
        1.0
    } else {
        if c <= RANK_TOL {
            return Err(Error::LinearlyDependent(c));
        }
        (EPSILON_SAFETY * c / d_max).min(1.0)
    };
    let gammas = EfficiencyMatrix::uniform(n, epsilon)?;
    let phases = vec![0.0; n];
    let (machine, c_matrix, residual) = assemble(ss, &gammas, &phases, 1e-10)?;
    Ok((
        machine,
        SynthesisReport {
            epsilon,
            c,
            d_max,
            c_matrix,
            residual,
        },
    ))
}

/// Builds a machine for caller-chosen efficiencies and branch phases.
///
/// The probe must be a phase vector; its phases become the branch phases.
pub fn synthesize_with(
    ss: &StateSet,
    gammas: &EfficiencyMatrix,
    probe: &ProbeSpec,
    psd_tol: f64,
) -> Result<Machine> {
    let phases = probe
        .phases()
        .ok_or_else(|| Error::InvalidProbe("synthesis needs a phase-vector probe".into()))?
        .to_vec();
    if phases.len() != ss.len() {
        return Err(Error::InvalidProbe(format!(
            "expected {} phases, got {}",
            ss.len(),
            phases.len()
        )));
    }
    let verdict = check_probabilistic(ss, gammas, probe, psd_tol)?;
    if !verdict.feasible {
        let lmin = verdict.violation.map_or(f64::NAN, |v| v.residual);
        return Err(Error::InfeasibleGamma(lmin));
    }
    Ok(assemble(ss, gammas, &phases, psd_tol)?.0)
}

/// Deterministic machine from a probe-phase witness (probe dimension 2,
/// every efficiency 1).
pub fn probe_machine(ss: &StateSet, probe: &ProbeSpec) -> Result<Machine> {
    let unitary = build_probe_unitary(ss, probe)?;
    let phases = probe
        .phases()
        .expect("checked by build_probe_unitary")
        .to_vec();
    Machine::new(
        ss.dim(),
        2,
        ss.target(),
        unitary,
        vec![1.0; ss.len()],
        phases,
    )
}

fn assemble(
    ss: &StateSet,
    gammas: &EfficiencyMatrix,
    phases: &[f64],
    psd_tol: f64,
) -> Result<(Machine, CMatrix, f64)> {
    let n = ss.len();
    let d = ss.dim();
    let probe_dim = n + 1;
    let probe = ProbeSpec::PhaseVector(phases.to_vec());

    let m = residual_matrix(ss, gammas, &probe)?;
    let c_matrix = psd_sqrt_with_tol(&m, psd_tol).map_err(|e| match e {
        Error::NotPsd(l) => Error::InfeasibleGamma(l),
        other => other,
    })?;

    let level = |k: usize| {
        let mut v = vec![C64::new(0.0, 0.0); probe_dim];
        v[k] = C64::new(1.0, 0.0);
        v
    };
    let fill = QuditState::basis(d, 0)?;
    let fill_branches: Vec<Vec<C64>> = (1..probe_dim)
        .map(|j| kron(fill.amps(), &level(j)))
        .collect();
    let p0 = level(0);

    let inputs: Vec<Vec<C64>> = ss.states().iter().map(|s| kron(s.amps(), &p0)).collect();
    let targets = ss.target_states();
    let outputs: Vec<Vec<C64>> = (0..n)
        .map(|i| {
            let amp = C64::from_polar(gammas.gammas()[i].sqrt(), phases[i]);
            let mut w: Vec<C64> = kron(targets[i].amps(), &p0)
                .into_iter()
                .map(|z| z * amp)
                .collect();
            for (j, branch) in fill_branches.iter().enumerate() {
                let r = c_matrix[(i, j)].conj();
                w.iter_mut().zip(branch).for_each(|(wk, &bk)| *wk += r * bk);
            }
            w
        })
        .collect();

    let (residual, i, j) = gram_of(&outputs).max_abs_diff(ss.gram().matrix());
    if residual.is_nan() || residual > ASSEMBLY_GRAM_TOL {
        return Err(Error::GramMismatch {
            i,
            j,
            deviation: residual,
        });
    }
    let unitary = unitary_completion(&inputs, &outputs)?;
    let mut machine = Machine::new(
        d,
        probe_dim,
        ss.target(),
        unitary,
        gammas.gammas().to_vec(),
        phases.to_vec(),
    )?;
    machine.fill_states = vec![fill; n];
    Ok((machine, c_matrix, residual))
}
