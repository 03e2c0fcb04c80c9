//! Exact and sampled execution of a [`Machine`] with postselection on `P_0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::synthesis::Machine;
use crate::{QuditState, StateSet, C64};

/// Identifier of the sampling generator, recorded in every Monte Carlo report.
pub const RNG_ALGORITHM: &str = "chacha8";
/// Tolerance on `|p − γ_i|` and `1 − fidelity` when verifying a machine.
pub const CONTRACT_TOL: f64 = 1e-8;
/// Tolerance on `p_success + p_failure = 1`.
pub const CONSERVATION_TOL: f64 = 1e-12;
/// Success probabilities below this leave the postselected state undefined.
pub const MIN_SUCCESS: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

/// Outcome of one exact run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactOutcome {
    pub success_prob: f64,
    pub failure_prob: f64,
    /// `|⟨target|output⟩|` on the normalized postselected state.
    pub fidelity: f64,
    /// `arg⟨target|output⟩`.
    pub global_phase: f64,
    pub output: QuditState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloOutcome {
    pub shots: u64,
    pub successes: u64,
    pub exact_success_prob: f64,
}

impl MonteCarloOutcome {
    pub fn fraction(&self) -> f64 {
        self.successes as f64 / self.shots as f64
    }

    /// Binomial standard deviation of the success fraction.
    pub fn sigma(&self) -> f64 {
        let p = self.exact_success_prob.clamp(0.0, 1.0);
        (p * (1.0 - p) / self.shots as f64).sqrt()
    }
}

fn check_dim(m: &Machine, s: &QuditState) -> Result<()> {
    if s.dim() != m.system_dim {
        return Err(Error::DimensionMismatch {
            expected: m.system_dim,
            found: s.dim(),
        });
    }
    Ok(())
}

/// `(‖Π v‖², ‖(1 − Π) v‖², Π-block)` for `v = U(s ⊗ P_0)`.
fn split(m: &Machine, s: &QuditState) -> (f64, f64, Vec<C64>) {
    let v = m.unitary.mul_vec(&m.embed(s));
    let block = m.success_block(&v);
    let p: f64 = block.iter().map(|z| z.norm_sqr()).sum();
    let total: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let q = v
        .iter()
        .enumerate()
        .filter(|(k, _)| k % m.probe_dim != 0)
        .map(|(_, z)| z.norm_sqr())
        .sum::<f64>();
    debug_assert!((p + q - total).abs() < 1e-9);
    (p, q, block)
}

/// Success probability of postselecting `P_0` after `U(s ⊗ P_0)`.
pub fn success_probability(m: &Machine, s: &QuditState) -> Result<f64> {
    check_dim(m, s)?;
    Ok(split(m, s).0)
}

pub fn run_exact(m: &Machine, s: &QuditState) -> Result<ExactOutcome> {
    check_dim(m, s)?;
    let (p, q, block) = split(m, s);
    if p < MIN_SUCCESS {
        return Err(Error::ZeroSuccess(p));
    }
    let output = QuditState::normalized(block)?;
    let overlap = s.target_state(m.target)?.overlap(&output);
    Ok(ExactOutcome {
        success_prob: p,
        failure_prob: q,
        fidelity: overlap.norm().min(1.0),
        global_phase: overlap.arg(),
        output,
    })
}

/// Samples the probe measurement `shots` times.
///
/// Each state of a batch should use its own `stream`; the count is a pure
/// function of `(seed, stream, shots, p)`.
pub fn run_monte_carlo(
    m: &Machine,
    s: &QuditState,
    shots: u64,
    seed: RngSeed,
) -> Result<MonteCarloOutcome> {
    run_monte_carlo_stream(m, s, shots, seed, 0)
}

pub fn run_monte_carlo_stream(
    m: &Machine,
    s: &QuditState,
    shots: u64,
    seed: RngSeed,
    stream: u64,
) -> Result<MonteCarloOutcome> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    let p = success_probability(m, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed.0);
    rng.set_stream(stream);
    let successes = (0..shots).filter(|_| rng.random::<f64>() < p).count() as u64;
    Ok(MonteCarloOutcome {
        shots,
        successes,
        exact_success_prob: p,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimulationMode {
    Exact,
    MonteCarlo { shots: u64, seed: RngSeed },
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateRecord {
    pub index: usize,
    pub success_prob: f64,
    pub failure_prob: f64,
    pub fidelity: f64,
    pub global_phase: f64,
    pub expected_gamma: Option<f64>,
    pub mc_success: Option<u64>,
    /// Contract violations; empty when the state passes.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationReport {
    pub mode: SimulationMode,
    pub records: Vec<StateRecord>,
}

impl SimulationReport {
    pub fn all_green(&self) -> bool {
        self.records.iter().all(|r| r.flags.is_empty())
    }

    pub fn flagged(&self) -> impl Iterator<Item = &StateRecord> {
        self.records.iter().filter(|r| !r.flags.is_empty())
    }
}

/// Runs every member exactly and flags fidelity, efficiency and
/// conservation violations.
pub fn verify_machine(m: &Machine, ss: &StateSet) -> Result<SimulationReport> {
    verify(m, ss, SimulationMode::Exact)
}

/// [`verify_machine`] plus seeded shot sampling; state `i` uses stream `i`.
pub fn verify_machine_sampled(
    m: &Machine,
    ss: &StateSet,
    shots: u64,
    seed: RngSeed,
) -> Result<SimulationReport> {
    if shots == 0 {
        return Err(Error::InvalidInput("shots must be at least 1".into()));
    }
    verify(m, ss, SimulationMode::MonteCarlo { shots, seed })
}

fn verify(m: &Machine, ss: &StateSet, mode: SimulationMode) -> Result<SimulationReport> {
    if ss.dim() != m.system_dim {
        return Err(Error::DimensionMismatch {
            expected: m.system_dim,
            found: ss.dim(),
        });
    }
    if ss.target() != m.target {
        return Err(Error::InvalidInput(format!(
            "machine implements {} but the state set targets {}",
            m.target,
            ss.target()
        )));
    }
    let mut records = Vec::with_capacity(ss.len());
    for (i, s) in ss.states().iter().enumerate() {
        let expected_gamma = m.gammas.get(i).copied();
        let mut flags = Vec::new();
        let (p, q, _) = split(m, s);
        let (fidelity, global_phase) = match run_exact(m, s) {
            Ok(out) => (out.fidelity, out.global_phase),
            Err(e) => {
                flags.push(e.to_string());
                (0.0, 0.0)
            }
        };
        if (p + q - 1.0).abs() > CONSERVATION_TOL {
            flags.push(format!("probability not conserved: {:e}", p + q - 1.0));
        }
        if fidelity < 1.0 - CONTRACT_TOL {
            flags.push(format!("fidelity {fidelity} below 1 - {CONTRACT_TOL:e}"));
        }
        match expected_gamma {
            Some(g) if (p - g).abs() > CONTRACT_TOL => {
                flags.push(format!(
                    "success probability {p} differs from efficiency {g}"
                ));
            }
            None => flags.push("machine has no efficiency for this state".into()),
            _ => {}
        }
        let mc_success = match mode {
            SimulationMode::Exact => None,
            SimulationMode::MonteCarlo { shots, seed } => {
                Some(run_monte_carlo_stream(m, s, shots, seed, i as u64)?.successes)
            }
        };
        records.push(StateRecord {
            index: i,
            success_prob: p,
            failure_prob: q,
            fidelity,
            global_phase,
            expected_gamma,
            mc_success,
            flags,
        });
    }
    Ok(SimulationReport { mode, records })
}
