//! JSON artifacts shared by the library and the command-line front end.
//!
//! Complex numbers are `[re, im]` pairs. Floats are written with the shortest
//! representation that parses back to the same `f64`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::feasibility::{FeasibilityVerdict, ProbeSpec};
use crate::optimizer::GammaSearchResult;
use crate::simulator::{SimulationMode, SimulationReport, RNG_ALGORITHM};
use crate::synthesis::{Machine, SynthesisReport};
use crate::{CMatrix, QuditState, StateSet, TargetMap, C64};

fn pair(z: &C64) -> [f64; 2] {
    [z.re, z.im]
}

fn complex(p: &[f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    // Plain data with string keys never fails to serialize.
    serde_json::to_string_pretty(value).expect("serializable artifact")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDto {
    pub dim: usize,
    pub amps: Vec<[f64; 2]>,
}

impl StateDto {
    pub fn from_state(s: &QuditState) -> Self {
        Self {
            dim: s.dim(),
            amps: s.amps().iter().map(pair).collect(),
        }
    }

    /// Validates the declared dimension and the normalization.
    pub fn into_state(self) -> Result<QuditState> {
        if self.amps.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: self.amps.len(),
            });
        }
        QuditState::new(self.amps.iter().map(complex).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetDto {
    pub target: TargetMap,
    pub states: Vec<StateDto>,
}

impl StateSetDto {
    pub fn from_set(ss: &StateSet) -> Self {
        Self {
            target: ss.target(),
            states: ss.states().iter().map(StateDto::from_state).collect(),
        }
    }

    pub fn into_set(self) -> Result<StateSet> {
        let states = self
            .states
            .into_iter()
            .map(StateDto::into_state)
            .collect::<Result<Vec<_>>>()?;
        StateSet::new(states, self.target)
    }
}

pub fn parse_state(text: &str) -> Result<QuditState> {
    from_json::<StateDto>(text)?.into_state()
}

pub fn state_to_json(s: &QuditState) -> String {
    to_json(&StateDto::from_state(s))
}

pub fn parse_state_set(text: &str) -> Result<StateSet> {
    from_json::<StateSetDto>(text)?.into_set()
}

pub fn state_set_to_json(ss: &StateSet) -> String {
    to_json(&StateSetDto::from_set(ss))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationDto {
    pub indices: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictDto {
    pub feasible: bool,
    pub witness_phases: Option<Vec<f64>>,
    pub violation: Option<ViolationDto>,
}

impl From<&FeasibilityVerdict> for VerdictDto {
    fn from(v: &FeasibilityVerdict) -> Self {
        Self {
            feasible: v.feasible,
            witness_phases: v
                .witness
                .as_ref()
                .and_then(|w| w.phases())
                .map(<[f64]>::to_vec),
            violation: v.violation.as_ref().map(|x| ViolationDto {
                indices: x.indices.clone(),
                residual: x.residual,
            }),
        }
    }
}

pub fn verdict_to_json(v: &FeasibilityVerdict) -> String {
    to_json(&VerdictDto::from(v))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MachineDto {
    pub system_dim: usize,
    pub probe_dim: usize,
    pub target: TargetMap,
    /// Row-major rows of `[re, im]` pairs.
    pub unitary: Vec<Vec<[f64; 2]>>,
    pub gammas: Vec<f64>,
    pub phases: Vec<f64>,
}

impl MachineDto {
    pub fn from_machine(m: &Machine) -> Self {
        let u = &m.unitary;
        Self {
            system_dim: m.system_dim,
            probe_dim: m.probe_dim,
            target: m.target,
            unitary: (0..u.rows())
                .map(|i| (0..u.cols()).map(|j| pair(&u[(i, j)])).collect())
                .collect(),
            gammas: m.gammas.clone(),
            phases: m.branch_phases.clone(),
        }
    }

    pub fn into_machine(self) -> Result<Machine> {
        let rows: Vec<Vec<C64>> = self
            .unitary
            .iter()
            .map(|r| r.iter().map(complex).collect())
            .collect();
        let unitary = CMatrix::from_rows(&rows)?;
        Machine::new(
            self.system_dim,
            self.probe_dim,
            self.target,
            unitary,
            self.gammas,
            self.phases,
        )
    }
}

pub fn parse_machine(text: &str) -> Result<Machine> {
    from_json::<MachineDto>(text)?.into_machine()
}

pub fn machine_to_json(m: &Machine) -> String {
    to_json(&MachineDto::from_machine(m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisReportDto {
    pub epsilon: f64,
    pub c: f64,
    pub d_max: f64,
    pub residual: f64,
}

impl From<&SynthesisReport> for SynthesisReportDto {
    fn from(r: &SynthesisReport) -> Self {
        Self {
            epsilon: r.epsilon,
            c: r.c,
            d_max: r.d_max,
            residual: r.residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecordDto {
    pub i: usize,
    pub p: f64,
    pub failure: f64,
    pub fidelity: f64,
    pub global_phase: f64,
    pub expected_gamma: Option<f64>,
    pub mc_success: Option<u64>,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReportDto {
    /// `"exact"` or `"monte_carlo"`.
    pub mode: String,
    pub seed: Option<u64>,
    pub rng: Option<String>,
    pub shots: Option<u64>,
    pub all_green: bool,
    pub states: Vec<StateRecordDto>,
}

impl From<&SimulationReport> for SimulationReportDto {
    fn from(r: &SimulationReport) -> Self {
        let (mode, seed, rng, shots) = match r.mode {
            SimulationMode::Exact => ("exact", None, None, None),
            SimulationMode::MonteCarlo { shots, seed } => (
                "monte_carlo",
                Some(seed.0),
                Some(RNG_ALGORITHM.to_string()),
                Some(shots),
            ),
        };
        Self {
            mode: mode.into(),
            seed,
            rng,
            shots,
            all_green: r.all_green(),
            states: r
                .records
                .iter()
                .map(|s| StateRecordDto {
                    i: s.index,
                    p: s.success_prob,
                    failure: s.failure_prob,
                    fidelity: s.fidelity,
                    global_phase: s.global_phase,
                    expected_gamma: s.expected_gamma,
                    mc_success: s.mc_success,
                    flags: s.flags.clone(),
                })
                .collect(),
        }
    }
}

pub fn simulation_report_to_json(r: &SimulationReport) -> String {
    to_json(&SimulationReportDto::from(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResultMethod {
    ClosedForm,
    Bisection,
    Coordinate,
    Fallback,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaResultDto {
    pub gamma_max: f64,
    pub method: ResultMethod,
    pub probe_phases: Vec<f64>,
    pub lambda_min_at_boundary: Option<f64>,
    /// Per-state efficiencies when they are not all equal to `gamma_max`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
}

impl From<&GammaSearchResult> for GammaResultDto {
    fn from(r: &GammaSearchResult) -> Self {
        use crate::optimizer::SearchMethod;
        let method = match r.method {
            SearchMethod::Bisection => ResultMethod::Bisection,
            SearchMethod::Coordinate => ResultMethod::Coordinate,
            SearchMethod::Fallback => ResultMethod::Fallback,
        };
        let gammas = r.gammas.gammas();
        let uniform = gammas.iter().all(|g| *g == gammas[0]);
        Self {
            gamma_max: if uniform { gammas[0] } else { r.mean_gamma },
            method,
            probe_phases: probe_phases(&r.probe),
            lambda_min_at_boundary: Some(r.boundary_lambda_min),
            gammas: (!uniform).then(|| gammas.to_vec()),
        }
    }
}

fn probe_phases(p: &ProbeSpec) -> Vec<f64> {
    p.phases().map(<[f64]>::to_vec).unwrap_or_default()
}

pub fn gamma_result_to_json(r: &GammaResultDto) -> String {
    to_json(r)
}

pub fn parse_gamma_result(text: &str) -> Result<GammaResultDto> {
    from_json(text)
}
