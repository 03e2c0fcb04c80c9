//! Efficiency bounds and searches under the PSD realizability constraint.
//!
//! For three linearly independent states with equal efficiencies `γ` and
//! probe overlaps `⟨P^(1)|P^(2)⟩ = e^{2iθ12}`, `⟨P^(1)|P^(3)⟩ = e^{2iθ13}`,
//! the residual matrix factors as `(1 − γ) N(γ)` and `N` is PSD iff two
//! quadratic inequalities
//!
//! ```text
//! a γ² + 2γ(2 t23² sin²δ − a) + a ≤ 0,   a = −det G
//! b γ² + 2γ(2 t23² sin²δ − b) + b ≤ 0,   b = t23² − 1
//! ```
//!
//! hold, with `δ = θ12 − θ13 + θ23`. [`gamma_max_triple`] evaluates both
//! roots of both quadratics and returns the binding bound;
//! [`grid_oracle_triple`] brute-forces the same question with eigenvalues.

use crate::error::{Error, Result};
use crate::feasibility::{check_probabilistic, EfficiencyMatrix, ProbeSpec, DEFAULT_PSD_TOL};
use crate::linalg::herm_eig;
use crate::synthesis::EPSILON_SAFETY;
use crate::{CMatrix, GramMatrix, StateSet, C64};

/// Eigenvalue tolerance of the bisection oracles (stricter than the default
/// check, so every returned point passes [`check_probabilistic`]).
pub const ORACLE_TOL: f64 = 1e-12;
/// Bisection refinement steps after the grid scan.
pub const BISECTION_STEPS: usize = 60;
/// Grid resolution used by [`search_gamma`].
pub const DEFAULT_RESOLUTION: usize = 1000;
/// Convergence threshold of the coordinate ascent.
pub const COORDINATE_STEP_TOL: f64 = 1e-6;
const MAX_SWEEPS: usize = 200;

/// Polar parameters of a three-state Gram matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleBoundInput {
    pub t12: f64,
    pub t13: f64,
    pub t23: f64,
    pub theta12: f64,
    pub theta13: f64,
    pub theta23: f64,
}

impl TripleBoundInput {
    pub fn new(
        t12: f64,
        t13: f64,
        t23: f64,
        theta12: f64,
        theta13: f64,
        theta23: f64,
    ) -> Result<Self> {
        for (name, t) in [("t12", t12), ("t13", t13), ("t23", t23)] {
            if !(t > 0.0 && t <= 1.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} = {t} must lie in (0, 1]"
                )));
            }
        }
        if ![theta12, theta13, theta23].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidInput("non-finite phase".into()));
        }
        Ok(Self {
            t12,
            t13,
            t23,
            theta12,
            theta13,
            theta23,
        })
    }

    pub fn from_gram(g: &GramMatrix) -> Result<Self> {
        if g.n() != 3 {
            return Err(Error::InvalidInput(format!(
                "need exactly 3 states, got {}",
                g.n()
            )));
        }
        Self::new(
            g.magnitude(0, 1),
            g.magnitude(0, 2),
            g.magnitude(1, 2),
            g.phase(0, 1),
            g.phase(0, 2),
            g.phase(1, 2),
        )
    }

    /// `δ = θ12 − θ13 + θ23`.
    pub fn delta(&self) -> f64 {
        self.theta12 - self.theta13 + self.theta23
    }

    /// `a = −det G`.
    pub fn a(&self) -> f64 {
        -1.0 + self.t12 * self.t12 + self.t13 * self.t13 + self.t23 * self.t23
            - 2.0 * self.t12 * self.t13 * self.t23 * self.delta().cos()
    }

    pub fn b(&self) -> f64 {
        self.t23 * self.t23 - 1.0
    }

    /// `t23² sin²δ`.
    pub fn s(&self) -> f64 {
        let sd = self.delta().sin();
        self.t23 * self.t23 * sd * sd
    }

    pub fn gram_matrix(&self) -> CMatrix {
        let e12 = C64::from_polar(self.t12, self.theta12);
        let e13 = C64::from_polar(self.t13, self.theta13);
        let e23 = C64::from_polar(self.t23, self.theta23);
        let one = C64::new(1.0, 0.0);
        CMatrix::from_rows(&[
            vec![one, e12, e13],
            vec![e12.conj(), one, e23],
            vec![e13.conj(), e23.conj(), one],
        ])
        .expect("3x3 finite")
    }

    /// Probe phases `(0, 2θ12, 2θ13)`.
    pub fn probe(&self) -> ProbeSpec {
        ProbeSpec::PhaseVector(vec![0.0, 2.0 * self.theta12, 2.0 * self.theta13])
    }
}

/// Both roots of `c γ² + 2γ(2s − c) + c` and the resulting upper bound on `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticBound {
    pub roots: [f64; 2],
    pub bound: f64,
}

/// Closed-form result with every root for inspection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripleBound {
    pub gamma_max: f64,
    pub determinant: QuadraticBound,
    pub minor: QuadraticBound,
}

/// Largest `γ ∈ (0, 1]` with `coef γ² + 2γ(2s − coef) + coef ≤ 0` on `(0, γ]`.
///
/// The roots have product one; they are computed in the cancellation-free
/// form `q/coef`, `coef/q`; the sign of `coef` picks the binding one.
fn quadratic_bound(coef: f64, s: f64) -> Result<QuadraticBound> {
    let f = |g: f64| coef * g * g + 2.0 * g * (2.0 * s - coef) + coef;
    let lin = 2.0 * (2.0 * s - coef);
    // lin² − 4coef² factored to avoid cancellation when s is tiny.
    let disc = 16.0 * s * (s - coef);
    let roots = if disc < 0.0 {
        [f64::NAN, f64::NAN]
    } else {
        let q = -0.5 * (lin + lin.signum() * disc.sqrt());
        let mut r = [q / coef, coef / q];
        r.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        r
    };
    if f(0.0) > 0.0 {
        return Err(Error::InvalidInput(format!(
            "constraint violated at γ → 0 (coefficient {coef:e}); not a valid Gram matrix"
        )));
    }
    // f = coef (γ − r0)(γ − r1): with coef < 0 it turns positive after the
    // small root, with coef > 0 after the large one.
    let r = if coef < 0.0 { roots[0] } else { roots[1] };
    let bound = if r.is_finite() && r > 0.0 && r < 1.0 {
        r
    } else {
        1.0
    };
    Ok(QuadraticBound { roots, bound })
}

/// Closed-form equal-efficiency bound for three states.
pub fn triple_bound(input: &TripleBoundInput) -> Result<TripleBound> {
    let a = input.a();
    if a.abs() < 1e-12 {
        return Err(Error::DegenerateDeterminant(a.abs()));
    }
    let s = input.s();
    if s == 0.0 {
        let exact = QuadraticBound {
            roots: [1.0, 1.0],
            bound: 1.0,
        };
        return Ok(TripleBound {
            gamma_max: 1.0,
            determinant: exact,
            minor: exact,
        });
    }
    let determinant = quadratic_bound(a, s)?;
    let minor = quadratic_bound(input.b(), s)?;
    Ok(TripleBound {
        gamma_max: determinant.bound.min(minor.bound).min(1.0),
        determinant,
        minor,
    })
}

pub fn gamma_max_triple(input: &TripleBoundInput) -> Result<f64> {
    Ok(triple_bound(input)?.gamma_max)
}

/// `λ_min(G − γ (conj(G) ⊙ P))`.
fn equal_gamma_lambda_min(g: &CMatrix, target: &CMatrix, gamma: f64) -> f64 {
    let m = g - &target.scale(C64::new(gamma, 0.0));
    herm_eig(&m).expect("Hermitian residual").min()
}

/// Grid scan plus bisection for the largest feasible common efficiency.
/// Returns `(γ*, λ_min at γ*)`.
fn equal_gamma_bisection(g: &CMatrix, probe_gram: &CMatrix, resolution: usize) -> (f64, f64) {
    let target = g.conj().hadamard(probe_gram);
    let feasible = |gamma: f64| equal_gamma_lambda_min(g, &target, gamma) >= -ORACLE_TOL;
    let res = resolution.max(1);
    let first_bad = (1..=res).find(|&k| !feasible(k as f64 / res as f64));
    let Some(k) = first_bad else {
        return (1.0, equal_gamma_lambda_min(g, &target, 1.0));
    };
    let (mut lo, mut hi) = ((k - 1) as f64 / res as f64, k as f64 / res as f64);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, equal_gamma_lambda_min(g, &target, lo))
}

/// Brute-force equal-efficiency bound for three states at a given probe.
pub fn grid_oracle_triple(gram: &GramMatrix, probe: &ProbeSpec, resolution: usize) -> Result<f64> {
    if gram.n() != 3 {
        return Err(Error::InvalidInput(format!(
            "need exactly 3 states, got {}",
            gram.n()
        )));
    }
    let p = probe.gram(3)?;
    Ok(equal_gamma_bisection(gram.matrix(), &p, resolution).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchPolicy {
    EqualGamma,
    PerStateCoordinate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMethod {
    Bisection,
    Coordinate,
    /// Fallback to the default synthesis efficiency with zero probe phases.
    Fallback,
}

impl SearchMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SearchMethod::Bisection => "bisection",
            SearchMethod::Coordinate => "coordinate",
            SearchMethod::Fallback => "fallback",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GammaSearchResult {
    pub gammas: EfficiencyMatrix,
    pub probe: ProbeSpec,
    pub mean_gamma: f64,
    pub iterations: usize,
    pub boundary_lambda_min: f64,
    pub method: SearchMethod,
}

/// Doubled Gram phases `φ_j = 2θ_1j`, the probe used by the searches.
pub fn doubled_phase_probe(g: &GramMatrix) -> ProbeSpec {
    let tau = std::f64::consts::TAU;
    ProbeSpec::PhaseVector(
        (0..g.n())
            .map(|j| (2.0 * g.phase(0, j)).rem_euclid(tau) + 0.0)
            .collect(),
    )
}

/// Heuristic search for large feasible efficiencies (a lower bound on the
/// optimum; only the doubled-phase probe family is explored).
pub fn search_gamma(ss: &StateSet, policy: SearchPolicy) -> Result<GammaSearchResult> {
    let n = ss.len();
    if n < 2 {
        return Err(Error::InvalidInput(
            "gamma search needs at least two states".into(),
        ));
    }
    let gram = ss.gram();
    let g = gram.matrix().clone();
    let probe = doubled_phase_probe(&gram);
    let p = probe.gram(n)?;
    let target = g.conj().hadamard(&p);

    let (gamma_eq, _) = equal_gamma_bisection(&g, &p, DEFAULT_RESOLUTION);
    let mut iterations = 1;
    if gamma_eq <= 0.0 {
        return fallback(ss, &gram);
    }
    let mut gammas = vec![gamma_eq; n];
    let mut method = SearchMethod::Bisection;

    if policy == SearchPolicy::PerStateCoordinate {
        method = SearchMethod::Coordinate;
        let lambda_min = |gs: &[f64]| {
            let sg: Vec<f64> = gs.iter().map(|x| x.sqrt()).collect();
            let m = &g - &target.scale_rows_cols(&sg, &sg);
            herm_eig(&m).expect("Hermitian residual").min()
        };
        for _ in 0..MAX_SWEEPS {
            iterations += 1;
            let mut gained = 0.0;
            for i in 0..n {
                let start = gammas[i];
                let mut trial = gammas.clone();
                trial[i] = 1.0;
                if lambda_min(&trial) >= -ORACLE_TOL {
                    gammas[i] = 1.0;
                } else {
                    let (mut lo, mut hi) = (start, 1.0);
                    for _ in 0..BISECTION_STEPS {
                        let mid = 0.5 * (lo + hi);
                        trial[i] = mid;
                        if lambda_min(&trial) >= -ORACLE_TOL {
                            lo = mid;
                        } else {
                            hi = mid;
                        }
                    }
                    gammas[i] = lo;
                }
                gained += gammas[i] - start;
            }
            if gained < COORDINATE_STEP_TOL {
                break;
            }
        }
    }

    finish(ss, gammas, probe, iterations, method)
}

fn fallback(ss: &StateSet, gram: &GramMatrix) -> Result<GammaSearchResult> {
    let c = herm_eig(gram.matrix())?.min();
    let d = herm_eig(&gram.conj())?.max();
    if c <= crate::synthesis::RANK_TOL {
        return Err(Error::NoFeasiblePoint);
    }
    let eps = (EPSILON_SAFETY * c / d).min(1.0);
    finish(
        ss,
        vec![eps; ss.len()],
        ProbeSpec::zero_phases(ss.len()),
        1,
        SearchMethod::Fallback,
    )
}

fn finish(
    ss: &StateSet,
    gammas: Vec<f64>,
    probe: ProbeSpec,
    iterations: usize,
    method: SearchMethod,
) -> Result<GammaSearchResult> {
    let gammas = EfficiencyMatrix::new(gammas).map_err(|_| Error::NoFeasiblePoint)?;
    let verdict = check_probabilistic(ss, &gammas, &probe, DEFAULT_PSD_TOL)?;
    if !verdict.feasible {
        return Err(Error::NoFeasiblePoint);
    }
    let m = crate::feasibility::residual_matrix(ss, &gammas, &probe)?;
    let boundary_lambda_min = herm_eig(&m)?.min();
    Ok(GammaSearchResult {
        mean_gamma: gammas.mean(),
        gammas,
        probe,
        iterations,
        boundary_lambda_min,
        method,
    })
}

/// Equal-efficiency bisection for any number of states at a given probe.
pub fn equal_gamma_oracle(
    gram: &GramMatrix,
    probe: &ProbeSpec,
    resolution: usize,
) -> Result<(f64, f64)> {
    let p = probe.gram(gram.n())?;
    Ok(equal_gamma_bisection(gram.matrix(), &p, resolution))
}
