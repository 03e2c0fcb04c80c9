use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use qnot_core::feasibility::{
    check_perfect_unitary, check_perfect_with_probe, check_probabilistic, residual_matrix,
    EfficiencyMatrix, FeasibilityVerdict, ProbeSpec,
};
use qnot_core::io::{
    machine_to_json, parse_state_set, GammaResultDto, MachineDto, ResultMethod,
    SimulationReportDto, SynthesisReportDto, VerdictDto,
};
use qnot_core::linalg::herm_eig;
use qnot_core::optimizer::{
    equal_gamma_oracle, grid_oracle_triple, search_gamma, triple_bound, SearchPolicy,
    TripleBoundInput, DEFAULT_RESOLUTION,
};
use qnot_core::simulator::{verify_machine_sampled, RngSeed};
use qnot_core::synthesis::{synthesize, synthesize_with, Machine};
use qnot_core::{Error, GramMatrix, StateSet};

/// Largest closed-form vs oracle gap accepted by `gamma-max`.
const AGREEMENT_TOL: f64 = 1e-5;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Command {
    Check,
    Synthesize,
    Simulate,
    GammaMax,
    Oracle,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

/// Perfect and probabilistic NOT / conjugate machines on finite state sets.
#[derive(Parser, Debug)]
#[command(name = "qnot", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,

    /// State-set JSON file.
    #[arg(long)]
    input: PathBuf,

    /// Machine JSON file (simulate).
    #[arg(long)]
    machine: Option<PathBuf>,

    /// Comma-separated efficiencies.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<f64>>,

    /// Comma-separated probe phases in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    phases: Option<Vec<f64>>,

    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Write the result here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// PSD tolerance for probabilistic feasibility.
    #[arg(long, env = "QNOT_TOL", default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug)]
enum Failure {
    Malformed(String),
    Dependent(String),
    Flagged,
    Disagreement,
    Degenerate(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Runtime(_) => 1,
            Failure::Malformed(_) => 2,
            Failure::Dependent(_) => 3,
            Failure::Flagged => 4,
            Failure::Disagreement => 5,
            Failure::Degenerate(_) => 6,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::LinearlyDependent(_) => Failure::Dependent(msg),
            Error::DegenerateDeterminant(_) => Failure::Degenerate(msg),
            Error::Parse(_)
            | Error::NotSquare { .. }
            | Error::NotHermitian(_)
            | Error::NonFinite
            | Error::DimensionMismatch { .. }
            | Error::WrongDimension { .. }
            | Error::NotNormalized(_)
            | Error::EmptySet
            | Error::InvalidInput(_)
            | Error::ZeroOverlap { .. }
            | Error::InvalidProbeGram(_)
            | Error::InvalidProbe(_)
            | Error::InvalidEfficiency(_) => Failure::Malformed(msg),
            _ => Failure::Runtime(msg),
        }
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Malformed(m)
                | Failure::Dependent(m)
                | Failure::Degenerate(m)
                | Failure::Runtime(m) => eprintln!("qnot: {m}"),
                Failure::Flagged => eprintln!("qnot: verification flagged contract violations"),
                Failure::Disagreement => {
                    eprintln!(
                        "qnot: closed form and oracle disagree by more than {AGREEMENT_TOL:e}"
                    )
                }
            }
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Outcome {
    if !(cli.tol.is_finite() && cli.tol >= 0.0) {
        return Err(Failure::Malformed(format!("invalid tolerance {}", cli.tol)));
    }
    let ss = parse_state_set(&read(&cli.input)?)?;
    match cli.command {
        Command::Check => cmd_check(cli, &ss),
        Command::Synthesize => cmd_synthesize(cli, &ss),
        Command::Simulate => cmd_simulate(cli, &ss),
        Command::GammaMax => cmd_gamma_max(cli, &ss),
        Command::Oracle => cmd_oracle(cli, &ss),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn emit(cli: &Cli, doc: &Value, text: impl FnOnce() -> String) -> Outcome {
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(doc).expect("json value") + "\n",
        Format::Text => text(),
    };
    match &cli.output {
        Some(p) => std::fs::write(p, body)
            .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn polar_gram(g: &GramMatrix) -> String {
    let mut out = String::from("gram (t_ij, theta_ij):\n");
    for i in 0..g.n() {
        for j in i + 1..g.n() {
            let _ = writeln!(
                out,
                "  {} {}  t = {:.12}  theta = {:.12}",
                i + 1,
                j + 1,
                g.magnitude(i, j),
                g.phase(i, j)
            );
        }
    }
    out
}

fn verdict_line(name: &str, v: Option<&FeasibilityVerdict>) -> String {
    let Some(v) = v else {
        return format!("{name}: not applicable\n");
    };
    let mut s = format!(
        "{name}: {}",
        if v.feasible { "feasible" } else { "infeasible" }
    );
    if let Some(p) = v.witness.as_ref().and_then(ProbeSpec::phases) {
        let _ = write!(s, "  phases = {p:?}");
    }
    if let Some(x) = &v.violation {
        let _ = write!(
            s,
            "  indices = {:?}  residual = {:e}",
            x.indices, x.residual
        );
    }
    s + "\n"
}

fn probe_from(cli: &Cli, n: usize) -> ProbeSpec {
    match &cli.phases {
        Some(p) => ProbeSpec::PhaseVector(p.clone()),
        None => ProbeSpec::zero_phases(n),
    }
}

fn cmd_check(cli: &Cli, ss: &StateSet) -> Outcome {
    let gram = ss.gram();
    let perfect = check_perfect_unitary(ss);
    let with_probe = match check_perfect_with_probe(ss) {
        Ok(v) => Some(v),
        Err(Error::ZeroOverlap { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let probabilistic = match &cli.gamma {
        Some(g) => {
            let gammas = EfficiencyMatrix::new(g.clone())?;
            if gammas.len() != ss.len() {
                return Err(Failure::Malformed(format!(
                    "expected {} efficiencies, got {}",
                    ss.len(),
                    gammas.len()
                )));
            }
            Some(check_probabilistic(
                ss,
                &gammas,
                &probe_from(cli, ss.len()),
                cli.tol,
            )?)
        }
        None => None,
    };
    let doc = json!({
        "target": ss.target(),
        "n": ss.len(),
        "dim": ss.dim(),
        "perfect_unitary": VerdictDto::from(&perfect),
        "perfect_with_probe": with_probe.as_ref().map(VerdictDto::from),
        "probabilistic": probabilistic.as_ref().map(VerdictDto::from),
    });
    emit(cli, &doc, || {
        let mut s = format!(
            "{} states, dim {}, target {}\n",
            ss.len(),
            ss.dim(),
            ss.target()
        );
        s += &polar_gram(&gram);
        s += &verdict_line("perfect unitary", Some(&perfect));
        s += &verdict_line("perfect with probe", with_probe.as_ref());
        if cli.gamma.is_some() {
            s += &verdict_line("probabilistic", probabilistic.as_ref());
        }
        s
    })
}

fn cmd_synthesize(cli: &Cli, ss: &StateSet) -> Outcome {
    let (machine, report) = match &cli.gamma {
        Some(g) => {
            let gammas = EfficiencyMatrix::new(g.clone())?;
            let m = synthesize_with(ss, &gammas, &probe_from(cli, ss.len()), cli.tol)?;
            (m, None)
        }
        None => {
            let (m, r) = synthesize(ss)?;
            (m, Some(SynthesisReportDto::from(&r)))
        }
    };
    let machine_doc = serde_json::to_value(MachineDto::from_machine(&machine)).expect("machine");
    let doc = json!({
        "machine": machine_doc,
        "report": report,
        "unitarity_deviation": machine.unitarity_deviation(),
    });
    let summary = || {
        let mut s = format!(
            "machine: system {} x probe {}, target {}\n",
            machine.system_dim, machine.probe_dim, machine.target
        );
        let _ = writeln!(s, "gammas: {:?}", machine.gammas);
        let _ = writeln!(s, "phases: {:?}", machine.branch_phases);
        let _ = writeln!(
            s,
            "unitarity deviation: {:e}",
            machine.unitarity_deviation()
        );
        if let Some(r) = &report {
            let _ = writeln!(
                s,
                "epsilon = {}  c = {}  d_max = {}  residual = {:e}",
                r.epsilon, r.c, r.d_max, r.residual
            );
        }
        s
    };
    // The machine file is always JSON so that `simulate` can read it back.
    match &cli.output {
        Some(p) => {
            let body = serde_json::to_string_pretty(&doc).expect("json value") + "\n";
            std::fs::write(p, body)
                .map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display())))?;
            if cli.format == Format::Text {
                print!("{}", summary());
            }
            Ok(())
        }
        None => emit(cli, &doc, || {
            summary() + "machine json:\n" + &machine_to_json(&machine) + "\n"
        }),
    }
}

/// Accepts a bare machine or the `{"machine": ...}` document written by
/// `synthesize`.
fn load_machine(path: &Path) -> Result<Machine, Failure> {
    let text = read(path)?;
    let mut v: Value =
        serde_json::from_str(&text).map_err(|e| Failure::Malformed(format!("machine: {e}")))?;
    if let Some(inner) = v.get_mut("machine") {
        v = inner.take();
    }
    let dto: MachineDto =
        serde_json::from_value(v).map_err(|e| Failure::Malformed(format!("machine: {e}")))?;
    Ok(dto.into_machine()?)
}

fn cmd_simulate(cli: &Cli, ss: &StateSet) -> Outcome {
    let path = cli
        .machine
        .as_ref()
        .ok_or_else(|| Failure::Malformed("simulate needs --machine".into()))?;
    let machine = load_machine(path)?;
    let report = verify_machine_sampled(&machine, ss, cli.shots, RngSeed(cli.seed))?;
    let dto = SimulationReportDto::from(&report);
    let doc = serde_json::to_value(&dto).expect("report");
    emit(cli, &doc, || {
        let mut s = format!("mode {}", dto.mode);
        if let (Some(seed), Some(rng), Some(shots)) = (dto.seed, &dto.rng, dto.shots) {
            let _ = write!(s, "  seed {seed}  rng {rng}  shots {shots}");
        }
        s.push('\n');
        for r in &dto.states {
            let _ = writeln!(
                s,
                "  state {}: p = {:.12}  fidelity = {:.12}{}{}",
                r.i,
                r.p,
                r.fidelity,
                r.mc_success
                    .map(|k| format!("  mc successes = {k}"))
                    .unwrap_or_default(),
                if r.flags.is_empty() {
                    String::new()
                } else {
                    format!("  FLAGGED {:?}", r.flags)
                }
            );
        }
        s
    })?;
    if report.all_green() {
        Ok(())
    } else {
        Err(Failure::Flagged)
    }
}

fn lambda_min_at(ss: &StateSet, gamma: f64, probe: &ProbeSpec) -> Result<f64, Failure> {
    let gammas = EfficiencyMatrix::uniform(ss.len(), gamma)?;
    Ok(herm_eig(&residual_matrix(ss, &gammas, probe)?)?.min())
}

fn cmd_gamma_max(cli: &Cli, ss: &StateSet) -> Outcome {
    if ss.len() != 3 {
        return Err(Failure::Malformed(format!(
            "gamma-max needs 3 states, got {}",
            ss.len()
        )));
    }
    let gram = ss.gram();
    if let Some((t, i, j)) = gram.min_overlap() {
        if t <= qnot_core::feasibility::ZERO_OVERLAP_TOL {
            return Err(Error::ZeroOverlap { i, j }.into());
        }
    }
    let input = TripleBoundInput::from_gram(&gram)?;
    let probe = input.probe();
    let closed = triple_bound(&input)?;
    let oracle = grid_oracle_triple(&gram, &probe, DEFAULT_RESOLUTION)?;
    let diff = (closed.gamma_max - oracle).abs();
    let phases = probe.phases().unwrap_or_default().to_vec();
    let closed_dto = GammaResultDto {
        gamma_max: closed.gamma_max,
        method: ResultMethod::ClosedForm,
        probe_phases: phases.clone(),
        lambda_min_at_boundary: Some(lambda_min_at(ss, closed.gamma_max, &probe)?),
        gammas: None,
    };
    let oracle_dto = GammaResultDto {
        gamma_max: oracle,
        method: ResultMethod::Bisection,
        probe_phases: phases,
        lambda_min_at_boundary: Some(lambda_min_at(ss, oracle, &probe)?),
        gammas: None,
    };
    let doc = json!({
        "closed_form": closed_dto,
        "oracle": oracle_dto,
        "difference": diff,
        "delta": input.delta(),
        "a": input.a(),
        "b": input.b(),
        "roots": {
            "determinant": closed.determinant.roots,
            "minor": closed.minor.roots,
        },
        "agree": diff <= AGREEMENT_TOL,
    });
    emit(cli, &doc, || {
        let mut s = polar_gram(&gram);
        let _ = writeln!(
            s,
            "delta = {}  a = {}  b = {}",
            input.delta(),
            input.a(),
            input.b()
        );
        let _ = writeln!(s, "closed form: {:.12}", closed.gamma_max);
        let _ = writeln!(s, "oracle:      {oracle:.12}");
        let _ = writeln!(s, "difference:  {diff:e}");
        s
    })?;
    if diff <= AGREEMENT_TOL {
        Ok(())
    } else {
        Err(Failure::Disagreement)
    }
}

fn cmd_oracle(cli: &Cli, ss: &StateSet) -> Outcome {
    let equal = search_gamma(ss, SearchPolicy::EqualGamma)?;
    let coordinate = search_gamma(ss, SearchPolicy::PerStateCoordinate)?;
    let at_phases = match &cli.phases {
        Some(p) => {
            let probe = ProbeSpec::PhaseVector(p.clone());
            let (gamma, lmin) = equal_gamma_oracle(&ss.gram(), &probe, DEFAULT_RESOLUTION)?;
            Some(GammaResultDto {
                gamma_max: gamma,
                method: ResultMethod::Bisection,
                probe_phases: p.clone(),
                lambda_min_at_boundary: Some(lmin),
                gammas: None,
            })
        }
        None => None,
    };
    let equal_dto = GammaResultDto::from(&equal);
    let coordinate_dto = GammaResultDto::from(&coordinate);
    let doc = json!({
        "equal_gamma": equal_dto,
        "coordinate": coordinate_dto,
        "coordinate_gammas": coordinate.gammas.gammas(),
        "coordinate_mean": coordinate.mean_gamma,
        "at_phases": at_phases,
    });
    emit(cli, &doc, || {
        let mut s = polar_gram(&ss.gram());
        let _ = writeln!(
            s,
            "equal gamma ({}): {:.12}  phases = {:?}",
            equal.method.as_str(),
            equal.mean_gamma,
            equal_dto.probe_phases
        );
        let _ = writeln!(
            s,
            "coordinate ({}): mean {:.12}  gammas = {:?}",
            coordinate.method.as_str(),
            coordinate.mean_gamma,
            coordinate.gammas.gammas()
        );
        if let Some(r) = &at_phases {
            let _ = writeln!(s, "equal gamma at given phases: {:.12}", r.gamma_max);
        }
        s
    })
}
