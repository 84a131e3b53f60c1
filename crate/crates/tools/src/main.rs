use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use muscle_core::element::{solve_quasi_static, BcProgram, HexElement, SolverOptions};
use muscle_core::fitting::fit;
use muscle_core::loadcases::{analytical_first_pk, stress_free_active_stretch};
use muscle_core::materials::{BleParams, EhretParams};
use muscle_core::{ActivationInput, LoadCase, LoadCaseSpec, Material, ModelKind, MuscleState};
use muscle_tools::export::{
    sweep, write_stretch_curves, write_sweep, write_time_curves, write_trajectory,
};
use muscle_tools::fitconfig::{human_summary, FitConfig, FitReport};
use muscle_tools::grid::Grid;
use muscle_tools::params::material_from;
use muscle_tools::synthetic::{generate_synthetic, Noise};
use muscle_tools::{Result, ToolError};

/// Active skeletal muscle material models: closed-form load-case
/// responses, single-element verification and parameter fitting.
///
/// Exit codes: 0 success, 2 invalid input, 3 numerical failure or a fit
/// that did not converge.
#[derive(Parser)]
#[command(name = "muscle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form stress over a grid, optionally next to the element
    /// solution. CSV columns: value,p_analytical_kpa[,p_element_kpa].
    EvalSweep(SweepArgs),
    /// Fits parameters as described by a JSON configuration.
    Fit(FitArgs),
    /// Solves the single hexahedron for one load value and compares with
    /// the closed form.
    VerifyElement(VerifyArgs),
    /// Force-stretch curves (lambda,f_xi,f_active,f_passive) or, with
    /// --time, time functions (time,f_t_twitch,f_t_tanh).
    ActivationCurves(CurveArgs),
    /// Fiber stretch at which the tetanic material is stress free in
    /// uniaxial fiber loading.
    StressFreeStretch(StretchArgs),
    /// Synthetic datasets from the closed forms with optional Gaussian
    /// noise, in the case,state,value,stress_kpa schema.
    GenSynthetic(SyntheticArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Model: ble, wkm, giant or combi.
    #[arg(long, value_parser = parse_model)]
    model: ModelKind,
    /// Parameter file (JSON); the published set when omitted.
    #[arg(long)]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Load case: UTCAF, UTCTF, SAF, PSAF, PSTF or PSTIF.
    #[arg(long, value_parser = parse_case)]
    case: LoadCase,
    /// Muscle state: active (UTCAF only) or passive.
    #[arg(long, value_parser = parse_state, default_value = "passive")]
    state: MuscleState,
    /// Stretch or shear grid start:stop:step, endpoints inclusive.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Add the single-element stress as a third column.
    #[arg(long)]
    with_element: bool,
    /// Penalty parameter of the element solve (bulk modulus in kPa for ble).
    #[arg(long)]
    kappa: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Fit configuration (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Report file (JSON); printed after the table when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Load case; omit together with --value for a free contraction.
    #[arg(long, value_parser = parse_case, requires = "value")]
    case: Option<LoadCase>,
    #[arg(long, value_parser = parse_state, default_value = "passive")]
    state: MuscleState,
    /// Final stretch or shear of the load case.
    #[arg(long, requires = "case")]
    value: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    /// Trajectory CSV (step,time,load_value,p_kpa,fiber_stretch,volume_change,iterations).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CurveArgs {
    /// Stretch grid, or time grid (s) with --time.
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Export the time functions instead of the force-stretch curves.
    #[arg(long)]
    time: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StretchArgs {
    /// Single model; all four when omitted.
    #[arg(long, value_parser = parse_model)]
    model: Option<ModelKind>,
    #[arg(long, requires = "model")]
    params: Option<PathBuf>,
}

#[derive(Args)]
struct SyntheticArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Load cases, comma separated or repeated.
    #[arg(long, value_parser = parse_case, value_delimiter = ',', required = true)]
    case: Vec<LoadCase>,
    #[arg(long, value_parser = parse_state, default_value = "passive")]
    state: MuscleState,
    #[arg(long, value_parser = parse_grid)]
    grid: Grid,
    /// Noise standard deviation as a fraction of each dataset's peak |P|.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_model(s: &str) -> std::result::Result<ModelKind, String> {
    s.parse().map_err(|e: muscle_core::Error| e.to_string())
}

fn parse_case(s: &str) -> std::result::Result<LoadCase, String> {
    s.parse().map_err(|e: muscle_core::Error| e.to_string())
}

fn parse_state(s: &str) -> std::result::Result<MuscleState, String> {
    s.parse().map_err(|e: muscle_core::Error| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<Grid, String> {
    s.parse().map_err(|e: ToolError| e.to_string())
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| ToolError::io(p, e))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn with_kappa(material: Material, kappa: Option<f64>) -> Result<Material> {
    match kappa {
        None => Ok(material),
        Some(k) => {
            let m = material.with_kappa(k);
            m.validate()?;
            Ok(m)
        }
    }
}

fn eval_sweep(args: &SweepArgs) -> Result<()> {
    let material = material_from(args.model.model, args.model.params.as_deref())?;
    let spec = LoadCaseSpec::new(args.case, args.state)?;
    let element = if args.with_element {
        Some(with_kappa(material.clone(), args.kappa)?)
    } else {
        if args.kappa.is_some() {
            return Err(ToolError::invalid("--kappa only applies with --with-element"));
        }
        None
    };
    let rows = sweep(&material, spec, &args.grid.values(), element.as_ref())?;
    write_sweep(output(args.out.as_deref())?, &rows, args.with_element)
}

/// Returns whether the fit converged.
fn run_fit(args: &FitArgs) -> Result<bool> {
    let (config, base) = FitConfig::load(&args.config)?;
    let problem = config.problem(&base)?;
    let result = fit(&problem)?;
    let report = FitReport::new(&problem, &result);
    let mut stdout = io::stdout().lock();
    let io_err = |e| ToolError::io("standard output", e);
    write!(stdout, "{}", human_summary(&problem, &result)).map_err(io_err)?;
    match &args.out {
        Some(p) => std::fs::write(p, report.to_json()).map_err(|e| ToolError::io(p, e))?,
        None => write!(stdout, "{}", report.to_json()).map_err(io_err)?,
    }
    Ok(result.converged)
}

fn verify_element(args: &VerifyArgs) -> Result<()> {
    let material = material_from(args.model.model, args.model.params.as_deref())?;
    let solid = with_kappa(material.clone(), args.kappa)?;
    let element = HexElement::unit_cube();
    let mut stdout = io::stdout().lock();
    let io_err = |e| ToolError::io("standard output", e);
    let (traj, case) = match (args.case, args.value) {
        (Some(case), Some(value)) => {
            let spec = LoadCaseSpec::new(case, args.state)?;
            let program = BcProgram::load_case(&element, case, value, spec.state.input());
            let traj = solve_quasi_static(&element, &solid, &program, &SolverOptions::default())?;
            let last = traj.last().ok_or_else(|| ToolError::invalid("empty trajectory"))?;
            let analytical = analytical_first_pk(case, &material, value, &spec.state.input())?;
            let numeric = last.first_pk[case.measured()];
            // a reference at round-off level has no meaningful relative scale
            let deviation = if analytical.abs() < 1e-9 {
                (numeric - analytical).abs()
            } else {
                (numeric - analytical).abs() / analytical.abs()
            };
            writeln!(stdout, "case                {case} ({})", spec.state).map_err(io_err)?;
            writeln!(stdout, "value               {value}").map_err(io_err)?;
            writeln!(stdout, "analytical_kpa      {analytical:.6}").map_err(io_err)?;
            writeln!(stdout, "element_kpa         {numeric:.6}").map_err(io_err)?;
            writeln!(stdout, "relative_deviation  {deviation:.3e}").map_err(io_err)?;
            (traj, Some(case))
        }
        _ => {
            let program = BcProgram::free_contraction(&element, ActivationInput::tetanic());
            let traj = solve_quasi_static(&element, &solid, &program, &SolverOptions::default())?;
            let root = stress_free_active_stretch(&material)?;
            writeln!(stdout, "case                free contraction (tetanic)").map_err(io_err)?;
            writeln!(stdout, "analytical_stretch  {root:.6}").map_err(io_err)?;
            (traj, None)
        }
    };
    let last = traj.last().ok_or_else(|| ToolError::invalid("empty trajectory"))?;
    let dv = (last.volume - traj.reference_volume) / traj.reference_volume;
    writeln!(stdout, "fiber_stretch       {:.6}", last.fiber_stretch).map_err(io_err)?;
    writeln!(stdout, "volume_change       {dv:.3e}").map_err(io_err)?;
    writeln!(stdout, "steps               {}", traj.steps.len()).map_err(io_err)?;
    if let Some(p) = &args.out {
        write_trajectory(output(Some(p))?, &traj, case)?;
    }
    Ok(())
}

fn activation_curves(args: &CurveArgs) -> Result<()> {
    let out = output(args.out.as_deref())?;
    let ble = BleParams::published();
    if args.time {
        write_time_curves(out, &args.grid.values(), &EhretParams::published_twitch().drive, &ble)
    } else {
        write_stretch_curves(out, &args.grid.values(), &EhretParams::published_tanh(), &ble)
    }
}

fn stress_free_stretch(args: &StretchArgs) -> Result<()> {
    let kinds = match args.model {
        Some(k) => vec![k],
        None => ModelKind::ALL.to_vec(),
    };
    let mut stdout = io::stdout().lock();
    for kind in kinds {
        let material = material_from(kind, args.params.as_deref())?;
        let l = stress_free_active_stretch(&material)?;
        writeln!(stdout, "{kind} {l:.6}").map_err(|e| ToolError::io("standard output", e))?;
    }
    Ok(())
}

fn gen_synthetic(args: &SyntheticArgs) -> Result<()> {
    let material = material_from(args.model.model, args.model.params.as_deref())?;
    let specs = args
        .case
        .iter()
        .map(|&c| LoadCaseSpec::new(c, args.state))
        .collect::<muscle_core::Result<Vec<_>>>()?;
    let noise = if args.noise == 0.0 {
        Noise::None
    } else {
        Noise::RelativeToPeak(args.noise)
    };
    let data = generate_synthetic(&material, &specs, &args.grid.values(), noise, args.seed)?;
    muscle_tools::datasets::write_datasets(output(args.out.as_deref())?, &data)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::EvalSweep(a) => eval_sweep(a).map(|_| true),
        Command::Fit(a) => run_fit(a),
        Command::VerifyElement(a) => verify_element(a).map(|_| true),
        Command::ActivationCurves(a) => activation_curves(a).map(|_| true),
        Command::StressFreeStretch(a) => stress_free_stretch(a).map(|_| true),
        Command::GenSynthetic(a) => gen_synthetic(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("muscle: the fit did not converge");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("muscle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
