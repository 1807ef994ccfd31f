//! The `monoroot` command line. Exit codes: 0 success, 1 hypothesis
//! violation (including failed verification), 2 input error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::bench::{parse_sweep, rows_to_csv, run_bench, BenchConfig, Solver};
use crate::cake::{random_three_group_instance, solve_three_groups, verify_near_envy_free, CakeInstance, CakeSpec};
use crate::discretize::{
    check_delta_continuity, check_monotonicity, check_positive_switching, check_strict_switching,
    check_sum_switching, CheckConfig, CheckReport,
};
use crate::domain::{MonotoneProfile, DEFAULT_SCAN_CAP};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::families::Family;
use crate::instance::{Instance, InstanceFile};
use crate::root2d::Mode2D;
use crate::rootnd::{check_lattice_claims, tarski_map, BaseCase};

#[derive(Parser, Debug)]
#[command(name = "monoroot", version, about = "Root finding for switching and monotone sign functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Bisection on a one-dimensional instance.
    Solve1d(SolveArgs),
    /// Two-dimensional solver selected by --mode.
    Solve2d(SolveArgs),
    /// Recursive solver for fields decreasing in every other variable.
    Solvend {
        #[command(flatten)]
        args: SolveArgs,
        #[arg(long, value_enum, default_value_t = BaseArg::Exdiag2d)]
        base: BaseArg,
    },
    /// Near envy-free division among three groups.
    Cake(CakeArgs),
    /// Evaluation counts over a sweep of grid spacings.
    Bench(BenchArgs),
    /// Checks a structural property of an instance.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BaseArg {
    Exdiag2d,
    Bisection1d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug)]
struct InstanceArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "family")]
    instance: Option<PathBuf>,
    /// Generate the instance from a family instead of a file.
    #[arg(long)]
    family: Option<Family>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dimension for dimension-generic families.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Two-dimensional solver mode (diag, exdiag, sum); also selects the
    /// variant of mode-dependent families.
    #[arg(long, default_value = "diag")]
    mode: Mode2D,
    /// Grid spacing, a power of two such as 2^-10.
    #[arg(long, default_value = "2^-10")]
    delta: Dyadic,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Write the result here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Include the solver trace.
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct CakeArgs {
    /// Cake instance JSON file.
    #[arg(long, conflicts_with = "agents")]
    instance: Option<PathBuf>,
    /// Generate this many random piecewise-constant agents instead.
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Precision for generated instances.
    #[arg(long, default_value = "2^-10")]
    r: Dyadic,
    #[arg(long)]
    trace: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Spacings as `2^-a..2^-b` or a comma-separated list.
    #[arg(long, default_value = "2^-4..2^-20")]
    sweep: String,
    /// First seed; seeds `seed .. seed + reps` are run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    reps: u64,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value = "diag")]
    mode: Mode2D,
    /// Write 0 in the wall_time column so output is reproducible.
    #[arg(long)]
    no_timing: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Property {
    DeltaContinuity,
    PositiveSwitching,
    StrictSwitching,
    SumSwitching,
    MonotoneProfile,
    Lattice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    /// The conditions the instance is constructed to satisfy.
    Declared,
    /// All diagonal increasing and all ex-diagonal decreasing conditions.
    Canonical,
    ExDiagonal,
    Alternating,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum)]
    property: Property,
    #[arg(long, value_enum, default_value_t = ProfileArg::Declared)]
    profile: ProfileArg,
    /// Largest grid checked exhaustively; larger grids are sampled.
    #[arg(long, default_value_t = 1 << 22)]
    cap: u128,
    #[command(flatten)]
    output: OutputArgs,
}

/// Runs the command line with the given arguments (including the program
/// name) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    let output = match &cli.command {
        Command::Solve1d(a) | Command::Solve2d(a) | Command::Solvend { args: a, .. } => &a.output,
        Command::Cake(a) => &a.output,
        Command::Bench(a) => &a.output,
        Command::Verify(a) => &a.output,
    };
    let result = dispatch(&cli.command);
    let (code, body) = match result {
        Ok((ok, body)) => (if ok { 0 } else { 1 }, body),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            let code = if e.is_hypothesis_violation() { 1 } else { 2 };
            let doc = json!({"error": e.kind(), "message": e.to_string()});
            (code, format!("{}\n", serde_json::to_string_pretty(&doc).expect("plain JSON")))
        }
    };
    match &output.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &body) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return 2;
            }
        }
        None => {
            let _ = stdout.write_all(body.as_bytes());
        }
    }
    code
}

type Outcome = Result<(bool, String)>;

fn dispatch(cmd: &Command) -> Outcome {
    match cmd {
        Command::Solve1d(a) => solve(a, Solver::Bisection),
        Command::Solve2d(a) => solve(a, Solver::Planar(a.instance.mode)),
        Command::Solvend { args, base } => solve(
            args,
            Solver::Recursive(match base {
                BaseArg::Exdiag2d => BaseCase::Exdiag2d,
                BaseArg::Bisection1d => BaseCase::Bisection1d,
            }),
        ),
        Command::Cake(a) => cake(a),
        Command::Bench(a) => bench(a),
        Command::Verify(a) => verify(a),
    }
}

fn load_instance(a: &InstanceArgs) -> Result<Instance> {
    let file = match (&a.instance, a.family) {
        (Some(path), _) => InstanceFile::load(path)?,
        (None, Some(family)) => {
            let cells = match a.delta.log2() {
                Some(k) if (-30..0).contains(&k) => 1u64 << -k,
                _ => return Err(Error::Input(format!("delta must be 2^-k with 1 <= k <= 30, got {}", a.delta))),
            };
            InstanceFile::from_family(family, a.dim, a.mode, cells, a.seed)
        }
        (None, None) => return Err(Error::Input("give --instance or --family".into())),
    };
    file.build()
}

fn render(value: &Value, csv: Option<String>, format: Format) -> String {
    match (format, csv) {
        (Format::Csv, Some(table)) => table,
        _ => format!("{}\n", serde_json::to_string_pretty(value).expect("plain JSON")),
    }
}

fn solve(a: &SolveArgs, solver: Solver) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let delta = a.instance.delta;
    let grid = inst.grid(delta)?;
    let field = inst.signs(delta)?;
    let out = solver.run(&*field)?;
    let signs = field.eval(&out.index.0)?;
    let root = grid.coords_f64(&out.index.0);
    let mut doc = json!({
        "root": root,
        "index": out.index.0,
        "signs": signs.as_i8(),
        "evaluations": out.evaluations,
        "delta": grid.delta().to_string(),
    });
    if let Some(eps) = inst.epsilon_for(delta) {
        doc["epsilon"] = json!(eps);
    }
    if a.trace {
        doc["trace"] = out.trace.clone();
    }
    let d = root.len();
    let mut header: Vec<String> = (1..=d).map(|j| format!("x{j}")).collect();
    header.extend((1..=d).map(|j| format!("i{j}")));
    header.push("evaluations".into());
    let mut row: Vec<String> = root.iter().map(|v| v.to_string()).collect();
    row.extend(out.index.0.iter().map(|v| v.to_string()));
    row.push(out.evaluations.to_string());
    let csv = format!("{}\n{}\n", header.join(","), row.join(","));
    Ok((true, render(&doc, Some(csv), a.output.format)))
}

fn cake(a: &CakeArgs) -> Outcome {
    let instance = match (&a.instance, a.agents) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
            let spec: CakeSpec =
                serde_json::from_str(&text).map_err(|e| Error::Input(format!("cake instance JSON: {e}")))?;
            CakeInstance::from_spec(&spec)?
        }
        (None, Some(n)) => {
            if n < 3 {
                return Err(Error::Input(format!("need at least 3 agents, got {n}")));
            }
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(a.seed);
            random_three_group_instance(&mut rng, n, a.r)?
        }
        (None, None) => return Err(Error::Input("give --instance or --agents".into())),
    };
    let mut alloc = solve_three_groups(&instance)?;
    if !a.trace {
        alloc.trace = None;
    }
    let report = verify_near_envy_free(&alloc, &instance);
    let doc = json!({"allocation": alloc, "verification": report});
    let mut csv = String::from("agent,piece,corner,shift,ok\n");
    for (c, check) in alloc.certificates.iter().zip(&report.agents) {
        let corner: Vec<String> = c.corner.iter().map(Dyadic::to_string).collect();
        csv.push_str(&format!("{},{},{},{},{}\n", c.agent, c.piece, corner.join(";"), check.shift, check.ok));
    }
    Ok((report.ok, render(&doc, Some(csv), a.output.format)))
}

fn bench(a: &BenchArgs) -> Outcome {
    if a.reps == 0 {
        return Err(Error::Input("--reps must be positive".into()));
    }
    let cfg = BenchConfig {
        family: a.family,
        dim: a.dim,
        mode: a.mode,
        deltas: parse_sweep(&a.sweep)?,
        seeds: (a.seed..a.seed + a.reps).collect(),
        timing: !a.no_timing,
    };
    let rows = run_bench(&cfg)?;
    let body = match a.output.format {
        Format::Csv => rows_to_csv(&rows),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&rows).expect("plain JSON")),
    };
    Ok((true, body))
}

fn verify(a: &VerifyArgs) -> Outcome {
    let inst = load_instance(&a.instance)?;
    let field = inst.signs(a.instance.delta)?;
    let cfg = CheckConfig {
        cap: a.cap,
        seed: a.instance.seed,
        ..CheckConfig::default()
    };
    let d = inst.dim();
    let report: CheckReport = match a.property {
        Property::DeltaContinuity => check_delta_continuity(&*field, &cfg)?,
        Property::PositiveSwitching => check_positive_switching(&*field, &cfg)?,
        Property::StrictSwitching => check_strict_switching(&*field, &cfg)?,
        Property::SumSwitching => check_sum_switching(&*field, &cfg)?,
        Property::MonotoneProfile => {
            let profile = match a.profile {
                ProfileArg::Declared => inst.declared.clone(),
                ProfileArg::Canonical => MonotoneProfile::canonical(d),
                ProfileArg::ExDiagonal => MonotoneProfile::ex_diagonal_decreasing(d),
                ProfileArg::Alternating => MonotoneProfile::alternating(d),
            };
            check_monotonicity(&*field, &profile, &cfg)?
        }
        Property::Lattice => {
            let cap = a.cap.min(DEFAULT_SCAN_CAP);
            let r = check_lattice_claims(&tarski_map(&*field), cap)?;
            let passed = r.passed();
            let doc = json!({"property": "lattice", "passed": passed, "report": r});
            let csv = format!(
                "points_checked,pairs_checked,order_violations,escapes,fixed_points\n{},{},{},{},{}\n",
                r.points_checked,
                r.pairs_checked,
                r.order_violations.len(),
                r.escapes.len(),
                r.fixed_points.len()
            );
            return Ok((passed, render(&doc, Some(csv), a.output.format)));
        }
    };
    let passed = report.passed();
    let doc = json!({
        "property": report.property,
        "passed": passed,
        "holding": report.holding_count(),
        "conditions_checked": report.conditions.len(),
        "report": report,
    });
    let mut csv = String::from("component,variable,direction,holds,violations\n");
    for c in &report.conditions {
        let var = c.variable.map(|v| (v + 1).to_string()).unwrap_or_default();
        let dir = c.direction.map(|m| format!("{m:?}").to_lowercase()).unwrap_or_default();
        csv.push_str(&format!("{},{},{},{},{}\n", c.component + 1, var, dir, c.holds, c.violations));
    }
    Ok((passed, render(&doc, Some(csv), a.output.format)))
}
