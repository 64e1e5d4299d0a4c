//! `ncgeom`: evaluate star products and brackets, and run the identity suites.
//!
//! Exit codes: 0 when everything passes, 1 when a check fails, 2 on usage,
//! parse or configuration errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::io;
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ncgeom_core::corpus::Corpus;
use ncgeom_core::hopf::{Family, TwistSpec};
use ncgeom_core::parse::{parse_function, Coordinates};
use ncgeom_core::scalar::{parse_rat, Rat};
use ncgeom_core::scenario::{theta_from_upper, LatticeScenario, PhaseSpaceScenario};
use ncgeom_core::star::{star_fn, StarContext};
use ncgeom_core::verify::{self, Recorder, Run, Status, Suite, VerifyConfig};
use ncgeom_core::{FunctionExpr, LambdaSeries};

static STDOUT_CLOSED: AtomicBool = AtomicBool::new(false);

/// `println!` that stops printing once the reader has gone away, as with
/// `| head`, so the command still finishes and reports its exit status.
macro_rules! out {
    ($($arg:tt)*) => {
        if !STDOUT_CLOSED.load(Ordering::Relaxed) {
            if let Err(e) = writeln!(io::stdout(), $($arg)*) {
                if e.kind() != io::ErrorKind::BrokenPipe {
                    panic!("writing to stdout: {e}");
                }
                STDOUT_CLOSED.store(true, Ordering::Relaxed);
            }
        }
    };
}

#[derive(Parser)]
#[command(name = "ncgeom", version, about = "Exact twist-deformed calculus and identity verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Star product of two functions through order N.
    Star(StarArgs),
    /// Deformed and undeformed Poisson brackets on phase space.
    Bracket(BracketArgs),
    /// Run identity suites and write a JSON report.
    Verify(VerifyArgs),
    /// Structure equations and Bianchi identities for random connections.
    Geometry(GeometryArgs),
    /// Mode-algebra relations on a momentum lattice.
    Modes(ModesArgs),
}

#[derive(Args)]
struct OrderArg {
    /// Truncation order in the deformation parameter.
    #[arg(long, env = "NC_ORDER")]
    order: Option<u32>,
}

#[derive(Args)]
struct StarArgs {
    /// Dimension of the base space.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, value_parser = Family::parse, default_value = "moyal")]
    family: Family,
    /// Upper triangle of the Moyal matrix, comma separated: `t12,t13,..,t23`.
    #[arg(long, default_value = "")]
    theta: String,
    #[command(flatten)]
    order: OrderArg,
    /// Left factor, e.g. `x1^2 - 1/2*e(1,0)`.
    #[arg(long)]
    f: String,
    /// Right factor.
    #[arg(long)]
    g: String,
}

#[derive(Args)]
struct BracketArgs {
    /// Phase-space scenario: `{"n", "theta", "hamiltonian", "observables"}`.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Degrees of freedom when no scenario is given.
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value = "")]
    theta: String,
    #[command(flatten)]
    order: OrderArg,
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    g: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    /// Where to write the JSON report.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Leave the wall-time table out of the report.
    #[arg(long)]
    no_timing: bool,
    /// Print only the summary line.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Suites to run: twist, starcalc, geometry, poisson, modes. Repeatable or comma separated.
    #[arg(long = "suite", value_parser = Suite::parse, value_delimiter = ',')]
    suites: Vec<Suite>,
    /// Twist families: moyal, jordanian, ext_jordanian.
    #[arg(long = "family", value_parser = Family::parse, value_delimiter = ',')]
    families: Vec<Family>,
    #[command(flatten)]
    order: OrderArg,
    /// Seed for the generated inputs.
    #[arg(long)]
    seed: Option<u64>,
    /// Functions per law in the star-calculus and Poisson suites.
    #[arg(long)]
    samples: Option<usize>,
    /// Random connections per family in the geometry suite.
    #[arg(long)]
    connections: Option<usize>,
    /// Highest monomial degree on which operators are compared.
    #[arg(long)]
    eval_degree: Option<u32>,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct GeometryArgs {
    /// Twist families: moyal, jordanian, ext_jordanian.
    #[arg(long = "family", value_parser = Family::parse, value_delimiter = ',')]
    families: Vec<Family>,
    #[command(flatten)]
    order: OrderArg,
    /// Seed for the generated connections.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Random connections per family, in addition to the flat one.
    #[arg(long, default_value_t = 2)]
    connections: usize,
    #[command(flatten)]
    report: ReportArgs,
}

#[derive(Args)]
struct ModesArgs {
    /// Lattice scenario: `{"d", "momenta", "theta", "E"}`. Without one, the
    /// built-in lattices with two and four momenta are used.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Monomial pairs for the correspondence check.
    #[arg(long, default_value_t = 30)]
    pairs: usize,
    #[command(flatten)]
    report: ReportArgs,
}

/// A failure that maps to exit code 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Usage {
    fn from(e: E) -> Self {
        Usage(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Star(a) => cmd_star(a).map(|()| true),
        Command::Bracket(a) => cmd_bracket(a).map(|()| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Geometry(a) => cmd_geometry(a),
        Command::Modes(a) => cmd_modes(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn parse_upper(text: &str, dim: usize) -> anyhow::Result<Vec<Vec<Rat>>> {
    let upper: Vec<Rat> = if text.trim().is_empty() {
        vec![Rat::from_integer(0.into()); dim * dim.saturating_sub(1) / 2]
    } else {
        text.split(',').map(parse_rat).collect::<Result<_, _>>()?
    };
    Ok(theta_from_upper(dim, &upper)?)
}

fn resolve_order(arg: &OrderArg, fallback: u32) -> anyhow::Result<u32> {
    let n = arg.order.unwrap_or(fallback);
    if n == 0 {
        bail!("truncation order must be at least 1");
    }
    Ok(n)
}

fn render(s: &LambdaSeries<FunctionExpr>, coords: Coordinates) -> String {
    let parts: Vec<String> = s
        .iter()
        .map(|(d, f)| {
            let body = f.render_with(&|i| coords.name(i));
            match d {
                0 => body,
                1 => format!("L*({body})"),
                _ => format!("L^{d}*({body})"),
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

fn cmd_star(a: StarArgs) -> Result<(), Usage> {
    let order = resolve_order(&a.order, 4)?;
    let spec = match a.family {
        Family::Moyal => TwistSpec::moyal(parse_upper(&a.theta, a.dim)?),
        Family::Jordanian => TwistSpec::jordanian_default(a.dim),
        Family::ExtJordanian => TwistSpec::ext_jordanian_default(a.dim),
    };
    let ctx = StarContext::new(&spec, order)?;
    let coords = Coordinates::Plain(a.dim);
    let f = parse_function(&a.f, coords).context("--f")?;
    let g = parse_function(&a.g, coords).context("--g")?;
    out!("{}", render(&star_fn(&f, &g, &ctx)?, coords));
    Ok(())
}

fn cmd_bracket(a: BracketArgs) -> Result<(), Usage> {
    let order = resolve_order(&a.order, 4)?;
    let scenario = match &a.config {
        Some(path) => PhaseSpaceScenario::from_json(&read(path)?)?,
        None => {
            let theta = parse_upper(&a.theta, a.n)?;
            let mut upper = Vec::new();
            for i in 0..a.n {
                for j in i + 1..a.n {
                    upper.push(ncgeom_core::scenario::RatLit::Text(ncgeom_core::scalar::format_rat(&theta[i][j])));
                }
            }
            PhaseSpaceScenario { n: a.n, theta: upper, hamiltonian: None, observables: Vec::new() }
        }
    };
    let loaded = scenario.load(order)?;
    let (ps, coords) = (&loaded.space, loaded.coords);
    match (&a.f, &a.g) {
        (Some(f), Some(g)) => {
            let f = parse_function(f, coords).context("--f")?;
            let g = parse_function(g, coords).context("--g")?;
            out!("{{f, g}}_* = {}", render(&ps.star_poisson(&f, &g)?, coords));
            out!("{{f, g}}   = {}", ps.bracket(&f, &g)?.render_with(&|i| coords.name(i)));
        }
        (None, None) => {}
        _ => return Err(anyhow::anyhow!("--f and --g must be given together").into()),
    }
    if let Some(h) = &loaded.hamiltonian {
        for (q, src) in loaded.observables.iter().zip(&scenario.observables) {
            out!("d/dt {src} = {}", render(&ps.time_evolution(h, q)?, coords));
        }
        if !loaded.observables.is_empty() {
            let report = ps.constants_check(h, &loaded.observables)?;
            out!("hamiltonian twist-invariant: {}", report.hamiltonian_invariant);
            for r in &report.residuals {
                out!("{:<24} {:?}", r.name, r.counts);
            }
        }
    } else if a.f.is_none() {
        return Err(anyhow::anyhow!("nothing to do: give --f and --g or a scenario with a hamiltonian").into());
    }
    Ok(())
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes through a temporary file in the target directory so readers
/// never see a partial report.
fn write_atomic(path: &Path, text: &str) -> anyhow::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(text.as_bytes())?;
    // Temporary files are created owner-only; a report should not be.
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn finish(run: &Run, args: &ReportArgs) -> Result<bool, Usage> {
    if !args.quiet {
        for (c, t) in run.report.checks.iter().zip(&run.timings) {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Error => "ERROR",
            };
            let detail = c.message.as_deref().map(|m| format!(" ({m})")).unwrap_or_default();
            out!("{status:<5} {:<60} {:?} {:.1}ms{detail}", c.id, c.counts, t.micros as f64 / 1000.0);
        }
    }
    let s = &run.report.summary;
    out!("{} checks: {} passed, {} failed", s.total, s.passed, s.failed);
    if let Some(path) = &args.output {
        let text = if args.no_timing { run.report.to_json() } else { run.to_json_with_timing() };
        write_atomic(path, &text)?;
    }
    Ok(run.report.all_passed())
}

fn cmd_verify(a: VerifyArgs) -> Result<bool, Usage> {
    let mut config = match &a.config {
        Some(path) => VerifyConfig::from_json(&read(path)?)?,
        None => VerifyConfig::default(),
    };
    if !a.suites.is_empty() {
        config.suites = a.suites.clone();
    }
    if !a.families.is_empty() {
        config.families = a.families.clone();
    }
    if let Some(n) = a.order.order {
        config.order = n;
    }
    config.seed = a.seed.unwrap_or(config.seed);
    config.samples = a.samples.unwrap_or(config.samples);
    config.connections = a.connections.unwrap_or(config.connections);
    config.eval_degree = a.eval_degree.unwrap_or(config.eval_degree);
    config.validate()?;
    finish(&verify::run(&config), &a.report)
}

fn cmd_geometry(a: GeometryArgs) -> Result<bool, Usage> {
    let mut config = VerifyConfig { suites: vec![Suite::Geometry], seed: a.seed, connections: a.connections, ..VerifyConfig::default() };
    config.geometry_order = resolve_order(&a.order, config.geometry_order)?;
    if !a.families.is_empty() {
        config.families = a.families;
    }
    config.validate()?;
    finish(&verify::run(&config), &a.report)
}

fn cmd_modes(a: ModesArgs) -> Result<bool, Usage> {
    let lattices = match &a.config {
        Some(path) => vec![("scenario".to_string(), LatticeScenario::from_json(&read(path)?)?.load()?)],
        None => verify::mode_lattices(),
    };
    let config = VerifyConfig { suites: vec![Suite::Modes], seed: a.seed, mode_pairs: a.pairs, ..VerifyConfig::default() };
    let mut rec = Recorder::new(Suite::Modes);
    let mut corpus = Corpus::new(a.seed);
    for (name, lat) in &lattices {
        verify::lattice_checks(&mut rec, &mut corpus, &config, name, lat);
    }
    let (checks, timings) = rec.finish();
    finish(&verify::assemble(&config, checks, timings), &a.report)
}
