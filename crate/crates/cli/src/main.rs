mod plot;

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use supcalc::harness::{fuzz, FuzzParams, MAX_FUZZ_COUNT};
use supcalc::instance::InstanceFile;
use supcalc::rational::Rational;
use supcalc::sup::{check_identity, default_point, CheckInstance, CheckParams, Identity};
use supcalc::{Error, QVector};

const EXIT_FALSIFIED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GENERATION: u8 = 3;

#[derive(Parser)]
#[command(name = "supcalc", version, about = "Exact conjugates, epsilon-subdifferentials and supremum-function identity checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print f(x), sampled conjugate values and the eps-active labels.
    Eval {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// Run identity checks and stream one JSON report per line.
    Verify {
        #[arg(long)]
        instance: PathBuf,
        /// Comma-separated identity IDs, or ALL.
        #[arg(long)]
        identity: String,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value = "0")]
        eps: String,
        #[arg(long)]
        gamma_grid: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Generate seeded instances and run the selected identities on each.
    Fuzz {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value = "ALL")]
        identity: String,
        /// Use this single eps instead of the default pair 0, 1/3.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        gamma_grid: Option<String>,
        #[arg(long, default_value_t = 3)]
        dim_max: usize,
        /// JSONL destination; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an SVG of a 1-D or 2-D instance.
    Plot {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_enum)]
        what: PlotKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value = "0")]
        eps: String,
    },
    /// List the identity catalog.
    Identities,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlotKind {
    Function,
    Subdiff,
    Conjugate,
}

enum Failure {
    Usage(serde_json::Value),
    Generation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Generation(m) => Failure::Generation(m),
            Error::UnknownIdentity(id) => Failure::Usage(json!({
                "error": "unknown-identity",
                "message": format!("unknown identity `{id}`"),
                "valid": Identity::ALL.iter().map(|i| i.as_str()).collect::<Vec<_>>(),
            })),
            other => Failure::Usage(json!({"error": error_kind(&other), "message": other.to_string()})),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DimensionMismatch { .. } => "dimension-mismatch",
        Error::CapacityExceeded { .. } => "capacity-exceeded",
        Error::EmptySet(_) => "empty-set",
        Error::ImproperFunction(_) => "improper-function",
        Error::IndeterminateSum => "indeterminate-sum",
        Error::InvalidInput(_) => "invalid-input",
        Error::UnknownIdentity(_) => "unknown-identity",
        Error::Generation(_) => "generation",
        Error::Parse(_) => "schema",
    }
}

fn usage(kind: &str, message: impl Into<String>) -> Failure {
    Failure::Usage(json!({"error": kind, "message": message.into()}))
}

fn load(path: &PathBuf) -> Result<CheckInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage("io", format!("{}: {e}", path.display())))?;
    Ok(InstanceFile::parse(&text)?.build()?)
}

fn rational(s: &str) -> Result<Rational, Failure> {
    s.trim().parse::<Rational>().map_err(|_| usage("parse", format!("not a rational: `{s}`")))
}

fn rationals(csv: &str) -> Result<Vec<Rational>, Failure> {
    csv.split(',').map(rational).collect()
}

fn point(csv: &str, dim: usize) -> Result<QVector, Failure> {
    let v = QVector::new(rationals(csv)?);
    if v.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.dim() }.into());
    }
    Ok(v)
}

fn identities(list: &str) -> Result<Vec<Identity>, Failure> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Identity::ALL.to_vec());
    }
    Ok(list.split(',').map(|s| s.parse::<Identity>()).collect::<supcalc::Result<_>>()?)
}

fn out_line(s: &str) {
    let mut o = std::io::stdout().lock();
    let _ = writeln!(o, "{s}");
}

fn cmd_eval(instance: &PathBuf, pt: &str, eps: &str) -> Result<u8, Failure> {
    let inst = load(instance)?;
    let f = &inst.family;
    let x = point(pt, f.dim())?;
    let eps = rational(eps)?;
    let sup = f.sup_function();
    let members: serde_json::Map<String, serde_json::Value> =
        f.members().map(|(l, g)| (l.to_string(), json!(g.eval(&x).to_string()))).collect();
    let mut duals: Vec<QVector> = sup.pieces().iter().map(|p| p.a.clone()).collect();
    duals.push(QVector::zeros(f.dim()));
    duals.sort();
    duals.dedup();
    let conj = if sup.is_proper() {
        duals
            .iter()
            .map(|y| Ok(json!({"at": y, "value": sup.conjugate_eval(y)?.to_string()})))
            .collect::<Result<Vec<_>, Failure>>()?
    } else {
        Vec::new()
    };
    // the eps-active set is only defined where f is finite
    let active = match sup.eval(&x) {
        supcalc::ExtendedRational::Finite(_) => json!(f.active_indices(&x, &eps)?),
        _ => serde_json::Value::Null,
    };
    out_line(&json!({"f": sup.eval(&x).to_string(), "members": members, "conjugate": conj, "active": active}).to_string());
    Ok(0)
}

fn gamma_grid(s: &Option<String>) -> Result<Option<Vec<Rational>>, Failure> {
    s.as_deref().map(rationals).transpose()
}

fn cmd_verify(instance: &PathBuf, ids: &str, pt: Option<&str>, eps: &str, grid: &Option<String>, seed: u64) -> Result<u8, Failure> {
    let ids = identities(ids)?;
    let inst = load(instance)?;
    let x = match pt {
        Some(p) => Some(point(p, inst.family.dim())?),
        None => default_point(&inst.family)?,
    };
    let mut params = CheckParams { x, eps: rational(eps)?, seed, ..CheckParams::default() };
    if let Some(g) = gamma_grid(grid)? {
        params.gamma_grid = g;
    }
    let mut code = 0;
    for id in ids {
        let r = check_identity(id, &inst, &params)?;
        if r.is_fail() {
            code = EXIT_FALSIFIED;
        }
        out_line(&r.to_jsonl());
    }
    Ok(code)
}

#[allow(clippy::too_many_arguments)]
fn cmd_fuzz(seed: u64, count: usize, ids: &str, eps: &Option<String>, grid: &Option<String>, dim_max: usize, out: &Option<PathBuf>) -> Result<u8, Failure> {
    if count > MAX_FUZZ_COUNT {
        return Err(usage("invalid-input", format!("count {count} is above the cap {MAX_FUZZ_COUNT}")));
    }
    if dim_max == 0 || dim_max > supcalc::generate::MAX_DIM {
        return Err(usage("invalid-input", format!("dim-max must be in 1..={}", supcalc::generate::MAX_DIM)));
    }
    let mut p = FuzzParams::new(seed, count, identities(ids)?);
    p.dim_max = dim_max;
    if let Some(e) = eps {
        p.eps_values = vec![rational(e)?];
    }
    if let Some(g) = gamma_grid(grid)? {
        p.check.gamma_grid = g;
    }
    let outcome = fuzz(&p)?;
    let jsonl = outcome.to_jsonl();
    match out {
        Some(path) => {
            fs::write(path, &jsonl).map_err(|e| usage("io", format!("{}: {e}", path.display())))?;
            print!("{}", outcome.summary_table());
        }
        None => {
            print!("{jsonl}");
            eprint!("{}", outcome.summary_table());
        }
    }
    Ok(if outcome.failures() > 0 { EXIT_FALSIFIED } else { 0 })
}

fn cmd_plot(instance: &PathBuf, what: PlotKind, out: &PathBuf, pt: Option<&str>, eps: &str) -> Result<u8, Failure> {
    let inst = load(instance)?;
    let f = &inst.family;
    if f.dim() > 2 {
        return Err(usage("invalid-input", format!("plots need dimension 1 or 2, got {}", f.dim())));
    }
    let sup = f.sup_function();
    let svg = match what {
        PlotKind::Function => plot::function_svg(sup, "f = sup f_t")?,
        PlotKind::Conjugate => plot::function_svg(sup.conjugate()?, "f*")?,
        PlotKind::Subdiff => {
            let x = match pt {
                Some(p) => point(p, f.dim())?,
                None => default_point(f)?.ok_or_else(|| usage("empty-set", "supremum has empty domain"))?,
            };
            let eps = rational(eps)?;
            plot::set_svg(&sup.eps_subdifferential(&x, &eps)?, &format!("eps-subdifferential at {x}, eps = {eps}"))?
        }
    };
    fs::write(out, svg).map_err(|e| usage("io", format!("{}: {e}", out.display())))?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Eval { instance, point, eps } => cmd_eval(&instance, &point, &eps),
        Command::Verify { instance, identity, point, eps, gamma_grid, seed } => {
            cmd_verify(&instance, &identity, point.as_deref(), &eps, &gamma_grid, seed)
        }
        Command::Fuzz { seed, count, identity, eps, gamma_grid, dim_max, out } => {
            cmd_fuzz(seed, count, &identity, &eps, &gamma_grid, dim_max, &out)
        }
        Command::Plot { instance, what, out, point, eps } => cmd_plot(&instance, what, &out, point.as_deref(), &eps),
        Command::Identities => {
            for id in Identity::ALL {
                out_line(&format!("{:<5} {}", id.as_str(), id.statement()));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(v)) => {
            out_line(&v.to_string());
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Generation(m)) => {
            out_line(&json!({"error": "generation", "message": m}).to_string());
            ExitCode::from(EXIT_GENERATION)
        }
    }
}
